"""P1 Steklov solver: assembly, DtN operators, spectra, convergence."""

import math

import numpy as np
import pytest

from sloshspec.fem_steklov import (
    SteklovSolveError,
    apply_dtn,
    assemble,
    convergence_study,
    dtn_action,
    dtn_matrix,
    solve_steklov,
)
from sloshspec.geometry.domain import (
    build_rectangle_domain,
    build_triangle_domain,
)
from sloshspec.geometry.mesh import TriangleMesh, generate_mesh
from sloshspec.model_solutions.hanson_lewy import quasimode_trace

from _tables import EX1_TABLE


@pytest.fixture(scope="module")
def iso_system():
    domain = build_triangle_domain(math.pi / 4, math.pi / 4, 1.0)
    mesh = generate_mesh(domain, 0.05)
    return assemble(mesh)


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def test_assemble_requires_steklov_edges():
    domain = build_triangle_domain(math.pi / 4, math.pi / 4, 1.0)
    mesh = generate_mesh(domain, 0.2)
    stripped = TriangleMesh(
        mesh.nodes,
        mesh.triangles,
        tuple((i, j, "neumann") for i, j, _ in mesh.boundary_edges),
        mesh.mesh_size,
        mesh.grading_factor,
    )
    with pytest.raises(SteklovSolveError, match="steklov"):
        assemble(stripped)


def test_surface_mass_matrix_structure(iso_system):
    mass = iso_system.steklov_mass
    assert (mass != mass.T).nnz == 0
    # row sums reproduce the trapezoidal weights, so the total is the
    # exact (chordal) surface length
    assert mass.sum() == pytest.approx(1.0, abs=1e-12)
    assert (np.asarray(mass.sum(axis=1)).ravel() > 0).all()


def test_surface_arclength_runs_from_corner_a(iso_system):
    s = iso_system.s_arclength
    assert s.min() == pytest.approx(0.0, abs=1e-15)
    assert s.max() == pytest.approx(1.0, abs=1e-12)
    # all-Neumann walls: nothing is eliminated
    assert iso_system.s_free_mask.all()
    assert len(iso_system.dirichlet_nodes) == 0
    assert iso_system.interior_count > 0


def test_dirichlet_walls_eliminate_surface_endpoints():
    domain = build_triangle_domain(
        math.pi / 4, math.pi / 4, 1.0, wall_conditions=("dirichlet", "dirichlet")
    )
    mesh = generate_mesh(domain, 0.05)
    system = assemble(mesh)
    assert len(system.dirichlet_nodes) > 0
    assert system.s_free_mask.sum() == len(system.s_path_nodes) - 2
    assert not system.s_free_mask[0]
    assert not system.s_free_mask[-1]
    spec = solve_steklov(domain, 0.05, 3, mesh=mesh)
    assert spec.eigenvalues[0] > 0.5


# ---------------------------------------------------------------------------
# DtN operators
# ---------------------------------------------------------------------------

def test_dtn_matrix_is_symmetric_psd_and_kills_constants(iso_system):
    dtn = dtn_matrix(iso_system)
    D = dtn.matrix
    assert np.array_equal(D, D.T)
    w = np.linalg.eigvalsh(D)
    assert w[0] > -1e-10 * max(1.0, w[-1])
    # all-Neumann tank: constants are exactly in the kernel
    ones = np.ones(D.shape[0])
    assert np.linalg.norm(D @ ones) < 1e-8 * np.linalg.norm(D)
    assert dtn.s_coords.shape == (D.shape[0],)
    assert np.all(np.diff(dtn.s_coords) != 0)


def test_dtn_action_matches_dtn_matrix(iso_system):
    dtn = dtn_matrix(iso_system)
    apply_schur = dtn_action(iso_system)
    rng = np.random.default_rng(0)
    for _ in range(3):
        trace = rng.standard_normal(dtn.matrix.shape[0])
        want = apply_dtn(dtn, trace)
        got = apply_schur(trace)
        assert np.linalg.norm(got - want) < 1e-9 * np.linalg.norm(want)


def test_apply_dtn_rejects_wrong_trace_length(iso_system):
    dtn = dtn_matrix(iso_system)
    with pytest.raises(SteklovSolveError, match="does not match"):
        apply_dtn(dtn, np.ones(dtn.matrix.shape[0] + 3))


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

def test_rectangle_matches_separated_solution():
    # [0, pi] x [-1, 0]: eigenfunctions cos(kx) cosh(k(y+1)) give
    # eigenvalues k tanh(k) below the constant mode at zero
    domain = build_rectangle_domain(math.pi, 1.0)
    spec = solve_steklov(domain, 0.04, 5)
    true = np.array([0.0] + [k * math.tanh(k) for k in range(1, 5)])
    assert abs(spec.eigenvalues[0]) < 1e-10
    rel = np.abs(spec.eigenvalues[1:] - true[1:]) / true[1:]
    assert rel.max() < 6e-3
    assert rel[0] < 5e-4


def test_traces_are_mass_orthonormal():
    domain = build_triangle_domain(math.pi / 4, math.pi / 4, 1.0)
    mesh = generate_mesh(domain, 0.05)
    system = assemble(mesh)
    spec = solve_steklov(domain, 0.05, 5, mesh=mesh)
    mass = system.steklov_mass_free().toarray()
    gram = spec.traces.T @ mass @ spec.traces
    np.testing.assert_allclose(gram, np.eye(5), atol=1e-8)
    assert spec.num_nodes == mesh.num_nodes


def test_resolution_guard_rejects_underresolved_requests():
    domain = build_rectangle_domain(math.pi, 1.0)
    with pytest.raises(SteklovSolveError, match="resolution guard"):
        solve_steklov(domain, 0.5, 10)
    with pytest.raises(SteklovSolveError, match="at least 1"):
        solve_steklov(domain, 0.1, 0)


# ---------------------------------------------------------------------------
# convergence
# ---------------------------------------------------------------------------

def test_rectangle_converges_at_second_order():
    domain = build_rectangle_domain(math.pi, 1.0)
    study = convergence_study(domain, (0.08, 0.04, 0.02), (2, 3, 4))
    true = np.array([k * math.tanh(k) for k in (1, 2, 3)])
    assert study.values.shape == (3, 3)
    assert ((study.observed_order > 1.8) & (study.observed_order < 2.2)).all()
    fine_err = np.abs(study.values[-1] - true)
    rich_err = np.abs(study.richardson - true)
    assert (rich_err < 0.35 * fine_err).all()
    assert (fine_err < study.errbar).all()


def test_convergence_study_validates_inputs():
    domain = build_rectangle_domain(math.pi, 1.0)
    with pytest.raises(SteklovSolveError, match="decreasing"):
        convergence_study(domain, (0.05, 0.05), (1,))
    with pytest.raises(SteklovSolveError, match="1-based"):
        convergence_study(domain, (0.1, 0.05), (0, 1))


def test_two_level_study_uses_order_two_fallback():
    domain = build_rectangle_domain(math.pi, 1.0)
    study = convergence_study(domain, (0.08, 0.04), (2,))
    assert math.isnan(study.observed_order[0])
    v_coarse, v_fine = study.values[:, 0]
    assert study.errbar[0] == pytest.approx(2.0 * abs(v_fine - v_coarse))
    expected = v_fine + (v_fine - v_coarse) / (2.0**2 - 1.0)
    assert study.richardson[0] == pytest.approx(expected, abs=1e-14)


def test_corner_grading_keeps_second_order_accuracy():
    # every corner of this tank is convex enough that P1 converges at
    # order two with or without grading; grading must not degrade the
    # fine-mesh eigenvalue
    domain = build_triangle_domain(2 * math.pi / 5, math.pi / 6, 2.0)
    ladder = (0.04, 0.02, 0.01)
    ks = (3, 5, 8)
    graded = convergence_study(domain, ladder, ks, grading_factor=0.25)
    uniform = convergence_study(domain, ladder, ks, grading_factor=1.0)
    for study in (graded, uniform):
        assert ((study.observed_order > 1.8) & (study.observed_order < 2.2)).all()
    true_5 = EX1_TABLE[4][1]
    err_graded = abs(graded.values[-1, 1] - true_5)
    err_uniform = abs(uniform.values[-1, 1] - true_5)
    assert err_graded < 5e-3
    assert err_uniform < 5e-3
    assert err_graded <= 1.05 * err_uniform


# ---------------------------------------------------------------------------
# quasimode interaction
# ---------------------------------------------------------------------------

def test_surface_beam_trace_is_a_near_eigenvector():
    # the order-2 wall-to-wall model trace at the quantized frequency
    # sigma = 2.5 pi nearly solves the discrete problem: its residual is
    # two orders of magnitude below the same trace tested off-lattice
    domain = build_triangle_domain(math.pi / 4, math.pi / 4, 1.0)
    sigma = 2.5 * math.pi

    def residuals(h):
        mesh = generate_mesh(domain, h, grading_factor=1.0)
        system = assemble(mesh)
        apply_schur = dtn_action(system)
        mass = system.steklov_mass_free()

        def m_norm(r):
            return math.sqrt(float(r @ (mass @ r)))

        trace = quasimode_trace(2, sigma, system.s_arclength, 1.0)
        trace = trace / m_norm(trace)
        d_trace = apply_schur(trace)
        m_trace = mass @ trace

        def res(s):
            return m_norm(d_trace - s * m_trace)

        return res(sigma), res(sigma + math.pi / 2), res(sigma - math.pi / 2)

    res_fine, off_plus, off_minus = residuals(2e-3)
    assert off_plus / res_fine > 10.0
    assert off_minus / res_fine > 10.0
    assert res_fine < 1e-4
    res_coarse, _, _ = residuals(4e-3)
    assert res_fine < res_coarse
