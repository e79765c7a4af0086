"""Higher-order Sturm-Liouville solver: spectra, duality, lattice approach."""

import math

import numpy as np
import pytest

from sloshspec.highord_sl import (
    HighOrderSLProblem,
    SLSolveError,
    ansatz_exponents,
    boundary_matrix,
    characteristic_smallest_singular_value,
    duality_map,
    eigenfunction_derivative,
    eigenfunction_eval,
    ode_asymptotic_prediction,
    roots_of_minus_one,
    solve_spectrum,
)

from _tables import BEAM_ROOTS


def log_linear_fit(ks, residuals):
    """Least-squares slope and R^2 of ln(residual) against k."""
    x = np.asarray(ks, dtype=float)
    y = np.log(np.asarray(residuals, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    predicted = slope * x + intercept
    ss_res = float(np.sum((y - predicted) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    return float(slope), 1.0 - ss_res / ss_tot


def positive_eigenvalues(q, condition, count):
    pad = q if condition == "neumann" else 0
    spectrum = solve_spectrum(HighOrderSLProblem(q, 1.0, condition), count + pad)
    values = [lam for lam in spectrum.eigenvalues if lam > 0]
    assert len(values) == count
    return values


@pytest.mark.parametrize("q", [1, 2, 3, 4])
def test_ansatz_exponents_structure(q):
    w = ansatz_exponents(q)
    assert len(w) == 2 * q
    target = (-1.0) ** q
    assert np.allclose(w ** (2 * q), target, atol=1e-12)
    assert np.allclose(np.abs(w), 1.0, atol=1e-15)
    as_set = set(np.round(w, 12))
    assert set(np.round(np.conj(w), 12)) == as_set
    assert set(np.round(-w, 12)) == as_set
    assert any(abs(wk - 1j) < 1e-12 for wk in w)
    assert any(abs(wk + 1j) < 1e-12 for wk in w)


def test_roots_of_minus_one():
    for q in (1, 2, 3):
        w = roots_of_minus_one(q)
        assert np.allclose(w ** (2 * q), -1.0, atol=1e-12)
        assert np.all(np.diff(np.angle(w)) > 0)
    with pytest.raises(ValueError):
        roots_of_minus_one(0)


def test_frozen_beam_roots_satisfy_characteristic_equation():
    # Independent check of the frozen table: positive roots of
    # cos(x) cosh(x) = 1, written as cos(x) - sech(x) = 0 to stay bounded.
    for root in BEAM_ROOTS:
        assert abs(math.cos(root) - 1.0 / math.cosh(root)) < 1e-12


def test_beam_spectrum_with_double_zero():
    spectrum = solve_spectrum(HighOrderSLProblem(2, 1.0, "neumann"), 7)
    assert spectrum.eigenvalues[0] == 0.0
    assert spectrum.eigenvalues[1] == 0.0
    for lam, root in zip(spectrum.eigenvalues[2:], BEAM_ROOTS):
        assert lam == pytest.approx(root, abs=1e-6)
        assert abs(math.cos(lam) - 1.0 / math.cosh(lam)) < 1e-8


@pytest.mark.parametrize("q", [2, 3, 4])
def test_nonzero_spectra_agree_across_conditions(q):
    neumann = positive_eigenvalues(q, "neumann", 5)
    dirichlet = positive_eigenvalues(q, "dirichlet", 5)
    for a, b in zip(neumann, dirichlet):
        assert a == pytest.approx(b, abs=1e-8)


@pytest.mark.parametrize("q,condition", [(1, "neumann"), (3, "dirichlet")])
def test_zero_eigenvalue_multiplicity(q, condition):
    spectrum = solve_spectrum(HighOrderSLProblem(q, 1.0, condition), q + 2)
    zeros = [lam for lam in spectrum.eigenvalues if lam == 0.0]
    assert len(zeros) == (q if condition == "neumann" else 0)
    positives = [lam for lam in spectrum.eigenvalues if lam > 0]
    assert positives == sorted(positives)


def test_q1_reduces_to_the_classical_string():
    # q = 1 Neumann on [0, 1]: eigenvalues k pi with a simple zero first.
    spectrum = solve_spectrum(HighOrderSLProblem(1, 1.0, "neumann"), 5)
    assert spectrum.eigenvalues[0] == 0.0
    for k, lam in enumerate(spectrum.eigenvalues[1:], start=1):
        assert lam == pytest.approx(k * math.pi, abs=1e-9)


def test_lattice_prediction_closed_form():
    assert ode_asymptotic_prediction(2, 1.0, 4) == pytest.approx(
        math.pi * 3.5 - math.pi, abs=1e-14
    )
    assert ode_asymptotic_prediction(3, 2.0, 5) == pytest.approx(
        (math.pi * 4.5 - 1.5 * math.pi) / 2.0, abs=1e-14
    )
    with pytest.raises(ValueError, match="k >= q \\+ 1"):
        ode_asymptotic_prediction(2, 1.0, 2)
    with pytest.raises(ValueError):
        ode_asymptotic_prediction(0, 1.0, 3)
    with pytest.raises(ValueError):
        ode_asymptotic_prediction(2, -1.0, 3)


def test_lattice_approach_is_log_linear_for_q2():
    values = positive_eigenvalues(2, "neumann", 7)
    ks = range(3, 10)
    residuals = [
        abs(lam - ode_asymptotic_prediction(2, 1.0, k)) for k, lam in zip(ks, values)
    ]
    assert all(b < a for a, b in zip(residuals, residuals[1:]))
    slope, r2 = log_linear_fit(ks, residuals)
    assert r2 > 0.99
    assert slope == pytest.approx(-math.pi, abs=0.05)


def test_lattice_approach_interleaves_exact_hits_for_q3():
    # Odd q puts every even-k eigenvalue exactly on the lattice (the
    # oscillatory pair closes up over the interval); the odd-k residuals
    # decay geometrically on their own.
    values = positive_eigenvalues(3, "neumann", 8)
    ks = range(4, 12)
    residuals = [
        abs(lam - ode_asymptotic_prediction(3, 1.0, k)) for k, lam in zip(ks, values)
    ]
    exact = residuals[0::2]
    decaying = residuals[1::2]
    assert max(exact) < 1e-10
    assert all(b < a for a, b in zip(decaying, decaying[1:]))
    slope, r2 = log_linear_fit(range(5, 13, 2), decaying)
    assert r2 > 0.99
    assert slope < 0


def test_lattice_approach_q4_decays_despite_oscillation():
    # For q = 4 two decaying exponentials interfere, so the residuals are
    # modulated rather than monotone; the overall reduction still spans
    # several orders of magnitude.
    values = positive_eigenvalues(4, "neumann", 8)
    ks = range(5, 13)
    residuals = [
        abs(lam - ode_asymptotic_prediction(4, 1.0, k)) for k, lam in zip(ks, values)
    ]
    assert residuals[-1] < 1e-3 * residuals[0]
    assert max(residuals[4:]) < min(residuals[:2])


def test_boundary_matrix_is_overflow_free():
    problem = HighOrderSLProblem(3, 1.0, "neumann")
    matrix = boundary_matrix(problem, 500.0)
    assert np.all(np.isfinite(matrix))
    assert np.max(np.abs(matrix)) <= 1.0 + 1e-12
    with pytest.raises(ValueError):
        boundary_matrix(problem, 0.0)


def test_characteristic_ratio_dips_at_eigenvalues():
    problem = HighOrderSLProblem(2, 1.0, "neumann")
    at_root = characteristic_smallest_singular_value(problem, BEAM_ROOTS[0])
    nearby = characteristic_smallest_singular_value(problem, BEAM_ROOTS[0] + 0.3)
    assert at_root < 1e-6
    assert nearby > 1e-3


def test_eigenfunction_satisfies_ode_and_boundary_conditions():
    spectrum = solve_spectrum(HighOrderSLProblem(2, 1.0, "neumann"), 4)
    entry = spectrum.eigenfunction(2)
    lam = entry.lam
    x = np.linspace(0.05, 0.95, 7)
    lhs = eigenfunction_derivative(entry, x, 4)
    rhs = lam**4 * eigenfunction_eval(entry, x)
    assert np.allclose(lhs, rhs, rtol=1e-8, atol=1e-8 * lam**4)
    for order in (2, 3):
        scale = lam**order
        assert abs(eigenfunction_derivative(entry, 0.0, order)) < 1e-7 * scale
        assert abs(eigenfunction_derivative(entry, 1.0, order)) < 1e-7 * scale
    grid = np.linspace(0.0, 1.0, 20001)
    values = eigenfunction_eval(entry, grid)
    assert np.trapezoid(values**2, grid) == pytest.approx(1.0, abs=1e-5)


def test_zero_mode_has_no_rendered_eigenfunction():
    spectrum = solve_spectrum(HighOrderSLProblem(2, 1.0, "neumann"), 3)
    with pytest.raises(ValueError, match="polynomial kernel"):
        spectrum.eigenfunction(0)


def test_duality_map_swaps_conditions():
    q = 2
    neumann = HighOrderSLProblem(q, 1.0, "neumann")
    dirichlet = HighOrderSLProblem(q, 1.0, "dirichlet")
    spectrum = solve_spectrum(neumann, 3)
    entry = spectrum.eigenfunction(2)
    mapped = type(entry)(
        problem=dirichlet,
        lam=entry.lam,
        coefficients=duality_map(entry.coefficients, q),
        scaled_coefficients=duality_map(entry.scaled_coefficients, q),
        roots=entry.roots,
    )
    for order in (0, 1):
        assert abs(eigenfunction_derivative(mapped, 0.0, order)) < 1e-7
        assert abs(eigenfunction_derivative(mapped, 1.0, order)) < 1e-7
    twice = duality_map(duality_map(entry.coefficients, q), q)
    assert np.allclose(twice, (-1.0) ** q * entry.coefficients, atol=1e-14)


def test_problem_validation():
    with pytest.raises(ValueError):
        HighOrderSLProblem(0, 1.0, "neumann")
    with pytest.raises(ValueError):
        HighOrderSLProblem(2, 0.0, "neumann")
    with pytest.raises(ValueError):
        HighOrderSLProblem(2, 1.0, "robin")
    with pytest.raises(ValueError):
        solve_spectrum(HighOrderSLProblem(2, 1.0, "neumann"), 0)
