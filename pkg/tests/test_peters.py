"""Sector solutions with a Robin surface condition and their far fields."""

import cmath
import math

import numpy as np
import pytest

from sloshspec.model_solutions.peters import (
    FarFieldFit,
    PetersEvaluator,
    SectorParams,
    eval_peters,
    far_field_fit,
)


def wrap_angle(value):
    return (value + math.pi) % (2 * math.pi) - math.pi


def test_params_closed_forms_and_validation():
    params = SectorParams(math.pi / 3, "neumann")
    assert params.mu == pytest.approx(1.5, abs=1e-15)
    assert params.chi == pytest.approx(math.pi / 4 * (1 - 1.5), abs=1e-15)
    dirichlet = SectorParams(math.pi / 5, "dirichlet")
    assert dirichlet.chi == pytest.approx(math.pi / 4 * (1 + 2.5), abs=1e-15)
    with pytest.raises(ValueError):
        SectorParams(0.0)
    with pytest.raises(ValueError):
        SectorParams(math.pi / 2 + 0.1)
    with pytest.raises(ValueError):
        SectorParams(math.pi / 3, "robin")


def test_vertical_wall_collapses_to_the_plane_wave():
    x = np.linspace(0.5, 10.0, 40)
    neumann = eval_peters(SectorParams(math.pi / 2, "neumann"), x)
    assert np.max(np.abs(neumann - np.exp(-1j * x))) < 1e-12
    dirichlet = eval_peters(SectorParams(math.pi / 2, "dirichlet"), x)
    assert np.max(np.abs(dirichlet - 1j * np.exp(-1j * x))) < 1e-12
    interior = complex(eval_peters(SectorParams(math.pi / 2, "neumann"), 0.5 - 0.3j))
    assert interior == pytest.approx(cmath.exp(-1j * (0.5 - 0.3j)), abs=1e-12)


@pytest.mark.parametrize("condition", ["neumann", "dirichlet"])
def test_solution_satisfies_the_surface_condition(condition):
    params = SectorParams(math.pi / 3, condition)
    evaluator = PetersEvaluator(params)
    x = np.array([1.0, 5.0, 20.0], dtype=complex)
    f = evaluator.evaluate(x)
    fp = evaluator.evaluate(x, order=1)
    # d/dy Re f = Re(i f') for analytic f, so the surface condition reads
    # Re(i f' - f) = 0 on the positive real axis.
    residual = np.abs((1j * fp - f).real)
    assert np.max(residual / np.abs(f)) < 1e-8


@pytest.mark.parametrize("condition", ["neumann", "dirichlet"])
def test_solution_satisfies_the_wall_condition(condition):
    alpha = math.pi / 3
    params = SectorParams(alpha, condition)
    evaluator = PetersEvaluator(params)
    z = np.array([1.0, 5.0]) * cmath.exp(-1j * alpha)
    f = evaluator.evaluate(z)
    if condition == "dirichlet":
        assert np.max(np.abs(f.real)) < 1e-8 * np.max(np.abs(f))
    else:
        fp = evaluator.evaluate(z, order=1)
        normal = (-math.sin(alpha)) * fp + (-math.cos(alpha)) * 1j * fp
        assert np.max(np.abs(normal.real)) < 1e-8 * np.max(np.abs(fp))


def test_solution_is_harmonic_inside_the_sector():
    params = SectorParams(math.pi / 3, "neumann")
    evaluator = PetersEvaluator(params)
    z = 2.0 * cmath.exp(-0.4j)
    h = 1e-3
    stencil = evaluator.evaluate(np.array([z + h, z - h, z + 1j * h, z - 1j * h, z]))
    laplacian = (stencil[:4].sum() - 4 * stencil[4]) / h**2
    assert abs(laplacian) < 1e-5


def test_evaluator_rejects_points_outside_its_design():
    params = SectorParams(math.pi / 3, "neumann")
    evaluator = PetersEvaluator(params, xmax=40.0)
    with pytest.raises(ValueError, match="design size"):
        evaluator.evaluate(80.0 + 0j)
    with pytest.raises(ValueError, match="arg z"):
        evaluator.evaluate(1.0 + 1.0j)
    assert abs(complex(eval_peters(params, 60.0))) > 0  # rebuckets instead


@pytest.mark.parametrize("denominator", [3, 4, 5])
@pytest.mark.parametrize("condition", ["neumann", "dirichlet"])
def test_far_field_phase_matches_the_closed_form(peters_fits, condition, denominator):
    params, fit = peters_fits[(condition, denominator)]
    assert abs(wrap_angle(fit.phase - params.chi)) < 1e-3
    assert 1.9 < fit.amplitude < 2.1


@pytest.mark.parametrize("denominator,expected", [(3, -1.5), (5, -2.5)])
def test_neumann_remainder_decays_like_minus_mu(peters_fits, denominator, expected):
    params, fit = peters_fits[("neumann", denominator)]
    assert params.mu == pytest.approx(-expected, abs=1e-12)
    assert fit.decay_exponent == pytest.approx(expected, abs=0.3)
    assert fit.offset == 0


@pytest.mark.parametrize("denominator", [3, 5])
def test_dirichlet_remainder_decays_like_minus_two_mu_minus_one(peters_fits, denominator):
    # The Dirichlet remainder carries one extra power beyond -2 mu; the
    # fitted slopes land within 0.13 of -(2 mu + 1) and nowhere near -2 mu.
    params, fit = peters_fits[("dirichlet", denominator)]
    assert fit.decay_exponent == pytest.approx(-(2 * params.mu + 1), abs=0.3)
    assert abs(fit.offset) > 1.0


@pytest.mark.parametrize("condition", ["neumann", "dirichlet"])
def test_integer_mu_remainder_is_exponential(peters_fits, condition):
    # At alpha = pi/4 the power-law coefficient vanishes (mu = 2) and the
    # remainder collapses exponentially; the log-log slope saturates far
    # below any algebraic rate.
    _, fit = peters_fits[(condition, 4)]
    assert fit.decay_exponent < -10.0


def test_far_field_fit_validation():
    params = SectorParams(math.pi / 3, "neumann")
    x = np.linspace(1.0, 10.0, 8)
    with pytest.raises(ValueError, match="at least 16"):
        far_field_fit(params, x, np.exp(-1j * x))
    x = np.linspace(1.0, 10.0, 32)
    with pytest.raises(ValueError, match="increasing"):
        far_field_fit(params, x[::-1], np.exp(-1j * x))


def test_wave_coefficient_round_trip():
    fit = FarFieldFit(amplitude=2.0, phase=0.5, decay_exponent=-1.5, offset=0j)
    assert fit.wave_coefficient == pytest.approx(2.0 * cmath.exp(0.5j), abs=1e-15)


def test_evaluation_is_deterministic():
    params = SectorParams(math.pi / 5, "neumann")
    x = np.linspace(0.5, 30.0, 64)
    assert np.array_equal(eval_peters(params, x), eval_peters(params, x))
