"""Sector solutions of the sloshing problem with a Robin surface condition.

For an infinite wedge of half-angle alpha below the horizontal, the model
solution is a function f analytic in the sector -alpha <= arg z <= 0 whose
real part satisfies the surface condition d(Re f)/dy = Re f on the positive
real axis together with a Neumann or Dirichlet condition on the sloped wall.
It is given by a keyhole-contour integral

    f(z) = (mu^(1/2)/(i pi)) * int_P g_alpha(zeta)/(zeta + i) [zeta^(-mu)] e^(z zeta) dzeta,

with mu = pi/(2 alpha) and the bracket present only in the Dirichlet case.
The contour P runs in from infinity along one side of the ray at angle
pi + alpha/2, around the circle |zeta| = 2, and back out along the other
side; g_alpha on the path comes from `contour.exp_neg_I_continued`.

Far from the corner, f approaches a decaying-free plane wave
A e^{-i(z - chi)} whose phase chi = pi/4 (1 -/+ pi/(2 alpha)) carries the
spectral information; the amplitude A has no closed form and is only ever
fitted.

The straight segment of the circle crossing the right half-plane replaces
the arc there: on the arc, |e^(z zeta)| reaches e^(2|z|), and the resulting
cancellation at |z| = 40 would cost half the double-precision mantissa.
The chord is placed at Re(zeta e^(i arg z)) = 0.2, capping amplification at
e^(0.2 |z|) while keeping the pole at -i and the branch arc of g_alpha on
its far side.
"""

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .contour import ContourQuadrature, default_quadrature, exp_neg_I_continued

_CHORD_ABSCISSA = 0.15


@dataclass(frozen=True)
class SectorParams:
    """Wedge half-angle and wall condition for a sector solution."""

    alpha: float
    condition: str = "neumann"

    def __post_init__(self):
        if not 0 < self.alpha <= math.pi / 2 + 1e-12:
            raise ValueError("alpha must lie in (0, pi/2]")
        if self.condition not in ("neumann", "dirichlet"):
            raise ValueError("condition must be 'neumann' or 'dirichlet'")

    @property
    def mu(self):
        return math.pi / (2 * self.alpha)

    @property
    def chi(self):
        """Far-field phase shift of the outgoing plane wave."""
        if self.condition == "neumann":
            return (math.pi / 4) * (1 - self.mu)
        return (math.pi / 4) * (1 + self.mu)


@lru_cache(maxsize=8)
def _gauss(n):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _panel_nodes(breaks, n):
    """Gauss-Legendre nodes/weights on consecutive intervals of `breaks`."""
    x, w = _gauss(n)
    a = breaks[:-1]
    b = breaks[1:]
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    nodes = (mid[:, None] + half[:, None] * x).ravel()
    weights = (half[:, None] * w).ravel()
    return nodes, weights


class PetersEvaluator:
    """Evaluates one sector solution at points of the closed sector.

    The contour pieces that do not depend on the evaluation point (the two
    ray legs) are discretized once, including the analytic continuation of
    g_alpha along them; the circle-plus-chord piece depends on arg z and is
    cached per direction.  `xmax` is the largest |z| the discretization is
    tuned for; larger arguments are rejected rather than silently
    under-resolved.
    """

    def __init__(self, params, quad=None, xmax=40.0):
        self.params = params
        self.xmax = float(xmax)
        self.closed_form = abs(params.alpha - math.pi / 2) < 1e-12
        if self.closed_form:
            self.quad = None
            return
        self.quad = quad if quad is not None else default_quadrature(params.alpha)
        alpha = params.alpha
        self._theta_cut = self.quad.ray_angle
        if abs(self._theta_cut - (math.pi + alpha / 2)) > 1e-9:
            raise ValueError("ray_angle must bisect the sector between the walls")
        self._gtol = 1e-12
        self._chord_cache = {}
        self._build_rays()

    # -- path construction -------------------------------------------------

    def _g_at(self, radius, theta):
        """g_alpha at polar path points with explicitly tracked angles."""
        alpha = self.params.alpha
        k = exp_neg_I_continued(alpha, radius, theta - alpha, tol=self._gtol)
        zeta = radius * np.exp(1j * theta)
        return k * (zeta + 1j) / zeta

    def _build_rays(self):
        q = self.quad
        first = min(0.5, 10.0 / self.xmax)
        breaks = [q.circle_radius]
        while breaks[-1] < q.truncation_radius:
            step = max(first, 0.7 * (breaks[-1] - q.circle_radius))
            breaks.append(min(breaks[-1] + step, q.truncation_radius))
        breaks = np.asarray(breaks)
        r, w = _panel_nodes(breaks, 12)
        theta_in = self._theta_cut - 2 * math.pi
        theta_out = self._theta_cut
        self._ray_r = r
        # in-leg traversed from infinity toward the circle, out-leg back out
        self._ray_w_in = -w * cmath.exp(1j * theta_in)
        self._ray_w_out = w * cmath.exp(1j * theta_out)
        self._ray_g_in = self._g_at(r, np.full(r.shape, theta_in))
        self._ray_g_out = self._g_at(r, np.full(r.shape, theta_out))
        self._ray_zeta_in = r * cmath.exp(1j * theta_in)
        self._ray_zeta_out = r * cmath.exp(1j * theta_out)
        self._ray_theta_in = np.full(r.shape, theta_in)
        self._ray_theta_out = np.full(r.shape, theta_out)

    def _chord_pieces(self, phi):
        """Arcs and chord for evaluation direction phi = arg z (cached)."""
        key = round(phi, 12)
        piece = self._chord_cache.get(key)
        if piece is not None:
            return piece
        q = self.quad
        R = q.circle_radius
        theta_c = math.acos(_CHORD_ABSCISSA / R)
        lo = -phi - theta_c
        hi = -phi + theta_c
        density = q.nodes_per_unit * max(self.xmax, 1.0) / 40.0 / 16.0
        zetas, weights, thetas = [], [], []
        for a, b in ((self._theta_cut - 2 * math.pi, lo), (hi, self._theta_cut)):
            panels = max(6, math.ceil(R * (b - a) * density))
            th, w = _panel_nodes(np.linspace(a, b, panels + 1), 16)
            zet = R * np.exp(1j * th)
            zetas.append(zet)
            weights.append(w * 1j * zet)  # dzeta = i R e^{i th} dth
            thetas.append(th)
        p_lo = R * cmath.exp(1j * lo)
        p_hi = R * cmath.exp(1j * hi)
        # the 1/(zeta + i) pole sits a distance ~_CHORD_ABSCISSA off the
        # chord; panels must stay shorter than twice that for the Gauss
        # rule to converge past it
        panels = max(
            6,
            math.ceil(abs(p_hi - p_lo) * density),
            math.ceil(abs(p_hi - p_lo) / (2 * _CHORD_ABSCISSA)),
        )
        s, w = _panel_nodes(np.linspace(0.0, 1.0, panels + 1), 16)
        zet = p_lo + s * (p_hi - p_lo)
        zetas.insert(1, zet)
        weights.insert(1, w * (p_hi - p_lo))
        thetas.insert(1, np.angle(zet))
        zeta = np.concatenate(zetas)
        weight = np.concatenate(weights)
        theta = np.concatenate(thetas)
        piece = (zeta, weight, self._g_at(np.abs(zeta), theta), theta)
        self._chord_cache[key] = piece
        if len(self._chord_cache) > 64:
            self._chord_cache.pop(next(iter(self._chord_cache)))
        return piece

    # -- evaluation ---------------------------------------------------------

    def _closed_form_values(self, z, order):
        f = np.exp(-1j * z)
        if self.params.condition == "dirichlet":
            f = 1j * f
        return f * (-1j) ** order

    def _piece_sum(self, z, zeta, weight, gvals, theta, order):
        mu = self.params.mu
        dens = gvals / (zeta + 1j)
        if self.params.condition == "dirichlet":
            dens = dens * np.exp(-mu * (np.log(np.abs(zeta)) + 1j * theta))
        if order:
            dens = dens * zeta**order
        expz = np.exp(np.multiply.outer(z, zeta))
        return expz @ (weight * dens)

    def evaluate(self, z, order=0):
        """f(z), or its order-th z-derivative, for z in the closed sector."""
        zarr = np.atleast_1d(np.asarray(z, dtype=complex))
        if not np.all(np.isfinite(zarr)):
            raise ValueError("z must be finite")
        if np.any(np.abs(zarr) > self.xmax * (1 + 1e-9)):
            raise ValueError(f"|z| exceeds the discretization design size {self.xmax}")
        if self.closed_form:
            out = self._closed_form_values(zarr, order)
            return complex(out[0]) if np.asarray(z).ndim == 0 else out
        alpha = self.params.alpha
        phi = np.where(np.abs(zarr) == 0, 0.0, np.angle(zarr))
        if np.any(phi > 1e-9) or np.any(phi < -alpha - 1e-9):
            raise ValueError("z must satisfy -alpha <= arg z <= 0")
        phi = np.clip(phi, -alpha, 0.0)
        out = np.zeros(zarr.shape, dtype=complex)
        for key in np.unique(np.round(phi, 12)):
            sel = np.round(phi, 12) == key
            zs = zarr[sel]
            acc = self._piece_sum(
                zs, self._ray_zeta_in, self._ray_w_in, self._ray_g_in,
                self._ray_theta_in, order,
            )
            acc += self._piece_sum(
                zs, self._ray_zeta_out, self._ray_w_out, self._ray_g_out,
                self._ray_theta_out, order,
            )
            zeta, weight, gvals, theta = self._chord_pieces(float(key))
            acc += self._piece_sum(zs, zeta, weight, gvals, theta, order)
            out[sel] = acc * (math.sqrt(self.params.mu) / (1j * math.pi))
        return complex(out[0]) if np.asarray(z).ndim == 0 else out


_EVALUATOR_CACHE = {}


def _cached_evaluator(params, quad, xmax):
    key = (round(params.alpha, 14), params.condition, quad, round(xmax, 6))
    ev = _EVALUATOR_CACHE.get(key)
    if ev is None:
        ev = PetersEvaluator(params, quad, xmax)
        if len(_EVALUATOR_CACHE) > 8:
            _EVALUATOR_CACHE.pop(next(iter(_EVALUATOR_CACHE)))
        _EVALUATOR_CACHE[key] = ev
    return ev


def eval_peters(params, z, quad=None):
    """Sector solution f at z (scalar or array) in the closed sector.

    A discretized evaluator is built and cached per (params, quad, size
    bucket); the bucket doubles until it covers max |z|, so repeated calls
    at comparable scales reuse the same contour.
    """
    zarr = np.atleast_1d(np.asarray(z, dtype=complex))
    need = float(np.max(np.abs(zarr))) if zarr.size else 1.0
    xmax = 40.0
    while xmax < need:
        xmax *= 2.0
    ev = _cached_evaluator(params, quad, xmax)
    return ev.evaluate(z)


@dataclass(frozen=True)
class FarFieldFit:
    """Fitted far field A e^{-i(x - phase)} + offset, with residual decay."""

    amplitude: float
    phase: float
    decay_exponent: float
    offset: complex

    @property
    def wave_coefficient(self):
        return self.amplitude * cmath.exp(1j * self.phase)


def far_field_fit(params, x, values):
    """Fit the far-field decomposition of surface samples.

    The samples are modeled as c e^{-ix} + d + r(x): an outgoing plane
    wave, a constant, and a decaying remainder.  The constant is fitted
    only for a Dirichlet wall, where the solution genuinely carries one
    (purely imaginary up to exponentially small terms, so the physical
    field still decays); for a Neumann wall the remainder itself is
    non-oscillating and a constant column would absorb its tail and bias
    the slope.  Coefficients come from a complex least-squares fit over
    the outermost quarter of the window; the decay exponent is the
    log-log slope of |r| over the middle of the window, clear of both the
    fit region and short-range corner effects.  Expected rates: x^(-mu)
    for Neumann, x^(-2 mu) for Dirichlet.  At angles pi/(2q) the
    remainder instead collapses exponentially, and the fitted exponent
    lands far below any power rate.
    """
    x = np.asarray(x, dtype=float)
    values = np.asarray(values, dtype=complex)
    if x.ndim != 1 or x.shape != values.shape or x.size < 16:
        raise ValueError("need matching 1d arrays with at least 16 samples")
    if not np.all(np.diff(x) > 0) or x[0] <= 0:
        raise ValueError("x must be increasing and positive")
    span = x[-1] - x[0]
    window = x >= x[0] + 0.75 * span
    cols = [np.exp(-1j * x[window])]
    if params.condition == "dirichlet":
        cols.append(np.ones(int(window.sum())))
    sol, *_ = np.linalg.lstsq(np.column_stack(cols), values[window], rcond=None)
    coeff = complex(sol[0])
    offset = complex(sol[1]) if len(sol) > 1 else 0j
    resid = np.abs(values - coeff * np.exp(-1j * x) - offset)
    keep = (
        (x >= x[0] + 0.35 * span)
        & (x <= x[0] + 0.70 * span)
        & (resid > 1e-13 * abs(coeff))
    )
    if keep.sum() < 8:
        raise ValueError("too few usable samples for a decay fit")
    slope = np.polyfit(np.log(x[keep]), np.log(resid[keep]), 1)[0]
    return FarFieldFit(
        abs(coeff), cmath.phase(complex(coeff)), float(slope), complex(offset)
    )
