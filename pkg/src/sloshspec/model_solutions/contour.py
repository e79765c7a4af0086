"""Auxiliary functions for the sector solutions, evaluated by quadrature.

The central object is

    I_alpha(zeta) = (1/pi) * int_0^{zeta inf} log(1 + v^(-2 mu)) zeta/(v^2 + zeta^2) dv,

with mu = pi/(2 alpha), integrated along the ray through zeta and defined
for |arg zeta| < alpha.  Everything else derives from it:

* exp(-I) continues across the ray arg zeta = alpha by the exact relation
  exp(-I(zeta e^{2 i alpha})) = exp(-I(zeta)) * (zeta e^{i alpha} + i)/(zeta e^{i alpha} - i),
  which steps the evaluation sector by sector around the plane;
* g_alpha(zeta) = exp(-I_alpha(zeta e^{-i alpha})) * (zeta + i)/zeta, with an
  independent right-half-plane integral representation used for
  cross-checking;
* J(mu), whose real part has the closed form pi^2 (1 - mu)/4 and whose
  imaginary part fixes |g_alpha(-i)|.

Quadrature is tanh-sinh on (0, 1) after splitting each half-line at 1 and
inverting the tail, refined by halving the step until the result is stable
to the requested absolute tolerance.  The double-exponential nodes absorb
the logarithmic endpoint singularities without special casing.
"""

import cmath
import math
from dataclasses import dataclass

import numpy as np

_KH_MAX = 4.0
_BASE_STEP = 0.25
_MAX_LEVEL = 6
_EDGE_MARGIN = 1e-8


class QuadratureError(RuntimeError):
    """Raised when a quadrature fails to reach the requested tolerance."""


def _tanh_sinh_nodes(level):
    """Nodes and weights for int_0^1 f(t) dt at the given refinement level."""
    h = _BASE_STEP / 2**level
    k = np.arange(-int(_KH_MAX / h), int(_KH_MAX / h) + 1)
    u = (math.pi / 2) * np.sinh(k * h)
    t = 0.5 * (1.0 + np.tanh(u))
    w = h * (math.pi / 4) * np.cosh(k * h) / np.cosh(u) ** 2
    keep = (t > 0.0) & (t < 1.0) & (w > 1e-280)
    return t[keep], w[keep]


def _log1p_large(log_mod, phase):
    """log(1 + X) for X = exp(log_mod + i*phase), stable for huge |X|.

    Here |X| >= 1 throughout (X = t^{-2 mu} on t <= 1), so the plain
    logarithm is accurate whenever exp does not overflow.
    """
    big = log_mod > 300.0
    safe = np.where(big, 0.0, log_mod)
    direct = np.log(1.0 + np.exp(safe) * np.exp(1j * phase))
    tail = (log_mod + 1j * phase) + np.exp(-log_mod - 1j * phase)
    return np.where(big, tail, direct)


def _log_mu_ratio(mu, u):
    """log((1 - e^{-2 mu u})/(1 - e^{-2 u})), smooth through u = 0.

    This is the integrand factor of the right-half-plane g representation
    written in u = log t.  The ratio tends to mu at u = 0 and the three
    branches below cover tiny, moderate, and strongly negative u without
    overflow; u is real.
    """
    u = np.asarray(u, dtype=float)
    out = np.empty_like(u)
    tiny = np.abs(u) < 1e-12
    low = u <= -0.1
    mid = ~(tiny | low)
    out[tiny] = math.log(mu)
    um = u[mid]
    out[mid] = np.log(np.expm1(-2 * mu * um) / np.expm1(-2 * um))
    ul = u[low]
    out[low] = (2 - 2 * mu) * ul + np.log1p(-np.exp(2 * mu * ul)) - np.log1p(
        -np.exp(2 * ul)
    )
    return out


def _i_ray(alpha, zeta, ray, tol=1e-12):
    """I_alpha at points zeta integrated along per-point ray angles.

    Valid whenever |arg zeta - ray| < pi/2 and |ray| < alpha; the caller is
    responsible for choosing legal rays.  Vectorized over zeta.
    """
    mu = math.pi / (2 * alpha)
    zeta = np.atleast_1d(np.asarray(zeta, dtype=complex))
    ray = np.broadcast_to(np.asarray(ray, dtype=float), zeta.shape)
    e = np.exp(1j * ray)
    z2 = zeta**2
    prev = None
    for level in range(_MAX_LEVEL + 1):
        t, w = _tanh_sinh_nodes(level)
        tc = t[:, None]
        logt = np.log(t)[:, None]
        # leg along (0, 1]: log(1 + (t e^{i ray})^{-2 mu})
        lead = _log1p_large(-2 * mu * logt, -2 * mu * ray)
        kern = zeta * e / (tc**2 * e**2 + z2)
        part1 = (w[:, None] * lead * kern).sum(axis=0)
        # leg along [1, inf), inverted with s = 1/t
        small = np.exp(2 * mu * logt) * np.exp(-2j * mu * ray)
        lead2 = np.log(1.0 + small)
        kern2 = zeta * e / (e**2 + z2 * tc**2)
        part2 = (w[:, None] * lead2 * kern2).sum(axis=0)
        total = (part1 + part2) / math.pi
        if prev is not None and np.max(np.abs(total - prev)) < tol:
            return total
        prev = total
    raise QuadratureError(f"ray integral did not stabilize to {tol:g}")


def eval_I_alpha(alpha, zeta, tol=1e-12):
    """The auxiliary sector integral at points with |arg zeta| < alpha.

    Integrates along the ray through each point, which keeps the kernel
    poles at maximal distance.  Points within 1e-8 radians of the sector
    edges are rejected; continuation beyond the sector belongs to the
    exp(-I) stepping relation, not to this integral.
    """
    if not 0 < alpha < math.pi:
        raise ValueError("alpha must lie in (0, pi)")
    arr = np.atleast_1d(np.asarray(zeta, dtype=complex))
    if not np.all(np.isfinite(arr)) or np.any(arr == 0):
        raise ValueError("zeta must be finite and nonzero")
    ang = np.angle(arr)
    if np.any(alpha - np.abs(ang) < _EDGE_MARGIN):
        raise ValueError("zeta lies on or within 1e-8 of the singular ray")
    out = _i_ray(alpha, arr, ang, tol)
    if np.asarray(zeta).ndim == 0:
        return complex(out[0])
    return out


def half_plane_I(alpha, zeta, ray, tol=1e-12):
    """Analytic continuation of I_alpha via a fixed off-point ray.

    With the ray pinned at |ray| < alpha, the representation stays valid
    for arg zeta anywhere in (ray - pi/2, ray + pi/2), reaching beyond the
    primary sector.  Used as the independent route when testing the
    stepping relation.
    """
    if abs(ray) >= alpha:
        raise ValueError("ray must satisfy |ray| < alpha")
    arr = np.atleast_1d(np.asarray(zeta, dtype=complex))
    gap = np.abs(np.angle(arr * np.exp(-1j * ray)))
    if np.any(gap >= math.pi / 2 - 1e-10):
        raise ValueError("zeta outside the half-plane covered by this ray")
    out = _i_ray(alpha, arr, np.full(arr.shape, float(ray)), tol)
    if np.asarray(zeta).ndim == 0:
        return complex(out[0])
    return out


def continuation_factor(alpha, u):
    """The stepping factor (u e^{i alpha} + i)/(u e^{i alpha} - i)."""
    ue = np.asarray(u, dtype=complex) * cmath.exp(1j * alpha)
    if np.any(np.abs(ue - 1j) < 1e-8) or np.any(np.abs(ue + 1j) < 1e-8):
        raise ValueError("continuation step lands on a branch point")
    return (ue + 1j) / (ue - 1j)


def exp_neg_I_continued(alpha, radius, angle, tol=1e-12):
    """exp(-I_alpha) at polar points (radius, angle), any angle.

    Angles are taken literally (no re-wrapping), so the two sides of a
    branch cut can be addressed by passing angles differing by 2 pi.  The
    argument is reduced into the primary sector in steps of 2 alpha; each
    step multiplies by the exact factor of `continuation_factor`, under
    which exp(-I) is single-valued.
    """
    radius = np.atleast_1d(np.asarray(radius, dtype=float))
    angle = np.broadcast_to(np.asarray(angle, dtype=float), radius.shape).copy()
    n = np.floor((angle + alpha) / (2 * alpha)).astype(int)
    base_angle = angle - 2 * alpha * n
    ray = np.clip(base_angle, -(alpha - 1e-6), alpha - 1e-6)
    base_pts = radius * np.exp(1j * base_angle)
    k = np.exp(-_i_ray(alpha, base_pts, ray, tol))
    for j in range(1, int(n.max(initial=0)) + 1):
        mask = n >= j
        u = radius[mask] * np.exp(1j * (angle[mask] - 2 * alpha * j))
        k[mask] *= continuation_factor(alpha, u)
    for j in range(0, -int(n.min(initial=0))):
        mask = n <= -(j + 1)
        u = radius[mask] * np.exp(1j * (angle[mask] + 2 * alpha * j))
        k[mask] /= continuation_factor(alpha, u)
    return k


def g_alpha_continued(alpha, radius, angle, tol=1e-12):
    """g_alpha at polar points via the stepping continuation of exp(-I)."""
    zeta = np.atleast_1d(radius * np.exp(1j * np.asarray(angle, dtype=float)))
    k = exp_neg_I_continued(alpha, radius, np.asarray(angle, dtype=float) - alpha, tol)
    return k * (zeta + 1j) / zeta


def eval_g_alpha(alpha, zeta, tol=1e-10):
    """Right-half-plane representation of g_alpha.

    Evaluates exp(-(1/pi) int_0^inf log((1 - t^{-2 mu})/(1 - t^{-2}))
    zeta/(t^2 + zeta^2) dt).  The integrand's ratio is smooth through
    t = 1 (limit mu) and is computed there via expm1; the integral is
    split at 1 with the tail inverted.  Only Re zeta > 0 is accepted;
    elsewhere use the continuation route.
    """
    if not 0 < alpha < math.pi:
        raise ValueError("alpha must lie in (0, pi)")
    mu = math.pi / (2 * alpha)
    arr = np.atleast_1d(np.asarray(zeta, dtype=complex))
    if np.any(arr.real <= 0):
        raise ValueError("eval_g_alpha requires Re(zeta) > 0")
    z2 = arr**2
    prev = None
    for level in range(_MAX_LEVEL + 1):
        t, w = _tanh_sinh_nodes(level)
        acc = np.zeros(arr.shape, dtype=complex)
        for invert in (False, True):
            # u = log of the physical abscissa; the tail leg substitutes
            # t -> 1/t so its u is positive, the head leg's is negative.
            u = -np.log(t) if invert else np.log(t)
            lead = _log_mu_ratio(mu, u)
            if invert:
                kern = arr / (1.0 + z2 * t[:, None] ** 2)
            else:
                kern = arr / (t[:, None] ** 2 + z2)
            acc = acc + ((w * lead)[:, None] * kern).sum(axis=0)
        total = np.exp(-acc / math.pi)
        if prev is not None and np.max(np.abs(total - prev)) < tol:
            if np.asarray(zeta).ndim == 0:
                return complex(total[0])
            return total
        prev = total
    raise QuadratureError(f"g integral did not stabilize to {tol:g}")


def eval_J(mu, tol=1e-12):
    """The corner-constant integral J(mu), computed by quadrature.

    J(mu) = int_0^inf log(1 + t^{-2 mu}) e^{i pi/(2 mu)}/(t^2 - e^{i pi/mu}) dt.
    Its imaginary part fixes the modulus of g_alpha(-i); its real part has
    the closed form pi^2 (1 - mu)/4 returned by eval_ReJ.
    """
    if not mu > 0.5:
        raise ValueError("mu must exceed 1/2")
    a = math.pi / (2 * mu)
    ea = cmath.exp(1j * a)
    prev = None
    for level in range(_MAX_LEVEL + 1):
        t, w = _tanh_sinh_nodes(level)
        logt = np.log(t)
        lead = np.where(
            -2 * mu * logt > 300.0,
            -2 * mu * logt + np.exp(2 * mu * logt),
            np.log1p(np.exp(np.minimum(-2 * mu * logt, 300.0))),
        )
        part1 = (w * lead * (ea / (t**2 - ea**2))).sum()
        lead2 = np.log1p(np.exp(2 * mu * logt))
        part2 = (w * lead2 * (ea / (1.0 - t**2 * ea**2))).sum()
        total = part1 + part2
        if prev is not None and abs(total - prev) < tol:
            return complex(total)
        prev = total
    raise QuadratureError(f"J integral did not stabilize to {tol:g}")


def eval_ReJ(mu, verify=False):
    """Closed form pi^2 (1 - mu)/4 for Re J(mu), mu > 1/2.

    With verify=True the quadrature of eval_J is run and compared against
    the closed form at 1e-8; disagreement raises QuadratureError.
    """
    if not mu > 0.5:
        raise ValueError("mu must exceed 1/2")
    closed = math.pi**2 * (1.0 - mu) / 4.0
    if verify:
        quad = eval_J(mu).real
        if abs(quad - closed) > 1e-8:
            raise QuadratureError(
                f"quadrature {quad!r} disagrees with closed form {closed!r}"
            )
    return closed


@dataclass(frozen=True)
class ContourQuadrature:
    """Discretization knobs for the keyhole contour.

    The contour is a circle of radius `circle_radius` traversed
    counterclockwise plus two rays, one on each side of `ray_angle`.  Rays
    extend adaptively with geometrically growing panels until a panel pair
    contributes less than 1e-16 of the accumulated scale, capped at
    `truncation_radius`.  `nodes_per_unit` scales the angular and chord
    node density and should grow with the largest |z| to be evaluated.
    """

    ray_angle: float
    circle_radius: float = 2.0
    truncation_radius: float = 1e12
    nodes_per_unit: float = 48.0

    def __post_init__(self):
        if self.circle_radius <= 0 or self.truncation_radius <= self.circle_radius:
            raise ValueError("need 0 < circle_radius < truncation_radius")
        if self.nodes_per_unit < 4:
            raise ValueError("nodes_per_unit too small to resolve the contour")


def default_quadrature(alpha):
    """Keyhole discretization with the cut between the rays at pi + alpha/2."""
    return ContourQuadrature(ray_angle=math.pi + alpha / 2)
