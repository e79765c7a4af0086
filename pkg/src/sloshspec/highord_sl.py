"""Spectra of the higher-order Sturm-Liouville problem (-1)^q U^(2q) = S^(2q) U.

On an interval [0, L] with either the Neumann conditions
U^(m)(0) = U^(m)(L) = 0 for m = q..2q-1 or the Dirichlet conditions with
m = 0..q-1, the positive spectrum is located by scanning the smallest
singular value of a scaled 2q x 2q boundary matrix built from the
exponential ansatz U = sum_k c_k exp(w_k S x), where w_k runs over the
2q-th roots of -1.

Scaling keeps every matrix entry bounded: column k is divided by
exp(max(0, Re w_k) S L) and the row for a derivative of order m by S^m.
The Neumann problem additionally has the polynomial kernel
span{1, x, ..., x^(q-1)}, reported as a zero eigenvalue of multiplicity
exactly q.
"""

import math
from dataclasses import dataclass, field
import numpy as np

SINGULAR_THRESHOLD = 1e-9
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


class SLSolveError(RuntimeError):
    pass


@dataclass(frozen=True)
class HighOrderSLProblem:
    q: int
    interval_length: float
    condition: str

    def __post_init__(self):
        if self.q < 1 or int(self.q) != self.q:
            raise ValueError("q must be a positive integer")
        if not self.interval_length > 0:
            raise ValueError("interval_length must be positive")
        if self.condition not in ("neumann", "dirichlet"):
            raise ValueError("condition must be 'neumann' or 'dirichlet'")

    @property
    def derivative_orders(self):
        if self.condition == "neumann":
            return range(self.q, 2 * self.q)
        return range(0, self.q)


def roots_of_minus_one(q: int) -> np.ndarray:
    """The 2q complex roots of -1, sorted by increasing argument in (-pi, pi]."""
    if q < 1:
        raise ValueError("q must be a positive integer")
    m = np.arange(2 * q)
    args = (2 * m + 1) * math.pi / (2 * q)
    args = np.angle(np.exp(1j * args))  # wrap into (-pi, pi]
    args.sort()
    return np.exp(1j * args)


def ansatz_exponents(q: int) -> np.ndarray:
    """Exponent directions w_k with w^(2q) = (-1)^q, increasing argument.

    Substituting exp(w lam x) into (-1)^q U^(2q) = lam^(2q) U forces
    w^(2q) = (-1)^q: the 2q-th roots of -1 when q is odd and of +1 when q
    is even.  Either way the set contains the oscillatory pair +-i and is
    closed under conjugation and negation.
    """
    if q < 1:
        raise ValueError("q must be a positive integer")
    if q % 2:
        return roots_of_minus_one(q)
    m = np.arange(2 * q)
    args = np.angle(np.exp(1j * m * math.pi / q))
    args.sort()
    return np.exp(1j * args)


def boundary_matrix(problem: HighOrderSLProblem, lam: float) -> np.ndarray:
    """Scaled boundary matrix whose kernel gives the ansatz coefficients.

    The true matrix M has rows w_k^m lam^m (at x=0) and
    w_k^m lam^m exp(w_k lam L) (at x=L); this returns D_r M D_c with the
    row/column scalings described in the module docstring, so a kernel
    vector v of the scaled matrix maps to coefficients c_k = v_k / s_k
    with s_k = exp(max(0, Re w_k) lam L).
    """
    if not lam > 0:
        raise ValueError("lam must be positive")
    q = problem.q
    L = problem.interval_length
    w = ansatz_exponents(q)
    shift = np.maximum(w.real, 0.0) * lam * L
    rows = []
    for m in problem.derivative_orders:
        rows.append(w**m * np.exp(-shift))
        rows.append(w**m * np.exp(w * lam * L - shift))
    return np.array(rows)


def characteristic_smallest_singular_value(problem: HighOrderSLProblem, lam: float) -> float:
    """sigma_min / sigma_max of the scaled boundary matrix at lam > 0."""
    s = np.linalg.svd(boundary_matrix(problem, lam), compute_uv=False)
    return s[-1] / s[0]


def ode_asymptotic_prediction(q: int, interval_length: float, k: int) -> float:
    """Lattice prediction (pi (k - 1/2) - pi q / 2) / L, valid for k >= q + 1."""
    if q < 1:
        raise ValueError("q must be a positive integer")
    if not interval_length > 0:
        raise ValueError("interval_length must be positive")
    if k <= q:
        raise ValueError(f"prediction applies to k >= q + 1 = {q + 1}, got k = {k}")
    return (math.pi * (k - 0.5) - math.pi * q / 2.0) / interval_length


def _golden_minimize(f, a, b, reltol=1e-13):
    """Golden-section minimum of a unimodal f on [a, b]."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while (b - a) > reltol * max(1.0, abs(b)):
        if f1 <= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
    xm = 0.5 * (a + b)
    return xm, f(xm)


@dataclass
class SLEigenfunction:
    """One positive eigenvalue with render-ready ansatz coefficients.

    ``scaled_coefficients`` pair with the overflow-free exponents
    w_k lam x - max(0, Re w_k) lam L; ``coefficients`` are the plain
    ansatz coefficients c_k (tiny for growing exponentials).  Both are
    already phase-aligned, sign-fixed, and L2-normalized on [0, L].
    """

    problem: HighOrderSLProblem
    lam: float
    coefficients: np.ndarray
    scaled_coefficients: np.ndarray
    roots: np.ndarray = field(repr=False, default=None)

    def __post_init__(self):
        if self.roots is None:
            self.roots = ansatz_exponents(self.problem.q)


def _eval_complex(entry: SLEigenfunction, x, order=0):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    L = entry.problem.interval_length
    lam = entry.lam
    w = entry.roots
    shift = np.maximum(w.real, 0.0) * lam * L
    expo = np.outer(x, w * lam) - shift[None, :]
    deriv = (w * lam) ** order if order else np.ones_like(w)
    return np.exp(expo) @ (entry.scaled_coefficients * deriv)


def eigenfunction_eval(entry: SLEigenfunction, x):
    """Real normalized eigenfunction evaluated at points x in [0, L]."""
    out = _eval_complex(entry, x).real
    return float(out[0]) if np.asarray(x).ndim == 0 else out


def eigenfunction_derivative(entry: SLEigenfunction, x, order: int):
    """order-th derivative of the real normalized eigenfunction."""
    if order < 0:
        raise ValueError("order must be nonnegative")
    out = _eval_complex(entry, x, order=order).real
    return float(out[0]) if np.asarray(x).ndim == 0 else out


def _gauss_panels(a, b, panels, nodes=12):
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    edges = np.linspace(a, b, panels + 1)
    mid = 0.5 * (edges[:-1] + edges[1:])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * xg[None, :]).ravel()
    w = (half[:, None] * wg[None, :]).ravel()
    return x, w


def _finalize_eigenfunction(problem, lam, scaled_vec, roots):
    entry = SLEigenfunction(problem, lam, None, scaled_vec.copy(), roots)
    L = problem.interval_length
    panels = max(8, int(math.ceil(lam * L)) + 4)
    xq, wq = _gauss_panels(0.0, L, panels)
    u = _eval_complex(entry, xq)
    # rotate the arbitrary SVD phase so the real part carries maximal norm
    g2 = np.sum(wq * u * u)
    theta = -0.5 * np.angle(g2) if abs(g2) > 0 else 0.0
    entry.scaled_coefficients = entry.scaled_coefficients * np.exp(1j * theta)
    u = u * np.exp(1j * theta)
    norm = math.sqrt(float(np.sum(wq * u.real**2)))
    if norm == 0.0:
        raise SLSolveError(f"degenerate null vector at lam = {lam}")
    entry.scaled_coefficients /= norm
    # fix the overall sign from the first nonvanishing derivative at 0+
    for order in range(0, 2 * problem.q + 1):
        v0 = float(_eval_complex(entry, np.array([0.0]), order=order).real[0])
        if abs(v0) > 1e-8 * max(1.0, lam) ** order:
            if v0 < 0:
                entry.scaled_coefficients = -entry.scaled_coefficients
            break
    shift = np.maximum(roots.real, 0.0) * lam * L
    entry.coefficients = entry.scaled_coefficients * np.exp(-shift)
    return entry


@dataclass
class SLSpectrum:
    problem: HighOrderSLProblem
    eigenvalues: list
    coefficient_sets: list  # aligned with eigenvalues; None for the zero modes

    def eigenfunction(self, index: int) -> SLEigenfunction:
        lam = self.eigenvalues[index]
        if lam <= 0:
            raise ValueError("the zero eigenvalue has the polynomial kernel 1, x, ..., x^(q-1)")
        return _finalize_eigenfunction(
            self.problem, lam, self.coefficient_sets[index], ansatz_exponents(self.problem.q)
        )


def solve_spectrum(problem: HighOrderSLProblem, kmax: int) -> SLSpectrum:
    """First kmax eigenvalues (with multiplicity) by scan plus golden refine.

    The scan step is pi / (4 L); bracketed local minima of the normalized
    smallest singular value are refined by golden section to relative
    tolerance 1e-13 and accepted below 1e-9.  A density check against the
    one-per-pi/L eigenvalue spacing guards against missed or spurious
    roots.
    """
    if kmax < 1:
        raise ValueError("kmax must be at least 1")
    q, L = problem.q, problem.interval_length
    eigenvalues = []
    coefficient_sets = []
    if problem.condition == "neumann":
        eigenvalues.extend([0.0] * q)
        coefficient_sets.extend([None] * q)
    needed = kmax - len(eigenvalues)
    if needed <= 0:
        return SLSpectrum(problem, eigenvalues[:kmax], coefficient_sets[:kmax])

    ratio = lambda lam: characteristic_smallest_singular_value(problem, lam)
    step = math.pi / (4.0 * L)
    lam_lo = 0.25 * math.pi / L
    ceiling = ode_asymptotic_prediction(q, L, q + needed + 1) + math.pi / (2.0 * L)

    grid = [lam_lo]
    vals = [ratio(lam_lo)]
    found = []  # (lam, multiplicity, scaled kernel vectors)
    i = 1
    while len(grid) < 4 * int(math.ceil((ceiling - lam_lo) / step)) + 8:
        lam = lam_lo + i * step
        grid.append(lam)
        vals.append(ratio(lam))
        if len(grid) >= 3 and vals[-2] < vals[-3] and vals[-2] < vals[-1]:
            lam_min, fmin = _golden_minimize(ratio, grid[-3], grid[-1])
            if fmin < SINGULAR_THRESHOLD:
                mat = boundary_matrix(problem, lam_min)
                s, vh = np.linalg.svd(mat)[1:]
                mult = int(np.sum(s / s[0] < SINGULAR_THRESHOLD))
                for j in range(mult):
                    found.append((lam_min, vh[-1 - j].conj()))
        if len(found) >= needed and grid[-1] > ode_asymptotic_prediction(q, L, q + needed) + 0.25 * math.pi / L:
            break
        i += 1
    if len(found) < needed:
        raise SLSolveError(
            f"located only {len(found)} of {needed} positive eigenvalues below lam = {grid[-1]:.6g}"
        )

    found = found[:needed]
    # density sanity: positive eigenvalues should sit one per pi/L near the lattice
    top = found[-1][0]
    expected = top * L / math.pi + q / 2.0 + 0.5 - q
    if abs(len(found) - expected) > 1.6:
        raise SLSolveError(
            f"{len(found)} eigenvalues located below {top:.6g} but the one-per-pi/L density predicts {expected:.2f}"
        )
    for lam, vec in found:
        eigenvalues.append(lam)
        coefficient_sets.append(vec)
    return SLSpectrum(problem, eigenvalues, coefficient_sets)


def duality_map(coefficients: np.ndarray, q: int) -> np.ndarray:
    """Map ansatz coefficients c_k to c_k w_k^q, swapping Neumann and Dirichlet.

    Shifting every derivative order by q turns one condition set into the
    other; applying the map twice multiplies by w_k^(2q) = (-1)^q.
    """
    w = ansatz_exponents(q)
    return np.asarray(coefficients) * w**q
