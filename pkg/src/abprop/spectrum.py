r"""Eigenpairs of the flux-plus-field operator and spectral transforms.

On the k-th angular channel the operator has the purely discrete ladder

    lambda_{k,m} = (2m + 1 + |k+alpha|) b0 + (k+alpha) b0,

with eigenfunctions r^{a_k} e^{-b0 r^2/4} P_{k,m}(b0 r^2/2) e^{ik theta},
a_k = |k+alpha|, where P_{k,m} is a confluent-hypergeometric polynomial
(a rescaled generalized Laguerre polynomial).  This module evaluates these
objects, their closed-form norms, eigenvalue multiplicities, and converts
grid data to and from coefficient tables against the unit-normalized basis.

Expansion uses exact angular projection (an FFT bin on the uniform theta
grid) followed by a per-channel least-squares solve against the discrete
radial Gram matrix.  The solve makes recovery of data already in the span
exact up to conditioning, which a plain quadrature inner product cannot
achieve once the fractional power r^{a_k} defeats polynomial exactness of
the radial rule.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import AccuracyError
from .model import FieldParams
from .numerics import PolarGrid, gauss_laguerre

__all__ = [
    "ModeIndex",
    "SpectralCoefficients",
    "WaveFunction",
    "eigenvalue",
    "eigenfunction",
    "norm_sq",
    "multiplicity",
    "project_partial_wave",
    "expand",
    "reconstruct",
    "reconstruct_on_grid",
    "gram_matrix",
]


@dataclass(frozen=True)
class ModeIndex:
    """Angular momentum k and radial quantum number m >= 0."""

    k: int
    m: int

    def __post_init__(self):
        if self.m < 0:
            raise ValueError(f"radial quantum number must be >= 0, got {self.m}")

    def alpha_k(self, params):
        """Effective channel order |k + alpha|."""
        return abs(self.k + params.alpha)

    def beta_k(self, params):
        """Bottom of the channel ladder, (1 + alpha_k) b0 + (k + alpha) b0."""
        return (1.0 + self.alpha_k(params)) * params.b0 + (
            self.k + params.alpha
        ) * params.b0


def eigenvalue(mode, params):
    """lambda_{k,m} = (2m + 1 + |k+alpha|) b0 + (k+alpha) b0."""
    shift = mode.k + params.alpha
    return (2 * mode.m + 1 + abs(shift)) * params.b0 + shift * params.b0


def _laguerre_table(m_max, a, x, damped=True):
    """Rows L_m^a(x) for m = 0..m_max, times e^{-x/2} when damped.

    The damping factor rides along the three-term recurrence so no
    intermediate exceeds binom(m+a, m), keeping large-x evaluation safe.
    """
    x = np.asarray(x, dtype=float)
    rows = np.empty((m_max + 1, x.size))
    rows[0] = np.exp(-x / 2.0) if damped else 1.0
    if m_max >= 1:
        rows[1] = (1.0 + a - x) * rows[0]
    for n in range(1, m_max):
        rows[n + 1] = ((2 * n + 1 + a - x) * rows[n] - (n + a) * rows[n - 1]) / (n + 1)
    return rows


def _inv_binom(m, a):
    # 1 / binom(m+a, m): converts L_m^a to the polynomial normalized to 1 at 0
    return math.exp(math.lgamma(m + 1) + math.lgamma(a + 1) - math.lgamma(m + a + 1))


def _radial_table(params, k, m_max, r, normalized):
    """Radial factors of V_{k,m} (rows m = 0..m_max) at the radii r."""
    r = np.asarray(r, dtype=float)
    a = abs(k + params.alpha)
    x = params.b0 * r * r / 2.0
    table = _laguerre_table(m_max, a, x) * np.power(r, a)
    for m in range(m_max + 1):
        scale = _inv_binom(m, a)
        if normalized:
            scale /= math.sqrt(norm_sq(ModeIndex(k, m), params))
        table[m] *= scale
    return table


def eigenfunction(mode, params, p):
    """V_{k,m} at a polar point: r^{a_k} e^{-b0 r^2/4} P_{k,m}(b0 r^2/2) e^{ik theta}."""
    radial = _radial_table(params, mode.k, mode.m, np.array([p.r]), False)[mode.m, 0]
    return radial * np.exp(1j * mode.k * p.theta)


def norm_sq(mode, params):
    """Closed-form squared L2 norm of V_{k,m}.

    pi (2/b0)^{a_k+1} Gamma(1+a_k) / binom(m+a_k, m), evaluated through
    lgamma so large m stays in range.
    """
    a = mode.alpha_k(params)
    log_val = (
        math.log(math.pi)
        + (a + 1.0) * math.log(2.0 / params.b0)
        + 2.0 * math.lgamma(1.0 + a)
        + math.lgamma(mode.m + 1.0)
        - math.lgamma(mode.m + a + 1.0)
    )
    return math.exp(log_val)


def multiplicity(lam, params, j_window=64, tol=1e-9):
    """Number of modes sharing the eigenvalue ``lam``.

    Channels with j + alpha <= 0 all sit at the j-independent integrality
    value lam/(2 b0) - 1/2; when that is a non-negative integer the
    degeneracy is infinite and ``math.inf`` is returned.  On the
    j + alpha > 0 side the integrality expression decreases strictly in j,
    so the scan window is extended until the expression goes negative,
    which certifies that no larger j can contribute.
    """
    b0 = params.b0
    alpha = params.alpha

    def is_count(v):
        return v > -tol and abs(v - round(v)) <= tol and round(v) >= 0

    if is_count(lam / (2.0 * b0) - 0.5):
        return math.inf

    count = 0
    j = 0 if alpha > 0.0 else 1
    stop = j + max(j_window, 1)
    while True:
        while j < stop:
            mval = lam / (2.0 * b0) - (j + alpha) - 0.5
            if mval < -tol:
                return count
            if is_count(mval):
                count += 1
            j += 1
        stop += j_window


@dataclass(frozen=True)
class WaveFunction:
    """Grid samples of a complex field, shape (len(grid.r), grid.n_theta)."""

    grid: PolarGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=complex)
        object.__setattr__(self, "values", values)
        if values.shape != (len(self.grid.r), self.grid.n_theta):
            raise ValueError(
                f"values shape {values.shape} does not match grid "
                f"({len(self.grid.r)}, {self.grid.n_theta})"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")

    def norm_sq(self):
        """Squared L2 norm under the grid's area weights."""
        return float(np.real(self.grid.integrate(np.abs(self.values) ** 2)))


def project_partial_wave(f, k):
    """Angular component f_k(r) = (1/2pi) int f(r, theta) e^{-ik theta} dtheta.

    Uses the uniform-grid trapezoid sum (an FFT bin), exact for data band
    limited below the Nyquist index, hence the angular-count guard.
    """
    n_theta = f.grid.n_theta
    if n_theta <= 2 * abs(k):
        raise ValueError(
            f"angular grid of {n_theta} points aliases harmonic k={k}; "
            f"need n_theta > {2 * abs(k)}"
        )
    return np.fft.fft(f.values, axis=1)[:, k % n_theta] / n_theta


@dataclass(frozen=True)
class SpectralCoefficients:
    """Coefficient table against the unit-normalized eigenfunctions.

    ``table[k + k_max, m]`` holds c_{k,m}; the represented field is
    sum c_{k,m} V_{k,m}/||V_{k,m}||, so sum |c|^2 is its squared L2 norm.
    """

    params: FieldParams
    k_max: int
    m_max: int
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.k_max < 0 or self.m_max < 0:
            raise ValueError("truncation orders must be >= 0")
        table = np.asarray(self.table, dtype=complex)
        object.__setattr__(self, "table", table)
        want = (2 * self.k_max + 1, self.m_max + 1)
        if table.shape != want:
            raise ValueError(f"table shape {table.shape}, expected {want}")
        if not np.all(np.isfinite(table)):
            raise ValueError("coefficients must be finite")

    def coeff(self, k, m):
        if abs(k) > self.k_max or not (0 <= m <= self.m_max):
            raise IndexError(f"mode (k={k}, m={m}) outside the stored truncation")
        return self.table[k + self.k_max, m]

    def power(self):
        """sum |c_{k,m}|^2, the squared norm of the represented field."""
        return float(np.sum(np.abs(self.table) ** 2))


def _check_grid_params(grid, params):
    if not math.isclose(grid.b0, params.b0, rel_tol=1e-12):
        raise ValueError(
            f"grid was built for b0={grid.b0}, parameters have b0={params.b0}"
        )


def expand(f, params, k_max, m_max):
    """Project grid data onto the eigenbasis, channel by channel.

    Radial coefficients per channel solve the discrete normal equations
    G c = b, with G the Gram matrix of the normalized radial factors under
    the grid weights.  Data in the truncated span is recovered to solver
    precision, making repeated expansion idempotent.

    Raises :class:`AccuracyError` when the radial grid cannot resolve the
    requested truncation or the channel Gram matrix is too ill-conditioned
    to trust.
    """
    if k_max < 0 or m_max < 0:
        raise ValueError("truncation orders must be >= 0")
    grid = f.grid
    _check_grid_params(grid, params)
    n_r = len(grid.r)
    if grid.n_theta <= 2 * k_max:
        raise ValueError(f"angular grid of {grid.n_theta} points aliases k_max={k_max}")
    if n_r < m_max + 1:
        raise AccuracyError(
            f"{n_r} radial nodes cannot resolve m_max={m_max}; the channel "
            "Gram matrix would be rank deficient"
        )
    # radial_weights carry one angular slice 2 pi / n_theta; scaling by
    # n_theta restores the full 2 pi of the L2 pairing
    w_full = grid.radial_weights * grid.n_theta
    fhat = np.fft.fft(f.values, axis=1) / grid.n_theta
    table = np.empty((2 * k_max + 1, m_max + 1), dtype=complex)
    for k in range(-k_max, k_max + 1):
        basis = _radial_table(params, k, m_max, grid.r, True)
        weighted = basis * w_full
        gram = weighted @ basis.T
        rhs = weighted @ fhat[:, k % grid.n_theta]
        cond = np.linalg.cond(gram)
        if not np.isfinite(cond) or cond > 1e12:
            raise AccuracyError(
                f"channel k={k} Gram matrix has condition {cond:.2e}; "
                "increase radial resolution or lower m_max"
            )
        try:
            factor = scipy.linalg.cho_factor(gram)
        except scipy.linalg.LinAlgError as exc:
            raise AccuracyError(f"channel k={k} Gram solve failed: {exc}") from exc
        table[k + k_max] = scipy.linalg.cho_solve(factor, rhs)
    return SpectralCoefficients(params, k_max, m_max, table)


def reconstruct(coeffs, p):
    """Truncated eigenfunction sum at one polar point."""
    total = 0.0j
    for k in range(-coeffs.k_max, coeffs.k_max + 1):
        radial = _radial_table(
            coeffs.params, k, coeffs.m_max, np.array([p.r]), True
        )[:, 0]
        total += (coeffs.table[k + coeffs.k_max] @ radial) * np.exp(1j * k * p.theta)
    return complex(total)


def reconstruct_on_grid(coeffs, grid):
    """Evaluate the truncated eigenfunction sum on a full polar grid."""
    _check_grid_params(grid, coeffs.params)
    values = np.zeros((len(grid.r), grid.n_theta), dtype=complex)
    for k in range(-coeffs.k_max, coeffs.k_max + 1):
        radial = coeffs.table[k + coeffs.k_max] @ _radial_table(
            coeffs.params, k, coeffs.m_max, grid.r, True
        )
        values += radial[:, None] * np.exp(1j * k * grid.theta)[None, :]
    return WaveFunction(grid, values)


def gram_matrix(params, k_max, m_max, n_theta=None):
    """Numerical Gram matrix of the raw eigenfunctions, plus the mode list.

    Entries are quadrature inner products: the angular factor is the
    uniform trapezoid sum (exactly zero between distinct harmonics up to
    rounding) and the radial factor uses a generalized Gauss-Laguerre rule
    of order (a_k + a_k')/2, which integrates the polynomial part exactly.
    Diagonal entries therefore test the closed-form :func:`norm_sq` and
    off-diagonal entries test orthogonality, with no modeling shortcut.
    """
    if n_theta is None:
        n_theta = max(16, 4 * k_max + 8)
    nm = m_max + 1
    ks = list(range(-k_max, k_max + 1))
    modes = [ModeIndex(k, m) for k in ks for m in range(nm)]
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    gram = np.zeros((len(ks) * nm, len(ks) * nm), dtype=complex)
    rules = {}
    b0 = params.b0
    for i, k in enumerate(ks):
        a = abs(k + params.alpha)
        for j in range(i, len(ks)):
            kp = ks[j]
            ap = abs(kp + params.alpha)
            nu_pair = 0.5 * (a + ap)
            key = round(nu_pair, 12)
            if key not in rules:
                rules[key] = gauss_laguerre(nm + 6, nu_pair)
            rule = rules[key]
            pk = _laguerre_table(m_max, a, rule.nodes, damped=False)
            pkp = _laguerre_table(m_max, ap, rule.nodes, damped=False)
            for m in range(nm):
                pk[m] *= _inv_binom(m, a)
                pkp[m] *= _inv_binom(m, ap)
            pref = (1.0 / b0) * (2.0 / b0) ** nu_pair
            block = pref * ((pk * rule.weights) @ pkp.T)
            ang = (2.0 * math.pi / n_theta) * np.sum(np.exp(1j * (kp - k) * theta))
            gram[i * nm : (i + 1) * nm, j * nm : (j + 1) * nm] = ang * block
            if j > i:
                gram[j * nm : (j + 1) * nm, i * nm : (i + 1) * nm] = (
                    np.conj(ang) * block.T
                )
    return gram, modes
