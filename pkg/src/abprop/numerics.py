r"""Quadrature engines and polar grids shared by all modules.

Gauss-Legendre and generalized Gauss-Laguerre rules, an adaptive 1-D
integrator with an embedded error estimate, and polar product grids mapped
through the radial substitution r = sqrt(2 s / B0) so that radial spectral
integrals become Laguerre-weighted integrals in s.
"""

import heapq
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_genlaguerre

from .errors import AccuracyError

__all__ = [
    "QuadratureRule",
    "gauss_legendre",
    "gauss_laguerre",
    "integrate_adaptive",
    "PolarGrid",
]


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a 1-D quadrature rule.

    ``kind`` is "legendre" (interval [-1, 1], weight 1) or "laguerre"
    (half line, weight x^nu e^{-x} with the rule's ``nu``).
    """

    nodes: np.ndarray
    weights: np.ndarray
    kind: str
    nu: float = 0.0

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.shape != weights.shape or nodes.ndim != 1:
            raise ValueError("nodes and weights must be 1-D arrays of equal length")
        if not np.all(np.diff(nodes) > 0):
            raise ValueError("nodes must be strictly increasing")
        if not np.all(weights > 0):
            raise ValueError("weights must be positive")
        if self.kind not in ("legendre", "laguerre"):
            raise ValueError(f"unknown rule kind {self.kind!r}")

    def __len__(self):
        return len(self.nodes)


def gauss_legendre(n):
    """Standard Gauss-Legendre rule on [-1, 1], symmetrized exactly."""
    if not (1 <= n <= 512):
        raise ValueError(f"n must be in [1, 512], got {n}")
    x, w = np.polynomial.legendre.leggauss(int(n))
    # enforce the +-x symmetry bit-exactly
    x = (x - x[::-1]) / 2.0
    w = (w + w[::-1]) / 2.0
    return QuadratureRule(nodes=x, weights=w, kind="legendre")


def gauss_laguerre(n, nu=0.0):
    """Generalized Gauss-Laguerre rule for the weight x^nu e^{-x} on (0, inf).

    Large rules have far-out nodes whose weights underflow to zero in double
    precision; those nodes are dropped (they carry less than ~1e-300 of the
    weight mass, invisible at any tolerance used here).
    """
    if not (1 <= n <= 256):
        raise ValueError(f"n must be in [1, 256], got {n}")
    if nu <= -1:
        raise ValueError(f"nu must exceed -1, got {nu}")
    x, w = roots_genlaguerre(int(n), float(nu))
    keep = w > 0
    return QuadratureRule(nodes=x[keep], weights=w[keep], kind="laguerre", nu=float(nu))


# ---------------------------------------------------------------------------
# adaptive integration
# ---------------------------------------------------------------------------

_GL_LO = gauss_legendre(7)
_GL_HI = gauss_legendre(15)


def _panel(f, a, b):
    """Return (high-order value, error estimate) on the panel [a, b]."""
    mid = (a + b) / 2.0
    half = (b - a) / 2.0
    hi = half * np.sum(_GL_HI.weights * f(mid + half * _GL_HI.nodes))
    lo = half * np.sum(_GL_LO.weights * f(mid + half * _GL_LO.nodes))
    return hi, abs(hi - lo)


def integrate_adaptive(f, a, b, tol=1e-10, max_panels=1024):
    r"""Adaptively integrate f over [a, b] with an embedded GL15/GL7 estimate.

    Bisects the worst panel until the summed error estimate drops below
    ``tol``.  Infinite endpoints are handled by rational substitutions
    (x = t/(1-t) style), so decaying integrands need no manual truncation.
    Returns ``(value, err_est)``; raises :class:`AccuracyError` carrying the
    best value when the panel budget is exhausted.
    """
    if tol < 1e-13:
        raise ValueError(f"tol must be >= 1e-13, got {tol}")
    sign = 1.0
    if a > b:
        a, b, sign = b, a, -1.0

    if np.isinf(a) and np.isinf(b):
        g = lambda t: f(t / (1.0 - t * t)) * (1.0 + t * t) / (1.0 - t * t) ** 2
        lo, hi = -1.0, 1.0
    elif np.isinf(b):
        g = lambda t: f(a + t / (1.0 - t)) / (1.0 - t) ** 2
        lo, hi = 0.0, 1.0
    elif np.isinf(a):
        g = lambda t: f(b - t / (1.0 - t)) / (1.0 - t) ** 2
        lo, hi = 0.0, 1.0
    else:
        g, lo, hi = f, a, b

    val, err = _panel(g, lo, hi)
    # heap over (-err, counter, a, b, value, err)
    heap = [(-err, 0, lo, hi, val, err)]
    count = 1
    while True:
        total_err = sum(item[5] for item in heap)
        if total_err <= tol:
            break
        if count >= max_panels:
            total = sign * sum(item[4] for item in heap)
            raise AccuracyError(
                f"adaptive integration: {max_panels} panels exhausted, "
                f"err_est {total_err:.3e} > tol {tol:.3e}",
                value=total,
                err_est=total_err,
            )
        _, _, pa, pb, _, _ = heapq.heappop(heap)
        pm = (pa + pb) / 2.0
        v1, e1 = _panel(g, pa, pm)
        v2, e2 = _panel(g, pm, pb)
        heapq.heappush(heap, (-e1, count, pa, pm, v1, e1))
        heapq.heappush(heap, (-e2, count + 1, pm, pb, v2, e2))
        count += 2
    value = sign * sum(item[4] for item in heap)
    err_est = sum(item[5] for item in heap)
    return value, err_est


# ---------------------------------------------------------------------------
# polar grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PolarGrid:
    r"""Polar product grid with area weights.

    Radial nodes come from a generalized Gauss-Laguerre rule in the scaled
    variable s = B0 r^2 / 2, mapped back through r = sqrt(2 s / B0); the
    stored per-node weights are de-weighted so that

        sum_{ij} weights[i, j] f(r_i, theta_j)  ~  \int\int f(r, theta) r dr dtheta

    for smooth integrands with Gaussian-type decay.  Angular nodes are
    uniform (the trapezoid rule, spectrally accurate for periodic data).
    ``r_max`` truncates the radial extent; nodes whose de-weighted weight
    cannot be formed in double precision are dropped the same way.
    """

    b0: float
    n_r: int = 96
    n_theta: int = 256
    nu: float = 0.0
    r_max: float = None
    radial_rule: QuadratureRule = field(init=False, repr=False)
    r: np.ndarray = field(init=False, repr=False)
    theta: np.ndarray = field(init=False, repr=False)
    radial_weights: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.b0 <= 0:
            raise ValueError(f"b0 must be positive, got {self.b0}")
        if self.n_theta < 8:
            raise ValueError(f"n_theta must be at least 8, got {self.n_theta}")
        rule = gauss_laguerre(self.n_r, self.nu)
        s = rule.nodes
        # de-weight: area element r dr dtheta = ds dtheta / B0
        logw = np.log(rule.weights) + s - self.nu * np.log(s)
        keep = np.isfinite(logw)
        if self.r_max is not None:
            keep &= s <= self.b0 * self.r_max**2 / 2.0
        s = s[keep]
        w_area = np.exp(logw[keep]) / self.b0 * (2.0 * math.pi / self.n_theta)
        object.__setattr__(self, "radial_rule", rule)
        object.__setattr__(self, "r", np.sqrt(2.0 * s / self.b0))
        object.__setattr__(
            self, "theta", 2.0 * math.pi * np.arange(self.n_theta) / self.n_theta
        )
        object.__setattr__(self, "radial_weights", w_area)

    @property
    def s(self):
        """Scaled radial nodes s = B0 r^2 / 2."""
        return self.b0 * self.r**2 / 2.0

    @property
    def weights(self):
        """Per-node area weights, shape (len(r), n_theta)."""
        return np.broadcast_to(
            self.radial_weights[:, None], (len(self.r), self.n_theta)
        )

    def integrate(self, values):
        """Integrate grid samples against the area weights."""
        values = np.asarray(values)
        if values.shape != (len(self.r), self.n_theta):
            raise ValueError(
                f"values shape {values.shape} does not match grid "
                f"({len(self.r)}, {self.n_theta})"
            )
        return np.sum(self.radial_weights[:, None] * values)
