r"""Physical configuration, vector potentials, and the polar Hamiltonian.

The operator acts on the punctured plane.  Its vector potential is the sum
of a flux line at the origin (strength alpha, dimensionless) and a uniform
field (strength b0 > 0).  On the k-th angular Fourier channel the operator
reduces to the radial expression

    H_k = -d^2/dr^2 - (1/r) d/dr + (k + alpha + b0 r^2/2)^2 / r^2,

which is what :func:`apply_hamiltonian` discretizes for residual testing.
"""

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "FieldParams",
    "PolarPoint",
    "CartesianPoint",
    "vector_potential",
    "divergence_check",
    "apply_hamiltonian",
    "R_MIN_FACTOR",
]

# radial domain guard in units of 1/sqrt(b0); the flux term is singular at 0
R_MIN_FACTOR = 1e-6


@dataclass(frozen=True)
class FieldParams:
    """Flux parameter alpha in [0, 1) and field strength b0 > 0.

    alpha = 0 is admitted only as the reference configuration (the pure
    uniform-field kernel); the diffractive machinery assumes alpha in (0, 1).
    """

    alpha: float
    b0: float

    def __post_init__(self):
        if not (0.0 <= self.alpha < 1.0):
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        if not (self.b0 > 0.0):
            raise ValueError(f"b0 must be positive, got {self.b0}")

    @property
    def is_reference(self):
        """True for the alpha = 0 configuration (no flux line)."""
        return self.alpha == 0.0

    def alpha_k(self, k):
        """Channel order alpha_k = |k + alpha|."""
        return abs(k + self.alpha)


@dataclass(frozen=True)
class PolarPoint:
    r: float
    theta: float

    def __post_init__(self):
        if self.r < 0:
            raise ValueError(f"radius must be non-negative, got {self.r}")

    def to_cartesian(self):
        return CartesianPoint(
            self.r * math.cos(self.theta), self.r * math.sin(self.theta)
        )


@dataclass(frozen=True)
class CartesianPoint:
    x1: float
    x2: float

    def to_polar(self):
        return PolarPoint(math.hypot(self.x1, self.x2), math.atan2(self.x2, self.x1))

    @property
    def norm_sq(self):
        return self.x1 * self.x1 + self.x2 * self.x2


def vector_potential(p, params):
    """Total vector potential (A1, A2) at a Cartesian point away from the origin.

    Flux part alpha (-x2, x1)/|x|^2 plus uniform part (b0/2) (-x2, x1).
    """
    rr = p.norm_sq
    if rr == 0.0:
        raise ValueError("vector potential is singular at the origin")
    c = params.alpha / rr + params.b0 / 2.0
    return (-c * p.x2, c * p.x1)


def divergence_check(params, sample_points, h):
    """Max |div A| over the sample points by central differences (gauge test).

    The potential is divergence free; the discrete value decays like O(h^2).
    Points closer than 2h to the origin are rejected.
    """
    if h <= 0:
        raise ValueError(f"step h must be positive, got {h}")
    worst = 0.0
    for p in sample_points:
        if math.sqrt(p.norm_sq) <= 2.0 * h:
            raise ValueError(f"point {p} is within 2h of the origin")
        a1p = vector_potential(CartesianPoint(p.x1 + h, p.x2), params)[0]
        a1m = vector_potential(CartesianPoint(p.x1 - h, p.x2), params)[0]
        a2p = vector_potential(CartesianPoint(p.x1, p.x2 + h), params)[1]
        a2m = vector_potential(CartesianPoint(p.x1, p.x2 - h), params)[1]
        div = (a1p - a1m) / (2.0 * h) + (a2p - a2m) / (2.0 * h)
        worst = max(worst, abs(div))
    return worst


def apply_hamiltonian(g, k, params, radii):
    r"""Apply the radial channel operator to samples by finite differences.

    ``g`` holds samples of a radial function on the uniformly spaced,
    strictly increasing ``radii`` (all above the domain guard).  Returns
    (H_k g) at the interior radii ``radii[2:-2]`` using 5-point central
    stencils for both derivatives.
    """
    g = np.asarray(g, dtype=complex)
    r = np.asarray(radii, dtype=float)
    if len(r) < 5:
        raise ValueError("need at least 5 stencil points")
    if g.shape != r.shape:
        raise ValueError("g and radii must have matching shapes")
    d = np.diff(r)
    if np.any(d <= 0):
        raise ValueError("radii must be strictly increasing")
    h = d[0]
    if not np.allclose(d, h, rtol=1e-12, atol=0):
        raise ValueError("radii must be uniformly spaced for the stencil")
    r_min = R_MIN_FACTOR / math.sqrt(params.b0)
    if r[0] <= r_min:
        raise ValueError(f"radii must exceed the domain guard {r_min:.3g}")

    # 5-point central stencils (O(h^4))
    d2 = (-g[:-4] + 16 * g[1:-3] - 30 * g[2:-2] + 16 * g[3:-1] - g[4:]) / (12 * h * h)
    d1 = (g[:-4] - 8 * g[1:-3] + 8 * g[3:-1] - g[4:]) / (12 * h)
    ri = r[2:-2]
    pot = (k + params.alpha + params.b0 * ri * ri / 2.0) ** 2 / (ri * ri)
    return -d2 - d1 / ri + pot * g[2:-2]
