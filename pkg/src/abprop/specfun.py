r"""Special functions for the spectral theory of the magnetic Hamiltonian.

Provides Pochhammer symbols, the Kummer and Tricomi confluent hypergeometric
functions, generalized Laguerre polynomials, the radial polynomials attached
to each angular channel, Bessel J and modified Bessel I for complex argument,
and the closed form of the Laguerre Poisson kernel.

Series are summed in extended precision (``np.clongdouble``) with compensated
summation, so the alternating series (J_nu, Kummer M with negative first
parameter) keep a usable error budget at desk scale.  Every routine that can
fail to converge raises :class:`~abprop.errors.AccuracyError` carrying the
partial value.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError

__all__ = [
    "SeriesControl",
    "DEFAULT_CONTROL",
    "pochhammer",
    "kummer_m",
    "tricomi_u",
    "laguerre",
    "p_poly",
    "bessel_j",
    "bessel_i",
    "poisson_laguerre_rhs",
]

_EPS_LD = float(np.finfo(np.clongdouble).eps)


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for all series evaluations."""

    max_terms: int = 2000
    rel_tol: float = 1e-13

    def __post_init__(self):
        if not (1 <= self.max_terms <= 10000):
            raise ValueError(f"max_terms must be in [1, 10000], got {self.max_terms}")
        if not (self.rel_tol >= 1e-15):
            raise ValueError(f"rel_tol must be >= 1e-15, got {self.rel_tol}")


DEFAULT_CONTROL = SeriesControl()


def pochhammer(a, n):
    """Rising factorial (a)_n = a (a+1) ... (a+n-1), with (a)_0 = 1."""
    if n < 0 or n != int(n):
        raise ValueError(f"n must be a non-negative integer, got {n}")
    out = 1.0
    for i in range(int(n)):
        out *= a + i
    return out


def _rgamma(x):
    """1/Gamma(x) for real x, returning 0.0 at the poles (x = 0, -1, -2, ...)."""
    if x <= 0 and x == math.floor(x):
        return 0.0
    return 1.0 / math.gamma(x)


def kummer_m(a, b, z, ctl=DEFAULT_CONTROL):
    r"""Kummer confluent hypergeometric function M(a, b, z).

    Ascending series :math:`\sum_n (a)_n/(b)_n \, z^n/n!` summed with
    compensated summation in extended precision.  For a non-positive integer
    ``a`` the series terminates and the result is the exact polynomial.

    Raises ``ValueError`` for non-positive integer ``b`` and
    ``AccuracyError`` (carrying the partial sum) when the term budget runs
    out or cancellation eats the requested tolerance.
    """
    if b <= 0 and b == math.floor(b):
        raise ValueError(f"b must not be a non-positive integer, got {b}")
    zc = np.clongdouble(z)
    term = np.clongdouble(1.0)
    total = np.clongdouble(1.0)
    comp = np.clongdouble(0.0)  # Kahan compensation
    abs_sum = np.longdouble(1.0)
    # negative-integer a terminates the series after -a terms
    n_cap = ctl.max_terms
    if a <= 0 and a == math.floor(a):
        n_cap = min(n_cap, int(-a) + 1)
    converged = False
    for n in range(n_cap):
        term = term * np.clongdouble((a + n) / (b + n)) * zc / np.clongdouble(n + 1)
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        abs_sum += abs(term)
        if abs(term) <= 0.5 * ctl.rel_tol * abs(total) and n + 1 > abs(z):
            converged = True
            break
        if term == 0:
            converged = True
            break
    value = complex(total)
    cancel = _EPS_LD * float(abs_sum) / max(float(abs(total)), 1e-300)
    if cancel > ctl.rel_tol:
        raise AccuracyError(
            f"kummer_m cancellation {cancel:.2e} exceeds rel_tol {ctl.rel_tol:.2e}",
            value=value,
            err_est=cancel * abs(value),
        )
    if not converged:
        raise AccuracyError(
            f"kummer_m did not converge within {ctl.max_terms} terms",
            value=value,
            err_est=float(abs(term)),
        )
    return value


def tricomi_u(a, b, z, ctl=DEFAULT_CONTROL):
    r"""Tricomi confluent hypergeometric function U(a, b, z) for real z > 0.

    For non-integer ``b`` the connection formula

        U = Gamma(1-b)/Gamma(a-b+1) M(a,b,z)
            + Gamma(b-1)/Gamma(a) z^{1-b} M(a-b+1, 2-b, z)

    is used.  At large z the two M terms grow like e^z and cancel; beyond
    z = 15 (with a > 0) the Laplace integral representation

        U(a,b,z) = 1/Gamma(a) \int_0^\infty e^{-zt} t^{a-1} (1+t)^{b-a-1} dt

    is evaluated by generalized Gauss-Laguerre quadrature instead, which has
    no cancellation at all.
    """
    if b == math.floor(b):
        raise NotImplementedError(
            "integer b requires the logarithmic connection formula, which is "
            "not needed for non-integer channel orders and is unsupported"
        )
    if z <= 0:
        raise ValueError(f"z must be positive, got {z}")
    if z > 15 and a > 0:
        from scipy.special import roots_genlaguerre

        u, w = roots_genlaguerre(96, a - 1.0)
        integral = float(np.sum(w * (1.0 + u / z) ** (b - a - 1.0)))
        return integral / math.gamma(a) / z**a
    g1 = math.gamma(1 - b) * _rgamma(a - b + 1)
    g2 = math.gamma(b - 1) * _rgamma(a)
    m1 = kummer_m(a, b, z, ctl).real
    m2 = kummer_m(a - b + 1, 2 - b, z, ctl).real
    t1 = np.longdouble(g1) * np.longdouble(m1)
    t2 = np.longdouble(g2) * np.longdouble(z) ** np.longdouble(1 - b) * np.longdouble(m2)
    total = t1 + t2
    cancel = _EPS_LD * (abs(float(t1)) + abs(float(t2))) / max(abs(float(total)), 1e-300)
    if cancel > max(ctl.rel_tol, 1e-11):
        raise AccuracyError(
            f"tricomi_u cancellation {cancel:.2e} too large at z={z}",
            value=float(total),
            err_est=cancel * abs(float(total)),
        )
    return float(total)


def laguerre(m, nu, x):
    """Generalized Laguerre polynomial L^nu_m(x) by the three-term recurrence."""
    if m < 0 or m != int(m):
        raise ValueError(f"m must be a non-negative integer, got {m}")
    if nu <= -1:
        raise ValueError(f"nu must exceed -1, got {nu}")
    m = int(m)
    if m == 0:
        return 1.0
    prev = 1.0
    cur = 1.0 + nu - x
    for i in range(1, m):
        prev, cur = cur, ((2 * i + 1 + nu - x) * cur - (i + nu) * prev) / (i + 1)
    return cur


def p_poly(k, m, params, r):
    r"""Radial polynomial of degree m for angular channel k.

    P_{k,m}(r) = sum_n (-m)_n / (1+alpha_k)_n * r^n / n!  with
    alpha_k = |k + alpha|.  Equals binom(m+alpha_k, m)^{-1} L^{alpha_k}_m(r).
    The argument ``r`` is the scaled radial variable, not a radius.
    """
    ak = abs(k + params.alpha)
    return kummer_m(-m, 1.0 + ak, r).real


def bessel_j(nu, x, ctl=DEFAULT_CONTROL):
    r"""Bessel function J_nu(x) for real nu >= 0, x >= 0, by ascending series.

    The series alternates, so it is summed with Kahan compensation in
    extended precision and the accumulated cancellation is checked against
    the tolerance budget.  Desk-scale cap x <= 60.
    """
    if nu < 0:
        raise ValueError(f"nu must be non-negative, got {nu}")
    if x < 0:
        raise ValueError(f"x must be non-negative, got {x}")
    if x > 60:
        raise ValueError(f"x = {x} exceeds the desk-scale cap 60")
    if x == 0:
        return 1.0 if nu == 0 else 0.0
    xl = np.longdouble(x)
    term = np.exp(np.longdouble(nu * math.log(x / 2.0) - math.lgamma(nu + 1.0)))
    total = term
    comp = np.longdouble(0.0)
    abs_sum = abs(term)
    q = -(xl * xl) / 4
    converged = False
    for j in range(ctl.max_terms):
        term = term * q / np.longdouble((j + 1) * (nu + j + 1))
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        abs_sum += abs(term)
        if abs(term) <= 0.5 * ctl.rel_tol * max(abs(total), np.longdouble(1e-300)) and j + 1 > x / 2:
            converged = True
            break
    value = float(total)
    cancel = _EPS_LD * float(abs_sum) / max(abs(value), 1e-300)
    if cancel > ctl.rel_tol:
        raise AccuracyError(
            f"bessel_j cancellation {cancel:.2e} exceeds rel_tol at nu={nu}, x={x}",
            value=value,
            err_est=cancel * abs(value),
        )
    if not converged:
        raise AccuracyError(
            f"bessel_j did not converge within {ctl.max_terms} terms",
            value=value,
            err_est=float(abs(term)),
        )
    return value


# ---------------------------------------------------------------------------
# modified Bessel I: series path and integral path
# ---------------------------------------------------------------------------

_BESSEL_I_CAP = 80.0
_SWITCHOVER = 10.0


def _bessel_i_series(nu, z, ctl):
    """Ascending series for I_nu(z) in extended precision (vector in nu)."""
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    zc = np.clongdouble(z)
    if z == 0:
        out = np.where(nu == 0, 1.0 + 0j, 0.0 + 0j)
        return out
    lg = np.array([math.lgamma(v + 1.0) for v in nu])
    term = np.exp(nu.astype(np.clongdouble) * np.log(zc / 2) - lg.astype(np.clongdouble))
    total = term.copy()
    q = zc * zc / 4
    for j in range(ctl.max_terms):
        term = term * q / ((j + 1.0) * (nu + j + 1.0)).astype(np.clongdouble)
        total += term
        if np.all(np.abs(term) <= 0.25 * ctl.rel_tol * np.abs(total)) and j + 1 > abs(z) / 2:
            break
    return total.astype(complex)


def _gl_cache(n, _cache={}):
    if n not in _cache:
        _cache[n] = np.polynomial.legendre.leggauss(n)
    return _cache[n]


def _gl_complex_segment(f, a, b, n):
    """Gauss-Legendre quadrature of f along the straight segment [a, b] in C."""
    x, w = _gl_cache(n)
    mid = (a + b) / 2.0
    half = (b - a) / 2.0
    return half * np.sum(w * f(mid + half * x), axis=-1)

def _bessel_i_integral(nu, z, ctl):
    r"""Integral representation of I_nu(z) for Re z >= 0.

    I_nu(z) = (1/pi) \int_0^pi e^{z cos u} cos(nu u) du
              - (sin(nu pi)/pi) \int_0^\infty e^{-z cosh s - nu s} ds.

    For purely/partly imaginary z the half-line factor oscillates like
    e^{-i Im(z) cosh s}; the path is rotated onto Im s = -sign(Im z) pi/2
    past s = 2, where cosh turns into +/- i sinh and the integrand decays
    doubly exponentially.  No poles obstruct the rotation.
    """
    nu = np.atleast_1d(np.asarray(nu, dtype=float))
    n_osc = max(320, int(4 * abs(z)))
    u, wu = _gl_cache(n_osc)
    um = (u + 1.0) * (math.pi / 2.0)  # map to [0, pi]
    first = (math.pi / 2.0) * ((np.exp(z * np.cos(um)) * wu) @ np.cos(np.outer(um, nu))) / math.pi

    sin_fac = np.sin(np.pi * nu) / math.pi
    if np.all(sin_fac == 0):
        return first.astype(complex)

    v = z.imag if isinstance(z, complex) else 0.0
    zr = z.real if isinstance(z, complex) else float(z)
    if abs(v) < 1e-12 or abs(v) <= zr:
        # real part dominates: the real-axis integrand decays before the
        # Im-z oscillation accumulates (total phase <= |v|/Re z * log scale)
        s_end = math.asinh(max(40.0 / max(zr, 1e-12), 2.0)) + 1.0
        second = _gl_complex_segment(
            lambda s: np.exp(-z * np.cosh(s)) * np.exp(-np.outer(nu, s)),
            0.0, s_end, 400,
        )
    else:
        d = -1.0 if v > 0 else 1.0
        s0 = 2.0
        sig = math.asinh(math.log(1e16) / abs(v)) + 1.0
        n_cen = max(200, int(4.0 * abs(v) * (math.cosh(s0) - 1.0)))
        f = lambda s: np.exp(-z * np.cosh(s)) * np.exp(-np.outer(nu, s))
        second = _gl_complex_segment(f, 0.0, s0, min(n_cen, 1200))
        second = second + _gl_complex_segment(f, s0, s0 + 1j * d * math.pi / 2, 120)
        second = second + _gl_complex_segment(
            f, s0 + 1j * d * math.pi / 2, s0 + sig + 1j * d * math.pi / 2, 240
        )
    return (first - sin_fac * second).astype(complex)


def bessel_i(nu, z, ctl=DEFAULT_CONTROL, method="auto"):
    r"""Modified Bessel function I_nu(z) for real nu >= 0 and complex z.

    Two independent evaluation paths: the ascending series (small |z|) and
    the integral representation (moderate |z|, Re z >= 0).  ``method`` may
    force either path ("series" / "integral") for cross-validation; "auto"
    switches at |z| = 10, except that orders nu >= |z| stay on the series,
    whose terms are then monotone dominated (no cancellation) while the
    quadrature's absolute error floor would swamp the tiny function value.
    Arguments with |z| > 80 are out of desk scale.
    """
    nu_arr = np.atleast_1d(np.asarray(nu, dtype=float))
    scalar = np.isscalar(nu) or getattr(nu, "ndim", 0) == 0
    if np.any(nu_arr < 0):
        raise ValueError("nu must be non-negative")
    z = complex(z)
    if abs(z) > _BESSEL_I_CAP:
        raise ValueError(f"|z| = {abs(z):.3g} exceeds the desk-scale cap {_BESSEL_I_CAP}")
    if method not in ("auto", "series", "integral"):
        raise ValueError(f"unknown method {method!r}")

    if z.real < 0:
        # reflect to the right half plane: I_nu(z e^{+-i pi}) = e^{+-i nu pi} I_nu(z)
        sgn = 1.0 if z.imag >= 0 else -1.0
        refl = np.exp(1j * math.pi * sgn * nu_arr)
        inner = bessel_i(nu_arr, -z, ctl=ctl, method=method)
        out = refl * np.atleast_1d(inner)
        return complex(out[0]) if scalar else out

    if method == "series" or (method == "auto" and abs(z) < _SWITCHOVER):
        out = _bessel_i_series(nu_arr, z, ctl)
    elif method == "integral":
        out = _bessel_i_integral(nu_arr, z, ctl)
    else:
        out = np.empty(nu_arr.shape, dtype=complex)
        big = nu_arr >= abs(z)
        if np.any(big):
            out[big] = _bessel_i_series(nu_arr[big], z, ctl)
        if np.any(~big):
            out[~big] = _bessel_i_integral(nu_arr[~big], z, ctl)
    return complex(out[0]) if scalar else out


def poisson_laguerre_rhs(c, a, b, nu):
    r"""Closed form of the Laguerre Poisson kernel.

    Equals sum_m e^{-cm} m!/Gamma(m+nu+1) L^nu_m(a) L^nu_m(b) for Re c > 0:

        e^{nu c/2} (ab)^{-nu/2} / (1 - e^{-c})
          * exp(-(a+b) e^{-c} / (1 - e^{-c}))
          * I_nu(2 sqrt(ab) e^{-c/2} / (1 - e^{-c})).
    """
    c = complex(c)
    if c.real <= 0:
        raise ValueError(f"Re c must be positive, got {c}")
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if nu <= -1:
        raise ValueError(f"nu must exceed -1, got {nu}")
    ec = np.exp(-c)
    denom = 1.0 - ec
    arg = 2.0 * math.sqrt(a * b) * np.exp(-c / 2.0) / denom
    pref = np.exp(nu * c / 2.0) * (a * b) ** (-nu / 2.0) / denom
    gauss = np.exp(-(a + b) * ec / denom)
    return pref * gauss * bessel_i(nu, arg)
