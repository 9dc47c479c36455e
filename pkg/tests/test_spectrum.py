"""Eigenpairs, Gram matrices, and the discrete expansion machinery."""

import math

import numpy as np
import pytest
import scipy.integrate
import scipy.special as sp

from abprop.errors import AccuracyError
from abprop.model import FieldParams, PolarPoint
from abprop.numerics import PolarGrid
from abprop.spectrum import (
    ModeIndex,
    SpectralCoefficients,
    WaveFunction,
    eigenfunction,
    eigenvalue,
    expand,
    gram_matrix,
    multiplicity,
    norm_sq,
    project_partial_wave,
    reconstruct,
    reconstruct_on_grid,
)


def test_eigenvalue_ladder():
    # lambda = (2m + 1 + |k+alpha|) b0 + (k+alpha) b0
    params = FieldParams(0.5, 1.0)
    assert eigenvalue(ModeIndex(0, 0), params) == pytest.approx(2.0)
    assert eigenvalue(ModeIndex(-1, 0), params) == pytest.approx(1.0)
    assert eigenvalue(ModeIndex(-5, 0), params) == pytest.approx(1.0)
    assert eigenvalue(ModeIndex(1, 1), params) == pytest.approx(6.0)
    scaled = FieldParams(0.25, 2.0)
    assert eigenvalue(ModeIndex(0, 0), scaled) == pytest.approx((1.25 + 0.25) * 2.0)


def test_negative_channels_sit_on_landau_levels():
    params = FieldParams(0.73, 1.9)
    for k in (-1, -3, -8):
        for m in (0, 2):
            assert eigenvalue(ModeIndex(k, m), params) == pytest.approx(
                (2 * m + 1) * params.b0
            )


def _radial_profile(mode, params, r):
    ak = abs(mode.k + params.alpha)
    s = params.b0 * r * r / 2.0
    return (
        r**ak
        * np.exp(-params.b0 * r * r / 4.0)
        * sp.eval_genlaguerre(mode.m, ak, s)
        / sp.binom(mode.m + ak, mode.m)
    )


def test_eigenfunction_matches_explicit_formula():
    params = FieldParams(0.3, 1.4)
    for k, m in ((0, 0), (2, 3), (-2, 1)):
        mode = ModeIndex(k, m)
        for r in (0.3, 1.0, 2.7):
            for th in (0.0, 1.1):
                want = _radial_profile(mode, params, r) * np.exp(1j * k * th)
                got = eigenfunction(mode, params, PolarPoint(r, th))
                assert got == pytest.approx(want, rel=1e-11, abs=1e-13)


def test_norm_sq_against_quadrature():
    params = FieldParams(0.62, 0.9)
    for k, m in ((0, 0), (1, 2), (-3, 1), (4, 0)):
        mode = ModeIndex(k, m)
        val, err = scipy.integrate.quad(
            lambda r: abs(_radial_profile(mode, params, r)) ** 2 * r,
            0.0,
            np.inf,
        )
        want = 2.0 * math.pi * val
        assert norm_sq(mode, params) == pytest.approx(want, rel=1e-10)


def test_gram_matrix_orthogonality():
    params = FieldParams(0.8, 2.0)
    gram, modes = gram_matrix(params, 3, 3)
    diag = np.real(np.diag(gram))
    closed = np.array([norm_sq(mode, params) for mode in modes])
    assert np.max(np.abs(diag - closed) / closed) < 1e-10
    normalized = gram / np.sqrt(np.outer(diag, diag))
    off = np.abs(normalized - np.eye(len(modes)))
    assert np.max(off) < 1e-8


def test_multiplicity_counts():
    params = FieldParams(0.5, 1.0)
    # lambda = 1: every k <= -1 at m = 0 sits there
    assert multiplicity(eigenvalue(ModeIndex(-1, 0), params), params) == math.inf
    # lambda = 4 on the positive branch: (0,1) and (1,0)
    assert multiplicity(eigenvalue(ModeIndex(1, 0), params), params) == 2
    # the positive branch keeps its k+m+1 degeneracy even at irrational
    # flux; only the cross-branch coincidences disappear
    irr = FieldParams(1.0 / math.sqrt(7.0), 1.0)
    assert multiplicity(eigenvalue(ModeIndex(2, 1), irr), irr) == 4
    assert multiplicity(eigenvalue(ModeIndex(0, 0), irr), irr) == 1
    assert multiplicity(-3.0, params) == 0


def test_wavefunction_validation_and_norm():
    grid = PolarGrid(1.0, 48, 32)
    sigma = 0.9
    vals = np.exp(-(grid.r**2) / (2 * sigma**2))[:, None] * np.ones(grid.n_theta)
    f = WaveFunction(grid, vals)
    # int e^{-r^2/sigma^2} dA = pi sigma^2
    assert f.norm_sq() == pytest.approx(math.pi * sigma**2, rel=1e-10)
    with pytest.raises(ValueError):
        WaveFunction(grid, np.ones((3, 3)))
    bad = vals.copy()
    bad[0, 0] = np.nan
    with pytest.raises(ValueError):
        WaveFunction(grid, bad)


def test_project_partial_wave_picks_the_harmonic():
    params = FieldParams(0.4, 1.0)
    grid = PolarGrid(1.0, 48, 64, nu=0.4)
    mode = ModeIndex(3, 1)
    vals = _radial_profile(mode, params, grid.r)[:, None] * np.exp(
        1j * 3 * grid.theta
    )[None, :]
    f = WaveFunction(grid, vals)
    fk = project_partial_wave(f, 3)
    assert np.max(np.abs(fk - _radial_profile(mode, params, grid.r))) < 1e-12
    assert np.max(np.abs(project_partial_wave(f, 2))) < 1e-12
    with pytest.raises(ValueError):
        project_partial_wave(f, 40)


def test_spectral_coefficients_validation():
    params = FieldParams(0.5, 1.0)
    table = np.zeros((3, 2), dtype=complex)
    coeffs = SpectralCoefficients(params, 1, 1, table)
    assert coeffs.power() == 0.0
    with pytest.raises(IndexError):
        coeffs.coeff(2, 0)
    with pytest.raises(ValueError):
        SpectralCoefficients(params, 1, 1, np.zeros((2, 2)))


def test_expand_recovers_prepared_coefficients():
    """Data assembled in the truncated span comes back to solver precision."""
    params = FieldParams(0.5, 1.0)
    grid = PolarGrid(1.0, 96, 64, nu=0.5, r_max=8.0)
    k_max, m_max = 3, 4
    rng = np.random.default_rng(5)
    table = rng.normal(size=(2 * k_max + 1, m_max + 1)) + 1j * rng.normal(
        size=(2 * k_max + 1, m_max + 1)
    )
    prepared = SpectralCoefficients(params, k_max, m_max, table)
    f = reconstruct_on_grid(prepared, grid)
    back = expand(f, params, k_max, m_max)
    assert np.max(np.abs(back.table - table)) < 1e-10
    # pointwise reconstruction agrees with the grid evaluation
    p = PolarPoint(float(grid.r[7]), float(grid.theta[11]))
    assert reconstruct(back, p) == pytest.approx(f.values[7, 11], rel=1e-10)


def test_expand_norm_consistency():
    # the coefficient power is a lower bound for the data norm; smooth data
    # converges slowly against the fractional-power flux basis, so only the
    # bulk of the norm is captured at modest m
    params = FieldParams(0.5, 1.0)
    grid = PolarGrid(1.0, 96, 64, nu=0.5, r_max=8.0)
    vals = np.exp(-(grid.r**2) / 2.0)[:, None] * np.ones(grid.n_theta)
    f = WaveFunction(grid, vals)
    coeffs = expand(f, params, 2, 10)
    assert coeffs.power() <= f.norm_sq() * (1.0 + 1e-8)
    assert coeffs.power() > 0.95 * f.norm_sq()
    shallow = expand(f, params, 2, 4)
    assert shallow.power() <= coeffs.power() * (1.0 + 1e-12)


def test_expand_rejects_unresolvable_truncation():
    params = FieldParams(0.5, 1.0)
    grid = PolarGrid(1.0, 24, 32, nu=0.5, r_max=3.0)
    vals = np.exp(-(grid.r**2))[:, None] * np.ones(grid.n_theta)
    f = WaveFunction(grid, vals)
    with pytest.raises(AccuracyError):
        expand(f, params, 6, 11)
    with pytest.raises(ValueError):
        expand(f, params, 40, 2)  # aliased angular truncation


def test_gram_matrix_respects_alpha_zero_reference():
    gram, modes = gram_matrix(FieldParams(0.0, 1.0), 2, 2)
    diag = np.real(np.diag(gram))
    normalized = gram / np.sqrt(np.outer(diag, diag))
    assert np.max(np.abs(normalized - np.eye(len(modes)))) < 1e-8
