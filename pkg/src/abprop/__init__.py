"""Spectral theory and propagator kernels for the planar magnetic
Schrodinger operator with an Aharonov-Bohm flux line on top of a uniform
field.

The package exposes the eigenpair machinery (``spectrum``), three
independent constructions of the time propagator kernel (``propagator``),
grid evolution and decay diagnostics (``evolve``), and the special-function
layer they share (``specfun``, ``numerics``).
"""

from .errors import AccuracyError
from .model import CartesianPoint, FieldParams, PolarPoint
from .numerics import PolarGrid, gauss_laguerre, gauss_legendre, integrate_adaptive
from .propagator import (
    KernelQuery,
    KernelValue,
    branch_data,
    diffractive_term,
    kernel_closed,
    kernel_covering,
    kernel_partial_wave,
    mehler_kernel,
    partial_fraction_sum,
)
from .spectrum import (
    ModeIndex,
    SpectralCoefficients,
    WaveFunction,
    eigenfunction,
    eigenvalue,
    expand,
    gram_matrix,
    multiplicity,
    norm_sq,
    reconstruct,
    reconstruct_on_grid,
)
from .evolve import (
    AdmissiblePair,
    apply_propagator,
    diffractive_bound_scan,
    dispersive_scan,
    evolve_spectral,
    lp_norm,
    strichartz_norm,
)

__version__ = "0.1.0"

__all__ = [
    "AccuracyError",
    "AdmissiblePair",
    "CartesianPoint",
    "FieldParams",
    "KernelQuery",
    "KernelValue",
    "ModeIndex",
    "PolarGrid",
    "PolarPoint",
    "SpectralCoefficients",
    "WaveFunction",
    "apply_propagator",
    "branch_data",
    "diffractive_bound_scan",
    "diffractive_term",
    "dispersive_scan",
    "eigenfunction",
    "eigenvalue",
    "evolve_spectral",
    "expand",
    "gauss_laguerre",
    "gauss_legendre",
    "gram_matrix",
    "integrate_adaptive",
    "kernel_closed",
    "kernel_covering",
    "kernel_partial_wave",
    "lp_norm",
    "mehler_kernel",
    "multiplicity",
    "norm_sq",
    "partial_fraction_sum",
    "reconstruct",
    "reconstruct_on_grid",
    "strichartz_norm",
    "__version__",
]
