"""Walsh analysis on the dyadic group, Riesz-product interpolants and bilinear-form norms."""

from . import dyadic_core, interpolants, riesz_products, tensor_norms
from .dyadic_core import DyadicDomain, PointValues, WalshSeries, fwht, ifwht
from .interpolants import build_cascade_plan, pairing, ultra_interpolant, uniformize
from .riesz_products import riesz_product
from .tensor_norms import grothendieck_ratio, injective_norm_complex, injective_norm_real, kappa_estimate

__version__ = "0.1.0"

__all__ = [
    "dyadic_core", "riesz_products", "interpolants", "tensor_norms",
    "DyadicDomain", "PointValues", "WalshSeries", "fwht", "ifwht", "riesz_product",
    "build_cascade_plan", "ultra_interpolant", "pairing", "uniformize",
    "injective_norm_real", "injective_norm_complex", "grothendieck_ratio", "kappa_estimate",
]
