"""slomod: exact linear algebra over rings of pi-adically convergent series.

The package computes with finitely generated modules over the rings of
power series sum a_i u^i whose coefficients satisfy v(a_i) + nu*i >= 0 for a
rational slope nu = beta/alpha: Euclidean division and Weierstrass
preparation, Hermite/Smith normal forms over the two Euclidean
localizations, maximal modules up to quasi-isomorphism, continued-fraction
generator schedules, and precision-tracked module sums.
"""

from .coeffs import CoeffElem, FqConfig, RingConfig, ZpConfig, coeff_add, coeff_inv, coeff_mul
from .contfrac import (
    ContinuedFraction,
    GenSchedule,
    Slope,
    best_approx_denominators,
    cf_expand,
    monomial_generators,
    nearest_ops,
)
from .series import (
    SnuSeries,
    divide_by_unit,
    euclid_div,
    gauss_valuation,
    gcd_extended,
    hi_lo_split,
    invert_unit,
    series_add,
    series_mul,
    slope_transport,
    weierstrass_degree,
    weierstrass_prep,
)

__all__ = [
    "CoeffElem",
    "ContinuedFraction",
    "FqConfig",
    "GenSchedule",
    "RingConfig",
    "Slope",
    "SnuSeries",
    "ZpConfig",
    "best_approx_denominators",
    "cf_expand",
    "coeff_add",
    "coeff_inv",
    "coeff_mul",
    "divide_by_unit",
    "euclid_div",
    "gauss_valuation",
    "gcd_extended",
    "hi_lo_split",
    "invert_unit",
    "monomial_generators",
    "nearest_ops",
    "series_add",
    "series_mul",
    "slope_transport",
    "weierstrass_degree",
    "weierstrass_prep",
]
