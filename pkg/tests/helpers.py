"""Shared builders and independent brute-force oracles for the test suite."""

from fractions import Fraction

from slomod.coeffs import INF, CoeffElem, FqConfig, ZpConfig, _isinf
from slomod.contfrac import Slope
from slomod.localized import SMat
from slomod.series import SnuSeries

Z5 = ZpConfig(5, 20)
Z7 = ZpConfig(7, 20)
F2 = FqConfig(2, 20)
NU0 = Slope(0, 1)


def poly(cfg, slope, terms, prec=INF):
    """Series from (exponent, integer) pairs; exact by default."""
    return SnuSeries.from_int_terms(cfg, slope, terms, prec=prec)


def mono(cfg, slope, uexp, piexp=0, c=1, ram=1):
    coeff = CoeffElem.from_int(cfg, c, ram=ram).scale_pi(piexp)
    return SnuSeries.monomial(cfg, slope, uexp, coeff)


def series_is_zeroish(x) -> bool:
    """No certain nonzero digit."""
    return all(not c.has_witness() for c in x.coeffs.values())


def assert_zero_at_precision(x, min_level=None):
    for i, c in x.coeffs.items():
        assert not c.has_witness(), f"nonzero digit at u^{i}: {c!r}"
        if min_level is not None:
            assert c.val_lower() + x.nu * i >= min_level


def mat(cfg, slope, rows):
    return SMat(cfg, slope, rows)


def mat_from_cols(cfg, slope, cols):
    return SMat.from_columns(cfg, slope, cols)


def mats_agree(A, B) -> bool:
    if A.rows != B.rows or A.cols != B.cols:
        return False
    return all(
        A.a[i][j].digits_agree(B.a[i][j])
        for i in range(A.rows)
        for j in range(A.cols)
    )


def _unit_range(cfg):
    return cfg.p if cfg.kind == "zp" else cfg.q


def random_exact_poly(rng, cfg, slope, max_deg=3, max_pi=3):
    """Random nonzero exact polynomial inside the slope ring."""
    while True:
        coeffs = {}
        for i in range(max_deg + 1):
            if rng.random() < 0.55:
                continue
            vmin = -int(slope.nu * i)  # -floor(nu i): level floor 0
            v = max(rng.randrange(0, max_pi + 1) - 1, vmin)
            c = rng.randrange(1, _unit_range(cfg))
            coeffs[i] = CoeffElem.from_int(cfg, c).scale_pi(v)
        if coeffs:
            return SnuSeries(cfg, slope, coeffs)


def random_unit(rng, cfg, slope, max_deg=4):
    """Random exact series unit: v_nu = 0 attained first at exponent 0."""
    coeffs = {0: CoeffElem.from_int(cfg, rng.randrange(1, _unit_range(cfg)))}
    for i in range(1, max_deg + 1):
        if rng.random() < 0.5:
            continue
        vmin = -int(slope.nu * i)
        v = max(rng.randrange(0, 3), vmin)
        if v + slope.nu * i == 0:
            v += 1  # keep the degree anchored at 0
        c = rng.randrange(1, _unit_range(cfg))
        coeffs[i] = CoeffElem.from_int(cfg, c).scale_pi(v)
    return SnuSeries(cfg, slope, coeffs)


# ---------------------------------------------------------------------------
# brute-force oracles
# ---------------------------------------------------------------------------


def oracle_pos_best_approx(a, b, gamma):
    """Denominators q in [gamma, b] passing the defining inequality against
    every smaller admissible denominator, plus the b endpoint (the descent
    always keeps the full denominator).  Residues scaled by b stay integral."""
    out = []
    res = {}
    for q in range(gamma, b + 1):
        r = (q * a) % b
        if r == 0:
            r = b
        res[q] = r
    for q in range(gamma, b + 1):
        if q == b or all(res[d] > res[q] for d in range(gamma, q)):
            out.append(q)
    if b not in out:
        out.append(b)
    return out


def oracle_staircase(slope: Slope, delta: int):
    """Minimal monomial staircase of { x : v_nu(x) >= -delta/alpha } by a
    direct scan of the defining conditions."""
    alpha, beta = slope.alpha, slope.beta
    pairs = []
    prev_level = None
    x = 0
    limit = 2 * alpha + 2
    while x <= limit:
        # minimal y with y + x*nu >= -delta/alpha
        num = -Fraction(delta, alpha) - Fraction(beta, alpha) * x
        y = -((-num.numerator) // num.denominator)
        level = y + Fraction(beta, alpha) * x
        if prev_level is None or level < prev_level:
            pairs.append((x, y))
            prev_level = level
            if level == -Fraction(delta, alpha):
                break
        x += 1
    return pairs


def divides_monomial(slope: Slope, gen, pt) -> bool:
    """pi^gy u^gx divides pi^y u^x in the slope ring."""
    gx, gy = gen
    x, y = pt
    if x < gx:
        return False
    return Fraction(y - gy) + slope.nu * (x - gx) >= 0
