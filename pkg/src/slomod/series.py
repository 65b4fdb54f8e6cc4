"""Truncated elements of the slope-nu series rings and their arithmetic.

An ``SnuSeries`` is a finite piece of  x = sum a_i u^i  with coefficients in
K (or K' = K[w], w^ram = pi):

* ``coeffs``      maps exponents to nonzero ``CoeffElem``s; an absent key
  below ``u_prec`` is an exact zero;
* ``u_prec``      exponents >= u_prec are unknown (INF for polynomials);
* ``tail_bound``  certified lower bound on v(a_i) + nu*i over the unknown
  exponents -- the membership certificate that makes valuation and
  Weierstrass-degree branching sound.  A plain element of the slope ring has
  tail_bound >= 0; tail_bound -lam/alpha encodes membership in w^lam-shifted
  copies.

The Gauss valuation of a truncation is only an upper bound for the valuation
of the underlying element; operations that branch on v_nu or deg_W therefore
demand a *certified* reading: a witness digit attains the visible minimum
and every unknown piece (imprecise digits and the tail) provably cannot go
below it.  ``certified_val_deg`` implements exactly that check.

Exponents may be negative (Laurent windows for the u-localization); the
operations specific to the non-localized ring assert non-negative support.
"""

from __future__ import annotations

from fractions import Fraction

from .coeffs import INF, CoeffElem, _isinf
from .contfrac import Slope
from .errors import (
    BadParameters,
    NotDistinguished,
    NotDistinguishedCertificate,
    NotDivisible,
    NotUnit,
    NotUnitDegree,
    NonTermination,
    OutOfRange,
    PrecisionExhausted,
    RequiresExactInput,
    SlopeMismatch,
    ValuationOrder,
)

NEG_INF = -INF


def _ceil(x) -> int:
    x = Fraction(x)
    return -((-x.numerator) // x.denominator)


def _floor(x) -> int:
    x = Fraction(x)
    return x.numerator // x.denominator


class SnuSeries:
    __slots__ = ("cfg", "slope", "ram", "coeffs", "u_prec", "tail_bound")

    def __init__(self, cfg, slope: Slope, coeffs, u_prec=INF, tail_bound=None, ram=None):
        self.cfg = cfg
        self.slope = slope
        clean = {}
        r = ram
        for i, c in coeffs.items():
            if c.is_exact_zero():
                continue
            if r is None:
                r = c.ram
            elif c.ram != r:
                raise ValueError("mixed ram indices in one series")
            if not _isinf(u_prec) and i >= u_prec:
                raise ValueError("stored exponent beyond u_prec")
            clean[i] = c
        self.ram = r if r is not None else (ram or 1)
        self.coeffs = clean
        if not _isinf(u_prec) and tail_bound is not None and _isinf(tail_bound):
            u_prec = INF  # an infinite tail bound means the tail is exactly 0
        self.u_prec = u_prec
        if _isinf(u_prec):
            self.tail_bound = INF
        elif tail_bound is None:
            self.tail_bound = Fraction(0)
        else:
            self.tail_bound = tail_bound

    # -- constructors -------------------------------------------------------

    @classmethod
    def zero(cls, cfg, slope, ram=1):
        return cls(cfg, slope, {}, INF, ram=ram)

    @classmethod
    def one(cls, cfg, slope, ram=1, prec=INF):
        return cls(cfg, slope, {0: CoeffElem.from_int(cfg, 1, ram=ram, prec=prec)})

    @classmethod
    def monomial(cls, cfg, slope, exp: int, coeff: CoeffElem):
        return cls(cfg, slope, {exp: coeff})

    @classmethod
    def from_int_terms(cls, cfg, slope, terms, prec=INF, ram=1):
        """terms: iterable of (exponent, integer) pairs."""
        coeffs = {}
        for i, n in terms:
            c = CoeffElem.from_int(cfg, n, ram=ram, prec=prec)
            coeffs[i] = coeffs[i] + c if i in coeffs else c
        return cls(cfg, slope, coeffs)

    # -- basic views ---------------------------------------------------------

    @property
    def nu(self) -> Fraction:
        return self.slope.nu

    def support(self):
        return sorted(self.coeffs)

    def coeff(self, i: int) -> CoeffElem:
        c = self.coeffs.get(i)
        if c is not None:
            return c
        return CoeffElem.exact_zero(self.cfg, self.ram)

    def is_polynomial(self) -> bool:
        return _isinf(self.u_prec)

    def is_exact(self) -> bool:
        return self.is_polynomial() and all(c.is_exact() for c in self.coeffs.values())

    def is_exact_zero(self) -> bool:
        return self.is_polynomial() and not self.coeffs

    def is_certainly_zero(self) -> bool:
        """No stored digits and an infinite tail bound: provably zero even
        if stored with a finite u-window."""
        return not self.coeffs and _isinf(self.tail_bound)

    def max_deg(self):
        return max(self.coeffs) if self.coeffs else None

    def min_exp(self):
        return min(self.coeffs) if self.coeffs else None

    def _level(self, i: int, c: CoeffElem) -> Fraction:
        return c.val_lower() + self.nu * i

    def lower_bound(self) -> Fraction:
        """Certified lower bound for v_nu of the underlying element."""
        lb = self.tail_bound
        for i, c in self.coeffs.items():
            lb = min(lb, self._level(i, c))
        return lb

    @property
    def shift(self) -> int:
        """Smallest lam with a certificate that the element lies in
        w^-lam * (slope ring), in 1/alpha units."""
        lb = self.lower_bound()
        if _isinf(lb):
            return 0
        return max(0, _ceil(-self.slope.alpha * lb))

    # -- certified readings ---------------------------------------------------

    def visible_valuation(self):
        """Gauss valuation of the truncated representative (INF if it has
        no certain nonzero digit).  Upper bound for the true valuation."""
        best = INF
        for i, c in self.coeffs.items():
            if c.has_witness():
                best = min(best, c.val() + self.nu * i)
        return best

    def visible_degree(self):
        best = INF
        arg = NEG_INF
        for i in sorted(self.coeffs):
            c = self.coeffs[i]
            if not c.has_witness():
                continue
            lvl = c.val() + self.nu * i
            if lvl < best:
                best = lvl
                arg = i
        return arg

    def certified_val_deg(self):
        """(v_nu, deg_W) of the underlying element, or raise.

        Certification: some witness digit attains the visible minimum v;
        every imprecise digit at a smaller exponent is provably above v,
        every other imprecise digit and the unknown tail provably at or
        above v.  Exact zero raises NotDistinguishedCertificate as well.
        """
        v = self.visible_valuation()
        if _isinf(v):
            if self.is_exact_zero():
                raise NotDistinguishedCertificate("exact zero has no Weierstrass data")
            raise PrecisionExhausted("no certain digit to anchor the valuation")
        d = self.visible_degree()
        if self.tail_bound < v:
            raise PrecisionExhausted(
                f"tail bound {self.tail_bound} cannot rule out terms below {v}"
            )
        for i, c in self.coeffs.items():
            if c.has_witness():
                continue
            lb = self._level(i, c)
            if lb < v or (lb == v and i < d):
                raise PrecisionExhausted(
                    f"imprecise digit at u^{i} could change the valuation data"
                )
        return v, d

    def certified_valuation(self):
        """v_nu of the underlying element, certified (degree not needed:
        imprecise digits may tie the minimum as long as they cannot go
        below it)."""
        v = self.visible_valuation()
        if _isinf(v):
            if self.is_certainly_zero() or self.is_exact_zero():
                return INF
            raise PrecisionExhausted("no certain digit to anchor the valuation")
        if self.tail_bound < v:
            raise PrecisionExhausted(
                f"tail bound {self.tail_bound} cannot rule out terms below {v}"
            )
        for i, c in self.coeffs.items():
            if not c.has_witness() and self._level(i, c) < v:
                raise PrecisionExhausted(
                    f"imprecise digit at u^{i} could lower the valuation"
                )
        return v

    # -- structural equality ---------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, SnuSeries):
            return NotImplemented
        return (
            self.slope == other.slope
            and self.ram == other.ram
            and self.u_prec == other.u_prec
            and self.tail_bound == other.tail_bound
            and self.coeffs == other.coeffs
        )

    def digits_agree(self, other: "SnuSeries") -> bool:
        """No digit that both sides claim to know disagrees."""
        d = self - other
        return all(not c.has_witness() for c in d.coeffs.values())

    # -- rescaling helpers -------------------------------------------------------

    def with_ram(self, ram: int) -> "SnuSeries":
        if ram == self.ram:
            return self
        return SnuSeries(
            self.cfg,
            self.slope,
            {i: c.with_ram(ram) for i, c in self.coeffs.items()},
            self.u_prec,
            self.tail_bound,
            ram=ram,
        )

    def map_coeffs(self, fn) -> "SnuSeries":
        return SnuSeries(
            self.cfg,
            self.slope,
            {i: fn(i, c) for i, c in self.coeffs.items()},
            self.u_prec,
            self.tail_bound,
            ram=self.ram,
        )

    def scale_pi(self, j: int) -> "SnuSeries":
        """Multiply by pi^j (exact, any sign)."""
        out = self.map_coeffs(lambda i, c: c.scale_pi(j))
        return SnuSeries(
            out.cfg, out.slope, out.coeffs, out.u_prec,
            None if _isinf(out.u_prec) else self.tail_bound + j, ram=out.ram,
        )

    def scale_coeff(self, k: CoeffElem) -> "SnuSeries":
        if k.is_exact_zero():
            return SnuSeries.zero(self.cfg, self.slope, self.ram)
        out = self.map_coeffs(lambda i, c: c * k)
        tb = None if _isinf(out.u_prec) else self.tail_bound + k.val_lower()
        return SnuSeries(out.cfg, out.slope, out.coeffs, out.u_prec, tb, ram=out.ram)

    def shift_u(self, j: int) -> "SnuSeries":
        """Multiply by u^j (j may be negative when the support allows)."""
        coeffs = {i + j: c for i, c in self.coeffs.items()}
        up = self.u_prec if _isinf(self.u_prec) else self.u_prec + j
        tb = None if _isinf(self.u_prec) else self.tail_bound + self.nu * j
        return SnuSeries(self.cfg, self.slope, coeffs, up, tb, ram=self.ram)

    def truncate_u(self, p: int) -> "SnuSeries":
        """Forget all coefficients at exponents >= p."""
        if p >= self.u_prec:
            return self
        tb = self.tail_bound
        coeffs = {}
        for i, c in self.coeffs.items():
            if i < p:
                coeffs[i] = c
            else:
                tb = min(tb, self._level(i, c))
        # tb stays INF only when nothing unknown was dropped (a polynomial
        # truncated beyond its degree): the tail is then exactly zero.
        return SnuSeries(self.cfg, self.slope, coeffs, p, tb, ram=self.ram)

    def forget_beyond(self, p: int, tail_level=None) -> "SnuSeries":
        """Truly forget all exponents >= p: the tail becomes unknown with
        only the membership level bound (default 0)."""
        t = self.truncate_u(p)
        tb = Fraction(0) if tail_level is None else Fraction(tail_level)
        return SnuSeries(self.cfg, self.slope, dict(t.coeffs), p, min(tb, t.tail_bound), ram=self.ram)

    def split_levels(self, bound):
        """(low, high) with self = low + high: low carries the certain
        digits of level < bound (exactly known support), high the rest."""
        lows, highs = {}, {}
        a = self.ram
        for i, c in self.coeffs.items():
            cut = _ceil(a * (bound - self.nu * i))
            lo, hi = c.split_at_abs_w(cut)
            if not lo.is_exact_zero():
                lows[i] = lo
            if not hi.is_exact_zero():
                highs[i] = hi
        low = SnuSeries(self.cfg, self.slope, lows, INF, ram=a)
        high = SnuSeries(self.cfg, self.slope, highs, self.u_prec, self.tail_bound, ram=a)
        return low, high

    def reduce_levels(self, bound) -> "SnuSeries":
        """Cap knowledge at level ``bound``: digit i keeps only what lies
        below level bound, the rest is folded into imprecision."""
        if _isinf(bound):
            return self
        a = self.ram

        def red(i, c):
            abs_w = _ceil(a * (bound - self.nu * i))
            return c.reduce_abs_w(abs_w)

        coeffs = {i: red(i, c) for i, c in self.coeffs.items()}
        up = self.u_prec
        tb = min(self.tail_bound, bound)
        if _isinf(up):
            # a level cap on a polynomial leaves the support exact
            return SnuSeries(self.cfg, self.slope, coeffs, INF, None, ram=a)
        return SnuSeries(self.cfg, self.slope, coeffs, up, tb, ram=a)

    # -- ring operations -----------------------------------------------------

    def _check_compat(self, other: "SnuSeries"):
        if self.slope != other.slope:
            raise SlopeMismatch(f"slopes {self.slope} vs {other.slope}")
        if not self.cfg.same_ring(other.cfg):
            raise SlopeMismatch("mixed coefficient rings")

    def __add__(self, other: "SnuSeries") -> "SnuSeries":
        self._check_compat(other)
        a, b = self, other
        if a.ram != b.ram:
            r = max(a.ram, b.ram)
            a, b = a.with_ram(r), b.with_ram(r)
        up = min(a.u_prec, b.u_prec)
        if not _isinf(up):
            a, b = a.truncate_u(up), b.truncate_u(up)
        coeffs = dict(a.coeffs)
        for i, c in b.coeffs.items():
            coeffs[i] = coeffs[i] + c if i in coeffs else c
        tb = None if _isinf(up) else min(a.tail_bound, b.tail_bound)
        return SnuSeries(a.cfg, a.slope, coeffs, up, tb, ram=a.ram)

    def __neg__(self) -> "SnuSeries":
        return self.map_coeffs(lambda i, c: -c)

    def __sub__(self, other: "SnuSeries") -> "SnuSeries":
        return self + (-other)

    def __mul__(self, other: "SnuSeries") -> "SnuSeries":
        self._check_compat(other)
        a, b = self, other
        if a.ram != b.ram:
            r = max(a.ram, b.ram)
            a, b = a.with_ram(r), b.with_ram(r)
        # exponent k is reliable while no unknown-tail term can reach it:
        # unknown(a) * stored(b) lands at >= a.u_prec + min supp(b), etc.
        lo_a = min(a.coeffs, default=a.u_prec)
        lo_b = min(b.coeffs, default=b.u_prec)
        up = min(a.u_prec + lo_b, b.u_prec + lo_a)
        coeffs: dict = {}
        for i, ca in a.coeffs.items():
            for j, cb in b.coeffs.items():
                k = i + j
                if k >= up:
                    continue
                prod = ca * cb
                coeffs[k] = coeffs[k] + prod if k in coeffs else prod
        if _isinf(up):
            tb = None
        else:
            # unknown(x)*y + x*unknown(y) (+ unknown*unknown, dominated)
            tb = min(
                a.tail_bound + b.lower_bound(), a.lower_bound() + b.tail_bound
            )
        return SnuSeries(a.cfg, a.slope, coeffs, up, tb, ram=a.ram)

    def __repr__(self):
        return self.render()

    def render(self, var="u", pi_name=None) -> str:
        parts = []
        for i in sorted(self.coeffs):
            c = self.coeffs[i].render(pi_name=pi_name)
            if "+" in c or "-" in c[1:] or " " in c:
                c = f"({c})"
            if i == 0:
                parts.append(c)
            else:
                head = var if i == 1 else f"{var}^{i}"
                parts.append(head if c == "1" else f"{c}*{head}")
        body = " + ".join(parts) if parts else "0"
        if not _isinf(self.u_prec):
            body += f" + O({var}^{self.u_prec})"
        return body


# ---------------------------------------------------------------------------
# spec-level operations
# ---------------------------------------------------------------------------


def gauss_valuation(x: SnuSeries):
    """Gauss valuation of the truncated representative.

    Equals the valuation of the underlying element only when certified (see
    SnuSeries.certified_val_deg / precision.guarded_valuation); in general
    it is an upper bound.  Returns INF for a representative with no certain
    nonzero digit.
    """
    return x.visible_valuation()


def weierstrass_degree(x: SnuSeries):
    """Smallest stored exponent attaining the Gauss valuation; -inf for a
    representative with no certain nonzero digit."""
    return x.visible_degree()


def series_add(x: SnuSeries, y: SnuSeries) -> SnuSeries:
    return x + y


def series_mul(x: SnuSeries, y: SnuSeries) -> SnuSeries:
    return x * y


def hi_lo_split(x: SnuSeries, d: int):
    """(Lo(x,d), Hi(x,d)) with x = Lo + Hi and deg Lo < d."""
    if d < 0 or d > x.u_prec:
        raise OutOfRange(f"split point {d} outside [0, {x.u_prec}]")
    lo = SnuSeries(
        x.cfg, x.slope, {i: c for i, c in x.coeffs.items() if i < d}, INF, ram=x.ram
    )
    hi = SnuSeries(
        x.cfg,
        x.slope,
        {i: c for i, c in x.coeffs.items() if i >= d},
        x.u_prec,
        x.tail_bound,
        ram=x.ram,
    )
    return lo, hi


def divide_by_unit(z: SnuSeries, x: SnuSeries, u_prec=None) -> SnuSeries:
    """y with x*y = z, for x of certified Weierstrass degree 0 and
    v_nu(x) <= v_nu(z).

    Coefficient recurrence b_j = a_0^{-1} (c_j - sum a_i b_{j-i}); the
    output carries min(u_prec of the inputs) unless a cap is supplied.
    """
    x._check_compat(z)
    try:
        vx, dx = x.certified_val_deg()
    except PrecisionExhausted:
        raise
    except NotDistinguishedCertificate:
        raise NotUnitDegree("divisor has no certified Weierstrass data")
    if dx != 0:
        raise NotUnitDegree(f"divisor has Weierstrass degree {dx} != 0")
    lz = z.lower_bound()
    if lz < vx:
        vz = z.visible_valuation()
        if not _isinf(vz) and vz < vx:
            raise NotDivisible(f"v_nu(z) = {vz} < v_nu(x) = {vx}")
        raise PrecisionExhausted("cannot certify v_nu(z) >= v_nu(x)")
    if z.min_exp() is not None and z.min_exp() < 0 or (x.min_exp() or 0) < 0:
        raise BadParameters("divide_by_unit expects non-negative supports")
    a0_inv = x.coeff(0).inv()
    xs = sorted(i for i in x.coeffs if i > 0)
    if not xs and z.is_polynomial():
        # single-digit divisor: the quotient is the exact polynomial z/a_0
        return z.scale_coeff(a0_inv)
    cap = min(z.u_prec, x.u_prec) if u_prec is None else min(u_prec, z.u_prec, x.u_prec)
    if _isinf(cap):
        if not xs:
            cap = z.u_prec  # finite: z not polynomial here
        else:
            raise BadParameters("series division of exact polynomials needs a u-precision cap")
    b: dict = {}
    for j in range(cap):
        acc = z.coeff(j)
        for i in xs:
            if i > j:
                break
            if (j - i) in b:
                acc = acc - x.coeffs[i] * b[j - i]
        bj = acc * a0_inv
        if not bj.is_exact_zero():
            b[j] = bj
    return SnuSeries(z.cfg, z.slope, b, cap, lz - vx, ram=max(z.ram, x.ram))


def invert_unit(x: SnuSeries, n, u_prec=None) -> SnuSeries:
    """y with x*y = 1 modulo terms of Gauss valuation >= n.

    Requires a certified unit (deg_W = 0 and v_nu = 0).  Residue step
    inverts the valuation-zero part, then Newton doubling y <- y + y(1-xy)
    until every certain digit of 1 - x*y sits at valuation >= n.
    """
    try:
        vx, dx = x.certified_val_deg()
    except (PrecisionExhausted, NotDistinguishedCertificate) as e:
        raise NotUnit(str(e))
    if dx != 0 or vx != 0:
        raise NotUnit(f"v_nu = {vx}, deg_W = {dx}: not a unit")
    cap = x.u_prec if u_prec is None else min(u_prec, x.u_prec)
    if _isinf(cap):
        d_max = x.max_deg() or 0
        cap = (d_max + 1) * (max(1, _ceil(Fraction(n) * x.slope.alpha)) + 1) + 8
    level0 = SnuSeries(
        x.cfg,
        x.slope,
        {i: c for i, c in x.coeffs.items() if c.has_witness() and c.val() + x.nu * i == 0},
        ram=x.ram,
    )
    y = divide_by_unit(SnuSeries.one(x.cfg, x.slope, ram=x.ram), level0, u_prec=cap)
    one = SnuSeries.one(x.cfg, x.slope, ram=x.ram)
    xt = x.truncate_u(cap)
    budget = 2 * (_ceil(Fraction(n) * x.slope.alpha).bit_length() + 2)
    for _ in range(budget):
        e = one - xt * y
        ve = e.visible_valuation()
        if _isinf(ve) or ve >= n:
            return y
        y = y + y * e
    e = one - xt * y
    ve = e.visible_valuation()
    if _isinf(ve) or ve >= n:
        return y
    raise PrecisionExhausted("unit inversion stalled below the requested precision")


class DivisionResult:
    __slots__ = ("q", "r", "loops", "e", "d")

    def __init__(self, q, r, loops, e, d):
        self.q = q
        self.r = r
        self.loops = loops
        self.e = e
        self.d = d


def euclid_div_full(y: SnuSeries, x: SnuSeries, prec, u_cap=None) -> DivisionResult:
    """Division y = q*x + r with deg r < deg_W(x), up to v_nu >= prec.

    Iterates q += Hi(r,d)/Hi(x,d), r -= (Hi(r,d)/Hi(x,d))*x; each pass gains
    e = v_nu(Lo(x,d)) - v_nu(Hi(x,d)) > 0, so the loop count is bounded by
    ceil((prec - v_nu(Hi(y,d)))/e).  When Lo(x,d) = 0 exactly the division
    is a single unit division (x is a unit times u^d).
    """
    x._check_compat(y)
    prec = Fraction(prec)
    try:
        vx, d = x.certified_val_deg()
    except (PrecisionExhausted, NotDistinguishedCertificate) as e:
        raise NotDistinguishedCertificate(str(e))
    ly = y.lower_bound()
    if ly < vx:
        vy = y.visible_valuation()
        if not _isinf(vy) and vy < vx:
            raise ValuationOrder(f"v_nu(y) = {vy} < v_nu(x) = {vx}")
        raise PrecisionExhausted("cannot certify v_nu(y) >= v_nu(x)")
    nu = x.nu
    lo_x, hi_x = hi_lo_split(x, d)
    if lo_x.is_exact_zero():
        # degenerate: x = u^d * unit, one exact division step
        w = hi_x.shift_u(-d)
        lo_y, hi_y = hi_lo_split(y, d)
        cap = u_cap
        if cap is None:
            cap = min(y.u_prec, x.u_prec)
            if _isinf(cap):
                cap = 2 * d + 8
        q = divide_by_unit(hi_y.shift_u(-d), w, u_prec=cap)
        return DivisionResult(q, lo_y, 0, INF, d)
    try:
        v_lo, _ = lo_x.certified_val_deg()
    except (PrecisionExhausted, NotDistinguishedCertificate):
        raise PrecisionExhausted("Lo(x, d) has no certified valuation: e is unknown")
    e = v_lo - vx
    assert e > 0
    hi_y = hi_lo_split(y, d)[1]
    v_hi_y = hi_y.lower_bound()
    loops_max = max(0, _ceil((prec - min(v_hi_y, Fraction(0))) / e)) + 1
    cap = u_cap
    if cap is None:
        cap = min(y.u_prec, x.u_prec)
        if _isinf(cap):
            cap = d * (loops_max + 2) + 8
    w = hi_x.shift_u(-d)  # unit of degree 0
    xt = x.truncate_u(cap)
    q = SnuSeries.zero(y.cfg, y.slope, ram=max(x.ram, y.ram))
    r = y.truncate_u(cap)
    loops = 0
    exact_finish = False
    while True:
        hi_r = hi_lo_split(r, d)[1]
        if hi_r.is_certainly_zero():
            exact_finish = True
            break
        v_hi = hi_r.visible_valuation()
        if _isinf(v_hi) or v_hi >= prec:
            break
        if loops > loops_max + 2:
            raise NonTermination("euclidean division loop exceeded its bound")
        t = divide_by_unit(hi_r.shift_u(-d), w, u_prec=cap)
        q = q + t
        r = r - t * xt
        loops += 1
    if not exact_finish:
        q = q.reduce_levels(prec - vx)
        r_out = hi_lo_split(r, d)[0].reduce_levels(prec)
    else:
        r_out = hi_lo_split(r, d)[0]
    return DivisionResult(q, r_out, loops, e, d)


def euclid_div(y: SnuSeries, x: SnuSeries, prec, u_cap=None):
    res = euclid_div_full(y, x, prec, u_cap)
    return res.q, res.r


def weierstrass_prep(x: SnuSeries, prec=None):
    """x = q*h with q invertible and h = u^d/pi^(nu d) + lower terms, all of
    strictly positive level.  Requires certified v_nu(x) = 0."""
    try:
        vx, d = x.certified_val_deg()
    except (PrecisionExhausted, NotDistinguishedCertificate) as e:
        raise NotDistinguished(str(e))
    if vx != 0:
        raise NotDistinguished(f"v_nu(x) = {vx} != 0")
    nu_d = x.nu * d
    if nu_d.denominator != 1:
        raise NotDistinguished("d * nu is not an integer")
    if prec is None:
        prec = x.cfg.default_prec
    m = SnuSeries.monomial(
        x.cfg, x.slope, d, CoeffElem.from_int(x.cfg, 1, ram=x.ram).scale_pi(-int(nu_d))
    )
    res = euclid_div_full(m, x, prec)
    h = m - res.r
    q_unit = invert_unit(res.q, prec)
    return q_unit, h


def slope_transport(x: SnuSeries, target: Slope) -> SnuSeries:
    """The coefficientwise isomorphism from slope 0 to slope nu = beta/alpha
    (u maps to u/w^beta): a_i gains w^(-beta i).  Preserves Gauss valuation
    and Weierstrass degree."""
    if x.slope != Slope(0, 1):
        raise SlopeMismatch("slope transport starts from slope 0")
    alpha, beta = target.alpha, target.beta
    xr = x.with_ram(alpha)
    coeffs = {i: c.scale_w(-beta * i) for i, c in xr.coeffs.items()}
    tb = None
    if not _isinf(xr.u_prec):
        tb = xr.tail_bound  # v0 levels equal vnu levels under the transport
    return SnuSeries(x.cfg, target, coeffs, xr.u_prec, tb, ram=alpha)


def slope_transport_inverse(x: SnuSeries) -> SnuSeries:
    alpha, beta = x.slope.alpha, x.slope.beta
    coeffs = {i: c.scale_w(beta * i) for i, c in x.coeffs.items()}
    tb = None if _isinf(x.u_prec) else x.tail_bound
    return SnuSeries(x.cfg, Slope(0, 1), coeffs, x.u_prec, tb, ram=x.ram)


# ---------------------------------------------------------------------------
# exact polynomial arithmetic (classical K[u] division) and the gcd
# ---------------------------------------------------------------------------


def poly_divmod(y: SnuSeries, x: SnuSeries):
    """Classical polynomial division by actual degree: y = q*x + r,
    deg r < deg x.

    Both operands must be polynomials and the leading digit of x exact
    (then c*lead - lead*c cancellation is structurally exact and the
    degree strictly drops even for imprecise dividends)."""
    x._check_compat(y)
    if not (x.is_polynomial() and y.is_polynomial()):
        raise RequiresExactInput("classical division needs polynomial operands")
    dx = x.max_deg()
    if dx is None:
        raise ZeroDivisionError("polynomial division by zero")
    if not x.coeffs[dx].is_exact():
        raise RequiresExactInput("divisor leading coefficient must be exact")
    lead_inv = x.coeffs[dx].inv()
    q = SnuSeries.zero(y.cfg, y.slope, ram=max(x.ram, y.ram))
    r = y
    while True:
        dr = r.max_deg()
        if dr is None or dr < dx:
            return q, r
        c = r.coeffs[dr] * lead_inv
        term = SnuSeries.monomial(y.cfg, y.slope, dr - dx, c)
        q = q + term
        r = r - term * x
        # the leading digit cancels exactly in value; drop its O(.) residue
        if r.max_deg() is not None and r.max_deg() >= dr:
            r = SnuSeries(
                r.cfg, r.slope, {i: cc for i, cc in r.coeffs.items() if i < dr},
                INF, ram=r.ram,
            )


def gcd_extended(x: SnuSeries, y: SnuSeries):
    """Extended gcd over the pi-localization for exactly-known polynomials.

    Returns (g, k, l, m, n) with k*x + l*y = g, m*x + n*y = 0 and
    k*n - l*m = 1.  Finite-precision operands are rejected: the Euclidean
    algorithm is not stable, so no approximate gcd is offered.
    """
    x._check_compat(y)
    if not (x.is_exact() and y.is_exact()):
        raise RequiresExactInput("gcd requires exactly-known polynomial operands")
    cfg, slope = x.cfg, x.slope
    ram = max(x.ram, y.ram)
    one = CoeffElem.from_int(cfg, 1, ram=ram)
    zero_s = SnuSeries.zero(cfg, slope, ram)
    one_s = SnuSeries.one(cfg, slope, ram)

    if y.is_exact_zero() and x.is_exact_zero():
        return zero_s, one_s, zero_s, zero_s, one_s
    if y.is_exact_zero():
        return x, one_s, zero_s, zero_s, one_s
    if x.is_exact_zero():
        return y, zero_s, one_s, -one_s, zero_s

    def key(s):
        v, d = s.certified_val_deg()
        return (d, v)

    swapped = False
    a, b = x, y
    if key(b) < key(a):
        a, b = b, a
        swapped = True
    # rows: (r, s, t) with r = s*x0 + t*y0 in the (a, b) frame
    r0, s0, t0 = a, one_s, zero_s
    r1, s1, t1 = b, zero_s, one_s
    while not r1.is_exact_zero():
        qq, rr = poly_divmod(r0, r1)
        r0, s0, t0, r1, s1, t1 = (
            r1,
            s1,
            t1,
            rr,
            s0 - qq * s1,
            t0 - qq * t1,
        )
    lead = r0.coeffs[r0.max_deg()]
    c = lead.inv()
    g = r0.scale_coeff(c)
    k, l = s0.scale_coeff(c), t0.scale_coeff(c)
    m, n = s1, t1
    # normalize det(k n - l m) to exactly 1
    det = k * n - l * m
    det_c = det.coeffs.get(0)
    assert det_c is not None and not det.coeffs.keys() - {0}
    fix = det_c.inv()
    m, n = m.scale_coeff(fix), n.scale_coeff(fix)
    if swapped:
        k, l = l, k
        m, n = n, m
        m, n = -m, -n  # keep the determinant +1 after the swap
    return g, k, l, m, n
