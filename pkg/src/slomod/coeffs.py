"""Coefficient arithmetic for a complete DVR R, its fraction field K, and the
totally ramified extension K' = K[w] with w^a = pi.

Two backends are supported:

* ``ZpConfig(p)``   -- R = Z_p, pi = p.  Exact elements are ``Fraction``s.
* ``FqConfig(q)``   -- R = GF(q)[[t]], pi = t.  Exact elements are rational
  functions in t (``gfq.RatFunc``).

A ``CoeffElem`` stores a value as  w^num_val * (c_0 + c_1 w + ... + c_{a-1}
w^{a-1})  where a = ram_index and the digits c_i are exact field elements.
Valuations are exact integers (numerator over ram_index); only the digit
vector carries finite precision: ``prec`` is the *relative* precision in
w-units, i.e. the value is known modulo w^(num_val + prec) * R'.  For
ram_index 1 this is the usual relative pi-adic precision.

Three distinguished states:

* exact zero                      (``zero`` flag),
* ``prec == 0``                   (an O(w^num_val) term: nothing is known
  beyond the valuation lower bound -- produced by full cancellation),
* ``prec >= 1`` or infinite       (at least one certain digit; the lowest
  digit c_0 is then a pi-unit and the valuation is exact).

All arithmetic is performed on the exact digit lifts and then truncated to
the precision dictated by the ultrametric lattice calculus, so the exact and
approximate code paths share one implementation.
"""

from __future__ import annotations

import math
from fractions import Fraction

from . import gfq
from .errors import ConfigMismatch, NotInvertible, UncertifiedValuation

INF = math.inf


def _isinf(x) -> bool:
    return x == INF


# ---------------------------------------------------------------------------
# Ring configurations
# ---------------------------------------------------------------------------


class RingConfig:
    """Base class: exact-element operations for one coefficient backend."""

    kind = ""

    def __init__(self, default_prec: int = 20):
        self.default_prec = default_prec

    # subclasses implement: exa_zero, exa_one, exa_from_int, exa_add,
    # exa_neg, exa_mul, exa_inv, exa_is_zero, exa_pi_val, exa_shift_pi,
    # exa_reduce, exa_str, residue_size

    def exa_sub(self, a, b):
        return self.exa_add(a, self.exa_neg(b))

    def same_ring(self, other: "RingConfig") -> bool:
        raise NotImplementedError


class ZpConfig(RingConfig):
    """R = Z_p with uniformizer p."""

    kind = "zp"

    def __init__(self, p: int, default_prec: int = 20):
        if p < 2 or not gfq._is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        super().__init__(default_prec)
        self.p = p

    def same_ring(self, other):
        return isinstance(other, ZpConfig) and other.p == self.p

    def __repr__(self):
        return f"ZpConfig(p={self.p})"

    def exa_zero(self):
        return Fraction(0)

    def exa_one(self):
        return Fraction(1)

    def exa_from_int(self, n):
        return Fraction(n)

    def exa_add(self, a, b):
        return a + b

    def exa_neg(self, a):
        return -a

    def exa_mul(self, a, b):
        return a * b

    def exa_inv(self, a):
        if a == 0:
            raise ZeroDivisionError
        return 1 / a

    def exa_is_zero(self, a):
        return a == 0

    def exa_pi_val(self, a):
        if a == 0:
            return None
        v = 0
        num, den = a.numerator, a.denominator
        while num % self.p == 0:
            num //= self.p
            v += 1
        while den % self.p == 0:
            den //= self.p
            v -= 1
        return v

    def exa_shift_pi(self, a, j):
        return a * Fraction(self.p) ** j

    def exa_reduce(self, a, n):
        """Canonical representative of a (with v_p >= 0) modulo p^n."""
        if n <= 0:
            return Fraction(0)
        m = self.p ** n
        den = a.denominator % m
        return Fraction(a.numerator * pow(den, -1, m) % m)

    def exa_str(self, a):
        if a.denominator == 1:
            return str(a.numerator)
        return f"{a.numerator}/{a.denominator}"


class FqConfig(RingConfig):
    """R = GF(q)[[t]] with uniformizer t."""

    kind = "fq"

    def __init__(self, q: int, default_prec: int = 20):
        super().__init__(default_prec)
        self.q = q
        self.field = gfq.GF(q)

    def same_ring(self, other):
        return isinstance(other, FqConfig) and other.q == self.q

    def __repr__(self):
        return f"FqConfig(q={self.q})"

    def exa_zero(self):
        return gfq.RatFunc(self.field, ())

    def exa_one(self):
        return gfq.RatFunc(self.field, (self.field.one,))

    def exa_from_int(self, n):
        return gfq.RatFunc(self.field, (self.field.from_int(n),))

    def exa_add(self, a, b):
        return a + b

    def exa_neg(self, a):
        return -a

    def exa_mul(self, a, b):
        return a * b

    def exa_inv(self, a):
        return a.inv_any()

    def exa_is_zero(self, a):
        return a.is_zero()

    def exa_pi_val(self, a):
        return a.t_val()

    def exa_shift_pi(self, a, j):
        return a.shift(j)

    def exa_reduce(self, a, n):
        if n <= 0:
            return self.exa_zero()
        return gfq.RatFunc(self.field, gfq.ptrim(self.field, a.series(n)))

    def exa_str(self, a):
        return repr(a)


# ---------------------------------------------------------------------------
# Coefficient elements
# ---------------------------------------------------------------------------


class CoeffElem:
    __slots__ = ("cfg", "ram", "num_val", "prec", "unit", "zero")

    def __init__(self, cfg, ram, num_val, prec, unit, zero=False):
        self.cfg = cfg
        self.ram = ram
        self.num_val = num_val
        self.prec = prec
        self.unit = unit
        self.zero = zero

    # -- constructors ------------------------------------------------------

    @classmethod
    def exact_zero(cls, cfg, ram=1):
        return cls(cfg, ram, 0, INF, None, zero=True)

    @classmethod
    def o_term(cls, cfg, abs_w, ram=1):
        """The element O(w^abs_w): valuation >= abs_w/ram, nothing more."""
        return cls(cfg, ram, abs_w, 0, None)

    @classmethod
    def from_exact(cls, cfg, value, ram=1, prec=INF):
        """Build from one exact field element (the w^0 digit)."""
        digits = [value] + [cfg.exa_zero()] * (ram - 1)
        return _normalize(cfg, ram, 0, digits, INF).reduce_prec(prec)

    @classmethod
    def from_int(cls, cfg, n, ram=1, prec=INF):
        return cls.from_exact(cfg, cfg.exa_from_int(n), ram, prec)

    @classmethod
    def from_rational(cls, cfg, num, den=1, ram=1, prec=INF):
        if cfg.kind == "zp":
            val = Fraction(num, den)
        else:
            val = cfg.exa_mul(cfg.exa_from_int(num), cfg.exa_inv(cfg.exa_from_int(den)))
        return cls.from_exact(cfg, val, ram, prec)

    # -- state predicates ---------------------------------------------------

    def is_exact_zero(self) -> bool:
        return self.zero

    def is_exact(self) -> bool:
        return self.zero or _isinf(self.prec)

    def has_witness(self) -> bool:
        """A certain nonzero digit exists, so the valuation is exact."""
        return (not self.zero) and (self.prec is not None) and self.prec >= 1

    def abs_w(self):
        """Absolute precision in w-units (INF for exact elements)."""
        if self.zero:
            return INF
        return self.num_val + self.prec

    def val(self):
        """Exact valuation as a Fraction (INF for exact zero).

        Raises UncertifiedValuation for a possibly-zero O(.) element.
        """
        if self.zero:
            return INF
        if not self.has_witness():
            raise UncertifiedValuation("valuation of an O(.) element is not certified")
        return Fraction(self.num_val, self.ram)

    def val_lower(self):
        """Certified lower bound for the valuation (INF for exact zero)."""
        if self.zero:
            return INF
        return Fraction(self.num_val, self.ram)

    # -- precision management -----------------------------------------------

    def reduce_prec(self, new_prec):
        """Reduce relative precision (w-units) to at most new_prec."""
        if self.zero or new_prec >= self.prec:
            return self
        if new_prec <= 0:
            return CoeffElem.o_term(self.cfg, self.num_val, self.ram)
        digits = _reduce_digits(self.cfg, self.ram, self.unit, new_prec)
        return CoeffElem(self.cfg, self.ram, self.num_val, new_prec, digits)

    def reduce_abs_w(self, abs_w):
        """Reduce absolute precision (w-units) to at most abs_w."""
        if self.zero:
            if _isinf(abs_w):
                return self
            return CoeffElem.o_term(self.cfg, abs_w, self.ram)
        return self.reduce_prec(abs_w - self.num_val)

    def split_at_abs_w(self, cut) -> tuple["CoeffElem", "CoeffElem"]:
        """(low, high): low holds the certain digits below w^cut exactly,
        high the rest; low + high = self."""
        if self.zero or self.num_val >= cut:
            return CoeffElem.exact_zero(self.cfg, self.ram), self
        if self.unit is None:
            return CoeffElem.exact_zero(self.cfg, self.ram), self
        rel = cut - self.num_val
        low_digits = _reduce_digits(self.cfg, self.ram, self.unit, min(rel, self.prec))
        low = _normalize(self.cfg, self.ram, self.num_val, list(low_digits), INF)
        return low, self - low

    def with_ram(self, ram: int) -> "CoeffElem":
        if ram == self.ram:
            return self
        if ram % self.ram != 0:
            raise ConfigMismatch(f"cannot coerce ram {self.ram} -> {ram}")
        k = ram // self.ram
        if self.zero:
            return CoeffElem.exact_zero(self.cfg, ram)
        if self.unit is None:
            return CoeffElem.o_term(self.cfg, self.num_val * k, ram)
        digits = []
        for d in self.unit:
            digits.append(d)
            digits.extend(self.cfg.exa_zero() for _ in range(k - 1))
        prec = self.prec if _isinf(self.prec) else self.prec * k
        return CoeffElem(self.cfg, ram, self.num_val * k, prec, tuple(digits))

    # -- arithmetic ----------------------------------------------------------

    def scale_w(self, j: int) -> "CoeffElem":
        """Multiply by w^j (exact operation, any sign)."""
        if self.zero:
            return self
        return CoeffElem(self.cfg, self.ram, self.num_val + j, self.prec, self.unit)

    def scale_pi(self, j: int) -> "CoeffElem":
        return self.scale_w(j * self.ram)

    def __add__(self, other: "CoeffElem") -> "CoeffElem":
        a, b = _align(self, other)
        if a.zero:
            return b
        if b.zero:
            return a
        cfg, ram = a.cfg, a.ram
        out_abs = min(a.abs_w(), b.abs_w())
        base = min(a.num_val, b.num_val)
        da = _lift(cfg, ram, a, base)
        db = _lift(cfg, ram, b, base)
        if len(da) < len(db):
            da, db = db, da
        for i, d in enumerate(db):
            da[i] = cfg.exa_add(da[i], d)
        return _normalize(cfg, ram, base, da, out_abs)

    def __neg__(self) -> "CoeffElem":
        if self.zero or self.unit is None:
            return self
        cfg = self.cfg
        return CoeffElem(
            self.cfg,
            self.ram,
            self.num_val,
            self.prec,
            _reduce_digits(cfg, self.ram, tuple(cfg.exa_neg(d) for d in self.unit), self.prec),
        )

    def __sub__(self, other: "CoeffElem") -> "CoeffElem":
        return self + (-other)

    def __mul__(self, other: "CoeffElem") -> "CoeffElem":
        a, b = _align(self, other)
        cfg, ram = a.cfg, a.ram
        if a.zero or b.zero:
            return CoeffElem.exact_zero(cfg, ram)
        out_abs = min(a.num_val + b.abs_w(), b.num_val + a.abs_w())
        if a.unit is None or b.unit is None:
            return CoeffElem.o_term(cfg, out_abs, ram)
        prod = [cfg.exa_zero()] * (2 * ram - 1) if ram > 1 else [cfg.exa_zero()]
        for i, x in enumerate(a.unit):
            if cfg.exa_is_zero(x):
                continue
            for j, y in enumerate(b.unit):
                prod[i + j] = cfg.exa_add(prod[i + j], cfg.exa_mul(x, y))
        return _normalize(cfg, ram, a.num_val + b.num_val, prod, out_abs)

    def inv(self) -> "CoeffElem":
        """Multiplicative inverse at the same relative precision."""
        if self.zero:
            raise NotInvertible("exact zero is not invertible")
        if not self.has_witness():
            raise NotInvertible("cannot invert a possibly-zero O(.) element")
        cfg, ram = self.cfg, self.ram
        inv_digits = _unit_poly_inverse(cfg, ram, self.unit)
        out = _normalize(cfg, ram, -self.num_val, list(inv_digits), INF)
        return out.reduce_prec(self.prec)

    def __eq__(self, other):
        if not isinstance(other, CoeffElem):
            return NotImplemented
        a, b = _align(self, other)
        if a.zero or b.zero:
            return a.zero and b.zero
        return (
            a.num_val == b.num_val
            and a.prec == b.prec
            and a.unit == b.unit
        )

    def __hash__(self):
        return hash((self.num_val, self.prec, self.unit, self.zero))

    def digits_agree(self, other: "CoeffElem") -> bool:
        """True when no digit both elements claim to know disagrees."""
        d = self - other
        if d.zero:
            return True
        return not d.has_witness()

    def __repr__(self):
        return self.render()

    def render(self, pi_name=None, w_name="w"):
        cfg = self.cfg
        if pi_name is None:
            pi_name = "t" if cfg.kind == "fq" else "pi"
        if self.zero:
            return "0"
        if self.unit is None:
            return f"O({w_name}^{self.num_val})" if self.ram > 1 else f"O({pi_name}^{self.num_val})"
        if self.ram == 1:
            body = cfg.exa_str(self.unit[0])
            sign = ""
            if body.startswith("-"):
                sign = "-"
                body = body[1:]
            parts = []
            if self.num_val != 0:
                parts.append(f"{pi_name}^{self.num_val}" if self.num_val != 1 else pi_name)
            if body != "1" or not parts:
                parts.append(body if "/" not in body and "+" not in body else f"({body})")
            s = sign + "*".join(parts)
        else:
            terms = []
            for i, d in enumerate(self.unit):
                if cfg.exa_is_zero(d):
                    continue
                ds = cfg.exa_str(d)
                if i == 0:
                    terms.append(ds)
                else:
                    head = f"{w_name}^{i}" if i > 1 else w_name
                    terms.append(head if ds == "1" else f"{ds}*{head}")
            body = "+".join(terms) or "0"
            s = f"{w_name}^{self.num_val}*({body})" if self.num_val else f"({body})"
        if not _isinf(self.prec):
            s += f" + O(^{self.num_val + self.prec})"
        return s


# ---------------------------------------------------------------------------
# digit-vector helpers
# ---------------------------------------------------------------------------


def _align(a: CoeffElem, b: CoeffElem):
    if not a.cfg.same_ring(b.cfg):
        raise ConfigMismatch(f"mixed rings {a.cfg!r} / {b.cfg!r}")
    if a.ram == b.ram:
        return a, b
    ram = max(a.ram, b.ram)
    return a.with_ram(ram), b.with_ram(ram)


def _lift(cfg, ram, x: CoeffElem, base: int):
    """Digit vector of x re-based at w^base (indices may exceed ram)."""
    shift = x.num_val - base
    size = ram + shift
    digits = [cfg.exa_zero()] * size
    if x.unit is not None:
        for i, d in enumerate(x.unit):
            digits[i + shift] = d
    return digits


def _fold(cfg, ram, digits):
    """Fold indices >= ram using w^ram = pi."""
    out = list(digits[:ram]) + [cfg.exa_zero()] * max(0, ram - len(digits))
    for i in range(ram, len(digits)):
        d = digits[i]
        if cfg.exa_is_zero(d):
            continue
        out[i % ram] = cfg.exa_add(out[i % ram], cfg.exa_shift_pi(d, i // ram))
    return out


def _reduce_digits(cfg, ram, digits, prec_w):
    """Canonically reduce digit i modulo pi^ceil((prec_w - i)/ram)."""
    if _isinf(prec_w):
        return tuple(digits)
    out = []
    for i, d in enumerate(digits):
        n = -((-(prec_w - i)) // ram)  # ceil((prec_w - i)/ram)
        out.append(cfg.exa_reduce(d, n))
    return tuple(out)


def _normalize(cfg, ram, base, digits, abs_w):
    """Extract the w-valuation from a digit vector based at w^base.

    ``digits`` may be longer than ram (pre-fold); abs_w is the absolute
    w-precision budget (INF allowed).  Returns a canonical CoeffElem.
    """
    digits = _fold(cfg, ram, digits)
    grade = None
    for i, d in enumerate(digits):
        if cfg.exa_is_zero(d):
            continue
        g = ram * cfg.exa_pi_val(d) + i
        if grade is None or g < grade:
            grade = g
    if grade is None:
        if _isinf(abs_w):
            return CoeffElem.exact_zero(cfg, ram)
        return CoeffElem.o_term(cfg, abs_w, ram)
    val = base + grade
    if val >= abs_w:
        return CoeffElem.o_term(cfg, abs_w, ram)
    # divide by w^grade: digit i moves to (i - grade) mod ram with a pi shift
    out = [cfg.exa_zero()] * ram
    for i, d in enumerate(digits):
        if cfg.exa_is_zero(d):
            continue
        j = (i - grade) % ram
        out[j] = cfg.exa_shift_pi(d, (i - grade - j) // ram)
    prec = abs_w - val if not _isinf(abs_w) else INF
    return CoeffElem(cfg, ram, val, prec, _reduce_digits(cfg, ram, out, prec))


def _unit_poly_inverse(cfg, ram, digits):
    """Exact inverse of a unit digit vector in K[w]/(w^ram - pi).

    Solved as a ram x ram linear system over the exact field.
    """
    if ram == 1:
        return (cfg.exa_inv(digits[0]),)
    # columns: digit vectors of U * w^j
    cols = []
    for j in range(ram):
        col = [cfg.exa_zero()] * (2 * ram - 1)
        for i, d in enumerate(digits):
            col[i + j] = d
        cols.append(_fold(cfg, ram, col))
    # Gaussian elimination on [A | e0]
    A = [[cols[j][i] for j in range(ram)] for i in range(ram)]
    rhs = [cfg.exa_one()] + [cfg.exa_zero()] * (ram - 1)
    for c in range(ram):
        piv = next((r for r in range(c, ram) if not cfg.exa_is_zero(A[r][c])), None)
        if piv is None:
            raise NotInvertible("digit vector is not invertible")
        A[c], A[piv] = A[piv], A[c]
        rhs[c], rhs[piv] = rhs[piv], rhs[c]
        inv_p = cfg.exa_inv(A[c][c])
        A[c] = [cfg.exa_mul(inv_p, x) for x in A[c]]
        rhs[c] = cfg.exa_mul(inv_p, rhs[c])
        for r in range(ram):
            if r != c and not cfg.exa_is_zero(A[r][c]):
                f = A[r][c]
                A[r] = [cfg.exa_sub(x, cfg.exa_mul(f, y)) for x, y in zip(A[r], A[c])]
                rhs[r] = cfg.exa_sub(rhs[r], cfg.exa_mul(f, rhs[c]))
    return tuple(rhs)


# ---------------------------------------------------------------------------
# spec-level operation names
# ---------------------------------------------------------------------------


def coeff_add(a: CoeffElem, b: CoeffElem) -> CoeffElem:
    return a + b


def coeff_mul(a: CoeffElem, b: CoeffElem) -> CoeffElem:
    return a * b


def coeff_inv(a: CoeffElem) -> CoeffElem:
    return a.inv()
