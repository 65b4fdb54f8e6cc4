"""Euclidean linear algebra over the two localizations of the slope ring.

pi side (pi inverted, Euclidean via the Weierstrass degree): exact column
echelon by extended-gcd 2x2 unimodular transforms, pivots normalized to the
canonical monic Weierstrass polynomial, rows above reduced by classical
division.  The elimination phase is exact on exact polynomial inputs; pivot
normalization may need a working pi-precision when the gcd has a nontrivial
unit part (its roots need not be rational), so normalized entries carry
honest finite precision.

u side (u^alpha/pi^beta inverted and completed, a DVR): pivots are the
canonical monomials mu_m = u^a pi^b of valuation m/alpha (pure pi powers
when the valuation is integral, matching the classical normal form), column
elimination divides by the minimum-valuation entry, and Smith forms give
saturations.

Normal-form routines demand exact inputs and fail loudly with
PrecisionExhausted when a branch cannot be certified; precision-safe module
arithmetic lives in ``precise_sum``.
"""

from __future__ import annotations

from fractions import Fraction

from .coeffs import INF, CoeffElem, _isinf
from .contfrac import Slope
from .errors import (
    BadParameters,
    PrecisionExhausted,
    RequiresExactInput,
)
from .series import (
    SnuSeries,
    _ceil,
    _floor,
    divide_by_unit,
    euclid_div_full,
    gcd_extended,
    poly_divmod,
)


# ---------------------------------------------------------------------------
# matrices of series
# ---------------------------------------------------------------------------


class SMat:
    """A dense rows x cols matrix of SnuSeries over one ring and slope."""

    __slots__ = ("cfg", "slope", "rows", "cols", "a", "ram")

    def __init__(self, cfg, slope, entries, ram=1):
        self.cfg = cfg
        self.slope = slope
        self.a = [list(r) for r in entries]
        self.rows = len(self.a)
        self.cols = len(self.a[0]) if self.a else 0
        self.ram = ram

    @classmethod
    def zeros(cls, cfg, slope, rows, cols, ram=1):
        z = SnuSeries.zero(cfg, slope, ram)
        return cls(cfg, slope, [[z] * cols for _ in range(rows)], ram)

    @classmethod
    def identity(cls, cfg, slope, n, ram=1):
        m = cls.zeros(cfg, slope, n, n, ram)
        one = SnuSeries.one(cfg, slope, ram)
        for i in range(n):
            m.a[i][i] = one
        return m

    @classmethod
    def from_columns(cls, cfg, slope, columns, ram=1):
        rows = len(columns[0]) if columns else 0
        return cls(cfg, slope, [[columns[j][i] for j in range(len(columns))] for i in range(rows)], ram)

    def copy(self):
        return SMat(self.cfg, self.slope, self.a, self.ram)

    def col(self, j):
        return [self.a[i][j] for i in range(self.rows)]

    def set_col(self, j, col):
        for i in range(self.rows):
            self.a[i][j] = col[i]

    def columns(self):
        return [self.col(j) for j in range(self.cols)]

    def swap_cols(self, j0, j1):
        if j0 != j1:
            for r in self.a:
                r[j0], r[j1] = r[j1], r[j0]

    def scale_col(self, j, k: CoeffElem):
        for i in range(self.rows):
            self.a[i][j] = self.a[i][j].scale_coeff(k)

    def scale_col_series(self, j, s: SnuSeries):
        for i in range(self.rows):
            self.a[i][j] = self.a[i][j] * s

    def addmul_col(self, j0, j1, q: SnuSeries):
        """C_j0 += q * C_j1."""
        for i in range(self.rows):
            self.a[i][j0] = self.a[i][j0] + q * self.a[i][j1]

    def transform_cols_2x2(self, j0, j1, k, l, m, n):
        """(C_j0, C_j1) <- (k C_j0 + l C_j1, m C_j0 + n C_j1)."""
        for i in range(self.rows):
            x, y = self.a[i][j0], self.a[i][j1]
            self.a[i][j0] = k * x + l * y
            self.a[i][j1] = m * x + n * y

    def col_is_exact_zero(self, j):
        return all(self.a[i][j].is_exact_zero() for i in range(self.rows))

    def matmul(self, other: "SMat") -> "SMat":
        assert self.cols == other.rows
        out = SMat.zeros(self.cfg, self.slope, self.rows, other.cols, self.ram)
        for i in range(self.rows):
            for j in range(other.cols):
                acc = SnuSeries.zero(self.cfg, self.slope, self.ram)
                for k in range(self.cols):
                    acc = acc + self.a[i][k] * other.a[k][j]
                out.a[i][j] = acc
        return out

    def apply_to_vector(self, vec):
        assert self.cols == len(vec)
        out = []
        for i in range(self.rows):
            acc = SnuSeries.zero(self.cfg, self.slope, self.ram)
            for k in range(self.cols):
                acc = acc + self.a[i][k] * vec[k]
            out.append(acc)
        return out

    def is_exact(self):
        return all(e.is_exact() for r in self.a for e in r)

    def map(self, fn):
        return SMat(self.cfg, self.slope, [[fn(e) for e in r] for r in self.a], self.ram)

    def __repr__(self):
        body = "; ".join(", ".join(e.render() for e in r) for r in self.a)
        return f"[{body}]"


def mat_vnu_zero(M: SMat) -> bool:
    """Every entry has no certain nonzero digit (zero at precision)."""
    return all(not c.has_witness() for r in M.a for e in r for c in e.coeffs.values())


# ---------------------------------------------------------------------------
# pi-localization: echelon, HNF, kernel, membership
# ---------------------------------------------------------------------------


class EchelonPi:
    """Staircase form over the pi-localization: T = M.P with pivot t_i at
    (l{i}, i), pivots canonical monic Weierstrass polynomials."""

    __slots__ = ("T", "P", "pivot_rows", "pivots", "rank")

    def __init__(self, T, P, pivot_rows, pivots):
        self.T = T
        self.P = P
        self.pivot_rows = pivot_rows
        self.pivots = pivots
        self.rank = len(pivot_rows)


def _entry_key(e: SnuSeries):
    v, d = e.certified_val_deg()
    return (d, v)


def _require_exact(M: SMat, who: str):
    if not M.is_exact():
        raise PrecisionExhausted(f"{who} requires exactly-known entries")


def _unit_scale_exact(col, idx_lead):
    """Scale a column by the inverse of the unit part of the leading digit
    of its first nonzero entry (keeps entries exact)."""
    e = col[idx_lead]
    dmax = e.max_deg()
    lead = e.coeffs[dmax]
    # strip the valuation: unit part only
    unit = lead.scale_w(-lead.num_val)
    inv = unit.inv()
    return [x.scale_coeff(inv) for x in col]


def echelon_pi(M: SMat, prec=None, hnf=False) -> EchelonPi:
    """Column echelon (optionally Hermite) form over the pi-localization.

    Phase 1 eliminates with exact 2x2 Bezout transforms (entries stay exact
    polynomials), phase 2 rescales each pivot column so the pivot becomes
    the canonical monic polynomial with all lower terms of positive
    relative level (exact when deg_W = deg, otherwise computed at working
    precision ``prec``), phase 3 (hnf) reduces pivot-row entries to
    canonical residues of degree < d_i.
    """
    _require_exact(M, "echelon_pi")
    if prec is None:
        prec = M.cfg.default_prec
    T = M.copy()
    P = SMat.identity(M.cfg, M.slope, M.cols, M.ram)
    pivot_rows, pivot_cols = [], []
    frozen = 0
    for row in range(T.rows):
        active = [j for j in range(frozen, T.cols) if not T.a[row][j].is_exact_zero()]
        if not active:
            continue
        active.sort(key=lambda j: _entry_key(T.a[row][j]) + (j,))
        acc = active[0]
        for j in active[1:]:
            x, y = T.a[row][acc], T.a[row][j]
            g, k, l, m, n = gcd_extended(x, y)
            T.transform_cols_2x2(acc, j, k, l, m, n)
            P.transform_cols_2x2(acc, j, k, l, m, n)
            T.a[row][j] = SnuSeries.zero(T.cfg, T.slope, T.ram)  # m x + n y = 0
        T.swap_cols(acc, frozen)
        P.swap_cols(acc, frozen)
        pivot_rows.append(row)
        pivot_cols.append(frozen)
        frozen += 1
    # phase 2: pivot normalization
    pivots = []
    for i, (row, col) in enumerate(zip(pivot_rows, pivot_cols)):
        g = T.a[row][col]
        vg, d = g.certified_val_deg()
        deg = g.max_deg()
        if d == deg:
            lead = g.coeffs[deg]
            inv = lead.inv()
            T.scale_col(col, inv)
            P.scale_col(col, inv)
            t = T.a[row][col]
        else:
            t = _weierstrass_monic(g, prec)
            w_res = euclid_div_full(g, t, prec)  # g = w * t
            w = w_res.q
            _scale_col_by_unit_inverse(T, col, w, prec)
            _scale_col_by_unit_inverse(P, col, w, prec)
            T.a[row][col] = t  # structurally exact: the true scaled pivot
        pivots.append(T.a[row][col])
    if hnf:
        for i, (row, col) in enumerate(zip(pivot_rows, pivot_cols)):
            t = pivots[i]
            d = t.max_deg()
            for j in range(col):
                e = T.a[row][j]
                if e.is_certainly_zero() or e.is_exact_zero():
                    continue
                q = _reduce_mod_monic(e, t, prec)
                if q is None:
                    continue
                T.addmul_col(j, col, -q)
                P.addmul_col(j, col, -q)
    return EchelonPi(T, P, pivot_rows, pivots)


def _weierstrass_monic(g: SnuSeries, prec) -> SnuSeries:
    """The canonical monic degree-deg_W factor of an exact polynomial g:
    t = (pi^s u^d - r)/pi^s from the Euclidean division of pi^s u^d by g."""
    vg, d = g.certified_val_deg()
    s = _ceil(vg - g.nu * d)
    m = SnuSeries.monomial(
        g.cfg, g.slope, d, CoeffElem.from_int(g.cfg, 1, ram=g.ram).scale_pi(s)
    )
    res = euclid_div_full(m, g, prec + max(0, s) + 1)
    t = (m - res.r).scale_pi(-s)
    return t


def _scale_col_by_unit_inverse(M: SMat, col, w: SnuSeries, prec):
    """Column *= w^{-1} for w of Weierstrass degree 0 (any valuation)."""
    vw = w.certified_valuation()
    for i in range(M.rows):
        e = M.a[i][col]
        if e.is_exact_zero():
            continue
        shift = max(0, _ceil(vw - e.lower_bound()))
        q = divide_by_unit(e.scale_pi(shift), w, u_prec=_col_cap(e, w, prec))
        M.a[i][col] = q.scale_pi(-shift)


def _col_cap(e: SnuSeries, w: SnuSeries, prec):
    cap = min(e.u_prec, w.u_prec)
    if _isinf(cap):
        nu = e.nu
        if nu > 0:
            cap = _ceil(Fraction(prec + 1, 1) / nu) + (e.max_deg() or 0) + 1
        else:
            cap = (e.max_deg() or 0) + (w.max_deg() or 0) + prec + 8
    return cap


def _reduce_mod_monic(e: SnuSeries, t: SnuSeries, prec):
    """Quotient q with e - q*t the canonical residue (deg < deg t).

    e may be a series: split off the polynomial part of degree >= deg t via
    Euclidean division by the monic t."""
    d = t.max_deg()
    if e.is_polynomial():
        q, _ = poly_divmod(e, t)
        return None if q.is_exact_zero() else q
    vt, _ = t.certified_val_deg()
    lb = e.lower_bound()
    shift = max(0, _ceil(vt - lb))
    res = euclid_div_full(e.scale_pi(shift), t, prec)
    q = res.q.scale_pi(-shift)
    return None if q.is_certainly_zero() else q


def hnf_pi(M: SMat, prec=None) -> EchelonPi:
    return echelon_pi(M, prec, hnf=True)


def kernel_pi(M: SMat) -> list:
    """Columns spanning the syzygies of M over the pi-localization, exact,
    normalized (pi-cleared, first entry monic)."""
    _require_exact(M, "kernel")
    ech = _echelon_pi_phase1(M)
    T, P = ech
    out = []
    for j in range(M.cols):
        if all(T.a[i][j].is_exact_zero() for i in range(M.rows)):
            col = P.col(j)
            if all(e.is_exact_zero() for e in col):
                continue
            out.append(_normalize_kernel_col(col))
    return out


def _echelon_pi_phase1(M: SMat):
    """Exact staircase without pivot normalization (enough for kernels)."""
    _require_exact(M, "echelon")
    T = M.copy()
    P = SMat.identity(M.cfg, M.slope, M.cols, M.ram)
    frozen = 0
    for row in range(T.rows):
        active = [j for j in range(frozen, T.cols) if not T.a[row][j].is_exact_zero()]
        if not active:
            continue
        active.sort(key=lambda j: _entry_key(T.a[row][j]) + (j,))
        acc = active[0]
        for j in active[1:]:
            x, y = T.a[row][acc], T.a[row][j]
            g, k, l, m, n = gcd_extended(x, y)
            T.transform_cols_2x2(acc, j, k, l, m, n)
            P.transform_cols_2x2(acc, j, k, l, m, n)
            T.a[row][j] = SnuSeries.zero(T.cfg, T.slope, T.ram)
        T.swap_cols(acc, frozen)
        P.swap_cols(acc, frozen)
        frozen += 1
    return T, P


def _normalize_kernel_col(col):
    first = next(i for i, e in enumerate(col) if not e.is_exact_zero())
    col = _unit_scale_exact(col, first)
    low = min(e.certified_valuation() for e in col if not e.is_exact_zero())
    n = -_floor(low)
    return [e.scale_pi(n) for e in col]


def member_pi(vec, M: SMat, prec=None, ech: EchelonPi | None = None):
    """Coordinates X with M.X = vec over the pi-localization, or None.

    None is a definite "no" for exact data: it is returned only when a
    certain nonzero digit obstructs divisibility or lies outside the span.
    """
    if prec is None:
        prec = M.cfg.default_prec
    if ech is None:
        ech = echelon_pi(M, prec)
    T, P = ech.T, ech.P
    y = [SnuSeries.zero(M.cfg, M.slope, M.ram) for _ in range(M.cols)]
    residual = list(vec)
    for i, row in enumerate(ech.pivot_rows):
        t = ech.pivots[i]
        e = residual[row]
        if e.is_certainly_zero() or not any(c.has_witness() for c in e.coeffs.values()):
            continue
        vt, dt = t.certified_val_deg()
        shift = max(0, _ceil(vt - e.lower_bound()))
        res = euclid_div_full(e.scale_pi(shift), t, prec)
        if any(c.has_witness() for c in res.r.coeffs.values()):
            return None  # certain nonzero remainder: not divisible
        q = res.q.scale_pi(-shift)
        y[i] = q
        for r in range(M.rows):
            residual[r] = residual[r] - q * T.a[r][i]
    for e in residual:
        if any(c.has_witness() for c in e.coeffs.values()):
            return None
    return P.apply_to_vector(y)


# ---------------------------------------------------------------------------
# u-localization: the DVR side
# ---------------------------------------------------------------------------


def mu_monomial(cfg, slope: Slope, m: int, ram=1) -> SnuSeries:
    """The canonical monomial u^a pi^b of valuation m/alpha (a minimal >= 0);
    pure pi power when alpha | m."""
    alpha, beta = slope.alpha, slope.beta
    if alpha == 1:
        a = 0
    else:
        a = (m * pow(beta, -1, alpha)) % alpha
    b = (m - a * beta) // alpha
    return SnuSeries.monomial(
        cfg, slope, a, CoeffElem.from_int(cfg, 1, ram=ram).scale_pi(b)
    )


def u_invert_unit(w: SnuSeries, n_level, hi_window) -> SnuSeries:
    """Inverse of a u-localization unit (certified v_nu = 0) with every
    certain digit of 1 - w*y at level >= n_level, support below hi_window."""
    alpha = w.slope.alpha
    lvl0 = {
        i: c
        for i, c in w.coeffs.items()
        if c.has_witness() and c.val() + w.nu * i == 0
    }
    if not lvl0:
        raise PrecisionExhausted("unit has no certain level-zero digit")
    i0 = min(lvl0)
    c0 = lvl0[i0]
    base = SnuSeries.monomial(w.cfg, w.slope, -i0, c0.inv())
    lvl0_s = SnuSeries(w.cfg, w.slope, lvl0, ram=w.ram)
    t = (lvl0_s * base) - SnuSeries.one(w.cfg, w.slope, w.ram)  # x-powers >= 1
    t = t.truncate_u(hi_window)
    # geometric series for the residue-field inverse
    acc = SnuSeries.one(w.cfg, w.slope, w.ram)
    pw = SnuSeries.one(w.cfg, w.slope, w.ram)
    steps = max(1, (hi_window - min(t.coeffs, default=hi_window)) // alpha + 2) if t.coeffs else 1
    for _ in range(steps):
        if pw.is_certainly_zero() or not pw.coeffs:
            break
        pw = (-(pw * t)).truncate_u(hi_window)
        acc = acc + pw
    y = (acc * base).truncate_u(hi_window)
    one = SnuSeries.one(w.cfg, w.slope, w.ram)
    wt = w.truncate_u(hi_window)
    budget = 2 * (_ceil(Fraction(n_level) * alpha).bit_length() + 3)
    for _ in range(budget):
        e = (one - wt * y).truncate_u(hi_window)
        ve = e.visible_valuation()
        if _isinf(ve) or ve >= n_level:
            return y
        y = (y + y * e).truncate_u(hi_window)
    e = (one - wt * y).truncate_u(hi_window)
    ve = e.visible_valuation()
    if _isinf(ve) or ve >= n_level:
        return y
    raise PrecisionExhausted("u-unit inversion stalled")


def u_divide(a: SnuSeries, b: SnuSeries, n_level, hi_window) -> SnuSeries:
    """a / b in the u-localization (requires v_nu(a) >= v_nu(b))."""
    vb = b.certified_valuation()
    m = int(vb * b.slope.alpha)
    mu = mu_monomial(b.cfg, b.slope, m, b.ram)
    (i_mu,) = mu.coeffs.keys()
    mu_inv = SnuSeries.monomial(b.cfg, b.slope, -i_mu, mu.coeffs[i_mu].inv())
    w = (b * mu_inv).truncate_u(hi_window)
    w_inv = u_invert_unit(w, n_level, hi_window)
    return (a * mu_inv * w_inv).truncate_u(hi_window)


class EchelonU:
    __slots__ = ("T", "P", "pivot_rows", "pivot_vals", "rank")

    def __init__(self, T, P, pivot_rows, pivot_vals):
        self.T = T
        self.P = P
        self.pivot_rows = pivot_rows
        self.pivot_vals = pivot_vals  # valuations m_i in 1/alpha units
        self.rank = len(pivot_rows)


def _u_entry_val(e: SnuSeries, n_level):
    """Certified valuation, or None when the entry is zero at level n."""
    if e.is_certainly_zero() or e.is_exact_zero():
        return None
    v = e.visible_valuation()
    if _isinf(v):
        if e.lower_bound() >= n_level:
            return None
        raise PrecisionExhausted("entry is ambiguous at the working level precision")
    return e.certified_valuation()


def hnf_u(M: SMat, n_level=None, hi_window=None, hnf=True) -> EchelonU:
    """Echelon / Hermite form over the u-localization DVR.

    Pivots become the canonical valuation monomials mu_{m_i}; in Hermite
    form the entries on pivot rows are canonical residues (certain digits
    of level < m_i/alpha only).  Entries count as zero when they vanish at
    the working level precision ``n_level``.
    """
    if n_level is None:
        n_level = M.cfg.default_prec
    if hi_window is None:
        base = max(
            (abs(e.max_deg() or 0) for r in M.a for e in r),
            default=1,
        )
        hi_window = (base + 2) * M.slope.alpha + 2 * _ceil(n_level) * M.slope.alpha + 4
    T = M.copy()
    P = SMat.identity(M.cfg, M.slope, M.cols, M.ram)
    pivot_rows, pivot_vals, pivot_cols = [], [], []
    frozen = 0
    for row in range(T.rows):
        vals = {}
        for j in range(frozen, T.cols):
            v = _u_entry_val(T.a[row][j], n_level)
            if v is not None:
                vals[j] = v
        if not vals:
            continue
        jstar = min(vals, key=lambda j: (vals[j], j))
        vp = vals[jstar]
        T.swap_cols(jstar, frozen)
        P.swap_cols(jstar, frozen)
        piv = T.a[row][frozen]
        # clear the row to the right
        for j in range(frozen + 1, T.cols):
            if _u_entry_val(T.a[row][j], n_level) is not None:
                q = u_divide(T.a[row][j], piv, n_level, hi_window)
                T.addmul_col(j, frozen, -q)
                P.addmul_col(j, frozen, -q)
                T.a[row][j] = SnuSeries.zero(T.cfg, T.slope, T.ram)
        # normalize the pivot to the canonical monomial
        m = int(vp * T.slope.alpha)
        mu = mu_monomial(T.cfg, T.slope, m, T.ram)
        w_inv = u_divide(mu, piv, n_level, hi_window)
        T.scale_col_series(frozen, w_inv)
        P.scale_col_series(frozen, w_inv)
        T.a[row][frozen] = mu  # structurally exact after unit scaling
        pivot_rows.append(row)
        pivot_vals.append(Fraction(m, T.slope.alpha))
        pivot_cols.append(frozen)
        frozen += 1
    if hnf:
        for i, (row, col) in enumerate(zip(pivot_rows, pivot_cols)):
            bound = pivot_vals[i]
            for j in range(col):
                e = T.a[row][j]
                low, high = e.split_levels(bound)
                if high.is_certainly_zero() or not high.coeffs:
                    continue
                mu = T.a[row][col]
                q = u_divide(high, mu, n_level, hi_window)
                T.addmul_col(j, col, -q)
                P.addmul_col(j, col, -q)
                T.a[row][j] = low  # the canonical residue, structurally
    # tidy: reduce every entry at the working level
    for i in range(T.rows):
        for j in range(T.cols):
            T.a[i][j] = T.a[i][j].truncate_u(hi_window)
    return EchelonU(T, P, pivot_rows, pivot_vals)


def member_u(vec, M: SMat, n_level=None, ech: EchelonU | None = None):
    """Coordinates X with M.X = vec over the u-localization DVR, or None."""
    if n_level is None:
        n_level = M.cfg.default_prec
    if ech is None:
        ech = hnf_u(M, n_level)
    T, P = ech.T, ech.P
    hi_window = max((max(e.coeffs, default=0) for r in T.a for e in r), default=0) + 8
    hi_window += max((max(e.coeffs, default=0) for e in vec), default=0)
    y = [SnuSeries.zero(M.cfg, M.slope, M.ram) for _ in range(M.cols)]
    residual = list(vec)
    for i, row in enumerate(ech.pivot_rows):
        e = residual[row]
        v = _u_entry_val(e, n_level)
        if v is None:
            continue
        if v < ech.pivot_vals[i]:
            return None  # valuation obstruction: definite no
        q = u_divide(e, T.a[row][i], n_level, hi_window)
        y[i] = q
        for r in range(M.rows):
            residual[r] = residual[r] - q * T.a[r][i]
    for e in residual:
        if _u_entry_val(e, n_level) is not None:
            return None
    return P.apply_to_vector(y)


def kernel_u(M: SMat, n_level=None) -> list:
    """Columns R with M.R = 0 (at the working level precision) spanning the
    u-localization syzygies."""
    if n_level is None:
        n_level = M.cfg.default_prec
    ech = hnf_u(M, n_level, hnf=False)
    out = []
    for j in range(M.cols):
        if all(_u_entry_val(ech.T.a[i][j], n_level) is None for i in range(M.rows)):
            col = ech.P.col(j)
            if all(_u_entry_val(e, n_level) is None for e in col):
                continue
            out.append(col)
    return out


def smith_u(M: SMat, n_level=None):
    """Smith form over the u-localization DVR.

    Returns (vals, U_inv, rank): vals are the non-decreasing pivot
    valuations (in 1/alpha units) and the first ``rank`` columns of U_inv
    span the saturation of the column span.
    """
    if n_level is None:
        n_level = M.cfg.default_prec
    hi_window = max((abs(e.max_deg() or 0) for r in M.a for e in r), default=1)
    hi_window = (hi_window + 2) * M.slope.alpha + 2 * _ceil(n_level) * M.slope.alpha + 4
    D = M.copy()
    U_inv = SMat.identity(M.cfg, M.slope, M.rows, M.ram)
    vals = []
    k = 0
    limit = min(D.rows, D.cols)
    while k < limit:
        best = None
        for i in range(k, D.rows):
            for j in range(k, D.cols):
                v = _u_entry_val(D.a[i][j], n_level)
                if v is not None and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            break
        v, i, j = best
        # move pivot to (k, k): row swap mirrored on U_inv columns
        if i != k:
            D.a[i], D.a[k] = D.a[k], D.a[i]
            U_inv.swap_cols(i, k)
        D.swap_cols(j, k)
        piv = D.a[k][k]
        for r in range(k + 1, D.rows):
            if _u_entry_val(D.a[r][k], n_level) is not None:
                q = u_divide(D.a[r][k], piv, n_level, hi_window)
                for c in range(D.cols):
                    D.a[r][c] = D.a[r][c] - q * D.a[k][c]
                D.a[r][k] = SnuSeries.zero(D.cfg, D.slope, D.ram)
                U_inv.addmul_col(k, r, q)
        for c in range(k + 1, D.cols):
            if _u_entry_val(D.a[k][c], n_level) is not None:
                q = u_divide(D.a[k][c], piv, n_level, hi_window)
                for r in range(D.rows):
                    D.a[r][c] = D.a[r][c] - q * D.a[r][k]
                D.a[k][c] = SnuSeries.zero(D.cfg, D.slope, D.ram)
        m = int(v * D.slope.alpha)
        vals.append(Fraction(m, D.slope.alpha))
        k += 1
    return vals, U_inv, k


# ---------------------------------------------------------------------------
# module arithmetic over one localization
# ---------------------------------------------------------------------------


def _concat(M: SMat, M2: SMat) -> SMat:
    if M.rows != M2.rows:
        raise BadParameters("ambient dimensions differ")
    return SMat(M.cfg, M.slope, [M.a[i] + M2.a[i] for i in range(M.rows)], M.ram)


def module_sum(M: SMat, M2: SMat, loc: str, prec=None) -> SMat:
    """Generators of the sum: pivot columns of the echelon of (M M2)."""
    C = _concat(M, M2)
    if loc == "pi":
        ech = echelon_pi(C, prec)
        cols = [ech.T.col(j) for j in range(ech.rank)]
    else:
        ech = hnf_u(C, prec)
        cols = [ech.T.col(j) for j in range(ech.rank)]
    if not cols:
        return SMat.zeros(M.cfg, M.slope, M.rows, 0, M.ram)
    return SMat.from_columns(M.cfg, M.slope, cols, M.ram)


def module_intersect(M: SMat, M2: SMat, loc: str, prec=None) -> SMat:
    """Generators of the intersection via syzygies of the concatenation."""
    C = _concat(M, M2)
    cols = []
    kern = kernel_pi(C) if loc == "pi" else kernel_u(C, prec)
    for col in kern:
        top = col[: M.cols]
        gen = [
            _sum_series(M.cfg, M.slope, M.ram, (M.a[i][j] * top[j] for j in range(M.cols)))
            for i in range(M.rows)
        ]
        if any(not e.is_exact_zero() and any(c.has_witness() for c in e.coeffs.values()) for e in gen):
            cols.append(gen)
    if not cols:
        return SMat.zeros(M.cfg, M.slope, M.rows, 0, M.ram)
    return SMat.from_columns(M.cfg, M.slope, cols, M.ram)


def _sum_series(cfg, slope, ram, items):
    acc = SnuSeries.zero(cfg, slope, ram)
    for s in items:
        acc = acc + s
    return acc
