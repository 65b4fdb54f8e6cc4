"""Maximal modules up to quasi-isomorphism.

The reduction works on a triple (M, R, L): M holds generator columns, R a
full-rank chunk of their relations (M.R = 0 holds *plainly* throughout), and
L[j] is the w-exponent making  g_j = w^{L[j]} C_j(M)  the actual generator
(w^alpha = pi).  Scaled data never leaves the plain matrices: the relation
coefficient on g_j is  w^{-L[j]} r_j , so its effective valuation is
vt_j = v_nu(r_j) - L[j]/alpha.

Bookkeeping reconciliation (the printed sources mix signs): the division
eligibility test compares the scaled valuations  vt_j  (minus sign, as in
the vector-addition variant of the algorithm); the enlargement step picks
the unique maximal-degree entry j0 (which then has strictly minimal vt),
moves the integer part of  delta = min_{j != j0} vt_j - vt_j0  into the
matrices (column j0 of M divided by pi^floor(delta), row j0 of R multiplied
by it) and the fractional remainder into L[j0] (an integer number of
w-units), so L stays integral and M.R = 0 is preserved verbatim.
"""

from __future__ import annotations

from fractions import Fraction

from .coeffs import INF, CoeffElem, _isinf
from .contfrac import GenSchedule, Slope, monomial_generators
from .errors import (
    BadParameters,
    BudgetExhausted,
    NonTermination,
    PrecisionExhausted,
    SlopeOrder,
)
from .localized import SMat, kernel_pi, member_pi, member_u, mu_monomial
from .series import SnuSeries, _ceil, _floor, euclid_div_full


class MLModule:
    """A free module over the ramified extension of the slope ring, encoded
    by S_nu-columns plus per-column w-exponents in [0, alpha)."""

    __slots__ = ("cfg", "slope", "dim", "columns", "L", "ram")

    def __init__(self, cfg, slope, dim, columns, L, ram=1):
        self.cfg = cfg
        self.slope = slope
        self.dim = dim
        self.columns = [list(c) for c in columns]
        self.L = list(L)
        self.ram = ram
        for x in self.L:
            if not 0 <= x < slope.alpha:
                raise BadParameters(f"w-exponent {x} outside [0, alpha)")

    @classmethod
    def from_matrix(cls, M: SMat, L=None):
        cols = M.columns()
        return cls(M.cfg, M.slope, M.rows, cols, L or [0] * M.cols, M.ram)

    def as_matrix(self) -> SMat:
        if not self.columns:
            return SMat.zeros(self.cfg, self.slope, self.dim, 0, self.ram)
        return SMat.from_columns(self.cfg, self.slope, self.columns, self.ram)

    def schedules(self):
        """Per column, the monomial generator schedule of
        w^L[i] * (extension ring) intersected with the slope ring."""
        out = []
        for delta in self.L:
            out.append(_schedule_for_exponent(self.slope, delta))
        return out

    def expand_generators(self) -> SMat:
        """Generators of the underlying maximal module over the slope ring:
        one monomial multiple of each column per schedule entry."""
        cols = []
        for col, sched in zip(self.columns, self.schedules()):
            for (a, b) in sched.pairs():
                mono = SnuSeries.monomial(
                    self.cfg, self.slope, a,
                    CoeffElem.from_int(self.cfg, 1, ram=self.ram).scale_pi(b),
                )
                cols.append([mono * e for e in col])
        if not cols:
            return SMat.zeros(self.cfg, self.slope, self.dim, 0, self.ram)
        return SMat.from_columns(self.cfg, self.slope, cols, self.ram)

    def generator_count(self) -> int:
        return sum(s.count() for s in self.schedules())

    def structurally_equal(self, other: "MLModule") -> bool:
        if self.dim != other.dim or self.L != other.L or self.slope != other.slope:
            return False
        if len(self.columns) != len(other.columns):
            return False
        for ca, cb in zip(self.columns, other.columns):
            for ea, eb in zip(ca, cb):
                if not ea.digits_agree(eb):
                    return False
        return True

    def __repr__(self):
        mat = self.as_matrix()
        return f"MLModule(M={mat!r}, L={self.L})"


def _schedule_for_exponent(slope: Slope, delta: int) -> GenSchedule:
    """Schedule of { x : v_nu(x) >= delta/alpha } for delta in [0, alpha):
    pi^c times the standard staircase with delta'' = (alpha*c - delta)."""
    alpha = slope.alpha
    if delta == 0:
        sched = monomial_generators(slope, 0)
        return _ShiftedSchedule(sched, 0)
    c = 1
    dprime = alpha * c - delta
    sched = monomial_generators(slope, dprime % alpha)
    return _ShiftedSchedule(sched, c)


class _ShiftedSchedule(GenSchedule):
    """A generator schedule with every pi-exponent shifted by a constant."""

    def __init__(self, base: GenSchedule, pi_shift: int):
        super().__init__(base.sequences, base.slope, base.delta)
        self.pi_shift = pi_shift

    def pi_exponent(self, x: int) -> int:
        return super().pi_exponent(x) + self.pi_shift

    def level(self, x: int) -> Fraction:
        return self.pi_exponent(x) + self.slope.nu * x


# ---------------------------------------------------------------------------
# relations
# ---------------------------------------------------------------------------


def relations_approx(M: SMat) -> SMat:
    """A full-rank matrix R of S_nu-relations of the columns of M with
    pi-power cofinite index in the full syzygy module: the pi-localized
    kernel with denominators cleared per column."""
    cols = kernel_pi(M)
    if not cols:
        return SMat.zeros(M.cfg, M.slope, M.cols, 0, M.ram)
    return SMat.from_columns(M.cfg, M.slope, cols, M.ram)


# ---------------------------------------------------------------------------
# the reduction
# ---------------------------------------------------------------------------


def _entry_data(e: SnuSeries):
    """(v, deg) of a nonzero relation entry, or None for zero (raises on
    ambiguity)."""
    if e.is_exact_zero() or e.is_certainly_zero():
        return None
    if not any(c.has_witness() for c in e.coeffs.values()):
        raise PrecisionExhausted("relation entry is ambiguous at working precision")
    return e.certified_val_deg()


def matrix_reduction(M: SMat, R: SMat, L=None, prec=None, trace=None, check=False):
    """Put the relation matrix in staircase form by quasi-isomorphisms.

    Returns (M1, R1, L1) with M1.R1 = 0; the columns of M1 whose R1-row is
    zero carry (with their L1 exponents) a basis of the maximal module of
    the span over the ramified extension.  ``trace``, when a list, collects
    (M, R) snapshots after every elementary operation.
    """
    cfg, slope = M.cfg, M.slope
    alpha = slope.alpha
    if prec is None:
        prec = cfg.default_prec
    M = M.copy()
    R = R.copy()
    k = M.cols
    if R.rows != k:
        raise BadParameters("R must have one row per column of M")
    L = list(L) if L is not None else [0] * k

    def snapshot():
        if trace is not None:
            trace.append((M.copy(), R.copy()))

    def verify():
        if check:
            prod = M.matmul(R)
            for row in prod.a:
                for e in row:
                    assert not any(
                        c.has_witness() for c in e.coeffs.values()
                    ), "M.R = 0 violated"

    snapshot()
    budget = _iteration_budget(R, alpha)
    steps = 0
    free_rows = set(range(k))
    for t in range(R.cols):
        while True:
            data = {}
            for j in sorted(free_rows):
                d = _entry_data(R.a[j][t])
                if d is not None:
                    data[j] = d
            if len(data) <= 1:
                break
            pair = _pick_pair(data, L, alpha)
            if pair is None:
                # enlargement: unique max-degree entry has minimal scaled
                # valuation; raise it to the second minimum
                j0 = max(data, key=lambda j: (data[j][1], -j))
                vt = {j: data[j][0] - Fraction(L[j], alpha) for j in data}
                delta = min(v for j, v in vt.items() if j != j0) - vt[j0]
                assert delta > 0
                d_int = _floor(delta)
                frac_w = int(alpha * (delta - d_int))
                if d_int:
                    for c in range(M.rows):
                        M.a[c][j0] = M.a[c][j0].scale_pi(-d_int)
                    for c in range(R.cols):
                        R.a[j0][c] = R.a[j0][c].scale_pi(d_int)
                L[j0] -= frac_w
                snapshot()
            else:
                j0, j1 = pair
                v0, v1 = data[j0][0], data[j1][0]
                if v0 > v1:
                    d0 = _ceil(v0 - v1)
                    for c in range(R.cols):
                        R.a[j1][c] = R.a[j1][c].scale_pi(d0)
                    for c in range(M.rows):
                        M.a[c][j1] = M.a[c][j1].scale_pi(-d0)
                    L[j1] += alpha * d0
                res = euclid_div_full(R.a[j1][t], R.a[j0][t], prec)
                q = res.q
                for c in range(M.rows):
                    M.a[c][j0] = M.a[c][j0] + q * M.a[c][j1]
                for c in range(R.cols):
                    R.a[j1][c] = R.a[j1][c] - q * R.a[j0][c]
                R.a[j1][t] = res.r  # the division's own remainder, structurally
                snapshot()
            verify()
            steps += 1
            if steps > budget:
                raise NonTermination("matrix reduction exceeded its iteration budget")
        if data:
            (jstar,) = data.keys()
            # r_{jstar,t} * g_jstar = 0 and the span is torsion free, so the
            # generator column is exactly zero
            z = SnuSeries.zero(cfg, slope, M.ram)
            for c in range(M.rows):
                M.a[c][jstar] = z
            for c in range(t + 1, R.cols):
                R.a[jstar][c] = z
            free_rows.discard(jstar)
            snapshot()
            verify()
    return M, R, L


def _pick_pair(data, L, alpha):
    """The lexicographically smallest (j0, j1) with both entries nonzero,
    scaled-valuation and degree of j0 at most those of j1."""
    vt = {j: data[j][0] - Fraction(L[j], alpha) for j in data}
    best = None
    for j0 in data:
        for j1 in data:
            if j0 == j1:
                continue
            if vt[j0] <= vt[j1] and data[j0][1] <= data[j1][1]:
                key = (data[j0][1], vt[j0], j0, data[j1][1], vt[j1], j1)
                if best is None or key < best[0]:
                    best = (key, (j0, j1))
    return best[1] if best else None


def _iteration_budget(R: SMat, alpha) -> int:
    mass = 0
    for row in R.a:
        for e in row:
            if e.is_exact_zero():
                continue
            d = e.max_deg()
            mass += (d or 0) + 1
            lb = e.lower_bound()
            if not _isinf(lb) and lb > 0:
                mass += int(alpha * _ceil(lb))
    return 10 * mass + 50


# ---------------------------------------------------------------------------
# Max and friends
# ---------------------------------------------------------------------------


def max_module(M: SMat, prec=None, trace=None):
    """The maximal module of the column span: an MLModule over the ramified
    extension plus the per-column monomial generator schedules realizing
    the intersection with the base ring."""
    R = relations_approx(M)
    if R.cols == 0:
        ml = MLModule.from_matrix(M)
        return ml, ml.schedules()
    M1, R1, L1 = matrix_reduction(M, R, prec=prec, trace=trace)
    return _assemble_ml(M1, R1, L1)


def _assemble_ml(M1: SMat, R1: SMat, L1):
    cfg, slope = M1.cfg, M1.slope
    alpha = slope.alpha
    cols, Ls = [], []
    for j in range(M1.cols):
        row_zero = all(
            R1.a[j][c].is_exact_zero() or R1.a[j][c].is_certainly_zero()
            or not any(cc.has_witness() for cc in R1.a[j][c].coeffs.values())
            for c in range(R1.cols)
        )
        if not row_zero:
            continue
        col = [M1.a[i][j] for i in range(M1.rows)]
        if all(e.is_exact_zero() or e.is_certainly_zero() for e in col):
            continue
        q, delta = divmod(L1[j], alpha)
        col = [e.scale_pi(q) for e in col]
        cols.append(col)
        Ls.append(delta)
    ml = MLModule(cfg, slope, M1.rows, cols, Ls, M1.ram)
    return ml, ml.schedules()


def qis_closure_member(x, M: SMat, n_budget: int, prec=None) -> bool:
    """Membership of x in the maximal module of the span of M, tested via
    the two localizations with the power witnesses capped at n_budget."""
    if prec is None:
        prec = M.cfg.default_prec
    Xp = member_pi(x, M, prec)
    if Xp is None:
        return False
    n_pi = 0
    for e in Xp:
        lb = e.lower_bound()
        if not _isinf(lb) and lb < 0:
            n_pi = max(n_pi, _ceil(-lb))
    Xu = member_u(x, M, prec)
    if Xu is None:
        return False
    alpha = M.slope.alpha
    n_u = 0
    for e in Xu:
        lo = e.min_exp()
        if lo is not None and lo < 0:
            n_u = max(n_u, _ceil(Fraction(-lo, alpha)))
    n = max(n_pi, n_u)
    if n > n_budget:
        raise BudgetExhausted(f"membership witness needs power {n} > {n_budget}")
    return True


def max_sum_ml(A: MLModule, B: MLModule, prec=None) -> MLModule:
    """The maximal sum, computed by reducing the concatenated (M, L) data."""
    if A.slope != B.slope or A.dim != B.dim:
        raise BadParameters("summands live in different ambients")
    cols = A.columns + B.columns
    L = A.L + B.L
    M = SMat.from_columns(A.cfg, A.slope, cols, A.ram) if cols else SMat.zeros(
        A.cfg, A.slope, A.dim, 0, A.ram
    )
    R = relations_approx(M)
    if R.cols == 0:
        M1, R1, L1 = M, R, L
    else:
        M1, R1, L1 = matrix_reduction(M, R, L, prec=prec)
    ml, _ = _assemble_ml(M1, R1, L1)
    return ml


def scalar_extend(A: MLModule, nu2: Slope) -> MLModule:
    """Base change to a bigger slope: per column the new w'-exponent is the
    minimum of b + nu'*a over the schedule endpoints (the level sequence is
    arithmetic along each subsequence, so endpoints suffice)."""
    if nu2.nu < A.slope.nu:
        raise SlopeOrder(f"target slope {nu2} below {A.slope}")
    if nu2 == A.slope:
        return MLModule(A.cfg, A.slope, A.dim, A.columns, A.L, A.ram)
    alpha2 = nu2.alpha
    cols, Ls = [], []
    for col, sched in zip(A.columns, A.schedules()):
        m = min(
            Fraction(sched.pi_exponent(a)) + nu2.nu * a
            for a in sched.endpoint_values()
        )
        q = _floor(m)
        delta2 = int(alpha2 * (m - q))
        new_col = [_reslope(e, nu2).scale_pi(q) for e in col]
        cols.append(new_col)
        Ls.append(delta2)
    return MLModule(A.cfg, nu2, A.dim, cols, Ls, A.ram)


def _reslope(e: SnuSeries, nu2: Slope) -> SnuSeries:
    """Reinterpret a series with non-negative support at a bigger slope.

    Unknown-tail levels lift by at least u_prec * (nu' - nu): this is the
    slope-bump effect that restores valuation certificates on truncated
    data."""
    tb = e.tail_bound
    if not _isinf(tb) and not _isinf(e.u_prec):
        tb = tb + e.u_prec * (nu2.nu - e.nu)
    return SnuSeries(e.cfg, nu2, dict(e.coeffs), e.u_prec, tb, ram=e.ram)
