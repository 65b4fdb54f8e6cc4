"""The two-localization representation of maximal modules.

A maximal module is pinned down by the pair (M_pi, M_u) of its
localizations in Hermite Normal Form; the pair is in the image of the
correspondence exactly when both components generate the same vector space
over the common fraction-type field E.  Intersections and maximal sums act
componentwise; saturation touches only the u component; conversions to and
from the (M, L) form go through determinant scalings and the matrix
reduction.
"""

from __future__ import annotations

from fractions import Fraction

from .coeffs import CoeffElem, _isinf
from .errors import BadParameters, NotFullRank, NotInImage, PrecisionExhausted
from .localized import (
    EchelonPi,
    EchelonU,
    SMat,
    echelon_pi,
    hnf_pi,
    hnf_u,
    member_u,
    module_intersect,
    module_sum,
    mu_monomial,
    u_divide,
)
from .maxmod import MLModule, _assemble_ml, matrix_reduction, max_module, relations_approx
from .series import SnuSeries, _ceil, _floor


class LocalPair:
    """HNF matrices of the two localizations of one maximal module."""

    __slots__ = ("cfg", "slope", "dim", "A", "B", "a_rows", "a_pivots", "b_rows", "b_vals", "ram")

    def __init__(self, cfg, slope, dim, A, B, a_rows, a_pivots, b_rows, b_vals, ram=1):
        self.cfg = cfg
        self.slope = slope
        self.dim = dim
        self.A = A
        self.B = B
        self.a_rows = list(a_rows)
        self.a_pivots = list(a_pivots)
        self.b_rows = list(b_rows)
        self.b_vals = list(b_vals)
        self.ram = ram

    @property
    def rank(self) -> int:
        return len(self.a_rows)

    def equal(self, other: "LocalPair") -> bool:
        """Structural comparison of the canonical forms (HNF uniqueness)."""
        if (
            self.dim != other.dim
            or self.slope != other.slope
            or self.a_rows != other.a_rows
            or self.b_rows != other.b_rows
            or self.b_vals != other.b_vals
            or self.A.cols != other.A.cols
            or self.B.cols != other.B.cols
        ):
            return False
        for i in range(self.dim):
            for j in range(self.A.cols):
                if not self.A.a[i][j].digits_agree(other.A.a[i][j]):
                    return False
            for j in range(self.B.cols):
                if not self.B.a[i][j].digits_agree(other.B.a[i][j]):
                    return False
        return True

    def __repr__(self):
        return f"LocalPair(A={self.A!r}, B={self.B!r})"


def _pair_from_hnfs(cfg, slope, dim, ep: EchelonPi, eu: EchelonU, ram=1) -> LocalPair:
    a_cols = [ep.T.col(j) for j in range(ep.rank)]
    b_cols = [eu.T.col(j) for j in range(eu.rank)]
    A = SMat.from_columns(cfg, slope, a_cols, ram) if a_cols else SMat.zeros(cfg, slope, dim, 0, ram)
    B = SMat.from_columns(cfg, slope, b_cols, ram) if b_cols else SMat.zeros(cfg, slope, dim, 0, ram)
    return LocalPair(cfg, slope, dim, A, B, ep.pivot_rows, ep.pivots, eu.pivot_rows, eu.pivot_vals, ram)


def psi(m, prec=None) -> LocalPair:
    """Localize a maximal module (MLModule, or a generator matrix which is
    first maximalized) into its canonical HNF pair."""
    if isinstance(m, SMat):
        m, _ = max_module(m, prec)
    plain = m.as_matrix()
    ep = hnf_pi(plain, prec)
    u_cols = []
    for col, delta in zip(m.columns, m.L):
        mu = mu_monomial(m.cfg, m.slope, delta, m.ram)
        u_cols.append([mu * e for e in col])
    Mu = SMat.from_columns(m.cfg, m.slope, u_cols, m.ram) if u_cols else SMat.zeros(
        m.cfg, m.slope, m.dim, 0, m.ram
    )
    eu = hnf_u(Mu, prec)
    return _pair_from_hnfs(m.cfg, m.slope, m.dim, ep, eu, m.ram)


def _e_divide(a: SnuSeries, b: SnuSeries, n_level, hi_window) -> SnuSeries:
    """a / b in the field E: pi-rescale until the DVR division applies."""
    vb = b.certified_valuation()
    lb = a.lower_bound()
    s = max(0, _ceil(vb - lb))
    return u_divide(a.scale_pi(s), b, n_level, hi_window).scale_pi(-s)


def _e_membership(vec, M: SMat, prec) -> bool:
    """Is vec in the E-span of the columns of M?  Tested over the DVR after
    clearing a pi power bounded by the total pivot valuation."""
    ech = hnf_u(M, prec)
    shift = _ceil(sum(ech.pivot_vals, Fraction(0))) + 1
    lb = min((e.lower_bound() for e in vec), default=Fraction(0))
    if not _isinf(lb) and lb < 0:
        shift += _ceil(-lb)
    scaled = [e.scale_pi(shift) for e in vec]
    return member_u(scaled, M, prec, ech=ech) is not None


def verify_image_condition(P: LocalPair, prec=None) -> bool:
    """Both components generate the same E-vector space: rank equality plus
    cross membership of every generator."""
    if prec is None:
        prec = P.cfg.default_prec
    if P.A.cols != P.B.cols:
        return False
    for j in range(P.A.cols):
        if not _e_membership(P.A.col(j), P.B, prec):
            return False
    for j in range(P.B.cols):
        if not _e_membership(P.B.col(j), P.A, prec):
            return False
    return True


def psi_inverse(P: LocalPair, prec=None):
    """Generators over the slope ring of the unique preimage A cap B.

    Full-rank pairs go through the determinant recipe directly; lower rank
    is reduced to the full-rank case in the coordinates of the pi basis.
    """
    if prec is None:
        prec = P.cfg.default_prec
    if not verify_image_condition(P, prec):
        raise NotInImage("the two components span different E-subspaces")
    if P.rank == P.dim:
        ml = pair_to_ml(P, prec)
        return ml.expand_generators(), ml
    # coordinates w.r.t. the pi-side basis: solve A * Y = B over E
    hi_window = _default_window(P)
    Y_cols = []
    for j in range(P.B.cols):
        y = _solve_triangular_e(P, P.B.col(j), prec, hi_window)
        Y_cols.append(y)
    r = P.rank
    coordP = _coordinate_pair(P, Y_cols, prec)
    ml_c = pair_to_ml(coordP, prec)
    # map coordinate generators back through the basis
    gens = ml_c.expand_generators()
    cols = []
    for jc in range(gens.cols):
        col = [SnuSeries.zero(P.cfg, P.slope, P.ram) for _ in range(P.dim)]
        for i in range(r):
            coeff = gens.a[i][jc]
            for row in range(P.dim):
                col[row] = col[row] + coeff * P.A.a[row][i]
        cols.append(col)
    M = SMat.from_columns(P.cfg, P.slope, cols, P.ram)
    ml, _ = max_module(M, prec)
    return M, ml


def _default_window(P: LocalPair) -> int:
    base = 4
    for M in (P.A, P.B):
        for row in M.a:
            for e in row:
                if e.coeffs:
                    base = max(base, abs(max(e.coeffs)), abs(min(e.coeffs)))
    return (base + 4) * P.slope.alpha + 4 * P.cfg.default_prec


def _solve_triangular_e(P: LocalPair, vec, prec, hi_window):
    y = [SnuSeries.zero(P.cfg, P.slope, P.ram) for _ in range(P.rank)]
    residual = list(vec)
    for i, row in enumerate(P.a_rows):
        e = residual[row]
        if e.is_certainly_zero() or not any(c.has_witness() for c in e.coeffs.values()):
            continue
        q = _e_divide(e, P.a_pivots[i], prec, hi_window)
        y[i] = q
        for rr in range(P.dim):
            residual[rr] = residual[rr] - q * P.A.a[rr][i]
    return y


def _coordinate_pair(P: LocalPair, Y_cols, prec) -> LocalPair:
    r = P.rank
    ident = SMat.identity(P.cfg, P.slope, r, P.ram)
    ep = EchelonPi(
        ident,
        SMat.identity(P.cfg, P.slope, r, P.ram),
        list(range(r)),
        [SnuSeries.one(P.cfg, P.slope, P.ram) for _ in range(r)],
    )
    Y = SMat.from_columns(P.cfg, P.slope, Y_cols, P.ram)
    eu = hnf_u(Y, prec)
    return _pair_from_hnfs(P.cfg, P.slope, r, ep, eu, P.ram)


def pair_intersect(P: LocalPair, Q: LocalPair, prec=None) -> LocalPair:
    """Componentwise intersection (the intersection of maximal modules is
    maximal, so no closure pass is needed)."""
    _check_ambient(P, Q)
    A = module_intersect(P.A, Q.A, "pi", prec)
    B = module_intersect(P.B, Q.B, "u", prec)
    ep = hnf_pi(A, prec)
    eu = hnf_u(B, prec)
    return _pair_from_hnfs(P.cfg, P.slope, P.dim, ep, eu, P.ram)


def pair_max_sum(P: LocalPair, Q: LocalPair, prec=None) -> LocalPair:
    """Componentwise sum: the pair of the maximal sum."""
    _check_ambient(P, Q)
    A = module_sum(P.A, Q.A, "pi", prec)
    B = module_sum(P.B, Q.B, "u", prec)
    ep = hnf_pi(A, prec)
    eu = hnf_u(B, prec)
    return _pair_from_hnfs(P.cfg, P.slope, P.dim, ep, eu, P.ram)


def _check_ambient(P: LocalPair, Q: LocalPair):
    if P.dim != Q.dim or P.slope != Q.slope:
        raise BadParameters("pairs live in different ambients")


def saturate(P: LocalPair, prec=None) -> LocalPair:
    """The pi-divisible closure: the pi component is unchanged; the u
    component becomes the Smith-form saturation (the identity for full
    rank)."""
    from .localized import smith_u

    if prec is None:
        prec = P.cfg.default_prec
    if P.rank == P.dim:
        eu = hnf_u(SMat.identity(P.cfg, P.slope, P.dim, P.ram), prec)
        B = SMat.identity(P.cfg, P.slope, P.dim, P.ram)
        return LocalPair(
            P.cfg, P.slope, P.dim, P.A, B, P.a_rows, P.a_pivots,
            list(range(P.dim)), [Fraction(0)] * P.dim, P.ram,
        )
    vals, U_inv, rank = smith_u(P.B, prec)
    cols = [U_inv.col(j) for j in range(rank)]
    Bs = SMat.from_columns(P.cfg, P.slope, cols, P.ram) if cols else SMat.zeros(
        P.cfg, P.slope, P.dim, 0, P.ram
    )
    eu = hnf_u(Bs, prec)
    return _pair_from_hnfs(
        P.cfg, P.slope, P.dim,
        EchelonPi(P.A, None, P.a_rows, P.a_pivots), eu, P.ram,
    )


def ml_to_pair(ml: MLModule, prec=None) -> LocalPair:
    return psi(ml, prec)


def pair_to_ml(P: LocalPair, prec=None) -> MLModule:
    """The (M, L) representation of a full-rank pair: scale each side by the
    opposite determinant, concatenate, reduce."""
    if prec is None:
        prec = P.cfg.default_prec
    if P.rank != P.dim:
        raise NotFullRank("pair_to_ml needs a full-rank pair")
    alpha = P.slope.alpha
    # clear denominators
    a_shift = 0
    for row in P.A.a:
        for e in row:
            lb = e.lower_bound()
            if not _isinf(lb) and lb < 0:
                a_shift = max(a_shift, _ceil(-lb))
    A = P.A.map(lambda e: e.scale_pi(a_shift))
    u_shift = 0
    for row in P.B.a:
        for e in row:
            lo = e.min_exp()
            if lo is not None and lo < 0:
                u_shift = max(u_shift, _ceil(Fraction(-lo, alpha)))
    xa = mu_monomial(P.cfg, P.slope, 0, P.ram)
    if u_shift:
        c = CoeffElem.from_int(P.cfg, 1, ram=P.ram).scale_pi(-P.slope.beta * u_shift)
        xa = SnuSeries.monomial(P.cfg, P.slope, alpha * u_shift, c)
    B = P.B.map(lambda e: e * xa if u_shift else e)
    # the u-side determinant only enters through a pi power that pushes the
    # pi-basis into the u-span; with monomial pivots we take the power
    # directly (ceil of the determinant valuation)
    v_du = _det(B).certified_valuation()
    D_u = SnuSeries.one(P.cfg, P.slope, P.ram).scale_pi(_ceil(v_du))
    D_pi_raw = _det(A)
    v_dpi = D_pi_raw.certified_valuation()
    w_exp = int(alpha * v_dpi)
    cols = []
    L = []
    for j in range(A.cols):
        cols.append([D_u * A.a[i][j] for i in range(A.rows)])
        L.append(0)
    for j in range(B.cols):
        cols.append([D_pi_raw * B.a[i][j] for i in range(B.rows)])
        L.append(-w_exp)
    M = SMat.from_columns(P.cfg, P.slope, cols, P.ram)
    R = relations_approx(M)
    M1, R1, L1 = matrix_reduction(M, R, L, prec=prec)
    ml, _ = _assemble_ml(M1, R1, L1)
    return ml


def _det(M: SMat) -> SnuSeries:
    """Cofactor-expansion determinant (ambients are small)."""
    n = M.rows
    assert M.cols == n
    if n == 0:
        return SnuSeries.one(M.cfg, M.slope, M.ram)
    if n == 1:
        return M.a[0][0]
    acc = SnuSeries.zero(M.cfg, M.slope, M.ram)
    for j in range(n):
        e = M.a[0][j]
        if e.is_exact_zero():
            continue
        minor = SMat(
            M.cfg,
            M.slope,
            [[M.a[i][c] for c in range(n) if c != j] for i in range(1, n)],
            M.ram,
        )
        term = e * _det(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc
