import random
from fractions import Fraction

import pytest

from slomod.contfrac import Slope
from slomod.errors import NotFullRank
from slomod.localized import SMat
from slomod.maxmod import MLModule, max_module, max_sum_ml, qis_closure_member
from slomod.pairrep import (
    LocalPair,
    pair_intersect,
    pair_max_sum,
    pair_to_ml,
    psi,
    psi_inverse,
    saturate,
    verify_image_condition,
)
from slomod.series import SnuSeries

from helpers import NU0, Z5, mono, poly


def random_maximal_ml(rng, slope, d, upper=True):
    """A random full-rank free module in triangular (M, L) form: monomial
    diagonal, exact polynomial strictly-upper entries."""
    cols = []
    for j in range(d):
        col = [SnuSeries.zero(Z5, slope) for _ in range(d)]
        b = rng.randrange(0, 2) * slope.alpha
        a = rng.randrange(0, 2)
        col[j] = mono(Z5, slope, b, max(a, -int(slope.nu * b)))
        for i in range(j):
            if rng.random() < 0.5:
                e = rng.randrange(0, 2)
                col[i] = mono(Z5, slope, e, max(rng.randrange(0, 2), -int(slope.nu * e)))
        cols.append(col)
    L = [rng.randrange(0, slope.alpha) for _ in range(d)]
    return MLModule(Z5, slope, d, cols, L)


def test_psi_pi_module():
    ml = MLModule(Z5, NU0, 1, [[poly(Z5, NU0, [(0, 5)])]], [0])
    P = psi(ml, 10)
    assert P.A.a[0][0] == SnuSeries.one(Z5, NU0)
    assert P.B.a[0][0].digits_agree(poly(Z5, NU0, [(0, 5)]))
    assert P.b_vals == [Fraction(1)]


def test_psi_identity_module():
    z = SnuSeries.zero(Z5, NU0)
    one = SnuSeries.one(Z5, NU0)
    ml = MLModule(Z5, NU0, 2, [[one, z], [z, one]], [0, 0])
    P = psi(ml, 10)
    for i in range(2):
        for j in range(2):
            want = one if i == j else z
            assert P.A.a[i][j].digits_agree(want)
            assert P.B.a[i][j].digits_agree(want)


def test_psi_of_generator_matrix_maximalizes():
    M = SMat(Z5, NU0, [[poly(Z5, NU0, [(0, 25)]), poly(Z5, NU0, [(3, 5)])]])
    P = psi(M, 12)
    # Max = pi.S_0: the pair of the worked example
    assert P.A.a[0][0] == SnuSeries.one(Z5, NU0)
    assert P.B.a[0][0].digits_agree(poly(Z5, NU0, [(0, 5)]))


def test_image_condition_negative():
    # (S_0, u-module of rank 0) spans differ
    one = SnuSeries.one(Z5, NU0)
    z = SnuSeries.zero(Z5, NU0)
    A = SMat(Z5, NU0, [[one, z], [z, one]])
    B = SMat(Z5, NU0, [[one], [z]])
    P = LocalPair(Z5, NU0, 2, A, B, [0, 1], [one, one], [0], [Fraction(0)])
    assert not verify_image_condition(P, 8)


def test_psi_inverse_simple():
    ml = MLModule(Z5, NU0, 1, [[poly(Z5, NU0, [(0, 5)])]], [0])
    P = psi(ml, 10)
    gens, ml2 = psi_inverse(P, 10)
    P2 = psi(ml2, 10)
    assert P.equal(P2)


def test_round_trips_random():
    rng = random.Random(15)
    for slope in (NU0, Slope(1, 2), Slope(2, 5)):
        for _ in range(8):
            d = rng.randrange(1, 3)
            ml = random_maximal_ml(rng, slope, d)
            P = psi(ml, 12)
            # pair -> ml -> pair
            ml2 = pair_to_ml(P, 12)
            P2 = psi(ml2, 12)
            assert P.equal(P2), (ml.as_matrix(), ml.L)
            # psi_inverse round trip
            gens, ml3 = psi_inverse(P, 12)
            P3 = psi(ml3, 12)
            assert P.equal(P3)


def test_pair_ops_idempotent():
    ml = MLModule(Z5, NU0, 1, [[poly(Z5, NU0, [(1, 1), (0, 5)])]], [0])
    P = psi(ml, 10)
    assert pair_intersect(P, P, 10).equal(P)
    assert pair_max_sum(P, P, 10).equal(P)


def test_pair_monomial_lattice():
    # u S0 and pi S0: max-sum is everything, intersection is u*pi S0
    Pu = psi(MLModule(Z5, NU0, 1, [[poly(Z5, NU0, [(1, 1)])]], [0]), 10)
    Pp = psi(MLModule(Z5, NU0, 1, [[poly(Z5, NU0, [(0, 5)])]], [0]), 10)
    S = pair_max_sum(Pu, Pp, 10)
    assert S.A.a[0][0] == SnuSeries.one(Z5, NU0)
    assert S.B.a[0][0].digits_agree(SnuSeries.one(Z5, NU0))
    I = pair_intersect(Pu, Pp, 10)
    expected = psi(MLModule(Z5, NU0, 1, [[mono(Z5, NU0, 1, 1)]], [0]), 10)
    assert I.equal(expected)


def test_two_sum_paths_agree():
    rng = random.Random(25)
    for _ in range(8):
        d = 2
        A = random_maximal_ml(rng, NU0, d)
        B = random_maximal_ml(rng, NU0, d)
        via_ml = psi(max_sum_ml(A, B, 12), 12)
        via_pair = pair_max_sum(psi(A, 12), psi(B, 12), 12)
        assert via_ml.equal(via_pair)


def test_intersection_is_maximal():
    rng = random.Random(35)
    for _ in range(6):
        A = random_maximal_ml(rng, NU0, 2)
        B = random_maximal_ml(rng, NU0, 2)
        I = pair_intersect(psi(A, 12), psi(B, 12), 12)
        if I.A.cols == 0:
            continue
        gens, ml = psi_inverse(I, 12)
        # closure adds nothing
        exp = ml.expand_generators()
        for j in range(exp.cols):
            assert qis_closure_member(exp.col(j), exp, 10)


def test_saturate_full_rank():
    ml = MLModule(Z5, NU0, 1, [[poly(Z5, NU0, [(1, 1)])]], [0])
    P = psi(ml, 10)
    S = saturate(P, 10)
    assert S.B.a[0][0] == SnuSeries.one(Z5, NU0)
    assert S.A.a[0][0].digits_agree(P.A.a[0][0])
    # already saturated: unchanged
    S2 = saturate(S, 10)
    assert S2.equal(S)


def test_saturate_scaling_membership():
    # every generator of the saturation times a pi power is a member
    ml = MLModule(Z5, NU0, 2, [[poly(Z5, NU0, [(0, 25)]), SnuSeries.zero(Z5, NU0)],
                               [SnuSeries.zero(Z5, NU0), poly(Z5, NU0, [(1, 5)])]], [0, 0])
    P = psi(ml, 10)
    S = saturate(P, 10)
    from slomod.localized import member_u

    N = 3
    for j in range(S.B.cols):
        scaled = [e.scale_pi(N) for e in S.B.col(j)]
        assert member_u(scaled, P.B, 10) is not None


def test_pair_to_ml_requires_full_rank():
    one = SnuSeries.one(Z5, NU0)
    z = SnuSeries.zero(Z5, NU0)
    A = SMat(Z5, NU0, [[one], [z]])
    B = SMat(Z5, NU0, [[one], [z]])
    P = LocalPair(Z5, NU0, 2, A, B, [0], [one], [0], [Fraction(0)])
    with pytest.raises(NotFullRank):
        pair_to_ml(P, 10)


def test_pair_to_ml_integral_determinant_case():
    # at slope 0 the pi-determinant valuation is integral: no extension used
    rng = random.Random(45)
    for _ in range(6):
        ml = random_maximal_ml(rng, NU0, 2)
        P = psi(ml, 12)
        det_ok = pair_to_ml(P, 12)
        assert psi(det_ok, 12).equal(P)
