import math
from fractions import Fraction

import pytest

from hilbcusp.errors import InvalidArgumentError, NoFundamentalUnitError
from hilbcusp.field import make_field
from hilbcusp.ideals import Ideal
from hilbcusp.units import (GM, RESGM, congruence_subgroup, congruence_unit_index,
                            cusp_unit_data, exponents_to_pair, fundamental_unit, totally_positive_unit)


def pell_oracle(D):
    """Least unit > 1 by a search over y: x^2 - D y^2 = +-4 (D = 1 mod 4) or +-1."""
    K = make_field(D)
    four = D % 4 == 1
    y = 1
    while True:
        for t in ((-4, 4) if four else (-1, 1)):
            # the norm -1 solution, when present, is the smaller one for this y
            x2 = D * y * y + t
            x = math.isqrt(x2) if x2 >= 0 else -1
            if x > 0 and x * x == x2:
                return K(Fraction(x, 2), Fraction(y, 2)) if four else K(x, y)
        y += 1


@pytest.mark.parametrize("D", [2, 3, 5, 6, 7, 10, 11, 13, 14, 15, 17, 19, 21, 22, 23, 29, 31, 46])
def test_fundamental_unit_matches_pell_search(D):
    assert fundamental_unit(make_field(D)) == pell_oracle(D)


def test_known_units():
    assert fundamental_unit(make_field(5)) == make_field(5)(Fraction(1, 2), Fraction(1, 2))
    assert fundamental_unit(make_field(2)) == make_field(2)(1, 1)
    e = fundamental_unit(make_field(3))
    assert e == make_field(3)(2, 1) and e.norm() == 1
    assert fundamental_unit(make_field(94)) == make_field(94)(2143295, 221064)


def test_rational_has_no_fundamental_unit():
    with pytest.raises(NoFundamentalUnitError):
        fundamental_unit(make_field("rational"))


def test_totally_positive_unit():
    K5 = make_field(5)
    assert totally_positive_unit(K5) == fundamental_unit(K5) ** 2
    K3 = make_field(3)
    assert totally_positive_unit(K3) == fundamental_unit(K3)


def _f169_order_oracle():
    """Order of <-1, eps0> in F_169^x via discrete logs.

    F_169 = F_13[w]/(w^2 - w - 1); elements are pairs (a, b) = a + b w.
    """
    p = 13

    def mul(x, y):
        a, b = x
        c, d = y
        # w^2 = w + 1
        return ((a * c + b * d) % p, (a * d + b * c + b * d) % p)

    def power(x, k):
        r = (1, 0)
        for _ in range(k):
            r = mul(r, x)
        return r

    # find a generator of the cyclic group of order 168
    for g in ((a, b) for a in range(p) for b in range(1, p)):
        if all(power(g, 168 // q) != (1, 0) for q in (2, 3, 7)):
            break
    logs = {}
    x = (1, 0)
    for k in range(168):
        logs[x] = k
        x = mul(x, g)
    eps0 = (0, 1)  # (1 + sqrt 5)/2 = w
    minus1 = (p - 1, 0)
    d = math.gcd(168, logs[eps0], logs[minus1])
    return 168 // d


def test_index_inert_13_discrete_log(K5, inert13):
    assert congruence_unit_index(inert13) == _f169_order_oracle()


def test_congruence_index_examples(K5, p11):
    s = K5.sqrt_d
    assert congruence_unit_index(Ideal.unit(K5)) == 1
    assert congruence_unit_index(Ideal.generated_by(K5, [4 + s])) == 10
    assert congruence_unit_index(p11 ** 2) == 110


def test_congruence_subgroup_index_agrees(K5, p11, inert13):
    for f in (p11, p11 ** 2, inert13):
        H = congruence_subgroup(f)
        assert H.index == congruence_unit_index(f)
        # generators really are 1 mod f
        for u, _ in H.generator_pairs():
            assert f.contains(u - 1)


def test_unit_subgroup_membership(K5, p11):
    H = congruence_subgroup(p11)
    for v in H.relations:
        assert H.contains(v)
    u, _ = exponents_to_pair(K5, (0, 1))
    assert not p11.contains(u - 1)
    assert not H.contains((0, 1))


def test_cusp_unit_data_unramified(K5, p11):
    ud = cusp_unit_data(Ideal.unit(K5), p11 ** 2, GM)
    assert ud.n == 1 and len(ud.H_C) == 1
    assert ud.index_full == 110


def test_cusp_unit_data_rational_ramified(QQ):
    n = Ideal.generated_by(QQ, [5])
    ud = cusp_unit_data(n, n, GM)
    assert ud.n == 5
    assert set(ud.H_C) == {1, 4}
    # o_Cbar = {+-1}, o_C = {1}
    assert ud.o_Cbar.index == 1 and ud.o_C.index == 2
    assert ud.contains_pair(QQ(1), QQ(1)) and not ud.contains_pair(QQ(-1), QQ(1))


def test_cusp_unit_data_middle_stratum(K5, p11):
    ud = cusp_unit_data(p11, p11 ** 2, GM)
    assert 10 % len(ud.H_C) == 0
    assert ud.index_full == 10 and ud.index_bar == 10


def test_cusp_unit_data_direct_membership(K5, p11, inert13):
    # generators of o_C satisfy the defining congruences directly, and the
    # index agrees with a direct count over a window of exponents
    for f, n in ((p11, p11 ** 2), (p11 ** 2, p11 ** 2), (inert13, inert13)):
        for flag in (GM, RESGM):
            ud = cusp_unit_data(f, n, flag)
            for u, e in ud.o_C.generator_pairs():
                assert ud.contains_pair(u, e)
            for k in range(-3, 4):
                for s in (0, 1):
                    v = (s, k) if flag == GM else (s, k, 0)
                    u, e = exponents_to_pair(K5, v)
                    assert ud.contains_pair(u, e) == ud.o_C.contains(v)


def test_resgm_h_c1_uses_gm(K5, p11):
    ud = cusp_unit_data(p11 ** 2, p11 ** 2, RESGM)
    gm = cusp_unit_data(p11 ** 2, p11 ** 2, GM)
    assert ud.H_C1 == gm.H_C


def test_cusp_unit_data_rejects_non_divisor(K5, p11, inert13):
    with pytest.raises(InvalidArgumentError):
        cusp_unit_data(inert13, p11, GM)
