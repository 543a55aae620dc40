from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from hilbcusp.errors import InvalidArgumentError, LatticeViolationError
from hilbcusp.field import make_field
from hilbcusp.ideals import Ideal
from hilbcusp.mumford import (integrality_scale, lattice_points, mumford_generators, pairing,
                              polarization_check, torsion_structure, validate_star)
from hilbcusp.units import fundamental_unit


def totally_positive_or_zero(a, b, D):
    """a + b sqrt(D) with rationals a, b; exact test by squaring."""
    if a == 0 and b == 0:
        return True
    return a > 0 and a * a > D * b * b


def test_pairing_examples(QQ, K5):
    Z = Ideal.unit(QQ)
    assert pairing(QQ.zero, QQ.coerce(3), Z) == 0
    assert pairing(QQ.coerce(2), QQ.coerce(3), Z) == 6
    s = K5.sqrt_d
    assert pairing(s, s, Ideal.generated_by(K5, [5])) == 5
    with pytest.raises(LatticeViolationError):
        pairing(QQ.coerce(Fraction(1, 2)), QQ.one, Z)


@given(st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9), st.integers(-9, 9),
       st.integers(-9, 9), st.integers(-9, 9))
def test_pairing_is_balanced(a1, a2, x1, x2, y1, y2):
    K = make_field(5)
    w = K.omega
    o = Ideal.unit(K)
    a, alpha, beta = a1 + a2 * w, x1 + x2 * w, y1 + y2 * w
    assert pairing(a * alpha, beta, o) == pairing(alpha, a * beta, o)
    assert pairing(alpha + a, beta, o) == pairing(alpha, beta, o) + pairing(a, beta, o)


def test_polarization_examples(K5):
    o = Ideal.unit(K5)
    s = K5.sqrt_d
    e0 = fundamental_unit(K5)
    assert polarization_check(K5.one, o)
    assert not polarization_check(1 - s, o)
    assert polarization_check(e0 ** 2, o)
    with pytest.raises(InvalidArgumentError):
        polarization_check(K5.one, Ideal.generated_by(K5, [2]))


def test_star_validation(QQ, K5):
    Z = Ideal.unit(QQ)
    validate_star([QQ.coerce(x) for x in (-1, 0, 1)], Z)
    with pytest.raises(InvalidArgumentError):
        validate_star([QQ.coerce(x) for x in (-1, 1)], Z)
    with pytest.raises(InvalidArgumentError):
        validate_star([QQ.coerce(x) for x in (0, 1)], Z)
    with pytest.raises(InvalidArgumentError):
        validate_star([QQ.coerce(x) for x in (-2, 0, 2)], Z)
    w = K5.omega
    validate_star([K5.zero, K5.one, -K5.one, w, -w], Ideal.unit(K5))
    with pytest.raises(InvalidArgumentError):
        validate_star([K5.zero, K5.one, -K5.one], Ideal.unit(K5))


def test_rational_generator_table(QQ):
    Z = Ideal.unit(QQ)
    star = [QQ.coerce(x) for x in (-1, 0, 1)]
    gens = mumford_generators(QQ.one, Z, Z, star, 10)
    got = {(int(g.beta.a), int(g.alpha.a)): (g.q_exponent, g.character, g.degree) for g in gens}
    expected = {(b, a): ((b + a) * b, 2 * b + a, 1) for b in range(-10, 11) for a in (-1, 0, 1)}
    assert got == expected
    assert got[(1, 0)] == (1, 2, 1)
    assert got[(-1, 1)] == (0, -1, 1)
    assert all(got[(0, a)] == (0, a, 1) for a in (-1, 0, 1))
    for g in gens:
        assert g.integral == (g.q_exponent.a >= 0)


def test_positivity_for_alpha_zero(K5):
    o = Ideal.unit(K5)
    e0 = fundamental_unit(K5)
    star = [K5.zero, K5.one, -K5.one, K5.omega, -K5.omega]
    for phi in (K5.one, e0 ** 2):
        for g in mumford_generators(phi, o, o, star, 6):
            if g.beta and not g.alpha:
                assert g.q_exponent.is_totally_positive()


def nonnegative(c0, c1, D):
    """c0 + c1 sqrt(D) >= 0, exactly."""
    if c0 >= 0 and c1 >= 0:
        return True
    if c0 >= 0:
        return c0 * c0 >= D * c1 * c1
    if c1 > 0:
        return D * c1 * c1 >= c0 * c0
    return False


def test_lattice_points_against_direct_scan(K5):
    o = Ideal.unit(K5)
    w = K5.omega
    direct = set()
    for x in range(-20, 21):
        for y in range(-20, 21):
            e = x + y * w
            # |e| <= 7 in both embeddings: 7 - t(a + s b sqrt5) >= 0 for all signs s, t
            if all(nonnegative(7 - t * e.a, -t * s * e.b, 5) for s in (1, -1) for t in (1, -1)):
                direct.add(e)
    assert set(lattice_points(o, 7)) == direct


def test_integrality_scale_rational(QQ):
    for alpha in (-1, 0, 1):
        n, cert = integrality_scale(QQ.coerce(alpha), QQ.one, 50)
        assert n == 1 and cert["certified"] == "box-certified"
        assert cert["betas_checked"] == 100


def scale_oracle(alpha, box):
    K = alpha.field
    w = K.omega
    betas = [x + y * w for x in range(-30, 31) for y in range(-30, 31)]
    betas = [b for b in betas if b and all(abs(v) <= box for v in b.embeddings())]
    n = 1
    while True:
        if all(totally_positive_or_zero(((n * b + alpha) * b).a, ((n * b + alpha) * b).b, K.D) for b in betas):
            return n
        n += 1


@pytest.mark.parametrize("alpha", ["eps", "-eps", "sqrt5", "3"])
def test_integrality_scale_against_scan(K5, alpha):
    e0 = fundamental_unit(K5)
    a = {"eps": e0, "-eps": -e0, "sqrt5": K5.sqrt_d, "3": K5.coerce(3)}[alpha]
    n, cert = integrality_scale(a, K5.one, 10)
    assert n == scale_oracle(a, 10)
    assert cert["certified"] == "box-certified"


def test_torsion_examples(QQ, K5, p11):
    Z = Ideal.unit(QQ)
    t = torsion_structure(Z, Z, Z, Z)
    assert (t["a/na"], t["n^-1b/b"], t["b'/b"]) == (1, 1, 1)
    five = Ideal.generated_by(QQ, [5])
    t = torsion_structure(Z, Z, five.inverse(), five)
    assert (t["a/na"], t["n^-1b/b"], t["b'/b"]) == (5, 5, 5)
    o = Ideal.unit(K5)
    t = torsion_structure(o, o, p11.inverse(), p11)
    assert (t["a/na"], t["n^-1b/b"], t["b'/b"]) == (11, 11, 11)
    with pytest.raises(LatticeViolationError):
        torsion_structure(Z, Z, Ideal.generated_by(QQ, [Fraction(1, 25)]), five)


@pytest.mark.parametrize("k", [1, 2])
def test_torsion_exactness(K5, p11, k):
    o = Ideal.unit(K5)
    n = p11 ** k
    for j in range(k + 1):
        bp = p11.inverse() ** j
        t = torsion_structure(o, o, bp, n)
        for seq in ("sequence_a", "sequence_b"):
            s = t[seq]
            assert s["middle"] == s["sub"] * s["quotient"]
        assert t["sequence_a"]["quotient"] == t["n^-1b/b"]
        assert t["b'/b"] == 11 ** j
