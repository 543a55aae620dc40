"""Acceptance suite: one PASS/FAIL line per criterion.

Run under pytest or directly with `python tests/test_acceptance.py`.
"""
import functools
import itertools
import math
import random
import sys
import time

import pytest

from hilbcusp.cusps import (COMPOSANTES, POINTES, LevelContext, cusp_count_formula, cusp_invariants,
                            enumerate_cusps_bruteforce)
from hilbcusp.fans import HULL_SMOOTH, Cone2, build_admissible_fan, check_admissible, det2, hilbert_basis
from hilbcusp.field import make_field
from hilbcusp.ideals import Ideal, factor_rational_prime
from hilbcusp.mumford import integrality_scale, mumford_generators, polarization_check
from hilbcusp.qexp import (boundary_components, enumerate_totally_positive, koecher_divergence,
                           solve_xi_star)
from hilbcusp.units import GM, RESGM, fundamental_unit

CRITERIA = {}


def criterion(num, title):
    def wrap(fn):
        CRITERIA[num] = (title, fn)
        return fn
    return wrap


def run_one(num):
    title, fn = CRITERIA[num]
    t0 = time.perf_counter()
    try:
        detail = fn()
        ok = True
    except AssertionError as exc:
        ok, detail = False, str(exc) or "assertion failed"
    line = f"{'PASS' if ok else 'FAIL'} [{num}] {title} ({time.perf_counter() - t0:.2f}s): {detail}"
    return ok, line


# shared configurations

K5 = make_field(5)
QQ = make_field("rational")
P11 = factor_rational_prime(K5, 11).primes[0]
INERT13 = Ideal.generated_by(K5, [13])


def config(name, flag=GM):
    if name == "rational-5":
        K, n = QQ, Ideal.generated_by(QQ, [5])
    elif name == "p2-11":
        K, n = K5, P11 ** 2
    else:
        K, n = K5, INERT13
    return LevelContext(K, Ideal.unit(K), n, flag)


@functools.lru_cache(maxsize=None)
def brute(name, variant, frame):
    ctx = config(name)
    return enumerate_cusps_bruteforce(Ideal.unit(ctx.field), ctx, variant, frame=frame)


def formula(name, variant):
    ctx = config(name)
    return {k: v for k, v in cusp_count_formula(Ideal.unit(ctx.field), ctx, variant).items() if v}


def split_counts(counts, o):
    unram = sum(v for k, v in counts.items() if k == o)
    return unram, sum(counts.values()) - unram


@criterion(1, "rational level 5: 2 unramified + 2 ramified cusps, one ramified composante")
def crit1():
    t0 = time.perf_counter()
    Z = Ideal.unit(QQ)
    b = brute("rational-5", POINTES, 0)
    f = formula("rational-5", POINTES)
    assert b == f, f"brute {b} vs formula {f}"
    assert split_counts(b, Z) == (2, 2), split_counts(b, Z)
    comp = brute("rational-5", COMPOSANTES, 0)
    assert comp == formula("rational-5", COMPOSANTES)
    assert split_counts(comp, Z)[1] == 1, comp
    ud = cusp_invariants(1, 1, config("rational-5")).unit_data
    # o^x = {+-1}; index 1 with -1 inside means the component unit group is {+-1}
    assert ud.o_Cbar.index == 1 and ud.o_Cbar.contains((1,))
    dt = time.perf_counter() - t0
    assert dt < 1, f"took {dt:.2f}s"
    return f"pointes {split_counts(b, Z)}, ramified composantes 1, o_Cbar = {{+-1}}, {dt:.3f}s"


@criterion(2, "Q(sqrt5), n = p^2 over 11: formula equals brute force on all three strata")
def crit2():
    t0 = time.perf_counter()
    b = brute("p2-11", POINTES, 0)
    f = formula("p2-11", POINTES)
    assert b == f, f"brute {b} vs formula {f}"
    norms = sorted(int(1 / k.norm()) for k in b)
    assert norms == [1, 11, 121], norms
    comp = brute("p2-11", COMPOSANTES, 0)
    assert comp == formula("p2-11", COMPOSANTES)
    tres = [v for k, v in comp.items() if k == (P11 ** 2).inverse()]
    assert tres == [1], comp
    dt = time.perf_counter() - t0
    assert dt < 60, f"took {dt:.2f}s"
    return (f"per-stratum counts {[b[k] for k in sorted(b, key=lambda k: k.norm(), reverse=True)]}, "
            f"b' = p^-2 in one composante, {dt:.2f}s")


def f169_unit_image_order():
    """Order of <-1, eps0> in F_169^x by discrete logs to a generator."""
    p = 13

    def mul(x, y):
        a, b = x
        c, d = y
        # w^2 = w + 1 with w = (1 + sqrt5)/2
        return ((a * c + b * d) % p, (a * d + b * c + b * d) % p)

    def power(x, k):
        r = (1, 0)
        while k:
            if k & 1:
                r = mul(r, x)
            x = mul(x, x)
            k >>= 1
        return r
    g = next(g for g in ((a, b) for a in range(p) for b in range(1, p))
             if all(power(g, 168 // q) != (1, 0) for q in (2, 3, 7)))
    logs, x = {}, (1, 0)
    for k in range(168):
        logs[x] = k
        x = mul(x, g)
    return 168 // math.gcd(168, logs[(0, 1)], logs[(p - 1, 0)])


@criterion(3, "Q(sqrt5), n = (13) inert: formula equals brute force; unramified count (13^2-1)/index")
def crit3():
    t0 = time.perf_counter()
    o = Ideal.unit(K5)
    b = brute("inert-13", POINTES, 0)
    f = formula("inert-13", POINTES)
    assert b == f, f"brute {b} vs formula {f}"
    assert sorted(int(1 / k.norm()) for k in b) == [1, 169]
    index = f169_unit_image_order()
    assert b[o] * index == 13 ** 2 - 1, (b[o], index)
    dt = time.perf_counter() - t0
    assert dt < 120, f"took {dt:.2f}s"
    return f"unramified {b[o]} = 168/{index}, ramified {sum(b.values()) - b[o]}, {dt:.2f}s"


@criterion(4, "brute-force counts do not depend on the local generator frame")
def crit4():
    checked = 0
    for name in ("rational-5", "p2-11", "inert-13"):
        for variant in (POINTES, COMPOSANTES):
            a, b = brute(name, variant, 0), brute(name, variant, 1)
            assert a == b, f"{name} {variant}: {a} vs {b}"
            checked += 1
    return f"{checked} configurations identical under frames 0 and 1"


@criterion(5, "fan at the infinity cusp of Q(sqrt5) is admissible and smooth")
def crit5():
    counts = []
    for n, flag in itertools.product((P11 ** 2, INERT13), (GM, RESGM)):
        cu = cusp_invariants(1, 0, LevelContext(K5, Ideal.unit(K5), n, flag))
        eta = fundamental_unit(K5) ** cu.unit_data.o_C.multiplier_exponent()
        runs = [build_admissible_fan(cu.X, eta, HULL_SMOOTH) for _ in range(2)]
        for fan in runs:
            rep = check_admissible(fan)
            assert rep.complete and rep.unit_stable and rep.finite_orbits and rep.smooth, rep.problems
            assert all(abs(c.det) == 1 for c in fan.cones)
        assert [c.rays for c in runs[0].cones] == [c.rays for c in runs[1].cones]
        assert runs[0].orbit_count() == runs[1].orbit_count() == len(runs[0].cones)
        counts.append(runs[0].orbit_count())
    return f"orbit counts {counts} over (p^2, inert) x (Gm, ResGm), stable across runs"


def box_dual_hilbert_basis(v1, v2):
    def inside(m):
        return m != (0, 0) and m[0] * v1[0] + m[1] * v1[1] >= 0 and m[0] * v2[0] + m[1] * v2[1] >= 0
    R = 2 * max(abs(x) for x in v1 + v2) + 2
    pts = [m for m in itertools.product(range(-R, R + 1), repeat=2) if inside(m)]
    pset = set(pts)
    return {m for m in pts if not any((m[0] - a[0], m[1] - a[1]) in pset for a in pts if a != m)}


@criterion(6, "Hilbert bases of 25 random cones equal the box-enumeration oracle")
def crit6():
    rng = random.Random(20240601)
    done = 0
    while done < 25:
        v1 = (rng.randint(-12, 12), rng.randint(-12, 12))
        v2 = (rng.randint(-12, 12), rng.randint(-12, 12))
        if det2(v1, v2) == 0:
            continue
        got = set(hilbert_basis(Cone2((v1, v2))))
        want = box_dual_hilbert_basis(v1, v2)
        assert got == want, f"cone {v1}, {v2}: {sorted(got)} vs {sorted(want)}"
        done += 1
    return "25/25 cones agree"


@criterion(7, "Mumford generators over Q with [phi] = 1 and star {-1, 0, 1}")
def crit7():
    Z = Ideal.unit(QQ)
    star = [QQ.coerce(x) for x in (-1, 0, 1)]
    gens = mumford_generators(QQ.one, Z, Z, star, 10)
    table = {(int(g.beta.a), int(g.alpha.a)): (int(g.q_exponent.a), int(g.character.a)) for g in gens}
    direct = {(b, a): ((b + a) * b, 2 * b + a) for b in range(-10, 11) for a in (-1, 0, 1)}
    assert table == direct
    assert polarization_check(QQ.one, Z)
    assert all(g.q_exponent.a > 0 for g in gens if g.beta and not g.alpha)
    certs = [integrality_scale(a, QQ.one, 10) for a in star]
    assert all(n == 1 and c["certified"] == "box-certified" for n, c in certs), certs
    return f"{len(table)} generators match, positivity holds, integrality scale 1 (box-certified)"


@criterion(8, "ramified q-expansions: the zeta twist vanishes up to trace 50")
def crit8():
    out = []
    for n in (P11 ** 2, INERT13):
        cu = cusp_invariants(1, K5.sqrt_d, LevelContext(K5, Ideal.unit(K5), n, GM))
        assert cu.ramified and cu.b_prime == cu.ctx.n_ideal.inverse()
        basis = cu.X.basis_elements()
        pts = enumerate_totally_positive(basis, 50)
        for u, eps in cu.unit_data.o_C.generator_pairs():
            xs = solve_xi_star(u, eps, cu).xi0
            # xi -> n Tr(xi u xi*) is linear, so integer values on the basis give every point
            form = [cu.n * (e * u * xs).trace() for e in basis]
            assert all(t.denominator == 1 for t in form)
            bad = [v for v in pts if sum(a * t for a, t in zip(v, form)) % cu.n]
            assert not bad, f"nonzero twist at {bad[:3]}"
            # direct evaluation on a sample of points, as a second route
            for v in pts[:: max(1, len(pts) // 500)]:
                xi = v[0] * basis[0] + v[1] * basis[1]
                assert (cu.n * (xi * u * xs).trace()) % cu.n == 0
        out.append(f"n={cu.n}: {len(pts)} points")
    return ", ".join(out)


@criterion(9, "Koecher divergence for xi0 = 1 - sqrt5 at M = 10^6")
def crit9():
    s = K5.sqrt_d
    xi0, xs = 1 - s, s / 10
    assert (xi0 * xs).trace() < 0
    r = koecher_divergence(xi0, xs, 10 ** 6)
    assert r.k <= 40, r.k
    assert r.trace < -10 ** 6
    assert all(a > b for a, b in zip(r.traces, r.traces[1:])), r.traces
    return f"k = {r.k}, trace {r.trace}"


@criterion(10, "boundary over Q at level 5: records (1,1,1), (1,1,1), (5,2,2)")
def crit10():
    recs = boundary_components(config("rational-5"))
    rows = [(r["n"], len(r["H_C"]), r["points"]) for r in recs]
    assert rows == [(1, 1, 1), (1, 1, 1), (5, 2, 2)], rows
    return f"{rows}"


@pytest.mark.parametrize("num", sorted(CRITERIA))
def test_criterion(num, capsys):
    ok, line = run_one(num)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run_one(num) for num in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
