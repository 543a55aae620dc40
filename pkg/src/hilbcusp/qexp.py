"""q-expansions at a cusp: the twisted relations, Koecher and the boundary.

A coefficient family (a_xi) indexed by xi in X_+ u {0}, X = c b b', satisfies

    a_{u^2 eps xi} = eps^{k/2} u^k zeta^{n Tr(xi u xi*_{u,eps})} a_xi

for (u, eps) in o^x_C, where xi*_{u,eps} solves the congruences attached to the
uniformizing matrix gamma and zeta has order n. For a field element u and weight
k = (k1, k2) we write u^k = u^k1 * conj(u)^k2, an element of F.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .cusps import (COMPOSANTES, CuspModule, CuspRecord, LevelContext, coset_representatives,
                    cusp_count_formula)
from .errors import (InvalidArgumentError, LatticeViolationError, NoSolutionError,
                     ResourceLimitError, UnsupportedConfigurationError)
from .field import FieldElement, NumberField
from .ideals import Ideal
from .lattice import integer_kernel
from .units import RESGM, cusp_unit_data, exponents_to_pair, fundamental_unit


def _gauss_reduce(e1: FieldElement, e2: FieldElement):
    """Lagrange reduction for the form Tr(x^2); returns (f1, f2, M) with f = M e."""
    M = [[1, 0], [0, 1]]

    def q(x):
        return (x * x).trace()
    while True:
        if q(e2) < q(e1):
            e1, e2 = e2, e1
            M = [M[1], M[0]]
        m = round((e1 * e2).trace() / q(e1))
        if m == 0:
            return e1, e2, M
        e2 = e2 - m * e1
        M[1] = [M[1][0] - m * M[0][0], M[1][1] - m * M[0][1]]


def enumerate_totally_positive(basis, bound) -> list[tuple[int, ...]]:
    """Integer coordinates v with xi = sum v_i e_i totally positive and Tr(xi) <= bound."""
    K = basis[0].field
    bound = Fraction(bound)
    if K.degree == 1:
        e = basis[0].a
        step = abs(e)
        top = math.floor(bound / step)
        sgn = 1 if e > 0 else -1
        return [(sgn * m,) for m in range(1, top + 1)]
    f1, f2, M = _gauss_reduce(*basis)
    s1, s2 = f1.embeddings(), f2.embeddings()
    # the region is the triangle 0 < sigma_i, sigma_1 + sigma_2 <= bound; w = coords in (f1, f2)
    det = s1[0] * s2[1] - s1[1] * s2[0]
    # exact test on integers: L xi = A + B sqrt(D)
    L = math.lcm(*[x.denominator for e in (f1, f2) for x in (e.a, e.b)], bound.denominator)
    ia = [int(f1.a * L), int(f2.a * L)]
    ib = [int(f1.b * L), int(f2.b * L)]
    top = bound * L
    corners = [(0.0, 0.0), (float(bound), 0.0), (0.0, float(bound))]
    w1s = [(x * s2[1] - y * s2[0]) / det for x, y in corners]
    out = []
    for w1 in range(math.floor(min(w1s)) - 1, math.ceil(max(w1s)) + 2):
        lo, hi = -math.inf, math.inf
        # sigma_i = w1 s1[i] + w2 s2[i] > 0 and sum <= bound
        for c, rhs, sense in ((s2[0], -w1 * s1[0], 1), (s2[1], -w1 * s1[1], 1),
                              (s2[0] + s2[1], float(bound) - w1 * (s1[0] + s1[1]), -1)):
            if c == 0:
                continue
            r = rhs / c
            if (c > 0) == (sense > 0):
                lo = max(lo, r)
            else:
                hi = min(hi, r)
        if lo > hi + 1:
            continue
        for w2 in range(math.floor(lo) - 1, math.ceil(hi) + 2):
            A = w1 * ia[0] + w2 * ia[1]
            B = w1 * ib[0] + w2 * ib[1]
            if A > 0 and A * A > B * B * K.D and 2 * A <= top:
                # back to the given basis: f = M e
                out.append((w1 * M[0][0] + w2 * M[1][0], w1 * M[0][1] + w2 * M[1][1]))
    return sorted(out)


def weight_power(u: FieldElement, weight) -> FieldElement:
    """u^k = u^k1 conj(u)^k2 (u^k in degree one)."""
    weight = tuple(weight)
    if u.field.degree == 1:
        return u ** weight[0]
    k1, k2 = weight
    return u ** k1 * u.conjugate() ** k2


def _unit_log(eps: FieldElement) -> int:
    e0 = fundamental_unit(eps.field)
    m = round(math.log(abs(eps.embeddings()[0])) / math.log(e0.embeddings()[0]))
    if e0 ** m != eps and -(e0 ** m) != eps:
        raise InvalidArgumentError("element is not a unit")
    return m


def half_weight_factor(eps: FieldElement, weight) -> FieldElement:
    """eps^(k/2) with positive square roots in each real embedding.

    Defined for parallel weight (where it equals N(eps)^(k/2) = 1) or when eps is
    a square of a unit.
    """
    weight = tuple(weight)
    K = eps.field
    if eps == 1:
        return K.one
    if not eps.is_totally_positive():
        raise InvalidArgumentError("eps must be totally positive")
    if K.degree == 1 or len(set(weight)) == 1:
        return K.one
    m = _unit_log(eps)
    if m % 2:
        raise UnsupportedConfigurationError("eps^(k/2) needs parallel weight or a square unit eps")
    h = fundamental_unit(K) ** (m // 2)
    s = h.conjugate().sign()
    k1, k2 = weight
    return h ** k1 * (s * h.conjugate()) ** k2


@dataclass(frozen=True)
class XiStarSolution:
    xi0: FieldElement
    X_star: Ideal


def solve_xi_star(u: FieldElement, eps: FieldElement, cusp: CuspRecord) -> XiStarSolution:
    """The coset xi*_{u,eps} + X* of solutions in (c b^2)* of the uniformizing congruences."""
    ctx = cusp.ctx
    K = ctx.field
    u, eps = K.coerce(u), K.coerce(eps)
    if not cusp.unit_data.contains_pair(u, eps):
        raise NoSolutionError("(u, eps) is not in the unit group of the cusp")
    (_, _), (c, d) = cusp.gamma
    b = cusp.b
    if not (ctx.n_ideal * b * ctx.c * ctx.different).contains((u * eps - 1) * c):
        raise NoSolutionError("first congruence fails")
    Kc = (ctx.c * b * b).dual()
    X_star = cusp.X.dual()
    if not c:
        if not (ctx.n_ideal * b.inverse()).contains((u - 1) * d):
            raise NoSolutionError("no solution for c = 0")
        return XiStarSolution(K.zero, Kc)
    J = ctx.n_ideal * b.inverse() * c.inverse()
    t0 = eps * (u - 1) * d / c
    if not (Kc & J) == X_star:
        raise AssertionError("solution lattice differs from (c b b')*")
    for k in coset_representatives(Kc, X_star, 10 ** 6):
        if J.contains(k - t0):
            xi0 = k
            break
    else:
        raise NoSolutionError("the congruences have no solution in (c b^2)*")
    # a posteriori checks
    if not (ctx.n_ideal * b.inverse()).contains((u - 1) * d - eps.inverse() * xi0 * c):
        raise AssertionError("solution fails the second congruence")
    # the refined containment uses u - 1 in b b'^-1, which needs eps = 1
    bp = cusp.b_prime
    hull = X_star + (Kc & (ctx.n_ideal * ctx.c * bp * bp).dual())
    if eps == 1 and not hull.contains(xi0):
        raise AssertionError("solution outside (cbb')* + (cb^2)* n (ncb'^2)*")
    return XiStarSolution(xi0, X_star)


def zeta_exponent(xi: FieldElement, u: FieldElement, xi_star: FieldElement, n: int) -> int:
    """n Tr(xi u xi*) modulo n."""
    t = n * (xi * u * xi_star).trace()
    if t.denominator != 1:
        raise AssertionError("n Tr(xi u xi*) is not integral")
    return int(t) % n if n > 1 else 0


@dataclass
class OrbitRecord:
    rep: tuple
    members: list  # (coords, k) with member = eta^k rep
    relations: list  # dicts: generator, target, scalar, zeta
    stabilizer_twists: list
    forced_zero_unless: bool


@dataclass
class QExpDescriptor:
    cusp: CuspRecord
    weight: tuple
    bound: Fraction
    n: int
    basis: tuple
    eta: FieldElement
    orbits: list
    constant_term: dict
    generators: list = dc_field(default_factory=list)

    def point_count(self) -> int:
        return sum(len(o.members) for o in self.orbits)


def _check_weight(weight, K: NumberField):
    weight = tuple(int(k) for k in (weight if isinstance(weight, (tuple, list)) else (weight,)))
    if len(weight) == 1 and K.degree == 2:
        weight = weight * 2
    if len(weight) != K.degree:
        raise InvalidArgumentError("weight must have one entry per real embedding")
    return weight


def _coords_in(basis, e: FieldElement) -> tuple[int, ...]:
    from .fans import solve_coords
    c = solve_coords(basis, e)
    if any(x.denominator != 1 for x in c):
        raise LatticeViolationError("element is not in the lattice")
    return tuple(int(x) for x in c)


def qexp_descriptor(cusp: CuspRecord, weight, bound) -> QExpDescriptor:
    """Orbit representatives of X_+ under u^2 eps and the twisted coefficient relations."""
    ctx = cusp.ctx
    K = ctx.field
    weight = _check_weight(weight, K)
    parallel = len(set(weight)) == 1
    if ctx.D_flag == RESGM and not parallel:
        # only allowed when every torus factor of the generators is a square
        for _, eps in cusp.unit_data.o_C.generator_pairs():
            half_weight_factor(eps, weight)
    n = cusp.n
    basis = tuple(cusp.X.basis_elements())
    o_C = cusp.unit_data.o_C
    gens = o_C.generator_pairs()
    g = o_C.multiplier_exponent()
    eta = fundamental_unit(K) ** g if K.degree == 2 else K.one
    solutions = [solve_xi_star(u, e, cusp).xi0 for u, e in gens]

    pts = enumerate_totally_positive(basis, bound)
    # traces scaled to integers; only their order matters
    tr = [e.trace() for e in basis]
    scale = math.lcm(*[t.denominator for t in tr])
    tr = [int(t * scale) for t in tr]

    def trace(v):
        return sum(a * t for a, t in zip(v, tr))

    def linmap(x):
        # integer matrix of multiplication by x, rows are images of basis vectors
        return [_coords_in(basis, x * e) for e in basis]

    def apply(A, v):
        return tuple(sum(v[i] * A[i][j] for i in range(len(v))) for j in range(len(v)))

    def zeta_form(u, xs):
        # xi -> n Tr(xi u xs) is linear in the coordinates of xi
        vals = [n * (e * u * xs).trace() for e in basis]
        if any(t.denominator != 1 for t in vals):
            raise AssertionError("n Tr(xi u xi*) is not integral")
        return [int(t) for t in vals]

    def zeta(form, v):
        return sum(a * t for a, t in zip(v, form)) % n if n > 1 else 0

    mats = {1: linmap(eta), -1: linmap(eta.inverse())}
    reps: dict[tuple, list] = {}
    for v in pts:
        w, k = v, 0
        if g:
            while True:
                moved = False
                for p in (1, -1):
                    cand = apply(mats[p], w)
                    if (trace(cand), cand) < (trace(w), w):
                        w, k, moved = cand, k - p, True
                        break
                if not moved:
                    break
        reps.setdefault(w, []).append((v, k))

    gen_data = []
    for (u, e), xs in zip(gens, solutions):
        scalar = half_weight_factor(e, weight) * weight_power(u, weight)
        gen_data.append(((u, e), scalar, zeta_form(u, xs), linmap(u * u * e)))

    stab = []
    if o_C.relations and K.degree == 2:
        from .units import _multiplier_value
        vals = [_multiplier_value(K, r) for r in o_C.relations]
        for vec in integer_kernel(list(o_C.relations), vals):
            pair = exponents_to_pair(K, vec)
            if pair != (K.one, K.one):
                stab.append(pair)
    elif K.degree == 1:
        stab = [p for p in gens if p != (K.one, K.one)]
    stab_data = []
    for u, e in stab:
        scalar = half_weight_factor(e, weight) * weight_power(u, weight)
        stab_data.append(((u, e), scalar, zeta_form(u, solve_xi_star(u, e, cusp).xi0)))

    orbits = []
    for rep in sorted(reps, key=lambda v: (trace(v), v)):
        rels = [{"generator": pair, "target": apply(T, rep), "scalar": scalar, "zeta": zeta(form, rep)}
                for pair, scalar, form, T in gen_data]
        st = [{"generator": pair, "scalar": scalar, "zeta": zeta(form, rep)}
              for pair, scalar, form in stab_data]
        forced = any(r["scalar"] != 1 or r["zeta"] != 0 for r in st)
        members = sorted(reps[rep], key=lambda t: t[1])
        orbits.append(OrbitRecord(rep=rep, members=members, relations=rels,
                                  stabilizer_twists=st, forced_zero_unless=forced))
    const = constant_term_constraint(cusp, weight)
    return QExpDescriptor(cusp=cusp, weight=weight, bound=Fraction(bound), n=n, basis=basis,
                          eta=eta, orbits=orbits, constant_term=const, generators=gens)


def constant_term_constraint(cusp: CuspRecord, weight) -> dict:
    """Scalars eps^(k/2) u^k - 1 over generators of o^x_C; a_0 is forced to vanish
    unless every scalar is zero."""
    K = cusp.ctx.field
    weight = _check_weight(weight, K)
    rows = []
    for u, e in cusp.unit_data.o_C.generator_pairs():
        s = half_weight_factor(e, weight) * weight_power(u, weight) - 1
        rows.append({"generator": (u, e), "scalar": s})
    return {"scalars": rows, "forced_zero_unless": any(r["scalar"] != 0 for r in rows)}


@dataclass
class TruncatedQSeries:
    """Finite sum of c_xi zeta^e_xi q^xi; zeta is a primitive root of order zeta_order."""

    terms: dict  # FieldElement -> (coefficient, zeta exponent)
    zeta_order: int = 1


def uniformization_twist(series: TruncatedQSeries, x: FieldElement, a: Ideal, b: Ideal,
                         b_prime: Ideal) -> TruncatedQSeries:
    """q^xi -> zeta^{n Tr(xi x)} q^xi for x in (ab)*, exponents in a b', n = exp(b'/b)."""
    if not b.issubset(b_prime):
        raise LatticeViolationError("b must be contained in b'")
    n = (b / b_prime).exponent()
    if series.zeta_order not in (1, n) and n % series.zeta_order:
        raise InvalidArgumentError("zeta order incompatible with b'/b")
    scale = n // series.zeta_order if series.zeta_order > 1 else n
    if not (a * b).dual().contains(x):
        raise LatticeViolationError("x must lie in (ab)*")
    lat = a * b_prime
    out = {}
    for xi, (coeff, e) in series.terms.items():
        if not lat.contains(xi):
            raise LatticeViolationError("series exponent outside a b'")
        t = n * (xi * x).trace()
        if t.denominator != 1:
            raise AssertionError("twist exponent is not integral")
        out[xi] = (coeff, (e * scale + int(t)) % n if n > 1 else 0)
    return TruncatedQSeries(out, n)


@dataclass(frozen=True)
class KoecherResult:
    k: int
    trace: Fraction
    multiplier: FieldElement
    traces: tuple


def koecher_divergence(xi0: FieldElement, xi0_star: FieldElement, M, unit: FieldElement | None = None,
                       max_k: int = 10_000) -> KoecherResult:
    """Least k >= 0 with Tr(eta^k xi0 xi0*) < -M, eta = unit^(+-2) chosen to blow up
    an embedding where xi0 xi0* is negative."""
    K = xi0.field
    if K.degree != 2:
        raise UnsupportedConfigurationError("the Koecher phenomenon needs a real quadratic field")
    if xi0.is_totally_positive() or not xi0:
        raise InvalidArgumentError("xi0 must lie outside the totally positive cone")
    if not xi0_star:
        raise InvalidArgumentError("xi0* must be nonzero")
    if (xi0 * xi0_star).trace() >= 0:
        raise InvalidArgumentError("Tr(xi0 xi0*) must be negative")
    unit = fundamental_unit(K) if unit is None else K.coerce(unit)
    base = xi0 * xi0_star
    # expand a negative embedding; when both are negative take the faster direction
    cands = []
    for eta in (unit * unit, (unit * unit).inverse()):
        i = 0 if (eta - 1).sign(0) > 0 else 1
        if base.sign(i) < 0:
            cands.append(((eta * base).trace(), eta))
    eta = min(cands, key=lambda t: t[0])[1]
    bound = -Fraction(M)
    traces = []
    val = base
    for k in range(max_k + 1):
        t = val.trace()
        traces.append(t)
        if t < bound:
            return KoecherResult(k, t, eta, tuple(traces))
        val = val * eta
    raise ResourceLimitError("trace did not pass the bound within max_k steps")


def boundary_components(ctx: LevelContext, bs=None, budget: int | None = None) -> list[dict]:
    """One record per (R, n)-composante: n, H_C and the point count phi(n)/|H_C|."""
    bs = [ctx.o] if bs is None else list(bs)
    out = []
    cache = {}
    for b in bs:
        module = CuspModule(ctx, b, budget=budget)
        orbits = module.orbits(COMPOSANTES)
        for orbit in orbits:
            rep = int(orbit.min())
            bp = module.b_prime_by_r[rep // module.N]
            f = b / bp
            if f not in cache:
                cache[f] = cusp_unit_data(f, ctx.n_ideal, ctx.D_flag)
            ud = cache[f]
            phi = sum(1 for a in range(1, ud.n + 1) if math.gcd(a, ud.n) == 1) if ud.n > 1 else 1
            if phi % len(ud.H_C):
                raise AssertionError("|H_C| does not divide phi(n)")
            out.append({"b": b, "b_prime": bp, "f": f, "n": ud.n, "H_C": ud.H_C,
                        "points": phi // len(ud.H_C), "closed_point": ud.n == 1,
                        "representative": module.lift(rep), "orbit_size": len(orbit)})
        expected = cusp_count_formula(b, ctx, COMPOSANTES)
        got: dict = {}
        for r in out:
            if r["b"] == b:
                got[r["b_prime"]] = got.get(r["b_prime"], 0) + 1
        if {k: v for k, v in expected.items() if v} != got:
            raise AssertionError("composante enumeration disagrees with the count formula")
    out.sort(key=lambda r: (r["n"], r["b_prime"].sort_key(), r["orbit_size"]))
    for i, r in enumerate(out):
        r["component_id"] = i
    return out
