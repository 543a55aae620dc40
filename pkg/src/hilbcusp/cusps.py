"""Cusps of Hilbert modular varieties for Gamma_1(c, n): invariants, counts, orbits.

The brute-force side works in n^-1 L / L with L = b + a*, a = bc, identified with
(o/n)^2 through local generators g_b, g_a. A level vector (x, y) is acted on by

    (x, y) -> (u eps x, xi* x + u^-1 y)

for units (u, eps) and xi* in (c b^2)*, and for composantes also by x -> a x with
a in (Z/n)^x. Orbits of primitive vectors are bucketed by b' = b + o x.
"""
from __future__ import annotations

import itertools
import math
import os
from collections import deque
from dataclasses import dataclass, field as dc_field
from functools import cached_property

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .errors import InvalidArgumentError, LatticeViolationError, ResourceLimitError
from .field import FieldElement, NumberField
from .ideals import Ideal, ResidueRing
from .units import GM, RESGM, CuspUnitData, cusp_unit_data, fundamental_unit, totally_positive_unit

POINTES = "pointes"
COMPOSANTES = "composantes"
BUDGET_ENV = "HILBCUSP_BUDGET"
DEFAULT_BUDGET = 1_000_000


def enumeration_budget(budget: int | None = None) -> int:
    if budget is not None:
        return int(budget)
    env = os.environ.get(BUDGET_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise InvalidArgumentError(f"{BUDGET_ENV} must be an integer, got {env!r}") from None
    return DEFAULT_BUDGET


@dataclass(frozen=True)
class LevelContext:
    """Field, polarization ideal c, level n and the torus variant (Gm or ResGm)."""

    field: NumberField
    c: Ideal
    n_ideal: Ideal
    D_flag: str = GM

    def __post_init__(self):
        K = self.field
        if self.D_flag not in (GM, RESGM):
            raise InvalidArgumentError(f"D_flag must be {GM} or {RESGM}, got {self.D_flag!r}")
        if self.c.field != K or self.n_ideal.field != K:
            raise InvalidArgumentError("ideals must belong to the given field")
        if not self.n_ideal.is_integral():
            raise InvalidArgumentError("the level must be an integral ideal")
        if not self.n_ideal.is_coprime_to(Ideal.different(K)):
            raise InvalidArgumentError("the level must be prime to the discriminant")
        for q in (2, 3):
            if self.n_ideal.contains(K(q)):
                raise InvalidArgumentError(f"the level must not divide {q}")

    @cached_property
    def different(self) -> Ideal:
        return Ideal.different(self.field)

    @cached_property
    def c_dual(self) -> Ideal:
        return self.c.dual()

    @cached_property
    def factorization(self):
        return self.n_ideal.factor()

    @property
    def o(self) -> Ideal:
        return Ideal.unit(self.field)


def _sum_ideal(field, terms) -> Ideal:
    gens = []
    for coeff, ideal in terms:
        if coeff:
            gens.extend(coeff * e for e in ideal.basis_elements())
    if not gens:
        raise InvalidArgumentError("the cusp (0:0) is not a point of P^1")
    return Ideal.from_zspan(field, gens)


def gamma_membership(gamma, ctx: LevelContext) -> bool:
    """Membership in Gamma_1^D(c, n): entries in (o, c*; c d n, o), d = 1 mod n, det in D."""
    K = ctx.field
    (a, b), (c, d) = [[K.coerce(x) for x in row] for row in gamma]
    o = ctx.o
    if not (o.contains(a) and ctx.c_dual.contains(b) and o.contains(d)):
        return False
    if not (ctx.c * ctx.different * ctx.n_ideal).contains(c):
        return False
    if not ctx.n_ideal.contains(d - 1):
        return False
    det = a * d - b * c
    if ctx.D_flag == GM or K.degree == 1:
        return det == 1
    return det.is_integral() and abs(det.norm()) == 1 and det.is_totally_positive()


def _ordered_vectors(dim: int, bound: int):
    for m in range(bound + 1):
        for coeffs in itertools.product(range(-m, m + 1), repeat=dim):
            if max(abs(v) for v in coeffs) == m:
                yield coeffs


def _small_elements(ideal: Ideal, bound: int = 12):
    basis = ideal.basis_elements()
    for coeffs in _ordered_vectors(len(basis), bound):
        if any(coeffs):
            yield sum((c * e for c, e in zip(coeffs, basis)), ideal.field.zero)


def local_generator(outer: Ideal, inner: Ideal, choice: int = 0, bound: int = 12) -> FieldElement:
    """The choice-th small g in outer with g o + inner = outer (outer/inner cyclic)."""
    seen = 0
    for g in _small_elements(outer, bound):
        if Ideal.generated_by(outer.field, [g]) + inner == outer:
            if seen == choice:
                return g
            seen += 1
    raise ResourceLimitError("no local generator found within the search bound")


def coset_representatives(outer: Ideal, inner: Ideal, limit: int):
    """Elements of outer representing outer/inner (inner contained in outer)."""
    if not inner.issubset(outer):
        raise LatticeViolationError("inner lattice is not contained in the outer one")
    from .lattice import hnf
    basis = outer.basis_elements()
    rows = [[int(v) for v in outer.coordinates(e)] for e in inner.basis_elements()]
    H = hnf(rows, len(basis))
    size = math.prod(H[i][i] for i in range(len(H)))
    if size > limit:
        raise ResourceLimitError(f"quotient of size {size} exceeds the search limit {limit}")
    for coeffs in itertools.product(*[range(H[i][i]) for i in range(len(H))]):
        yield sum((c * e for c, e in zip(coeffs, basis)), outer.field.zero)


def split_one(A: Ideal, C: Ideal, limit: int = 200_000) -> FieldElement:
    """alpha in A with 1 - alpha in C, assuming A + C contains 1."""
    K = A.field
    if not (A + C).contains(K.one):
        raise InvalidArgumentError("1 is not in A + C")
    for alpha in coset_representatives(A, A & C, limit):
        if C.contains(1 - alpha):
            return alpha
    raise AssertionError("no decomposition of 1 found")


@dataclass(frozen=True)
class CuspRecord:
    ctx: LevelContext
    point: tuple  # (a, c) in P^1(F)
    gamma: tuple  # ((a, b), (c, d)), det 1, in (b, (bc)*; bcd, b^-1)
    b: Ideal
    b_prime: Ideal
    f: Ideal
    X: Ideal
    ramified: bool
    unit_data: CuspUnitData
    vector: tuple  # lifts (x, y) of the level vector in n^-1 b x n^-1 a*
    extra: dict = dc_field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return self.unit_data.n

    def summary(self) -> dict:
        return {"b": self.b, "b_prime": self.b_prime, "f": self.f, "X": self.X,
                "ramified": self.ramified, "n": self.n, "units": self.unit_data.summary()}


def complete_gamma(a: FieldElement, c: FieldElement, b: Ideal, ctx: LevelContext):
    """A det-1 matrix ((a, b_e), (c, d)) with b_e in (bc)*, d in b^-1."""
    K = ctx.field
    bc_dual = (b * ctx.c).dual()
    if not c:
        return ((a, K.zero), (c, a.inverse()))
    if not a:
        return ((a, -c.inverse()), (c, K.zero))
    A = b.inverse() * a
    C = bc_dual * c
    alpha = split_one(A, C)
    d = alpha / a
    b_e = -(1 - alpha) / c
    return ((a, b_e), (c, d))


def cusp_invariants(a, c, ctx: LevelContext) -> CuspRecord:
    """Invariants of the cusp (a : c): b, b', ramification, X = c b b', unit data."""
    K = ctx.field
    a, c = K.coerce(a), K.coerce(c)
    b = _sum_ideal(K, [(a, ctx.o), (c, ctx.c_dual)])
    b_prime = _sum_ideal(K, [(a, ctx.o), (c, (ctx.c * ctx.n_ideal).dual())])
    f = b / b_prime
    if not f.is_integral() or not f.divides(ctx.n_ideal):
        raise AssertionError("b b'^-1 is not an integral divisor of the level")
    ramified = not (ctx.n_ideal * b * ctx.c * ctx.different).contains(c)
    gamma = complete_gamma(a, c, b, ctx)
    ud = cusp_unit_data(f, ctx.n_ideal, ctx.D_flag)
    # level vector (c y0 t, d y0 t) with o = n + y0 c and t generating n^-1 d^-1 / d^-1
    dinv = ctx.different.inverse()
    t = local_generator(ctx.n_ideal.inverse() * dinv, dinv)
    y0 = None
    for cand in _small_elements(ctx.c.inverse(), 30):
        if (ctx.c * cand + ctx.n_ideal).is_unit_ideal():
            y0 = cand
            break
    if y0 is None:
        raise ResourceLimitError("no y0 with o = n + y0 c found")
    d = gamma[1][1]
    vector = (c * y0 * t, d * y0 * t)
    return CuspRecord(ctx=ctx, point=(a, c), gamma=gamma, b=b, b_prime=b_prime, f=f,
                      X=ctx.c * b * b_prime, ramified=ramified, unit_data=ud, vector=vector)


def _cyclic_generators(n: int) -> list[int]:
    """A small generating set of (Z/n)^x."""
    if n <= 2:
        return []
    units = [a for a in range(1, n) if math.gcd(a, n) == 1]
    gens: list[int] = []
    group = {1}
    for a in units:
        if a in group:
            continue
        gens.append(a)
        frontier = deque(group)
        group = set(group)
        while frontier:
            h = frontier.popleft()
            for g in gens:
                h2 = h * g % n
                if h2 not in group:
                    group.add(h2)
                    frontier.append(h2)
        if len(group) == len(units):
            break
    return gens


class CuspModule:
    """n^-1 L / L for L = b + (bc)*, with the unit, shear and (Z/n)^x actions."""

    def __init__(self, ctx: LevelContext, b: Ideal, frame: int = 0, budget: int | None = None):
        self.ctx = ctx
        self.b = b
        self.field = ctx.field
        self.ring = R = ResidueRing(ctx.n_ideal)
        self.N = R.size
        limit = enumeration_budget(budget)
        if self.N * self.N > limit:
            raise ResourceLimitError(f"{self.N ** 2} level vectors exceed the budget {limit}")
        self.a = b * ctx.c
        self.a_dual = self.a.dual()
        ninv = ctx.n_ideal.inverse()
        self.g_b = local_generator(ninv * b, b, frame)
        self.g_a = local_generator(ninv * self.a_dual, self.a_dual, frame)
        self.frame = frame

    # labels

    def label(self, x: FieldElement, y: FieldElement) -> int:
        """Label of the class of (x, y) in n^-1 L / L."""
        ninv = self.ctx.n_ideal.inverse()
        if not (ninv * self.b).contains(x) or not (ninv * self.a_dual).contains(y):
            raise LatticeViolationError("vector is not in n^-1 L")
        r = self.ring.index(x / self.g_b)
        s = self.ring.index(y / self.g_a)
        return r * self.N + s

    def lift(self, label: int) -> tuple[FieldElement, FieldElement]:
        r, s = divmod(int(label), self.N)
        return self.ring.element(r) * self.g_b, self.ring.element(s) * self.g_a

    @cached_property
    def primitive_mask(self) -> np.ndarray:
        N = self.N
        ok = np.ones(N * N, dtype=bool)
        r = np.repeat(np.arange(N), N)
        s = np.tile(np.arange(N), N)
        for m in self.ring.prime_masks():
            ok &= ~(m[r] & m[s])
        return ok

    @cached_property
    def b_prime_by_r(self) -> list[Ideal]:
        out = []
        for r in range(self.N):
            x = self.ring.element(r) * self.g_b
            out.append(self.b if not x else self.b + Ideal.generated_by(self.field, [x]))
        return out

    @cached_property
    def _add(self) -> np.ndarray:
        return self.ring.add_table()

    # group generators

    def unit_generators(self) -> list[tuple[FieldElement, FieldElement]]:
        K = self.field
        gens = [(K(-1), K.one)]
        if K.degree == 2:
            gens.append((fundamental_unit(K), K.one))
            if self.ctx.D_flag == RESGM:
                gens.append((K.one, totally_positive_unit(K)))
        return gens

    def shear_generators(self) -> list[FieldElement]:
        return (self.ctx.c * self.b * self.b).dual().basis_elements()

    def shear_multiplier(self, xi: FieldElement) -> int:
        # xi x for x = r g_b is (r lam) g_a with lam = xi g_b / g_a, integral at n
        return self.ring.index(xi * self.g_b / self.g_a)

    def moves(self, variant: str) -> list[tuple[str, object, np.ndarray]]:
        """Generator index maps on labels, tagged for witness reconstruction."""
        if variant not in (POINTES, COMPOSANTES):
            raise InvalidArgumentError(f"variant must be {POINTES} or {COMPOSANTES}")
        N = self.N
        R = self.ring
        r = np.repeat(np.arange(N), N)
        s = np.tile(np.arange(N), N)
        out = []
        for i, (u, eps) in enumerate(self.unit_generators()):
            mr = R.mul_map(u * eps)
            ms = R.mul_map(u.inverse())
            out.append(("unit", i, mr[r] * N + ms[s]))
        for xi in self.shear_generators():
            lam = R.mul_map(R.element(self.shear_multiplier(xi)))
            out.append(("shear", xi, r * N + self._add[s, lam[r]]))
        if variant == COMPOSANTES:
            for a in _cyclic_generators(self.ctx.n_ideal.exponent()):
                mr = R.mul_map(self.field(a))
                out.append(("scalar", a, mr[r] * N + s))
        return out

    def orbit_labels(self, variant: str) -> tuple[np.ndarray, np.ndarray]:
        """(primitive label indices, orbit id per primitive label)."""
        size = self.N * self.N
        prim = self.primitive_mask
        rows, cols = [], []
        for _, _, m in self.moves(variant):
            rows.append(np.flatnonzero(prim))
            cols.append(m[prim])
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        if not prim[cols].all():
            raise AssertionError("group action does not preserve primitivity")
        graph = coo_matrix((np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(size, size)).tocsr()
        _, labels = connected_components(graph, directed=True, connection="weak")
        idx = np.flatnonzero(prim)
        return idx, labels[idx]

    def orbits(self, variant: str) -> list[np.ndarray]:
        idx, lab = self.orbit_labels(variant)
        order = np.argsort(lab, kind="stable")
        idx, lab = idx[order], lab[order]
        cuts = np.flatnonzero(np.diff(lab)) + 1
        groups = np.split(idx, cuts)
        groups.sort(key=lambda g: int(g.min()))
        return groups

    def counts(self, variant: str) -> dict[Ideal, int]:
        out: dict[Ideal, int] = {}
        for orbit in self.orbits(variant):
            bp = self.b_prime_by_r[int(orbit.min()) // self.N]
            out[bp] = out.get(bp, 0) + 1
        return dict(sorted(out.items(), key=lambda kv: kv[0].sort_key(), reverse=True))

    def orbit_search(self, start: int, target: int, variant: str, budget: int):
        """BFS from start; returns the list of moves reaching target, [] if equal, None if absent."""
        moves = self.moves(variant)
        parent = {start: None}
        queue = deque([start])
        while queue:
            h = queue.popleft()
            if h == target:
                path = []
                while parent[h] is not None:
                    h, mv = parent[h]
                    path.append(mv)
                return path[::-1]
            for mv in moves:
                h2 = int(mv[2][h])
                if h2 not in parent:
                    if len(parent) >= budget:
                        raise ResourceLimitError("orbit search budget exhausted")
                    parent[h2] = (h, mv)
                    queue.append(h2)
        return None


def enumerate_cusps_bruteforce(b: Ideal, ctx: LevelContext, variant: str = POINTES,
                               frame: int = 0, budget: int | None = None) -> dict[Ideal, int]:
    """Orbit counts of primitive level vectors, bucketed by b'."""
    return CuspModule(ctx, b, frame=frame, budget=budget).counts(variant)


def _totient(n: int) -> int:
    return sum(1 for a in range(1, n + 1) if math.gcd(a, n) == 1) if n > 1 else 1


def cusp_count_rows(b: Ideal, ctx: LevelContext, variant: str = POINTES) -> list[dict]:
    """Per-stratum data of the count formula, one row per divisor f of n (b' = f^-1 b)."""
    if variant not in (POINTES, COMPOSANTES):
        raise InvalidArgumentError(f"variant must be {POINTES} or {COMPOSANTES}")
    n_ideal = ctx.n_ideal
    rows = []
    for f in n_ideal.divisors():
        ud = cusp_unit_data(f, n_ideal, ctx.D_flag)
        num = f.euler_phi() * (n_ideal / f).euler_phi()
        if variant == POINTES:
            den = ud.index_full
        else:
            den = _totient(ud.n) * ud.index_bar
        if num % den:
            raise AssertionError(f"count formula is not integral: {num}/{den}")
        rows.append({"f": f, "b_prime": b / f, "n": ud.n, "numerator": num,
                     "denominator": den, "count": num // den, "unit_data": ud})
    return rows


def cusp_count_formula(b: Ideal, ctx: LevelContext, variant: str = POINTES) -> dict[Ideal, int]:
    rows = cusp_count_rows(b, ctx, variant)
    out = {r["b_prime"]: r["count"] for r in rows}
    return dict(sorted(out.items(), key=lambda kv: kv[0].sort_key(), reverse=True))


@dataclass(frozen=True)
class IsomorphismResult:
    status: str  # isomorphic / not-isomorphic / indeterminate
    witness: dict | None = None
    reason: str = ""

    @property
    def isomorphic(self) -> bool | None:
        return {"isomorphic": True, "not-isomorphic": False}.get(self.status)


def _compose(m1, m2):
    (a1, s1, d1), (a2, s2, d2) = m1, m2
    # upper triangular [[a, s], [0, d]] acting on row vectors; product m1 @ m2
    return (a1 * a2, a1 * s2 + s1 * d2, d1 * d2)


def component_isomorphic(c1: CuspRecord, c2: CuspRecord, budget: int = 200_000) -> IsomorphismResult:
    """Decides whether two cusps lie in isomorphic (R, n)-composantes.

    The witness records xi with b2 = xi^-1 b1 (transport), the torus part
    (u, eps), the scalar h in (Z/n)^x and the shear xi*.
    """
    if c1.ctx != c2.ctx:
        raise InvalidArgumentError("cusps must share the level context")
    ctx = c1.ctx
    K = ctx.field
    if c1.f != c2.f:
        return IsomorphismResult("not-isomorphic", reason="b b'^-1 invariants differ")
    if c1.b == c2.b:
        xi = K.one
    else:
        ratio = c1.b / c2.b
        xi = ratio.principal_generator()
        if xi is None:
            return IsomorphismResult("indeterminate", reason="no principal generator found for b1 b2^-1")
    module = CuspModule(ctx, c1.b, budget=max(budget, enumeration_budget()))
    x2, y2 = c2.vector
    start = module.label(*c1.vector)
    try:
        target = module.label(xi * x2, y2 / xi)
    except LatticeViolationError:
        return IsomorphismResult("indeterminate", reason="transported vector left the lattice")
    try:
        path = module.orbit_search(start, target, COMPOSANTES, budget)
    except ResourceLimitError:
        return IsomorphismResult("indeterminate", reason="search budget exhausted")
    if path is None:
        return IsomorphismResult("not-isomorphic", reason="target outside the orbit")
    gens = module.unit_generators()
    h = 1
    u, eps = K.one, K.one
    mat = (K.one, K.zero, K.one)
    for kind, data, _ in path:
        if kind == "unit":
            gu, ge = gens[data]
            u, eps = u * gu, eps * ge
            step = (gu * ge, K.zero, gu.inverse())
        elif kind == "shear":
            step = (K.one, data, K.one)
        else:
            h = h * data
            step = (K(data), K.zero, K.one)
        mat = _compose(mat, step)
    n = c1.n
    return IsomorphismResult("isomorphic", witness={
        "xi": xi, "u": u, "eps": eps, "h": h % n if n > 1 else 0, "matrix": mat,
        "word_length": len(path)})
