"""Global units, congruence subgroups and the unit data attached to a cusp.

Unit subgroups are described as sublattices of exponent vectors. The ambient
group is generated by -1, the fundamental unit eps0 and (for the ResGm variant)
the generator eps_plus of the totally positive units used in the torus factor:

    v = (s, k[, m])  <->  u = (-1)^s * eps0^k,  eps = eps_plus^m

with the relation 2*e_0 = 0. A subgroup is the HNF basis of its preimage in Z^r.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field as dc_field
from functools import lru_cache

import numpy as np

from .errors import InvalidArgumentError, NoFundamentalUnitError
from .field import FieldElement, NumberField
from .ideals import Ideal, ResidueRing
from .lattice import det, hnf, in_lattice

GM = "Gm"
RESGM = "ResGm"


@lru_cache(maxsize=None)
def fundamental_unit(field: NumberField, max_steps: int = 20000) -> FieldElement:
    """Fundamental unit > 1 (first real embedding), by the continued fraction of omega."""
    if field.degree == 1:
        raise NoFundamentalUnitError("Q has no fundamental unit")
    w = field.omega
    x = w
    p_prev, p = 1, x.floor()
    q_prev, q = 0, 1
    for _ in range(max_steps):
        cand = p - q * w
        if abs(cand.norm()) == 1:
            return _normalize_unit(cand)
        frac = x - x.floor()
        x = frac.inverse()
        a = x.floor()
        p_prev, p = p, a * p + p_prev
        q_prev, q = q, a * q + q_prev
    raise NoFundamentalUnitError(f"no unit found within {max_steps} continued fraction steps")


def _normalize_unit(u: FieldElement) -> FieldElement:
    if u.sign() < 0:
        u = -u
    if (u - 1).sign() < 0:
        u = u.inverse()
    return u


def totally_positive_unit(field: NumberField) -> FieldElement:
    """Generator of the totally positive units (greater than 1)."""
    if field.degree == 1:
        return field.one
    e = fundamental_unit(field)
    return e if e.norm() == 1 else e * e


def unit_rank(field: NumberField, D_flag: str) -> int:
    if field.degree == 1:
        return 1
    return 3 if D_flag == RESGM else 2


def exponents_to_pair(field: NumberField, v) -> tuple[FieldElement, FieldElement]:
    v = tuple(v) + (0,) * (3 - len(v))
    u = field(-1) ** (v[0] % 2)
    if field.degree == 2:
        u = u * fundamental_unit(field) ** v[1]
        eps = totally_positive_unit(field) ** v[2]
    else:
        eps = field.one
    return u, eps


@dataclass(frozen=True)
class UnitSubgroup:
    """Subgroup of o^x (x o^x_{D+}) given by a lattice of exponent vectors."""

    field: NumberField
    D_flag: str
    relations: tuple  # HNF basis of the preimage in Z^r

    @property
    def rank(self) -> int:
        return len(self.relations)

    @property
    def index(self) -> int:
        """Index in the full group o^x (x o^x_{D+})."""
        return int(abs(det(self.relations)))

    def contains(self, v) -> bool:
        return in_lattice(self.relations, tuple(v)[: self.rank])

    def generators(self) -> list[tuple[int, ...]]:
        out = []
        for r in self.relations:
            if r[0] % 2 == 0 and not any(r[1:]):
                continue  # the trivial relation 2*e_0
            r = (r[0] % 2,) + tuple(r[1:])
            out.append(r)
        return out

    def generator_pairs(self) -> list[tuple[FieldElement, FieldElement]]:
        return [exponents_to_pair(self.field, v) for v in self.generators()]

    def multiplier_exponent(self) -> int:
        """g >= 0 with {u^2 eps} = <eps0^g> over the subgroup."""
        import math
        g = 0
        for v in self.relations:
            g = math.gcd(g, _multiplier_value(self.field, v))
        return g

    def describe(self) -> dict:
        return {"relations": [list(r) for r in self.relations], "index": self.index,
                "generators": [list(v) for v in self.generators()]}


def _multiplier_value(field: NumberField, v) -> int:
    # exponent of eps0 in u^2 * eps
    if field.degree == 1:
        return 0
    v = tuple(v) + (0,) * (3 - len(v))
    e_plus = 1 if fundamental_unit(field).norm() == 1 else 2
    return 2 * v[1] + e_plus * v[2]


def _image_kernel(r: int, gen_maps, start) -> tuple[int, tuple]:
    """BFS over the image of Z^r under generator maps; returns (image size, kernel HNF).

    gen_maps[i] maps an image state (hashable) to the state multiplied by generator i.
    Kernel generators are the Schreier relations plus 2*e_0.
    """
    words = {start: (0,) * r}
    queue = deque([start])
    relations = [tuple(2 if j == 0 else 0 for j in range(r))]
    while queue:
        h = queue.popleft()
        w = words[h]
        for i, g in enumerate(gen_maps):
            h2 = g(h)
            w2 = tuple(w[j] + (1 if j == i else 0) for j in range(r))
            if h2 in words:
                rel = tuple(a - b for a, b in zip(w2, words[h2]))
                if any(rel):
                    relations.append(rel)
            else:
                words[h2] = w2
                queue.append(h2)
    H = hnf(relations, r)
    size = len(words)
    if int(abs(det(H))) != size:
        raise AssertionError("kernel index does not match the image size")
    return size, H


def _unit_images(field: NumberField, D_flag: str):
    gens = [(field(-1), field.one)]
    if field.degree == 2:
        gens.append((fundamental_unit(field), field.one))
        if D_flag == RESGM:
            gens.append((field.one, totally_positive_unit(field)))
    return gens


def congruence_unit_index(f: Ideal) -> int:
    """[o^x : o^x_f], the order of the image of <-1, eps0> in (o/f)^x."""
    R = ResidueRing(f)
    maps = [R.mul_map(u) for u, _ in _unit_images(f.field, GM)]
    seen = {R.one}
    queue = deque([R.one])
    while queue:
        h = queue.popleft()
        for m in maps:
            h2 = int(m[h])
            if h2 not in seen:
                seen.add(h2)
                queue.append(h2)
    return len(seen)


def congruence_subgroup(f: Ideal) -> UnitSubgroup:
    """o^x_f = {u : u = 1 mod f} as an exponent lattice."""
    R = ResidueRing(f)
    maps = [R.mul_map(u) for u, _ in _unit_images(f.field, GM)]
    r = len(maps)
    _, H = _image_kernel(r, [lambda h, m=m: int(m[h]) for m in maps], R.one)
    return UnitSubgroup(f.field, GM, H)


@dataclass(frozen=True)
class CuspUnitData:
    f: Ideal
    n_ideal: Ideal
    D_flag: str
    o_C: UnitSubgroup
    o_Cbar: UnitSubgroup
    index_full: int
    index_bar: int
    n: int
    H_C: tuple
    H_C1: tuple
    extra: dict = dc_field(default_factory=dict, compare=False)

    def contains_pair(self, u: FieldElement, eps: FieldElement) -> bool:
        """Direct membership test (u, eps) in o^x_C from the defining congruences."""
        K = self.f.field
        u, eps = K.coerce(u), K.coerce(eps)
        if abs(u.norm()) != 1 or not u.is_integral():
            return False
        if self.D_flag == GM and eps != 1:
            return False
        if eps != 1 and not (eps.is_totally_positive() and abs(eps.norm()) == 1 and eps.is_integral()):
            return False
        m = self.n_ideal / self.f
        return m.contains(u - 1) and self.f.contains(u * eps - 1)

    def summary(self) -> dict:
        return {"index_full": self.index_full, "index_bar": self.index_bar, "n": self.n,
                "H_C": list(self.H_C), "H_C1": list(self.H_C1),
                "o_C": self.o_C.describe(), "o_Cbar": self.o_Cbar.describe()}


def _rational_residue_lookup(R: ResidueRing, n: int) -> dict[int, int]:
    import math
    table = {}
    for a in range(1, max(n, 2)):
        if math.gcd(a, n) == 1 or n == 1:
            table.setdefault(R.rational_index(a), a % n if n > 1 else 0)
    if n == 1:
        table.setdefault(R.rational_index(1), 0)
    return table


def _closure_mod(gens, n: int) -> tuple:
    if n == 1:
        return (0,)
    seen = {1 % n}
    queue = deque(seen)
    while queue:
        h = queue.popleft()
        for g in gens:
            h2 = h * g % n
            if h2 not in seen:
                seen.add(h2)
                queue.append(h2)
    return tuple(sorted(seen))


def _cusp_groups(f: Ideal, n_ideal: Ideal, D_flag: str):
    K = f.field
    Rf = ResidueRing(f)
    Rm = ResidueRing(n_ideal / f)
    n = f.exponent()
    gens = _unit_images(K, D_flag)
    r = len(gens)
    # (u eps mod f, u mod n f^-1)
    maps_f = [Rf.mul_map(u * e) for u, e in gens]
    maps_m = [Rm.mul_map(u) for u, _ in gens]
    start = (Rf.one, Rm.one)
    step = [lambda h, a=a, b=b: (int(a[h[0]]), int(b[h[1]])) for a, b in zip(maps_f, maps_m)]
    size_C, H_C = _image_kernel(r, step, start)

    # same map with the first coordinate taken modulo the image of (Z/n)^x
    lookup = _rational_residue_lookup(Rf, n)
    canon = np.arange(Rf.size)
    for idx in lookup:
        canon = np.minimum(canon, Rf.mul_map(Rf.element(idx)))
    step_bar = [lambda h, a=a, b=b: (int(canon[a[h[0]]]), int(b[h[1]])) for a, b in zip(maps_f, maps_m)]
    size_bar, H_bar = _image_kernel(r, step_bar, (int(canon[Rf.one]), Rm.one))

    # H_C: image of u*eps mod f in (Z/n)^x over generators of o_Cbar
    hgens = []
    for v in H_bar:
        u, e = exponents_to_pair(K, v)
        idx = Rf.index(u * e)
        if idx not in lookup:
            raise AssertionError("o_Cbar element does not reduce into (Z/n)^x")
        hgens.append(lookup[idx])
    H = _closure_mod(hgens, n)
    return size_C, H_C, size_bar, H_bar, H


def cusp_unit_data(f: Ideal, n_ideal: Ideal, D_flag: str = GM) -> CuspUnitData:
    """Unit groups o^x_C, o^x_Cbar and the finite group H_C for f = b b'^-1."""
    if D_flag not in (GM, RESGM):
        raise InvalidArgumentError(f"D_flag must be {GM} or {RESGM}")
    if not f.is_integral() or not f.divides(n_ideal):
        raise InvalidArgumentError("f must be an integral divisor of the level")
    K = f.field
    size_C, H_C, size_bar, H_bar, H = _cusp_groups(f, n_ideal, D_flag)
    if size_C % size_bar or size_C // size_bar != len(H):
        raise AssertionError("|H_C| differs from [o_Cbar : o_C]")
    if D_flag == RESGM and K.degree == 2:
        _, _, _, _, H1 = _cusp_groups(f, n_ideal, GM)
    else:
        H1 = H
    return CuspUnitData(f=f, n_ideal=n_ideal, D_flag=D_flag,
                        o_C=UnitSubgroup(K, D_flag, H_C), o_Cbar=UnitSubgroup(K, D_flag, H_bar),
                        index_full=size_C, index_bar=size_bar, n=f.exponent(), H_C=H, H_C1=H1)
