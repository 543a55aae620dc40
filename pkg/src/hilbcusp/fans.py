"""Unit-stable fans in X*_R+ and Hilbert bases of two-dimensional cones.

Coordinates refer to an oriented Z-basis (e1, e2) of the lattice X*, chosen so
that positive determinants are counterclockwise in the (sigma1, sigma2) plane.
A totally positive unit eta acts by v -> v @ A.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field
from fractions import Fraction

from .errors import InvalidArgumentError, LatticeViolationError
from .field import FieldElement, NumberField
from .ideals import Ideal
from .lattice import xgcd
from .units import fundamental_unit

HULL = "hull"
HULL_SMOOTH = "hull+smooth"


def det2(v, w) -> int:
    return v[0] * w[1] - v[1] * w[0]


def primitive(v) -> tuple[int, ...]:
    g = math.gcd(*[int(x) for x in v])
    if g == 0:
        raise InvalidArgumentError("the zero vector spans no ray")
    return tuple(int(x) // g for x in v)


@dataclass(frozen=True)
class Cone2:
    """Cone spanned by two lattice rays (or a single ray in rank one)."""

    rays: tuple

    @property
    def dim(self) -> int:
        return len(self.rays)

    @property
    def det(self) -> int:
        if self.dim == 1:
            return 1
        return det2(*self.rays)

    def is_smooth(self) -> bool:
        return abs(self.det) == 1


def cone_hilbert_basis(v1, v2) -> list[tuple[int, int]]:
    """Hilbert basis of the lattice points of the cone <v1, v2>, ordered from v1 to v2.

    Walks the compact boundary of the convex hull: at each step the next element
    is cur + w with det(cur, w) = 1 and w normalized against v2.
    """
    v1, v2 = primitive(v1), primitive(v2)
    d = det2(v1, v2)
    if d == 0:
        raise InvalidArgumentError("degenerate cone: rays are collinear")
    if d < 0:
        return cone_hilbert_basis(v2, v1)[::-1]
    out = [v1]
    cur = v1
    while det2(cur, v2) > 1:
        q = det2(cur, v2)
        _, x, y = xgcd(cur[0], cur[1])
        w = (-y, x)
        p = det2(v2, w)
        k = p // q
        w = (w[0] + k * cur[0], w[1] + k * cur[1])
        cur = (cur[0] + w[0], cur[1] + w[1])
        out.append(cur)
    out.append(v2)
    return out


def dual_rays(cone: Cone2) -> tuple[tuple[int, int], tuple[int, int]]:
    v1, v2 = cone.rays
    if det2(v1, v2) < 0:
        v1, v2 = v2, v1
    m1 = primitive((-v1[1], v1[0]))  # vanishes on v1, positive on v2
    m2 = primitive((v2[1], -v2[0]))
    return m1, m2


def trace_dual_basis(basis) -> list[FieldElement]:
    """f_j with Tr(e_i f_j) = delta_ij."""
    K = basis[0].field
    w = K.integral_basis()
    T = [[(e * wk).trace() for wk in w] for e in basis]
    det = T[0][0] * T[1][1] - T[0][1] * T[1][0]
    inv = [[T[1][1] / det, -T[0][1] / det], [-T[1][0] / det, T[0][0] / det]]
    # coefficient row j of f_j is column j of T^-1
    return [w[0] * inv[0][j] + w[1] * inv[1][j] for j in range(2)]


def hilbert_basis(cone: Cone2, basis=None):
    """Minimal generators of sigma-dual intersected with the dual lattice.

    Returned in dual coordinates, or as elements of X when the X* basis is given.
    """
    if cone.dim == 1:
        hb = [(1,)]
    else:
        m1, m2 = dual_rays(cone)
        hb = cone_hilbert_basis(m1, m2)
    if basis is None:
        return hb
    f = trace_dual_basis(list(basis)) if cone.dim == 2 else [1 / basis[0]]
    return [sum((c * fj for c, fj in zip(m, f)), f[0].field.zero) for m in hb]


@dataclass
class Fan:
    X: Ideal
    basis: tuple  # oriented Z-basis of X*
    eta: FieldElement
    action: tuple  # A with coords(eta v) = coords(v) @ A
    rays: list
    cones: list
    mode: str
    extra: dict = dc_field(default_factory=dict)

    @property
    def field(self) -> NumberField:
        return self.X.field

    def element(self, v) -> FieldElement:
        return sum((int(c) * e for c, e in zip(v, self.basis)), self.field.zero)

    def coords(self, e: FieldElement) -> tuple[int, ...]:
        c = solve_coords(self.basis, e)
        if any(x.denominator != 1 for x in c):
            raise LatticeViolationError("element is not in X*")
        return tuple(int(x) for x in c)

    def act(self, v, power: int = 1):
        A = self.action if power >= 0 else _inverse_action(self.action)
        for _ in range(abs(power)):
            v = tuple(sum(v[i] * A[i][j] for i in range(len(v))) for j in range(len(v)))
        return v

    def orbit_count(self) -> int:
        return len(self.cones) if self.cones else len(self.rays)


def solve_coords(basis, e: FieldElement) -> tuple[Fraction, ...]:
    if len(basis) == 1:
        return (e.a / basis[0].a,)
    (a, b), (c, d) = basis[0].coords, basis[1].coords
    x, y = e.coords
    det = a * d - b * c
    return ((x * d - y * c) / det, (a * y - b * x) / det)


def _inverse_action(A):
    if len(A) == 1:
        return A
    (a, b), (c, d) = A
    det = a * d - b * c
    return ((d * det, -b * det), (-c * det, a * det))  # det = +-1


def _oriented_basis(lattice: Ideal) -> tuple:
    e1, e2 = lattice.basis_elements()
    s = (e1 * e2.conjugate() - e1.conjugate() * e2).sign()
    return (e1, e2) if s > 0 else (e2, e1)


def _action_matrix(basis, eta) -> tuple:
    rows = []
    for e in basis:
        c = solve_coords(basis, eta * e)
        if any(x.denominator != 1 for x in c):
            raise LatticeViolationError("the unit does not preserve X*")
        rows.append(tuple(int(x) for x in c))
    return tuple(rows)


def _min_trace_point(basis) -> tuple[int, int]:
    """Totally positive lattice point of least trace (lexicographic tie-break)."""
    from .qexp import enumerate_totally_positive
    K = basis[0].field
    # a positive rational in the lattice bounds the search
    c = solve_coords(basis, K.one)
    L = math.lcm(*[x.denominator for x in c])
    bound = Fraction(2 * L) if K.degree == 2 else Fraction(L)
    pts = enumerate_totally_positive(basis, bound)
    if not pts:
        raise AssertionError("no totally positive point below the trace bound")
    tr = [e.trace() for e in basis]
    return min(pts, key=lambda v: (v[0] * tr[0] + v[1] * tr[1], v))


def _turn(p, q, r) -> int:
    return det2((q[0] - p[0], q[1] - p[1]), (r[0] - q[0], r[1] - q[1]))


def build_admissible_fan(X: Ideal, unit_gen: FieldElement | None = None, mode: str = HULL_SMOOTH) -> Fan:
    """Unit-stable fan on X*_R+ from the lower convex hull of X* in the positive cone.

    The base ray is the totally positive lattice point of least trace; orbit
    representatives cover one fundamental domain [r0, eta r0).
    """
    if mode not in (HULL, HULL_SMOOTH):
        raise InvalidArgumentError(f"mode must be {HULL} or {HULL_SMOOTH}")
    K = X.field
    lattice = X.dual()
    if K.degree == 1:
        basis = tuple(lattice.basis_elements())
        return Fan(X=X, basis=basis, eta=K.one, action=((1,),), rays=[(1,)],
                   cones=[Cone2(((1,),))], mode=mode)
    if unit_gen is None:
        unit_gen = fundamental_unit(K) ** 2
    eta = K.coerce(unit_gen)
    if abs(eta.norm()) != 1 or not eta.is_integral() or not eta.is_totally_positive() or eta == 1:
        raise InvalidArgumentError("unit_gen must be a totally positive unit different from 1")
    basis = _oriented_basis(lattice)
    p0 = _min_trace_point(basis)
    # sweep counterclockwise: eta must grow the second embedding
    if (eta.conjugate() - 1).sign() < 0:
        eta = eta.inverse()
    A = _action_matrix(basis, eta)
    fan = Fan(X=X, basis=basis, eta=eta, action=A, rays=[], cones=[], mode=mode)
    p1 = fan.act(p0)
    chain = cone_hilbert_basis(p0, p1)
    period = chain[:-1]
    # neighbours along the periodic chain p_{-1} = eta^-1 p_{m-1}, p_m = eta p_0
    prev = fan.act(period[-1], -1)
    turns = []
    for i, q in enumerate(period):
        a = period[i - 1] if i > 0 else prev
        turns.append(_turn(a, q, chain[i + 1]))
    signs = {(t > 0) - (t < 0) for t in turns if t}
    if len(signs) > 1:
        raise AssertionError("boundary chain is not convex")
    vertices = [q for q, t in zip(period, turns) if t] or [period[0]]
    fan.extra["sail_points"] = period
    fan.extra["vertices"] = vertices
    cones = []
    for i, v in enumerate(vertices):
        w = vertices[i + 1] if i + 1 < len(vertices) else fan.act(vertices[0])
        cones.append(Cone2((v, w)))
    if mode == HULL_SMOOTH:
        cones = refine_smooth(cones)
    fan.cones = cones
    fan.rays = [c.rays[0] for c in cones]
    return fan


def refine_smooth(cones: list[Cone2]) -> list[Cone2]:
    """Inserts the Hilbert basis rays of every non-smooth cone."""
    out = []
    for c in cones:
        if c.is_smooth():
            out.append(c)
            continue
        hb = cone_hilbert_basis(*c.rays)
        out.extend(Cone2((hb[i], hb[i + 1])) for i in range(len(hb) - 1))
    return out


@dataclass(frozen=True)
class AdmissibilityReport:
    complete: bool
    smooth: bool
    unit_stable: bool
    finite_orbits: bool
    orbit_count: int
    problems: tuple = ()

    @property
    def ok(self) -> bool:
        return self.complete and self.smooth and self.unit_stable and self.finite_orbits

    def as_dict(self) -> dict:
        return {"complete": self.complete, "smooth": self.smooth, "unit_stable": self.unit_stable,
                "finite_orbits": self.finite_orbits, "orbit_count": self.orbit_count,
                "problems": list(self.problems)}


def _locate(fan: Fan, v, limit: int = 10_000):
    """(k, w) with w = eta^k v in the sector [r0, eta r0)."""
    r0 = fan.cones[0].rays[0]
    r1 = fan.act(r0)
    w, k = v, 0
    for _ in range(limit):
        if det2(r0, w) < 0:
            w, k = fan.act(w), k + 1
        elif det2(w, r1) <= 0:
            w, k = fan.act(w, -1), k - 1
        else:
            return k, w
    raise AssertionError("ray could not be moved into the fundamental sector")


def check_admissible(fan: Fan) -> AdmissibilityReport:
    problems = []
    cones = fan.cones
    if fan.field.degree == 1:
        ok = len(cones) == 1 and cones[0].rays == ((1,),)
        return AdmissibilityReport(ok, ok, ok, ok, len(cones), () if ok else ("rank-one fan malformed",))
    if not cones:
        return AdmissibilityReport(False, False, False, False, 0, ("empty fan",))
    complete = True
    A = fan.action
    if abs(A[0][0] * A[1][1] - A[0][1] * A[1][0]) != 1:
        problems.append("unit action is not unimodular")
        complete = False
    for i, c in enumerate(cones):
        if c.det <= 0:
            complete = False
            problems.append(f"cone {i} is not positively oriented")
        for r in c.rays:
            if not fan.element(r).is_totally_positive():
                complete = False
                problems.append(f"ray {r} leaves the positive cone")
        nxt = cones[i + 1].rays[0] if i + 1 < len(cones) else fan.act(cones[0].rays[0])
        if c.rays[1] != nxt:
            complete = False
            problems.append(f"gap after cone {i}")
    smooth = all(c.is_smooth() for c in cones)
    if not smooth:
        problems.append("non-smooth cones present")
    unit_stable = fan.eta.is_totally_positive() and abs(fan.eta.norm()) == 1
    reps = {c.rays for c in cones}
    if complete:
        for c in cones:
            for power in (1, -1):
                moved = tuple(fan.act(r, power) for r in c.rays)
                k, w0 = _locate(fan, moved[0])
                back = tuple(fan.act(r, k) for r in moved)
                if back not in reps:
                    unit_stable = False
                    problems.append(f"translate of cone {c.rays} is not equivalent to a representative")
    finite = 0 < len(cones) < 10 ** 6 and len(reps) == len(cones)
    return AdmissibilityReport(complete, smooth, unit_stable, finite, len(cones), tuple(problems))
