"""Fractional ideals as Z-lattices in normalized (HNF) form, and residue rings."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import InvalidArgumentError, LatticeViolationError
from .field import FieldElement, NumberField
from .lattice import hnf_rational, in_lattice, membership_mask, reduce_mod_hnf


def factor_integer(n: int) -> dict[int, int]:
    n = abs(int(n))
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


class Ideal:
    """Fractional ideal of the maximal order, stored by its HNF Z-basis.

    Coordinates are taken in the integral basis (1, omega). The HNF is unique,
    so equality of ideals is equality of bases.
    """

    def __init__(self, field: NumberField, basis):
        self.field = field
        self.basis = tuple(tuple(Fraction(v) for v in r) for r in basis)

    @classmethod
    def from_zspan(cls, field: NumberField, elements) -> "Ideal":
        rows = [field.coerce(e).coords for e in elements]
        rows = [r for r in rows if any(r)]
        if not rows:
            raise InvalidArgumentError("the zero ideal is not a fractional ideal")
        try:
            H = hnf_rational(rows, field.degree)
        except ValueError:
            raise LatticeViolationError("elements do not span a full-rank lattice") from None
        return cls(field, H)

    @classmethod
    def generated_by(cls, field: NumberField, generators) -> "Ideal":
        gens = [field.coerce(g) for g in generators]
        span = []
        for g in gens:
            span.extend(g * w for w in field.integral_basis())
        ideal = cls.from_zspan(field, span)
        return ideal

    @classmethod
    def unit(cls, field: NumberField) -> "Ideal":
        return cls(field, [[int(i == j) for j in range(field.degree)] for i in range(field.degree)])

    @classmethod
    def different(cls, field: NumberField) -> "Ideal":
        return cls.generated_by(field, [field.different_generator()])

    # basic data

    def __eq__(self, other):
        return isinstance(other, Ideal) and self.field == other.field and self.basis == other.basis

    def __hash__(self):
        return hash((self.field.D, self.basis))

    def sort_key(self):
        return (self.norm(), self.basis)

    def __repr__(self):
        return f"Ideal({self.field}, {[[str(v) for v in r] for r in self.basis]})"

    def basis_elements(self) -> list[FieldElement]:
        return [self.field.from_coords(r) for r in self.basis]

    def norm(self) -> Fraction:
        N = Fraction(1)
        for i in range(self.field.degree):
            N *= self.basis[i][i]
        return N

    def is_integral(self) -> bool:
        return all(v.denominator == 1 for r in self.basis for v in r)

    def is_unit_ideal(self) -> bool:
        return self == Ideal.unit(self.field)

    def int_hnf(self) -> tuple[tuple[int, ...], ...]:
        if not self.is_integral():
            raise InvalidArgumentError("ideal is not integral")
        return tuple(tuple(int(v) for v in r) for r in self.basis)

    def contains(self, e) -> bool:
        e = self.field.coerce(e)
        if not e:
            return True
        return in_lattice(self.basis, e.coords)

    __contains__ = contains

    def coordinates(self, e) -> tuple[Fraction, ...]:
        from .lattice import solve_upper
        return solve_upper(self.basis, self.field.coerce(e).coords)

    def issubset(self, other: "Ideal") -> bool:
        return all(other.contains(e) for e in self.basis_elements())

    __le__ = issubset

    def divides(self, other: "Ideal") -> bool:
        """self | other, i.e. other is contained in self."""
        return other.issubset(self)

    # arithmetic

    def __mul__(self, other):
        if isinstance(other, Ideal):
            prods = [x * y for x in self.basis_elements() for y in other.basis_elements()]
            return Ideal.from_zspan(self.field, prods)
        e = self.field.coerce(other)
        if not e:
            raise InvalidArgumentError("scaling an ideal by zero")
        return Ideal.from_zspan(self.field, [x * e for x in self.basis_elements()])

    __rmul__ = __mul__

    def __add__(self, other: "Ideal") -> "Ideal":
        return Ideal.from_zspan(self.field, self.basis_elements() + other.basis_elements())

    def conjugate(self) -> "Ideal":
        return Ideal.from_zspan(self.field, [e.conjugate() for e in self.basis_elements()])

    def inverse(self) -> "Ideal":
        if self.field.degree == 1:
            return Ideal(self.field, [[1 / self.basis[0][0]]])
        # I * conj(I) = N(I) o
        return self.conjugate() * self.field(1 / self.norm())

    def __truediv__(self, other: "Ideal") -> "Ideal":
        return self * other.inverse()

    def __pow__(self, k: int) -> "Ideal":
        if k < 0:
            return self.inverse() ** (-k)
        out = Ideal.unit(self.field)
        for _ in range(k):
            out = out * self
        return out

    def __and__(self, other: "Ideal") -> "Ideal":
        return (self.inverse() + other.inverse()).inverse()

    def dual(self) -> "Ideal":
        """Trace dual: the inverse times the inverse different."""
        return (self * Ideal.different(self.field)).inverse()

    # arithmetic invariants of integral ideals

    def exponent(self) -> int:
        """Least positive rational integer in the ideal (exponent of o/f when integral)."""
        if self.field.degree == 1:
            v = self.basis[0][0]
            if v.denominator != 1:
                raise InvalidArgumentError("exponent is only defined for integral ideals")
            return int(v)
        (a, b), (_, d) = self.basis
        s = (b / d).denominator
        val = s * a
        if val.denominator != 1:
            raise InvalidArgumentError("exponent is only defined for integral ideals")
        return int(val)

    def factor(self) -> list[tuple["Ideal", int]]:
        """Prime factorization of an integral ideal, sorted by norm then basis."""
        if not self.is_integral():
            raise InvalidArgumentError("factorization is only implemented for integral ideals")
        out = []
        for p in sorted(factor_integer(int(self.norm()))):
            for P in factor_rational_prime(self.field, p).primes:
                v = 0
                Pk = P
                while self.issubset(Pk):
                    v += 1
                    Pk = Pk * P
                if v:
                    out.append((P, v))
        out.sort(key=lambda t: t[0].sort_key())
        return out

    def euler_phi(self) -> int:
        out = 1
        for P, e in self.factor():
            q = int(P.norm())
            out *= q ** (e - 1) * (q - 1)
        return out

    def divisors(self) -> list["Ideal"]:
        fac = self.factor()
        out = []
        for exps in itertools.product(*[range(e + 1) for _, e in fac]):
            J = Ideal.unit(self.field)
            for (P, _), k in zip(fac, exps):
                J = J * P ** k
            out.append(J)
        out.sort(key=Ideal.sort_key)
        return out

    def is_coprime_to(self, other: "Ideal") -> bool:
        return (self + other).is_unit_ideal()

    def principal_generator(self, bound: int = 60) -> FieldElement | None:
        """A generator found by a bounded coefficient search, or None."""
        N = self.norm()
        elems = self.basis_elements()
        best = None
        rng = range(-bound, bound + 1)
        for coeffs in itertools.product(rng, repeat=len(elems)):
            if not any(coeffs):
                continue
            e = sum((c * x for c, x in zip(coeffs, elems)), self.field.zero)
            if abs(e.norm()) == N:
                key = (max(abs(c) for c in coeffs), coeffs)
                if best is None or key < best[0]:
                    best = (key, e)
        return None if best is None else best[1]


@dataclass(frozen=True)
class PrimeSplitting:
    p: int
    kind: str  # split / inert / ramified / rational
    primes: tuple  # prime ideals above p
    ramification: int
    residue_degree: int


def factor_rational_prime(field: NumberField, p: int) -> PrimeSplitting:
    """Splitting of a rational prime by Dedekind-Kummer on the minimal polynomial of omega."""
    if p < 2 or factor_integer(p) != {p: 1}:
        raise InvalidArgumentError(f"{p} is not a prime")
    if field.degree == 1:
        return PrimeSplitting(p, "rational", (Ideal.generated_by(field, [p]),), 1, 1)
    t, s = field.omega_relation
    roots = [r for r in range(p) if (r * r - t * r - s) % p == 0]
    w = field.omega
    if not roots:
        return PrimeSplitting(p, "inert", (Ideal.generated_by(field, [p]),), 1, 2)
    primes = [Ideal.generated_by(field, [field(p), w - r]) for r in roots]
    if len(roots) == 1:
        return PrimeSplitting(p, "ramified", (primes[0],), 2, 1)
    return PrimeSplitting(p, "split", tuple(primes), 1, 1)


class ResidueRing:
    """The finite ring o/f for an integral ideal f, with vectorized arithmetic.

    Elements are indexed 0..size-1 through canonical coordinate representatives.
    """

    def __init__(self, f: Ideal):
        if not f.is_integral():
            raise InvalidArgumentError("residue rings need an integral ideal")
        self.ideal = f
        self.field = f.field
        self.H = f.int_hnf()
        self.dim = self.field.degree
        self.shape = tuple(self.H[i][i] for i in range(self.dim))
        self.size = math.prod(self.shape)
        self.exponent = f.exponent()
        grids = np.meshgrid(*[np.arange(s, dtype=np.int64) for s in self.shape], indexing="ij")
        self.coords = np.stack([g.ravel() for g in grids], axis=1)
        self._strides = np.array([math.prod(self.shape[i + 1:]) for i in range(self.dim)], dtype=np.int64)
        self._inv_cache: dict[int, int] = {}

    def __len__(self):
        return self.size

    @cached_property
    def primes(self) -> list[Ideal]:
        return [P for P, _ in self.ideal.factor()]

    def index_of_coords(self, C) -> np.ndarray:
        R = reduce_mod_hnf(self.H, np.atleast_2d(np.asarray(C, dtype=np.int64)))
        return R @ self._strides

    def element(self, i: int) -> FieldElement:
        return self.field.from_coords([int(v) for v in self.coords[i]])

    def mult_matrix(self, c: FieldElement) -> np.ndarray:
        c = self.field.coerce(c)
        if not c.is_integral():
            raise InvalidArgumentError("multiplication map needs an integral element")
        rows = [(w * c).coords for w in self.field.integral_basis()]
        return np.array([[int(v) for v in r] for r in rows], dtype=np.int64)

    def mul_map(self, c) -> np.ndarray:
        """Index map of multiplication by c (integral, or f-integral via index())."""
        c = self.field.coerce(c)
        if not c.is_integral():
            c = self.element(self.index(c))
        M = self.mult_matrix(c)
        return self.index_of_coords(self.coords @ M)

    def add_table(self) -> np.ndarray:
        C = self.coords[:, None, :] + self.coords[None, :, :]
        return self.index_of_coords(C.reshape(-1, self.dim)).reshape(self.size, self.size)

    @cached_property
    def one(self) -> int:
        return int(self.index_of_coords([1] + [0] * (self.dim - 1))[0])

    @cached_property
    def zero(self) -> int:
        return 0

    def prime_masks(self) -> list[np.ndarray]:
        """For each prime P | f, the mask of residues lying in P/f."""
        return [membership_mask(P.int_hnf(), self.coords) for P in self.primes]

    @cached_property
    def unit_mask(self) -> np.ndarray:
        mask = np.ones(self.size, dtype=bool)
        for m in self.prime_masks():
            mask &= ~m
        return mask

    def is_unit(self, i: int) -> bool:
        return bool(self.unit_mask[i])

    def inverse(self, i: int) -> int:
        if i not in self._inv_cache:
            if not self.unit_mask[i]:
                raise InvalidArgumentError("element is not a unit modulo the ideal")
            m = self.mul_map(self.element(i))
            self._inv_cache[i] = int(np.flatnonzero(m == self.one)[0])
        return self._inv_cache[i]

    def index(self, e) -> int:
        """Index of the residue of an f-integral element."""
        e = self.field.coerce(e)
        if e.is_integral():
            return int(self.index_of_coords([int(v) for v in e.coords])[0])
        m = math.lcm(*[c.denominator for c in e.coords])
        if math.gcd(m, self.exponent) == 1:
            inv = pow(m, -1, self.exponent) if self.exponent > 1 else 0
            return self.index(e * m * inv)
        # clear denominators with an element that is a unit modulo f
        J = Ideal.unit(self.field) & Ideal.generated_by(self.field, [e]).inverse()
        gens = J.basis_elements()
        for bound in range(1, 13):
            for coeffs in itertools.product(range(-bound, bound + 1), repeat=len(gens)):
                if max(abs(c) for c in coeffs) != bound:
                    continue
                t = sum((c * g for c, g in zip(coeffs, gens)), self.field.zero)
                if not t or not t.is_integral():
                    continue
                ti = self.index(t)
                if self.unit_mask[ti]:
                    te = self.index(t * e)
                    return int(self.mul_map(self.element(self.inverse(ti)))[te])
        raise InvalidArgumentError(f"{e!r} is not integral at the primes of the modulus")

    def units(self) -> np.ndarray:
        return np.flatnonzero(self.unit_mask)

    def unit_count(self) -> int:
        return int(self.unit_mask.sum())

    def rational_index(self, a: int) -> int:
        return self.index(self.field(a))


def quotient_data(f: Ideal) -> dict:
    """Exponent, order and Euler phi of an integral ideal."""
    return {"exponent": f.exponent(), "order": int(f.norm()), "phi": f.euler_phi()}
