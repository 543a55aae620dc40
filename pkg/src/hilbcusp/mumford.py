"""Degeneration data: the trace pairing, polarization, Mumford generators, torsion."""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, LatticeViolationError
from .field import FieldElement
from .ideals import Ideal


def pairing(alpha: FieldElement, beta: FieldElement, X: Ideal) -> FieldElement:
    """The product alpha*beta, required to land in X."""
    v = alpha * beta
    if not X.contains(v):
        raise LatticeViolationError("alpha*beta does not lie in X")
    return v


def polarization_check(phi: FieldElement, c: Ideal) -> bool:
    """phi (required to lie in c) is totally positive."""
    if not c.contains(phi):
        raise InvalidArgumentError("phi must lie in c")
    return bool(phi) and phi.is_totally_positive()


def lattice_points(lattice: Ideal, bound) -> list[FieldElement]:
    """Elements of the lattice with every embedding of absolute value at most bound."""
    basis = lattice.basis_elements()
    K = lattice.field
    emb = np.array([e.embeddings() for e in basis])
    inv = np.linalg.inv(emb)
    box = (float(bound) * np.abs(inv).sum(axis=0)).astype(int) + 1
    out = []
    for coeffs in itertools.product(*[range(-int(m), int(m) + 1) for m in box]):
        e = sum((c * x for c, x in zip(coeffs, basis)), K.zero)
        if all((bound - e).sign(i) >= 0 and (bound + e).sign(i) >= 0 for i in range(K.degree)):
            out.append(e)
    return out


def validate_star(star, a: Ideal) -> None:
    """A star: finite, symmetric, contains 0 and a Z-basis of a."""
    star = list(star)
    K = a.field
    sset = set(star)
    if K.zero not in sset:
        raise InvalidArgumentError("the star must contain 0")
    if any(-s not in sset for s in star):
        raise InvalidArgumentError("the star must be symmetric")
    if any(not a.contains(s) for s in star):
        raise LatticeViolationError("star elements must lie in a")
    nz = [s for s in star if s]
    for combo in itertools.combinations(nz, K.degree):
        try:
            if Ideal.from_zspan(K, combo) == a:
                return
        except (InvalidArgumentError, LatticeViolationError):
            continue
    raise InvalidArgumentError("the star must contain a Z-basis of a")


@dataclass(frozen=True)
class MumfordGenerator:
    beta: FieldElement
    alpha: FieldElement
    q_exponent: FieldElement  # ([phi] beta + alpha) beta
    character: FieldElement  # 2 [phi] beta + alpha
    degree: int
    integral: bool  # q_exponent in X_+ u {0}


def _positive_or_zero(x: FieldElement) -> bool:
    return not x or x.is_totally_positive()


def mumford_generators(phi: FieldElement, a: Ideal, b: Ideal, star, beta_bound,
                       X: Ideal | None = None) -> list[MumfordGenerator]:
    """Degree-one generators X^{[phi]b+alpha}(b) X^{2[phi]b+alpha} theta for b in b, alpha in the star."""
    star = [a.field.coerce(s) for s in star]
    validate_star(star, a)
    X = a * b if X is None else X
    out = []
    for beta in sorted(lattice_points(b, beta_bound), key=lambda e: (e.embeddings(), e.a, e.b)):
        for alpha in sorted(star, key=lambda e: (e.embeddings(), e.a, e.b)):
            q = (phi * beta + alpha) * beta
            if not X.contains(q):
                raise LatticeViolationError("q-exponent left X")
            out.append(MumfordGenerator(beta, alpha, q, 2 * phi * beta + alpha, 1, _positive_or_zero(q)))
    return out


def integrality_scale(alpha: FieldElement, phi: FieldElement, search_box, b: Ideal | None = None,
                      max_n: int = 10 ** 9) -> tuple[int, dict]:
    """Least n >= 1 with (n[phi]beta + alpha) beta in X_+ u {0} for nonzero beta in the box.

    The condition is monotone in n, so a per-beta binary search is exact; the
    result is certified only on the searched box.
    """
    K = phi.field
    b = Ideal.unit(K) if b is None else b
    if not phi.is_totally_positive():
        raise InvalidArgumentError("phi must be totally positive")

    def ok(n, beta):
        return _positive_or_zero((n * phi * beta + alpha) * beta)

    best = 1
    checked = 0
    for beta in lattice_points(b, search_box):
        if not beta:
            continue
        checked += 1
        if ok(best, beta):
            continue
        lo, hi = best, best * 2
        while not ok(hi, beta):
            lo, hi = hi, hi * 2
            if hi > max_n:
                raise InvalidArgumentError("integrality scale exceeds the search limit")
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if ok(mid, beta):
                hi = mid
            else:
                lo = mid
        best = hi
    return best, {"certified": "box-certified", "box": str(search_box), "betas_checked": checked}


def torsion_structure(a: Ideal, b: Ideal, b_prime: Ideal, n_ideal: Ideal) -> dict:
    """Orders in the n-torsion sequences.

    0 -> a/na -> G[n] -> n^-1 b / b -> 0 and 0 -> b'/b -> G[n] -> image -> 0.
    """
    if not (b.issubset(b_prime) and b_prime.issubset(n_ideal.inverse() * b)):
        raise LatticeViolationError("need b inside b' inside n^-1 b")
    N = int(n_ideal.norm())
    sub = int(b.norm() / b_prime.norm())
    middle = N * N
    if middle % sub:
        raise AssertionError("|b'/b| does not divide |G[n]|")
    return {
        "a/na": int((n_ideal * a).norm() / a.norm()),
        "n^-1b/b": int(b.norm() / (n_ideal.inverse() * b).norm()),
        "b'/b": sub,
        "G[n]": middle,
        "sequence_a": {"sub": N, "middle": middle, "quotient": middle // N},
        "sequence_b": {"sub": sub, "middle": middle, "quotient": middle // sub},
    }
