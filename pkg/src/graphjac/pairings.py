"""Finite abelian groups with duality pairings, and their extraction from
symmetric integer matrices.

The pairing on the cokernel of a nonsingular symmetric A sends classes of x
and y to y^T A^{-1} x mod 1.  Generators are read off the Smith transform:
with U A V = D, the class of x corresponds to U x, so the i-th generator lifts
to column i of U^{-1}, and the Gram matrix is pinned by the contract

    gram[i][j] == g_j^T A^{-1} g_i  (mod 1),   g_i = column i of U^{-1},

which the tests check directly against the exact rational inverse.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .graphs import Graph, is_connected, reduced_laplacian
from .intlinalg import (
    IntMatrix,
    SingularMatrixError,
    dims,
    rational_inverse,
    smith_normal_form,
)


class DisconnectedGraphError(ValueError):
    """Jacobian-with-pairing requested for a disconnected graph."""


class DegeneratePairingError(ValueError):
    """The bilinear data is not a duality pairing on its group."""


class OrderExceedsBoundError(ValueError):
    """Group order exceeds the brute-force bound for this operation."""


class NoCatalogMatchError(RuntimeError):
    """A 2-group pairing matched no catalog orbit (bug or degenerate input)."""


def frac_mod1(x: Fraction) -> Fraction:
    return x - math.floor(x)


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """Invariant factor form d_1 | d_2 | ... | d_k, every d_i >= 2."""

    invariant_factors: tuple[int, ...]

    def __post_init__(self):
        prev = None
        for d in self.invariant_factors:
            if d < 2:
                raise ValueError("invariant factors must be >= 2")
            if prev is not None and d % prev:
                raise ValueError("divisibility chain violated")
            prev = d

    @property
    def order(self) -> int:
        return math.prod(self.invariant_factors)

    @property
    def exponent(self) -> int:
        return self.invariant_factors[-1] if self.invariant_factors else 1

    @property
    def is_trivial(self) -> bool:
        return not self.invariant_factors

    @property
    def is_cyclic(self) -> bool:
        return len(self.invariant_factors) <= 1

    def p_rank(self, p: int) -> int:
        return sum(1 for d in self.invariant_factors if d % p == 0)

    def primes(self) -> tuple[int, ...]:
        return tuple(sorted({q for q, _ in _factorize(self.order)}))

    def p_valuations(self, p: int) -> tuple[int, ...]:
        return tuple(_valuation(d, p) for d in self.invariant_factors)


def _factorize(n: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return out


def _valuation(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


GramRows = tuple[tuple[Fraction, ...], ...]


def _check_gram(factors: tuple[int, ...], gram: GramRows) -> None:
    k = len(factors)
    if len(gram) != k or any(len(row) != k for row in gram):
        raise ValueError("gram must be square of size len(invariant_factors)")
    for i in range(k):
        for j in range(k):
            e = gram[i][j]
            if not (0 <= e < 1):
                raise ValueError("gram entries must be reduced into [0, 1)")
            if e != gram[j][i]:
                raise ValueError("gram must be symmetric")
            if (factors[i] * e).denominator != 1 or (factors[j] * e).denominator != 1:
                raise ValueError("gram entry not killed by its generator orders")


def _freeze_gram(rows) -> GramRows:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


@dataclass(frozen=True)
class PairingGram:
    """A symmetric Q/Z-valued Gram matrix on the generators of a group."""

    group: FiniteAbelianGroup
    gram: GramRows
    lifts: tuple[tuple[int, ...], ...] | None = field(default=None, compare=False)

    def __post_init__(self):
        _check_gram(self.group.invariant_factors, self.gram)

    @property
    def order(self) -> int:
        return self.group.order


@dataclass(frozen=True)
class SylowPairing:
    """Restriction of a pairing to the Sylow p-subgroup.

    Invariant factors are powers of `prime` and every Gram denominator is a
    p-power; the orthogonal sum of the SylowPairing parts recovers the full
    pairing up to isomorphism.
    """

    prime: int
    group: FiniteAbelianGroup
    gram: GramRows

    def __post_init__(self):
        for d in self.group.invariant_factors:
            red = d
            while red % self.prime == 0:
                red //= self.prime
            if red != 1:
                raise ValueError("Sylow part has a non-p-power factor")
        _check_gram(self.group.invariant_factors, self.gram)

    @property
    def order(self) -> int:
        return self.group.order

    def as_pairing(self) -> PairingGram:
        return PairingGram(group=self.group, gram=self.gram)


def trivial_sylow(p: int) -> SylowPairing:
    return SylowPairing(prime=p, group=FiniteAbelianGroup(()), gram=())


def pairing_from_matrix(mat: IntMatrix) -> PairingGram:
    """Cokernel of a nonsingular symmetric integer matrix with its pairing."""
    m, n = dims(mat)
    if m != n:
        raise ValueError("square matrix required")
    snf = smith_normal_form(mat, want_inverses=True)
    diag = snf.diagonal()
    if any(d == 0 for d in diag):
        raise SingularMatrixError("matrix is singular; cokernel is infinite")
    keep = [i for i, d in enumerate(diag) if d > 1]
    group = FiniteAbelianGroup(tuple(diag[i] for i in keep))
    if not keep:
        return PairingGram(group=group, gram=(), lifts=())
    ainv = rational_inverse(mat)
    uinv = snf.U_inv
    lifts = [tuple(uinv[r][i] for r in range(n)) for i in keep]
    images = [[sum(row[t] * g[t] for t in range(n)) for row in ainv] for g in lifts]
    k = len(keep)
    gram = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            v = frac_mod1(sum(lifts[j][t] * images[i][t] for t in range(n)))
            gram[i][j] = gram[j][i] = v
    return PairingGram(group=group, gram=_freeze_gram(gram), lifts=tuple(lifts))


def jacobian_with_pairing(g: Graph, delete_vertex: int | None = None) -> PairingGram:
    """Jacobian of a connected graph together with its duality pairing."""
    if not is_connected(g):
        raise DisconnectedGraphError("Jacobian pairing needs a connected graph")
    return pairing_from_matrix(reduced_laplacian(g, delete_vertex))


def sylow_split(pairing: PairingGram) -> list[SylowPairing]:
    """Orthogonal decomposition into Sylow p-parts.

    For each prime p | #group: h_i = m_i g_i with m_i = d_i / p^{v_p(d_i)}
    (taken over the generators with v_p(d_i) > 0), and the restricted Gram is
    gram_p[i][j] = m_i m_j gram[i][j] mod 1.
    """
    factors = pairing.group.invariant_factors
    parts = []
    for p in pairing.group.primes():
        idx = []
        mult = []
        pfac = []
        for i, d in enumerate(factors):
            v = _valuation(d, p)
            if v > 0:
                idx.append(i)
                mult.append(d // p**v)
                pfac.append(p**v)
        gram = [
            [frac_mod1(mult[a] * mult[b] * pairing.gram[idx[a]][idx[b]]) for b in range(len(idx))]
            for a in range(len(idx))
        ]
        parts.append(
            SylowPairing(prime=p, group=FiniteAbelianGroup(tuple(pfac)), gram=_freeze_gram(gram))
        )
    return parts


def sylow_direct_sum(a: SylowPairing, b: SylowPairing) -> SylowPairing:
    """Orthogonal sum of two pairings at the same prime."""
    if a.prime != b.prime:
        raise ValueError("direct sum at mismatched primes")
    facs = list(a.group.invariant_factors) + list(b.group.invariant_factors)
    k = len(facs)
    ka = len(a.group.invariant_factors)
    gram = [[Fraction(0)] * k for _ in range(k)]
    for i in range(ka):
        for j in range(ka):
            gram[i][j] = a.gram[i][j]
    for i in range(ka, k):
        for j in range(ka, k):
            gram[i][j] = b.gram[i - ka][j - ka]
    order = sorted(range(k), key=lambda i: facs[i])
    sorted_facs = tuple(facs[i] for i in order)
    sorted_gram = [[gram[order[i]][order[j]] for j in range(k)] for i in range(k)]
    return SylowPairing(
        prime=a.prime, group=FiniteAbelianGroup(sorted_facs), gram=_freeze_gram(sorted_gram)
    )


def combine_sylow(parts: list[SylowPairing]) -> PairingGram:
    """Inverse of sylow_split: CRT the parts back into invariant-factor form.

    Per-prime factor lists are right-aligned (big with big) so the combined
    d_i form a divisibility chain; the combined generator is the sum of the
    per-prime generators, so Gram entries just add.
    """
    parts = sorted(parts, key=lambda s: s.prime)
    if len({s.prime for s in parts}) != len(parts):
        raise ValueError("one part per prime expected")
    parts = [s for s in parts if not s.group.is_trivial]
    k = max((len(s.group.invariant_factors) for s in parts), default=0)
    factors = [1] * k
    gram = [[Fraction(0)] * k for _ in range(k)]
    for s in parts:
        pad = k - len(s.group.invariant_factors)
        for i, d in enumerate(s.group.invariant_factors):
            factors[pad + i] *= d
        for i in range(len(s.group.invariant_factors)):
            for j in range(len(s.group.invariant_factors)):
                gram[pad + i][pad + j] = frac_mod1(gram[pad + i][pad + j] + s.gram[i][j])
    return PairingGram(group=FiniteAbelianGroup(tuple(factors)), gram=_freeze_gram(gram))


# ---------------------------------------------------------------------------
# Brute-force element machinery shared by the nondegeneracy check and the
# classification/automorphism searches.

def scaled_gram(factors: tuple[int, ...], gram: GramRows) -> tuple[int, list[list[int]]]:
    """Gram scaled by the exponent: integer matrix IG with gram = IG / L."""
    L = factors[-1] if factors else 1
    ig = [[int(e * L) for e in row] for row in gram]
    return L, ig


def group_elements(factors: tuple[int, ...]):
    return itertools.product(*(range(d) for d in factors))


def w_vector(x, ig, L) -> tuple[int, ...]:
    """w[j] = L * delta(x, e_j) mod L; pairing values read off by dotting."""
    k = len(ig)
    return tuple(sum(x[i] * ig[i][j] for i in range(k)) % L for j in range(k))


def is_nondegenerate(factors: tuple[int, ...], gram: GramRows, bound: int = 4096) -> bool:
    """Duality check: g -> delta(g, .) is injective (brute force)."""
    order = math.prod(factors)
    if order > bound:
        raise OrderExceedsBoundError(f"order {order} exceeds bound {bound}")
    L, ig = scaled_gram(factors, gram)
    for x in group_elements(factors):
        if any(x) and not any(w_vector(x, ig, L)):
            return False
    return True
