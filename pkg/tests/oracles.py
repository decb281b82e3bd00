"""Independent brute-force oracles used by the tests.

Nothing here touches the package's Smith normal form or pairing code:
determinants come from permutation expansion, inverses from cofactor
adjugates, and group structure from exhaustive enumeration, so agreement with
the library is evidence rather than tautology.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction


def det_permutation_expansion(mat) -> int:
    n = len(mat)
    if n == 0:
        return 1
    total = 0
    for perm in itertools.permutations(range(n)):
        sign = 1
        seen = [False] * n
        for start in range(n):
            if seen[start]:
                continue
            length = 0
            j = start
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                length += 1
            if length % 2 == 0:
                sign = -sign
        term = sign
        for i in range(n):
            term *= mat[i][perm[i]]
        total += term
    return total


def adjugate(mat):
    """Transpose of cofactors, by permutation-expansion minors."""
    n = len(mat)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[mat[r][c] for c in range(n) if c != j] for r in range(n) if r != i]
            out[j][i] = (-1) ** (i + j) * det_permutation_expansion(minor)
    return out


def rank_over_q(mat) -> int:
    m = len(mat)
    n = len(mat[0]) if m else 0
    best = 0
    for r in range(1, min(m, n) + 1):
        found = False
        for rows in itertools.combinations(range(m), r):
            for cols in itertools.combinations(range(n), r):
                sub = [[mat[i][j] for j in cols] for i in rows]
                if det_permutation_expansion(sub) != 0:
                    found = True
                    break
            if found:
                break
        if not found:
            break
        best = r
    return best


def determinantal_divisor_invariants(mat) -> tuple[int, ...]:
    """Torsion invariant factors via gcds of all i x i minors:
    d_i = D_i / D_{i-1} with D_i the i-th determinantal divisor."""
    m = len(mat)
    n = len(mat[0]) if m else 0
    r = rank_over_q(mat)
    prev = 1
    out = []
    for size in range(1, r + 1):
        g = 0
        for rows in itertools.combinations(range(m), size):
            for cols in itertools.combinations(range(n), size):
                sub = [[mat[i][j] for j in cols] for i in rows]
                g = math.gcd(g, abs(det_permutation_expansion(sub)))
        d = g // prev
        prev = g
        if d > 1:
            out.append(d)
    return tuple(out)


def coset_enumeration_invariants(mat) -> tuple[int, ...]:
    """Invariant factors of Z^n / M Z^n for nonsingular M by literal coset
    enumeration: the quotient is M^{-1}Z^n / Z^n inside (Q/Z)^n, generated by
    the columns of M^{-1} = adj(M)/det(M)."""
    n = len(mat)
    det = det_permutation_expansion(mat)
    if det == 0:
        raise ValueError("coset enumeration oracle needs a nonsingular matrix")
    adj = adjugate(mat)
    gens = [tuple(Fraction(adj[i][j], det) % 1 for i in range(n)) for j in range(n)]
    zero = tuple(Fraction(0) for _ in range(n))
    seen = {zero}
    frontier = [zero]
    while frontier:
        x = frontier.pop()
        for g in gens:
            y = tuple((a + b) % 1 for a, b in zip(x, g))
            if y not in seen:
                seen.add(y)
                frontier.append(y)
    assert len(seen) == abs(det)
    return invariants_from_element_orders(seen)


def invariants_from_element_orders(elements) -> tuple[int, ...]:
    """Group structure of a finite subgroup of (Q/Z)^n from its elements.

    Per prime p, #{x : p^j x = 0} = p^{sum_i min(lambda_i, j)}, so successive
    count ratios give the conjugate partition; the per-prime partitions CRT
    back into invariant factors (big parts with big parts).
    """
    size = len(elements)
    partitions: dict[int, list[int]] = {}
    for p, vmax in _factor(size):
        ppart = p**vmax
        counts = [1]
        while counts[-1] < ppart:
            pj = p ** len(counts)
            counts.append(sum(1 for x in elements if all((pj * c) % 1 == 0 for c in x)))
        transpose = [_ilog(counts[i] // counts[i - 1], p) for i in range(1, len(counts))]
        lam = []
        i = 1
        while True:
            part = sum(1 for t in transpose if t >= i)
            if part == 0:
                break
            lam.append(part)
            i += 1
        partitions[p] = sorted(lam)
    k = max((len(v) for v in partitions.values()), default=0)
    factors = [1] * k
    for p, lam in partitions.items():
        pad = k - len(lam)
        for i, e in enumerate(lam):
            factors[pad + i] *= p**e
    return tuple(f for f in factors if f > 1)


def _factor(n: int):
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1
    if n > 1:
        out.append((n, 1))
    return out


def _ilog(n: int, p: int) -> int:
    e = 0
    while n > 1:
        assert n % p == 0
        n //= p
        e += 1
    return e


def pairing_table(factors, gram):
    """delta(x, y) for all pairs of group elements, brute force."""
    out = {}
    elems = list(itertools.product(*(range(d) for d in factors)))
    for x in elems:
        for y in elems:
            v = Fraction(0)
            for i, xi in enumerate(x):
                for j, yj in enumerate(y):
                    v += xi * yj * gram[i][j]
            out[(x, y)] = v % 1
    return out


def count_subspaces(k: int, j: int, p: int) -> int:
    """j-dimensional subspaces of F_p^k by brute enumeration of spans."""
    vecs = list(itertools.product(range(p), repeat=k))
    spans = set()
    for basis in itertools.combinations([v for v in vecs if any(v)], j):
        span = set()
        for coeffs in itertools.product(range(p), repeat=j):
            w = tuple(sum(c * b[i] for c, b in zip(coeffs, basis)) % p for i in range(k))
            span.add(w)
        if len(span) == p**j:
            spans.add(frozenset(span))
    return len(spans)
