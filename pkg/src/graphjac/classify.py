"""Classification of finite abelian p-groups with duality pairing.

For odd p the semigroup of pairings under orthogonal sum is generated by two
cyclic forms per order, A (square unit value) and B (non-square), with the
single relation B + B = A + A; classification is orthogonal diagonalization
followed by that reduction.  At p = 2 six generator families A, B, C, D
(cyclic, values 1, -1, 5, -5 over the order) and E, F (two-generator blocks)
occur and their relations are not used: classification is brute-force pairing
isomorphism against a catalog of generator sums on the same group.

Symbols render with the order of their block, so the two-generator E block at
level 1 on (Z/2)^2 is "E4" (the naming its tables make standard), while
cyclic blocks use their cyclic order ("A2", "B4", "C8", ...).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction

from .pairings import (
    DegeneratePairingError,
    FiniteAbelianGroup,
    GramRows,
    NoCatalogMatchError,
    OrderExceedsBoundError,
    PairingGram,
    SylowPairing,
    _valuation,
    combine_sylow,
    frac_mod1,
    is_nondegenerate,
    scaled_gram,
    sylow_direct_sum,
    sylow_split,
    trivial_sylow,
    w_vector,
)

DEFAULT_BOUND = 1 << 10
DEFAULT_CATALOG_BOUND = 1 << 6

_MIN_LEVEL_P2 = {"A": 1, "B": 2, "C": 3, "D": 3, "E": 1, "F": 2}


@dataclass(frozen=True)
class Symbol:
    """One generator block: a letter, its prime, and its level r."""

    letter: str
    prime: int
    level: int

    def __post_init__(self):
        if self.level < 1:
            raise ValueError("level must be >= 1")
        if self.prime == 2:
            if self.letter not in _MIN_LEVEL_P2:
                raise ValueError(f"unknown 2-adic symbol {self.letter!r}")
            if self.level < _MIN_LEVEL_P2[self.letter]:
                raise ValueError(f"{self.letter} requires level >= {_MIN_LEVEL_P2[self.letter]}")
        else:
            if self.letter not in ("A", "B"):
                raise ValueError(f"odd primes only admit A and B, got {self.letter!r}")

    @property
    def is_plane(self) -> bool:
        return self.letter in ("E", "F")

    @property
    def block_factors(self) -> tuple[int, ...]:
        q = self.prime**self.level
        return (q, q) if self.is_plane else (q,)

    @property
    def block_order(self) -> int:
        return math.prod(self.block_factors)

    @property
    def name(self) -> str:
        return f"{self.letter}{self.block_order}"

    @property
    def sort_key(self):
        return (self.letter, self.block_order, self.prime, self.level)


def smallest_nonresidue(p: int) -> int:
    for a in range(2, p):
        if pow(a, (p - 1) // 2, p) != 1:
            return a
    raise ValueError("no quadratic non-residue; p must be an odd prime > 2")


def symbol_sylow(sym: Symbol) -> SylowPairing:
    """The Gram matrix of one generator block."""
    p, r = sym.prime, sym.level
    q = p**r
    if sym.is_plane:
        off = Fraction(1, q)
        diag = Fraction(0) if sym.letter == "E" else Fraction(2, q)
        gram = ((diag, off), (off, diag))
        return SylowPairing(prime=p, group=FiniteAbelianGroup((q, q)), gram=gram)
    if p == 2:
        value = {"A": 1, "B": q - 1, "C": 5, "D": q - 5}[sym.letter]
    else:
        value = 1 if sym.letter == "A" else smallest_nonresidue(p)
    gram = ((Fraction(value, q),),)
    return SylowPairing(prime=p, group=FiniteAbelianGroup((q,)), gram=gram)


def _class_sort_key(symbols) -> tuple:
    return tuple(s.sort_key for s in symbols)


@dataclass(frozen=True)
class PairingClass:
    """Isomorphism class of (group, pairing): a multiset of generator symbols."""

    symbols: tuple[Symbol, ...]

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(sorted(self.symbols, key=lambda s: s.sort_key)))

    @property
    def name(self) -> str:
        return "+".join(s.name for s in self.symbols) if self.symbols else "1"

    @property
    def order(self) -> int:
        return math.prod(s.block_order for s in self.symbols)

    def primes(self) -> tuple[int, ...]:
        return tuple(sorted({s.prime for s in self.symbols}))

    def sylow_symbols(self, p: int) -> tuple[Symbol, ...]:
        return tuple(s for s in self.symbols if s.prime == p)

    @property
    def group(self) -> FiniteAbelianGroup:
        return class_pairing(self).group


def parse_class_name(text: str) -> PairingClass:
    """Inverse of PairingClass.name: "1", "A2+A4", "A3+E4", ..."""
    text = text.strip()
    if text == "1":
        return PairingClass(())
    symbols = []
    for tok in text.split("+"):
        tok = tok.strip()
        if len(tok) < 2 or not tok[1:].isdigit():
            raise ValueError(f"bad symbol {tok!r}")
        letter, num = tok[0], int(tok[1:])
        if letter in ("E", "F"):
            r, m = 0, num
            while m % 4 == 0:
                m //= 4
                r += 1
            if m != 1 or r < 1:
                raise ValueError(f"{tok!r}: E/F blocks have order 4^r")
            symbols.append(Symbol(letter, 2, r))
        else:
            p = next((d for d in range(2, num + 1) if num % d == 0), num)
            r, m = 0, num
            while m % p == 0:
                m //= p
                r += 1
            if m != 1:
                raise ValueError(f"{tok!r}: cyclic blocks have prime-power order")
            symbols.append(Symbol(letter, p, r))
    return PairingClass(tuple(symbols))


def class_sylow_gram(symbols, p: int) -> SylowPairing:
    """Block-diagonal Gram of an orthogonal sum of symbols at one prime."""
    out = trivial_sylow(p)
    for sym in symbols:
        if sym.prime != p:
            raise ValueError("mixed primes in a Sylow gram")
        out = sylow_direct_sum(out, symbol_sylow(sym))
    return out


def class_pairing(cls: PairingClass) -> PairingGram:
    """A concrete PairingGram realizing the class (all primes combined)."""
    parts = [class_sylow_gram(cls.sylow_symbols(p), p) for p in cls.primes()]
    return combine_sylow(parts)


# ---------------------------------------------------------------------------
# Brute-force isomorphism search


def _killed_by(factors: tuple[int, ...], d: int):
    """Elements z with d * z == 0: coordinate j runs over multiples of
    d_j / gcd(d_j, d)."""
    import itertools

    ranges = []
    for dj in factors:
        step = dj // math.gcd(dj, d)
        ranges.append(range(0, dj, step))
    return itertools.product(*ranges)


def _images_search(factors, target_ig, host_ig, L, count_all: bool) -> int:
    """Count tuples (h_1..h_k) in the host pairing hitting the target Gram.

    When the host pairing is nondegenerate, any tuple matching the full Gram
    of a generating set is automatically a generating set again, so for equal
    groups this counts isomorphisms (and automorphisms when target == host).
    """
    k = len(factors)
    if k == 0:
        return 1
    cands = []
    for i in range(k):
        ci = []
        want = target_ig[i][i]
        for z in _killed_by(factors, factors[i]):
            w = w_vector(z, host_ig, L)
            if sum(wj * zj for wj, zj in zip(w, z)) % L == want:
                ci.append((z, w))
        if not ci:
            return 0
        cands.append(ci)
    total = 0
    chosen: list[tuple[int, ...]] = []

    def rec(level: int) -> bool:
        nonlocal total
        if level == k:
            total += 1
            return not count_all
        trow = target_ig[level]
        for z, w in cands[level]:
            ok = True
            for b in range(level):
                zb = chosen[b]
                if sum(wj * xj for wj, xj in zip(w, zb)) % L != trow[b]:
                    ok = False
                    break
            if ok:
                chosen.append(z)
                if rec(level + 1):
                    return True
                chosen.pop()
        return False

    rec(0)
    return total


def _pairing_data(obj) -> tuple[tuple[int, ...], GramRows]:
    return obj.group.invariant_factors, obj.gram


def is_isomorphic(p1, p2, bound: int = DEFAULT_BOUND) -> bool:
    """Pairing isomorphism: equal groups plus an automorphism moving one Gram
    to the other, found by pruned search over generator images."""
    f1, g1 = _pairing_data(p1)
    f2, g2 = _pairing_data(p2)
    if f1 != f2:
        return False
    order = math.prod(f1)
    if order > bound:
        raise OrderExceedsBoundError(f"order {order} exceeds bound {bound}")
    if not is_nondegenerate(f1, g1, bound) or not is_nondegenerate(f2, g2, bound):
        raise DegeneratePairingError("isomorphism testing expects duality pairings")
    L1, ig1 = scaled_gram(f1, g1)
    L2, ig2 = scaled_gram(f2, g2)
    assert L1 == L2
    return _images_search(f1, ig1, ig2, L1, count_all=False) > 0


def count_aut_pairing(p1, bound: int = DEFAULT_BOUND) -> int:
    """#Aut(group, pairing) by exhaustive pruned enumeration."""
    f, g = _pairing_data(p1)
    order = math.prod(f)
    if order > bound:
        raise OrderExceedsBoundError(f"order {order} exceeds bound {bound}")
    if not is_nondegenerate(f, g, bound):
        raise DegeneratePairingError("automorphism counting expects a duality pairing")
    L, ig = scaled_gram(f, g)
    return _images_search(f, ig, ig, L, count_all=True)


def aut_of_class(cls: PairingClass, bound: int = DEFAULT_BOUND) -> int:
    """#Aut of a class; multiplicative over its Sylow parts."""
    total = 1
    for p in cls.primes():
        total *= count_aut_pairing(class_sylow_gram(cls.sylow_symbols(p), p), bound)
    return total


# ---------------------------------------------------------------------------
# Odd p: orthogonal diagonalization


def classify_odd_p(syl: SylowPairing) -> PairingClass:
    """Normal form at an odd prime.

    Repeatedly split off a generator whose self-pairing is a unit over the
    maximal remaining order (creating one by a single g_i += g_j move if the
    unit only shows up off-diagonal), label it A or B by the Legendre symbol
    of the unit, then apply the relation B+B = A+A until at most one B per
    level remains.
    """
    p = syl.prime
    if p == 2:
        raise ValueError("classify_odd_p needs an odd prime")
    factors = syl.group.invariant_factors
    k = len(factors)
    levels = [_valuation(d, p) for d in factors]
    G = [[syl.gram[i][j] for j in range(k)] for i in range(k)]
    active = list(range(k))
    symbols: list[Symbol] = []

    while active:
        rmax = max(levels[i] for i in active)
        pr = p**rmax
        pivot = next((i for i in active if G[i][i].denominator == pr), None)
        if pivot is None:
            pair = next(
                (
                    (i, j)
                    for i in active
                    for j in active
                    if i != j and G[i][j].denominator == pr
                ),
                None,
            )
            if pair is None:
                raise DegeneratePairingError(
                    f"no unit of order {pr} available; input is not a duality pairing"
                )
            i, j = pair
            # g_i += g_j creates a diagonal unit (2 is invertible, p odd)
            gii = frac_mod1(G[i][i] + 2 * G[i][j] + G[j][j])
            for l in active:
                if l != i:
                    G[i][l] = G[l][i] = frac_mod1(G[i][l] + G[j][l])
            G[i][i] = gii
            pivot = i
        val = G[pivot][pivot]
        u = int(val * pr)
        letter = "A" if pow(u, (p - 1) // 2, p) == 1 else "B"
        symbols.append(Symbol(letter, p, rmax))
        others = [l for l in active if l != pivot]
        u_inv = pow(u, -1, pr)
        coeff = {l: (int(G[pivot][l] * pr) * u_inv) % pr for l in others}
        for a in others:
            ga = G[pivot][a]
            for b in others:
                if b < a:
                    continue
                new = G[a][b] - coeff[b] * ga - coeff[a] * G[pivot][b] + coeff[a] * coeff[b] * val
                G[a][b] = G[b][a] = frac_mod1(new)
        active.remove(pivot)

    # relation: two B blocks of the same level fuse into two A blocks
    by_level: dict[int, list[Symbol]] = {}
    for s in symbols:
        by_level.setdefault(s.level, []).append(s)
    normalized = []
    for r, syms in by_level.items():
        n_b = sum(1 for s in syms if s.letter == "B")
        n_a = len(syms) - n_b
        keep_b = n_b % 2
        normalized.extend([Symbol("A", p, r)] * (n_a + n_b - keep_b))
        normalized.extend([Symbol("B", p, r)] * keep_b)
    return PairingClass(tuple(normalized))


# ---------------------------------------------------------------------------
# p = 2: catalog plus brute-force isomorphism


def _p2_multisets(levels_desc: tuple[int, ...]) -> set[tuple[Symbol, ...]]:
    """All symbol multisets whose blocks realize the given 2-group."""
    if not levels_desc:
        return {()}
    out: set[tuple[Symbol, ...]] = set()
    r = levels_desc[0]
    rest = levels_desc[1:]
    for letter in "ABCD":
        if r >= _MIN_LEVEL_P2[letter]:
            for tail in _p2_multisets(rest):
                ms = tuple(sorted((Symbol(letter, 2, r),) + tail, key=lambda s: s.sort_key))
                out.add(ms)
    if rest and rest[0] == r:
        for letter in "EF":
            if r >= _MIN_LEVEL_P2[letter]:
                for tail in _p2_multisets(rest[1:]):
                    ms = tuple(sorted((Symbol(letter, 2, r),) + tail, key=lambda s: s.sort_key))
                    out.add(ms)
    return out


@functools.cache
def p2_catalog(factors: tuple[int, ...]) -> tuple[tuple[PairingClass, ...], ...]:
    """Isomorphism orbits of generator multisets on one 2-group.

    Each orbit is a tuple of classes whose first entry is the canonical
    representative (minimal under letter-then-level order).
    """
    levels = tuple(sorted((_valuation(d, 2) for d in factors), reverse=True))
    classes = sorted(_p2_multisets(levels), key=_class_sort_key)
    grams = [class_sylow_gram(ms, 2) for ms in classes]
    order = math.prod(factors)
    parent = list(range(len(classes)))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for i in range(len(classes)):
        for j in range(i + 1, len(classes)):
            if find(i) != find(j) and is_isomorphic(grams[i], grams[j], bound=max(order, 2)):
                parent[find(j)] = find(i)
    orbits: dict[int, list[int]] = {}
    for i in range(len(classes)):
        orbits.setdefault(find(i), []).append(i)
    out = []
    for members in orbits.values():
        members.sort()
        out.append(tuple(PairingClass(classes[i]) for i in members))
    out.sort(key=lambda orbit: _class_sort_key(orbit[0].symbols))
    return tuple(out)


def classify_p2(syl: SylowPairing, catalog_bound: int = DEFAULT_CATALOG_BOUND) -> PairingClass:
    """Catalog lookup at p = 2: exactly one orbit matches a duality pairing."""
    if syl.prime != 2:
        raise ValueError("classify_p2 needs prime 2")
    order = syl.group.order
    if order > catalog_bound:
        raise OrderExceedsBoundError(f"order {order} exceeds catalog bound {catalog_bound}")
    factors = syl.group.invariant_factors
    if not is_nondegenerate(factors, syl.gram, max(order, 2)):
        raise DegeneratePairingError("not a duality pairing")
    for orbit in p2_catalog(factors):
        rep = orbit[0]
        if is_isomorphic(syl, class_sylow_gram(rep.symbols, 2), bound=max(order, 2)):
            return rep
    raise NoCatalogMatchError(f"no catalog orbit matched on group {factors}")


def classify_sylow(syl: SylowPairing, catalog_bound: int = DEFAULT_CATALOG_BOUND) -> PairingClass:
    if syl.group.is_trivial:
        return PairingClass(())
    if syl.prime == 2:
        return classify_p2(syl, catalog_bound)
    return classify_odd_p(syl)


def classify_pairing(pairing: PairingGram, catalog_bound: int = DEFAULT_CATALOG_BOUND) -> PairingClass:
    """Full classification across all primes of the group order."""
    symbols: list[Symbol] = []
    for part in sylow_split(pairing):
        symbols.extend(classify_sylow(part, catalog_bound).symbols)
    return PairingClass(tuple(symbols))


def enumerate_classes(p: int, max_order: int) -> list[PairingClass]:
    """All pairing classes on p-groups of order <= max_order, trivial included,
    sorted by (order, name)."""
    out = [PairingClass(())]
    m = 1
    while p**m <= max_order:
        for part in _partitions(m):
            if p == 2:
                factors = tuple(sorted(p**e for e in part))
                out.extend(orbit[0] for orbit in p2_catalog(factors))
            else:
                out.extend(_odd_normal_forms(p, part))
        m += 1
    out.sort(key=lambda c: (c.order, _class_sort_key(c.symbols)))
    return out


def _odd_normal_forms(p: int, part: tuple[int, ...]) -> list[PairingClass]:
    levels: dict[int, int] = {}
    for e in part:
        levels[e] = levels.get(e, 0) + 1
    import itertools

    out = []
    keys = sorted(levels)
    for eps in itertools.product((0, 1), repeat=len(keys)):
        symbols = []
        for r, e in zip(keys, eps):
            symbols.extend([Symbol("A", p, r)] * (levels[r] - e))
            symbols.extend([Symbol("B", p, r)] * e)
        out.append(PairingClass(tuple(symbols)))
    return out


def _partitions(m: int, cap: int | None = None):
    """Partitions of m as descending tuples."""
    if m == 0:
        yield ()
        return
    if cap is None:
        cap = m
    for first in range(min(m, cap), 0, -1):
        for rest in _partitions(m - first, first):
            yield (first,) + rest
