"""Haar-random symmetric matrices over Z_p at truncated precision, and
Smith reduction over Z/p^M with minimal-valuation pivoting.

A sample holds residues mod p^N (each p-adic digit uniform).  Extraction
lifts the residues to integers and works mod p^M with M = 2N + 2: transforms
known only mod p^N cannot pin Gram numerators once a_i + a_max > N, while at
2N + 2 digits every pairing value of the lift is provably exact whenever the
acceptance rule (largest elementary divisor valuation <= N - guard) admits
the sample at all.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .classify import classify_sylow
from .graphs import trial_rng
from .pairings import (
    FiniteAbelianGroup,
    SylowPairing,
    pairing_from_matrix,
    sylow_split,
    trivial_sylow,
)
from .stats import wilson_interval


class PrecisionExceeded:
    """Outcome marker: elementary divisors too close to the precision ceiling."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "PrecisionExceeded"


PRECISION_EXCEEDED = PrecisionExceeded()


@dataclass(frozen=True)
class PadicSymMatrix:
    """Symmetric n x n residues mod p^precision."""

    p: int
    precision: int
    n: int
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        mod = self.p**self.precision
        if len(self.entries) != self.n or any(len(r) != self.n for r in self.entries):
            raise ValueError("entries must be n x n")
        for i in range(self.n):
            for j in range(self.n):
                e = self.entries[i][j]
                if not 0 <= e < mod:
                    raise ValueError("residue out of range")
                if e != self.entries[j][i]:
                    raise ValueError("entries must be symmetric")

    def row_sums(self) -> tuple[int, ...]:
        mod = self.p**self.precision
        return tuple(sum(row) % mod for row in self.entries)


def _uniform_residues(rng, p: int, N: int, count: int) -> list[int]:
    pN = p**N
    if pN < 1 << 63:
        return [int(v) for v in rng.integers(0, pN, size=count, dtype=np.int64)]
    digits = rng.integers(0, p, size=(count, N), dtype=np.int64)
    vals = []
    for row in digits:
        x = 0
        for d in row[::-1]:
            x = x * p + int(d)
        vals.append(x)
    return vals


def sample_sym(p: int, N: int, n: int, seed: int, trial: int) -> PadicSymMatrix:
    """Additive-Haar sample truncated to N digits: entries with i <= j are
    independent uniform residues, deterministic in (seed, trial)."""
    if N < 1:
        raise ValueError("need at least one digit")
    rng = trial_rng(seed, trial)
    vals = _uniform_residues(rng, p, N, n * (n + 1) // 2)
    ent = [[0] * n for _ in range(n)]
    it = iter(vals)
    for i in range(n):
        for j in range(i, n):
            v = next(it)
            ent[i][j] = ent[j][i] = v
    return PadicSymMatrix(p=p, precision=N, n=n, entries=tuple(map(tuple, ent)))


def sample_sym_zerosum(p: int, N: int, n: int, seed: int, trial: int) -> PadicSymMatrix:
    """Haar sample from the zero-row-sum subgroup: the principal (n-1)-block
    is Haar-uniform and the last row/column is the unique zero-sum extension.
    The block draw equals sample_sym(p, N, n-1, seed, trial)."""
    if n < 2:
        raise ValueError("zero-sum sampling needs n >= 2")
    block = sample_sym(p, N, n - 1, seed, trial)
    pN = p**N
    ent = [[0] * n for _ in range(n)]
    corner = 0
    for i in range(n - 1):
        for j in range(n - 1):
            ent[i][j] = block.entries[i][j]
        s = sum(block.entries[i])
        ent[i][n - 1] = ent[n - 1][i] = (-s) % pN
        corner += s
    ent[n - 1][n - 1] = corner % pN
    return PadicSymMatrix(p=p, precision=N, n=n, entries=tuple(map(tuple, ent)))


# ---------------------------------------------------------------------------
# Smith reduction over Z/p^M


@dataclass
class ModSnf:
    """Diagonalization mod p^M: exps[i] is the valuation of the i-th divisor
    (M as a sentinel where the residue vanishes mod p^M), units[i] its unit
    part, u_inv and v the tracked transforms with U A V = D mod p^M."""

    p: int
    M: int
    exps: tuple[int, ...]
    units: tuple[int, ...]
    u_inv: np.ndarray | None
    v: np.ndarray | None


def _int64_safe(p: int, M: int, n: int) -> bool:
    pM = p**M
    return pM * pM * (n + 1) < 1 << 62


def int64_precision(p: int, n: int) -> int:
    """Largest M with int64-safe arithmetic for an n x n reduction."""
    M = 1
    while _int64_safe(p, M + 1, n):
        M += 1
    return M


def modular_snf(mat, p: int, M: int, want_transforms: bool = True) -> ModSnf:
    """Valuation-pivot Smith reduction of an integer matrix over Z/p^M.

    Pivots take the minimal-valuation entry of the remaining block (row-major
    tie break); clearing divides exactly, so each pivot needs one pass and the
    diagonal valuations come out ascending.  Row operations E update U via
    U <- EU, hence u_inv <- u_inv E^{-1}; column operations update v <- vE.
    """
    rows = [list(map(int, r)) for r in mat]
    n = len(rows)
    pM = p**M
    if n == 0:
        return ModSnf(p=p, M=M, exps=(), units=(), u_inv=None, v=None)
    dtype = np.int64 if _int64_safe(p, M, n) else object
    A = np.array([[x % pM for x in row] for row in rows], dtype=dtype)
    eye = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    Ui = np.array(eye, dtype=dtype) if want_transforms else None
    V = np.array(eye, dtype=dtype) if want_transforms else None

    for k in range(n):
        sub = A[k:, k:]
        vals = np.full(sub.shape, M, dtype=np.int64)
        cur = sub.copy()
        alive = np.not_equal(cur, 0)
        v = 0
        while v < M and alive.any():
            nz = alive & np.not_equal(cur % p, 0)
            vals[nz] = v
            alive &= ~nz
            cur = np.where(alive, cur // p, 0)
            v += 1
        flat = int(np.argmin(vals))
        a = int(vals.flat[flat])
        if a >= M:
            break  # remaining block vanishes mod p^M
        i = k + flat // (n - k)
        j = k + flat % (n - k)
        if i != k:
            A[[k, i], :] = A[[i, k], :]
            if Ui is not None:
                Ui[:, [k, i]] = Ui[:, [i, k]]
        if j != k:
            A[:, [k, j]] = A[:, [j, k]]
            if V is not None:
                V[:, [k, j]] = V[:, [j, k]]
        pa = p**a
        rest = pM // pa
        unit = (int(A[k, k]) // pa) % rest
        uinv = pow(unit, -1, rest)
        col = A[:, k].copy()
        col[k] = 0
        f = ((col // pa) * uinv) % rest
        if np.any(np.not_equal(f, 0)):
            # rows: A <- (I - f e_k^T) A, so u_inv gains +(u_inv f) in column k
            A = (A - np.outer(f, A[k, :])) % pM
            if Ui is not None:
                Ui[:, k] = (Ui[:, k] + Ui.dot(f)) % pM
        row = A[k, :].copy()
        row[k] = 0
        g = ((row // pa) * uinv) % rest
        if np.any(np.not_equal(g, 0)):
            # columns: A <- A (I - e_k g^T), so v loses outer(v[:,k], g)
            A = (A - np.outer(A[:, k], g)) % pM
            if V is not None:
                V = (V - np.outer(V[:, k], g)) % pM

    exps = []
    units = []
    for k in range(n):
        d = int(A[k, k])
        if d == 0:
            exps.append(M)
            units.append(0)
        else:
            a = 0
            while d % p == 0:
                d //= p
                a += 1
            exps.append(a)
            units.append(d % (pM // p**a))
    return ModSnf(p=p, M=M, exps=tuple(exps), units=tuple(units), u_inv=Ui, v=V)


def _gram_from_modsnf(snf: ModSnf) -> SylowPairing:
    """Sylow pairing read off the tracked transforms.

    Generator i lifts to column i of u_inv; A^{-1} g_i = v[:, i] / (p^a_i u_i),
    so gram[i][j] = (g_j . v[:, i]) * u_i^{-1} / p^{a_i} mod 1.
    """
    p, M = snf.p, snf.M
    pM = p**M
    keep = [i for i, e in enumerate(snf.exps) if e >= 1]
    factors = tuple(p ** snf.exps[i] for i in keep)
    if not keep:
        return trivial_sylow(p)
    k = len(keep)
    gram = [[Fraction(0)] * k for _ in range(k)]
    for a in range(k):
        ia = keep[a]
        pa = p ** snf.exps[ia]
        uinv_a = pow(snf.units[ia], -1, pa)
        va = snf.v[:, ia]
        for b in range(k):
            ib = keep[b]
            s = int(np.dot(snf.u_inv[:, ib], va)) % pM
            gram[b][a] = Fraction((s * uinv_a) % pa, pa)
    for a in range(k):
        for b in range(k):
            if gram[a][b] != gram[b][a]:
                raise AssertionError("extracted Gram is not symmetric; transform bug")
    return SylowPairing(
        prime=p,
        group=FiniteAbelianGroup(factors),
        gram=tuple(tuple(row) for row in gram),
    )


def cokernel_pairing(sample: PadicSymMatrix, guard: int = 4, zerosum: bool = False):
    """Cokernel p-group with pairing, or PRECISION_EXCEEDED.

    The sample is accepted only when the largest elementary divisor valuation
    is at most N - guard; zero-sum samples are reduced through their principal
    (n-1)-block, which carries the torsion part and its pairing.
    """
    if guard < 1:
        raise ValueError("guard must be >= 1")
    rows = [list(r) for r in sample.entries]
    if zerosum:
        rows = [r[:-1] for r in rows[:-1]]
    return sylow_from_int_matrix(rows, sample.p, sample.precision, guard)


def sylow_from_int_matrix(rows, p: int, N: int, guard: int):
    """Classify the integer lift of residues mod p^N, working mod p^(2N+2)."""
    n = len(rows)
    if n == 0:
        return trivial_sylow(p)
    M = 2 * N + 2
    snf = modular_snf(rows, p, M)
    a_max = max(snf.exps, default=0)
    if a_max > N - guard:
        return PRECISION_EXCEEDED
    return _gram_from_modsnf(snf)


def sylow_pairing_of_matrix(rows, p: int) -> SylowPairing:
    """Sylow-p pairing of a nonsingular symmetric integer matrix.

    Fast path: int64 reduction mod p^M at the largest safe M, accepted only
    when 2 a_max + 2 <= M (the stability bound that makes the lift's pairing
    provably that of the matrix).  Anything else falls back to the exact
    bigint pipeline.
    """
    n = len(rows)
    if n == 0:
        return trivial_sylow(p)
    M = int64_precision(p, n)
    if M >= 6:
        snf = modular_snf(rows, p, M)
        a_max = max(snf.exps, default=0)
        if 2 * a_max + 2 <= M:
            return _gram_from_modsnf(snf)
    full = pairing_from_matrix([list(map(int, r)) for r in rows])
    for part in sylow_split(full):
        if part.prime == p:
            return part
    return trivial_sylow(p)


def group_exponents_of_matrix(rows, p: int, cap: int | None = None) -> tuple[int, ...]:
    """Valuations of the p-part elementary divisors (those >= 1), with values
    at or above the working precision reported as the precision (a safe floor;
    callers cap at small exponents anyway)."""
    n = len(rows)
    if n == 0:
        return ()
    M = int64_precision(p, n)
    if cap is not None and cap + 1 < M:
        M = cap + 1
    snf = modular_snf(rows, p, M, want_transforms=False)
    return tuple(e for e in snf.exps if e >= 1)


# ---------------------------------------------------------------------------
# Monte Carlo estimation


def class_key(syl: SylowPairing, max_order: int, catalog_bound: int = 64) -> str:
    """Frequency-table key: the class name, or an overflow bucket."""
    if syl.order > max_order:
        return f"other({syl.order})"
    return classify_sylow(syl, catalog_bound).name


def tally_mu_n(
    p: int,
    n: int,
    trials: int,
    seed: int,
    *,
    N: int = 20,
    guard: int = 4,
    zerosum: bool = False,
    max_order: int = 8,
    catalog_bound: int = 64,
    trial_start: int = 0,
) -> tuple[dict[str, int], int]:
    """Raw per-class counts over [trial_start, trial_start + trials); the
    second value counts PrecisionExceeded outcomes (reported separately)."""
    counts: dict[str, int] = {}
    exceeded = 0
    sampler = sample_sym_zerosum if zerosum else sample_sym
    for t in range(trial_start, trial_start + trials):
        mat = sampler(p, N, n, seed, t)
        out = cokernel_pairing(mat, guard=guard, zerosum=zerosum)
        if out is PRECISION_EXCEEDED:
            exceeded += 1
        else:
            key = class_key(out, max_order, catalog_bound)
            counts[key] = counts.get(key, 0) + 1
    return counts, exceeded


def estimate_mu_n(p: int, n: int, trials: int, seed: int, **opts) -> dict:
    """Empirical class frequencies with Wilson intervals.

    Returns {"total": T, "precision_exceeded": e, "classes": {key:
    {"count", "proportion", "wilson_lo", "wilson_hi"}}}.
    """
    counts, exceeded = tally_mu_n(p, n, trials, seed, **opts)
    classes = {}
    for key in sorted(counts):
        c = counts[key]
        lo, hi = wilson_interval(c, trials)
        classes[key] = {
            "count": c,
            "proportion": c / trials,
            "wilson_lo": lo,
            "wilson_hi": hi,
        }
    return {"total": trials, "precision_exceeded": exceeded, "classes": classes}


def tally_surjection_moments(
    p: int,
    n: int,
    target_exponent_lists,
    trials: int,
    seed: int,
    *,
    N: int = 20,
    zerosum: bool = False,
    trial_start: int = 0,
) -> tuple[list[int], list[int], list[int], int]:
    """Per-target sums and sums of squares of the surjection counts, plus the
    sums for p^rank, over the given trial range."""
    targets = [tuple(sorted(t)) for t in target_exponent_lists]
    cap = max((t[-1] for t in targets if t), default=1)
    sums = [0] * len(targets)
    sumsqs = [0] * len(targets)
    rank_sums = [0, 0]
    sampler = sample_sym_zerosum if zerosum else sample_sym
    for t in range(trial_start, trial_start + trials):
        mat = sampler(p, N, n, seed, t)
        rows = [list(r) for r in mat.entries]
        if zerosum:
            rows = [r[:-1] for r in rows[:-1]]
        exps = group_exponents_of_matrix(rows, p, cap=cap)
        for i, texp in enumerate(targets):
            c = count_surjections(exps, texp, p)
            sums[i] += c
            sumsqs[i] += c * c
        v = p ** len(exps)
        rank_sums[0] += v
        rank_sums[1] += v * v
    return sums, sumsqs, rank_sums, trials


def estimate_surjection_moment(
    p: int, n: int, target_factors, trials: int, seed: int, *, N: int = 20
) -> tuple[float, float]:
    """Monte Carlo mean of #Sur(coker, target) and its standard error."""
    exps = []
    for d in target_factors:
        e = 0
        while d % p == 0:
            d //= p
            e += 1
        if d != 1:
            raise ValueError("target must be a p-group for the given prime")
        exps.append(e)
    sums, sumsqs, _, total = tally_surjection_moments(p, n, [exps], trials, seed, N=N)
    mean = sums[0] / total
    var = (sumsqs[0] - total * mean * mean) / (total - 1) if total > 1 else 0.0
    return mean, math.sqrt(max(var, 0.0) / total)


# ---------------------------------------------------------------------------
# Brute-force surjection counting (the Monte Carlo side of the moments)


def count_surjections(exponents, target_exponents, p: int) -> int:
    """Number of surjections from the p-group with the given divisor
    valuations onto prod Z/p^{e}: enumerate generator images killed by the
    right powers and keep the tuples whose mod-p reductions span.
    """
    tgt = tuple(sorted(target_exponents))
    s = len(tgt)
    if s == 0:
        return 1
    emax = tgt[-1]
    caps = [min(a, emax) for a in exponents if a >= 1]
    r = len(caps)
    if r < s:
        return 0
    cand_lists = []
    size = 1
    for c in caps:
        cands = list(itertools.product(*(range(0, p**e, p ** max(e - c, 0)) for e in tgt)))
        cand_lists.append(cands)
        size *= len(cands)
        if size > 10**7:
            raise RuntimeError("surjection enumeration too large; unexpected rank")
    count = 0
    for images in itertools.product(*cand_lists):
        rows = [[z % p for z in im] for im in images]
        if _fp_rank(rows, p) == s:
            count += 1
    return count


def _fp_rank(rows, p: int) -> int:
    mat = [list(r) for r in rows]
    rank = 0
    cols = len(mat[0]) if mat else 0
    for c in range(cols):
        piv = next((i for i in range(rank, len(mat)) if mat[i][c] % p), None)
        if piv is None:
            continue
        mat[rank], mat[piv] = mat[piv], mat[rank]
        inv = pow(mat[rank][c], -1, p)
        mat[rank] = [(x * inv) % p for x in mat[rank]]
        for i in range(len(mat)):
            if i != rank and mat[i][c]:
                f = mat[i][c]
                mat[i] = [(x - f * y) % p for x, y in zip(mat[i], mat[rank])]
        rank += 1
        if rank == len(mat):
            break
    return rank
