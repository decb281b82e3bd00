"""Closed-form predictions: normalizing constants, the limiting measure on
p-groups with pairing, exact finite-size cokernel probabilities, cyclic and
trivial-part probabilities, surjection moments, and rank moments.

Truncated products are computed as exact rationals and carry a rigorous tail
bound; the global cyclic probability is evaluated through its zeta
factorization so the bound can actually reach 1e-9 (a bare prime product
truncated at any desk-scale bound cannot).
"""

from __future__ import annotations

import decimal
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .classify import PairingClass, aut_of_class, count_aut_pairing
from .pairings import FiniteAbelianGroup, PairingGram, SylowPairing

DEFAULT_TERMS = 20


class RankExceedsNError(ValueError):
    """Finite-size formula evaluated with matrix size below the group rank."""


@dataclass(frozen=True)
class Prediction:
    """A truncated evaluation: value, rigorous truncation bound, terms used."""

    value: Fraction
    truncation_bound: Fraction
    terms_used: int

    def __float__(self) -> float:
        return float(self.value)

    def decimal_str(self, digits: int = 12) -> str:
        with decimal.localcontext() as ctx:
            ctx.prec = digits
            d = decimal.Decimal(self.value.numerator) / decimal.Decimal(self.value.denominator)
        return str(d)


def _check_prime(p: int) -> None:
    if p < 2 or any(p % d == 0 for d in range(2, math.isqrt(p) + 1)):
        raise ValueError(f"{p} is not prime")


def c_p(p: int, terms: int = DEFAULT_TERMS) -> Prediction:
    """prod_{i>=1} (1 - p^(1-2i)), truncated; the trivial-p-part probability."""
    _check_prime(p)
    if terms < 1:
        raise ValueError("need at least one factor")
    value = Fraction(1)
    for i in range(1, terms + 1):
        value *= 1 - Fraction(1, p ** (2 * i - 1))
    # 0 <= value - true <= value * sum_{i>terms} p^(1-2i)
    tail = Fraction(1, p ** (2 * terms + 1)) / (1 - Fraction(1, p * p))
    return Prediction(value=value, truncation_bound=tail, terms_used=terms)


def trivial_p_probability(p: int, terms: int = DEFAULT_TERMS) -> Prediction:
    return c_p(p, terms)


def cyclic_p_probability(p: int, terms: int = DEFAULT_TERMS) -> Prediction:
    """prod_{i>=1} (1 - p^(-1-2i)); equals c_p / (1 - 1/p)."""
    _check_prime(p)
    if terms < 1:
        raise ValueError("need at least one factor")
    value = Fraction(1)
    for i in range(1, terms + 1):
        value *= 1 - Fraction(1, p ** (2 * i + 1))
    tail = Fraction(1, p ** (2 * terms + 3)) / (1 - Fraction(1, p * p))
    return Prediction(value=value, truncation_bound=tail, terms_used=terms)


def _zeta_fraction(s: int, dps: int = 40) -> Fraction:
    with mpmath.workdps(dps):
        return Fraction(mpmath.nstr(mpmath.zeta(s), dps - 8))


# Conversion slop for the mpmath-evaluated zeta factors (well below any tail).
_ZETA_SLOP = Fraction(1, 10**20)


def cyclic_probability_global(terms: int = DEFAULT_TERMS, prime_bound: int | None = None) -> Prediction:
    """Probability that the whole Jacobian is cyclic.

    Default route: prod_{i=1..terms} zeta(2i+1)^-1, which covers every prime
    at once; the dropped factors differ from 1 by less than 2*2^-(2i+1), so
    the tail bound is ~2^-2T.  Passing prime_bound switches to the literal
    double product over primes <= prime_bound with its honest (much larger)
    prime-tail bound.
    """
    if terms < 1:
        raise ValueError("need at least one factor")
    if prime_bound is None:
        value = Fraction(1)
        for i in range(1, terms + 1):
            value /= _zeta_fraction(2 * i + 1)
        # 1 >= prod_{i>T} zeta(2i+1)^-1 >= 1 - sum_{i>T} (zeta(2i+1)-1)
        # and zeta(s) - 1 <= 2 * 2^-s for s >= 3.
        tail = Fraction(2, 2 ** (2 * terms + 3)) * Fraction(4, 3) + _ZETA_SLOP
        return Prediction(value=value, truncation_bound=tail, terms_used=terms)
    value = Fraction(1)
    per_prime_tail = Fraction(0)
    for p in primes_up_to(prime_bound):
        pred = cyclic_p_probability(p, terms)
        value *= pred.value
        per_prime_tail += pred.truncation_bound
    # primes above the bound each contribute a factor within sum_i p^-(1+2i)
    # of 1; sum over p > bound is below integral of x^-3.
    prime_tail = Fraction(1, 2 * prime_bound**2) * Fraction(4, 3)
    return Prediction(
        value=value, truncation_bound=per_prime_tail + prime_tail, terms_used=terms
    )


def odd_cyclic_probability(terms: int = DEFAULT_TERMS) -> Prediction:
    """Probability that the odd part of the Jacobian is cyclic."""
    if terms < 1:
        raise ValueError("need at least one factor")
    value = Fraction(1)
    for i in range(1, terms + 1):
        s = 2 * i + 1
        value /= _zeta_fraction(s) * (1 - Fraction(1, 2**s))
    tail = Fraction(2, 2 ** (2 * terms + 3)) * Fraction(4, 3) + _ZETA_SLOP
    return Prediction(value=value, truncation_bound=tail, terms_used=terms)


def primes_up_to(bound: int) -> list[int]:
    sieve = bytearray([1]) * (bound + 1) if bound >= 0 else bytearray()
    out = []
    for p in range(2, bound + 1):
        if sieve[p]:
            out.append(p)
            for q in range(p * p, bound + 1, p):
                sieve[q] = 0
    return out


# ---------------------------------------------------------------------------
# The measure on p-groups with pairing and its finite-size refinements


def _group_and_aut(obj, bound: int = 1 << 10) -> tuple[FiniteAbelianGroup, int, int]:
    """Resolve (group, #Aut, prime) from a PairingClass / PairingGram / Sylow part."""
    if isinstance(obj, PairingClass):
        primes = obj.primes()
        if len(primes) > 1:
            raise ValueError("a single-prime class is required")
        group = obj.group
        aut = aut_of_class(obj, bound)
        p = primes[0] if primes else 0
        return group, aut, p
    if isinstance(obj, (PairingGram, SylowPairing)):
        group = obj.group
        primes = group.primes()
        if len(primes) > 1:
            raise ValueError("a p-group pairing is required")
        aut = count_aut_pairing(obj, bound)
        p = primes[0] if primes else 0
        return group, aut, p
    raise TypeError(f"cannot interpret {type(obj).__name__} as a pairing")


def mu_measure(obj, p: int | None = None, terms: int = DEFAULT_TERMS) -> Prediction:
    """Limiting measure C_p / (#group * #Aut(group, pairing))."""
    group, aut, gp = _group_and_aut(obj)
    if p is None:
        p = gp
    if gp and p != gp:
        raise ValueError("prime does not match the group")
    if not p:
        raise ValueError("the trivial group needs an explicit prime")
    base = c_p(p, terms)
    denom = group.order * aut
    return Prediction(
        value=base.value / denom,
        truncation_bound=base.truncation_bound / denom,
        terms_used=terms,
    )


def mu_n_finite(obj, n: int, p: int | None = None) -> Prediction:
    """Exact probability that an n x n Haar symmetric p-adic matrix has this
    cokernel with pairing: the finite-size product divided by #group * #Aut."""
    group, aut, gp = _group_and_aut(obj)
    if p is None:
        p = gp
    if gp and p != gp:
        raise ValueError("prime does not match the group")
    if not p:
        raise ValueError("the trivial group needs an explicit prime")
    _check_prime(p)
    r = group.p_rank(p)
    if r > n:
        raise RankExceedsNError(f"rank {r} exceeds matrix size {n}")
    value = Fraction(1)
    for j in range(n - r + 1, n + 1):
        value *= 1 - Fraction(1, p**j)
    for i in range(1, (n - r + 1) // 2 + 1):  # ceil((n-r)/2)
        value *= 1 - Fraction(1, p ** (2 * i - 1))
    value /= group.order * aut
    return Prediction(value=value, truncation_bound=Fraction(0), terms_used=n)


def mu_n_zerosum(obj, n: int, p: int | None = None) -> Prediction:
    """Same for the zero-row-sum ensemble of size n; equals mu_n_finite at n-1."""
    group, aut, gp = _group_and_aut(obj)
    if p is None:
        p = gp
    if gp and p != gp:
        raise ValueError("prime does not match the group")
    if not p:
        raise ValueError("the trivial group needs an explicit prime")
    _check_prime(p)
    r = group.p_rank(p)
    if r > n - 1:
        raise RankExceedsNError(f"rank {r} exceeds torsion size {n - 1}")
    value = Fraction(1)
    for j in range(n - r, n):
        value *= 1 - Fraction(1, p**j)
    for i in range(1, (n - r) // 2 + 1):  # ceil((n-1-r)/2)
        value *= 1 - Fraction(1, p ** (2 * i - 1))
    value /= group.order * aut
    return Prediction(value=value, truncation_bound=Fraction(0), terms_used=n)


def pairing_mass(p: int, max_m: int) -> Fraction:
    """sum of 1/(#group * #Aut) over all classes of order p^m, m <= max_m.

    Converges up to prod (1 - p^(1-2i))^-1 from below as max_m grows.
    """
    from .classify import enumerate_classes

    total = Fraction(0)
    for cls in enumerate_classes(p, p**max_m):
        total += Fraction(1, cls.order * aut_of_class(cls))
    return total


# ---------------------------------------------------------------------------
# Moments


@dataclass(frozen=True)
class PartitionType:
    """Target group prod Z/p^{e_i} recorded by its exponents e_1 <= ... <= e_r."""

    exponents: tuple[int, ...]

    def __post_init__(self):
        if any(e < 1 for e in self.exponents):
            raise ValueError("exponents must be >= 1")
        if list(self.exponents) != sorted(self.exponents):
            raise ValueError("exponents must be ascending")

    @classmethod
    def from_factors(cls, factors, p: int) -> "PartitionType":
        exps = []
        for d in factors:
            e = 0
            while d % p == 0:
                d //= p
                e += 1
            if d != 1:
                raise ValueError("factors must be powers of p")
            exps.append(e)
        return cls(tuple(sorted(exps)))

    @property
    def parts(self) -> int:
        return len(self.exponents)

    @property
    def boxes(self) -> int:
        return sum(self.exponents)

    def transpose(self) -> tuple[int, ...]:
        """Conjugate partition of the descending arrangement."""
        if not self.exponents:
            return ()
        top = self.exponents[-1]
        return tuple(sum(1 for e in self.exponents if e >= j) for j in range(1, top + 1))


def expected_surjections(target: PartitionType, p: int) -> int:
    """Mean number of surjections onto the target under the limiting measure:
    p^((r-1)e_1 + (r-2)e_2 + ... + e_{r-1}).  The transpose form
    p^(sum_j l'_j (l'_j - 1)/2) must agree and both are evaluated."""
    r = target.parts
    exp_direct = sum((r - i) * e for i, e in enumerate(target.exponents, start=1))
    exp_transpose = sum(l * (l - 1) // 2 for l in target.transpose())
    if exp_direct != exp_transpose:
        raise AssertionError("moment exponent forms disagree; partition bug")
    return p**exp_direct


def rank_moment(k: int, p: int) -> int:
    """Mean of p^(k * p-rank) under the limiting measure: prod_{j<k} (p^j + 1)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return math.prod(p**j + 1 for j in range(k))


def gaussian_binomial(k: int, j: int, p: int) -> int:
    """Number of j-dimensional subspaces of a k-dimensional F_p space."""
    if not 0 <= j <= k:
        raise ValueError("need 0 <= j <= k")
    num = 1
    den = 1
    for i in range(j):
        num *= p**k - p**i
        den *= p**j - p**i
    assert num % den == 0
    return num // den
