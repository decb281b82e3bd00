import math
from fractions import Fraction

import pytest

from graphjac.classify import PairingClass, Symbol, aut_of_class, enumerate_classes
from graphjac.theory import (
    PartitionType,
    RankExceedsNError,
    c_p,
    cyclic_p_probability,
    cyclic_probability_global,
    expected_surjections,
    gaussian_binomial,
    mu_measure,
    mu_n_finite,
    mu_n_zerosum,
    odd_cyclic_probability,
    pairing_mass,
    rank_moment,
    trivial_p_probability,
)
from oracles import count_subspaces

TRIVIAL = PairingClass(())
A2 = PairingClass((Symbol("A", 2, 1),))
E4 = PairingClass((Symbol("E", 2, 1),))
A3 = PairingClass((Symbol("A", 3, 1),))
B3 = PairingClass((Symbol("B", 3, 1),))


def test_c_p_values():
    c2 = c_p(2)
    assert Fraction("0.4194") < c2.value < Fraction("0.4195")
    assert c2.truncation_bound < Fraction(1, 10**9)
    c17 = c_p(17)
    assert Fraction("0.9409") < c17.value < Fraction("0.9410")
    assert c_p(2, terms=1).value == Fraction(1, 2)


def test_c_p_monotone_in_terms():
    values = [c_p(2, t).value for t in range(1, 8)]
    assert all(a > b for a, b in zip(values, values[1:]))
    bounds = [c_p(2, t).truncation_bound for t in range(1, 8)]
    assert all(a > b for a, b in zip(bounds, bounds[1:]))
    # the truncation really brackets the next refinement
    assert values[3] - values[4] < bounds[3]


def test_cyclic_p_matches_c_p_quotient():
    # prod (1 - p^-1-2i) over T terms == c_p at T+1 terms / (1 - 1/p)
    for p in (2, 3, 5):
        assert cyclic_p_probability(p, 6).value == c_p(p, 7).value / (1 - Fraction(1, p))


def test_cyclic_global_window():
    pred = cyclic_probability_global()
    assert Fraction("0.7935") < pred.value < Fraction("0.7936")
    assert pred.truncation_bound < Fraction(1, 10**9)
    # one-factor, one-prime truncation of the literal product
    assert cyclic_probability_global(terms=1, prime_bound=2).value == Fraction(7, 8)
    # the literal route agrees with the zeta route within its coarser bound
    lit = cyclic_probability_global(terms=20, prime_bound=100)
    assert abs(lit.value - pred.value) <= lit.truncation_bound + pred.truncation_bound


def test_odd_cyclic_window():
    pred = odd_cyclic_probability()
    assert Fraction("0.9455") < pred.value < Fraction("0.9465")
    assert pred.truncation_bound < Fraction(1, 10**9)
    # regrouping: odd product * 2-factor == global product
    full = cyclic_probability_global()
    two = cyclic_p_probability(2)
    assert abs(pred.value * two.value - full.value) < Fraction(1, 10**8)


def test_mu_measure_examples():
    assert mu_measure(TRIVIAL, p=2).value == c_p(2).value
    assert mu_measure(A2).value == c_p(2).value / 2
    assert mu_measure(E4).value == c_p(2).value / 24


def test_mu_n_finite_closed_cases():
    for p in (2, 3, 5):
        assert mu_n_finite(TRIVIAL, 1, p=p).value == 1 - Fraction(1, p)
    # pooled mass of Z/p at n=1 is (1-1/p)/p
    for p in (3, 5):
        classes = [PairingClass((Symbol("A", p, 1),)), PairingClass((Symbol("B", p, 1),))]
        total = sum(mu_n_finite(c, 1).value for c in classes)
        assert total == (1 - Fraction(1, p)) / p
    assert mu_n_finite(A2, 1).value == (1 - Fraction(1, 2)) / 2


def test_mu_n_limit_is_mu():
    for cls in (TRIVIAL, A2, E4, A3):
        p = cls.primes()[0] if cls.symbols else 2
        limit = mu_measure(cls, p=p)
        finite = mu_n_finite(cls, 60, p=p)
        assert abs(float(finite.value) - float(limit.value)) < 1e-9


def test_mu_n_zerosum_identity():
    for cls in (TRIVIAL, A3, B3, A2):
        p = cls.primes()[0] if cls.symbols else 3
        for n in (2, 3, 5, 8):
            assert mu_n_zerosum(cls, n, p=p).value == mu_n_finite(cls, n - 1, p=p).value
    assert mu_n_zerosum(TRIVIAL, 2, p=5).value == 1 - Fraction(1, 5)


def test_rank_errors():
    with pytest.raises(RankExceedsNError):
        mu_n_finite(PairingClass((Symbol("A", 3, 1), Symbol("A", 3, 1))), 1)
    with pytest.raises(RankExceedsNError):
        mu_n_zerosum(A3, 1)


def test_normalization_partial_sums():
    # sums over order <= 3^m approach 1/C_3 from below, monotonically
    limit = 1 / c_p(3, terms=30).value
    partials = [pairing_mass(3, m) for m in range(5)]
    assert all(a < b for a, b in zip(partials, partials[1:]))
    assert all(s < limit for s in partials)
    assert limit - partials[4] < Fraction(1, 100)


def test_expected_surjections():
    assert expected_surjections(PartitionType((2,)), 3) == 1
    assert expected_surjections(PartitionType((1, 1)), 3) == 3
    assert expected_surjections(PartitionType((1, 1, 1)), 2) == 8
    assert expected_surjections(PartitionType(()), 7) == 1


def test_moment_forms_agree_small_partitions():
    # both exponent forms are evaluated inside expected_surjections; cover all
    # partitions with at most 6 boxes
    def partitions(m, cap=None):
        if m == 0:
            yield ()
            return
        cap = cap or m
        for first in range(min(m, cap), 0, -1):
            for rest in partitions(m - first, first):
                yield (first,) + rest

    for boxes in range(7):
        for part in partitions(boxes):
            asc = tuple(sorted(part))
            expected_surjections(PartitionType(asc), 2)  # raises on disagreement


def test_transpose_involution():
    t = PartitionType((1, 2, 2, 4))
    tt = PartitionType(tuple(sorted(t.transpose())))
    assert tuple(sorted(tt.transpose())) == t.exponents


def test_rank_moments():
    assert rank_moment(1, 2) == 2
    assert rank_moment(1, 97) == 2
    assert rank_moment(2, 2) == 6
    assert rank_moment(0, 5) == 1


def test_q_binomial_identity():
    # sum_j p^(j(j-1)/2) [k choose j]_p == prod_{j<k} (p^j + 1)
    for p in (2, 3, 5):
        for k in range(7):
            total = sum(p ** (j * (j - 1) // 2) * gaussian_binomial(k, j, p) for j in range(k + 1))
            assert total == rank_moment(k, p)


def test_gaussian_binomial_values():
    assert gaussian_binomial(4, 0, 3) == 1
    assert gaussian_binomial(4, 4, 3) == 1
    for p in (2, 3, 5):
        assert gaussian_binomial(2, 1, p) == p + 1
    # brute-force subspace count oracle
    assert gaussian_binomial(3, 1, 2) == count_subspaces(3, 1, 2)
    assert gaussian_binomial(3, 2, 2) == count_subspaces(3, 2, 2)
    assert gaussian_binomial(2, 1, 3) == count_subspaces(2, 1, 3)


def test_prediction_rendering():
    pred = c_p(2)
    assert pred.decimal_str(6) == "0.419422"
    assert float(pred) == pytest.approx(0.4194224, abs=1e-6)
