import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from graphjac.graphs import Graph, graph_from_edge_list, is_connected, potential_edges, reduced_laplacian
from graphjac.intlinalg import rational_inverse
from graphjac.pairings import (
    DisconnectedGraphError,
    FiniteAbelianGroup,
    PairingGram,
    SylowPairing,
    combine_sylow,
    frac_mod1,
    is_nondegenerate,
    jacobian_with_pairing,
    pairing_from_matrix,
    sylow_split,
)
from graphjac.classify import is_isomorphic
from oracles import pairing_table


def connected_graphs(max_n=7):
    def build(n):
        pairs = potential_edges(n)
        return st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)).map(
            lambda mask: Graph(n=n, edges=tuple(e for e, b in zip(pairs, mask) if b))
        )

    return st.integers(2, max_n).flatmap(build).filter(is_connected)


def test_group_validation():
    FiniteAbelianGroup((2, 4, 8))
    with pytest.raises(ValueError):
        FiniteAbelianGroup((4, 2))
    with pytest.raises(ValueError):
        FiniteAbelianGroup((1, 2))
    assert FiniteAbelianGroup(()).order == 1
    assert FiniteAbelianGroup((2, 6)).p_rank(2) == 2
    assert FiniteAbelianGroup((2, 6)).p_rank(3) == 1


def test_jacobian_examples():
    path = graph_from_edge_list(3, [(0, 1), (1, 2)])
    assert jacobian_with_pairing(path).group.invariant_factors == ()

    tri = graph_from_edge_list(3, [(0, 1), (1, 2), (0, 2)])
    P = jacobian_with_pairing(tri)
    assert P.group.invariant_factors == (3,)
    # value is 2/3 up to multiplication by squares of units mod 3
    assert P.gram[0][0] in (Fraction(2, 3),)

    k4 = graph_from_edge_list(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
    assert jacobian_with_pairing(k4).group.invariant_factors == (4, 4)

    with pytest.raises(DisconnectedGraphError):
        jacobian_with_pairing(graph_from_edge_list(4, [(0, 1), (2, 3)]))


def test_gram_contract_against_rational_inverse():
    # binding contract: gram[i][j] == g_j^T A^{-1} g_i mod 1 on the SNF lifts
    tri = graph_from_edge_list(4, [(0, 1), (1, 2), (0, 2), (2, 3)])
    P = jacobian_with_pairing(tri)
    A = reduced_laplacian(tri)
    ainv = rational_inverse(A)
    k = len(P.group.invariant_factors)
    for i in range(k):
        for j in range(k):
            gi, gj = P.lifts[i], P.lifts[j]
            val = sum(gj[r] * sum(ainv[r][c] * gi[c] for c in range(len(gi))) for r in range(len(gj)))
            assert frac_mod1(val) == P.gram[i][j]


@settings(max_examples=40, deadline=None)
@given(connected_graphs(max_n=6))
def test_gram_contract_random_graphs(g):
    P = jacobian_with_pairing(g)
    A = reduced_laplacian(g)
    n = g.n - 1
    ainv = rational_inverse(A)
    for i, gi in enumerate(P.lifts):
        img = [sum(ainv[r][c] * gi[c] for c in range(n)) for r in range(n)]
        for j, gj in enumerate(P.lifts):
            assert frac_mod1(sum(a * b for a, b in zip(gj, img))) == P.gram[i][j]
    # d_i g_i must vanish in the cokernel: d_i * gram row is integral
    for i, d in enumerate(P.group.invariant_factors):
        assert all((d * e).denominator == 1 for e in P.gram[i])


@settings(max_examples=30, deadline=None)
@given(connected_graphs(max_n=6), st.data())
def test_deleted_vertex_invariance(g, data):
    v = data.draw(st.integers(0, g.n - 1))
    P1 = jacobian_with_pairing(g)
    P2 = jacobian_with_pairing(g, delete_vertex=v)
    if P1.order <= 512:
        assert is_isomorphic(P1, P2, bound=1024)


def test_sylow_split_z6_example():
    P = PairingGram(group=FiniteAbelianGroup((6,)), gram=((Fraction(1, 6),),))
    parts = {s.prime: s for s in sylow_split(P)}
    assert parts[2].group.invariant_factors == (2,)
    assert parts[2].gram == ((Fraction(1, 2),),)
    assert parts[3].group.invariant_factors == (3,)
    assert parts[3].gram == ((Fraction(2, 3),),)
    # verify against the brute-force pairing table on Z/6: delta(3,3) = 9/6 = 1/2
    table = pairing_table((6,), P.gram)
    assert table[((3,), (3,))] == Fraction(1, 2)
    assert table[((2,), (2,))] == Fraction(2, 3)
    assert table[((3,), (2,))] == Fraction(0)  # cross-prime orthogonality


def test_sylow_split_trivial_and_prime_power():
    assert sylow_split(PairingGram(group=FiniteAbelianGroup(()), gram=())) == []
    P = pairing_from_matrix([[4, 1], [1, 4]])
    assert P.group.invariant_factors == (15,)
    parts = sylow_split(P)
    assert [s.prime for s in parts] == [3, 5]

    P44 = pairing_from_matrix([[3, -1, -1], [-1, 3, -1], [-1, -1, 3]])
    parts = sylow_split(P44)
    assert len(parts) == 1 and parts[0].prime == 2
    assert parts[0].group.invariant_factors == (4, 4)
    assert parts[0].gram == P44.gram


@settings(max_examples=25, deadline=None)
@given(connected_graphs(max_n=6))
def test_sylow_reassembly(g):
    P = jacobian_with_pairing(g)
    if not (1 < P.order <= 200):
        return
    rebuilt = combine_sylow(sylow_split(P))
    assert rebuilt.group == P.group
    assert is_isomorphic(rebuilt, P, bound=256)


@settings(max_examples=30, deadline=None)
@given(connected_graphs(max_n=6))
def test_duality_injectivity(g):
    P = jacobian_with_pairing(g)
    if P.order <= 512:
        assert is_nondegenerate(P.group.invariant_factors, P.gram, bound=512)


def test_gram_validation():
    with pytest.raises(ValueError):
        PairingGram(group=FiniteAbelianGroup((2,)), gram=((Fraction(1, 3),),))
    with pytest.raises(ValueError):
        PairingGram(
            group=FiniteAbelianGroup((2, 2)),
            gram=((Fraction(0), Fraction(1, 2)), (Fraction(0), Fraction(0))),
        )
    with pytest.raises(ValueError):
        SylowPairing(prime=2, group=FiniteAbelianGroup((6,)), gram=((Fraction(1, 6),),))
