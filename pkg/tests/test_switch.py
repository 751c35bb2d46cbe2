from fractions import Fraction as F

import pytest

from oddwalk.errors import ChainError, InfeasibleParameters
from oddwalk.oracle import count_regular_graphs
from oddwalk.spectral import eigenvalues
from oddwalk.switch import (
    RegularGraph,
    decode,
    enumerate_regular,
    non_incident_pair_count,
    seed_graph,
    switch_analysis,
    switch_chain,
    switch_kernel_row,
)
from oddwalk.walks import congestion, self_loop_walkset

PRISM = RegularGraph.from_edges(6, 3, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5),
                                       (0, 3), (1, 4), (2, 5)])


@pytest.mark.parametrize("n,d,expected", [(4, 1, 3), (5, 2, 12), (6, 3, 70)])
def test_enumeration_counts(n, d, expected):
    # expected values come from the brute-force filter; 12 = 4!/2 labelled 5-cycles
    assert count_regular_graphs(n, d) == expected
    assert enumerate_regular(n, d).N == expected


@pytest.mark.parametrize("n,d", [(4, 1), (5, 2), (6, 2), (6, 3), (7, 2), (8, 1)])
def test_bfs_count_matches_direct_count(n, d):
    assert switch_chain(n, d).space.N == count_regular_graphs(n, d)


@pytest.mark.parametrize("n,d", [(3, 1), (4, 0), (2, 2), (5, 3)])
def test_infeasible_parameters(n, d):
    with pytest.raises(InfeasibleParameters):
        seed_graph(n, d)


@pytest.mark.parametrize("n,d", [(4, 1), (6, 3), (7, 4), (8, 3), (9, 2)])
def test_seed_is_regular(n, d):
    g = seed_graph(n, d)
    assert g.degrees() == [d] * n


def test_perfect_matchings_on_four_vertices_are_uniform():
    for G in decode(enumerate_regular(4, 1), 4, 1):
        row = switch_kernel_row(G)
        assert [p for _, p in row] == [F(1, 3)] * 3
        assert G in [H for H, _ in row]


def test_prism_row_sums_to_one():
    row = switch_kernel_row(PRISM)
    assert sum(p for _, p in row) == 1
    assert dict(row)[PRISM] >= F(1, 3)
    for H, _ in row:
        H.validate()


def test_degenerate_triangle():
    tri = RegularGraph.from_edges(3, 2, [(0, 1), (1, 2), (0, 2)])
    with pytest.raises(ChainError, match="degenerate"):
        switch_kernel_row(tri)


def test_non_incident_count_closed_form():
    assert non_incident_pair_count(6, 3) == 36 - 18
    edges = PRISM.edges()
    brute = sum(1 for i, e in enumerate(edges) for f in edges[i + 1:] if not set(e) & set(f))
    assert brute == non_incident_pair_count(6, 3)


@pytest.mark.parametrize("n,d", [(4, 1), (5, 2), (6, 3)])
def test_holding_and_bound(n, d):
    chain = switch_chain(n, d)
    K = chain.kernel
    assert min(K.holding(x) for x in range(K.N)) >= F(1, 3)
    eta = congestion(K, chain.pi, self_loop_walkset(K))
    assert eta <= 3
    assert eigenvalues(K, chain.pi).lambda_min >= -F(1, 3) - 1e-9


def test_bfs_states_are_regular():
    for G in decode(enumerate_regular(6, 3), 6, 3):
        G.validate()


def test_encoding_roundtrip():
    assert RegularGraph(6, 3, int.from_bytes(PRISM.encode(), "big")) == PRISM


def test_analysis_report():
    report = switch_analysis(4, 1)
    assert report["descriptor"]["N"] == 3
    assert abs(report["spectrum"]["lambda_min"]) < 1e-12
    assert report["walkset"]["eta"] == "3/1"
    assert report["checks"]["lemma1"]["status"] == "pass"
    assert report["bounds"]["literature"]["lambda_1_inverse_best_known"] == "O(d^23 n^8)"
    assert report["bounds"]["family_bound_on_inverse"] == "3/2"
