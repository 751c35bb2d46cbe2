from fractions import Fraction as F

import pytest

from oddwalk.errors import ChainError, InfeasibleParameters
from oddwalk.matchings import (
    HostGraph,
    Matching,
    matchings_analysis,
    matchings_chain,
    matchings_kernel_row,
    matchings_states,
    parse_graph,
    read_graph,
)
from oddwalk.oracle import count_matchings
from oddwalk.spectral import eigenvalues

from conftest import MATCHING_HOSTS

P4 = HostGraph.path(4)  # edges 0:12, 1:23, 2:34 (1-based labels)


def m(*edges):
    return Matching(sum(1 << k for k in edges))


def test_path_states():
    space = matchings_states(P4)
    found = {int.from_bytes(s, "big") for s in space.states}
    assert found == {0b101, 0b001, 0b010, 0b100}


@pytest.mark.parametrize("name,expected", [("P4", 4), ("C6", 11), ("grid3x2", 14)])
def test_state_counts_match_brute_force(name, expected):
    G = MATCHING_HOSTS[name]
    assert count_matchings(G) == expected
    assert matchings_states(G).N == expected


def test_perfect_matching_row_on_path():
    row = dict(matchings_kernel_row(m(0, 2), P4))
    assert row == {m(2): F(1, 3), m(0): F(1, 3), m(0, 2): F(1, 3)}


def test_near_perfect_row_on_path():
    row = dict(matchings_kernel_row(m(1), P4))
    # 12 slides (2 is matched by 23), 34 slides, 23 is in M so the chain stays
    assert row == {m(0): F(1, 3), m(2): F(1, 3), m(1): F(1, 3)}


def test_add_move():
    row = dict(matchings_kernel_row(m(0), P4))
    assert row[m(0, 2)] == F(1, 3)


def test_rows_exact_and_symmetric():
    for G in MATCHING_HOSTS.values():
        K = matchings_chain(G).kernel
        for x in range(K.N):
            assert sum(p for _, p in K.rows[x]) == 1
            assert K.holding(x) >= F(1, G.m)
        for x, y, p in K.edges():
            assert K(y, x) == p


def test_move_sizes():
    G = MATCHING_HOSTS["grid3x2"]
    chain = matchings_chain(G)
    sizes = [bin(int.from_bytes(s, "big")).count("1") for s in chain.space.states]
    for x, y, _ in chain.kernel.edges():
        assert abs(sizes[x] - sizes[y]) <= 1


@pytest.mark.parametrize("name", list(MATCHING_HOSTS))
def test_lambda_min_bound(name):
    G = MATCHING_HOSTS[name]
    chain = matchings_chain(G)
    assert eigenvalues(chain.kernel, chain.pi).lambda_min >= -1 + F(2, G.m) - 1e-9


def test_rejects_small_or_odd_hosts():
    with pytest.raises(InfeasibleParameters):
        HostGraph(2, ((0, 1),))
    with pytest.raises(InfeasibleParameters):
        HostGraph(5, ((0, 1),))


def test_perfect_matching_host_rejected():
    G = HostGraph(4, ((0, 1), (2, 3)))
    with pytest.raises(InfeasibleParameters, match="perfect matching"):
        matchings_analysis(G)


def test_disconnected_host_rejected():
    G = HostGraph(6, ((0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)))
    with pytest.raises(InfeasibleParameters, match="connected"):
        matchings_chain(G)


def test_no_perfect_matching():
    star = HostGraph(4, ((0, 1), (0, 2), (0, 3)))
    with pytest.raises(InfeasibleParameters, match="no perfect matching"):
        matchings_chain(star)


def test_parse_graph_file(tmp_path):
    text = "# path\n4 3\n\n1 2\n2 3  # middle\n3 4\n"
    path = tmp_path / "p4.txt"
    path.write_text(text)
    assert read_graph(path) == P4


@pytest.mark.parametrize("text,msg", [
    ("", "empty"),
    ("4 2\n1 2\n", "announces"),
    ("4 1\n1 5\n", "1..4"),
    ("4 1\n1 x\n", "two integers"),
    ("4 2\n1 2\n2 1\n", "repeated"),
])
def test_parse_errors(text, msg):
    with pytest.raises(ChainError, match=msg):
        parse_graph(text)


def test_analysis_report():
    report = matchings_analysis(MATCHING_HOSTS["C6"])
    # M = {12, 45} stays put only on its own two edges: P(M, M) = 2/6
    assert report["walkset"]["eta"] == "3/1"
    assert report["walkset"]["min_holding"] == "1/3"
    assert report["bounds"]["family_bound_on_inverse"] == "3/1"
    assert report["bounds"]["literature"]["lambda_1_inverse_best_known"] == "O(n|E|q(n))"
    assert all(v["status"] == "pass" for v in report["checks"].values())
