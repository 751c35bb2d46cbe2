"""Acceptance criteria 1-8. Run with `pytest tests/test_acceptance.py -s` to see the PASS/FAIL lines."""
import json
import time
from fractions import Fraction as F

import numpy as np
import pytest

from oddwalk.cli import main
from oddwalk.contingency import (
    Margins,
    canonical_walkset,
    class_count_limits,
    count_walks_through_edge,
    eta_bound,
    inverse_gap_bound,
)
from oddwalk.oracle import (
    RandomChainSpec,
    SplitMix64,
    direct_count,
    random_odd_walkset,
    random_reversible_chain,
    tv_mixing_time,
)
from oddwalk.report import dumps, strip_timings
from oddwalk.spectral import eigenvalues, lazy_transform, mixing_time_bound, summarize
from oddwalk.walks import congestion, congestion_uniform, edge_usage, self_loop_walkset, validate_walk

from conftest import CONTINGENCY_MARGINS, MATCHING_HOSTS, SWITCH_INSTANCES

EIG_SLACK = 1e-9
LEMMA_SLACK = 1e-8
LAZY_TOL = 1e-8


def report(number, ok, detail):
    print(f"\nCRITERION {number}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, detail


def family_walksets(chains):
    walksets = {name: self_loop_walkset(chain.kernel) for name, chain in chains.items()
                if not name.startswith("contingency")}
    for r, c in CONTINGENCY_MARGINS:
        name = f"contingency r={r} c={c}"
        walksets[name] = canonical_walkset(chains[name], Margins(r, c))[0]
    return walksets


def test_criterion_1_switch(family_chains):
    start = time.perf_counter()
    failures = []
    for n, d in SWITCH_INSTANCES:
        chain = family_chains[f"switch n={n} d={d}"]
        K = chain.kernel
        if chain.space.N != direct_count("switch", n=n, d=d):
            failures.append(f"({n},{d}) N")
        if min(K.holding(x) for x in range(K.N)) < F(1, 3):
            failures.append(f"({n},{d}) holding")
        if congestion(K, chain.pi, self_loop_walkset(K)) > 3:
            failures.append(f"({n},{d}) eta")
        if eigenvalues(K, chain.pi).lambda_min < -1 / 3 - EIG_SLACK:
            failures.append(f"({n},{d}) lambda_min")
    elapsed = time.perf_counter() - start
    if elapsed >= 120:
        failures.append(f"runtime {elapsed:.1f}s")
    report(1, not failures, failures or f"3 instances in {elapsed:.1f}s")


def test_criterion_2_matchings(family_chains):
    start = time.perf_counter()
    failures = []
    for name, G in MATCHING_HOSTS.items():
        chain = family_chains[f"matchings {name}"]
        K = chain.kernel
        if any(sum(p for _, p in row) != 1 for row in K.rows):
            failures.append(f"{name} row sums")
        if min(K.holding(x) for x in range(K.N)) < F(1, G.m):
            failures.append(f"{name} holding")
        if eigenvalues(K, chain.pi).lambda_min < -1 + 2 / G.m - EIG_SLACK:
            failures.append(f"{name} lambda_min")
    elapsed = time.perf_counter() - start
    if elapsed >= 60:
        failures.append(f"runtime {elapsed:.1f}s")
    report(2, not failures, failures or f"3 hosts in {elapsed:.1f}s")


def test_criterion_3_contingency(family_chains):
    start = time.perf_counter()
    failures = []
    for r, c in CONTINGENCY_MARGINS:
        tag = f"r={r} c={c}"
        chain = family_chains[f"contingency {tag}"]
        margins = Margins(r, c)
        m, n = margins.m, margins.n
        K = chain.kernel
        walkset, classes = canonical_walkset(chain, margins)
        for x, w in walkset.items():
            if not validate_walk(K, w).ok or w.length not in (3, 5):
                failures.append(f"{tag} walk {x}")
            if max(w.multiplicities().values()) > 1:
                failures.append(f"{tag} multiplicity {x}")
        limits = class_count_limits(m, n)
        usage = edge_usage(walkset)
        for edge in usage:
            counts = count_walks_through_edge(walkset, classes, edge, usage)
            if any(counts[k] > limits[k] for k in limits):
                failures.append(f"{tag} class counts at {edge}")
        if congestion(K, chain.pi, walkset) > eta_bound(m, n):
            failures.append(f"{tag} eta")
        lam_min = eigenvalues(K, chain.pi).lambda_min
        if lam_min < 1 / inverse_gap_bound(m, n) - 1 - LEMMA_SLACK:
            failures.append(f"{tag} inverse gap")
        if lam_min < -EIG_SLACK:
            failures.append(f"{tag} negative eigenvalue {lam_min}")
    elapsed = time.perf_counter() - start
    if elapsed >= 300:
        failures.append(f"runtime {elapsed:.1f}s")
    report(3, not failures, failures or f"3 margin pairs in {elapsed:.1f}s")


def test_criterion_4_random_walk_bound():
    start = time.perf_counter()
    rng = SplitMix64(20240601)
    passed = 0
    for _ in range(100):
        N = 2 + rng.randbelow(29)
        K, pi = random_reversible_chain(RandomChainSpec(N, rng.next_u64()))
        eta = congestion(K, pi, random_odd_walkset(K, rng.next_u64()))
        passed += eigenvalues(K, pi).lambda_min >= 2 / eta - 1 - LEMMA_SLACK
    elapsed = time.perf_counter() - start
    ok = passed == 100 and elapsed < 60
    report(4, ok, f"{passed}/100 in {elapsed:.1f}s")


def test_criterion_5_mixing_bound(family_chains):
    start = time.perf_counter()
    failures = []
    for name, chain in family_chains.items():
        summary = summarize(eigenvalues(chain.kernel, chain.pi))
        for eps in (0.25, 0.01):
            tau = tv_mixing_time(chain.kernel, chain.pi, eps)
            bound = mixing_time_bound(summary, chain.pi, eps)
            if tau > bound:
                failures.append(f"{name} eps={eps}: {tau} > {bound:.3f}")
    elapsed = time.perf_counter() - start
    if elapsed >= 300:
        failures.append(f"runtime {elapsed:.1f}s")
    report(5, not failures, failures or f"{2 * len(family_chains)} cases in {elapsed:.1f}s")


def test_criterion_6_lazy():
    worst_dev, worst_min = 0.0, np.inf
    for seed in range(20):
        K, pi = random_reversible_chain(RandomChainSpec(3 + seed, seed))
        base = np.asarray(eigenvalues(K, pi).eigenvalues)
        lazy = np.asarray(eigenvalues(lazy_transform(K), pi).eigenvalues)
        worst_dev = max(worst_dev, float(np.max(np.abs(lazy - (1 + base) / 2))))
        worst_min = min(worst_min, float(lazy.min()))
    ok = worst_dev <= LAZY_TOL and worst_min >= -EIG_SLACK
    report(6, ok, f"max deviation {worst_dev:.2e}, min lazy eigenvalue {worst_min:.3e}")


def test_criterion_7_uniform_congestion(family_chains):
    mismatches = []
    for name, ws in family_walksets(family_chains).items():
        chain = family_chains[name]
        if congestion_uniform(chain.kernel, ws) != congestion(chain.kernel, chain.pi, ws):
            mismatches.append(name)
    report(7, not mismatches, mismatches or f"{len(family_chains)} instances equal")


def test_criterion_8_determinism(tmp_path):
    invocations = [["switch", "--n", n, "--d", d] for n, d in SWITCH_INSTANCES]
    for name, G in MATCHING_HOSTS.items():
        path = tmp_path / f"{name}.txt"
        path.write_text(f"{G.n} {G.m}\n" + "".join(f"{u + 1} {v + 1}\n" for u, v in G.edges))
        invocations.append(["matchings", "--graph", path])
    for r, c in CONTINGENCY_MARGINS:
        invocations.append(["contingency", "--rows", ",".join(map(str, r)),
                            "--cols", ",".join(map(str, c))])
    differing = []
    for k, argv in enumerate(invocations):
        texts = []
        for rep in range(2):
            out = tmp_path / f"{k}_{rep}.json"
            code = main([str(a) for a in argv] + ["--report", str(out)])
            texts.append((code, dumps(strip_timings(json.loads(out.read_text())))))
        if texts[0] != texts[1]:
            differing.append(" ".join(map(str, argv)))
    report(8, not differing, differing or f"{len(invocations)} invocations byte-identical")


@pytest.mark.parametrize("name", ["P4", "C6", "grid3x2"])
def test_matchings_hosts_are_the_intended_graphs(name):
    G = MATCHING_HOSTS[name]
    assert (G.n, G.m) == {"P4": (4, 3), "C6": (6, 6), "grid3x2": (6, 7)}[name]
