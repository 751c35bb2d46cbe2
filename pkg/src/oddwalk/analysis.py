"""End-to-end analysis of one chain instance, producing a JSON-ready report.

Every verdict is ``{"status": "pass" | "fail" | "skipped", "reason": str}``.
Exact rationals are rendered as ``"p/q"`` strings.
"""

from __future__ import annotations

import math
import time
from contextlib import contextmanager
from fractions import Fraction

from .chain import Chain, check_detailed_balance, check_ergodicity
from .contingency import (
    BAD,
    LITERATURE_LAMBDA1 as CONTINGENCY_LAMBDA1,
    Margins,
    canonical_walkset,
    class_count_limits,
    count_walks_through_edge,
    eta_bound,
    inverse_gap_bound,
    tables_of,
)
from .errors import ChainError, SolverError
from .oracle import OracleTooLarge, power_iteration_lambda1, tv_mixing_time
from .spectral import (
    LAMBDA_SLACK,
    eigenvalues,
    lazy_transform,
    mixing_time_bound,
    summarize,
)
from .walks import (
    WalkSet,
    congestion,
    congestion_uniform,
    edge_usage,
    lemma1_bound,
    self_loop_walkset,
    validate_walk,
)

WALK_BOUND_SLACK = 1e-8
POWER_ITERATION_TOL = 1e-6
DEFAULT_EPS = (0.25, 0.01)


def ratstr(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def verdict(ok: bool, reason: str = "") -> dict:
    return {"status": "pass", "reason": ""} if ok else {"status": "fail", "reason": reason}


def skipped(reason: str) -> dict:
    return {"status": "skipped", "reason": reason}


def failed_checks(report: dict) -> list[str]:
    bad = [name for name, v in report.get("checks", {}).items() if v["status"] == "fail"]
    for name, v in report.get("oracle", {}).get("checks", {}).items():
        if v["status"] == "fail":
            bad.append("oracle." + name)
    return bad


class _Timer:
    def __init__(self):
        self.timings = {}

    @contextmanager
    def __call__(self, name):
        t0 = time.perf_counter()
        yield
        self.timings[name] = time.perf_counter() - t0


def analyze_chain(
    chain: Chain,
    walkset: WalkSet,
    walk_kind: str,
    *,
    eps=DEFAULT_EPS,
    exact_mixing: bool = False,
    lazy: bool = False,
    direct_count=None,
    literature: dict | None = None,
    power_check: bool = True,
) -> dict:
    """Spectrum, congestion, walk-bound and mixing-time checks for one instance."""
    kernel, pi = chain.kernel, chain.pi
    timer = _Timer()
    checks = {}

    with timer("structure"):
        balance = check_detailed_balance(kernel, pi)
        checks["detailed_balance"] = verdict(balance.ok, f"violated at {balance.worst_violation}")
        erg = check_ergodicity(kernel)
        checks["irreducible"] = verdict(erg.irreducible, "transition graph is disconnected")
        checks["aperiodic"] = verdict(erg.aperiodic, "no self-loop and bipartite transition graph")

    with timer("spectrum"):
        spec = eigenvalues(kernel, pi)
        summary = summarize(spec)

    with timer("congestion"):
        eta = congestion(kernel, pi, walkset)
        bound = lemma1_bound(eta)
        repeats = any(r > 1 for w in walkset.walks.values() for r in w.multiplicities().values())
        if pi.is_uniform and not repeats:
            eta_u = congestion_uniform(kernel, walkset)
            checks["congestion_formulas_agree"] = verdict(
                eta_u == eta, f"uniform formula gives {ratstr(eta_u)}, general gives {ratstr(eta)}")
        else:
            checks["congestion_formulas_agree"] = skipped(
                "non-uniform pi or repeated edges: simplified formula does not apply")

    lemma1_ok = summary.lambda_min >= bound.lambda_min_lower - WALK_BOUND_SLACK
    checks["lemma1"] = verdict(
        lemma1_ok,
        f"lambda_min = {summary.lambda_min!r} < 2/eta - 1 = {bound.lambda_min_lower!r}")

    eq1 = []
    oracle_checks = {}
    taus = []
    with timer("mixing"):
        for e in eps:
            b = mixing_time_bound(summary, pi, e) if summary.lambda_star < 1 - 1e-12 else math.inf
            eq1.append({"epsilon": e, "bound": b})
            if exact_mixing:
                try:
                    tau = tv_mixing_time(kernel, pi, e)
                except (OracleTooLarge, SolverError) as exc:
                    taus.append({"epsilon": e, "tau": None})
                    oracle_checks[f"tau_le_eq1_eps_{e}"] = skipped(str(exc))
                else:
                    taus.append({"epsilon": e, "tau": tau})
                    oracle_checks[f"tau_le_eq1_eps_{e}"] = verdict(
                        tau <= b, f"exact tau = {tau} exceeds bound {b!r}")

    oracle = {"direct_count": None, "tau_exact": taus if exact_mixing else None,
              "power_iteration_lambda_1": None, "checks": oracle_checks}
    with timer("oracle"):
        if direct_count is None:
            oracle_checks["direct_count"] = skipped("no independent enumerator for this family")
        else:
            try:
                count = direct_count()
            except OracleTooLarge as exc:
                oracle_checks["direct_count"] = skipped(str(exc))
            else:
                oracle["direct_count"] = count
                oracle_checks["direct_count"] = verdict(
                    count == spec.N, f"enumerated {spec.N} states, direct count {count}")
        if power_check:
            try:
                lam1 = power_iteration_lambda1(kernel, pi)
            except SolverError as exc:
                oracle_checks["power_iteration"] = skipped(str(exc))
            else:
                oracle["power_iteration_lambda_1"] = lam1
                oracle_checks["power_iteration"] = verdict(
                    abs(lam1 - summary.lambda_1) <= POWER_ITERATION_TOL,
                    f"power iteration {lam1!r} vs dense {summary.lambda_1!r}")

    report = {
        "descriptor": chain.descriptor.as_dict(),
        "spectrum": {
            "lambda_1": summary.lambda_1,
            "lambda_min": summary.lambda_min,
            "lambda_star": summary.lambda_star,
            "relaxation_time_star": summary.relaxation_time_star,
            "gap_upper_inverse": summary.gap_upper_inverse,
            "max_residual": spec.max_residual,
        },
        "walkset": {
            "kind": walk_kind,
            "length_histogram": {str(k): v for k, v in walkset.length_histogram().items()},
            "eta": ratstr(eta),
            "eta_float": float(eta),
        },
        "bounds": {
            "lemma1_bound_on_inverse": ratstr(bound.bound_on_inverse),
            "lemma1_lambda_min_lower": bound.lambda_min_lower,
            "eq1": eq1,
            "literature": dict(literature or {}),
        },
        "checks": checks,
        "oracle": oracle,
    }
    if lazy:
        with timer("lazy"):
            report["lazy"] = _lazy_section(chain, spec)
            checks["lazy_spectral_map"] = report["lazy"].pop("_map_verdict")
            checks["lazy_nonnegative"] = report["lazy"].pop("_nonneg_verdict")
    report["timings"] = timer.timings
    return report


def _lazy_section(chain: Chain, spec) -> dict:
    lazy_kernel = lazy_transform(chain.kernel)
    lspec = eigenvalues(lazy_kernel, chain.pi)
    deviation = max(abs(a - (1 + b) / 2) for a, b in zip(lspec.eigenvalues, spec.eigenvalues))
    lsum = summarize(lspec)
    return {
        "lambda_1": lsum.lambda_1,
        "lambda_min": lsum.lambda_min,
        "lambda_star": lsum.lambda_star,
        "max_residual": lspec.max_residual,
        "spectral_map_deviation": deviation,
        "_map_verdict": verdict(deviation <= 1e-8, f"deviation {deviation!r} exceeds 1e-8"),
        "_nonneg_verdict": verdict(lsum.lambda_min >= -LAMBDA_SLACK,
                                   f"lazy lambda_min = {lsum.lambda_min!r}"),
    }


def analyze_self_loop_family(chain: Chain, holding_floor: Fraction, literature: dict,
                             direct_count=None, **options) -> dict:
    """Analysis with w_x = [x, x]; checks min P(x,x) >= floor and eta <= 1/floor."""
    kernel = chain.kernel
    walkset = self_loop_walkset(kernel)
    report = analyze_chain(chain, walkset, "self-loop", direct_count=direct_count,
                           literature=literature, **options)
    min_hold = min(kernel.holding(x) for x in range(kernel.N))
    eta = Fraction(report["walkset"]["eta"])
    checks = report["checks"]
    report["walkset"]["min_holding"] = ratstr(min_hold)
    checks["holding_floor"] = verdict(
        min_hold >= holding_floor, f"min P(x,x) = {ratstr(min_hold)} < {ratstr(holding_floor)}")
    checks["self_loop_eta_is_max_inverse_holding"] = verdict(
        eta == 1 / min_hold, f"eta = {ratstr(eta)} but max 1/P(x,x) = {ratstr(1 / min_hold)}")
    checks["eta_le_inverse_floor"] = verdict(
        eta <= 1 / holding_floor, f"eta = {ratstr(eta)} exceeds {ratstr(1 / holding_floor)}")
    floor_bound = 2 / (1 / holding_floor) - 1
    checks["lambda_min_ge_family_bound"] = verdict(
        report["spectrum"]["lambda_min"] >= float(floor_bound) - LAMBDA_SLACK,
        f"lambda_min below {ratstr(floor_bound)}")
    report["bounds"]["family_bound_on_inverse"] = ratstr(1 / holding_floor / 2)
    return report


def analyze_contingency(chain: Chain, margins: Margins, **options) -> dict:
    from .oracle import count_tables

    m, n = margins.m, margins.n
    walkset, classes = canonical_walkset(chain, margins)
    report = analyze_chain(
        chain, walkset, "canonical",
        direct_count=lambda: count_tables(margins.r, margins.c),
        literature={"lambda_1_inverse_best_known": CONTINGENCY_LAMBDA1},
        **options)
    checks = report["checks"]

    problems = []
    for x, w in walkset.items():
        rep = validate_walk(chain.kernel, w)
        if not rep.ok:
            problems.append(f"state {x}: {'; '.join(rep.failures)}")
        elif w.length not in (3, 5) or max(w.multiplicities().values()) > 1:
            problems.append(f"state {x}: length {w.length} or repeated edge")
    checks["canonical_walks_valid"] = verdict(not problems, "; ".join(problems[:5]))

    tables = tables_of(chain, margins)
    bad_shape = [x for x, c in classes.items() if c.kind == BAD and not (
        m == n and all(sum(v > 0 for v in row) == 1 for row in tables[x])
        and all(sum(v > 0 for v in col) == 1 for col in zip(*tables[x])))]
    checks["bad_tables_are_permutation_shaped"] = verdict(
        not bad_shape, f"bad states with extra positive entries: {bad_shape[:5]}")

    usage = edge_usage(walkset)
    limits = class_count_limits(m, n)
    worst = {k: 0 for k in limits}
    for e in usage:
        counts = count_walks_through_edge(walkset, classes, e, usage)
        for k in limits:
            worst[k] = max(worst[k], counts[k])
    checks["per_edge_class_counts"] = verdict(
        all(worst[k] <= limits[k] for k in limits), f"max counts {worst} exceed limits {limits}")

    eta = Fraction(report["walkset"]["eta"])
    lam_min = report["spectrum"]["lambda_min"]
    gap_limit = inverse_gap_bound(m, n)
    checks["inverse_gap_le_45m3n3"] = verdict(
        lam_min >= 1 / gap_limit - 1 - WALK_BOUND_SLACK,
        f"1/(1+lambda_min) = {report['spectrum']['gap_upper_inverse']!r} exceeds {gap_limit}")
    checks["no_negative_eigenvalues"] = verdict(lam_min >= -LAMBDA_SLACK,
                                                f"lambda_min = {lam_min!r}")

    report["walkset"]["class_counts"] = {
        k: sum(c.kind == k for c in classes.values()) for k in limits}
    report["walkset"]["max_walks_per_edge"] = worst
    report["walkset"]["per_edge_limits"] = limits
    report["bounds"]["eta_display_bound"] = eta_bound(m, n)
    report["bounds"]["inverse_gap_bound"] = gap_limit
    # informational: the displayed eta bound leaves out the fill count K
    report["comparisons"] = {
        "eta_le_90m3n3": verdict(eta <= eta_bound(m, n),
                                 f"eta = {ratstr(eta)} exceeds 90 m^3 n^3 = {eta_bound(m, n)}"),
        "eta_over_display_bound": float(eta / eta_bound(m, n)),
    }
    report["timings"] = report.pop("timings")
    return report


def custom_chain(kernel, pi, **params) -> Chain:
    """Wrap an index-labelled kernel as a chain of the ``custom`` family."""
    from .chain import StateSpace, describe

    space = StateSpace.from_encodings(x.to_bytes(4, "big") for x in range(kernel.N))
    return Chain(space, kernel, pi, describe("custom", kernel.N, **params))


def random_sweep(states: int, trials: int, seed: int, **options) -> dict:
    """Odd-walk eigenvalue bound on random reversible chains with 2..``states`` states and
    random odd walk sets."""
    from .oracle import RandomChainSpec, SplitMix64, random_odd_walkset, random_reversible_chain

    if states < 2:
        raise ChainError("--states must be at least 2")
    if trials < 1:
        raise ChainError("--trials must be at least 1")
    rng = SplitMix64(seed)
    reports = []
    t0 = time.perf_counter()
    for trial in range(trials):
        chain_seed, walk_seed = rng.next_u64(), rng.next_u64()
        N = 2 + rng.randbelow(states - 1)
        kernel, pi = random_reversible_chain(RandomChainSpec(N, chain_seed))
        chain = custom_chain(kernel, pi, trial=trial, chain_seed=chain_seed, walk_seed=walk_seed)
        walkset = random_odd_walkset(kernel, walk_seed)
        reports.append(analyze_chain(chain, walkset, "random-shortest-odd", **options))
    lemma_fail = [i for i, r in enumerate(reports) if r["checks"]["lemma1"]["status"] == "fail"]
    other_fail = [i for i, r in enumerate(reports) if failed_checks(r)]
    return {
        "descriptor": {"family": "custom",
                       "params": {"states": str(states), "trials": str(trials), "seed": str(seed)},
                       "N": None},
        "checks": {
            "lemma1_all_trials": verdict(not lemma_fail, f"walk bound fails in trials {lemma_fail}"),
            "all_trial_checks": verdict(not other_fail, f"checks fail in trials {other_fail}"),
        },
        "trials": reports,
        "timings": {"total": time.perf_counter() - t0},
    }
