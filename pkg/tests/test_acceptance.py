"""Acceptance gate: nine end-to-end criteria, each reporting a single
pass/fail line (run with ``pytest -s`` to see them).  These scale the module
suites' property checks up to their full sample sizes and add the
end-to-end guarantee and trend checks."""

import itertools
import math
import time

import numpy as np
import pytest

import vnfplace as vp
from vnfplace.model import SplitMix64

import properties
import test_lp
from conftest import make_random_instance


def _report(name: str, ok: bool, detail: str = ""):
    line = f"[{'PASS' if ok else 'FAIL'}] {name}" + (f" — {detail}" if detail else "")
    print(f"\n{line}")
    assert ok, line


@pytest.fixture(scope="module")
def corpus200():
    return properties.corpus(200, seed=1001)


# 1 ─ golden reference allocation ------------------------------------------


def test_acceptance_golden_reference_allocation(tight3):
    t0 = time.perf_counter()
    a = vp.iterative_allocation(tight3, ("v2", "v3"))
    b = vp.iterative_allocation(tight3, ("v1", "v2", "v3"))
    elapsed = time.perf_counter() - t0
    ok = (
        abs(a.node_totals[0] - 1.02) <= 1e-6
        and abs(a.node_totals[1] - 1.01) <= 1e-6
        and abs(a.total - 2.03) <= 1e-6
        and abs(b.node_totals[0] - 0.02) <= 1e-6
        and abs(b.node_totals[1] - 1.01) <= 1e-6
        and abs(b.node_totals[2] - 0.0) <= 1e-6
        and abs(b.total - 1.03) <= 1e-6
        and elapsed < 1.0
    )
    _report(
        "golden reference allocation",
        ok,
        f"totals {a.node_totals} / {b.node_totals} in {elapsed * 1e3:.0f} ms",
    )


# 2 ─ set/sequence sandwich ---------------------------------------------------


def test_acceptance_set_sequence_sandwich(corpus200):
    t0 = time.perf_counter()
    bad = properties.check_set_sequence_sandwich(corpus200, max_subset=4, per_instance=1)
    elapsed = time.perf_counter() - t0
    ok = not bad and elapsed < 120.0
    _report(
        "sequence value sandwiched by set value (200 instances, all permutations)",
        ok,
        f"{len(bad)} violations in {elapsed:.1f} s" + (f"; first: {bad[0]}" if bad else ""),
    )


# 3 ─ monotonicity / submodularity triples -----------------------------------


def test_acceptance_monotonicity_triples(corpus200, tight3):
    bad = properties.check_monotonicity_and_submodularity(corpus200, triples=500)
    ratio = (
        vp.iterative_allocation(tight3, ("v1", "v2", "v3")).total
        / vp.iterative_allocation(tight3, ("v2", "v3")).total
    )
    witness_ok = 0.5 - 1e-9 <= ratio <= 0.51
    ok = not bad and witness_ok
    _report(
        "forward/backward monotonicity and submodularity (500 triples)",
        ok,
        f"{len(bad)} violations; extension-ratio witness {ratio:.4f}"
        + (f"; first: {bad[0]}" if bad else ""),
    )


# 4 ─ greedy guarantee against the sequence optimum ---------------------------


def test_acceptance_greedy_sequence_guarantee():
    instances = properties.corpus(100, seed=2002)
    bound = 0.5 * (1.0 - 1.0 / math.e)
    worst = math.inf
    bad = 0
    rng = SplitMix64(42)
    for inst in instances:
        k = 1 + rng.randrange(3)
        greedy = vp.ssg(inst, k)
        _, opt = vp.optimal_sequence_r4(inst, k)
        if opt > 1e-9:
            worst = min(worst, greedy.value / opt)
        if greedy.value < bound * opt - 1e-6:
            bad += 1
    _report(
        "greedy value >= half (1 - 1/e) of the best sequence (100 instances)",
        bad == 0,
        f"observed minimum ratio {worst:.4f} (bound {bound:.4f})",
    )


# 5 ─ allocator ratio bounds ---------------------------------------------------


def _pra_bound(z, k, r):
    return (z - 1.0) / (math.e * z * (k * r) ** (1.0 / (z - 1.0)))


def _nra_bound(z, r):
    return (z - 1.0) / (z - 1.0 + math.e * z * r ** (1.0 / (z - 1.0)))


def test_acceptance_allocator_ratio_bounds():
    instances = properties.corpus(40, seed=3003)
    bad = []
    cases = 0
    for i, base in enumerate(instances):
        for z in (2.0, 4.0, 8.0):
            num_r = len(base.resources)
            inst = vp.generate_demands(base, (0.0, 4.0), num_r, z, seed=i)
            placed = vp.ssg(inst, 2)
            norm = vp.normalize(inst, placed.sequence)
            k = len(placed.sequence)
            got_p = vp.processed_traffic(inst, vp.pra(inst, norm, placed.sequence))
            got_n = vp.processed_traffic(
                inst, vp.nra(inst, norm, placed.sequence, order=placed.sequence)
            )
            cases += 1
            if got_p < _pra_bound(z, k, num_r) * placed.value - 1e-6:
                bad.append(f"global allocator at z={z} instance {i}")
            if got_n < _nra_bound(z, num_r) * placed.value - 1e-6:
                bad.append(f"per-node allocator at z={z} instance {i}")
    _report(
        "integral allocators meet their ratio bounds vs the sequence value",
        not bad,
        f"{cases} cases, {len(bad)} violations" + (f"; first: {bad[0]}" if bad else ""),
    )


# 6 ─ end-to-end guarantee against the exact optimum ---------------------------


def _theorem_pra(z, k, r):
    return 0.25 * (1.0 - 1.0 / math.e) * _pra_bound(z, k, r)


def _theorem_nra(z, r):
    return 0.25 * (1.0 - 1.0 / math.e) * _nra_bound(z, r)


def test_acceptance_end_to_end_guarantee():
    rng = SplitMix64(4004)
    bad = 0
    ratios = []
    n_instances = 100
    for i in range(n_instances):
        base = make_random_instance(
            seed=4_000_000 + i,
            num_nodes=3 + rng.randrange(3),
            num_flows=3 + rng.randrange(5),
            num_resources=1 + rng.randrange(2),
        )
        z = 1.5 + rng.uniform(0.0, 4.5)
        num_r = len(base.resources)
        inst = vp.generate_demands(base, (0.0, 4.0), num_r, z, seed=i)
        k = 2
        opt = vp.optimal_exact(inst, k).value
        placed = vp.ssg(inst, k)
        norm = vp.normalize(inst, placed.sequence)
        got_p = vp.processed_traffic(inst, vp.pra(inst, norm, placed.sequence))
        got_n = vp.processed_traffic(
            inst, vp.nra(inst, norm, placed.sequence, order=placed.sequence)
        )
        keff = len(placed.sequence)
        if got_p < _theorem_pra(z, keff, num_r) * opt - 1e-6:
            bad += 1
        if got_n < _theorem_nra(z, num_r) * opt - 1e-6:
            bad += 1
        if opt > 1e-9:
            ratios.append(max(got_p, got_n) / opt)
    half = sum(1 for r in ratios if r >= 0.5 - 1e-9)
    frac = half / len(ratios)
    ok = bad == 0 and frac >= 0.95
    _report(
        "end-to-end guarantee vs exact optimum (100 instances)",
        ok,
        f"{bad} bound violations; ratio >= 1/2 on {frac:.0%} "
        f"(min observed {min(ratios):.3f})",
    )


# 7 ─ trend reproduction --------------------------------------------------------


def test_acceptance_trend_reproduction():
    t0 = time.perf_counter()
    base = vp.abilene_topology()
    seeds = (1, 2, 3, 4, 5)
    budgets = (3, 6, 10)
    z_values = (1.5, 2.0, 2.5, 3.0, 4.0, 6.0)
    cfg = vp.ExperimentConfig(
        instance=base,
        instance_id="abilene",
        budgets=budgets,
        z_values=z_values,
        algorithms=("ssg-pra", "ssg-nra"),
        seeds=seeds,
        demand_range=(0.0, 20.0),
        num_resources=2,
    )
    records = vp.run_sweep(cfg)
    errors = [r for r in records if r.status != "ok"]
    pct = {(r.seed, r.k, r.algorithm, r.z): r.pct for r in records}

    mono_bad = 0
    for seed in seeds:
        for k in budgets:
            for alg in ("ssg-pra", "ssg-nra"):
                vals = [pct[(seed, k, alg, z)] for z in z_values]
                mono_bad += sum(1 for a, b in zip(vals, vals[1:]) if b < a - 1e-12)

    mean = lambda alg, z: sum(pct[(s, 6, alg, z)] for s in seeds) / len(seeds)
    crossover_ok = (
        mean("ssg-nra", 1.5) >= mean("ssg-pra", 1.5)
        and mean("ssg-pra", 6.0) >= mean("ssg-nra", 6.0)
    )

    near_bound_ok = True
    for seed in seeds:
        inst = vp.generate_demands(base, (0.0, 20.0), 2, 6.0, seed)
        placed = vp.ssg(inst, 10)
        set_bound, _ = vp.full_fractional_allocation(inst, placed.sequence)
        total = sum(f.rate for f in inst.flows)
        for alg in ("ssg-pra", "ssg-nra"):
            if pct[(seed, 10, alg, 6.0)] * total < 0.95 * set_bound:
                near_bound_ok = False

    elapsed = time.perf_counter() - t0
    ok = (
        not errors
        and mono_bad == 0
        and crossover_ok
        and near_bound_ok
        and elapsed < 600.0
    )
    _report(
        "capacity-stretch trend reproduction (5 seeds x 3 budgets x 6 stretches)",
        ok,
        f"{len(errors)} cell errors, {mono_bad} monotonicity breaks, "
        f"crossover {'ok' if crossover_ok else 'BAD'}, "
        f"near-bound {'ok' if near_bound_ok else 'BAD'}, {elapsed:.0f} s",
    )


# 8 ─ LP solver vs oracle --------------------------------------------------------


def test_acceptance_lp_oracle_and_determinism():
    worst = 0.0
    bad = 0
    lps = test_lp._corpus(1000, seed=8008)
    for lp in lps:
        sol = vp.solve(lp)
        expect = test_lp._vertex_oracle(lp)
        if sol.status is not vp.LpStatus.OPTIMAL or expect is None:
            bad += 1
            continue
        err = abs(sol.objective_value - expect)
        worst = max(worst, err)
        if err > 1e-6:
            bad += 1
    det_ok = True
    for lp in lps[:50]:
        s1, s2 = vp.solve(lp), vp.solve(lp)
        if s1.objective_value != s2.objective_value or not np.array_equal(
            s1.values, s2.values
        ):
            det_ok = False
    ok = bad == 0 and det_ok
    _report(
        "LP solver matches vertex enumeration on 1000 programs, bit-stable",
        ok,
        f"{bad} mismatches, worst error {worst:.2e}, "
        f"determinism {'ok' if det_ok else 'BAD'}",
    )


# 9 ─ prefix / residual / greedy-dominance property suites ------------------------


def test_acceptance_property_suites(corpus200):
    bad_prefix = properties.check_prefix_totals_agree(corpus200, cases=300)
    bad_resid = properties.check_residual_rate_bound(corpus200, cases=300)
    bad_dom = properties.check_greedy_marginal_dominance(corpus200[:60], cases=300)
    ok = not (bad_prefix or bad_resid or bad_dom)
    _report(
        "prefix-equality / residual-bound / greedy-dominance suites (300 cases each)",
        ok,
        f"violations: prefix {len(bad_prefix)}, residual {len(bad_resid)}, "
        f"dominance {len(bad_dom)}",
    )
