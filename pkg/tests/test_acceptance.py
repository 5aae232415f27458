"""Acceptance criteria 1-9, one printed PASS/FAIL line each.

Run under pytest (lines appear with ``-s`` or in the terminal summary) or
directly with ``python3 tests/test_acceptance.py``.
"""

from __future__ import annotations

import itertools
import math
import random
import sys
from functools import lru_cache
from pathlib import Path
from typing import Callable, Dict, List, Tuple

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from conftest import complete, cycle, path, star  # noqa: E402
from powercolor import Network, bandwidth_mode, gen_graph  # noqa: E402
from powercolor.ag2 import ag2_reduce  # noqa: E402
from powercolor.bench import parse_config, run_algo, run_bench  # noqa: E402
from powercolor.fastcolor2 import arbdefective2_run, fastcolor2_pipeline, proxy_setup  # noqa: E402
from powercolor.graph import log_star, smallest_prime_above  # noqa: E402
from powercolor.linial2 import linial2_full  # noqa: E402
from powercolor.oracle import check_arbdefect, check_mis_k, check_proper_k, count_value_khop  # noqa: E402
from powercolor.powerk import (  # noqa: E402
    PowerContext,
    agk_reduce,
    count_spec,
    dp_bound,
    exact_count_convergecast,
    fastcolor_k_run,
    linialk_overcount_run,
    mis_k_run,
)
from powercolor.powerk.aggregation import apply_family_token, token_family  # noqa: E402

KS = (2, 3, 4)
BIG = 2**40


@lru_cache(maxsize=None)
def suite() -> Tuple:
    """102 seeded random graphs (n <= 40, delta <= 4) plus paths, cycles, stars, trees and a clique."""
    models = ("gnp", "random_regularish", "tree")
    graphs = []
    for i in range(102):
        n = 12 + (i * 7) % 29
        graphs.append(gen_graph(models[i % 3], n, min(2 + i % 3, n - 1), i))
    graphs += [path(1), path(2), path(7), path(20), cycle(3), cycle(6), cycle(11), star(5), star(9), complete(5)]
    graphs += [gen_graph("tree", n, 3, s) for n, s in ((15, 1), (30, 2))]
    return tuple(graphs)


def big_ids(g) -> List[int]:
    """Distinct IDs from a 40-bit space, so that every Linial stage actually runs."""
    return random.Random(f"ids:{g.n}:{g.m}").sample(range(BIG), g.n)


@lru_cache(maxsize=None)
def runs() -> List[Dict]:
    out = []
    for g in suite():
        r = {"g": g, "lin": linial2_full(g), "lin_big": linial2_full(g, initial=big_ids(g), palette=BIG)}
        r["ag"] = ag2_reduce(g, r["lin_big"].colors, r["lin_big"].palette)
        r["fast"] = fastcolor2_pipeline(g)
        for k in KS:
            ctx = PowerContext(g, k)
            r[("link", k)] = linialk_overcount_run(g, k, ctx=ctx)
            r[("link_big", k)] = linialk_overcount_run(g, k, initial=big_ids(g), palette=BIG, ctx=ctx)
            r[("agk", k)] = agk_reduce(g, k, r[("link_big", k)].colors, r[("link_big", k)].palette, ctx=ctx)
            r[("fastk", k)] = fastcolor_k_run(g, k)
        out.append(r)
    return out


def report(number: int, title: str, ok: bool, detail: str) -> str:
    return f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {title}: {detail}"


# -- criteria -----------------------------------------------------------------------------

def criterion_1():
    checks = failures = 0
    for r in runs():
        g = r["g"]
        outs = [(2, r["lin"].colors), (2, r["lin_big"].colors), (2, r["ag"].colors), (2, r["fast"].colors)]
        for k in KS:
            outs += [(k, r[(key, k)].colors) for key in ("link", "link_big", "agk", "fastk")]
        for k, colors in outs:
            checks += 1
            failures += not check_proper_k(g, k, colors).ok
    return failures == 0, f"{checks} colorings on {len(suite())} graphs, {failures} improper"


def criterion_2():
    bad = []
    for r in runs():
        g = r["g"]
        delta = g.max_degree
        qf = smallest_prime_above(6 * delta**2)
        for name in ("lin", "lin_big"):
            if r[name].palette > qf**2:
                bad.append((name, g.n, r[name].palette))
        if r["ag"].palette > smallest_prime_above(2 * delta**2):
            bad.append(("ag2", g.n, r["ag"].palette))
        for k in KS:
            d_p = dp_bound(g, k)
            if r[("agk", k)].palette > smallest_prime_above(2 * d_p):
                bad.append(("agk", k, g.n))
            for name in ("link", "link_big"):
                if r[(name, k)].palette > smallest_prime_above(6 * d_p) ** 2:
                    bad.append((name, k, g.n, r[(name, k)].palette))
    return not bad, f"{len(runs())} graphs, violations {bad[:3]}"


def criterion_3():
    bad = []
    ag_phases = lin_stages = arb_runs = 0
    for r in runs():
        g = r["g"]
        for q, phases in r["ag"].pass_log:
            ag_phases += phases
            if phases > q:
                bad.append(("ag2 phases", g.n, phases, q))
        if r["ag"].main_rounds > 2 * r["ag"].phases:
            bad.append(("ag2 rounds", g.n, r["ag"].main_rounds, r["ag"].phases))
        lin = r["lin_big"]
        lin_stages += len(lin.stages)
        if len(lin.stages) > log_star(g.n) + 2:
            bad.append(("linial2 stages", g.n, len(lin.stages)))
        for st in lin.stages:
            if st.phases > math.ceil(math.log2(st.params.q)) + 1:
                bad.append(("linial2 phases", g.n, st.phases, st.params.q))
        delta = g.max_degree
        if not delta:
            continue
        for md in sorted({1, delta, 2 * delta}):
            net = Network(g, bandwidth_mode("congest", g.n))
            arb = arbdefective2_run(net, lin.colors, lin.palette, md, proxy_setup(net))
            arb_runs += 1
            if arb.phases > math.ceil(2 * delta**2 / md) + 1:
                bad.append(("arbdefective phases", g.n, md, arb.phases))
    detail = f"{ag_phases} ag2 phases, {lin_stages} linial2 stages, {arb_runs} arbdefective runs, violations {bad[:3]}"
    return not bad, detail


def criterion_4():
    cfg = parse_config("models=random_regularish\nn=200\ndelta=3,4,5,6\nk=4\n"
                       "algos=transform-round,naive-round\nseeds=0\n")
    rounds: Dict[int, Dict[str, int]] = {}
    for row in run_bench(cfg):
        rounds.setdefault(row[4], {})[row[0]] = row[8]
    deltas = sorted(rounds)
    ratios = [rounds[d]["naive-round"] / rounds[d]["transform-round"] for d in deltas]
    faster = all(rounds[d]["transform-round"] < rounds[d]["naive-round"] for d in deltas if d >= 4)
    monotone = all(a <= b for a, b in zip(ratios, ratios[1:]))
    pretty = ", ".join(f"delta={d}: {rounds[d]['transform-round']} vs {rounds[d]['naive-round']}" for d in deltas)
    return faster and monotone and deltas == [3, 4, 5, 6], f"{pretty}; ratios {[round(x, 2) for x in ratios]}"


def criterion_5():
    mismatches = pairs = 0
    worst = 0
    for g in suite():
        rng = random.Random(g.n * 31 + g.m)
        values = [rng.randrange(4) for _ in g.vertices]
        for k in KS:
            ctx = PowerContext(g, k)
            net = Network(g, bandwidth_mode("congest", max(g.n, 2)))
            ctx.preprocess_exact(net)
            for x in range(4):
                res = exact_count_convergecast(ctx, net, count_spec(lambda sv, su, x=x: su == x, max(g.n, 1)), values)
                mismatches += sum(res[v] != count_value_khop(g, k, values, v, x) for v in g.vertices)
            d_p = dp_bound(g, k)
            for (v, u), c in ctx.mult.items():
                pairs += 1
                worst = max(worst, c)
                if not 1 <= c <= d_p:
                    mismatches += 1
            covered = {(v, u) for v in g.vertices for u in ctx.nk[v]}
            mismatches += len(covered - set(ctx.mult))
    return mismatches == 0, f"{len(suite())} graphs x k in {{2,3,4}}, {pairs} overcounted pairs (max multiplicity {worst}), {mismatches} mismatches"


def _fold(tokens, x):
    for t in tokens:
        x = apply_family_token(t, x)
    return x


def criterion_6():
    exhaustive = failures = 0
    for size in (1, 2, 3, 4):
        fam = token_family(size)
        for length in range(1, 7):
            for combo in itertools.combinations_with_replacement(fam, length):
                support = sorted(set(combo))
                for x in range(size):
                    want = _fold(support, x)
                    for perm in set(itertools.permutations(combo)):
                        exhaustive += 1
                        failures += _fold(perm, x) != want
    rng = random.Random(6)
    for _ in range(1000):
        size = rng.randint(1, 64)
        fam = token_family(size)
        tokens = [rng.choice(fam) for _ in range(rng.randint(7, 40))]
        rng.shuffle(tokens)
        x = rng.randrange(size)
        failures += _fold(tokens, x) != _fold(sorted(set(tokens)), x)
    return failures == 0, f"{exhaustive} exhaustive folds (|A| <= 4, sizes <= 6, all orders) + 1000 random (|A| <= 64), {failures} failures"


def criterion_7():
    bad = 0
    for r in runs():
        g = r["g"]
        arb = r["fast"].arb
        bad += not check_arbdefect(g, 2, arb.colors, arb.order, g.max_degree).ok
    return bad == 0, f"{len(runs())} arbdefective outputs with maxDefect = delta, {bad} rejected"


def criterion_8():
    bad = []
    count = 0
    for g in suite():
        for k in (2, 3):
            res = mis_k_run(g, k)
            count += 1
            if not check_mis_k(g, k, res.members).ok:
                bad.append(("invalid", g.n, k))
            if res.iterations > res.coloring.palette:
                bad.append(("iterations", g.n, k))
            if any(rounds > k for rounds in res.iteration_rounds):
                bad.append(("broadcast", g.n, k))
    return not bad, f"{count} MIS runs, violations {bad[:3]}"


def criterion_9():
    graphs = [gen_graph("gnp", 30, 3, 9), gen_graph("tree", 24, 3, 4)]
    algos = [("linial2", 2), ("ag2", 2), ("fast2", 2), ("linialk", 3), ("agk", 3), ("fastk", 3),
             ("misk", 3), ("naive-baseline", 3), ("transform-round", 4), ("naive-round", 4)]
    differing = []
    for g in graphs:
        for algo, k in algos:
            a, b = run_algo(algo, g, k), run_algo(algo, g, k)
            same = (a.row() == b.row() and a.colors == b.colors and a.members == b.members
                    and a.network.trace.to_csv().encode() == b.network.trace.to_csv().encode())
            if not same:
                differing.append((algo, g.n))
    same_gen = all(gen_graph(m, 40, 4, 3).adj == gen_graph(m, 40, 4, 3).adj for m in ("gnp", "random_regularish", "tree"))
    return not differing and same_gen, f"{len(graphs) * len(algos)} reruns, differing {differing}"


CRITERIA: List[Tuple[int, str, Callable]] = [
    (1, "properness", criterion_1),
    (2, "palette bounds", criterion_2),
    (3, "round budgets", criterion_3),
    (4, "speedup trend", criterion_4),
    (5, "aggregation exactness", criterion_5),
    (6, "idempotent composition", criterion_6),
    (7, "arboricity witness", criterion_7),
    (8, "MIS validity", criterion_8),
    (9, "determinism", criterion_9),
]


@pytest.mark.parametrize("number,title,fn", CRITERIA, ids=[f"criterion_{n}" for n, _, _ in CRITERIA])
def test_criterion(number, title, fn, capsys):
    ok, detail = fn()
    with capsys.disabled():
        print("\n" + report(number, title, ok, detail))
    assert ok, detail


if __name__ == "__main__":
    results = []
    for number, title, fn in CRITERIA:
        ok, detail = fn()
        results.append(ok)
        print(report(number, title, ok, detail), flush=True)
    sys.exit(0 if all(results) else 1)
