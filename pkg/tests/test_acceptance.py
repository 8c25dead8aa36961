"""The six acceptance criteria, each at its stated tolerance and time budget.

Every test records a PASS/FAIL line that the terminal summary prints.
"""

import math
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from scipy.spatial.distance import pdist, squareform

from conftest import record
from cyclic_ph.bench import run_bench
from cyclic_ph.dynamics import EvenWedge, OddSphere, classify, dynamics_of
from cyclic_ph.geometry import (
    Ellipse,
    SymmetricMomentCurve,
    arc_condition_all_scales,
    arc_condition_check,
    build_filtration,
    moment_sq_dist,
    sample_curve,
)
from cyclic_ph.graph import CyclicGraph, is_cone, random_filtration, validate
from cyclic_ph.oracle import clique_complex, euler_check, reduce
from cyclic_ph.persistence import PersistenceScan, full_persistence

# -- criterion 1 --------------------------------------------------------------

GOLDEN = [
    ((1, 2, 2, 1, 1, 2), Fraction(1, 4), 1, OddSphere(0)),
    ((2, 2, 2, 2, 2, 2), Fraction(1, 3), 2, EvenWedge(1, 1)),
    ((3,) * 9, Fraction(1, 3), 3, EvenWedge(2, 1)),
    ((4, 3, 3, 3, 3, 3, 3, 4, 4), Fraction(3, 8), 1, OddSphere(1)),
]


def test_criterion_1_golden_graphs():
    failures, worst = [], 0.0
    for reach, wf, orbits, kind in GOLDEN:
        graph = CyclicGraph(reach)
        best = math.inf
        for _ in range(20):
            start = time.perf_counter()
            state = dynamics_of(graph)
            got = classify(state.winding, state.P)
            best = min(best, time.perf_counter() - start)
        worst = max(worst, best)
        if (state.winding.as_fraction(), state.P, got) != (wf, orbits, kind):
            failures.append(f"{reach}: {state.winding}, P={state.P}, {got}")
    ok = not failures and worst < 1e-3
    record(1, ok, f"4 golden graphs exact, slowest {worst * 1e3:.3f} ms" if ok else "; ".join(failures))
    assert not failures
    assert worst < 1e-3


# -- criteria 2 and 6 ---------------------------------------------------------

CORPUS = [(5 + i % 6, 1000 + i, i % 3 == 0) for i in range(240)]


def corpus():
    for n, seed, vertices in CORPUS:
        yield random_filtration(n, seed, vertex_steps=vertices)


def test_criterion_2_oracle_equivalence():
    start = time.perf_counter()
    mismatches = []
    for filt in corpus():
        bars = full_persistence(filt, 4)
        ref = reduce(clique_complex(filt, 4))
        if bars.multiset() != ref.multiset():
            mismatches.append(bars.first_difference(ref))
    elapsed = time.perf_counter() - start
    ok = not mismatches and elapsed < 60
    detail = f"{len(CORPUS)} filtrations, n 5..10, dims 0..4, {elapsed:.1f} s"
    record(2, ok, detail if not mismatches else f"{len(mismatches)} mismatches, first: {mismatches[0]}")
    assert not mismatches
    assert elapsed < 60


def test_criterion_6_property_suite():
    checked_steps = odd_violations = euler_failures = 0
    for filt in corpus():
        # raises InvariantViolation on the first step whose state disagrees with a recomputation
        scan = PersistenceScan(filt, 5, check_invariants=True).run()
        checked_steps += len(filt)
        bars = scan.barcode()
        for index in range(len(filt) + 2):
            for dim in (1, 3, 5):
                if len(bars.alive_at(index, dim)) > 1:
                    odd_violations += 1
        chi_cells, chi_betti = euler_check(clique_complex(filt, 4))
        euler_failures += chi_cells != chi_betti
    ok = odd_violations == 0 and euler_failures == 0
    record(6, ok, f"invariants on {checked_steps} steps, odd overlaps {odd_violations}, "
                  f"Euler failures {euler_failures}")
    assert odd_violations == 0
    assert euler_failures == 0


# -- criterion 3 --------------------------------------------------------------

RATIOS = (1.0, 1.2, 1.41)
SIZES = (10, 25, 50)
SEEDS = range(20)


def ellipse_runs(ratio):
    for n in SIZES:
        for seed in SEEDS:
            cloud = sample_curve(Ellipse(ratio, 1.0), n, "random", seed)
            yield n, seed, cloud, build_filtration(cloud, on_violation="truncate")


def unfillable_edge(points, r):
    """An edge of the closed Rips graph that no cyclic orientation can carry.

    With the vertices in curve order, ``x -> y`` forces every vertex strictly
    between them counterclockwise to be adjacent to both ends, and ``y -> x``
    forces the same for the other arc.  An edge where both arcs fail proves
    the graph is not cyclic.
    """
    adj = squareform(pdist(points)) <= r
    n = len(points)
    for x in range(n):
        for y in range(x + 1, n):
            if not adj[x, y]:
                continue
            inner = list(range(x + 1, y))
            outer = [v % n for v in range(y + 1, x + n)]
            fwd = all(adj[v, x] and adj[v, y] for v in inner)
            bwd = all(adj[v, x] and adj[v, y] for v in outer)
            if not (fwd or bwd):
                return x, y
    return None


@pytest.mark.xfail(
    strict=True,
    reason="finite samples leave the cyclic-or-cone regime once r >= 2b, before any sample "
    "point becomes a cone apex; see test_criterion_3_failures_are_geometric",
)
def test_criterion_3_pipeline_soundness_literal():
    start = time.perf_counter()
    failures = []
    for ratio in RATIOS:
        for n, seed, _, filt in ellipse_runs(ratio):
            bad = filt.truncated is not None or any(validate(g) for g in filt.graphs())
            if bad:
                failures.append((ratio, n, seed))
    for n, seed, _, filt in ellipse_runs(1.5):
        assert len(filt) >= 0  # the guarantee is not claimed; only require no crash
    elapsed = time.perf_counter() - start
    by_ratio = {ratio: sum(1 for f in failures if f[0] == ratio) for ratio in RATIOS}
    ok = not failures and elapsed < 10
    record(3, ok, f"{len(failures)}/{len(RATIOS) * len(SIZES) * len(SEEDS)} samples leave "
                  f"cyclic-or-cone (per a/b {by_ratio}), {elapsed:.2f} s; expected failure, see ledger")
    assert not failures


def test_criterion_3_failures_are_geometric():
    # every truncation sits at r >= 2b, is not a cone, and carries a witness edge
    for ratio in RATIOS:
        for n, seed, cloud, filt in ellipse_runs(ratio):
            assert all(validate(g) == [] for g in filt.graphs())
            if filt.truncated is None:
                continue
            _, scale = filt.truncated
            points = cloud.points[list(filt.order)]
            assert scale >= 2.0, (ratio, n, seed)
            adj = squareform(pdist(points)) <= scale
            assert not adj.all(axis=1).any()
            assert unfillable_edge(points, scale) is not None


def test_criterion_3_circle_is_always_sound():
    for n, seed, _, filt in ellipse_runs(1.0):
        assert filt.truncated is None
        assert filt.cone is not None


def test_criterion_3_known_witness():
    # 30 evenly spaced points on the 1.2 x 1 ellipse: {7, 22} appears while {7, 21} and {6, 22} do not
    cloud = sample_curve(Ellipse(1.2, 1.0), 30)
    filt = build_filtration(cloud, on_violation="truncate")
    _, scale = filt.truncated
    d = squareform(pdist(cloud.points))
    assert d[7, 22] <= scale < min(d[7, 21], d[6, 22])
    assert is_cone(filt.final_graph()) is None


# -- criterion 4 --------------------------------------------------------------


def test_criterion_4_moment_curve():
    start = time.perf_counter()
    rng = np.random.default_rng(2024)
    alphas = rng.uniform(0.0, 2.0, 10_000)
    ts = rng.uniform(0.0, 2 * np.pi, 10_000)
    fast = moment_sq_dist(alphas, ts)
    worst = 0.0
    with mpmath.workdps(50):
        for a, t, got in zip(alphas.tolist(), ts.tolist(), fast.tolist()):
            a, t = mpmath.mpf(a), mpmath.mpf(t)
            p0 = (1, 0, a, 0)
            p1 = (mpmath.cos(t), mpmath.sin(t), a * mpmath.cos(3 * t), a * mpmath.sin(3 * t))
            ref = sum((u - v) ** 2 for u, v in zip(p0, p1))
            worst = max(worst, float(abs(got - ref) / ref))
    formula_ok = worst <= 1e-12

    good = sample_curve(SymmetricMomentCurve(1 / math.sqrt(3) - 0.01), 200)
    bad = sample_curve(SymmetricMomentCurve(1.0), 200)
    good_ok = arc_condition_all_scales(good)
    diam = pdist(good.points).max()
    good_ok = good_ok and all(arc_condition_check(good, r) for r in np.linspace(0, diam, 101))
    bad_radii = [r for r in np.linspace(0, pdist(bad.points).max(), 101) if not arc_condition_check(bad, r)]
    bad_ok = bool(bad_radii) and not arc_condition_all_scales(bad)
    elapsed = time.perf_counter() - start

    ok = formula_ok and good_ok and bad_ok and elapsed < 10
    record(4, ok, f"max rel err {worst:.1e} on 10^4 samples, arc condition "
                  f"{good_ok} (alpha=1/sqrt3-0.01) / fails for alpha=1 from r={min(bad_radii, default=0):.3f}, "
                  f"{elapsed:.2f} s")
    assert formula_ok, worst
    assert good_ok
    assert bad_ok
    assert elapsed < 10


# -- criterion 5 --------------------------------------------------------------


def test_criterion_5_scaling():
    result = run_bench([200, 400, 800, 1600, 3200], max_dim=4)
    top = result.seconds[-1]
    ok = result.exponent <= 2.35 and top < 300
    times = ", ".join(f"{n}:{s:.2f}s" for n, s in zip(result.sizes, result.seconds))
    record(5, ok, f"exponent {result.exponent:.2f}; {times}")
    assert result.exponent <= 2.35
    assert top < 300
