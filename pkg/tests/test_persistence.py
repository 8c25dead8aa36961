import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyclic_ph.barcode import (
    Barcode,
    ConeReached,
    EventLog,
    LabelMoved,
    OddBorn,
    OddDied,
    OrbitCreated,
    OrbitDestroyed,
)
from cyclic_ph.dynamics import homotopy_type
from cyclic_ph.graph import Filtration, random_filtration, regular_rounds
from cyclic_ph.oracle import clique_complex, euler_check, oracle_barcode
from cyclic_ph.persistence import (
    InvariantViolation,
    PersistenceScan,
    even_persistence,
    full_persistence,
    odd_persistence,
)

HEXAGON_SOURCES = [0, 1, 2, 3, 4, 5, 1, 2, 5]
NONAGON_SOURCES = [i for _ in range(3) for i in range(9)] + [7, 8, 0]


def alive_at_end(bars: Barcode):
    return [iv for iv in bars if iv.death is None]


def test_dimension_zero_counts_components():
    filt = random_filtration(7, seed=5)
    bars, _ = even_persistence(filt, 0)
    counts = [len(bars.alive_at(i, 0)) for i in range(len(filt) + 1)]
    assert counts[0] == 6
    assert all(a >= b for a, b in zip(counts, counts[1:]))


def test_regular_nonagon_has_two_two_spheres():
    filt = regular_rounds(9, 3)
    bars, _ = even_persistence(filt, 1)
    assert len(bars.alive_at(len(filt), 2)) == 2


def test_hexagon_circle_alive_at_end():
    filt = Filtration.from_sources(6, HEXAGON_SOURCES)
    assert [iv.dim for iv in alive_at_end(odd_persistence(filt, 0))] == [1]


def test_nonagon_three_sphere_alive_at_end():
    filt = Filtration.from_sources(9, NONAGON_SOURCES)
    bars = full_persistence(filt, 4)
    assert [iv.dim for iv in alive_at_end(bars)] == [3]


def test_edgeless_has_no_odd_homology():
    assert len(odd_persistence(Filtration(6), 0)) == 0


def test_regular_rounds_match_homotopy_of_every_prefix():
    filt = regular_rounds(9, 3)
    bars = full_persistence(filt, 4)
    for index, graph in enumerate(filt.graphs()):
        expected = homotopy_type(graph).reduced_betti(4)
        got = bars.betti_at(index)
        assert [got.get(d, 0) for d in range(5)] == expected, index


def test_cone_closes_everything():
    # a 5-cycle, then chords; vertex 2 sees everyone after step 8
    filt = Filtration.from_sources(5, [0, 1, 2, 3, 4, 0, 1, 2, 3, 4])
    bars, log = full_persistence(filt, 2, events=True)
    assert [iv.key for iv in bars] == [(0, 0, 1), (0, 0, 2), (0, 0, 3), (0, 0, 4), (1, 5, 8)]
    assert [ev.step for ev in log if isinstance(ev, ConeReached)] == [8]
    assert bars.same_bars(oracle_barcode(filt, 2))


def test_unreduced_toggle_adds_one_infinite_point():
    filt = random_filtration(7, seed=8)
    red = full_persistence(filt, 2)
    unred = full_persistence(filt, 2, reduced=False)
    assert len(unred) == len(red) + 1
    assert unred.same_bars(oracle_barcode(filt, 2, reduced=False))


@pytest.mark.parametrize("seed", range(25))
def test_matches_oracle_with_vertex_insertions(seed):
    filt = random_filtration(8, seed, vertex_steps=True, n_initial=4)
    bars = full_persistence(filt, 4, check_invariants=True)
    diff = bars.first_difference(oracle_barcode(filt, 4))
    assert diff is None, diff


def test_event_log_replays_to_the_barcode():
    filt = random_filtration(10, seed=21, vertex_steps=True)
    bars, log = full_persistence(filt, 4, events=True)
    assert log.replay().same_bars(bars)
    again = EventLog.from_jsonl(log.to_jsonl())
    assert again.replay().same_bars(bars)
    assert again.to_jsonl() == log.to_jsonl()


def test_event_log_is_deterministic():
    filt = random_filtration(10, seed=4, vertex_steps=True)
    runs = [full_persistence(filt, 4, events=True)[1].to_jsonl() for _ in range(2)]
    assert runs[0] == runs[1]


def test_event_kinds_on_nonagon():
    filt = Filtration.from_sources(9, NONAGON_SOURCES)
    _, log = full_persistence(filt, 3, events=True)
    kinds = {type(ev) for ev in log}
    assert {OrbitCreated, OrbitDestroyed, OddBorn}.issubset(kinds)
    assert OddDied in kinds  # S^1 dies once the two-spheres appear


def test_barcode_json_round_trip():
    filt = random_filtration(8, seed=1)
    bars = full_persistence(filt, 3)
    again = Barcode.from_json(bars.to_json())
    assert again.same_bars(bars)
    assert again.dims_computed == bars.dims_computed


def test_text_table_is_sorted():
    bars = full_persistence(random_filtration(9, seed=2), 3)
    rows = [line.split("\t") for line in bars.to_text().splitlines()[1:]]
    keys = [(int(r[0]), int(r[1]), float(r[2])) for r in rows]
    assert keys == sorted(keys)


def test_verify_catches_corrupted_state():
    filt = regular_rounds(7, 2)
    scan = PersistenceScan(filt, 2, check_invariants=True)
    scan.run()
    scan.f[0] = (scan.f[0] + 1) % 7
    with pytest.raises(InvariantViolation):
        scan.verify(len(filt))


def test_negative_dimension_rejected():
    with pytest.raises(ValueError):
        full_persistence(Filtration(3), -1)
    with pytest.raises(ValueError):
        even_persistence(Filtration(3), -1)


def test_label_history_records_relabels():
    filt = Filtration.from_sources(9, NONAGON_SOURCES)
    bars, log = even_persistence(filt, 1)
    moved = [ev for ev in log if isinstance(ev, (LabelMoved, OrbitDestroyed))]
    assert moved
    assert all(iv.label_history for iv in bars)


@settings(max_examples=80, deadline=None)
@given(st.integers(3, 10), st.integers(0, 10**6), st.booleans(), st.integers(0, 5))
def test_oracle_equivalence(n, seed, vertices, max_dim):
    filt = random_filtration(n, seed, vertex_steps=vertices)
    bars, log = full_persistence(filt, max_dim, check_invariants=True, events=True)
    ref = oracle_barcode(filt, max_dim)
    assert bars.first_difference(ref) is None
    assert log.replay().same_bars(bars)


@settings(max_examples=80, deadline=None)
@given(st.integers(3, 12), st.integers(0, 10**6), st.booleans())
def test_at_most_one_odd_bar_alive(n, seed, vertices):
    filt = random_filtration(n, seed, vertex_steps=vertices)
    bars = full_persistence(filt, 5)
    last = len(filt) + (filt.cone is not None)
    for index in range(last + 1):
        for dim in (1, 3, 5):
            assert len(bars.alive_at(index, dim)) <= 1


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 10), st.integers(0, 10**6))
def test_intervals_are_nonempty_and_within_range(n, seed):
    filt = random_filtration(n, seed)
    for iv in full_persistence(filt, 4):
        assert iv.birth >= 0
        assert iv.death is None or iv.birth < iv.death <= len(filt) + 1


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 9), st.integers(0, 10**6))
def test_single_dimension_runs_agree_with_full_run(n, seed):
    filt = random_filtration(n, seed)
    full = full_persistence(filt, 5)
    for k in range(3):
        assert even_persistence(filt, k)[0].same_bars(full.restrict({2 * k}))
    for k in range(2):
        assert odd_persistence(filt, k).same_bars(full.restrict({2 * k + 1}))


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 9), st.integers(0, 10**6))
def test_euler_holds_on_every_oracle_run(n, seed):
    cx = clique_complex(random_filtration(n, seed, vertex_steps=True), 4)
    a, b = euler_check(cx)
    assert a == b


def test_large_scan_runs_with_invariant_checks():
    filt = random_filtration(40, seed=9)
    scan = PersistenceScan(filt, 6, check_invariants=True).run()
    final = homotopy_type(filt.final_graph()).reduced_betti(6)
    got = scan.barcode().betti_at(len(filt))
    assert [got.get(d, 0) for d in range(7)] == final
