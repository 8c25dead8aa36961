"""Online persistent homology of a filtration of cyclic graphs.

The scan keeps the dynamics ``f`` up to date under edge additions and only
ever looks at the handful of vertices around the new edge.  For every
tracked ``k`` it keeps the periodic orbits of winding fraction
``k / (2k + 1)``, each labelled by an id and carrying one open bar in
dimension ``2k`` (except the eldest one, which reduced homology does not
see).  Odd dimensions follow from where the winding fraction sits relative
to consecutive thresholds.
"""

from __future__ import annotations

from fractions import Fraction

from .barcode import (
    Barcode,
    ConeReached,
    EventLog,
    LabelMoved,
    OddBorn,
    OddDied,
    OrbitCreated,
    OrbitDestroyed,
    PersistenceInterval,
)
from .dynamics import dynamics_of, step_map
from .graph import CyclicGraph, Filtration, in_degrees, insertion_reach

BELOW, AT, ABOVE = 0, 1, 2
ESSENTIAL = -1


class InvariantViolation(AssertionError):
    """The incremental state disagrees with a from-scratch recomputation."""


def _region(wf: Fraction, k: int) -> int:
    t = Fraction(k, 2 * k + 1)
    return BELOW if wf < t else AT if wf == t else ABOVE


class PersistenceScan:
    """One pass over a filtration, tracking thresholds ``0..K``.

    ``K = (max_dim + 1) // 2`` so that every even dimension up to
    ``max_dim`` and both neighbours of every odd dimension are covered.
    """

    def __init__(
        self,
        filtration: Filtration,
        max_dim: int,
        record_events: bool = False,
        check_invariants: bool = False,
    ):
        if max_dim < 0:
            raise ValueError("max_dim must be non-negative")
        self.filtration = filtration
        self.max_dim = max_dim
        self.K = (max_dim + 1) // 2
        self.odd_js = [j for j in range(self.K) if 2 * j + 1 <= max_dim]
        self.record = record_events
        self.check = check_invariants
        self.events = EventLog(n_final=filtration.n_final, dims=frozenset(range(max_dim + 1)))

        self.reach: list[int] = []
        self.f: list[int] = []
        self.deg: list[int] = []
        self.label: list[int] = []
        self.orb_k: dict[int, int] = {}
        self.orb_iv: dict[int, int] = {}
        self.orb_rep: dict[int, int] = {}
        self.P = [0] * (self.K + 1)
        self.region = [BELOW] * (self.K + 1)
        self.next_label = 0
        # interval rows: [dim, birth, death, labels, birth_label]
        self.intervals: list[list] = []
        self.odd_open: dict[int, int] = {}
        self.odd_done: list[tuple[int, int, int]] = []
        self.coned = False

    # -- small helpers --------------------------------------------------

    def _emit(self, event) -> None:
        if self.record:
            self.events.append(event)

    def _fresh(self) -> int:
        self.next_label += 1
        return self.next_label - 1

    def _mark(self, x: int, k: int, lab: int) -> None:
        f, label = self.f, self.label
        y = x
        for _ in range(2 * k + 1):
            label[y] = lab
            y = f[y]

    def _elder_key(self, iv: int):
        if iv == ESSENTIAL:
            return (-1, -1)
        row = self.intervals[iv]
        return (row[1], row[4])

    def _close(self, iv: int, step: int) -> None:
        if iv != ESSENTIAL:
            self.intervals[iv][2] = step

    def _open(self, k: int, step: int, lab: int) -> int:
        self.intervals.append([2 * k, step, None, [lab], lab])
        return len(self.intervals) - 1

    def _new_orbit(self, step: int, x: int, k: int) -> None:
        lab = self._fresh()
        self._mark(x, k, lab)
        self.orb_k[lab] = k
        self.orb_rep[lab] = x
        essential = self.P[k] == 0
        self.orb_iv[lab] = ESSENTIAL if essential else self._open(k, step, lab)
        self.P[k] += 1
        self._emit(OrbitCreated(step, 2 * k, lab, essential))

    def _drop_orbit(self, lab: int) -> tuple[int, int]:
        k = self.orb_k.pop(lab)
        del self.orb_rep[lab]
        return k, self.orb_iv.pop(lab)

    def _sync_odd(self, step: int) -> None:
        region = self.region
        for j in self.odd_js:
            dim = 2 * j + 1
            alive = not self.coned and region[j] == ABOVE and region[j + 1] == BELOW
            if alive and dim not in self.odd_open:
                self.odd_open[dim] = step
                self._emit(OddBorn(step, dim))
            elif not alive and dim in self.odd_open:
                birth = self.odd_open.pop(dim)
                self.odd_done.append((dim, birth, step))
                self._emit(OddDied(step, dim))

    # -- cones ----------------------------------------------------------

    def _cone(self, step: int, apex: int) -> None:
        for row in self.intervals:
            if row[2] is None:
                row[2] = step
        self.coned = True
        self.label = [-1] * len(self.reach)
        self.orb_k.clear()
        self.orb_iv.clear()
        self.orb_rep.clear()
        self.P = [0] * (self.K + 1)
        self._emit(ConeReached(step, apex))
        for dim, birth in self.odd_open.items():
            self.odd_done.append((dim, birth, step))
        self.odd_open.clear()

    # -- full recomputation (start, vertex insertions) --------------------

    def _rebuild(self, step: int, position: int | None = None) -> None:
        """Recompute everything from ``self.reach`` and map old orbits forward.

        Each surviving old orbit is sent to the orbit its representative
        vertex flows into; several old orbits landing on one new orbit merge
        under the elder rule.
        """
        reach = self.reach
        n = len(reach)
        g = CyclicGraph(tuple(reach))
        self.f = step_map(reach)
        self.deg = [r + d for r, d in zip(reach, in_degrees(reach))]
        apex = next((v for v in range(n) if self.deg[v] == n - 1), None)
        if apex is not None:
            if not self.coned:
                self._cone(step, apex)
            return
        self.coned = False
        dyn = dynamics_of(g)
        wf = dyn.winding.as_fraction()
        self.region = [_region(wf, k) for k in range(self.K + 1)]
        k_at = next((k for k in range(self.K + 1) if self.region[k] == AT), None)

        shift = (lambda v: v + (v >= position)) if position is not None else (lambda v: v)
        old = sorted(self.orb_k)
        preimages: dict[int, list[int]] = {}
        for lab in old:
            if self.orb_k[lab] == k_at:
                preimages.setdefault(dyn.sink[shift(self.orb_rep[lab])], []).append(lab)
            else:
                k, iv = self._drop_orbit(lab)
                self._close(iv, step)
                self._emit(OrbitDestroyed(step, 2 * k, lab, None, lab))

        self.label = [-1] * n
        self.P = [0] * (self.K + 1)
        if k_at is not None:
            need_essential = not preimages
            order = sorted(range(dyn.P), key=lambda o: min(dyn.orbits[o]))
            for o in order:
                cycle = dyn.orbits[o]
                rep = min(cycle)
                lab = self._fresh()
                for v in cycle:
                    self.label[v] = lab
                src = sorted(preimages.get(o, []), key=lambda a: self._elder_key(self.orb_iv[a]))
                if src:
                    survivor = src[0]
                    _, iv = self._drop_orbit(survivor)
                    self.orb_iv[lab] = iv
                    if iv != ESSENTIAL:
                        self.intervals[iv][3].append(lab)
                    self._emit(LabelMoved(step, 2 * k_at, survivor, lab))
                    for other in src[1:]:
                        _, iv_o = self._drop_orbit(other)
                        self._close(iv_o, step)
                        self._emit(OrbitDestroyed(step, 2 * k_at, other, lab, other))
                else:
                    essential = need_essential
                    need_essential = False
                    self.orb_iv[lab] = ESSENTIAL if essential else self._open(k_at, step, lab)
                    self._emit(OrbitCreated(step, 2 * k_at, lab, essential))
                self.orb_k[lab] = k_at
                self.orb_rep[lab] = rep
                self.P[k_at] += 1
        self._sync_odd(step)

    # -- edge steps -------------------------------------------------------

    def _orbit_change(self, step: int, x: int, old: int, k_old: int, k_new: int) -> None:
        """Bookkeeping once ``f[x]`` has moved; ``old`` is x's former orbit or -1."""
        regions_moved = False
        if old >= 0 and k_new == k_old:
            # the orbit through x was replaced by another one through x
            lab = self._fresh()
            self._mark(x, k_new, lab)
            _, iv = self._drop_orbit(old)
            self.orb_k[lab] = k_new
            self.orb_iv[lab] = iv
            self.orb_rep[lab] = x
            if iv != ESSENTIAL:
                self.intervals[iv][3].append(lab)
            self.P[k_new] += 1
            self._emit(LabelMoved(step, 2 * k_new, old, lab))
            return
        if old >= 0:
            _, iv = self._drop_orbit(old)
            if self.P[k_old] > 0:
                # x now drains into another tracked orbit
                f, label = self.f, self.label
                y, hops = x, 0
                while label[y] < 0:
                    y = f[y]
                    hops += 1
                    if hops > len(f):
                        raise InvariantViolation(f"step {step}: no tracked orbit below vertex {x}")
                other = label[y]
                iv_other = self.orb_iv[other]
                if self._elder_key(iv) < self._elder_key(iv_other):
                    self._close(iv_other, step)
                    self.orb_iv[other] = iv
                    if iv != ESSENTIAL:
                        self.intervals[iv][3].append(other)
                    ended = other
                else:
                    self._close(iv, step)
                    ended = old
                self._emit(OrbitDestroyed(step, 2 * k_old, old, other, ended))
            else:
                self._close(iv, step)
                self._emit(OrbitDestroyed(step, 2 * k_old, old, None, old))
                self.region[k_old] = ABOVE
                regions_moved = True
        if k_new >= 0:
            if self.P[k_new] == 0:
                self.region[k_new] = AT
                for j in range(k_new):
                    self.region[j] = ABOVE
                regions_moved = True
            self._new_orbit(step, x, k_new)
        if regions_moved:
            self._sync_odd(step)

    # -- main loop ----------------------------------------------------------

    def run(self) -> "PersistenceScan":
        filt = self.filtration
        self.reach = list(filt.initial.reach)
        self.label = [-1] * len(self.reach)
        self._rebuild(0)
        if self.check:
            self.verify(0)
        has_vertex_steps = bool(filt.vertex_steps)
        walk = 2 * self.K + 1
        K = self.K
        step = 0
        for raw in filt.iter_raw():
            step += 1
            if type(raw) is not int:
                self.reach = insertion_reach(self.reach, raw)
                self._rebuild(step, raw.position)
                if self.check:
                    self.verify(step)
                continue
            x = raw
            if self.coned:
                if not has_vertex_steps:
                    break
                self.reach[x] += 1
                continue
            reach, f, label, deg = self.reach, self.f, self.label, self.deg
            n = len(reach)
            old = label[x]
            k_old = -1
            if old >= 0:
                k_old = self.orb_k[old]
                y = x
                for _ in range(2 * k_old + 1):
                    label[y] = -1
                    y = f[y]
                self.P[k_old] -= 1
            r = reach[x] + 1
            reach[x] = r
            t = x + r
            if t >= n:
                t -= n
            f[x] = t
            deg[x] += 1
            deg[t] += 1
            if deg[x] == n - 1 or deg[t] == n - 1:
                self._cone(step, min(v for v in (x, t) if deg[v] == n - 1))
                if self.check:
                    self.verify(step)
                continue
            # does the new step close a tracked orbit through x?
            k_new = -1
            y, adv = x, 0
            for s in range(1, walk + 1):
                adv += reach[y]
                y = f[y]
                if y == x:
                    w = s >> 1
                    if s & 1 and w <= K and adv == w * n:
                        k_new = w
                    break
            if old >= 0 or k_new >= 0:
                self._orbit_change(step, x, old, k_old, k_new)
            if self.check:
                self.verify(step)
        cone = filt.cone
        if cone is not None and not self.coned:
            self._cone(len(filt) + 1, cone.apex)
        return self

    # -- debug checks ---------------------------------------------------------

    def verify(self, step: int) -> None:
        """Compare the incremental state with a fresh recomputation."""
        reach = self.reach
        n = len(reach)
        degs = [r + d for r, d in zip(reach, in_degrees(reach))]
        apex = next((v for v in range(n) if degs[v] == n - 1), None)
        if self.coned:
            if apex is None and not self.filtration.vertex_steps:
                raise InvariantViolation(f"step {step}: marked as a cone but no apex")
            return
        if apex is not None:
            raise InvariantViolation(f"step {step}: missed a cone at vertex {apex}")
        if self.deg != degs:
            raise InvariantViolation(f"step {step}: degree array out of date")
        if self.f != step_map(reach):
            raise InvariantViolation(f"step {step}: f out of date")
        dyn = dynamics_of(CyclicGraph(tuple(reach)))
        wf = dyn.winding.as_fraction()
        for k in range(self.K + 1):
            if self.region[k] != _region(wf, k):
                raise InvariantViolation(f"step {step}: threshold {k} misplaced for wf={wf}")
            expected = dyn.P if self.region[k] == AT else 0
            if self.P[k] != expected:
                raise InvariantViolation(f"step {step}: P[{k}]={self.P[k]}, expected {expected}")
        tracked = any(r == AT for r in self.region)
        for v in range(n):
            if (self.label[v] >= 0) != (tracked and dyn.periodic[v]):
                raise InvariantViolation(f"step {step}: periodic flag wrong at vertex {v}")
        if tracked:
            groups: dict[int, set[int]] = {}
            for v in range(n):
                if self.label[v] >= 0:
                    groups.setdefault(self.label[v], set()).add(v)
            if sorted(map(sorted, groups.values())) != sorted(sorted(o) for o in dyn.orbits):
                raise InvariantViolation(f"step {step}: orbit labels disagree with the dynamics")
            if set(groups) != set(self.orb_k):
                raise InvariantViolation(f"step {step}: stale orbit records")
            if sum(1 for iv in self.orb_iv.values() if iv == ESSENTIAL) != 1:
                raise InvariantViolation(f"step {step}: expected exactly one eldest orbit")
        if len(self.odd_open) > len(self.odd_js):
            raise InvariantViolation(f"step {step}: too many odd classes alive")

    # -- output -------------------------------------------------------------

    def barcode(self, dims=None) -> Barcode:
        dims = frozenset(range(self.max_dim + 1) if dims is None else dims)
        out = []
        for dim, birth, death, labels, _ in self.intervals:
            if dim in dims and birth != death:
                out.append(PersistenceInterval(dim, birth, death, label_history=tuple(labels)))
        for dim, birth, death in self.odd_done:
            if dim in dims and birth != death:
                out.append(PersistenceInterval(dim, birth, death))
        for dim, birth in self.odd_open.items():
            if dim in dims:
                out.append(PersistenceInterval(dim, birth, None))
        return Barcode(out, self.filtration.n_final, dims).with_scales(self.filtration)

    def event_log(self, dims=None) -> EventLog:
        # the scan may track one dimension above max_dim; keep it out of the log
        dims = frozenset(range(self.max_dim + 1) if dims is None else dims)
        keep = [
            ev for ev in self.events if isinstance(ev, ConeReached) or getattr(ev, "dim", None) in dims
        ]
        return EventLog(keep, self.events.n_final, dims)


def even_persistence(filtration: Filtration, k: int, check_invariants: bool = False):
    """Barcode in dimension ``2k`` together with the event log that produced it."""
    if k < 0:
        raise ValueError("k must be non-negative")
    scan = PersistenceScan(filtration, 2 * k, record_events=True, check_invariants=check_invariants)
    scan.run()
    return scan.barcode({2 * k}), scan.event_log({2 * k})


def odd_persistence(filtration: Filtration, k: int, check_invariants: bool = False) -> Barcode:
    """Barcode in dimension ``2k + 1``: at most one bar alive at any time."""
    if k < 0:
        raise ValueError("k must be non-negative")
    scan = PersistenceScan(filtration, 2 * k + 1, check_invariants=check_invariants).run()
    return scan.barcode({2 * k + 1})


def full_persistence(
    filtration: Filtration,
    max_dim: int,
    reduced: bool = True,
    check_invariants: bool = False,
    events: bool = False,
):
    """Barcode in every dimension ``0..max_dim``.

    With ``events=True`` returns ``(barcode, event_log)``.
    """
    scan = PersistenceScan(filtration, max_dim, record_events=events, check_invariants=check_invariants)
    scan.run()
    bars = scan.barcode()
    if not reduced:
        bars = bars.unreduced()
    return (bars, scan.event_log()) if events else bars
