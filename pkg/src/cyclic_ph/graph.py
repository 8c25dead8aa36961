"""Finite cyclic graphs, filtration steps, and filtrations.

A cyclic graph on ``n`` vertices placed counterclockwise at positions
``0..n-1`` is stored as a *reach vector*: vertex ``i`` has a directed edge
to ``(i + j) % n`` exactly when ``1 <= j <= reach[i]``.  Out-neighbourhoods
of a cyclic graph are always such counterclockwise runs, so nothing is lost.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

from .errors import InvalidFiltration, InvalidStep


@dataclass(frozen=True)
class CyclicGraph:
    """Directed graph on ``len(reach)`` cyclically ordered vertices.

    The constructor does not check the cyclic-graph invariants; use
    :func:`validate` or :func:`ensure_valid` for that.
    """

    reach: tuple[int, ...]

    def __post_init__(self):
        reach = tuple(int(r) for r in self.reach)
        if not reach:
            raise ValueError("a cyclic graph needs at least one vertex")
        object.__setattr__(self, "reach", reach)

    @property
    def n(self) -> int:
        return len(self.reach)

    @classmethod
    def edgeless(cls, n: int) -> "CyclicGraph":
        return cls((0,) * n)

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "CyclicGraph":
        """Rebuild a graph from explicit directed edges ``(source, target)``.

        Raises ``ValueError`` if some out-neighbourhood is not a
        counterclockwise run starting at the successor of its source.
        """
        outs: list[set[int]] = [set() for _ in range(n)]
        for s, t in edges:
            if s == t:
                raise ValueError(f"loop at vertex {s}")
            outs[s].add((t - s) % n)
        reach = []
        for i, offsets in enumerate(outs):
            r = len(offsets)
            if offsets != set(range(1, r + 1)):
                raise ValueError(f"out-neighbourhood of {i} is not a counterclockwise run")
            reach.append(r)
        return cls(tuple(reach))

    def edges(self) -> list[tuple[int, int]]:
        n = self.n
        return [(i, (i + j) % n) for i, r in enumerate(self.reach) for j in range(1, r + 1)]

    def has_edge(self, s: int, t: int) -> bool:
        return 1 <= (t - s) % self.n <= self.reach[s]

    def adjacent(self, u: int, v: int) -> bool:
        return u != v and (self.has_edge(u, v) or self.has_edge(v, u))

    def in_degrees(self) -> list[int]:
        return in_degrees(self.reach)


@dataclass(frozen=True)
class AddEdge:
    """Add the edge ``source -> source + reach[source] + 1``."""

    source: int


@dataclass(frozen=True)
class AddVertex:
    """Insert a vertex at cyclic slot ``position``.

    The new vertex takes index ``position`` and existing vertices at or after
    that index shift up by one.  ``in_sources`` uses pre-insertion indices and
    must list every existing vertex that gains an edge to the new vertex.
    """

    position: int
    out_reach: int
    in_sources: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "in_sources", tuple(sorted(int(s) for s in self.in_sources)))


FiltrationStep = Union[AddEdge, AddVertex]


@dataclass(frozen=True)
class Violation:
    kind: str  # "reach_bound" | "cyclicity" | "antiparallel"
    index: int
    detail: str


def in_degrees(reach: Sequence[int]) -> list[int]:
    """In-degree of every vertex, via a difference array over the circle."""
    n = len(reach)
    diff = [0] * (n + 1)
    for i, r in enumerate(reach):
        if r <= 0:
            continue
        lo, hi = i + 1, i + r  # targets lo..hi, possibly wrapping
        if hi < n:
            diff[lo] += 1
            diff[hi + 1] -= 1
        elif lo >= n:
            diff[lo - n] += 1
            diff[hi - n + 1] -= 1
        else:
            diff[lo] += 1
            diff[n] -= 1
            diff[0] += 1
            diff[hi - n + 1] -= 1
    out, acc = [], 0
    for i in range(n):
        acc += diff[i]
        out.append(acc)
    return out


def validate(graph: CyclicGraph) -> list[Violation]:
    """Every violated cyclic-graph invariant; empty iff ``graph`` is cyclic."""
    reach, n = graph.reach, graph.n
    found = []
    for i, r in enumerate(reach):
        if not 0 <= r <= n - 1:
            found.append(Violation("reach_bound", i, f"reach[{i}]={r} outside [0, {n - 1}]"))
    for i, r in enumerate(reach):
        nxt = reach[(i + 1) % n]
        if nxt < r - 1:
            found.append(
                Violation("cyclicity", i, f"reach[{(i + 1) % n}]={nxt} < reach[{i}]-1={r - 1}")
            )
    monotone = not found
    for i, r in enumerate(reach):
        if r <= 0:
            continue
        # with cyclicity, j + reach[i+j] is non-decreasing in j, so only the
        # furthest target can close an antiparallel pair
        if monotone and r <= n - 1 and r + reach[(i + r) % n] < n:
            continue
        for j in range(1, min(r, n - 1) + 1):
            t = (i + j) % n
            if reach[t] >= n - j:
                found.append(Violation("antiparallel", i, f"edges {i}->{t} and {t}->{i}"))
                break
    return found


def is_valid(graph: CyclicGraph) -> bool:
    return not validate(graph)


def ensure_valid(graph: CyclicGraph) -> CyclicGraph:
    problems = validate(graph)
    if problems:
        raise InvalidStep("; ".join(v.detail for v in problems))
    return graph


def edge_problem(reach: Sequence[int], source: int) -> str | None:
    """Why the next edge out of ``source`` cannot be added, or ``None``.

    Only three things can break: the reach bound, cyclicity at ``source``
    itself, and an antiparallel edge at the new target.  O(1).
    """
    n = len(reach)
    if not 0 <= source < n:
        return f"source {source} out of range"
    r = reach[source] + 1
    if r > n - 1:
        return f"vertex {source} already points at every other vertex"
    if reach[(source + 1) % n] < r - 1:
        return (
            f"cyclicity: reach[{(source + 1) % n}]={reach[(source + 1) % n]} "
            f"must be at least {r - 1}"
        )
    t = (source + r) % n
    if reach[t] >= n - r:
        return f"antiparallel: {t} already points at {source}"
    return None


def insertion_reach(reach: Sequence[int], step: AddVertex) -> list[int]:
    """Reach vector after inserting a vertex; raises ``InvalidStep``.

    Checks the payload (forced in-sources present, no impossible ones) and
    then every invariant of the grown graph.
    """
    n = len(reach)
    p = step.position
    if not 0 <= p <= n:
        raise InvalidStep(f"vertex position {p} outside [0, {n}]")
    in_sources = set(step.in_sources)
    if len(in_sources) != len(step.in_sources) or any(not 0 <= s < n for s in in_sources):
        raise InvalidStep("in_sources must be distinct existing vertices")
    new = []
    for i, r in enumerate(reach):
        # distance from i to the old vertex just before the slot
        d = (p - 1 - i) % n
        if d < r:
            if i not in in_sources:
                raise InvalidStep(f"vertex {i} spans the new slot and must gain an edge to it")
            new.append(r + 1)
        elif d == r:
            new.append(r + (i in in_sources))
        else:
            if i in in_sources:
                raise InvalidStep(f"vertex {i} cannot reach the new slot contiguously")
            new.append(r)
    new.insert(p, step.out_reach)
    problems = validate(CyclicGraph(tuple(new)))
    if problems:
        raise InvalidStep("; ".join(v.detail for v in problems))
    return new


def apply_step(graph: CyclicGraph, step: FiltrationStep) -> CyclicGraph:
    """The graph grown by one step.  Never mutates ``graph``."""
    if isinstance(step, AddEdge):
        problem = edge_problem(graph.reach, step.source)
        if problem:
            raise InvalidStep(problem)
        reach = list(graph.reach)
        reach[step.source] += 1
        return CyclicGraph(tuple(reach))
    if isinstance(step, AddVertex):
        return CyclicGraph(tuple(insertion_reach(graph.reach, step)))
    raise TypeError(f"not a filtration step: {step!r}")


def degree(graph: CyclicGraph, v: int) -> int:
    """In-degree plus out-degree of ``v``."""
    return graph.reach[v] + graph.in_degrees()[v]


def is_cone(graph: CyclicGraph) -> int | None:
    """Least-index vertex adjacent to every other vertex, or ``None``."""
    n = graph.n
    for v, (r, d) in enumerate(zip(graph.reach, graph.in_degrees())):
        if r + d == n - 1:
            return v
    return None


@dataclass(frozen=True)
class ConeMarker:
    """Terminal event: the undirected edge ``pair`` turns the graph into a cone.

    Used by the geometric pipeline when the last Rips edge before
    contractibility admits no cyclic orientation.  It sits at index
    ``len(filtration) + 1``.
    """

    apex: int
    pair: tuple[int, int]
    scale: float | None = None


_CHUNK = 1 << 16


class Filtration:
    """An increasing sequence of cyclic graphs, grown one step at a time.

    Index 0 is ``initial``; index ``i >= 1`` is the graph after step ``i``.
    Edge steps are stored compactly as an int array of sources (``-1`` marks
    a vertex step whose payload lives in ``vertex_steps``), so a filtration
    with millions of edges stays cheap.
    """

    initial: CyclicGraph
    sources: np.ndarray
    vertex_steps: dict[int, AddVertex]
    scales: np.ndarray | None
    cone: ConeMarker | None
    order: tuple[int, ...] | None

    def __init__(
        self,
        initial: CyclicGraph | int,
        steps: Iterable[FiltrationStep] = (),
        scales: Sequence[float] | None = None,
        cone: ConeMarker | None = None,
        order: Sequence[int] | None = None,
        validate: bool = True,
    ):
        if isinstance(initial, int):
            initial = CyclicGraph.edgeless(initial)
        sources, vertex_steps = [], {}
        for pos, step in enumerate(steps):
            if isinstance(step, AddEdge):
                sources.append(int(step.source))
            elif isinstance(step, AddVertex):
                sources.append(-1)
                vertex_steps[pos] = step
            else:
                raise TypeError(f"not a filtration step: {step!r}")
        self._setup(initial, np.asarray(sources, dtype=np.int64), vertex_steps, scales, cone, order)
        if validate:
            self.check()

    @classmethod
    def from_sources(
        cls,
        initial: CyclicGraph | int,
        sources,
        scales=None,
        cone: ConeMarker | None = None,
        order=None,
        vertex_steps: dict[int, AddVertex] | None = None,
        validate: bool = True,
    ) -> "Filtration":
        """Build from a source array directly (the fast path for big inputs)."""
        self = cls.__new__(cls)
        if isinstance(initial, int):
            initial = CyclicGraph.edgeless(initial)
        self._setup(
            initial, np.asarray(sources, dtype=np.int64), dict(vertex_steps or {}), scales, cone, order
        )
        if validate:
            self.check()
        return self

    def _setup(self, initial, sources, vertex_steps, scales, cone, order):
        self.initial = initial
        self.sources = sources
        self.vertex_steps = vertex_steps
        self.scales = None if scales is None else np.asarray(scales, dtype=float)
        self.cone = cone
        self.order = None if order is None else tuple(int(i) for i in order)
        # set by the geometric pipeline when it had to stop early: (pair, scale)
        self.truncated: tuple[tuple[int, int], float] | None = None
        if self.scales is not None and len(self.scales) != len(self.sources):
            raise InvalidFiltration("scales must have one entry per step")

    def __len__(self) -> int:
        return len(self.sources)

    @property
    def n_final(self) -> int:
        return self.initial.n + len(self.vertex_steps)

    @property
    def last_index(self) -> int:
        """Index of the last graph, counting a terminal cone marker."""
        return len(self) + (self.cone is not None)

    def iter_raw(self) -> Iterator[int | AddVertex]:
        """Steps as plain ints (edge sources) or ``AddVertex`` payloads."""
        vsteps = self.vertex_steps
        for start in range(0, len(self.sources), _CHUNK):
            chunk = self.sources[start : start + _CHUNK].tolist()
            if not vsteps:
                yield from chunk
                continue
            for off, s in enumerate(chunk):
                yield vsteps[start + off] if s < 0 else s

    def __iter__(self) -> Iterator[FiltrationStep]:
        for raw in self.iter_raw():
            yield AddEdge(raw) if isinstance(raw, int) else raw

    @property
    def steps(self) -> list[FiltrationStep]:
        return list(self)

    def scale_at(self, index: int) -> float | None:
        """Scale of the graph at ``index``; the initial graph sits at 0."""
        if self.scales is None:
            return None
        if index == 0:
            return 0.0
        if index <= len(self):
            return float(self.scales[index - 1])
        if self.cone is not None and index == len(self) + 1:
            return self.cone.scale
        raise IndexError(index)

    def graphs(self) -> Iterator[CyclicGraph]:
        """Every prefix graph, from ``initial`` onwards (O(n) per step)."""
        reach = list(self.initial.reach)
        yield self.initial
        for raw in self.iter_raw():
            if isinstance(raw, int):
                reach[raw] += 1
            else:
                reach = insertion_reach(reach, raw)
            yield CyclicGraph(tuple(reach))

    def final_graph(self) -> CyclicGraph:
        reach = list(self.initial.reach)
        for raw in self.iter_raw():
            if isinstance(raw, int):
                reach[raw] += 1
            else:
                reach = insertion_reach(reach, raw)
        return CyclicGraph(tuple(reach))

    def check(self) -> None:
        """Replay every step; raise ``InvalidFiltration`` at the first bad one."""
        problems = validate(self.initial)
        if problems:
            raise InvalidFiltration("initial graph: " + problems[0].detail, 0)
        if self.scales is not None and len(self.scales) > 1:
            bad = np.flatnonzero(np.diff(self.scales) < 0)
            if len(bad):
                raise InvalidFiltration("scales must be non-decreasing", int(bad[0]) + 2)
        reach = list(self.initial.reach)
        for i, raw in enumerate(self.iter_raw(), start=1):
            if isinstance(raw, int):
                problem = edge_problem(reach, raw)
                if problem:
                    raise InvalidFiltration(problem, i)
                reach[raw] += 1
            else:
                try:
                    reach = insertion_reach(reach, raw)
                except InvalidStep as exc:
                    raise InvalidFiltration(str(exc), i) from None
        if self.cone is not None:
            self._check_cone(reach)

    def _check_cone(self, reach):
        g = CyclicGraph(tuple(reach))
        u, v = self.cone.pair
        n = g.n
        if not (0 <= u < n and 0 <= v < n) or u == v or g.adjacent(u, v):
            raise InvalidFiltration(f"cone pair {self.cone.pair} is not a missing edge", len(self) + 1)
        degs = [r + d for r, d in zip(g.reach, g.in_degrees())]
        degs[u] += 1
        degs[v] += 1
        if self.cone.apex not in (u, v) or degs[self.cone.apex] != n - 1:
            raise InvalidFiltration("cone marker does not produce a cone", len(self) + 1)
        if self.scales is not None and len(self.scales) and self.cone.scale is not None:
            if self.cone.scale < self.scales[-1]:
                raise InvalidFiltration("cone scale precedes the last step", len(self) + 1)

    # -- JSON -------------------------------------------------------------

    def to_dict(self) -> dict:
        steps = []
        for raw in self.iter_raw():
            if isinstance(raw, int):
                steps.append({"type": "edge", "source": raw})
            else:
                steps.append(
                    {
                        "type": "vertex",
                        "position": raw.position,
                        "out_reach": raw.out_reach,
                        "in_sources": list(raw.in_sources),
                    }
                )
        out: dict = {"n": self.initial.n}
        if any(self.initial.reach):
            out["initial_reach"] = list(self.initial.reach)
        out["steps"] = steps
        if self.scales is not None:
            out["scales"] = [float(s) for s in self.scales]
        if self.cone is not None:
            out["cone"] = {"apex": self.cone.apex, "pair": list(self.cone.pair)}
            if self.cone.scale is not None:
                out["cone"]["scale"] = self.cone.scale
        if self.order is not None:
            out["order"] = list(self.order)
        return out

    @classmethod
    def from_dict(cls, data: dict, validate: bool = True) -> "Filtration":
        try:
            n = int(data["n"])
            initial = CyclicGraph(tuple(data.get("initial_reach", [0] * n)))
            if initial.n != n:
                raise InvalidFiltration("initial_reach length differs from n")
            steps = []
            for i, s in enumerate(data.get("steps", []), start=1):
                kind = s.get("type")
                if kind == "edge":
                    steps.append(AddEdge(int(s["source"])))
                elif kind == "vertex":
                    steps.append(
                        AddVertex(int(s["position"]), int(s["out_reach"]), tuple(s.get("in_sources", ())))
                    )
                else:
                    raise InvalidFiltration(f"unknown step type {kind!r}", i)
            cone = None
            if data.get("cone") is not None:
                c = data["cone"]
                cone = ConeMarker(int(c["apex"]), tuple(int(v) for v in c["pair"]), c.get("scale"))
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InvalidFiltration):
                raise
            raise InvalidFiltration(f"malformed filtration JSON: {exc}") from None
        return cls(initial, steps, data.get("scales"), cone, data.get("order"), validate=validate)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str, validate: bool = True) -> "Filtration":
        return cls.from_dict(json.loads(text), validate=validate)


def regular_rounds(n: int, rounds: int) -> Filtration:
    """Edgeless start, then every vertex gains one edge per round, round-robin."""
    return Filtration.from_sources(n, [i for _ in range(rounds) for i in range(n)])


def random_filtration(
    n: int,
    seed: int | None = None,
    vertex_steps: bool = False,
    n_initial: int | None = None,
    max_steps: int | None = None,
) -> Filtration:
    """A random filtration that stays cyclic at every prefix.

    Edges are drawn uniformly from all currently legal edge additions until
    none remain (cones are allowed and grown through).  With
    ``vertex_steps`` the filtration starts from ``n_initial`` vertices and
    interleaves random vertex insertions until it has ``n``.
    """
    rng = random.Random(seed)
    n0 = n if not vertex_steps else (n_initial or max(1, n // 2))
    reach = [0] * n0
    steps: list[FiltrationStep] = []
    while max_steps is None or len(steps) < max_steps:
        legal = [s for s in range(len(reach)) if edge_problem(reach, s) is None]
        want_vertex = len(reach) < n and (not legal or rng.random() < 0.15)
        if want_vertex:
            step = _random_vertex_step(reach, rng)
            if step is not None:
                reach = insertion_reach(reach, step)
                steps.append(step)
                continue
        if not legal:
            if len(reach) < n:
                continue
            break
        s = rng.choice(legal)
        reach[s] += 1
        steps.append(AddEdge(s))
    return Filtration(CyclicGraph.edgeless(n0), steps)


def _random_vertex_step(reach: list[int], rng: random.Random, attempts: int = 50) -> AddVertex | None:
    n = len(reach)
    for _ in range(attempts):
        p = rng.randrange(n + 1)
        forced, optional = [], []
        for i, r in enumerate(reach):
            d = (p - 1 - i) % n
            if d < r:
                forced.append(i)
            elif d == r:
                optional.append(i)
        chosen = forced + [i for i in optional if rng.random() < 0.5]
        out = rng.randrange(0, max(1, (n + 1) // 2))
        step = AddVertex(p, out, tuple(chosen))
        try:
            insertion_reach(reach, step)
        except InvalidStep:
            continue
        return step
    return None
