"""Brute-force persistence: enumerate the clique complex, reduce its boundary matrix.

This is deliberately the textbook algorithm over the two-element field, with
columns stored as Python-int bitmasks.  It is exponential in the clique size
and only meant for a handful of vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .barcode import Barcode, PersistenceInterval
from .errors import CapExceeded
from .graph import CyclicGraph, Filtration, insertion_reach

DEFAULT_CAP = 16


@dataclass(frozen=True)
class Simplex:
    vertices: tuple[int, ...]  # stable vertex ids, sorted
    index: int

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1


@dataclass
class FilteredComplex:
    """Simplices sorted by (index, dimension, vertices).

    ``max_dim`` is the largest homological dimension the complex is meant
    to answer for, so simplices go up to dimension ``max_dim + 1``.
    """

    simplices: list[Simplex]
    max_dim: int
    n_vertices: int
    last_index: int

    def counts_at(self, index: int) -> list[int]:
        """Number of simplices of each dimension present at ``index``."""
        counts = [0] * (self.max_dim + 2)
        for s in self.simplices:
            if s.index <= index:
                counts[s.dim] += 1
        return counts

    def is_face_closed(self) -> bool:
        born = {s.vertices: s.index for s in self.simplices}
        for s in self.simplices:
            if s.dim == 0:
                continue
            for face in combinations(s.vertices, s.dim):
                if born.get(face, s.index + 1) > s.index:
                    return False
        return True

    def dump(self) -> str:
        return "\n".join(
            f"{s.index}\t{s.dim}\t{' '.join(map(str, s.vertices))}" for s in self.simplices
        )


def stamped_edges(filtration: Filtration) -> tuple[dict[int, int], dict[tuple[int, int], int], int]:
    """Birth index of every vertex and undirected edge, keyed by stable ids.

    Vertices keep the id they were created with, so insertions renumber
    nothing.  A terminal cone marker contributes its pair at
    ``len(filtration) + 1``.
    """
    n0 = filtration.initial.n
    ids = list(range(n0))  # position -> stable id
    vertex_birth = {v: 0 for v in ids}
    edge_birth: dict[tuple[int, int], int] = {}

    def add(u, v, index):
        edge_birth.setdefault((min(u, v), max(u, v)), index)

    reach = list(filtration.initial.reach)
    for i, r in enumerate(reach):
        for j in range(1, r + 1):
            add(ids[i], ids[(i + j) % n0], 0)

    for index, raw in enumerate(filtration.iter_raw(), start=1):
        if isinstance(raw, int):
            reach[raw] += 1
            add(ids[raw], ids[(raw + reach[raw]) % len(reach)], index)
            continue
        p = raw.position
        new_id = len(vertex_birth)
        vertex_birth[new_id] = index
        reach = insertion_reach(reach, raw)
        ids.insert(p, new_id)
        m = len(reach)
        for j in range(1, reach[p] + 1):
            add(new_id, ids[(p + j) % m], index)
        for s in raw.in_sources:
            add(ids[s if s < p else s + 1], new_id, index)
    last = len(filtration)
    if filtration.cone is not None:
        last += 1
        u, v = filtration.cone.pair
        add(ids[u], ids[v], last)
    return vertex_birth, edge_birth, last


def clique_complex(filtration: Filtration, max_dim: int, cap: int = DEFAULT_CAP) -> FilteredComplex:
    """Every clique with at most ``max_dim + 2`` vertices, stamped with its entry index."""
    if filtration.n_final > cap:
        raise CapExceeded(f"oracle limited to {cap} vertices, got {filtration.n_final}")
    vertex_birth, edge_birth, last = stamped_edges(filtration)
    nv = len(vertex_birth)
    nbr = [0] * nv
    for u, v in edge_birth:
        nbr[u] |= 1 << v
        nbr[v] |= 1 << u
    top = max_dim + 2
    simplices: list[Simplex] = []

    def extend(clique, index, candidates):
        simplices.append(Simplex(clique, index))
        if len(clique) == top:
            return
        while candidates:
            low = candidates & -candidates
            w = low.bit_length() - 1
            candidates ^= low
            stamp = max([index, vertex_birth[w]] + [edge_birth[(u, w)] for u in clique])
            extend(clique + (w,), stamp, candidates & nbr[w])

    for v in range(nv):
        higher = nbr[v] & ~((1 << (v + 1)) - 1)
        extend((v,), vertex_birth[v], higher)
    simplices.sort(key=lambda s: (s.index, s.dim, s.vertices))
    return FilteredComplex(simplices, max_dim, nv, last)


def reduce_columns(cx: FilteredComplex) -> tuple[list[tuple[int, int]], list[int]]:
    """Standard column reduction; returns (pairs, unpaired) as positions in ``cx.simplices``."""
    pos = {s.vertices: i for i, s in enumerate(cx.simplices)}
    reduced: list[int] = []
    pivot_of: dict[int, int] = {}  # pivot row -> column holding it
    pairs = []
    paired = set()
    for j, s in enumerate(cx.simplices):
        col = 0
        if s.dim > 0:
            for face in combinations(s.vertices, s.dim):
                col ^= 1 << pos[face]
        while col:
            low = col.bit_length() - 1
            other = pivot_of.get(low)
            if other is None:
                pivot_of[low] = j
                pairs.append((low, j))
                paired.update((low, j))
                break
            col ^= reduced[other]
        reduced.append(col)
    unpaired = [i for i in range(len(cx.simplices)) if i not in paired]
    return pairs, unpaired


def reduce(cx: FilteredComplex, reduced: bool = True) -> Barcode:
    """Index-valued barcode in dimensions ``0..cx.max_dim``."""
    simplices = cx.simplices
    pairs, unpaired = reduce_columns(cx)
    out = []
    for b, d in pairs:
        sb, sd = simplices[b], simplices[d]
        if sb.dim <= cx.max_dim and sb.index != sd.index:
            out.append(PersistenceInterval(sb.dim, sb.index, sd.index))
    infinite = [simplices[i] for i in unpaired if simplices[i].dim <= cx.max_dim]
    if reduced:
        # the eldest vertex carries the class that reduced homology drops
        eldest = next((s for s in infinite if s.dim == 0), None)
        infinite = [s for s in infinite if s is not eldest]
    out.extend(PersistenceInterval(s.dim, s.index, None) for s in infinite)
    return Barcode(out, cx.n_vertices, frozenset(range(cx.max_dim + 1)))


def oracle_barcode(
    filtration: Filtration, max_dim: int, reduced: bool = True, cap: int = DEFAULT_CAP
) -> Barcode:
    return reduce(clique_complex(filtration, max_dim, cap), reduced=reduced)


def euler_check(cx: FilteredComplex) -> tuple[int, int]:
    """(simplex alternating sum, Betti alternating sum) of the final skeleton.

    The skeleton is the one enumerated, so its top dimension is included
    and unpaired top simplices count as cycles.  Both sides are unreduced.
    """
    counts = cx.counts_at(cx.last_index)
    chi_cells = sum((-1) ** d * c for d, c in enumerate(counts))
    _, unpaired = reduce_columns(cx)
    chi_betti = sum((-1) ** cx.simplices[i].dim for i in unpaired)
    return chi_cells, chi_betti


def betti_numbers(graph: CyclicGraph, max_dim: int, reduced: bool = True, cap: int = DEFAULT_CAP) -> list[int]:
    """Betti numbers of ``Cl(graph)`` in dimensions ``0..max_dim``."""
    cx = clique_complex(Filtration(graph, validate=False), max_dim, cap)
    bars = reduce(cx, reduced=reduced)
    betti = [0] * (max_dim + 1)
    for iv in bars.infinite():
        betti[iv.dim] += 1
    return betti
