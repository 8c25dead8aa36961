"""The cyclic dynamical system of a cyclic graph and what it says about Cl(G).

Each vertex is sent to its counterclockwise-furthest out-neighbour.  All
periodic orbits of that map share one length ``ell`` and one winding number
``omega``; the clique complex is an odd sphere or a wedge of even spheres
depending on where ``omega / ell`` sits relative to the values
``k / (2k + 1)``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import DomainError
from .graph import CyclicGraph, is_cone


@functools.total_ordering
@dataclass(frozen=True, eq=False)
class WindingFraction:
    """``omega / ell`` kept exactly as measured on an orbit (not reduced)."""

    omega: int
    ell: int

    def __post_init__(self):
        if self.ell <= 0 or self.omega < 0:
            raise ValueError(f"bad winding fraction {self.omega}/{self.ell}")

    def _pair(self, other):
        if isinstance(other, WindingFraction):
            return other.omega, other.ell
        if isinstance(other, (int, Fraction)):
            other = Fraction(other)
            return other.numerator, other.denominator
        return NotImplemented

    def __eq__(self, other):
        pair = self._pair(other)
        if pair is NotImplemented:
            return NotImplemented
        return self.omega * pair[1] == pair[0] * self.ell

    def __lt__(self, other):
        pair = self._pair(other)
        if pair is NotImplemented:
            return NotImplemented
        return self.omega * pair[1] < pair[0] * self.ell

    def __hash__(self):
        return hash(self.as_fraction())

    def as_fraction(self) -> Fraction:
        return Fraction(self.omega, self.ell)

    def __str__(self):
        return f"{self.omega}/{self.ell}"


def threshold(k: int) -> Fraction:
    """The winding fraction ``k / (2k + 1)`` at which even spheres appear."""
    return Fraction(k, 2 * k + 1)


# -- homotopy types ---------------------------------------------------------


@dataclass(frozen=True)
class Contractible:
    def reduced_betti(self, max_dim: int) -> list[int]:
        return [0] * (max_dim + 1)

    def __str__(self):
        return "point"

    def to_dict(self):
        return {"type": "point"}


@dataclass(frozen=True)
class OddSphere:
    """``S^(2k+1)``."""

    k: int

    @property
    def dim(self) -> int:
        return 2 * self.k + 1

    def reduced_betti(self, max_dim: int) -> list[int]:
        return [int(d == self.dim) for d in range(max_dim + 1)]

    def __str__(self):
        return f"S^{self.dim}"

    def to_dict(self):
        return {"type": "sphere", "dim": self.dim}


@dataclass(frozen=True)
class EvenWedge:
    """Wedge of ``m >= 1`` copies of ``S^(2k)``; build through :func:`even_wedge`."""

    m: int
    k: int

    @property
    def dim(self) -> int:
        return 2 * self.k

    def reduced_betti(self, max_dim: int) -> list[int]:
        return [self.m if d == self.dim else 0 for d in range(max_dim + 1)]

    def __str__(self):
        if self.m == 1:
            return f"S^{self.dim}"
        return f"wedge({self.m}, S^{self.dim})"

    def to_dict(self):
        if self.m == 1:
            return {"type": "sphere", "dim": self.dim}
        return {"type": "wedge", "count": self.m, "dim": self.dim}


HomotopyType = Union[Contractible, OddSphere, EvenWedge]


def even_wedge(m: int, k: int):
    """A wedge of ``m`` copies of ``S^(2k)``, normalising the empty wedge to a point."""
    if m < 0 or k < 0:
        raise ValueError("wedge parameters must be non-negative")
    return Contractible() if m == 0 else EvenWedge(m, k)


def parse_homotopy_type(text: str):
    """Inverse of ``str()`` on the three homotopy-type classes."""
    text = text.strip()
    if text == "point":
        return Contractible()
    if text.startswith("wedge(") and text.endswith(")"):
        count, sphere = text[len("wedge(") : -1].split(",")
        dim = int(sphere.strip().removeprefix("S^"))
        if dim % 2:
            raise ValueError(f"wedges of odd spheres do not occur: {text}")
        return even_wedge(int(count), dim // 2)
    if text.startswith("S^"):
        dim = int(text[2:])
        return OddSphere(dim // 2) if dim % 2 else EvenWedge(1, dim // 2)
    raise ValueError(f"unrecognised homotopy type {text!r}")


# -- dynamics ---------------------------------------------------------------


@dataclass(frozen=True)
class DynamicsState:
    """Fully resolved dynamics of one cyclic graph.

    ``orbit_label[v]`` is the index into ``orbits`` for periodic ``v`` and
    ``None`` otherwise; ``sink[v]`` is the orbit that ``v`` eventually falls
    into.  ``P`` counts all periodic orbits.
    """

    f: tuple[int, ...]
    periodic: tuple[bool, ...]
    orbit_label: tuple[int | None, ...]
    orbits: tuple[tuple[int, ...], ...]
    sink: tuple[int, ...]
    winding: WindingFraction

    @property
    def P(self) -> int:
        return len(self.orbits)


def step_map(reach: Sequence[int]) -> list[int]:
    n = len(reach)
    return [(i + r) % n for i, r in enumerate(reach)]


def dynamics_of(graph: CyclicGraph) -> DynamicsState:
    """Resolve ``f``, its periodic orbits, and basins in O(n) by path marking."""
    reach, n = graph.reach, graph.n
    f = step_map(reach)
    state = [0] * n  # 0 unseen, 1 on the current path, 2 finished
    sink = [-1] * n
    label: list[int | None] = [None] * n
    orbits: list[tuple[int, ...]] = []
    windings: list[tuple[int, int]] = []
    for start in range(n):
        if state[start]:
            continue
        path = []
        y = start
        while state[y] == 0:
            state[y] = 1
            path.append(y)
            y = f[y]
        if state[y] == 1:
            cycle = path[path.index(y) :]
            orbit_id = len(orbits)
            orbits.append(tuple(cycle))
            advance = sum(reach[v] for v in cycle)
            windings.append((advance // n, len(cycle)))
            for v in cycle:
                label[v] = orbit_id
            target = orbit_id
        else:
            target = sink[y]
        for v in path:
            state[v] = 2
            sink[v] = target
    omega, ell = windings[0]
    return DynamicsState(
        f=tuple(f),
        periodic=tuple(lab is not None for lab in label),
        orbit_label=tuple(label),
        orbits=tuple(orbits),
        sink=tuple(sink),
        winding=WindingFraction(omega, ell),
    )


def orbit_windings(graph: CyclicGraph) -> list[WindingFraction]:
    """``(omega, ell)`` of every periodic orbit, in discovery order."""
    state = dynamics_of(graph)
    n = graph.n
    return [
        WindingFraction(sum(graph.reach[v] for v in orbit) // n, len(orbit)) for orbit in state.orbits
    ]


def winding_fraction(graph: CyclicGraph) -> WindingFraction:
    return dynamics_of(graph).winding


def classify(wf: WindingFraction, P: int):
    """Homotopy type of ``Cl(G)`` from its winding fraction and orbit count."""
    if not isinstance(wf, WindingFraction):
        frac = Fraction(wf)
        wf = WindingFraction(frac.numerator, frac.denominator)
    if 2 * wf.omega >= wf.ell:
        raise DomainError(f"winding fraction {wf} is not below 1/2")
    if P < 1:
        raise DomainError("a finite cyclic graph has at least one periodic orbit")
    # k/(2k+1) <= w/l  <=>  k <= w/(l - 2w)
    k = wf.omega // (wf.ell - 2 * wf.omega)
    assert wf >= threshold(k) and wf < threshold(k + 1)
    if wf == threshold(k):
        return even_wedge(P - 1, k)
    return OddSphere(k)


def homotopy_type(graph: CyclicGraph):
    """Homotopy type of the clique complex of ``graph``."""
    if is_cone(graph) is not None:
        return Contractible()
    state = dynamics_of(graph)
    return classify(state.winding, state.P)
