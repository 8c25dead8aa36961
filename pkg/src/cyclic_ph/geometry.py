"""From point samples of curves to filtrations of cyclic graphs.

Planar samples in convex position are put in cyclic order with a convex
hull; each Rips edge is then oriented so that out-neighbourhoods stay
counterclockwise runs.  The module also carries the closed-form checks for
ellipses and the symmetric moment curve.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .errors import DomainError, InputError, NotConvexPosition, NotCyclicError
from .graph import ConeMarker, CyclicGraph, Filtration

# -- point clouds and curves -----------------------------------------------


@dataclass(frozen=True, eq=False)
class PointCloud:
    """``n`` points in R^dim, one per row."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or len(pts) == 0:
            raise ValueError("points must be a non-empty 2-D array")
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self):
        return self.n

    def reordered(self, order: Sequence[int]) -> "PointCloud":
        return PointCloud(self.points[np.asarray(order, dtype=int)])

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in self.points.tolist():
            writer.writerow([repr(x) for x in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "PointCloud":
        """Parse comma-separated coordinates; a non-numeric first row is a header."""
        rows, width = [], None
        for line_no, row in enumerate(csv.reader(io.StringIO(text)), start=1):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                values = [float(cell) for cell in row]
            except ValueError:
                if not rows and line_no == 1:
                    continue
                col = next(c for c, cell in enumerate(row, start=1) if not _is_float(cell))
                raise InputError(f"not a number: {row[col - 1]!r}", line_no, col) from None
            if width is None:
                width = len(values)
            elif len(values) != width:
                raise InputError(f"expected {width} coordinates, got {len(values)}", line_no)
            if not all(math.isfinite(v) for v in values):
                raise InputError("coordinates must be finite", line_no)
            rows.append(values)
        if not rows:
            raise InputError("no points found")
        return cls(np.array(rows))


def _is_float(cell: str) -> bool:
    try:
        float(cell)
    except ValueError:
        return False
    return True


@dataclass(frozen=True)
class Circle:
    radius: float = 1.0

    def __post_init__(self):
        if self.radius <= 0:
            raise DomainError("radius must be positive")

    def at(self, t: np.ndarray) -> np.ndarray:
        return np.column_stack([self.radius * np.cos(t), self.radius * np.sin(t)])


@dataclass(frozen=True)
class Ellipse:
    a: float
    b: float

    def __post_init__(self):
        if not self.a >= self.b > 0:
            raise DomainError(f"need a >= b > 0, got a={self.a}, b={self.b}")

    def at(self, t: np.ndarray) -> np.ndarray:
        return np.column_stack([self.a * np.cos(t), self.b * np.sin(t)])


@dataclass(frozen=True)
class SymmetricMomentCurve:
    """``t -> (cos t, sin t, alpha cos 3t, alpha sin 3t)`` in R^4."""

    alpha: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise DomainError("alpha must be positive")

    def at(self, t: np.ndarray) -> np.ndarray:
        a = self.alpha
        return np.column_stack([np.cos(t), np.sin(t), a * np.cos(3 * t), a * np.sin(3 * t)])


CurveSpec = Union[Circle, Ellipse, SymmetricMomentCurve]


def curve_angles(n: int, angles="uniform", seed: int | None = None) -> np.ndarray:
    """Parameter values in increasing order on ``[0, 2pi)``."""
    if n < 3:
        raise DomainError("need at least 3 sample points")
    if isinstance(angles, str):
        if angles == "uniform":
            return 2 * np.pi * np.arange(n) / n
        if angles == "random":
            rng = np.random.default_rng(seed)
            t = np.sort(rng.uniform(0.0, 2 * np.pi, n))
            if np.any(np.diff(t) <= 0):
                raise DomainError("random angles collided; try another seed")
            return t
        raise ValueError(f"unknown angle scheme {angles!r}")
    t = np.asarray(angles, dtype=float)
    if len(t) != n:
        raise ValueError("explicit angles must have length n")
    return t


def sample_curve(spec: CurveSpec, n: int, angles="uniform", seed: int | None = None) -> PointCloud:
    """``n`` points of ``spec`` in parameter order."""
    return PointCloud(spec.at(curve_angles(n, angles, seed)))


# -- cyclic order from a convex hull ----------------------------------------

# error bound for the 2x2 orientation determinant evaluated in doubles
_ORIENT_EPS = 3.3306690738754716e-16


def orient2d(a, b, c) -> int:
    """Sign of the turn a -> b -> c: +1 left, -1 right, 0 collinear.

    Doubles are tried first; if the result is within the rounding bound,
    the determinant is redone in exact rationals.
    """
    acx, acy = a[0] - c[0], a[1] - c[1]
    bcx, bcy = b[0] - c[0], b[1] - c[1]
    left, right = acx * bcy, acy * bcx
    det = left - right
    bound = _ORIENT_EPS * (abs(left) + abs(right))
    if det > bound:
        return 1
    if det < -bound:
        return -1
    fa = [Fraction(v) for v in a[:2]]
    fb = [Fraction(v) for v in b[:2]]
    fc = [Fraction(v) for v in c[:2]]
    exact = (fa[0] - fc[0]) * (fb[1] - fc[1]) - (fa[1] - fc[1]) * (fb[0] - fc[0])
    return (exact > 0) - (exact < 0)


def cyclic_order(points: PointCloud) -> list[int]:
    """Counterclockwise hull order, starting at the lexicographically least point.

    Raises :class:`NotConvexPosition` unless every point is a vertex of a
    strictly convex polygon (no repeats, no interior or collinear points).
    """
    pts = points.points if isinstance(points, PointCloud) else np.asarray(points, dtype=float)
    if pts.shape[1] != 2:
        raise DomainError("the hull order needs planar points; pass the order explicitly")
    n = len(pts)
    coords = [tuple(p) for p in pts.tolist()]
    idx = sorted(range(n), key=lambda i: coords[i])
    for a, b in zip(idx, idx[1:]):
        if coords[a] == coords[b]:
            raise NotConvexPosition(f"point {b} repeats point {a}", max(a, b))
    if n < 3:
        return idx

    def chain(seq):
        out: list[int] = []
        for i in seq:
            # pop on non-left turns so collinear points drop off the hull
            while len(out) >= 2 and orient2d(coords[out[-2]], coords[out[-1]], coords[i]) <= 0:
                out.pop()
            out.append(i)
        return out

    lower, upper = chain(idx), chain(reversed(idx))
    hull = lower[:-1] + upper[:-1]
    if len(hull) != n:
        missing = sorted(set(range(n)) - set(hull))
        raise NotConvexPosition(f"point {missing[0]} is not a vertex of the convex hull", missing[0])
    return hull


# -- orienting Rips edges ---------------------------------------------------


@dataclass(frozen=True)
class OrientedEdge:
    source: int
    target: int
    scale: float = 0.0


class EdgeOrienter:
    """Cyclic graph grown one undirected edge at a time.

    ``reach`` counts out-edges (a counterclockwise run after each vertex),
    ``inreach`` counts in-edges (a clockwise run before it).
    """

    def __init__(self, n: int):
        self.n = n
        self.reach = [0] * n
        self.inreach = [0] * n

    @property
    def graph(self) -> CyclicGraph:
        return CyclicGraph(tuple(self.reach))

    def degree(self, v: int) -> int:
        return self.reach[v] + self.inreach[v]

    def _extends(self, s: int, t: int) -> bool:
        # s -> t is the next edge out of s, and it keeps the graph cyclic
        n, reach = self.n, self.reach
        r = reach[s] + 1
        return (
            (s + r) % n == t
            and r <= n - 1
            and reach[(s + 1) % n] >= r - 1
            and reach[t] < n - r
            and (t - self.inreach[t] - 1) % n == s
        )

    def orient(self, x: int, y: int, scale: float = 0.0) -> OrientedEdge | ConeMarker:
        """Orient ``{x, y}``, or report that the edge makes the graph a cone.

        Raises :class:`NotCyclicError` when neither direction is cyclic.
        The graph is only modified when an :class:`OrientedEdge` is returned.
        """
        n = self.n
        full = [v for v in (x, y) if self.degree(v) + 1 == n - 1]
        if full:
            return ConeMarker(min(full), (x, y), scale)
        forward, backward = self._extends(x, y), self._extends(y, x)
        if forward and backward:
            # only possible with nothing around: take the shorter arc, x first on ties
            forward = (y - x) % n <= (x - y) % n
            backward = not forward
        if forward:
            s, t = x, y
        elif backward:
            s, t = y, x
        else:
            raise NotCyclicError(f"edge {{{x}, {y}}} at scale {scale} has no cyclic orientation", (x, y), scale)
        self.reach[s] += 1
        self.inreach[t] += 1
        return OrientedEdge(s, t, scale)


def orient_new_edge(state: EdgeOrienter, x: int, y: int, scale: float = 0.0):
    return state.orient(x, y, scale)


# -- filtrations from points ------------------------------------------------

TIE_RTOL = 1e-12
_CHUNK = 1 << 16


def sorted_pairs(points: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Pair indices (into condensed order) sorted by length, and their snapped lengths.

    Lengths within a relative ``TIE_RTOL`` of the previous one count as
    ties and are ordered by (min index, max index), which is condensed order.
    """
    d = pdist(points)
    by_len = np.argsort(d, kind="stable")
    ds = d[by_len]
    if len(ds) > 1:
        gap = np.diff(ds) > TIE_RTOL * np.maximum(ds[1:], np.finfo(float).tiny)
        group = np.concatenate([[0], np.cumsum(gap)])
        first = np.concatenate([[0], np.flatnonzero(gap) + 1])
        snapped = ds[first][group]
        perm = np.lexsort((by_len, group))
        return by_len[perm], snapped
    return by_len, ds


def _condensed_to_pairs(n: int):
    rows, cols = np.triu_indices(n, 1)
    return rows.astype(np.int32), cols.astype(np.int32)


def build_filtration(
    points: PointCloud | np.ndarray,
    order: Sequence[int] | None = None,
    on_violation: str = "raise",
) -> Filtration:
    """Scale-stamped filtration of the Rips graphs of ``points``.

    Vertices are relabelled by their cyclic position: vertex ``i`` of the
    result is point ``order[i]``.  Planar input may omit ``order`` (the hull
    order is used); other input must supply it.  The first edge that would
    make a cone becomes a terminal cone marker.  With
    ``on_violation="truncate"`` an edge with no cyclic orientation ends the
    filtration instead of raising, and ``filtration.truncated`` records it.
    """
    if on_violation not in ("raise", "truncate"):
        raise ValueError("on_violation must be 'raise' or 'truncate'")
    cloud = points if isinstance(points, PointCloud) else PointCloud(points)
    if order is None:
        order = cyclic_order(cloud)
    order = [int(i) for i in order]
    if sorted(order) != list(range(cloud.n)):
        raise ValueError("order must be a permutation of the point indices")
    pts = cloud.points[order]
    n = len(pts)
    if n < 2:
        return Filtration.from_sources(n, [], scales=[], order=order, validate=False)

    ranked, scales = sorted_pairs(pts)
    rows, cols = _condensed_to_pairs(n)
    reach, inreach = [0] * n, [0] * n
    nm1 = n - 1
    sources: list[int] = []
    cone = truncated = None
    done = False
    for start in range(0, len(ranked), _CHUNK):
        sel = ranked[start : start + _CHUNK]
        xs, ys = rows[sel].tolist(), cols[sel].tolist()
        for off, (x, y) in enumerate(zip(xs, ys)):
            if reach[x] + inreach[x] + 1 == nm1 or reach[y] + inreach[y] + 1 == nm1:
                apex = x if reach[x] + inreach[x] + 1 == nm1 else y
                cone = ConeMarker(apex, (x, y), float(scales[start + off]))
                done = True
                break
            # forward: y is the next counterclockwise target of x
            r = reach[x] + 1
            t = x + r
            if t >= n:
                t -= n
            fwd = t == y and reach[(x + 1) % n] >= r - 1 and reach[y] < n - r
            r2 = reach[y] + 1
            t2 = y + r2
            if t2 >= n:
                t2 -= n
            bwd = t2 == x and reach[(y + 1) % n] >= r2 - 1 and reach[x] < n - r2
            if fwd and bwd:
                fwd = (y - x) % n <= (x - y) % n
                bwd = not fwd
            if fwd:
                reach[x] = r
                inreach[y] += 1
                sources.append(x)
            elif bwd:
                reach[y] = r2
                inreach[x] += 1
                sources.append(y)
            else:
                scale = float(scales[start + off])
                if on_violation == "raise":
                    raise NotCyclicError(
                        f"Rips edge between points {order[x]} and {order[y]} at scale {scale} "
                        "has no cyclic orientation",
                        (x, y),
                        scale,
                    )
                truncated = ((x, y), scale)
                done = True
                break
        if done:
            break
    filt = Filtration.from_sources(
        n, sources, scales=scales[: len(sources)], cone=cone, order=order, validate=False
    )
    filt.truncated = truncated
    return filt


def graph_at_scale(filtration: Filtration, r: float) -> tuple[CyclicGraph, bool]:
    """The Rips graph at closed scale ``r`` and whether it is already a cone."""
    if filtration.scales is None:
        raise ValueError("filtration carries no scales")
    count = int(np.searchsorted(filtration.scales, r, side="right"))
    reach = list(filtration.initial.reach)
    for s in filtration.sources[:count].tolist():
        reach[s] += 1
    coned = (
        filtration.cone is not None
        and count == len(filtration)
        and filtration.cone.scale is not None
        and filtration.cone.scale <= r
    )
    return CyclicGraph(tuple(reach)), coned


# -- closed-form criteria ---------------------------------------------------


def ellipse_evolute_contained(a, b) -> bool:
    """Whether the ellipse with semi-axes ``a >= b`` contains its evolute.

    Rational inputs are decided exactly as ``a^2 <= 2 b^2``; floats compare
    ``a / b`` with ``sqrt(2)`` so that ``a = math.sqrt(2) * b`` counts as the
    boundary case it stands for.
    """
    if not (b > 0 and a >= b):
        raise DomainError(f"need a >= b > 0, got a={a}, b={b}")
    if isinstance(a, (int, Fraction)) and isinstance(b, (int, Fraction)):
        return a * a <= 2 * b * b
    return a / b <= math.sqrt(2)


def ellipse_evolute_point(a: float, b: float, t: float) -> tuple[float, float]:
    if not (b > 0 and a >= b):
        raise DomainError(f"need a >= b > 0, got a={a}, b={b}")
    c2 = a * a - b * b
    return (c2 / a * math.cos(t) ** 3, -c2 / b * math.sin(t) ** 3)


def moment_sq_dist(alpha, t):
    """Squared distance between the moment-curve points at parameters 0 and ``t``.

    Equal to ``2 (1 - cos t + alpha^2 - alpha^2 cos 3t)``.  Written through
    ``s = sin(t/2)`` alone, as ``4 s^2 (1 + alpha^2 (3 - 4 s^2)^2)``, it keeps
    full relative precision near multiples of 2pi, where forming ``3t`` would not.
    """
    s2 = np.sin(np.asarray(t, dtype=float) / 2) ** 2
    a2 = np.asarray(alpha, dtype=float) ** 2
    out = 4 * s2 * (1 + a2 * (3 - 4 * s2) ** 2)
    return float(out) if np.ndim(out) == 0 else out


def moment_arc_condition(alpha) -> bool:
    """True when every ball about a curve point meets the moment curve in one arc.

    That happens exactly when ``sin^2 t = (1 + 9 alpha^2) / (12 alpha^2)``
    has no solution, i.e. ``alpha^2 < 1/3``.
    """
    if isinstance(alpha, (int, Fraction)):
        return 3 * alpha * alpha < 1
    return 3 * float(alpha) ** 2 < 1


def _gaps(points: np.ndarray, order: Sequence[int] | None) -> np.ndarray:
    """Row ``i``, column ``j``: distance from point ``i`` to the point ``j`` places on."""
    pts = points if order is None else points[np.asarray(order, dtype=int)]
    dist = squareform(pdist(pts))
    n = len(pts)
    idx = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    return np.take_along_axis(dist, idx, axis=1)


def arc_condition_check(points: PointCloud | np.ndarray, r: float, order: Sequence[int] | None = None) -> bool:
    """Each closed ``r``-ball meets the sample in one run of the cyclic order."""
    pts = points.points if isinstance(points, PointCloud) else np.asarray(points, dtype=float)
    inside = _gaps(pts, order) <= r
    # count the places where a run of points inside the ball starts
    starts = inside & ~np.roll(inside, 1, axis=1)
    return bool(np.all(starts.sum(axis=1) <= 1))


def arc_condition_all_scales(
    points: PointCloud | np.ndarray,
    r_max: float | None = None,
    order: Sequence[int] | None = None,
    rtol: float = 1e-12,
) -> bool:
    """:func:`arc_condition_check` for every ``r <= r_max`` (default: the diameter).

    Along each row the distances must rise to a peak and fall again, so
    every entry is the largest among those before it or among those after it.
    """
    pts = points.points if isinstance(points, PointCloud) else np.asarray(points, dtype=float)
    a = _gaps(pts, order)[:, 1:]
    if r_max is not None:
        a = np.where(a <= r_max, a, np.inf)
    before = np.maximum.accumulate(a, axis=1)
    after = np.maximum.accumulate(a[:, ::-1], axis=1)[:, ::-1]
    prev = np.concatenate([np.zeros((len(a), 1)), before[:, :-1]], axis=1)
    nxt = np.concatenate([after[:, 1:], np.zeros((len(a), 1))], axis=1)
    floor = np.minimum(prev, nxt)
    finite = np.isfinite(a)
    slack = rtol * np.where(np.isfinite(floor), floor, 0.0)
    return bool(np.all(~finite | (a >= floor - slack)))
