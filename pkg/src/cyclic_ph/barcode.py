"""Barcodes, persistence intervals, and the per-step event log."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import Iterable, Union


@dataclass(frozen=True)
class PersistenceInterval:
    """One bar.  ``death is None`` means the class is alive at the last step."""

    dim: int
    birth: int
    death: int | None = None
    birth_scale: float | None = None
    death_scale: float | None = None
    label_history: tuple[int, ...] = ()

    @property
    def key(self) -> tuple[int, int, float]:
        return (self.dim, self.birth, math.inf if self.death is None else self.death)

    @property
    def is_infinite(self) -> bool:
        return self.death is None

    @property
    def zero_length(self) -> bool:
        """Born and dead at the same scale, though at different indices."""
        return (
            self.death is not None
            and self.birth_scale is not None
            and self.birth_scale == self.death_scale
        )

    def alive_at(self, index: int) -> bool:
        return self.birth <= index and (self.death is None or index < self.death)

    def to_dict(self) -> dict:
        out = {"dim": self.dim, "birth": self.birth, "death": self.death}
        if self.birth_scale is not None:
            out["birth_scale"] = self.birth_scale
            out["death_scale"] = self.death_scale
            if self.zero_length:
                out["zero_length"] = True
        if self.label_history:
            out["labels"] = list(self.label_history)
        return out


def _fmt(x) -> str:
    if x is None:
        return "inf"
    return repr(float(x)) if isinstance(x, float) else str(x)


@dataclass
class Barcode:
    intervals: list[PersistenceInterval]
    n_final: int
    dims_computed: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        self.intervals = sorted(self.intervals, key=lambda iv: (iv.key, iv.label_history))
        self.dims_computed = frozenset(self.dims_computed)

    def __iter__(self):
        return iter(self.intervals)

    def __len__(self):
        return len(self.intervals)

    def keys(self) -> list[tuple[int, int, float]]:
        """Sorted ``(dim, birth, death)`` triples; what oracle equality compares."""
        return sorted(iv.key for iv in self.intervals)

    def multiset(self) -> Counter:
        return Counter(iv.key for iv in self.intervals)

    def same_bars(self, other: "Barcode") -> bool:
        return self.keys() == other.keys()

    def in_dim(self, dim: int) -> list[PersistenceInterval]:
        return [iv for iv in self.intervals if iv.dim == dim]

    def restrict(self, dims: Iterable[int]) -> "Barcode":
        dims = frozenset(dims)
        return Barcode([iv for iv in self.intervals if iv.dim in dims], self.n_final, dims)

    def alive_at(self, index: int, dim: int | None = None) -> list[PersistenceInterval]:
        return [
            iv for iv in self.intervals if iv.alive_at(index) and (dim is None or iv.dim == dim)
        ]

    def betti_at(self, index: int) -> dict[int, int]:
        counts = {d: 0 for d in sorted(self.dims_computed)}
        for iv in self.alive_at(index):
            counts[iv.dim] = counts.get(iv.dim, 0) + 1
        return counts

    def infinite(self) -> list[PersistenceInterval]:
        return [iv for iv in self.intervals if iv.death is None]

    def first_difference(self, other: "Barcode") -> str | None:
        """Human-readable description of one bar present in only one side."""
        mine, theirs = self.multiset(), other.multiset()
        for key in sorted((mine - theirs) + (theirs - mine)):
            where = "first" if mine[key] > theirs[key] else "second"
            return f"interval dim={key[0]} birth={key[1]} death={_fmt(None if key[2] == math.inf else key[2])} only in {where}"
        return None

    def with_scales(self, filtration) -> "Barcode":
        """Attach scales from ``filtration`` (no-op if it carries none)."""
        if filtration.scales is None:
            return self
        out = []
        for iv in self.intervals:
            ds = None if iv.death is None else filtration.scale_at(iv.death)
            out.append(replace(iv, birth_scale=filtration.scale_at(iv.birth), death_scale=ds))
        return Barcode(out, self.n_final, self.dims_computed)

    def scale_intervals(self) -> list[tuple[int, float, float | None]]:
        """Scale-valued bars; zero-length bars are left out."""
        return [
            (iv.dim, iv.birth_scale, iv.death_scale)
            for iv in self.intervals
            if iv.birth_scale is not None and not iv.zero_length
        ]

    def unreduced(self) -> "Barcode":
        """Add back the dimension-0 class of the first vertex."""
        if 0 not in self.dims_computed:
            return self
        extra = PersistenceInterval(0, 0, None, 0.0 if self._scaled() else None, None)
        return Barcode(self.intervals + [extra], self.n_final, self.dims_computed)

    def _scaled(self) -> bool:
        return any(iv.birth_scale is not None for iv in self.intervals)

    # -- serialisation ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "dims": sorted(self.dims_computed),
            "n_final": self.n_final,
            "intervals": [iv.to_dict() for iv in self.intervals],
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_dict(), indent=indent)

    @classmethod
    def from_dict(cls, data: dict) -> "Barcode":
        ivs = [
            PersistenceInterval(
                int(d["dim"]),
                int(d["birth"]),
                None if d.get("death") is None else int(d["death"]),
                d.get("birth_scale"),
                d.get("death_scale"),
                tuple(d.get("labels", ())),
            )
            for d in data["intervals"]
        ]
        return cls(ivs, int(data.get("n_final", 0)), frozenset(data.get("dims", ())))

    @classmethod
    def from_json(cls, text: str) -> "Barcode":
        return cls.from_dict(json.loads(text))

    def to_text(self) -> str:
        scaled = self._scaled()
        head = "dim\tbirth\tdeath"
        if scaled:
            head += "\tbirth_scale\tdeath_scale"
        lines = [head]
        for iv in self.intervals:
            row = f"{iv.dim}\t{iv.birth}\t{_fmt(iv.death)}"
            if scaled:
                row += f"\t{_fmt(iv.birth_scale)}\t{_fmt(iv.death_scale)}"
                if iv.zero_length:
                    row += "\tzero-length"
            lines.append(row)
        return "\n".join(lines) + "\n"


# -- events -----------------------------------------------------------------


@dataclass(frozen=True)
class OrbitCreated:
    step: int
    dim: int
    label: int
    essential: bool = False


@dataclass(frozen=True)
class OrbitDestroyed:
    """Orbit ``label`` vanished.

    ``ended_label`` names the orbit whose interval ended (the younger of
    ``label`` and ``surviving_label`` under the elder rule), and the
    surviving interval is now carried by ``surviving_label``.  With no
    survivor the interval of ``label`` simply ends.
    """

    step: int
    dim: int
    label: int
    surviving_label: int | None
    ended_label: int


@dataclass(frozen=True)
class LabelMoved:
    step: int
    dim: int
    old: int
    new: int


@dataclass(frozen=True)
class ConeReached:
    step: int
    apex: int


@dataclass(frozen=True)
class OddBorn:
    step: int
    dim: int


@dataclass(frozen=True)
class OddDied:
    step: int
    dim: int


Event = Union[OrbitCreated, OrbitDestroyed, LabelMoved, ConeReached, OddBorn, OddDied]

_EVENT_TYPES = {
    cls.__name__: cls for cls in (OrbitCreated, OrbitDestroyed, LabelMoved, ConeReached, OddBorn, OddDied)
}


@dataclass
class EventLog:
    events: list = field(default_factory=list)
    n_final: int = 0
    dims: frozenset[int] = field(default_factory=frozenset)

    def __iter__(self):
        return iter(self.events)

    def __len__(self):
        return len(self.events)

    def append(self, event) -> None:
        self.events.append(event)

    def to_jsonl(self) -> str:
        lines = [json.dumps({"event": "Header", "n_final": self.n_final, "dims": sorted(self.dims)})]
        for ev in self.events:
            lines.append(json.dumps({"event": type(ev).__name__, **ev.__dict__}))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "EventLog":
        log = cls()
        for line in text.splitlines():
            if not line.strip():
                continue
            data = json.loads(line)
            kind = data.pop("event")
            if kind == "Header":
                log.n_final = data["n_final"]
                log.dims = frozenset(data["dims"])
                continue
            log.events.append(_EVENT_TYPES[kind](**data))
        return log

    def replay(self) -> Barcode:
        """Rebuild the index-valued barcode from the events alone."""
        ESSENTIAL = -1
        by_label: dict[int, int] = {}  # orbit label -> open interval id, or ESSENTIAL
        open_ivs: dict[int, list] = {}  # interval id -> [dim, birth, labels]
        odd_open: dict[int, int] = {}  # dim -> birth
        done: list[PersistenceInterval] = []
        next_id = 0

        def close(iv_id, step):
            if iv_id == ESSENTIAL:
                return
            dim, birth, labels = open_ivs.pop(iv_id)
            if birth != step:
                done.append(PersistenceInterval(dim, birth, step, label_history=tuple(labels)))

        for ev in self.events:
            if isinstance(ev, OrbitCreated):
                if ev.essential:
                    by_label[ev.label] = ESSENTIAL
                else:
                    open_ivs[next_id] = [ev.dim, ev.step, [ev.label]]
                    by_label[ev.label] = next_id
                    next_id += 1
            elif isinstance(ev, LabelMoved):
                iv_id = by_label.pop(ev.old)
                by_label[ev.new] = iv_id
                if iv_id != ESSENTIAL:
                    open_ivs[iv_id][2].append(ev.new)
            elif isinstance(ev, OrbitDestroyed):
                mine = by_label.pop(ev.label)
                if ev.surviving_label is None:
                    close(mine, ev.step)
                    continue
                theirs = by_label.pop(ev.surviving_label)
                if ev.ended_label == ev.label:
                    close(mine, ev.step)
                    by_label[ev.surviving_label] = theirs
                else:
                    close(theirs, ev.step)
                    by_label[ev.surviving_label] = mine
                    if mine != ESSENTIAL:
                        open_ivs[mine][2].append(ev.surviving_label)
            elif isinstance(ev, ConeReached):
                for iv_id in list(open_ivs):
                    close(iv_id, ev.step)
                by_label.clear()
                for dim, birth in odd_open.items():
                    if birth != ev.step:
                        done.append(PersistenceInterval(dim, birth, ev.step))
                odd_open.clear()
            elif isinstance(ev, OddBorn):
                odd_open[ev.dim] = ev.step
            elif isinstance(ev, OddDied):
                birth = odd_open.pop(ev.dim)
                if birth != ev.step:
                    done.append(PersistenceInterval(ev.dim, birth, ev.step))
        for dim, birth, labels in open_ivs.values():
            done.append(PersistenceInterval(dim, birth, None, label_history=tuple(labels)))
        for dim, birth in odd_open.items():
            done.append(PersistenceInterval(dim, birth, None))
        return Barcode(done, self.n_final, self.dims)
