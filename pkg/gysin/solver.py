"""
Deductions on partially known long exact sequences of vector spaces.

Each slot may carry a known dimension and each map a known status. Exactness
at slot j reads dim_j = rank(map into j) + rank(map out of j); the solver
propagates that identity together with the status flags until nothing
changes, and records every forced value in a derivation trail.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence

from gysin.cones import LongExactSequence
from gysin.errors import BadParams, Contradiction

logger = logging.getLogger(__name__)


class MapStatus(Enum):
    UNKNOWN = "unknown"
    ZERO = "zero"
    INJECTIVE = "injective"
    SURJECTIVE = "surjective"
    ISO = "iso"


@dataclass
class Slot:
    label: str
    dim: Optional[int] = None


@dataclass
class PartialLES:
    """
    Slots joined by maps; ``maps[j]`` goes from ``slots[j]`` to ``slots[j+1]``.
    A bounded sequence is flanked by zero groups at both ends.
    """
    slots: List[Slot]
    maps: List[MapStatus] = field(default_factory=list)
    bounded: bool = True

    def __post_init__(self):
        if not self.maps:
            self.maps = [MapStatus.UNKNOWN] * max(len(self.slots) - 1, 0)
        self.maps = [MapStatus(m) for m in self.maps]
        if len(self.maps) != max(len(self.slots) - 1, 0):
            raise BadParams(f"{len(self.slots)} slots need {max(len(self.slots) - 1, 0)} maps, got {len(self.maps)}")
        for s in self.slots:
            if s.dim is not None and s.dim < 0:
                raise BadParams("dimensions must be nonnegative", {"slot": s.label})

    @classmethod
    def from_les(cls, les: LongExactSequence, hidden: Sequence[str] = (),
                 known_zero_maps: Sequence[int] = (), bounded: bool = True) -> "PartialLES":
        """
        Dimensions read off a computed sequence, except for the hidden labels.
        With ``bounded=False`` the ends are left open, so nothing is deduced
        from the sequence being finite.
        """
        slots = [Slot(e.label, None if e.label in hidden else e.group.num_generators) for e in les.entries]
        maps = [MapStatus.ZERO if j in known_zero_maps else MapStatus.UNKNOWN for j in range(len(les.maps))]
        return cls(slots, maps, bounded=bounded)


@dataclass
class SolvedReport:
    dims: List[Optional[int]]
    maps: List[MapStatus]
    ranks: List[Optional[int]]
    derivations: List[str] = field(default_factory=list)

    @property
    def isomorphisms(self) -> List[int]:
        return [j for j, m in enumerate(self.maps) if m is MapStatus.ISO]

    def to_dict(self) -> Dict[str, object]:
        return {
            "dims": [None if d is None else str(d) for d in self.dims],
            "maps": [m.value for m in self.maps],
            "ranks": [None if r is None else str(r) for r in self.ranks],
            "isomorphisms": self.isomorphisms,
            "derivations": self.derivations,
        }


class _State:
    """
    ``rank[j]`` is the rank of the map into slot j, so ``rank[j+1]`` is the
    rank of ``maps[j]``; the two outermost entries are the flanking maps.
    """

    def __init__(self, partial: PartialLES):
        self.labels = [s.label for s in partial.slots]
        self.dims: List[Optional[int]] = [s.dim for s in partial.slots]
        n = len(self.dims)
        self.rank: List[Optional[int]] = [None] * (n + 1)
        if partial.bounded:
            self.rank[0] = self.rank[n] = 0
        self.injective = [False] * (n + 1)
        self.surjective = [False] * (n + 1)
        for j, status in enumerate(partial.maps):
            if status is MapStatus.ZERO:
                self.rank[j + 1] = 0
            if status in (MapStatus.INJECTIVE, MapStatus.ISO):
                self.injective[j + 1] = True
            if status in (MapStatus.SURJECTIVE, MapStatus.ISO):
                self.surjective[j + 1] = True
        self.derivations: List[str] = []
        self.changed = False

    def map_name(self, r: int) -> str:
        n = len(self.dims)
        if r == 0:
            return f"0 -> {self.labels[0]}"
        if r == n:
            return f"{self.labels[-1]} -> 0"
        return f"{self.labels[r - 1]} -> {self.labels[r]}"

    def set_dim(self, j: int, value: int, rule: str) -> None:
        if value < 0:
            raise Contradiction("forced dimension is negative", {"slot": self.labels[j], "rule": rule})
        if self.dims[j] is None:
            self.dims[j] = value
            self.derivations.append(f"{rule}: dim {self.labels[j]} = {value}")
            self.changed = True
        elif self.dims[j] != value:
            raise Contradiction(f"dimension {self.dims[j]} conflicts with forced {value}",
                                {"slot": self.labels[j], "rule": rule})

    def set_rank(self, r: int, value: int, rule: str) -> None:
        if value < 0:
            raise Contradiction("forced rank is negative", {"map": self.map_name(r), "rule": rule})
        if self.rank[r] is None:
            self.rank[r] = value
            self.derivations.append(f"{rule}: rank({self.map_name(r)}) = {value}")
            self.changed = True
        elif self.rank[r] != value:
            raise Contradiction(f"rank {self.rank[r]} conflicts with forced {value}",
                                {"map": self.map_name(r), "rule": rule})

    def set_flag(self, flags: List[bool], r: int, name: str, rule: str) -> None:
        if not flags[r]:
            flags[r] = True
            self.derivations.append(f"{rule}: {self.map_name(r)} is {name}")
            self.changed = True


def _step(s: _State, bounded: bool) -> None:
    n = len(s.dims)
    # R3: alternating sum of a bounded exact sequence
    if bounded and n:
        unknown = [j for j, d in enumerate(s.dims) if d is None]
        total = sum((-1) ** j * d for j, d in enumerate(s.dims) if d is not None)
        if not unknown and total != 0:
            raise Contradiction("alternating dimension sum is not zero", {"sum": total})
        if len(unknown) == 1:
            j = unknown[0]
            s.set_dim(j, -total * (-1) ** j, "R3")
    for j in range(n):
        into, out = s.rank[j], s.rank[j + 1]
        d = s.dims[j]
        # R1: zero maps on both sides
        if into == 0 and out == 0:
            s.set_dim(j, 0, "R1")
        # R2: a zero slot kills both maps; its neighbours' maps become injective/surjective
        if d == 0:
            s.set_rank(j, 0, "R2")
            s.set_rank(j + 1, 0, "R2")
        if d is not None and into is not None and out is None:
            s.set_rank(j + 1, d - into, "exactness")
        elif d is not None and out is not None and into is None:
            s.set_rank(j, d - out, "exactness")
        elif d is None and into is not None and out is not None:
            s.set_dim(j, into + out, "exactness")
        elif d is not None and into is not None and out is not None and into + out != d:
            raise Contradiction("rank of incoming and outgoing maps do not add up", {"slot": s.labels[j]})
    for r in range(1, n):
        src, tgt = s.dims[r - 1], s.dims[r]
        # zero map into the source means this map is injective, zero map out of the target means surjective
        if s.rank[r - 1] == 0:
            s.set_flag(s.injective, r, "injective", "R2")
        if s.rank[r + 1] == 0:
            s.set_flag(s.surjective, r, "surjective", "R2")
        if s.injective[r]:
            s.set_rank(r - 1, 0, "injective")
            if src is not None:
                s.set_rank(r, src, "injective")
        if s.surjective[r]:
            s.set_rank(r + 1, 0, "surjective")
            if tgt is not None:
                s.set_rank(r, tgt, "surjective")
        if s.injective[r] and s.surjective[r] and src is not None and tgt is not None and src != tgt:
            raise Contradiction("isomorphism between spaces of different dimension", {"map": s.map_name(r)})
        rank = s.rank[r]
        if rank is not None:
            if src is not None and rank > src or tgt is not None and rank > tgt:
                raise Contradiction("rank exceeds a dimension", {"map": s.map_name(r)})
            if src is not None and rank == src:
                s.set_flag(s.injective, r, "injective", "rank")
            if tgt is not None and rank == tgt:
                s.set_flag(s.surjective, r, "surjective", "rank")


def _status(s: _State, r: int) -> MapStatus:
    if s.rank[r] == 0:
        return MapStatus.ZERO
    if s.injective[r] and s.surjective[r]:
        return MapStatus.ISO
    if s.injective[r]:
        return MapStatus.INJECTIVE
    if s.surjective[r]:
        return MapStatus.SURJECTIVE
    return MapStatus.UNKNOWN


def les_solver(partial: PartialLES) -> SolvedReport:
    """
    Propagate exactness to a fixed point.

    >>> les_solver(PartialLES([Slot("A"), Slot("B", 3)])).dims
    [3, 3]
    """
    s = _State(partial)
    s.changed = True
    while s.changed:
        s.changed = False
        _step(s, partial.bounded)
    n = len(s.dims)
    maps = [_status(s, r) for r in range(1, n)]
    logger.debug("solver: %d derivations over %d slots", len(s.derivations), n)
    return SolvedReport(s.dims, maps, s.rank[1:n], s.derivations)
