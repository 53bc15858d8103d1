"""
Mapping cones, short and long exact sequences, and the 3×3 grid of cones
attached to a morphism of short exact sequences.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from gysin.complexes import (
    ChainComplex,
    ChainMap,
    GradedMap,
    _sign,
    induced_map,
    require_same_ring,
    shift,
    shift_map,
)
from gysin.errors import ExactnessFailure, InvalidChainMap, NotAMorphism
from gysin.exactlin import (
    FGAbelianGroup,
    IntMatrix,
    Lattice,
    _kernel,
    coordinate_lattice,
    identity,
    is_zero_array,
    matmul,
    preimage,
    rank,
    solve,
    zeros,
)
from gysin.rings import Ring

logger = logging.getLogger(__name__)


# ------------------------
# Cones
# ------------------------
def cone(f: GradedMap) -> ChainComplex:
    """
    Cone of a shift-s chain map f : A -> A'.

    cone_k = A'_(k+s+1) ⊕ A_k (A' generators first) with differential
    [[-(-1)^s ∂_A', f], [0, ∂_A]].
    """
    if not isinstance(f, ChainMap) and not f.is_chain_map():
        raise InvalidChainMap("cone needs a chain map")
    A, Ap, s = f.source, f.target, f.shift
    ring = f.ring
    degrees = sorted({k - s - 1 for k in Ap.degrees} | set(A.degrees))
    ranks = {k: Ap.rank(k + s + 1) + A.rank(k) for k in degrees}
    diffs = {}
    for k in degrees:
        top_in, top_out = Ap.rank(k + s + 1), Ap.rank(k + s)
        arr = zeros(top_out + A.rank(k - 1), top_in + A.rank(k))
        arr[:top_out, :top_in] = -_sign(s) * Ap.d(k + s + 1)
        arr[:top_out, top_in:] = f.mat(k)
        arr[top_out:, top_in:] = A.d(k)
        diffs[k] = ring.reduce_array(arr)
    labels = {k: Ap.labels(k + s + 1) + A.labels(k) for k in degrees}
    logger.debug("cone of a shift %d map with ranks %s", s, ranks)
    return ChainComplex(ranks, diffs, ring, labels)


def _inclusion_mats(top: ChainComplex, total: ChainComplex) -> Dict[int, np.ndarray]:
    mats = {}
    for k in top.degrees:
        arr = zeros(total.rank(k), top.rank(k))
        arr[:top.rank(k), :] = identity(top.rank(k))
        mats[k] = arr
    return mats


def _projection_mats(total: ChainComplex, bottom: ChainComplex) -> Dict[int, np.ndarray]:
    mats = {}
    for k in bottom.degrees:
        arr = zeros(bottom.rank(k), total.rank(k))
        arr[:, total.rank(k) - bottom.rank(k):] = identity(bottom.rank(k))
        mats[k] = arr
    return mats


def cone_ses(f: GradedMap) -> "ShortExactSequence":
    """0 -> A'[s+1] -> cone(f) -> A -> 0; its connecting map is f_*."""
    C = cone(f)
    top = shift(f.target, f.shift + 1)
    i = ChainMap(top, C, 0, _inclusion_mats(top, C))
    p = ChainMap(C, f.source, 0, _projection_mats(C, f.source))
    return ShortExactSequence(i, p, names=(f"A'[{f.shift + 1}]", "cone", "A"))


# ------------------------
# Short exact sequences
# ------------------------
class ShortExactSequence:
    """0 -> A --i--> B --p--> C -> 0, exactness checked degreewise on construction."""

    def __init__(self, i: ChainMap, p: ChainMap, names: Sequence[str] = ("A", "B", "C"), check: bool = True):
        if i.target != p.source:
            raise ExactnessFailure("the middle terms of i and p differ")
        if i.shift or p.shift:
            raise ExactnessFailure("short exact sequences need shift-0 maps")
        self.ring = require_same_ring(i, p)
        self.i, self.p = i, p
        self.A, self.B, self.C = i.source, i.target, p.target
        self.names = tuple(names)
        if check:
            self.validate()

    @property
    def degrees(self) -> List[int]:
        return sorted(set(self.A.degrees) | set(self.B.degrees) | set(self.C.degrees))

    def validate(self) -> None:
        ring = self.ring
        for k in self.degrees:
            i_k, p_k = self.i.mat(k), self.p.mat(k)
            if not is_zero_array(matmul(p_k, i_k, ring)):
                raise ExactnessFailure("p∘i is not zero", {"degree": k})
            if rank(i_k, ring) != self.A.rank(k):
                raise ExactnessFailure("i is not injective", {"degree": k})
            if Lattice.span(p_k, ring, self.C.rank(k)) != Lattice.full(self.C.rank(k), ring):
                raise ExactnessFailure("p is not surjective", {"degree": k})
            kernel = Lattice.span(_kernel(p_k, ring), ring, self.B.rank(k))
            if kernel != Lattice.span(i_k, ring, self.B.rank(k)):
                raise ExactnessFailure("ker p differs from im i", {"degree": k})

    def shifted(self, k: int) -> "ShortExactSequence":
        return ShortExactSequence(shift_map(self.i, k), shift_map(self.p, k),
                                  tuple(f"{n}[{k}]" for n in self.names))


def connecting_map(ses: ShortExactSequence, k: int) -> IntMatrix:
    """
    ∂ : H_k(C) -> H_(k-1)(A) by the zig-zag: lift along p, apply ∂_B, pull back along i.
    """
    ring = ses.ring
    src = ses.C.homology_presentation(k)
    tgt = ses.A.homology_presentation(k - 1)
    out = zeros(tgt.num_generators, src.num_generators)
    for j in range(src.num_generators):
        lift = solve(ses.p.mat(k), src.generators[:, j], ring)
        if lift is None:
            raise ExactnessFailure("cycle does not lift along p", {"degree": k})
        boundary = matmul(ses.B.d(k), lift, ring)
        pulled = solve(ses.i.mat(k - 1), boundary, ring)
        if pulled is None:
            raise ExactnessFailure("boundary does not pull back along i", {"degree": k - 1})
        out[:, j] = tgt.coordinates(pulled)
    return IntMatrix(out, tgt.num_generators, src.num_generators)


# ------------------------
# Long exact sequences
# ------------------------
@dataclass
class LESEntry:
    label: str
    degree: int
    group: FGAbelianGroup
    moduli: Tuple = ()  # order of each generator, 0 when free


@dataclass
class LESMap:
    kind: str
    degree: int         # degree of the source entry
    matrix: IntMatrix   # target coordinates × source generators


@dataclass
class LongExactSequence:
    """
    Alternating entries and maps; ``maps[j]`` goes from ``entries[j]`` to
    ``entries[j+1]``. The sequence is read as flanked by zero groups.
    """
    entries: List[LESEntry] = field(default_factory=list)
    maps: List[LESMap] = field(default_factory=list)
    ring: str = "Z"
    metadata: Dict[str, str] = field(default_factory=dict)

    def map(self, kind: str, degree: int) -> IntMatrix:
        for m in self.maps:
            if m.kind == kind and m.degree == degree:
                return m.matrix
        raise KeyError((kind, degree))

    def maps_of_kind(self, kind: str) -> Dict[int, IntMatrix]:
        return {m.degree: m.matrix for m in self.maps if m.kind == kind}

    def entry(self, label: str) -> LESEntry:
        for e in self.entries:
            if e.label == label:
                return e
        raise KeyError(label)

    def _check_slot(self, j: int, ring) -> Optional[str]:
        entry = self.entries[j]
        g = len(entry.moduli)
        rel = coordinate_lattice(entry.moduli, ring)
        incoming = self.maps[j - 1].matrix.array if j > 0 else zeros(g, 0)
        if j < len(self.maps):
            outgoing = self.maps[j].matrix.array
            rel_next = coordinate_lattice(self.entries[j + 1].moduli, ring)
        else:
            outgoing = zeros(0, g)
            rel_next = Lattice.zero(0, ring)
        if incoming.shape[0] != g or outgoing.shape[1] != g:
            return "map shape does not match the group"
        for col in range(rel.rank):
            if not rel_next.contains(matmul(outgoing, rel.basis[:, col], ring)):
                return "outgoing map is not well defined on the group"
        composite = matmul(outgoing, incoming, ring)
        for col in range(composite.shape[1]):
            if not rel_next.contains(composite[:, col]):
                return "consecutive maps do not compose to zero"
        kernel = preimage(outgoing, rel_next)
        image = Lattice.span(incoming, ring, g) + rel
        if kernel != image:
            return "image differs from kernel"
        return None

    def verify(self, ring=None) -> bool:
        """Exactness at every entry as lattice equality in coordinate space; raises ExactnessFailure."""
        ring = ring or Ring.parse(self.ring)
        for j, entry in enumerate(self.entries):
            problem = self._check_slot(j, ring)
            if problem:
                raise ExactnessFailure(problem, {"entry": entry.label, "index": j})
        return True

    def is_exact(self, ring=None) -> bool:
        try:
            return self.verify(ring)
        except ExactnessFailure:
            return False

    def table(self) -> pd.DataFrame:
        rows = []
        for j, entry in enumerate(self.entries):
            out = self.maps[j] if j < len(self.maps) else None
            rows.append({
                "entry": entry.label,
                "degree": entry.degree,
                "group": str(entry.group),
                "map": out.kind if out else "",
                "matrix": str(out.matrix.to_rows()) if out else "",
            })
        return pd.DataFrame(rows, columns=["entry", "degree", "group", "map", "matrix"])


def snake_les(ses: ShortExactSequence) -> LongExactSequence:
    """
    Homology long exact sequence of a short exact sequence, from the top
    degree down: H_k(A) -> H_k(B) -> H_k(C) -> H_(k-1)(A) -> ...
    """
    degrees = ses.degrees
    a, b, c = ses.names
    les = LongExactSequence(ring=ses.ring.label, metadata={"source": "snake"})
    if not degrees:
        return les
    lo, hi = degrees[0], degrees[-1]
    for k in range(hi, lo - 1, -1):
        for name, complex_ in ((a, ses.A), (b, ses.B), (c, ses.C)):
            pres = complex_.homology_presentation(k)
            les.entries.append(LESEntry(f"H{k}({name})", k, pres.group, pres.moduli))
        les.maps.append(LESMap("i", k, induced_map(ses.i, k)))
        les.maps.append(LESMap("p", k, induced_map(ses.p, k)))
        if k > lo:
            les.maps.append(LESMap("connecting", k, connecting_map(ses, k)))
    les.verify(ses.ring)
    logger.debug("snake sequence with %d entries verified", len(les.entries))
    return les


def connecting_mismatches(f: GradedMap) -> List[int]:
    """Degrees k where the connecting map of cone_ses(f) out of H_k(A) differs from f_*."""
    ses = cone_ses(f)
    bad = []
    for k in f.source.degrees:
        if connecting_map(ses, k) != induced_map(f, k):
            bad.append(k)
    return bad


# ------------------------
# Morphisms of short exact sequences and the grid of cones
# ------------------------
class SESMorphism:
    """Vertical chain maps f, g, h from the top sequence to the bottom one, commuting squares checked."""

    def __init__(self, top: ShortExactSequence, bottom: ShortExactSequence,
                 f: ChainMap, g: ChainMap, h: ChainMap):
        self.top, self.bottom = top, bottom
        self.f, self.g, self.h = f, g, h
        self.ring = require_same_ring(top, bottom, f, g, h)
        for name, m, src, tgt in (("f", f, top.A, bottom.A), ("g", g, top.B, bottom.B), ("h", h, top.C, bottom.C)):
            if m.shift or m.source != src or m.target != tgt:
                raise NotAMorphism(f"{name} does not map the top sequence to the bottom one")
        for k in sorted(set(top.degrees) | set(bottom.degrees)):
            left = matmul(g.mat(k), top.i.mat(k), self.ring)
            right = matmul(bottom.i.mat(k), f.mat(k), self.ring)
            if not is_zero_array(self.ring.reduce_array(left - right)):
                raise NotAMorphism("g∘i differs from i'∘f", {"degree": k, "square": "left"})
            left = matmul(h.mat(k), top.p.mat(k), self.ring)
            right = matmul(bottom.p.mat(k), g.mat(k), self.ring)
            if not is_zero_array(self.ring.reduce_array(left - right)):
                raise NotAMorphism("h∘p differs from p'∘g", {"degree": k, "square": "right"})


def _block_diagonal_map(first: ChainMap, second: ChainMap, source: ChainComplex,
                        target: ChainComplex) -> ChainMap:
    """Map of cones acting by ``first`` on the shifted summand and ``second`` on the other one."""
    mats = {}
    for k in source.degrees:
        arr = zeros(target.rank(k), source.rank(k))
        a, b = first.mat(k + 1), second.mat(k)
        arr[:a.shape[0], :a.shape[1]] = a
        arr[a.shape[0]:, a.shape[1]:] = b
        mats[k] = arr
    return ChainMap(source, target, 0, mats)


@dataclass
class GridReport:
    rows: List[ShortExactSequence]
    columns: List[ShortExactSequence]
    row_les: List[Optional[LongExactSequence]] = field(default_factory=list)  # None where exactness failed
    column_les: List[Optional[LongExactSequence]] = field(default_factory=list)
    squares_checked: int = 0
    anticommuting_checked: int = 0
    failures: List[Dict[str, object]] = field(default_factory=list)
    ok: bool = True

    @property
    def sequences_exact(self) -> int:
        return sum(les is not None for les in self.row_les + self.column_les)

    def to_dict(self) -> Dict[str, object]:
        return {
            "sequences_exact": self.sequences_exact,
            "squares_checked": self.squares_checked,
            "anticommuting_checked": self.anticommuting_checked,
            "failures": self.failures,
            "ok": self.ok,
        }


def _les_maps(ses: ShortExactSequence, k: int) -> Dict[str, Tuple[IntMatrix, int]]:
    """Maps leaving degree k of the row sequence: kind -> (matrix, degree shift)."""
    return {
        "i": (induced_map(ses.i, k), 0),
        "p": (induced_map(ses.p, k), 0),
        "connecting": (connecting_map(ses, k), -1),
    }


def grid_lemma57(morphism: SESMorphism) -> GridReport:
    """
    Build the 3×3 grid of cones for a morphism of short exact sequences and
    compare the long exact sequences of its rows and columns. Each of the six
    sequences is built with snake_les and kept on the report; an exactness
    failure is recorded like a failing square.

    Rows: the bottom sequence shifted by one, the sequence of cones, the top
    sequence. Columns: cone_ses of f, g and h. Every square between the row
    sequences commutes, except connecting-over-connecting, which anticommutes.
    """
    top, bottom = morphism.top, morphism.bottom
    columns = [cone_ses(morphism.f), cone_ses(morphism.g), cone_ses(morphism.h)]
    cone_f, cone_g, cone_h = (col.B for col in columns)
    middle = ShortExactSequence(
        _block_diagonal_map(bottom.i, top.i, cone_f, cone_g),
        _block_diagonal_map(bottom.p, top.p, cone_g, cone_h),
        names=("cone(f)", "cone(g)", "cone(h)"),
    )
    rows = [bottom.shifted(1), middle, top]
    report = GridReport(rows=rows, columns=columns)
    ring = morphism.ring
    for family, sequences, store in (("row", rows, report.row_les), ("column", columns, report.column_les)):
        for index, ses in enumerate(sequences):
            try:
                store.append(snake_les(ses))
            except ExactnessFailure as err:
                store.append(None)
                report.ok = False
                report.failures.append({"sequence": f"{family} {index}", "message": err.message, **err.location})

    degrees = sorted({k for ses in rows for k in ses.degrees})
    if not degrees:
        return report
    # vertical morphisms of row sequences: (from row, to row, column map kind)
    vertical = [(0, 1, "i"), (1, 2, "p"), (2, 0, "connecting")]
    positions = {"i": (0, 1), "p": (1, 2), "connecting": (2, 0)}
    objects = lambda ses: (ses.A, ses.B, ses.C)
    cache: Dict[Tuple[int, int], Dict[str, Tuple[IntMatrix, int]]] = {}

    def maps_at(ses: ShortExactSequence, k: int) -> Dict[str, Tuple[IntMatrix, int]]:
        key = (id(ses), k)
        if key not in cache:
            cache[key] = _les_maps(ses, k)
        return cache[key]

    for k in range(degrees[0], degrees[-1] + 2):
        for r_from, r_to, v_kind in vertical:
            v_shift = -1 if v_kind == "connecting" else 0
            src_row, tgt_row = rows[r_from], rows[r_to]
            h_src = maps_at(src_row, k)
            h_tgt = maps_at(tgt_row, k + v_shift)
            for h_kind, (h_top, h_shift) in h_src.items():
                j_from, j_to = positions[h_kind]
                # vertical maps at the start and end of the horizontal arrow
                v_start = maps_at(columns[j_from], k)[v_kind][0]
                v_end = maps_at(columns[j_to], k + h_shift)[v_kind][0]
                h_bottom = h_tgt[h_kind][0]
                one = matmul(v_end.array, h_top.array, ring)
                two = matmul(h_bottom.array, v_start.array, ring)
                marked = v_kind == "connecting" and h_kind == "connecting"
                total = one + two if marked else one - two
                target = objects(tgt_row)[j_to].homology_presentation(k + h_shift + v_shift)
                residual = target.reduce_coordinates(total) if total.size else total
                report.squares_checked += 1
                if marked:
                    report.anticommuting_checked += 1
                if not is_zero_array(residual):
                    report.ok = False
                    report.failures.append({"degree": k, "vertical": v_kind, "horizontal": h_kind,
                                            "anticommuting": marked})
    logger.debug("grid check: %d squares, %d failures", report.squares_checked, len(report.failures))
    return report
