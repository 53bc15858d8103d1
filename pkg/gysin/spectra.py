"""
Spectral sequences of bounded increasing filtrations, computed exactly.

Positions are (p, n): filtration level p and total degree n (so q = n - p).
With Z^r_p = {x ∈ F_p C_n : dx ∈ F_(p-r) C_(n-1)} the pages are

    E^r_(p,n) = Z^r_p / (Z^(r-1)_(p-1) + d Z^(r-1)_(p+r-1))

and d̄^r : E^r_(p,n) -> E^r_(p-r,n-1) is induced by d. E^0 is the associated
graded, E^1 its homology. Every group is a Subquotient of canonical lattices,
so generator choices only depend on the filtered complex.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from gysin.complexes import (
    ChainComplex,
    ChainMap,
    GradedMap,
    compose,
    identity_map,
    require_same_ring,
    shift,
)
from gysin.cones import LESEntry, LESMap, LongExactSequence, cone, cone_ses, snake_les
from gysin.config import DEFAULT_CONFIG
from gysin.errors import (
    BadParams,
    InvalidChainMap,
    InvalidFiltration,
    MismatchReport,
    NotAHomotopy,
    OrderTooHigh,
)
from gysin.exactlin import (
    FGAbelianGroup,
    IntMatrix,
    Lattice,
    Subquotient,
    _kernel,
    coordinate_lattice,
    identity,
    is_zero_array,
    matmul,
    preimage,
    zeros,
)

logger = logging.getLogger(__name__)

Position = Tuple[int, int]


def _take(arr: np.ndarray, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
    return arr[np.asarray(rows, dtype=int)][:, np.asarray(cols, dtype=int)]


# ------------------------
# Filtered complexes
# ------------------------
class FilteredComplex:
    """Chain complex with an integer filtration level per generator; ∂ never raises the level."""

    def __init__(self, complex: ChainComplex, filt: Mapping[int, Sequence[int]]):
        self.complex = complex
        self.ring = complex.ring
        given = {int(k): [int(x) for x in levels] for k, levels in filt.items()}
        self._levels: Dict[int, List[int]] = {}
        for k in complex.degrees:
            levels = given.pop(k, [])
            if len(levels) != complex.rank(k):
                raise InvalidFiltration(f"{len(levels)} levels for rank {complex.rank(k)}", {"degree": k})
            self._levels[k] = levels
        if any(given.values()):
            raise InvalidFiltration("levels given for degrees without generators",
                                    {"degrees": sorted(k for k, v in given.items() if v)})
        for k in complex.degrees:
            for (r, c), x in np.ndenumerate(complex.d(k)):
                if x != 0 and self.level(k - 1, r) > self.level(k, c):
                    raise InvalidFiltration("differential raises filtration", {"degree": k, "row": r, "col": c})
        self._pre_cache: Dict[Tuple[int, int, Optional[int]], Lattice] = {}

    def levels(self, k: int) -> List[int]:
        return list(self._levels.get(k, []))

    def level(self, k: int, i: int) -> int:
        return self._levels[k][i]

    @property
    def all_levels(self) -> List[int]:
        return sorted({x for levels in self._levels.values() for x in levels})

    @property
    def min_level(self) -> int:
        return min(self.all_levels, default=0)

    @property
    def max_level(self) -> int:
        return max(self.all_levels, default=0)

    @property
    def length(self) -> int:
        """Number of distinct levels spanned, max - min + 1."""
        return self.max_level - self.min_level + 1 if self.all_levels else 0

    def positions(self) -> List[Position]:
        """(p, n) with at least one generator of level exactly p in degree n."""
        return sorted({(p, n) for n in self.complex.degrees for p in self._levels[n]})

    def pre(self, n: int, src_level: int, tgt_level: Optional[int] = None) -> Lattice:
        """{x ∈ F_src C_n : dx ∈ F_tgt C_(n-1)}; tgt_level None means dx = 0."""
        key = (n, src_level, tgt_level)
        if key not in self._pre_cache:
            C = self.complex
            cols = [c for c, lvl in enumerate(self.levels(n)) if lvl <= src_level]
            rows = [r for r, lvl in enumerate(self.levels(n - 1)) if tgt_level is None or lvl > tgt_level]
            K = _kernel(_take(C.d(n), rows, cols), self.ring)
            full = zeros(C.rank(n), K.shape[1])
            if cols:
                full[np.asarray(cols, dtype=int), :] = K
            self._pre_cache[key] = Lattice.span(full, self.ring, C.rank(n))
        return self._pre_cache[key]

    def boundary_of(self, n: int, lattice: Lattice) -> Lattice:
        """d(lattice) inside C_(n-1)."""
        return Lattice.span(matmul(self.complex.d(n), lattice.basis, self.ring), self.ring, self.complex.rank(n - 1))

    def drops(self) -> List[int]:
        """Sorted filtration drops level(src) - level(tgt) over nonzero differential entries."""
        out = set()
        for k in self.complex.degrees:
            for (r, c), x in np.ndenumerate(self.complex.d(k)):
                if x != 0:
                    out.add(self.level(k, c) - self.level(k - 1, r))
        return sorted(out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FilteredComplex):
            return NotImplemented
        return self.complex == other.complex and self._levels == other._levels

    def __hash__(self) -> int:
        return hash(self.complex)


def filtration_drops(FC: FilteredComplex) -> List[int]:
    return FC.drops()


def filtration_bete(C: ChainComplex) -> FilteredComplex:
    """Filtration by degree: every generator of C_n sits at level n."""
    return FilteredComplex(C, {n: [n] * C.rank(n) for n in C.degrees})


def shift_filtration(FC: FilteredComplex, k: int) -> FilteredComplex:
    return FilteredComplex(FC.complex, {n: [x + k for x in FC.levels(n)] for n in FC.complex.degrees})


# ------------------------
# Pages
# ------------------------
@dataclass
class SpectralPages:
    filtered: FilteredComplex
    r_max: int
    pages: Dict[int, Dict[Position, Subquotient]] = field(default_factory=dict)
    differentials: Dict[int, Dict[Position, IntMatrix]] = field(default_factory=dict)  # (p,n) -> (p-r,n-1)
    infinity: Dict[Position, Subquotient] = field(default_factory=dict)

    def group(self, r: int, p: int, n: int) -> FGAbelianGroup:
        pres = self.pages[r].get((p, n))
        return pres.group if pres else FGAbelianGroup()

    def infinity_group(self, p: int, n: int) -> FGAbelianGroup:
        pres = self.infinity.get((p, n))
        return pres.group if pres else FGAbelianGroup()

    def differential(self, r: int, position: Position) -> np.ndarray:
        """Matrix of d̄^r leaving a position; zero rows when the target group is absent."""
        source = self.pages[r].get(position)
        width = source.num_generators if source else 0
        if position in self.differentials.get(r, {}):
            return self.differentials[r][position].array
        p, n = position
        target = self.pages[r].get((p - r, n - 1))
        return zeros(target.num_generators if target else 0, width)

    def nonzero_differentials(self, r: int) -> List[Position]:
        return sorted(pos for pos, m in self.differentials.get(r, {}).items() if not m.is_zero())

    def degenerates_at(self) -> int:
        """Smallest r with d̄^s = 0 for every computed s ≥ r."""
        r = self.r_max
        while r > 0 and not self.nonzero_differentials(r - 1):
            r -= 1
        return r

    def table(self, r: Optional[int] = None) -> pd.DataFrame:
        """Groups by level (rows) and degree (columns); r None gives E^∞."""
        groups = self.infinity if r is None else self.pages[r]
        levels = sorted({p for p, _ in groups}) or [0]
        degrees = sorted({n for _, n in groups}) or [0]
        frame = pd.DataFrame("0", index=levels, columns=degrees)
        for (p, n), pres in groups.items():
            frame.loc[p, n] = str(pres.group)
        frame.index.name = "p"
        frame.columns.name = "n"
        return frame


def spectral_pages(FC: FilteredComplex, r_max: Optional[int] = None, config=None) -> SpectralPages:
    config = config or DEFAULT_CONFIG
    r_max = config.get("default_pages", 3) if r_max is None else r_max
    if r_max < 0:
        raise InvalidFiltration(f"page index must be nonnegative, got {r_max}")
    if r_max > config.get("max_pages", 16):
        raise BadParams(f"at most {config.get('max_pages', 16)} pages, got {r_max}")
    C, ring = FC.complex, FC.ring
    sp = SpectralPages(FC, r_max)
    positions = FC.positions()
    for r in range(r_max + 1):
        page = {}
        for p, n in positions:
            numerator = FC.pre(n, p, p - r)
            denominator = FC.pre(n, p - 1, p - r) + FC.boundary_of(n + 1, FC.pre(n + 1, p + r - 1, p))
            page[(p, n)] = Subquotient(numerator, denominator, ring)
        sp.pages[r] = page
        diffs = {}
        for (p, n), src in page.items():
            tgt = page.get((p - r, n - 1))
            if tgt is None:
                continue
            images = matmul(C.d(n), src.generators, ring)
            diffs[(p, n)] = IntMatrix(tgt.coordinate_matrix(images), tgt.num_generators, src.num_generators)
        sp.differentials[r] = diffs
        logger.debug("page %d: %d positions, %d nonzero differentials", r, len(page),
                     sum(1 for m in diffs.values() if not m.is_zero()))
    top = FC.max_level
    for p, n in positions:
        numerator = FC.pre(n, p, None)
        denominator = FC.pre(n, p - 1, None) + FC.boundary_of(n + 1, FC.pre(n + 1, top, p))
        sp.infinity[(p, n)] = Subquotient(numerator, denominator, ring)
    return sp


def _homology_in_coordinates(moduli, incoming: np.ndarray, outgoing: np.ndarray, next_moduli, ring) -> FGAbelianGroup:
    rel = coordinate_lattice(moduli, ring)
    kernel = preimage(outgoing, coordinate_lattice(next_moduli, ring))
    image = Lattice.span(incoming, ring, len(moduli)) + rel
    return Subquotient(kernel, image, ring).group


def page_recursion_check(sp: SpectralPages) -> List[Dict[str, object]]:
    """Positions where H(E^r, d̄^r) differs from E^(r+1); empty when the recursion holds."""
    ring = sp.filtered.ring
    failures = []
    for r in range(sp.r_max):
        page = sp.pages[r]
        for (p, n), pres in page.items():
            outgoing = sp.differential(r, (p, n))
            target = page.get((p - r, n - 1))
            source = page.get((p + r, n + 1))
            incoming = sp.differential(r, (p + r, n + 1)) if source else zeros(pres.num_generators, 0)
            group = _homology_in_coordinates(pres.moduli, incoming, outgoing,
                                             target.moduli if target else (), ring)
            if group != sp.pages[r + 1][(p, n)].group:
                failures.append({"page": r, "p": p, "n": n, "homology": str(group),
                                 "next_page": str(sp.pages[r + 1][(p, n)].group)})
    return failures


def convergence_check(sp: SpectralPages) -> List[Dict[str, object]]:
    """
    Compare E^∞ with the filtration it induces on H(total). Over a field the
    dimensions per degree must add up; over ℤ each graded piece
    (Z∩F_p + B)/(Z∩F_(p-1) + B) must match E^∞_(p,n).
    """
    FC = sp.filtered
    C, ring = FC.complex, FC.ring
    failures = []
    for n in C.degrees:
        levels = sorted({p for p, m in sp.infinity if m == n})
        if ring.is_field:
            total = sum(sp.infinity[(p, n)].group.free_rank for p in levels)
            if total != C.betti(n):
                failures.append({"n": n, "e_infinity_dim": total, "homology_dim": C.betti(n)})
            continue
        boundaries = C.boundaries(n)
        for p in levels:
            upper = FC.pre(n, p, None) + boundaries
            lower = FC.pre(n, p - 1, None) + boundaries
            piece = Subquotient(upper, lower, ring).group
            if piece != sp.infinity[(p, n)].group:
                failures.append({"n": n, "p": p, "graded_piece": str(piece),
                                 "e_infinity": str(sp.infinity[(p, n)].group)})
    return failures


# ------------------------
# Filtered maps
# ------------------------
class FilteredMap:
    """A graded map between the underlying complexes of two filtered complexes."""

    def __init__(self, map: GradedMap, source: FilteredComplex, target: FilteredComplex):
        if map.source != source.complex or map.target != target.complex:
            raise InvalidChainMap("map does not match the filtered complexes")
        self.map = map
        self.source = source
        self.target = target

    @property
    def order(self) -> int:
        return filtered_order(self)


def filtered_order(K: FilteredMap) -> int:
    """Minimal k ≥ 0 with K(F_l) ⊂ F_(l+k), read off the nonzero matrix entries."""
    order = 0
    for k in K.source.complex.degrees:
        for (r, c), x in np.ndenumerate(K.map.mat(k)):
            if x != 0:
                order = max(order, K.target.level(k + K.map.shift, r) - K.source.level(k, c))
    return order


def induced_page_map(phi: FilteredMap, S: SpectralPages, T: SpectralPages, r: int) -> Dict[Position, IntMatrix]:
    """Matrices of φ_r : E^r_(p,n)(S) -> E^r_(p,n)(T) for a filtration-preserving chain map."""
    if phi.map.shift:
        raise InvalidChainMap("page maps need a shift-0 map")
    if filtered_order(phi):
        raise InvalidFiltration("map raises filtration", {"order": filtered_order(phi)})
    ring = phi.map.ring
    out = {}
    for (p, n), src in S.pages[r].items():
        tgt = T.pages[r].get((p, n))
        if tgt is None:
            out[(p, n)] = IntMatrix.zeros(0, src.num_generators)
            continue
        images = matmul(phi.map.mat(n), src.generators, ring)
        out[(p, n)] = IntMatrix(tgt.coordinate_matrix(images), tgt.num_generators, src.num_generators)
    return out


def homotopy_defect(f: GradedMap, g: GradedMap, K: GradedMap, k: int) -> np.ndarray:
    """(f - g) - (dK + Kd) on degree k generators."""
    ring = f.ring
    C, D = f.source, f.target
    dK = matmul(D.d(k + 1), K.mat(k), ring)
    Kd = matmul(K.mat(k - 1), C.d(k), ring)
    return ring.reduce_array(f.mat(k) - g.mat(k) - dK - Kd)


def _check_homotopy(f: GradedMap, g: GradedMap, K: GradedMap) -> None:
    if K.shift != 1 or K.source != f.source or K.target != f.target:
        raise NotAHomotopy("a homotopy must be a degree +1 map between the same complexes")
    for k in f.source.degrees:
        if not is_zero_array(homotopy_defect(f, g, K, k)):
            raise NotAHomotopy("f - g differs from dK + Kd", {"degree": k})


def _same_page_maps(first: Dict[Position, IntMatrix], second: Dict[Position, IntMatrix],
                    T: SpectralPages, r: int) -> bool:
    for pos, a in first.items():
        diff = a.array - second[pos].array
        tgt = T.pages[r].get(pos)
        if tgt is not None and diff.size and not is_zero_array(tgt.reduce_coordinates(diff)):
            return False
    return True


def homotopy_page_agreement(f: FilteredMap, g: FilteredMap, K: FilteredMap, r: int) -> bool:
    """Whether f_r and g_r agree on page r, given f - g = dK + Kd."""
    _check_homotopy(f.map, g.map, K.map)
    S = spectral_pages(f.source, r)
    T = spectral_pages(f.target, r)
    agree = _same_page_maps(induced_page_map(f, S, T, r), induced_page_map(g, S, T, r), T, r)
    logger.debug("page %d agreement with homotopy of order %d: %s", r, filtered_order(K), agree)
    return agree


@dataclass
class IsoReport:
    certified: bool
    page: int
    matrices: Dict[Position, IntMatrix] = field(default_factory=dict)          # forward map per position
    inverse_matrices: Dict[Position, IntMatrix] = field(default_factory=dict)  # backward map per position
    orders: Tuple[int, ...] = ()
    details: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict[str, object]:
        return {
            "certified": self.certified,
            "page": self.page,
            "orders": list(self.orders),
            "positions": [list(pos) for pos in sorted(self.matrices)],
            "details": self.details,
        }


def _compose_positions(second: Dict[Position, IntMatrix], first: Dict[Position, IntMatrix],
                       sp: SpectralPages, r: int) -> List[Position]:
    """Positions where second∘first is not the identity of E^r(sp)."""
    bad = []
    for pos, pres in sp.pages[r].items():
        g = pres.num_generators
        a = first.get(pos)
        b = second.get(pos)
        product = matmul(b.array, a.array, sp.filtered.ring) if a is not None and b is not None else zeros(g, g)
        if not is_zero_array(pres.reduce_coordinates(product - identity(g)) if g else product):
            bad.append(pos)
    return bad


def page_iso_from_filtered_homotopy_equivalence(s12: FilteredMap, s21: FilteredMap,
                                                K1: FilteredMap, K2: FilteredMap) -> IsoReport:
    """
    Certify that σ21 induces an isomorphism on page 2, given
    σ21∘σ12 - id = dK1 + K1d on C1 and σ12∘σ21 - id = dK2 + K2d on C2 with
    both homotopies of order at most 1.
    """
    C1, C2 = s12.source, s12.target
    if s21.source != C2 or s21.target != C1:
        raise InvalidChainMap("σ21 must go back from the target of σ12")
    for name, sigma in (("σ12", s12), ("σ21", s21)):
        if filtered_order(sigma):
            raise InvalidFiltration(f"{name} raises filtration", {"order": filtered_order(sigma)})
    _check_homotopy(compose(s21.map, s12.map), identity_map(C1.complex), K1.map)
    _check_homotopy(compose(s12.map, s21.map), identity_map(C2.complex), K2.map)
    orders = (filtered_order(K1), filtered_order(K2))
    if max(orders) > 1:
        raise OrderTooHigh("homotopy has order above 1", {"orders": orders})
    r = 2
    S1, S2 = spectral_pages(C1, r), spectral_pages(C2, r)
    forward = induced_page_map(s12, S1, S2, r)
    backward = induced_page_map(s21, S2, S1, r)
    details = []
    for pos, pres in S2.pages[r].items():
        forward.setdefault(pos, IntMatrix.zeros(pres.num_generators, 0))
    for pos, pres in S1.pages[r].items():
        backward.setdefault(pos, IntMatrix.zeros(pres.num_generators, 0))
    bad1 = _compose_positions(backward, forward, S1, r)
    bad2 = _compose_positions(forward, backward, S2, r)
    if bad1:
        details.append(f"σ21∘σ12 is not the identity at {bad1}")
    if bad2:
        details.append(f"σ12∘σ21 is not the identity at {bad2}")
    return IsoReport(not bad1 and not bad2, r, backward, forward, orders, details)


# ------------------------
# Two-line complexes and the Gysin sequence
# ------------------------
class TwoLineComplex:
    """
    Lines A (q = 0) and A' (q = 1) joined by a degree -2 chain map f : A_k -> A'_(k-2).

    The total complex is cone(f): in degree n it is A'_(n-1) ⊕ A_n with
    differential [[-∂_A', f], [0, ∂_A]], filtered by putting A'_(n-1) at
    level n-1 and A_n at level n.
    """

    def __init__(self, A: ChainComplex, Aprime: ChainComplex, f: GradedMap):
        require_same_ring(A, Aprime, f)
        if f.shift != -2 or f.source != A or f.target != Aprime:
            raise InvalidChainMap("a two-line complex needs f : A_k -> A'_(k-2)", {"shift": f.shift})
        if not isinstance(f, ChainMap):
            f = ChainMap(A, Aprime, -2, f.mats)
        self.A, self.Aprime, self.f = A, Aprime, f
        self.ring = A.ring
        self._total: Optional[FilteredComplex] = None

    def total(self) -> ChainComplex:
        return self.filtered().complex

    def filtered(self) -> FilteredComplex:
        if self._total is None:
            tot = cone(self.f)
            levels = {n: [n - 1] * self.Aprime.rank(n - 1) + [n] * self.A.rank(n) for n in tot.degrees}
            self._total = FilteredComplex(tot, levels)
        return self._total

    def aprime_shifted(self) -> ChainComplex:
        """A'[-1], whose degree n is A'_(n-1)."""
        return shift(self.Aprime, -1)


def two_line_total(T: TwoLineComplex) -> FilteredComplex:
    return T.filtered()


def _generators(pres: Optional[Subquotient], ambient: int) -> np.ndarray:
    return pres.generators if pres is not None else zeros(ambient, 0)


def _coordinates(pres: Optional[Subquotient], vectors: np.ndarray) -> np.ndarray:
    if pres is None:
        return zeros(0, vectors.shape[1])
    return pres.coordinate_matrix(vectors)


def _chain(ring, target: Subquotient, *matrices: np.ndarray) -> IntMatrix:
    """Product of matrices listed from last applied to first applied, reduced in the target."""
    out = matrices[0]
    for m in matrices[1:]:
        out = matmul(out, m, ring)
    out = target.reduce_coordinates(out) if out.size else out
    return IntMatrix(out)


def gysin_from_two_line(T: TwoLineComplex) -> LongExactSequence:
    """
    ... -> H_(n-1)(A') --I--> H_n(total) --P--> H_n(A) --d2--> H_(n-2)(A') -> ...

    assembled from pages 2 and ∞ of the filtered total complex. H_(n-1)(A')
    is presented as H_n(A'[-1]).
    """
    FC = T.filtered()
    tot, ring = FC.complex, T.ring
    sp = spectral_pages(FC, 3)
    Ash = T.aprime_shifted()
    les = LongExactSequence(ring=ring.label, metadata={"source": "gysin", "d2_convention": "induced by d2 = f"})
    degrees = sorted(set(tot.degrees) | set(T.A.degrees) | set(Ash.degrees))
    if not degrees:
        return les
    lo, hi = degrees[0], degrees[-1]
    E2, Einf = sp.pages[2], sp.infinity
    for n in range(hi, lo - 1, -1):
        HAsh = Ash.homology_presentation(n)
        Htot = tot.homology_presentation(n)
        HA = T.A.homology_presentation(n)
        top = T.Aprime.rank(n - 1)
        for label, pres in ((f"H{n}(A'[-1])", HAsh), (f"H{n}(total)", Htot), (f"H{n}(A)", HA)):
            les.entries.append(LESEntry(label, n, pres.group, pres.moduli))

        # I: identify with the q = 1 line of E², pass to E^∞, then into H(total)
        low = (n - 1, n)
        embedded = zeros(tot.rank(n), HAsh.num_generators)
        embedded[:top, :] = HAsh.generators
        m1 = _coordinates(E2.get(low), embedded)
        m2 = _coordinates(Einf.get(low), _generators(E2.get(low), tot.rank(n)))
        m3 = _coordinates(Htot, _generators(Einf.get(low), tot.rank(n)))
        les.maps.append(LESMap("I", n, _chain(ring, Htot, m3, m2, m1)))

        # P: H(total) onto its top graded piece E^∞, into E², then the A component
        high = (n, n)
        m1 = _coordinates(Einf.get(high), Htot.generators)
        m2 = _coordinates(E2.get(high), _generators(Einf.get(high), tot.rank(n)))
        m3 = _coordinates(HA, _generators(E2.get(high), tot.rank(n))[top:, :])
        les.maps.append(LESMap("P", n, _chain(ring, HA, m3, m2, m1)))

        # d2: identify H(A) with the q = 0 line of E², apply d̄², read off the A' component
        if n > lo:
            embedded = zeros(tot.rank(n), HA.num_generators)
            embedded[top:, :] = HA.generators
            m1 = _coordinates(E2.get(high), embedded)
            m2 = sp.differential(2, high) if E2.get(high) is not None else zeros(0, 0)
            low_target = E2.get((n - 2, n - 1))
            HAsh_next = Ash.homology_presentation(n - 1)
            gens = _generators(low_target, tot.rank(n - 1))[:T.Aprime.rank(n - 2), :]
            m3 = _coordinates(HAsh_next, gens)
            if m2.shape != (m3.shape[1], m1.shape[0]):
                m2 = zeros(m3.shape[1], m1.shape[0])
            les.maps.append(LESMap("d2", n, _chain(ring, HAsh_next, m3, m2, m1)))
    les.verify(ring)
    logger.debug("Gysin sequence with %d entries verified", len(les.entries))
    return les


@dataclass
class EquivalenceReport:
    degrees: List[int] = field(default_factory=list)
    groups_match: bool = True
    i_match: bool = True
    p_match: bool = True
    d2_match: bool = True
    mismatches: List[Dict[str, object]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.groups_match and self.i_match and self.p_match and self.d2_match

    def to_dict(self) -> Dict[str, object]:
        return {
            "degrees": self.degrees,
            "groups_match": self.groups_match,
            "i_match": self.i_match,
            "p_match": self.p_match,
            "d2_match": self.d2_match,
            "mismatches": self.mismatches,
            "ok": self.ok,
        }


def check_cone_equals_gysin(T: TwoLineComplex, raise_on_mismatch: bool = True) -> EquivalenceReport:
    """
    Compare the cone sequence of f with the Gysin sequence of the two-line
    complex: same groups, I = i_*, P = p_*, d̄² = f_* as matrices.
    """
    cone_les = snake_les(cone_ses(T.f))
    gysin = gysin_from_two_line(T)
    report = EquivalenceReport(degrees=sorted({e.degree for e in gysin.entries}))
    if len(cone_les.entries) != len(gysin.entries):
        report.groups_match = False
        report.mismatches.append({"what": "length", "cone": len(cone_les.entries), "gysin": len(gysin.entries)})
    for a, b in zip(cone_les.entries, gysin.entries):
        if a.group != b.group or a.degree != b.degree:
            report.groups_match = False
            report.mismatches.append({"what": "group", "degree": b.degree, "cone": str(a.group), "gysin": str(b.group)})
    pairs = (("i", "I", "i_match"), ("p", "P", "p_match"), ("connecting", "d2", "d2_match"))
    for cone_kind, gysin_kind, flag in pairs:
        cone_maps, gysin_maps = cone_les.maps_of_kind(cone_kind), gysin.maps_of_kind(gysin_kind)
        for degree in sorted(set(cone_maps) | set(gysin_maps)):
            if cone_maps.get(degree) != gysin_maps.get(degree):
                setattr(report, flag, False)
                report.mismatches.append({"what": gysin_kind, "degree": degree})
    if not report.ok and raise_on_mismatch:
        raise MismatchReport("cone and Gysin sequences differ", report.mismatches[0])
    return report


# ------------------------
# Filtration bête comparison
# ------------------------
@dataclass
class FactorizationReport:
    checks: List[Dict[str, object]] = field(default_factory=list)  # degree, check, ok

    @property
    def ok(self) -> bool:
        return all(c["ok"] for c in self.checks)

    def to_dict(self) -> Dict[str, object]:
        return {"checks": self.checks, "ok": self.ok}


def check_bete_factorization(T: TwoLineComplex) -> FactorizationReport:
    """
    On page 3, with F the two-line filtration, F' = F shifted up by one and
    F'' the filtration bête of the total complex, check degreewise that

    - P is the page map of p from F'' to the bête filtration of A,
    - I is the page map of i from the bête filtration of A'[-1] to F'',
    - P factors as (p from F) ∘ (Id: F'' -> F),
    - I factors as (Id: F' -> F'') ∘ (i into F').
    """
    gysin = gysin_from_two_line(T)
    ses = cone_ses(T.f)
    F = T.filtered()
    tot = F.complex
    if ses.B != tot:
        raise MismatchReport("cone sequence and total complex differ")
    F1 = shift_filtration(F, 1)
    F2 = filtration_bete(tot)
    bA = filtration_bete(T.A)
    bAsh = filtration_bete(ses.A)
    ident = identity_map(tot)
    p_map = ChainMap(tot, T.A, 0, ses.p.mats)
    i_map = ChainMap(ses.A, tot, 0, ses.i.mats)
    report = FactorizationReport()
    r = 3
    pos_maps = {
        "p_bete": FilteredMap(p_map, F2, bA),
        "i_bete": FilteredMap(i_map, bAsh, F2),
        "id_bete_F": FilteredMap(ident, F2, F),
        "p_F": FilteredMap(p_map, F, bA),
        "i_F1": FilteredMap(i_map, bAsh, F1),
        "id_F1_bete": FilteredMap(ident, F1, F2),
    }
    pages = {}

    def page_map(key: str) -> Dict[Position, IntMatrix]:
        if key not in pages:
            phi = pos_maps[key]
            pages[key] = induced_page_map(phi, spectral_pages(phi.source, r), spectral_pages(phi.target, r), r)
        return pages[key]

    ring = T.ring
    for n in sorted({e.degree for e in gysin.entries}):
        P = gysin.maps_of_kind("P").get(n)
        I = gysin.maps_of_kind("I").get(n)
        HA = T.A.homology_presentation(n)
        Htot = tot.homology_presentation(n)
        checks = {
            "P_is_page_map": _matches(page_map("p_bete").get((n, n)), P, HA),
            "I_is_page_map": _matches(page_map("i_bete").get((n, n)), I, Htot),
            "P_factors_through_F": _matches(
                _compose(page_map("p_F").get((n, n)), page_map("id_bete_F").get((n, n)), ring), P, HA),
            "I_factors_through_F1": _matches(
                _compose(page_map("id_F1_bete").get((n, n)), page_map("i_F1").get((n, n)), ring), I, Htot),
        }
        for name, ok in checks.items():
            report.checks.append({"degree": n, "check": name, "ok": ok})
    return report


def _compose(second: Optional[IntMatrix], first: Optional[IntMatrix], ring) -> Optional[IntMatrix]:
    if second is None or first is None:
        return None
    return IntMatrix(matmul(second.array, first.array, ring))


def _matches(candidate: Optional[IntMatrix], expected: Optional[IntMatrix], target: Subquotient) -> bool:
    """Equality modulo the target relations; a missing side counts as the zero map."""
    if expected is None or expected.is_zero():
        return candidate is None or candidate.is_zero() or is_zero_array(target.reduce_coordinates(candidate.array))
    if candidate is None or candidate.shape != expected.shape:
        return False
    return is_zero_array(target.reduce_coordinates(candidate.array - expected.array))
