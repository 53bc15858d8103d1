"""
Equivariant complexes built from combinatorial data.

Signed trajectory counts and indices are inputs: the constructions here only
check that they are algebraically consistent (d² = 0, commuting counts,
subcomplex conditions) and then run them through the cone and spectral
machinery.
"""
import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from gysin.complexes import (
    ChainComplex,
    ChainMap,
    compose,
    cpn_complex,
    induced_map,
    tensor,
    tensor_basis,
)
from gysin.cones import (
    GridReport,
    LongExactSequence,
    SESMorphism,
    ShortExactSequence,
    grid_lemma57,
)
from gysin.errors import (
    BadParams,
    DSquaredNonzero,
    ExactnessFailure,
    InvalidFiltration,
    MismatchReport,
    SubcomplexViolation,
)
from gysin.exactlin import (
    FGAbelianGroup,
    IntMatrix,
    identity,
    inverse,
    is_zero_array,
    matmul,
    zeros,
)
from gysin.rings import QQ, ZZ, Ring
from gysin.solver import MapStatus, PartialLES, SolvedReport, les_solver
from gysin.spectra import (
    FilteredComplex,
    IsoReport,
    TwoLineComplex,
    _take,
    gysin_from_two_line,
    spectral_pages,
)

logger = logging.getLogger(__name__)


# ------------------------
# Equivariant Morse complex
# ------------------------
@dataclass(frozen=True)
class Circle:
    label: str
    index: int  # Morse-Bott index of the critical circle


@dataclass
class S1MorseDatum:
    circles: List[Circle]
    counts: Dict[Tuple[int, int], int] = field(default_factory=dict)  # (upper, lower) circle positions -> signed count


def _indices_by_degree(degrees: Sequence[int]) -> Dict[int, List[int]]:
    out: Dict[int, List[int]] = {}
    for i, k in enumerate(degrees):
        out.setdefault(k, []).append(i)
    return out


def assemble_s1_morse(D: S1MorseDatum, ring: Ring = ZZ) -> ChainComplex:
    """Complex with one generator per circle in degree ind(S_p) and differential given by the counts."""
    by_degree = _indices_by_degree([c.index for c in D.circles])
    position = {i: (k, j) for k, members in by_degree.items() for j, i in enumerate(members)}
    diffs = {k: zeros(len(by_degree.get(k - 1, [])), len(members)) for k, members in by_degree.items()}
    for (upper, lower), count in D.counts.items():
        if not (0 <= upper < len(D.circles) and 0 <= lower < len(D.circles)):
            raise BadParams("count refers to an unknown circle", {"upper": upper, "lower": lower})
        k, col = position[upper]
        k_low, row = position[lower]
        if k - k_low != 1:
            raise BadParams("counts are only given for index difference 1",
                            {"upper": D.circles[upper].label, "lower": D.circles[lower].label})
        diffs[k][row, col] = count
    ranks = {k: len(members) for k, members in by_degree.items()}
    labels = {k: [D.circles[i].label for i in members] for k, members in by_degree.items()}
    C = ChainComplex(ranks, diffs, ring, labels, check=False)
    for k in C.degrees:
        product = matmul(C.d(k - 1), C.d(k), ring)
        if not is_zero_array(product):
            row, col = next((r, c) for (r, c), x in np.ndenumerate(product) if x != 0)
            raise DSquaredNonzero("equivariant differential squares to a nonzero map",
                                  {"from": labels[k][col], "to": labels[k - 2][row], "degree": k})
    return C


def compare_quotient_morse(D: S1MorseDatum, quotient: ChainComplex) -> bool:
    """Whether the equivariant complex equals a given quotient Morse complex after matching labels."""
    C = assemble_s1_morse(D, quotient.ring)
    if not quotient.has_labels:
        return C == quotient
    if C.ranks != quotient.ranks:
        return False
    for k in C.degrees:
        mine, theirs = C.labels(k), quotient.labels(k)
        if sorted(mine) != sorted(theirs):
            return False
        cols = [theirs.index(x) for x in mine]
        rows = [quotient.labels(k - 1).index(x) for x in C.labels(k - 1)]
        if not np.array_equal(_take(quotient.d(k), rows, cols), C.d(k)):
            return False
    return True


# ------------------------
# Morse-Bott data
# ------------------------
class ActionSign(Enum):
    """Side of the action split an orbit belongs to"""
    MINUS = "-"
    PLUS = "+"


@dataclass(frozen=True)
class Orbit:
    label: str
    weight: int                          # k_p; degree of M_p, and m_p sits one higher
    sign: Optional[ActionSign] = None


@dataclass
class MorseBottS1Datum:
    """
    Orbits with weights and the two count matrices.

    ``d1[q, p]`` counts from orbit p to orbit q with weight drop 1,
    ``d2[q, p]`` with weight drop 2.
    """
    orbits: List[Orbit]
    d1: IntMatrix
    d2: IntMatrix

    def __post_init__(self):
        n = len(self.orbits)
        self.d1 = IntMatrix(self.d1, n, n) if not isinstance(self.d1, IntMatrix) else self.d1
        self.d2 = IntMatrix(self.d2, n, n) if not isinstance(self.d2, IntMatrix) else self.d2
        for name, m in (("d1", self.d1), ("d2", self.d2)):
            if m.shape != (n, n):
                raise BadParams(f"{name} must be {n}x{n}, got {m.shape}")

    @property
    def has_signs(self) -> bool:
        return any(o.sign is not None for o in self.orbits)

    def by_weight(self) -> Dict[int, List[int]]:
        return _indices_by_degree([o.weight for o in self.orbits])

    def validate(self) -> None:
        for name, m, drop in (("d1", self.d1, 1), ("d2", self.d2, 2)):
            for q, p, _ in m.to_triples():
                if self.orbits[p].weight - self.orbits[q].weight != drop:
                    raise InvalidFiltration(f"{name} entries must drop the weight by {drop}",
                                            {"from": self.orbits[p].label, "to": self.orbits[q].label})
        square = self.d1 @ self.d1
        for q, p, _ in square.to_triples():
            raise DSquaredNonzero("d1 squares to a nonzero map",
                                  {"from": self.orbits[p].label, "to": self.orbits[q].label})
        commutator = self.d1 @ self.d2 - self.d2 @ self.d1
        for q, p, _ in commutator.to_triples():
            raise DSquaredNonzero("d1 and d2 do not commute, so the total differential squares to a nonzero map",
                                  {"from": self.orbits[p].label, "to": self.orbits[q].label})
        if self.has_signs:
            if any(o.sign is None for o in self.orbits):
                raise BadParams("either every orbit carries an action sign or none does")
            for name, m in (("d1", self.d1), ("d2", self.d2)):
                for q, p, _ in m.to_triples():
                    if self.orbits[p].sign is ActionSign.MINUS and self.orbits[q].sign is ActionSign.PLUS:
                        raise SubcomplexViolation(f"{name} maps a Minus orbit to a Plus orbit",
                                                  {"from": self.orbits[p].label, "to": self.orbits[q].label})

    def restrict(self, indices: Sequence[int]) -> "MorseBottS1Datum":
        idx = list(indices)
        return MorseBottS1Datum([self.orbits[i] for i in idx],
                                self.d1.submatrix(idx, idx), self.d2.submatrix(idx, idx))

    def indices_with_sign(self, sign: ActionSign) -> List[int]:
        return [i for i, o in enumerate(self.orbits) if o.sign is sign]


def _line(D: MorseBottS1Datum, prefix: str, ring: Ring) -> ChainComplex:
    """The orbits graded by weight with differential d1."""
    by_weight = D.by_weight()
    d1 = D.d1.array
    diffs = {k: _take(d1, by_weight.get(k - 1, []), members) for k, members in by_weight.items()}
    labels = {k: [f"{prefix}_{D.orbits[i].label}" for i in members] for k, members in by_weight.items()}
    return ChainComplex({k: len(v) for k, v in by_weight.items()}, diffs, ring, labels)


def two_line_from_datum(D: MorseBottS1Datum, ring: Ring = ZZ) -> TwoLineComplex:
    """A = M-line, A' = m-line, both with d1; f = d2 of shift -2."""
    D.validate()
    A = _line(D, "M", ring)
    Aprime = _line(D, "m", ring)
    by_weight = D.by_weight()
    mats = {k: _take(D.d2.array, by_weight.get(k - 2, []), members) for k, members in by_weight.items()}
    return TwoLineComplex(A, Aprime, ChainMap(A, Aprime, -2, mats))


def assemble_morse_bott(D: MorseBottS1Datum, ring: Ring = ZZ) -> FilteredComplex:
    """
    Two generators per orbit, M_p in degree k_p and m_p in degree k_p + 1,
    both at filtration level k_p. The differential is +d1 on the M-line,
    -d1 on the m-line and d2 from the M-line to the m-line.
    """
    FC = two_line_from_datum(D, ring).filtered()
    drops = FC.drops()
    if any(x not in (1, 2) for x in drops):
        raise InvalidFiltration("differential has a component outside drops 1 and 2", {"drops": drops})
    logger.debug("Morse-Bott complex with %d generators", FC.complex.total_rank)
    return FC


def phi_e1(D: MorseBottS1Datum, ring: Ring = ZZ) -> IsoReport:
    """
    Compare E¹ of the Morse-Bott complex with SC ⊗ H(S¹).

    Φ(M_p) = S_p ⊗ M and Φ(m_p) = (-1)^(k_p+1) S_p ⊗ m, which absorbs the -d1
    on the m-line so that Φ∘d̄¹ = (∂ ⊗ Id)∘Φ holds exactly.
    """
    T = two_line_from_datum(D, ring)
    FC = T.filtered()
    tot = FC.complex
    sp = spectral_pages(FC, 1)
    E1 = sp.pages[1]
    SC = T.A
    circle_homology = ChainComplex({0: 1, 1: 1}, {}, ring, {0: ["M"], 1: ["m"]})
    target = tensor(SC, circle_homology)
    by_weight = D.by_weight()

    def target_index(n: int, weight: int, a: int) -> int:
        return tensor_basis(SC, circle_homology, n).index((weight, a, 0))

    # Φ on the standard generators of the total complex, degree by degree
    phi_std: Dict[int, np.ndarray] = {}
    for n in tot.degrees:
        arr = zeros(target.rank(n), tot.rank(n))
        top = T.Aprime.rank(n - 1)
        for a in range(top):
            weight = n - 1
            arr[target_index(n, weight, a), a] = -1 if weight % 2 == 0 else 1
        for a in range(T.A.rank(n)):
            arr[target_index(n, n, a), top + a] = 1
        phi_std[n] = arr

    # E¹ total complex: degree n is ⊕_p E¹_(p,n), positions in ascending p
    blocks: Dict[int, List[Tuple[int, int]]] = {}
    for (p, n) in sorted(E1):
        blocks.setdefault(n, []).append((p, n))
    offsets = {}
    ranks = {}
    for n, positions in blocks.items():
        pos = 0
        for key in positions:
            offsets[key] = pos
            pos += E1[key].num_generators
        ranks[n] = pos
    diffs = {}
    for n, positions in blocks.items():
        arr = zeros(ranks.get(n - 1, 0), ranks[n])
        for (p, _) in positions:
            m = sp.differential(1, (p, n))
            if (p - 1, n - 1) in offsets and m.size:
                r0, c0 = offsets[(p - 1, n - 1)], offsets[(p, n)]
                arr[r0:r0 + m.shape[0], c0:c0 + m.shape[1]] = m
        diffs[n] = arr
    e1_complex = ChainComplex(ranks, diffs, ring)

    report = IsoReport(True, 1)
    phi: Dict[int, np.ndarray] = {}
    for n, positions in blocks.items():
        arr = zeros(target.rank(n), ranks[n])
        basis = tensor_basis(SC, circle_homology, n)
        for (p, _) in positions:
            pres = E1[(p, n)]
            # keep only level-p components of each generator
            gens = pres.generators.copy()
            for c, level in enumerate(FC.levels(n)):
                if level != p:
                    gens[c, :] = 0
            block = matmul(phi_std[n], gens, ring)
            c0 = offsets[(p, n)]
            arr[:, c0:c0 + block.shape[1]] = block
            report.matrices[(p, n)] = IntMatrix(block, target.rank(n), block.shape[1])
            for (row, _), x in np.ndenumerate(block):
                if x != 0 and basis[row][0] != p:
                    report.certified = False
                    report.details.append(f"Φ leaves filtration level {p} in degree {n}")
        phi[n] = arr
        if arr.shape[0] != arr.shape[1]:
            report.certified = False
            report.details.append(f"Φ is not square in degree {n}")
            continue
        try:
            inverse(arr, ring)
        except BadParams:
            report.certified = False
            report.details.append(f"Φ is not invertible in degree {n}")
    for n in sorted(set(e1_complex.degrees) | set(target.degrees)):
        left = matmul(phi.get(n - 1, zeros(target.rank(n - 1), e1_complex.rank(n - 1))), e1_complex.d(n), ring)
        right = matmul(target.d(n), phi.get(n, zeros(target.rank(n), e1_complex.rank(n))), ring)
        if not is_zero_array(ring.reduce_array(left - right)):
            report.certified = False
            report.details.append(f"square fails in degree {n}")
    return report


RENAMED_KINDS = {"I": "M", "P": "E", "d2": "D"}


def gysin_theorem11(D: MorseBottS1Datum, ring: Ring = ZZ) -> LongExactSequence:
    """
    The Gysin sequence of a Morse-Bott datum with maps named E (total to
    equivariant), D (equivariant degree -2) and M (equivariant to total).
    """
    T = two_line_from_datum(D, ring)
    les = gysin_from_two_line(T)
    for m in les.maps:
        m.kind = RENAMED_KINDS[m.kind]
    tot = assemble_morse_bott(D, ring).complex
    for entry in les.entries:
        if entry.label.endswith("(total)") and entry.group != tot.homology(entry.degree):
            raise MismatchReport("total column differs from the homology of the assembled complex",
                                 {"degree": entry.degree})
    les.metadata["maps"] = "E: total -> equivariant, D: equivariant degree -2, M: equivariant -> total"
    return les


@dataclass
class HomologyReport:
    degrees: List[int] = field(default_factory=list)
    delta: Dict[int, IntMatrix] = field(default_factory=dict)  # H_n(total) -> H_(n+1)(total)
    chain_map: bool = True
    squares_to_zero: bool = True
    matches_gysin: bool = True
    failures: List[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.chain_map and self.squares_to_zero and self.matches_gysin

    def to_dict(self) -> Dict[str, object]:
        return {
            "degrees": self.degrees,
            "delta": {str(k): [[str(x) for x in row] for row in m.to_rows()] for k, m in self.delta.items()},
            "chain_map": self.chain_map,
            "squares_to_zero": self.squares_to_zero,
            "matches_gysin": self.matches_gysin,
            "failures": self.failures,
            "ok": self.ok,
        }


def bv_delta(D: MorseBottS1Datum, ring: Ring = ZZ) -> Tuple[ChainMap, HomologyReport]:
    """Δ̄(x, y) = (y, 0) on the total complex, checked against M∘E on homology."""
    T = two_line_from_datum(D, ring)
    tot = T.total()
    mats = {}
    for n in tot.degrees:
        arr = zeros(tot.rank(n + 1), tot.rank(n))
        top_src = T.Aprime.rank(n - 1)
        width = T.A.rank(n)
        # A_n in degree n goes to the A'_n block of degree n+1, which comes first
        arr[:width, top_src:top_src + width] = identity(width)
        mats[n] = arr
    delta = ChainMap(tot, tot, 1, mats)
    report = HomologyReport(degrees=tot.degrees)
    report.squares_to_zero = compose(delta, delta).is_zero()
    les = gysin_theorem11(D, ring)
    E, M = les.maps_of_kind("E"), les.maps_of_kind("M")
    for n in tot.degrees:
        induced = induced_map(delta, n)
        report.delta[n] = induced
        target = tot.homology_presentation(n + 1)
        if n in E and n + 1 in M:
            expected = matmul(M[n + 1].array, E[n].array, ring)
        else:
            expected = zeros(induced.rows, induced.cols)
        diff = induced.array - expected
        if diff.size and not is_zero_array(target.reduce_coordinates(diff)):
            report.matches_gysin = False
            report.failures.append(n)
    return delta, report


# ------------------------
# Trivial action
# ------------------------
@dataclass
class GysinReport:
    rows: List[Dict[str, object]] = field(default_factory=list)  # degree, model, expected, groups_ok, d_map_ok
    ok: bool = True

    def table(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=["degree", "model", "expected", "groups_ok", "d_map_ok"])

    def to_dict(self) -> Dict[str, object]:
        return {"rows": self.rows, "ok": self.ok}


def borel_two_line(C: ChainComplex, N: int) -> TwoLineComplex:
    """A = A' = C ⊗ CP^N with f(x ⊗ u_m) = x ⊗ u_(m-1), killing u_0."""
    if N < 0:
        raise BadParams(f"level must be nonnegative, got {N}")
    P = cpn_complex(N, C.ring)
    model = tensor(C, P)
    mats = {}
    for n in model.degrees:
        src = tensor_basis(C, P, n)
        tgt = tensor_basis(C, P, n - 2)
        arr = zeros(len(tgt), len(src))
        for col, (i, a, b) in enumerate(src):
            if n - i >= 2:
                arr[tgt.index((i, a, 0)), col] = 1
        mats[n] = arr
    return TwoLineComplex(model, model, ChainMap(model, model, -2, mats))


def _summand_embedding(C: ChainComplex, model: ChainComplex, N: int, k: int) -> np.ndarray:
    """⊕_m H_(k-2m)(C) -> H_k(C ⊗ CP^N) in coordinates, summands in increasing m."""
    P = cpn_complex(N, model.ring)
    basis = tensor_basis(C, P, k)
    target = model.homology_presentation(k)
    columns = []
    for m in range(N + 1):
        pres = C.homology_presentation(k - 2 * m)
        for j in range(pres.num_generators):
            vec = np.zeros(model.rank(k), dtype=object)
            for a in range(C.rank(k - 2 * m)):
                vec[basis.index((k - 2 * m, a, 0))] = pres.generators[a, j]
            columns.append(target.coordinates(vec))
    if not columns:
        return zeros(target.num_generators, 0)
    return np.stack(columns, axis=1)


def _summand_sizes(C: ChainComplex, N: int, k: int) -> List[int]:
    return [C.homology_presentation(k - 2 * m).num_generators for m in range(N + 1)]


def _summand_shift(C: ChainComplex, N: int, k: int) -> np.ndarray:
    """Component m of degree k goes identically to component m-1 of degree k-2; m = 0 is killed."""
    src, tgt = _summand_sizes(C, N, k), _summand_sizes(C, N, k - 2)
    arr = zeros(sum(tgt), sum(src))
    for m in range(1, N + 1):
        r0, c0 = sum(tgt[:m - 1]), sum(src[:m])
        arr[r0:r0 + src[m], c0:c0 + src[m]] = identity(src[m])
    return arr


def borel_trivial_action(C: ChainComplex, N: int) -> Tuple[ChainComplex, GysinReport]:
    """C ⊗ CP^N, compared with ⊕_m H_(k-2m)(C); the Gysin D-map is checked over a field."""
    if N < 0:
        raise BadParams(f"level must be nonnegative, got {N}")
    model = tensor(C, cpn_complex(N, C.ring))
    report = GysinReport()
    field_C = C if C.ring.is_field else C.change_ring(QQ)
    T = borel_two_line(field_C, N)
    field_model = T.A
    les = gysin_from_two_line(T)
    d_maps = les.maps_of_kind("d2")
    lo, hi = model.degree_range
    for k in range(lo, hi + 1):
        expected = FGAbelianGroup.direct_sum(C.homology(k - 2 * m) for m in range(N + 1))
        groups_ok = model.homology(k) == expected
        d_ok = True
        if k in d_maps:
            left = matmul(d_maps[k].array, _summand_embedding(field_C, field_model, N, k), field_C.ring)
            right = matmul(_summand_embedding(field_C, field_model, N, k - 2), _summand_shift(field_C, N, k),
                           field_C.ring)
            d_ok = left.shape == right.shape and is_zero_array(field_C.ring.reduce_array(left - right))
        report.rows.append({"degree": k, "model": str(model.homology(k)), "expected": str(expected),
                            "groups_ok": groups_ok, "d_map_ok": d_ok})
        report.ok = report.ok and groups_ok and d_ok
    return model, report


def borel_stabilization(C: ChainComplex, k: int, levels: Sequence[int]) -> Dict[int, FGAbelianGroup]:
    """
    H_k(C ⊗ CP^N) for each N; constant once 2N ≥ k - min degree of C, which
    for C in nonnegative degrees is the bound 2N ≥ k.
    """
    return {N: tensor(C, cpn_complex(N, C.ring)).homology(k) for N in levels}


def trivial_action_datum(N: int) -> MorseBottS1Datum:
    """Orbits of weights 0, 2, ..., 2N with d2 stepping down by one; H(total) is that of S^(2N+1)."""
    if N < 0:
        raise BadParams(f"level must be nonnegative, got {N}")
    orbits = [Orbit(f"S{m}", 2 * m) for m in range(N + 1)]
    d2 = IntMatrix.from_triples(N + 1, N + 1, [(m - 1, m, 1) for m in range(1, N + 1)])
    return MorseBottS1Datum(orbits, IntMatrix.zeros(N + 1, N + 1), d2)


# ------------------------
# Tautological / Gysin diagram
# ------------------------
@dataclass
class GysinDiagramInstance:
    morphism: SESMorphism
    classes: Dict[str, Tuple[int, np.ndarray]] = field(default_factory=dict)  # label -> (degree, vector in A^-)
    datum: Optional[MorseBottS1Datum] = None


def _sub_line_ses(D: MorseBottS1Datum, prefix: str, ring: Ring) -> ShortExactSequence:
    minus = D.indices_with_sign(ActionSign.MINUS)
    plus = D.indices_with_sign(ActionSign.PLUS)
    whole = _line(D, prefix, ring)
    low = _line(D.restrict(minus), prefix, ring)
    high = _line(D.restrict(plus), prefix, ring)
    by_weight = D.by_weight()
    i_mats, p_mats = {}, {}
    for k, members in by_weight.items():
        minus_k = [i for i in members if i in minus]
        plus_k = [i for i in members if i in plus]
        inc = zeros(len(members), len(minus_k))
        for col, i in enumerate(minus_k):
            inc[members.index(i), col] = 1
        proj = zeros(len(plus_k), len(members))
        for row, i in enumerate(plus_k):
            proj[row, members.index(i)] = 1
        i_mats[k], p_mats[k] = inc, proj
    return ShortExactSequence(ChainMap(low, whole, 0, i_mats), ChainMap(whole, high, 0, p_mats),
                              names=(f"{prefix}-", prefix, f"{prefix}+"))


def diagram_from_datum(D: MorseBottS1Datum, ring: Ring = ZZ) -> GysinDiagramInstance:
    """
    Top row: Minus part, whole and Plus part of the M-line. Bottom row: the
    same for the m-line, shifted by -2. Vertical maps are d2 restricted to
    each part.
    """
    D.validate()
    if not D.has_signs:
        raise BadParams("the diagram needs an action sign on every orbit")
    top = _sub_line_ses(D, "M", ring)
    bottom = _sub_line_ses(D, "m", ring).shifted(-2)
    minus = D.indices_with_sign(ActionSign.MINUS)
    plus = D.indices_with_sign(ActionSign.PLUS)

    def d2_map(indices: Sequence[int], source: ChainComplex, target: ChainComplex) -> ChainMap:
        sub = D.restrict(indices)
        by_weight = sub.by_weight()
        mats = {k: _take(sub.d2.array, by_weight.get(k - 2, []), members) for k, members in by_weight.items()}
        return ChainMap(source, target, 0, mats)

    f = d2_map(minus, top.A, bottom.A)
    g = d2_map(list(range(len(D.orbits))), top.B, bottom.B)
    h = d2_map(plus, top.C, bottom.C)
    morphism = SESMorphism(top, bottom, f, g, h)
    classes = {}
    low = top.A
    for k in low.degrees:
        pres = low.homology_presentation(k)
        for j in range(pres.num_generators):
            classes[f"u{k}_{j}"] = (k, pres.generators[:, j])
    return GysinDiagramInstance(morphism, classes, D)


@dataclass
class DiagramReport:
    grid: Optional[GridReport] = None
    sequences_checked: int = 0
    failure: Optional[Dict[str, object]] = None
    forced_isomorphisms: Optional[List[int]] = None  # degrees of connecting maps the solver forces, if it ran

    @property
    def ok(self) -> bool:
        return self.failure is None and (self.grid is None or self.grid.ok)

    def to_dict(self) -> Dict[str, object]:
        return {
            "grid": self.grid.to_dict() if self.grid else None,
            "sequences_checked": self.sequences_checked,
            "failure": self.failure,
            "forced_isomorphisms": self.forced_isomorphisms,
            "ok": self.ok,
        }


def _whole_gysin_column(grid: GridReport) -> LongExactSequence:
    les = grid.column_les[1]
    if les is None:
        raise ExactnessFailure("the sequence of the whole datum is not exact")
    return les


def vanishing_column_deduction(G: GysinDiagramInstance,
                               grid: Optional[GridReport] = None) -> Tuple[LongExactSequence, SolvedReport]:
    """
    Run les_solver on the Gysin sequence of the whole datum with only its cone
    entries known and the line entries hidden. The ends are left open, so when
    every cone entry vanishes the connecting maps, which lower the line degree
    by two, come back as isomorphisms.
    """
    les = _whole_gysin_column(grid or grid_lemma57(G.morphism))
    hidden = [e.label for e in les.entries if not e.label.endswith("(cone)")]
    solved = les_solver(PartialLES.from_les(les, hidden, bounded=False))
    return les, solved


def diagram17_check(G: GysinDiagramInstance) -> DiagramReport:
    """
    Exactness of every row and column sequence plus the grid's square pattern.
    Over a field, when the whole datum's cone homology vanishes, the report
    also lists the connecting maps the solver forces to be isomorphisms.
    """
    report = DiagramReport()
    grid = grid_lemma57(G.morphism)
    report.grid = grid
    report.sequences_checked = grid.sequences_exact
    if not grid.ok:
        report.failure = dict(grid.failures[0])
        return report
    middle = grid.column_les[1]
    cone_trivial = all(e.group.is_trivial for e in middle.entries if e.label.endswith("(cone)"))
    if G.morphism.ring.is_field and cone_trivial:
        les, solved = vanishing_column_deduction(G, grid)
        report.forced_isomorphisms = [m.degree for j, m in enumerate(les.maps)
                                      if m.kind == "connecting" and solved.maps[j] is MapStatus.ISO]
    return report


@dataclass
class EWCReport:
    images: Dict[str, List[str]] = field(default_factory=dict)  # label -> coordinates in H(A)
    vanishing: Dict[str, bool] = field(default_factory=dict)

    @property
    def all_vanish(self) -> bool:
        return all(self.vanishing.values())

    def to_dict(self) -> Dict[str, object]:
        return {"images": self.images, "vanishing": self.vanishing, "all_vanish": self.all_vanish}


def ewc_certificate(G: GysinDiagramInstance) -> EWCReport:
    """Images of the distinguished classes under H(A^-) -> H(A), by direct kernel computation."""
    i = G.morphism.top.i
    report = EWCReport()
    for label, (k, vector) in G.classes.items():
        image = matmul(i.mat(k), np.asarray(vector, dtype=object), i.ring)
        coords = i.target.homology_presentation(k).coordinates(image)
        report.images[label] = [str(x) for x in coords]
        report.vanishing[label] = is_zero_array(coords)
    return report
