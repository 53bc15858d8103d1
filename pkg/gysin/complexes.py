"""
Graded chain complexes with degree -1 differentials, maps between them,
homology presentations, shifts and tensor products.

A map of shift s sends degree k to degree k+s. Chain maps satisfy
f∘∂ = (-1)^s ∂∘f, which makes them degree-0 chain maps into the shifted
target D[s] (whose differential is (-1)^s ∂).
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from gysin.errors import BadParams, InvalidChainMap, InvalidComplex, RingMismatch
from gysin.exactlin import (
    FGAbelianGroup,
    IntMatrix,
    Lattice,
    Subquotient,
    _kernel,
    coerce_array,
    identity,
    is_zero_array,
    matmul,
    to_array,
    zeros,
)
from gysin.rings import ZZ, Ring

logger = logging.getLogger(__name__)


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


def kron(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product of object arrays, row index (i, k) -> i*rows(b) + k."""
    out = zeros(a.shape[0] * b.shape[0], a.shape[1] * b.shape[1])
    for (i, j), x in np.ndenumerate(a):
        if x != 0:
            out[i * b.shape[0]:(i + 1) * b.shape[0], j * b.shape[1]:(j + 1) * b.shape[1]] = x * b
    return out


def require_same_ring(*objects) -> Ring:
    rings = {obj.ring for obj in objects}
    if len(rings) != 1:
        raise RingMismatch("operands live over different rings: " + ", ".join(sorted(r.label for r in rings)))
    return rings.pop()


class ChainComplex:
    """
    Finitely generated graded free module with a differential of degree -1.

    ``ranks`` maps degree to rank; ``diffs[k]`` is the matrix of ∂_k of shape
    rank(k-1) × rank(k). Missing differentials are zero. Labels are carried
    for output only and never affect equality or algebra.
    """

    def __init__(self, ranks: Mapping[int, int], diffs: Optional[Mapping[int, object]] = None,
                 ring: Ring = ZZ, labels: Optional[Mapping[int, Sequence[str]]] = None, check: bool = True):
        self.ring = ring
        self._ranks: Dict[int, int] = {}
        for k, r in ranks.items():
            if int(r) < 0:
                raise InvalidComplex("negative rank", {"degree": k})
            if int(r):
                self._ranks[int(k)] = int(r)
        self._diffs: Dict[int, IntMatrix] = {}
        for k, d in (diffs or {}).items():
            k = int(k)
            arr = coerce_array(to_array(d), ring) if not isinstance(d, IntMatrix) else coerce_array(d.array, ring)
            expected = (self.rank(k - 1), self.rank(k))
            if arr.size == 0 and 0 in expected:
                continue
            if arr.shape != expected:
                raise InvalidComplex(f"differential has shape {arr.shape}, expected {expected}", {"degree": k})
            if not is_zero_array(arr):
                self._diffs[k] = IntMatrix(arr)
        self._labels: Dict[int, List[str]] = {}
        for k, names in (labels or {}).items():
            names = [str(x) for x in names]
            if len(names) != self.rank(int(k)):
                raise InvalidComplex(f"{len(names)} labels for rank {self.rank(int(k))}", {"degree": k})
            if names:
                self._labels[int(k)] = names
        self._presentations: Dict[int, Subquotient] = {}
        if check:
            self.validate()

    def validate(self) -> None:
        for k in self.degrees:
            product = matmul(self.d(k - 1), self.d(k), self.ring)
            if not is_zero_array(product):
                raise InvalidComplex("differential does not square to zero", {"degree": k})

    # ------------------------
    # Accessors
    # ------------------------
    @property
    def degrees(self) -> List[int]:
        """Degrees carrying generators, ascending."""
        return sorted(self._ranks)

    @property
    def degree_range(self) -> Tuple[int, int]:
        """(lo, hi) of the nonzero degrees; (0, -1) for the zero complex."""
        if not self._ranks:
            return 0, -1
        return min(self._ranks), max(self._ranks)

    @property
    def ranks(self) -> Dict[int, int]:
        return dict(self._ranks)

    @property
    def total_rank(self) -> int:
        return sum(self._ranks.values())

    def rank(self, k: int) -> int:
        return self._ranks.get(k, 0)

    def d(self, k: int) -> np.ndarray:
        """∂_k : C_k -> C_(k-1) as a read-only object array."""
        if k in self._diffs:
            return self._diffs[k].array
        return zeros(self.rank(k - 1), self.rank(k))

    def differential(self, k: int) -> IntMatrix:
        return self._diffs.get(k) or IntMatrix.zeros(self.rank(k - 1), self.rank(k))

    @property
    def differentials(self) -> Dict[int, IntMatrix]:
        return dict(self._diffs)

    def labels(self, k: int) -> List[str]:
        return list(self._labels.get(k) or [f"e{k}_{i}" for i in range(self.rank(k))])

    @property
    def has_labels(self) -> bool:
        return bool(self._labels)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainComplex):
            return NotImplemented
        return self.ring == other.ring and self._ranks == other._ranks and self._diffs == other._diffs

    def __hash__(self) -> int:
        return hash((self.ring, tuple(sorted(self._ranks.items())), tuple(sorted(self._diffs.items()))))

    def __repr__(self) -> str:
        return f"ChainComplex(ring={self.ring}, ranks={self._ranks})"

    # ------------------------
    # Homology
    # ------------------------
    def cycles(self, k: int) -> Lattice:
        return Lattice.span(_kernel(self.d(k), self.ring), self.ring, self.rank(k))

    def boundaries(self, k: int) -> Lattice:
        return Lattice.span(self.d(k + 1), self.ring, self.rank(k))

    def homology_presentation(self, k: int) -> Subquotient:
        if k not in self._presentations:
            self._presentations[k] = Subquotient(self.cycles(k), self.boundaries(k), self.ring)
            logger.debug("homology presentation in degree %d: %s", k, self._presentations[k].group)
        return self._presentations[k]

    def homology(self, k: int) -> FGAbelianGroup:
        return self.homology_presentation(k).group

    def homology_all(self) -> Dict[int, FGAbelianGroup]:
        lo, hi = self.degree_range
        return {k: self.homology(k) for k in range(lo, hi + 1)}

    def betti(self, k: int) -> int:
        """Rank of H_k (dimension over a field)."""
        return self.homology(k).free_rank

    def homology_line(self) -> str:
        """'H0=Z H1=0 H2=Z' over the nonzero degree range."""
        return " ".join(f"H{k}={group}" for k, group in self.homology_all().items())

    def change_ring(self, ring: Ring) -> "ChainComplex":
        """Reduce integer coefficients into another ring."""
        if self.ring != ZZ and ring != self.ring:
            raise RingMismatch(f"cannot change coefficients from {self.ring} to {ring}")
        return ChainComplex(self._ranks, self._diffs, ring, self._labels)


def homology(C: ChainComplex, k: int) -> FGAbelianGroup:
    return C.homology(k)


def direct_sum(*complexes: ChainComplex) -> ChainComplex:
    """Block-diagonal sum; generators of earlier summands come first in every degree."""
    ring = require_same_ring(*complexes)
    degrees = sorted({k for C in complexes for k in C.degrees})
    ranks = {k: sum(C.rank(k) for C in complexes) for k in degrees}
    diffs = {}
    for k in degrees:
        arr = zeros(ranks.get(k - 1, 0), ranks[k])
        r0 = c0 = 0
        for C in complexes:
            arr[r0:r0 + C.rank(k - 1), c0:c0 + C.rank(k)] = C.d(k)
            r0 += C.rank(k - 1)
            c0 += C.rank(k)
        diffs[k] = arr
    labels = {k: [name for C in complexes for name in C.labels(k)] for k in degrees}
    return ChainComplex(ranks, diffs, ring, labels)


def shift(C: ChainComplex, k: int) -> ChainComplex:
    """C[k]_n = C_(n+k) with differential (-1)^k ∂."""
    sign = _sign(k)
    ranks = {n - k: r for n, r in C.ranks.items()}
    diffs = {n - k: C.ring.reduce_array(m.array * sign) for n, m in C.differentials.items()}
    labels = {n - k: C.labels(n) for n in C.degrees} if C.has_labels else None
    return ChainComplex(ranks, diffs, C.ring, labels, check=False)


# ------------------------
# Maps
# ------------------------
class GradedMap:
    """
    Map of graded modules C_k -> D_(k+shift), no chain condition.

    ``mats[k]`` has shape target.rank(k+shift) × source.rank(k).
    """
    error = InvalidChainMap

    def __init__(self, source: ChainComplex, target: ChainComplex, shift: int = 0,
                 mats: Optional[Mapping[int, object]] = None):
        self.ring = require_same_ring(source, target)
        self.source = source
        self.target = target
        self.shift = int(shift)
        self._mats: Dict[int, IntMatrix] = {}
        for k, m in (mats or {}).items():
            k = int(k)
            arr = coerce_array(m.array if isinstance(m, IntMatrix) else to_array(m), self.ring)
            expected = (target.rank(k + self.shift), source.rank(k))
            if arr.size == 0 and 0 in expected:
                continue
            if arr.shape != expected:
                raise self.error(f"map has shape {arr.shape}, expected {expected}", {"degree": k})
            if not is_zero_array(arr):
                self._mats[k] = IntMatrix(arr)

    def mat(self, k: int) -> np.ndarray:
        if k in self._mats:
            return self._mats[k].array
        return zeros(self.target.rank(k + self.shift), self.source.rank(k))

    def matrix(self, k: int) -> IntMatrix:
        return self._mats.get(k) or IntMatrix.zeros(self.target.rank(k + self.shift), self.source.rank(k))

    @property
    def mats(self) -> Dict[int, IntMatrix]:
        return dict(self._mats)

    def is_zero(self) -> bool:
        return not self._mats

    def chain_defect(self, k: int) -> np.ndarray:
        """f∘∂_k - (-1)^s ∂∘f_k on degree k generators."""
        left = matmul(self.mat(k - 1), self.source.d(k), self.ring)
        right = matmul(self.target.d(k + self.shift), self.mat(k), self.ring)
        return self.ring.reduce_array(left - _sign(self.shift) * right)

    def is_chain_map(self) -> bool:
        degrees = set(self.source.degrees) | {k + 1 for k in self.source.degrees}
        return all(is_zero_array(self.chain_defect(k)) for k in degrees)

    def _check_compatible(self, other: "GradedMap") -> None:
        if (self.source, self.target, self.shift) != (other.source, other.target, other.shift):
            raise self.error("maps have different sources, targets or shifts")

    def _combine(self, other: "GradedMap", sign: int) -> "GradedMap":
        self._check_compatible(other)
        degrees = set(self._mats) | set(other._mats)
        mats = {k: self.ring.reduce_array(self.mat(k) + sign * other.mat(k)) for k in degrees}
        cls = ChainMap if isinstance(self, ChainMap) and isinstance(other, ChainMap) else GradedMap
        return cls(self.source, self.target, self.shift, mats)

    def __add__(self, other: "GradedMap") -> "GradedMap":
        return self._combine(other, 1)

    def __sub__(self, other: "GradedMap") -> "GradedMap":
        return self._combine(other, -1)

    def __neg__(self) -> "GradedMap":
        mats = {k: self.ring.reduce_array(-m.array) for k, m in self._mats.items()}
        return type(self)(self.source, self.target, self.shift, mats)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedMap):
            return NotImplemented
        return (self.source, self.target, self.shift) == (other.source, other.target, other.shift) \
            and self._mats == other._mats

    def __hash__(self) -> int:
        return hash((self.shift, tuple(sorted(self._mats.items()))))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(shift={self.shift}, degrees={sorted(self._mats)})"


class ChainMap(GradedMap):
    """Graded map satisfying f∘∂ = (-1)^shift ∂∘f, checked on construction."""

    def __init__(self, source: ChainComplex, target: ChainComplex, shift: int = 0,
                 mats: Optional[Mapping[int, object]] = None, check: bool = True):
        super().__init__(source, target, shift, mats)
        if check:
            degrees = sorted(set(source.degrees) | {k + 1 for k in source.degrees})
            for k in degrees:
                if not is_zero_array(self.chain_defect(k)):
                    raise InvalidChainMap("chain condition fails", {"degree": k, "shift": self.shift})


def identity_map(C: ChainComplex) -> ChainMap:
    return ChainMap(C, C, 0, {k: identity(C.rank(k)) for k in C.degrees}, check=False)


def zero_map(source: ChainComplex, target: ChainComplex, shift: int = 0) -> ChainMap:
    return ChainMap(source, target, shift, {}, check=False)


def compose(g: GradedMap, f: GradedMap) -> GradedMap:
    """g∘f; a ChainMap when both factors are."""
    if f.target != g.source:
        raise InvalidChainMap("cannot compose: target of the first map is not the source of the second")
    mats = {k: matmul(g.mat(k + f.shift), f.mat(k), f.ring) for k in f.source.degrees}
    if isinstance(f, ChainMap) and isinstance(g, ChainMap):
        return ChainMap(f.source, g.target, f.shift + g.shift, mats, check=False)
    return GradedMap(f.source, g.target, f.shift + g.shift, mats)


def shift_map(f: ChainMap, k: int) -> ChainMap:
    """The same matrices viewed as C[k] -> D[k]."""
    mats = {n - k: m for n, m in f.mats.items()}
    return ChainMap(shift(f.source, k), shift(f.target, k), f.shift, mats)


def induced_map(f: GradedMap, k: int) -> IntMatrix:
    """
    Matrix of f_* : H_k(source) -> H_(k+s)(target) on the chosen homology generators.

    Column j holds the target coordinates of the image of generator j; torsion
    coordinates are reduced modulo their invariant factors.
    """
    src = f.source.homology_presentation(k)
    tgt = f.target.homology_presentation(k + f.shift)
    images = matmul(f.mat(k), src.generators, f.ring)
    return IntMatrix(tgt.coordinate_matrix(images), tgt.num_generators, src.num_generators)


def induced_map_on_homology(f: GradedMap) -> Dict[int, IntMatrix]:
    return {k: induced_map(f, k) for k in f.source.degrees}


# ------------------------
# Tensor products
# ------------------------
def tensor_basis(C: ChainComplex, D: ChainComplex, n: int) -> List[Tuple[int, int, int]]:
    """Generators (i, a, b) of (C⊗D)_n: C-degree ascending, then a, then b."""
    return [(i, a, b) for i in C.degrees for a in range(C.rank(i)) for b in range(D.rank(n - i))]


def _tensor_offsets(C: ChainComplex, D: ChainComplex, n: int) -> Dict[int, int]:
    offsets, pos = {}, 0
    for i in C.degrees:
        offsets[i] = pos
        pos += C.rank(i) * D.rank(n - i)
    return offsets


def tensor(C: ChainComplex, D: ChainComplex) -> ChainComplex:
    """C⊗D with d(x⊗y) = dx⊗y + (-1)^|x| x⊗dy."""
    ring = require_same_ring(C, D)
    degrees = sorted({i + j for i in C.degrees for j in D.degrees})
    ranks = {n: len(tensor_basis(C, D, n)) for n in degrees}
    diffs = {}
    for n in degrees:
        rows, cols = _tensor_offsets(C, D, n - 1), _tensor_offsets(C, D, n)
        arr = zeros(ranks.get(n - 1, 0), ranks[n])
        for i in C.degrees:
            j = n - i
            width = C.rank(i) * D.rank(j)
            if not width:
                continue
            c0 = cols[i]
            if C.rank(i - 1) and D.rank(j):
                block = kron(C.d(i), identity(D.rank(j)))
                r0 = rows[i - 1]
                arr[r0:r0 + block.shape[0], c0:c0 + width] += block
            if D.rank(j - 1):
                block = _sign(i) * kron(identity(C.rank(i)), D.d(j))
                r0 = rows[i]
                arr[r0:r0 + block.shape[0], c0:c0 + width] += block
        diffs[n] = ring.reduce_array(arr)
    labels = {n: [f"{C.labels(i)[a]}⊗{D.labels(n - i)[b]}" for i, a, b in tensor_basis(C, D, n)]
              for n in degrees}
    logger.debug("tensor product with ranks %s", ranks)
    return ChainComplex(ranks, diffs, ring, labels)


def tensor_map(f: GradedMap, g: GradedMap) -> ChainMap:
    """
    f⊗g : C⊗D -> C'⊗D' of shift s+t, with (f⊗g)(x⊗y) = (-1)^(t|x|) f(x)⊗g(y)
    for f of shift s and g of shift t.
    """
    ring = require_same_ring(f, g)
    source, target = tensor(f.source, g.source), tensor(f.target, g.target)
    s, t = f.shift, g.shift
    mats = {}
    for n in source.degrees:
        rows, cols = _tensor_offsets(f.target, g.target, n + s + t), _tensor_offsets(f.source, g.source, n)
        arr = zeros(target.rank(n + s + t), source.rank(n))
        for i in f.source.degrees:
            j = n - i
            if not (f.target.rank(i + s) and g.target.rank(j + t) and g.source.rank(j)):
                continue
            block = _sign(t * i) * kron(f.mat(i), g.mat(j))
            r0, c0 = rows[i + s], cols[i]
            arr[r0:r0 + block.shape[0], c0:c0 + block.shape[1]] = block
        mats[n] = ring.reduce_array(arr)
    return ChainMap(source, target, s + t, mats)


@dataclass
class KunnethReport:
    ring: str
    rows: List[Dict[str, int]] = field(default_factory=list)  # degree, tensor_dim, expected_dim
    ok: bool = True

    def table(self) -> pd.DataFrame:
        return pd.DataFrame(self.rows, columns=["degree", "tensor_dim", "expected_dim"])


def kunneth_check(C: ChainComplex, D: ChainComplex) -> KunnethReport:
    """dim H_k(C⊗D) against Σ dim H_i(C)·dim H_j(D); fields only."""
    ring = require_same_ring(C, D)
    if not ring.is_field:
        raise BadParams("the Kunneth dimension check needs field coefficients")
    T = tensor(C, D)
    report = KunnethReport(ring.label)
    for n in sorted(set(T.degrees) | {i + j for i in C.degrees for j in D.degrees}):
        expected = sum(C.betti(i) * D.betti(n - i) for i in C.degrees)
        actual = T.betti(n)
        report.rows.append({"degree": n, "tensor_dim": actual, "expected_dim": expected})
        report.ok = report.ok and actual == expected
    return report


def _kunneth_embedding(C: ChainComplex, D: ChainComplex, T: ChainComplex, n: int) -> np.ndarray:
    """⊕_i H_i(C)⊗H_(n-i)(D) -> H_n(C⊗D) in homology coordinates, summands by ascending i."""
    offsets = _tensor_offsets(C, D, n)
    vectors = []
    for i in C.degrees:
        x_pres, y_pres = C.homology_presentation(i), D.homology_presentation(n - i)
        for a in range(x_pres.num_generators):
            for b in range(y_pres.num_generators):
                vec = np.zeros(T.rank(n), dtype=object)
                piece = kron(x_pres.generators[:, [a]], y_pres.generators[:, [b]])[:, 0]
                vec[offsets[i]:offsets[i] + piece.shape[0]] = piece
                vectors.append(vec)
    target = T.homology_presentation(n)
    if not vectors:
        return zeros(target.num_generators, 0)
    return target.coordinate_matrix(np.stack(vectors, axis=1))


def _kunneth_summand_map(f: GradedMap, g: GradedMap, n: int) -> np.ndarray:
    """Block matrix of ⊕ ±f_*⊗g_* between the Künneth summands of degrees n and n+s+t."""
    s, t = f.shift, g.shift
    src = [(i, f.source.betti(i) * g.source.betti(n - i)) for i in f.source.degrees]
    tgt = [(i, f.target.betti(i) * g.target.betti(n + s + t - i)) for i in f.target.degrees]
    arr = zeros(sum(w for _, w in tgt), sum(w for _, w in src))
    row_at = {i: sum(w for k, w in tgt if k < i) for i, _ in tgt}
    col = 0
    for i, width in src:
        if width and i + s in row_at:
            block = _sign(t * i) * kron(induced_map(f, i).array, induced_map(g, n - i).array)
            r0 = row_at[i + s]
            arr[r0:r0 + block.shape[0], col:col + width] = block
        col += width
    return arr


@dataclass
class NaturalityReport:
    ring: str
    degrees_checked: List[int] = field(default_factory=list)
    failures: List[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def kunneth_naturality(f: GradedMap, g: GradedMap) -> NaturalityReport:
    """
    Over a field, (f⊗g)_* agrees with ⊕ ±f_*⊗g_* under the Künneth
    isomorphisms of source and target. With f the identity this is the
    statement that an inclusion of parameter complexes acts as Id⊗ι_*.
    """
    ring = require_same_ring(f, g)
    if not ring.is_field:
        raise BadParams("Kunneth naturality is checked over field coefficients")
    fg = tensor_map(f, g)
    report = NaturalityReport(ring.label)
    for n in fg.source.degrees:
        m = n + fg.shift
        left = matmul(induced_map(fg, n).array, _kunneth_embedding(f.source, g.source, fg.source, n), ring)
        right = matmul(_kunneth_embedding(f.target, g.target, fg.target, m), _kunneth_summand_map(f, g, n), ring)
        report.degrees_checked.append(n)
        if left.shape != right.shape or not is_zero_array(ring.reduce_array(left - right)):
            report.failures.append(n)
    logger.debug("Kunneth naturality over %d degrees, failures %s", len(report.degrees_checked), report.failures)
    return report


# ------------------------
# Cellular models
# ------------------------
def point_complex(ring: Ring = ZZ) -> ChainComplex:
    return ChainComplex({0: 1}, {}, ring, {0: ["pt"]})


def sphere_complex(n: int, ring: Ring = ZZ) -> ChainComplex:
    """Minimal cell structure of S^n; S^0 is two points."""
    if n < 0:
        raise BadParams(f"sphere dimension must be nonnegative, got {n}")
    if n == 0:
        return ChainComplex({0: 2}, {}, ring, {0: ["pt+", "pt-"]})
    return ChainComplex({0: 1, n: 1}, {}, ring, {0: ["e0"], n: [f"e{n}"]})


def circle_complex(ring: Ring = ZZ) -> ChainComplex:
    return sphere_complex(1, ring)


def rp2_complex(ring: Ring = ZZ) -> ChainComplex:
    return ChainComplex({0: 1, 1: 1, 2: 1}, {2: [[2]]}, ring, {0: ["e0"], 1: ["e1"], 2: ["e2"]})


def cpn_complex(N: int, ring: Ring = ZZ) -> ChainComplex:
    """One cell in each even degree 0..2N, zero differentials."""
    if N < 0:
        raise BadParams(f"CP^N level must be nonnegative, got {N}")
    return ChainComplex({2 * m: 1 for m in range(N + 1)}, {}, ring, {2 * m: [f"u{m}"] for m in range(N + 1)})
