"""
Exact linear algebra over ℤ, ℚ and ℤ/p.

Matrices are numpy arrays with ``dtype=object`` so that entries stay Python
ints (arbitrary precision) or Fractions. Everything downstream (homology,
connecting maps, spectral pages) reduces to three routines here:

- ``_column_echelon``: column Hermite form H = M·T with T invertible,
- ``_smith``: Smith form S = U·M·V with U, V invertible (and U⁻¹ tracked),
- ``Subquotient``: a presentation of span(N)/span(D) with chosen generators.

Lattices are always replaced by their canonical Hermite basis before use, so
generator choices depend only on the lattices involved.
"""
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sympy import Matrix as SympyMatrix
from sympy import factorint

from gysin.errors import BadParams, InvalidMatrix, NotASublattice
from gysin.rings import ZZ, Ring

logger = logging.getLogger(__name__)


# ------------------------
# Raw object-array helpers
# ------------------------
def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=object)


def identity(n: int) -> np.ndarray:
    arr = zeros(n, n)
    for i in range(n):
        arr[i, i] = 1
    return arr


def to_array(data, rows: Optional[int] = None, cols: Optional[int] = None) -> np.ndarray:
    """Writable 2-D object-array copy of an IntMatrix, ndarray or nested list."""
    if isinstance(data, IntMatrix):
        arr = data.array.copy()
    elif isinstance(data, np.ndarray):
        arr = data.astype(object)
        if arr.ndim == 1:
            arr = arr.reshape(-1, 1)
    else:
        rows_list = list(data)
        if not rows_list:
            arr = zeros(rows or 0, cols or 0)
        else:
            arr = np.array([list(row) for row in rows_list], dtype=object)
            if arr.ndim != 2:
                arr = arr.reshape(len(rows_list), -1)
    if rows is not None and arr.shape[0] != rows or cols is not None and arr.shape[1] != cols:
        if arr.size == 0 and rows is not None and cols is not None:
            return zeros(rows, cols)
        raise InvalidMatrix(f"expected shape ({rows}, {cols}), got {arr.shape}")
    return arr


def to_vector(data, ring: Ring = ZZ) -> np.ndarray:
    vec = np.array([ring.coerce(x) for x in np.asarray(data, dtype=object).ravel()], dtype=object)
    return vec


def coerce_array(arr: np.ndarray, ring: Ring) -> np.ndarray:
    """Entrywise ring coercion, keeping the shape (including empty shapes)."""
    out = np.empty(arr.shape, dtype=object)
    for index, value in np.ndenumerate(arr):
        out[index] = ring.coerce(value)
    return out


def matmul(a: np.ndarray, b: np.ndarray, ring: Ring = ZZ) -> np.ndarray:
    """Product of object arrays; empty inner dimensions give exact zeros."""
    if a.ndim == 1:
        a = a.reshape(1, -1)
        return matmul(a, b, ring).reshape(-1)
    if b.ndim == 1:
        return matmul(a, b.reshape(-1, 1), ring).reshape(-1)
    if a.shape[1] != b.shape[0]:
        raise InvalidMatrix(f"cannot multiply {a.shape} by {b.shape}")
    if a.shape[1] == 0 or a.shape[0] == 0 or b.shape[1] == 0:
        return zeros(a.shape[0], b.shape[1])
    return ring.reduce_array(np.asarray(a.dot(b), dtype=object))


def hstack(blocks: Sequence[np.ndarray], rows: int) -> np.ndarray:
    parts = [b for b in blocks if b.shape[1]]
    if not parts:
        return zeros(rows, 0)
    return np.concatenate(parts, axis=1)


def is_zero_array(arr: np.ndarray) -> bool:
    return not arr.size or not any(x != 0 for x in arr.flat)


# ------------------------
# IntMatrix
# ------------------------
class IntMatrix:
    """
    Immutable exact matrix.

    Entries are ring elements: Python ints for ℤ and ℤ/p, Fractions only in
    internal ℚ results. Sparse input is given as (row, col, value) triples.
    """
    __slots__ = ("_data",)

    def __init__(self, data=(), rows: Optional[int] = None, cols: Optional[int] = None):
        arr = to_array(data, rows, cols)
        arr.flags.writeable = False
        self._data = arr

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(zeros(rows, cols))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls(identity(n))

    @classmethod
    def from_triples(cls, rows: int, cols: int, triples: Iterable[Sequence[int]]) -> "IntMatrix":
        if rows < 0 or cols < 0:
            raise InvalidMatrix(f"negative shape ({rows}, {cols})")
        arr = zeros(rows, cols)
        seen = set()
        for triple in triples:
            if len(triple) != 3:
                raise InvalidMatrix(f"entry {triple!r} is not a (row, col, value) triple")
            i, j, value = int(triple[0]), int(triple[1]), triple[2]
            if not (0 <= i < rows and 0 <= j < cols):
                raise InvalidMatrix("entry index out of bounds", {"row": i, "col": j, "shape": (rows, cols)})
            if (i, j) in seen:
                raise InvalidMatrix("duplicate entry", {"row": i, "col": j})
            seen.add((i, j))
            arr[i, j] = value
        return cls(arr)

    def to_triples(self) -> List[Tuple[int, int, object]]:
        """Nonzero entries in row-major order."""
        rows, cols = self.shape
        return [(i, j, self._data[i, j]) for i in range(rows) for j in range(cols) if self._data[i, j] != 0]

    @property
    def array(self) -> np.ndarray:
        return self._data

    @property
    def shape(self) -> Tuple[int, int]:
        return self._data.shape

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    def entry(self, i: int, j: int):
        return self._data[i, j]

    def to_rows(self) -> List[List[object]]:
        return [list(row) for row in self._data]

    def is_zero(self) -> bool:
        return is_zero_array(self._data)

    def reduce(self, ring: Ring) -> "IntMatrix":
        return IntMatrix(coerce_array(self._data, ring))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "IntMatrix":
        idx = np.ix_(np.asarray(rows, dtype=int), np.asarray(cols, dtype=int))
        return IntMatrix(self._data[idx], len(rows), len(cols))

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(self._data.T.copy())

    def scale(self, k) -> "IntMatrix":
        return IntMatrix(self._data * k)

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        return IntMatrix(matmul(self._data, other.array))

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise InvalidMatrix(f"shape mismatch {self.shape} vs {other.shape}")
        return IntMatrix(self._data + other.array)

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        if self.shape != other.shape:
            raise InvalidMatrix(f"shape mismatch {self.shape} vs {other.shape}")
        return IntMatrix(self._data - other.array)

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(-self._data)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntMatrix):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self._data, other.array))

    def __hash__(self) -> int:
        return hash((self.shape, tuple(self.to_triples())))

    def __repr__(self) -> str:
        return f"IntMatrix({self.to_rows()!r}, rows={self.rows}, cols={self.cols})"

    @staticmethod
    def block(blocks: Sequence[Sequence["IntMatrix"]]) -> "IntMatrix":
        """Assemble a block matrix; every block row must share heights, every block column widths."""
        heights = [row[0].rows for row in blocks]
        widths = [m.cols for m in blocks[0]] if blocks else []
        arr = zeros(sum(heights), sum(widths))
        r0 = 0
        for bi, row in enumerate(blocks):
            c0 = 0
            for bj, m in enumerate(row):
                if m.shape != (heights[bi], widths[bj]):
                    raise InvalidMatrix("inconsistent block shapes", {"block": (bi, bj)})
                arr[r0:r0 + m.rows, c0:c0 + m.cols] = m.array
                c0 += m.cols
            r0 += heights[bi]
        return IntMatrix(arr)


# ------------------------
# Finitely generated abelian groups
# ------------------------
@dataclass(frozen=True)
class FGAbelianGroup:
    """ℤ^free_rank ⊕ ℤ/d₁ ⊕ … with d₁ | d₂ | … and every dᵢ ≥ 2."""
    free_rank: int = 0
    torsion: Tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free_rank < 0:
            raise BadParams(f"negative free rank {self.free_rank}")
        for i, d in enumerate(self.torsion):
            if d < 2:
                raise BadParams(f"invariant factor {d} must be at least 2")
            if i and d % self.torsion[i - 1]:
                raise BadParams(f"invariant factors {self.torsion} do not form a divisibility chain")

    @classmethod
    def from_orders(cls, free_rank: int, orders: Iterable[int]) -> "FGAbelianGroup":
        """Normalize an arbitrary list of cyclic orders to invariant factors."""
        by_prime = {}
        for order in orders:
            order = abs(int(order))
            if order == 0:
                free_rank += 1
                continue
            for prime, exp in factorint(order).items():
                by_prime.setdefault(prime, []).append(prime ** exp)
        length = max((len(v) for v in by_prime.values()), default=0)
        factors = [1] * length
        for powers in by_prime.values():
            powers.sort(reverse=True)
            for i, q in enumerate(powers):
                factors[length - 1 - i] *= q
        return cls(free_rank, tuple(d for d in factors if d > 1))

    @classmethod
    def direct_sum(cls, groups: Iterable["FGAbelianGroup"]) -> "FGAbelianGroup":
        groups = list(groups)
        return cls.from_orders(sum(g.free_rank for g in groups), [d for g in groups for d in g.torsion])

    def elementary_divisors(self) -> List[int]:
        out = []
        for d in self.torsion:
            out.extend(p ** e for p, e in factorint(d).items())
        return sorted(out)

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    @property
    def order(self) -> Optional[int]:
        """Cardinality, or None when infinite."""
        if self.free_rank:
            return None
        return int(np.prod(self.torsion, dtype=object)) if self.torsion else 1

    @property
    def num_generators(self) -> int:
        return self.free_rank + len(self.torsion)

    def __str__(self) -> str:
        parts = [f"Z/{d}" for d in self.torsion]
        if self.free_rank == 1:
            parts.insert(0, "Z")
        elif self.free_rank > 1:
            parts.insert(0, f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"


# ------------------------
# Elimination
# ------------------------
def _gcd_step(a, b, ring: Ring):
    """Coefficients (s, t, a/g, b/g) of the 2x2 unimodular combination clearing b against a."""
    if a != 0 and ring.divides(a, b):
        return ring.coerce(1), ring.coerce(0), ring.coerce(1), ring.exact_quotient(b, a)
    s, t, g = ring.gcdex(a, b)
    return s, t, ring.exact_quotient(a, g), ring.exact_quotient(b, g)


def _combine_columns(mats: Sequence[np.ndarray], c: int, j: int, a, b, ring: Ring) -> None:
    """col_c <- s*col_c + t*col_j ; col_j <- -(b/g)*col_c + (a/g)*col_j, applied to every matrix."""
    s, t, ag, bg = _gcd_step(a, b, ring)
    for m in mats:
        cc, cj = m[:, c].copy(), m[:, j].copy()
        m[:, c] = ring.reduce_array(s * cc + t * cj)
        m[:, j] = ring.reduce_array(-bg * cc + ag * cj)


def _combine_rows(S: np.ndarray, U: np.ndarray, Uinv: np.ndarray, k: int, i: int, col: int, ring: Ring) -> None:
    s, t, ag, bg = _gcd_step(S[k, col], S[i, col], ring)
    for m in (S, U):
        rk, ri = m[k, :].copy(), m[i, :].copy()
        m[k, :] = ring.reduce_array(s * rk + t * ri)
        m[i, :] = ring.reduce_array(-bg * rk + ag * ri)
    ck, ci = Uinv[:, k].copy(), Uinv[:, i].copy()
    Uinv[:, k] = ring.reduce_array(ag * ck + bg * ci)
    Uinv[:, i] = ring.reduce_array(-t * ck + s * ci)


def _column_echelon(M, ring: Ring = ZZ) -> Tuple[np.ndarray, np.ndarray, List[int]]:
    """
    Column Hermite form.

    Returns (H, T, pivots) with H = M·T, T invertible over the ring. Column j
    of H (j < rank) has its first nonzero entry at row pivots[j], pivots
    strictly increase, pivot entries are canonical and entries to the left of
    a pivot are reduced modulo it. Columns from rank on are zero, so the
    matching columns of T span the kernel.
    """
    H = ring.reduce_array(to_array(M))
    m, n = H.shape
    T = identity(n)
    pivots: List[int] = []
    c = 0
    for i in range(m):
        if c == n:
            break
        for j in range(c + 1, n):
            if H[i, j] != 0:
                _combine_columns((H, T), c, j, H[i, c], H[i, j], ring)
        pivot = H[i, c]
        if pivot == 0:
            continue
        u = ring.canonical_unit(pivot)
        if u != 1:
            H[:, c] = ring.reduce_array(H[:, c] * u)
            T[:, c] = ring.reduce_array(T[:, c] * u)
            pivot = H[i, c]
        for l in range(c):
            q = ring.floor_quotient(H[i, l], pivot)
            if q != 0:
                H[:, l] = ring.reduce_array(H[:, l] - q * H[:, c])
                T[:, l] = ring.reduce_array(T[:, l] - q * T[:, c])
        pivots.append(i)
        c += 1
    return H, T, pivots


def _smallest_pivot(S: np.ndarray, k: int, ring: Ring) -> Optional[Tuple[int, int]]:
    best = None
    m, n = S.shape
    for i in range(k, m):
        for j in range(k, n):
            if S[i, j] != 0:
                key = (ring.size(S[i, j]), i, j)
                if best is None or key < best:
                    best = key
    return None if best is None else (best[1], best[2])


def _smith(M, ring: Ring = ZZ) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Returns (S, U, Uinv, V) with S = U·M·V diagonal, dᵢ | dᵢ₊₁, canonical associates."""
    S = ring.reduce_array(to_array(M))
    m, n = S.shape
    U, Uinv, V = identity(m), identity(m), identity(n)
    r = min(m, n)
    for k in range(r):
        pivot = _smallest_pivot(S, k, ring)
        if pivot is None:
            break
        while pivot is not None:
            i, j = pivot
            if i != k:
                S[[k, i], :] = S[[i, k], :]
                U[[k, i], :] = U[[i, k], :]
                Uinv[:, [k, i]] = Uinv[:, [i, k]]
            if j != k:
                S[:, [k, j]] = S[:, [j, k]]
                V[:, [k, j]] = V[:, [j, k]]
            for i2 in range(k + 1, m):
                if S[i2, k] != 0:
                    _combine_rows(S, U, Uinv, k, i2, k, ring)
            for j2 in range(k + 1, n):
                if S[k, j2] != 0:
                    _combine_columns((S, V), k, j2, S[k, k], S[k, j2], ring)
            if all(S[i2, k] == 0 for i2 in range(k + 1, m)):
                pivot = None
            else:
                pivot = (k, k)

    # divisibility fix-up: replace (a, b) by (gcd, lcm) pairwise
    for i in range(r):
        for j in range(i + 1, r):
            a, b = S[i, i], S[j, j]
            if ring.divides(a, b):
                continue
            s, t, g = ring.gcdex(a, b)
            ag, bg = ring.exact_quotient(a, g), ring.exact_quotient(b, g)
            ri, rj = U[i, :].copy(), U[j, :].copy()
            U[i, :] = ring.reduce_array(s * ri + t * rj)
            U[j, :] = ring.reduce_array(-bg * ri + ag * rj)
            ci, cj = Uinv[:, i].copy(), Uinv[:, j].copy()
            Uinv[:, i] = ring.reduce_array(ag * ci + bg * cj)
            Uinv[:, j] = ring.reduce_array(-t * ci + s * cj)
            vi, vj = V[:, i].copy(), V[:, j].copy()
            V[:, i] = ring.reduce_array(vi + vj)
            V[:, j] = ring.reduce_array(-t * bg * vi + s * ag * vj)
            S[i, i] = g
            S[j, j] = ring.reduce(a * bg)

    for i in range(r):
        u = ring.canonical_unit(S[i, i])
        if u != 1:
            S[i, i] = ring.reduce(S[i, i] * u)
            U[i, :] = ring.reduce_array(U[i, :] * u)
            Uinv[:, i] = ring.reduce_array(Uinv[:, i] * ring.inverse(u))
    return S, U, Uinv, V


# ------------------------
# Lattices (submodules of R^n)
# ------------------------
class Lattice:
    """Submodule of R^ambient stored by its canonical column Hermite basis."""
    __slots__ = ("ring", "ambient", "basis", "pivots")

    def __init__(self, basis: np.ndarray, pivots: Sequence[int], ring: Ring):
        self.ring = ring
        self.ambient = basis.shape[0]
        self.basis = basis
        self.pivots = list(pivots)

    @classmethod
    def span(cls, generators, ring: Ring = ZZ, ambient: Optional[int] = None) -> "Lattice":
        arr = to_array(generators)
        if arr.size == 0 and ambient is not None:
            arr = zeros(ambient, 0)
        H, _, pivots = _column_echelon(arr, ring)
        return cls(H[:, :len(pivots)].copy(), pivots, ring)

    @classmethod
    def full(cls, n: int, ring: Ring = ZZ) -> "Lattice":
        return cls(identity(n), list(range(n)), ring)

    @classmethod
    def zero(cls, n: int, ring: Ring = ZZ) -> "Lattice":
        return cls(zeros(n, 0), [], ring)

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def coordinates(self, v) -> Optional[np.ndarray]:
        """Coefficients x with basis·x = v, or None when v is not in the lattice."""
        ring = self.ring
        v = to_vector(v, ring)
        if v.shape[0] != self.ambient:
            raise InvalidMatrix(f"vector of length {v.shape[0]} in ambient dimension {self.ambient}")
        x = np.zeros(self.rank, dtype=object)
        for j, row in enumerate(self.pivots):
            value = v[row]
            for l in range(j):
                value -= self.basis[row, l] * x[l]
            value = ring.reduce(value)
            pivot = self.basis[row, j]
            if not ring.divides(pivot, value):
                return None
            x[j] = ring.exact_quotient(value, pivot)
        residual = ring.reduce_array(v - matmul(self.basis, x, ring))
        if not is_zero_array(residual):
            return None
        return x

    def contains(self, v) -> bool:
        return self.coordinates(v) is not None

    def contains_lattice(self, other: "Lattice") -> bool:
        return all(self.contains(other.basis[:, j]) for j in range(other.rank))

    def __add__(self, other: "Lattice") -> "Lattice":
        return Lattice.span(hstack([self.basis, other.basis], self.ambient), self.ring, self.ambient)

    def intersect(self, other: "Lattice") -> "Lattice":
        return intersect(self, other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Lattice):
            return NotImplemented
        return (self.ring == other.ring and self.ambient == other.ambient
                and self.pivots == other.pivots and bool(np.array_equal(self.basis, other.basis)))

    def __hash__(self) -> int:
        return hash((self.ambient, tuple(self.pivots), tuple(self.basis.flat)))

    def as_matrix(self) -> IntMatrix:
        return IntMatrix(self.basis)


def _kernel(arr: np.ndarray, ring: Ring) -> np.ndarray:
    H, T, pivots = _column_echelon(arr, ring)
    K = T[:, len(pivots):]
    return Lattice.span(K, ring, arr.shape[1]).basis


def hermite_basis(G, ring: Ring = ZZ) -> IntMatrix:
    """Canonical column Hermite basis of the span of the columns of G."""
    return Lattice.span(G, ring).as_matrix()


def kernel_basis(M, ring: Ring = ZZ) -> IntMatrix:
    return IntMatrix(_kernel(to_array(M), ring))


def image_basis(M, ring: Ring = ZZ) -> IntMatrix:
    return hermite_basis(M, ring)


def rank(M, ring: Ring = ZZ) -> int:
    return len(_column_echelon(M, ring)[2])


def solve(M, v, ring: Ring = ZZ) -> Optional[np.ndarray]:
    """One solution x of M·x = v over the ring, or None."""
    H, T, pivots = _column_echelon(M, ring)
    lattice = Lattice(H[:, :len(pivots)], pivots, ring)
    y = lattice.coordinates(v)
    if y is None:
        return None
    return matmul(T[:, :len(pivots)], y, ring)


def inverse(M, ring: Ring = ZZ) -> np.ndarray:
    """Inverse of a square matrix that is invertible over the ring."""
    arr = to_array(M)
    n = arr.shape[0]
    if arr.shape != (n, n):
        raise BadParams(f"cannot invert a {arr.shape} matrix")
    H, T, pivots = _column_echelon(arr, ring)
    if len(pivots) != n or not np.array_equal(H, identity(n)):
        raise BadParams("matrix is not invertible over " + ring.label)
    return T


def intersect(first: Lattice, second: Lattice) -> Lattice:
    ring = first.ring
    stacked = hstack([first.basis, -second.basis], first.ambient)
    K = _kernel(stacked, ring)
    return Lattice.span(matmul(first.basis, K[:first.rank, :], ring), ring, first.ambient)


def lattice_equal(first: Lattice, second: Lattice) -> bool:
    return first == second


def preimage(M, target: Lattice) -> Lattice:
    """{x : M·x ∈ target} as a lattice in the source."""
    ring = target.ring
    arr = to_array(M)
    n = arr.shape[1]
    stacked = hstack([arr, -target.basis], arr.shape[0])
    K = _kernel(stacked, ring)
    return Lattice.span(K[:n, :], ring, n)


def determinant(M) -> int:
    arr = to_array(M)
    if arr.shape[0] == 0:
        return 1
    return SympyMatrix(arr.tolist()).det()


# ------------------------
# Normal forms and subquotients
# ------------------------
def snf(M, ring: Ring = ZZ) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """
    Smith normal form.

    Returns (S, U, V) with S = U·M·V, S diagonal with dᵢ | dᵢ₊₁ and dᵢ ≥ 0,
    and U, V invertible over the ring (determinant ±1 over ℤ).

    >>> S, U, V = snf([[2, 4], [6, 8]])
    >>> [S.entry(0, 0), S.entry(1, 1)]
    [2, 4]
    """
    S, U, _, V = _smith(M, ring)
    logger.debug("snf of %s matrix over %s", S.shape, ring)
    return IntMatrix(S), IntMatrix(U), IntMatrix(V)


class Subquotient:
    """
    Presentation of span(numerator) / span(denominator).

    ``generators`` holds one ambient representative per nontrivial cyclic
    summand (torsion summands first, in invariant-factor order, then free
    ones); ``moduli`` holds the matching orders, 0 for free summands.
    ``coordinates(v)`` expresses a numerator element in these generators,
    torsion coordinates reduced to their canonical residue.
    """

    def __init__(self, numerator, denominator, ring: Ring = ZZ, ambient: Optional[int] = None):
        self.ring = ring
        if isinstance(numerator, Lattice):
            self.numerator = numerator
        else:
            self.numerator = Lattice.span(numerator, ring, ambient)
        n = self.numerator.ambient
        den = denominator if isinstance(denominator, Lattice) else Lattice.span(denominator, ring, n)
        self.denominator = den
        z = self.numerator.rank
        relations = zeros(z, den.rank)
        for j in range(den.rank):
            x = self.numerator.coordinates(den.basis[:, j])
            if x is None:
                raise NotASublattice("denominator column is not in the numerator lattice", {"column": j})
            relations[:, j] = x
        S, U, Uinv, _ = _smith(relations, ring)
        diagonal = [S[i, i] if i < min(z, den.rank) else 0 for i in range(z)]
        keep = [i for i in range(z) if not ring.is_unit(diagonal[i])]
        self.moduli: Tuple = tuple(diagonal[i] for i in keep)
        self._coordinate_rows = U[keep, :] if keep else zeros(0, z)
        self.generators = matmul(self.numerator.basis, Uinv[:, keep] if keep else zeros(z, 0), ring)
        torsion = tuple(int(d) for d in self.moduli if d != 0)
        self.group = FGAbelianGroup(len(self.moduli) - len(torsion), torsion)

    @property
    def ambient(self) -> int:
        return self.numerator.ambient

    @property
    def num_generators(self) -> int:
        return len(self.moduli)

    def generator(self, j: int) -> np.ndarray:
        return self.generators[:, j]

    def reduce_coordinates(self, coords: np.ndarray) -> np.ndarray:
        out = self.ring.reduce_array(np.array(coords, dtype=object))
        for i, d in enumerate(self.moduli):
            if d != 0:
                if out.ndim == 1:
                    out[i] = self.ring.residue(out[i], d)
                else:
                    out[i, :] = [self.ring.residue(x, d) for x in out[i, :]]
        return out

    def coordinates(self, v) -> np.ndarray:
        x = self.numerator.coordinates(v)
        if x is None:
            raise NotASublattice("element is not in the numerator lattice")
        return self.reduce_coordinates(matmul(self._coordinate_rows, x, self.ring))

    def coordinate_matrix(self, vectors: np.ndarray) -> np.ndarray:
        """Coordinates of every column of ``vectors`` (ambient × k) as a g × k array."""
        out = zeros(self.num_generators, vectors.shape[1])
        for j in range(vectors.shape[1]):
            out[:, j] = self.coordinates(vectors[:, j])
        return out

    def relation_matrix(self) -> np.ndarray:
        """Columns dᵢ·eᵢ for the torsion summands, in coordinate space."""
        torsion = [i for i, d in enumerate(self.moduli) if d != 0]
        rel = zeros(self.num_generators, len(torsion))
        for col, i in enumerate(torsion):
            rel[i, col] = self.moduli[i]
        return rel

    def is_zero_class(self, v) -> bool:
        return is_zero_array(self.coordinates(v))


def subquotient(L_num, L_den, ring: Ring = ZZ) -> FGAbelianGroup:
    """
    Isomorphism type of span(L_num)/span(L_den).

    >>> str(subquotient([[1, 0], [0, 1]], [[2, 0], [0, 3]]))
    'Z/6'
    """
    num = coerce_array(to_array(L_num), ring)
    den = coerce_array(to_array(L_den), ring)
    if den.size == 0:
        den = zeros(num.shape[0], 0)
    return Subquotient(num, den, ring, ambient=num.shape[0]).group


def coordinate_lattice(moduli: Sequence, ring: Ring) -> Lattice:
    """Relations of ℤ^g modelled on a group with the given moduli (0 for free)."""
    g = len(moduli)
    torsion = [i for i, d in enumerate(moduli) if d != 0]
    rel = zeros(g, len(torsion))
    for col, i in enumerate(torsion):
        rel[i, col] = moduli[i]
    return Lattice.span(rel, ring, g)
