"""
Fixed example corpus and seeded random instances.

Random objects are assembled from elementary pieces (pairs x -> c·y between
adjacent degrees) and then conjugated degreewise by unit upper-triangular
integer matrices that respect a poset of generator classes. d² = 0, chain
conditions and filtrations therefore hold by construction. The PRNG is
numpy's ``default_rng(seed)`` (PCG64), so a given spec is bit-reproducible.
"""
import logging
import re
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

import numpy as np

from gysin.complexes import ChainComplex, ChainMap, GradedMap, circle_complex, cpn_complex, point_complex, \
    rp2_complex, shift, sphere_complex
from gysin.config import DEFAULT_CONFIG
from gysin.cones import SESMorphism, ShortExactSequence
from gysin.equivariant import ActionSign, MorseBottS1Datum, Orbit, borel_two_line, trivial_action_datum
from gysin.errors import BadParams
from gysin.exactlin import IntMatrix, identity, inverse, matmul, zeros
from gysin.rings import ZZ, Ring
from gysin.spectra import FilteredComplex, FilteredMap, TwoLineComplex, _take

logger = logging.getLogger(__name__)

Poset = Dict[int, Set[int]]  # class -> classes at or below it


# ------------------------
# Spec
# ------------------------
@dataclass(frozen=True)
class ExampleSpec:
    name: str
    params: Tuple[int, ...] = ()
    inner: Optional["ExampleSpec"] = None  # trivial_borel only

    @classmethod
    def parse(cls, text: str) -> "ExampleSpec":
        """'cpn(2)', 'hopf', 'random_complex(7, 10)', 'trivial_borel(rp2, 2)'."""
        match = re.fullmatch(r"\s*(\w+)\s*(?:\((.*)\))?\s*", text)
        if not match:
            raise BadParams(f"cannot parse example spec {text!r}")
        name, body = match.group(1), match.group(2)
        if name not in GENERATORS:
            raise BadParams(f"unknown example {name!r}", {"known": ", ".join(sorted(GENERATORS))})
        args = _split_args(body) if body and body.strip() else []
        inner = None
        if name == "trivial_borel" and args:
            inner = cls.parse(args.pop(0))
        try:
            params = tuple(int(a) for a in args)
        except ValueError:
            raise BadParams(f"example parameters must be integers: {text!r}")
        return cls(name, params, inner)

    def __str__(self) -> str:
        args = ([str(self.inner)] if self.inner else []) + [str(p) for p in self.params]
        return f"{self.name}({', '.join(args)})" if args else self.name


def _split_args(body: str) -> List[str]:
    out, depth, current = [], 0, ""
    for ch in body:
        if ch == "," and depth == 0:
            out.append(current.strip())
            current = ""
            continue
        depth += (ch == "(") - (ch == ")")
        current += ch
    out.append(current.strip())
    return [a for a in out if a]


def _param(spec: ExampleSpec, i: int, default: int) -> int:
    return spec.params[i] if len(spec.params) > i else default


def _random_params(spec: ExampleSpec, config: Dict) -> Tuple[int, int]:
    seed = _param(spec, 0, 0)
    size = _param(spec, 1, config.get("default_random_size", 8))
    if seed < 0:
        raise BadParams(f"seed must be nonnegative, got {seed}")
    if not 1 <= size <= config.get("max_random_size", 24):
        raise BadParams(f"size must be in 1..{config.get('max_random_size', 24)}, got {size}")
    return seed, size


# ------------------------
# Elementary pieces and conjugation
# ------------------------
@dataclass
class _Pieces:
    ranks: Dict[int, int] = field(default_factory=dict)
    diffs: Dict[int, np.ndarray] = field(default_factory=dict)
    classes: Dict[int, List[int]] = field(default_factory=dict)


def _total_order(n: int) -> Poset:
    return {c: set(range(c + 1)) for c in range(n)}


def _conjugator(rng: np.random.Generator, classes: List[int], poset: Poset, density: float) -> np.ndarray:
    n = len(classes)
    P = identity(n)
    for i in range(n):
        for j in range(i + 1, n):
            if classes[i] in poset[classes[j]] and rng.random() < density:
                P[i, j] = int(rng.choice([-1, 1]))
    return P


def _pieces(rng: np.random.Generator, size: int, poset: Poset, config: Dict, strict: bool = False) -> _Pieces:
    """
    ``size`` generators spread over degrees, classes drawn from the poset; the
    differential only maps a class to classes below it (strictly below when
    ``strict``).
    """
    span = config.get("degree_span", 4)
    coefficients = config.get("coefficients", [1, -1])
    order = sorted(poset, key=lambda c: (len(poset[c]), c))
    gens = sorted(zip(rng.integers(0, span, size).tolist(), rng.choice(order, size).tolist()),
                  key=lambda g: (g[0], order.index(g[1])))
    out = _Pieces()
    for k, c in gens:
        out.classes.setdefault(k, []).append(c)
    out.ranks = {k: len(v) for k, v in out.classes.items()}
    for k in out.ranks:
        out.diffs[k] = zeros(out.ranks.get(k - 1, 0), out.ranks[k])
    paired: Set[Tuple[int, int]] = set()
    for k in sorted(out.classes):
        for x, cx in enumerate(out.classes[k]):
            if (k, x) in paired or rng.random() >= config.get("pair_probability", 0.6):
                continue
            below = poset[cx] - ({cx} if strict else set())
            candidates = [y for y, cy in enumerate(out.classes.get(k - 1, []))
                          if (k - 1, y) not in paired and cy in below]
            if not candidates:
                continue
            y = candidates[int(rng.integers(len(candidates)))]
            out.diffs[k][y, x] = int(rng.choice(coefficients))
            paired.update({(k, x), (k - 1, y)})
    bound = config.get("entry_bound", 3)
    for _ in range(config.get("conjugation_attempts", 8)):
        P = {k: _conjugator(rng, out.classes[k], poset, config.get("conjugation_density", 0.3)) for k in out.ranks}
        conjugated = {}
        for k, d in out.diffs.items():
            left = P.get(k - 1, identity(0))
            conjugated[k] = matmul(matmul(left, d), inverse(P[k])) if d.size else d
        if all(not m.size or max(abs(int(x)) for x in m.flat) <= bound for m in conjugated.values()):
            out.diffs = conjugated
            break
    return out


def _complex(pieces: _Pieces, ring: Ring, members: Optional[Set[int]] = None) -> Tuple[ChainComplex, Dict[int, List[int]]]:
    """The part spanned by generators whose class lies in ``members`` (all when None)."""
    index = {k: [i for i, c in enumerate(cs) if members is None or c in members] for k, cs in pieces.classes.items()}
    ranks = {k: len(v) for k, v in index.items()}
    diffs = {k: _take(d, index.get(k - 1, []), index[k]) for k, d in pieces.diffs.items()}
    classes = {k: [pieces.classes[k][i] for i in v] for k, v in index.items()}
    return ChainComplex(ranks, diffs, ring), classes


def _block(pieces: _Pieces, rows: Set[int], cols: Set[int]) -> Dict[int, np.ndarray]:
    """Differential components from ``cols`` classes in degree k to ``rows`` classes in degree k-1."""
    out = {}
    for k, d in pieces.diffs.items():
        r = [i for i, c in enumerate(pieces.classes.get(k - 1, [])) if c in rows]
        c_ = [i for i, c in enumerate(pieces.classes[k]) if c in cols]
        out[k] = _take(d, r, c_)
    return out


def _rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(seed)


# ------------------------
# Random generators
# ------------------------
def random_complex(seed: int, size: int, ring: Ring = ZZ, config: Optional[Dict] = None) -> ChainComplex:
    config = config or DEFAULT_CONFIG
    C, _ = _complex(_pieces(_rng(seed), size, _total_order(1), config), ring)
    logger.debug("random complex seed=%d size=%d ranks=%s", seed, size, C.ranks)
    return C


def random_filtered(seed: int, size: int, ring: Ring = ZZ, config: Optional[Dict] = None,
                    strict: bool = False) -> FilteredComplex:
    config = config or DEFAULT_CONFIG
    pieces = _pieces(_rng(seed), size, _total_order(config.get("filtration_length", 4)), config, strict)
    C, classes = _complex(pieces, ring)
    return FilteredComplex(C, classes)


def _two_part(seed: int, size: int, ring: Ring, config: Dict) -> Tuple[ChainComplex, ChainComplex, Dict[int, np.ndarray]]:
    """A filtered complex with a sub part L (class 0) and quotient Q (class 1), split apart."""
    pieces = _pieces(_rng(seed), 2 * size, _total_order(2), config)
    L, _ = _complex(pieces, ring, {0})
    Q, _ = _complex(pieces, ring, {1})
    return L, Q, _block(pieces, {0}, {1})


def random_chain_map(seed: int, size: int, ring: Ring = ZZ, config: Optional[Dict] = None) -> ChainMap:
    """f : Q -> L[-1] read off a two-part complex, whose cone is that complex."""
    L, Q, g = _two_part(seed, size, ring, config or DEFAULT_CONFIG)
    return ChainMap(Q, shift(L, -1), 0, g)


def random_two_line(seed: int, size: int, ring: Ring = ZZ, config: Optional[Dict] = None) -> TwoLineComplex:
    """Lines A = Q and A' = L[1] with f of shift -2."""
    L, Q, g = _two_part(seed, size, ring, config or DEFAULT_CONFIG)
    Aprime = shift(L, 1)
    return TwoLineComplex(Q, Aprime, ChainMap(Q, Aprime, -2, g))


_SES_POSET: Poset = {0: {0}, 1: {0, 1}, 2: {0, 2}, 3: {0, 1, 2, 3}}  # A', A, C', C


def _split_ses(B: ChainComplex, classes: Dict[int, List[int]], sub: int, names: Sequence[str]) -> ShortExactSequence:
    index_a = {k: [i for i, c in enumerate(cs) if c == sub] for k, cs in classes.items()}
    index_c = {k: [i for i, c in enumerate(cs) if c != sub] for k, cs in classes.items()}
    A = ChainComplex({k: len(v) for k, v in index_a.items()},
                     {k: _take(B.d(k), index_a.get(k - 1, []), v) for k, v in index_a.items()}, B.ring)
    C = ChainComplex({k: len(v) for k, v in index_c.items()},
                     {k: _take(B.d(k), index_c.get(k - 1, []), v) for k, v in index_c.items()}, B.ring)
    full = {k: list(range(len(cs))) for k, cs in classes.items()}
    i_mats = {k: _take(identity(len(full[k])), full[k], v) for k, v in index_a.items()}
    p_mats = {k: _take(identity(len(full[k])), index_c[k], full[k]) for k in classes}
    return ShortExactSequence(ChainMap(A, B, 0, i_mats), ChainMap(B, C, 0, p_mats), names)


def random_ses_morphism(seed: int, size: int, ring: Ring = ZZ, config: Optional[Dict] = None) -> SESMorphism:
    """
    Top A -> B -> C and bottom A' -> B' -> C' with g : B -> B' read off the
    cone of a four-class complex; the class poset keeps A' and A subcomplexes
    and g(A) inside A'.
    """
    config = config or DEFAULT_CONFIG
    pieces = _pieces(_rng(seed), 2 * size, _SES_POSET, config)
    L, l_classes = _complex(pieces, ring, {0, 2})
    B, b_classes = _complex(pieces, ring, {1, 3})
    Bp = shift(L, -1)
    bp_classes = {k + 1: v for k, v in l_classes.items()}
    G = ChainMap(B, Bp, 0, _block(pieces, {0, 2}, {1, 3}))
    top = _split_ses(B, b_classes, 1, ("A", "B", "C"))
    bottom = _split_ses(Bp, bp_classes, 0, ("A'", "B'", "C'"))

    def restrict(source: ChainComplex, target: ChainComplex, rows: int, cols: int) -> ChainMap:
        mats = {}
        for k, cs in b_classes.items():
            r = [i for i, c in enumerate(bp_classes.get(k, [])) if (c == 0) == (rows == 0)]
            c_ = [i for i, c in enumerate(cs) if (c == 1) == (cols == 1)]
            mats[k] = _take(G.mat(k), r, c_)
        return ChainMap(source, target, 0, mats)

    f = restrict(top.A, bottom.A, 0, 1)
    h = restrict(top.C, bottom.C, 2, 3)
    return SESMorphism(top, bottom, f, G, h)


def random_mb_datum(seed: int, size: int, config: Optional[Dict] = None) -> MorseBottS1Datum:
    """
    Towers of orbits with weights w, w+2, ... joined by d2 = c, optionally
    paired by d1 = e with a partner tower one weight lower, then conjugated
    within each weight by a Minus-preserving unimodular matrix.
    """
    config = config or DEFAULT_CONFIG
    rng = _rng(seed)
    span = config.get("degree_span", 4)
    coefficients = config.get("coefficients", [1, -1])
    weights: List[int] = []
    signs: List[ActionSign] = []
    d1_triples, d2_triples = [], []

    def tower(base: int, length: int, sign: ActionSign, c: int) -> List[int]:
        start = len(weights)
        for j in range(length):
            weights.append(base + 2 * j)
            signs.append(sign)
            if j and c:
                d2_triples.append((start + j - 1, start + j, c))
        return list(range(start, start + length))

    while len(weights) < size:
        room = size - len(weights)
        length = int(rng.integers(1, min(3, room) + 1))
        c = int(rng.choice(coefficients + [0]))
        sign = ActionSign.MINUS if rng.random() < config.get("minus_fraction", 0.5) else ActionSign.PLUS
        source = tower(int(rng.integers(1, span + 1)), length, sign, c)
        if room >= 2 * length and rng.random() < config.get("pair_probability", 0.6):
            partner_sign = ActionSign.MINUS if sign is ActionSign.MINUS or rng.random() < 0.5 else ActionSign.PLUS
            partner = tower(weights[source[0]] - 1, length, partner_sign, c)
            e = int(rng.choice(coefficients))
            d1_triples.extend((q, p, e) for p, q in zip(source, partner))
    n = len(weights)
    d1 = IntMatrix.from_triples(n, n, d1_triples).array
    d2 = IntMatrix.from_triples(n, n, d2_triples).array
    # Minus classes sit below Plus ones; conjugate inside each weight
    poset: Poset = {0: {0}, 1: {0, 1}}
    order = sorted(range(n), key=lambda i: (weights[i], signs[i] is ActionSign.PLUS, i))
    P = identity(n)
    for w in sorted(set(weights)):
        members = [i for i in order if weights[i] == w]
        block = _conjugator(rng, [int(signs[i] is ActionSign.PLUS) for i in members], poset,
                            config.get("conjugation_density", 0.3))
        P[np.ix_(members, members)] = block
    Pinv = inverse(P)
    conj1, conj2 = matmul(matmul(P, d1), Pinv), matmul(matmul(P, d2), Pinv)
    if max((abs(int(x)) for x in np.concatenate([conj1.ravel(), conj2.ravel()])), default=0) <= config.get("entry_bound", 3):
        d1, d2 = conj1, conj2
    orbits = [Orbit(f"o{i}", weights[i], signs[i]) for i in range(n)]
    datum = MorseBottS1Datum(orbits, IntMatrix(d1, n, n), IntMatrix(d2, n, n))
    datum.validate()
    return datum


@dataclass
class HomotopyInstance:
    f: FilteredMap
    g: FilteredMap
    K: FilteredMap  # f - g = dK + Kd


def _random_graded(rng: np.random.Generator, FC: FilteredComplex, degree_shift: int, order: int,
                   config: Dict) -> GradedMap:
    C = FC.complex
    mats = {}
    for k in C.degrees:
        arr = zeros(C.rank(k + degree_shift), C.rank(k))
        for r in range(arr.shape[0]):
            for c in range(arr.shape[1]):
                raise_by = FC.level(k + degree_shift, r) - FC.level(k, c)
                if raise_by <= order and rng.random() < config.get("conjugation_density", 0.3):
                    arr[r, c] = int(rng.choice([-1, 1]))
        mats[k] = arr
    return GradedMap(C, C, degree_shift, mats)


def _homotopic(f: GradedMap, K: GradedMap) -> ChainMap:
    """f - dK - Kd."""
    C = f.source
    mats = {k: f.mat(k) - matmul(C.d(k + 1), K.mat(k), C.ring) - matmul(K.mat(k - 1), C.d(k), C.ring)
            for k in C.degrees}
    return ChainMap(C, C, 0, mats)


def random_homotopy(seed: int, size: int, order: int = 1, ring: Ring = ZZ,
                    config: Optional[Dict] = None) -> HomotopyInstance:
    """
    The identity and f - dK - Kd on a filtered complex whose differential
    strictly lowers the level, so g still preserves the filtration when K
    has order 1.
    """
    if order not in (0, 1):
        raise BadParams(f"homotopy order must be 0 or 1, got {order}")
    config = config or DEFAULT_CONFIG
    FC = random_filtered(seed, size, ring, config, strict=True)
    rng = _rng(seed + 1)
    K = _random_graded(rng, FC, 1, order, config)
    f = ChainMap(FC.complex, FC.complex, 0, {k: identity(FC.complex.rank(k)) for k in FC.complex.degrees})
    g = _homotopic(f, K)
    return HomotopyInstance(FilteredMap(f, FC, FC), FilteredMap(g, FC, FC), FilteredMap(K, FC, FC))


@dataclass
class HomotopyEquivalence:
    s12: FilteredMap
    s21: FilteredMap
    K1: FilteredMap  # s21∘s12 - id = dK1 + K1d
    K2: FilteredMap  # s12∘s21 - id = dK2 + K2d


def random_homotopy_equivalence(seed: int, size: int, ring: Ring = ZZ,
                                config: Optional[Dict] = None) -> HomotopyEquivalence:
    """σ12 = P onto the conjugated complex, σ21 = P⁻¹(id - dK - Kd) with K of order 1."""
    config = config or DEFAULT_CONFIG
    FC1 = random_filtered(seed, size, ring, config, strict=True)
    C1 = FC1.complex
    rng = _rng(seed + 1)
    P = {k: _conjugator(rng, FC1.levels(k), _total_order(FC1.max_level + 1), config.get("conjugation_density", 0.3))
         for k in C1.degrees}
    Pinv = {k: inverse(m) for k, m in P.items()}
    C2 = ChainComplex(C1.ranks, {k: matmul(matmul(P.get(k - 1, identity(0)), C1.d(k)), Pinv[k]) for k in C1.degrees},
                      ring)
    FC2 = FilteredComplex(C2, {k: FC1.levels(k) for k in C1.degrees})
    s12 = ChainMap(C1, C2, 0, P)
    K = _random_graded(rng, FC2, 1, 1, config)
    correction = _homotopic(ChainMap(C2, C2, 0, {k: identity(C2.rank(k)) for k in C2.degrees}), K)
    s21 = ChainMap(C2, C1, 0, {k: matmul(Pinv[k], correction.mat(k)) for k in C2.degrees})
    # K1 = -P⁻¹ K P on C1, K2 = -K on C2
    K1 = GradedMap(C1, C1, 1, {k: -matmul(matmul(Pinv.get(k + 1, identity(0)), K.mat(k)), P[k]) for k in C1.degrees})
    K2 = GradedMap(C2, C2, 1, {k: -K.mat(k) for k in C2.degrees})
    return HomotopyEquivalence(FilteredMap(s12, FC1, FC2), FilteredMap(s21, FC2, FC1),
                               FilteredMap(K1, FC1, FC1), FilteredMap(K2, FC2, FC2))


# ------------------------
# Fixed corpus
# ------------------------
def hopf_two_line(ring: Ring = ZZ) -> TwoLineComplex:
    """A = A' = cellular S², f = [1] from degree 2 to degree 0."""
    S2 = sphere_complex(2, ring)
    return TwoLineComplex(S2, S2, ChainMap(S2, S2, -2, {2: [[1]]}))


def ewc_instance(N: int) -> MorseBottS1Datum:
    """
    Minus orbits Mi_m of weight 2m with d2 stepping down, and Plus orbits P_m
    of weight 2m+1 with d1 : P_m -> Mi_m and d2 : P_m -> P_(m-1). The whole
    M-line is acyclic, so every class of the Minus part dies in the middle.
    """
    if N < 0:
        raise BadParams(f"level must be nonnegative, got {N}")
    orbits = [Orbit(f"Mi{m}", 2 * m, ActionSign.MINUS) for m in range(N + 1)]
    orbits += [Orbit(f"P{m}", 2 * m + 1, ActionSign.PLUS) for m in range(N + 1)]
    n = len(orbits)
    offset = N + 1
    d1 = [(m, offset + m, 1) for m in range(N + 1)]
    d2 = [(m - 1, m, 1) for m in range(1, N + 1)] + [(offset + m - 1, offset + m, 1) for m in range(1, N + 1)]
    return MorseBottS1Datum(orbits, IntMatrix.from_triples(n, n, d1), IntMatrix.from_triples(n, n, d2))


def _fixed(spec: ExampleSpec, ring: Ring, config: Dict):
    name = spec.name
    if name == "point":
        return point_complex(ring)
    if name == "sphere":
        n = _param(spec, 0, config.get("default_sphere_dim", 2))
        return sphere_complex(n, ring)
    if name == "circle":
        return circle_complex(ring)
    if name == "cpn":
        return cpn_complex(_param(spec, 0, config.get("default_cpn_level", 2)), ring)
    if name == "rp2":
        return rp2_complex(ring)
    if name == "hopf":
        return hopf_two_line(ring)
    if name == "trivial_borel":
        inner = spec.inner or ExampleSpec("point")
        C = generate(inner, config, ring)
        if not isinstance(C, ChainComplex):
            raise BadParams("trivial_borel needs a complex as its inner example", {"inner": str(inner)})
        return borel_two_line(C, _param(spec, 0, config.get("default_borel_level", 2)))
    if name == "morse_bott_hopf":
        return trivial_action_datum(1)
    if name == "trivial_mb":
        return trivial_action_datum(_param(spec, 0, config.get("default_borel_level", 2)))
    if name == "ewc_instance":
        return ewc_instance(_param(spec, 0, config.get("default_borel_level", 2)))
    raise BadParams(f"unknown example {name!r}")


def _random(spec: ExampleSpec, ring: Ring, config: Dict):
    seed, size = _random_params(spec, config)
    if spec.name == "random_mb_datum":
        return random_mb_datum(seed, size, config)
    if spec.name == "random_homotopy":
        return random_homotopy(seed, size, _param(spec, 2, 1), ring, config)
    return RANDOM[spec.name](seed, size, ring, config)


RANDOM: Dict[str, Callable] = {
    "random_complex": random_complex,
    "random_filtered": random_filtered,
    "random_chain_map": random_chain_map,
    "random_two_line": random_two_line,
    "random_ses_morphism": random_ses_morphism,
    "random_homotopy_equivalence": random_homotopy_equivalence,
}

GENERATORS: Dict[str, Callable] = {
    **{name: _fixed for name in ("point", "sphere", "circle", "cpn", "rp2", "hopf", "trivial_borel",
                                 "morse_bott_hopf", "trivial_mb", "ewc_instance")},
    **{name: _random for name in list(RANDOM) + ["random_mb_datum", "random_homotopy"]},
}


def generate(spec, config: Optional[Dict] = None, ring: Ring = ZZ):
    """
    Build the object an ExampleSpec (or its text form) names.

    >>> generate("cpn(2)").ranks
    {0: 1, 2: 1, 4: 1}
    """
    config = config or DEFAULT_CONFIG
    if isinstance(spec, str):
        spec = ExampleSpec.parse(spec)
    if spec.name not in GENERATORS:
        raise BadParams(f"unknown example {spec.name!r}")
    if any(p < 0 for p in spec.params):
        raise BadParams("example parameters must be nonnegative", {"spec": str(spec)})
    return GENERATORS[spec.name](spec, ring, config)
