"""
JSON documents for the data model and command reports.

Every integer is written as a decimal string; ℚ entries as "a/b". Documents
carry ``schema_version`` and ``kind`` and are checked against the schemas
shipped in ``gysin/schema`` before decoding, and every decoded object
re-validates its own invariants.
"""
import json
import logging
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from typing import Any, Dict, List, Optional, Tuple

import jsonschema
import numpy as np

from gysin.complexes import ChainComplex, ChainMap, GradedMap
from gysin.config import DEFAULT_CONFIG
from gysin.cones import LESEntry, LESMap, LongExactSequence, SESMorphism, ShortExactSequence
from gysin.equivariant import ActionSign, Circle, MorseBottS1Datum, Orbit, S1MorseDatum
from gysin.errors import DocumentError, GysinError
from gysin.exactlin import FGAbelianGroup, IntMatrix
from gysin.rings import ZZ, Ring, RingKind
from gysin.spectra import FilteredComplex, FilteredMap, TwoLineComplex

logger = logging.getLogger(__name__)

SCHEMA_VERSION = DEFAULT_CONFIG["schema_version"]


# ------------------------
# Scalars, rings, matrices
# ------------------------
def _num(x) -> str:
    if isinstance(x, Fraction) and x.denominator != 1:
        return f"{x.numerator}/{x.denominator}"
    return str(int(x))


def _parse_num(text: str):
    value = Fraction(text)
    return value.numerator if value.denominator == 1 else value


def encode_ring(ring: Ring):
    if ring.kind is RingKind.PRIME_FIELD:
        return {"Zp": str(ring.p)}
    return ring.label


def decode_ring(obj) -> Ring:
    if obj is None:
        return ZZ
    if isinstance(obj, dict):
        return Ring.prime_field(int(obj["Zp"]))
    return Ring.parse(obj)


def _triples(m) -> List[List[str]]:
    matrix = m if isinstance(m, IntMatrix) else IntMatrix(m)
    return [[str(r), str(c), _num(v)] for r, c, v in matrix.to_triples()]


def _from_triples(triples, rows: int, cols: int, ring: Ring) -> np.ndarray:
    parsed = [(int(r), int(c), ring.coerce(_parse_num(v))) for r, c, v in triples]
    return IntMatrix.from_triples(rows, cols, parsed).array


def _graded(mats: Dict[int, IntMatrix]) -> Dict[str, List[List[str]]]:
    return {str(k): _triples(m) for k, m in sorted(mats.items()) if not m.is_zero()}


# ------------------------
# Encoders
# ------------------------
def _header(kind: str, ring: Optional[Ring] = None) -> Dict[str, Any]:
    doc: Dict[str, Any] = {"schema_version": SCHEMA_VERSION, "kind": kind}
    if ring is not None:
        doc["ring"] = encode_ring(ring)
    return doc


def encode_complex(C: ChainComplex) -> Dict[str, Any]:
    doc = _header("complex", C.ring)
    doc["degrees"] = {str(k): str(r) for k, r in C.ranks.items()}
    if C.has_labels:
        doc["labels"] = {str(k): C.labels(k) for k in C.degrees}
    doc["differentials"] = _graded(C.differentials)
    return doc


def encode_filtered(FC: FilteredComplex) -> Dict[str, Any]:
    doc = encode_complex(FC.complex)
    doc["kind"] = "filtered_complex"
    doc["filtration"] = {str(k): [str(x) for x in FC.levels(k)] for k in FC.complex.degrees}
    return doc


def encode_map(f: GradedMap, source=None, target=None) -> Dict[str, Any]:
    """Chain map document; ``source``/``target`` may be filtered complexes around f's complexes."""
    doc = _header("chain_map", f.ring)
    doc["source"] = encode_filtered(source) if source is not None else encode_complex(f.source)
    doc["target"] = encode_filtered(target) if target is not None else encode_complex(f.target)
    doc["shift"] = str(f.shift)
    doc["matrices"] = _graded(f.mats)
    if not isinstance(f, ChainMap):
        doc["check"] = False
    return doc


def encode_two_line(T: TwoLineComplex) -> Dict[str, Any]:
    doc = _header("two_line", T.ring)
    doc["A"] = encode_complex(T.A)
    doc["Aprime"] = encode_complex(T.Aprime)
    doc["f"] = _graded(T.f.mats)
    return doc


def encode_s1_datum(D: S1MorseDatum) -> Dict[str, Any]:
    doc = _header("s1_morse_datum")
    doc["circles"] = [{"label": c.label, "index": str(c.index)} for c in D.circles]
    doc["counts"] = [[str(u), str(l), str(v)] for (u, l), v in sorted(D.counts.items()) if v]
    return doc


def encode_mb_datum(D: MorseBottS1Datum) -> Dict[str, Any]:
    doc = _header("mb_datum")
    doc["orbits"] = []
    for o in D.orbits:
        entry = {"label": o.label, "weight": str(o.weight)}
        if o.sign is not None:
            entry["sign"] = o.sign.value
        doc["orbits"].append(entry)
    doc["d1"] = _triples(D.d1)
    doc["d2"] = _triples(D.d2)
    return doc


def _encode_ses(ses: ShortExactSequence) -> Dict[str, Any]:
    return {"i": encode_map(ses.i), "p": encode_map(ses.p), "names": list(ses.names)}


def encode_ses_morphism(m: SESMorphism) -> Dict[str, Any]:
    doc = _header("ses_morphism", m.ring)
    doc.update(top=_encode_ses(m.top), bottom=_encode_ses(m.bottom),
               f=encode_map(m.f), g=encode_map(m.g), h=encode_map(m.h))
    return doc


def encode_les(les: LongExactSequence) -> Dict[str, Any]:
    doc = _header("les")
    doc["ring"] = encode_ring(Ring.parse(les.ring))
    doc["entries"] = [{"label": e.label, "degree": str(e.degree), "group": str(e.group),
                       "moduli": [_num(x) for x in e.moduli]} for e in les.entries]
    doc["maps"] = [{"kind": m.kind, "degree": str(m.degree), "rows": str(m.matrix.rows),
                    "cols": str(m.matrix.cols), "entries": _triples(m.matrix)} for m in les.maps]
    doc["metadata"] = {str(k): str(v) for k, v in les.metadata.items()}
    return doc


def encode(obj) -> Dict[str, Any]:
    if isinstance(obj, FilteredComplex):
        return encode_filtered(obj)
    if isinstance(obj, ChainComplex):
        return encode_complex(obj)
    if isinstance(obj, TwoLineComplex):
        return encode_two_line(obj)
    if isinstance(obj, FilteredMap):
        return encode_map(obj.map, obj.source, obj.target)
    if isinstance(obj, GradedMap):
        return encode_map(obj)
    if isinstance(obj, S1MorseDatum):
        return encode_s1_datum(obj)
    if isinstance(obj, MorseBottS1Datum):
        return encode_mb_datum(obj)
    if isinstance(obj, SESMorphism):
        return encode_ses_morphism(obj)
    if isinstance(obj, LongExactSequence):
        return encode_les(obj)
    raise DocumentError(f"no document form for {type(obj).__name__}")


# ------------------------
# Decoders
# ------------------------
def _ring_of(doc: Dict[str, Any], ring: Optional[Ring]) -> Ring:
    return ring if ring is not None else decode_ring(doc.get("ring"))


def decode_complex(doc: Dict[str, Any], ring: Optional[Ring] = None) -> ChainComplex:
    ring = _ring_of(doc, ring)
    ranks = {int(k): int(v) for k, v in doc["degrees"].items()}
    diffs = {int(k): _from_triples(t, ranks.get(int(k) - 1, 0), ranks.get(int(k), 0), ring)
             for k, t in doc.get("differentials", {}).items()}
    labels = {int(k): v for k, v in doc.get("labels", {}).items()} or None
    return ChainComplex(ranks, diffs, ring, labels)


def decode_filtered(doc: Dict[str, Any], ring: Optional[Ring] = None) -> FilteredComplex:
    C = decode_complex(doc, ring)
    return FilteredComplex(C, {int(k): [int(x) for x in v] for k, v in doc["filtration"].items()})


def _decode_any_complex(doc: Dict[str, Any], ring: Optional[Ring]):
    if doc.get("kind") == "filtered_complex":
        return decode_filtered(doc, ring)
    return decode_complex(doc, ring)


def decode_map(doc: Dict[str, Any], ring: Optional[Ring] = None):
    """A ChainMap (GradedMap when ``check`` is false); a FilteredMap when both ends are filtered."""
    if ring is None and "ring" in doc:
        ring = decode_ring(doc["ring"])
    source = _decode_any_complex(doc["source"], ring)
    target = _decode_any_complex(doc["target"], ring)
    src_c = source.complex if isinstance(source, FilteredComplex) else source
    tgt_c = target.complex if isinstance(target, FilteredComplex) else target
    shift = int(doc["shift"])
    mats = {int(k): _from_triples(t, tgt_c.rank(int(k) + shift), src_c.rank(int(k)), src_c.ring)
            for k, t in doc.get("matrices", {}).items()}
    if doc.get("check", True):
        f = ChainMap(src_c, tgt_c, shift, mats)
    else:
        f = GradedMap(src_c, tgt_c, shift, mats)
    if isinstance(source, FilteredComplex) and isinstance(target, FilteredComplex):
        return FilteredMap(f, source, target)
    return f


def decode_two_line(doc: Dict[str, Any], ring: Optional[Ring] = None) -> TwoLineComplex:
    ring = _ring_of(doc, ring)
    A = decode_complex(doc["A"], ring)
    Aprime = decode_complex(doc["Aprime"], ring)
    mats = {int(k): _from_triples(t, Aprime.rank(int(k) - 2), A.rank(int(k)), ring) for k, t in doc["f"].items()}
    return TwoLineComplex(A, Aprime, ChainMap(A, Aprime, -2, mats))


def decode_s1_datum(doc: Dict[str, Any], ring: Optional[Ring] = None) -> S1MorseDatum:
    circles = [Circle(c["label"], int(c["index"])) for c in doc["circles"]]
    counts = {(int(u), int(l)): int(v) for u, l, v in doc.get("counts", [])}
    return S1MorseDatum(circles, counts)


def decode_mb_datum(doc: Dict[str, Any], ring: Optional[Ring] = None) -> MorseBottS1Datum:
    orbits = [Orbit(o["label"], int(o["weight"]), ActionSign(o["sign"]) if "sign" in o else None)
              for o in doc["orbits"]]
    n = len(orbits)
    d1 = _from_triples(doc.get("d1", []), n, n, ZZ)
    d2 = _from_triples(doc.get("d2", []), n, n, ZZ)
    datum = MorseBottS1Datum(orbits, IntMatrix(d1, n, n), IntMatrix(d2, n, n))
    datum.validate()
    return datum


def _decode_ses(doc: Dict[str, Any], ring: Ring) -> ShortExactSequence:
    names = doc.get("names", ["A", "B", "C"])
    return ShortExactSequence(decode_map(doc["i"], ring), decode_map(doc["p"], ring), names)


def decode_ses_morphism(doc: Dict[str, Any], ring: Optional[Ring] = None) -> SESMorphism:
    ring = _ring_of(doc, ring)
    top, bottom = _decode_ses(doc["top"], ring), _decode_ses(doc["bottom"], ring)
    f, g, h = (decode_map(doc[k], ring) for k in ("f", "g", "h"))
    return SESMorphism(top, bottom, f, g, h)


def decode_les(doc: Dict[str, Any], ring: Optional[Ring] = None) -> LongExactSequence:
    ring = _ring_of(doc, ring)
    les = LongExactSequence(ring=ring.label, metadata=dict(doc.get("metadata", {})))
    for e in doc["entries"]:
        moduli = tuple(ring.coerce(_parse_num(x)) for x in e["moduli"])
        free = sum(1 for x in moduli if x == 0)
        group = FGAbelianGroup.from_orders(free, [int(x) for x in moduli if x != 0])
        les.entries.append(LESEntry(e["label"], int(e["degree"]), group, moduli))
    for m in doc["maps"]:
        rows, cols = int(m["rows"]), int(m["cols"])
        les.maps.append(LESMap(m["kind"], int(m["degree"]), IntMatrix(_from_triples(m["entries"], rows, cols, ring),
                                                                      rows, cols)))
    return les


DECODERS = {
    "complex": decode_complex,
    "filtered_complex": decode_filtered,
    "two_line": decode_two_line,
    "chain_map": decode_map,
    "s1_morse_datum": decode_s1_datum,
    "mb_datum": decode_mb_datum,
    "ses_morphism": decode_ses_morphism,
    "les": decode_les,
}


# ------------------------
# Schema validation and I/O
# ------------------------
@lru_cache(maxsize=None)
def _schema(name: str) -> Dict[str, Any]:
    text = resources.files("gysin").joinpath("schema", name).read_text(encoding="utf-8")
    return json.loads(text)


def _validate(doc: Any, name: str) -> None:
    try:
        jsonschema.validate(instance=doc, schema=_schema(name))
    except jsonschema.ValidationError as err:
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise DocumentError(f"schema violation: {err.message}", {"path": where})


def validate_document(doc: Any) -> None:
    _validate(doc, "document.schema.json")


def validate_report(doc: Any) -> None:
    _validate(doc, "report.schema.json")


def decode(doc: Any, ring: Optional[Ring] = None):
    """Schema-check a document and rebuild its object; invariants are re-validated on construction."""
    validate_document(doc)
    version = doc.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise DocumentError(f"unsupported schema version {version!r}")
    try:
        return DECODERS[doc["kind"]](doc, ring)
    except GysinError:
        raise
    except (KeyError, ValueError, TypeError) as err:
        raise DocumentError(f"malformed {doc['kind']} document: {err}")


def loads(text: str, ring: Optional[Ring] = None):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise DocumentError(f"invalid JSON: {err.msg}", {"line": err.lineno, "column": err.colno})
    return decode(doc, ring)


def dumps(doc: Dict[str, Any]) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False)


def make_report(command: str, result: Dict[str, Any], ok: bool = True) -> Dict[str, Any]:
    report = {"schema_version": SCHEMA_VERSION, "kind": "report", "command": command, "ok": bool(ok),
              "result": result}
    validate_report(report)
    return report


def describe(doc: Dict[str, Any]) -> Tuple[str, str]:
    """(kind, ring label) of a document, for log lines."""
    return doc.get("kind", "?"), decode_ring(doc.get("ring")).label if "ring" in doc else "-"
