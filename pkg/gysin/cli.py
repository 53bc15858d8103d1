"""
Command-line front end.

Every subcommand reads one JSON document (``--in FILE`` or stdin), runs a
pipeline and prints either a table for humans or a JSON report that
validates against ``gysin/schema/report.schema.json``. Exit codes: 0 on
success, 1 when a domain check fails, 2 for usage, I/O and JSON syntax
errors.
"""
import json
import logging
import sys
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

import click
import pandas as pd
from pythonjsonlogger.json import JsonFormatter

from gysin import __version__
from gysin.charts import plot_pages, write_chart
from gysin.complexes import ChainComplex, GradedMap
from gysin.cones import connecting_mismatches, cone, cone_ses, grid_lemma57, snake_les
from gysin.config import DEFAULT_CONFIG
from gysin.documents import (
    decode,
    describe,
    dumps,
    encode,
    encode_complex,
    encode_filtered,
    encode_les,
    make_report,
)
from gysin.equivariant import (
    assemble_morse_bott,
    assemble_s1_morse,
    borel_trivial_action,
    bv_delta,
    compare_quotient_morse,
    diagram17_check,
    diagram_from_datum,
    ewc_certificate,
    gysin_theorem11,
    phi_e1,
)
from gysin.errors import BadParams, GysinError
from gysin.factory import ExampleSpec, generate
from gysin.rings import ZZ, Ring
from gysin.solver import MapStatus, PartialLES, Slot, les_solver
from gysin.spectra import (
    FilteredComplex,
    FilteredMap,
    TwoLineComplex,
    check_bete_factorization,
    check_cone_equals_gysin,
    convergence_check,
    filtered_order,
    gysin_from_two_line,
    page_recursion_check,
    spectral_pages,
)

logger = logging.getLogger(__name__)

COMPLEX_KINDS = ("complex", "filtered_complex", "two_line")


@dataclass
class RunOptions:
    """Options shared by the subcommands"""
    fmt: str = "table"
    out: Optional[str] = None
    ring: Optional[Ring] = None
    pages: Optional[int] = None
    chart: Optional[str] = None
    level: Optional[int] = None

    @property
    def coefficients(self) -> Ring:
        return self.ring or ZZ


@dataclass
class Outcome:
    result: Dict[str, Any]
    table: str
    ok: bool = True


# ------------------------
# Plumbing
# ------------------------
def _configure_logging(verbose: int, log_json: bool) -> None:
    handler = logging.StreamHandler(sys.stderr)
    if log_json:
        handler.setFormatter(JsonFormatter("%(asctime)s %(levelname)s %(name)s %(message)s"))
    else:
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("gysin")
    root.handlers = [h for h in root.handlers if isinstance(h, logging.NullHandler)]
    root.addHandler(handler)
    root.setLevel(logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG)


def _parse_ring(ctx, param, value: Optional[str]) -> Optional[Ring]:
    if value is None:
        return None
    try:
        return Ring.parse(value)
    except GysinError as err:
        raise click.BadParameter(err.message)


def _frame_text(frame: pd.DataFrame) -> str:
    with pd.option_context("display.width", DEFAULT_CONFIG["table_width"], "display.max_columns", None,
                           "display.max_colwidth", 80):
        return frame.to_string(index=False)


def _groups(C: ChainComplex) -> Dict[str, str]:
    return {str(k): str(g) for k, g in C.homology_all().items()}


def _underlying(obj) -> ChainComplex:
    if isinstance(obj, FilteredComplex):
        return obj.complex
    if isinstance(obj, TwoLineComplex):
        return obj.total()
    return obj


def _graded_map(obj) -> GradedMap:
    return obj.map if isinstance(obj, FilteredMap) else obj


def _load(source, opts: RunOptions, command: str, kinds: Iterable[str]):
    doc = json.loads(source.read())
    kinds = tuple(kinds)
    if not isinstance(doc, dict) or doc.get("kind") not in kinds:
        found = doc.get("kind") if isinstance(doc, dict) else type(doc).__name__
        raise BadParams(f"{command} expects a document of kind {' or '.join(kinds)}", {"kind": found})
    obj = decode(doc, opts.ring)
    kind, ring = describe(doc)
    logger.info("%s: loaded %s over %s", command, kind, ring)
    return obj


def _emit(opts: RunOptions, command: str, outcome: Outcome) -> None:
    text = dumps(make_report(command, outcome.result, outcome.ok)) if opts.fmt == "json" else outcome.table
    if opts.out:
        with open(opts.out, "w", encoding="utf-8") as handle:
            handle.write(text + "\n")
        logger.info("%s: report written to %s", command, opts.out)
    else:
        click.echo(text)


def _run(ctx: click.Context, opts: RunOptions, command: str, action: Callable[[], Outcome]) -> None:
    try:
        outcome = action()
        _emit(opts, command, outcome)
    except GysinError as err:
        click.echo(f"error: {type(err).__name__}: {err}", err=True)
        ctx.exit(1)
    except json.JSONDecodeError as err:
        click.echo(f"error: invalid JSON: {err.msg} (line {err.lineno}, column {err.colno})", err=True)
        ctx.exit(2)
    except OSError as err:
        click.echo(f"error: {err}", err=True)
        ctx.exit(2)
    if not outcome.ok:
        ctx.exit(1)


def io_options(fn):
    fn = click.option("--ring", callback=_parse_ring, default=None,
                      help="Coefficients: Z, Q or Zp:p (overrides the document).")(fn)
    fn = click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table",
                      show_default=True)(fn)
    fn = click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None,
                      help="Write the output here instead of stdout.")(fn)
    fn = click.option("--in", "source", type=click.File("r", encoding="utf-8"), default="-",
                      help="Input document (default stdin).")(fn)
    return fn


def _les_outcome(les, extra: str = "") -> Outcome:
    table = _frame_text(les.table())
    return Outcome({"les": encode_les(les)}, table + ("\n" + extra if extra else ""))


# ------------------------
# Command group
# ------------------------
@click.group()
@click.option("-v", "--verbose", count=True, help="-v for progress, -vv for debug detail.")
@click.option("--log-json", is_flag=True, help="Structured JSON log records on stderr.")
@click.version_option(__version__, prog_name="gysin")
def cli(verbose: int, log_json: bool) -> None:
    """Exact homological algebra: cones, spectral sequences and S¹-equivariant Gysin sequences."""
    _configure_logging(verbose, log_json)


@cli.command()
@io_options
@click.pass_context
def homology(ctx, source, out, fmt, ring):
    """Homology groups of a complex (the total complex of a two-line one)."""
    opts = RunOptions(fmt, out, ring)

    def action() -> Outcome:
        C = _underlying(_load(source, opts, "homology", COMPLEX_KINDS))
        return Outcome({"groups": _groups(C), "line": C.homology_line()}, C.homology_line())

    _run(ctx, opts, "homology", action)


@cli.command("cone")
@io_options
@click.pass_context
def cone_command(ctx, source, out, fmt, ring):
    """Mapping cone of a chain map."""
    opts = RunOptions(fmt, out, ring)

    def action() -> Outcome:
        C = cone(_graded_map(_load(source, opts, "cone", ["chain_map"])))
        ranks = " ".join(f"C{k}={r}" for k, r in C.ranks.items())
        return Outcome({"complex": encode_complex(C), "groups": _groups(C)}, f"{ranks}\n{C.homology_line()}")

    _run(ctx, opts, "cone", action)


@cli.command()
@io_options
@click.pass_context
def snake(ctx, source, out, fmt, ring):
    """Long exact sequence of the cone of a chain map; checks the connecting map against f_*."""
    opts = RunOptions(fmt, out, ring)

    def action() -> Outcome:
        f = _graded_map(_load(source, opts, "snake", ["chain_map"]))
        les = snake_les(cone_ses(f))
        bad = connecting_mismatches(f)
        outcome = _les_outcome(les, f"connecting map equals f_*: {not bad}")
        outcome.result.update(connecting_equals_induced=not bad, mismatched_degrees=bad)
        outcome.ok = not bad
        return outcome

    _run(ctx, opts, "snake", action)


@cli.command()
@io_options
@click.pass_context
def grid57(ctx, source, out, fmt, ring):
    """Square pattern of the grid of cones of a morphism of short exact sequences."""
    opts = RunOptions(fmt, out, ring)

    def action() -> Outcome:
        report = grid_lemma57(_load(source, opts, "grid57", ["ses_morphism"]))
        lines = [f"squares checked: {report.squares_checked}",
                 f"anticommuting squares checked: {report.anticommuting_checked}",
                 f"ok: {report.ok}"]
        if report.failures:
            lines.append(_frame_text(pd.DataFrame(report.failures)))
        return Outcome(report.to_dict(), "\n".join(lines), report.ok)

    _run(ctx, opts, "grid57", action)


@cli.command()
@io_options
@click.option("--pages", type=click.IntRange(min=0), default=None, help="Last page to compute.")
@click.option("--chart", type=click.Path(dir_okay=False, writable=True), default=None,
              help="Write a plotly HTML view of the pages.")
@click.pass_context
def spectral(ctx, source, out, fmt, ring, pages, chart):
    """Pages E^0..E^r and E^∞ of a filtered or two-line complex."""
    opts = RunOptions(fmt, out, ring, pages=pages, chart=chart)

    def action() -> Outcome:
        obj = _load(source, opts, "spectral", ["filtered_complex", "two_line"])
        FC = obj.filtered() if isinstance(obj, TwoLineComplex) else obj
        sp = spectral_pages(FC, opts.pages)
        recursion, convergence = page_recursion_check(sp), convergence_check(sp)
        result = {
            "pages": {str(r): {f"{p},{n}": str(pres.group) for (p, n), pres in sp.pages[r].items()}
                      for r in sorted(sp.pages)},
            "infinity": {f"{p},{n}": str(pres.group) for (p, n), pres in sp.infinity.items()},
            "nonzero_differentials": {str(r): [list(pos) for pos in sp.nonzero_differentials(r)]
                                      for r in sorted(sp.pages)},
            "degenerates_at": sp.degenerates_at(),
            "recursion_failures": recursion,
            "convergence_failures": convergence,
        }
        ok = not recursion and not convergence
        if isinstance(obj, TwoLineComplex):
            late = [r for r in sorted(sp.pages) if r >= 3 and sp.nonzero_differentials(r)]
            result["late_differentials"] = late
            ok = ok and not late
        blocks = [f"E^{r}\n{sp.table(r).to_string()}" for r in sorted(sp.pages)]
        blocks.append(f"E^∞\n{sp.table().to_string()}")
        if opts.chart:
            write_chart(plot_pages(sp), opts.chart)
        return Outcome(result, "\n\n".join(blocks), ok)

    _run(ctx, opts, "spectral", action)


@cli.command("gysin")
@io_options
@click.pass_context
def gysin_command(ctx, source, out, fmt, ring):
    """Gysin sequence of a two-line complex read off its spectral sequence."""
    opts = RunOptions(fmt, out, ring)

    def action() -> Outcome:
        T = _load(source, opts, "gysin", ["two_line"])
        return _les_outcome(gysin_from_two_line(T), f"total: {T.total().homology_line()}")

    _run(ctx, opts, "gysin", action)


@cli.command("check-lemma58")
@io_options
@click.pass_context
def check_lemma58(ctx, source, out, fmt, ring):
    """Compare the cone sequence of f with the Gysin sequence, map by map."""
    opts = RunOptions(fmt, out, ring)

    def action() -> Outcome:
        T = _load(source, opts, "check-lemma58", ["two_line"])
        equivalence = check_cone_equals_gysin(T, raise_on_mismatch=False)
        factorization = check_bete_factorization(T)
        lines = [f"groups match: {equivalence.groups_match}", f"I = i_*: {equivalence.i_match}",
                 f"P = p_*: {equivalence.p_match}", f"d2 = f_*: {equivalence.d2_match}",
                 _frame_text(pd.DataFrame(factorization.checks, columns=["degree", "check", "ok"]))]
        ok = equivalence.ok and factorization.ok
        return Outcome({"equivalence": equivalence.to_dict(), "factorization": factorization.to_dict()},
                       "\n".join(lines), ok)

    _run(ctx, opts, "check-lemma58", action)


@cli.command()
@io_options
@click.option("--quotient", type=click.File("r", encoding="utf-8"), default=None,
              help="Morse complex of the quotient to compare with.")
@click.pass_context
def equivariant(ctx, source, out, fmt, ring, quotient):
    """S¹-equivariant Morse complex of circles of critical points."""
    opts = RunOptions(fmt, out, ring)

    def action() -> Outcome:
        D = _load(source, opts, "equivariant", ["s1_morse_datum"])
        C = assemble_s1_morse(D, opts.coefficients)
        result = {"complex": encode_complex(C), "groups": _groups(C)}
        table = C.homology_line()
        ok = True
        if quotient is not None:
            ok = compare_quotient_morse(D, _underlying(_load(quotient, opts, "equivariant", ["complex"])))
            result["matches_quotient"] = ok
            table += f"\nmatches quotient: {ok}"
        return Outcome(result, table, ok)

    _run(ctx, opts, "equivariant", action)


@cli.command("mb-assemble")
@io_options
@click.pass_context
def mb_assemble(ctx, source, out, fmt, ring):
    """Filtered complex of a Morse-Bott S¹ datum."""
    opts = RunOptions(fmt, out, ring)

    def action() -> Outcome:
        FC = assemble_morse_bott(_load(source, opts, "mb-assemble", ["mb_datum"]), opts.coefficients)
        return Outcome({"filtered_complex": encode_filtered(FC), "groups": _groups(FC.complex)},
                       FC.complex.homology_line())

    _run(ctx, opts, "mb-assemble", action)


@cli.command()
@io_options
@click.pass_context
def phi(ctx, source, out, fmt, ring):
    """Certify the identification of E¹ with the orbit complex."""
    opts = RunOptions(fmt, out, ring)

    def action() -> Outcome:
        report = phi_e1(_load(source, opts, "phi", ["mb_datum"]), opts.coefficients)
        lines = [f"certified: {report.certified} (page {report.page}, {len(report.matrices)} positions)"]
        lines += report.details
        return Outcome(report.to_dict(), "\n".join(lines), report.certified)

    _run(ctx, opts, "phi", action)


@cli.command()
@io_options
@click.pass_context
def theorem11(ctx, source, out, fmt, ring):
    """Gysin sequence of a Morse-Bott datum with maps E, D, M."""
    opts = RunOptions(fmt, out, ring)

    def action() -> Outcome:
        les = gysin_theorem11(_load(source, opts, "theorem11", ["mb_datum"]), opts.coefficients)
        return _les_outcome(les, les.metadata.get("maps", ""))

    _run(ctx, opts, "theorem11", action)


@cli.command()
@io_options
@click.pass_context
def bv(ctx, source, out, fmt, ring):
    """BV operator on the total complex, compared with M∘E."""
    opts = RunOptions(fmt, out, ring)

    def action() -> Outcome:
        _, report = bv_delta(_load(source, opts, "bv", ["mb_datum"]), opts.coefficients)
        frame = pd.DataFrame([{"degree": n, "delta": str(m.to_rows())} for n, m in report.delta.items()],
                             columns=["degree", "delta"])
        lines = [_frame_text(frame), f"chain map: {report.chain_map}",
                 f"squares to zero: {report.squares_to_zero}", f"equals M∘E: {report.matches_gysin}"]
        return Outcome(report.to_dict(), "\n".join(lines), report.ok)

    _run(ctx, opts, "bv", action)


@cli.command()
@io_options
@click.option("--level", type=click.IntRange(min=0), default=None, help="N in C ⊗ CP^N.")
@click.pass_context
def borel(ctx, source, out, fmt, ring, level):
    """Borel model of the trivial action on a complex, checked against the Gysin splitting."""
    opts = RunOptions(fmt, out, ring, level=level)

    def action() -> Outcome:
        C = _underlying(_load(source, opts, "borel", ["complex"]))
        N = DEFAULT_CONFIG["default_borel_level"] if opts.level is None else opts.level
        model, report = borel_trivial_action(C, N)
        result = {"level": N, "model": encode_complex(model), **report.to_dict()}
        return Outcome(result, _frame_text(report.table()), report.ok)

    _run(ctx, opts, "borel", action)


@cli.command()
@io_options
@click.pass_context
def diagram17(ctx, source, out, fmt, ring):
    """Exactness of the tautological/Gysin diagram of a split Morse-Bott datum."""
    opts = RunOptions(fmt, out, ring)

    def action() -> Outcome:
        G = diagram_from_datum(_load(source, opts, "diagram17", ["mb_datum"]), opts.coefficients)
        report = diagram17_check(G)
        ewc = ewc_certificate(G)
        lines = [f"sequences checked: {report.sequences_checked}", f"ok: {report.ok}",
                 f"distinguished classes vanish in H(A): {ewc.all_vanish}"]
        if report.forced_isomorphisms is not None:
            lines.append(f"connecting maps forced to be isomorphisms: {report.forced_isomorphisms}")
        if report.failure:
            lines.append(f"failure: {report.failure}")
        return Outcome({"diagram": report.to_dict(), "ewc": ewc.to_dict()}, "\n".join(lines), report.ok)

    _run(ctx, opts, "diagram17", action)


def _parse_slots(text: str) -> List[Slot]:
    slots = []
    for j, item in enumerate(part.strip() for part in text.split(",")):
        label, _, value = item.rpartition("=")
        label = label or f"S{j}"
        if value in ("?", ""):
            slots.append(Slot(label))
            continue
        try:
            slots.append(Slot(label, int(value)))
        except ValueError:
            raise click.BadParameter(f"{item!r} is not LABEL=DIM, DIM or ?", param_hint="--dims")
    return slots


def _parse_maps(text: Optional[str], count: int) -> List[MapStatus]:
    if not text:
        return [MapStatus.UNKNOWN] * count
    try:
        return [MapStatus(part.strip()) for part in text.split(",")]
    except ValueError:
        choices = ", ".join(m.value for m in MapStatus)
        raise click.BadParameter(f"map statuses are {choices}", param_hint="--maps")


@cli.command()
@io_options
@click.option("--dims", default=None, help="Comma-separated slots: LABEL=DIM, DIM or ? for unknown.")
@click.option("--maps", "map_text", default=None, help="Comma-separated statuses of the maps between slots.")
@click.option("--hide", multiple=True, help="Entry label of an input sequence to treat as unknown.")
@click.option("--zero-map", "zero_maps", type=int, multiple=True, help="Index of a map known to be zero.")
@click.option("--unbounded", is_flag=True, help="Do not assume zero groups beyond both ends.")
@click.pass_context
def solve(ctx, source, out, fmt, ring, dims, map_text, hide, zero_maps, unbounded):
    """Deduce unknown dimensions and map types in an exact sequence of vector spaces."""
    opts = RunOptions(fmt, out, ring)
    if dims:
        slots = _parse_slots(dims)
        statuses = _parse_maps(map_text, max(len(slots) - 1, 0))

    def action() -> Outcome:
        if dims:
            partial = PartialLES(slots, statuses, bounded=not unbounded)
        else:
            les = _load(source, opts, "solve", ["les"])
            if not Ring.parse(les.ring).is_field:
                raise BadParams("the solver needs a sequence over a field", {"ring": les.ring})
            partial = PartialLES.from_les(les, hide, zero_maps)
        report = les_solver(partial)
        frame = pd.DataFrame({"slot": [s.label for s in partial.slots], "dim": report.dims,
                              "map out": [m.value for m in report.maps] + [""]})
        lines = [_frame_text(frame), "derivations:"] + [f"  {d}" for d in report.derivations]
        return Outcome(report.to_dict(), "\n".join(lines))

    _run(ctx, opts, "solve", action)


@cli.command()
@io_options
@click.pass_context
def order(ctx, source, out, fmt, ring):
    """Filtered order of a map between filtered complexes."""
    opts = RunOptions(fmt, out, ring)

    def action() -> Outcome:
        K = _load(source, opts, "order", ["chain_map"])
        if not isinstance(K, FilteredMap):
            raise BadParams("order needs filtered source and target complexes")
        k = filtered_order(K)
        return Outcome({"order": k, "shift": K.map.shift}, f"order: {k}")

    _run(ctx, opts, "order", action)


def _with_seed(spec: ExampleSpec, seed: Optional[int], size: Optional[int]) -> ExampleSpec:
    if seed is None and size is None:
        return spec
    if not spec.name.startswith("random_"):
        raise BadParams("--seed and --size only apply to random examples", {"example": spec.name})
    params: Tuple[int, ...] = spec.params
    head = [params[0] if params else 0,
            params[1] if len(params) > 1 else DEFAULT_CONFIG["default_random_size"]]
    if seed is not None:
        head[0] = seed
    if size is not None:
        head[1] = size
    return replace(spec, params=tuple(head) + params[2:])


@cli.command()
@click.argument("spec")
@click.option("--seed", type=int, default=None)
@click.option("--size", type=int, default=None)
@click.option("--ring", callback=_parse_ring, default=None)
@click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None)
@click.pass_context
def example(ctx, spec, seed, size, ring, out):
    """Print the document of a corpus example, e.g. cpn(2), hopf or random_two_line(7, 10)."""
    opts = RunOptions("document", out, ring)

    def action() -> Outcome:
        parsed = _with_seed(ExampleSpec.parse(spec), seed, size)
        doc = encode(generate(parsed, DEFAULT_CONFIG, opts.coefficients))
        logger.info("example %s: %s", parsed, doc["kind"])
        return Outcome(doc, dumps(doc))

    _run(ctx, opts, "example", action)


@cli.command()
@io_options
@click.pass_context
def validate(ctx, source, out, fmt, ring):
    """Check a document against the schema and the invariants of its type."""
    opts = RunOptions(fmt, out, ring)

    def action() -> Outcome:
        doc = json.loads(source.read())
        obj = decode(doc, opts.ring)
        kind, ring_label = describe(doc)
        return Outcome({"document": kind, "ring": ring_label, "type": type(obj).__name__},
                       f"valid {kind} over {ring_label}")

    _run(ctx, opts, "validate", action)


def main() -> None:
    cli(prog_name="gysin")


if __name__ == "__main__":
    main()
