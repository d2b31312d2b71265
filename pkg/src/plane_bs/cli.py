"""Command-line reports: ``plane-bs resolve|validate|roots|jumping|zeta|audit``.

Exit codes: 0 success, 1 bad input (or an invalid graph for ``validate``),
2 internal invariant violation.
"""

from __future__ import annotations

import json
import random
import sys

import click

from . import documents
from .corpus import random_curve
from .documents import InputError
from .resolution_graph import build_from_curve, validate_graph


class InternalFailure(Exception):
    def __init__(self, message: str, dump: dict | None):
        super().__init__(message)
        self.dump = dump


def _read(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError("", f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError("", f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _guarded(g, fn):
    try:
        return fn()
    except AssertionError as exc:
        try:
            dump = g.to_dict() if g is not None else None
        except Exception:
            dump = None
        raise InternalFailure(f"{type(exc).__name__}: {exc}", dump) from exc


def _emit(doc: dict, table: str, fmt: str, out: str | None) -> None:
    text = json.dumps(doc, indent=2) + "\n" if fmt == "json" else table
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _rows(header: list[str], rows: list[list]) -> str:
    cells = [header] + [["" if c is None else str(c) for c in r] for r in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    return "\n".join(lines) + "\n"


def _graph_table(sec: dict) -> str:
    rows = [
        [
            f"E{v['id']}",
            v["self_intersection"],
            v["N"],
            v["k"],
            v["r"],
            "yes" if v["rupture"] else "",
            "yes" if v["satellite"] else "",
            " ".join(f"{w}:{d}" for w, d in v["decorations"].items()),
        ]
        for v in sec["vertices"]
    ]
    text = _rows(["vertex", "E^2", "N", "k", "r", "rupture", "satellite", "decorations"], rows)
    arrows = ", ".join(f"E{a['host']}(N={a['N']})" for a in sec["arrowheads"])
    return text + f"arrowheads: {arrows}\n"


def _roots_table(sec: dict) -> str:
    rows = []
    for e in sec["roots"]:
        where = ", ".join(f"{s['divisor'] or '-'}[{s['criterion']}]" for s in e["sources"])
        rows.append([e["root"], e["multiplicity"], where])
    text = _rows(["root", "mult", "sources"], rows)
    if "diagnostics" in sec:
        diag = [[d["candidate"], d["divisor"], d["v"], d["nonintegral"]] for d in sec["diagnostics"]]
        text += "\nunclassified candidates\n" + _rows(["candidate", "divisor", "v", "non-integral"], diag)
    return text


def _jumping_table(sec: dict) -> str:
    rows = [
        [j["value"], " ".join(j["support"]), j["case"], j["root"] or "MISSING", j["multiplicity"]]
        for j in sec["jumping_numbers"]
    ]
    return _rows(["lambda", "support", "case", "root", "mult"], rows) + f"matched {sec['matched']}/{sec['total']}\n"


def _zeta_table(sec: dict) -> str:
    rows = [
        [p["location"], p["order"], "; ".join(" ".join(w) for w in p["witnesses"]), p["root_multiplicity"] or "MISSING"]
        for p in sec["poles"]
    ]
    agree = "yes" if sec["two_path_agreement"] else "NO"
    return _rows(["pole", "order", "witnesses", "root mult"], rows) + f"rational function agrees: {agree}\n"


def _load(path: str, precheck=None):
    return documents.load_graph(_read(path), precheck)


format_option = click.option("--format", "fmt", type=click.Choice(["json", "table"]), default="json", show_default=True)
out_option = click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="Write the report here.")


@click.group()
@click.version_option(package_name="artifact")
def cli() -> None:
    """Bernstein-Sato roots, jumping numbers and zeta poles of plane curves."""


@cli.command()
@click.argument("input_path", type=click.Path(dir_okay=False))
@format_option
@out_option
def resolve(input_path, fmt, out):
    """Minimal log resolution graph with numerical data."""
    g = _load(input_path)
    sec = _guarded(g, lambda: documents.graph_section(g))
    _emit({"graph": sec}, _graph_table(sec), fmt, out)


@cli.command()
@click.argument("input_path", type=click.Path(dir_okay=False))
@format_option
@out_option
def validate(input_path, fmt, out):
    """Check graph invariants; exit 1 when any fails."""
    pre: list = []
    g = _load(input_path, pre)
    if g is None:
        report = {"valid": False, "failures": [{"invariant": a, "location": b} for a, b in pre]}
    else:
        report = _guarded(g, lambda: validate_graph(g).to_dict())
    lines = ["valid" if report["valid"] else "INVALID"]
    lines += [f"  {f['invariant']}: {f['location']}" for f in report["failures"]]
    _emit({"validation": report}, "\n".join(lines) + "\n", fmt, out)
    if not report["valid"]:
        sys.exit(1)


@cli.command()
@click.argument("input_path", type=click.Path(dir_okay=False))
@format_option
@out_option
@click.option("--diagnostics", is_flag=True, help="Include candidates no criterion decides.")
@click.option("--no-certificates", is_flag=True, help="Skip chain and residue certificates.")
def roots(input_path, fmt, out, diagnostics, no_certificates):
    """Topologically determined roots with multiplicities."""
    g = _load(input_path)
    sec = _guarded(g, lambda: documents.roots_section(g, diagnostics, not no_certificates))
    _emit(sec, _roots_table(sec), fmt, out)


@cli.command()
@click.argument("input_path", type=click.Path(dir_okay=False))
@format_option
@out_option
def jumping(input_path, fmt, out):
    """Jumping numbers in (0,1) and their matching roots."""
    g = _load(input_path)
    sec = _guarded(g, lambda: documents.jumping_section(g))
    _emit({"jumping": sec}, _jumping_table(sec), fmt, out)


@cli.command()
@click.argument("input_path", type=click.Path(dir_okay=False))
@format_option
@out_option
def zeta(input_path, fmt, out):
    """Topological zeta function poles with orders."""
    g = _load(input_path)
    sec = _guarded(g, lambda: documents.zeta_section(g))
    _emit({"zeta": sec}, _zeta_table(sec), fmt, out)


@cli.command()
@click.argument("input_path", type=click.Path(dir_okay=False), required=False)
@format_option
@out_option
@click.option("--random", "use_random", is_flag=True, help="Audit random curves instead of a file.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--count", type=int, default=20, show_default=True)
def audit(input_path, fmt, out, use_random, seed, count):
    """Check that jumping numbers and zeta poles appear among the roots."""
    if use_random == (input_path is not None):
        raise InputError("", "give an input file or --random, not both")
    if input_path is not None:
        g = _load(input_path)
        sec = _guarded(g, lambda: documents.audit_section(g))
        _emit({"audit": sec}, sec["summary"] + "\n", fmt, out)
        failed = not sec["pass"]
    else:
        rng = random.Random(seed)
        results = []
        for _ in range(count):
            curve = random_curve(rng)
            g = build_from_curve(curve)
            sec = _guarded(g, lambda: documents.audit_section(g))
            results.append({"curve": documents.curve_to_document(curve), "pass": sec["pass"], "summary": sec["summary"]})
        failed = not all(r["pass"] for r in results)
        passed = sum(r["pass"] for r in results)
        summary = f"random audit (seed {seed}): {passed}/{count} curves PASS"
        table = "\n".join(r["summary"] for r in results) + f"\n{summary}\n"
        _emit({"audit": {"seed": seed, "count": count, "summary": summary, "curves": results}}, table, fmt, out)
    if failed:
        sys.exit(2)


def main(argv=None) -> None:
    try:
        cli.main(args=argv, prog_name="plane-bs", standalone_mode=False)
    except InputError as exc:
        click.echo(f"input error at {exc.pointer or '/'}: {exc.message}", err=True)
        sys.exit(1)
    except InternalFailure as exc:
        click.echo(f"internal invariant violation: {exc}", err=True)
        if exc.dump is not None:
            click.echo(json.dumps({"graph": exc.dump}, indent=2), err=True)
        sys.exit(2)
    except click.exceptions.Abort:
        sys.exit(1)
    except click.ClickException as exc:
        exc.show()
        sys.exit(1)
    except SystemExit:
        raise


if __name__ == "__main__":
    main()
