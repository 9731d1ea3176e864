"""Command-line driver.

Exit codes: 0 run completed (whatever the decision), 1 usage error,
2 unreadable or invalid input, 3 sweep budget exhausted, 4 a strict corpus
expectation failed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, dataclass, field
from typing import Optional

from . import __version__
from .catalog import CATALOG
from .closure_engine import ClosureConfig, run
from .graph import FORMATS, Graph, GraphError, guess_format, parse_graph, to_edge_list, to_graph6
from .hcp_model import build_hcp_exclusions
from .iso_model import IsoInstance, build_iso_exclusions
from .oracle import MAX_ORACLE_N, enumerate_open, verify_run
from .qmatrix import Counts, ExclusionSet, QMatrixError, init_q, initial_counts

EXIT_OK, EXIT_USAGE, EXIT_INPUT, EXIT_BUDGET, EXIT_CORPUS = 0, 1, 2, 3, 4
SCHEMA = 1


class InputError(Exception):
    """Bad input file; maps to exit code 2."""


def _counts_dict(c: Optional[Counts]) -> Optional[dict]:
    return None if c is None else {"p": c.p_nonzero, "v": c.v_size}


@dataclass
class RunReportDocument:
    instance_name: str
    model: str
    n: int
    anchor: Optional[int]
    counts_initial: dict
    counts_closed: dict
    decision: str
    witness: Optional[dict]
    counts_final: dict
    sweeps: int
    match_tests: int
    pairs_removed: int
    p_removed: int
    wall_time: float
    config: dict
    schema: int = SCHEMA

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> RunReportDocument:
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported report schema {d.get('schema')!r}")
        return cls(**d)

    @classmethod
    def from_json(cls, text: str) -> RunReportDocument:
        return cls.from_dict(json.loads(text))

    def lines(self) -> list[str]:
        ci, cc, cf = self.counts_initial, self.counts_closed, self.counts_final
        out = [
            f"instance        {self.instance_name} ({self.model}, n={self.n}"
            + (f", anchor {self.anchor})" if self.anchor is not None else ")"),
            f"initial p (|V|) {ci['p']} ({ci['v']})",
            f"after closure   {cc['p']} ({cc['v']})",
            f"decision        {self.decision}",
        ]
        if self.witness:
            out.append(f"witness         {self.witness['kind']} ({self.witness['a']}, {self.witness['b']})")
        out += [
            f"final p (|V|)   {cf['p']} ({cf['v']})",
            f"sweeps          {self.sweeps}",
            f"match tests     {self.match_tests}",
            f"wall time       {self.wall_time:.3f} s",
        ]
        return out


# ---------------------------------------------------------------- argument parsing


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _engine_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--overlay", choices=("double", "triple"), default="triple", help="overlay depth (default triple)")
    p.add_argument("--no-boolean-closure", action="store_true", help="skip the propagation rules between sweeps")
    p.add_argument("--companion-symmetry", action="store_true", help="tie each pair to its reversed-cycle partner")
    p.add_argument("--threads", type=int, default=1, metavar="K", help="workers per sweep (default 1)")
    p.add_argument("--max-sweeps", type=int, default=None, metavar="S", help="stop after S sweeps")
    p.add_argument("--seed", type=int, default=None, help="shuffle the block order with this seed")
    p.add_argument("--scan-until-stable", action="store_true", help="do not restart the inner triple scan after removals")
    p.add_argument("--json", action="store_true", help="machine-readable report on stdout")


def _graph_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=FORMATS, default=None, help="input format (default: guessed from the extension)")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="overlay-closure", description="Matching-based infeasibility detection for permutation programs.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check-hcp", help="Hamilton cycle model of one graph")
    p.add_argument("graph", help="graph file, or catalog:<name>")
    _graph_flags(p)
    p.add_argument("--anchor", type=int, default=None, metavar="V", help="cycle origin vertex (default: highest label)")
    p.add_argument("--export-exclusions", metavar="PATH", help="write the exclusion set to PATH")
    _engine_flags(p)

    p = sub.add_parser("check-iso", help="subgraph or graph isomorphism model")
    p.add_argument("pattern")
    p.add_argument("host")
    p.add_argument("--mode", choices=("subgraph", "iso"), default="subgraph")
    _graph_flags(p)
    p.add_argument("--export-exclusions", metavar="PATH", help="write the exclusion set to PATH")
    _engine_flags(p)

    p = sub.add_parser("oracle", help="brute-force enumeration (n <= 9)")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("graph", nargs="?", help="graph file (Hamilton cycle model), or catalog:<name>")
    src.add_argument("--exclusions", metavar="PATH", help="exclusion-set file instead of a graph")
    _graph_flags(p)
    p.add_argument("--anchor", type=int, default=None, metavar="V")
    p.add_argument("--verify", action="store_true", help="also run the engine and check it against the enumeration")
    _engine_flags(p)

    p = sub.add_parser("corpus", help="run a manifest of instances with expected counts and decisions")
    p.add_argument("manifest")
    _engine_flags(p)

    p = sub.add_parser("catalog", help="print a built-in graph")
    p.add_argument("name", nargs="?", choices=sorted(CATALOG), help="omit to list names")
    p.add_argument("--format", choices=("graph6", "edges"), default="graph6")
    return ap


def config_from_args(args) -> ClosureConfig:
    if args.threads < 1:
        raise argparse.ArgumentTypeError("--threads must be at least 1")
    if args.max_sweeps is not None and args.max_sweeps < 1:
        raise argparse.ArgumentTypeError("--max-sweeps must be at least 1")
    return ClosureConfig(
        overlay_depth=args.overlay,
        boolean_closure_enabled=not args.no_boolean_closure,
        companion_symmetry=args.companion_symmetry,
        max_sweeps=args.max_sweeps,
        worker_count=args.threads,
        sweep_order="row_major" if args.seed is None else "shuffled",
        seed=args.seed or 0,
        restart_inner=not args.scan_until_stable,
    )


# ---------------------------------------------------------------- model building


def load_graph(path: str, fmt: Optional[str] = None, anchor: Optional[int] = None, require_connected: bool = True) -> Graph:
    if path.startswith("catalog:"):
        name = path.split(":", 1)[1]
        if name not in CATALOG:
            raise InputError(f"unknown catalog graph {name!r}")
        g = CATALOG[name]()
    else:
        try:
            with open(path, "rb") as fh:
                data = fh.read()
        except OSError as exc:
            raise InputError(f"cannot read {path}: {exc.strerror}") from None
        name = os.path.splitext(os.path.basename(path))[0]
        g = parse_graph(data, fmt or guess_format(path), name=name, require_connected=require_connected)
    if anchor is not None:
        g = g.with_anchor(anchor)
    return g


def run_model(name: str, model: str, n: int, anchor: Optional[int], e: ExclusionSet, cfg: ClosureConfig):
    counts0 = initial_counts(n, e)
    q = init_q(n, e, closure=cfg.boolean_closure_enabled)
    closed = q.counts()
    decision, report = run(q, cfg)
    doc = RunReportDocument(
        instance_name=name,
        model=model,
        n=n,
        anchor=anchor,
        counts_initial=_counts_dict(counts0),
        counts_closed=_counts_dict(closed),
        decision=decision.kind,
        witness=decision.witness.to_dict() if decision.witness else None,
        counts_final=_counts_dict(q.counts()),
        sweeps=report.sweeps,
        match_tests=report.match_tests,
        pairs_removed=report.pairs_removed,
        p_removed=report.p_removed,
        wall_time=round(report.wall_time, 6),
        config=cfg.to_dict(),
    )
    return doc, q, decision


def hcp_document(g: Graph, cfg: ClosureConfig, export: Optional[str] = None):
    e = build_hcp_exclusions(g)
    if export:
        _write(export, e.dumps())
    return run_model(g.name or "graph", "hcp", g.vertex_count - 1, g.anchor, e, cfg)


def _write(path: str, text: str) -> None:
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc.strerror}") from None


def _emit(doc: RunReportDocument, as_json: bool) -> None:
    print(doc.to_json() if as_json else "\n".join(doc.lines()))


def _exit_for(doc: RunReportDocument) -> int:
    return EXIT_BUDGET if doc.decision == "budget_exhausted" else EXIT_OK


# ---------------------------------------------------------------- commands


def cmd_check_hcp(args) -> int:
    g = load_graph(args.graph, args.format, args.anchor)
    doc, _, _ = hcp_document(g, config_from_args(args), args.export_exclusions)
    _emit(doc, args.json)
    return _exit_for(doc)


def cmd_check_iso(args) -> int:
    f = load_graph(args.pattern, args.format, require_connected=False)
    g = load_graph(args.host, args.format, require_connected=False)
    inst = IsoInstance.build(f.adjacency, g.adjacency, args.mode)
    e = build_iso_exclusions(inst)
    if args.export_exclusions:
        _write(args.export_exclusions, e.dumps())
    model = "iso" if args.mode == "iso" else "subiso"
    doc, _, _ = run_model(f"{f.name}-in-{g.name}", model, inst.m, None, e, config_from_args(args))
    _emit(doc, args.json)
    return _exit_for(doc)


def cmd_oracle(args) -> int:
    if args.exclusions:
        try:
            with open(args.exclusions) as fh:
                e = ExclusionSet.loads(fh.read())
        except OSError as exc:
            raise InputError(f"cannot read {args.exclusions}: {exc.strerror}") from None
        name, anchor = os.path.basename(args.exclusions), None
    else:
        g = load_graph(args.graph, args.format, args.anchor)
        if g.vertex_count - 1 > MAX_ORACLE_N:
            raise InputError(f"oracle is limited to n <= {MAX_ORACLE_N}; {g.name} has n = {g.vertex_count - 1}")
        e = build_hcp_exclusions(g)
        name, anchor = g.name, g.anchor
    n = e.n
    if n > MAX_ORACLE_N:
        raise InputError(f"oracle is limited to n <= {MAX_ORACLE_N}, got n = {n}")
    res = enumerate_open(n, e)
    out = {"schema": SCHEMA, "instance_name": name, "anchor": anchor, **res.to_dict()}
    if args.verify:
        doc, q, decision = run_model(name, "hcp" if anchor else "exclusions", n, anchor, e, config_from_args(args))
        verdict = verify_run(n, e, q, decision, res)
        out["engine_decision"] = decision.kind
        out["verdict"] = verdict.describe()
        out["consistent"] = verdict.consistent
    if args.json:
        print(json.dumps(out, sort_keys=True, indent=2))
    else:
        for k in ("instance_name", "n", "feasible", "surviving_permutations", "open_pairs", "open_p", "engine_decision", "verdict"):
            if k in out:
                print(f"{k:<24}{out[k]}")
    if args.verify and not out["consistent"]:
        return EXIT_CORPUS
    return EXIT_OK


@dataclass
class ManifestRow:
    name: str
    path: str
    expected_p: Optional[int]
    expected_v: Optional[int]
    expected_decision: str
    strict: bool = False
    lineno: int = 0


def parse_manifest(text: str, base: str = ".") -> list[ManifestRow]:
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if len(tok) not in (5, 6) or (len(tok) == 6 and tok[5] != "strict"):
            raise InputError(f"manifest line {lineno}: expected 'name path expected_p expected_v expected_decision [strict]'")
        try:
            p = None if tok[2] == "-" else int(tok[2].replace(",", ""))
            v = None if tok[3] == "-" else int(tok[3].replace(",", ""))
        except ValueError:
            raise InputError(f"manifest line {lineno}: counts must be integers or '-'") from None
        if tok[4] not in ("infeasible", "undecided"):
            raise InputError(f"manifest line {lineno}: decision must be infeasible or undecided")
        path = tok[1] if tok[1].startswith("catalog:") or os.path.isabs(tok[1]) else os.path.join(base, tok[1])
        rows.append(ManifestRow(tok[0], path, p, v, tok[4], len(tok) == 6, lineno))
    return rows


@dataclass
class CorpusResult:
    row: ManifestRow
    counts: Optional[tuple] = None
    count_anchor: Optional[int] = None
    counts_ok: Optional[bool] = None
    decision: Optional[str] = None
    decision_ok: Optional[bool] = None
    error: Optional[str] = None
    report: Optional[dict] = field(default=None, repr=False)

    @property
    def passed(self) -> bool:
        return self.error is None and self.counts_ok is not False and bool(self.decision_ok)


def run_corpus_row(row: ManifestRow, cfg: ClosureConfig) -> CorpusResult:
    """Counts at the default anchor; loose rows fall back to the first matching anchor."""
    res = CorpusResult(row)
    try:
        g = load_graph(row.path)
        doc, _, _ = hcp_document(g, cfg)
    except (InputError, GraphError, QMatrixError) as exc:
        res.error = str(exc)
        return res
    res.report = doc.to_dict()
    res.decision = doc.decision
    res.decision_ok = doc.decision == row.expected_decision
    got = (doc.counts_initial["p"], doc.counts_initial["v"])
    res.counts, res.count_anchor = got, g.anchor
    want = (row.expected_p, row.expected_v)

    def match(c):
        return all(w is None or w == x for w, x in zip(want, c))

    res.counts_ok = match(got)
    if not res.counts_ok and not row.strict:
        n = g.vertex_count - 1
        for a in range(1, g.vertex_count + 1):
            c = tuple(initial_counts(n, build_hcp_exclusions(g.with_anchor(a))))
            if match(c):
                res.counts, res.count_anchor, res.counts_ok = c, a, True
                break
    return res


def cmd_corpus(args) -> int:
    try:
        with open(args.manifest) as fh:
            rows = parse_manifest(fh.read(), os.path.dirname(os.path.abspath(args.manifest)))
    except OSError as exc:
        raise InputError(f"cannot read {args.manifest}: {exc.strerror}") from None
    cfg = config_from_args(args)
    results = []
    strict_fail = False
    if not args.json:
        print(f"{'instance':<14}{'expected':>22}{'actual':>22}{'anchor':>8}  {'decision':<18}result")
    for row in rows:
        r = run_corpus_row(row, cfg)
        results.append(r)
        if row.strict and not r.passed:
            strict_fail = True
        if args.json:
            continue
        want = f"{_fmt(row.expected_p)} ({_fmt(row.expected_v)})"
        if r.error:
            print(f"{row.name:<14}{want:>22}{'error':>22}{'':>8}  {'':<18}ERROR {r.error}")
            continue
        got = f"{r.counts[0]} ({r.counts[1]})"
        verdict = "PASS" if r.passed else "FAIL"
        print(f"{row.name:<14}{want:>22}{got:>22}{r.count_anchor:>8}  {r.decision:<18}{verdict}{' strict' if row.strict else ''}")
    if args.json:
        print(json.dumps(
            [{"name": r.row.name, "passed": r.passed, "count_anchor": r.count_anchor, "error": r.error, "report": r.report} for r in results],
            sort_keys=True, indent=2,
        ))
    return EXIT_CORPUS if strict_fail else EXIT_OK


def _fmt(x: Optional[int]) -> str:
    return "-" if x is None else str(x)


def cmd_catalog(args) -> int:
    if args.name is None:
        print("\n".join(sorted(CATALOG)))
        return EXIT_OK
    g = CATALOG[args.name]()
    sys.stdout.write(to_graph6(g) + "\n" if args.format == "graph6" else to_edge_list(g))
    return EXIT_OK


COMMANDS = {
    "check-hcp": cmd_check_hcp,
    "check-iso": cmd_check_iso,
    "oracle": cmd_oracle,
    "corpus": cmd_corpus,
    "catalog": cmd_catalog,
}


def main(argv: Optional[list[str]] = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except argparse.ArgumentTypeError as exc:
        print(f"overlay-closure: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InputError, GraphError, QMatrixError) as exc:
        code = getattr(exc, "code", "input")
        print(f"overlay-closure: {code} error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
