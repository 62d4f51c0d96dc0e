"""Command line entry point.

Exit codes: 0 CONFLUENT, 1 NON-CONFLUENT, 2 MAYBE, 3 input or usage error.
Predicate subcommands (layered, rankcheck, unify, congruent) exit 0 for
yes and 1 for no.
"""
from __future__ import annotations

import argparse
import json
import os
import re
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional

from . import analysis as an
from .cyclic import canonical_cyclic_unifier, congruent
from .layering import NotLayered, Ranker, check_dlo, check_rank_nonincreasing
from .report import render_json, render_text, to_dict
from .subrewriting import DEFAULT_EQ_DEPTH, all_sub_rewrites, sub_rewrites_at
from .terms import InvalidPosition, format_position, parse_position
from .trs import TrsError, load_trs, parse_term, parse_trs
from .unification import unify

EXIT = {an.CONFLUENT: 0, an.NON_CONFLUENT: 1, an.MAYBE: 2}
USAGE_ERROR = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_help(sys.stderr)
        self.exit(USAGE_ERROR, f"{self.prog}: error: {message}\n")


def _bounds(p: argparse.ArgumentParser) -> None:
    d = an.AnalysisConfig()
    p.add_argument("--eq-depth", type=int, default=d.eq_depth, help="equalization depth for sub-rewriting")
    p.add_argument("--diagram-depth", type=int, default=d.diagram_depth, help="steps per diagram side")
    p.add_argument("--realizer-depth", type=int, default=d.realizer_depth, help="closure depth for realizer candidates")
    p.add_argument("--node-bound", type=int, default=d.node_bound, help="terms explored per search")
    p.add_argument("--assume-rank-nonincreasing", action="store_true",
                   help="skip the rank condition (the verdict is then flagged)")


def _fmt(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("text", "json"), default="text")


def _config(args) -> an.AnalysisConfig:
    try:
        return an.AnalysisConfig(eq_depth=args.eq_depth, diagram_depth=args.diagram_depth,
                                 realizer_depth=args.realizer_depth, node_bound=args.node_bound,
                                 assume_rank_nonincreasing=args.assume_rank_nonincreasing)
    except ValueError as e:
        raise UsageError(str(e)) from None


def _vars(text: Optional[str]) -> List[str]:
    return [v for v in re.split(r"[\s,]+", text or "") if v]


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="layerconf", description="Confluence analysis of layered term rewriting systems.")
    sub = ap.add_subparsers(dest="cmd", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("check", help="full confluence analysis")
    p.add_argument("file")
    _bounds(p)
    _fmt(p)

    p = sub.add_parser("ccp", help="list cyclic critical pairs with solved forms and unifiers")
    p.add_argument("file")
    _fmt(p)

    p = sub.add_parser("diagram", help="search a decreasing diagram for one pair, verbosely")
    p.add_argument("file")
    p.add_argument("--pair", type=int, required=True, help="1-based pair number as listed by ccp")
    _bounds(p)
    _fmt(p)

    p = sub.add_parser("layered", help="decide layeredness and report overlap violations")
    p.add_argument("file")
    _fmt(p)

    p = sub.add_parser("rank", help="rank of a term")
    p.add_argument("file")
    p.add_argument("term")

    p = sub.add_parser("rankcheck", help="sufficient check for rank non-increase")
    p.add_argument("file")
    _fmt(p)

    p = sub.add_parser("unify", help="solve t1 = t2 by the cyclic unification rules")
    p.add_argument("t1")
    p.add_argument("t2")
    p.add_argument("--vars", default="", help="comma separated variable names")

    p = sub.add_parser("congruent", help="decide u =cc v modulo ground-like equations")
    p.add_argument("u")
    p.add_argument("v")
    p.add_argument("--eqs", help="file with one 's = t' equation per line")
    p.add_argument("--vars", default="", help="names to read as variables (treated as constants)")

    p = sub.add_parser("subrewrite", help="list sub-rewriting steps of a term")
    p.add_argument("file")
    p.add_argument("term")
    p.add_argument("--pos", help="restrict to this position, e.g. 1.2 (root: Λ)")
    p.add_argument("--depth", type=int, default=DEFAULT_EQ_DEPTH, help="equalization depth")

    p = sub.add_parser("corpus", help="check every .trs file in a directory")
    p.add_argument("dir")
    p.add_argument("--jobs", type=int, default=1)
    _bounds(p)
    _fmt(p)
    return ap


# -- subcommands -----------------------------------------------------------------------

def cmd_check(args, out) -> int:
    trs = load_trs(args.file)
    a = an.analyze(trs, _config(args))
    out.write(render_json(a) if args.format == "json" else render_text(a))
    return EXIT[a.verdict]


def _describe_peak(n: int, pk: an.CriticalPeak) -> List[str]:
    sf = pk.solved
    eqs = [f"{x}={u}" for x, u in sf.equations()]
    return [
        f"[{n}] rule {pk.inner + 1} into rule {pk.outer + 1} at {format_position(pk.position)}"
        f" (i={pk.i}, j={pk.j})",
        f"    {pk.outer_rule}   |   {pk.inner_rule}",
        f"    solved form: {' ∧ '.join(eqs) if eqs else '⊤'}  parameters: {{{', '.join(sorted(sf.parameters))}}}",
        f"    canonical cyclic unifier: {pk.unifier}",
        f"    peak: {pk.left} ← {pk.top} → {pk.right}",
    ]


def cmd_ccp(args, out) -> int:
    trs = load_trs(args.file)
    peaks = an.cyclic_critical_pairs(trs)
    if args.format == "json":
        rows = [{"id": n, "outer": pk.outer + 1, "inner": pk.inner + 1,
                 "position": format_position(pk.position),
                 "solved_form": str(pk.solved), "unifier": str(pk.unifier),
                 "top": str(pk.top), "left": str(pk.left), "right": str(pk.right)}
                for n, pk in enumerate(peaks, 1)]
        out.write(json.dumps(rows, indent=2, ensure_ascii=False) + "\n")
        return 0
    out.write(f"cyclic critical pairs: {len(peaks)}\n")
    for n, pk in enumerate(peaks, 1):
        out.write("\n".join(_describe_peak(n, pk)) + "\n")
    return 0


def cmd_diagram(args, out) -> int:
    trs = load_trs(args.file)
    peaks = an.cyclic_critical_pairs(trs)
    if not 1 <= args.pair <= len(peaks):
        raise UsageError(f"--pair must be between 1 and {len(peaks)}")
    cfg = _config(args)
    pk = peaks[args.pair - 1]
    layered = check_dlo(trs).layered
    ranker = Ranker(trs, check=False) if layered else an._LabelOnly(trs)
    d = an.find_diagram(pk, trs, cfg, ranker)
    if args.format == "json":
        a = an.Analysis(trs, cfg, check_dlo(trs), None, [an.analyze_peak(pk, trs, cfg, ranker if layered else None)],
                        "", "")
        row = to_dict(a)["pairs"][0]
        row["id"] = args.pair
        out.write(json.dumps(row, indent=2, ensure_ascii=False) + "\n")
        return 0 if isinstance(d, an.DiagramEvidence) else 2
    out.write("\n".join(_describe_peak(args.pair, pk)) + "\n")
    if not layered:
        out.write("note: system not layered, labels carry no rank\n")
    if isinstance(d, an.DiagramFailure):
        out.write(f"no diagram: {d.reason} ({d.explored} terms explored)\n")
        return 2
    for side, steps, start in (("left", d.left_steps, pk.left), ("right", d.right_steps, pk.right)):
        out.write(f"{side}: {start}\n")
        for st in steps:
            out.write(f"   →⟨{st.rank},{st.index}⟩ rule {st.rule + 1} at {format_position(st.position)}: {st.result}\n")
    eqs = ", ".join(f"{a} = {b}" for a, b in d.equations)
    out.write(f"middle: {d.s} =cc {d.t} modulo {{{eqs}}}\n")
    ok = an.check_decreasing(d.I, d.J, pk.i, pk.j, pk.context_has_vars)
    out.write(f"I = {d.I}  J = {d.J}  decreasing: {'yes' if ok else 'no'}\n")
    return 0


def cmd_layered(args, out) -> int:
    trs = load_trs(args.file)
    rep = check_dlo(trs)
    if args.format == "json":
        out.write(json.dumps({
            "layered": rep.layered, "overlay": rep.overlay,
            "strongly_non_overlapping": rep.strongly_non_overlapping,
            "violations": [v.describe(trs) for v in rep.violations]}, indent=2, ensure_ascii=False) + "\n")
    else:
        yn = lambda b: "yes" if b else "no"      # noqa: E731
        out.write(f"layered: {yn(rep.layered)}\noverlay: {yn(rep.overlay)}\n"
                  f"strongly non-overlapping: {yn(rep.strongly_non_overlapping)}\n")
        for v in rep.violations:
            out.write(f"violation: {v.describe(trs)}\n")
    return 0 if rep.layered else 1


def cmd_rank(args, out) -> int:
    trs = load_trs(args.file)
    t = parse_term(args.term, trs.variables())
    try:
        out.write(f"{Ranker(trs)(t)}\n")
    except NotLayered as e:
        raise UsageError(f"rank is defined for layered systems only: {e}") from None
    return 0


def cmd_rankcheck(args, out) -> int:
    trs = load_trs(args.file)
    rc = check_rank_nonincreasing(trs)
    if args.format == "json":
        out.write(json.dumps({"ok": rc.ok, "issues": [
            {"rule": i.rule + 1, "condition": i.condition, "detail": i.detail} for i in rc.issues]},
            indent=2, ensure_ascii=False) + "\n")
    else:
        out.write(f"rank non-increasing (sufficient check): {'yes' if rc.ok else 'no'}\n")
        for i in rc.issues:
            out.write(f"rule {i.rule + 1} fails condition ({i.condition}): {i.detail}\n")
    return 0 if rc.ok else 1


def cmd_unify(args, out) -> int:
    vs = _vars(args.vars)
    s, t = parse_term(args.t1, vs), parse_term(args.t2, vs)
    sf = unify(s, t)
    if sf is None:
        out.write("⊥ (not unifiable)\n")
        return 1
    kind = "finite" if sf.is_tree else "cyclic"
    out.write(f"solved form: {sf}\nparameters: {{{', '.join(sorted(sf.parameters))}}}\n"
              f"classification: {kind}\n")
    out.write(f"canonical cyclic unifier: {canonical_cyclic_unifier(sf)}\n")
    return 0


def _read_eqs(path: Optional[str], vs) -> list:
    if not path:
        return []
    eqs = []
    with open(path, encoding="utf-8") as fh:
        for n, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if line.count("=") != 1:
                raise TrsError("expected one '=' per equation", n, 1)
            a, b = line.split("=")
            eqs.append((parse_term(a, vs), parse_term(b, vs)))
    return eqs


def cmd_congruent(args, out) -> int:
    vs = _vars(args.vars)
    eqs = _read_eqs(args.eqs, vs)
    ok = congruent(parse_term(args.u, vs), parse_term(args.v, vs), eqs)
    out.write("congruent\n" if ok else "not congruent\n")
    return 0 if ok else 1


def cmd_subrewrite(args, out) -> int:
    trs = load_trs(args.file)
    t = parse_term(args.term, trs.variables())
    if args.depth < 0:
        raise UsageError("--depth must be non-negative")
    ranker = Ranker(trs, check=False) if check_dlo(trs).layered else None
    kw = dict(eq_depth=args.depth, rank_of=ranker)
    if args.pos is not None:
        steps = sub_rewrites_at(t, trs, parse_position(args.pos), **kw)
    else:
        steps = all_sub_rewrites(t, trs, **kw)
    out.write(f"sub-rewriting steps of {t}: {len(steps)}\n")
    for st in steps:
        label = f"⟨{st.label[0]},{st.label[1]}⟩" if st.label else f"rule {st.rule + 1}"
        out.write(f"  {label} at {format_position(st.position)}: {st.result}"
                  f"  (equalized in {len(st.equalization)} steps, fired {st.fired_redex})\n")
    return 0


_EXPECTED = re.compile(r"expected:\s*(NON-CONFLUENT|CONFLUENT|MAYBE)")


def _corpus_one(path: str, cfg: an.AnalysisConfig) -> dict:
    start = time.perf_counter()
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    m = _EXPECTED.search(text)
    row = {"file": os.path.basename(path), "expected": m.group(1) if m else None}
    try:
        a = an.analyze(parse_trs(text), cfg)
        row.update(verdict=a.verdict, pairs=len(a.results))
    except TrsError as e:
        row.update(verdict="INPUT-ERROR", pairs=None, error=str(e))
    row["time"] = round(time.perf_counter() - start, 4)
    return row


def cmd_corpus(args, out) -> int:
    if not os.path.isdir(args.dir):
        raise UsageError(f"{args.dir} is not a directory")
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    cfg = _config(args)
    files = sorted(os.path.join(args.dir, f) for f in os.listdir(args.dir) if f.endswith(".trs"))
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            rows = list(ex.map(_corpus_one, files, [cfg] * len(files)))
    else:
        rows = [_corpus_one(f, cfg) for f in files]
    mismatches = [r for r in rows if r["expected"] and r["expected"] != r["verdict"]]
    if args.format == "json":
        out.write(json.dumps(rows, indent=2) + "\n")
    else:
        w = max([len(r["file"]) for r in rows] + [4])
        out.write(f"{'file':<{w}}  {'verdict':<13}  {'#pairs':>6}  {'time':>8}\n")
        for r in rows:
            flag = "" if not r["expected"] or r["expected"] == r["verdict"] else f"  (expected {r['expected']})"
            pairs = "-" if r["pairs"] is None else r["pairs"]
            out.write(f"{r['file']:<{w}}  {r['verdict']:<13}  {pairs:>6}  {r['time']:>7.3f}s{flag}\n")
        out.write(f"{len(rows)} files, {len(mismatches)} unexpected verdicts\n")
    return 0 if not mismatches else 1


COMMANDS = {
    "check": cmd_check, "ccp": cmd_ccp, "diagram": cmd_diagram, "layered": cmd_layered,
    "rank": cmd_rank, "rankcheck": cmd_rankcheck, "unify": cmd_unify, "congruent": cmd_congruent,
    "subrewrite": cmd_subrewrite, "corpus": cmd_corpus,
}


def main(argv: Optional[List[str]] = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.cmd](args, out)
    except (TrsError, InvalidPosition, UsageError, OSError) as e:
        sys.stderr.write(f"layerconf: error: {e}\n")
        return USAGE_ERROR


if __name__ == "__main__":
    sys.exit(main())
