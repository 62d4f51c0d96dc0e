"""Text and JSON renderings of an analysis.

The JSON document is self-contained: it embeds the system, every cyclic
critical pair keyed by rule pair and position, and the evidence needed to
re-check each verdict without searching.
"""
from __future__ import annotations

import json
from typing import Dict, List

from .analysis import Analysis, LabelledStep, PeakResult
from .rewriting import Step
from .terms import Term, format_position
from .trs import format_trs

FORMAT = "layerconf-report/1"


def _step(st) -> Dict:
    out = {"from": str(st.source), "position": format_position(st.position), "rule": st.rule + 1}
    if isinstance(st, LabelledStep):
        out["index"] = st.index
        out["rank"] = st.rank
    out["to"] = str(st.result)
    return out


def _subst(s: Dict[str, Term]) -> Dict[str, str]:
    return {x: str(t) for x, t in sorted(s.items())}


def _pair(n: int, res: PeakResult) -> Dict:
    pk = res.peak
    sf = pk.solved
    d = {
        "id": n,
        "key": f"{pk.outer + 1}/{pk.inner + 1}@{format_position(pk.position)}",
        "outer": pk.outer + 1,
        "inner": pk.inner + 1,
        "position": format_position(pk.position),
        "outer_rule": str(pk.outer_rule),
        "inner_rule": str(pk.inner_rule),
        "variables": sorted(pk.variables()),
        "solved_form": {
            "finite": [[x, str(u)] for x, u in sf.finite],
            "cyclic": [[y, str(v)] for y, v in sf.cyclic],
            "parameters": sorted(sf.parameters),
        },
        "unifier": {"eta": _subst(pk.unifier.eta), "rs": [[y, str(v)] for y, v in pk.unifier.rs.rules]},
        "peak": {
            "top": str(pk.top),
            "left": str(pk.left),
            "right": str(pk.right),
            "i": pk.i,
            "j": pk.j,
            "context_has_vars": pk.context_has_vars,
        },
        "status": res.status,
    }
    ev: Dict = {"kind": res.status}
    if res.diagram is not None:
        dg = res.diagram
        ev.update({
            "left_steps": [_step(s) for s in dg.left_steps],
            "right_steps": [_step(s) for s in dg.right_steps],
            "s": str(dg.s),
            "t": str(dg.t),
            "equations": [[str(a), str(b)] for a, b in dg.equations],
            "I": dg.I,
            "J": dg.J,
        })
    if res.unrealizable is not None:
        un = res.unrealizable
        ev.update({"criterion": "inert-symbol", "rule": [un.rule[0], str(un.rule[1])],
                   "path": format_position(un.path), "symbols": list(un.symbols),
                   "explanation": un.describe()})
    if res.realizer is not None:
        ev["realizer"] = _subst(res.realizer.gamma)
        ev["joins"] = [[y, str(w)] for y, w in res.realizer.joins]
    if res.witness is not None:
        w = res.witness
        ev["witness"] = {
            "top": str(w.top),
            "left_steps": [_step(s) for s in w.left_steps],
            "right_steps": [_step(s) for s in w.right_steps],
            "v": str(w.v),
            "w": str(w.w),
            "separation": {"kind": w.separation.kind, "detail": w.separation.detail},
        }
    if res.note:
        ev["note"] = res.note
    d["evidence"] = ev
    return d


def to_dict(a: Analysis) -> Dict:
    cfg = a.config
    rc = a.rank_check
    return {
        "format": FORMAT,
        "verdict": a.verdict,
        "reason": a.reason,
        "warnings": list(a.warnings),
        "trs": format_trs(a.trs),
        "config": {
            "eq_depth": cfg.eq_depth,
            "diagram_depth": cfg.diagram_depth,
            "realizer_depth": cfg.realizer_depth,
            "node_bound": cfg.node_bound,
            "nf_depth": cfg.nf_depth,
            "realizer_candidates": cfg.realizer_candidates,
            "assume_rank_nonincreasing": cfg.assume_rank_nonincreasing,
        },
        "layering": {
            "layered": a.dlo.layered,
            "overlay": a.dlo.overlay,
            "strongly_non_overlapping": a.dlo.strongly_non_overlapping,
            "method": "linear unifiability of variable-disjoint linearizations",
            "violations": [{"outer": v.outer + 1, "position": format_position(v.position),
                            "inner": v.inner + 1, "failing": v.predicate,
                            "witness": _subst(v.witness)} for v in a.dlo.violations],
        },
        "rank_check": {
            "checked": rc is not None,
            "ok": rc.ok if rc is not None else None,
            "assumed": cfg.assume_rank_nonincreasing,
            "issues": [{"rule": i.rule + 1, "condition": i.condition, "detail": i.detail}
                       for i in (rc.issues if rc is not None else ())],
        },
        "pairs": [_pair(n, r) for n, r in enumerate(a.results, 1)],
    }


def render_json(a: Analysis) -> str:
    return json.dumps(to_dict(a), indent=2, ensure_ascii=False) + "\n"


def _chain(start: str, steps: List[Dict]) -> str:
    out = [start]
    for st in steps:
        label = f"⟨{st['rank']},{st['index']}⟩" if "index" in st else f"r{st['rule']}"
        out.append(f"→{label}@{st['position']} {st['to']}")
    return " ".join(out)


def render_text(a: Analysis) -> str:
    d = to_dict(a)
    lines = [f"verdict: {d['verdict']}", f"reason: {d['reason']}"]
    for w in d["warnings"]:
        lines.append(f"WARNING: {w}")
    lay = d["layering"]
    lines.append(f"layered: {'yes' if lay['layered'] else 'no'}"
                 f"  overlay: {'yes' if lay['overlay'] else 'no'}"
                 f"  strongly non-overlapping: {'yes' if lay['strongly_non_overlapping'] else 'no'}")
    for v in lay["violations"]:
        lines.append(f"  violation: rule {v['outer']} at {v['position']} overlapped by rule {v['inner']}: "
                     f"{v['failing']} fails")
    rc = d["rank_check"]
    if rc["checked"]:
        lines.append(f"rank non-increasing: {'yes' if rc['ok'] else 'no'}")
        for i in rc["issues"]:
            lines.append(f"  rule {i['rule']} fails condition ({i['condition']}): {i['detail']}")
    else:
        lines.append("rank non-increasing: not checked (system not layered)")
    lines.append(f"cyclic critical pairs: {len(d['pairs'])}")
    for p in d["pairs"]:
        pk = p["peak"]
        lines.append(f"[{p['id']}] rule {p['inner']} into rule {p['outer']} at {p['position']}"
                     f" (i={pk['i']}, j={pk['j']})")
        sf = p["solved_form"]
        eqs = [f"{x}={u}" for x, u in sf["finite"] + sf["cyclic"]]
        lines.append(f"    solved form: {' ∧ '.join(eqs) if eqs else '⊤'}"
                     f"  parameters: {{{', '.join(sf['parameters'])}}}")
        eta = ", ".join(f"{x}↦{u}" for x, u in p["unifier"]["eta"].items())
        rs = ", ".join(f"{y}→{v}" for y, v in p["unifier"]["rs"])
        lines.append(f"    canonical cyclic unifier: ⟨{{{eta}}}, {{{rs}}}⟩")
        lines.append(f"    peak: {pk['left']} ← {pk['top']} → {pk['right']}")
        ev = p["evidence"]
        if ev["kind"] == "diagram":
            lines.append(f"    diagram: {_chain(pk['left'], ev['left_steps'])}")
            lines.append(f"             {_chain(pk['right'], ev['right_steps'])}")
            lines.append(f"             {ev['s']} =cc {ev['t']}  I={ev['I']} J={ev['J']}")
        elif ev["kind"] == "unrealizable":
            lines.append(f"    unrealizable: {ev['explanation']}")
        elif ev["kind"] == "witness":
            wt = ev["witness"]
            g = ", ".join(f"{x}↦{u}" for x, u in ev["realizer"].items())
            lines.append(f"    realized by {{{g}}}")
            lines.append(f"    witness: {_chain(wt['top'], wt['left_steps'])}")
            lines.append(f"             {_chain(wt['top'], wt['right_steps'])}")
            lines.append(f"             {wt['v']} and {wt['w']} not joinable: {wt['separation']['detail']}")
        else:
            lines.append(f"    open: {ev.get('note', '')}")
    return "\n".join(lines) + "\n"
