"""Indexed rewrite systems and their text format.

The format is COPS-style ``(VAR ...)`` / ``(RULES ...)`` blocks with an
optional rule index glued to the arrow, ``l ->2 r``.  A missing index
defaults to 1.  ``(SIG ...)`` and ``(COMMENT ...)`` are accepted;
conditional rules, ``THEORY`` and ``STRATEGY`` blocks are rejected.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Tuple

from .terms import App, Term, Var, fresh_name, iter_subterms, rename_vars, var_list, variables


class TrsError(ValueError):
    """Input error; ``line``/``col`` are 1-based when known."""

    def __init__(self, msg: str, line: Optional[int] = None, col: Optional[int] = None):
        where = f"line {line}, column {col}: " if line is not None else ""
        super().__init__(where + msg)
        self.line = line
        self.col = col


class TrsSyntaxError(TrsError):
    pass


class IllFormedRule(TrsError):
    pass


class ArityConflict(TrsError):
    pass


@dataclass(frozen=True)
class Rule:
    lhs: Term
    rhs: Term
    index: int = 1

    def __post_init__(self):
        if type(self.lhs) is Var:
            raise IllFormedRule(f"lefthand side of {self} is a variable")
        extra = variables(self.rhs) - variables(self.lhs)
        if extra:
            raise IllFormedRule(f"rule {self}: righthand side variables {sorted(extra)} not in lefthand side")
        if self.index < 0:
            raise IllFormedRule(f"rule {self}: negative index")

    def __str__(self):
        return f"{self.lhs} ->{self.index} {self.rhs}"

    def variables(self) -> set:
        return variables(self.lhs)

    def renamed(self, avoid: Iterable[str]) -> "Rule":
        """Copy whose variables avoid ``avoid`` (primes are appended)."""
        taken = set(avoid)
        mapping = {}
        for x in var_list(self.lhs):
            if x in taken:
                y = fresh_name(x, taken | set(mapping.values()) | self.variables())
                mapping[x] = y
        if not mapping:
            return self
        return Rule(rename_vars(self.lhs, mapping), rename_vars(self.rhs, mapping), self.index)


@dataclass(frozen=True)
class Trs:
    rules: Tuple[Rule, ...] = ()
    declared: Tuple[Tuple[str, int], ...] = ()
    signature: Dict[str, int] = field(init=False, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        sig: Dict[str, int] = dict(self.declared)
        for r in self.rules:
            for side in (r.lhs, r.rhs):
                for _, s in iter_subterms(side):
                    if type(s) is App:
                        known = sig.setdefault(s.name, s.arity)
                        if known != s.arity:
                            raise ArityConflict(f"symbol {s.name} used with arities {known} and {s.arity}")
        object.__setattr__(self, "signature", sig)

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def variables(self) -> set:
        return set().union(*(r.variables() for r in self.rules)) if self.rules else set()

    def defined_symbols(self) -> set:
        """Root symbols of lefthand sides."""
        return {(r.lhs.name, r.lhs.arity) for r in self.rules}

    def rule_label(self, k: int) -> str:
        """1-based rule name used in reports."""
        return f"rule {k + 1}"


# -- tokenizer -----------------------------------------------------------------

_TOK = re.compile(
    r"(?P<ws>\s+)|(?P<arrow>->(?P<idx>\d+)?)|(?P<id>[A-Za-z0-9_][A-Za-z0-9_']*)|(?P<sym>[(),|=])"
)


@dataclass(frozen=True)
class Token:
    kind: str   # "id", "arrow", "(", ")", ",", "|", "eof"
    text: str
    line: int
    col: int
    index: Optional[int] = None


_COMMENT = re.compile(r"\(\s*COMMENT\b")


def tokenize(text: str) -> List[Token]:
    out: List[Token] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOK.match(text, pos)
        if m is None:
            raise TrsSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        col = pos - line_start + 1
        c = _COMMENT.match(text, pos)
        if c is not None:
            # free text up to the matching parenthesis
            end, depth = c.end(), 1
            while depth:
                if end >= len(text):
                    raise TrsSyntaxError("unterminated COMMENT block", line, col)
                depth += {"(": 1, ")": -1}.get(text[end], 0)
                end += 1
            chunk = text[pos:end]
            if "\n" in chunk:
                line += chunk.count("\n")
                line_start = pos + chunk.rindex("\n") + 1
            pos = end
            continue
        if m.group("ws") is not None:
            chunk = m.group("ws")
            nl = chunk.count("\n")
            if nl:
                line += nl
                line_start = pos + chunk.rindex("\n") + 1
        elif m.group("arrow") is not None:
            idx = m.group("idx")
            out.append(Token("arrow", m.group(0), line, col, int(idx) if idx else None))
        elif m.group("id") is not None:
            out.append(Token("id", m.group(0), line, col))
        else:
            out.append(Token(m.group(0), m.group(0), line, col))
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


class _Parser:
    def __init__(self, toks: List[Token], vars_: set):
        self.toks = toks
        self.i = 0
        self.vars = vars_

    def peek(self) -> Token:
        return self.toks[self.i]

    def next(self) -> Token:
        t = self.toks[self.i]
        self.i += 1
        return t

    def expect(self, kind: str) -> Token:
        t = self.next()
        if t.kind != kind:
            raise TrsSyntaxError(f"expected {kind!r}, got {t.text or 'end of input'!r}", t.line, t.col)
        return t

    def term(self) -> Term:
        t = self.next()
        if t.kind != "id":
            raise TrsSyntaxError(f"expected a term, got {t.text or 'end of input'!r}", t.line, t.col)
        if self.peek().kind == "(":
            if t.text in self.vars:
                raise TrsSyntaxError(f"variable {t.text} applied to arguments", t.line, t.col)
            self.next()
            args = []
            if self.peek().kind == ")":
                self.next()
                return App(t.text, ())
            while True:
                args.append(self.term())
                sep = self.next()
                if sep.kind == ")":
                    break
                if sep.kind != ",":
                    raise TrsSyntaxError(f"expected ',' or ')', got {sep.text or 'end of input'!r}",
                                         sep.line, sep.col)
            return App(t.text, tuple(args))
        return Var(t.text) if t.text in self.vars else App(t.text, ())


def parse_term(text: str, vars_: Iterable[str] = ()) -> Term:
    """Parse a single term such as ``f(x,c(x))``."""
    p = _Parser(tokenize(text), set(vars_))
    t = p.term()
    end = p.peek()
    if end.kind != "eof":
        raise TrsSyntaxError(f"trailing input {end.text!r}", end.line, end.col)
    return t


def _skip_block(p: _Parser) -> None:
    depth = 1
    while depth:
        t = p.next()
        if t.kind == "eof":
            raise TrsSyntaxError("unbalanced parentheses", t.line, t.col)
        depth += {"(": 1, ")": -1}.get(t.kind, 0)


def parse_trs(text: str) -> Trs:
    toks = tokenize(text)
    # VAR blocks may follow RULES in COPS files: collect them first.
    vars_: set = set()
    for k, t in enumerate(toks[:-1]):
        if t.kind == "(" and toks[k + 1].kind == "id" and toks[k + 1].text == "VAR":
            j = k + 2
            while toks[j].kind == "id":
                vars_.add(toks[j].text)
                j += 1
    p = _Parser(toks, vars_)
    rules: List[Rule] = []
    declared: List[Tuple[str, int]] = []
    while p.peek().kind != "eof":
        p.expect("(")
        head = p.expect("id")
        if head.text == "VAR":
            while p.peek().kind == "id":
                p.next()
            p.expect(")")
        elif head.text == "RULES":
            while p.peek().kind != ")":
                start = p.peek()
                lhs = p.term()
                arrow = p.next()
                if arrow.kind != "arrow":
                    raise TrsSyntaxError(f"expected '->', got {arrow.text or 'end of input'!r}",
                                         arrow.line, arrow.col)
                rhs = p.term()
                if p.peek().kind == "|":
                    bar = p.peek()
                    raise TrsSyntaxError("conditional rules are not supported", bar.line, bar.col)
                index = 1 if arrow.index is None else arrow.index
                try:
                    rules.append(Rule(lhs, rhs, index))
                except IllFormedRule as e:
                    raise IllFormedRule(str(e), start.line, start.col) from None
            p.expect(")")
        elif head.text == "SIG":
            while p.peek().kind == "(":
                p.next()
                name = p.expect("id")
                ar = p.expect("id")
                if not ar.text.isdigit():
                    raise TrsSyntaxError("expected arity", ar.line, ar.col)
                declared.append((name.text, int(ar.text)))
                p.expect(")")
            p.expect(")")
        elif head.text == "COMMENT":
            _skip_block(p)
        elif head.text in ("THEORY", "STRATEGY", "CONDITIONTYPE"):
            raise TrsSyntaxError(f"{head.text} blocks are not supported", head.line, head.col)
        else:
            raise TrsSyntaxError(f"unknown block {head.text!r}", head.line, head.col)
    return Trs(tuple(rules), tuple(declared))


def format_trs(trs: Trs) -> str:
    vs = []
    for r in trs.rules:
        for x in var_list(r.lhs):
            if x not in vs:
                vs.append(x)
    lines = []
    if vs:
        lines.append(f"(VAR {' '.join(vs)})")
    lines.append("(RULES")
    for r in trs.rules:
        lines.append(f"  {r.lhs} ->{r.index} {r.rhs}")
    lines.append(")")
    return "\n".join(lines) + "\n"


def load_trs(path) -> Trs:
    with open(path, encoding="utf-8") as fh:
        return parse_trs(fh.read())
