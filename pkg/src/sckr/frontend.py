"""Reader and writer for the textual ``.ckr`` format.

Grammar (whitespace-insensitive, ``%`` comments to end of line)::

    context c1 level 0.
    c0 < c1.
    module c1 { D(A => B). }
    module c0 { A(a). -B(a). }
"""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from .model import (SCKR, ContextStructure, NormalAxiom, QueryAtom, infer_symbols,
                    validate)

log = logging.getLogger(__name__)

KEYWORDS = frozenset({"context", "level", "module", "D", "and", "some", "only", "max1",
                      "o", "Dis", "Inv", "Irr", "eval", "evalr", "Top", "Bot"})

_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+|%[^\n]*)
  | (?P<nl>\n)
  | (?P<int>\d+(?![A-Za-z_]))
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*)
  | (?P<op>=>r|=>|!=|[=<.(),{}\-])
""", re.VERBOSE)


@dataclass(frozen=True)
class SourceDocument:
    text: str
    origin: str = "<stdin>"


class CkrSyntaxError(ValueError):
    def __init__(self, message: str, origin: str = "<stdin>", line: int = 0, col: int = 0):
        self.line, self.col, self.origin = line, col, origin
        where = f"{origin}:{line}:{col}: " if line else f"{origin}: "
        super().__init__(where + message)


class CkrValidationError(ValueError):
    def __init__(self, diagnostics: list[str]):
        self.diagnostics = diagnostics
        super().__init__("; ".join(diagnostics))


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(doc: SourceDocument) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    text = doc.text
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise CkrSyntaxError(f"unexpected character {text[pos]!r}", doc.origin,
                                 line, pos - line_start + 1)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            toks.append(_Tok(kind, m.group(), line, pos - line_start + 1))
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, doc: SourceDocument):
        self.doc = doc
        self.toks = _tokenize(doc)
        self.i = 0

    # token helpers
    def peek(self, k: int = 0) -> _Tok:
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.peek()
        raise CkrSyntaxError(msg, self.doc.origin, tok.line, tok.col)

    def take(self, text: str | None = None, kind: str | None = None) -> _Tok:
        tok = self.peek()
        if (text is not None and tok.text != text) or (kind is not None and tok.kind != kind):
            want = repr(text) if text is not None else kind
            self.error(f"expected {want}, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok

    def at(self, *texts: str) -> bool:
        return self.peek().text in texts and self.peek().kind in ("op", "name")

    def name(self) -> str:
        tok = self.peek()
        if tok.kind != "name" or tok.text in KEYWORDS:
            self.error(f"expected a name, found {tok.text or 'end of input'!r}")
        self.i += 1
        return tok.text

    # grammar
    def document(self):
        levels: dict[str, int] = {}
        covers: list[tuple[str, str]] = []
        modules: dict[str, list[NormalAxiom]] = {}
        while self.peek().kind != "eof":
            if self.peek().text == "context" and self.peek().kind == "name":
                self.take("context")
                c = self.name()
                self.take("level")
                lvl = int(self.take(kind="int").text)
                self.take(".")
                if c in levels and levels[c] != lvl:
                    self.error(f"context {c} declared twice with different levels")
                levels[c] = lvl
            elif self.peek().text == "module" and self.peek().kind == "name":
                self.take("module")
                c = self.name()
                self.take("{")
                axs = modules.setdefault(c, [])
                while not self.at("}"):
                    axs.append(self.axiom())
                self.take("}")
            else:
                lower = self.name()
                self.take("<")
                upper = self.name()
                self.take(".")
                covers.append((lower, upper))
        return levels, covers, modules

    def axiom(self) -> NormalAxiom:
        defeasible = False
        if self.peek().text == "D" and self.peek(1).text == "(":
            self.take("D")
            self.take("(")
            defeasible = True
        kind, args = self.core()
        if defeasible:
            self.take(")")
        self.take(".")
        return NormalAxiom(kind, tuple(args), defeasible)

    def core(self) -> tuple[str, list[str]]:
        tok = self.peek()
        t = tok.text
        if t == "-":
            self.take("-")
            p = self.name()
            self.take("(")
            a = self.name()
            if self.at(","):
                self.take(",")
                b = self.name()
                self.take(")")
                return "ntriple", [p, a, b]
            self.take(")")
            return "ninst", [p, a]
        if t == "{":
            self.take("{")
            a = self.name()
            self.take("}")
            self.take("=>")
            return "nom", [a, self.name()]
        if t in ("Dis", "Inv"):
            self.take(t)
            self.take("(")
            r = self.name()
            self.take(",")
            s = self.name()
            self.take(")")
            return t.lower(), [r, s]
        if t in ("Irr", "Top", "Bot"):
            self.take(t)
            self.take("(")
            x = self.name()
            self.take(")")
            return {"Irr": "irr", "Top": "top", "Bot": "bot"}[t], [x]
        if t in ("eval", "evalr"):
            self.take(t)
            self.take("(")
            p = self.name()
            self.take(",")
            c = self.name()
            self.take(")")
            if t == "eval":
                self.take("=>")
                return "evalc", [p, c, self.name()]
            self.take("=>r")
            return "evalr", [p, c, self.name()]
        first = self.name()
        nxt = self.peek().text
        if nxt == "(":
            self.take("(")
            a = self.name()
            if self.at(","):
                self.take(",")
                b = self.name()
                self.take(")")
                return "triple", [first, a, b]
            self.take(")")
            return "inst", [first, a]
        if nxt == "=":
            self.take("=")
            return "eq", [first, self.name()]
        if nxt == "!=":
            self.take("!=")
            return "neq", [first, self.name()]
        if nxt == "and":
            self.take("and")
            second = self.name()
            self.take("=>")
            return "subcnj", [first, second, self.name()]
        if nxt == "some":
            self.take("some")
            filler = self.name()
            self.take("=>")
            return "subex", [first, filler, self.name()]
        if nxt == "o":
            self.take("o")
            second = self.name()
            self.take("=>r")
            return "subrc", [first, second, self.name()]
        if nxt == "=>r":
            self.take("=>r")
            return "subr", [first, self.name()]
        if nxt == "=>":
            self.take("=>")
            if self.at("max1"):
                self.take("max1")
                return "leqone", [first, self.name()]
            second = self.name()
            if self.at("some"):
                self.take("some")
                self.take("{")
                a = self.name()
                self.take("}")
                return "supex", [first, second, a]
            if self.at("only"):
                self.take("only")
                return "forall", [first, second, self.name()]
            return "subc", [first, second]
        self.error(f"cannot parse axiom starting at {first!r}", tok)
        raise AssertionError  # unreachable


def parse(doc: SourceDocument | str) -> SCKR:
    """Parse and validate a document. Raises CkrSyntaxError or CkrValidationError."""
    if isinstance(doc, str):
        doc = SourceDocument(doc)
    try:
        levels, covers, modules = _Parser(doc).document()
    except RecursionError as exc:  # pragma: no cover - grammar is not recursive
        raise CkrSyntaxError(str(exc), doc.origin) from exc
    structure = ContextStructure(frozenset(levels), frozenset(covers), levels)
    mods = {c: tuple(axs) for c, axs in modules.items()}
    sckr = SCKR(structure, mods, infer_symbols(structure, mods))
    diags = validate(sckr)
    if diags:
        raise CkrValidationError(diags)
    for c, ax in sckr.axioms():
        if ax.kind == "eq":
            log.warning("equality assertion %s = %s at %s makes every model inconsistent",
                        ax.args[0], ax.args[1], c)
    return sckr


def format_axiom(ax: NormalAxiom) -> str:
    a = ax.args
    core = {
        "inst": lambda: f"{a[0]}({a[1]})",
        "ninst": lambda: f"-{a[0]}({a[1]})",
        "triple": lambda: f"{a[0]}({a[1]},{a[2]})",
        "ntriple": lambda: f"-{a[0]}({a[1]},{a[2]})",
        "eq": lambda: f"{a[0]} = {a[1]}",
        "neq": lambda: f"{a[0]} != {a[1]}",
        "nom": lambda: f"{{{a[0]}}} => {a[1]}",
        "top": lambda: f"Top({a[0]})",
        "bot": lambda: f"Bot({a[0]})",
        "subc": lambda: f"{a[0]} => {a[1]}",
        "subcnj": lambda: f"{a[0]} and {a[1]} => {a[2]}",
        "subex": lambda: f"{a[0]} some {a[1]} => {a[2]}",
        "supex": lambda: f"{a[0]} => {a[1]} some {{{a[2]}}}",
        "forall": lambda: f"{a[0]} => {a[1]} only {a[2]}",
        "leqone": lambda: f"{a[0]} => max1 {a[1]}",
        "subr": lambda: f"{a[0]} =>r {a[1]}",
        "subrc": lambda: f"{a[0]} o {a[1]} =>r {a[2]}",
        "dis": lambda: f"Dis({a[0]},{a[1]})",
        "inv": lambda: f"Inv({a[0]},{a[1]})",
        "irr": lambda: f"Irr({a[0]})",
        "evalc": lambda: f"eval({a[0]},{a[1]}) => {a[2]}",
        "evalr": lambda: f"evalr({a[0]},{a[1]}) =>r {a[2]}",
    }[ax.kind]()
    return f"D({core})" if ax.defeasible else core


def serialize(sckr: SCKR) -> str:
    st = sckr.structure
    lines = [f"context {c} level {st.level[c]}." for c in st.ordered()]
    lines += [f"{lo} < {hi}." for lo, hi in sorted(st.covers,
                                                   key=lambda e: (st.level[e[0]], e))]
    for c in st.ordered():
        axs = sckr.modules.get(c, ())
        if not axs:
            continue
        lines.append(f"module {c} {{")
        lines += [f"  {format_axiom(ax)}." for ax in axs]
        lines.append("}")
    return "\n".join(lines) + ("\n" if lines else "")


_QUERY = re.compile(r"^\s*([A-Za-z_][\w']*)\s*\(\s*(\??[A-Za-z_][\w']*)\s*"
                    r"(?:,\s*(\??[A-Za-z_][\w']*)\s*)?\)\s*@\s*([A-Za-z_][\w']*)\s*$")


def parse_query(text: str, allow_vars: bool = False) -> QueryAtom:
    """Parse ``A(a)@c`` or ``R(a,b)@c``; with ``allow_vars`` terms may be ``?x``."""
    m = _QUERY.match(text)
    if not m or (not allow_vars and "?" in text):
        raise CkrSyntaxError(f"malformed query {text!r}")
    pred, subj, obj, ctx = m.groups()
    return QueryAtom(ctx, subj, pred, obj)
