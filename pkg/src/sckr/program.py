"""Datalog-with-weak-constraints programs: terms, rules, text emitter and reader.

Ground atoms are plain tuples ``(predicate, arg1, ...)``. Arguments are ``str``
(an original name, emitted double-quoted), ``int``, :class:`Sym` (a bare symbolic
constant such as ``main`` or ``subClass``) or :class:`Fn` (a compound
environment term such as ``nlit(a,A,c)``). Rule schemas may also contain
:class:`Var`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Union


@dataclass(frozen=True, order=True)
class Sym:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Var:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Fn:
    name: str
    args: tuple

    def __repr__(self):
        return f"{self.name}({','.join(map(repr, self.args))})"


Term = Union[str, int, Sym, Fn, Var]
Atom = tuple  # (predicate, *terms)

MAIN = Sym("main")


@dataclass(frozen=True)
class Rule:
    """``head :- pos, not neg, X != Y``; a constraint when ``head`` is None."""
    head: Atom | None
    pos: tuple[Atom, ...] = ()
    neg: tuple[Atom, ...] = ()
    neq: tuple[tuple[Term, Term], ...] = ()


@dataclass(frozen=True)
class WeakConstraint:
    body: tuple[Atom, ...]
    level: Term
    weight: int = 1


@dataclass
class Program:
    facts: list[Atom] = field(default_factory=list)
    rules: list[Rule] = field(default_factory=list)
    weak: list[WeakConstraint] = field(default_factory=list)

    def __eq__(self, other):
        if not isinstance(other, Program):
            return NotImplemented
        return (self.facts, self.rules, self.weak) == (other.facts, other.rules, other.weak)


def term_vars(t: Term) -> Iterable[Var]:
    if isinstance(t, Var):
        yield t
    elif isinstance(t, Fn):
        for a in t.args:
            yield from term_vars(a)


def atom_vars(a: Atom) -> set[Var]:
    return {v for t in a[1:] for v in term_vars(t)}


def check_safety(rule: Rule) -> list[Var]:
    """Variables of head, negative body or comparisons not bound by the positive body."""
    bound = set().union(*(atom_vars(a) for a in rule.pos)) if rule.pos else set()
    used = set()
    if rule.head is not None:
        used |= atom_vars(rule.head)
    for a in rule.neg:
        used |= atom_vars(a)
    for x, y in rule.neq:
        used |= set(term_vars(x)) | set(term_vars(y))
    return sorted(used - bound, key=lambda v: v.name)


# --- text emitter -----------------------------------------------------------

def _quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_term(t: Term) -> str:
    if isinstance(t, str):
        return _quote(t)
    if isinstance(t, bool):
        raise TypeError("booleans are not terms")
    if isinstance(t, int):
        return str(t)
    if isinstance(t, Sym):
        return t.name
    if isinstance(t, Var):
        return t.name
    if isinstance(t, Fn):
        return f"{t.name}({','.join(format_term(a) for a in t.args)})"
    raise TypeError(f"not a term: {t!r}")


def format_atom(a: Atom) -> str:
    if len(a) == 1:
        return a[0]
    return f"{a[0]}({','.join(format_term(t) for t in a[1:])})"


def format_rule(r: Rule) -> str:
    body = [format_atom(a) for a in r.pos]
    body += [f"{format_term(x)} != {format_term(y)}" for x, y in r.neq]
    body += [f"not {format_atom(a)}" for a in r.neg]
    if r.head is None:
        return f":- {', '.join(body)}."
    if not body:
        return f"{format_atom(r.head)}."
    return f"{format_atom(r.head)} :- {', '.join(body)}."


def format_weak(w: WeakConstraint) -> str:
    body = ", ".join(format_atom(a) for a in w.body)
    return f":~ {body}. [{w.weight}@{format_term(w.level)}]"


def emit_text(p: Program) -> str:
    lines = [format_atom(f) + "." for f in p.facts]
    lines += [format_rule(r) for r in p.rules]
    lines += [format_weak(w) for w in p.weak]
    return "\n".join(lines) + "\n"


# --- text reader ------------------------------------------------------------

class ProgramSyntaxError(ValueError):
    pass


_PTOKEN = re.compile(r"""
    (?P<ws>\s+|%[^\n]*)
  | (?P<str>"(?:[^"\\]|\\.)*")
  | (?P<int>-?\d+)
  | (?P<var>[A-Z_][A-Za-z0-9_']*)
  | (?P<ident>[a-z][A-Za-z0-9_']*)
  | (?P<op>:-|:~|!=|[(),.\[\]@])
""", re.VERBOSE)


class _Reader:
    def __init__(self, text: str):
        self.toks: list[tuple[str, str]] = []
        pos = 0
        while pos < len(text):
            m = _PTOKEN.match(text, pos)
            if not m:
                line = text.count("\n", 0, pos) + 1
                raise ProgramSyntaxError(f"line {line}: unexpected {text[pos]!r}")
            if m.lastgroup != "ws":
                self.toks.append((m.lastgroup, m.group()))
            pos = m.end()
        self.toks.append(("eof", ""))
        self.i = 0

    def peek(self):
        return self.toks[self.i]

    def take(self, text=None, kind=None):
        k, t = self.toks[self.i]
        if (text is not None and t != text) or (kind is not None and k != kind):
            raise ProgramSyntaxError(f"expected {text or kind}, found {t or 'end of input'!r}")
        self.i += 1
        return t

    def term(self) -> Term:
        k, t = self.peek()
        if k == "str":
            self.i += 1
            return bytes(t[1:-1], "utf-8").decode("unicode_escape")
        if k == "int":
            self.i += 1
            return int(t)
        if k == "var":
            self.i += 1
            return Var(t)
        if k == "ident":
            self.i += 1
            if self.peek()[1] == "(":
                self.take("(")
                args = [self.term()]
                while self.peek()[1] == ",":
                    self.take(",")
                    args.append(self.term())
                self.take(")")
                return Fn(t, tuple(args))
            return Sym(t)
        raise ProgramSyntaxError(f"expected a term, found {t!r}")

    def atom(self) -> Atom:
        pred = self.take(kind="ident")
        if self.peek()[1] != "(":
            return (pred,)
        self.take("(")
        args = [self.term()]
        while self.peek()[1] == ",":
            self.take(",")
            args.append(self.term())
        self.take(")")
        return (pred, *args)

    def body(self):
        pos, neg, neq = [], [], []
        while True:
            k, t = self.peek()
            if k == "ident" and t == "not":
                self.take("not")
                neg.append(self.atom())
            elif k == "ident" and self.toks[self.i + 1][1] != "!=":
                pos.append(self.atom())
            else:
                x = self.term()
                self.take("!=")
                neq.append((x, self.term()))
            if self.peek()[1] != ",":
                break
            self.take(",")
        return tuple(pos), tuple(neg), tuple(neq)

    def program(self) -> Program:
        prog = Program()
        while self.peek()[0] != "eof":
            t = self.peek()[1]
            if t == ":-":
                self.take(":-")
                pos, neg, neq = self.body()
                self.take(".")
                prog.rules.append(Rule(None, pos, neg, neq))
            elif t == ":~":
                self.take(":~")
                pos, neg, neq = self.body()
                if neg or neq:
                    raise ProgramSyntaxError("weak constraints take positive bodies only")
                self.take(".")
                self.take("[")
                weight = int(self.take(kind="int"))
                self.take("@")
                level = self.term()
                self.take("]")
                prog.weak.append(WeakConstraint(pos, level, weight))
            else:
                head = self.atom()
                if self.peek()[1] == ".":
                    self.take(".")
                    if atom_vars(head):
                        prog.rules.append(Rule(head))
                    else:
                        prog.facts.append(head)
                    continue
                self.take(":-")
                pos, neg, neq = self.body()
                self.take(".")
                prog.rules.append(Rule(head, pos, neg, neq))
        return prog


def parse_program(text: str) -> Program:
    """Read the dialect produced by :func:`emit_text`."""
    return _Reader(text).program()
