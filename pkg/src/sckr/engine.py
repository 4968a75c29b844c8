"""Grounding and answer-set search with multi-level weak constraints."""
from __future__ import annotations

import os
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Iterator

from .program import Atom, Fn, Program, Rule, Var, check_safety, format_atom

DEFAULT_MAX_GROUND_ATOMS = 2_000_000
DEFAULT_MAX_MODELS = 100_000
DEFAULT_MAX_CANDIDATES = 1 << 20


class EngineError(RuntimeError):
    pass


class UnsafeRuleError(EngineError):
    pass


class GroundingLimitError(EngineError):
    pass


class ModelLimitError(EngineError):
    pass


class InconsistentProgramError(EngineError):
    """No answer set exists."""


def resource_caps() -> dict[str, int]:
    """Defaults, overridable through CKR_CAPS="max_ground_atoms=..,max_models=..."."""
    caps = {"max_ground_atoms": DEFAULT_MAX_GROUND_ATOMS, "max_models": DEFAULT_MAX_MODELS,
            "max_candidates": DEFAULT_MAX_CANDIDATES}
    raw = os.environ.get("CKR_CAPS", "")
    for item in filter(None, (s.strip() for s in raw.split(","))):
        key, _, val = item.partition("=")
        if key.strip() in caps and val.strip().isdigit():
            caps[key.strip()] = int(val)
    return caps


# --- canonical ordering -----------------------------------------------------

def term_key(t):
    if isinstance(t, int):
        return (0, t)
    if isinstance(t, str):
        return (1, t)
    if isinstance(t, Fn):
        return (3, t.name, tuple(term_key(a) for a in t.args))
    return (2, t.name)


def atom_key(a: Atom):
    return (a[0], tuple(term_key(t) for t in a[1:]))


# --- ground program ---------------------------------------------------------

@dataclass(frozen=True)
class CostVector:
    costs: tuple[tuple[int, int], ...]  # (level, weight) sorted by level descending

    @classmethod
    def of(cls, mapping: dict[int, int]) -> CostVector:
        return cls(tuple(sorted(mapping.items(), reverse=True)))

    def as_dict(self) -> dict[int, int]:
        return dict(self.costs)

    def key(self) -> tuple[int, ...]:
        return tuple(w for _, w in self.costs)

    def __lt__(self, other: CostVector) -> bool:
        return _cost_key(self, other)[0] < _cost_key(self, other)[1]

    def __le__(self, other: CostVector) -> bool:
        a, b = _cost_key(self, other)
        return a <= b

    def __getitem__(self, level: int) -> int:
        return self.as_dict().get(level, 0)


def _cost_key(a: CostVector, b: CostVector):
    levels = sorted(set(a.as_dict()) | set(b.as_dict()), reverse=True)
    da, db = a.as_dict(), b.as_dict()
    return (tuple(da.get(l, 0) for l in levels), tuple(db.get(l, 0) for l in levels))


@dataclass(frozen=True)
class AnswerSet:
    atoms: frozenset
    cost: CostVector

    def __contains__(self, atom) -> bool:
        return atom in self.atoms

    def sorted_atoms(self) -> list[Atom]:
        return sorted(self.atoms, key=atom_key)

    def text(self) -> list[str]:
        return [format_atom(a) for a in self.sorted_atoms()]


@dataclass
class GroundProgram:
    atoms: list[Atom]
    index: dict[Atom, int]
    heads: list[int]                 # -1 marks a constraint
    pos: list[tuple[int, ...]]
    neg: list[tuple[int, ...]]
    weak: list[tuple[tuple[int, ...], int, int]]  # (body, weight, level)
    levels: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not self.levels:
            self.levels = tuple(sorted({lv for _, _, lv in self.weak}, reverse=True))

    @property
    def n_rules(self) -> int:
        return len(self.heads)

    def id_of(self, atom: Atom) -> int | None:
        return self.index.get(atom)


# --- grounding --------------------------------------------------------------

def _match(p, g, b: dict) -> bool:
    if isinstance(p, Var):
        if p in b:
            return b[p] == g
        b[p] = g
        return True
    if isinstance(p, Fn):
        if not isinstance(g, Fn) or g.name != p.name or len(g.args) != len(p.args):
            return False
        return all(_match(x, y, b) for x, y in zip(p.args, g.args))
    return type(p) is type(g) and p == g


def _subst(t, b: dict):
    if isinstance(t, Var):
        return b[t]
    if isinstance(t, Fn):
        return Fn(t.name, tuple(_subst(a, b) for a in t.args))
    return t


def _ground_under(t, b: dict) -> bool:
    if isinstance(t, Var):
        return t in b
    if isinstance(t, Fn):
        return all(_ground_under(a, b) for a in t.args)
    return True


class _Store:
    def __init__(self):
        self.by_pred: dict[str, list[Atom]] = defaultdict(list)
        self.by_arg: dict[tuple, list[Atom]] = defaultdict(list)
        self.all: set[Atom] = set()

    def add(self, a: Atom) -> bool:
        if a in self.all:
            return False
        self.all.add(a)
        self.by_pred[(a[0], len(a))].append(a)
        for i, t in enumerate(a[1:]):
            self.by_arg[(a[0], len(a), i, t)].append(a)
        return True

    def candidates(self, pat: Atom, b: dict) -> list[Atom]:
        best = self.by_pred.get((pat[0], len(pat)), [])
        for i, t in enumerate(pat[1:]):
            if _ground_under(t, b):
                bucket = self.by_arg.get((pat[0], len(pat), i, _subst(t, b)), [])
                if len(bucket) < len(best):
                    best = bucket
                    if not best:
                        break
        return best


def _bound_count(pat: Atom, b: dict) -> int:
    return sum(1 for t in pat[1:] if _ground_under(t, b))


def _join(store: _Store, pats: list[Atom], b: dict) -> Iterator[dict]:
    if not pats:
        yield b
        return
    k = max(range(len(pats)), key=lambda i: _bound_count(pats[i], b))
    pat, rest = pats[k], pats[:k] + pats[k + 1:]
    for g in list(store.candidates(pat, b)):
        nb = dict(b)
        if all(_match(p, t, nb) for p, t in zip(pat[1:], g[1:])):
            yield from _join(store, rest, nb)


def ground(p: Program, max_ground_atoms: int | None = None) -> GroundProgram:
    """Bottom-up grounding over the positive-body over-approximation."""
    cap = max_ground_atoms if max_ground_atoms is not None else resource_caps()["max_ground_atoms"]
    schemas: list[tuple[Rule, bool, int]] = []  # (rule, is_weak, weak index)
    for r in p.rules:
        bad = check_safety(r)
        if bad:
            raise UnsafeRuleError(f"unsafe variables {', '.join(v.name for v in bad)} "
                                  f"in rule with head {r.head}")
        schemas.append((r, False, -1))
    for i, w in enumerate(p.weak):
        schemas.append((Rule(None, w.body), True, i))

    occurs: dict[tuple, list[tuple[int, int]]] = defaultdict(list)
    for si, (r, _, _) in enumerate(schemas):
        for bi, a in enumerate(r.pos):
            occurs[(a[0], len(a))].append((si, bi))

    store = _Store()
    agenda: list[Atom] = []
    instances: dict[tuple, None] = {}
    weak_inst: dict[tuple, None] = {}

    def emit(si: int, b: dict):
        r, is_weak, wi = schemas[si]
        for x, y in r.neq:
            if _subst(x, b) == _subst(y, b):
                return
        pos = tuple(tuple(_subst(t, b) if k else t for k, t in enumerate(a)) for a in r.pos)
        if is_weak:
            w = p.weak[wi]
            lvl = _subst(w.level, b)
            if not isinstance(lvl, int):
                raise EngineError(f"weak constraint level {lvl!r} is not an integer")
            weak_inst.setdefault((pos, w.weight, lvl), None)
            return
        head = None if r.head is None else (r.head[0], *(_subst(t, b) for t in r.head[1:]))
        neg = tuple((a[0], *(_subst(t, b) for t in a[1:])) for a in r.neg)
        key = (head, pos, neg)
        if key in instances:
            return
        instances[key] = None
        if head is not None and head not in store.all:
            agenda.append(head)

    for f in p.facts:
        agenda.append(tuple(f))
    for si, (r, is_weak, _) in enumerate(schemas):
        if not r.pos and not is_weak:
            emit(si, {})

    while agenda:
        a = agenda.pop()
        if not store.add(a):
            continue
        if len(store.all) > cap:
            raise GroundingLimitError(f"more than {cap} ground atoms")
        for si, bi in occurs.get((a[0], len(a)), ()):
            r = schemas[si][0]
            b: dict = {}
            pat = r.pos[bi]
            if not all(_match(x, y, b) for x, y in zip(pat[1:], a[1:])):
                continue
            rest = list(r.pos[:bi] + r.pos[bi + 1:])
            for full in _join(store, rest, b):
                emit(si, full)

    facts = set(tuple(f) for f in p.facts)
    atoms = sorted(store.all, key=atom_key)
    index = {a: i for i, a in enumerate(atoms)}
    heads, poss, negs = [], [], []
    for f in sorted(facts, key=atom_key):
        heads.append(index[f])
        poss.append(())
        negs.append(())
    for head, pos, neg in instances:
        if head in facts and not pos and not neg:
            continue
        heads.append(-1 if head is None else index[head])
        poss.append(tuple(index[a] for a in pos))
        negs.append(tuple(index[a] for a in neg if a in index))
    weak = [(tuple(index[a] for a in body), w, lvl) for body, w, lvl in weak_inst]
    return GroundProgram(atoms, index, heads, poss, negs, weak)


# --- answer-set search ------------------------------------------------------

class _Conflict(Exception):
    pass


class _Solver:
    def __init__(self, g: GroundProgram):
        self.g = g
        n = len(g.atoms)
        self.n = n
        self.pos_occ = [[] for _ in range(n)]
        self.neg_occ = [[] for _ in range(n)]
        self.head_of = [[] for _ in range(n)]
        for r in range(g.n_rules):
            for a in g.pos[r]:
                self.pos_occ[a].append(r)
            for a in g.neg[r]:
                self.neg_occ[a].append(r)
            if g.heads[r] >= 0:
                self.head_of[g.heads[r]].append(r)
        self.choice = sorted({a for r in range(g.n_rules) for a in g.neg[r]})
        self.constraints = [r for r in range(g.n_rules) if g.heads[r] < 0]

    # least fixpoint over rules passing ``usable``; returns membership array
    def _closure(self, usable) -> bytearray:
        g = self.g
        cnt = [len(p) for p in g.pos]
        inm = bytearray(self.n)
        stack = []
        for r in range(g.n_rules):
            if cnt[r] == 0 and usable(r):
                stack.append(r)
        while stack:
            r = stack.pop()
            h = g.heads[r]
            if h < 0:
                raise _Conflict
            if inm[h]:
                continue
            inm[h] = 1
            for r2 in self.pos_occ[h]:
                cnt[r2] -= 1
                if cnt[r2] == 0 and usable(r2):
                    stack.append(r2)
        return inm

    def expand(self, val: list[int]) -> None:
        """Propagate in place; raises _Conflict. val: 1 true, -1 false, 0 unknown."""
        g = self.g
        neg = g.neg
        while True:
            changed = False
            lower = self._closure(lambda r: all(val[a] == -1 for a in neg[r]))
            for a in range(self.n):
                if lower[a]:
                    if val[a] == -1:
                        raise _Conflict
                    if val[a] == 0:
                        val[a] = 1
                        changed = True
            try:
                upper = self._closure(lambda r: g.heads[r] >= 0
                                      and not any(val[a] == 1 for a in neg[r]))
            except _Conflict:  # pragma: no cover - constraints are filtered out
                raise
            for a in range(self.n):
                if not upper[a]:
                    if val[a] == 1:
                        raise _Conflict
                    if val[a] == 0:
                        val[a] = -1
                        changed = True
            changed |= self._backward(val)
            if not changed:
                return

    def _body_state(self, r: int, val: list[int]):
        """(#false literals, list of unknown literals as (atom, polarity))."""
        g = self.g
        false = 0
        unknown = []
        for a in g.pos[r]:
            if val[a] == -1:
                false += 1
            elif val[a] == 0:
                unknown.append((a, 1))
        for a in g.neg[r]:
            if val[a] == 1:
                false += 1
            elif val[a] == 0:
                unknown.append((a, -1))
        return false, unknown

    def _backward(self, val: list[int]) -> bool:
        g = self.g
        changed = False
        # rules whose head is false, and constraints: body must not become true
        for r in range(g.n_rules):
            h = g.heads[r]
            if h >= 0 and val[h] != -1:
                continue
            false, unknown = self._body_state(r, val)
            if false:
                continue
            if not unknown:
                raise _Conflict
            if len(unknown) == 1:
                a, pol = unknown[0]
                val[a] = -pol
                changed = True
        # true atoms with a single remaining support
        for a in range(self.n):
            if val[a] != 1:
                continue
            support = [r for r in self.head_of[a] if self._body_state(r, val)[0] == 0]
            if not support:
                raise _Conflict
            if len(support) == 1:
                for b, pol in self._body_state(support[0], val)[1]:
                    val[b] = pol
                    changed = True
        return changed

    def search(self, on_model, bound=None) -> None:
        """DFS over choice atoms. ``bound(val)`` returns True to prune."""
        val = [0] * self.n

        def rec(val):
            try:
                self.expand(val)
            except _Conflict:
                return
            if bound is not None and bound(val):
                return
            for a in self.choice:
                if val[a] == 0:
                    break
            else:
                on_model(frozenset(i for i in range(self.n) if val[i] == 1))
                return
            for v in (-1, 1):
                nv = list(val)
                nv[a] = v
                rec(nv)

        rec(val)


def cost(g: GroundProgram, s) -> CostVector:
    """Per-level sum of weights of weak-constraint instances whose body holds in ``s``."""
    ids = _as_ids(g, s)
    acc = {lv: 0 for lv in g.levels}
    for body, w, lv in g.weak:
        if all(a in ids for a in body):
            acc[lv] += w
    return CostVector.of(acc)


def _as_ids(g: GroundProgram, s) -> set[int]:
    if isinstance(s, AnswerSet):
        s = s.atoms
    out = set()
    for x in s:
        if isinstance(x, int):
            out.add(x)
        elif x in g.index:
            out.add(g.index[x])
    return out


def is_stable(g: GroundProgram, s) -> bool:
    """Check ``s`` is the least model of its reduct and satisfies every constraint."""
    ids = _as_ids(g, s)
    if isinstance(s, (set, frozenset)) and any(not isinstance(x, int) and x not in g.index
                                                for x in s):
        return False
    model = set()
    changed = True
    rules = [r for r in range(g.n_rules) if g.heads[r] >= 0
             and not any(a in ids for a in g.neg[r])]
    while changed:
        changed = False
        for r in rules:
            h = g.heads[r]
            if h not in model and all(a in model for a in g.pos[r]):
                model.add(h)
                changed = True
    if model != ids:
        return False
    for r in range(g.n_rules):
        if g.heads[r] < 0 and all(a in ids for a in g.pos[r]) \
                and not any(a in ids for a in g.neg[r]):
            return False
    return True


def _to_answer_set(g: GroundProgram, ids: frozenset) -> AnswerSet:
    return AnswerSet(frozenset(g.atoms[i] for i in ids), cost(g, ids))


def answer_sets(g: GroundProgram, max_models: int | None = None) -> list[AnswerSet]:
    """All answer sets, in canonical order of their sorted atom-id lists."""
    cap = max_models if max_models is not None else resource_caps()["max_models"]
    found: list[frozenset] = []

    def on_model(ids):
        found.append(ids)
        if len(found) > cap:
            raise ModelLimitError(f"more than {cap} answer sets")

    _Solver(g).search(on_model)
    found.sort(key=sorted)
    return [_to_answer_set(g, ids) for ids in found]


def filter_optimal(models: list[AnswerSet]) -> list[AnswerSet]:
    """Keep models minimal in the level-by-level order, highest level first."""
    if not models:
        return []
    levels = sorted({lv for m in models for lv in m.cost.as_dict()}, reverse=True)
    pool = list(models)
    for lv in levels:
        best = min(m.cost[lv] for m in pool)
        pool = [m for m in pool if m.cost[lv] == best]
    return pool


def optimal_answer_sets(g: GroundProgram, max_models: int | None = None) -> list[AnswerSet]:
    """Optimal answer sets via branch and bound on the partial cost."""
    cap = max_models if max_models is not None else resource_caps()["max_models"]
    levels = g.levels
    by_level = {lv: i for i, lv in enumerate(levels)}
    best: list = [None]
    found: list[frozenset] = []
    count = [0]

    def vec(pred) -> tuple[int, ...]:
        acc = [0] * len(levels)
        for body, w, lv in g.weak:
            if all(pred(a) for a in body):
                acc[by_level[lv]] += w
        return tuple(acc)

    def bound(val):
        if best[0] is None:
            return False
        return vec(lambda a: val[a] == 1) > best[0]

    def on_model(ids):
        count[0] += 1
        if count[0] > cap:
            raise ModelLimitError(f"more than {cap} answer sets")
        v = vec(lambda a: a in ids)
        if best[0] is None or v < best[0]:
            best[0] = v
            found.clear()
        if v == best[0]:
            found.append(ids)

    _Solver(g).search(on_model, bound)
    found.sort(key=sorted)
    return [_to_answer_set(g, ids) for ids in found]


def cautious_entails(g: GroundProgram, atom: Atom, max_models: int | None = None) -> bool:
    """True iff ``atom`` is in every optimal answer set."""
    models = optimal_answer_sets(g, max_models)
    if not models:
        raise InconsistentProgramError("program has no answer set")
    return all(atom in m for m in models)
