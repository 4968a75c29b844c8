"""Random small sCKRs for cross-checking the translation against the oracle."""
from __future__ import annotations

import random

from .model import BOT, SCKR, SIGNATURES, ContextStructure, NormalAxiom, make_sckr, strict_below

_ASSERTIONS = ("inst", "inst", "ninst", "ninst", "triple", "ntriple")
_TBOX = ("subc", "subcnj", "subex", "supex", "forall", "leqone", "subr", "subrc",
         "dis", "inv", "irr", "evalc")
_DEFEASIBLE = ("inst", "ninst", "triple", "subc", "subc", "subcnj", "subex", "supex",
               "forall", "leqone", "subr", "subrc", "dis", "inv", "irr")


def _structure(rng: random.Random, n: int, ranked: bool):
    names = [f"k{i}" for i in range(n)]
    levels = {names[0]: 0}
    covers = set()
    for i, c in enumerate(names[1:], 1):
        parent = rng.choice(names[:i])
        lvl = levels[parent] + 1 if ranked else levels[parent] + rng.randint(1, 2)
        levels[c] = lvl
        covers.add((c, parent))
        others = [p for p in names[:i] if p != parent
                  and (levels[p] == lvl - 1 if ranked else levels[p] < lvl)]
        if others and rng.random() < 0.3:
            covers.add((c, rng.choice(others)))
    return levels, covers


def _args(rng, kind, inds, cons, rols, ctxs):
    pick = {"i": inds, "c": cons, "r": rols, "x": ctxs}
    return tuple(rng.choice(pick[s]) for s in SIGNATURES[kind])


def _conflict(rng, ax: NormalAxiom, inds, cons, rols):
    """Assertions that fire ``ax`` for some tuple and contradict its consequence."""
    k, a = ax.kind, ax.args
    x, y = rng.choice(inds), rng.choice(inds)
    if k == "subc":
        return [NormalAxiom("inst", (a[0], x)), NormalAxiom("ninst", (a[1], x))]
    if k == "subcnj":
        return [NormalAxiom("inst", (a[0], x)), NormalAxiom("inst", (a[1], x)),
                NormalAxiom("ninst", (a[2], x))][rng.choice([0, 1]):]
    if k == "supex":
        return [NormalAxiom("inst", (a[0], x)), NormalAxiom("ntriple", (a[1], x, a[2]))]
    if k == "subr":
        return [NormalAxiom("triple", (a[0], x, y)), NormalAxiom("ntriple", (a[1], x, y))]
    if k == "inv":
        return [NormalAxiom("triple", (a[0], x, y)), NormalAxiom("ntriple", (a[1], y, x))]
    if k == "forall":
        return [NormalAxiom("inst", (a[0], x)), NormalAxiom("triple", (a[1], x, y)),
                NormalAxiom("ninst", (a[2], y))][1:]
    if k in ("inst", "ninst"):
        return [NormalAxiom("ninst" if k == "inst" else "inst", a)]
    if k in ("dis", "irr"):
        return [NormalAxiom("triple", (a[0], x, x))]
    return [NormalAxiom("inst", (rng.choice(cons), x))]


def random_sckr(rng: random.Random, max_contexts: int = 3, max_individuals: int = 3,
                max_concepts: int = 3, max_roles: int = 2, max_axioms: int = 6,
                max_defeasible: int = 3, ranked: bool = True) -> SCKR:
    """A random sCKR; defeasible axioms sit above at least one other context."""
    n = rng.randint(2, max_contexts) if max_contexts > 1 else 1
    levels, covers = _structure(rng, n, ranked)
    ctxs = sorted(levels)
    below: dict[str, list[str]] = {}
    for lo, hi in sorted(strict_below(ContextStructure(frozenset(levels), frozenset(covers), levels))):
        below.setdefault(hi, []).append(lo)
    inds = ["a", "b", "d"][:rng.randint(min(2, max_individuals), max_individuals)]
    cons = ["A", "B", "C"][:rng.randint(min(2, max_concepts), max_concepts)]
    rols = ["R", "S"][:rng.randint(1, max_roles)]
    upper = sorted(below) or ctxs
    modules: dict[str, list[NormalAxiom]] = {c: [] for c in ctxs}
    budget = rng.randint(2, max_axioms)
    n_def = rng.randint(1, min(max_defeasible, budget - 1))
    budget -= n_def
    for _ in range(n_def):
        kind = rng.choice(_DEFEASIBLE)
        args = _args(rng, kind, inds, cons + ([BOT] if kind == "subcnj" else []), rols, ctxs)
        home = rng.choice(upper)
        ax = NormalAxiom(kind, args, True)
        modules[home].append(ax)
        if home in below and rng.random() < 0.7:
            target = rng.choice(below[home])
            for extra in _conflict(rng, ax, inds, cons, rols)[:budget]:
                modules[target].append(extra)
                budget -= 1
    for _ in range(budget):
        kind = rng.choice(_ASSERTIONS) if rng.random() < 0.6 else rng.choice(_TBOX)
        modules[rng.choice(ctxs)].append(NormalAxiom(kind, _args(rng, kind, inds, cons, rols, ctxs)))
    return make_sckr(levels, covers, modules)


def corpus(seed: int, size: int, **kw) -> list[SCKR]:
    rng = random.Random(seed)
    return [random_sckr(rng, **kw) for _ in range(size)]
