"""Brute-force model-theoretic semantics over the named domain.

Everything here is computed directly from the knowledge base: a ground Horn
materialization per context, clashing assumptions that block inheritance of a
defeasible axiom for one tuple at one lower context, and the consequence-addition
test that decides whether an assumption is justified. The datalog translation is
never consulted except to list input facts in :func:`herbrand`.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache

from .engine import resource_caps
from .model import (BOT, SCKR, TOP, NormalAxiom, QueryAtom, StructureError, strict_below,
                    validate_query)
from .program import MAIN, Fn, Sym

INCONSISTENT = "inconsistent"
GLOBAL = "global-profile"
INDUCED = "induced-local"
_MODES = {"global": GLOBAL, GLOBAL: GLOBAL, "induced": INDUCED, INDUCED: INDUCED}

CLASH = ("clash",)


class EnumerationLimitError(RuntimeError):
    pass


class InconsistentKnowledgeError(RuntimeError):
    """No justified clashing assumption set yields a consistent model."""


# individuals in the exception tuple of each defeasible shape
E_ARITY = {
    "inst": 0, "triple": 0, "ninst": 0, "ntriple": 0,
    "subc": 1, "subcnj": 1, "subex": 1, "supex": 1, "forall": 2, "leqone": 3,
    "subr": 2, "subrc": 3, "dis": 2, "inv": 2, "irr": 1,
}

OVR_TAG = {
    "inst": "insta", "triple": "triplea", "ninst": "ninsta", "ntriple": "ntriplea",
    "subc": "subClass", "subcnj": "subConj", "subex": "subEx", "supex": "supEx",
    "forall": "supForall", "leqone": "supLeqOne", "subr": "subRole", "subrc": "subRChain",
    "dis": "dis", "inv": "inv", "irr": "irr",
}


@dataclass(frozen=True)
class ClashingAssumption:
    """Axiom ``axiom`` (home context ``home``) does not apply to ``e`` at ``at``."""
    axiom: NormalAxiom
    home: str
    e: tuple[str, ...]
    at: str

    def __post_init__(self):
        if not self.axiom.defeasible:
            object.__setattr__(self, "axiom", NormalAxiom(self.axiom.kind, self.axiom.args, True))

    def sort_key(self):
        return (self.home, self.at, self.axiom.kind, self.axiom.args, self.e)

    def ovr_args(self) -> tuple[str, ...]:
        k, a = self.axiom.kind, self.axiom.args
        if k in ("inst", "ninst"):
            return (a[1], a[0])
        if k in ("triple", "ntriple"):
            return (a[1], a[0], a[2])
        return self.e + a

    def __str__(self):
        return (f"<{self.axiom.kind}({','.join(self.axiom.args)})@{self.home}, "
                f"({','.join(self.e)}), {self.at}>")


def _lit(a: tuple) -> str:
    if a[0] == "i":
        return f"{a[2]}({a[1]})@{a[3]}"
    return f"{a[2]}({a[1]},{a[3]})@{a[4]}"


@dataclass(frozen=True)
class CasModel:
    """Least model for ``chi``. Facts are ``("i", x, A, c)`` or ``("r", x, R, y, c)``."""
    chi: frozenset
    facts: frozenset

    def chi_at(self, c: str) -> frozenset:
        return frozenset(a for a in self.chi if a.at == c)

    def concepts(self, c: str) -> dict[str, list[str]]:
        out = defaultdict(list)
        for f in self.facts:
            if f[0] == "i" and f[3] == c:
                out[f[2]].append(f[1])
        return {k: sorted(v) for k, v in sorted(out.items())}

    def roles(self, c: str) -> dict[str, list[list[str]]]:
        out = defaultdict(list)
        for f in self.facts:
            if f[0] == "r" and f[4] == c:
                out[f[2]].append([f[1], f[3]])
        return {k: sorted(v) for k, v in sorted(out.items())}

    def holds(self, q: QueryAtom) -> bool:
        return _fact_of(q) in self.facts

    def sorted_chi(self) -> list[ClashingAssumption]:
        return sorted(self.chi, key=ClashingAssumption.sort_key)

    def describe(self) -> list[str]:
        return [_lit(f) for f in sorted(self.facts, key=lambda f: (f[-1], f))]


def _fact_of(q: QueryAtom) -> tuple:
    if q.is_role:
        return ("r", q.subject, q.predicate, q.object, q.context)
    return ("i", q.subject, q.predicate, q.context)


# --- ground instances -------------------------------------------------------

def _content(ax: NormalAxiom) -> tuple[str, tuple]:
    if ax.kind == "nom":
        return "inst", (ax.args[1], ax.args[0])
    if ax.kind in ("top", "bot"):
        return "inst", (TOP if ax.kind == "top" else BOT, ax.args[0])
    return ax.kind, ax.args


def _instances(kind, args, c, inds):
    """(e, head, body) triples of one axiom applied at context ``c``."""
    I = lambda x, a: ("i", x, a, c)
    R = lambda x, r, y: ("r", x, r, y, c)
    if kind == "inst":
        yield (), I(args[1], args[0]), ()
    elif kind == "triple":
        yield (), R(args[1], args[0], args[2]), ()
    elif kind == "ninst":
        yield (), CLASH, (I(args[1], args[0]),)
    elif kind == "ntriple":
        yield (), CLASH, (R(args[1], args[0], args[2]),)
    elif kind == "subc":
        for x in inds:
            yield (x,), I(x, args[1]), (I(x, args[0]),)
    elif kind == "subcnj":
        for x in inds:
            yield (x,), I(x, args[2]), (I(x, args[0]), I(x, args[1]))
    elif kind == "subex":
        for x, w in itertools.product(inds, repeat=2):
            yield (x,), I(x, args[2]), (R(x, args[0], w), I(w, args[1]))
    elif kind == "supex":
        for x in inds:
            yield (x,), R(x, args[1], args[2]), (I(x, args[0]),)
    elif kind == "forall":
        for x, y in itertools.product(inds, repeat=2):
            yield (x, y), I(y, args[2]), (I(x, args[0]), R(x, args[1], y))
    elif kind == "leqone":
        for x, x1, x2 in itertools.product(inds, repeat=3):
            if x1 != x2:
                yield (x, x1, x2), CLASH, (I(x, args[0]), R(x, args[1], x1), R(x, args[1], x2))
    elif kind == "subr":
        for x, y in itertools.product(inds, repeat=2):
            yield (x, y), R(x, args[1], y), (R(x, args[0], y),)
    elif kind == "subrc":
        for x, y, z in itertools.product(inds, repeat=3):
            yield (x, y, z), R(x, args[2], z), (R(x, args[0], y), R(y, args[1], z))
    elif kind == "dis":
        for x, y in itertools.product(inds, repeat=2):
            yield (x, y), CLASH, (R(x, args[0], y), R(x, args[1], y))
    elif kind == "inv":
        for x, y in itertools.product(inds, repeat=2):
            yield (x, y), R(y, args[1], x), (R(x, args[0], y),)
            yield (x, y), R(x, args[0], y), (R(y, args[1], x),)
    elif kind == "irr":
        for x in inds:
            yield (x,), CLASH, (R(x, args[0], x),)
    else:
        raise ValueError(f"no instances for {kind}")


@dataclass
class _Closure:
    facts: frozenset
    clashes: list[int]


class _Theory:
    """All ground rule instances of one sCKR, each tagged with its blocking key."""

    def __init__(self, k: SCKR):
        st = k.structure
        below = strict_below(st)
        self.k = k
        self.under = {c: sorted(lo for lo, hi in below if hi == c) for c in st.contexts}
        self.above = {c: frozenset(hi for lo, hi in below if lo == c) for c in st.contexts}
        inds = sorted(k.symbols.individuals)
        self.individuals = inds
        self.eq = False
        self.heads: list = []
        self.bodies: list[tuple] = []
        self.key_of: list[int] = []
        self.keys: list[ClashingAssumption] = []
        self.key_ids: dict[ClashingAssumption, int] = {}
        self.by_key: dict[int, list[int]] = defaultdict(list)

        units: dict[tuple, bool] = {}
        evals = []
        for c, ax in k.axioms():
            kind, args = _content(ax)
            if kind == "eq":
                self.eq = True
            elif kind in ("evalc", "evalr"):
                evals.append((kind, args, c))
            elif kind != "neq":
                units[(kind, args, c)] = units.get((kind, args, c), False) or ax.defeasible

        for c in st.ordered():
            for x in inds:
                self._add(("i", x, TOP, c), (), None)
                self._add(CLASH, (("i", x, BOT, c),), None)
        for (kind, args, home), dfs in sorted(units.items()):
            for c in [home] + self.under[home]:
                for e, head, body in _instances(kind, args, c, inds):
                    key = None
                    if dfs and c != home:
                        key = ClashingAssumption(NormalAxiom(kind, args, True), home, e, c)
                    self._add(head, body, key)
        for kind, (p, c1, q), home in evals:
            for c in [home] + self.under[home]:
                if kind == "evalc":
                    for x in inds:
                        self._add(("i", x, q, c), (("i", x, p, c1),), None)
                else:
                    for x, y in itertools.product(inds, repeat=2):
                        self._add(("r", x, q, y, c), (("r", x, p, y, c1),), None)

        self.watch: dict[tuple, list[int]] = defaultdict(list)
        self.roots = []
        for i, body in enumerate(self.bodies):
            if not body:
                self.roots.append(i)
            for a in body:
                self.watch[a].append(i)
        self.need = [len(b) for b in self.bodies]

    def _add(self, head, body, key):
        i = len(self.heads)
        self.heads.append(head)
        self.bodies.append(tuple(dict.fromkeys(body)))
        if key is None:
            self.key_of.append(-1)
            return
        kid = self.key_ids.get(key)
        if kid is None:
            kid = self.key_ids[key] = len(self.keys)
            self.keys.append(key)
        self.key_of.append(kid)
        self.by_key[kid].append(i)

    # -- materialization --
    def closure(self, blocked, seeds=()) -> _Closure:
        need = self.need[:]
        key_of, heads, watch = self.key_of, self.heads, self.watch
        facts = set(seeds)
        stack = list(facts)
        clashes = []

        def fire(i):
            h = heads[i]
            if h is CLASH:
                clashes.append(i)
            elif h not in facts:
                facts.add(h)
                stack.append(h)

        for i in self.roots:
            if key_of[i] < 0 or key_of[i] not in blocked:
                fire(i)
        while stack:
            for i in watch.get(stack.pop(), ()):
                need[i] -= 1
                if need[i] == 0 and (key_of[i] < 0 or key_of[i] not in blocked):
                    fire(i)
        return _Closure(frozenset(facts), clashes)

    def holding_heads(self, kid, facts) -> list:
        """Consequences of key ``kid`` whose premise holds in ``facts``."""
        out = []
        for i in self.by_key[kid]:
            if self.heads[i] not in out and all(a in facts for a in self.bodies[i]):
                out.append(self.heads[i])
        return out

    def env(self, blocked, facts, head) -> _Closure:
        return self.closure(blocked, facts | {head})

    def justified(self, kid, facts, blocked) -> bool:
        heads = self.holding_heads(kid, facts)
        if not heads:
            return False
        return all(h is CLASH or self.env(blocked, facts, h).clashes for h in heads)

    def plausible(self, kid, facts, blocked) -> bool:
        """Necessary condition for ``kid`` to end up justified in any superset of ``blocked``."""
        for h in self.holding_heads(kid, facts):
            if h is CLASH or self._clash_from(self.env(blocked, facts, h).facts, blocked, h):
                return True
        return False

    def _clash_from(self, facts, blocked, lit) -> bool:
        dep = {lit}
        stack = [lit]
        while stack:
            for i in self.watch.get(stack.pop(), ()):
                if self.key_of[i] >= 0 and self.key_of[i] in blocked:
                    continue
                if all(a in facts for a in self.bodies[i]):
                    h = self.heads[i]
                    if h is CLASH:
                        return True
                    if h not in dep:
                        dep.add(h)
                        stack.append(h)
        return False

    def ids(self, chi) -> frozenset[int]:
        return frozenset(self.key_ids[a] for a in chi if a in self.key_ids)


@lru_cache(maxsize=32)
def _theory(k: SCKR) -> _Theory:
    return _Theory(k)


def _mode(mode: str) -> str:
    try:
        return _MODES[mode]
    except KeyError:
        raise ValueError(f"unknown preference mode {mode!r}") from None


# --- public operations ------------------------------------------------------

def candidate_assumptions(k: SCKR) -> list[ClashingAssumption]:
    below = strict_below(k.structure)
    inds = sorted(k.symbols.individuals)
    out = set()
    for home, ax in k.defeasible():
        lows = sorted(lo for lo, hi in below if hi == home)
        for e in itertools.product(inds, repeat=E_ARITY[ax.kind]):
            for c in lows:
                out.add(ClashingAssumption(ax, home, e, c))
    return sorted(out, key=ClashingAssumption.sort_key)


def _check_chi(k: SCKR, chi) -> frozenset:
    chi = frozenset(chi)
    allowed = set(candidate_assumptions(k))
    bad = [str(a) for a in chi if a not in allowed]
    if bad:
        raise ValueError(f"not clashing assumptions of this sCKR: {', '.join(sorted(bad))}")
    return chi


def least_model(k: SCKR, chi=frozenset()):
    """The least model for ``chi``, or :data:`INCONSISTENT` when a clash is derived."""
    chi = _check_chi(k, chi)
    t = _theory(k)
    cl = t.closure(t.ids(chi))
    if t.eq or cl.clashes:
        return INCONSISTENT
    return CasModel(chi, cl.facts)


def is_justified(k: SCKR, chi) -> bool:
    chi = _check_chi(k, chi)
    t = _theory(k)
    blocked = t.ids(chi)
    cl = t.closure(blocked)
    if t.eq or cl.clashes:
        return False
    return all(a in t.key_ids and t.justified(t.key_ids[a], cl.facts, blocked) for a in chi)


def enumerate_justified(k: SCKR, max_candidates: int | None = None) -> list[tuple[frozenset, CasModel]]:
    """Every justified ``chi`` with its least model, in canonical order."""
    t = _theory(k)
    if t.eq:
        return []
    cap = max_candidates if max_candidates is not None else resource_caps()["max_candidates"]
    base = t.closure(frozenset())
    cands = [kid for kid in range(len(t.keys)) if t.holding_heads(kid, base.facts)]
    found: list[frozenset[int]] = []
    nodes = 0

    def rec(i: int, inc: frozenset):
        nonlocal nodes
        nodes += 1
        if nodes > cap:
            raise EnumerationLimitError(f"more than {cap} candidate subsets explored")
        if t.closure(inc | frozenset(cands[i:])).clashes:
            return
        lm = t.closure(inc)
        if i == len(cands):
            if not lm.clashes and all(t.justified(kid, lm.facts, inc) for kid in inc):
                found.append(inc)
            return
        if not all(t.plausible(kid, lm.facts, inc) for kid in inc):
            return
        rec(i + 1, inc | {cands[i]})
        rec(i + 1, inc)

    rec(0, frozenset())
    out = []
    for ids in found:
        chi = frozenset(t.keys[i] for i in ids)
        out.append((chi, CasModel(chi, t.closure(ids).facts)))
    out.sort(key=lambda p: sorted(a.sort_key() for a in p[0]))
    return out


@dataclass(frozen=True)
class Profile:
    """Overriding counts per home-context level; ``vector`` runs from the top level down to 0."""
    counts: tuple[tuple[int, int], ...]
    max_level: int

    @property
    def vector(self) -> tuple[int, ...]:
        d = dict(self.counts)
        return tuple(d.get(j, 0) for j in range(self.max_level, -1, -1))

    def __getitem__(self, level: int) -> int:
        return dict(self.counts).get(level, 0)

    def __lt__(self, other: Profile) -> bool:
        return self.vector < other.vector

    def total(self) -> int:
        return sum(n for _, n in self.counts)


def _profile(k: SCKR, chi) -> Profile:
    st = k.structure
    seen = set()
    for a in chi:
        # one unit per distinct preference atom: same tag, arguments, context and level
        seen.add((a.axiom.kind, a.ovr_args(), a.at, st.level[a.home]))
    counts = defaultdict(int)
    for *_, lvl in seen:
        counts[lvl] += 1
    return Profile(tuple(sorted(counts.items())), max(st.level.values(), default=0))


def profile(k: SCKR, chi) -> Profile:
    return _profile(k, chi)


def _parents_regions(k: SCKR, c: str):
    st = k.structure
    below = strict_below(st)
    for p in st.parents(c):
        yield p, frozenset({p} | {hi for lo, hi in below if lo == p})


def locally_better(k: SCKR, c: str, chi1, chi2) -> bool:
    """Profile-based local preference at ``c``.

    For a parent ``p`` of ``c``, the assumptions at ``c`` of axioms living outside
    ``p`` and its ancestors must coincide; the remaining ones are compared by profile.
    """
    a1 = {a for a in chi1 if a.at == c}
    a2 = {a for a in chi2 if a.at == c}
    for _, region in _parents_regions(k, c):
        if {a for a in a1 if a.home not in region} != {a for a in a2 if a.home not in region}:
            continue
        if _profile(k, {a for a in a1 if a.home in region}) < \
                _profile(k, {a for a in a2 if a.home in region}):
            return True
    return False


def _induced_better(k: SCKR, chi1, chi2) -> bool:
    ctxs = k.structure.ordered()
    if any(locally_better(k, c, chi2, chi1) for c in ctxs):
        return False
    return any(locally_better(k, c, chi1, chi2) for c in ctxs)


def preferred(k: SCKR, mode: str = GLOBAL, models=None) -> list[CasModel]:
    mode = _mode(mode)
    if mode == GLOBAL and not k.structure.ranked:
        raise StructureError("global-profile preference needs a ranked hierarchy")
    models = [m for _, m in enumerate_justified(k)] if models is None else list(models)
    if mode == GLOBAL:
        if not models:
            return []
        profs = [_profile(k, m.chi).vector for m in models]
        best = min(profs)
        return [m for m, p in zip(models, profs) if p == best]
    return [m for m in models
            if not any(_induced_better(k, o.chi, m.chi) for o in models if o is not m)]


def check_model(k: SCKR, m: CasModel) -> bool:
    """Is ``m`` a justified least model with no justified assumption set of lower profile?"""
    try:
        chi = _check_chi(k, m.chi)
    except ValueError:
        return False
    lm = least_model(k, chi)
    if lm == INCONSISTENT or lm.facts != frozenset(m.facts) or not is_justified(k, chi):
        return False
    mine = _profile(k, chi).vector
    return not any(_profile(k, other).vector < mine for other, _ in enumerate_justified(k))


def _preferred_or_raise(k: SCKR, mode: str) -> list[CasModel]:
    models = preferred(k, mode)
    if not models:
        raise InconsistentKnowledgeError("no justified model exists")
    return models


def entails(k: SCKR, q: QueryAtom, mode: str = GLOBAL) -> bool:
    diags = validate_query(k, q)
    if diags:
        raise ValueError("; ".join(diags))
    return all(m.holds(q) for m in _preferred_or_raise(k, mode))


def verdict(k: SCKR, q: QueryAtom, mode: str = GLOBAL) -> str:
    try:
        return "entailed" if entails(k, q, mode) else "not-entailed"
    except InconsistentKnowledgeError:
        return "inconsistent"


def _is_var(t) -> bool:
    return isinstance(t, str) and t.startswith("?")


def entails_bcq(k: SCKR, atoms: list[QueryAtom], mode: str = GLOBAL) -> bool:
    """Boolean conjunctive query; terms starting with ``?`` are existential variables."""
    names = sorted({t for q in atoms for t in (q.subject, q.object) if _is_var(t)})
    inds = sorted(k.symbols.individuals)
    for q in atoms:
        probe = QueryAtom(q.context, inds[0] if _is_var(q.subject) and inds else q.subject,
                          q.predicate,
                          None if q.object is None else
                          (inds[0] if _is_var(q.object) and inds else q.object))
        diags = validate_query(k, probe)
        if diags:
            raise ValueError("; ".join(diags))
    models = _preferred_or_raise(k, mode)

    def sat(m: CasModel) -> bool:
        for values in itertools.product(inds, repeat=len(names)):
            b = dict(zip(names, values))
            sub = lambda t: b.get(t, t)
            if all(QueryAtom(q.context, sub(q.subject), q.predicate,
                             None if q.object is None else sub(q.object)) in _Holds(m)
                   for q in atoms):
                return True
        return False

    return all(sat(m) for m in models)


class _Holds:
    def __init__(self, m: CasModel):
        self.m = m

    def __contains__(self, q: QueryAtom) -> bool:
        return self.m.holds(q)


def _test_term(head) -> Fn:
    if head[0] == "i":
        return Fn("nlit", head[1:])
    return Fn("nrel", head[1:])


def _atom(fact, env) -> tuple:
    if fact[0] == "i":
        return ("instd", fact[1], fact[2], fact[3], env)
    return ("tripled", fact[1], fact[2], fact[3], fact[4], env)


def herbrand(k: SCKR, m: CasModel) -> frozenset:
    """Atoms of the answer set that corresponds to the CAS-model ``m``."""
    from .translator import translate

    t = _theory(k)
    blocked = t.ids(m.chi)
    cl = t.closure(blocked)
    if t.eq or cl.clashes:
        raise InconsistentKnowledgeError("herbrand needs a consistent model")
    st = k.structure
    atoms = set(translate(k).facts)
    atoms |= {_atom(f, MAIN) for f in cl.facts}
    for a in m.chi:
        tag = OVR_TAG[a.axiom.kind]
        args = a.ovr_args()
        atoms.add(("ovr", Sym(tag), *args, a.home, a.at))
        atoms.add((f"ovrlevel_{tag}", *args, a.at, st.level[a.home] + 1))
    tests = set()
    for kid in range(len(t.keys)):
        for h in t.holding_heads(kid, cl.facts):
            if h is not CLASH:
                tests.add(h)
    for h in tests:
        term = _test_term(h)
        atoms.add(("test", term))
        env = t.env(blocked, cl.facts, h)
        atoms |= {_atom(f, term) for f in env.facts}
        atoms.add(("unsat", term) if env.clashes else ("test_fails", term))
    return frozenset(atoms)


def is_connector(k: SCKR, upper: str, c: str) -> bool:
    """Does ``upper`` directly cover ``c`` and cut every downward path into ``c``?"""
    st = k.structure
    for x in (upper, c):
        if x not in st.contexts:
            raise StructureError(f"unknown context {x}")
    if (c, upper) not in st.covers:
        return False
    starts = {hi for lo, hi in strict_below(st) if lo == upper}
    seen, stack = set(), list(starts)
    while stack:
        x = stack.pop()
        if x in seen or x == upper:
            continue
        if x == c:
            return False
        seen.add(x)
        stack.extend(st.children(x))
    return True
