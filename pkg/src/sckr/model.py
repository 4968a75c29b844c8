"""Core vocabulary: contexts, normal-form axioms and the sCKR container."""
from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Iterable, Mapping

# Axiom kinds and the name-kind of each argument position.
# "i" individual, "c" concept, "r" role, "x" context.
SIGNATURES: dict[str, str] = {
    "inst": "ci",
    "ninst": "ci",
    "triple": "rii",
    "ntriple": "rii",
    "eq": "ii",
    "neq": "ii",
    "nom": "ic",
    "top": "i",
    "bot": "i",
    "subc": "cc",
    "subcnj": "ccc",
    "subex": "rcc",
    "supex": "cri",
    "forall": "crc",
    "leqone": "cr",
    "subr": "rr",
    "subrc": "rrr",
    "dis": "rr",
    "inv": "rr",
    "irr": "r",
    "evalc": "cxc",
    "evalr": "rxr",
}

DEFEASIBLE_KINDS = frozenset(
    {"inst", "triple", "ninst", "ntriple", "subc", "subcnj", "subex", "supex",
     "forall", "leqone", "subr", "subrc", "dis", "inv", "irr"}
)

TOP = "top"
BOT = "bot"


class StructureError(ValueError):
    """Raised for malformed context structures (cycles, unknown contexts)."""


@dataclass(frozen=True)
class NormalAxiom:
    kind: str
    args: tuple[str, ...]
    defeasible: bool = False

    def __post_init__(self):
        if self.kind not in SIGNATURES:
            raise ValueError(f"unknown axiom kind {self.kind!r}")
        if len(self.args) != len(SIGNATURES[self.kind]):
            raise ValueError(f"{self.kind} takes {len(SIGNATURES[self.kind])} arguments")

    def names(self) -> Iterable[tuple[str, str]]:
        """Yield (name_kind, name) for every argument."""
        return zip(SIGNATURES[self.kind], self.args)

    def strict(self) -> NormalAxiom:
        return NormalAxiom(self.kind, self.args, False)


@dataclass(frozen=True)
class SymbolTable:
    individuals: frozenset[str] = frozenset()
    concepts: frozenset[str] = frozenset()
    roles: frozenset[str] = frozenset()
    contexts: frozenset[str] = frozenset()

    def kind_of(self, name: str) -> set[str]:
        found = set()
        for kind, pool in (("i", self.individuals), ("c", self.concepts),
                           ("r", self.roles), ("x", self.contexts)):
            if name in pool:
                found.add(kind)
        return found


@dataclass(frozen=True)
class ContextStructure:
    contexts: frozenset[str]
    covers: frozenset[tuple[str, str]]
    level: Mapping[str, int]

    def __post_init__(self):
        object.__setattr__(self, "level", MappingProxyType(dict(self.level)))

    def __eq__(self, other):
        if not isinstance(other, ContextStructure):
            return NotImplemented
        return (self.contexts == other.contexts and self.covers == other.covers
                and dict(self.level) == dict(other.level))

    def __hash__(self):
        return hash((self.contexts, self.covers, tuple(sorted(self.level.items()))))

    @property
    def ranked(self) -> bool:
        return all(self.level[c] == self.level[p] + 1 for c, p in self.covers)

    def ordered(self) -> list[str]:
        """Contexts sorted by level, then name."""
        return sorted(self.contexts, key=lambda c: (self.level.get(c, 0), c))

    def parents(self, c: str) -> list[str]:
        return sorted(p for ch, p in self.covers if ch == c)

    def children(self, c: str) -> list[str]:
        return sorted(ch for ch, p in self.covers if p == c)


@dataclass(frozen=True)
class SCKR:
    structure: ContextStructure
    modules: Mapping[str, tuple[NormalAxiom, ...]]
    symbols: SymbolTable = field(default_factory=SymbolTable)

    def __post_init__(self):
        mods = {c: tuple(self.modules.get(c, ())) for c in sorted(self.structure.contexts)}
        for c, axs in self.modules.items():
            if c not in mods:
                mods[c] = tuple(axs)
        object.__setattr__(self, "modules", MappingProxyType(mods))

    def __eq__(self, other):
        if not isinstance(other, SCKR):
            return NotImplemented
        return (self.structure == other.structure and self.symbols == other.symbols
                and dict(self.modules) == dict(other.modules))

    def __hash__(self):
        return hash((self.structure, self.symbols, tuple(sorted(self.modules.items()))))

    def axioms(self) -> Iterable[tuple[str, NormalAxiom]]:
        """(context, axiom) pairs: contexts by level then name, axioms in stored order."""
        for c in self.structure.ordered():
            for ax in self.modules.get(c, ()):
                yield c, ax

    def defeasible(self) -> list[tuple[str, NormalAxiom]]:
        return [(c, ax) for c, ax in self.axioms() if ax.defeasible]


@dataclass(frozen=True)
class QueryAtom:
    """A(a)@c when ``role`` is None, otherwise R(a,b)@c."""
    context: str
    subject: str
    predicate: str
    object: str | None = None

    @property
    def is_role(self) -> bool:
        return self.object is not None

    def __str__(self):
        if self.is_role:
            return f"{self.predicate}({self.subject},{self.object})@{self.context}"
        return f"{self.predicate}({self.subject})@{self.context}"


def infer_symbols(structure: ContextStructure,
                  modules: Mapping[str, Iterable[NormalAxiom]]) -> SymbolTable:
    """Collect names by argument position. Kind conflicts are left for validate()."""
    pools: dict[str, set[str]] = {"i": set(), "c": set(), "r": set()}
    for axs in modules.values():
        for ax in axs:
            for kind, name in ax.names():
                if kind != "x":
                    pools[kind].add(name)
    return SymbolTable(frozenset(pools["i"]), frozenset(pools["c"]),
                       frozenset(pools["r"]), frozenset(structure.contexts))


def make_sckr(levels: Mapping[str, int], covers: Iterable[tuple[str, str]],
              modules: Mapping[str, Iterable[NormalAxiom]]) -> SCKR:
    structure = ContextStructure(frozenset(levels), frozenset(covers), dict(levels))
    mods = {c: tuple(axs) for c, axs in modules.items()}
    return SCKR(structure, mods, infer_symbols(structure, mods))


def strict_below(structure: ContextStructure) -> frozenset[tuple[str, str]]:
    """Transitive closure of the covers relation; pairs (lower, upper)."""
    up: dict[str, set[str]] = {c: set() for c in structure.contexts}
    for child, parent in structure.covers:
        up.setdefault(child, set()).add(parent)
        up.setdefault(parent, set())
    closure: dict[str, frozenset[str]] = {}
    visiting: set[str] = set()

    def above(c: str) -> frozenset[str]:
        if c in closure:
            return closure[c]
        if c in visiting:
            raise StructureError(f"cycle in covers through {c}")
        visiting.add(c)
        acc = set()
        for p in up[c]:
            acc.add(p)
            acc |= above(p)
        visiting.discard(c)
        closure[c] = frozenset(acc)
        return closure[c]

    return frozenset((c, p) for c in sorted(up) for p in above(c))


def canonical(sckr: SCKR) -> SCKR:
    """Same sCKR with every module sorted; permutations of a module collapse to one value."""
    key = lambda ax: (ax.kind, ax.args, ax.defeasible)
    return SCKR(sckr.structure, {c: tuple(sorted(axs, key=key)) for c, axs in sckr.modules.items()},
                sckr.symbols)


def significance(structure: ContextStructure, c: str) -> int:
    """Weak-constraint level for overridings of axioms whose home is ``c``."""
    if c not in structure.contexts:
        raise StructureError(f"unknown context {c}")
    return structure.level[c] + 1


def validate(sckr: SCKR, ranked: bool = False) -> list[str]:
    """Return diagnostics for every violated invariant; empty when well formed."""
    diags: list[str] = []
    st = sckr.structure
    sym = sckr.symbols
    if not st.contexts:
        diags.append("no contexts")
    for c in sorted(st.contexts):
        if c not in st.level:
            diags.append(f"context {c} has no level")
        elif st.level[c] < 0:
            diags.append(f"context {c} has negative level")
    for child, parent in sorted(st.covers):
        for c in (child, parent):
            if c not in st.contexts:
                diags.append(f"cover edge ({child},{parent}) mentions undeclared context {c}")
        if child == parent:
            diags.append(f"cover edge ({child},{parent}) is reflexive")
    if not diags:
        try:
            strict_below(st)
        except StructureError as exc:
            diags.append(str(exc))
    if not diags:
        for child, parent in sorted(st.covers):
            if st.level[child] <= st.level[parent]:
                diags.append(f"level must increase downward: {child} < {parent} "
                             f"but level {st.level[child]} <= {st.level[parent]}")
            elif ranked and st.level[child] != st.level[parent] + 1:
                diags.append(f"hierarchy not ranked at {child} < {parent}")
    pools = {"i": sym.individuals, "c": sym.concepts, "r": sym.roles, "x": sym.contexts}
    names = sorted(set().union(*pools.values()))
    for name in names:
        kinds = sym.kind_of(name)
        if len(kinds) > 1:
            diags.append(f"name {name} used as {' and '.join(sorted(_KIND_WORDS[k] for k in kinds))}")
    for c in sorted(sckr.modules):
        if c not in st.contexts:
            diags.append(f"undeclared context {c}")
            continue
        for ax in sckr.modules[c]:
            for kind, name in ax.names():
                if name not in pools[kind]:
                    diags.append(f"{_KIND_WORDS[kind]} {name} in {ax.kind} axiom at {c} "
                                 "is not registered")
            if ax.defeasible and ax.kind in ("evalc", "evalr"):
                diags.append(f"eval axioms cannot be defeasible (context {c})")
            elif ax.defeasible and ax.kind not in DEFEASIBLE_KINDS:
                diags.append(f"{ax.kind} axioms cannot be defeasible (context {c})")
    return diags


_KIND_WORDS = {"i": "individual", "c": "concept", "r": "role", "x": "context"}


def validate_query(sckr: SCKR, q: QueryAtom) -> list[str]:
    diags = []
    sym = sckr.symbols
    if q.context not in sckr.structure.contexts:
        diags.append(f"undeclared context {q.context}")
    if q.subject not in sym.individuals:
        diags.append(f"unknown individual {q.subject}")
    if q.is_role:
        if q.object not in sym.individuals:
            diags.append(f"unknown individual {q.object}")
        if q.predicate not in sym.roles:
            diags.append(f"unknown role {q.predicate}")
    elif q.predicate not in sym.concepts and q.predicate not in (TOP, BOT):
        diags.append(f"unknown concept {q.predicate}")
    return diags
