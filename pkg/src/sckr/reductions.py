"""Hardness constructions as instance generators, with brute-force evaluators.

Three families are built here: the lexicographic-maximum SAT chain, the ODD SAT
three-context construction and the ∀∃ QBF construction evaluated under the
induced local preference.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from pathlib import Path

from .model import BOT, SCKR, NormalAxiom, QueryAtom, make_sckr, validate

DEFAULT_MAX_VARS = 20


class ReductionError(ValueError):
    pass


# --- CNF ----------------------------------------------------------------------

@dataclass(frozen=True)
class CnfInstance:
    """Clauses are tuples of non-zero ints, DIMACS style."""
    n: int
    clauses: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(tuple(c) for c in self.clauses))
        for c in self.clauses:
            if not c or any(l == 0 or abs(l) > self.n for l in c):
                raise ReductionError(f"literal out of range in clause {c}")

    @property
    def monotone(self) -> bool:
        return all(all(l > 0 for l in c) or all(l < 0 for l in c) for c in self.clauses)

    @property
    def three(self) -> bool:
        return all(len(c) == 3 for c in self.clauses)

    def satisfied(self, assignment) -> bool:
        return all(any(assignment[abs(l) - 1] == (l > 0) for l in c) for c in self.clauses)

    def models(self) -> list[tuple[bool, ...]]:
        if self.n > DEFAULT_MAX_VARS:
            raise ReductionError(f"more than {DEFAULT_MAX_VARS} variables")
        return [a for a in itertools.product((False, True), repeat=self.n) if self.satisfied(a)]

    def to_dimacs(self) -> str:
        lines = [f"p cnf {self.n} {len(self.clauses)}"]
        lines += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfInstance:
    n = None
    clauses, cur = [], []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line[0] in "c%":
            continue
        if line.startswith("p"):
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ReductionError(f"bad header: {line!r}")
            n = int(parts[2])
            continue
        for tok in line.split():
            v = int(tok)
            if v == 0:
                clauses.append(tuple(cur))
                cur = []
            else:
                cur.append(v)
    if n is None:
        raise ReductionError("missing 'p cnf' header")
    if cur:
        clauses.append(tuple(cur))
    return CnfInstance(n, tuple(clauses))


def random_monotone_cnf(rng: random.Random, n: int, m: int) -> CnfInstance:
    clauses = []
    for _ in range(m):
        sign = rng.choice((1, -1))
        clauses.append(tuple(sign * rng.randint(1, n) for _ in range(3)))
    return CnfInstance(n, tuple(clauses))


def lexmax_assignment(e: CnfInstance, max_vars: int = DEFAULT_MAX_VARS):
    """Largest model with x1 most significant, or ``"unsat"``."""
    if e.n > max_vars:
        raise ReductionError(f"{e.n} variables exceeds cap {max_vars}")
    for a in itertools.product((True, False), repeat=e.n):
        if e.satisfied(a):
            return a
    return "unsat"


# --- generated instances --------------------------------------------------------

@dataclass
class GeneratedInstance:
    sckr: SCKR
    queries: list[QueryAtom]
    expected: list = field(default_factory=list)
    mode: str = "global-profile"

    def sidecar(self) -> str:
        lines = [f"mode={self.mode}"]
        for i, q in enumerate(self.queries):
            lines.append(f"query={q}")
            if i < len(self.expected) and self.expected[i] is not None:
                lines.append(f"expected={self.expected[i]}")
        return "\n".join(lines) + "\n"

    def write(self, stem: str | Path) -> tuple[Path, Path]:
        from .frontend import serialize
        stem = Path(stem)
        ckr, side = stem.with_suffix(".ckr"), stem.with_suffix(".query")
        ckr.write_text(serialize(self.sckr))
        side.write_text(self.sidecar())
        return ckr, side


def _checked(k: SCKR) -> SCKR:
    diags = validate(k, ranked=True)
    if diags:
        raise ReductionError("; ".join(diags))
    return k


# --- normal form ----------------------------------------------------------------

def normalize_to_rl(roles, x: str, y: str, target: str = BOT) -> list[NormalAxiom]:
    """Split ``⊓_j ∃roles[j].(x ⊓ y) ⊑ target`` into normal-form axioms."""
    roles = list(roles)
    if not roles:
        raise ReductionError("need at least one existential")
    if target != BOT:
        raise ReductionError("only inclusions into bot are supported")
    xy = f"{x}{y}"
    out = [NormalAxiom("subcnj", (x, y, xy))]
    if len(roles) == 1:
        return out + [NormalAxiom("subex", (roles[0], xy, BOT))]
    es = [f"{r}_{xy}" for r in roles]
    out += [NormalAxiom("subex", (r, xy, ej)) for r, ej in zip(roles, es)]
    acc = es[0]
    for i, ej in enumerate(es[1:], 2):
        nxt = BOT if i == len(es) else "".join(roles[:i]) + f"_{xy}"
        out.append(NormalAxiom("subcnj", (acc, ej, nxt)))
        acc = nxt
    return out


P_ROLES = ("P1", "P2", "P3")
N_ROLES = ("N1", "N2", "N3")


def _truth_axioms() -> list[NormalAxiom]:
    return ([NormalAxiom("subcnj", ("T", "F", BOT)),
             NormalAxiom("subc", ("T", "A")),
             NormalAxiom("subc", ("F", "A"))]
            + normalize_to_rl(N_ROLES, "T", "A")
            + normalize_to_rl(P_ROLES, "F", "A"))


def _clause_facts(clauses, var_name, clause_name) -> list[NormalAxiom]:
    out = []
    for i, c in enumerate(clauses):
        roles = P_ROLES if c[0] > 0 else N_ROLES
        for r, lit in zip(roles, c):
            out.append(NormalAxiom("triple", (r, clause_name(i), var_name(abs(lit)))))
    return out


def _require_monotone3(e: CnfInstance):
    if not e.monotone:
        raise ReductionError("clauses must be all-positive or all-negative")
    if not e.three:
        raise ReductionError("clauses must have exactly three literals")


# --- lexicographic maximum ------------------------------------------------------

def gen_lexmax_sat(e: CnfInstance) -> GeneratedInstance:
    """Chain c0 < c1 < ... < c_{n+1}; the query is T(x_n)@c0."""
    _require_monotone3(e)
    n = e.n
    ctx = [f"c{i}" for i in range(n + 2)]
    levels = {ctx[0]: n + 1, ctx[n + 1]: 0}
    levels.update({ctx[i]: n + 1 - i for i in range(1, n + 1)})
    covers = {(ctx[i], ctx[i + 1]) for i in range(n + 1)}
    var = lambda i: f"x{i}"
    modules = {c: [] for c in ctx}
    modules[ctx[n + 1]] = [NormalAxiom("subc", (f"V{i}", "F"), True) for i in range(1, n + 1)]
    for i in range(1, n + 1):
        modules[ctx[i]] = [NormalAxiom("subc", (f"V{i}", "T"), True)]
    modules[ctx[0]] = (_truth_axioms()
                       + [NormalAxiom("inst", (f"V{h}", var(h))) for h in range(1, n + 1)]
                       + _clause_facts(e.clauses, var, lambda i: f"g{i + 1}"))
    k = _checked(make_sckr(levels, covers, modules))
    best = lexmax_assignment(e)
    expected = "inconsistent" if best == "unsat" else ("entailed" if best[-1] else "not-entailed")
    return GeneratedInstance(k, [QueryAtom(ctx[0], var(n), "T")], [expected])


# --- ODD SAT ----------------------------------------------------------------------

def _qualifies(e: CnfInstance) -> bool:
    return any(any(a) for a in e.models())


def check_odd_instances(instances: list[CnfInstance]) -> list[str]:
    """Violations of the normal form the ODD SAT construction relies on."""
    diags = []
    if not instances or len(instances) % 2:
        diags.append("need an even, non-zero number of instances")
    seen_non = False
    for k, e in enumerate(instances, 1):
        if not (e.monotone and e.three):
            diags.append(f"E{k} is not a monotone 3CNF")
            continue
        ms = e.models()
        if not ms:
            diags.append(f"E{k} is unsatisfiable")
        if any(any(a) and not a[0] for a in ms):
            diags.append(f"E{k} has a model that is neither all-false nor sets its first atom")
        q = _qualifies(e)
        if q and seen_non:
            diags.append(f"E{k} qualifies after a non-qualifying instance")
        seen_non = seen_non or not q
    return diags


def odd_sat_value(instances: list[CnfInstance]) -> bool:
    """Is the number of instances with a model other than all-false odd?"""
    return sum(_qualifies(e) for e in instances) % 2 == 1


def gen_odd_sat(instances: list[CnfInstance]) -> GeneratedInstance:
    diags = check_odd_instances(instances)
    if diags:
        raise ReductionError("; ".join(diags))
    levels = {"c0": 2, "c1": 1, "c2": 0}
    covers = {("c0", "c1"), ("c1", "c2")}
    var = lambda k: (lambda j: f"x{k}_{j}")
    c0 = (_truth_axioms()
          + [NormalAxiom("subex", ("C", "F", "CF")),
             NormalAxiom("subcnj", ("T", "CF", "Y")),
             NormalAxiom("subex", ("R", "Y", "O"))])
    for k, e in enumerate(instances, 1):
        c0 += [NormalAxiom("inst", ("V", var(k)(j))) for j in range(1, e.n + 1)]
        c0 += _clause_facts(e.clauses, var(k), lambda i, k=k: f"g{k}_{i + 1}")
    for k in range(1, len(instances), 2):
        c0.append(NormalAxiom("triple", ("C", var(k)(1), var(k + 1)(1))))
        c0.append(NormalAxiom("triple", ("R", "a", var(k)(1))))
    modules = {"c0": c0,
               "c1": [NormalAxiom("subc", ("V", "T"), True)],
               "c2": [NormalAxiom("subc", ("V", "F"), True)]}
    k = _checked(make_sckr(levels, covers, modules))
    exp = "entailed" if odd_sat_value(instances) else "not-entailed"
    return GeneratedInstance(k, [QueryAtom("c0", "a", "O")], [exp])


def random_odd_instances(rng: random.Random, l: int, max_vars: int = 3,
                         max_clauses: int = 3) -> list[CnfInstance]:
    """Rejection-sample ``l`` instances in ODD normal form, qualifying ones first."""
    out = []
    while len(out) < l:
        n = rng.randint(1, max_vars)
        e = random_monotone_cnf(rng, n, rng.randint(1, max_clauses))
        if not check_odd_instances([e, e]):
            out.append(e)
    out.sort(key=lambda e: not _qualifies(e))
    return out


# --- QBF --------------------------------------------------------------------------

@dataclass(frozen=True)
class QbfLayout:
    """Variables 1..nx are X, nx+1..2nx are X', the rest are Y'."""
    nx: int
    ny: int

    def x(self, i):
        return i

    def xp(self, i):
        return self.nx + i

    def y(self, j):
        return 2 * self.nx + j

    def name(self, v: int) -> str:
        if v <= self.nx:
            return f"x{v}"
        if v <= 2 * self.nx:
            return f"xp{v - self.nx}"
        return f"y{v - 2 * self.nx}"


def coupling_clauses(layout: QbfLayout) -> list[tuple[int, int, int]]:
    out = []
    for i in range(1, layout.nx + 1):
        x, xp = layout.x(i), layout.xp(i)
        out += [(x, xp, xp), (-x, -xp, -xp)]
    return out


def _full(layout, sigma, ys):
    return tuple(sigma) + tuple(not s for s in sigma) + tuple(ys)


def _alternatives(e, layout, mu, sigma):
    return [ys for ys in itertools.product((False, True), repeat=layout.ny)
            if tuple(ys) != tuple(mu) and e.satisfied(_full(layout, sigma, ys))]


def qbf_value(e: CnfInstance, layout: QbfLayout, mu) -> bool:
    """∀X ∃Y'≠μ E(X, ¬X, Y')."""
    return all(_alternatives(e, layout, mu, s)
               for s in itertools.product((False, True), repeat=layout.nx))


def check_qbf(e: CnfInstance, layout: QbfLayout, mu) -> list[str]:
    diags = []
    if e.n != 2 * layout.nx + layout.ny or len(mu) != layout.ny:
        diags.append("variable counts do not match the layout")
        return diags
    if not (e.monotone and e.three):
        diags.append("E is not a monotone 3CNF")
    if not set(coupling_clauses(layout)) <= set(e.clauses):
        diags.append("E lacks the x <-> not x' coupling clauses")
    for s in itertools.product((False, True), repeat=layout.nx):
        if not e.satisfied(_full(layout, s, mu)):
            diags.append(f"E(X={s}, mu) is false")
            continue
        alts = _alternatives(e, layout, mu, s)
        flip = (not mu[0],) + tuple(mu[1:])
        if alts and (flip not in alts or any(a[0] == mu[0] for a in alts)):
            diags.append(f"for X={s} the alternatives do not all go through flipping y1")
    return diags


def gen_qbf(e: CnfInstance, layout: QbfLayout, mu) -> GeneratedInstance:
    """Three-level construction with one connector context per Y' variable."""
    mu = tuple(bool(v) for v in mu)
    diags = check_qbf(e, layout, mu)
    if diags:
        raise ReductionError("; ".join(diags))
    levels = {"c0": 2}
    covers = set()
    modules: dict[str, list[NormalAxiom]] = {}
    c0 = _truth_axioms()
    for v in range(1, 2 * layout.nx + 1):
        p = layout.name(v)
        levels[f"c_{p}"], levels[f"c_{p}_hat"] = 1, 0
        covers |= {("c0", f"c_{p}"), (f"c_{p}", f"c_{p}_hat")}
        modules[f"c_{p}"] = [NormalAxiom("subc", (f"V{v}", "T"), True)]
        modules[f"c_{p}_hat"] = [NormalAxiom("subc", (f"V{v}", "F"), True)]
    for j in range(1, layout.ny + 1):
        v = layout.y(j)
        keep, other = ("T", "F") if mu[j - 1] else ("F", "T")
        levels[f"c_y{j}"], levels[f"c_not_y{j}"] = 1, 0
        covers |= {("c0", f"c_y{j}"), (f"c_y{j}", f"c_not_y{j}")}
        modules[f"c_y{j}"] = [NormalAxiom("subc", (f"V{v}", other), True)]
        modules[f"c_not_y{j}"] = [NormalAxiom("subc", (f"V{v}", keep), True)]
    c0 += [NormalAxiom("inst", (f"V{v}", layout.name(v))) for v in range(1, e.n + 1)]
    c0 += _clause_facts(e.clauses, layout.name, lambda i: f"g{i + 1}")
    modules["c0"] = c0
    k = _checked(make_sckr(levels, covers, modules))
    query = QueryAtom("c0", "y1", "F" if mu[0] else "T")
    exp = "entailed" if qbf_value(e, layout, mu) else "not-entailed"
    return GeneratedInstance(k, [query], [exp], mode="induced-local")


def random_qbf(rng: random.Random, max_x: int = 2, max_y: int = 2, max_clauses: int = 4):
    """Rejection-sample (E, layout, mu) meeting :func:`check_qbf`."""
    while True:
        layout = QbfLayout(rng.randint(1, max_x), rng.randint(1, max_y))
        n = 2 * layout.nx + layout.ny
        mu = tuple(rng.random() < 0.5 for _ in range(layout.ny))
        extra = random_monotone_cnf(rng, n, rng.randint(1, max_clauses)).clauses
        e = CnfInstance(n, tuple(coupling_clauses(layout)) + extra)
        if not check_qbf(e, layout, mu):
            return e, layout, mu
