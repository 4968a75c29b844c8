"""Compile an sCKR into a datalog program with negation and weak constraints."""
from __future__ import annotations

from functools import lru_cache

from .model import SCKR, NormalAxiom, QueryAtom, TOP, BOT, strict_below, validate_query
from .program import MAIN, Atom, Program, Rule, Sym, WeakConstraint, format_atom, parse_program

# Strict axioms -> input facts.
_STRICT = {
    "inst": lambda a, c: [("insta", a[1], a[0], c, MAIN)],
    "ninst": lambda a, c: [("ninsta", a[1], a[0], c)],
    "triple": lambda a, c: [("triplea", a[1], a[0], a[2], c, MAIN)],
    "ntriple": lambda a, c: [("ntriplea", a[1], a[0], a[2], c)],
    "eq": lambda a, c: [("eq", a[0], a[1], c, MAIN)],
    "neq": lambda a, c: [],
    "nom": lambda a, c: [("insta", a[0], a[1], c, MAIN)],
    "top": lambda a, c: [("insta", a[0], TOP, c, MAIN)],
    "bot": lambda a, c: [("insta", a[0], BOT, c, MAIN)],
    "subc": lambda a, c: [("subClass", a[0], a[1], c)],
    "subcnj": lambda a, c: [("subConj", a[0], a[1], a[2], c)],
    "subex": lambda a, c: [("subEx", a[0], a[1], a[2], c)],
    "supex": lambda a, c: [("supEx", a[0], a[1], a[2], c)],
    "forall": lambda a, c: [("supForall", a[0], a[1], a[2], c)],
    "leqone": lambda a, c: [("supLeqOne", a[0], a[1], c)],
    "subr": lambda a, c: [("subRole", a[0], a[1], c)],
    "subrc": lambda a, c: [("subRChain", a[0], a[1], a[2], c)],
    "dis": lambda a, c: [("dis", a[0], a[1], c)],
    "inv": lambda a, c: [("inv", a[0], a[1], c)],
    "irr": lambda a, c: [("irr", a[0], c)],
    "evalc": lambda a, c: [("subEval", a[0], a[1], a[2], c)],
    "evalr": lambda a, c: [("subEvalR", a[0], a[1], a[2], c)],
}

# Defeasible axioms -> def_* fact; assertions are individual-first.
_DEFEASIBLE = {
    "inst": lambda a, c: ("def_insta", a[1], a[0], c),
    "triple": lambda a, c: ("def_triplea", a[1], a[0], a[2], c),
    "ninst": lambda a, c: ("def_ninsta", a[1], a[0], c),
    "ntriple": lambda a, c: ("def_ntriplea", a[1], a[0], a[2], c),
    "subc": lambda a, c: ("def_subclass", a[0], a[1], c),
    "subcnj": lambda a, c: ("def_subcnj", a[0], a[1], a[2], c),
    "subex": lambda a, c: ("def_subex", a[0], a[1], a[2], c),
    "supex": lambda a, c: ("def_supex", a[0], a[1], a[2], c),
    "forall": lambda a, c: ("def_supforall", a[0], a[1], a[2], c),
    "leqone": lambda a, c: ("def_supleqone", a[0], a[1], c),
    "subr": lambda a, c: ("def_subr", a[0], a[1], c),
    "subrc": lambda a, c: ("def_subrc", a[0], a[1], a[2], c),
    "dis": lambda a, c: ("def_dis", a[0], a[1], c),
    "inv": lambda a, c: ("def_inv", a[0], a[1], c),
    "irr": lambda a, c: ("def_irr", a[0], c),
}

DEDUCTION_RULES = r"""
instd(X,Z,C,T) :- insta(X,Z,C,T).
tripled(X,R,Y,C,T) :- triplea(X,R,Y,C,T).
unsat(T) :- ninsta(X,Z,C), instd(X,Z,C,T).
unsat(T) :- ntriplea(X,R,Y,C), tripled(X,R,Y,C,T).
unsat(T) :- eq(X,Y,C,T).
instd(X,"top",C,main) :- nom(X,C).
unsat(T) :- instd(X,"bot",C,T).
instd(X,Z,C,T) :- subClass(Y,Z,C), instd(X,Y,C,T).
instd(X,Z,C,T) :- subConj(Y1,Y2,Z,C), instd(X,Y1,C,T), instd(X,Y2,C,T).
instd(X,Z,C,T) :- subEx(V,Y,Z,C), tripled(X,V,X1,C,T), instd(X1,Y,C,T).
tripled(X,R,X1,C,T) :- supEx(Y,R,X1,C), instd(X,Y,C,T).
instd(Y,Z1,C,T) :- supForall(Z,R,Z1,C), instd(X,Z,C,T), tripled(X,R,Y,C,T).
unsat(T) :- supLeqOne(Z,R,C), instd(X,Z,C,T), tripled(X,R,X1,C,T), tripled(X,R,X2,C,T), X1 != X2.
tripled(X,W,X1,C,T) :- subRole(V,W,C), tripled(X,V,X1,C,T).
tripled(X,W,Z,C,T) :- subRChain(U,V,W,C), tripled(X,U,Y,C,T), tripled(Y,V,Z,C,T).
unsat(T) :- dis(U,V,C), tripled(X,U,Y,C,T), tripled(X,V,Y,C,T).
tripled(Y,V,X,C,T) :- inv(U,V,C), tripled(X,U,Y,C,T).
tripled(Y,U,X,C,T) :- inv(U,V,C), tripled(X,V,Y,C,T).
unsat(T) :- irr(U,C), tripled(X,U,X,C,T).
:- unsat(main).
"""

EVAL_RULES = r"""
instd(X,B,C,T) :- subEval(A,C1,B,C), instd(X,A,C1,T).
tripled(X,S,Y,C,T) :- subEvalR(R,C1,S,C), tripled(X,R,Y,C1,T).
instd(X,B,C,T) :- subEval(A,C1,B,C2), instd(X,A,C1,T), prec(C,C2).
tripled(X,S,Y,C,T) :- subEvalR(R,C1,S,C2), tripled(X,R,Y,C1,T), prec(C,C2).
"""

OVERRIDING_RULES = r"""
ovr(insta,X,Y,C1,C) :- def_insta(X,Y,C1), prec(C,C1), not test_fails(nlit(X,Y,C)).
ovr(triplea,X,R,Y,C1,C) :- def_triplea(X,R,Y,C1), prec(C,C1), not test_fails(nrel(X,R,Y,C)).
ovr(ninsta,X,Y,C1,C) :- def_ninsta(X,Y,C1), prec(C,C1), instd(X,Y,C,main).
ovr(ntriplea,X,R,Y,C1,C) :- def_ntriplea(X,R,Y,C1), prec(C,C1), tripled(X,R,Y,C,main).
ovr(subClass,X,Y,Z,C1,C) :- def_subclass(Y,Z,C1), prec(C,C1), instd(X,Y,C,main), not test_fails(nlit(X,Z,C)).
ovr(subConj,X,Y1,Y2,Z,C1,C) :- def_subcnj(Y1,Y2,Z,C1), prec(C,C1), instd(X,Y1,C,main), instd(X,Y2,C,main), not test_fails(nlit(X,Z,C)).
ovr(subEx,X,R,Y,Z,C1,C) :- def_subex(R,Y,Z,C1), prec(C,C1), tripled(X,R,W,C,main), instd(W,Y,C,main), not test_fails(nlit(X,Z,C)).
ovr(supEx,X,Y,R,W,C1,C) :- def_supex(Y,R,W,C1), prec(C,C1), instd(X,Y,C,main), not test_fails(nrel(X,R,W,C)).
ovr(supForall,X,Y,Z,R,W,C1,C) :- def_supforall(Z,R,W,C1), prec(C,C1), instd(X,Z,C,main), tripled(X,R,Y,C,main), not test_fails(nlit(Y,W,C)).
ovr(supLeqOne,X,X1,X2,Z,R,C1,C) :- def_supleqone(Z,R,C1), prec(C,C1), instd(X,Z,C,main), tripled(X,R,X1,C,main), tripled(X,R,X2,C,main), X1 != X2.
ovr(subRole,X,Y,R,S,C1,C) :- def_subr(R,S,C1), prec(C,C1), tripled(X,R,Y,C,main), not test_fails(nrel(X,S,Y,C)).
ovr(subRChain,X,Y,Z,R,S,T,C1,C) :- def_subrc(R,S,T,C1), prec(C,C1), tripled(X,R,Y,C,main), tripled(Y,S,Z,C,main), not test_fails(nrel(X,T,Z,C)).
ovr(dis,X,Y,R,S,C1,C) :- def_dis(R,S,C1), prec(C,C1), tripled(X,R,Y,C,main), tripled(X,S,Y,C,main).
ovr(inv,X,Y,R,S,C1,C) :- def_inv(R,S,C1), prec(C,C1), tripled(X,R,Y,C,main), not test_fails(nrel(Y,S,X,C)).
ovr(inv,X,Y,R,S,C1,C) :- def_inv(R,S,C1), prec(C,C1), tripled(Y,S,X,C,main), not test_fails(nrel(X,R,Y,C)).
ovr(irr,X,R,C1,C) :- def_irr(R,C1), prec(C,C1), tripled(X,R,X,C,main).
"""

INHERITANCE_RULES = r"""
instd(X,Z,C,T) :- insta(X,Z,C1,T), prec(C,C1), not ovr(insta,X,Z,C1,C).
tripled(X,R,Y,C,T) :- triplea(X,R,Y,C1,T), prec(C,C1), not ovr(triplea,X,R,Y,C1,C).
unsat(T) :- ninsta(X,Z,C1), instd(X,Z,C,T), prec(C,C1), not ovr(ninsta,X,Z,C1,C).
unsat(T) :- ntriplea(X,R,Y,C1), tripled(X,R,Y,C,T), prec(C,C1), not ovr(ntriplea,X,R,Y,C1,C).
instd(X,Z,C,T) :- subClass(Y,Z,C1), instd(X,Y,C,T), prec(C,C1), not ovr(subClass,X,Y,Z,C1,C).
instd(X,Z,C,T) :- subConj(Y1,Y2,Z,C1), instd(X,Y1,C,T), instd(X,Y2,C,T), prec(C,C1), not ovr(subConj,X,Y1,Y2,Z,C1,C).
instd(X,Z,C,T) :- subEx(V,Y,Z,C1), tripled(X,V,X1,C,T), instd(X1,Y,C,T), prec(C,C1), not ovr(subEx,X,V,Y,Z,C1,C).
tripled(X,R,X1,C,T) :- supEx(Y,R,X1,C1), instd(X,Y,C,T), prec(C,C1), not ovr(supEx,X,Y,R,X1,C1,C).
instd(Y,Z1,C,T) :- supForall(Z,R,Z1,C1), instd(X,Z,C,T), tripled(X,R,Y,C,T), prec(C,C1), not ovr(supForall,X,Y,Z,R,Z1,C1,C).
unsat(T) :- supLeqOne(Z,R,C1), instd(X,Z,C,T), tripled(X,R,X1,C,T), tripled(X,R,X2,C,T), prec(C,C1), X1 != X2, not ovr(supLeqOne,X,X1,X2,Z,R,C1,C).
tripled(X,W,X1,C,T) :- subRole(V,W,C1), tripled(X,V,X1,C,T), prec(C,C1), not ovr(subRole,X,X1,V,W,C1,C).
tripled(X,W,Z,C,T) :- subRChain(U,V,W,C1), tripled(X,U,Y,C,T), tripled(Y,V,Z,C,T), prec(C,C1), not ovr(subRChain,X,Y,Z,U,V,W,C1,C).
unsat(T) :- dis(U,V,C1), tripled(X,U,Y,C,T), tripled(X,V,Y,C,T), prec(C,C1), not ovr(dis,X,Y,U,V,C1,C).
tripled(Y,V,X,C,T) :- inv(U,V,C1), tripled(X,U,Y,C,T), prec(C,C1), not ovr(inv,X,Y,U,V,C1,C).
tripled(X,U,Y,C,T) :- inv(U,V,C1), tripled(Y,V,X,C,T), prec(C,C1), not ovr(inv,X,Y,U,V,C1,C).
unsat(T) :- irr(U,C1), tripled(X,U,X,C,T), prec(C,C1), not ovr(irr,X,U,C1,C).
"""

TEST_RULES = r"""
test(nlit(X,Y,C)) :- def_insta(X,Y,C1), prec(C,C1).
:- test_fails(nlit(X,Y,C)), ovr(insta,X,Y,C1,C).
test(nrel(X,R,Y,C)) :- def_triplea(X,R,Y,C1), prec(C,C1).
:- test_fails(nrel(X,R,Y,C)), ovr(triplea,X,R,Y,C1,C).
test(nlit(X,Z,C)) :- def_subclass(Y,Z,C1), instd(X,Y,C,main), prec(C,C1).
:- test_fails(nlit(X,Z,C)), ovr(subClass,X,Y,Z,C1,C).
test(nlit(X,Z,C)) :- def_subcnj(Y1,Y2,Z,C1), instd(X,Y1,C,main), instd(X,Y2,C,main), prec(C,C1).
:- test_fails(nlit(X,Z,C)), ovr(subConj,X,Y1,Y2,Z,C1,C).
test(nlit(X,Z,C)) :- def_subex(R,Y,Z,C1), tripled(X,R,W,C,main), instd(W,Y,C,main), prec(C,C1).
:- test_fails(nlit(X,Z,C)), ovr(subEx,X,R,Y,Z,C1,C).
test(nrel(X,R,W,C)) :- def_supex(Y,R,W,C1), instd(X,Y,C,main), prec(C,C1).
:- test_fails(nrel(X,R,W,C)), ovr(supEx,X,Y,R,W,C1,C).
test(nlit(Y,W,C)) :- def_supforall(Z,R,W,C1), instd(X,Z,C,main), tripled(X,R,Y,C,main), prec(C,C1).
:- test_fails(nlit(Y,W,C)), ovr(supForall,X,Y,Z,R,W,C1,C).
test(nrel(X,S,Y,C)) :- def_subr(R,S,C1), tripled(X,R,Y,C,main), prec(C,C1).
:- test_fails(nrel(X,S,Y,C)), ovr(subRole,X,Y,R,S,C1,C).
test(nrel(X,T,Z,C)) :- def_subrc(R,S,T,C1), tripled(X,R,Y,C,main), tripled(Y,S,Z,C,main), prec(C,C1).
:- test_fails(nrel(X,T,Z,C)), ovr(subRChain,X,Y,Z,R,S,T,C1,C).
test(nrel(Y,S,X,C)) :- def_inv(R,S,C1), tripled(X,R,Y,C,main), prec(C,C1).
test(nrel(X,R,Y,C)) :- def_inv(R,S,C1), tripled(Y,S,X,C,main), prec(C,C1).
:- test_fails(nrel(Y,S,X,C)), ovr(inv,X,Y,R,S,C1,C), tripled(X,R,Y,C,main).
:- test_fails(nrel(X,R,Y,C)), ovr(inv,X,Y,R,S,C1,C), tripled(Y,S,X,C,main).
test_fails(nlit(X,Z,C)) :- instd(X,Z,C,nlit(X,Z,C)), not unsat(nlit(X,Z,C)).
test_fails(nrel(X,R,Y,C)) :- tripled(X,R,Y,C,nrel(X,R,Y,C)), not unsat(nrel(X,R,Y,C)).
instd(X,Z,C,nlit(X,Z,C)) :- test(nlit(X,Z,C)).
tripled(X,R,Y,C,nrel(X,R,Y,C)) :- test(nrel(X,R,Y,C)).
instd(X1,Y1,C,T) :- instd(X1,Y1,C,main), test(T).
tripled(X1,R,Y1,C,T) :- tripled(X1,R,Y1,C,main), test(T).
"""

# kind tag -> ovr argument variables between the tag and (C1, C)
OVR_ARGS = {
    "insta": "X,Y",
    "triplea": "X,R,Y",
    "ninsta": "X,Y",
    "ntriplea": "X,R,Y",
    "subClass": "X,Y,Z",
    "subConj": "X,Y1,Y2,Z",
    "subEx": "X,V,Y,Z",
    "supEx": "X,Y,R,X1",
    "supForall": "X,Y,Z,R,Z1",
    "supLeqOne": "X,X1,X2,Z,R",
    "subRole": "X,Y,V,W",
    "subRChain": "X,Y,Z,U,V,W",
    "dis": "X,Y,U,V",
    "inv": "X,Y,U,V",
    "irr": "X,U",
}


def _preference_rules() -> str:
    lines = []
    for kind, args in OVR_ARGS.items():
        lines.append(f"ovrlevel_{kind}({args},C,N) :- ovr({kind},{args},C1,C), level(C1,N).")
        lines.append(f":~ ovrlevel_{kind}({args},C,N). [1@N]")
    return "\n".join(lines) + "\n"


@lru_cache(maxsize=1)
def _fixed() -> Program:
    text = (DEDUCTION_RULES + EVAL_RULES + OVERRIDING_RULES + INHERITANCE_RULES
            + TEST_RULES + _preference_rules())
    return parse_program(text)


def fixed_rules() -> tuple[list[Rule], list[WeakConstraint]]:
    """The non-ground rule schemas shared by every translated program."""
    p = _fixed()
    return list(p.rules), list(p.weak)


def input_strict(ax: NormalAxiom, c: str) -> list[Atom]:
    return _STRICT[ax.kind](ax.args, c)


def input_defeasible(ax: NormalAxiom, c: str) -> list[Atom]:
    """def_* fact plus the strict facts of the same axiom at its home context."""
    if ax.kind not in _DEFEASIBLE:
        raise ValueError(f"{ax.kind} axioms have no defeasible form")
    return [_DEFEASIBLE[ax.kind](ax.args, c)] + input_strict(ax, c)


def translate(sckr: SCKR) -> Program:
    st = sckr.structure
    facts: list[Atom] = []
    below = strict_below(st)
    facts += [("prec", lo, hi) for lo, hi in sorted(below, key=lambda e: (st.level[e[0]], e))]
    ordered = st.ordered()
    facts += [("level", c, st.level[c] + 1) for c in ordered]
    sym = sckr.symbols
    for c in ordered:
        facts += [("nom", a, c) for a in sorted(sym.individuals)]
        facts += [("cls", a, c) for a in sorted(sym.concepts)]
        facts += [("rol", r, c) for r in sorted(sym.roles)]
    # axiom facts are sorted, so module order never changes the program
    inputs = set()
    for c, ax in sckr.axioms():
        inputs.update(input_defeasible(ax, c) if ax.defeasible else input_strict(ax, c))
    facts += sorted(inputs - set(facts), key=format_atom)
    rules, weak = fixed_rules()
    return Program(facts, rules, weak)


def output_atom(q: QueryAtom, sckr: SCKR | None = None) -> Atom:
    if sckr is not None:
        diags = validate_query(sckr, q)
        if diags:
            raise ValueError("; ".join(diags))
    if q.is_role:
        return ("tripled", q.subject, q.predicate, q.object, q.context, MAIN)
    return ("instd", q.subject, q.predicate, q.context, MAIN)


# predicate -> arity, for signature checks
SIGNATURE = {
    "nom": 2, "cls": 2, "rol": 2, "insta": 4, "ninsta": 3, "triplea": 5, "ntriplea": 4,
    "eq": 4, "subClass": 3, "subConj": 4, "subEx": 4, "supEx": 4, "supForall": 4,
    "supLeqOne": 3, "subRole": 3, "subRChain": 4, "dis": 3, "inv": 3, "irr": 2,
    "subEval": 4, "subEvalR": 4, "prec": 2, "level": 2, "instd": 4, "tripled": 5,
    "unsat": 1, "test": 1, "test_fails": 1,
    "def_insta": 3, "def_triplea": 4, "def_ninsta": 3, "def_ntriplea": 4,
    "def_subclass": 3, "def_subcnj": 4, "def_subex": 4, "def_supex": 4,
    "def_supforall": 4, "def_supleqone": 3, "def_subr": 3, "def_subrc": 4,
    "def_dis": 3, "def_inv": 3, "def_irr": 2,
}
for _k, _a in OVR_ARGS.items():
    SIGNATURE[f"ovrlevel_{_k}"] = len(_a.split(",")) + 2
OVR_ARITY = {k: len(a.split(",")) + 3 for k, a in OVR_ARGS.items()}


def signature_ok(atom: Atom) -> bool:
    pred = atom[0]
    if pred == "ovr":
        tag = atom[1]
        return isinstance(tag, Sym) and OVR_ARITY.get(tag.name) == len(atom) - 1
    return SIGNATURE.get(pred) == len(atom) - 1
