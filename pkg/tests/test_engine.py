import itertools

import pytest

from sckr import engine
from sckr.corpus import corpus
from sckr.engine import CostVector
from sckr.oracle import enumerate_justified
from sckr.program import MAIN, Fn, Program, Rule, Sym, Var, WeakConstraint, parse_program
from sckr.reductions import CnfInstance, gen_lexmax_sat
from sckr.translator import output_atom, translate


def solve(text):
    return engine.answer_sets(engine.ground(parse_program(text)))


def texts(models):
    return sorted(tuple(s.text()) for s in models)


def test_grounding_is_driven_by_derivable_atoms():
    g = engine.ground(parse_program("p(a). q(X) :- p(X)."))
    rules = [(g.atoms[h], [g.atoms[b] for b in pos]) for h, pos in zip(g.heads, g.pos) if pos]
    assert rules == [(("q", Sym("a")), [("p", Sym("a"))])]


def test_ex1_environment_universe(ex1):
    g = engine.ground(translate(ex1))
    envs = {a[-1] for a in g.atoms if a[0] in ("instd", "tripled")}
    assert envs == {MAIN, Fn("nlit", ("a", "B", "cbot"))}


def test_unsafe_rule_rejected():
    x = Var("X")
    p = Program(rules=[Rule(("q", x), (), (("p", x),))])
    with pytest.raises(engine.UnsafeRuleError):
        engine.ground(p)


def test_even_loop():
    assert texts(solve("a :- not b. b :- not a.")) == [("a",), ("b",)]


def test_constraint_kills_model():
    assert solve("a. :- a.") == []


def test_odd_loop_has_no_model():
    assert solve("a :- not a.") == []


def test_positive_loop_is_unfounded():
    assert texts(solve("a :- b. b :- a. c :- not a.")) == [("c",)]


def test_ex1_single_answer_set(ex1):
    models = engine.answer_sets(engine.ground(translate(ex1)))
    assert len(models) == 1
    s = models[0]
    assert ("ovr", Sym("subClass"), "a", "A", "B", "ctop", "cbot") in s
    assert ("instd", "a", "B", "cbot", MAIN) not in s
    assert s.cost.as_dict() == {1: 1}


def test_cost_without_preferences(ex2):
    g = engine.ground(translate(ex2))
    (s,) = engine.answer_sets(g)
    assert all(w == 0 for w in engine.cost(g, s.atoms).as_dict().values())


def test_cost_counts_ovrlevel_atom(ex1):
    g = engine.ground(translate(ex1))
    (s,) = engine.answer_sets(g)
    assert ("ovrlevel_subClass", "a", "A", "B", "cbot", 1) in s
    assert engine.cost(g, s.atoms)[1] == 1


def test_higher_level_dominates():
    low, high = CostVector.of({1: 1}), CostVector.of({2: 1})
    assert low < high and not high < low
    assert CostVector.of({2: 1, 1: 0}) < CostVector.of({2: 1, 1: 3})


def test_optimal_respects_levels():
    g = engine.ground(parse_program("x :- not y. y :- not x. :~ x. [1@2] :~ y. [1@1]"))
    assert texts(engine.optimal_answer_sets(g)) == [("y",)]


def test_optimal_ties_broken_at_lower_level():
    prog = ("x :- not y. y :- not x. :~ x. [1@2] :~ y. [1@2] "
            ":~ y. [1@1] :~ y. [1@1] :~ y, x. [5@1]")
    g = engine.ground(parse_program(prog))
    assert texts(engine.optimal_answer_sets(g)) == [("x",)]


def test_lexmax_single_positive_clause_keeps_true_axiom():
    gi = gen_lexmax_sat(CnfInstance(1, ((1, 1, 1),)))
    best = engine.optimal_answer_sets(engine.ground(translate(gi.sckr)))
    assert best
    for s in best:
        tags = {(a[1].name, a[3], a[4]) for a in s.atoms if a[0] == "ovr"}
        assert ("subClass", "V1", "F") in tags
        assert ("subClass", "V1", "T") not in tags


def test_cautious_entailment(ex1):
    g = engine.ground(translate(ex1))
    assert engine.cautious_entails(g, ("instd", "a", "A", "cbot", MAIN))
    assert not engine.cautious_entails(g, ("instd", "a", "B", "cbot", MAIN))


def test_cautious_needs_every_optimal_model():
    g = engine.ground(parse_program("a :- not b. b :- not a. c :- a. c :- b."))
    assert engine.cautious_entails(g, ("c",))
    assert not engine.cautious_entails(g, ("a",))


def test_inconsistent_is_distinct():
    g = engine.ground(parse_program("a. :- a."))
    with pytest.raises(engine.InconsistentProgramError):
        engine.cautious_entails(g, ("a",))


def test_caps():
    with pytest.raises(engine.GroundingLimitError):
        engine.ground(parse_program("p(a). p(b). q(X,Y) :- p(X), p(Y)."), max_ground_atoms=3)
    g = engine.ground(parse_program("a :- not b. b :- not a. c :- not d. d :- not c."))
    with pytest.raises(engine.ModelLimitError):
        engine.answer_sets(g, max_models=2)


def test_caps_from_environment(monkeypatch):
    monkeypatch.setenv("CKR_CAPS", "max_models=1")
    assert engine.resource_caps()["max_models"] == 1
    with pytest.raises(engine.ModelLimitError):
        solve("a :- not b. b :- not a.")


# --- properties over translated corpora ------------------------------------------

@pytest.fixture(scope="module")
def solved():
    out = []
    for k in corpus(17, 40):
        g = engine.ground(translate(k))
        out.append((k, g, engine.answer_sets(g)))
    return out


def test_models_are_stable(solved):
    for _, g, models in solved:
        for s in models:
            assert engine.is_stable(g, s.atoms)
            assert ("unsat", MAIN) not in s


def test_main_facts_copied_into_tests(solved):
    for _, _, models in solved:
        for s in models:
            main = {a[:-1] for a in s.atoms if a[0] in ("instd", "tripled") and a[-1] == MAIN}
            for t in (a[1] for a in s.atoms if a[0] == "test"):
                env = {a[:-1] for a in s.atoms if a[0] in ("instd", "tripled") and a[-1] == t}
                assert main <= env


def test_optimal_models_undominated(solved):
    for _, g, models in solved:
        best = engine.optimal_answer_sets(g)
        assert {s.atoms for s in best} == {s.atoms for s in engine.filter_optimal(models)}
        for b in best:
            assert not any(o.cost < b.cost for o in models)


def test_translated_answer_sets_agree_with_oracle_count(solved):
    for k, _, models in solved:
        assert len(models) == len(enumerate_justified(k))


# --- naive grounding agrees with the bottom-up grounder ---------------------------

def _subst(t, b):
    if isinstance(t, Var):
        return b[t]
    if isinstance(t, Fn):
        return Fn(t.name, tuple(_subst(x, b) for x in t.args))
    return t


def _naive(p: Program) -> Program:
    consts = sorted({t for f in p.facts for t in f[1:]}, key=repr)
    rules = []
    for r in p.rules:
        vs = sorted({t for a in ([r.head] if r.head else []) + list(r.pos) + list(r.neg)
                     for t in a[1:] if isinstance(t, Var)}, key=lambda v: v.name)
        for vals in itertools.product(consts, repeat=len(vs)):
            b = dict(zip(vs, vals))
            if any(_subst(x, b) == _subst(y, b) for x, y in r.neq):
                continue
            sub = lambda a: (a[0], *(_subst(t, b) for t in a[1:]))
            rules.append(Rule(sub(r.head) if r.head else None,
                              tuple(map(sub, r.pos)), tuple(map(sub, r.neg))))
    weak = [WeakConstraint(w.body, w.level, w.weight) for w in p.weak]
    return Program(list(p.facts), rules, weak)


NAIVE_CASES = [
    "e(a,b). e(b,c). e(c,a). in(X) :- e(X,Y), not out(X). out(X) :- e(X,Y), not in(X). "
    ":- in(X), in(Y), e(X,Y).",
    "p(a). p(b). q(X) :- p(X), not r(X). r(X) :- p(X), not q(X). s :- q(X), q(Y), X != Y.",
    "n(a). n(b). t(X,Y) :- n(X), n(Y), not f(X,Y). f(X,Y) :- n(X), n(Y), not t(X,Y). "
    ":- t(X,Y), t(Y,X), X != Y.",
]


@pytest.mark.parametrize("text", NAIVE_CASES)
def test_naive_grounding_equivalence(text):
    p = parse_program(text)
    smart = {s.atoms for s in engine.answer_sets(engine.ground(p))}
    naive = {s.atoms for s in engine.answer_sets(engine.ground(_naive(p)))}
    assert smart == naive and smart
