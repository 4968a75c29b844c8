import random

import pytest

from sckr import engine, oracle
from sckr.model import BOT, NormalAxiom as Ax, QueryAtom, validate
from sckr.reductions import (CnfInstance, QbfLayout, ReductionError, check_odd_instances,
                             check_qbf, coupling_clauses, gen_lexmax_sat, gen_odd_sat, gen_qbf,
                             lexmax_assignment, normalize_to_rl, odd_sat_value, parse_dimacs,
                             qbf_value, random_monotone_cnf, random_odd_instances, random_qbf)
from sckr.translator import output_atom, translate


# --- CNF plumbing ---------------------------------------------------------------

def test_dimacs_round_trip():
    e = CnfInstance(3, ((1, 2, 3), (-1, -2, -2)))
    assert parse_dimacs(e.to_dimacs()) == e
    assert parse_dimacs("c comment\np cnf 2 1\n1 -2\n0\n").clauses == ((1, -2),)


@pytest.mark.parametrize("text", ["1 2 0\n", "p dnf 2 1\n1 0\n", "p cnf 1 1\n2 0\n"])
def test_dimacs_errors(text):
    with pytest.raises(ReductionError):
        parse_dimacs(text)


def test_monotone_flag():
    assert CnfInstance(2, ((1, 1, 2), (-1, -2, -2))).monotone
    assert not CnfInstance(2, ((1, -2, 2),)).monotone


def test_lexmax():
    assert lexmax_assignment(CnfInstance(1, ((1, 1, 1),))) == (True,)
    assert lexmax_assignment(CnfInstance(1, ((-1, -1, -1),))) == (False,)
    assert lexmax_assignment(CnfInstance(1, ((1, 1, 1), (-1, -1, -1)))) == "unsat"
    with pytest.raises(ReductionError):
        lexmax_assignment(CnfInstance(3, ()), max_vars=2)


# --- normal form ------------------------------------------------------------------

def test_normalize_three_existentials():
    axs = normalize_to_rl(["N1", "N2", "N3"], "T", "A")
    # T⊓A⊑TA, three ∃Nj.TA⊑Ej, E1⊓E2⊑E12, E12⊓E3⊑⊥
    assert [a.kind for a in axs] == ["subcnj", "subex", "subex", "subex", "subcnj", "subcnj"]
    fresh = {n for a in axs for n in a.args} - {"N1", "N2", "N3", "T", "A", BOT}
    assert len(fresh) == 5
    assert axs[-1].args[-1] == BOT


def test_normalize_single_existential():
    assert normalize_to_rl(["P"], "F", "A") == [Ax("subcnj", ("F", "A", "FA")),
                                                  Ax("subex", ("P", "FA", BOT))]


def test_normalize_is_deterministic():
    assert normalize_to_rl(["N1", "N2"], "T", "A") == normalize_to_rl(["N1", "N2"], "T", "A")


def test_normalize_unsupported():
    with pytest.raises(ReductionError):
        normalize_to_rl([], "T", "A")
    with pytest.raises(ReductionError):
        normalize_to_rl(["R"], "T", "A", target="C")


# --- lexicographic maximum ------------------------------------------------------

def test_lexmax_instance_shape():
    gi = gen_lexmax_sat(CnfInstance(2, ((1, 2, 2),)))
    st = gi.sckr.structure
    assert dict(st.level) == {"c0": 3, "c1": 2, "c2": 1, "c3": 0}
    assert validate(gi.sckr, ranked=True) == []
    assert gi.queries == [QueryAtom("c0", "x2", "T")]
    assert Ax("subc", ("V1", "F"), True) in gi.sckr.modules["c3"]
    assert gi.sckr.modules["c1"] == (Ax("subc", ("V1", "T"), True),)


@pytest.mark.parametrize("clauses,n,var,concept,expected", [
    (((1, 1, 1),), 1, "x1", "T", True),
    (((-1, -1, -1),), 1, "x1", "T", False),
    (((-1, -1, -1),), 1, "x1", "F", True),
    (((1, 2, 2), (-1, -2, -2)), 2, "x2", "T", False),
])
def test_lexmax_examples(clauses, n, var, concept, expected):
    k = gen_lexmax_sat(CnfInstance(n, clauses)).sckr
    q = QueryAtom("c0", var, concept)
    assert oracle.entails(k, q) is expected
    assert engine.cautious_entails(engine.ground(translate(k)), output_atom(q)) is expected


def test_lexmax_true_axiom_preferred():
    k = gen_lexmax_sat(CnfInstance(1, ((1, 1, 1),))).sckr
    (best,) = oracle.preferred(k)
    assert {a.axiom.args for a in best.chi} == {("V1", "F")}


def test_lexmax_rejects_mixed_clause():
    with pytest.raises(ReductionError):
        gen_lexmax_sat(CnfInstance(2, ((1, -2, 2),)))
    with pytest.raises(ReductionError):
        gen_lexmax_sat(CnfInstance(2, ((1, 2),)))


def test_lexmax_models_correspond_to_assignments():
    rng = random.Random(4)
    for _ in range(15):
        e = random_monotone_cnf(rng, rng.randint(1, 4), rng.randint(1, 5))
        k = gen_lexmax_sat(e).sckr
        assert len(oracle.enumerate_justified(k)) == len(e.models()), e.clauses


# --- ODD SAT ----------------------------------------------------------------------

POS = CnfInstance(1, ((1, 1, 1),))
NEG = CnfInstance(1, ((-1, -1, -1),))


def test_odd_even_count_not_entailed():
    gi = gen_odd_sat([POS, POS])
    assert not odd_sat_value([POS, POS])
    assert not oracle.entails(gi.sckr, gi.queries[0])


def test_odd_single_qualifying_entailed():
    gi = gen_odd_sat([POS, NEG])
    assert odd_sat_value([POS, NEG])
    assert oracle.entails(gi.sckr, gi.queries[0])


def test_odd_shape():
    gi = gen_odd_sat([POS, NEG])
    st = gi.sckr.structure
    assert dict(st.level) == {"c0": 2, "c1": 1, "c2": 0}
    c0 = gi.sckr.modules["c0"]
    assert Ax("triple", ("C", "x1_1", "x2_1")) in c0
    assert Ax("triple", ("R", "a", "x1_1")) in c0
    assert Ax("subex", ("R", "Y", "O")) in c0
    assert gi.queries == [QueryAtom("c0", "a", "O")]


def test_odd_translation_agrees():
    rng = random.Random(12)
    for _ in range(4):
        ins = random_odd_instances(rng, 2)
        gi = gen_odd_sat(ins)
        q = gi.queries[0]
        assert oracle.entails(gi.sckr, q) == \
            engine.cautious_entails(engine.ground(translate(gi.sckr)), output_atom(q)) == \
            odd_sat_value(ins)


def test_odd_preconditions():
    assert check_odd_instances([POS])
    mixed = CnfInstance(2, ((2, 2, 2),))  # model with x2 true and x1 false
    assert any("neither" in d for d in check_odd_instances([mixed, mixed]))
    assert any("after a non-qualifying" in d for d in check_odd_instances([NEG, POS]))
    with pytest.raises(ReductionError):
        gen_odd_sat([NEG, POS])


def test_odd_parity_counts():
    assert odd_sat_value([POS, NEG, NEG, NEG])
    assert not odd_sat_value([POS, POS, NEG, NEG])


# --- QBF --------------------------------------------------------------------------

def _qbf(extra, nx=1, ny=1):
    layout = QbfLayout(nx, ny)
    return CnfInstance(2 * nx + ny, tuple(coupling_clauses(layout)) + tuple(extra)), layout


def test_qbf_unconstrained_flip_is_true():
    e, layout = _qbf([])
    mu = (True,)
    assert check_qbf(e, layout, mu) == []
    assert qbf_value(e, layout, mu)
    gi = gen_qbf(e, layout, mu)
    assert gi.mode == "induced-local"
    assert oracle.entails(gi.sckr, gi.queries[0], oracle.INDUCED)


def test_qbf_blocked_flip_is_false():
    # y1 is forced true, so mu = (True,) never has an alternative
    e, layout = _qbf([(3, 3, 3)])
    mu = (True,)
    assert check_qbf(e, layout, mu) == []
    assert not qbf_value(e, layout, mu)
    gi = gen_qbf(e, layout, mu)
    assert not oracle.entails(gi.sckr, gi.queries[0], oracle.INDUCED)


def test_qbf_connectors():
    rng = random.Random(1)
    for _ in range(5):
        e, layout, mu = random_qbf(rng)
        k = gen_qbf(e, layout, mu).sckr
        for j in range(1, layout.ny + 1):
            assert oracle.is_connector(k, f"c_y{j}", "c0")


def test_qbf_precondition_enforced():
    e, layout = _qbf([(-3, -3, -3)])
    assert check_qbf(e, layout, (True,))
    with pytest.raises(ReductionError):
        gen_qbf(e, layout, (True,))


def test_generated_instances_translate():
    rng = random.Random(2)
    gens = [gen_lexmax_sat(random_monotone_cnf(rng, 3, 3)),
            gen_odd_sat(random_odd_instances(rng, 2)),
            gen_qbf(*random_qbf(rng))]
    for gi in gens:
        assert validate(gi.sckr) == []
        assert translate(gi.sckr).facts


def test_sidecar(tmp_path):
    gi = gen_qbf(*_qbf([]), (False,))
    ckr, side = gi.write(tmp_path / "q")
    text = side.read_text()
    assert "mode=induced-local" in text
    assert "query=T(y1)@c0" in text and "expected=entailed" in text
    assert ckr.read_text().splitlines()[0].startswith("context c_")
    assert "module c0 {" in ckr.read_text()
