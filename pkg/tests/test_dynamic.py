import numpy as np
import pytest

from ccpsem.data import data_path
from ccpsem.dynamic import (
    BINARIZED,
    COUNTING,
    BackendMismatch,
    Context,
    EmptyRestrictorWarning,
    UnknownWord,
    UpdateMode,
    apply_ccp,
    context_diff,
    load_context,
    run_update_script,
    run_update_term,
    save_context,
    update_F,
    update_G,
    update_I,
    update_J,
    update_negation,
    update_quantifier,
    update_who,
    zero_context,
)
from ccpsem.hom import load_lexicon
from ccpsem.terms import parse_term

WORDS = ("anna", "susan", "aunt", "woman", "man", "cat", "dog", "home",
         "tall", "smoke", "love", "know", "went", "is", "is-a", "smoker")


@pytest.fixture
def matrix():
    return zero_context(WORDS, "matrix")


@pytest.fixture
def cube():
    return zero_context(WORDS, "cube", nominals={"smoke": "smoker"})


@pytest.fixture(scope="module")
def dyn_lex():
    return load_lexicon(data_path("dynamic.lex"))


def test_F_matrix_counts(matrix):
    c = matrix
    for _ in range(3):
        c = update_F("tall", "man", c, COUNTING)
    assert c.cell("tall", "man") == 3.0
    assert matrix.cell("tall", "man") == 0.0  # input untouched


def test_F_binarized_idempotent(matrix):
    c = update_F("tall", "man", matrix, BINARIZED)
    c = update_F("tall", "man", c, BINARIZED)
    assert c.bcell("tall", "man") == 1.0
    assert np.sum(c.binary.data) == 1.0


def test_F_cube_cell(cube):
    c = update_F("tall", "man", cube, COUNTING)
    assert c.cell("man", "is", "tall") == 1.0


def test_unknown_word(matrix):
    with pytest.raises(UnknownWord):
        update_F("purple", "man", matrix, COUNTING)


def test_G_matrix_and_identity(matrix):
    c = update_G("smoke", "man", matrix, COUNTING)
    assert c.cell("smoke", "man") == 1.0
    assert matrix.same_content(matrix, COUNTING)


def test_G_cube_nominalizes(cube):
    c = update_G("smoke", "anna", cube, COUNTING)
    assert c.cell("anna", "is-a", "smoker") == 1.0


def test_G_cube_default_nominalization():
    c = zero_context(("dog", "sleep"), "cube")
    c = update_G("sleep", "dog", c, COUNTING)
    assert c.cell("dog", "is-a", "sleeper") == 1.0


def test_I_matrix_three_cells(matrix):
    c = update_I("love", "cat", "anna", matrix, COUNTING)
    assert c.cell("love", "anna") == 1.0
    assert c.cell("anna", "cat") == 1.0
    assert c.cell("love", "cat") == 1.0
    assert np.sum(c.numeric.data) == 3.0


def test_I_matrix_self_loop_hits_diagonal(matrix):
    c = update_I("love", "love", "love", matrix, COUNTING)
    assert c.cell("love", "love") == 3.0
    assert np.sum(c.numeric.data) == 3.0


def test_I_cube_cell(cube):
    c = update_I("love", "cat", "anna", cube, COUNTING)
    assert c.cell("anna", "love", "cat") == 1.0
    assert np.sum(c.numeric.data) == 1.0


def test_J_matrix(matrix):
    c = update_J("know", "man", matrix, COUNTING)
    assert c.cell("know", "man") == 1.0


def test_J_cube_interns_proposition(cube):
    c = update_J("know", "anna", cube, BINARIZED, prop="cat-sleep")
    assert "cat-sleep" in c.vocabulary
    assert c.bcell("anna", "know", "cat-sleep") == 1.0
    again = update_J("know", "anna", c, BINARIZED, prop="cat-sleep")
    assert again.same_content(c, BINARIZED)


def test_who_update(cube):
    c = update_who("man", "went", "home", cube, COUNTING)
    assert c.cell("man", "went", "home") == 1.0


def test_who_needs_cube(matrix):
    with pytest.raises(BackendMismatch):
        update_who("man", "went", "home", matrix, COUNTING)


def test_negation_counting_and_binarized(cube):
    c = update_I("love", "cat", "anna", cube, COUNTING)
    c = update_I("love", "cat", "anna", c, COUNTING)
    c = update_I("love", "cat", "anna", c, COUNTING)
    c = update_negation("love", "cat", "anna", c, COUNTING)
    assert c.cell("anna", "love", "cat") == 2.0

    b = update_I("love", "cat", "anna", cube, BINARIZED)
    b = update_negation("love", "cat", "anna", b, BINARIZED)
    assert b.bcell("anna", "love", "cat") == 0.0
    b2 = update_negation("love", "cat", "anna", b, BINARIZED)
    assert b2.bcell("anna", "love", "cat") == 0.0


def _with_women(cube):
    c = cube
    for name in ("anna", "susan", "aunt"):
        c = update_I("is-a", "woman", name, c, COUNTING)
    return c


def test_quantifier_forall(cube):
    c = _with_women(cube)
    c = update_quantifier("forall", "woman", "love", "cat", c, COUNTING)
    for name in ("anna", "susan", "aunt"):
        assert c.cell(name, "love", "cat") == 1.0


def test_quantifier_some_reproducible(cube):
    c = _with_women(cube)
    mode = UpdateMode("counting", rng_seed=5)
    once = update_quantifier("some", "woman", "love", "cat", c, mode)
    twice = update_quantifier("some", "woman", "love", "cat", c, mode)
    assert once.same_content(twice, mode)
    bumped = sum(
        once.cell(n, "love", "cat") for n in ("anna", "susan", "aunt")
    )
    assert 1 <= bumped <= 3


def test_quantifier_subset_relations(cube):
    c = _with_women(cube)
    mode = UpdateMode("counting", rng_seed=9)
    full = update_quantifier("forall", "woman", "love", "cat", c, mode)
    for kind, k in (("some", None), ("most", None), ("at_least", 2), ("at_most", 2)):
        part = update_quantifier(kind, "woman", "love", "cat", c, mode, k=k)
        touched = {cell for e in part.log for cell in e.cells}
        covered = {cell for e in full.log for cell in e.cells}
        assert touched <= covered
    most = update_quantifier("most", "woman", "love", "cat", c, mode)
    n_most = sum(most.cell(n, "love", "cat") for n in ("anna", "susan", "aunt"))
    assert n_most >= 2


def test_quantifier_empty_restrictor(cube):
    with pytest.warns(EmptyRestrictorWarning):
        c = update_quantifier("forall", "dog", "love", "cat", cube, COUNTING)
    assert c.same_content(cube, COUNTING)


def test_apply_ccp_adjective_sentence(dyn_lex):
    c = zero_context(("tall", "woman", "smoke"), "matrix")
    t = parse_term("((every (tall woman)) smokes)", dyn_lex.source)
    out = apply_ccp(t, dyn_lex, c, COUNTING)
    assert out.cell("tall", "woman") == 1.0
    assert out.cell("smoke", "woman") == 1.0
    assert np.sum(out.numeric.data) == 2.0


def test_apply_ccp_worked_conjunction(dyn_lex):
    c = zero_context(("despise", "cop", "anna", "admire", "bill"), "matrix")
    t = parse_term(
        "((every cop) (lam xi:D (and (Anna (despise xi)) (Bill (admire xi)))))",
        dyn_lex.source,
    )
    out = apply_ccp(t, dyn_lex, c, COUNTING)
    diff = context_diff(c, out, COUNTING)
    assert set(diff) == {
        ("admire", "bill"), ("bill", "cop"), ("admire", "cop"),
        ("despise", "anna"), ("anna", "cop"), ("despise", "cop"),
    }


def test_apply_ccp_identity(dyn_lex):
    c = zero_context(("cat",), "matrix")
    ident = parse_term("(lam c:X c)", dyn_lex.target)
    assert run_update_term(ident, c, COUNTING).same_content(c, COUNTING)


def test_apply_ccp_conjunction_is_composition(dyn_lex):
    words = ("smoke", "cat", "sleep", "dog")
    c = zero_context(words, "matrix")
    a = "(smokes cat)"
    b = "(sleeps dog)"
    combined = parse_term(f"((and {b}) {a})", dyn_lex.source)
    via_formula = apply_ccp(combined, dyn_lex, c, COUNTING)
    stepwise = apply_ccp(parse_term(b, dyn_lex.source), dyn_lex,
                         apply_ccp(parse_term(a, dyn_lex.source), dyn_lex, c,
                                   COUNTING), COUNTING)
    assert via_formula.same_content(stepwise, COUNTING)


def test_apply_ccp_negation_term(dyn_lex):
    c = zero_context(("dog", "chase", "cat"), "cube")
    c = update_I("chase", "cat", "dog", c, BINARIZED)
    t = parse_term("((not dog) (chase cat))", dyn_lex.source)
    out = apply_ccp(t, dyn_lex, c, BINARIZED)
    assert out.bcell("dog", "chase", "cat") == 0.0


def test_apply_ccp_attitude_on_cube(dyn_lex):
    c = zero_context(
        ("bill", "claim", "anna", "see", "witch", "disappear"), "cube"
    )
    t = parse_term(data_path("witch_disappeared.term").read_text(), dyn_lex.source)
    out = apply_ccp(t, dyn_lex, c, BINARIZED)
    assert out.bcell("bill", "claim", "anna-see-witch") == 1.0
    assert out.bcell("anna", "see", "witch") == 1.0
    assert out.bcell("witch", "is-a", "disappearer") == 1.0


def test_counting_updates_commute_on_disjoint_cells(matrix):
    a = update_F("tall", "man", matrix, COUNTING)
    ab = update_G("smoke", "anna", a, COUNTING)
    b = update_G("smoke", "anna", matrix, COUNTING)
    ba = update_F("tall", "man", b, COUNTING)
    assert ab.same_content(ba, COUNTING)


def test_update_script_and_context_io(tmp_path, matrix):
    script = ["F tall man 3", "G smoke man 2", "I love cat anna 1"]
    out = run_update_script(script, matrix, COUNTING)
    assert out.cell("tall", "man") == 3.0
    assert out.cell("smoke", "man") == 2.0
    assert out.cell("love", "anna") == 1.0
    path = tmp_path / "ctx.tensor"
    save_context(out, path)
    back = load_context(path)
    assert back.same_content(out, COUNTING)
