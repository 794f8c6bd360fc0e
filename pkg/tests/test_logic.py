import itertools

import numpy as np
import pytest

from ccpsem.corpus import (
    AnnotatedSentence,
    Corpus,
    CorpusConfig,
    Triple,
    build_cooccurrence,
    load_corpus,
    normalize_rows,
    parse_demo_sentence,
    restrict_matrix,
)
from ccpsem.data import data_path
from ccpsem.dynamic import BINARIZED, COUNTING, Context, zero_context
from ccpsem.logic import (
    And,
    Atom,
    Implies,
    Not,
    NotBinary,
    Or,
    admits,
    build_context,
    ccp_apply,
    degreed_admits,
    derived_implies,
    derived_or,
    from_relation,
    implies_via_printed_identity,
    or_via_printed_identity,
    parse_formula,
    to_relation,
)
from ccpsem.tensor import Tensor, Vocabulary

NOUNS = ["cat", "mouse", "dog"]
CONTEXT_WORDS = ["animal", "sleep", "chase", "like", "fear", "eat", "smell", "run"]


def sent(*triples):
    return AnnotatedSentence(" ".join("/".join(t.words()) for t in triples), triples)


def atom(subj, rel, obj=None, **kw):
    return Atom(sent(Triple(subj, rel, obj, **kw)))


@pytest.fixture(scope="module")
def catsdogs():
    return load_corpus(data_path("catsdogs.corpus"))


@pytest.fixture(scope="module")
def cats_ctx(catsdogs):
    return build_context(catsdogs, "cube", BINARIZED, fixpoint=True)


@pytest.fixture(scope="module")
def cats_rows(catsdogs):
    cooc = build_cooccurrence(catsdogs, window="sentence")
    rows = normalize_rows(restrict_matrix(cooc, NOUNS, CONTEXT_WORDS), "l1")
    from ccpsem.dynamic import Context

    return Context("matrix", rows)


def fresh():
    return zero_context(("cat", "dog", "mouse", "chase", "sleep", "is-a"), "cube")


P = atom("cat", "chase", "mouse")
Q = atom("dog", "chase", "cat")


def test_conjunction_is_composition():
    c = fresh()
    both = ccp_apply(And(P, Q), c)
    stepwise = ccp_apply(Q, ccp_apply(P, c))
    assert both.same_content(stepwise, BINARIZED)


def test_negation_zeroes_cells():
    c = ccp_apply(P, fresh())
    negated = ccp_apply(Not(P), c)
    assert negated.bcell("cat", "chase", "mouse") == 0.0


def test_atom_idempotent():
    c = fresh()
    once = ccp_apply(P, c)
    twice = ccp_apply(P, once)
    assert once.same_content(twice, BINARIZED)


def test_double_negation_restores_on_admitted():
    c = ccp_apply(P, fresh())
    back = ccp_apply(Not(Not(P)), c)
    assert back.same_content(c, BINARIZED)


def test_or_expansion_is_structural():
    assert Or(P, Q) == Not(And(Not(P), Not(Q)))
    assert Implies(P, Q) == Or(Not(P), Q)


def _small_contexts():
    """All binary contents over the two atom cells, on the shared vocab."""
    base = fresh()
    cells = [("cat", "chase", "mouse"), ("dog", "chase", "cat")]
    for bits in itertools.product((0.0, 1.0), repeat=2):
        arr = base.binary.data.copy()
        for cell, bit in zip(cells, bits):
            idx = tuple(base.vocabulary.index(w) for w in cell)
            arr[idx] = bit
        yield Context("cube", base.numeric, Tensor(base.binary.dims, arr))


def test_or_of_equal_formulas_consistent_under_both_routes():
    # derived_or uses the Or constructor; the manual expansion spells the
    # de Morgan formula out.  For equal disjuncts both reduce to the atom.
    for c in _small_contexts():
        via_helper = derived_or(P, P, c)
        manual = ccp_apply(Not(And(Not(P), Not(P))), c)
        assert via_helper.same_content(manual, BINARIZED)
        assert via_helper.same_content(ccp_apply(P, c), BINARIZED)


def test_or_with_inapplicable_left_behaves_as_right():
    # a quantifier over an empty restrictor touches nothing
    empty = atom("nothing", "chase", "cat", quant="forall", slot="subject")
    for c in _small_contexts():
        with pytest.warns(UserWarning):
            got = derived_or(empty, Q, c)
        assert got.same_content(ccp_apply(Q, c), BINARIZED)
        # the printed identity instead erases the right disjunct's cells
        with pytest.warns(UserWarning):
            printed = or_via_printed_identity(empty, Q, c)
        assert printed.same_content(ccp_apply(Not(Q), c), BINARIZED)


def test_tautology_keeps_admitted_contexts():
    for c in _small_contexts():
        admitted = ccp_apply(P, c)  # make P hold by construction
        via_expansion = derived_implies(P, P, admitted)
        via_printed = implies_via_printed_identity(P, P, admitted)
        assert via_expansion.same_content(admitted, BINARIZED)
        assert via_printed.same_content(admitted, BINARIZED)


def test_or_printed_identity_matches_expansion_for_equal_atoms():
    for c in _small_contexts():
        printed = or_via_printed_identity(P, P, c)
        # the printed identity erases the cells the second run touched
        expect = ccp_apply(Not(P), c)
        assert printed.same_content(expect, BINARIZED)


# ---------------------------------------------------------------------------
# Corpus contexts and the admittance suite


def test_build_context_empty():
    empty = Corpus([], CorpusConfig())
    c = build_context(empty, "cube", BINARIZED)
    assert c.numeric.data.size == 0


ADMITTED = [
    "Cats are animals",
    "Dogs are animals",
    "Cats chase cats",
    "Cats chase mice",
    "Dogs chase cats and dogs",
]

REJECTED = [
    "Dogs do not chase cats",
    "Dogs do not chase dogs",
    "Cats are not animals",
    "Dogs do not sleep",
    "Cats like dogs",
    "Cats eat dogs",
    "Dogs run from cats",
    "Dogs like mice",
    "Mice fear dogs",
    "Dogs eat mice",
    "Dogs chase mice",
]


def test_admittance_suite(catsdogs, cats_ctx):
    for text in ADMITTED:
        s = parse_demo_sentence(text, catsdogs.config)
        assert admits(cats_ctx, s), f"should admit: {text}"
    for text in REJECTED:
        s = parse_demo_sentence(text, catsdogs.config)
        assert not admits(cats_ctx, s), f"should reject: {text}"


def test_self_admittance(catsdogs, cats_ctx):
    for s in catsdogs:
        assert admits(cats_ctx, s), s.surface


def test_order_sensitivity_and_fixpoint(catsdogs):
    shuffled = Corpus(
        [catsdogs.sentences[2]] + catsdogs.sentences[:2] + catsdogs.sentences[3:],
        catsdogs.config,
    )
    with pytest.warns(UserWarning):
        single = build_context(shuffled, "cube", BINARIZED, fixpoint=False)
    # quantified sentence ran before the is-a facts: no expansion happened
    assert single.bcell("dog", "chase", "cat") == 0.0
    with pytest.warns(UserWarning):
        fixed = build_context(shuffled, "cube", BINARIZED, fixpoint=True)
    assert fixed.bcell("dog", "chase", "cat") == 1.0


def test_monotonicity(catsdogs, cats_ctx):
    s = parse_demo_sentence("Cats chase mice", catsdogs.config)
    grown = ccp_apply(atom("cat", "fear", "dog"), cats_ctx)
    assert admits(grown, s)


def test_negation_coherence(cats_ctx, catsdogs):
    s = parse_demo_sentence("Cats chase mice", catsdogs.config)
    knocked = ccp_apply(Not(Atom(s)), cats_ctx)
    assert not admits(knocked, s)


# ---------------------------------------------------------------------------
# Degreed admittance


def dotsim(u, v):
    return float(np.dot(u, v))


def test_similarities_from_rows(cats_rows):
    row = cats_rows.numeric.row
    assert abs(dotsim(row("cat"), row("mouse")) - 1 / 8) < 1e-12
    assert abs(dotsim(row("dog"), row("mouse")) - 1 / 24) < 1e-12
    # direct computation gives 1/8 for the cat/dog pair
    assert abs(dotsim(row("cat"), row("dog")) - 1 / 8) < 1e-12


def test_row_dot_through_tensor_op(cats_rows):
    import ccpsem.tensor as T

    cols = cats_rows.numeric.dims[1]
    cat = T.Tensor((cols,), cats_rows.numeric.row("cat"))
    mouse = T.Tensor((cols,), cats_rows.numeric.row("mouse"))
    assert abs(T.dot(cat, mouse) - 1 / 8) < 1e-12


def test_degreed_plain_admittance_is_degree_one(catsdogs, cats_ctx, cats_rows):
    s = parse_demo_sentence("Cats chase mice", catsdogs.config)
    ok, degree, witness = degreed_admits(cats_ctx, cats_rows, s, simfn="dot")
    assert ok and degree == 1.0 and witness == []


def test_degreed_dogs_chase_mice(catsdogs, cats_ctx, cats_rows):
    s = parse_demo_sentence("Dogs chase mice", catsdogs.config)
    ok, degree, witness = degreed_admits(cats_ctx, cats_rows, s, simfn="dot")
    assert ok
    assert abs(degree - 1 / 8) < 1e-12
    assert len(witness) == 1
    repl, orig, sim = witness[0]
    assert (repl, orig) in {("cat", "dog"), ("cat", "mouse")}
    assert abs(sim - 1 / 8) < 1e-12


def test_degreed_mice_are_animals(catsdogs, cats_ctx, cats_rows):
    s = parse_demo_sentence("Mice are animals", catsdogs.config)
    ok, degree, witness = degreed_admits(cats_ctx, cats_rows, s, simfn="dot")
    assert ok
    assert abs(degree - 1 / 8) < 1e-12
    assert witness == [("cat", "mouse", degree)]


def test_degreed_lower_degree_block(catsdogs, cats_ctx, cats_rows):
    s = parse_demo_sentence("Cats like dogs", catsdogs.config)
    ok, degree, witness = degreed_admits(cats_ctx, cats_rows, s, simfn="dot")
    assert ok
    assert abs(degree - 1 / 24) < 1e-12
    assert witness == [("mouse", "dog", degree)]


def test_degreed_no_witness(cats_ctx, cats_rows):
    s = sent(Triple("mouse", "like", "mouse"))
    ok, degree, witness = degreed_admits(cats_ctx, cats_rows, s, simfn="dot")
    assert (ok, degree, witness) == (False, 0.0, [])


def test_degreed_two_substitutions():
    words = ("a", "b", "x", "y", "r")
    c = zero_context(words, "cube")
    c = ccp_apply(atom("a", "r", "x"), c)
    rows = Tensor(
        (Vocabulary(words), Vocabulary(("f1", "f2"))),
        np.array([[1.0, 0.0], [0.5, 0.5], [0.0, 1.0], [0.0, 0.5], [0.0, 0.0]]),
    )
    cnum = Context("matrix", rows)
    query = sent(Triple("b", "r", "y"))
    ok, degree, witness = degreed_admits(c, cnum, query, simfn="dot")
    assert ok
    # b->a with sim 0.5 and y->x with sim 0.5, multiplied
    assert abs(degree - 0.25) < 1e-12
    assert {(w[0], w[1]) for w in witness} == {("a", "b"), ("x", "y")}


def test_degree_in_unit_interval_with_cosine(catsdogs, cats_ctx, cats_rows):
    for text in ["Dogs chase mice", "Cats like dogs", "Dogs like mice"]:
        s = parse_demo_sentence(text, catsdogs.config)
        ok, degree, _ = degreed_admits(cats_ctx, cats_rows, s, simfn="cosine")
        assert ok
        assert 0.0 <= degree <= 1.0 + 1e-12


# ---------------------------------------------------------------------------
# Relation tables


def test_to_relation_worked_example():
    vocab = ("w1", "w2")
    c = from_relation({(1, 1), (2, 1), (2, 2)}, vocab, "matrix")
    assert np.array_equal(c.binary.data, np.array([[1.0, 0.0], [1.0, 1.0]]))
    assert to_relation(c) == {(1, 1), (2, 1), (2, 2)}


def test_to_relation_zero_and_roundtrip():
    c = zero_context(("a", "b"), "matrix")
    assert to_relation(c) == set()
    rel = {(1, 2), (2, 1)}
    assert to_relation(from_relation(rel, ("a", "b"), "matrix")) == rel


def test_to_relation_rejects_non_binary():
    c = zero_context(("a", "b"), "matrix")
    c = ccp_apply(atom("a", "b"), c, mode=COUNTING)
    c2 = ccp_apply(atom("a", "b"), c, mode=COUNTING)
    from dataclasses import replace

    no_binary = replace(c2, binary=None)
    with pytest.raises(NotBinary):
        to_relation(no_binary)


# ---------------------------------------------------------------------------
# Formula text


def test_parse_formula(catsdogs):
    f = parse_formula("(and s1 (not s2))", catsdogs)
    assert isinstance(f, And)
    assert isinstance(f.right, Not)
    g = parse_formula("(implies {dogs chase cats} {dogs chase dogs})", catsdogs)
    assert isinstance(g, Not)  # implication expands structurally


def test_tenors_inference():
    corpus = load_corpus(data_path("tenors.corpus"))
    query = load_corpus(data_path("tenors_query.corpus"),
                        config=corpus.config).sentences[0]
    ctx = build_context(corpus, "cube", BINARIZED, fixpoint=True)
    assert admits(ctx, query)
