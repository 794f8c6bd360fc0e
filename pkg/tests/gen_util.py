"""Random generators shared by the property suites.

Terms are generated well-typed by construction against a target type,
with bounded depth, so normalization always terminates.
"""

import random

from ccpsem.corpus import AnnotatedSentence, Corpus, CorpusConfig, Triple
from ccpsem.terms import (
    App,
    Arrow,
    Basic,
    Const,
    Lam,
    Signature,
    Var,
    parse_type,
)

D, N, S = Basic("D"), Basic("N"), Basic("S")

# argument types worth abstracting over / applying at
TYPE_POOL = [D, N, S, Arrow(D, S)]


def term_signature() -> Signature:
    sig = Signature()
    for b in "DNS":
        sig.add_basic(b)
    for name, ty in {
        "anna": "D", "bob": "D", "cat": "D",
        "woman": "N", "man": "N",
        "tall": "N N", "old": "N N",
        "smokes": "D S", "sleeps": "D S",
        "loves": "D D S", "chases": "D D S",
        "knows": "S D S",
        "every": "N (D S) S", "some": "N (D S) S",
        "named": "D N",
    }.items():
        sig.add_constant(name, parse_type(ty))
    return sig


def random_term(rng: random.Random, sig: Signature, target, depth: int,
                env=None):
    """A well-typed term of `target` type, or None if nothing fits."""
    env = env or {}
    consts = [n for n, t in sig.constants.items() if t == target]
    vars_ = [n for n, t in env.items() if t == target]
    options = []
    if depth > 0:
        options += ["app"] * 3
    if isinstance(target, Arrow):
        options += ["lam"] * 3
    options += ["var"] * (2 if vars_ else 0) + ["const"] * (1 if consts else 0)
    rng.shuffle(options)
    # leaves last, so structural picks get first refusal but a dead end
    # still falls back to any available leaf
    options += (["var"] if vars_ else []) + (["const"] if consts else [])
    for pick in options:
        if pick == "const":
            return Const(rng.choice(consts), target)
        if pick == "var":
            return Var(rng.choice(vars_), target)
        if pick == "lam":
            name = f"x{len(env)}"
            body = random_term(rng, sig, target.cod, max(0, depth - 1),
                               {**env, name: target.dom})
            if body is not None:
                return Lam(Var(name, target.dom), body)
        if pick == "app" and depth > 0:
            arg_ty = rng.choice(TYPE_POOL)
            fn = random_term(rng, sig, Arrow(arg_ty, target), depth - 1, env)
            arg = random_term(rng, sig, arg_ty, depth - 1, env)
            if fn is not None and arg is not None:
                return App(fn, arg)
    return None


def random_closed_term(rng, sig, target, depth=8, attempts=50):
    for _ in range(attempts):
        t = random_term(rng, sig, target, depth)
        if t is not None:
            return t
    raise RuntimeError("generator failed to produce a term")


WORDS = [f"w{i}" for i in range(12)]
RELS = ["r0", "r1", "is-a"]


def random_triple(rng: random.Random, quantifiers=True) -> Triple:
    roll = rng.random()
    if roll < 0.25:
        return Triple(rng.choice(WORDS), "is-a", rng.choice(WORDS[:6]))
    if roll < 0.4:
        return Triple(rng.choice(WORDS), rng.choice(["r0", "r1"]), None)
    if quantifiers and roll < 0.55:
        kind = rng.choice(["forall", "some", "most"])
        return Triple(
            rng.choice(WORDS[:6]), rng.choice(["r0", "r1"]), rng.choice(WORDS),
            quant=kind, slot=rng.choice(["subject", "object"]),
        )
    return Triple(rng.choice(WORDS), rng.choice(["r0", "r1"]), rng.choice(WORDS))


def random_corpus(rng: random.Random, max_sentences=10) -> Corpus:
    n = rng.randint(1, max_sentences)
    sentences = []
    for i in range(n):
        triples = tuple(random_triple(rng) for _ in range(rng.randint(1, 2)))
        surface = "; ".join("/".join(t.words()) for t in triples)
        sentences.append(AnnotatedSentence(f"s{i}: {surface}", triples))
    return Corpus(sentences, CorpusConfig())
