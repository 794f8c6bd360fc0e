"""Propositional logic over sentence atoms, with update semantics.

Formulas are atoms (annotated sentences or abstract terms), negation, and
conjunction; disjunction and implication are defined by de Morgan
expansion and the expansion is structural.  Semantically a formula runs
as an update program: conjunction is sequential composition, negation
flips the polarity of its scope's updates (so atoms under one negation
erase exactly the cells they would have set, and double negation
restores).  Admittance asks whether a sentence's update leaves a
binarized context cell-for-cell unchanged; degreed admittance extends
this with role-preserving word substitutions weighted by distributional
similarity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

import numpy as np

from . import dynamic as dyn
from . import tensor as T
from .corpus import AnnotatedSentence, Corpus, Triple, apply_triple, triple_vocabulary
from .hom import Lexicon
from .terms import Const, Term, parse_term


class LogicError(Exception):
    pass


class NotBinary(LogicError):
    pass


# ---------------------------------------------------------------------------
# Formulas


@dataclass(frozen=True)
class Atom:
    sentence: object  # AnnotatedSentence | Term | str (term text)


@dataclass(frozen=True)
class Not:
    inner: "CcpFormula"


@dataclass(frozen=True)
class And:
    left: "CcpFormula"
    right: "CcpFormula"


CcpFormula = Atom | Not | And


def Or(left: CcpFormula, right: CcpFormula) -> CcpFormula:
    """not (not left and not right) — expansion is structural."""
    return Not(And(Not(left), Not(right)))


def Implies(left: CcpFormula, right: CcpFormula) -> CcpFormula:
    return Or(Not(left), right)


# ---------------------------------------------------------------------------
# Sentence and formula application


def apply_sentence(sentence, c: dyn.Context, mode: dyn.UpdateMode,
                   sign: int = 1, lex: Lexicon | None = None) -> dyn.Context:
    """Run one sentence's update: clause triples or a translated term."""
    if isinstance(sentence, AnnotatedSentence):
        if sentence.triples:
            for t in sentence.triples:
                c = apply_triple(t, c, mode, sign)
            return c
        if sentence.term_text is None:
            raise LogicError(
                f"sentence {sentence.surface!r} has no triples or term annotation"
            )
        sentence = sentence.term_text
    if isinstance(sentence, str):
        if lex is None:
            raise LogicError("term-annotated sentence needs a lexicon")
        sentence = parse_term(sentence, lex.source)
    if isinstance(sentence, Term):
        if lex is None:
            raise LogicError("abstract-term sentence needs a lexicon")
        return dyn.apply_ccp(sentence, lex, c, mode, sign)
    raise LogicError(f"cannot apply sentence {sentence!r}")


def ccp_apply(phi: CcpFormula, c: dyn.Context, lex: Lexicon | None = None,
              mode: dyn.UpdateMode = dyn.BINARIZED, sign: int = 1) -> dyn.Context:
    """Run a formula as an update program on `c`.

    Atoms run their sentence's updates with the current polarity; negation
    flips polarity; conjunction sequences left before right.
    """
    match phi:
        case Atom(sentence):
            return apply_sentence(sentence, c, mode, sign, lex)
        case Not(inner):
            return ccp_apply(inner, c, lex, mode, -sign)
        case And(left, right):
            mid = ccp_apply(left, c, lex, mode, sign)
            return ccp_apply(right, mid, lex, mode, sign)
    raise LogicError(f"not a formula: {phi!r}")


def derived_or(phi, psi, c, lex=None, mode=dyn.BINARIZED) -> dyn.Context:
    return ccp_apply(Or(phi, psi), c, lex, mode)


def derived_implies(phi, psi, c, lex=None, mode=dyn.BINARIZED) -> dyn.Context:
    return ccp_apply(Implies(phi, psi), c, lex, mode)


def _positive_cells(ctx: dyn.Context, baseline: int):
    return [cell for e in ctx.log[baseline:] if e.delta.startswith("+")
            for cell in e.cells]


def _erase_cells(ctx: dyn.Context, cells, mode) -> dyn.Context:
    out = ctx
    for cell in cells:
        out = dyn._bump(out, "NEG", [cell], mode, -1)
    return out


def or_via_printed_identity(phi, psi, c, lex=None, mode=dyn.BINARIZED):
    """Disjunction via the subtraction identity `psi(c) - psi(phi(c))`.

    Context subtraction erases the cells the subtrahend's producing run
    set positively.  Under monotone binarized updates this diverges from
    the de Morgan expansion in general; the two agree e.g. when the
    disjuncts coincide or when the left disjunct never applies.
    """
    a = ccp_apply(psi, c, lex, mode)
    mid = ccp_apply(phi, c, lex, mode)
    b = ccp_apply(psi, mid, lex, mode)
    return _erase_cells(a, _positive_cells(b, len(mid.log)), mode)


def implies_via_printed_identity(phi, psi, c, lex=None, mode=dyn.BINARIZED):
    """Implication via `c - (phi(c) - psi(phi(c)))` with the same
    subtraction reading; the subtracted difference contributes no positive
    cells, so the identity keeps `c` itself."""
    x = ccp_apply(phi, c, lex, mode)
    y = ccp_apply(psi, x, lex, mode)
    d = _erase_cells(x, _positive_cells(y, len(x.log)), mode)
    return _erase_cells(c, _positive_cells(d, len(d.log)), mode)


# ---------------------------------------------------------------------------
# Corpus contexts and admittance


def _term_words(image: Term) -> list[str]:
    """Object word constants of a translated sentence (executor arguments)."""
    words = []

    def go(t):
        from .terms import App, Lam

        match t:
            case Const(name, _):
                if name not in ("F", "G", "I", "J", "neg"):
                    words.append(name)
            case App(fn, arg):
                go(fn)
                go(arg)
            case Lam(_, body):
                go(body)

    go(image)
    return words


def scan_vocabulary(corpus: Corpus, lex: Lexicon | None = None) -> list[str]:
    words = triple_vocabulary(corpus)
    seen = set(words)
    for sent in corpus:
        if sent.triples or sent.term_text is None:
            continue
        if lex is None:
            raise LogicError("term-annotated corpus needs a lexicon")
        from .hom import apply_term_hom
        from .terms import beta_eta_normalize

        image = beta_eta_normalize(
            apply_term_hom(lex, parse_term(sent.term_text, lex.source))
        )
        for w in _term_words(image):
            if w not in seen:
                seen.add(w)
                words.append(w)
    return words


def build_context(corpus: Corpus, backend: str = "cube",
                  mode: dyn.UpdateMode = dyn.BINARIZED,
                  lex: Lexicon | None = None, fixpoint: bool = False,
                  epsilon: float = 0.0) -> dyn.Context:
    """Fold the corpus over the all-zeros context, in order.

    With `fixpoint` (binarized mode only) the corpus is re-applied until
    the context stabilizes, bounded by |corpus| * |vocabulary| passes, so
    quantified sentences see is-a facts regardless of sentence order.
    """
    c = dyn.zero_context(scan_vocabulary(corpus, lex), backend,
                         epsilon=epsilon, nominals=corpus.config.nominals)
    for sent in corpus:
        c = apply_sentence(sent, c, mode, 1, lex)
    if fixpoint:
        if not mode.binarized:
            raise LogicError("fixpoint context building needs binarized mode")
        bound = max(1, len(corpus) * max(1, len(c.vocabulary)))
        for _ in range(bound):
            again = c
            for sent in corpus:
                again = apply_sentence(sent, again, mode, 1, lex)
            if again.same_content(c, mode):
                break
            c = again
    return c


def admits(c: dyn.Context, sentence, lex: Lexicon | None = None,
           mode: dyn.UpdateMode = dyn.BINARIZED) -> bool:
    """True iff the sentence's update leaves `c` unchanged, cell-exactly."""
    updated = apply_sentence(sentence, c, mode, 1, lex)
    return updated.same_content(c, mode)


# ---------------------------------------------------------------------------
# Degreed admittance


def _sim_rows(cnum: dyn.Context):
    rows = cnum.numeric
    vocab = rows.dims[0]

    def row(w):
        return rows.data[vocab.index(w)].ravel()

    return vocab, row


def make_simfn(kind: str = "cosine"):
    if callable(kind):
        return kind
    if kind == "dot":
        return lambda u, v: float(np.dot(u, v))
    if kind == "cosine":
        def cos(u, v):
            nu, nv = np.linalg.norm(u), np.linalg.norm(v)
            if nu == 0.0 or nv == 0.0:
                return 0.0
            return float(np.dot(u, v) / (nu * nv))

        return cos
    raise LogicError(f"unknown similarity {kind!r}")


def _sentence_words(sentence) -> list[str]:
    if isinstance(sentence, AnnotatedSentence) and sentence.triples:
        out = []
        for t in sentence.triples:
            for w in t.words():
                if w not in out:
                    out.append(w)
        return out
    raise LogicError("degreed admittance needs a triple-annotated sentence")


def _substitute_sentence(sentence: AnnotatedSentence, mapping) -> AnnotatedSentence:
    def sub_word(w):
        return mapping.get(w, w)

    new_triples = tuple(
        replace(t, subj=sub_word(t.subj), rel=sub_word(t.rel),
                obj=sub_word(t.obj) if t.obj is not None else None)
        for t in sentence.triples
    )
    return AnnotatedSentence(sentence.surface, new_triples, sentence.term_text)


def degreed_admits(cbin: dyn.Context, cnum: dyn.Context, sentence,
                   lex: Lexicon | None = None, simfn="cosine",
                   mode: dyn.UpdateMode = dyn.BINARIZED,
                   max_subst: int = 2):
    """Admittance up to similarity-weighted word substitution.

    Plainly admitted sentences return (True, 1.0, []).  Otherwise we look
    for up to `max_subst` simultaneous substitutions (each word replaced
    consistently, preserving its grammatical role) whose result the binary
    context admits; the degree is the product of the per-substitution
    similarities read off the numeric context, and the witness lists
    (replacement, original, similarity) for the best-degree hit.
    """
    sim = make_simfn(simfn)
    if admits(cbin, sentence, lex, mode):
        return True, 1.0, []
    vocab, row = _sim_rows(cnum)
    words = [w for w in _sentence_words(sentence) if w in vocab]
    candidates = [w for w in vocab if w in cbin.vocabulary]
    best = None

    for n_subst in range(1, max_subst + 1):
        for targets in itertools.combinations(words, n_subst):
            pools = []
            for w in targets:
                pools.append([(w, r, sim(row(r), row(w)))
                              for r in candidates if r != w])
            for combo in itertools.product(*pools):
                mapping = {w: r for (w, r, _) in combo}
                degree = 1.0
                for (_, _, s) in combo:
                    degree *= s
                key = tuple((r, w) for (w, r, _) in combo)
                if best is not None and (degree < best[0] or
                                         (degree == best[0] and key >= best[1])):
                    continue
                candidate_sentence = _substitute_sentence(sentence, mapping)
                if admits(cbin, candidate_sentence, lex, mode):
                    witness = [(r, w, s) for (w, r, s) in combo]
                    best = (degree, key, witness)
        if best is not None:
            break
    if best is None:
        return False, 0.0, []
    return True, best[0], best[2]


# ---------------------------------------------------------------------------
# Relation tables


def _binary_array(c: dyn.Context) -> np.ndarray:
    if c.binary is not None:
        return c.binary.data
    vals = np.unique(c.numeric.data)
    if not np.all(np.isin(vals, (0.0, 1.0))):
        raise NotBinary("context has no binarized content")
    return c.numeric.data


def to_relation(c: dyn.Context) -> set[tuple[int, ...]]:
    """One-based index tuples of the nonzero binarized cells."""
    arr = _binary_array(c)
    return {tuple(int(i) + 1 for i in idx) for idx in zip(*np.nonzero(arr))}


def from_relation(rel, words, backend: str = "matrix",
                  nominals=None) -> dyn.Context:
    c = dyn.zero_context(words, backend, nominals=nominals)
    arr = c.binary.data.copy()
    for cell in rel:
        arr[tuple(i - 1 for i in cell)] = 1.0
    return replace(c, binary=T.Tensor(c.binary.dims, arr))


# ---------------------------------------------------------------------------
# Formula text (CLI): (not F), (and F G), (or F G), (implies F G); atoms are
# s<k> (1-based corpus sentence) or {demo fragment sentence}.


def parse_formula(text: str, corpus: Corpus | None = None) -> CcpFormula:
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    pos = 0

    def atom_from(tok: str) -> Atom:
        if corpus is not None and tok.startswith("s") and tok[1:].isdigit():
            idx = int(tok[1:]) - 1
            if not 0 <= idx < len(corpus.sentences):
                raise LogicError(f"no corpus sentence {tok!r}")
            return Atom(corpus.sentences[idx])
        raise LogicError(f"unknown atom {tok!r}")

    def parse() -> CcpFormula:
        nonlocal pos
        if pos >= len(tokens):
            raise LogicError("unexpected end of formula")
        tok = tokens[pos]
        pos += 1
        if tok == "{":
            raise LogicError("unterminated sentence atom")
        if tok != "(":
            if tok.startswith("{"):
                return _braced_atom(tok)
            return atom_from(tok)
        head = tokens[pos]
        pos += 1
        if head == "not":
            inner = parse()
            _expect(")")
            return Not(inner)
        if head in ("and", "or", "implies"):
            left = parse()
            right = parse()
            _expect(")")
            ctor = {"and": And, "or": Or, "implies": Implies}[head]
            return ctor(left, right)
        raise LogicError(f"unknown connective {head!r}")

    def _braced_atom(first: str) -> Atom:
        nonlocal pos
        from .corpus import CorpusConfig, parse_demo_sentence

        parts = [first[1:]]
        while not parts[-1].endswith("}"):
            if pos >= len(tokens):
                raise LogicError("unterminated sentence atom")
            parts.append(tokens[pos])
            pos += 1
        parts[-1] = parts[-1][:-1]
        cfg = corpus.config if corpus is not None else CorpusConfig()
        return Atom(parse_demo_sentence(" ".join(p for p in parts if p), cfg))

    def _expect(symbol):
        nonlocal pos
        if pos >= len(tokens) or tokens[pos] != symbol:
            raise LogicError(f"expected {symbol!r} in formula")
        pos += 1

    out = parse()
    if pos != len(tokens):
        raise LogicError("trailing input after formula")
    return out
