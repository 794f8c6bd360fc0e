"""Annotated corpora, vocabularies, and context construction.

Corpus files are line oriented.  Config directives (allowed inline or in a
separate config file) come first, then sentences::

    lemma <surface> <lemma>
    stopword <word>
    nominal <verb> <noun>        # intransitive-verb nominalization
    sentence: <surface text>
      term: <abstract term text>
      triple: <subj> <rel> <obj> [quant=<kind>[:<k>]] [slot=subj|obj] [neg]
      triple: <subj> <verb>      # intransitive clause

Co-occurrence matrices count, per sentence window, each unordered pair of
distinct content-word types once (symmetrically); a k-word window counts
token pairs within distance k instead.  Entity-relation cubes fold the
triples through the update primitives in corpus order, so quantified
triples expand over the is-a facts accumulated so far.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import dynamic as dyn
from . import tensor as T


class CorpusError(Exception):
    pass


class ParseError(CorpusError):
    def __init__(self, message, path="", lineno=None):
        where = f"{path}:{lineno}: " if lineno else ""
        super().__init__(f"{where}{message}")


@dataclass
class CorpusConfig:
    lemmas: dict[str, str] = field(default_factory=dict)
    stopwords: set[str] = field(default_factory=set)
    nominals: dict[str, str] = field(default_factory=dict)

    def lemma(self, token: str) -> str:
        token = token.lower()
        return self.lemmas.get(token, token)

    def content_words(self, text: str) -> list[str]:
        return [
            self.lemma(tok)
            for tok in _tokenize(text)
            if self.lemma(tok) not in self.stopwords
        ]

    def merge(self, other: "CorpusConfig") -> "CorpusConfig":
        return CorpusConfig(
            {**self.lemmas, **other.lemmas},
            self.stopwords | other.stopwords,
            {**self.nominals, **other.nominals},
        )


def _tokenize(text: str) -> list[str]:
    return re.findall(r"[A-Za-z][A-Za-z'-]*|\d+", text.lower())


@dataclass(frozen=True)
class Triple:
    subj: str
    rel: str
    obj: str | None = None  # None: intransitive clause
    quant: str | None = None
    k: int | None = None
    slot: str = "subject"
    neg: bool = False

    def words(self):
        out = [self.subj, self.rel]
        if self.obj is not None:
            out.append(self.obj)
        return out


@dataclass
class AnnotatedSentence:
    """Surface text plus clause annotations.

    Co-occurrence building only needs the surface; running a sentence as a
    context update needs triples or a term annotation.
    """

    surface: str
    triples: tuple[Triple, ...] = ()
    term_text: str | None = None


@dataclass
class Corpus:
    sentences: list[AnnotatedSentence]
    config: CorpusConfig = field(default_factory=CorpusConfig)
    source: str = ""

    def __iter__(self):
        return iter(self.sentences)

    def __len__(self):
        return len(self.sentences)


# ---------------------------------------------------------------------------
# Loading


def load_config(path) -> CorpusConfig:
    cfg = CorpusConfig()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if line and not _config_line(cfg, line):
                raise ParseError(f"unknown config directive {line!r}", path, lineno)
    return cfg


def _config_line(cfg: CorpusConfig, line: str) -> bool:
    head, _, rest = line.partition(" ")
    parts = rest.split()
    if head == "lemma" and len(parts) == 2:
        cfg.lemmas[parts[0].lower()] = parts[1].lower()
    elif head == "stopword" and len(parts) == 1:
        cfg.stopwords.add(parts[0].lower())
    elif head == "nominal" and len(parts) == 2:
        cfg.nominals[parts[0].lower()] = parts[1].lower()
    else:
        return False
    return True


def load_corpus(path, config: CorpusConfig | None = None) -> Corpus:
    cfg = CorpusConfig() if config is None else config.merge(CorpusConfig())
    sentences: list[AnnotatedSentence] = []
    surface = None
    triples: list[Triple] = []
    term_text = None

    def flush(lineno):
        nonlocal surface, triples, term_text
        if surface is None:
            return
        sentences.append(AnnotatedSentence(surface, tuple(triples), term_text))
        surface, triples, term_text = None, [], None

    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if line.startswith("sentence:"):
                flush(lineno)
                surface = line[len("sentence:"):].strip()
            elif line.startswith("triple:"):
                if surface is None:
                    raise ParseError("triple outside a sentence", path, lineno)
                triples.append(_parse_triple(line[len("triple:"):], path, lineno))
            elif line.startswith("term:"):
                if surface is None:
                    raise ParseError("term outside a sentence", path, lineno)
                term_text = line[len("term:"):].strip()
            elif _config_line(cfg, line):
                pass
            else:
                raise ParseError(f"unrecognized line {line!r}", path, lineno)
    flush(None)
    return Corpus(sentences, cfg, source=str(path))


def _parse_triple(text: str, path="", lineno=None) -> Triple:
    parts = text.split()
    words, quant, k, slot, neg = [], None, None, "subject", False
    for part in parts:
        if part.startswith("quant="):
            quant = part[len("quant="):]
            if ":" in quant:
                quant, kk = quant.split(":", 1)
                k = int(kk)
            if quant not in dyn.QUANTIFIER_KINDS:
                raise ParseError(f"unknown quantifier {quant!r}", path, lineno)
        elif part.startswith("slot="):
            slot = {"subj": "subject", "obj": "object"}.get(part[len("slot="):])
            if slot is None:
                raise ParseError(f"bad slot in {text!r}", path, lineno)
        elif part == "neg":
            neg = True
        else:
            words.append(part.lower())
    if len(words) == 2:
        return Triple(words[0], words[1], None, quant, k, slot, neg)
    if len(words) == 3:
        return Triple(words[0], words[1], words[2], quant, k, slot, neg)
    raise ParseError(f"triple needs 2 or 3 words: {text!r}", path, lineno)


# ---------------------------------------------------------------------------
# Triple application (cube and matrix backends)


def apply_triple(t: Triple, ctx: dyn.Context, mode: dyn.UpdateMode,
                 sign: int = 1) -> dyn.Context:
    """Run one annotated clause as an update.

    Unquantified triples go through the transitive primitive (on cubes
    that is exactly the (subj, rel, obj) cell); intransitive clauses go
    through the intransitive primitive; quantified triples expand over the
    current is-a restrictor of the quantified argument.
    """
    if t.neg:
        sign = -sign
    if t.quant is not None:
        if t.obj is None:
            raise CorpusError("quantified clause needs three words")
        noun = t.subj if t.slot == "subject" else t.obj
        other = t.obj if t.slot == "subject" else t.subj
        return dyn.update_quantifier(
            t.quant, noun, t.rel, other, ctx, mode, k=t.k, sign=sign, slot=t.slot
        )
    if t.obj is None:
        return dyn.update_G(t.rel, t.subj, ctx, mode, sign)
    return dyn.update_I(t.rel, t.obj, t.subj, ctx, mode, sign)


def triple_vocabulary(corpus: Corpus) -> list[str]:
    """First-appearance word list for cube contexts, including the
    structural words the updates will introduce."""
    words: list[str] = []

    def add(w):
        if w not in seen:
            seen.add(w)
            words.append(w)

    seen: set[str] = set()
    for sent in corpus:
        for t in sent.triples:
            add(t.subj)
            add(t.rel)
            if t.obj is None:
                add(dyn.ISA)
                add(dyn._nominalize(t.rel, corpus.config.nominals))
            else:
                add(t.obj)
    return words


def build_entity_cube(corpus: Corpus) -> dyn.Context:
    """Counting cube folded from the corpus triples, in order."""
    ctx = dyn.zero_context(triple_vocabulary(corpus), "cube",
                           nominals=corpus.config.nominals)
    for sent in corpus:
        for t in sent.triples:
            ctx = apply_triple(t, ctx, dyn.COUNTING)
    return ctx


# ---------------------------------------------------------------------------
# Co-occurrence matrices


def corpus_vocabulary(corpus: Corpus) -> list[str]:
    words: list[str] = []
    seen: set[str] = set()
    for sent in corpus:
        for w in corpus.config.content_words(sent.surface):
            if w not in seen:
                seen.add(w)
                words.append(w)
    return words


def build_cooccurrence(corpus: Corpus, window="sentence") -> dyn.Context:
    """Symmetric co-occurrence counts over the content-word vocabulary.

    `window="sentence"`: each unordered pair of distinct word types
    occurring in a sentence counts once.  `window=k` (int): token pairs at
    distance <= k count once per position pair.  Same-word cells stay at
    the epsilon default and are never counted.
    """
    vocab = T.Vocabulary(tuple(corpus_vocabulary(corpus)))
    n = len(vocab)
    arr = np.zeros((n, n))
    for sent in corpus:
        tokens = corpus.config.content_words(sent.surface)
        if window == "sentence":
            types = sorted({vocab.index(w) for w in tokens})
            for a in range(len(types)):
                for b in range(a + 1, len(types)):
                    i, j = types[a], types[b]
                    arr[i, j] += 1
                    arr[j, i] += 1
        else:
            kk = int(window)
            for p, w in enumerate(tokens):
                for q in range(p + 1, min(p + kk + 1, len(tokens))):
                    i, j = vocab.index(w), vocab.index(tokens[q])
                    if i == j:
                        continue
                    arr[i, j] += 1
                    arr[j, i] += 1
    return dyn.Context("matrix", T.Tensor((vocab, vocab), arr),
                       nominals=corpus.config.nominals)


# ---------------------------------------------------------------------------
# Weighting schemes


SCHEMES = ("raw", "l1", "l2", "ppmi")


def normalize_rows(t: T.Tensor, scheme: str) -> T.Tensor:
    if scheme == "raw":
        return t
    data = t.data.astype(float).copy()
    if scheme in ("l1", "l2"):
        flat = data.reshape(data.shape[0], -1)
        if scheme == "l1":
            norms = np.abs(flat).sum(axis=1)
        else:
            norms = np.sqrt((flat * flat).sum(axis=1))
        norms[norms == 0.0] = 1.0
        flat /= norms[:, None]
        return T.Tensor(t.dims, flat.reshape(data.shape))
    if scheme == "ppmi":
        if t.rank != 2:
            raise CorpusError("ppmi weighting needs a matrix")
        total = data.sum()
        if total == 0.0:
            return T.Tensor(t.dims, data)
        p = data / total
        pr = p.sum(axis=1, keepdims=True)
        pc = p.sum(axis=0, keepdims=True)
        with np.errstate(divide="ignore", invalid="ignore"):
            pmi = np.log(p / (pr * pc))
        pmi[~np.isfinite(pmi)] = 0.0
        return T.Tensor(t.dims, np.maximum(pmi, 0.0))
    raise CorpusError(f"unknown scheme {scheme!r}")


def normalize_context(c: dyn.Context, scheme: str) -> dyn.Context:
    return replace(c, numeric=normalize_rows(c.numeric, scheme))


def restrict_matrix(c: dyn.Context, rows, cols) -> T.Tensor:
    """Row/column submatrix as a two-vocabulary tensor."""
    if c.rank != 2:
        raise CorpusError("restriction needs a matrix context")
    ri = [c.vocabulary.index(w) for w in rows]
    ci = [c.vocabulary.index(w) for w in cols]
    sub = c.numeric.data[np.ix_(ri, ci)]
    return T.Tensor((T.Vocabulary(tuple(rows)), T.Vocabulary(tuple(cols))), sub)


# ---------------------------------------------------------------------------
# Demo-fragment sentence reader (pattern-based, desk scale only)

_COPULA = {"is", "are", "be"}
_AUX = {"do", "does"}
_QUANT_WORDS = {"all": "forall", "every": "forall", "some": "some", "most": "most"}


def parse_demo_sentence(text: str, config: CorpusConfig) -> AnnotatedSentence:
    """Read one sentence of the demo fragment into clause triples.

    This is a closed set of token patterns (copula, transitive, negation,
    object/subject conjunction, `all`-quantification, verb+from), not a
    parser for English; anything outside the fragment raises.
    """
    raw = _tokenize(text)
    toks = [config.lemma(t) for t in raw]
    if not toks:
        raise CorpusError("empty sentence")
    neg = False
    out = [t for t in toks]

    # strip auxiliaries and negation
    cleaned = []
    i = 0
    while i < len(out):
        if out[i] in _AUX and i + 1 < len(out) and out[i + 1] == "not":
            neg = True
            i += 2
        elif out[i] == "not":
            neg = True
            i += 1
        else:
            cleaned.append(out[i])
            i += 1
    toks = cleaned

    quant = None
    k = None
    slot = "subject"
    # leading quantifier: "all cats ..." ; "at least 3 cats ..."
    if toks[:2] == ["at", "least"] or toks[:2] == ["at", "most"]:
        quant = "at_least" if toks[1] == "least" else "at_most"
        k = int(toks[2])
        toks = toks[3:]
    elif toks and toks[0] in _QUANT_WORDS:
        quant = _QUANT_WORDS[toks[0]]
        toks = toks[1:]

    def conj_split(words):
        if "and" in words:
            at = words.index("and")
            return [words[:at], words[at + 1:]]
        return [words]

    triples: list[Triple] = []

    def emit(subj, rel, obj, q=None, qk=None, qslot="subject"):
        # noun phrases of the fragment are at most two words
        for s in conj_split(subj):
            for o in conj_split(obj) if obj is not None else [None]:
                if len(s) > 2 or (o is not None and len(o) > 2):
                    raise CorpusError(
                        f"sentence {text!r} is outside the demo fragment"
                    )
                triples.append(
                    Triple("-".join(s), rel, "-".join(o) if o else None,
                           q, qk, qslot, neg)
                )

    # object-side quantifier: "... chase all animals"
    for qw, qkind in _QUANT_WORDS.items():
        if qw in toks[1:]:
            at = toks.index(qw, 1)
            subj, verb, obj = toks[:at - 1], toks[at - 1], toks[at + 1:]
            if subj and obj:
                emit(subj, verb, obj, qkind, None, "object")
                return AnnotatedSentence(text, tuple(triples))

    if any(c in toks for c in _COPULA):
        at = next(i for i, t in enumerate(toks) if t in _COPULA)
        subj, obj = toks[:at], toks[at + 1:]
        if not subj or not obj:
            raise CorpusError(f"cannot read copula sentence {text!r}")
        emit(subj, dyn.ISA, obj, quant, k, slot)
        return AnnotatedSentence(text, tuple(triples))

    # transitive with optional "from" attached to the verb
    if len(toks) >= 3:
        # verb is the token after the (possibly conjoined) subject
        subj_end = 1
        if toks[1] == "and" and len(toks) >= 4:
            subj_end = 3
        subj, verb, rest = toks[:subj_end], toks[subj_end], toks[subj_end + 1:]
        if rest and rest[0] == "from":
            verb = f"{verb}-from"
            rest = rest[1:]
        if rest:
            emit(subj, verb, rest, quant, k, slot)
            return AnnotatedSentence(text, tuple(triples))
    if len(toks) == 2:
        emit([toks[0]], toks[1], None, quant, k, slot)
        return AnnotatedSentence(text, tuple(triples))
    raise CorpusError(f"sentence {text!r} is outside the demo fragment")
