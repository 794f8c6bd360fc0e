"""Contexts and context-change-potential execution.

A context is a word-indexed co-occurrence matrix or an entity-relation
cube (axes: subject, relation, object), optionally paired with a
binarized copy.  Sentences act on contexts through a small set of
primitive updates:

    F adj noun        matrix: bump (adj, noun)        cube: (noun, is, adj)
    G verb subj       matrix: bump (verb, subj)       cube: (subj, is-a, nominalized verb)
    I verb obj subj   matrix: bump (verb, subj), (subj, obj), (verb, obj)
                      cube: (subj, verb, obj)
    J att subj        matrix: bump (att, subj), output feeds the embedded
                      clause; cube: (subj, att, reified proposition)
    who head verb x   cube: bump (head, verb, x)
    negation          same cells, flipped polarity
    quantifier        expand over the is-a restrictor, then bump

Counting mode adds +1/-1 to the numeric tensor (entries may go negative
under negation); binarized mode sets cells of the binary tensor to 1/0.
Updates are value-to-value: every primitive returns a fresh context and
appends to its update log.  A fixed rng seed makes the randomized
quantifiers byte-reproducible.
"""

from __future__ import annotations

import random
import warnings
import zlib
from dataclasses import dataclass, field, replace
from pathlib import Path
from types import MappingProxyType

import numpy as np

from . import tensor as T
from .hom import Lexicon, apply_term_hom
from .terms import App, Basic, Const, Lam, Term, Var, beta_eta_normalize, render


class UpdateError(Exception):
    pass


class BackendMismatch(UpdateError):
    pass


class EmptyRestrictorWarning(UserWarning):
    """A quantifier found nothing in an is-a relation with its noun."""


UnknownWord = T.UnknownWord

IS = "is"
ISA = "is-a"

QUANTIFIER_KINDS = ("forall", "some", "most", "at_least", "at_most")

_QOP = {
    "forall": "QALL",
    "some": "QSOME",
    "most": "QMOST",
    "at_least": "QATLEAST",
    "at_most": "QATMOST",
}


@dataclass(frozen=True)
class UpdateMode:
    arithmetic: str = "counting"  # counting | binarized
    rng_seed: int = 0

    def __post_init__(self):
        if self.arithmetic not in ("counting", "binarized"):
            raise UpdateError(f"unknown arithmetic {self.arithmetic!r}")

    @property
    def binarized(self):
        return self.arithmetic == "binarized"


COUNTING = UpdateMode("counting")
BINARIZED = UpdateMode("binarized")


@dataclass(frozen=True)
class LogEntry:
    op: str
    cells: tuple[tuple[str, ...], ...]
    delta: str
    note: str = ""

    def __str__(self):
        cells = " ".join("(" + ",".join(c) + ")" for c in self.cells) or "()"
        note = f" {self.note}" if self.note else ""
        return f"{self.op} {cells} {self.delta}{note}"


def _nominalize(verb: str, mapping) -> str:
    if verb in mapping:
        return mapping[verb]
    return verb + ("r" if verb.endswith("e") else "er")


@dataclass(frozen=True)
class Context:
    """Numeric (and optionally binarized) relation table over one vocabulary.

    `epsilon` records the fixture convention for diagonal same-word cells;
    updates do not treat those cells specially.  `nominals` is the
    verb-to-noun map used by intransitive updates on cubes.
    """

    backend: str
    numeric: T.Tensor
    binary: T.Tensor | None = None
    epsilon: float = 0.0
    nominals: object = MappingProxyType({})
    log: tuple[LogEntry, ...] = ()

    def __post_init__(self):
        want = {"matrix": 2, "cube": 3}.get(self.backend)
        if want is None:
            raise UpdateError(f"unknown backend {self.backend!r}")
        if self.numeric.rank != want:
            raise UpdateError(f"{self.backend} context needs a rank-{want} tensor")
        if self.binary is not None:
            if self.binary.dims != self.numeric.dims:
                raise UpdateError("binary companion has different axes")
            vals = np.unique(self.binary.data)
            if not np.all(np.isin(vals, (0.0, 1.0))):
                raise UpdateError("binary companion must contain only 0/1")

    @property
    def vocabulary(self) -> T.Vocabulary:
        return self.numeric.vocab

    @property
    def rank(self) -> int:
        return self.numeric.rank

    def active(self, mode: UpdateMode) -> np.ndarray:
        if mode.binarized:
            if self.binary is None:
                return np.zeros_like(self.numeric.data)
            return self.binary.data
        return self.numeric.data

    def same_content(self, other: "Context", mode: UpdateMode) -> bool:
        return (
            self.backend == other.backend
            and self.vocabulary == other.vocabulary
            and np.array_equal(self.active(mode), other.active(mode))
        )

    def cell(self, *words: str) -> float:
        return self.numeric.entry(*words)

    def bcell(self, *words: str) -> float:
        if self.binary is None:
            return 0.0
        return self.binary.entry(*words)

    def with_words(self, words) -> "Context":
        """Extend the vocabulary, padding all tensors with zeros."""
        vocab = self.vocabulary.extend(words)
        if vocab is self.vocabulary:
            return self
        n_old, n_new = len(self.vocabulary), len(vocab)
        pad = [(0, n_new - n_old)] * self.rank

        def grow(t):
            return T.Tensor((vocab,) * self.rank, np.pad(t.data, pad))

        return replace(
            self,
            numeric=grow(self.numeric),
            binary=grow(self.binary) if self.binary is not None else None,
        )


def zero_context(words, backend: str, epsilon: float = 0.0, nominals=None) -> Context:
    vocab = T.vocabulary(words)
    rank = 2 if backend == "matrix" else 3
    return Context(
        backend,
        T.zeros((vocab,) * rank),
        T.zeros((vocab,) * rank),
        epsilon=epsilon,
        nominals=MappingProxyType(dict(nominals or {})),
    )


def context_from_tensor(numeric: T.Tensor, binary: T.Tensor | None = None,
                        epsilon: float = 0.0, nominals=None) -> Context:
    backend = {2: "matrix", 3: "cube"}.get(numeric.rank)
    if backend is None:
        raise UpdateError("contexts are rank 2 or 3")
    return Context(backend, numeric, binary, epsilon,
                   MappingProxyType(dict(nominals or {})))


def load_context(path) -> Context:
    """Tensor file plus optional `<path>.binary` companion."""
    path = Path(path)
    numeric = T.load_tensor(path)
    companion = Path(str(path) + ".binary")
    binary = T.load_tensor(companion) if companion.exists() else None
    return context_from_tensor(numeric, binary)


def save_context(ctx: Context, path):
    T.save_tensor(ctx.numeric, path)
    if ctx.binary is not None:
        T.save_tensor(ctx.binary, Path(str(path) + ".binary"))


def context_diff(a: Context, b: Context, mode: UpdateMode) -> dict:
    """Cells whose active entry differs, as word tuples -> (old, new).

    A context whose vocabulary extends the other's is padded first, so a
    diff across an interning update still works.
    """
    if a.vocabulary != b.vocabulary:
        a = a.with_words(b.vocabulary.words)
        b = b.with_words(a.vocabulary.words)
        if a.vocabulary != b.vocabulary:
            raise UpdateError("diff needs compatible vocabularies")
    old, new = a.active(mode), b.active(mode)
    out = {}
    for idx in zip(*np.nonzero(old != new)):
        words = tuple(a.vocabulary.words[i] for i in idx)
        out[words] = (float(old[idx]), float(new[idx]))
    return out


# ---------------------------------------------------------------------------
# Primitive updates


def _bump(ctx: Context, op: str, cells, mode: UpdateMode, sign: int, note="") -> Context:
    if any(v != ctx.vocabulary for v in ctx.numeric.dims):
        raise UpdateError("updates need a single vocabulary shared across axes")
    idx_cells = [tuple(ctx.vocabulary.index(w) for w in cell) for cell in cells]
    if mode.binarized:
        arr = ctx.active(mode).copy()
        for idx in idx_cells:
            arr[idx] = 1.0 if sign > 0 else 0.0
        new_binary = T.Tensor(ctx.numeric.dims, arr)
        out = replace(ctx, binary=new_binary)
        delta = "+'" if sign > 0 else "-'"
    else:
        arr = ctx.numeric.data.copy()
        for idx in idx_cells:
            arr[idx] += float(sign)
        out = replace(ctx, numeric=T.Tensor(ctx.numeric.dims, arr))
        delta = "+1" if sign > 0 else "-1"
    entry = LogEntry(op, tuple(tuple(c) for c in cells), delta, note)
    return replace(out, log=ctx.log + (entry,))


def _require_words(ctx: Context, *words: str):
    for w in words:
        ctx.vocabulary.index(w)


def update_F(adj: str, noun: str, c: Context, mode: UpdateMode = COUNTING,
             sign: int = 1) -> Context:
    """Adjective-noun update."""
    _require_words(c, adj, noun)
    if c.backend == "matrix":
        return _bump(c, "F", [(adj, noun)], mode, sign)
    c = c.with_words([IS])
    return _bump(c, "F", [(noun, IS, adj)], mode, sign)


def update_G(verb: str, subj: str, c: Context, mode: UpdateMode = COUNTING,
             sign: int = 1) -> Context:
    """Intransitive-verb update."""
    _require_words(c, verb, subj)
    if c.backend == "matrix":
        return _bump(c, "G", [(verb, subj)], mode, sign)
    noun = _nominalize(verb, c.nominals)
    c = c.with_words([ISA, noun])
    return _bump(c, "G", [(subj, ISA, noun)], mode, sign)


def update_I(verb: str, obj: str, subj: str, c: Context,
             mode: UpdateMode = COUNTING, sign: int = 1) -> Context:
    """Transitive-verb update; the object argument comes first because the
    derivation consumes it first."""
    _require_words(c, verb, obj, subj)
    if c.backend == "matrix":
        return _bump(c, "I", [(verb, subj), (subj, obj), (verb, obj)], mode, sign)
    return _bump(c, "I", [(subj, verb, obj)], mode, sign)


def update_J(att: str, subj: str, c: Context, mode: UpdateMode = COUNTING,
             sign: int = 1, prop: str | None = None) -> Context:
    """Attitude-verb update.  On cubes the embedded clause is reified as an
    interned proposition word (`prop`); on matrices the updated context is
    simply handed on to the embedded clause's own update."""
    _require_words(c, att, subj)
    if c.backend == "matrix":
        return _bump(c, "J", [(att, subj)], mode, sign)
    if prop is None:
        raise UpdateError("cube attitude update needs a reified proposition")
    c = c.with_words([prop])
    return _bump(c, "J", [(subj, att, prop)], mode, sign)


def update_who(head: str, verb: str, other: str, c: Context,
               mode: UpdateMode = COUNTING, sign: int = 1) -> Context:
    """Relative-pronoun update: the head noun takes the clause-internal role."""
    if c.backend != "cube":
        raise BackendMismatch("who-update needs a cube context")
    _require_words(c, head, verb, other)
    return _bump(c, "WHO", [(head, verb, other)], mode, sign)


def update_negation(verb: str, obj: str, subj: str, c: Context,
                    mode: UpdateMode = COUNTING) -> Context:
    """Negated transitive update: same cells as I, flipped polarity."""
    return update_I(verb, obj, subj, c, mode, sign=-1)


def _stable_seed(mode: UpdateMode, *parts) -> int:
    text = "|".join(str(p) for p in parts)
    return zlib.crc32(text.encode("utf-8")) ^ (mode.rng_seed & 0xFFFFFFFF)


def restrictor(c: Context, noun: str, mode: UpdateMode) -> list[str]:
    """Words standing in the is-a relation to `noun`, in vocabulary order."""
    if c.backend != "cube":
        raise BackendMismatch("quantifier updates need a cube context")
    if ISA not in c.vocabulary or noun not in c.vocabulary:
        return []
    arr = c.active(mode)
    j = c.vocabulary.index(ISA)
    k = c.vocabulary.index(noun)
    return [w for i, w in enumerate(c.vocabulary.words) if arr[i, j, k] > 0]


def update_quantifier(kind: str, noun: str, verb: str, obj: str, c: Context,
                      mode: UpdateMode = COUNTING, k: int | None = None,
                      sign: int = 1, slot: str = "subject") -> Context:
    """Quantified update over the is-a restrictor of `noun`.

    `slot` says which argument position the quantified noun occupies:
    "subject" bumps (x, verb, obj) for chosen x, "object" bumps
    (obj, verb, x).  forall takes the whole restrictor; the other kinds
    take a seeded-random subset (nonempty; most: more than half;
    at_least/at_most: bounded by `k`).
    """
    if kind not in QUANTIFIER_KINDS:
        raise UpdateError(f"unknown quantifier kind {kind!r}")
    if slot not in ("subject", "object"):
        raise UpdateError(f"unknown quantifier slot {slot!r}")
    if c.backend != "cube":
        raise BackendMismatch("quantifier updates need a cube context")
    _require_words(c, verb, obj)
    members = restrictor(c, noun, mode)
    op = _QOP[kind]
    if not members:
        warnings.warn(
            f"quantifier {kind!r}: nothing is-a {noun!r}; context unchanged",
            EmptyRestrictorWarning,
            stacklevel=2,
        )
        entry = LogEntry(op, (), "+0", note=f"empty restrictor {noun}")
        return replace(c, log=c.log + (entry,))
    chosen = _choose(kind, members, k, mode, noun, verb, obj)
    if slot == "subject":
        cells = [(x, verb, obj) for x in chosen]
    else:
        cells = [(obj, verb, x) for x in chosen]
    return _bump(c, op, cells, mode, sign, note=f"of {len(members)}")


def _choose(kind, members, k, mode, *key):
    n = len(members)
    if kind == "forall":
        return list(members)
    rng = random.Random(_stable_seed(mode, kind, k, n, *key))
    if kind == "some":
        size = rng.randint(1, n)
    elif kind == "most":
        size = rng.randint(n // 2 + 1, n)
    elif kind == "at_least":
        if k is None:
            raise UpdateError("at_least needs k")
        size = rng.randint(min(k, n), n)
    else:  # at_most
        if k is None:
            raise UpdateError("at_most needs k")
        size = rng.randint(1, max(1, min(k, n)))
    return sorted(rng.sample(members, size), key=members.index)


# ---------------------------------------------------------------------------
# Executing translated terms


def apply_ccp(abstract: Term, lex: Lexicon, c: Context,
              mode: UpdateMode = COUNTING, sign: int = 1) -> Context:
    """Translate a sentence-typed abstract term and run its update."""
    image = beta_eta_normalize(apply_term_hom(lex, abstract))
    return run_update_term(image, c, mode, sign)


def run_update_term(term: Term, ctx: Context, mode: UpdateMode,
                    sign: int = 1, consumer: Term | None = None) -> Context:
    """Execute a normalized context-to-context object term on `ctx`."""
    if isinstance(term, Lam):
        return _eval_context(term.body, {term.var.name: ctx}, mode, sign, consumer)
    head, args = _spine(term)
    if isinstance(head, Const) and head.name == "neg" and len(args) == 1:
        return run_update_term(args[0], ctx, mode, -sign, consumer)
    return _run_primitive(term, ctx, mode, sign, consumer)


def _eval_context(term, env, mode, sign, consumer):
    match term:
        case Var(name, _):
            try:
                return env[name]
            except KeyError:
                raise UpdateError(f"unbound context variable {name!r}") from None
        case App(fn, arg):
            inner = _eval_context(arg, env, mode, sign, consumer=fn)
            return run_update_term(fn, inner, mode, sign, consumer)
    raise UpdateError(f"cannot execute context term {render(term)}")


def _spine(term):
    args = []
    while isinstance(term, App):
        args.append(term.arg)
        term = term.fn
    return term, list(reversed(args))


def _word(term) -> str:
    if isinstance(term, Const):
        return term.name
    raise UpdateError(f"expected a word constant, got {render(term)}")


def _run_primitive(term, ctx, mode, sign, consumer):
    head, args = _spine(term)
    if not isinstance(head, Const):
        raise UpdateError(f"cannot execute update term {render(term)}")
    name = head.name
    if name == "neg" and len(args) == 1:
        return run_update_term(args[0], ctx, mode, -sign, consumer)
    words = [_word(a) for a in args]
    if name == "F" and len(words) == 2:
        return update_F(words[0], words[1], ctx, mode, sign)
    if name == "G" and len(words) == 2:
        return update_G(words[0], words[1], ctx, mode, sign)
    if name == "I" and len(words) == 3:
        return update_I(words[0], words[1], words[2], ctx, mode, sign)
    if name == "J" and len(words) == 2:
        prop = _reify(consumer) if ctx.backend == "cube" else None
        return update_J(words[0], words[1], ctx, mode, sign, prop=prop)
    raise UpdateError(f"unknown update primitive {name!r} with {len(args)} arguments")


def _reify(consumer) -> str:
    """Canonical proposition word for the clause consuming an attitude update."""
    if consumer is None:
        raise UpdateError("attitude update has no embedded clause to reify")
    head, args = _spine(consumer)
    if isinstance(head, Const):
        words = [a.name for a in args if isinstance(a, Const)]
        if head.name == "neg" and len(args) == 1:
            return "not-" + _reify(args[0])
        if head.name == "G" and len(words) >= 2:
            return f"{words[1]}-{words[0]}"
        if head.name == "I" and len(words) >= 3:
            return f"{words[2]}-{words[0]}-{words[1]}"
        if head.name == "F" and len(words) >= 2:
            return f"{words[1]}-{words[0]}"
        if head.name == "J" and len(words) >= 2:
            return f"{words[1]}-{words[0]}"
    return "prop-" + "-".join(
        p for p in render(consumer).replace("(", " ").replace(")", " ").split()
        if p != "lam"
    )


# ---------------------------------------------------------------------------
# Update scripts (primitive-per-line, with repeat counts)


def run_update_script(lines, ctx: Context, mode: UpdateMode = COUNTING) -> Context:
    """Apply scripted primitive updates.

    Each line: ``F <adj> <noun> [count]``, ``G <verb> <subj> [count]``,
    ``I <verb> <obj> <subj> [count]``, ``J <att> <subj> [count]``,
    ``WHO <head> <verb> <other> [count]``, ``NEG <verb> <obj> <subj> [count]``.
    """
    runners = {
        "F": (2, update_F),
        "G": (2, update_G),
        "I": (3, update_I),
        "J": (2, update_J),
        "WHO": (3, update_who),
        "NEG": (3, update_negation),
    }
    for raw in lines:
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        op = parts[0].upper()
        if op not in runners:
            raise UpdateError(f"unknown script op {op!r}")
        arity, fn = runners[op]
        words = parts[1:]
        count = 1
        if len(words) == arity + 1:
            count = int(words[-1])
            words = words[:-1]
        if len(words) != arity:
            raise UpdateError(f"script op {op} needs {arity} words: {line!r}")
        for _ in range(count):
            ctx = fn(*words, ctx, mode)
    return ctx
