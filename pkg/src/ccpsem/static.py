"""Static evaluation: object terms denote tensors.

A StaticModel assigns a tensor to every object constant of a composition
lexicon; evaluation is structural recursion where the toolkit operators
(x1, x2, oplus, odot, star, dotp, rho) run their kernels and lambdas
become Python closures, so partially applied operators inside normal
forms cost nothing.

Model files are line oriented: ``mode <name>`` plus one
``assign <constant> <tensor-file>`` per constant (paths relative to the
model file).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from . import tensor as T
from .hom import Lexicon, apply_term_hom, load_lexicon
from .terms import (
    App,
    Basic,
    Const,
    Lam,
    LambdaError,
    Term,
    Type,
    Var,
    beta_eta_normalize,
    infer_type,
)
from .data import data_path


class EvalError(LambdaError):
    pass


class UnassignedConstant(EvalError):
    pass


class RankMismatch(EvalError):
    pass


MODES = ("tensor-contraction", "additive", "multiplicative")

# Object-type name -> expected tensor rank.
_RANK_OF_TYPE = {"V": 1, "M": 2, "C": 3, "H": 4}

_KERNELS = {
    "x1": (2, T.contract1),
    "x2": (2, T.contract2),
    "oplus": (2, T.pointwise_add),
    "odot": (2, T.pointwise_mul),
    "star": (2, T.scalar_mul),
    "dotp": (2, T.dot),
    "rho": (2, T.rotate),
}


@dataclass
class StaticModel:
    vocabulary: T.Vocabulary
    assignments: dict[str, T.Tensor] = field(default_factory=dict)
    mode: str = "tensor-contraction"

    def __post_init__(self):
        if self.mode not in MODES:
            raise EvalError(f"unknown mode {self.mode!r}")
        for name, value in self.assignments.items():
            if any(v != self.vocabulary for v in value.dims):
                raise EvalError(f"assignment {name!r} uses a foreign vocabulary")

    def assign(self, name: str, value: T.Tensor):
        if any(v != self.vocabulary for v in value.dims):
            raise EvalError(f"assignment {name!r} uses a foreign vocabulary")
        self.assignments[name] = value

    def lookup(self, name: str) -> T.Tensor:
        try:
            return self.assignments[name]
        except KeyError:
            raise UnassignedConstant(f"no tensor assigned to {name!r}") from None


def load_model(path) -> StaticModel:
    path = Path(path)
    mode = "tensor-contraction"
    assignments: dict[str, T.Tensor] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            head, _, rest = line.partition(" ")
            if head == "mode":
                mode = rest.strip()
            elif head == "assign":
                name, _, file = rest.strip().partition(" ")
                assignments[name] = T.load_tensor(path.parent / file.strip())
            else:
                raise EvalError(f"{path}:{lineno}: unknown directive {head!r}")
    if not assignments:
        raise EvalError(f"{path}: no assignments")
    vocab = next(iter(assignments.values())).vocab
    return StaticModel(vocab, assignments, mode)


class _Closure:
    __slots__ = ("var", "body", "env")

    def __init__(self, var, body, env):
        self.var, self.body, self.env = var, body, env


class _Partial:
    __slots__ = ("kernel", "needed", "args")

    def __init__(self, kernel, needed, args=()):
        self.kernel, self.needed, self.args = kernel, needed, args


def evaluate(t: Term, model: StaticModel) -> T.Tensor | float:
    """Tensor denotation of a closed object term.

    The term is normalized first, then reduced by structural recursion;
    constants resolve through the model, operator constants through their
    kernels.
    """
    t = beta_eta_normalize(t)
    value = _eval(t, model, {})
    if isinstance(value, (_Closure, _Partial)):
        raise RankMismatch("term denotes a function, not a tensor")
    return value


def _eval(t, model, env):
    match t:
        case Const(name, _):
            if name in _KERNELS:
                arity, kernel = _KERNELS[name]
                return _Partial(kernel, arity)
            try:
                return float(name)
            except ValueError:
                pass
            return model.lookup(name)
        case Var(name, _):
            try:
                return env[name]
            except KeyError:
                raise EvalError(f"unbound variable {name!r}") from None
        case Lam(v, body):
            return _Closure(v, body, dict(env))
        case App(fn, arg):
            f = _eval(fn, model, env)
            a = _eval(arg, model, env)
            return _apply(f, a, model)
    raise EvalError(f"cannot evaluate {t!r}")


def _apply(f, a, model):
    if isinstance(f, _Closure):
        inner = dict(f.env)
        inner[f.var.name] = a
        return _eval(f.body, model, inner)
    if isinstance(f, _Partial):
        args = f.args + (a,)
        if len(args) == f.needed:
            try:
                return f.kernel(*args)
            except T.TensorError as exc:
                raise RankMismatch(str(exc)) from None
        return _Partial(f.kernel, f.needed, args)
    raise RankMismatch("application head is not a function value")


def expected_rank(object_type: Type) -> int | None:
    """Tensor rank implied by an arrow-free object type, if any."""
    if isinstance(object_type, Basic):
        return _RANK_OF_TYPE.get(object_type.name)
    return None


def compose_sentence(abstract: Term, lex: Lexicon, model: StaticModel) -> T.Tensor:
    """Translate a sentence-typed abstract term and evaluate its image."""
    aty = infer_type(abstract, lex.source)
    if aty != Basic("S"):
        from .terms import TypeMismatch

        raise TypeMismatch(Basic("S"), aty, "compose_sentence input")
    image = beta_eta_normalize(apply_term_hom(lex, abstract))
    out = evaluate(image, model)
    if not isinstance(out, T.Tensor) or out.rank != 1:
        raise RankMismatch("sentence did not evaluate to a vector")
    return out


def seeded_model(lex: Lexicon, dim: int = 2, seed: int = 0,
                 mode: str | None = None) -> StaticModel:
    """Deterministic pseudo-random model over `dim` index positions.

    Assigns every vector/matrix/cube object constant of `lex` a tensor
    drawn from a fixed-seed generator.  This is fixture initialization:
    the entries carry no meaning beyond reproducibility (in particular the
    determiner vectors are placeholders).
    """
    import numpy as np

    rng = np.random.default_rng(seed)
    vocab = T.Vocabulary(tuple(f"i{k}" for k in range(dim)))
    if mode is None:
        mode = "additive" if "oplus" in lex.target.constants else (
            "multiplicative" if "odot" in lex.target.constants
            else "tensor-contraction")
    model = StaticModel(vocab, {}, mode)
    for name, ty in sorted(lex.target.constants.items()):
        rank = expected_rank(ty)
        if rank is None:
            continue
        model.assign(name, T.Tensor((vocab,) * rank,
                                    rng.uniform(-1.0, 1.0, (dim,) * rank)))
    return model


_MODE_LEXICON = {
    "additive": "additive.lex",
    "multiplicative": "multiplicative.lex",
    "matmul": "contraction.lex",
    "tensor-contraction": "contraction.lex",
}


def make_mode_lexicon(mode: str, words: dict[str, str] | None = None) -> Lexicon:
    """Composition-mode lexicon, optionally extended with more words.

    `words` maps new abstract constants to categories: name (type D),
    noun (N), adj (N N), iv (D S), tv (D D S), att (S D S), det
    (N (D S) S).  Generated entries follow the shipped pattern for the
    mode; each new word also becomes an object constant of the right rank.
    """
    try:
        lex = load_lexicon(data_path(_MODE_LEXICON[mode]))
    except KeyError:
        raise EvalError(f"unknown mode {mode!r}") from None
    for word, category in (words or {}).items():
        _extend_mode_lexicon(lex, mode, word, category)
    return lex


_CATEGORY_TYPES = {
    "name": "D",
    "noun": "N",
    "adj": "N N",
    "iv": "D S",
    "tv": "D D S",
    "att": "S D S",
    "det": "N (D S) S",
}


def _extend_mode_lexicon(lex, mode, word, category):
    from .terms import parse_term, parse_type, resolve

    if category not in _CATEGORY_TYPES:
        raise EvalError(f"unknown category {category!r} for {word!r}")
    contraction = mode in ("matmul", "tensor-contraction")
    op = {"additive": "oplus", "multiplicative": "odot"}.get(mode, "x1")
    if contraction:
        obj_rank_type = {"name": "V", "noun": "V", "adj": "M", "iv": "M",
                         "tv": "C", "att": "C", "det": "M"}[category]
    else:
        obj_rank_type = "V"
    lex.target.add_constant(word, Basic(obj_rank_type))
    templates = {
        "name": "{w}",
        "noun": "{w}",
        "adj": "(lam v ({op} {w} v))",
        "iv": "(lam v ({op} {w} v))",
        "tv": "(lam u (lam v ({op} ({op2} {w} u) v)))",
        "att": "(lam u (lam v ({op} ({op2} {w} u) v)))",
        "det": "(lam v (lam z (z ({op} {w} v))))",
    }
    op2 = "x2" if contraction else op
    text = templates[category].format(w=word, op=op, op2=op2)
    aty = parse_type(_CATEGORY_TYPES[category], lex.source)
    lex.source.add_constant(word, aty)
    raw = parse_term(text, lex.target, expected=lex.image_type(aty))
    lex.entries[word] = raw
