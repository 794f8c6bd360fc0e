"""Simply typed lambda terms over declarable signatures.

Types are either basic names or right-associated arrows.  Terms are
constants, variables, applications, and single-binder abstractions.
Everything here is immutable and pure: parsing, type resolution,
alpha-equivalence, linearity checking, and beta-eta normalization.

Concrete syntax (UTF-8, parenthesized prefix notation)::

    application    (f a)          n-ary sugar: (f a b) == ((f a) b)
    abstraction    (lam x:T body) annotation optional where the context
                                  forces the binder type
    types          D, N, S, ...   arrows (A B), right-associated; (A B C)
                                  reads as (A (B C))

Signatures load from line-oriented text: ``basictype <name>`` and
``constant <name> : <type>`` (plus ``typealias`` / ``schematic``, see
:func:`load_signature`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


class LambdaError(Exception):
    """Base class for term-level failures."""


class TermSyntaxError(LambdaError):
    def __init__(self, message, position=None):
        self.position = position
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)


class UnknownSymbol(LambdaError):
    pass


class TypeMismatch(LambdaError):
    def __init__(self, expected, actual, where=""):
        self.expected = expected
        self.actual = actual
        suffix = f" in {where}" if where else ""
        super().__init__(
            f"expected {render_type(expected)}, got {render_type(actual)}{suffix}"
        )


class UnmappedBasicType(LambdaError):
    pass


# ---------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Basic:
    name: str

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Arrow:
    dom: "Type"
    cod: "Type"

    def __repr__(self):
        return render_type(self)


Type = Basic | Arrow


def arrows(doms, cod: Type) -> Type:
    """Right-fold a list of argument types onto a result type."""
    out = cod
    for d in reversed(doms):
        out = Arrow(d, out)
    return out


def spine_of(t: Type) -> tuple[list[Type], Type]:
    """Split a type into its argument list and final result type."""
    args = []
    while isinstance(t, Arrow):
        args.append(t.dom)
        t = t.cod
    return args, t


def render_type(t: Type, aliases: dict[str, Type] | None = None) -> str:
    """Right-associated rendering with outer parentheses dropped."""
    if aliases:
        for name, ty in aliases.items():
            if t == ty:
                return name

    def atom(x):
        if aliases:
            for name, ty in aliases.items():
                if x == ty:
                    return name
        if isinstance(x, Basic):
            return x.name
        return "(" + render_type(x, aliases) + ")"

    if isinstance(t, Basic):
        return t.name
    parts = []
    while isinstance(t, Arrow):
        parts.append(atom(t.dom))
        t = t.cod
        if aliases and any(t == ty for ty in aliases.values()):
            break
    parts.append(atom(t))
    return " ".join(parts)


@dataclass(frozen=True)
class SeqArrow:
    """Type pattern component: a sequence of argument types ending in `tail`.

    Used by schematic constants whose type is parameterized by an arbitrary
    argument-type sequence.  `match` recovers the sequence from a concrete
    type by peeling arrows until the (basic) tail is reached.
    """

    tail: Type

    def instantiate(self, alphas) -> Type:
        return arrows(list(alphas), self.tail)

    def match(self, concrete: Type) -> list[Type] | None:
        alphas = []
        t = concrete
        while t != self.tail:
            if not isinstance(t, Arrow):
                return None
            alphas.append(t.dom)
            t = t.cod
        return alphas


@dataclass(frozen=True)
class TypeScheme:
    """Arrow of pattern components sharing one type-sequence variable."""

    components: tuple[Type | SeqArrow, ...]

    def instantiate(self, alphas) -> Type:
        parts = [
            c.instantiate(alphas) if isinstance(c, SeqArrow) else c
            for c in self.components
        ]
        return arrows(parts[:-1], parts[-1])

    def infer_alphas(self, first_arg_type: Type) -> list[Type]:
        head = self.components[0]
        if not isinstance(head, SeqArrow):
            if head == first_arg_type:
                return []
            raise TypeMismatch(head, first_arg_type, "schematic constant")
        alphas = head.match(first_arg_type)
        if alphas is None:
            raise TypeMismatch(head.tail, first_arg_type, "schematic constant")
        return alphas


# ---------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Const:
    name: str
    # Filled during resolution for schematic constants; None elsewhere is fine
    # because fixed constants carry their type in the signature.
    type: Type | None = None

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class Var:
    name: str
    type: Type | None = None

    def __repr__(self):
        return self.name


@dataclass(frozen=True)
class App:
    fn: "Term"
    arg: "Term"

    def __repr__(self):
        return render(self)


@dataclass(frozen=True)
class Lam:
    var: Var
    body: "Term"

    def __repr__(self):
        return render(self)


Term = Const | Var | App | Lam


def app(*parts: Term) -> Term:
    """Left-associated application of one or more terms."""
    out = parts[0]
    for p in parts[1:]:
        out = App(out, p)
    return out


def render(t: Term, types_on_binders: bool = False) -> str:
    match t:
        case Const(name, _) | Var(name, _):
            return name
        case App():
            parts = []
            while isinstance(t, App):
                parts.append(t.arg)
                t = t.fn
            parts.append(t)
            return "(" + " ".join(render(p, types_on_binders) for p in reversed(parts)) + ")"
        case Lam(v, body):
            if types_on_binders and v.type is not None:
                binder = f"{v.name}:({render_type(v.type)})"
            else:
                binder = v.name
            return f"(lam {binder} {render(body, types_on_binders)})"
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Signatures


@dataclass
class Signature:
    """Declared basic types and typed constants.

    `aliases` are purely notational (expanded at parse time, contracted at
    render time).  `schemes` hold schematic constants whose concrete type is
    recovered from their first argument at each use site.
    """

    basic_types: set[str] = field(default_factory=set)
    constants: dict[str, Type] = field(default_factory=dict)
    aliases: dict[str, Type] = field(default_factory=dict)
    schemes: dict[str, TypeScheme] = field(default_factory=dict)

    def add_basic(self, name: str):
        self.basic_types.add(name)

    def add_constant(self, name: str, ty: Type):
        if name in self.constants or name in self.schemes:
            raise LambdaError(f"duplicate constant {name!r}")
        self._check_declared(ty, name)
        self.constants[name] = ty

    def add_alias(self, name: str, ty: Type):
        self._check_declared(ty, name)
        self.aliases[name] = ty

    def add_scheme(self, name: str, scheme: TypeScheme):
        if name in self.constants:
            raise LambdaError(f"duplicate constant {name!r}")
        self.schemes[name] = scheme

    def _check_declared(self, ty: Type, owner: str):
        for b in basics_in(ty):
            if b not in self.basic_types:
                raise UnknownSymbol(f"type of {owner!r} uses undeclared basic type {b!r}")

    def copy(self) -> "Signature":
        return Signature(
            set(self.basic_types),
            dict(self.constants),
            dict(self.aliases),
            dict(self.schemes),
        )


def basics_in(ty: Type):
    if isinstance(ty, Basic):
        yield ty.name
    else:
        yield from basics_in(ty.dom)
        yield from basics_in(ty.cod)


def load_signature(path) -> Signature:
    sig = Signature()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                _signature_line(sig, line)
            except LambdaError as exc:
                raise LambdaError(f"{path}:{lineno}: {exc}") from exc
    return sig


def _signature_line(sig: Signature, line: str):
    head, _, rest = line.partition(" ")
    if head == "basictype":
        sig.add_basic(rest.strip())
    elif head == "typealias":
        name, _, ty = rest.partition(":")
        sig.add_alias(name.strip(), parse_type(ty.strip(), sig))
    elif head == "constant":
        name, _, ty = rest.partition(":")
        sig.add_constant(name.strip(), parse_type(ty.strip(), sig))
    elif head == "schematic":
        name, _, pat = rest.partition(":")
        sig.add_scheme(name.strip(), parse_type_scheme(pat.strip(), sig))
    else:
        raise TermSyntaxError(f"unknown signature directive {head!r}")


# ---------------------------------------------------------------------------
# Tokenizer and parsers


def _tokenize(text: str):
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            tokens.append((ch, i))
            i += 1
        elif ch == "#":
            while i < len(text) and text[i] != "\n":
                i += 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "()#":
                j += 1
            tokens.append((text[i:j], i))
            i = j
    return tokens


class _TokenStream:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos] if self.pos < len(self.tokens) else (None, len(self.tokens))

    def next(self):
        tok = self.peek()
        if tok[0] is None:
            raise TermSyntaxError("unexpected end of input", tok[1])
        self.pos += 1
        return tok

    def expect(self, symbol):
        tok, at = self.next()
        if tok != symbol:
            raise TermSyntaxError(f"expected {symbol!r}, found {tok!r}", at)

    def done(self):
        return self.pos >= len(self.tokens)


def parse_type(text: str, sig: Signature | None = None) -> Type:
    stream = _TokenStream(text)
    ty = _parse_type_atoms(stream, sig)
    if not stream.done():
        raise TermSyntaxError("trailing input after type", stream.peek()[1])
    return ty


def parse_type_scheme(text: str, sig: Signature | None = None) -> TypeScheme:
    """Parse a type pattern such as ``((... S) (... S) (... S))``.

    The token ``...`` stands for the shared argument-type sequence.
    """
    stream = _TokenStream(text)
    tok, at = stream.peek()
    if tok != "(":
        raise TermSyntaxError("type pattern must be parenthesized", at)
    stream.next()
    comps = []
    while stream.peek()[0] != ")":
        comps.append(_parse_scheme_component(stream, sig))
    stream.next()
    if not stream.done():
        raise TermSyntaxError("trailing input after type pattern", stream.peek()[1])
    if not comps:
        raise TermSyntaxError("empty type pattern", at)
    return TypeScheme(tuple(comps))


def _parse_scheme_component(stream, sig):
    tok, at = stream.peek()
    if tok == "(":
        stream.next()
        inner, seen_seq = [], False
        while stream.peek()[0] != ")":
            t, p = stream.peek()
            if t == "...":
                if seen_seq:
                    raise TermSyntaxError("only one sequence marker per component", p)
                seen_seq = True
                stream.next()
            else:
                inner.append(_parse_type_atom(stream, sig))
        stream.next()
        if seen_seq:
            if len(inner) != 1:
                raise TermSyntaxError("sequence component must be (... <tail>)", at)
            return SeqArrow(inner[0])
        return arrows(inner[:-1], inner[-1])
    return _parse_type_atom(stream, sig)


def _parse_type_atoms(stream, sig):
    atoms = [_parse_type_atom(stream, sig)]
    while stream.peek()[0] not in (None, ")"):
        atoms.append(_parse_type_atom(stream, sig))
    return arrows(atoms[:-1], atoms[-1])


def _parse_type_atom(stream, sig) -> Type:
    tok, at = stream.next()
    if tok == "(":
        ty = _parse_type_atoms(stream, sig)
        stream.expect(")")
        return ty
    if tok == ")":
        raise TermSyntaxError("unexpected ')'", at)
    if sig is not None:
        if tok in sig.aliases:
            return sig.aliases[tok]
        if tok not in sig.basic_types:
            raise UnknownSymbol(f"undeclared basic type {tok!r}")
    return Basic(tok)


def parse_raw_term(text: str, sig: Signature | None = None) -> Term:
    """Parse concrete syntax without resolving names or types.

    A signature, when given, is only consulted for type aliases inside
    binder annotations.
    """
    stream = _TokenStream(text)
    term = _parse_term(stream, sig)
    if not stream.done():
        raise TermSyntaxError("trailing input after term", stream.peek()[1])
    return term


def _parse_term(stream, sig) -> Term:
    tok, at = stream.next()
    if tok == ")":
        raise TermSyntaxError("unexpected ')'", at)
    if tok != "(":
        return _name_term(tok)
    head, head_at = stream.peek()
    if head == "lam":
        stream.next()
        binder, b_at = stream.next()
        if binder in ("(", ")"):
            raise TermSyntaxError("binder must be a name", b_at)
        name, colon, ann = binder.partition(":")
        if not name:
            raise TermSyntaxError(f"bad binder {binder!r}", b_at)
        ty = None
        if colon:
            # `x:D` annotates inline; `x:` is followed by a parenthesized type.
            ty = parse_type(ann, sig) if ann else _parse_type_atom(stream, sig)
        body = _parse_term(stream, sig)
        stream.expect(")")
        return Lam(Var(name, ty), body)
    parts = []
    while stream.peek()[0] != ")":
        if stream.peek()[0] is None:
            raise TermSyntaxError("unterminated '('", at)
        parts.append(_parse_term(stream, sig))
    stream.next()
    if not parts:
        raise TermSyntaxError("empty application", at)
    return app(*parts)


def _name_term(tok: str) -> Term:
    return Const(tok)


# ---------------------------------------------------------------------------
# Resolution: names and bidirectional typing


def resolve(
    t: Term,
    sig: Signature,
    env: dict[str, Type] | None = None,
    expected: Type | None = None,
) -> tuple[Term, Type]:
    """Resolve names against `sig` and assign every binder its type.

    Raw parses put every name in `Const`; here names bound by an enclosing
    `lam` become variables.  When `expected` is given the term is checked
    against it, which lets binder annotations be omitted wherever the
    context determines them.  Returns the fully typed term and its type.
    """
    env = dict(env or {})
    return _resolve(t, sig, env, expected)


def _resolve(t, sig, env, expected):
    match t:
        case Const(name, _) | Var(name, _):
            if name in env:
                out, ty = Var(name, env[name]), env[name]
            elif name in sig.constants:
                out, ty = Const(name, sig.constants[name]), sig.constants[name]
            elif name in sig.schemes:
                if expected is None:
                    raise TypeMismatch(
                        Basic("?"), Basic("?"),
                        f"schematic constant {name!r} needs an application context",
                    )
                # Covers eta-expanded or argument-position uses.
                out, ty = Const(name, expected), expected
            else:
                raise UnknownSymbol(f"unresolved symbol {name!r}")
        case App(fn, arg):
            out, ty = _resolve_app(t, sig, env)
        case Lam(v, body):
            if v.type is None and expected is None:
                raise TermSyntaxError(
                    f"binder {v.name!r} needs a type annotation or determining context"
                )
            if expected is not None:
                if not isinstance(expected, Arrow):
                    raise TypeMismatch(expected, Arrow(v.type or Basic("?"), Basic("?")),
                                       "abstraction")
                if v.type is not None and v.type != expected.dom:
                    raise TypeMismatch(expected.dom, v.type, f"binder {v.name!r}")
                vty = expected.dom
                bexp = expected.cod
            else:
                vty, bexp = v.type, None
            inner = dict(env)
            inner[v.name] = vty
            body2, bty = _resolve(body, sig, inner, bexp)
            out, ty = Lam(Var(v.name, vty), body2), Arrow(vty, bty)
        case _:
            raise TypeError(f"not a term: {t!r}")
    if expected is not None and ty != expected:
        raise TypeMismatch(expected, ty)
    return out, ty


def _resolve_app(t, sig, env):
    # Peel the application spine so schematic heads can see their first
    # argument before committing to a concrete type.
    spine = []
    head = t
    while isinstance(head, App):
        spine.append(head.arg)
        head = head.fn
    spine.reverse()

    head_name = head.name if isinstance(head, (Const, Var)) else None
    if (
        head_name is not None
        and head_name not in env
        and head_name in sig.schemes
        and spine
    ):
        first, first_ty = _resolve(spine[0], sig, env, None)
        scheme = sig.schemes[head_name]
        alphas = scheme.infer_alphas(first_ty)
        head_ty = scheme.instantiate(alphas)
        fn: Term = Const(head_name, head_ty)
        fn_ty = head_ty
        rest = spine[1:]
    else:
        fn, fn_ty = _resolve(head, sig, env, None)
        rest = spine
        first = None

    if first is not None:
        if not isinstance(fn_ty, Arrow):
            raise TypeMismatch(Arrow(first_ty, Basic("?")), fn_ty, "application head")
        if fn_ty.dom != first_ty:
            raise TypeMismatch(fn_ty.dom, first_ty, f"argument of {render(fn)}")
        fn = App(fn, first)
        fn_ty = fn_ty.cod

    for raw in rest:
        if not isinstance(fn_ty, Arrow):
            _, got = _resolve(raw, sig, env, None)
            raise TypeMismatch(Arrow(got, Basic("?")), fn_ty, "application head")
        arg, _ = _resolve(raw, sig, env, fn_ty.dom)
        fn = App(fn, arg)
        fn_ty = fn_ty.cod
    return fn, fn_ty


def parse_term(text: str, sig: Signature, env: dict[str, Type] | None = None,
               expected: Type | None = None) -> Term:
    """Parse and resolve a term; unresolved symbols are errors."""
    raw = parse_raw_term(text, sig)
    term, _ = resolve(raw, sig, env, expected)
    return term


def infer_type(t: Term, sig: Signature, env: dict[str, Type] | None = None) -> Type:
    """The unique simple type of `t` (free variables via `env`)."""
    _, ty = resolve(t, sig, env)
    return ty


# ---------------------------------------------------------------------------
# Alpha-equivalence, linearity, free variables


def alpha_equivalent(a: Term, b: Term) -> bool:
    return _alpha_eq(a, b, {}, {})


def _alpha_eq(a, b, la, lb):
    match a, b:
        case Const(na, _), Const(nb, _):
            return na == nb
        case Var(na, _), Var(nb, _):
            if na in la or nb in lb:
                return la.get(na) == lb.get(nb) and la.get(na) is not None
            return na == nb
        case App(fa, aa), App(fb, ab):
            return _alpha_eq(fa, fb, la, lb) and _alpha_eq(aa, ab, la, lb)
        case Lam(va, ba), Lam(vb, bb):
            mark = len(la) + 1
            return _alpha_eq(ba, bb, {**la, va.name: mark}, {**lb, vb.name: mark})
    return False


def free_vars(t: Term) -> set[str]:
    match t:
        case Var(name, _):
            return {name}
        case Const():
            return set()
        case App(fn, arg):
            return free_vars(fn) | free_vars(arg)
        case Lam(v, body):
            return free_vars(body) - {v.name}
    raise TypeError(f"not a term: {t!r}")


def is_linear(t: Term) -> bool:
    """True iff every binder in `t` binds exactly one variable occurrence."""

    def count(term, name):
        match term:
            case Var(n, _):
                return 1 if n == name else 0
            case Const():
                return 0
            case App(fn, arg):
                return count(fn, name) + count(arg, name)
            case Lam(v, body):
                return 0 if v.name == name else count(body, name)

    match t:
        case Const() | Var():
            return True
        case App(fn, arg):
            return is_linear(fn) and is_linear(arg)
        case Lam(v, body):
            return count(body, v.name) == 1 and is_linear(body)
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Substitution and normalization

_fresh_counter = itertools.count(1)


def _fresh_like(name: str) -> str:
    base = name.split("!", 1)[0]
    return f"{base}!{next(_fresh_counter)}"


def substitute(t: Term, name: str, value: Term) -> Term:
    """Capture-avoiding substitution of `value` for free `name` in `t`."""
    match t:
        case Var(n, _):
            return value if n == name else t
        case Const():
            return t
        case App(fn, arg):
            return App(substitute(fn, name, value), substitute(arg, name, value))
        case Lam(v, body):
            if v.name == name:
                return t
            if v.name in free_vars(value):
                fresh = _fresh_like(v.name)
                body = substitute(body, v.name, Var(fresh, v.type))
                v = Var(fresh, v.type)
            return Lam(v, substitute(body, name, value))
    raise TypeError(f"not a term: {t!r}")


def _beta_step_normal(t: Term) -> Term | None:
    """Contract the leftmost-outermost beta-redex, or None if beta-normal."""
    match t:
        case App(Lam(v, body), arg):
            return substitute(body, v.name, arg)
        case App(fn, arg):
            s = _beta_step_normal(fn)
            if s is not None:
                return App(s, arg)
            s = _beta_step_normal(arg)
            if s is not None:
                return App(fn, s)
            return None
        case Lam(v, body):
            s = _beta_step_normal(body)
            return None if s is None else Lam(v, s)
        case _:
            return None


def _beta_step_applicative(t: Term) -> Term | None:
    """Innermost-first contraction; agrees with normal order on typed terms."""
    match t:
        case App(fn, arg):
            s = _beta_step_applicative(fn)
            if s is not None:
                return App(s, arg)
            s = _beta_step_applicative(arg)
            if s is not None:
                return App(fn, s)
            if isinstance(fn, Lam):
                return substitute(fn.body, fn.var.name, arg)
            return None
        case Lam(v, body):
            s = _beta_step_applicative(body)
            return None if s is None else Lam(v, s)
        case _:
            return None


def _eta_contract(t: Term) -> Term:
    match t:
        case Lam(v, body):
            body2 = _eta_contract(body)
            if isinstance(body2, App) and isinstance(body2.arg, Var) \
                    and body2.arg.name == v.name and v.name not in free_vars(body2.fn):
                return body2.fn
            return Lam(v, body2)
        case App(fn, arg):
            return App(_eta_contract(fn), _eta_contract(arg))
        case _:
            return t


def alpha_canonical(t: Term, prefix: str = "v") -> Term:
    """Rename binders to `v0`, `v1`, ... in traversal order."""
    counter = itertools.count()

    def go(term, ren):
        match term:
            case Var(n, ty):
                return Var(ren.get(n, n), ty)
            case Const():
                return term
            case App(fn, arg):
                return App(go(fn, ren), go(arg, ren))
            case Lam(v, body):
                fresh = f"{prefix}{next(counter)}"
                return Lam(Var(fresh, v.type), go(body, {**ren, v.name: fresh}))

    return go(t, {})


def beta_eta_normalize(t: Term, strategy: str = "normal") -> Term:
    """Beta-eta normal form, alpha-canonically renamed.

    Normal-order reduction by default; "applicative" exists for the
    uniqueness-of-normal-forms cross-check and must only be used on
    well-typed (hence terminating) terms.
    """
    step = {"normal": _beta_step_normal, "applicative": _beta_step_applicative}[strategy]
    while True:
        s = step(t)
        if s is None:
            break
        t = s
    t = _eta_contract(t)
    return alpha_canonical(t)


normalize = beta_eta_normalize
