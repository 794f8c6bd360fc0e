"""Type and term homomorphisms between abstract and object languages.

A type homomorphism is fixed by its values on basic types and extends to
arrows by eta(a b) = (eta(a) eta(b)).  A term homomorphism (here: a
lexicon) is fixed by its values on constants and extends structurally:
applications map to applications, the n-th variable of type t maps to the
n-th variable of type eta(t), binders likewise.

Lexicons are data files, not code.  File format (line-oriented, ``#``
comments)::

    lexicon <name>
    basictype <B>                 abstract basic type
    objtype <B>                   object basic type
    typealias <A> : <type>        object-side notational alias
    hom <B> -> <type>             basic-type image
    objconst <c> : <type>         object constant
    entry <c> : <abstract-type> => <object-term>
    schema <c> : <type-pattern> => <template>
    alias <c> -> <c'>             abstract constant treated as another

Object terms use the ordinary term syntax; binder annotations may be
omitted because every entry is checked against the image of its declared
abstract type.  Schema templates may use one sequence variable: a name
beginning with ``@`` binds the whole argument sequence in a ``lam`` and
splices it in argument position.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .terms import (
    App,
    Arrow,
    Basic,
    Const,
    Lam,
    LambdaError,
    SeqArrow,
    Signature,
    Term,
    TermSyntaxError,
    Type,
    TypeMismatch,
    TypeScheme,
    UnmappedBasicType,
    Var,
    alpha_canonical,
    alpha_equivalent,
    app,
    parse_raw_term,
    parse_type,
    parse_type_scheme,
    render,
    render_type,
    resolve,
)


class MissingEntry(LambdaError):
    pass


class LexiconError(LambdaError):
    """A lexicon file failed to load or typecheck."""


@dataclass(frozen=True)
class TypeHom:
    """Map on types determined by its values on basic types."""

    basic_map: dict[str, Type] = field(default_factory=dict)

    def __call__(self, ty: Type) -> Type:
        return apply_type_hom(self, ty)


def apply_type_hom(h: TypeHom, ty: Type) -> Type:
    match ty:
        case Basic(name):
            try:
                return h.basic_map[name]
            except KeyError:
                raise UnmappedBasicType(f"no image for basic type {name!r}") from None
        case Arrow(dom, cod):
            return Arrow(apply_type_hom(h, dom), apply_type_hom(h, cod))
    raise TypeError(f"not a type: {ty!r}")


@dataclass(frozen=True)
class SchemaEntry:
    """Image rule for a constant whose type carries an argument-type sequence."""

    constant: str
    pattern: TypeScheme
    template: Term  # raw, with one @-named sequence variable

    def seq_name(self) -> str:
        name = _find_seq_name(self.template)
        if name is None:
            raise LambdaError(f"schema {self.constant!r} has no @-sequence variable")
        return name


def _find_seq_name(t: Term) -> str | None:
    match t:
        case Const(name, _) | Var(name, _):
            return name if name.startswith("@") else None
        case App(fn, arg):
            return _find_seq_name(fn) or _find_seq_name(arg)
        case Lam(v, body):
            return v.name if v.name.startswith("@") else _find_seq_name(body)
    return None


def _expand_template(t: Term, seq: str, names: list[str]) -> Term:
    """Replace the @-sequence binder/splice with `names` fresh variables."""
    match t:
        case Const(n, _) | Var(n, _):
            return t
        case Lam(v, body):
            body = _expand_template(body, seq, names)
            if v.name == seq:
                for n in reversed(names):
                    body = Lam(Var(n, None), body)
                return body
            return Lam(v, body)
        case App(fn, arg):
            fn2 = _expand_template(fn, seq, names)
            if isinstance(arg, (Const, Var)) and arg.name == seq:
                return app(fn2, *[Var(n, None) for n in names]) if names else fn2
            return App(fn2, _expand_template(arg, seq, names))
    raise TypeError(f"not a term: {t!r}")


@dataclass
class Lexicon:
    """A term homomorphism seed: constant images over a type homomorphism."""

    name: str
    source: Signature
    target: Signature
    typehom: TypeHom
    entries: dict[str, Term] = field(default_factory=dict)
    schemas: dict[str, SchemaEntry] = field(default_factory=dict)
    aliases: dict[str, str] = field(default_factory=dict)

    def image_type(self, ty: Type) -> Type:
        return apply_type_hom(self.typehom, ty)

    def entry_for(self, name: str) -> Term | None:
        name = self.aliases.get(name, name)
        return self.entries.get(name)

    def schema_for(self, name: str) -> SchemaEntry | None:
        name = self.aliases.get(name, name)
        return self.schemas.get(name)


def instantiate_schema(
    schema: SchemaEntry, alphas: list[Type], lex: Lexicon
) -> tuple[Type, Term]:
    """Concrete (abstract type, object image) of a schema at sequence `alphas`."""
    abstract_ty = schema.pattern.instantiate(alphas)
    image_ty = lex.image_type(abstract_ty)
    seq = schema.seq_name()
    names = [f"{seq[1:]}{i}" for i in range(len(alphas))]
    raw = _expand_template(schema.template, seq, names)
    term, _ = resolve(raw, lex.target, expected=image_ty)
    return abstract_ty, term


def apply_term_hom(lex: Lexicon, t: Term) -> Term:
    """Homomorphic image of a well-typed abstract term.

    The term is resolved and alpha-canonicalized first, so binder names are
    unique and map one-to-one onto object variables of the image types.
    """
    t, _ = resolve(t, lex.source)
    t = alpha_canonical(t)

    def go(term):
        match term:
            case Const(name, tag):
                entry = lex.entry_for(name)
                if entry is not None:
                    return entry
                schema = lex.schema_for(name)
                if schema is not None:
                    if tag is None:
                        raise MissingEntry(
                            f"schematic constant {name!r} used without a type instance"
                        )
                    alphas = schema.pattern.infer_alphas(_first_component(tag))
                    _, image = instantiate_schema(schema, alphas, lex)
                    return image
                raise MissingEntry(f"no lexicon entry for constant {name!r}")
            case Var(name, ty):
                return Var(name, lex.image_type(ty))
            case App(fn, arg):
                return App(go(fn), go(arg))
            case Lam(v, body):
                return Lam(Var(v.name, lex.image_type(v.type)), go(body))
        raise TypeError(f"not a term: {term!r}")

    return go(t)


def _first_component(instantiated: Type) -> Type:
    if not isinstance(instantiated, Arrow):
        raise TypeMismatch(Arrow(Basic("?"), Basic("?")), instantiated,
                           "schema instance")
    return instantiated.dom


@dataclass
class ValidationFailure:
    constant: str
    expected: Type | None
    actual: Type | None
    error: str = ""

    def __str__(self):
        if self.error:
            return f"{self.constant}: {self.error}"
        return (
            f"{self.constant}: image has type {render_type(self.actual)}, "
            f"expected {render_type(self.expected)}"
        )


@dataclass
class ValidationReport:
    lexicon: str
    failures: list[ValidationFailure] = field(default_factory=list)
    checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    def __str__(self):
        head = f"lexicon {self.lexicon}: {self.checked} entries checked"
        if self.ok:
            return head + ", all well-typed"
        lines = [head, f"{len(self.failures)} failure(s):"]
        lines += [f"  {f}" for f in self.failures]
        return "\n".join(lines)


# Sequence instances used to spot-check schemas during validation.
_SCHEMA_PROBE_ARITIES = ((), ("D",), ("D", "D"))


def validate_lexicon(lex: Lexicon) -> ValidationReport:
    """Check every entry's image type against the type homomorphism."""
    report = ValidationReport(lex.name)
    for name, image in lex.entries.items():
        report.checked += 1
        declared = lex.source.constants.get(name)
        if declared is None:
            report.failures.append(
                ValidationFailure(name, None, None, "not declared in source signature")
            )
            continue
        expected = lex.image_type(declared)
        try:
            _, actual = resolve(image, lex.target)
        except LambdaError as exc:
            report.failures.append(ValidationFailure(name, expected, None, str(exc)))
            continue
        if actual != expected:
            report.failures.append(ValidationFailure(name, expected, actual))
    for name, schema in lex.schemas.items():
        for arity in _SCHEMA_PROBE_ARITIES:
            alphas = [Basic(b) for b in arity
                      if b in lex.source.basic_types]
            if len(alphas) != len(arity):
                continue
            report.checked += 1
            try:
                instantiate_schema(schema, alphas, lex)
            except LambdaError as exc:
                report.failures.append(
                    ValidationFailure(name, None, None,
                                      f"schema at arity {len(alphas)}: {exc}")
                )
    return report


# ---------------------------------------------------------------------------
# Lexicon files


def load_lexicon(path) -> Lexicon:
    source = Signature()
    target = Signature()
    name = str(path)
    hom_map: dict[str, Type] = {}
    pending_entries: list[tuple[int, str, str, str]] = []
    pending_schemas: list[tuple[int, str, str, str]] = []
    aliases: dict[str, str] = {}

    with open(path, encoding="utf-8") as fh:
        lines = fh.readlines()

    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if head == "lexicon":
                name = rest
            elif head == "basictype":
                source.add_basic(rest)
            elif head == "objtype":
                target.add_basic(rest)
            elif head == "typealias":
                alias, _, ty = rest.partition(":")
                target.add_alias(alias.strip(), parse_type(ty.strip(), target))
            elif head == "hom":
                b, _, ty = rest.partition("->")
                hom_map[b.strip()] = parse_type(ty.strip(), target)
            elif head == "objconst":
                cname, _, ty = rest.partition(":")
                target.add_constant(cname.strip(), parse_type(ty.strip(), target))
            elif head == "entry":
                cname, _, body = rest.partition(":")
                ty_text, _, term_text = body.partition("=>")
                pending_entries.append(
                    (lineno, cname.strip(), ty_text.strip(), term_text.strip())
                )
            elif head == "schema":
                cname, _, body = rest.partition(":")
                pat_text, _, tpl_text = body.partition("=>")
                pending_schemas.append(
                    (lineno, cname.strip(), pat_text.strip(), tpl_text.strip())
                )
            elif head == "alias":
                a, _, b = rest.partition("->")
                aliases[a.strip()] = b.strip()
            else:
                raise TermSyntaxError(f"unknown lexicon directive {head!r}")
        except LambdaError as exc:
            raise LexiconError(f"{path}:{lineno}: {exc}") from exc

    lex = Lexicon(name, source, target, TypeHom(hom_map), aliases=aliases)
    for lineno, cname, ty_text, term_text in pending_entries:
        try:
            aty = parse_type(ty_text, source)
            source.add_constant(cname, aty)
            expected = lex.image_type(aty)
            raw_term = parse_raw_term(term_text, target)
            term, _ = resolve(raw_term, target, expected=expected)
            lex.entries[cname] = term
        except LambdaError as exc:
            raise LexiconError(f"{path}:{lineno}: entry {cname!r}: {exc}") from exc
    for lineno, cname, pat_text, tpl_text in pending_schemas:
        try:
            pattern = parse_type_scheme(pat_text, source)
            source.add_scheme(cname, pattern)
            template = parse_raw_term(tpl_text, target)
            lex.schemas[cname] = SchemaEntry(cname, pattern, template)
        except LambdaError as exc:
            raise LexiconError(f"{path}:{lineno}: schema {cname!r}: {exc}") from exc
    for a, b in aliases.items():
        if b not in lex.entries and b not in lex.schemas:
            raise MissingEntry(f"{path}: alias {a!r} -> {b!r} has no target entry")
        if b in lex.schemas:
            source.add_scheme(a, lex.schemas[b].pattern)
        else:
            source.add_constant(a, source.constants[b])
    return lex
