"""Compositional vector semantics over typed lambda terms.

Abstract lambda terms translate through type/term homomorphisms (lexicons
shipped as data files) into object terms over a tensor toolkit, evaluated
either statically (sentence vectors under a model) or dynamically (context
updates over co-occurrence matrices and entity-relation cubes), with a
propositional update logic and corpus-admits-sentence entailment on top.
"""

from .terms import (
    Arrow,
    Basic,
    Signature,
    Term,
    Type,
    alpha_equivalent,
    beta_eta_normalize,
    infer_type,
    is_linear,
    load_signature,
    parse_term,
    parse_type,
    render,
    render_type,
)
from .hom import (
    Lexicon,
    SchemaEntry,
    TypeHom,
    apply_term_hom,
    apply_type_hom,
    instantiate_schema,
    load_lexicon,
    validate_lexicon,
)
from .tensor import Tensor, Vocabulary, load_tensor, save_tensor
from .static import (
    StaticModel,
    compose_sentence,
    evaluate,
    load_model,
    make_mode_lexicon,
)
from .dynamic import (
    BINARIZED,
    COUNTING,
    Context,
    UpdateMode,
    apply_ccp,
    load_context,
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
from .corpus import (
    AnnotatedSentence,
    Corpus,
    CorpusConfig,
    Triple,
    build_cooccurrence,
    build_entity_cube,
    load_corpus,
    normalize_context,
    parse_demo_sentence,
)
from .logic import (
    And,
    Atom,
    CcpFormula,
    Implies,
    Not,
    Or,
    admits,
    build_context,
    ccp_apply,
    degreed_admits,
    from_relation,
    to_relation,
)

__version__ = "0.1.0"
