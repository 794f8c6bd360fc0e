"""Command-line interface.

Subcommands: translate, normalize, eval-static, build-context, apply,
admits, entail, similarity, validate-lexicon, to-relation, report.
Exit codes: 0 success, 1 domain error (message on stderr), 2 usage error.
Output is deterministic given identical inputs and seeds; `--porcelain`
switches to tab-separated machine output.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import corpus as corpus_mod
from . import dynamic as dyn
from . import logic as logic_mod
from . import static as static_mod
from . import tensor as T
from .data import data_path
from .hom import apply_term_hom, load_lexicon, validate_lexicon
from .terms import (
    beta_eta_normalize,
    infer_type,
    load_signature,
    parse_term,
    render,
    render_type,
)


class CliError(Exception):
    pass


def _term_text(args) -> str:
    if getattr(args, "text", None):
        return args.text
    if getattr(args, "term", None):
        return Path(args.term).read_text()
    raise CliError("need --term FILE or --text STRING")


def _mode(args) -> dyn.UpdateMode:
    name = {"counting": "counting", "binary": "binarized",
            "binarized": "binarized"}.get(args.mode)
    if name is None:
        raise CliError(f"unknown mode {args.mode!r}")
    return dyn.UpdateMode(name, rng_seed=args.seed)


def _config(args) -> corpus_mod.CorpusConfig:
    cfg = corpus_mod.CorpusConfig()
    if getattr(args, "corpus", None):
        cfg = load_corpus_arg(args).config
    if getattr(args, "config", None):
        cfg = cfg.merge(corpus_mod.load_config(args.config))
    return cfg


def load_corpus_arg(args) -> corpus_mod.Corpus:
    return corpus_mod.load_corpus(data_path(args.corpus))


def _sentence(args, cfg):
    return corpus_mod.parse_demo_sentence(args.sentence, cfg)


def _window(text):
    if text == "sentence":
        return "sentence"
    if text.startswith("k:"):
        return int(text[2:])
    raise CliError(f"--window must be 'sentence' or 'k:<n>', got {text!r}")


# ---------------------------------------------------------------------------
# Subcommands


def cmd_translate(args):
    lex = load_lexicon(data_path(args.lexicon))
    term = parse_term(_term_text(args), lex.source)
    image = apply_term_hom(lex, term)
    if not args.no_normalize:
        image = beta_eta_normalize(image)
    ty = infer_type(image, lex.target)
    if args.porcelain:
        # annotated binders so the output re-parses against the lexicon
        print(render(image, types_on_binders=True) + "\t"
              + render_type(ty, lex.target.aliases))
    else:
        print(render(image))
        print(f"type: {render_type(ty, lex.target.aliases)}")
    return 0


def cmd_normalize(args):
    if args.lexicon:
        sig = load_lexicon(data_path(args.lexicon)).source
    elif args.sig:
        sig = load_signature(data_path(args.sig))
    else:
        raise CliError("need --sig FILE or --lexicon FILE")
    term = parse_term(_term_text(args), sig)
    print(render(beta_eta_normalize(term)))
    return 0


def cmd_eval_static(args):
    lex = load_lexicon(data_path(args.lexicon))
    model = static_mod.load_model(data_path(args.model))
    term = parse_term(_term_text(args), lex.source)
    vec = static_mod.compose_sentence(term, lex, model)
    if args.porcelain:
        print("\t".join(repr(float(x)) for x in vec.data))
    else:
        for word, value in zip(vec.vocab.words, vec.data):
            print(f"{word}\t{value}")
    return 0


def cmd_build_context(args):
    corpus = load_corpus_arg(args)
    mode = _mode(args)
    if args.window is not None:
        ctx = corpus_mod.build_cooccurrence(corpus, _window(args.window))
        ctx = corpus_mod.normalize_context(ctx, args.scheme)
    else:
        lex = load_lexicon(data_path(args.lexicon)) if args.lexicon else None
        ctx = logic_mod.build_context(corpus, args.backend, mode, lex,
                                      fixpoint=args.fixpoint)
    dyn.save_context(ctx, args.out)
    shape = "x".join(str(len(v)) for v in ctx.numeric.dims)
    print(f"wrote {args.out} ({ctx.backend}, {shape})")
    return 0


def cmd_apply(args):
    ctx = dyn.load_context(data_path(args.context))
    mode = _mode(args)
    cfg = _config(args)
    base_len = len(ctx.log)
    if args.script:
        lines = Path(args.script).read_text().splitlines()
        ctx = dyn.run_update_script(lines, ctx, mode)
    elif args.formula:
        corpus = load_corpus_arg(args) if args.corpus else None
        formula = logic_mod.parse_formula(args.formula, corpus)
        lex = load_lexicon(data_path(args.lexicon)) if args.lexicon else None
        ctx = logic_mod.ccp_apply(formula, ctx, lex, mode)
    elif args.sentence:
        ctx = logic_mod.apply_sentence(_sentence(args, cfg), ctx, mode)
    else:
        raise CliError("need --sentence, --formula, or --script")
    for entry in ctx.log[base_len:]:
        print(entry)
    if args.out:
        dyn.save_context(ctx, args.out)
        print(f"wrote {args.out}")
    return 0


def cmd_admits(args):
    ctx = dyn.load_context(data_path(args.context))
    cfg = _config(args)
    lex = load_lexicon(data_path(args.lexicon)) if args.lexicon else None
    ok = logic_mod.admits(ctx, _sentence(args, cfg), lex, _mode(args))
    print("true" if ok else "false")
    return 0


def cmd_entail(args):
    cbin = dyn.load_context(data_path(args.bin))
    cnum = dyn.load_context(data_path(args.num))
    cfg = _config(args)
    lex = load_lexicon(data_path(args.lexicon)) if args.lexicon else None
    ok, degree, witness = logic_mod.degreed_admits(
        cbin, cnum, _sentence(args, cfg), lex, simfn=args.simfn,
        mode=_mode(args), max_subst=args.max_subst,
    )
    flag = "true" if ok else "false"
    pairs = ",".join(f"{r}->{w}" for r, w, _ in witness)
    if args.porcelain:
        print(f"{flag}\t{degree!r}\t{pairs}")
    else:
        suffix = f" witness={pairs}" if pairs else ""
        print(f"{flag} degree={degree:g}{suffix}")
    return 0


def cmd_similarity(args):
    ctx = dyn.load_context(data_path(args.num))
    w1, w2 = args.words.split(",")
    simfn = logic_mod.make_simfn(args.simfn)
    vocab = ctx.numeric.dims[0]
    value = simfn(ctx.numeric.data[vocab.index(w1)].ravel(),
                  ctx.numeric.data[vocab.index(w2)].ravel())
    print(repr(float(value)) if args.porcelain else f"{value:g}")
    return 0


def cmd_validate_lexicon(args):
    from .hom import LexiconError

    try:
        report = validate_lexicon(load_lexicon(data_path(args.lexicon)))
    except LexiconError as exc:
        print(f"lexicon {args.lexicon}: 1 failure(s):\n  {exc}")
        return 1
    print(report)
    return 0 if report.ok else 1


def cmd_to_relation(args):
    ctx = dyn.load_context(data_path(args.context))
    rel = sorted(logic_mod.to_relation(ctx))
    if args.porcelain:
        for cell in rel:
            print("\t".join(str(i) for i in cell))
    else:
        body = ", ".join("(" + ",".join(str(i) for i in cell) + ")" for cell in rel)
        print("{" + body + "}")
    return 0


def cmd_report(args):
    from .report import report_context

    if args.context:
        ctx = dyn.load_context(data_path(args.context))
    elif args.corpus:
        corpus = load_corpus_arg(args)
        if args.backend == "matrix":
            ctx = corpus_mod.build_cooccurrence(
                corpus, _window(args.window or "sentence"))
            ctx = corpus_mod.normalize_context(ctx, args.scheme)
        else:
            ctx = logic_mod.build_context(corpus, "cube", _mode(args),
                                          fixpoint=args.fixpoint)
    else:
        raise CliError("need --context or --corpus")
    before = dyn.load_context(data_path(args.before)) if args.before else None
    written = report_context(ctx, args.out, name=args.name, before=before)
    for path in written:
        print(path)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ccpsem", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *, seed=True, porcelain=True, mode=True):
        if mode:
            sp.add_argument("--mode", default="binary",
                            choices=["counting", "binary", "binarized"])
        if seed:
            sp.add_argument("--seed", type=int, default=0)
        if porcelain:
            sp.add_argument("--porcelain", action="store_true")
        sp.add_argument("--config", help="extra lemma/stopword/nominal file")

    sp = sub.add_parser("translate", help="homomorphic image of an abstract term")
    sp.add_argument("--lexicon", required=True)
    sp.add_argument("--term")
    sp.add_argument("--text")
    sp.add_argument("--no-normalize", action="store_true")
    sp.add_argument("--porcelain", action="store_true")
    sp.set_defaults(fn=cmd_translate)

    sp = sub.add_parser("normalize", help="beta-eta normal form")
    sp.add_argument("--sig")
    sp.add_argument("--lexicon")
    sp.add_argument("--term")
    sp.add_argument("--text")
    sp.set_defaults(fn=cmd_normalize)

    sp = sub.add_parser("eval-static", help="sentence vector under a model")
    sp.add_argument("--lexicon", required=True)
    sp.add_argument("--model", required=True)
    sp.add_argument("--term")
    sp.add_argument("--text")
    sp.add_argument("--porcelain", action="store_true")
    sp.set_defaults(fn=cmd_eval_static)

    sp = sub.add_parser("build-context", help="fold a corpus into a context")
    sp.add_argument("--corpus", required=True)
    sp.add_argument("--backend", default="cube", choices=["matrix", "cube"])
    sp.add_argument("--window", help="sentence | k:<n> (co-occurrence matrix)")
    sp.add_argument("--scheme", default="raw", choices=corpus_mod.SCHEMES)
    sp.add_argument("--fixpoint", action="store_true")
    sp.add_argument("--lexicon")
    sp.add_argument("--out", required=True)
    common(sp, porcelain=False)
    sp.set_defaults(fn=cmd_build_context)

    sp = sub.add_parser("apply", help="run updates against a context")
    sp.add_argument("--context", required=True)
    sp.add_argument("--sentence")
    sp.add_argument("--formula")
    sp.add_argument("--script")
    sp.add_argument("--corpus")
    sp.add_argument("--lexicon")
    sp.add_argument("--out")
    common(sp)
    sp.set_defaults(fn=cmd_apply)

    sp = sub.add_parser("admits", help="does the context admit the sentence?")
    sp.add_argument("--context", required=True)
    sp.add_argument("--sentence", required=True)
    sp.add_argument("--corpus")
    sp.add_argument("--lexicon")
    common(sp)
    sp.set_defaults(fn=cmd_admits)

    sp = sub.add_parser("entail", help="degreed admittance with substitutions")
    sp.add_argument("--bin", required=True)
    sp.add_argument("--num", required=True)
    sp.add_argument("--sentence", required=True)
    sp.add_argument("--corpus")
    sp.add_argument("--lexicon")
    sp.add_argument("--simfn", default="cosine", choices=["cosine", "dot"])
    sp.add_argument("--max-subst", type=int, default=2)
    common(sp)
    sp.set_defaults(fn=cmd_entail)

    sp = sub.add_parser("similarity", help="similarity of two word rows")
    sp.add_argument("--num", required=True)
    sp.add_argument("--words", required=True, help="w1,w2")
    sp.add_argument("--simfn", default="cosine", choices=["cosine", "dot"])
    sp.add_argument("--porcelain", action="store_true")
    sp.set_defaults(fn=cmd_similarity)

    sp = sub.add_parser("validate-lexicon", help="typecheck a lexicon file")
    sp.add_argument("--lexicon", required=True)
    sp.set_defaults(fn=cmd_validate_lexicon)

    sp = sub.add_parser("to-relation", help="binarized context as index tuples")
    sp.add_argument("--context", required=True)
    sp.add_argument("--porcelain", action="store_true")
    sp.set_defaults(fn=cmd_to_relation)

    sp = sub.add_parser("report", help="TSV plus heatmap figures")
    sp.add_argument("--context")
    sp.add_argument("--before", help="baseline for a change figure")
    sp.add_argument("--corpus")
    sp.add_argument("--backend", default="matrix", choices=["matrix", "cube"])
    sp.add_argument("--window")
    sp.add_argument("--scheme", default="raw", choices=corpus_mod.SCHEMES)
    sp.add_argument("--fixpoint", action="store_true")
    sp.add_argument("--name", default="context")
    sp.add_argument("--out", required=True)
    common(sp, porcelain=False)
    sp.set_defaults(fn=cmd_report)

    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except Exception as exc:  # domain errors -> exit 1
        print(f"ccpsem: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
