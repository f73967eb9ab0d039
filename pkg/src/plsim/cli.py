"""plsim command-line interface."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import archive, corpus as corpus_mod, report as report_mod, similarity, vocab as vocab_mod
from .lexer import TokenKind, builtin_spec, builtin_spec_names, load_spec, strip_comments, tokenize
from .util import escape_field, unescape_field


def _resolve_spec(ref: str):
    path = Path(ref)
    if path.exists():
        return load_spec(path)
    return builtin_spec(ref)


def cmd_ingest(args) -> int:
    if args.manifest:
        manifest = corpus_mod.CorpusManifest.load(args.manifest)
        if args.max_files is not None:
            manifest = corpus_mod.CorpusManifest(
                manifest.language, manifest.files, args.max_files
            )
    else:
        manifest = corpus_mod.CorpusManifest.from_directory(
            args.root, args.language, args.max_files
        )
    corp = corpus_mod.ingest(manifest)
    corp = corpus_mod.split(corp, args.train_fraction)
    corpus_mod.save_corpus(corp, args.out)
    for diag in corp.diagnostics:
        print(f"warning: {diag}", file=sys.stderr)
    n_train = len(corp.partition_files(corpus_mod.Partition.TRAIN))
    print(f"ingested {len(corp.files)} files for {corp.language} "
          f"({n_train} train / {len(corp.files) - n_train} test) -> {args.out}")
    return 0


def cmd_lex(args) -> int:
    spec = _resolve_spec(args.spec)
    source = Path(args.source).read_text(encoding="utf-8", errors="replace")
    diagnostics: list[str] = []
    tokens = tokenize(source, spec, diagnostics)
    if args.strip_comments:
        tokens = strip_comments(tokens)
    for diag in diagnostics:
        print(f"warning: {diag}", file=sys.stderr)
    for t in tokens:
        print(f"{t.kind.value}\t{t.start}\t{t.end}\t{escape_field(t.lexeme)}")
    return 0


def cmd_vocab(args) -> int:
    corp = corpus_mod.load_corpus(args.corpus)
    spec = _resolve_spec(args.spec)
    kinds = {TokenKind(k.upper()) for k in args.kinds} if args.kinds else None
    vocab = vocab_mod.build_vocabulary(corp, spec, kinds=kinds)
    vocab_mod.save_vocabulary(vocab, args.out)
    print(f"{corp.language}: {len(vocab.counts)} distinct tokens -> {args.out}")
    return 0


def cmd_intersect(args) -> int:
    vocabs = [vocab_mod.load_vocabulary(p) for p in args.vocabs]
    common = vocab_mod.intersect(vocabs)
    vocab_mod.save_common_vocabulary(common, args.out)
    print(f"{len(common.tokens)} common tokens across "
          f"{len(vocabs)} languages -> {args.out}")
    return 0


def cmd_train(args) -> int:
    from .encoder import EncoderConfig, load_encoder, save_encoder, train_encoder

    corp = corpus_mod.load_corpus(args.corpus)
    spec = _resolve_spec(args.spec)
    config = EncoderConfig(
        dim=args.dim, layers=args.layers, heads=args.heads,
        left_context=args.left_context, right_context=args.right_context,
        subword_vocab_size=args.subword_vocab_size,
        mask_fraction=args.mask_fraction, steps=args.steps, seed=args.seed,
        batch_size=args.batch_size, seq_len=args.seq_len,
        learning_rate=args.learning_rate,
    )
    init_from = load_encoder(args.init_from) if args.init_from else None
    encoder = train_encoder(corp, spec, config, init_from=init_from, tag=args.tag)
    save_encoder(encoder, args.out)
    print(f"trained {encoder.tag}: loss {encoder.initial_loss:.4f} -> "
          f"{encoder.final_loss:.4f} over {config.steps} steps -> {args.out}")
    return 0


def cmd_embed(args) -> int:
    from .encoder import build_representation, load_encoder, save_samples

    encoder = load_encoder(args.encoder)
    corp = corpus_mod.load_corpus(args.corpus)
    spec = _resolve_spec(args.spec)
    common = vocab_mod.load_common_vocabulary(args.tokens)
    diagnostics: list[str] = []
    collected = [] if args.export_samples else None
    rep = build_representation(
        encoder, corp, spec, common, args.samples, args.seed,
        layer=args.layer if args.layer == "last" else int(args.layer),
        pooling=args.pooling, masked_target=args.masked_target,
        diagnostics=diagnostics, collect_samples=collected,
    )
    archive.export_archive(rep, args.out)
    if args.export_samples:
        save_samples(collected, corp.language, args.export_samples)
    for diag in diagnostics:
        print(f"warning: {diag}", file=sys.stderr)
    if rep.dropped:
        print(f"dropped {len(rep.dropped)} tokens absent from the test partition",
              file=sys.stderr)
    total = sum(ts.size for ts in rep.sets.values())
    print(f"{corp.language}: {len(rep.sets)} token sets, {total} vectors -> {args.out}")
    return 0


def cmd_sim(args) -> int:
    reps = [archive.import_archive(p) for p in args.archives]
    matrix = similarity.pairwise_matrix(
        reps, keep_per_token=args.per_token, strict_fp=args.strict_fp or args.oracle
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    langs = matrix.languages
    (out / "directed.csv").write_text(
        report_mod.matrix_to_csv(matrix.directed, langs, args.decimals), encoding="utf-8"
    )
    (out / "symmetrized.csv").write_text(
        report_mod.matrix_to_csv(matrix.symmetrized, langs, args.decimals),
        encoding="utf-8",
    )
    if args.per_token:
        lines = []
        for (a, b), scores in matrix.per_token.items():
            for token in sorted(scores):
                lines.append(f"{escape_field(token)}\t{a}\t{b}\t{scores[token]:.{args.decimals}f}")
        (out / "per_token.tsv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"{len(langs)} languages; off-diagonal spread {matrix.spread:.4f} -> {out}")
    return 0


def cmd_selfsim(args) -> int:
    rep = archive.import_archive(args.archive)
    dist = similarity.self_similarity(rep)
    lines = [
        f"#plsim-selfsim v1 language={dist.language} mean={dist.mean:.9f} "
        f"variance={dist.variance:.9f} excluded_singletons={dist.excluded_singletons}"
    ]
    for token in sorted(dist.per_token_scores):
        lines.append(f"{escape_field(token)}\t{dist.per_token_scores[token]:.9f}")
    Path(args.out).write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"{dist.language}: mean {dist.mean:.4f}, variance {dist.variance:.6f}, "
          f"{dist.excluded_singletons} singletons excluded -> {args.out}")
    return 0


def load_selfsim_file(path: str | Path) -> similarity.SelfSimilarityDistribution:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("#plsim-selfsim v1"):
        raise ValueError(f"{path}: not a plsim-selfsim v1 file")
    header = dict(kv.split("=", 1) for kv in lines[0].split()[1:] if "=" in kv)
    scores = {}
    for ln in lines[1:]:
        if ln.strip():
            raw_token, raw_score = ln.split("\t")
            scores[unescape_field(raw_token)] = float(raw_score)
    return similarity.SelfSimilarityDistribution(
        language=header["language"],
        per_token_scores=scores,
        mean=float(header["mean"]),
        variance=float(header["variance"]),
        excluded_singletons=int(header["excluded_singletons"]),
    )


def cmd_report(args) -> int:
    matrix_dir = Path(args.matrix)
    langs_d, directed = report_mod.parse_matrix_csv(
        (matrix_dir / "directed.csv").read_text(encoding="utf-8")
    )
    _, symmetrized = report_mod.parse_matrix_csv(
        (matrix_dir / "symmetrized.csv").read_text(encoding="utf-8")
    )
    matrix = similarity.SimilarityMatrix(langs_d, directed, symmetrized)
    config = report_mod.ReportConfig(
        sort="average_similarity" if args.sort == "average" else "input_order",
        decimals=args.decimals,
        abs_scale=args.abs_scale,
    )
    written = report_mod.render_heatmap(matrix, config, args.out)
    if args.self:
        dists = [load_selfsim_file(p) for p in args.self]
        baseline = [load_selfsim_file(p) for p in args.baseline] if args.baseline else None
        rows = report_mod.summarize_self_similarity(dists, baseline)
        report_mod.write_self_similarity_table(
            rows, Path(args.out) / "selfsim.tsv", args.decimals
        )
        written["selfsim"] = Path(args.out) / "selfsim.tsv"
    print("wrote " + ", ".join(str(p) for p in written.values()))
    return 0


def cmd_specs(args) -> int:
    for name in builtin_spec_names():
        print(name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plsim",
        description="Compare contextual code-token representations across languages",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="read a file manifest into a corpus directory")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--root", help="directory to scan (sorted by full path)")
    src.add_argument("--manifest", help="existing plsim-manifest file")
    p.add_argument("--language", help="language id (required with --root)")
    p.add_argument("--max-files", type=int, default=None)
    p.add_argument("--train-fraction", type=float, default=0.9)
    p.add_argument("--out", required=True, help="corpus directory to write")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("lex", help="tokenize one source file to TSV")
    p.add_argument("--spec", required=True, help="lexer spec file or built-in name")
    p.add_argument("source")
    p.add_argument("--strip-comments", action="store_true")
    p.add_argument("--format", choices=["tsv"], default="tsv")
    p.set_defaults(func=cmd_lex)

    p = sub.add_parser("vocab", help="build a per-language token-count vocabulary")
    p.add_argument("--corpus", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--kinds", nargs="*", default=None,
                   help="restrict to these token kinds (e.g. identifier)")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_vocab)

    p = sub.add_parser("intersect", help="intersect vocabularies into the common vocabulary")
    p.add_argument("--vocabs", nargs="+", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_intersect)

    p = sub.add_parser("train", help="train the masked-LM encoder on a corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--dim", type=int, default=64)
    p.add_argument("--layers", type=int, default=2)
    p.add_argument("--heads", type=int, default=4)
    p.add_argument("--left-context", type=int, default=64)
    p.add_argument("--right-context", type=int, default=64)
    p.add_argument("--subword-vocab-size", type=int, default=4096)
    p.add_argument("--mask-fraction", type=float, default=0.15)
    p.add_argument("--steps", type=int, default=2000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--batch-size", type=int, default=8)
    p.add_argument("--seq-len", type=int, default=128)
    p.add_argument("--learning-rate", type=float, default=3e-4)
    p.add_argument("--init-from", default=None,
                   help="encoder directory to finetune from")
    p.add_argument("--tag", default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("embed", help="sample and embed common-token occurrences")
    p.add_argument("--encoder", required=True)
    p.add_argument("--corpus", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--tokens", required=True, help="common-vocabulary file")
    p.add_argument("--samples", type=int, default=50, help="max occurrences per token")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--layer", default="last")
    p.add_argument("--pooling", choices=["mean", "first"], default="mean")
    p.add_argument("--masked-target", action="store_true")
    p.add_argument("--export-samples", default=None,
                   help="also write the sampled occurrences to this file")
    p.add_argument("--out", required=True, help="lrep archive to write")
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("sim", help="pairwise similarity grids from lrep archives")
    p.add_argument("--archives", nargs="+", required=True)
    p.add_argument("--oracle", action="store_true",
                   help="use the naive brute-force path")
    p.add_argument("--strict-fp", action="store_true",
                   help="fixed summation order for bit-exact reproducibility")
    p.add_argument("--per-token", action="store_true")
    p.add_argument("--decimals", type=int, default=9)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("selfsim", help="within-language self-similarity distribution")
    p.add_argument("--archive", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_selfsim)

    p = sub.add_parser("report", help="sorted grids, heatmap, self-similarity table")
    p.add_argument("--matrix", required=True, help="directory holding sim output")
    p.add_argument("--self", nargs="*", default=None, help="selfsim files")
    p.add_argument("--baseline", nargs="*", default=None,
                   help="selfsim files of a second run, for delta columns")
    p.add_argument("--sort", choices=["average", "input"], default="average")
    p.add_argument("--abs-scale", action="store_true")
    p.add_argument("--decimals", type=int, default=6)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("specs", help="list built-in lexer specs")
    p.set_defaults(func=cmd_specs)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "ingest" and args.root and not args.language:
        print("error: --language is required with --root", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
