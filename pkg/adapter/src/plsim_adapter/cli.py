"""plsim-extract: turn a samples export into an lrep archive."""

from __future__ import annotations

import argparse
import sys

from .extract import ExtractionError, ExtractionJob, extract


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="plsim-extract",
        description="Embed plsim occurrence samples with a pretrained "
                    "transformer checkpoint.",
    )
    parser.add_argument("--model", required=True,
                        help="checkpoint directory or hub identifier")
    parser.add_argument("--samples", required=True,
                        help="plsim-samples v1 file from `plsim embed --export-samples`")
    parser.add_argument("--layer", default="last",
                        help="hidden layer index (0 = embeddings) or 'last'")
    parser.add_argument("--pooling", choices=["mean", "first"], default="mean")
    parser.add_argument("--batch-size", type=int, default=8)
    parser.add_argument("--out", required=True, help="lrep archive to write")
    args = parser.parse_args(argv)

    layer = args.layer if args.layer == "last" else int(args.layer)
    skipped: list[str] = []
    try:
        job = ExtractionJob(model_ref=args.model, samples_file=args.samples,
                            layer=layer, pooling=args.pooling,
                            batch_size=args.batch_size)
        written = extract(job, args.out, skipped=skipped)
    except (ExtractionError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    for occ_id in skipped:
        print(f"warning: skipped unembeddable sample {occ_id}", file=sys.stderr)
    print(f"{written} records ({len(skipped)} skipped) -> {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
