"""Assemble per-language representations: sample occurrences, embed them."""

from __future__ import annotations

import numpy as np

from ..corpus import LanguageCorpus, Partition
from ..lexer import LexerSpec
from ..representation import LanguageRepresentation, TokenEmbeddingSet
from ..vocab import CommonVocabulary
from .model import Encoder, EncoderError, embed_occurrence
from .sampling import OccurrenceSample, SamplingError, sample_occurrences, token_streams


def build_representation(encoder: Encoder, corpus: LanguageCorpus, spec: LexerSpec,
                         common: CommonVocabulary, max_samples: int, seed: int,
                         layer: int | str = "last", pooling: str = "mean",
                         masked_target: bool = False,
                         diagnostics: list[str] | None = None,
                         collect_samples: list[OccurrenceSample] | None = None,
                         ) -> LanguageRepresentation:
    """Embed sampled test-partition occurrences of every common token.

    Common tokens absent from this language's test partition land on the
    dropped list instead of erroring; an entirely dropped vocabulary is
    fatal.  collect_samples, when given, receives every embedded sample in
    token order (for the samples-file export).
    """
    streams = token_streams(corpus, spec, Partition.TEST)
    sets: dict[str, TokenEmbeddingSet] = {}
    dropped: list[str] = []
    for token in common.tokens:
        try:
            samples = sample_occurrences(
                corpus, spec, token, max_samples, seed,
                left_context=encoder.config.left_context,
                right_context=encoder.config.right_context,
                streams=streams,
            )
        except SamplingError:
            dropped.append(token)
            continue
        vectors = []
        kept_samples = []
        for sample in samples:
            vec = embed_occurrence(encoder, sample, layer=layer, pooling=pooling,
                                   masked_target=masked_target, diagnostics=diagnostics)
            if not np.any(vec):
                # cosine is undefined for the zero vector; drop the occurrence
                if diagnostics is not None:
                    diagnostics.append(
                        f"token {token!r} occurrence at file {sample.file_index} "
                        f"pos {sample.position}: all-zero embedding dropped"
                    )
                continue
            vectors.append(vec)
            kept_samples.append(sample)
        if not vectors:
            dropped.append(token)
            continue
        sets[token] = TokenEmbeddingSet(token, np.stack(vectors))
        if collect_samples is not None:
            collect_samples.extend(kept_samples)
    if not sets:
        raise EncoderError(
            f"{corpus.language!r}: every common token was dropped; "
            "representation is degenerate"
        )
    return LanguageRepresentation(
        language=corpus.language,
        encoder_tag=encoder.tag,
        dim=encoder.dim,
        sets=sets,
        dropped=tuple(dropped),
    )
