"""Scaled-down relatedness experiment on synthetic languages.

Three languages share one common token inventory: two ("rel_a", "rel_b")
are drawn from the same grammar with different seeds, the third ("far")
from a disjoint-style grammar.  Each language gets its own encoder
finetuned from one shared random initialization over a shared subword
vocabulary (the multilingual-run setting), and the claim under test is
that the symmetrized similarity of the related pair exceeds the
related-to-distant one.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass

from .corpus import Partition
from .encoder import EncoderConfig, build_representation, train_bpe, train_encoder
from .encoder.model import Encoder, MaskedLMModel
from .lexer import builtin_spec, tokenize
from .similarity import pairwise_matrix
from .synth import c_like_grammar, generate_corpus, lisp_like_grammar

import torch


@dataclass
class TrialResult:
    seed: int
    related: float  # symmetrized sim(rel_a, rel_b)
    distant: float  # symmetrized sim(rel_a, far)

    @property
    def ordered(self) -> bool:
        return self.related > self.distant


def relatedness_trial(seed: int, n_files: int = 200, steps: int = 2000,
                      dim: int = 64, layers: int = 2, max_samples: int = 20,
                      ) -> TrialResult:
    spec = builtin_spec("c")  # all synthetic grammars emit C-style tokens
    corpora = {
        "rel_a": generate_corpus(c_like_grammar(), "rel_a", n_files, seed=seed),
        "rel_b": generate_corpus(c_like_grammar(), "rel_b", n_files, seed=seed + 1000),
        "far": generate_corpus(lisp_like_grammar(), "far", n_files, seed=seed + 2000),
    }
    config = EncoderConfig(
        dim=dim, layers=layers, heads=4, left_context=16, right_context=16,
        subword_vocab_size=256, steps=steps, seed=seed, batch_size=4, seq_len=64,
        max_positions=256,
    )

    # shared subword vocabulary over all train partitions (multilingual run)
    lexeme_counts: Counter[str] = Counter()
    for corp in corpora.values():
        for f in corp.partition_files(Partition.TRAIN):
            lexeme_counts.update(t.lexeme for t in tokenize(f.text, spec))
    subwords = train_bpe(lexeme_counts, config.subword_vocab_size)

    # one shared random initialization; per-language training starts from it
    init_gen = torch.Generator().manual_seed(seed)
    with torch.random.fork_rng():
        torch.manual_seed(int(torch.randint(2**31, (1,), generator=init_gen)))
        base_model = MaskedLMModel(len(subwords), config)
    base = Encoder(base_model, subwords, config, tag=f"base-s{seed}")

    from .vocab import build_vocabulary, intersect

    vocabs = [build_vocabulary(corp, spec) for corp in corpora.values()]
    common = intersect(vocabs)

    reps = []
    for offset, (name, corp) in enumerate(corpora.items()):
        lang_config = EncoderConfig(**{**config.__dict__, "seed": seed + 7 * (offset + 1)})
        encoder = train_encoder(corp, spec, lang_config, init_from=base)
        reps.append(
            build_representation(encoder, corp, spec, common, max_samples, seed)
        )
    matrix = pairwise_matrix(reps)
    idx = {lang: i for i, lang in enumerate(matrix.languages)}
    return TrialResult(
        seed=seed,
        related=float(matrix.symmetrized[idx["rel_a"], idx["rel_b"]]),
        distant=float(matrix.symmetrized[idx["rel_a"], idx["far"]]),
    )
