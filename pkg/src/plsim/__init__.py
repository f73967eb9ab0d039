"""plsim: how similarly does a code encoder represent the same tokens
across programming languages?

Pipeline: ingest corpora, lex with comment-aware per-language specs,
intersect vocabularies into common tokens, embed sampled occurrences with
a trainable masked-LM encoder, score languages with max-cosine
set-matching similarity, and render sorted heatmaps.
"""

__version__ = "0.1.0"
