"""Synthetic token-grammar languages for desk-scale experiments.

Two grammar families share one common token inventory (identifiers,
numbers, and the core punctuation) but wrap it in disjoint styles: an
assignment/brace style and a parenthesized prefix style.  Corpora drawn
from the same grammar with different seeds play the role of closely
related languages; the other family plays the dissimilar outlier.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from pathlib import Path

from .corpus import CorpusFile, LanguageCorpus, Partition

# tokens every synthetic language shares (the common-vocabulary inventory)
COMMON_IDENTIFIERS = ("alpha", "beta", "gamma", "delta", "total", "value",
                      "index", "count", "x", "y", "z")
COMMON_NUMBERS = ("0", "1", "2", "3", "7", "42", "100")
COMMON_PUNCT = ("=", "+", "-", "(", ")", ";")


@dataclass(frozen=True)
class SynthGrammar:
    name: str
    templates: tuple[tuple[str, ...], ...]  # "<id>", "<num>", "<kw>" placeholders
    keywords: tuple[str, ...]  # style-exclusive tokens
    comment_texts: tuple[str, ...]
    comment_rate: float = 0.15
    statements_per_file: tuple[int, int] = (8, 20)


def c_like_grammar() -> SynthGrammar:
    return SynthGrammar(
        name="clike",
        templates=(
            ("<kw>", "<id>", "=", "<num>", ";"),
            ("<id>", "=", "<id>", "+", "<num>", ";"),
            ("<id>", "=", "<id>", "-", "<id>", ";"),
            ("<kw>", "(", "<id>", ")", ";"),
            ("<id>", "=", "(", "<id>", "+", "<id>", ")", ";"),
            ("<kw>", "<id>", "=", "<id>", "+", "<num>", ";"),
        ),
        keywords=("int", "var", "return", "print", "while", "if"),
        comment_texts=("update the accumulator", "loop body", "entry point",
                       "result so far", "helper value"),
    )


def lisp_like_grammar() -> SynthGrammar:
    return SynthGrammar(
        name="lisplike",
        templates=(
            ("(", "<kw>", "<id>", "<num>", ")"),
            ("(", "<kw>", "(", "<id>", "<id>", ")", "(", "+", "<id>", "<num>", ")", ")"),
            ("(", "=", "<id>", "(", "-", "<id>", "<id>", ")", ")"),
            ("(", "<kw>", "(", "+", "<num>", "<id>", ")", ")"),
            ("(", "<kw>", "<id>", "(", "<kw>", "<id>", ")", ";", ")"),
        ),
        keywords=("define", "lambda", "setq", "cond", "car", "cdr"),
        comment_texts=("tail call", "binding form", "fold step",
                       "list head", "recur here"),
    )


def generate_file(grammar: SynthGrammar, rng: random.Random) -> str:
    lines = []
    n_statements = rng.randint(*grammar.statements_per_file)
    for _ in range(n_statements):
        if rng.random() < grammar.comment_rate:
            lines.append("// " + rng.choice(grammar.comment_texts))
        words = []
        for slot in rng.choice(grammar.templates):
            if slot == "<id>":
                words.append(rng.choice(COMMON_IDENTIFIERS))
            elif slot == "<num>":
                words.append(rng.choice(COMMON_NUMBERS))
            elif slot == "<kw>":
                words.append(rng.choice(grammar.keywords))
            else:
                words.append(slot)
        lines.append(" ".join(words))
    return "\n".join(lines) + "\n"


def generate_corpus(grammar: SynthGrammar, language: str, n_files: int, seed: int,
                    train_fraction: float = 0.9) -> LanguageCorpus:
    """In-memory corpus of generated files, already split train/test."""
    rng = random.Random(seed)
    n_train = int(n_files * train_fraction)
    files = tuple(
        CorpusFile(
            path=Path(f"synth://{language}/{i:05d}.src"),
            text=generate_file(grammar, rng),
            partition=Partition.TRAIN if i < n_train else Partition.TEST,
        )
        for i in range(n_files)
    )
    return LanguageCorpus(language, files)


def write_corpus(grammar: SynthGrammar, language: str, n_files: int, seed: int,
                 out_dir: str | Path) -> list[Path]:
    """On-disk variant for CLI-driven runs."""
    rng = random.Random(seed)
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(n_files):
        p = out / f"{language}_{i:05d}.src"
        p.write_text(generate_file(grammar, rng), encoding="utf-8")
        paths.append(p)
    return paths
