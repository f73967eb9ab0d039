"""Token-count vocabularies and the cross-language common vocabulary."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from .corpus import LanguageCorpus
from .lexer import LexerSpec, TokenKind, strip_comments, tokenize
from .util import escape_field, unescape_field


class VocabError(ValueError):
    pass


@dataclass(frozen=True)
class Vocabulary:
    language: str
    counts: dict[str, int]


@dataclass(frozen=True)
class CommonVocabulary:
    tokens: tuple[str, ...]  # ascending lexicographic, duplicate-free
    per_language_counts: dict[str, dict[str, int]]

    @property
    def languages(self) -> list[str]:
        return list(self.per_language_counts)


def build_vocabulary(corpus: LanguageCorpus, spec: LexerSpec,
                     kinds: set[TokenKind] | None = None) -> Vocabulary:
    """Count comment-excluded token lexemes over all files (train and test).

    kinds, when given, restricts counting to those token kinds (e.g. an
    identifier-only study); comments are excluded regardless.
    """
    counts: Counter[str] = Counter()
    for f in corpus.files:
        for tok in strip_comments(tokenize(f.text, spec)):
            if kinds is not None and tok.kind not in kinds:
                continue
            counts[spec.fold(tok.lexeme)] += 1
    return Vocabulary(corpus.language, dict(counts))


def intersect(vocabularies: list[Vocabulary]) -> CommonVocabulary:
    """Exact intersection of the token key sets, counts carried per language."""
    if len(vocabularies) < 2:
        raise VocabError("need at least 2 vocabularies to intersect")
    languages = [v.language for v in vocabularies]
    if len(set(languages)) != len(languages):
        raise VocabError(f"duplicate language in intersection: {languages}")
    common = set(vocabularies[0].counts)
    for v in vocabularies[1:]:
        common &= set(v.counts)
    tokens = tuple(sorted(common))
    per_language = {
        v.language: {t: v.counts[t] for t in tokens} for v in vocabularies
    }
    return CommonVocabulary(tokens, per_language)


# ---------------------------------------------------------------------------
# File formats

def save_vocabulary(vocab: Vocabulary, path: str | Path) -> None:
    lines = [f"#plsim-vocab v1 language={vocab.language}"]
    for token in sorted(vocab.counts):
        lines.append(f"{vocab.counts[token]}\t{escape_field(token)}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_vocabulary(path: str | Path) -> Vocabulary:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("#plsim-vocab v1"):
        raise VocabError(f"{path}: not a plsim-vocab v1 file")
    header = dict(kv.split("=", 1) for kv in lines[0].split()[1:] if "=" in kv)
    counts = {}
    for ln in lines[1:]:
        if not ln.strip():
            continue
        raw_count, raw_token = ln.split("\t", 1)
        counts[unescape_field(raw_token)] = int(raw_count)
    return Vocabulary(header["language"], counts)


def save_common_vocabulary(common: CommonVocabulary, path: str | Path) -> None:
    langs = common.languages
    lines = ["#plsim-common-vocab v1", "token\t" + "\t".join(langs)]
    for token in common.tokens:
        counts = "\t".join(str(common.per_language_counts[l][token]) for l in langs)
        lines.append(f"{escape_field(token)}\t{counts}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_common_vocabulary(path: str | Path) -> CommonVocabulary:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("#plsim-common-vocab v1"):
        raise VocabError(f"{path}: not a plsim-common-vocab v1 file")
    langs = lines[1].split("\t")[1:]
    tokens = []
    per_language: dict[str, dict[str, int]] = {l: {} for l in langs}
    for ln in lines[2:]:
        if not ln.strip():
            continue
        cells = ln.split("\t")
        token = unescape_field(cells[0])
        tokens.append(token)
        for lang, raw in zip(langs, cells[1:]):
            per_language[lang][token] = int(raw)
    return CommonVocabulary(tuple(tokens), per_language)
