"""Fixtures: a tiny random-weight checkpoint plus hand-written sample files.

The checkpoint is built locally so the suite needs no network.  Its
WordPiece vocabulary is chosen so every fixture token embeds cleanly and
"totals" splits into two pieces, exercising subword pooling.
"""

import pytest
import torch
from tokenizers import Tokenizer, models, normalizers, pre_tokenizers
from transformers import BertConfig, BertModel, PreTrainedTokenizerFast

WORDS = (
    ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    + list("abcdefghijklmnopqrstuvwxyz0123456789")
    + ["total", "value", "index", "count", "##s", "##x",
       "=", "+", "(", ")", ";", "-"]
)

HIDDEN = 32


@pytest.fixture(scope="session")
def checkpoint(tmp_path_factory):
    out = tmp_path_factory.mktemp("tinybert")
    core = Tokenizer(models.WordPiece({w: i for i, w in enumerate(WORDS)},
                                      unk_token="[UNK]"))
    core.normalizer = normalizers.Lowercase()
    core.pre_tokenizer = pre_tokenizers.WhitespaceSplit()
    tokenizer = PreTrainedTokenizerFast(
        tokenizer_object=core, unk_token="[UNK]", pad_token="[PAD]",
        cls_token="[CLS]", sep_token="[SEP]", mask_token="[MASK]",
    )
    config = BertConfig(vocab_size=len(WORDS), hidden_size=HIDDEN,
                        num_hidden_layers=2, num_attention_heads=2,
                        intermediate_size=64, max_position_embeddings=64)
    torch.manual_seed(1234)
    BertModel(config).save_pretrained(out)
    tokenizer.save_pretrained(out)
    return out


def write_samples(path, language, records):
    """records: list of (occ_id, token, context lexemes, target offset)."""
    lines = [f"#plsim-samples v1 language={language}"]
    for occ_id, token, context, offset in records:
        ctx = " ".join(lex.replace("\\", "\\\\").replace(" ", "\\s")
                       for lex in context)
        lines.append(f"{occ_id}\t{token}\t{ctx}\t{offset}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


FIXTURE_RECORDS = [
    ("f0p3", "total", ["value", "=", "total", "+", "1", ";"], 2),
    ("f0p9", "total", ["total", "=", "total", "+", "count", ";"], 0),
    ("f1p2", "value", ["(", "value", ")", ";"], 1),
    ("f1p7", "value", ["count", "=", "value", "-", "2", ";"], 2),
    ("f2p1", "=", ["index", "=", "0", ";"], 1),
    ("f2p5", "=", ["value", "=", "totals", ";"], 1),
    ("f3p0", "index", ["index", "+", "1"], 0),
    ("f3p4", "index", ["count", "=", "index", ";"], 2),
    ("f4p2", "count", ["count", "=", "count", "+", "7", ";"], 0),
    ("f4p8", "count", ["(", "count", ")"], 1),
]


@pytest.fixture(scope="session")
def samples_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("samples") / "lang_a.samples"
    return write_samples(path, "lang_a", FIXTURE_RECORDS)
