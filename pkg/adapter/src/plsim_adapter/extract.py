"""Hidden-state extraction from a pretrained transformer checkpoint.

Input is a "#plsim-samples v1" file: one lexed occurrence per line with its
context window and the offset of the target lexeme inside that window.
Each context lexeme is tokenized separately, so the target always maps to a
contiguous span of subword pieces.  The selected layer's hidden states over
that span are pooled into one vector per occurrence and written as an
lrep v1 archive in samples-file order.

Occurrences whose target produces no subword pieces cannot be embedded;
they are skipped and reported rather than guessed at.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import torch

_UNESCAPES = {"\\": "\\", "t": "\t", "n": "\n", "r": "\r", "s": " "}


class ExtractionError(ValueError):
    pass


def _unescape(text: str) -> str:
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch == "\\" and i + 1 < len(text):
            nxt = text[i + 1]
            if nxt in _UNESCAPES:
                out.append(_UNESCAPES[nxt])
                i += 2
                continue
        out.append(ch)
        i += 1
    return "".join(out)


@dataclass(frozen=True)
class Sample:
    occ_id: str
    token: str
    context: tuple[str, ...]
    target_offset: int


def read_samples(path: str | Path) -> tuple[str, list[Sample]]:
    """Parse a samples export; returns (language, samples)."""
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    if not lines or not lines[0].startswith("#plsim-samples v1 "):
        raise ExtractionError(f"{path}: not a plsim-samples v1 file")
    header_fields = dict(
        part.split("=", 1) for part in lines[0].split()[2:] if "=" in part
    )
    language = header_fields.get("language")
    if not language:
        raise ExtractionError(f"{path}: header lacks language=<id>")
    samples = []
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 4:
            raise ExtractionError(f"{path}:{lineno}: expected 4 fields, got {len(parts)}")
        occ_id, token_raw, context_raw, offset_raw = parts
        context = tuple(_unescape(lex) for lex in context_raw.split(" "))
        try:
            offset = int(offset_raw)
        except ValueError as exc:
            raise ExtractionError(f"{path}:{lineno}: bad target offset") from exc
        if not 0 <= offset < len(context):
            raise ExtractionError(
                f"{path}:{lineno}: target offset {offset} outside context "
                f"of {len(context)} lexemes"
            )
        samples.append(Sample(occ_id, _unescape(token_raw), context, offset))
    if not samples:
        raise ExtractionError(f"{path}: no sample records")
    return language, samples


@dataclass(frozen=True)
class ExtractionJob:
    model_ref: str
    samples_file: str | Path
    layer: int | str = "last"
    pooling: str = "mean"
    batch_size: int = 8

    def __post_init__(self):
        if self.pooling not in ("mean", "first"):
            raise ExtractionError(f"unknown pooling {self.pooling!r}")
        if self.batch_size < 1:
            raise ExtractionError("batch_size must be >= 1")
        if isinstance(self.layer, str) and self.layer != "last":
            raise ExtractionError(f"layer must be an index or 'last', got {self.layer!r}")


@dataclass
class _Encoded:
    sample: Sample
    ids: list[int]
    target_start: int  # span of the target lexeme's pieces, CLS included
    target_end: int


def _encode_sample(sample: Sample, tokenizer, max_positions: int) -> _Encoded | None:
    """Map one sample to model input ids; None if the target has no pieces."""
    spans = []
    pieces: list[int] = []
    for lexeme in sample.context:
        ids = tokenizer(lexeme, add_special_tokens=False)["input_ids"]
        spans.append((len(pieces), len(pieces) + len(ids)))
        pieces.extend(ids)
    start, end = spans[sample.target_offset]
    if start == end:
        return None

    budget = max_positions - 2
    if len(pieces) > budget:
        if end - start > budget:
            return None
        center = (start + end) // 2
        lo = min(max(0, center - budget // 2), len(pieces) - budget)
        pieces = pieces[lo:lo + budget]
        start, end = start - lo, end - lo

    ids = [tokenizer.cls_token_id] + pieces + [tokenizer.sep_token_id]
    return _Encoded(sample, ids, start + 1, end + 1)


def extract(job: ExtractionJob, out_path: str | Path,
            skipped: list[str] | None = None) -> int:
    """Run the extraction job; returns the number of records written.

    Unembeddable sample ids are appended to `skipped` when given.
    """
    from transformers import AutoModel, AutoTokenizer

    language, samples = read_samples(job.samples_file)
    tokenizer = AutoTokenizer.from_pretrained(job.model_ref)
    model = AutoModel.from_pretrained(job.model_ref)
    model.eval()

    depth = model.config.num_hidden_layers
    layer = depth if job.layer == "last" else int(job.layer)
    if not 0 <= layer <= depth:
        raise ExtractionError(
            f"layer {layer} outside model depth (0..{depth}, where 0 is the "
            f"embedding layer)"
        )
    max_positions = getattr(model.config, "max_position_embeddings", 512)
    pad_id = tokenizer.pad_token_id
    if pad_id is None:
        raise ExtractionError(f"{job.model_ref}: tokenizer defines no padding token")

    encoded = []
    for sample in samples:
        enc = _encode_sample(sample, tokenizer, max_positions)
        if enc is None:
            if skipped is not None:
                skipped.append(sample.occ_id)
            continue
        encoded.append(enc)
    if not encoded:
        raise ExtractionError(f"{job.samples_file}: every sample was unembeddable")

    vectors = []
    with torch.no_grad():
        for base in range(0, len(encoded), job.batch_size):
            batch = encoded[base:base + job.batch_size]
            width = max(len(e.ids) for e in batch)
            ids = torch.full((len(batch), width), pad_id, dtype=torch.long)
            mask = torch.zeros((len(batch), width), dtype=torch.long)
            for row, e in enumerate(batch):
                ids[row, :len(e.ids)] = torch.tensor(e.ids, dtype=torch.long)
                mask[row, :len(e.ids)] = 1
            states = model(ids, attention_mask=mask,
                           output_hidden_states=True).hidden_states[layer]
            for row, e in enumerate(batch):
                span = states[row, e.target_start:e.target_end]
                vec = span.mean(dim=0) if job.pooling == "mean" else span[0]
                vectors.append(vec.numpy())

    dim = int(vectors[0].shape[0])
    header = {
        "format": "lrep",
        "version": 1,
        "language": language,
        "dim": dim,
        "encoder": str(job.model_ref),
    }
    occ_counters: dict[str, int] = {}
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(header) + "\n")
        for e, vec in zip(encoded, vectors):
            occ = occ_counters.get(e.sample.token, 0)
            occ_counters[e.sample.token] = occ + 1
            cells = ", ".join(f"{float(x):.9g}" for x in vec)
            fh.write(
                f'{{"token": {json.dumps(e.sample.token)}, "occ": {occ}, '
                f'"vec": [{cells}]}}\n'
            )
    return len(encoded)
