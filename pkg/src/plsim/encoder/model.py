"""Desk-scale trainable masked-LM encoder.

A compact bidirectional transformer (learned positional embeddings,
pre-norm blocks, no dropout) trained with BERT-style masking over subword
pieces of lexer tokens.  Everything is seeded through explicit generators,
so training twice with the same config yields bit-identical parameters on
the same machine.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as F

from ..corpus import LanguageCorpus, Partition
from ..lexer import LexerSpec, tokenize
from .bpe import SubwordVocab, train_bpe
from .sampling import OccurrenceSample


class EncoderError(ValueError):
    pass


@dataclass
class EncoderConfig:
    dim: int = 64
    layers: int = 2
    heads: int = 4
    left_context: int = 64
    right_context: int = 64
    subword_vocab_size: int = 4096
    mask_fraction: float = 0.15
    steps: int = 2000
    seed: int = 0
    # implementation knobs, not part of the paper-level setup
    batch_size: int = 8
    seq_len: int = 128
    max_positions: int = 512
    learning_rate: float = 3e-4

    def __post_init__(self):
        if self.dim <= 0 or self.dim % self.heads != 0:
            raise EncoderError("dim must be positive and divisible by heads")
        if self.left_context < 0 or self.right_context < 0:
            raise EncoderError("context widths must be >= 0")
        if not (0.0 < self.mask_fraction < 1.0):
            raise EncoderError("mask_fraction must be in (0, 1)")
        if self.steps < 1:
            raise EncoderError("steps must be >= 1")


class TransformerBlock(nn.Module):
    def __init__(self, dim: int, heads: int):
        super().__init__()
        self.heads = heads
        self.head_dim = dim // heads
        self.norm1 = nn.LayerNorm(dim)
        self.qkv = nn.Linear(dim, 3 * dim)
        self.proj = nn.Linear(dim, dim)
        self.norm2 = nn.LayerNorm(dim)
        self.ff = nn.Sequential(nn.Linear(dim, 4 * dim), nn.GELU(), nn.Linear(4 * dim, dim))

    def forward(self, x, pad_mask):
        b, t, d = x.shape
        h = self.norm1(x)
        q, k, v = self.qkv(h).chunk(3, dim=-1)
        q = q.view(b, t, self.heads, self.head_dim).transpose(1, 2)
        k = k.view(b, t, self.heads, self.head_dim).transpose(1, 2)
        v = v.view(b, t, self.heads, self.head_dim).transpose(1, 2)
        scores = q @ k.transpose(-2, -1) / math.sqrt(self.head_dim)
        if pad_mask is not None:
            scores = scores.masked_fill(pad_mask[:, None, None, :], float("-inf"))
        attn = torch.softmax(scores, dim=-1)
        h = (attn @ v).transpose(1, 2).reshape(b, t, d)
        x = x + self.proj(h)
        x = x + self.ff(self.norm2(x))
        return x


class MaskedLMModel(nn.Module):
    def __init__(self, vocab_size: int, config: EncoderConfig):
        super().__init__()
        self.config = config
        self.token_emb = nn.Embedding(vocab_size, config.dim)
        self.pos_emb = nn.Embedding(config.max_positions, config.dim)
        self.blocks = nn.ModuleList(
            TransformerBlock(config.dim, config.heads) for _ in range(config.layers)
        )
        self.final_norm = nn.LayerNorm(config.dim)
        self.lm_head = nn.Linear(config.dim, vocab_size)

    def hidden_states(self, ids, pad_mask=None):
        """Per-layer hidden states; entry 0 is the embedding sum, the last
        entry is the final-norm output."""
        positions = torch.arange(ids.shape[1], device=ids.device)
        x = self.token_emb(ids) + self.pos_emb(positions)[None, :, :]
        states = [x]
        for block in self.blocks:
            x = block(x, pad_mask)
            states.append(x)
        states.append(self.final_norm(x))
        return states

    def forward(self, ids, pad_mask=None):
        return self.lm_head(self.hidden_states(ids, pad_mask)[-1])


def mlm_loss(model: MaskedLMModel, ids: torch.Tensor, masked_ids: torch.Tensor,
             target_positions: torch.Tensor) -> torch.Tensor:
    """Cross-entropy at the masked positions only."""
    logits = model(masked_ids)
    flat = logits.view(-1, logits.shape[-1])
    targets = ids.view(-1)
    losses = F.cross_entropy(flat, targets, reduction="none")
    return (losses * target_positions.view(-1).float()).sum() / target_positions.sum()


class Encoder:
    """Trained model plus its subword vocabulary and provenance tag."""

    def __init__(self, model: MaskedLMModel, subwords: SubwordVocab,
                 config: EncoderConfig, tag: str,
                 initial_loss: float | None = None, final_loss: float | None = None):
        self.model = model
        self.subwords = subwords
        self.config = config
        self.tag = tag
        self.initial_loss = initial_loss
        self.final_loss = final_loss

    @property
    def dim(self) -> int:
        return self.config.dim

    def embed_window(self, context: list[str] | tuple[str, ...], target_offset: int,
                     layer: int | str = "last", pooling: str = "mean",
                     masked_target: bool = False,
                     diagnostics: list[str] | None = None) -> np.ndarray:
        """Contextual vector for the target lexeme of one occurrence window.

        One unmasked forward pass (optionally masking the target); the
        result is the chosen layer's hidden state at the target position,
        pooled across the lexeme's subword pieces.
        """
        piece_ids: list[int] = []
        spans: list[tuple[int, int]] = []
        for lexeme in context:
            ids = self.subwords.encode(lexeme)
            spans.append((len(piece_ids), len(piece_ids) + len(ids)))
            piece_ids.extend(ids)
        t_start, t_end = spans[target_offset]
        if t_end == t_start:
            raise EncoderError(f"target lexeme {context[target_offset]!r} maps to no pieces")

        cap = self.config.max_positions
        if len(piece_ids) > cap:
            # center-truncate around the target span
            mid = (t_start + t_end) // 2
            lo = max(0, min(mid - cap // 2, len(piece_ids) - cap))
            piece_ids = piece_ids[lo : lo + cap]
            t_start, t_end = t_start - lo, t_end - lo
            if diagnostics is not None:
                diagnostics.append(
                    f"window of {len(spans)} lexemes exceeded {cap} pieces; center-truncated"
                )
        if masked_target:
            piece_ids = list(piece_ids)
            for i in range(t_start, t_end):
                piece_ids[i] = self.subwords.mask_id

        self.model.eval()
        with torch.no_grad():
            ids = torch.tensor([piece_ids], dtype=torch.long)
            states = self.model.hidden_states(ids)
        if layer == "last":
            state = states[-1]
        else:
            state = states[int(layer)]
        target = state[0, t_start:t_end, :]
        if pooling == "mean":
            vec = target.mean(dim=0)
        elif pooling == "first":
            vec = target[0]
        else:
            raise EncoderError(f"unknown pooling {pooling!r}")
        return vec.numpy().astype(np.float32)


def embed_occurrence(encoder: Encoder, sample: OccurrenceSample,
                     layer: int | str = "last", pooling: str = "mean",
                     masked_target: bool = False,
                     diagnostics: list[str] | None = None) -> np.ndarray:
    return encoder.embed_window(
        sample.context, sample.target_offset,
        layer=layer, pooling=pooling, masked_target=masked_target,
        diagnostics=diagnostics,
    )


def _file_piece_streams(corpus: LanguageCorpus, spec: LexerSpec,
                        subwords: SubwordVocab) -> list[list[int]]:
    streams = []
    for f in corpus.partition_files(Partition.TRAIN):
        ids: list[int] = []
        for tok in tokenize(f.text, spec):
            ids.extend(subwords.encode(tok.lexeme))
        if ids:
            streams.append(ids)
    return streams


def _make_batch(streams, config, subwords, gen: torch.Generator):
    """One deterministic MLM batch: ids, masked ids, loss-position mask."""
    bsz, seq = config.batch_size, config.seq_len
    ids = torch.full((bsz, seq), subwords.pad_id, dtype=torch.long)
    for b in range(bsz):
        fi = int(torch.randint(len(streams), (1,), generator=gen))
        stream = streams[fi]
        if len(stream) <= seq:
            chunk = stream
        else:
            start = int(torch.randint(len(stream) - seq, (1,), generator=gen))
            chunk = stream[start : start + seq]
        ids[b, : len(chunk)] = torch.tensor(chunk, dtype=torch.long)
    non_pad = ids != subwords.pad_id
    rand = torch.rand(ids.shape, generator=gen)
    rand[~non_pad] = 2.0
    n_mask = max(1, int(round(config.mask_fraction * int(non_pad.sum()))))
    threshold = torch.topk(rand.view(-1), n_mask, largest=False).values.max()
    target_positions = (rand <= threshold) & non_pad

    masked_ids = ids.clone()
    action = torch.rand(ids.shape, generator=gen)
    mask_here = target_positions & (action < 0.8)
    random_here = target_positions & (action >= 0.8) & (action < 0.9)
    masked_ids[mask_here] = subwords.mask_id
    if int(random_here.sum()) > 0:
        masked_ids[random_here] = torch.randint(
            len(subwords), (int(random_here.sum()),), generator=gen
        )
    return ids, masked_ids, target_positions


def train_encoder(train_corpus: LanguageCorpus, spec: LexerSpec,
                  config: EncoderConfig, init_from: "Encoder | None" = None,
                  subwords: SubwordVocab | None = None,
                  tag: str | None = None) -> Encoder:
    """Masked-LM training on the train partition, deterministic under seed.

    init_from starts from an existing encoder's parameters and subword
    vocabulary (the finetune setting); otherwise weights are freshly
    initialized and a BPE vocabulary is fit on the train partition.
    """
    train_files = train_corpus.partition_files(Partition.TRAIN)
    if not train_files:
        raise EncoderError("train partition is empty")

    if init_from is not None:
        subwords = init_from.subwords
    elif subwords is None:
        lexeme_counts: Counter[str] = Counter()
        for f in train_files:
            lexeme_counts.update(t.lexeme for t in tokenize(f.text, spec))
        subwords = train_bpe(lexeme_counts, config.subword_vocab_size)

    init_gen = torch.Generator().manual_seed(config.seed)
    with torch.random.fork_rng():
        torch.manual_seed(int(torch.randint(2**31, (1,), generator=init_gen)))
        model = MaskedLMModel(len(subwords), config)
    if init_from is not None:
        model.load_state_dict(init_from.model.state_dict())

    streams = _file_piece_streams(train_corpus, spec, subwords)
    if not streams:
        raise EncoderError("train partition produced no token pieces")
    total_pieces = sum(len(s) for s in streams)
    if total_pieces < config.batch_size:
        raise EncoderError(
            f"train corpus too small: {total_pieces} pieces < one batch"
        )

    # fixed evaluation batch so initial/final losses are comparable
    eval_gen = torch.Generator().manual_seed(config.seed + 2)
    eval_batch = _make_batch(streams, config, subwords, eval_gen)

    def eval_loss() -> float:
        model.eval()
        with torch.no_grad():
            loss = mlm_loss(model, *eval_batch)
        model.train()
        return float(loss)

    data_gen = torch.Generator().manual_seed(config.seed + 1)
    optimizer = torch.optim.Adam(model.parameters(), lr=config.learning_rate)
    initial_loss = eval_loss()
    model.train()
    for step in range(config.steps):
        ids, masked_ids, target_positions = _make_batch(streams, config, subwords, data_gen)
        loss = mlm_loss(model, ids, masked_ids, target_positions)
        optimizer.zero_grad()
        loss.backward()
        optimizer.step()
    final_loss = eval_loss()

    if tag is None:
        tag = f"{train_corpus.language}-mlm-d{config.dim}x{config.layers}-s{config.seed}"
    return Encoder(model, subwords, config, tag, initial_loss, final_loss)


def save_encoder(encoder: Encoder, out_dir: str | Path) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = {"tag": encoder.tag, "config": asdict(encoder.config),
            "initial_loss": encoder.initial_loss, "final_loss": encoder.final_loss}
    (out / "encoder.json").write_text(json.dumps(meta, indent=2), encoding="utf-8")
    encoder.subwords.save(out / "subwords.json")
    torch.save(encoder.model.state_dict(), out / "weights.pt")


def load_encoder(enc_dir: str | Path) -> Encoder:
    enc_dir = Path(enc_dir)
    meta = json.loads((enc_dir / "encoder.json").read_text(encoding="utf-8"))
    config = EncoderConfig(**meta["config"])
    subwords = SubwordVocab.load(enc_dir / "subwords.json")
    model = MaskedLMModel(len(subwords), config)
    model.load_state_dict(torch.load(enc_dir / "weights.pt", weights_only=True))
    model.eval()
    return Encoder(model, subwords, config, meta["tag"],
                   meta.get("initial_loss"), meta.get("final_loss"))


def gradient_check(model: MaskedLMModel, ids, masked_ids, target_positions,
                   coords_per_param: int = 3, epsilon: float = 1e-4,
                   seed: int = 0) -> float:
    """Max relative error between autograd and central finite differences.

    Runs in float64; a few coordinates are probed in every parameter
    tensor.  Coordinates whose finite-difference estimate is numerically
    tiny are skipped (the relative error is meaningless there).
    """
    model = model.double()
    loss = mlm_loss(model, ids, masked_ids, target_positions)
    grads = torch.autograd.grad(loss, list(model.parameters()))
    rng = np.random.default_rng(seed)
    worst = 0.0
    with torch.no_grad():
        for param, grad in zip(model.parameters(), grads):
            flat = param.view(-1)
            gflat = grad.view(-1)
            for idx in rng.choice(flat.numel(), size=min(coords_per_param, flat.numel()),
                                  replace=False):
                idx = int(idx)
                orig = float(flat[idx])
                flat[idx] = orig + epsilon
                hi = float(mlm_loss(model, ids, masked_ids, target_positions))
                flat[idx] = orig - epsilon
                lo = float(mlm_loss(model, ids, masked_ids, target_positions))
                flat[idx] = orig
                fd = (hi - lo) / (2 * epsilon)
                if abs(fd) < 1e-7 and abs(float(gflat[idx])) < 1e-7:
                    continue
                rel = abs(float(gflat[idx]) - fd) / max(abs(fd), 1e-10)
                worst = max(worst, rel)
    return worst
