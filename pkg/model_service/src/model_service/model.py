"""Transformer encoder classifier.

The tiny configuration (reduced width and depth, random init) is the
CI-scale default.  A full pretrained checkpoint can be swapped in through
:func:`load_pretrained_bundle`, which keeps the same (tokenizer, model)
surface; it needs the optional ``transformers`` dependency and a local
checkpoint directory.
"""

from __future__ import annotations

from dataclasses import dataclass

import torch
from torch import nn

from .tokenizer import WordTokenizer


@dataclass
class TinyModelConfig:
    d_model: int = 64
    n_heads: int = 2
    n_layers: int = 2
    d_ff: int = 128
    dropout: float = 0.1
    max_vocab: int = 8000

    def to_dict(self) -> dict:
        return {"d_model": self.d_model, "n_heads": self.n_heads,
                "n_layers": self.n_layers, "d_ff": self.d_ff,
                "dropout": self.dropout, "max_vocab": self.max_vocab}

    @classmethod
    def from_dict(cls, doc: dict) -> "TinyModelConfig":
        return cls(**doc)


class TinyTransformerClassifier(nn.Module):
    def __init__(self, vocab_size: int, block_size: int, cfg: TinyModelConfig):
        super().__init__()
        self.block_size = block_size
        self.embed = nn.Embedding(vocab_size, cfg.d_model, padding_idx=0)
        self.pos = nn.Embedding(block_size, cfg.d_model)
        layer = nn.TransformerEncoderLayer(
            d_model=cfg.d_model, nhead=cfg.n_heads,
            dim_feedforward=cfg.d_ff, dropout=cfg.dropout,
            batch_first=True)
        self.encoder = nn.TransformerEncoder(
            layer, cfg.n_layers, enable_nested_tensor=False)
        self.head = nn.Linear(cfg.d_model, 2)

    def forward(self, ids: torch.Tensor, mask: torch.Tensor) -> torch.Tensor:
        length = ids.shape[1]
        positions = torch.arange(length, device=ids.device)
        x = self.embed(ids) + self.pos(positions)[None, :, :]
        padding = mask == 0
        # fully padded rows would NaN through attention; give them one slot
        all_pad = padding.all(dim=1)
        if bool(all_pad.any()):
            padding = padding.clone()
            padding[all_pad, 0] = False
        h = self.encoder(x, src_key_padding_mask=padding)
        weights = (~padding).float()
        pooled = (h * weights.unsqueeze(-1)).sum(1) / \
            weights.sum(1).clamp(min=1.0).unsqueeze(-1)
        return self.head(pooled)


class TinyBundle:
    """(tokenizer, model) pair with a uniform scoring surface."""

    def __init__(self, tokenizer: WordTokenizer,
                 model: TinyTransformerClassifier, block_size: int):
        self.tokenizer = tokenizer
        self.model = model
        self.block_size = block_size

    @torch.no_grad()
    def score_texts(self, texts: list[str]) -> list[float]:
        self.model.eval()
        ids, mask = self.tokenizer.encode_batch(texts, self.block_size)
        probs = torch.softmax(self.model(ids, mask), dim=1)[:, 1]
        return [float(p) for p in probs]

    def logits(self, texts: list[str]) -> torch.Tensor:
        ids, mask = self.tokenizer.encode_batch(texts, self.block_size)
        return self.model(ids, mask)


def build_tiny_bundle(train_texts: list[str], block_size: int,
                      cfg: TinyModelConfig | None = None,
                      seed: int = 0) -> TinyBundle:
    cfg = cfg or TinyModelConfig()
    tokenizer = WordTokenizer.build(train_texts, max_vocab=cfg.max_vocab)
    torch.manual_seed(seed)
    model = TinyTransformerClassifier(tokenizer.vocab_size, block_size, cfg)
    return TinyBundle(tokenizer, model, block_size)


def load_pretrained_bundle(checkpoint_dir: str, block_size: int):
    """Wrap a local pretrained sequence classifier (optional 'full' mode).

    Not exercised in CI: it requires the transformers extra and a local
    checkpoint directory holding both tokenizer and model weights.
    """
    try:
        from transformers import AutoModelForSequenceClassification, AutoTokenizer
    except ImportError as exc:  # pragma: no cover
        raise RuntimeError(
            "pretrained mode needs the 'full' extra (pip install "
            "model-service[full])") from exc

    hf_tokenizer = AutoTokenizer.from_pretrained(checkpoint_dir)
    hf_model = AutoModelForSequenceClassification.from_pretrained(
        checkpoint_dir, num_labels=2)

    class PretrainedBundle:  # pragma: no cover - needs a local checkpoint
        def __init__(self):
            self.block_size = block_size
            self.model = hf_model

        @torch.no_grad()
        def score_texts(self, texts: list[str]) -> list[float]:
            hf_model.eval()
            enc = hf_tokenizer(texts, truncation=True, max_length=block_size,
                               padding=True, return_tensors="pt")
            probs = torch.softmax(hf_model(**enc).logits, dim=1)[:, 1]
            return [float(p) for p in probs]

        def logits(self, texts: list[str]) -> torch.Tensor:
            enc = hf_tokenizer(texts, truncation=True, max_length=block_size,
                               padding=True, return_tensors="pt")
            return hf_model(**enc).logits

    return PretrainedBundle()
