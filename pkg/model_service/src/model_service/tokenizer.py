"""Word-level tokenizer with a corpus-built vocabulary.

Tiny-model training cannot assume a downloadable pretrained tokenizer, so
this one is built from the training corpus: identifiers (with an optional
``$`` sigil), number runs, and single punctuation characters.  Ids 0 and 1
are reserved for padding and unknown tokens.
"""

from __future__ import annotations

import re
from collections import Counter

import torch

_TOKEN_RE = re.compile(r"\$?[A-Za-z_][A-Za-z0-9_]*|\d+|[^\sA-Za-z0-9_]")

PAD_ID = 0
UNK_ID = 1


class WordTokenizer:
    def __init__(self, vocab: dict[str, int]):
        self.vocab = vocab

    @property
    def vocab_size(self) -> int:
        return len(self.vocab) + 2  # pad + unk

    @staticmethod
    def split(text: str) -> list[str]:
        return _TOKEN_RE.findall(text)

    @classmethod
    def build(cls, texts: list[str], max_vocab: int = 8000) -> "WordTokenizer":
        counts: Counter[str] = Counter()
        for text in texts:
            counts.update(cls.split(text))
        # deterministic: frequency desc, then token asc
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        vocab = {tok: i + 2 for i, (tok, _n) in enumerate(ranked[:max_vocab])}
        return cls(vocab)

    def encode(self, text: str, block_size: int) -> list[int]:
        ids = [self.vocab.get(tok, UNK_ID) for tok in self.split(text)]
        return ids[:block_size]

    def encode_batch(
        self, texts: list[str], block_size: int
    ) -> tuple[torch.Tensor, torch.Tensor]:
        """Returns (ids, mask), padded to the longest sequence in the batch."""
        encoded = [self.encode(t, block_size) for t in texts]
        width = max((len(e) for e in encoded), default=1) or 1
        ids = torch.full((len(texts), width), PAD_ID, dtype=torch.long)
        mask = torch.zeros((len(texts), width), dtype=torch.float)
        for row, seq in enumerate(encoded):
            if seq:
                ids[row, :len(seq)] = torch.tensor(seq, dtype=torch.long)
                mask[row, :len(seq)] = 1.0
        return ids, mask

    def to_dict(self) -> dict:
        return {"vocab": self.vocab}

    @classmethod
    def from_dict(cls, doc: dict) -> "WordTokenizer":
        return cls({str(k): int(v) for k, v in doc["vocab"].items()})
