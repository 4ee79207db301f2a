from __future__ import annotations

import random
from pathlib import Path

import pytest

from model_service import LabeledCorpus, TinyModelConfig, TrainConfig

# shared with the pipeline's own protocol tests
PROTOCOL_CASES = Path(__file__).resolve().parents[2] / \
    "tests" / "fixtures" / "protocol" / "score_protocol_cases.json"

FILLER_TOKENS = ["$a", "$b", "$req", "foo", "bar", "count", "render",
                 "db", "user", "item", "key", "value", "query", "row"]


def synth_separable_corpus(rng: random.Random, n: int, marker: str = "eval"):
    """Marker token <=> vulnerable; everything else is shared filler."""
    texts, labels = [], []
    for _ in range(n):
        label = 1 if rng.random() < 0.5 else 0
        toks = [rng.choice(FILLER_TOKENS) for _ in range(rng.randint(8, 25))]
        if label:
            toks.insert(rng.randrange(len(toks) + 1), marker)
        texts.append("function f() { " + " ".join(toks) + " ; }")
        labels.append(label)
    return LabeledCorpus(texts, labels)


def fast_config(**overrides) -> TrainConfig:
    """Small config so unit tests stay quick; acceptance uses the preset."""
    overrides.setdefault("block_size", 64)
    overrides.setdefault("max_epochs", overrides.pop("epochs", 3))
    overrides.setdefault("model", TinyModelConfig(
        d_model=32, n_heads=2, n_layers=1, d_ff=64))
    return TrainConfig.tiny_preset(**overrides)


@pytest.fixture
def small_split():
    rng = random.Random(7)
    corpus = synth_separable_corpus(rng, 160)
    train = LabeledCorpus(corpus.texts[:120], corpus.labels[:120])
    val = LabeledCorpus(corpus.texts[120:], corpus.labels[120:])
    return train, val
