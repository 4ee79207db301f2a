"""Fine-tuning loop with validation-F1 early stopping.

Training runs for at most ``max_epochs`` epochs and stops early once the
best validation F1 has failed to improve by more than ``early_stop_delta``
for ``early_stop_window`` consecutive epochs.  The returned checkpoint is
always the epoch with the highest validation F1.

The defaults (block 512, batch 16, lr 2e-5) target fine-tuning a full
pretrained encoder; the tiny preset raises the learning rate because it
trains a randomly initialized reduced model rather than adapting
pretrained weights.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field
from pathlib import Path

import torch
from torch import nn

from .data import LabeledCorpus
from .model import TinyBundle, TinyModelConfig, TinyTransformerClassifier, build_tiny_bundle
from .tokenizer import WordTokenizer


@dataclass
class TrainConfig:
    block_size: int = 512
    batch_size: int = 16
    learning_rate: float = 2e-5
    max_epochs: int = 10
    early_stop_window: int = 5
    early_stop_delta: float = 0.001
    class_weights: tuple[float, float] | None = None  # (vulnerable, non-vulnerable)
    seed: int = 0
    model: TinyModelConfig = field(default_factory=TinyModelConfig)

    def __post_init__(self) -> None:
        for name in ("block_size", "batch_size", "max_epochs",
                     "early_stop_window"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.learning_rate <= 0 or self.early_stop_delta < 0:
            raise ValueError("learning_rate must be > 0 and delta >= 0")
        if self.class_weights is not None and min(self.class_weights) <= 0:
            raise ValueError("class weights must be positive")

    @classmethod
    def tiny_preset(cls, **overrides) -> "TrainConfig":
        """CI-scale preset: reduced model, higher LR for random init."""
        overrides.setdefault("learning_rate", 1e-3)
        return cls(**overrides)


def early_stop_epoch(f1_history: list[float], window: int = 5,
                     delta: float = 0.001) -> int | None:
    """1-based epoch after which the plateau rule stops training, else None.

    An epoch improves only when its F1 beats the best seen so far by more
    than *delta*; *window* consecutive non-improvements trigger the stop.
    """
    best = None
    stale = 0
    for epoch, f1 in enumerate(f1_history, start=1):
        if best is None:
            best = f1
            continue
        if f1 > best + delta:
            stale = 0
        else:
            stale += 1
            if stale >= window:
                return epoch
        best = max(best, f1)
    return None


def prf_binary(labels: list[int], predictions: list[int]) -> tuple[float, float, float]:
    tp = sum(1 for y, p in zip(labels, predictions) if y == 1 and p == 1)
    fp = sum(1 for y, p in zip(labels, predictions) if y == 0 and p == 1)
    fn = sum(1 for y, p in zip(labels, predictions) if y == 1 and p == 0)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def build_loss(cfg: TrainConfig) -> nn.Module:
    """Cross entropy; with WLF weights the two classes scale the loss.

    Class order is (non-vulnerable=0, vulnerable=1), so the weight tensor is
    [w_nonvulnerable, w_vulnerable].
    """
    if cfg.class_weights is None:
        return nn.CrossEntropyLoss()
    w_pos, w_neg = cfg.class_weights
    return nn.CrossEntropyLoss(weight=torch.tensor([w_neg, w_pos],
                                                   dtype=torch.float))


@dataclass
class Checkpoint:
    bundle: TinyBundle
    f1_history: list[float]
    selected_epoch: int  # 1-based, maximizes validation F1
    config: TrainConfig
    stopped_after: int

    def save(self, path: str | Path) -> None:
        torch.save({
            "state_dict": self.bundle.model.state_dict(),
            "tokenizer": self.bundle.tokenizer.to_dict(),
            "block_size": self.bundle.block_size,
            "model_config": self.config.model.to_dict(),
            "f1_history": self.f1_history,
            "selected_epoch": self.selected_epoch,
            "stopped_after": self.stopped_after,
        }, path)

    @classmethod
    def load(cls, path: str | Path) -> "Checkpoint":
        doc = torch.load(path, map_location="cpu", weights_only=False)
        tokenizer = WordTokenizer.from_dict(doc["tokenizer"])
        model_cfg = TinyModelConfig.from_dict(doc["model_config"])
        model = TinyTransformerClassifier(
            tokenizer.vocab_size, doc["block_size"], model_cfg)
        model.load_state_dict(doc["state_dict"])
        model.eval()
        bundle = TinyBundle(tokenizer, model, doc["block_size"])
        cfg = TrainConfig(block_size=doc["block_size"], model=model_cfg)
        return cls(bundle=bundle, f1_history=list(doc["f1_history"]),
                   selected_epoch=int(doc["selected_epoch"]), config=cfg,
                   stopped_after=int(doc["stopped_after"]))


def _batches(n: int, batch_size: int, generator: torch.Generator):
    order = torch.randperm(n, generator=generator).tolist()
    for start in range(0, n, batch_size):
        yield order[start:start + batch_size]


def evaluate_f1(bundle: TinyBundle, corpus: LabeledCorpus) -> float:
    scores = []
    for start in range(0, len(corpus), 64):
        scores.extend(bundle.score_texts(corpus.texts[start:start + 64]))
    predictions = [1 if s >= 0.5 else 0 for s in scores]
    return prf_binary(corpus.labels, predictions)[2]


def fine_tune(train: LabeledCorpus, val: LabeledCorpus,
              cfg: TrainConfig | None = None) -> Checkpoint:
    """Train on *train*, select the best-validation-F1 epoch.

    The validation corpus keeps its natural distribution; balancing (or the
    WLF weights in *cfg*) applies to training only.
    """
    cfg = cfg or TrainConfig()
    pos, neg = train.class_counts()
    if pos == 0 or neg == 0:
        raise ValueError("training corpus must contain both classes")

    bundle = build_tiny_bundle(train.texts, cfg.block_size, cfg.model, cfg.seed)
    model = bundle.model
    loss_fn = build_loss(cfg)
    optimizer = torch.optim.AdamW(model.parameters(), lr=cfg.learning_rate)
    generator = torch.Generator().manual_seed(cfg.seed)

    f1_history: list[float] = []
    best_f1 = float("-inf")
    best_state: dict | None = None
    best_epoch = 0
    stopped_after = cfg.max_epochs

    labels_tensor = torch.tensor(train.labels, dtype=torch.long)
    for epoch in range(1, cfg.max_epochs + 1):
        model.train()
        for batch in _batches(len(train), cfg.batch_size, generator):
            ids, mask = bundle.tokenizer.encode_batch(
                [train.texts[i] for i in batch], cfg.block_size)
            logits = model(ids, mask)
            loss = loss_fn(logits, labels_tensor[batch])
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()

        f1 = evaluate_f1(bundle, val)
        f1_history.append(f1)
        if f1 > best_f1:
            best_f1 = f1
            best_epoch = epoch
            best_state = copy.deepcopy(model.state_dict())
        if early_stop_epoch(f1_history, cfg.early_stop_window,
                            cfg.early_stop_delta) is not None:
            stopped_after = epoch
            break

    assert best_state is not None
    model.load_state_dict(best_state)
    model.eval()
    return Checkpoint(bundle=bundle, f1_history=f1_history,
                      selected_epoch=best_epoch, config=cfg,
                      stopped_after=stopped_after)


def history_to_json(checkpoint: Checkpoint) -> str:
    return json.dumps({
        "f1_history": checkpoint.f1_history,
        "selected_epoch": checkpoint.selected_epoch,
        "stopped_after": checkpoint.stopped_after,
    }, indent=2, sort_keys=True) + "\n"
