"""Fine-tune a transformer classifier on vulnerability datasets and serve
batch scores over the pipeline's /score protocol."""

from .data import LabeledCorpus, load_class_weights, load_csv_corpus, load_jsonl_corpus
from .model import TinyBundle, TinyModelConfig, build_tiny_bundle
from .server import make_server, serve
from .tokenizer import WordTokenizer
from .train import Checkpoint, TrainConfig, early_stop_epoch, fine_tune

__version__ = "0.1.0"

__all__ = [
    "Checkpoint", "LabeledCorpus", "TinyBundle", "TinyModelConfig",
    "TrainConfig", "WordTokenizer", "build_tiny_bundle", "early_stop_epoch",
    "fine_tune", "load_class_weights", "load_csv_corpus",
    "load_jsonl_corpus", "make_server", "serve",
]
