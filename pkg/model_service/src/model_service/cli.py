"""Command line: train a checkpoint, then serve it.

    model-service train --train train.jsonl --val val.jsonl \
        --out checkpoint.pt [--weights weights.json] [--tiny] [--seed N]
    model-service serve --checkpoint checkpoint.pt [--host H] [--port P]

Training corpora are annotated-functions JSONL files (body + vulnerable);
`--csv/--bodies` joins a dataset CSV against a functions JSONL instead.
WLF class weights come from the balancing step's weights JSON.
"""

from __future__ import annotations

import argparse
import sys

from .data import load_class_weights, load_csv_corpus, load_jsonl_corpus
from .server import serve
from .train import Checkpoint, TrainConfig, fine_tune, history_to_json


def _load_corpus(args, which: str):
    jsonl = getattr(args, which)
    if jsonl:
        return load_jsonl_corpus(jsonl)
    csv_path = getattr(args, f"{which}_csv")
    if csv_path and args.bodies:
        return load_csv_corpus(csv_path, args.bodies)
    raise SystemExit(f"need --{which} or (--{which}-csv and --bodies)")


def _cmd_train(args) -> int:
    train_corpus = _load_corpus(args, "train")
    val_corpus = _load_corpus(args, "val")
    weights = load_class_weights(args.weights) if args.weights else None
    base = TrainConfig.tiny_preset if args.tiny else TrainConfig
    cfg = base(
        block_size=args.block_size,
        batch_size=args.batch_size,
        max_epochs=args.max_epochs,
        class_weights=weights,
        seed=args.seed,
        **({"learning_rate": args.learning_rate} if args.learning_rate else {}),
    )
    checkpoint = fine_tune(train_corpus, val_corpus, cfg)
    checkpoint.save(args.out)
    sys.stdout.write(history_to_json(checkpoint))
    print(f"saved epoch {checkpoint.selected_epoch} "
          f"(val F1 {max(checkpoint.f1_history):.4f}) -> {args.out}")
    return 0


def _cmd_serve(args) -> int:
    checkpoint = Checkpoint.load(args.checkpoint)
    serve(checkpoint.bundle, host=args.host, port=args.port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="model-service", description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("train", help="fine-tune a classifier checkpoint")
    p.add_argument("--train", help="training JSONL (body + vulnerable)")
    p.add_argument("--train-csv", help="training dataset CSV (with --bodies)")
    p.add_argument("--val", help="validation JSONL")
    p.add_argument("--val-csv", help="validation dataset CSV (with --bodies)")
    p.add_argument("--bodies", help="functions JSONL with bodies for CSV joins")
    p.add_argument("--weights", help="class-weights JSON (WLF)")
    p.add_argument("--out", required=True, help="checkpoint output path")
    p.add_argument("--tiny", action="store_true",
                   help="tiny preset: reduced model, CI-scale learning rate")
    p.add_argument("--block-size", type=int, default=512)
    p.add_argument("--batch-size", type=int, default=16)
    p.add_argument("--learning-rate", type=float)
    p.add_argument("--max-epochs", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_train)

    p = sub.add_parser("serve", help="serve /score from a checkpoint")
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8900)
    p.set_defaults(func=_cmd_serve)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
