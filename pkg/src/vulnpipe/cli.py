"""Command-line entry point.

Subcommands mirror the pipeline stages::

    vulnpipe extract  --root repo/ --out functions.jsonl
    vulnpipe dedup    --in functions.jsonl --out kept.jsonl --report dedup.json
    vulnpipe annotate --functions kept.jsonl --report-a semgrep.json \
                      --report-b sonar.json --out annotated.jsonl
    vulnpipe dataset build    --annotated annotated.jsonl --out data.csv
    vulnpipe dataset validate --csv data.csv
    vulnpipe split    --csv data.csv --seed 0 --out-manifest split.json --out-dir splits/
    vulnpipe balance  --csv splits/train.csv --strategy URSC --seed 0 --out train_b.csv
    vulnpipe eval     --cells cells.json --out metrics.json --table
    vulnpipe review   --repo repo/ --diff pr.diff --scorer stub \
                      --out-json review.json --out-md review.md

Exit codes: 0 success, 2 review found flagged functions, 64 usage error,
65 data error, 74 I/O error.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import sys
from pathlib import Path

from . import annotation, dataset, dedup, extraction, metrics, review, scoring
from .config import PipelineConfig, load_config
from .errors import ConfigError, DataError, ScoringError, VulnpipeError
from .io_utils import canonical_json, read_jsonl, write_json, write_jsonl

EXIT_OK = 0
EXIT_FLAGGED = 2
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_IO = 74


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 64, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_spans(path: str) -> list[extraction.FunctionSpan]:
    return [extraction.FunctionSpan.from_dict(d) for d in read_jsonl(path)]


def _config_from_args(args) -> PipelineConfig:
    if getattr(args, "config", None):
        return load_config(args.config)
    return PipelineConfig()


def _cmd_extract(args) -> int:
    cfg = _config_from_args(args)
    warnings: list[extraction.WarningRecord] = []
    files = extraction.enumerate_files(
        args.root, cfg.extraction.extensions,
        ignore_globs=cfg.extraction.ignore_globs,
        repo_url=args.repo_url, commit_id=args.commit,
        warnings=warnings)

    if args.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=args.jobs) as pool:
            span_lists = list(pool.map(_extract_one, ((f, cfg.extraction) for f in files)))
    else:
        span_lists = [extraction.extract_functions(f, cfg.extraction, errors=warnings)
                      for f in files]
    spans = [span for spans_ in span_lists for span in spans_]

    write_jsonl(args.out, (s.to_dict() for s in spans))
    for w in warnings:
        print(f"warning: {w.path}: {w.reason}", file=sys.stderr)
    print(f"extracted {len(spans)} functions from {len(files)} files -> {args.out}")
    return EXIT_OK


def _extract_one(item) -> list[extraction.FunctionSpan]:
    source, ext_cfg = item
    return extraction.extract_functions(source, ext_cfg)


def _cmd_dedup(args) -> int:
    cfg = _config_from_args(args)
    ded = dedup.DedupConfig(
        window_size=args.window or cfg.dedup.window_size,
        jaccard_threshold=args.threshold if args.threshold is not None
        else cfg.dedup.jaccard_threshold)
    corpus = _load_spans(getattr(args, "in"))
    report = dedup.dedup_corpus(corpus, ded)
    write_jsonl(args.out, (s.to_dict() for s in report.kept))
    if args.report:
        doc = {"window_size": ded.window_size,
               "jaccard_threshold": ded.jaccard_threshold}
        doc.update(report.to_dict())
        write_json(args.report, doc)
    print(f"kept {len(report.kept)}, removed {len(report.removed)} "
          f"({report.pair_count_examined} candidate pairs) -> {args.out}")
    return EXIT_OK


def _cmd_annotate(args) -> int:
    cfg = _config_from_args(args)
    functions = _load_spans(args.functions)
    findings: list[annotation.Finding] = []
    for tool, report_path in ((annotation.Tool.ANALYZER_A, args.report_a),
                              (annotation.Tool.ANALYZER_B, args.report_b)):
        if report_path:
            findings.extend(annotation.parse_report(
                tool, Path(report_path).read_bytes(),
                strict=cfg.annotation_strict, strip_prefix=cfg.strip_prefix))
    orphans: list[annotation.Finding] = []
    annotated = annotation.fuse_annotations(
        functions, findings, cfg.severity_filter,
        strip_prefix=cfg.strip_prefix, orphans=orphans)
    write_jsonl(args.out, (a.to_dict() for a in annotated))
    if args.orphans:
        write_json(args.orphans, [o.to_dict() for o in orphans])
    n_vuln = sum(1 for a in annotated if a.vulnerable)
    print(f"annotated {len(annotated)} functions ({n_vuln} vulnerable, "
          f"{len(orphans)} orphan findings) -> {args.out}")
    return EXIT_OK


def _cmd_dataset_build(args) -> int:
    rows = list(read_jsonl(args.annotated))
    annotated = []
    for row in rows:
        span = extraction.FunctionSpan.from_dict(row)
        annotated.append(annotation.AnnotatedFunction(
            span=span, counts=row.get("counts", {}),
            vulnerable=bool(row.get("vulnerable", False))))
    records = dataset.from_annotated(annotated)
    Path(args.out).write_bytes(dataset.write_csv(records))
    print(f"wrote {len(records)} records -> {args.out}")
    return EXIT_OK


def _cmd_dataset_validate(args) -> int:
    records = dataset.read_csv(Path(args.csv).read_bytes())
    report = dataset.dataset_quality_report(records)
    if args.out:
        write_json(args.out, report.to_dict())
    for check in report.checks:
        status = "pass" if check.passed else "FAIL"
        suffix = f" ({len(check.offenders)} offender(s))" if check.offenders else ""
        print(f"{check.attribute}: {status}{suffix}")
    if not report.passed:
        raise DataError("dataset quality checks failed")
    return EXIT_OK


def _cmd_split(args) -> int:
    cfg = _config_from_args(args)
    records = dataset.read_csv(Path(args.csv).read_bytes())
    seed = args.seed if args.seed is not None else cfg.seed
    ratios = tuple(float(x) for x in args.ratios.split(",")) if args.ratios else cfg.ratios
    assignment = dataset.split(records, ratios, seed)  # type: ignore[arg-type]
    write_json(args.out_manifest, assignment.to_dict())
    if args.out_dir:
        out_dir = Path(args.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        for part in dataset.Split:
            part_records = assignment.records_for(records, part)
            (out_dir / f"{part.value}.csv").write_bytes(
                dataset.write_csv(part_records))
    sizes = {part.value: sum(1 for v in assignment.assignment.values() if v is part)
             for part in dataset.Split}
    print(f"split {len(records)} records (seed {seed}): {sizes} -> {args.out_manifest}")
    return EXIT_OK


def _cmd_balance(args) -> int:
    cfg = _config_from_args(args)
    records = dataset.read_csv(Path(args.csv).read_bytes())
    strategy = dataset.BalanceStrategy.parse(
        args.strategy or cfg.strategy,
        args.global_min if args.global_min is not None else cfg.usc_global_min)
    seed = args.seed if args.seed is not None else cfg.seed
    result = dataset.balance(records, strategy, seed)
    if isinstance(result, dataset.ClassWeights):
        if not args.out_weights:
            raise DataError("WLF produces weights; pass --out-weights")
        doc = {"strategy": strategy.kind.value, "seed": seed}
        doc.update(result.to_dict())
        write_json(args.out_weights, doc)
        print(f"weights: vulnerable={result.weight_vulnerable:.6f} "
              f"non-vulnerable={result.weight_nonvulnerable:.6f} -> {args.out_weights}")
    else:
        if not args.out:
            raise DataError(f"{strategy.kind.value} resamples records; pass --out")
        Path(args.out).write_bytes(dataset.write_csv(result))
        if args.out_manifest:
            write_json(args.out_manifest, {
                "strategy": strategy.kind.value,
                "seed": seed,
                "global_min": strategy.global_min,
                "selected": sorted(list(r.key) for r in result),
            })
        print(f"balanced {len(records)} -> {len(result)} records -> {args.out}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    doc = json.loads(Path(args.cells).read_text(encoding="utf-8"))
    cells = [(c["trained_on"], c["tested_on"], c["strategy"],
              c["labels"], c["predictions"]) for c in doc]
    reports = metrics.cross_domain_matrix(cells)
    if args.out:
        write_json(args.out, metrics.matrix_to_dict(reports))
    if args.table or not args.out:
        sys.stdout.write(metrics.matrix_to_table(reports))
    return EXIT_OK


def _cmd_review(args) -> int:
    cfg = _config_from_args(args)
    diff_text = (sys.stdin.read() if args.diff == "-"
                 else Path(args.diff).read_text(encoding="utf-8"))
    scorer = scoring.scorer_from_spec(
        args.scorer or cfg.scorer_url, markers=cfg.markers,
        timeout=cfg.timeout, bearer_token=args.bearer_token)
    threshold = args.threshold if args.threshold is not None else cfg.threshold
    warnings: list[extraction.WarningRecord] = []
    findings = review.run_review(
        args.repo, diff_text, scorer, threshold, cfg.extraction,
        warnings=warnings)
    payload, comment = review.render_review(findings)
    if args.out_json:
        Path(args.out_json).write_text(payload, encoding="utf-8")
    if args.out_md:
        Path(args.out_md).write_text(comment, encoding="utf-8")
    for w in warnings:
        print(f"warning: {w.path}: {w.reason}", file=sys.stderr)
    flagged = sum(1 for f in findings if f.flagged)
    print(f"reviewed {len(findings)} changed function(s), {flagged} flagged")
    return EXIT_FLAGGED if flagged else EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="vulnpipe", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract function spans from a checkout")
    p.add_argument("--root", required=True, help="repository checkout directory")
    p.add_argument("--out", required=True, help="output functions JSONL")
    p.add_argument("--repo-url", default="", help="provenance URL stored per span")
    p.add_argument("--commit", default="", help="provenance commit id")
    p.add_argument("--config", help="pipeline config file")
    p.add_argument("--jobs", type=int, default=1, help="parallel extraction workers")
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("dedup", help="remove duplicate functions corpus-wide")
    p.add_argument("--in", required=True, help="input functions JSONL")
    p.add_argument("--out", required=True, help="output kept-functions JSONL")
    p.add_argument("--report", help="output dedup report JSON")
    p.add_argument("--window", type=int, help="window size override")
    p.add_argument("--threshold", type=float, help="jaccard threshold override")
    p.add_argument("--config", help="pipeline config file")
    p.set_defaults(func=_cmd_dedup)

    p = sub.add_parser("annotate", help="parse analyzer reports and label functions")
    p.add_argument("--functions", required=True, help="deduplicated functions JSONL")
    p.add_argument("--report-a", help="semgrep-style report JSON")
    p.add_argument("--report-b", help="sonar-style report JSON")
    p.add_argument("--out", required=True, help="annotated functions JSONL")
    p.add_argument("--orphans", help="output JSON for findings matching no function")
    p.add_argument("--config", help="pipeline config file")
    p.set_defaults(func=_cmd_annotate)

    p = sub.add_parser("dataset", help="build or validate the CSV dataset")
    dsub = p.add_subparsers(dest="dataset_command", required=True)
    b = dsub.add_parser("build", help="annotated JSONL -> CSV")
    b.add_argument("--annotated", required=True)
    b.add_argument("--out", required=True)
    b.set_defaults(func=_cmd_dataset_build)
    v = dsub.add_parser("validate", help="run the data-quality report")
    v.add_argument("--csv", required=True)
    v.add_argument("--out", help="write the report as JSON")
    v.set_defaults(func=_cmd_dataset_validate)

    p = sub.add_parser("split", help="seeded train/val/test partition")
    p.add_argument("--csv", required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--ratios", help="e.g. 0.8,0.1,0.1")
    p.add_argument("--out-manifest", required=True)
    p.add_argument("--out-dir", help="also write train/val/test CSVs here")
    p.add_argument("--config", help="pipeline config file")
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("balance", help="apply a balancing strategy to a training CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--strategy", choices=[k.value for k in dataset.BalanceKind])
    p.add_argument("--global-min", type=int, help="USC global class size")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output CSV (NB/USC/URSC)")
    p.add_argument("--out-weights", help="output weights JSON (WLF)")
    p.add_argument("--out-manifest", help="selection manifest JSON (NB/USC/URSC)")
    p.add_argument("--config", help="pipeline config file")
    p.set_defaults(func=_cmd_balance)

    p = sub.add_parser("eval", help="compute the cross-domain metrics matrix")
    p.add_argument("--cells", required=True,
                   help="JSON list of {trained_on, tested_on, strategy, labels, predictions}")
    p.add_argument("--out", help="metrics JSON output")
    p.add_argument("--table", action="store_true", help="print the grouped table")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("review", help="score functions changed by a diff")
    p.add_argument("--repo", required=True, help="source-branch checkout")
    p.add_argument("--diff", required=True, help="unified diff file, or - for stdin")
    p.add_argument("--scorer", help="'stub' or backend base URL "
                                    f"(default: ${scoring.ENV_SCORER_URL} or stub)")
    p.add_argument("--threshold", type=float, help="flagging threshold")
    p.add_argument("--bearer-token", help="Authorization bearer token pass-through")
    p.add_argument("--out-json", help="machine payload output path")
    p.add_argument("--out-md", help="markdown comment output path")
    p.add_argument("--config", help="pipeline config file")
    p.set_defaults(func=_cmd_review)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DataError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ScoringError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except VulnpipeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
