"""Pipeline configuration: an INI-style key-value file, validated on load.

Every key is optional; unknown sections or keys are rejected so typos fail
loudly.  All randomness funnels through the single ``[dataset] seed``.

Example::

    [extraction]
    extensions = php
    ignore = vendor/*, node_modules/*, .git/*
    include_methods = true
    include_anonymous = false
    include_nested = false

    [dedup]
    window_size = 30
    jaccard_threshold = 0.99

    [annotation]
    qualifying_a = Error
    qualifying_b = Major, Critical, Blocker
    strict = false
    strip_prefix =

    [dataset]
    seed = 0
    ratios = 0.8, 0.1, 0.1
    strategy = NB
    usc_global_min = 4934

    [scoring]
    url =
    markers = eval
    batch_size = 64
    timeout = 10.0

    [review]
    threshold = 0.5

``usc_global_min`` defaults to 4934; the right value is a property of the
corpora being compared (the smallest class across all of them), so override
it per corpus.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path

from .annotation import SeverityFilter, Tool
from .dataset import DEFAULT_RATIOS, BalanceKind, BalanceStrategy
from .dedup import DedupConfig
from .errors import ConfigError
from .extraction import ExtractionConfig
from .scoring import DEFAULT_BATCH_SIZE, DEFAULT_MARKERS, DEFAULT_TIMEOUT
from .review import DEFAULT_THRESHOLD

_KNOWN_KEYS = {
    "extraction": {"extensions", "ignore", "include_methods",
                   "include_anonymous", "include_nested"},
    "dedup": {"window_size", "jaccard_threshold"},
    "annotation": {"qualifying_a", "qualifying_b", "strict", "strip_prefix"},
    "dataset": {"seed", "ratios", "strategy", "usc_global_min"},
    "scoring": {"url", "markers", "batch_size", "timeout"},
    "review": {"threshold"},
}


@dataclass
class PipelineConfig:
    extraction: ExtractionConfig = field(default_factory=ExtractionConfig)
    dedup: DedupConfig = field(default_factory=DedupConfig)
    severity_filter: SeverityFilter = field(default_factory=SeverityFilter)
    annotation_strict: bool = False
    strip_prefix: str = ""
    seed: int = 0
    ratios: tuple[float, float, float] = DEFAULT_RATIOS
    strategy: str = "NB"
    usc_global_min: int = 4934
    scorer_url: str | None = None
    markers: tuple[str, ...] = DEFAULT_MARKERS
    batch_size: int = DEFAULT_BATCH_SIZE
    timeout: float = DEFAULT_TIMEOUT
    threshold: float = DEFAULT_THRESHOLD

    def balance_strategy(self) -> BalanceStrategy:
        kind = BalanceKind(self.strategy)
        return BalanceStrategy(
            kind, self.usc_global_min if kind is BalanceKind.USC else None)


def _csv_list(raw: str) -> tuple[str, ...]:
    return tuple(part.strip() for part in raw.split(",") if part.strip())


def _boolean(section: str, key: str, raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"[{section}] {key}: expected a boolean, got {raw!r}")


def load_config(path: str | Path) -> PipelineConfig:
    parser = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config {path}: {exc}")

    for section in parser.sections():
        if section not in _KNOWN_KEYS:
            raise ConfigError(f"unknown config section [{section}]")
        unknown = set(parser[section]) - _KNOWN_KEYS[section]
        if unknown:
            raise ConfigError(
                f"unknown key(s) in [{section}]: {', '.join(sorted(unknown))}")

    cfg = PipelineConfig()
    try:
        if parser.has_section("extraction"):
            s = parser["extraction"]
            cfg.extraction = ExtractionConfig(
                extensions=_csv_list(s.get("extensions", "php")),
                ignore_globs=_csv_list(s.get("ignore", ", ".join(
                    ExtractionConfig().ignore_globs))),
                include_methods=_boolean("extraction", "include_methods",
                                         s.get("include_methods", "true")),
                include_anonymous=_boolean("extraction", "include_anonymous",
                                           s.get("include_anonymous", "false")),
                include_nested=_boolean("extraction", "include_nested",
                                        s.get("include_nested", "false")),
            )
        if parser.has_section("dedup"):
            s = parser["dedup"]
            cfg.dedup = DedupConfig(
                window_size=int(s.get("window_size", "30")),
                jaccard_threshold=float(s.get("jaccard_threshold", "0.99")),
            )
        if parser.has_section("annotation"):
            s = parser["annotation"]
            qualifying = dict(SeverityFilter().qualifying)
            if "qualifying_a" in s:
                qualifying[Tool.ANALYZER_A] = frozenset(_csv_list(s["qualifying_a"]))
            if "qualifying_b" in s:
                qualifying[Tool.ANALYZER_B] = frozenset(_csv_list(s["qualifying_b"]))
            cfg.severity_filter = SeverityFilter(qualifying)
            cfg.annotation_strict = _boolean("annotation", "strict",
                                             s.get("strict", "false"))
            cfg.strip_prefix = s.get("strip_prefix", "").strip()
        if parser.has_section("dataset"):
            s = parser["dataset"]
            cfg.seed = int(s.get("seed", "0"))
            ratios = tuple(float(x) for x in _csv_list(s.get(
                "ratios", "0.8, 0.1, 0.1")))
            if len(ratios) != 3:
                raise ConfigError("[dataset] ratios: expected three values")
            cfg.ratios = ratios  # type: ignore[assignment]
            cfg.strategy = s.get("strategy", "NB").strip().upper()
            if cfg.strategy not in BalanceKind.__members__:
                raise ConfigError(f"[dataset] strategy: unknown {cfg.strategy!r}")
            cfg.usc_global_min = int(s.get("usc_global_min", "4934"))
        if parser.has_section("scoring"):
            s = parser["scoring"]
            cfg.scorer_url = s.get("url", "").strip() or None
            cfg.markers = _csv_list(s.get("markers", ", ".join(DEFAULT_MARKERS)))
            cfg.batch_size = int(s.get("batch_size", str(DEFAULT_BATCH_SIZE)))
            cfg.timeout = float(s.get("timeout", str(DEFAULT_TIMEOUT)))
        if parser.has_section("review"):
            cfg.threshold = float(parser["review"].get(
                "threshold", str(DEFAULT_THRESHOLD)))
    except ConfigError:
        raise
    except (ValueError, KeyError) as exc:
        raise ConfigError(f"invalid config value in {path}: {exc}")
    return cfg
