"""Engine configuration: INI file with one section per stage, plus ABSA_* overrides.

Precedence, lowest first: built-in defaults (``data/default.ini``), the
user's config file, environment variables ``ABSA_<SECTION>_<KEY>``, and
finally explicit keyword overrides from the command line.

Paths starting with ``@data/`` refer to files bundled with the package;
other relative paths resolve against the directory of the config file.
"""

from __future__ import annotations

import configparser
import dataclasses
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Optional

DATA_DIR = Path(__file__).resolve().parent / "data"
DEFAULT_INI = DATA_DIR / "default.ini"
ENV_PREFIX = "ABSA_"
BACKENDS = ("nb", "linear", "external")
METHODS = ("lime", "shap-exact", "shap-kernel")


class ConfigError(ValueError):
    pass


def data_path(name: str) -> Path:
    return DATA_DIR / name


# (section, key) -> (field name, kind); kinds: str, path, paths, int, float, bool, list
_SCHEMA: dict[tuple[str, str], tuple[str, str]] = {
    ("tokenizer", "path"): ("tokenizer_path", "path"),
    ("tokenizer", "vocab_size"): ("vocab_size", "int"),
    ("tokenizer", "coverage"): ("coverage", "float"),
    ("lexicon", "paths"): ("lexicon_paths", "paths"),
    ("lexicon", "hints"): ("hints_path", "path"),
    ("lexicon", "beta"): ("beta", "float"),
    ("aspect", "seeds"): ("seeds_path", "path"),
    ("aspect", "threshold"): ("aspect_threshold", "float"),
    ("aspect", "idf_corpus"): ("idf_corpus", "path"),
    ("textprep", "cues"): ("cues", "list"),
    ("classify", "backend"): ("backend", "str"),
    ("classify", "model"): ("model_path", "path"),
    ("classify", "train_corpus"): ("train_corpus", "path"),
    ("classify", "alpha"): ("alpha", "float"),
    ("classify", "lr"): ("lr", "float"),
    ("classify", "epochs"): ("epochs", "int"),
    ("classify", "l2"): ("l2", "float"),
    ("adapter", "endpoint"): ("adapter_endpoint", "str"),
    ("adapter", "timeout"): ("adapter_timeout", "float"),
    ("adapter", "concurrent"): ("adapter_concurrent", "bool"),
    ("aggregate", "neutral_low"): ("neutral_low", "float"),
    ("aggregate", "neutral_high"): ("neutral_high", "float"),
    ("explain", "method"): ("explain_method", "str"),
    ("explain", "lime_samples"): ("lime_samples", "int"),
    ("explain", "kernel_samples"): ("kernel_samples", "int"),
    ("explain", "kernel_width"): ("kernel_width", "float"),
    ("explain", "ridge"): ("ridge", "float"),
    ("explain", "top_k"): ("top_k", "int"),
    ("explain", "max_exact_tokens"): ("max_exact_tokens", "int"),
    ("explain", "per_aspect"): ("explain_per_aspect", "int"),
    ("report", "keywords"): ("keywords_k", "int"),
    ("report", "examples"): ("examples_per_aspect", "int"),
    ("run", "seed"): ("seed", "int"),
    ("run", "workers"): ("workers", "int"),
}


@dataclass(frozen=True)
class EngineConfig:
    tokenizer_path: Optional[Path] = None
    vocab_size: int = 8000
    coverage: float = 0.9995
    lexicon_paths: tuple[Path, ...] = ()
    hints_path: Optional[Path] = None
    beta: float = 1.0
    seeds_path: Optional[Path] = None
    aspect_threshold: float = 0.3
    idf_corpus: Optional[Path] = None
    cues: tuple[str, ...] = ("but", "however", "නමුත්")
    backend: str = "nb"
    model_path: Optional[Path] = None
    train_corpus: Optional[Path] = None
    alpha: float = 1.0
    lr: float = 0.5
    epochs: int = 30
    l2: float = 1e-4
    adapter_endpoint: str = ""
    adapter_timeout: float = 10.0
    adapter_concurrent: bool = False
    neutral_low: float = 0.40
    neutral_high: float = 0.60
    explain_method: str = "lime"
    lime_samples: int = 1000
    kernel_samples: int = 4000
    kernel_width: float = 0.25
    ridge: float = 1e-3
    top_k: int = 10
    max_exact_tokens: int = 12
    explain_per_aspect: int = 1
    keywords_k: int = 10
    examples_per_aspect: int = 3
    seed: int = 0
    workers: int = 1

    def replace(self, **changes) -> "EngineConfig":
        cfg = dataclasses.replace(self, **{k: v for k, v in changes.items() if v is not None})
        cfg.validate()
        return cfg

    def validate(self) -> None:
        checks = [
            (self.vocab_size >= 1, "tokenizer.vocab_size must be positive"),
            (0.9 <= self.coverage <= 1.0, "tokenizer.coverage must be in [0.9, 1]"),
            (self.beta >= 0 and self.beta == self.beta, "lexicon.beta must be finite and >= 0"),
            (0 < self.aspect_threshold < 1, "aspect.threshold must be in (0, 1)"),
            (bool(self.cues), "textprep.cues must not be empty"),
            (self.backend in BACKENDS, f"classify.backend must be one of {BACKENDS}"),
            (self.alpha > 0, "classify.alpha must be > 0"),
            (self.lr > 0, "classify.lr must be > 0"),
            (self.epochs >= 1, "classify.epochs must be >= 1"),
            (self.l2 >= 0, "classify.l2 must be >= 0"),
            (self.adapter_timeout > 0, "adapter.timeout must be > 0"),
            (self.backend != "external" or bool(self.adapter_endpoint),
             "classify.backend = external needs adapter.endpoint"),
            (0 <= self.neutral_low <= 0.5 <= self.neutral_high <= 1,
             "aggregate bands need 0 <= neutral_low <= 0.5 <= neutral_high <= 1"),
            (self.explain_method in METHODS, f"explain.method must be one of {METHODS}"),
            (self.lime_samples >= 3, "explain.lime_samples must be >= 3"),
            (self.kernel_samples >= 4, "explain.kernel_samples must be >= 4"),
            (self.kernel_width > 0, "explain.kernel_width must be > 0"),
            (self.ridge >= 0, "explain.ridge must be >= 0"),
            (self.top_k >= 1, "explain.top_k must be >= 1"),
            (self.max_exact_tokens >= 1, "explain.max_exact_tokens must be >= 1"),
            (self.explain_per_aspect >= 0, "explain.per_aspect must be >= 0"),
            (self.keywords_k >= 1, "report.keywords must be >= 1"),
            (0 <= self.examples_per_aspect <= 3, "report.examples must be in [0, 3]"),
            (self.workers >= 1, "run.workers must be >= 1"),
        ]
        for ok, msg in checks:
            if not ok:
                raise ConfigError(msg)
        paths = [self.tokenizer_path, self.hints_path, self.seeds_path, self.idf_corpus,
                 self.model_path, self.train_corpus, *self.lexicon_paths]
        for p in paths:
            if p is not None and not p.is_file():
                raise ConfigError(f"configured file does not exist: {p}")


def _resolve(value: str, base: Path) -> Optional[Path]:
    value = value.strip()
    if not value:
        return None
    if value.startswith("@data/"):
        return DATA_DIR / value[len("@data/"):]
    p = Path(value).expanduser()
    return p if p.is_absolute() else (base / p)


def _convert(kind: str, raw: str, base: Path, where: str):
    try:
        if kind == "str":
            return raw.strip()
        if kind == "path":
            return _resolve(raw, base)
        if kind == "paths":
            return tuple(p for p in (_resolve(x, base) for x in raw.split(",")) if p is not None)
        if kind == "list":
            return tuple(x.strip() for x in raw.split(",") if x.strip())
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            v = raw.strip().lower()
            if v in ("1", "true", "yes", "on"):
                return True
            if v in ("0", "false", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
    except ValueError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    raise AssertionError(kind)


def _apply(values: dict, parser: configparser.ConfigParser, base: Path, origin: str) -> None:
    for section in parser.sections():
        for key, raw in parser.items(section):
            field_kind = _SCHEMA.get((section, key))
            if field_kind is None:
                raise ConfigError(f"{origin}: unknown setting [{section}] {key}")
            name, kind = field_kind
            values[name] = _convert(kind, raw, base, f"{origin} [{section}] {key}")


def load_config(
    path: "str | Path | None" = None,
    env: Optional[Mapping[str, str]] = None,
    **overrides,
) -> EngineConfig:
    values: dict = {}
    for p in (DEFAULT_INI, path):
        if p is None:
            continue
        p = Path(p)
        parser = configparser.ConfigParser(interpolation=None)
        try:
            with p.open(encoding="utf-8") as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {p}: {exc.strerror}") from None
        except configparser.Error as exc:
            raise ConfigError(f"{p}: {exc}") from None
        _apply(values, parser, p.resolve().parent, str(p))

    env = os.environ if env is None else env
    for (section, key), (name, kind) in _SCHEMA.items():
        var = f"{ENV_PREFIX}{section}_{key}".upper()
        if var in env:
            values[name] = _convert(kind, env[var], Path.cwd(), var)

    values.update({k: v for k, v in overrides.items() if v is not None})
    cfg = EngineConfig(**values)
    cfg.validate()
    return cfg
