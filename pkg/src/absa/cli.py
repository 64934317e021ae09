"""Command-line interface: ``absa <command> ...``; run ``absa -h`` for the list."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from absa.classify import save_model
from absa.config import ConfigError, load_config
from absa.corpus import CorpusError, Dataset, Review, detect_variant, load_corpus
from absa.evaluation import compare_backends
from absa.explain import ExplainError
from absa.labels import Sentiment
from absa.lexicon import load_lexicons
from absa.pipeline import Engine, PipelineError
from absa.report import build_report, dumps, explain_text, highlight, render_html, validate_report, write_atomic
from absa.subword import save_vocab, train_subword
from absa.textprep import normalize


class CLIError(Exception):
    pass


def _read_texts(path: Path) -> list[str]:
    """Review texts from a .jsonl/.csv corpus or a plain file with one text per line."""
    if not path.is_file():
        raise CLIError(f"cannot read {path}: no such file")
    if path.suffix.lower() in (".jsonl", ".csv"):
        return [r.raw_text for r in load_corpus(path)]
    try:
        return [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
    except (OSError, UnicodeDecodeError) as exc:
        raise CLIError(f"cannot read {path}: {exc}") from None


def _load_dataset(path: Path, engine: Optional[Engine] = None):
    if not path.is_file():
        raise CLIError(f"cannot read {path}: no such file")
    if path.suffix.lower() not in (".jsonl", ".csv"):
        hints = engine.hints if engine else None
        return Dataset(tuple(
            Review(f"line{i}", t, detect_variant(t, hints), None, None, str(path))
            for i, t in enumerate(_read_texts(path), 1)
        ))
    return load_corpus(path, hints=engine.hints if engine else None)


def _config(args, **extra):
    return load_config(args.config, seed=args.seed, workers=args.workers, **extra)


def _emit(args, text: str, default_name: Optional[str] = None) -> None:
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    if default_name and (out.is_dir() or not out.suffix):
        out = out / default_name
    write_atomic([(out, text)])
    print(f"wrote {out}", file=sys.stderr)


# -- commands ------------------------------------------------------------------


def cmd_train_tokenizer(args) -> int:
    cfg = _config(args)
    texts = [normalize(t).text for t in _read_texts(Path(args.corpus))]
    vocab_size = args.vocab_size or cfg.vocab_size
    coverage = args.coverage if args.coverage is not None else cfg.coverage
    vocab = train_subword(texts, vocab_size, coverage)
    out = Path(args.out or "tokenizer.bpe")
    tmp = out.with_name(f".{out.name}.tmp")
    try:
        save_vocab(vocab, tmp)
        tmp.replace(out)
    finally:
        tmp.unlink(missing_ok=True)
    print(f"wrote {out}: {len(vocab.pieces)} pieces, {len(vocab.merges)} merges", file=sys.stderr)
    return 0


def cmd_train_baseline(args) -> int:
    cfg = _config(args, backend=args.backend, train_corpus=Path(args.corpus), model_path=None)
    engine = Engine.from_config(cfg)
    out = Path(args.out or f"{args.backend}.model.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    save_model(engine.backend, out)
    msg = f"wrote {out}"
    if cfg.tokenizer_path is None:
        vocab_out = out.with_suffix(".bpe")
        save_vocab(engine.vocab, vocab_out)
        msg += f" and its tokenizer {vocab_out}"
    print(msg, file=sys.stderr)
    return 0


def cmd_score(args) -> int:
    if args.file is None and args.text is None:
        raise CLIError("give a text or --file")
    engine = Engine.from_config(_config(args))
    with engine:
        if args.file is not None:
            dataset = _load_dataset(Path(args.file), engine)
            analyses = engine.analyze_many(list(dataset))
        else:
            if not args.text.strip():
                print(json.dumps({"error": "empty text"}))
                return 1
            analyses = [engine.analyze_text(args.text)]
    lines = "".join(json.dumps(a.to_dict(), ensure_ascii=False) + "\n" for a in analyses)
    _emit(args, lines, "scores.jsonl")
    return 0


def cmd_explain(args) -> int:
    cfg = _config(args)
    method = args.method or cfg.explain_method
    if not args.text.strip():
        raise CLIError("empty text")
    engine = Engine.from_config(cfg)
    with engine:
        text = normalize(args.text).text
        target = Sentiment.parse(args.target) if args.target else engine.scorer.score(text).label
        exp = explain_text(engine, text, method, target)
    doc = json.dumps(exp, ensure_ascii=False, indent=2) + "\n"
    if args.out is None:
        sys.stdout.write(doc)
        return 0
    out = Path(args.out)
    snippet = f'<p class="explanation">{highlight(exp)}</p>\n'
    write_atomic([(out / "explanation.json", doc), (out / "explanation.html", snippet)])
    print(f"wrote {out / 'explanation.json'} and explanation.html", file=sys.stderr)
    return 0


def cmd_analyze(args) -> int:
    cfg = _config(args)
    path = Path(args.corpus)
    dataset = _load_dataset(path)
    if not len(dataset):
        raise CLIError(f"empty corpus: {path}")
    engine = Engine.from_config(cfg)
    with engine:
        if engine.hints is not None:
            dataset = _load_dataset(path, engine)
        analyses = engine.analyze_many(list(dataset))
        try:
            report = build_report(engine, analyses, source=path.name)
        except ExplainError as exc:
            raise PipelineError("explain", str(exc)) from exc
    try:
        validate_report(report)
    except Exception as exc:
        raise PipelineError("report", f"report failed schema validation: {exc}") from exc
    out = Path(args.out or "report")
    write_atomic([(out / "report.json", dumps(report)), (out / "report.html", render_html(report))])
    print(f"wrote {out / 'report.json'} and report.html", file=sys.stderr)
    return 0


class _Unavailable:
    def __init__(self, name: str, error: str):
        self.name = name
        self.error = error

    def score(self, text):
        raise RuntimeError(self.error)


def cmd_eval(args) -> int:
    base = _config(args)
    names = [b.strip() for b in args.backends.split(",") if b.strip()] if args.backends else []
    settings = {"on": (True,), "off": (False,), "both": (False, True)}[args.lexicon]
    test = load_corpus(Path(args.test)) if names else ()
    backends, engines = [], []
    lexicon = None
    for name in names:
        try:
            engine = Engine.from_config(base.replace(backend=name, model_path=None) if name != base.backend
                                        else base)
            engines.append(engine)
            backends.append((engine.backend, settings))
            lexicon = engine.lexicon
        except (PipelineError, ConfigError) as exc:
            backends.append((_Unavailable(name, str(exc)), settings))
    if lexicon is None and names:
        lexicon = load_lexicons(base.lexicon_paths)
    try:
        table = compare_backends(backends, test, lexicon, beta=base.beta)
    finally:
        for e in engines:
            e.close()
    print(table.to_text())
    if args.out:
        write_atomic([(Path(args.out), table.to_json() + "\n")])
    return 0


# -- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=argparse.SUPPRESS, help="INI config file")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="override run.seed")
    common.add_argument("--out", default=argparse.SUPPRESS, help="output file or directory")
    common.add_argument("--workers", type=int, default=argparse.SUPPRESS, help="override run.workers")

    p = argparse.ArgumentParser(
        prog="absa", parents=[common],
        description="Aspect-based sentiment analysis for multilingual banking reviews.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("train-tokenizer", parents=[common], help="train a BPE vocabulary")
    s.add_argument("corpus", help=".jsonl/.csv corpus or a text file with one review per line")
    s.add_argument("--vocab-size", type=int)
    s.add_argument("--coverage", type=float)
    s.set_defaults(func=cmd_train_tokenizer)

    s = sub.add_parser("train-baseline", parents=[common], help="train and save a baseline model")
    s.add_argument("corpus")
    s.add_argument("--backend", choices=("nb", "linear"), default="nb")
    s.set_defaults(func=cmd_train_baseline)

    s = sub.add_parser("score", parents=[common], help="score reviews, one JSON line each")
    s.add_argument("text", nargs="?")
    s.add_argument("--file", help="corpus or text file to score instead of TEXT")
    s.set_defaults(func=cmd_score)

    s = sub.add_parser("explain", parents=[common], help="token attributions for one text")
    s.add_argument("text")
    s.add_argument("--method", choices=("lime", "shap-exact", "shap-kernel"))
    s.add_argument("--target", help="class to explain (default: predicted class)")
    s.set_defaults(func=cmd_explain)

    s = sub.add_parser("analyze", parents=[common], help="full pipeline and aspect report")
    s.add_argument("corpus")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("eval", parents=[common], help="compare backends on a labelled test set")
    s.add_argument("test")
    s.add_argument("--backends", default="nb,linear", help="comma-separated: nb, linear, external")
    s.add_argument("--lexicon", choices=("on", "off", "both"), default="both")
    s.set_defaults(func=cmd_eval)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    for name in ("config", "seed", "out", "workers"):
        if not hasattr(args, name):
            setattr(args, name, None)
    try:
        return args.func(args)
    except (PipelineError, CLIError, ConfigError, CorpusError, ExplainError, ValueError, OSError) as exc:
        print(f"absa {args.command}: error: {exc}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
