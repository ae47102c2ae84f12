"""Command-line frontend.

Subcommands map straight onto the library: synth writes fixture trees,
load/bench/roc evaluate dataset directories, enroll/verify manage one
account against a model store, serve runs the HTTP service. Exit codes:
0 success (verify: accepted), 1 verify rejected, 2 usage or data error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from kda.config import AppConfig, load_config, with_overrides
from kda.evaluate import (
    CLASSIFIERS,
    FEATURE_ROWS,
    cell_roc,
    roc_points_csv,
    run_benchmark,
)
from kda.ingest import load_dataset, loader_report, parse_sample_file
from kda.pipeline import ModelStore, UnknownAccountError, enroll, verify
from kda.synth import INTRUDER_MODES, NAMING_STYLES, SynthConfig, materialize_dataset


def _add_config_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", metavar="FILE", help="key = value config file")


def _add_store_arg(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--store", metavar="DIR", help="model store directory (default from config)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kda", description="keystroke dynamics toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="write a synthetic dataset directory")
    p.add_argument("out_dir")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--subjects", type=int, default=20)
    p.add_argument("--train", type=int, default=5, help="training samples per subject")
    p.add_argument("--genuine", type=int, default=5, help="genuine test samples per subject")
    p.add_argument("--intruder", type=int, default=5, help="intruder test samples per subject")
    p.add_argument("--password-length", type=int, default=None)
    p.add_argument("--intruder-mode", choices=INTRUDER_MODES, default="independent_profile")
    p.add_argument("--shift-ms", type=int, default=60)
    p.add_argument("--naming", choices=NAMING_STYLES, default="long")

    p = sub.add_parser("load", help="parse a dataset directory and print the loader report")
    p.add_argument("dataset_dir")
    p.add_argument("--partition-by", choices=("genuine_flag", "positive_flag"), default=None)
    _add_config_arg(p)

    p = sub.add_parser("bench", help="EER table over feature kinds and classifiers")
    p.add_argument("dataset_dir")
    p.add_argument("--out", metavar="FILE", help="also write the text table here")
    p.add_argument("--csv", metavar="FILE", help="also write the table as CSV")
    _add_config_arg(p)

    p = sub.add_parser("roc", help="export one cell's pooled ROC as CSV")
    p.add_argument("dataset_dir")
    p.add_argument(
        "--cell",
        required=True,
        metavar="FEATURE:CLASSIFIER",
        help=f"feature in {{{','.join(FEATURE_ROWS)}}}, classifier in {{{','.join(CLASSIFIERS)}}}",
    )
    p.add_argument("--out", required=True, metavar="FILE")
    _add_config_arg(p)

    p = sub.add_parser("enroll", help="train and store a model from sample files")
    p.add_argument("account_id")
    p.add_argument("files", nargs="+", help="sample files, one or more password entries each")
    _add_config_arg(p)
    _add_store_arg(p)

    p = sub.add_parser("verify", help="score one sample file against a stored model")
    p.add_argument("account_id")
    p.add_argument("file", help="sample file; the first entry is scored")
    _add_config_arg(p)
    _add_store_arg(p)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument("--bind", metavar="HOST:PORT", help="default from config (127.0.0.1:8000)")
    p.add_argument("--static", metavar="DIR", help="serve a capture page from this directory")
    _add_config_arg(p)
    _add_store_arg(p)

    return parser


def _config_from(args: argparse.Namespace) -> AppConfig:
    return load_config(getattr(args, "config", None))


def _store_from(args: argparse.Namespace, config: AppConfig) -> ModelStore:
    return ModelStore(args.store if args.store else config.model_dir)


def _read_samples(path: str) -> list:
    text = Path(path).read_text()
    samples, rejects = parse_sample_file(text)
    for reject in rejects:
        print(f"{path}: {reject}", file=sys.stderr)
    return samples


def _cmd_synth(args: argparse.Namespace) -> int:
    config = SynthConfig(
        n_subjects=args.subjects,
        train_count=args.train,
        genuine_count=args.genuine,
        intruder_count=args.intruder,
        password_length=args.password_length,
        intruder_mode=args.intruder_mode,
        shift_ms=args.shift_ms,
        seed=args.seed,
        name=Path(args.out_dir).name,
    )
    dataset = materialize_dataset(config, args.out_dir, naming=args.naming)
    n_tests = sum(
        len(a.genuine_tests) + len(a.intruder_tests) for a in dataset.accounts.values()
    )
    print(f"wrote {len(dataset.accounts)} accounts, {n_tests} test files to {args.out_dir}")
    return 0


def _cmd_load(args: argparse.Namespace) -> int:
    config = _config_from(args)
    partition = args.partition_by or config.partition_by
    dataset = load_dataset(args.dataset_dir, partition_by=partition)
    print(loader_report(dataset))
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    config = _config_from(args)
    dataset = load_dataset(args.dataset_dir, partition_by=config.partition_by)
    if not dataset.accounts:
        print("no accounts in dataset", file=sys.stderr)
        return 2
    report = run_benchmark(dataset, config.benchmark_config())
    table = report.render()
    print(table)
    if args.out:
        Path(args.out).write_text(table + "\n")
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    return 0


def _cmd_roc(args: argparse.Namespace) -> int:
    config = _config_from(args)
    feature, sep, classifier = args.cell.partition(":")
    if not sep or feature not in FEATURE_ROWS or classifier not in CLASSIFIERS:
        print(f"bad --cell {args.cell!r}: expected FEATURE:CLASSIFIER", file=sys.stderr)
        return 2
    dataset = load_dataset(args.dataset_dir, partition_by=config.partition_by)
    if not dataset.accounts:
        print("no accounts in dataset", file=sys.stderr)
        return 2
    curve = cell_roc(dataset, feature, classifier, config.benchmark_config())
    Path(args.out).write_text(roc_points_csv(curve))
    print(f"wrote {len(curve.points)} points to {args.out}")
    return 0


def _cmd_enroll(args: argparse.Namespace) -> int:
    config = _config_from(args)
    store = _store_from(args, config)
    samples = []
    for path in args.files:
        samples.extend(_read_samples(path))
    model = enroll(args.account_id, samples, config, store)
    print(
        f"enrolled {args.account_id}: {len(samples)} samples, "
        f"feature={model.feature_kind}, classifier={config.classifier}, "
        f"threshold={model.threshold:.6f}"
    )
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    config = _config_from(args)
    store = _store_from(args, config)
    samples = _read_samples(args.file)
    if not samples:
        print(f"{args.file}: no valid samples", file=sys.stderr)
        return 2
    result = verify(args.account_id, samples[0], config, store)
    verdict = "accepted" if result.accepted else "rejected"
    print(
        f"{result.account_id}: {verdict} "
        f"(score {result.score:.6f}, threshold {result.threshold:.6f})"
    )
    return 0 if result.accepted else 1


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from kda.service import create_app

    config = _config_from(args)
    config = with_overrides(config, bind=args.bind, static_dir=args.static)
    if args.store:
        config = with_overrides(config, model_dir=args.store)
    host, sep, port = config.bind.rpartition(":")
    if not sep:
        print(f"bad bind address {config.bind!r}: expected HOST:PORT", file=sys.stderr)
        return 2
    app = create_app(config)
    uvicorn.run(app, host=host, port=int(port))
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "load": _cmd_load,
    "bench": _cmd_bench,
    "roc": _cmd_roc,
    "enroll": _cmd_enroll,
    "verify": _cmd_verify,
    "serve": _cmd_serve,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, UnknownAccountError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
