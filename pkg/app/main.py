"""
Command-Line Entry Point
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from pydantic import ValidationError as PydanticValidationError

from app.application.services.dataset_service import DatasetService
from app.application.services.experiment_service import load_experiment_config
from app.config import settings
from app.dependencies import (
    get_dataset_service,
    get_experiment_service,
    get_feature_service,
    get_model_repository,
    get_oracle_service,
)
from app.infrastructure.repositories.report_repository_impl import render, render_line
from app.schemas.experiment import ExperimentConfig
from app.utils.exceptions import ApplicationError, ArgumentError, ConfigError
from app.utils.logger import configure_logging

logger = logging.getLogger("app")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2


class UsageError(Exception):
    pass


class CliParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got '{text}'")


def _centers(text: str) -> list[list[float]]:
    """'0.2,0.2;0.8,0.8' -> [[0.2, 0.2], [0.8, 0.8]]"""
    try:
        return [[float(v) for v in row.split(",")] for row in text.split(";") if row.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected centers like '0.2,0.2;0.8,0.8', got '{text}'")


def _experiment(args) -> ExperimentConfig:
    cfg = load_experiment_config(args.config)
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.workers is not None:
        updates["workers"] = args.workers
    if args.out is not None:
        updates["output"] = args.out
    if getattr(args, "dump_adv", None) is not None:
        updates["report"] = cfg.report.model_copy(update={"dump_adv": args.dump_adv})
    try:
        return ExperimentConfig.model_validate({**cfg.model_dump(), **updates})
    except PydanticValidationError as e:
        raise ConfigError(str(e)) from e


def _require_output(cfg: ExperimentConfig) -> Path:
    if cfg.output is None:
        raise ConfigError("no output path: set 'output' in the config or pass --out")
    return cfg.output


# ----------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------

def cmd_gen_data(args) -> int:
    if args.kind == "blobs":
        if not args.centers:
            raise ArgumentError("--centers is required for blobs")
        ds = DatasetService.gen_gaussian_blobs(args.seed, args.centers, args.std, args.per_class)
    else:
        ds = DatasetService.gen_moons(args.seed, args.per_class, args.noise)
    get_dataset_service().write_csv(ds, args.out)
    logger.info("Wrote %d samples to %s", len(ds), args.out)
    return EXIT_OK


def cmd_train_mlp(args) -> int:
    ds = get_dataset_service().load_csv(args.data)
    widths = [ds.dim] + args.widths + [ds.num_classes] if args.auto_ends else args.widths
    mlp = get_feature_service().train_mlp(ds, widths, args.epochs, args.lr, args.seed, batch_size=args.batch_size)
    get_model_repository().save_mlp(mlp, args.out)
    print(render({"widths": mlp.widths, "train_accuracy": mlp.train_accuracy, "path": str(args.out)}))
    return EXIT_OK


def cmd_fit_affine(args) -> int:
    ds = get_dataset_service().load_csv(args.data)
    repo = get_model_repository()
    mlp = repo.load_mlp(args.mlp) if args.mlp is not None else None
    layers = args.layers.split(",") if args.layers else (list(mlp.hidden_layers) if mlp is not None else [])
    affine = get_feature_service().fit_affine(ds, mlp, layers, args.pool, args.r)
    repo.save_affine(affine, args.out)
    print(render({"reduced_dim": affine.reduced_dim, "source_layers": list(affine.source_layers), "path": str(args.out)}))
    return EXIT_OK


def cmd_attack(args) -> int:
    cfg = _experiment(args)
    out = _require_output(cfg)
    service = get_experiment_service()
    report = service.run_experiment(cfg, progress=not args.quiet)
    service.emit_report(report, out)
    if cfg.report.dump_adv is not None:
        service.dump_adversarial(report, cfg.report.dump_adv)
    print(render(report.summary_fields()))
    return EXIT_OK


def cmd_oracle(args) -> int:
    dataset_service = get_dataset_service()
    train = dataset_service.load_csv(args.data)
    if args.test is not None:
        pool = dataset_service.load_csv(args.test, num_classes=train.num_classes)
        if not 0 <= args.index < len(pool):
            raise ArgumentError(f"index {args.index} is outside the test set of {len(pool)} samples")
        x, y = pool.features[args.index], int(pool.labels[args.index])
    else:
        if not 0 <= args.index < len(train):
            raise ArgumentError(f"index {args.index} is outside the data set of {len(train)} samples")
        # attack a training point against the rest of the set
        x, y = train.features[args.index], int(train.labels[args.index])
        keep = np.delete(np.arange(len(train)), args.index)
        train = train.subset(keep, num_classes=train.num_classes)

    result = get_oracle_service().exact_min_attack(train, x, y, args.k, box=args.box)
    fields = {
        "index": args.index,
        "label": y,
        "success": result.success,
        "norm": result.norm,
        "predicted": result.predicted,
        "subset": list(result.subset),
        "cells_solved": result.cells_solved,
        "infeasible_cells": result.infeasible_cells,
        "cells_pruned": result.cells_pruned,
        "max_kkt_residual": result.max_kkt_residual,
        "z": result.z,
    }
    line = render_line("oracle", fields)
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(line + "\n", encoding="utf-8")
    print(line)
    return EXIT_OK


def cmd_eval(args) -> int:
    cfg = _experiment(args)
    out = _require_output(cfg)
    service = get_experiment_service()
    reports = service.evaluate(cfg, progress=not args.quiet)
    for method, report in reports.items():
        service.emit_report(report, out.with_name(f"{out.stem}.{method.value}{out.suffix}"))

    comparison = service.compare(reports)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as f:
        for report in reports.values():
            f.write(render_line("summary", report.summary_fields()) + "\n")
        f.write(render_line("comparison", comparison) + "\n")
    print(render(comparison))
    return EXIT_OK


def cmd_report(args) -> int:
    stored, recomputed = get_experiment_service().recompute(args.input)
    consistent = stored == recomputed
    print(render({"consistent": consistent, "stored": stored.to_fields(), "recomputed": recomputed.to_fields()}))
    if not consistent:
        logger.error("Summary of %s does not match its sample lines", args.input)
        return EXIT_RUNTIME
    return EXIT_OK


# ----------------------------------------------------------------------
# Parser
# ----------------------------------------------------------------------

def _add_campaign_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, required=True, help="experiment JSON file")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--out", type=Path, default=None)
    p.add_argument("--quiet", action="store_true", help="no progress bar")


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(prog="knnadv", description="Minimum-norm adversarial attacks on kNN models")
    parser.add_argument("--log-level", default=None, help=f"default {settings.log_level}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    p = sub.add_parser("gen-data", help="write a synthetic dataset as CSV")
    p.add_argument("--kind", choices=["blobs", "moons"], default="blobs")
    p.add_argument("--centers", type=_centers, default=None)
    p.add_argument("--std", type=float, default=0.1)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--per-class", type=int, default=20)
    p.add_argument("--seed", type=int, default=settings.default_seed)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(handler=cmd_gen_data)

    p = sub.add_parser("train-mlp", help="train a feature network on a CSV dataset")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--widths", type=_int_list, required=True, help="e.g. 2,16,8,2")
    p.add_argument("--auto-ends", action="store_true", help="--widths lists hidden layers only; input and output come from the data")
    p.add_argument("--epochs", type=int, default=50)
    p.add_argument("--lr", type=float, default=0.01)
    p.add_argument("--batch-size", type=int, default=128)
    p.add_argument("--seed", type=int, default=settings.default_seed)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(handler=cmd_train_mlp)

    p = sub.add_parser("fit-affine", help="fit a PCA map over inputs or network layers")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--mlp", type=Path, default=None)
    p.add_argument("--layers", default=None, help="comma-separated layer names")
    p.add_argument("--pool", type=int, default=1)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(handler=cmd_fit_affine)

    p = sub.add_parser("attack", help="run an attack campaign")
    _add_campaign_flags(p)
    p.add_argument("--dump-adv", type=Path, default=None, help="CSV file for adversarial points")
    p.set_defaults(handler=cmd_attack)

    p = sub.add_parser("oracle", help="exact minimum attack on one sample")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--test", type=Path, default=None, help="take the sample from this CSV instead of --data")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--index", type=int, required=True)
    p.add_argument("--box", action="store_true")
    p.add_argument("--out", type=Path, default=None)
    p.set_defaults(handler=cmd_oracle)

    p = sub.add_parser("eval", help="compare our attack, the baseline and the oracle")
    _add_campaign_flags(p)
    p.set_defaults(handler=cmd_eval)

    p = sub.add_parser("report", help="recompute aggregates of a report")
    p.add_argument("--in", dest="input", type=Path, required=True)
    p.set_defaults(handler=cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE

    configure_logging(args.log_level or settings.log_level)
    try:
        return args.handler(args)
    except (ConfigError, ArgumentError, PydanticValidationError) as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except (ApplicationError, OSError) as e:
        logger.error("%s", e)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
