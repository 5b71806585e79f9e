"""
Experiment Service
Attack campaigns over test sets, paired evaluations and reports
"""

import logging
import statistics
import sys
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from pathlib import Path
from typing import Any, Optional

import numpy as np
from pydantic import ValidationError as PydanticValidationError
from tqdm import tqdm

from app.application.factories.model_factory import ModelFactory
from app.application.services.attack_service import AttackService
from app.application.services.dataset_service import DatasetService
from app.application.services.oracle_service import OracleService
from app.config import settings
from app.domain.models.attack import AttackMode
from app.domain.models.dataset import Dataset
from app.domain.models.knn_model import KnnModel
from app.domain.models.report import Aggregates, Method, Report, SampleRecord, compute_metrics
from app.domain.repositories.report_repository import ReportRepository
from app.schemas.experiment import DatasetKind, DatasetSpec, ExperimentConfig
from app.utils.exceptions import ApplicationError, ConfigError, NotFoundError
from app.utils.validators import is_in_unit_box

logger = logging.getLogger(__name__)

_SAMPLE_ERRORS = (ApplicationError, ValueError, ArithmeticError, np.linalg.LinAlgError)


class ExperimentService:
    """Experiment service with dependency injection"""

    def __init__(
        self,
        dataset_service: DatasetService,
        model_factory: ModelFactory,
        report_repository: ReportRepository,
    ):
        self.dataset_service = dataset_service
        self.model_factory = model_factory
        self.report_repository = report_repository

    # ------------------------------------------------------------------
    # Setup
    # ------------------------------------------------------------------

    def load_data(self, spec: DatasetSpec) -> tuple[Dataset, Dataset]:
        """Training and test sets described by the dataset section"""
        if spec.kind == DatasetKind.BLOBS:
            train = DatasetService.gen_gaussian_blobs(spec.seed, spec.centers, spec.std, spec.per_class)
            test = DatasetService.gen_gaussian_blobs(spec.seed + 1, spec.centers, spec.std, spec.test_size)
            return train, test
        if spec.kind == DatasetKind.MOONS:
            train = DatasetService.gen_moons(spec.seed, spec.per_class, spec.noise)
            test = DatasetService.gen_moons(spec.seed + 1, spec.test_size, spec.noise)
            return train, test

        if spec.kind == DatasetKind.CSV:
            train = self.dataset_service.load_csv(spec.train_path)
            test = self.dataset_service.load_csv(spec.test_path, num_classes=train.num_classes)
        else:
            train = self.dataset_service.load_idx(spec.train_images, spec.train_labels)
            test = self.dataset_service.load_idx(spec.test_images, spec.test_labels)

        if spec.classes is not None:
            a, b = spec.classes
            train = DatasetService.filter_binary(train, a, b, spec.train_per_class)
            test_per_class = spec.test_per_class
            if test_per_class is None:
                test_per_class = min(test.class_indices(a).shape[0], test.class_indices(b).shape[0])
            test = DatasetService.filter_binary(test, a, b, test_per_class)
        else:
            if spec.train_per_class is not None:
                train = DatasetService.balanced_head(train, spec.train_per_class)
            if spec.test_per_class is not None:
                test = DatasetService.balanced_head(test, spec.test_per_class)

        logger.info("Loaded %d training and %d test samples (dimension %d)", len(train), len(test), train.dim)
        return train, test

    @staticmethod
    def select_samples(model: KnnModel, test: Dataset, cfg: ExperimentConfig) -> tuple[list[int], np.ndarray, Optional[float]]:
        """Test indices to attack, model predictions on the test set and clean accuracy"""
        predictions = model.predict_batch(test.features) if len(test) else np.empty(0, dtype=np.int64)
        clean_accuracy = float(np.mean(predictions == test.labels)) if len(test) else None
        eligible = np.arange(len(test))
        if cfg.selection.correct_only:
            eligible = eligible[predictions == test.labels]
        if cfg.selection.count is not None:
            eligible = eligible[:cfg.selection.count]
        return [int(i) for i in eligible], predictions, clean_accuracy

    @staticmethod
    def check_files(cfg: ExperimentConfig) -> None:
        for path in cfg.referenced_files():
            if not Path(path).is_file():
                raise NotFoundError(f"File not found: {path}")

    # ------------------------------------------------------------------
    # Per-sample work
    # ------------------------------------------------------------------

    def _attack_sample(
        self,
        method: Method,
        cfg: ExperimentConfig,
        model: KnnModel,
        train: Dataset,
        x: np.ndarray,
        y: int,
        index: int,
        clean_prediction: int,
    ) -> SampleRecord:
        params = cfg.attack.params
        record = SampleRecord(index=index, label=y, success=False, originally_misclassified=clean_prediction != y)
        plain_mode = params.mode == AttackMode.UNTARGETED and params.target is None
        if record.originally_misclassified and (plain_mode or method == Method.ORACLE):
            record.success, record.norm, record.predicted, record.adv = True, 0.0, clean_prediction, x.copy()
            return record

        started = time.monotonic()
        try:
            if method == Method.ORACLE:
                outcome = OracleService().exact_min_attack(train, x, y, model.k, box=cfg.attack.oracle_box)
                record.steps = outcome.cells_solved
                success, adv, norm, predicted = outcome.success, outcome.adv, outcome.norm, outcome.predicted
            else:
                service = AttackService(model)
                rng = np.random.default_rng([cfg.seed, index])
                if method == Method.BASELINE:
                    outcome = service.run_attack_sw_baseline(x, y, params, rng=rng)
                elif method == Method.ALL_TARGETS:
                    outcome = service.run_attack_all_targets(x, y, params, rng=rng)
                else:
                    outcome = service.run_attack(x, y, params, rng=rng)
                record.steps, record.restarts = outcome.steps, outcome.restarts
                success, adv, norm, predicted = outcome.success, outcome.adv, outcome.norm, outcome.predicted
        except _SAMPLE_ERRORS as e:
            logger.warning("Sample %d failed: %s", index, e)
            record.error = f"{type(e).__name__}: {e}"
            record.wall_time = time.monotonic() - started
            return record
        record.wall_time = time.monotonic() - started

        if success and not self._verify(method, cfg, model, adv, y):
            logger.warning("Sample %d: adversarial point failed re-verification", index)
            record.error = "re-verification failed"
            return record
        if success:
            record.success, record.norm, record.predicted, record.adv = True, float(norm), predicted, adv
        return record

    @staticmethod
    def _verify(method: Method, cfg: ExperimentConfig, model: KnnModel, adv: np.ndarray, y: int) -> bool:
        if method == Method.ORACLE:
            if cfg.attack.oracle_box and not is_in_unit_box(adv):
                return False
            return model.predict(adv) != y
        if not is_in_unit_box(adv):
            return False
        params = cfg.attack.params
        vote = model.vote(adv)
        if method == Method.ALL_TARGETS:
            return vote.predicted != y and (
                params.mode != AttackMode.CREDIBILITY or vote.fraction >= params.min_fraction
            )
        return AttackService.is_success(vote, y, params)

    # ------------------------------------------------------------------
    # Campaigns
    # ------------------------------------------------------------------

    def run_experiment(
        self,
        cfg: ExperimentConfig,
        method: Optional[Method] = None,
        workers: Optional[int] = None,
        progress: bool = True,
        prepared: Optional[tuple[Dataset, Dataset, KnnModel]] = None,
    ) -> Report:
        """
        Attack every selected test sample

        Per-sample errors are recorded and the campaign continues; missing
        files abort it. Records keep the test-set order whatever the pool does.
        """
        method = method or cfg.attack.method
        started = time.monotonic()
        if prepared is None:
            self.check_files(cfg)
            train, test = self.load_data(cfg.dataset)
            model = self.model_factory.build(cfg.model, train)
        else:
            train, test, model = prepared
        if method == Method.ORACLE and not model.is_plain:
            raise ConfigError("the exact oracle only supports plain Euclidean kNN models")

        selected, predictions, clean_accuracy = self.select_samples(model, test, cfg)
        # warm the shared caches before workers read them
        _ = model.training_predictions, model.input_index

        width = workers or cfg.workers or settings.workers
        records: list[Optional[SampleRecord]] = [None] * len(selected)
        with ThreadPoolExecutor(max_workers=width) as pool:
            futures = {
                pool.submit(
                    self._attack_sample, method, cfg, model, train,
                    test.features[i], int(test.labels[i]), i, int(predictions[i]),
                ): position
                for position, i in enumerate(selected)
            }
            bar = tqdm(
                as_completed(futures), total=len(futures), desc=method.value, unit="sample",
                disable=not progress or not sys.stderr.isatty(),
            )
            for future in bar:
                records[futures[future]] = future.result()

        aggregates = compute_metrics(records)
        logger.info(
            "%s: %d/%d successful, mean norm %s",
            method.value, aggregates.successes, aggregates.attacked,
            "n/a" if aggregates.mean_norm is None else f"{aggregates.mean_norm:.4f}",
        )
        return Report(
            method=method,
            records=records,
            aggregates=aggregates,
            config=cfg.model_dump(mode="json"),
            toolkit_version=settings.toolkit_version,
            clean_accuracy=clean_accuracy,
            total_runtime=time.monotonic() - started,
            include_timing=cfg.report.include_timing,
        )

    def evaluate(self, cfg: ExperimentConfig, workers: Optional[int] = None, progress: bool = True) -> dict[Method, Report]:
        """Our attack, the baseline and, for plain kNN, the exact oracle on the same samples"""
        self.check_files(cfg)
        train, test = self.load_data(cfg.dataset)
        model = self.model_factory.build(cfg.model, train)
        methods = [Method.ATTACK, Method.BASELINE]
        if model.is_plain:
            methods.append(Method.ORACLE)
        return {
            m: self.run_experiment(cfg, method=m, workers=workers, progress=progress, prepared=(train, test, model))
            for m in methods
        }

    @staticmethod
    def compare(reports: dict[Method, Report]) -> dict[str, Any]:
        """Paired statistics over samples every compared method attacked successfully"""
        ours = reports[Method.ATTACK].records
        baseline = reports[Method.BASELINE].records
        pairs = [(a.norm, b.norm) for a, b in zip(ours, baseline) if a.success and b.success]
        summary: dict[str, Any] = {
            "paired": len(pairs),
            "attack_mean_norm": float(np.mean([a for a, _ in pairs])) if pairs else None,
            "baseline_mean_norm": float(np.mean([b for _, b in pairs])) if pairs else None,
            "attack_success_rate": reports[Method.ATTACK].aggregates.success_rate,
            "baseline_success_rate": reports[Method.BASELINE].aggregates.success_rate,
        }
        if Method.ORACLE in reports:
            ratios = [
                a.norm / o.norm
                for a, o in zip(ours, reports[Method.ORACLE].records)
                if a.success and o.success and o.norm > 0
            ]
            summary["oracle_mean_norm"] = reports[Method.ORACLE].aggregates.mean_norm
            summary["median_ratio_to_oracle"] = float(statistics.median(ratios)) if ratios else None
            summary["min_ratio_to_oracle"] = min(ratios) if ratios else None
        return summary

    # ------------------------------------------------------------------
    # Reports
    # ------------------------------------------------------------------

    def emit_report(self, report: Report, path: Path) -> None:
        self.report_repository.write(report, path)
        logger.info("Wrote %d sample records to %s", len(report.records), path)

    def dump_adversarial(self, report: Report, path: Path) -> None:
        self.report_repository.write_adversarial_csv(report.records, path)

    def recompute(self, path: Path) -> tuple[Aggregates, Aggregates]:
        """Aggregates stored in a report and the ones its sample lines give"""
        report = self.report_repository.read(path)
        return report.aggregates, compute_metrics(report.records)


def load_experiment_config(path: Path) -> ExperimentConfig:
    """Parse and validate an experiment file; unknown keys are rejected"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"Config file not found: {path}")
    try:
        return ExperimentConfig.model_validate_json(path.read_text(encoding="utf-8"))
    except PydanticValidationError as e:
        raise ConfigError(f"{path}: {e}") from e
