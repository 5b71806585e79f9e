"""
Integration Tests on reduced binary MNIST (3 vs 5)

Skipped unless KNNADV_MNIST_DIR holds the IDX files.
"""

import time

import pytest

from app.application.factories.model_factory import ModelFactory
from app.application.services.dataset_service import DatasetService
from app.application.services.experiment_service import ExperimentService
from app.domain.models.report import Method
from app.infrastructure.repositories.dataset_repository_impl import DatasetRepositoryImpl
from app.infrastructure.repositories.model_repository_impl import ModelRepositoryImpl
from app.infrastructure.repositories.report_repository_impl import ReportRepositoryImpl
from app.schemas.experiment import ExperimentConfig


def _find(directory, stem):
    for name in (stem, f"{stem}.gz"):
        if (directory / name).is_file():
            return directory / name
    pytest.skip(f"{stem} not found in {directory}")


@pytest.fixture(scope="module")
def mnist_config(mnist_dir) -> ExperimentConfig:
    return ExperimentConfig.model_validate(
        {
            "dataset": {
                "kind": "idx",
                "train_images": str(_find(mnist_dir, "train-images-idx3-ubyte")),
                "train_labels": str(_find(mnist_dir, "train-labels-idx1-ubyte")),
                "test_images": str(_find(mnist_dir, "t10k-images-idx3-ubyte")),
                "test_labels": str(_find(mnist_dir, "t10k-labels-idx1-ubyte")),
                "classes": [3, 5],
                "train_per_class": 200,
                "test_per_class": 15,
            },
            "model": {"kind": "plain", "k": 1},
            "attack": {"params": {"m": 2, "p": 20, "q": 3}},
            "seed": 0,
        }
    )


@pytest.fixture(scope="module")
def service() -> ExperimentService:
    return ExperimentService(
        dataset_service=DatasetService(DatasetRepositoryImpl()),
        model_factory=ModelFactory(ModelRepositoryImpl()),
        report_repository=ReportRepositoryImpl(),
    )


def test_reduced_mnist_against_oracle(service, mnist_config):
    """Test full success and a mean norm within 20% of the exact minimum"""
    # Arrange
    started = time.monotonic()
    train, test = service.load_data(mnist_config.dataset)
    model = service.model_factory.build(mnist_config.model, train)
    prepared = (train, test, model)

    # Act
    ours = service.run_experiment(mnist_config, method=Method.ATTACK, progress=False, prepared=prepared)
    exact = service.run_experiment(mnist_config, method=Method.ORACLE, progress=False, prepared=prepared)

    # Assert
    assert len(test) == 30
    assert ours.aggregates.success_rate == 1.0
    assert abs(ours.aggregates.mean_norm / exact.aggregates.mean_norm - 1.0) <= 0.2
    assert time.monotonic() - started < 15 * 60


def test_reduced_mnist_is_deterministic(service, mnist_config, tmp_path):
    """Test identical seeds give identical report bytes"""
    train, test = service.load_data(mnist_config.dataset)
    model = service.model_factory.build(mnist_config.model, train)
    cfg = mnist_config.model_copy(update={"selection": mnist_config.selection.model_copy(update={"count": 5})})

    for name in ("a.jsonl", "b.jsonl"):
        report = service.run_experiment(cfg, method=Method.ATTACK, progress=False, prepared=(train, test, model))
        service.emit_report(report, tmp_path / name)

    assert (tmp_path / "a.jsonl").read_bytes() == (tmp_path / "b.jsonl").read_bytes()
