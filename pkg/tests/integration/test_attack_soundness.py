"""
Integration Tests for feasibility and soundness of attack results
"""

import numpy as np
import pytest

from app.application.services.attack_service import AttackService
from app.application.services.dataset_service import DatasetService
from app.domain.models.attack import AttackMode, ObjectiveKind
from app.domain.models.knn_model import KnnModel
from app.schemas.attack import AttackConfig
from app.utils.validators import is_in_unit_box

RUNS = 1000
BATCH = 50


def _run_config(number: int, rng: np.random.Generator) -> tuple[KnnModel, AttackConfig, np.ndarray, int]:
    k = (1, 3)[number % 2]
    three_class = number % 5 == 0
    if three_class:
        centers = [[0.2, 0.2], [0.8, 0.2], [0.5, 0.8]]
    else:
        centers = [rng.uniform(0.2, 0.45, size=2), rng.uniform(0.55, 0.8, size=2)]
    train = DatasetService.gen_gaussian_blobs(number, centers, float(rng.uniform(0.05, 0.2)), 8)
    model = KnnModel.plain(train, k)

    mode = AttackMode.UNTARGETED
    extra = {}
    if three_class:
        mode = AttackMode.TARGETED
    elif number % 7 == 0:
        mode = AttackMode.CREDIBILITY
        extra["min_fraction"] = float(rng.choice([0.5, 1.0]))
    y = int(rng.integers(0, train.num_classes))
    if mode == AttackMode.TARGETED:
        extra["target"] = (y + 1) % train.num_classes
    config = AttackConfig(
        k=k,
        q=1,
        max_steps=60,
        bs_steps=2,
        check_period=10,
        mode=mode,
        objective=ObjectiveKind.SIGMOID if number % 3 == 0 else ObjectiveKind.RELU,
        **extra,
    )
    x = rng.uniform(0.0, 1.0, size=2)
    return model, config, x, y


@pytest.mark.parametrize("batch", range(RUNS // BATCH))
def test_results_are_feasible_and_sound(batch):
    """Test every reported point lies in the box and re-classifies as reported"""
    for number in range(batch * BATCH, (batch + 1) * BATCH):
        # Arrange
        rng = np.random.default_rng([11, number])
        model, config, x, y = _run_config(number, rng)

        # Act
        result = AttackService(model).run_attack(x, y, config, rng=rng)

        # Assert
        if not result.success:
            assert result.adv is None
            continue
        assert is_in_unit_box(result.adv)
        assert AttackService.is_success(model.vote(result.adv), y, config)
        assert result.norm == pytest.approx(float(np.linalg.norm(result.adv - x)), abs=1e-12)
