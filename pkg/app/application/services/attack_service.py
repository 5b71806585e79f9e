"""
Attack Service
Minimum-norm adversarial attacks on kNN models
"""

import logging
import math
import time
from typing import Callable, Optional

import numpy as np

from app.application.factories.guide_factory import GuideFactory
from app.application.services.objective_service import (
    inverse_box,
    objective_and_grad,
    refresh_thresholds,
    reparam_box,
)
from app.domain.models.attack import (
    AttackMode,
    AttackResult,
    AttackState,
    GuideHeuristic,
    GuideSet,
    ObjectiveKind,
    OptimizerKind,
)
from app.domain.models.knn_model import KnnModel
from app.domain.models.vote import Vote
from app.infrastructure.optim.optimizers import Adam, RMSprop
from app.schemas.attack import AttackConfig
from app.utils.exceptions import ArgumentError, InsufficientSamplesError, OptimizerError
from app.utils.validators import as_vector, is_in_unit_box

logger = logging.getLogger(__name__)


def binary_search_c(runner: Callable[[float], bool], c_init: float, c_lo: float, c_hi: float, steps: int) -> float:
    """
    Geometric bisection on c

    A success raises c toward c_hi (a larger norm penalty), a failure lowers it
    toward c_lo. The runner keeps its own best result; the last c tried is returned.
    """
    if not c_lo < c_hi:
        raise ArgumentError("c_lo must be smaller than c_hi")
    lo, hi, c = c_lo, c_hi, c_init
    for _ in range(steps):
        if runner(c):
            lo = c
            c = math.sqrt(c * hi)
        else:
            hi = c
            c = math.sqrt(lo * c)
    return c


class AttackService:
    """Gradient-based attacks against one kNN model"""

    def __init__(self, model: KnnModel):
        self.model = model

    # ------------------------------------------------------------------
    # Success predicate
    # ------------------------------------------------------------------

    @staticmethod
    def is_success(vote: Vote, y: int, config: AttackConfig) -> bool:
        """Whether a vote counts as a successful attack under the configured mode"""
        if config.target is not None:
            if vote.predicted != config.target:
                return False
        elif vote.predicted == y:
            return False
        if config.mode == AttackMode.CREDIBILITY:
            return vote.fraction >= config.min_fraction
        return True

    # ------------------------------------------------------------------
    # Building blocks
    # ------------------------------------------------------------------

    def init_restarts(
        self,
        x: np.ndarray,
        y: int,
        q: int,
        rng: np.random.Generator,
        noise_std: float,
        target: Optional[int] = None,
    ) -> list[np.ndarray]:
        """
        The clean point followed by the q nearest training points the model
        classifies away from y (or as target), each with Gaussian noise added
        and clipped back into the unit box.
        """
        if q < 0:
            raise ArgumentError("q must be non-negative")
        predictions = self.model.training_predictions
        wrong = np.flatnonzero(predictions == target) if target is not None else np.flatnonzero(predictions != y)

        chosen = np.empty(0, dtype=np.int64)
        if q > 0 and wrong.size:
            dists = self.model.input_index.distances(x)[wrong]
            chosen = wrong[np.lexsort((wrong, dists))[:q]]
        if chosen.size < q:
            logger.warning("Only %d of %d restart points are classified away from class %d", chosen.size, q, y)

        starts = [x] + [self.model.train.features[i] for i in chosen]
        return [np.clip(s + rng.normal(0.0, noise_std, size=s.shape), 0.0, 1.0) for s in starts]

    def _select_guides(self, feats: list[np.ndarray], y: int, m: int, config: AttackConfig) -> GuideSet:
        # guides come from the first layer, thresholds from every layer
        guides = GuideFactory.select(config.guide_heuristic, self.model.indices[0], feats[0], y, m, target=config.target)
        guides = guides.with_features(self.model.layer_features)
        return guides.with_eta(refresh_thresholds(self.model.indices, feats, self.model.k))

    def _optimizer(self, config: AttackConfig):
        if config.optimizer == OptimizerKind.ADAM:
            return Adam(learning_rate=config.lr, beta1=config.adam_beta1, beta2=config.adam_beta2)
        return RMSprop(learning_rate=config.lr, decay_rate=config.rms_decay)

    def _check(self, x_hat: np.ndarray, y: int, config: AttackConfig, state: AttackState) -> bool:
        vote = self.model.vote(x_hat)
        if not self.is_success(vote, y, config):
            return False
        state.save_if_better(x_hat, vote.predicted)
        return True

    def _descend(
        self,
        x: np.ndarray,
        y: int,
        start: np.ndarray,
        config: AttackConfig,
        state: AttackState,
        fixed_guides: Optional[GuideSet] = None,
    ) -> bool:
        """One gradient-descent run at the state's c and m; True when any check succeeded"""
        model = self.model
        z = inverse_box(start)
        optimizer = self._optimizer(config)
        guides = fixed_guides
        succeeded = False

        step = 0
        try:
            for step in range(config.max_steps):
                x_hat, jac = reparam_box(z)
                if fixed_guides is None and step % config.p == 0:
                    guides = self._select_guides(model.features_of(x_hat), y, state.m, config)
                if step % config.check_period == 0:
                    succeeded |= self._check(x_hat, y, config, state)

                _, grad = objective_and_grad(
                    x, x_hat - x, guides, model.feature_map, model.layers, model.metrics,
                    state.c, config.delta_margin, config.objective,
                )
                try:
                    optimizer.update([z], [grad * jac])
                except OptimizerError:
                    logger.debug("Non-finite gradient at step %d (c=%.4g), restart aborted", step, state.c)
                    state.steps += 1
                    return succeeded
                state.steps += 1

            x_hat, _ = reparam_box(z)
            succeeded |= self._check(x_hat, y, config, state)
        except (InsufficientSamplesError, ArgumentError) as exc:
            # guide selection or a cosine query hit degenerate data
            logger.debug("Restart aborted at step %d (c=%.4g): %s", step, state.c, exc)
        return succeeded

    def _clean_success(self, x: np.ndarray, y: int, config: AttackConfig) -> Optional[AttackResult]:
        vote = self.model.vote(x)
        if self.is_success(vote, y, config):
            return AttackResult(
                success=True, adv=x.copy(), norm=0.0, steps=0, restarts=0,
                predicted=vote.predicted, c=None, m=None,
            )
        return None

    def _finish(self, state: AttackState, y: int, config: AttackConfig, started: float) -> AttackResult:
        wall_time = time.monotonic() - started
        if not state.success:
            return AttackResult.failure(steps=state.steps, restarts=state.restarts, wall_time=wall_time)

        adv = state.best_adv
        vote = self.model.vote(adv)
        if not (is_in_unit_box(adv) and self.is_success(vote, y, config)):
            logger.warning("Saved adversarial point failed re-verification")
            return AttackResult.failure(steps=state.steps, restarts=state.restarts, wall_time=wall_time)

        return AttackResult(
            success=True,
            adv=adv,
            norm=state.best_norm,
            steps=state.steps,
            restarts=state.restarts,
            wall_time=wall_time,
            predicted=vote.predicted,
            c=state.best_c,
            m=state.best_m,
            saved_norms=list(state.saved_norms),
        )

    def _validate(self, x: np.ndarray, y: int, config: AttackConfig) -> np.ndarray:
        x = as_vector(x, self.model.input_dim, "x")
        if not 0 <= y < self.model.num_classes:
            raise ArgumentError(f"label {y} is outside [0, {self.model.num_classes})")
        if config.k != self.model.k:
            raise ArgumentError(f"config k={config.k} does not match the model's k={self.model.k}")
        if config.target is not None:
            if config.target == y:
                raise ArgumentError("the target label must differ from the true label")
            if config.target >= self.model.num_classes:
                raise ArgumentError(f"target {config.target} is outside [0, {self.model.num_classes})")
        return x

    # ------------------------------------------------------------------
    # Attacks
    # ------------------------------------------------------------------

    def run_attack(
        self,
        x: np.ndarray,
        y: int,
        config: AttackConfig,
        rng: Optional[np.random.Generator] = None,
    ) -> AttackResult:
        """
        Guided hinge attack with restarts, binary search on c and guide-count reduction

        Every restart runs a full binary search on c; after a restart with any
        success the guide count drops by two, never below its floor. The
        smallest successful perturbation over all (restart, c) pairs is returned.
        """
        started = time.monotonic()
        x = self._validate(x, y, config)
        clean = self._clean_success(x, y, config)
        if clean is not None:
            clean.wall_time = time.monotonic() - started
            return clean

        rng = rng if rng is not None else np.random.default_rng(config.seed)
        starts = self.init_restarts(x, y, config.q, rng, config.init_noise_std, target=config.target)
        state = AttackState(x=x, c=config.c_init, m=config.m)

        for r, start in enumerate(starts):
            state.restarts += 1

            outcomes: list[bool] = []

            def runner(c: float) -> bool:
                state.c = c
                ok = self._descend(x, y, start, config, state)
                outcomes.append(ok)
                return ok

            binary_search_c(runner, config.c_init, config.c_lo, config.c_hi, config.bs_steps)
            restart_success = any(outcomes)

            logger.debug("restart %d/%d m=%d success=%s best=%.6g", r + 1, len(starts), state.m, restart_success, state.best_norm)
            if restart_success:
                state.m = max(config.m_floor, state.m - 2)

        return self._finish(state, y, config, started)

    def run_attack_sw_baseline(
        self,
        x: np.ndarray,
        y: int,
        config: AttackConfig,
        rng: Optional[np.random.Generator] = None,
    ) -> AttackResult:
        """
        Sigmoid attack with fixed guides

        One start at the clean point; guides and thresholds come from x and are
        never refreshed; Adam drives the descent; c is found by binary search.
        """
        started = time.monotonic()
        config = config.with_updates(
            objective=ObjectiveKind.SIGMOID,
            optimizer=OptimizerKind.ADAM,
            guide_heuristic=GuideHeuristic.SW_SAME_CLASS,
        )
        x = self._validate(x, y, config)
        clean = self._clean_success(x, y, config)
        if clean is not None:
            clean.wall_time = time.monotonic() - started
            return clean

        state = AttackState(x=x, c=config.c_init, m=config.m, restarts=1)
        try:
            guides = self._select_guides(self.model.features_of(x), y, config.m, config)
        except (InsufficientSamplesError, ArgumentError) as exc:
            logger.debug("Baseline guide selection failed: %s", exc)
            return self._finish(state, y, config, started)

        def runner(c: float) -> bool:
            state.c = c
            return self._descend(x, y, x, config, state, fixed_guides=guides)

        binary_search_c(runner, config.c_init, config.c_lo, config.c_hi, config.bs_steps)
        return self._finish(state, y, config, started)

    def run_attack_targeted(
        self,
        x: np.ndarray,
        y: int,
        target: int,
        config: AttackConfig,
        rng: Optional[np.random.Generator] = None,
    ) -> AttackResult:
        if target == y:
            raise ArgumentError("the target label must differ from the true label")
        return self.run_attack(x, y, config.with_updates(mode=AttackMode.TARGETED, target=target), rng=rng)

    def run_attack_credibility(
        self,
        x: np.ndarray,
        y: int,
        min_fraction: float,
        config: AttackConfig,
        rng: Optional[np.random.Generator] = None,
    ) -> AttackResult:
        """Only points misclassified with at least min_fraction of all neighbors count"""
        if not 0.0 <= min_fraction <= 1.0:
            raise ArgumentError("min_fraction must lie in [0, 1]")
        return self.run_attack(
            x, y, config.with_updates(mode=AttackMode.CREDIBILITY, min_fraction=min_fraction), rng=rng
        )

    def run_attack_all_targets(
        self,
        x: np.ndarray,
        y: int,
        config: AttackConfig,
        rng: Optional[np.random.Generator] = None,
    ) -> AttackResult:
        """One targeted attack per wrong class; the smallest success wins"""
        started = time.monotonic()
        x = self._validate(x, y, config)
        rng = rng if rng is not None else np.random.default_rng(config.seed)
        best: Optional[AttackResult] = None
        steps = restarts = 0
        for target in range(self.model.num_classes):
            if target == y:
                continue
            result = self.run_attack_targeted(x, y, target, config, rng=rng)
            steps += result.steps
            restarts += result.restarts
            if result.success and (best is None or result.norm < best.norm):
                best = result

        wall_time = time.monotonic() - started
        if best is None:
            return AttackResult.failure(steps=steps, restarts=restarts, wall_time=wall_time)
        best.steps, best.restarts, best.wall_time = steps, restarts, wall_time
        return best
