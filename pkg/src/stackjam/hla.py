"""Hierarchical learning for the channel game.

The jammer is a stateless epsilon-greedy Q-learner that commits to a channel
for one epoch of K slots. Inside an epoch every user samples a channel from
its mixed strategy, observes its utility and applies a linear reward-inaction
update. The jammer is rewarded with the mean of its utility over the epoch.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any, Mapping

import numpy as np

from . import channel_game as cg
from .config import section
from .errors import ConfigError
from .scenario import NetworkScenario

SIMPLEX_TOL = 1e-12
# a user has settled when its modal channel carries more than this share
SETTLED_SHARE = 0.5


@dataclass(frozen=True)
class LearningParams:
    sla_step: float = 0.05
    q_learning_rate: float = 0.1
    epsilon0: float = 0.3
    epsilon_decay: float = 0.98
    epsilon_floor: float = 0.01
    slots_per_epoch: int = 50
    epochs: int = 200
    # lower bound on every channel probability; 0 gives plain reward-inaction
    strategy_floor: float = 0.01

    def __post_init__(self):
        if not 0 < self.sla_step < 1:
            raise ConfigError("sla_step must lie in (0, 1)")
        if not 0 < self.q_learning_rate <= 1:
            raise ConfigError("q_learning_rate must lie in (0, 1]")
        if not 0 <= self.epsilon0 <= 1 or not 0 <= self.epsilon_floor <= 1:
            raise ConfigError("exploration probabilities must lie in [0, 1]")
        if not 0 < self.epsilon_decay <= 1:
            raise ConfigError("epsilon_decay must lie in (0, 1]")
        if not 0 <= self.strategy_floor < 0.5:
            raise ConfigError("strategy_floor must lie in [0, 0.5)")
        if self.slots_per_epoch < 1 or self.epochs < 1:
            raise ConfigError("slots_per_epoch and epochs must be >= 1")

    def epsilon_at(self, epoch: int) -> float:
        return max(self.epsilon0 * self.epsilon_decay**epoch, self.epsilon_floor)

    @classmethod
    def from_doc(cls, doc: Mapping[str, Any]) -> "LearningParams":
        sec = section(doc, "learning", required=False)
        known = cls.__dataclass_fields__
        unknown = set(sec) - set(known)
        if unknown:
            raise ConfigError(f"unknown [learning] keys: {sorted(unknown)}")
        values = {k: int(v) if known[k].type == "int" else float(v) for k, v in sec.items()}
        return cls(**values)


@dataclass
class Trajectory:
    """Per-epoch means; index ``k`` holds epoch ``k``."""

    ewaij: np.ndarray
    sum_rate: np.ndarray
    user_rates: np.ndarray
    jammer_utility: np.ndarray
    jammer_channel: np.ndarray
    strategies: np.ndarray
    q_table: np.ndarray
    final_profile: cg.StrategyProfile | None = None
    user_updates: int = 0
    jammer_updates: int = 0
    clamped_rewards: int = 0
    diagnostics: list[str] = field(default_factory=list)

    @property
    def epochs(self) -> int:
        return self.ewaij.shape[0]

    @property
    def mean_user_rate(self) -> np.ndarray:
        return self.user_rates.mean(axis=1)

    def greedy_jammer_channel(self) -> int:
        return int(np.argmax(self.q_table))

    def tail(self, fraction: float) -> slice:
        """Slice over the last ``fraction`` of epochs (at least one)."""
        k = max(1, int(round(self.epochs * fraction)))
        return slice(self.epochs - k, self.epochs)


# -- elementary updates ------------------------------------------------------

def normalize_reward(u: float, L: float) -> float:
    return min(max(u / L, 0.0), 1.0)


def sla_update(q, chosen: int, reward_norm: float, b: float) -> np.ndarray:
    """Linear reward-inaction step on one probability vector.

    Rewards outside ``[0, 1]`` are clamped.
    """
    r = min(max(float(reward_norm), 0.0), 1.0)
    q = np.asarray(q, dtype=float)
    out = q - b * r * q
    out[chosen] = q[chosen] + b * r * (1.0 - q[chosen])
    return out / out.sum()


def q_update(Q, chosen: int, reward: float, alpha: float) -> np.ndarray:
    out = np.array(Q, dtype=float)
    out[chosen] = (1.0 - alpha) * out[chosen] + alpha * reward
    return out


def jammer_select(Q, epsilon: float, rng: np.random.Generator) -> int:
    """Epsilon-greedy; ``argmax`` breaks ties toward the smallest channel.

    Consumes exactly one uniform draw, plus one integer draw when exploring.
    """
    if rng.random() < epsilon:
        return int(rng.integers(len(Q)))
    return int(np.argmax(Q))


# -- runs --------------------------------------------------------------------

def _epoch_metrics(scenario: NetworkScenario, channels: np.ndarray, cj: int):
    jam = np.full(channels.shape[0], cj)
    _, _, r = cg.batch_rates(scenario, channels, jam)
    return (
        float(cg.batch_ewaij(scenario, channels, jam).mean()),
        r.mean(axis=0),
        float(cg.batch_jammer_utility(scenario, channels, jam).mean()),
    )


def _run(scenario: NetworkScenario, params: LearningParams, seed: int, learn_users: bool) -> Trajectory:
    n, m = scenario.num_users, scenario.num_channels
    E, K = params.epochs, params.slots_per_epoch
    b = params.sla_step
    floor = params.strategy_floor
    L = scenario.utility_constant
    W = scenario.interference_weights
    Jw = scenario.jamming_weights
    idx = np.arange(n)
    rng = np.random.default_rng(seed)

    q = np.full((n, m), 1.0 / m)
    Q = np.zeros(m)
    traj = Trajectory(
        ewaij=np.empty(E),
        sum_rate=np.empty(E),
        user_rates=np.empty((E, n)),
        jammer_utility=np.empty(E),
        jammer_channel=np.empty(E, dtype=np.intp),
        strategies=np.empty((E, n, m)),
        q_table=Q,
    )
    for k in range(E):
        cj = jammer_select(Q, params.epsilon_at(k), rng)
        draws = rng.random((K, n))
        if learn_users:
            channels = np.empty((K, n), dtype=np.intp)
            for t in range(K):
                cum = np.cumsum(q, axis=1)
                a = np.minimum((draws[t][:, None] >= cum).sum(axis=1), m - 1)
                channels[t] = a
                penalty = (W[:, idx, a] * (a[:, None] == a[None, :])).sum(axis=0)
                penalty += Jw[idx, a] * (a == cj)
                r = (L - penalty) / L
                if r.min() < 0.0 or r.max() > 1.0:
                    traj.clamped_rewards += int(np.count_nonzero((r < 0.0) | (r > 1.0)))
                    r = np.clip(r, 0.0, 1.0)
                step = b * r
                chosen = q[idx, a]
                q -= step[:, None] * q
                q[idx, a] = chosen + step * (1.0 - chosen)
                if floor:
                    np.maximum(q, floor, out=q)
                q /= q.sum(axis=1, keepdims=True)
            traj.user_updates += K * n
        else:
            channels = np.minimum((draws * m).astype(np.intp), m - 1)

        ewaij_k, rates_k, uj = _epoch_metrics(scenario, channels, cj)
        Q = q_update(Q, cj, uj, params.q_learning_rate)
        traj.jammer_updates += 1
        traj.ewaij[k] = ewaij_k
        traj.user_rates[k] = rates_k
        traj.sum_rate[k] = rates_k.sum()
        traj.jammer_utility[k] = uj
        traj.jammer_channel[k] = cj
        traj.strategies[k] = q

    traj.q_table = Q
    if traj.clamped_rewards:
        traj.diagnostics.append(
            f"{traj.clamped_rewards} rewards clamped to [0, 1]; utility_constant is too small"
        )
    if learn_users and np.all(q.max(axis=1) > SETTLED_SHARE):
        traj.final_profile = cg.StrategyProfile(tuple(np.argmax(q, axis=1)), traj.greedy_jammer_channel())
    return traj


def hla_run(scenario: NetworkScenario, params: LearningParams, seed: int) -> Trajectory:
    """Hierarchical learning run; bit-identical for a fixed seed.

    After each reward-inaction step the users' probabilities are lifted to
    ``params.strategy_floor`` and renormalized, which keeps a user able to
    leave a channel the jammer moves onto. ``final_profile`` is set when
    every user is within ``0.02`` of the floor-limited pure strategy; its
    jammer channel is the greedy choice of the final Q table.
    """
    return _run(scenario, params, seed, learn_users=True)


def random_baseline_run(
    scenario: NetworkScenario, slots: int, seed: int, params: LearningParams | None = None
) -> Trajectory:
    """Users pick uniform channels every slot; the jammer learns as in :func:`hla_run`.

    ``slots`` is rounded up to whole epochs of ``params.slots_per_epoch``.
    """
    params = params or LearningParams()
    epochs = max(1, -(-slots // params.slots_per_epoch))
    return _run(scenario, replace(params, epochs=epochs), seed, learn_users=False)
