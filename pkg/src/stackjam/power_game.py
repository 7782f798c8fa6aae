"""Bayesian anti-jamming power-control game with one user and one jammer.

The user (leader) picks a transmit power knowing only the distributions of
the link gains; the jammer (follower) observes the user's power with a
multiplicative error and best-responds. Utilities:

    user:    E[delta] - C_s * p_s
    jammer: -E[delta] - C_j * p_j

with ``delta = p_s h_s / (sigma2 + p_j h_j)`` and ``h_s``, ``h_j`` independent
discrete random variables. The game is solved by backward induction: the
follower's problem is concave in ``p_j`` and is solved by golden-section
search; the leader's problem is solved on a grid followed by golden-section
refinement. ``grid_oracle`` solves the same game by exhaustive double grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Any, Mapping

import numpy as np

from .config import field as cfg_field
from .config import section
from .errors import ConfigError
from .search import golden_section_max

PROB_TOL = 1e-12
BR_TOL = 1e-8
LEADER_GRID = 1000


@dataclass(frozen=True)
class DiscreteDistribution:
    values: tuple[float, ...]
    probs: tuple[float, ...]

    def __post_init__(self):
        values = tuple(float(v) for v in np.atleast_1d(self.values))
        probs = tuple(float(p) for p in np.atleast_1d(self.probs))
        if len(values) == 0 or len(values) != len(probs):
            raise ConfigError("distribution needs matching, nonempty value and probability lists")
        if any(p < 0 for p in probs) or abs(math.fsum(probs) - 1.0) > PROB_TOL:
            raise ConfigError(f"probabilities must be nonnegative and sum to 1, got {probs}")
        if any(not math.isfinite(v) or v < 0 for v in values):
            raise ConfigError(f"support points must be finite and nonnegative, got {values}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)

    @classmethod
    def point(cls, value: float) -> "DiscreteDistribution":
        return cls((value,), (1.0,))

    @property
    def mean(self) -> float:
        return math.fsum(v * p for v, p in zip(self.values, self.probs))

    @property
    def is_degenerate(self) -> bool:
        return sum(p > 0 for p in self.probs) == 1


@dataclass(frozen=True)
class PowerGameSpec:
    h_s: DiscreteDistribution
    h_j: DiscreteDistribution
    noise_power: float
    user_cost: float
    jammer_cost: float
    user_power_max: float
    jammer_power_max: float
    epsilon: float = 0.0

    def __post_init__(self):
        if self.noise_power <= 0:
            raise ConfigError("noise_power must be positive")
        if self.user_cost <= 0 or self.jammer_cost <= 0:
            raise ConfigError("costs must be positive")
        if self.user_power_max <= 0 or self.jammer_power_max <= 0:
            raise ConfigError("power caps must be positive")
        if self.epsilon <= -1:
            raise ConfigError("observation error epsilon must exceed -1")

    def with_epsilon(self, epsilon: float) -> "PowerGameSpec":
        return replace(self, epsilon=float(epsilon))

    def averaged(self) -> "PowerGameSpec":
        """Surrogate with every distribution collapsed onto its mean."""
        return replace(
            self,
            h_s=DiscreteDistribution.point(self.h_s.mean),
            h_j=DiscreteDistribution.point(self.h_j.mean),
        )

    def observed(self, p_s):
        return np.asarray(p_s, dtype=float) * (1.0 + self.epsilon)

    @classmethod
    def from_doc(cls, doc: Mapping[str, Any]) -> "PowerGameSpec":
        sec = section(doc, "power_game")

        def get(key, *default):
            return cfg_field(sec, "power_game", key, *default)

        return cls(
            h_s=DiscreteDistribution(get("h_s_values"), get("h_s_probs")),
            h_j=DiscreteDistribution(get("h_j_values"), get("h_j_probs")),
            noise_power=float(get("noise_power")),
            user_cost=float(get("user_cost")),
            jammer_cost=float(get("jammer_cost")),
            user_power_max=float(get("user_power_max")),
            jammer_power_max=float(get("jammer_power_max")),
            epsilon=float(get("epsilon", 0.0)),
        )


@dataclass(frozen=True)
class EquilibriumReport:
    user_power: float
    jammer_power: float
    observed_power: float
    user_utility: float
    jammer_utility: float
    sinr: float
    rate: float

    def as_dict(self) -> dict[str, float]:
        return {
            "user_power": self.user_power,
            "jammer_power": self.jammer_power,
            "observed_power": self.observed_power,
            "user_utility": self.user_utility,
            "jammer_utility": self.jammer_utility,
            "sinr": self.sinr,
            "rate": self.rate,
        }


# -- expectations ------------------------------------------------------------

def sinr(p_s, p_j, h_s, h_j, noise_power):
    return p_s * h_s / (noise_power + p_j * h_j)


def _inverse_interference(p_j, spec: PowerGameSpec):
    """``E[1 / (sigma2 + p_j h_j)]``, broadcast over ``p_j``."""
    p_j = np.asarray(p_j, dtype=float)
    out = np.zeros_like(p_j)
    for v, p in zip(spec.h_j.values, spec.h_j.probs):
        out = out + p / (spec.noise_power + p_j * v)
    return out


def expected_sinr(p_s, p_j, spec: PowerGameSpec):
    """``E[delta]``; independence of the gains factorizes the expectation."""
    return np.asarray(p_s, dtype=float) * spec.h_s.mean * _inverse_interference(p_j, spec)


def expected_user_utility(p_s, p_j, spec: PowerGameSpec):
    return expected_sinr(p_s, p_j, spec) - spec.user_cost * np.asarray(p_s, dtype=float)


def expected_jammer_utility(p_s_observed, p_j, spec: PowerGameSpec):
    return -expected_sinr(p_s_observed, p_j, spec) - spec.jammer_cost * np.asarray(p_j, dtype=float)


def expected_rate(p_s: float, p_j: float, spec: PowerGameSpec) -> float:
    """``E[log2(1 + delta)]`` over the joint support, in bit/s per hertz."""
    terms = []
    for vs, ps in zip(spec.h_s.values, spec.h_s.probs):
        for vj, pj in zip(spec.h_j.values, spec.h_j.probs):
            terms.append(ps * pj * math.log2(1.0 + sinr(p_s, p_j, vs, vj, spec.noise_power)))
    return math.fsum(terms)


# -- backward induction ------------------------------------------------------

def jammer_best_response(p_s_observed, spec: PowerGameSpec, tol: float = BR_TOL):
    """Jammer power maximizing its expected utility for an observed user power.

    Accepts a scalar or an array of observations.
    """
    obs = np.asarray(p_s_observed, dtype=float)
    if np.any(obs < 0) or not np.all(np.isfinite(obs)):
        raise ConfigError("observed user power must be finite and nonnegative")
    scalar = obs.ndim == 0
    obs = np.atleast_1d(obs)
    lo = np.zeros_like(obs)
    hi = np.full_like(obs, spec.jammer_power_max)
    x, _ = golden_section_max(lambda pj: expected_jammer_utility(obs, pj, spec), lo, hi, tol)
    x = _polish_response(x, obs, spec)
    x = np.where(obs == 0.0, 0.0, x)
    return float(x[0]) if scalar else x


def _jammer_marginal(p_j, obs, spec: PowerGameSpec):
    """Derivative of the expected jammer utility in ``p_j``; decreasing in ``p_j``."""
    total = np.zeros(np.broadcast(p_j, obs).shape)
    for v, p in zip(spec.h_j.values, spec.h_j.probs):
        total = total + p * v / (spec.noise_power + p_j * v) ** 2
    return obs * spec.h_s.mean * total - spec.jammer_cost


def _polish_response(x, obs, spec: PowerGameSpec, steps: int = 80):
    """Settle the golden-section point with the first-order condition.

    Comparing utility values cannot locate a flat maximum much closer than
    the golden tolerance, and that residue would show up as noise in the
    leader's objective. The marginal utility is decreasing, so its sign at
    the endpoints decides boundary optima exactly, and for an interior
    optimum its sign at ``x`` tells which side to bracket; bisection then
    converges to rounding level.
    """
    top = spec.jammer_power_max
    at_zero = _jammer_marginal(0.0, obs, spec) <= 0
    at_top = _jammer_marginal(top, obs, spec) >= 0
    right = _jammer_marginal(x, obs, spec) > 0
    lo = np.where(right, x, 0.0)
    hi = np.where(right, top, x)
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        up = _jammer_marginal(mid, obs, spec) > 0
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
    return np.where(at_zero, 0.0, np.where(at_top, top, 0.5 * (lo + hi)))


def closed_form_best_response(p_s_observed: float, h_s: float, h_j: float, spec: PowerGameSpec) -> float:
    """Follower best response for point-mass gains.

    Setting the derivative of ``-p h_s/(sigma2 + p_j h_j) - C_j p_j`` to zero
    gives ``sigma2 + p_j h_j = sqrt(p h_s h_j / C_j)``.
    """
    if h_j == 0 or p_s_observed == 0:
        return 0.0
    p_j = (math.sqrt(p_s_observed * h_s * h_j / spec.jammer_cost) - spec.noise_power) / h_j
    return min(max(p_j, 0.0), spec.jammer_power_max)


def leader_objective(p_s, spec: PowerGameSpec):
    """User utility when the jammer best-responds to the observed power."""
    p_j = jammer_best_response(spec.observed(p_s), spec)
    return expected_user_utility(p_s, p_j, spec)


def report_at(p_s: float, p_j: float, spec: PowerGameSpec) -> EquilibriumReport:
    return EquilibriumReport(
        user_power=float(p_s),
        jammer_power=float(p_j),
        observed_power=float(spec.observed(p_s)),
        user_utility=float(expected_user_utility(p_s, p_j, spec)),
        jammer_utility=float(expected_jammer_utility(p_s, p_j, spec)),
        sinr=float(expected_sinr(p_s, p_j, spec)),
        rate=expected_rate(p_s, p_j, spec),
    )


def leader_optimize(spec: PowerGameSpec, grid_points: int = LEADER_GRID, tol: float = BR_TOL) -> EquilibriumReport:
    """Stackelberg equilibrium by backward induction.

    The leader objective is scanned on ``grid_points`` powers; golden-section
    search then refines inside the bracket around the best grid point. The
    refined point is kept only if it does not lose to the grid point.
    """
    grid = np.linspace(0.0, spec.user_power_max, grid_points)
    values = leader_objective(grid, spec)
    i = int(np.argmax(values))
    lo = grid[max(i - 1, 0)]
    hi = grid[min(i + 1, grid_points - 1)]
    x, fx = golden_section_max(lambda ps: leader_objective(ps, spec), np.array([lo]), np.array([hi]), tol)
    p_s = float(x[0]) if fx[0] >= values[i] else float(grid[i])
    p_j = jammer_best_response(float(spec.observed(p_s)), spec)
    return report_at(p_s, p_j, spec)


def _refine(grid: np.ndarray, k: np.ndarray, resolution: int) -> np.ndarray:
    """Rows of ``resolution`` points spanning the two cells around ``grid[k]``."""
    lo = grid[np.maximum(k - 1, 0)]
    hi = grid[np.minimum(k + 1, grid.size - 1)]
    return lo[..., None] + (hi - lo)[..., None] * np.linspace(0.0, 1.0, resolution)


def _grid_responses(ps: np.ndarray, spec: PowerGameSpec, resolution: int, levels: int) -> np.ndarray:
    pj = np.broadcast_to(np.linspace(0.0, spec.jammer_power_max, resolution), (ps.size, resolution))
    obs = spec.observed(ps)[:, None]
    rows = np.arange(ps.size)
    for level in range(levels):
        k = np.argmax(expected_jammer_utility(obs, pj, spec), axis=1)
        if level == levels - 1:
            return pj[rows, k]
        lo = pj[rows, np.maximum(k - 1, 0)]
        hi = pj[rows, np.minimum(k + 1, resolution - 1)]
        pj = lo[:, None] + (hi - lo)[:, None] * np.linspace(0.0, 1.0, resolution)


def grid_oracle(spec: PowerGameSpec, resolution: int = 1000, levels: int = 3) -> EquilibriumReport:
    """Exhaustive nested-grid solution, independent of the search routines.

    For every grid power of the user the follower picks the best grid power
    against the observed value; the leader then picks the best grid power
    against those responses. Ties go to the smaller power. Each axis is
    enumerated ``levels`` times, every pass spanning the two cells around
    the previous winner. A single pass is too coarse: the leader profits
    from the follower's rounding, and on a flat leader objective that bias
    moves the chosen user power by several steps.
    """
    ps = np.linspace(0.0, spec.user_power_max, resolution)
    for level in range(levels):
        response = _grid_responses(ps, spec, resolution, levels)
        j = int(np.argmax(expected_user_utility(ps, response, spec)))
        if level == levels - 1:
            return report_at(ps[j], response[j], spec)
        ps = _refine(ps, np.array(j), resolution)


def average_game_baseline(spec: PowerGameSpec) -> EquilibriumReport:
    """User power chosen as if every gain were equal to its mean.

    The jammer still best-responds under the true distributions, and the
    resulting powers are evaluated under the true distributions.
    """
    p_s = leader_optimize(spec.averaged()).user_power
    p_j = jammer_best_response(float(spec.observed(p_s)), spec)
    return report_at(p_s, p_j, spec)


def bayesian_solution(spec: PowerGameSpec) -> EquilibriumReport:
    return leader_optimize(spec)


def random_spec(
    rng: np.random.Generator,
    support: int = 2,
    epsilon: float | None = None,
) -> PowerGameSpec:
    """Randomized spec with ``support``-point gain distributions, for property checks."""

    def dist():
        values = rng.uniform(0.2, 2.0, size=support)
        probs = rng.dirichlet(np.ones(support))
        probs[-1] = 1.0 - math.fsum(probs[:-1])
        return DiscreteDistribution(tuple(values), tuple(probs))

    return PowerGameSpec(
        h_s=dist(),
        h_j=dist(),
        noise_power=float(rng.uniform(0.2, 2.0)),
        user_cost=float(rng.uniform(0.05, 0.5)),
        jammer_cost=float(rng.uniform(0.05, 0.5)),
        user_power_max=float(rng.uniform(2.0, 20.0)),
        jammer_power_max=float(rng.uniform(2.0, 20.0)),
        epsilon=float(rng.uniform(-0.3, 0.3)) if epsilon is None else epsilon,
    )

