"""Discrete anti-jamming channel-selection game.

Users pick channels, the jammer picks one channel to jam. Every quantity here
has a batch form working on an ``(P, N)`` array of user channels plus a
length-``P`` array of jammer channels; the single-profile functions are thin
wrappers. Channels are 0-based.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import InstanceTooLargeError, ModelViolation
from .scenario import SYMMETRY_RTOL, NetworkScenario

MAX_PROFILES = 10**6
_CHUNK = 1 << 15


@dataclass(frozen=True)
class StrategyProfile:
    user_channels: tuple[int, ...]
    jammer_channel: int

    def __post_init__(self):
        object.__setattr__(self, "user_channels", tuple(int(a) for a in self.user_channels))
        object.__setattr__(self, "jammer_channel", int(self.jammer_channel))

    def validate(self, scenario: NetworkScenario) -> None:
        m = scenario.num_channels
        if len(self.user_channels) != scenario.num_users:
            raise IndexError(f"profile has {len(self.user_channels)} users, scenario has {scenario.num_users}")
        if not all(0 <= a < m for a in self.user_channels) or not 0 <= self.jammer_channel < m:
            raise IndexError(f"channel index outside 0..{m - 1}: {self}")

    def deviate(self, user: int, channel: int) -> "StrategyProfile":
        chans = list(self.user_channels)
        chans[user] = channel
        return StrategyProfile(tuple(chans), self.jammer_channel)


@dataclass(frozen=True)
class RateReport:
    interference: np.ndarray
    jamming: np.ndarray
    rates: np.ndarray

    @property
    def sum_rate(self) -> float:
        return float(self.rates.sum())


@dataclass(frozen=True)
class StackelbergSolution:
    jammer_channel: int
    profile: StrategyProfile
    jammer_utility: float
    ewaij: float
    potential: float


def co_channel(a: int, b: int) -> int:
    return int(a == b)


# -- batch kernels -----------------------------------------------------------

def _gather_pair_weights(scenario: NetworkScenario, channels: np.ndarray) -> np.ndarray:
    """``out[p, m, n] = W[m, n, a_n]`` masked to co-channel pairs."""
    n = scenario.num_users
    idx = np.arange(n)
    w = scenario.interference_weights[idx[None, :, None], idx[None, None, :], channels[:, None, :]]
    same = channels[:, :, None] == channels[:, None, :]
    return w * same


def batch_interference_penalty(scenario: NetworkScenario, channels: np.ndarray) -> np.ndarray:
    """Weighted co-channel interference received by each user, shape ``(P, N)``."""
    return _gather_pair_weights(scenario, channels).sum(axis=1)


def batch_jamming_penalty(scenario: NetworkScenario, channels: np.ndarray, jammer: np.ndarray) -> np.ndarray:
    n = scenario.num_users
    hit = channels == jammer[:, None]
    return scenario.jamming_weights[np.arange(n)[None, :], channels] * hit


def batch_user_utilities(scenario: NetworkScenario, channels, jammer) -> np.ndarray:
    channels = np.asarray(channels)
    jammer = np.asarray(jammer)
    return (
        scenario.utility_constant
        - batch_interference_penalty(scenario, channels)
        - batch_jamming_penalty(scenario, channels, jammer)
    )


def batch_jammer_utility(scenario: NetworkScenario, channels, jammer) -> np.ndarray:
    return batch_jamming_penalty(scenario, np.asarray(channels), np.asarray(jammer)).sum(axis=1)


def batch_ewaij(scenario: NetworkScenario, channels, jammer) -> np.ndarray:
    channels = np.asarray(channels)
    jammer = np.asarray(jammer)
    return (
        batch_interference_penalty(scenario, channels).sum(axis=1)
        + batch_jamming_penalty(scenario, channels, jammer).sum(axis=1)
    )


def batch_potential(scenario: NetworkScenario, channels, jammer) -> np.ndarray:
    """Exact potential of the follower game; each user pair counted once."""
    channels = np.asarray(channels)
    jammer = np.asarray(jammer)
    pair = _gather_pair_weights(scenario, channels)
    upper = np.triu(np.ones((scenario.num_users,) * 2, dtype=bool), k=1)
    return -(pair * upper).sum(axis=(1, 2)) - batch_jamming_penalty(scenario, channels, jammer).sum(axis=1)


def batch_rates(scenario: NetworkScenario, channels, jammer) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Per-user ``(I_n, J_n, R_n)`` arrays of shape ``(P, N)``; rates in bit/s."""
    channels = np.asarray(channels)
    jammer = np.asarray(jammer)
    n = scenario.num_users
    idx = np.arange(n)
    gains = scenario.cross_gain[idx[None, :, None], idx[None, None, :], channels[:, None, :]]
    same = channels[:, :, None] == channels[:, None, :]
    interference = (scenario.user_power[None, :, None] * gains * same).sum(axis=1)
    jamming = scenario.jammer_power * scenario.jam_gain[idx[None, :], channels] * (channels == jammer[:, None])
    signal = scenario.user_power[None, :] * scenario.direct_gain[idx[None, :], channels]
    noise = scenario.bandwidth * scenario.noise_density
    rates = scenario.bandwidth * np.log2(1.0 + signal / (noise + interference + jamming))
    return interference, jamming, rates


# -- single profiles ---------------------------------------------------------

def _as_batch(scenario: NetworkScenario, profile: StrategyProfile):
    profile.validate(scenario)
    return np.array([profile.user_channels]), np.array([profile.jammer_channel])


def ewaij(scenario: NetworkScenario, profile: StrategyProfile) -> float:
    """Expected weighted aggregate interference and jamming.

    Both orderings of a co-channel user pair contribute, so for symmetric
    gains the interference part is twice the pairwise sum.
    """
    return float(batch_ewaij(scenario, *_as_batch(scenario, profile))[0])


def user_utility(scenario: NetworkScenario, n: int, profile: StrategyProfile) -> float:
    if not 0 <= n < scenario.num_users:
        raise IndexError(f"user index {n} out of range")
    return float(batch_user_utilities(scenario, *_as_batch(scenario, profile))[0, n])


def user_utilities(scenario: NetworkScenario, profile: StrategyProfile) -> np.ndarray:
    return batch_user_utilities(scenario, *_as_batch(scenario, profile))[0]


def jammer_utility(scenario: NetworkScenario, profile: StrategyProfile) -> float:
    return float(batch_jammer_utility(scenario, *_as_batch(scenario, profile))[0])


def rates(scenario: NetworkScenario, profile: StrategyProfile) -> RateReport:
    i, j, r = batch_rates(scenario, *_as_batch(scenario, profile))
    return RateReport(interference=i[0], jamming=j[0], rates=r[0])


def potential(scenario: NetworkScenario, profile: StrategyProfile) -> float:
    cross = scenario.cross_gain
    scale = max(float(np.abs(cross).max(initial=0.0)), 1e-300)
    if np.any(np.abs(cross - np.swapaxes(cross, 0, 1)) > SYMMETRY_RTOL * scale):
        raise ModelViolation("potential requires symmetric cross gains")
    return float(batch_potential(scenario, *_as_batch(scenario, profile))[0])


# -- exhaustive oracles ------------------------------------------------------

def _check_size(scenario: NetworkScenario) -> int:
    total = scenario.num_channels ** scenario.num_users
    if total > MAX_PROFILES:
        raise InstanceTooLargeError(
            f"{scenario.num_channels}^{scenario.num_users} = {total} profiles exceeds {MAX_PROFILES}"
        )
    return total


def iter_profile_blocks(n_users: int, n_channels: int, chunk: int = _CHUNK) -> Iterator[np.ndarray]:
    """All channel vectors in lexicographic order, in ``(P, N)`` blocks."""
    it = itertools.product(range(n_channels), repeat=n_users)
    while True:
        block = list(itertools.islice(it, chunk))
        if not block:
            return
        yield np.array(block, dtype=np.intp).reshape(len(block), n_users)


def deviation_utilities(scenario: NetworkScenario, channels: np.ndarray, jammer_channel: int) -> np.ndarray:
    """``out[p, n, c]``: utility of user n switching to channel c, others fixed."""
    m = scenario.num_channels
    onehot = (channels[:, :, None] == np.arange(m)[None, None, :]).astype(float)
    interference = np.einsum("pmc,mnc->pnc", onehot, scenario.interference_weights)
    jam = scenario.jamming_weights * (np.arange(m) == jammer_channel)[None, :]
    return scenario.utility_constant - interference - jam[None, :, :]


def _nash_mask(scenario: NetworkScenario, channels: np.ndarray, jammer_channel: int) -> np.ndarray:
    dev = deviation_utilities(scenario, channels, jammer_channel)
    current = np.take_along_axis(dev, channels[:, :, None], axis=2)[:, :, 0]
    tol = 1e-12 * scenario.utility_constant
    return np.all(dev.max(axis=2) <= current + tol, axis=1)


def is_nash(scenario: NetworkScenario, profile: StrategyProfile) -> bool:
    """True when no user gains by a unilateral channel switch."""
    channels, _ = _as_batch(scenario, profile)
    return bool(_nash_mask(scenario, channels, profile.jammer_channel)[0])


def brute_force_nash(scenario: NetworkScenario, jammer_channel: int) -> list[StrategyProfile]:
    """Every pure Nash equilibrium of the follower game, lexicographic order."""
    _check_size(scenario)
    if not 0 <= jammer_channel < scenario.num_channels:
        raise IndexError(f"jammer channel {jammer_channel} out of range")
    found = []
    for block in iter_profile_blocks(scenario.num_users, scenario.num_channels):
        for row in block[_nash_mask(scenario, block, jammer_channel)]:
            found.append(StrategyProfile(tuple(row), jammer_channel))
    return found


def potential_maximizer(scenario: NetworkScenario, jammer_channel: int) -> tuple[StrategyProfile, float]:
    """Lexicographically smallest profile attaining the maximal potential."""
    _check_size(scenario)
    best_val = -np.inf
    best_row = None
    tol = 1e-12 * scenario.utility_constant
    for block in iter_profile_blocks(scenario.num_users, scenario.num_channels):
        phi = batch_potential(scenario, block, np.full(len(block), jammer_channel))
        i = int(np.argmax(phi >= phi.max() - tol))
        # a later block only wins on a strict improvement beyond rounding noise
        if phi[i] > best_val + tol:
            best_val, best_row = float(phi[i]), block[i]
    return StrategyProfile(tuple(best_row), jammer_channel), best_val


def brute_force_stackelberg(scenario: NetworkScenario) -> StackelbergSolution:
    """Jammer leads; followers settle on the potential maximizer.

    Ties go to the smallest jammer channel and the lexicographically smallest
    follower profile.
    """
    _check_size(scenario)
    best = None
    tol = 1e-12 * scenario.utility_constant
    for c in range(scenario.num_channels):
        profile, phi = potential_maximizer(scenario, c)
        u_j = jammer_utility(scenario, profile)
        if best is None or u_j > best.jammer_utility + tol:
            best = StackelbergSolution(c, profile, u_j, ewaij(scenario, profile), phi)
    return best


def unilateral_deviations(profile: StrategyProfile, n_channels: int) -> Iterator[tuple[int, StrategyProfile]]:
    for n, a in enumerate(profile.user_channels):
        for c in range(n_channels):
            if c != a:
                yield n, profile.deviate(n, c)


def random_profile(rng: np.random.Generator, n_users: int, n_channels: int) -> StrategyProfile:
    return StrategyProfile(tuple(rng.integers(n_channels, size=n_users)), int(rng.integers(n_channels)))

