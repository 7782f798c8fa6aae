"""Network world for the channel-selection game.

A scenario fixes N user links (transmitter/receiver pairs), one jammer, M
channels, transmit powers and the expected gain tensors. Scenarios are either
listed explicitly in a config file or generated from a random placement with
a log-distance path-loss law.

Array conventions (0-based everywhere):

* ``cross_gain[m, n, c]`` is the expected interference gain from user ``m`` to
  user ``n`` on channel ``c``; the diagonal ``m == n`` is always zero.
* ``jam_gain[n, c]`` is the expected gain from the jammer to user ``n``.
* ``direct_gain[n, c]`` is the desired-link gain of user ``n``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Mapping, Sequence

import numpy as np
import tomli_w

from .config import field as cfg_field
from .config import parse_toml, section
from .errors import AsymmetricGainError, ConfigError, UtilityBoundError

L_MARGIN = 1.1
SYMMETRY_RTOL = 1e-12

DEFAULT_BANDWIDTH = 1.0e6
DEFAULT_NOISE_DENSITY = 4.0e-8


PLACEMENTS = ("uniform", "standoff")


@dataclass(frozen=True)
class TopologySpec:
    """Random placement rule for user links and the jammer.

    Transmitters are uniform in a square of side ``area_side``; each receiver
    sits at a uniform link distance and bearing from its transmitter. Under
    ``placement="uniform"`` the jammer is uniform in the same square, under
    ``"standoff"`` it sits ``jammer_standoff`` meters from the square's center
    at a uniform bearing.
    """

    area_side: float = 1.0
    path_loss_exponent: float = 2.0
    reference_gain: float = 1.0
    link_distance_min: float = 0.5
    link_distance_max: float = 1.0
    placement: str = "standoff"
    jammer_standoff: float = 4.0

    def __post_init__(self):
        if self.area_side <= 0:
            raise ConfigError("area_side must be positive")
        if self.path_loss_exponent < 1:
            raise ConfigError("path_loss_exponent must be >= 1")
        if self.reference_gain <= 0:
            raise ConfigError("reference_gain must be positive")
        if not 0 < self.link_distance_min <= self.link_distance_max:
            raise ConfigError("need 0 < link_distance_min <= link_distance_max")
        if self.placement not in PLACEMENTS:
            raise ConfigError(f"unknown placement rule {self.placement!r}; expected one of {PLACEMENTS}")
        if self.jammer_standoff < 0:
            raise ConfigError("jammer_standoff must be >= 0")

    def gain(self, distance):
        """Path gain ``g0 * d**-alpha`` with distances clamped to at least 1 m."""
        d = np.maximum(np.asarray(distance, dtype=float), 1.0)
        return self.reference_gain * d ** (-self.path_loss_exponent)


@dataclass(frozen=True)
class PowerSettings:
    user_power: float | Sequence[float] = 4.0
    jammer_power: float = 15.0


@dataclass(frozen=True)
class Placement:
    """Node coordinates in meters; one row per user."""

    transmitters: np.ndarray
    receivers: np.ndarray
    jammer: np.ndarray


@dataclass(frozen=True, eq=False)
class NetworkScenario:
    user_power: np.ndarray
    jammer_power: float
    cross_gain: np.ndarray
    jam_gain: np.ndarray
    direct_gain: np.ndarray
    bandwidth: float
    noise_density: float
    utility_constant: float
    topology: TopologySpec | None = field(default=None, compare=False)
    seed: int | None = field(default=None, compare=False)

    @property
    def num_users(self) -> int:
        return self.user_power.shape[0]

    @property
    def num_channels(self) -> int:
        return self.jam_gain.shape[1]

    @cached_property
    def interference_weights(self) -> np.ndarray:
        """``W[m, n, c] = P_n P_m H_mn^c``, zero on the diagonal."""
        p = self.user_power
        return p[:, None, None] * p[None, :, None] * self.cross_gain

    @cached_property
    def jamming_weights(self) -> np.ndarray:
        """``J[n, c] = P_n P_j H_jn^c``."""
        return self.user_power[:, None] * self.jammer_power * self.jam_gain

    def __eq__(self, other):
        if not isinstance(other, NetworkScenario):
            return NotImplemented
        return (
            np.array_equal(self.user_power, other.user_power)
            and self.jammer_power == other.jammer_power
            and np.array_equal(self.cross_gain, other.cross_gain)
            and np.array_equal(self.jam_gain, other.jam_gain)
            and np.array_equal(self.direct_gain, other.direct_gain)
            and self.bandwidth == other.bandwidth
            and self.noise_density == other.noise_density
            and self.utility_constant == other.utility_constant
        )

    __hash__ = None

    def with_powers(self, user_power=None, jammer_power=None) -> "NetworkScenario":
        """Same gains under new powers; L is recomputed from the analytic bound."""
        up = self.user_power if user_power is None else _user_power_vector(user_power, self.num_users)
        jp = self.jammer_power if jammer_power is None else float(jammer_power)
        return build_scenario(
            up, jp, self.cross_gain, self.jam_gain, self.direct_gain,
            self.bandwidth, self.noise_density, topology=self.topology, seed=self.seed,
        )


def interference_bound(user_power, jammer_power, cross_gain, jam_gain) -> np.ndarray:
    """Per-user worst case of received weighted interference plus jamming.

    ``sum_{m != n} P_n P_m max_c H_mn^c + P_n P_j max_c H_jn^c``. No channel
    profile can push a user's penalty above this, so ``L >= max`` keeps every
    utility in ``[0, L]``.
    """
    p = np.asarray(user_power, dtype=float)
    cross = np.asarray(cross_gain, dtype=float).max(axis=2) if cross_gain.size else np.zeros((p.size, p.size))
    interference = p * (p @ cross)
    jamming = p * jammer_power * np.asarray(jam_gain, dtype=float).max(axis=1)
    return interference + jamming


def build_scenario(
    user_power,
    jammer_power: float,
    cross_gain,
    jam_gain,
    direct_gain,
    bandwidth: float = DEFAULT_BANDWIDTH,
    noise_density: float = DEFAULT_NOISE_DENSITY,
    utility_constant: float | None = None,
    *,
    topology: TopologySpec | None = None,
    seed: int | None = None,
) -> NetworkScenario:
    """Validate raw arrays and freeze them into a scenario.

    ``utility_constant=None`` selects ``1.1 * max_n bound_n``; an explicit value
    below the bound raises :class:`UtilityBoundError`.
    """
    jam_gain = np.array(jam_gain, dtype=float, ndmin=2)
    n_users, n_channels = jam_gain.shape
    if n_users < 1:
        raise ConfigError("need at least one user")
    if n_channels < 2:
        raise ConfigError("need at least two channels")
    up = _user_power_vector(user_power, n_users)
    jammer_power = float(jammer_power)
    if jammer_power <= 0:
        raise ConfigError("jammer_power must be positive")
    if bandwidth <= 0 or noise_density <= 0:
        raise ConfigError("bandwidth and noise_density must be positive")

    direct_gain = np.array(direct_gain, dtype=float, ndmin=2)
    if direct_gain.shape != (n_users, n_channels):
        raise ConfigError(f"direct_gain must have shape {(n_users, n_channels)}, got {direct_gain.shape}")
    if n_users == 1 and np.size(cross_gain) == 0:
        cross = np.zeros((1, 1, n_channels))
    else:
        cross = np.array(cross_gain, dtype=float)
    if cross.shape != (n_users, n_users, n_channels):
        raise ConfigError(f"cross_gain must have shape {(n_users, n_users, n_channels)}, got {cross.shape}")
    cross[np.arange(n_users), np.arange(n_users), :] = 0.0

    for name, arr in (("cross_gain", cross), ("jam_gain", jam_gain), ("direct_gain", direct_gain)):
        if not np.all(np.isfinite(arr)):
            raise ConfigError(f"{name} has non-finite entries")
        if np.any(arr < 0):
            raise ConfigError(f"{name} has negative entries")
    if np.any(direct_gain <= 0):
        raise ConfigError("direct_gain entries must be strictly positive")
    check_symmetric(cross)

    bound = float(interference_bound(up, jammer_power, cross, jam_gain).max())
    if utility_constant is None:
        utility_constant = L_MARGIN * bound
        if utility_constant <= 0:
            # no interference or jamming can ever occur; any positive L works
            utility_constant = 1.0
    else:
        utility_constant = float(utility_constant)
        if utility_constant <= 0:
            raise ConfigError("utility_constant must be positive")
        if utility_constant < bound:
            raise UtilityBoundError(
                f"utility_constant {utility_constant:g} is below the worst-case penalty {bound:g}"
            )

    for arr in (up, cross, jam_gain, direct_gain):
        arr.setflags(write=False)
    return NetworkScenario(
        user_power=up,
        jammer_power=jammer_power,
        cross_gain=cross,
        jam_gain=jam_gain,
        direct_gain=direct_gain,
        bandwidth=float(bandwidth),
        noise_density=float(noise_density),
        utility_constant=utility_constant,
        topology=topology,
        seed=seed,
    )


def check_symmetric(cross_gain: np.ndarray, rtol: float = SYMMETRY_RTOL) -> None:
    transposed = np.swapaxes(cross_gain, 0, 1)
    scale = max(float(np.abs(cross_gain).max(initial=0.0)), 1e-300)
    if np.any(np.abs(cross_gain - transposed) > rtol * scale):
        raise AsymmetricGainError("cross gains must satisfy H_mn^c == H_nm^c")


def _user_power_vector(user_power, n_users: int) -> np.ndarray:
    up = np.array(user_power, dtype=float)
    if up.ndim == 0:
        up = np.full(n_users, float(up))
    if up.shape != (n_users,):
        raise ConfigError(f"user_power must be a scalar or have {n_users} entries")
    if np.any(up <= 0):
        raise ConfigError("user powers must be positive")
    return up


# -- random instances --------------------------------------------------------

def place_nodes(topology: TopologySpec, n_users: int, seed: int) -> Placement:
    """Uniform placement in the square; receivers sit at a random link distance.

    Draws are consumed jammer first, then user by user, so the placement of
    the first ``k`` users does not depend on ``n_users``.
    """
    rng = np.random.default_rng(seed)
    side = topology.area_side
    u = rng.random(2)
    if topology.placement == "standoff":
        angle = 2.0 * math.pi * u[0]
        jammer = side / 2 + topology.jammer_standoff * np.array([math.cos(angle), math.sin(angle)])
    else:
        jammer = u * side
    tx = np.empty((n_users, 2))
    rx = np.empty((n_users, 2))
    for n in range(n_users):
        u = rng.random(4)
        tx[n] = u[:2] * side
        dist = topology.link_distance_min + u[2] * (topology.link_distance_max - topology.link_distance_min)
        angle = 2.0 * math.pi * u[3]
        rx[n] = tx[n] + dist * np.array([math.cos(angle), math.sin(angle)])
    return Placement(tx, rx, jammer)


def scenario_from_placement(
    placement: Placement,
    topology: TopologySpec,
    n_channels: int,
    powers: PowerSettings,
    bandwidth: float = DEFAULT_BANDWIDTH,
    noise_density: float = DEFAULT_NOISE_DENSITY,
    seed: int | None = None,
) -> NetworkScenario:
    """Gains from node positions, flat across channels.

    User-to-user gains use the transmitter-to-transmitter distance so the
    cross-gain tensor is symmetric by construction.
    """
    tx, rx = placement.transmitters, placement.receivers
    pair_dist = np.linalg.norm(tx[:, None, :] - tx[None, :, :], axis=-1)
    cross = np.repeat(topology.gain(pair_dist)[:, :, None], n_channels, axis=2)
    jam = np.repeat(topology.gain(np.linalg.norm(rx - placement.jammer, axis=-1))[:, None], n_channels, axis=1)
    direct = np.repeat(topology.gain(np.linalg.norm(rx - tx, axis=-1))[:, None], n_channels, axis=1)
    return build_scenario(
        powers.user_power, powers.jammer_power, cross, jam, direct,
        bandwidth, noise_density, topology=topology, seed=seed,
    )


def generate_scenario(
    topology: TopologySpec,
    n_users: int,
    n_channels: int,
    powers: PowerSettings,
    seed: int,
    *,
    bandwidth: float = DEFAULT_BANDWIDTH,
    noise_density: float = DEFAULT_NOISE_DENSITY,
) -> NetworkScenario:
    if n_users < 1 or n_channels < 2:
        raise ConfigError(f"need n_users >= 1 and n_channels >= 2, got {n_users}, {n_channels}")
    placement = place_nodes(topology, n_users, seed)
    return scenario_from_placement(placement, topology, n_channels, powers, bandwidth, noise_density, seed)


# -- config files ------------------------------------------------------------

def topology_from_section(sec: Mapping[str, Any]) -> TopologySpec:
    defaults = TopologySpec()
    return TopologySpec(
        area_side=float(sec.get("area_side", defaults.area_side)),
        path_loss_exponent=float(sec.get("path_loss_exponent", defaults.path_loss_exponent)),
        reference_gain=float(sec.get("reference_gain", defaults.reference_gain)),
        link_distance_min=float(sec.get("link_distance_min", defaults.link_distance_min)),
        link_distance_max=float(sec.get("link_distance_max", defaults.link_distance_max)),
        placement=str(sec.get("placement", defaults.placement)),
        jammer_standoff=float(sec.get("jammer_standoff", defaults.jammer_standoff)),
    )


def scenario_from_doc(doc: Mapping[str, Any]) -> NetworkScenario:
    net = section(doc, "network")
    pw = section(doc, "powers")
    n_users = int(cfg_field(net, "network", "num_users"))
    n_channels = int(cfg_field(net, "network", "num_channels"))
    bandwidth = float(cfg_field(net, "network", "bandwidth"))
    noise_density = float(cfg_field(net, "network", "noise_density"))
    user_power = cfg_field(pw, "powers", "user_power")
    jammer_power = float(cfg_field(pw, "powers", "jammer_power"))
    if n_users < 1 or n_channels < 2:
        raise ConfigError(f"need num_users >= 1 and num_channels >= 2, got {n_users}, {n_channels}")

    if "jam_gain" in net or "direct_gain" in net or "cross_gain" in net:
        # a lone user has no pairs, so the cross-gain tensor may be omitted
        cross = net.get("cross_gain", []) if n_users == 1 else cfg_field(net, "network", "cross_gain")
        jam = cfg_field(net, "network", "jam_gain")
        direct = cfg_field(net, "network", "direct_gain")
        sc = build_scenario(
            user_power, jammer_power, cross, jam, direct, bandwidth, noise_density,
            net.get("utility_constant"),
        )
        if sc.num_users != n_users or sc.num_channels != n_channels:
            raise ConfigError("gain arrays disagree with num_users/num_channels")
        return sc

    topo_sec = section(doc, "topology")
    topology = topology_from_section(topo_sec)
    seed = int(cfg_field(topo_sec, "topology", "seed"))
    sc = generate_scenario(
        topology, n_users, n_channels, PowerSettings(user_power, jammer_power), seed,
        bandwidth=bandwidth, noise_density=noise_density,
    )
    if "utility_constant" in net:
        sc = build_scenario(
            sc.user_power, sc.jammer_power, sc.cross_gain, sc.jam_gain, sc.direct_gain,
            sc.bandwidth, sc.noise_density, net["utility_constant"], topology=topology, seed=seed,
        )
    return sc


def load_scenario(config_text: str) -> NetworkScenario:
    return scenario_from_doc(parse_toml(config_text))


def dump_scenario(scenario: NetworkScenario) -> str:
    """Explicit-gain TOML; ``load_scenario(dump_scenario(s)) == s``."""
    up = scenario.user_power
    doc = {
        "network": {
            "num_users": scenario.num_users,
            "num_channels": scenario.num_channels,
            "bandwidth": scenario.bandwidth,
            "noise_density": scenario.noise_density,
            "utility_constant": scenario.utility_constant,
            "cross_gain": scenario.cross_gain.tolist(),
            "jam_gain": scenario.jam_gain.tolist(),
            "direct_gain": scenario.direct_gain.tolist(),
        },
        "powers": {
            "user_power": up.tolist(),
            "jammer_power": scenario.jammer_power,
        },
    }
    return tomli_w.dumps(doc)
