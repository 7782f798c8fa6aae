import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stackjam.config import parse_toml, shipped_config  # noqa: E402
from stackjam.scenario import build_scenario  # noqa: E402


def random_instance(rng, n_users, n_channels):
    """Raw nested-list gains plus the matching scenario; cross gains symmetric."""
    upper = rng.uniform(0.0, 1.0, size=(n_users, n_users, n_channels))
    cross = np.triu(np.moveaxis(upper, 2, 0), 1)
    cross = np.moveaxis(cross + np.swapaxes(cross, 1, 2), 0, 2)
    raw = dict(
        P=rng.uniform(0.5, 5.0, n_users).tolist(),
        Pj=float(rng.uniform(1.0, 20.0)),
        H=cross.tolist(),
        Hj=rng.uniform(0.0, 0.5, (n_users, n_channels)).tolist(),
        D=rng.uniform(0.5, 2.0, (n_users, n_channels)).tolist(),
        B=1e6,
        N0=4e-8,
    )
    sc = build_scenario(raw["P"], raw["Pj"], raw["H"], raw["Hj"], raw["D"], raw["B"], raw["N0"])
    raw["L"] = sc.utility_constant
    return raw, sc


@pytest.fixture
def default_doc():
    return parse_toml(shipped_config("default.toml"))


@pytest.fixture
def small_doc():
    return parse_toml(shipped_config("oracle_small.toml"))
