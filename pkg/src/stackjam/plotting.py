"""Figures for experiment reports, drawn from the CSV text itself."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .errors import OutputError  # noqa: E402
from .experiments import parse_csv  # noqa: E402


def figure_path(csv_path: str | Path) -> Path:
    return Path(csv_path).with_suffix(".png")


def plot_report(csv_text: str, path: str | Path, title: str | None = None) -> Path:
    """One panel per metric, one line per arm, error bars at the 95% half-width.

    Arm-prefixed metrics (``hla.rate``, ``random.rate``) share a panel.
    """
    rows = parse_csv(csv_text)
    panels: dict[str, dict[str, list]] = defaultdict(lambda: defaultdict(list))
    xs: list[str] = []
    param = rows[0].config_param if rows else ""
    for r in rows:
        arm, _, metric = r.metric.rpartition(".")
        panels[metric][arm or "value"].append(r)
        if r.config_value not in xs:
            xs.append(r.config_value)

    n = max(len(panels), 1)
    fig, axes = plt.subplots(1, n, figsize=(3.6 * n, 3.2), squeeze=False)
    for ax, (metric, arms) in zip(axes[0], panels.items()):
        for arm, series in arms.items():
            pos = [xs.index(r.config_value) for r in series]
            ax.errorbar(pos, [r.mean for r in series], yerr=[r.ci95 for r in series],
                        marker="o", capsize=3, label=arm)
        ax.set_xticks(range(len(xs)))
        ax.set_xticklabels(xs)
        ax.set_xlabel(param)
        ax.set_title(metric)
        if len(arms) > 1:
            ax.legend(fontsize="small")
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    path = Path(path)
    try:
        fig.savefig(path, dpi=120)
    except OSError as exc:
        raise OutputError(f"cannot write {path}: {exc}") from exc
    finally:
        plt.close(fig)
    return path
