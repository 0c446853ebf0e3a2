"""
Figures for benchmark and stealth results.

Usage:
    from drndalo.visualization import plot_overheads, plot_window_sweep

    plot_overheads(bench_result.table, './reports/overheads.png')
    plot_window_sweep(reports, './reports/window_sweep.png')
"""

from pathlib import Path
from typing import Optional, Sequence, Union

import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402
from matplotlib.ticker import ScalarFormatter  # noqa: E402

from drndalo.stealth.evaluation import ClassifierReport  # noqa: E402

DESIGN_COLORS = {
    'baseline': '#9ca3af',
    'mask': '#22c55e',
    'stall': '#ef4444',
    'cache': '#3b82f6',
}


def _save(fig, path: Optional[Union[str, Path]]) -> None:
    if path is not None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        fig.savefig(path, dpi=150, bbox_inches='tight')


def plot_overheads(table: pd.DataFrame, path: Optional[Union[str, Path]] = None):
    """
    Grouped bar chart of normalized cycles (1.0 = baseline) per program and variant.

    Args:
        table: Benchmark table with program, variant, design and overhead columns
        path: Output image; None only returns the figure

    Returns:
        matplotlib Figure
    """
    programs = sorted(table['program'].unique())
    variants = list(dict.fromkeys(table['variant']))
    normalized = table.pivot(index='program', columns='variant', values='overhead').reindex(
        index=programs, columns=variants) + 1.0
    designs = table.drop_duplicates('variant').set_index('variant')['design']

    x = np.arange(len(programs) + 1)
    width = 0.8 / max(1, len(variants))
    fig, ax = plt.subplots(figsize=(max(8, 0.9 * len(x)), 4.5))
    for i, variant in enumerate(variants):
        values = normalized[variant].to_numpy()
        values = np.append(values, np.nanmean(values))
        ax.bar(
            x + (i - (len(variants) - 1) / 2) * width, values, width,
            label=variant, color=DESIGN_COLORS.get(designs[variant]),
            alpha=0.55 + 0.45 * (i + 1) / len(variants), edgecolor='black', linewidth=0.3,
        )

    ax.axhline(1.0, color='black', linewidth=0.8, linestyle='--')
    ax.set_xticks(x)
    ax.set_xticklabels(programs + ['mean'], rotation=45, ha='right')
    ax.set_ylabel('Cycles normalized to baseline')
    ax.legend(ncol=min(4, len(variants)), fontsize=8)
    ax.grid(axis='y', alpha=0.3)
    fig.tight_layout()
    _save(fig, path)
    return fig


def plot_window_sweep(
    reports: Sequence[ClassifierReport],
    path: Optional[Union[str, Path]] = None,
    chance: float = 0.5,
):
    """
    Test accuracy against window size, one line per classifier model.

    Returns:
        matplotlib Figure
    """
    fig, ax = plt.subplots(figsize=(6, 4))
    models = list(dict.fromkeys(r.model for r in reports))
    for model in models:
        points = sorted((r.window, r.accuracy) for r in reports if r.model == model)
        windows, accuracies = zip(*points)
        ax.plot(windows, accuracies, marker='o', label=model)

    ax.axhline(chance, color='gray', linewidth=0.8, linestyle='--', label='chance')
    ax.set_xscale('log', base=2)
    ax.set_xticks(sorted({r.window for r in reports}))
    ax.get_xaxis().set_major_formatter(ScalarFormatter())
    ax.set_xlabel('Window size I (instructions)')
    ax.set_ylabel('Test accuracy')
    ax.set_ylim(0.0, 1.0)
    ax.legend()
    ax.grid(alpha=0.3)
    fig.tight_layout()
    _save(fig, path)
    return fig
