"""Smoke tests for the figures."""

import matplotlib.pyplot as plt
import pandas as pd

from drndalo.stealth import ClassifierReport
from drndalo.visualization import plot_overheads, plot_window_sweep


def test_overhead_figure(tmp_path):
    table = pd.DataFrame({
        'program': ['a', 'a', 'b', 'b'],
        'variant': ['baseline', 'stall-k16', 'baseline', 'stall-k16'],
        'design': ['baseline', 'stall', 'baseline', 'stall'],
        'overhead': [0.0, 0.5, 0.0, 0.25],
    })
    path = tmp_path / 'figs' / 'overheads.png'
    fig = plot_overheads(table, path)
    assert path.stat().st_size > 0
    ax = fig.axes[0]
    assert [t.get_text() for t in ax.get_xticklabels()] == ['a', 'b', 'mean']
    assert len(ax.patches) == 2 * 3
    plt.close(fig)


def test_window_sweep_figure(tmp_path):
    reports = [
        ClassifierReport(model=model, accuracy=acc, confusion=[[1, 0], [0, 1]],
                         window=window, train_programs=3, test_programs=1)
        for model, window, acc in [('logreg', 1, 0.7), ('logreg', 4, 0.72), ('tree', 1, 0.68), ('tree', 4, 0.7)]
    ]
    path = tmp_path / 'sweep.png'
    fig = plot_window_sweep(reports, path)
    assert path.exists()
    labels = [line.get_label() for line in fig.axes[0].get_lines()]
    assert labels[:2] == ['logreg', 'tree']
    plt.close(fig)
