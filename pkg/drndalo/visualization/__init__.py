"""
Drndalo Visualization Module

Matplotlib figures for benchmark overheads and stealth window sweeps.
"""

from drndalo.visualization.plots import plot_overheads, plot_window_sweep

__all__ = ['plot_overheads', 'plot_window_sweep']
