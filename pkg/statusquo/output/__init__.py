"""Console output."""

from .formatter import render_distill, render_final_metrics, render_solo_report, render_z_sweep

__all__ = [
    'render_distill',
    'render_final_metrics',
    'render_solo_report',
    'render_z_sweep',
]
