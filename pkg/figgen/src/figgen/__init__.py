"""Render figures from experiment CSV outputs.

Consumes exactly two schemas:

    results: trial,seed_used,snr_db,method,r_b,r_t_achieved,rt_satisfied,iterations,status,rank_ratio
    traces:  trial,snr_db,iter,objective,penalty_residual

and produces static images: per-SNR median convergence curves and
per-method mean (or median) rate-versus-SNR curves.  No smoothing: every
plotted point is an aggregate recomputable from the CSV.
"""

from figgen.figures import (
    EmptySelection,
    FigureSpec,
    MissingColumns,
    plot_convergence,
    plot_rate_vs_snr,
)

__all__ = [
    "EmptySelection",
    "FigureSpec",
    "MissingColumns",
    "plot_convergence",
    "plot_rate_vs_snr",
]
