"""MRT reference beamformers: right singular vectors at equal per-column power."""

from __future__ import annotations

import numpy as np

from srbeam import lin, model


class DegenerateChannel(ValueError):
    pass


def mrt_beamformer(channels, budget, target="g"):
    """P = sqrt(budget / N_t) V with V the right singular vectors of the
    chosen channel (G or H).  tr(P P^H) = budget exactly."""
    target = target.lower().lstrip("mrt-_")
    if target == "g":
        a = channels.G
    elif target == "h":
        a = channels.H
    else:
        raise ValueError(f"unknown MRT target {target!r}")
    _, s, v = lin.svd(a)
    if s.size == 0 or np.max(s) < 1e-12:
        raise DegenerateChannel("all singular values below 1e-12")
    n_t = channels.n_t
    p = np.sqrt(budget / n_t) * v[:, :n_t]
    return model.Beamformer(p, max(budget, model.power_used(p)))


def evaluate_baseline(spec, target="g"):
    """Rates of the MRT beamformer at full budget; never raises on an
    unsatisfied primary-rate constraint, just records it."""
    bf = mrt_beamformer(spec.channels, spec.power_budget, target)
    report = model.rate_report(spec.channels, bf.P)
    rt_satisfied = report.r_t_achieved >= spec.r_t_min - model.RATE_TOL
    return bf, report, rt_satisfied
