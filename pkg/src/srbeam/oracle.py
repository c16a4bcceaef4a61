"""Independent verifiers: scalar closed form, random search, finite differences.

These are deliberately dumb and self-contained; the test suite uses them to
cross-check the convex solvers rather than trusting solver internals.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from srbeam import model
from srbeam.model import LN2, ChannelSet, ProblemSpec


@dataclass
class OracleResult:
    best_r_b: float  # bits/s/Hz
    best_P: Optional[np.ndarray]
    samples_evaluated: int
    method: str  # "scalar_closed_form" | "random_search"
    feasible: bool = True


def scalar_closed_form(g, h, f, budget, r_t):
    """Exact optimum of the single-antenna problem.

    With t = |p|^2 and alpha = |f h|^2, both R_b(t) = log2(1 + alpha t) and
    R_t(t) = log2(1 + |g|^2 t / (1 + alpha t)) are increasing in t, so the
    optimum sits at full power whenever it is feasible at all.
    """
    if budget <= 0:
        raise ValueError("budget must be positive")
    alpha = abs(f) ** 2 * abs(h) ** 2
    t = budget
    r_t_full = np.log2(1.0 + abs(g) ** 2 * t / (1.0 + alpha * t))
    if r_t_full < r_t - model.RATE_TOL:
        return OracleResult(0.0, None, 1, "scalar_closed_form", feasible=False)
    r_b = float(np.log2(1.0 + alpha * t))
    p = np.array([[np.sqrt(t)]], dtype=complex)
    return OracleResult(r_b, p, 1, "scalar_closed_form")


def random_search(spec, num_samples, seed, batch=4096):
    """Best r_b over random beamformers with power uniform in (0, budget].

    Deterministic given the seed.  Never returns an infeasible best_P.
    """
    if num_samples < 1:
        raise ValueError("need at least one sample")
    ch = spec.channels
    n_t, n_r, n_b = ch.n_t, ch.n_r, ch.n_b
    rng = np.random.default_rng(seed)
    eye_r = np.eye(n_r, dtype=complex)
    f = ch.F
    best_rb = -np.inf
    best_p = None
    remaining = num_samples
    while remaining > 0:
        m = min(batch, remaining)
        remaining -= m
        p = (rng.standard_normal((m, n_t, n_t)) + 1j * rng.standard_normal((m, n_t, n_t))) / np.sqrt(2)
        power = rng.uniform(0.0, 1.0, size=m) * spec.power_budget
        power = np.maximum(power, 1e-12 * spec.power_budget)
        norms = np.einsum("bij,bij->b", p, p.conj()).real
        p *= np.sqrt(power / norms)[:, None, None]
        d = np.einsum("ij,bjk,k->bi", ch.H, p, np.ones(n_t, dtype=complex))
        absd2 = np.abs(d) ** 2
        k = eye_r + np.einsum("ri,bi,ci->brc", f, absd2, f.conj())
        _, ld_k = np.linalg.slogdet(k)
        gp = np.einsum("ij,bjk->bik", ch.G, p)
        top = k + np.einsum("bik,bjk->bij", gp, gp.conj())
        _, ld_top = np.linalg.slogdet(top)
        r_t = (ld_top - ld_k) / LN2
        r_b = ld_k / LN2
        feas = r_t >= spec.r_t_min - model.RATE_TOL
        if np.any(feas):
            r_b_f = np.where(feas, r_b, -np.inf)
            i = int(np.argmax(r_b_f))
            if r_b_f[i] > best_rb:
                best_rb = float(r_b_f[i])
                best_p = p[i].copy()
    if best_p is None:
        if spec.r_t_min <= 0:
            return OracleResult(0.0, np.zeros((n_t, n_t), dtype=complex), num_samples, "random_search")
        return OracleResult(0.0, None, num_samples, "random_search", feasible=False)
    return OracleResult(best_rb, best_p, num_samples, "random_search")


def finite_diff_check(fn, point, step=1e-5):
    """Max relative error between analytic and central-difference gradients.

    ``fn(z)`` must return (value, gradient) for a real vector z.
    """
    point = np.asarray(point, dtype=float)
    _, grad = fn(point)
    grad = np.asarray(grad, dtype=float)
    fd = np.zeros_like(grad)
    for k in range(point.size):
        zp = point.copy()
        zm = point.copy()
        zp[k] += step
        zm[k] -= step
        fp, _ = fn(zp)
        fm, _ = fn(zm)
        fd[k] = (fp - fm) / (2.0 * step)
    scale = np.maximum(np.abs(grad), np.maximum(np.abs(fd), 1.0))
    return float(np.max(np.abs(fd - grad) / scale))
