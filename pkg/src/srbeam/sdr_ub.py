"""Rank-one-relaxed upper bound on the secondary rate.

Lifts p = vec(P) to Psi = p p^H, drops the rank constraint, and solves the
resulting determinant-maximization program.  When the optimal Psi is
numerically rank one the dominant eigenvector is reshaped back into a
feasible beamformer, certifying tightness.

The trace-lifting matrices are built so that the identities

    tr(p p^H H_i) = |h_i^H P 1|^2,
    G P P^H G^H   = sum_i E_i (I (x) G) p p^H (I (x) G)^H E_i^H

hold exactly for column-stacking vec; with that convention H_i comes out
as (1 1^H) (x) (h_i h_i^H).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from srbeam import detmax, lin, model
from srbeam.model import LN2

RANK_TOL = 1e-6


@dataclass
class UpperBoundResult:
    r_b_upper: float  # bits/s/Hz
    Psi: Optional[np.ndarray]
    q: Optional[np.ndarray]
    rank_ratio: float
    recovered_P: Optional[model.Beamformer]
    status: str
    iterations: int = 0


def build_Hi(channels):
    """Hermitian PSD lifting matrices H_i with tr(p p^H H_i) = |h_i^H P 1|^2."""
    n_t = channels.n_t
    ones = np.ones((n_t, 1), dtype=complex)
    out = []
    for i in range(channels.n_b):
        h = channels.H[i].conj().reshape(-1, 1)  # h_i with H rows = h_i^H
        out.append(lin.kron(ones @ ones.conj().T, h @ h.conj().T))
    return out


def build_lifted_G(channels):
    """(G_tilde, [E_1..E_Nt]) with G P P^H G^H = sum_i E_i G~ p p^H G~^H E_i^H."""
    g_tilde = lin.kron(np.eye(channels.n_t), channels.G)
    selectors = [
        lin.selection_matrix(i, channels.n_r, channels.n_t)
        for i in range(1, channels.n_t + 1)
    ]
    return g_tilde, selectors


def _active_bd_indices(channels):
    """BD antennas that can contribute to K: nonzero h_i and F column."""
    act = []
    for i in range(channels.n_b):
        if (
            np.linalg.norm(channels.H[i]) > 1e-12
            and np.linalg.norm(channels.F[:, i]) > 1e-12
        ):
            act.append(i)
    return act


def _trivial_result(spec):
    """No usable backscatter path: the bound is 0 and water-filling decides
    feasibility of the primary-rate constraint."""
    cap, p_wf = model.primary_capacity(spec.channels.G, spec.power_budget)
    d = spec.channels.n_t**2
    if cap < spec.r_t_min - model.RATE_TOL:
        return UpperBoundResult(0.0, None, None, 0.0, None, detmax.INFEASIBLE)
    bf = model.Beamformer(p_wf, spec.power_budget)
    return UpperBoundResult(
        0.0,
        np.zeros((d, d), dtype=complex),
        np.zeros(spec.channels.n_b),
        0.0,
        bf,
        detmax.OPTIMAL,
    )


def _interior_hint(spec, basis, active, his, g_tilde, selectors, t_min):
    """Analytic strictly-feasible candidates built from MRT / water-filling."""
    from srbeam import baselines

    ch = spec.channels
    d = ch.n_t**2
    budget = spec.power_budget
    cands = []
    for target in ("h", "g"):
        try:
            cands.append(baselines.mrt_beamformer(ch, budget * 0.98, target).P)
        except baselines.DegenerateChannel:
            pass
    cands.append(model.primary_capacity(ch.G, budget * 0.98)[1])
    eye_r = np.eye(ch.n_r, dtype=complex)
    for p_mat in cands:
        p = lin.vec(p_mat)
        psi = 0.97 * np.outer(p, p.conj()) + 0.02 * (budget / d) * np.eye(d)
        q = np.array([0.9 * float(np.real(np.trace(psi @ his[i]))) for i in active])
        if np.any(q <= 0):
            continue
        fq = sum(
            qi * np.outer(ch.F[:, i], ch.F[:, i].conj()) for qi, i in zip(q, active)
        )
        s1 = eye_r + fq
        lifted = sum(e @ g_tilde @ psi @ g_tilde.conj().T @ e.conj().T for e in selectors)
        s2 = s1 + lifted
        try:
            b1 = lin.logdet_psd(s1, 1e-7)
            b2 = lin.logdet_psd(s2, 1e-7) - t_min
        except lin.NotPositiveDefinite:
            continue
        r0 = 0.9 * min(b1, b2)
        if r0 <= 0:
            continue
        z = np.concatenate([lin.herm_params(psi), [r0], q])
        yield z


def _scalar_feasible(spec):
    """Exact primary-rate feasibility check for a single transmit antenna.

    With N_t = 1 every lifted Psi = t is rank one, so the true feasible set
    is one-dimensional and can be scanned directly; without this gate the
    rate slack in the relaxed program can hide an infeasible target behind
    an understated interference level.
    """
    from scipy.optimize import minimize_scalar

    def neg_rt(t):
        p = np.array([[np.sqrt(max(t, 0.0))]], dtype=complex)
        return -model.rate_primary(spec.channels, p)

    best = -neg_rt(spec.power_budget)
    res = minimize_scalar(
        neg_rt, bounds=(0.0, spec.power_budget), method="bounded"
    )
    if res.success:
        best = max(best, -float(res.fun))
    return best >= spec.r_t_min - model.RATE_TOL


def solve_upper_bound(spec, rank_tol=RANK_TOL, tol=None):
    """Assemble and solve the relaxed problem; returns an UpperBoundResult."""
    ch = spec.channels
    n_t, n_r = ch.n_t, ch.n_r
    d = n_t**2
    active = _active_bd_indices(ch)
    if not active:
        return _trivial_result(spec)

    if d == 1 and not _scalar_feasible(spec):
        return UpperBoundResult(0.0, None, None, 0.0, None, detmax.INFEASIBLE)

    basis = lin.herm_basis(d)
    his = build_Hi(ch)
    g_tilde, selectors = build_lifted_G(ch)
    t_min = spec.r_t_min * LN2

    n_psi = d * d
    n = n_psi + 1 + len(active)
    i_r = n_psi
    i_q = {bd: n_psi + 1 + k for k, bd in enumerate(active)}

    eye_r = np.eye(n_r, dtype=complex)
    zeros_rr = np.zeros((n_r, n_r), dtype=complex)

    # log2|I + F Q F^H| >= r_b
    coeffs1 = np.zeros((n, n_r, n_r), dtype=complex)
    for bd, idx in i_q.items():
        f_col = ch.F[:, bd]
        coeffs1[idx] = np.outer(f_col, f_col.conj())
    lin1 = np.zeros(n)
    lin1[i_r] = 1.0
    con1 = detmax.LogDetConstraint(eye_r, coeffs1, lin1, 0.0)

    # log2|I + F Q F^H + sum_i E_i G~ Psi G~^H E_i^H| >= r_t + r_b
    coeffs2 = coeffs1.copy()
    for k, b in enumerate(basis):
        lifted = zeros_rr.copy()
        gb = g_tilde @ b @ g_tilde.conj().T
        for e in selectors:
            lifted = lifted + e @ gb @ e.conj().T
        coeffs2[k] = coeffs2[k] + 0.5 * (lifted + lifted.conj().T)
    con2 = detmax.LogDetConstraint(eye_r, coeffs2, lin1.copy(), t_min)

    # Psi >= 0
    psi_coeffs = np.zeros((n, d, d), dtype=complex)
    for k, b in enumerate(basis):
        psi_coeffs[k] = b
    lmi = detmax.LmiConstraint(np.zeros((d, d), dtype=complex), psi_coeffs)

    # linear: q_i - tr(Psi H_i) <= 0, tr(Psi) <= P, -r <= 0, -q_i <= 0
    rows, rhs = [], []
    for bd, idx in i_q.items():
        row = np.zeros(n)
        row[idx] = 1.0
        for k, b in enumerate(basis):
            row[k] = -float(np.real(np.trace(b @ his[bd])))
        rows.append(row)
        rhs.append(0.0)
    row = np.zeros(n)
    for k, b in enumerate(basis):
        row[k] = float(np.real(np.trace(b)))
    rows.append(row)
    rhs.append(spec.power_budget)
    row = np.zeros(n)
    row[i_r] = -1.0
    rows.append(row)
    rhs.append(0.0)
    for idx in i_q.values():
        row = np.zeros(n)
        row[idx] = -1.0
        rows.append(row)
        rhs.append(0.0)

    c = np.zeros(n)
    c[i_r] = 1.0
    problem = detmax.DetmaxProblem(c, [con1, con2], [lmi], np.array(rows), np.array(rhs))

    z0 = None
    for cand in _interior_hint(spec, basis, active, his, g_tilde, selectors, t_min):
        if detmax.is_strictly_feasible(problem, cand, delta=1e-10):
            z0 = cand
            break
    report = detmax.solve(problem, z0=z0, tol=tol)
    if report.status == detmax.INFEASIBLE:
        return UpperBoundResult(0.0, None, None, 0.0, None, detmax.INFEASIBLE)
    if report.status not in (detmax.OPTIMAL,):
        return UpperBoundResult(
            0.0, None, None, 0.0, None, report.status, report.iterations
        )

    z = report.z_star
    psi = lin.herm_from_params(z[:n_psi], d)
    r_b_upper = max(z[i_r], 0.0) / LN2
    q_full = np.zeros(ch.n_b)
    for bd, idx in i_q.items():
        q_full[bd] = max(z[idx], 0.0)

    w, vecs = np.linalg.eigh(psi)
    lam1 = float(w[-1])
    lam2 = float(w[-2]) if w.size > 1 else 0.0
    rank_ratio = lam2 / lam1 if lam1 > 0 else 0.0

    recovered = None
    if lam1 > 0 and rank_ratio <= rank_tol:
        p_vec = np.sqrt(lam1) * vecs[:, -1]
        p_mat = lin.unvec(p_vec, n_t, n_t)
        scale = min(1.0, np.sqrt(spec.power_budget / max(model.power_used(p_mat), 1e-300)))
        p_mat = p_mat * scale
        ok, _, _ = model.is_feasible(spec, p_mat)
        if ok and abs(model.rate_secondary(ch, p_mat) - r_b_upper) <= 1e-3:
            recovered = model.Beamformer(p_mat, spec.power_budget)

    return UpperBoundResult(
        r_b_upper, psi, q_full, rank_ratio, recovered, detmax.OPTIMAL, report.iterations
    )
