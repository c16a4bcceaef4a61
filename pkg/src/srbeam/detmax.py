"""Small dense barrier interior-point solver for determinant maximization.

Canonical problem over a real decision vector z (n variables):

    maximize    c . z
    subject to  ln det S_j(z) >= a_j . z + d_j     (log-det constraints)
                L_k(z) >= 0                        (LMI constraints)
                A z <= b                           (linear inequalities)

where S_j and L_k are affine maps into the complex Hermitian matrices.
All log-det semantics are in complex-domain nats.  The solver is a plain
primal path-following method: Newton centering on

    phi_t(z) = -t c.z - sum_j ln(ln det S_j(z) - a_j.z - d_j)
               - sum_k ln det L_k(z) - sum_m ln(b_m - A_m z)

with backtracking line search keeping every barrier argument strictly
positive definite, and t escalated geometrically until the gap bound
nu / t is below tolerance.  Problems in this artifact are tiny (tens of
variables, matrix blocks of dimension <= 6), so no structure is exploited.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
import scipy.linalg as sla

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
MAX_ITERATIONS = "max_iterations"
NUMERICAL_FAILURE = "numerical_failure"


class NumericalFailure(RuntimeError):
    pass


@dataclass
class LogDetConstraint:
    """ln det(base + sum_k z_k coeffs[k]) >= lin . z + offset."""

    base: np.ndarray  # (p, p) Hermitian
    coeffs: np.ndarray  # (n, p, p) Hermitian slices
    lin: np.ndarray  # (n,)
    offset: float


@dataclass
class LmiConstraint:
    """base + sum_k z_k coeffs[k] >= 0 (Hermitian PSD)."""

    base: np.ndarray
    coeffs: np.ndarray


@dataclass
class DetmaxProblem:
    c: np.ndarray  # (n,), maximize c.z
    logdets: List[LogDetConstraint] = field(default_factory=list)
    lmis: List[LmiConstraint] = field(default_factory=list)
    a_ub: Optional[np.ndarray] = None  # (m, n)
    b_ub: Optional[np.ndarray] = None  # (m,)

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float)
        n = self.c.size
        if self.a_ub is None:
            self.a_ub = np.zeros((0, n))
            self.b_ub = np.zeros(0)
        self.a_ub = np.atleast_2d(np.asarray(self.a_ub, dtype=float))
        self.b_ub = np.asarray(self.b_ub, dtype=float).reshape(-1)
        if self.a_ub.shape != (self.b_ub.size, n):
            raise ValueError("linear inequality dimensions inconsistent")
        for con in list(self.logdets) + list(self.lmis):
            con.base = np.asarray(con.base, dtype=complex)
            con.coeffs = np.asarray(con.coeffs, dtype=complex)
            if con.coeffs.shape[0] != n:
                raise ValueError("constraint coefficient count != n")
            stack = np.concatenate([con.base[None], con.coeffs], axis=0)
            dev = np.max(np.abs(stack - np.conj(np.swapaxes(stack, 1, 2))))
            if dev > 1e-9:
                raise ValueError(f"constraint matrices not Hermitian (dev={dev:.2e})")
            if not np.all(np.isfinite(stack.view(float))):
                raise ValueError("constraint matrices must be finite")
        for con in self.logdets:
            con.lin = np.asarray(con.lin, dtype=float).reshape(-1)
            if con.lin.size != n:
                raise ValueError("log-det linear form has wrong length")

    @property
    def n(self):
        return self.c.size

    @property
    def barrier_nu(self):
        """Barrier parameter: one per scalar inequality, block size per LMI."""
        nu = len(self.logdets) + self.b_ub.size
        nu += sum(con.base.shape[0] for con in self.lmis)
        return max(nu, 1)


@dataclass
class Tolerances:
    gap_tol_factor: float = 1e-7  # stop once nu/t <= gap_tol_factor * nu
    newton_tol: float = 1e-9  # on half squared Newton decrement
    max_centering: int = 50
    t_init: float = 1.0
    t_growth: float = 10.0
    feas_tol: float = 1e-7
    armijo: float = 0.25


@dataclass
class SolveReport:
    status: str
    z_star: np.ndarray
    objective_value: float
    kkt_residual: float
    barrier_gap: float
    iterations: int
    stage_objectives: list = field(default_factory=list)


def _chol(a):
    try:
        return sla.cholesky(0.5 * (a + a.conj().T), lower=True, check_finite=False)
    except (sla.LinAlgError, ValueError):
        return None


def _affine(base, coeffs, z):
    return base + np.tensordot(z, coeffs, axes=(0, 0))


def barrier_value(prob, z):
    """Barrier value at z, or None when z is outside the barrier domain."""
    val = 0.0
    for con in prob.logdets:
        s = _affine(con.base, con.coeffs, z)
        c = _chol(s)
        if c is None:
            return None
        lds = 2.0 * float(np.sum(np.log(np.real(np.diag(c)))))
        f = lds - float(con.lin @ z) - con.offset
        if f <= 0.0:
            return None
        val -= np.log(f)
    for con in prob.lmis:
        c = _chol(_affine(con.base, con.coeffs, z))
        if c is None:
            return None
        val -= 2.0 * float(np.sum(np.log(np.real(np.diag(c)))))
    if prob.b_ub.size:
        slack = prob.b_ub - prob.a_ub @ z
        if np.any(slack <= 0.0):
            return None
        val -= float(np.sum(np.log(slack)))
    return val


def barrier_gradient(prob, z):
    """Barrier value and gradient at z (None outside the domain).

    Exposed separately so tests can finite-difference the analytic calculus.
    """
    full = barrier_full(prob, z, need_hess=False)
    if full is None:
        return None
    return full[0], full[1]


def barrier_full(prob, z, need_hess=True):
    n = prob.n
    val = 0.0
    grad = np.zeros(n)
    hess = np.zeros((n, n)) if need_hess else None
    eye_cache = {}

    def inv_from_chol(c):
        p = c.shape[0]
        if p not in eye_cache:
            eye_cache[p] = np.eye(p, dtype=complex)
        return sla.cho_solve((c, True), eye_cache[p], check_finite=False)

    for con in prob.logdets:
        s = _affine(con.base, con.coeffs, z)
        c = _chol(s)
        if c is None:
            return None
        lds = 2.0 * float(np.sum(np.log(np.real(np.diag(c)))))
        f = lds - float(con.lin @ z) - con.offset
        if f <= 0.0:
            return None
        sinv = inv_from_chol(c)
        g_ld = np.einsum("ij,kji->k", sinv, con.coeffs).real
        gf = g_ld - con.lin
        val -= np.log(f)
        grad -= gf / f
        if need_hess:
            t = sinv[None, :, :] @ con.coeffs
            h_ld = -np.einsum("kil,mli->km", t, t).real
            hess += np.outer(gf, gf) / f**2 - h_ld / f
    for con in prob.lmis:
        s = _affine(con.base, con.coeffs, z)
        c = _chol(s)
        if c is None:
            return None
        val -= 2.0 * float(np.sum(np.log(np.real(np.diag(c)))))
        sinv = inv_from_chol(c)
        grad -= np.einsum("ij,kji->k", sinv, con.coeffs).real
        if need_hess:
            t = sinv[None, :, :] @ con.coeffs
            hess += np.einsum("kil,mli->km", t, t).real
    if prob.b_ub.size:
        slack = prob.b_ub - prob.a_ub @ z
        if np.any(slack <= 0.0):
            return None
        val -= float(np.sum(np.log(slack)))
        grad += prob.a_ub.T @ (1.0 / slack)
        if need_hess:
            hess += (prob.a_ub / slack[:, None] ** 2).T @ prob.a_ub
    if need_hess:
        hess = 0.5 * (hess + hess.T)
    return val, grad, hess


def constraint_margins(prob, z):
    """Smallest margins of all constraint families at z (direct evaluation)."""
    margins = []
    for con in prob.logdets:
        s = _affine(con.base, con.coeffs, z)
        w = np.linalg.eigvalsh(0.5 * (s + s.conj().T))
        margins.append(float(w[0]))
        if w[0] > 0:
            f = float(np.sum(np.log(w))) - float(con.lin @ z) - con.offset
            margins.append(f)
        else:
            margins.append(-np.inf)
    for con in prob.lmis:
        s = _affine(con.base, con.coeffs, z)
        w = np.linalg.eigvalsh(0.5 * (s + s.conj().T))
        margins.append(float(w[0]))
    if prob.b_ub.size:
        margins.append(float(np.min(prob.b_ub - prob.a_ub @ z)))
    return min(margins) if margins else np.inf


def is_strictly_feasible(prob, z, delta=1e-8):
    return constraint_margins(prob, z) >= delta


def _newton_direction(hess, grad):
    n = hess.shape[0]
    reg = 0.0
    h = hess
    for _ in range(14):
        try:
            c, low = sla.cho_factor(h, check_finite=False)
            return sla.cho_solve((c, low), -grad, check_finite=False)
        except (sla.LinAlgError, ValueError):
            reg = max(reg * 10.0, 1e-10)
            h = hess + reg * np.eye(n)
    raise NumericalFailure("Hessian factorization failed after regularization")


def _centering(prob, z, t, tol, callback=None):
    """Newton minimization of phi_t from z.

    Returns (z, iters, phis, stop, decrement) with decrement the last
    computed lambda^2/2, so the caller can judge how well the final stage
    actually centered.
    """
    phis = []
    stop = False
    dec = 0.0
    for it in range(tol.max_centering):
        full = barrier_full(prob, z)
        if full is None:
            raise NumericalFailure("iterate left the barrier domain")
        val, g_bar, h_bar = full
        phi = -t * float(prob.c @ z) + val
        phis.append(phi)
        g = -t * prob.c + g_bar
        d = _newton_direction(h_bar, g)
        lam2 = float(-g @ d)
        dec = lam2 / 2.0
        # decrements below the floating-point resolution of phi are noise
        if dec <= tol.newton_tol + 64 * np.finfo(float).eps * (1.0 + abs(phi)):
            return z, it, phis, stop, dec
        alpha = 1.0
        gd = float(g @ d)
        accepted = False
        while alpha > 1e-18:
            zn = z + alpha * d
            vn = barrier_value(prob, zn)
            if vn is not None:
                phin = -t * float(prob.c @ zn) + vn
                if phin <= phi + tol.armijo * alpha * gd:
                    accepted = True
                    break
            alpha *= 0.5
        if not accepted:
            return z, it + 1, phis, stop, dec
        z = zn
        if callback is not None and callback(z):
            stop = True
            return z, it + 1, phis, stop, dec
    return z, tol.max_centering, phis, stop, dec


def solve(problem, z0=None, tol=None, callback=None):
    """Path-following solve from a strictly feasible start.

    When z0 is missing or not strictly feasible, phase 1 is run first.  The
    optional callback(z) is polled after each accepted Newton step and may
    return True to stop early (used by phase 1 itself).
    """
    tol = tol or Tolerances()
    if z0 is None or barrier_value(problem, np.asarray(z0, dtype=float)) is None:
        z0 = phase1_find_strictly_feasible(problem, hint=z0)
        if z0 is None:
            return SolveReport(
                status=INFEASIBLE,
                z_star=np.zeros(problem.n),
                objective_value=-np.inf,
                kkt_residual=np.inf,
                barrier_gap=np.inf,
                iterations=0,
            )
    z = np.asarray(z0, dtype=float).copy()
    nu = problem.barrier_nu
    t = tol.t_init
    t_final = 1.0 / tol.gap_tol_factor
    iterations = 0
    stages = []
    status = OPTIMAL
    dec = 0.0
    try:
        while True:
            z, it, phis, stop, dec = _centering(problem, z, t, tol, callback)
            iterations += it
            stages.append({"t": t, "newton_steps": it, "phi": phis})
            if stop:
                break
            if t >= t_final:
                break
            t = min(t * tol.t_growth, t_final)
        # an uncentered intermediate stage is self-correcting, so only the
        # final stage decides: a stalled finish is acceptable only when the
        # remaining Newton decrement translates to a negligible objective
        # error (~ dec / t)
        if status == OPTIMAL and not stop and dec / t > 1e-6 * (
            1.0 + abs(float(problem.c @ z))
        ):
            status = MAX_ITERATIONS
    except NumericalFailure:
        return SolveReport(
            status=NUMERICAL_FAILURE,
            z_star=z,
            objective_value=float(problem.c @ z),
            kkt_residual=np.inf,
            barrier_gap=nu / t,
            iterations=iterations,
            stage_objectives=stages,
        )
    res = barrier_gradient(problem, z)
    if res is None:
        kkt = np.inf
        status = NUMERICAL_FAILURE
    else:
        _, g_bar = res
        kkt = float(np.max(np.abs(-problem.c + g_bar / t)))
    if status == OPTIMAL and constraint_margins(problem, z) < -tol.feas_tol:
        status = NUMERICAL_FAILURE
    return SolveReport(
        status=status,
        z_star=z,
        objective_value=float(problem.c @ z),
        kkt_residual=kkt,
        barrier_gap=nu / t,
        iterations=iterations,
        stage_objectives=stages,
    )


def _augmented_problem(problem, box=None):
    """Phase-1 problem over (z, s): minimize s with every margin relaxed by s.

    ``box`` optionally adds |z_i| <= box; without it the phase-1 objective
    ignores z entirely and centering can drift to badly scaled points.
    """
    n = problem.n
    c_aug = np.zeros(n + 1)
    c_aug[n] = -1.0  # maximize -s
    logdets = []
    for con in problem.logdets:
        p = con.base.shape[0]
        coeffs = np.concatenate([con.coeffs, np.eye(p, dtype=complex)[None]], axis=0)
        lin = np.concatenate([con.lin, [-1.0]])
        logdets.append(LogDetConstraint(con.base, coeffs, lin, con.offset))
    lmis = []
    for con in problem.lmis:
        p = con.base.shape[0]
        coeffs = np.concatenate([con.coeffs, np.eye(p, dtype=complex)[None]], axis=0)
        lmis.append(LmiConstraint(con.base, coeffs))
    m = problem.b_ub.size
    a_rows = [np.hstack([problem.a_ub, -np.ones((m, 1))])] if m else []
    s_lo = np.zeros((1, n + 1))
    s_lo[0, n] = -1.0
    a_rows.append(s_lo)  # s >= -1 keeps phase 1 bounded
    rhs = [problem.b_ub, [1.0]]
    if box is not None:
        eye = np.hstack([np.eye(n), np.zeros((n, 1))])
        a_rows.append(eye)
        a_rows.append(-eye)
        rhs.append(np.full(2 * n, float(box)))
    a_ub = np.vstack(a_rows)
    b_ub = np.concatenate(rhs)
    return DetmaxProblem(c_aug, logdets, lmis, a_ub, b_ub)


def phase1_find_strictly_feasible(problem, hint=None, margin=1e-6):
    """Strictly feasible point for the problem, or None when infeasible.

    The relaxation ``min s`` with every matrix inflated by s I, every
    log-det slack credited +s, and every linear slack credited +s is itself
    a determinant-maximization problem; any solution with s < 0 yields a
    strictly feasible point of the original.
    """
    if hint is not None:
        hint = np.asarray(hint, dtype=float)
        if is_strictly_feasible(problem, hint, delta=1e-8):
            return hint
    n = problem.n
    scale = 1.0
    if hint is not None and np.all(np.isfinite(hint)):
        scale = max(scale, float(np.max(np.abs(hint))))
    if problem.b_ub.size:
        scale = max(scale, float(np.max(np.abs(problem.b_ub))))

    def early_exit(zz):
        return zz[n] <= -margin

    # the bounded attempt keeps centering near the problem's natural scale;
    # the unbounded retry guards against a box that truncated the feasible set
    for box in (1e3 * scale, None):
        aug = _augmented_problem(problem, box=box)
        z = np.zeros(n + 1) if hint is None else np.concatenate([hint, [0.0]])
        if box is not None and np.max(np.abs(z[:n])) >= box:
            continue
        s = 1.0
        grown = False
        for _ in range(80):
            z[n] = s
            if barrier_value(aug, z) is not None and constraint_margins(aug, z) > 1e-6:
                grown = True
                break
            s *= 2.0
        if not grown:
            continue
        tol = Tolerances(gap_tol_factor=1e-9)
        report = solve(aug, z0=z, tol=tol, callback=early_exit)
        if report.status == NUMERICAL_FAILURE:
            continue
        z_star = report.z_star
        if z_star[n] >= -1e-9:
            continue
        cand = z_star[:n]
        if is_strictly_feasible(problem, cand, delta=min(1e-8, -z_star[n] / 2)):
            return cand
    return None
