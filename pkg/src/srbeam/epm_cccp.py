"""Exact-penalty CCCP solver for the locally optimal beamformer.

The rank coupling M = P P^H is expressed through the 3Nt x 3Nt LMI

    [[W1, M, P], [M^H, W2, P], [P^H, P^H, I]] >= 0,   tr(W1 - P P^H) <= 0,

the trace condition is moved into the objective with weight mu, and the
two concave pieces (|h_i^H P 1|^2 and mu tr(P P^H)) are replaced by their
tangent surrogates around the incumbent, giving a convex determinant-
maximization subproblem per iteration.

One deliberate strengthening of the feasible set: the slack W2 is capped by
tr(W2) <= tr(W1).  The cap is inactive at every point with M = P P^H
(take W1 = W2 = P P^H) so the reformulation stays exact, and it turns the
Schur-complement bound on ||M - P P^H|| into tr(W1 - P P^H) itself, which
makes the penalty residual directly control the lifting error.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from srbeam import detmax, lin, model
from srbeam.model import LN2

STATUS_OK = "ok"
STATUS_INFEASIBLE = "infeasible"
STATUS_RESIDUAL = "residual_not_closed"
STATUS_FAILURE = "solver_failure"


class SubproblemInfeasible(RuntimeError):
    pass


@dataclass
class EpmConfig:
    mu_init: float = 1.0
    mu_growth: float = 10.0
    mu_max: float = 1e6
    mu_min: float = 0.03  # floor of the on-acceptance damping decay
    step_tol: float = 0.05  # bits; mid-run primary-rate violation that rejects a step
    cccp_tol: float = 1e-4  # relative change of the penalized objective
    residual_tol: float = 1e-5  # on tr(W1 - P P^H)
    max_outer: int = 8
    max_cccp_iters: int = 50
    init_strategy: str = "auto"  # auto | mrt_h | mrt_g | random | given
    init_P: Optional[np.ndarray] = None
    n_random_inits: int = 8
    init_seed: int = 0

    def __post_init__(self):
        if self.mu_init > self.mu_max:
            raise ValueError("mu_init must not exceed mu_max")
        if self.mu_growth <= 1.0:
            raise ValueError("mu_growth must exceed 1")
        for name in ("cccp_tol", "residual_tol", "mu_init", "mu_min", "step_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


@dataclass
class EpmState:
    P_l: np.ndarray
    M: np.ndarray
    W1: np.ndarray
    W2: np.ndarray
    q: np.ndarray
    r_b_surrogate: float  # nats
    residual: float  # tr(W1 - P P^H)
    objective: float  # exact penalized objective at this iterate
    solver_iterations: int = 0


@dataclass
class EpmDiagnostics:
    status: str
    iterations: int
    mu_final: float
    residual: float
    objective_trace: List[float] = field(default_factory=list)
    residual_trace: List[float] = field(default_factory=list)
    states: List[EpmState] = field(default_factory=list)


def lemma1_lmi(M, P, W1, W2):
    """Assemble the 3Nt x 3Nt lifting LMI block matrix."""
    n = np.asarray(P).shape[0]
    for a in (M, P, W1, W2):
        if np.asarray(a).shape != (n, n):
            raise lin.DimensionMismatch("all Lemma-1 blocks must be N_t x N_t")
    M, P, W1, W2 = (np.asarray(a, dtype=complex) for a in (M, P, W1, W2))
    eye = np.eye(n, dtype=complex)
    return np.block(
        [
            [W1, M, P],
            [M.conj().T, W2, P],
            [P.conj().T, P.conj().T, eye],
        ]
    )


@dataclass
class AffineXi:
    """Tangent surrogate of |h_i^H P 1|^2 around an expansion point.

    value(P) = const + Re sum_ab weight[a,b] * P[a,b]; the weight encodes
    2 conj(v) conj(h_i) 1^T with v = h_i^H P~ 1.
    """

    const: float
    weight: np.ndarray

    def value(self, P):
        return self.const + float(np.real(np.sum(self.weight * np.asarray(P))))


def linearize_xi(channels, P_tilde):
    """Per-BD-antenna affine underestimators of xi_i = |h_i^H P 1|^2."""
    P_tilde = lin.as_cmat(P_tilde, channels.n_t, channels.n_t)
    ones = np.ones(channels.n_t, dtype=complex)
    out = []
    for i in range(channels.n_b):
        h = channels.H[i].conj()  # h_i; H rows are h_i^H
        v = complex(h.conj() @ P_tilde @ ones)
        weight = 2.0 * np.conj(v) * np.outer(h.conj(), ones)
        out.append(AffineXi(const=-abs(v) ** 2, weight=weight))
    return out


@dataclass
class AffineZeta:
    const: float
    weight: np.ndarray

    def value(self, P):
        return self.const + float(np.real(np.sum(self.weight * np.asarray(P))))


def linearize_zeta(P_tilde, mu):
    """Affine underestimator of zeta = mu tr(P P^H) around P_tilde."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    P_tilde = np.asarray(P_tilde, dtype=complex)
    return AffineZeta(
        const=-mu * model.power_used(P_tilde),
        weight=2.0 * mu * P_tilde.conj(),
    )


class _SubproblemLayout:
    """Variable indexing for the CCCP subproblem.

    z = [M herm params | Re/Im P entries | W1 herm | W2 herm | r]

    The backscatter gains q_i are not free variables: each subproblem
    substitutes the tangent surrogate xi_hat_i(P), affine in P, wherever
    q_i appears.  A free q_i coupled to P only through q_i <= xi_hat_i
    lets the optimizer understate the interference (gaining artificial
    primary-rate margin at a small cost in r), so its limit points violate
    the true primary-rate constraint; with the substitution the modeled
    and true gains agree to first order and coincide at any fixed point.
    """

    def __init__(self, n_t, active):
        self.n_t = n_t
        self.active = list(active)
        self.h = n_t * n_t  # herm params per block
        self.p = 2 * n_t * n_t
        self.i_m = 0
        self.i_p = self.h
        self.i_w1 = self.i_p + self.p
        self.i_w2 = self.i_w1 + self.h
        self.i_r = self.i_w2 + self.h
        self.n = self.i_r + 1
        self.basis = lin.herm_basis(n_t)

    def pack(self, M, P, W1, W2, r):
        z = np.zeros(self.n)
        z[self.i_m : self.i_m + self.h] = lin.herm_params(M)
        pv = np.asarray(P, dtype=complex).reshape(-1)
        z[self.i_p : self.i_p + self.p : 2] = pv.real
        z[self.i_p + 1 : self.i_p + self.p : 2] = pv.imag
        z[self.i_w1 : self.i_w1 + self.h] = lin.herm_params(W1)
        z[self.i_w2 : self.i_w2 + self.h] = lin.herm_params(W2)
        z[self.i_r] = r
        return z

    def unpack(self, z):
        n_t = self.n_t
        M = lin.herm_from_params(z[self.i_m : self.i_m + self.h], n_t)
        pv = z[self.i_p : self.i_p + self.p : 2] + 1j * z[self.i_p + 1 : self.i_p + self.p : 2]
        P = pv.reshape(n_t, n_t)
        W1 = lin.herm_from_params(z[self.i_w1 : self.i_w1 + self.h], n_t)
        W2 = lin.herm_from_params(z[self.i_w2 : self.i_w2 + self.h], n_t)
        r = float(z[self.i_r])
        return M, P, W1, W2, r

    def p_entry_index(self, a, b):
        """Variable indices (re, im) of P[a, b]; P is packed row-major."""
        flat = a * self.n_t + b
        return self.i_p + 2 * flat, self.i_p + 2 * flat + 1


def _active_bd_indices(channels):
    act = []
    for i in range(channels.n_b):
        if (
            np.linalg.norm(channels.H[i]) > 1e-12
            and np.linalg.norm(channels.F[:, i]) > 1e-12
        ):
            act.append(i)
    return act


def build_subproblem(spec, P_l, mu, layout):
    """Convex determinant-maximization subproblem around the incumbent P_l."""
    ch = spec.channels
    n_t, n_r = ch.n_t, ch.n_r
    t_min = spec.r_t_min * LN2
    n = layout.n
    eye_r = np.eye(n_r, dtype=complex)

    # Both log-det constraints see the backscatter gains only through the
    # tangent surrogate xi_hat_i(P) = const_i + Re sum_ab w_i[a,b] P[a,b],
    # substituted in place of q_i (see _SubproblemLayout).  The modeled
    # interference covariance is then affine in P:
    #   Q_hat(P) = sum_i xi_hat_i(P) f_i f_i^H.
    xis = linearize_xi(ch, P_l)
    d_l = model.compute_D(ch, P_l)
    q_l = {bd: float(np.abs(d_l[bd]) ** 2) for bd in layout.active}
    k_l = np.eye(n_r, dtype=complex)
    for bd in layout.active:
        f_col = ch.F[:, bd]
        k_l = k_l + q_l[bd] * np.outer(f_col, f_col.conj())
    k_l_inv = np.linalg.inv(k_l)

    # log-det constraint 1: ln det(I + Q_hat(P) mapped through F) >= r
    base1 = eye_r.copy()
    coeffs1 = np.zeros((n, n_r, n_r), dtype=complex)
    for bd in layout.active:
        f_col = ch.F[:, bd]
        f_outer = np.outer(f_col, f_col.conj())
        xi = xis[bd]
        base1 += xi.const * f_outer
        for a in range(n_t):
            for bcol in range(n_t):
                i_re, i_im = layout.p_entry_index(a, bcol)
                w = xi.weight[a, bcol]
                coeffs1[i_re] += w.real * f_outer
                coeffs1[i_im] += -w.imag * f_outer
    lin1 = np.zeros(n)
    lin1[layout.i_r] = 1.0
    con1 = detmax.LogDetConstraint(base1, coeffs1, lin1, 0.0)

    # log-det constraint 2 enforces the primary-rate requirement
    #   ln det(I + F Q F^H + G M G^H) - ln det(I + F Q F^H) >= t_min.
    # The subtracted term is concave in the gains, so it is replaced by its
    # tangent at the incumbent gains q_l (an upper bound, tight at q_l); the
    # constraint is an inner convex approximation whose fixed points satisfy
    # the true primary-rate constraint.  Replacing the subtracted term with
    # the slack r instead (a plain lower bound) lets the optimizer inflate
    # the interference on both sides and converge to points that violate the
    # true constraint.
    coeffs2 = coeffs1.copy()
    for k, b in enumerate(layout.basis):
        coeffs2[layout.i_m + k] = ch.G @ b @ ch.G.conj().T
    lin2 = np.zeros(n)
    offset2 = t_min + lin.logdet_psd(k_l, 1e-9)
    for bd in layout.active:
        f_col = ch.F[:, bd]
        g_i = float(np.real(f_col.conj() @ k_l_inv @ f_col))
        xi = xis[bd]
        offset2 += g_i * (xi.const - q_l[bd])
        for a in range(n_t):
            for bcol in range(n_t):
                i_re, i_im = layout.p_entry_index(a, bcol)
                w = xi.weight[a, bcol]
                lin2[i_re] += g_i * w.real
                lin2[i_im] += g_i * (-w.imag)
    con2 = detmax.LogDetConstraint(base1.copy(), coeffs2, lin2, offset2)

    # Lemma-1 LMI, affine in (M, P, W1, W2)
    big = 3 * n_t
    base = np.zeros((big, big), dtype=complex)
    base[2 * n_t :, 2 * n_t :] = np.eye(n_t)
    lmi_coeffs = np.zeros((n, big, big), dtype=complex)
    for k, b in enumerate(layout.basis):
        m_dir = np.zeros((big, big), dtype=complex)
        m_dir[:n_t, n_t : 2 * n_t] = b
        m_dir[n_t : 2 * n_t, :n_t] = b.conj().T
        lmi_coeffs[layout.i_m + k] = m_dir
        w1_dir = np.zeros((big, big), dtype=complex)
        w1_dir[:n_t, :n_t] = b
        lmi_coeffs[layout.i_w1 + k] = w1_dir
        w2_dir = np.zeros((big, big), dtype=complex)
        w2_dir[n_t : 2 * n_t, n_t : 2 * n_t] = b
        lmi_coeffs[layout.i_w2 + k] = w2_dir
    for a in range(n_t):
        for bcol in range(n_t):
            i_re, i_im = layout.p_entry_index(a, bcol)
            for unit, idx in ((1.0, i_re), (1.0j, i_im)):
                d = np.zeros((big, big), dtype=complex)
                d[a, 2 * n_t + bcol] = unit
                d[n_t + a, 2 * n_t + bcol] = unit
                d[2 * n_t + bcol, a] = np.conj(unit)
                d[2 * n_t + bcol, n_t + a] = np.conj(unit)
                lmi_coeffs[idx] = d
    lemma_lmi = detmax.LmiConstraint(base, lmi_coeffs)

    # M >= 0
    m_coeffs = np.zeros((n, n_t, n_t), dtype=complex)
    for k, b in enumerate(layout.basis):
        m_coeffs[layout.i_m + k] = b
    m_psd = detmax.LmiConstraint(np.zeros((n_t, n_t), dtype=complex), m_coeffs)

    rows, rhs = [], []
    # tr(M) <= P
    row = np.zeros(n)
    for k, b in enumerate(layout.basis):
        row[layout.i_m + k] = float(np.real(np.trace(b)))
    rows.append(row)
    rhs.append(spec.power_budget)
    # tr(W2) <= tr(W1)
    row = np.zeros(n)
    for k, b in enumerate(layout.basis):
        tr_b = float(np.real(np.trace(b)))
        row[layout.i_w2 + k] = tr_b
        row[layout.i_w1 + k] -= tr_b
    rows.append(row)
    rhs.append(0.0)
    # -r <= 0
    row = np.zeros(n)
    row[layout.i_r] = -1.0
    rows.append(row)
    rhs.append(0.0)

    # objective: maximize r - mu tr(W1) + 2 mu Re tr(P P_l^H), i.e. minimize
    # -r + mu tr(W1) - zeta_hat(P) with zeta_hat the tangent of mu tr(P P^H)
    c = np.zeros(n)
    c[layout.i_r] = 1.0
    for k, b in enumerate(layout.basis):
        c[layout.i_w1 + k] = -mu * float(np.real(np.trace(b)))
    zeta = linearize_zeta(P_l, mu)
    for a in range(n_t):
        for bcol in range(n_t):
            i_re, i_im = layout.p_entry_index(a, bcol)
            w = zeta.weight[a, bcol]
            c[i_re] += w.real
            c[i_im] += -w.imag
    return detmax.DetmaxProblem(c, [con1, con2], [lemma_lmi, m_psd], np.array(rows), np.array(rhs))


def _interior_from_incumbent(spec, P_l, layout, problem):
    """Strictly feasible subproblem start built around the incumbent."""
    ch = spec.channels
    n_t = ch.n_t
    budget = spec.power_budget
    # gentle perturbations first: the incumbent can sit within ~1e-2 nats of
    # the primary-rate boundary, so aggressive shrinks lose strict feasibility
    ladder = (
        (1e-5, 1e-7),
        (1e-4, 1e-6),
        (1e-3, 1e-6),
        (1e-2, 1e-5),
        (0.1, 1e-4),
    )
    xis = linearize_xi(ch, P_l)
    for shrink, eps_scale in ladder:
        pz = P_l * (1.0 - shrink)
        eps = eps_scale * max(budget, 1.0) / n_t
        pph = pz @ pz.conj().T
        m0 = pph + eps * np.eye(n_t)
        w1 = pph + 3 * eps * np.eye(n_t)
        w2 = pph + 2 * eps * np.eye(n_t)
        if np.real(np.trace(m0)) >= budget:
            continue
        fq = np.zeros((ch.n_r, ch.n_r), dtype=complex)
        for bd in layout.active:
            fq += xis[bd].value(pz) * np.outer(ch.F[:, bd], ch.F[:, bd].conj())
        s1 = np.eye(ch.n_r, dtype=complex) + fq
        s2 = s1 + ch.G @ m0 @ ch.G.conj().T
        try:
            b1 = lin.logdet_psd(s1, 1e-7)
            lin.logdet_psd(s2, 1e-7)
        except lin.NotPositiveDefinite:
            continue
        r0 = 0.9 * b1
        if r0 <= 0:
            continue
        z = layout.pack(m0, pz, w1, w2, r0)
        if detmax.is_strictly_feasible(problem, z, delta=1e-12):
            return z
    return None


def _incumbent_hint(spec, P_l, layout):
    """Packed incumbent, used as a phase-1 hint when no interior start exists."""
    ch = spec.channels
    pph = P_l @ P_l.conj().T
    d_l = model.compute_D(ch, P_l)
    fq = np.zeros((ch.n_r, ch.n_r), dtype=complex)
    for bd in layout.active:
        v = float(np.abs(d_l[bd]) ** 2)
        fq += v * np.outer(ch.F[:, bd], ch.F[:, bd].conj())
    try:
        r0 = lin.logdet_psd(lin.herm(np.eye(ch.n_r) + fq, 1e-6))
    except lin.NotPositiveDefinite:
        r0 = 0.0
    return layout.pack(pph, P_l, pph, pph, max(r0, 0.0))


def cccp_step(spec, P_l, mu, layout, tol=None):
    """Solve one convex subproblem around P_l and return the new EpmState."""
    problem = build_subproblem(spec, P_l, mu, layout)
    z0 = _interior_from_incumbent(spec, P_l, layout, problem)
    if z0 is None:
        z0 = _incumbent_hint(spec, P_l, layout)
    report = detmax.solve(problem, z0=z0, tol=tol)
    if report.status == detmax.INFEASIBLE:
        raise SubproblemInfeasible("CCCP subproblem has no strictly feasible point")
    if report.status != detmax.OPTIMAL:
        raise detmax.NumericalFailure(f"subproblem solve ended with {report.status}")
    M, P, W1, W2, r = layout.unpack(report.z_star)
    residual = float(np.real(np.trace(W1 - P @ P.conj().T)))
    objective = -r + mu * residual
    # exact gains of the new iterate, for diagnostics (the subproblem models
    # them through the tangent around P_l)
    d_new = model.compute_D(spec.channels, P)
    q_full = np.abs(d_new) ** 2
    return EpmState(
        P_l=P,
        M=M,
        W1=W1,
        W2=W2,
        q=q_full,
        r_b_surrogate=r,
        residual=residual,
        objective=objective,
        solver_iterations=report.iterations,
    )


def _rotate_to_feasibility(spec, p_base, buffer=0.02):
    """Right-rotate a beamformer until the primary-rate constraint holds.

    The primary rate depends on P only through PP^H and the excitation
    vector P1, so right-multiplying by a unitary leaves the signal
    covariance unchanged while steering P1.  Mapping 1 toward the least
    right-singular direction of H @ P_base reduces the interference power;
    the smallest rotation with R_t >= r_t + buffer keeps the excitation
    (and hence the secondary rate) as large as feasibility allows.
    """
    ch = spec.channels
    n_t = ch.n_t
    a = ch.H @ p_base
    if not np.all(np.isfinite(a)):
        return None
    _, _, vh = np.linalg.svd(a)
    v_min = vh[-1].conj()
    ones_dir = np.ones(n_t) / np.sqrt(n_t)
    ip = np.vdot(ones_dir, v_min)
    if abs(ip) > 1e-12:
        v_min = v_min * (np.conj(ip) / abs(ip))

    def candidate(t):
        # rotate 1 only part of the way toward the least-excitation direction;
        # a full rotation can null P1 exactly, which leaves the downstream
        # linearizations without a usable gradient in q
        target = (1.0 - t) * ones_dir + t * v_min
        nrm_t = np.linalg.norm(target)
        if nrm_t < 1e-12:
            return None
        target = target / nrm_t
        diff = ones_dir - target
        nrm = np.linalg.norm(diff)
        if nrm < 1e-12:
            u = np.eye(n_t, dtype=complex)
        else:
            w = diff / nrm
            u = np.eye(n_t, dtype=complex) - 2.0 * np.outer(w, w.conj())
        return p_base @ u

    need = spec.r_t_min + buffer

    def slack_ok(t):
        cand = candidate(t)
        if cand is None:
            return False, None
        return model.rate_primary(ch, cand) >= need, cand

    ok, cand = slack_ok(0.0)
    if ok:
        return cand
    ok, cand = slack_ok(0.98)
    if not ok:
        ok, cand = slack_ok(1.0)
        return cand if ok else None
    lo, hi, best = 0.0, 0.98, cand
    for _ in range(20):
        mid = 0.5 * (lo + hi)
        ok, cand = slack_ok(mid)
        if ok:
            hi, best = mid, cand
        else:
            lo = mid
    return best


def _capacity_rotation_candidate(spec):
    """Waterfilling beamformer rotated until the primary rate is feasible —
    the strongest simple feasibility probe for tight r_t targets."""
    try:
        _, p_wf = model.primary_capacity(spec.channels.G, spec.power_budget)
    except (ValueError, np.linalg.LinAlgError):
        return None
    return _rotate_to_feasibility(spec, p_wf)


def _relaxation_start(spec):
    """Principal-component beamformer of the rank-relaxed solution.

    Warm-starting the CCCP from the dominant component of the lifted
    relaxation usually lands inside the basin of the best local optimum;
    when the relaxed solution is rank one the first iteration already
    certifies it.  Returns (P or None, upper bound in bits or None).
    """
    from srbeam import sdr_ub

    try:
        res = sdr_ub.solve_upper_bound(spec)
    except Exception:
        return None, None
    if res.status != detmax.OPTIMAL or res.Psi is None:
        return None, None
    if res.recovered_P is not None:
        return res.recovered_P.P, res.r_b_upper
    try:
        w, vecs = np.linalg.eigh(lin.herm(res.Psi, 1e-6))
    except (ValueError, np.linalg.LinAlgError):
        return None, res.r_b_upper
    lam1 = float(w[-1])
    if lam1 <= 0:
        return None, res.r_b_upper
    p_vec = np.sqrt(lam1) * vecs[:, -1]
    p_mat = lin.unvec(p_vec, spec.channels.n_t, spec.channels.n_t)
    return _project_budget(p_mat, spec.power_budget), res.r_b_upper


def _random_starts(spec, config):
    ch = spec.channels
    rng = np.random.default_rng(config.init_seed)
    out = []
    for _ in range(config.n_random_inits):
        p = rng.standard_normal((ch.n_t, ch.n_t)) + 1j * rng.standard_normal(
            (ch.n_t, ch.n_t)
        )
        p *= np.sqrt(spec.power_budget / model.power_used(p))
        out.append(p)
    return out


def _initial_beamformer(spec, config):
    """First candidate with R_t >= r_t, per the configured strategy."""
    from srbeam import baselines

    ch = spec.channels
    budget = spec.power_budget
    cands = []
    strategy = config.init_strategy
    if strategy == "given":
        if config.init_P is None:
            raise ValueError("init_strategy 'given' requires init_P")
        cands.append(np.asarray(config.init_P, dtype=complex))
    else:
        order = {
            "mrt_h": ("h",),
            "mrt_g": ("g",),
            "random": (),
        }.get(strategy)
        if order is None:
            raise ValueError(f"unknown init strategy {strategy!r}")
        for target in order:
            try:
                cands.append(baselines.mrt_beamformer(ch, budget, target).P)
            except baselines.DegenerateChannel:
                pass
        if strategy == "random":
            cands.extend(_random_starts(spec, config))
    for p in cands:
        if model.rate_primary(ch, p) >= spec.r_t_min - model.RATE_TOL:
            return p
    return None


def _project_budget(P, budget):
    used = model.power_used(P)
    if used > budget:
        return P * np.sqrt(budget / used)
    return P


def _polish_feasibility(spec, P, mu, layout, sub_tol=None):
    """Extra CCCP steps at escalating mu until the true primary-rate
    constraint holds; the per-step violation is O(step^2), so raising mu
    (shorter proximal steps) drives it below tolerance quickly."""
    p_l = P
    for _ in range(8):
        cand = _project_budget(p_l, spec.power_budget)
        if model.is_feasible(spec, cand)[0]:
            return cand
        mu = min(10.0 * mu, 1e8)
        try:
            p_l = cccp_step(spec, p_l, mu, layout, tol=sub_tol).P_l
        except (SubproblemInfeasible, detmax.NumericalFailure):
            return None
    cand = _project_budget(p_l, spec.power_budget)
    return cand if model.is_feasible(spec, cand)[0] else None


def _extrapolate_step(spec, p_prev, p_new, gamma_max=256.0):
    """Over-relaxed next incumbent along the accepted step direction.

    The tangent-corrected primary-rate constraint is an inner approximation,
    so plain CCCP contracts geometrically along the rate boundary.  Pushing
    the incumbent further along the step direction is safe whenever the true
    rates confirm it: the next subproblem linearizes around whatever
    incumbent it is given.  A doubling search followed by a short bisection
    refinement keeps the best confirmed candidate; falls back to the
    unextrapolated iterate.
    """
    ch = spec.channels
    step = p_new - p_prev
    if float(np.linalg.norm(step)) <= 1e-14 * max(1.0, float(np.linalg.norm(p_new))):
        return p_new
    best = p_new
    best_rb = model.rate_secondary(ch, p_new)
    gamma_best = 1.0

    def try_gamma(gamma):
        nonlocal best, best_rb, gamma_best
        cand = _project_budget(p_prev + gamma * step, spec.power_budget)
        if model.rate_primary(ch, cand) < spec.r_t_min - model.RATE_TOL:
            return False
        rb = model.rate_secondary(ch, cand)
        if rb <= best_rb + 1e-12:
            return False
        best, best_rb, gamma_best = cand, rb, gamma
        return True

    gamma = 2.0
    while gamma <= gamma_max and try_gamma(gamma):
        gamma *= 2.0
    # the doubling stopped between gamma_best and gamma: bisect that
    # bracket a few times to capture the remaining confirmed progress
    lo, hi = gamma_best, min(gamma, gamma_max)
    for _ in range(5):
        mid = 0.5 * (lo + hi)
        if try_gamma(mid):
            lo = mid
        else:
            hi = mid
    return best


def _run_cccp(spec, config, p0, layout, sub_tol=None):
    """CCCP with trust-region-style mu control from one starting beamformer."""
    ch = spec.channels
    mu = config.mu_init
    # shorter proximal steps are safer but slower; on accepted steps the
    # damping relaxes again so boundary-following does not crawl
    mu_min = min(config.mu_init, config.mu_min)
    p_l = p0
    state = None
    obj_trace, res_trace, states = [], [], []
    total_iters = 0
    status = STATUS_RESIDUAL
    obj_prev = None
    accepted_this_mu = 0
    # Trust-region-style control: the CCCP tangents are only accurate near
    # the incumbent, so a step whose true primary rate falls below r_t is
    # rejected and mu is raised (more proximal damping, smaller steps)
    # instead of seeding the next subproblem with an infeasible point.
    iter_budget = config.max_outer * config.max_cccp_iters
    # mid-run iterates may approach the optimum from slightly outside the
    # feasible set (the final polish closes the gap); rejecting only clear
    # violations keeps the steps long enough to avoid boundary crawling
    step_tol = max(config.step_tol, 10.0 * config.cccp_tol)
    # below the exact-penalty threshold the lifting decouples from P (the
    # residual buys objective), so such steps are rejected as well
    res_guard = max(10.0 * config.residual_tol, 1e-4)
    failed = False
    for _ in range(iter_budget):
        try:
            state = cccp_step(spec, p_l, mu, layout, tol=sub_tol)
        except (SubproblemInfeasible, detmax.NumericalFailure):
            # numerically thin subproblem: shorten the step and retry
            if mu * config.mu_growth > config.mu_max:
                failed = True
                break
            mu *= config.mu_growth
            obj_prev = None
            accepted_this_mu = 0
            continue
        total_iters += 1
        rate_slack = model.rate_primary(ch, state.P_l) - spec.r_t_min
        if rate_slack < -step_tol or state.residual > res_guard:
            if mu * config.mu_growth > config.mu_max:
                break
            mu *= config.mu_growth
            obj_prev = None
            accepted_this_mu = 0
            continue
        obj_trace.append(state.objective)
        res_trace.append(state.residual)
        p_l = _extrapolate_step(spec, p_l, state.P_l)
        if p_l is not state.P_l:
            # the accepted iterate the algorithm carries forward is the
            # extrapolated incumbent, so that is what gets recorded (and
            # what the terminal report is built from)
            state = dataclasses.replace(state, P_l=p_l)
        states.append(state)
        accepted_this_mu += 1
        converged = obj_prev is not None and abs(
            state.objective - obj_prev
        ) <= config.cccp_tol * max(1.0, abs(state.objective))
        obj_prev = state.objective
        if converged:
            if state.residual <= config.residual_tol:
                status = STATUS_OK
                break
            if mu * config.mu_growth > config.mu_max:
                break
            mu *= config.mu_growth
            obj_prev = None
            accepted_this_mu = 0
            continue
        if accepted_this_mu >= config.max_cccp_iters:
            break
        mu = max(mu_min, 0.5 * mu)
    if failed and not states:
        return None, None, EpmDiagnostics(
            STATUS_FAILURE, total_iters, mu, np.inf, obj_trace, res_trace, states
        )

    # the last cccp_step may have been a rejected step; report from the last
    # accepted state.  An iteration cap with the residual already closed
    # still yields a usable P.
    state = states[-1] if states else None
    if status != STATUS_OK and state is not None and state.residual <= config.residual_tol:
        status = STATUS_OK
    residual = state.residual if state is not None else np.inf
    diag = EpmDiagnostics(status, total_iters, mu, residual, obj_trace, res_trace, states)
    if status != STATUS_OK:
        return None, None, diag

    p_final = _project_budget(state.P_l, spec.power_budget)
    ok, rate_slack, _ = model.is_feasible(spec, p_final)
    if not ok and rate_slack > -step_tol:
        p_final = _polish_feasibility(spec, state.P_l, mu, layout, sub_tol)
        ok = p_final is not None
    if not ok:
        diag.status = STATUS_FAILURE
        return None, None, diag
    bf = model.Beamformer(p_final, spec.power_budget)
    return bf, model.rate_report(ch, p_final), diag


def _solve_multistart(spec, config, layout, sub_tol=None):
    """Auto strategy: relaxation warm start, MRT directions, the rotation
    probe, then random fallbacks; the best feasible finish wins.  Starts
    need not satisfy the primary-rate constraint themselves — the first
    subproblem projects into the (inner-approximated) feasible set."""
    from srbeam import baselines

    ch = spec.channels
    budget = spec.power_budget
    p_relax, rb_upper = _relaxation_start(spec)
    cands = []
    if p_relax is not None:
        # the relaxed optimum may understate the backscatter gains, so its
        # principal component can be far inside the infeasible region;
        # rotating the excitation back to feasibility preserves its signal
        # covariance, which is what made the start valuable
        if model.rate_primary(ch, p_relax) < spec.r_t_min - model.RATE_TOL:
            rotated = _rotate_to_feasibility(spec, p_relax)
            if rotated is not None:
                p_relax = rotated
        cands.append(p_relax)
    for target in ("h", "g"):
        try:
            cands.append(baselines.mrt_beamformer(ch, budget, target).P)
        except baselines.DegenerateChannel:
            pass
    pc = _capacity_rotation_candidate(spec)
    if pc is not None:
        cands.append(pc)
    randoms = _random_starts(spec, config)

    starts = []
    for p in cands:
        # near-duplicate starts add runtime without reaching new basins
        if all(
            np.linalg.norm(p - s) > 1e-6 * max(1.0, np.linalg.norm(p))
            for s in starts
        ):
            starts.append(p)

    best = None
    last_diag = None
    for p0 in starts:
        bf, rep, diag = _run_cccp(spec, config, p0, layout, sub_tol)
        last_diag = diag
        if bf is None:
            continue
        if best is None or rep.r_b_achieved > best[1].r_b_achieved:
            best = (bf, rep, diag)
        if rb_upper is not None and best[1].r_b_achieved >= rb_upper - max(
            0.01, 0.01 * abs(rb_upper)
        ):
            break  # within 1% of the relaxation bound: no better basin exists
    if best is None:
        for p0 in randoms:
            if model.rate_primary(ch, p0) < spec.r_t_min - model.RATE_TOL:
                continue
            bf, rep, diag = _run_cccp(spec, config, p0, layout, sub_tol)
            last_diag = diag
            if bf is not None:
                best = (bf, rep, diag)
                break
    if best is not None:
        return best
    any_rt_feasible = any(
        model.rate_primary(ch, p) >= spec.r_t_min - model.RATE_TOL
        for p in cands + randoms
    )
    if not any_rt_feasible or last_diag is None:
        return None, None, EpmDiagnostics(STATUS_INFEASIBLE, 0, 0.0, 0.0)
    return None, None, last_diag


def solve_epm(spec, config=None, sub_tol=None):
    """Locally optimal beamformer; returns (Beamformer, RateReport, diag)."""
    config = config or EpmConfig()
    ch = spec.channels
    active = _active_bd_indices(ch)

    if not active:
        # no backscatter path: r_b = 0 for every P, return a feasible P
        cap, p_wf = model.primary_capacity(ch.G, spec.power_budget)
        if cap < spec.r_t_min - model.RATE_TOL:
            diag = EpmDiagnostics(STATUS_INFEASIBLE, 0, 0.0, 0.0)
            return None, None, diag
        bf = model.Beamformer(p_wf, spec.power_budget)
        diag = EpmDiagnostics(STATUS_OK, 0, 0.0, 0.0)
        return bf, model.rate_report(ch, p_wf), diag

    # interference only lowers the primary rate, so the water-filling
    # capacity is an upper bound on R_t over all beamformers: below the
    # target no initialization can exist
    cap, _ = model.primary_capacity(ch.G, spec.power_budget)
    if cap < spec.r_t_min - model.RATE_TOL:
        return None, None, EpmDiagnostics(STATUS_INFEASIBLE, 0, 0.0, 0.0)

    layout = _SubproblemLayout(ch.n_t, active)
    if config.init_strategy == "auto":
        return _solve_multistart(spec, config, layout, sub_tol)
    p0 = _initial_beamformer(spec, config)
    if p0 is None:
        return None, None, EpmDiagnostics(STATUS_INFEASIBLE, 0, 0.0, 0.0)
    return _run_cccp(spec, config, p0, layout, sub_tol)
