"""System model: channels, covariance, exact achievable rates, feasibility.

Noise power is fixed to 1; the SNR axis of the experiments is swept by
varying the transmit power budget.  Rates are reported in bits/s/Hz at this
API surface and computed in nats internally.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from srbeam import lin
from srbeam.lin import DimensionMismatch

LN2 = float(np.log(2.0))

RATE_TOL = 1e-6  # bits, feasibility slack on the primary-rate constraint
POWER_TOL = 1e-6  # absolute slack on the transmit power constraint


@dataclass(frozen=True)
class ChannelSet:
    """One realization of the three channel matrices.

    G: N_r x N_t transmitter -> receiver
    H: N_b x N_t transmitter -> backscatter device (rows h_i^H)
    F: N_r x N_b backscatter device -> receiver
    """

    G: np.ndarray
    H: np.ndarray
    F: np.ndarray

    def __post_init__(self):
        g = lin.as_cmat(self.G)
        h = lin.as_cmat(self.H)
        f = lin.as_cmat(self.F)
        if g.shape[1] != h.shape[1]:
            raise DimensionMismatch("G and H must share the transmit dimension")
        if f.shape[0] != g.shape[0]:
            raise DimensionMismatch("F and G must share the receive dimension")
        if f.shape[1] != h.shape[0]:
            raise DimensionMismatch("F columns must match BD antennas")
        object.__setattr__(self, "G", g)
        object.__setattr__(self, "H", h)
        object.__setattr__(self, "F", f)

    @property
    def n_t(self):
        return self.G.shape[1]

    @property
    def n_r(self):
        return self.G.shape[0]

    @property
    def n_b(self):
        return self.H.shape[0]


@dataclass(frozen=True)
class Beamformer:
    """N_t x N_t precoder with its power budget tr(PP^H) <= power_budget."""

    P: np.ndarray
    power_budget: float

    def __post_init__(self):
        p = lin.as_cmat(self.P)
        if p.shape[0] != p.shape[1]:
            raise DimensionMismatch("beamformer must be square")
        if self.power_budget < 0:
            raise ValueError("power budget must be nonnegative")
        used = float(np.real(np.trace(p @ p.conj().T)))
        if used > self.power_budget + POWER_TOL:
            raise ValueError(
                f"beamformer power {used:.6g} exceeds budget {self.power_budget:.6g}"
            )
        object.__setattr__(self, "P", p)


@dataclass
class RateReport:
    r_t_achieved: float  # bits/s/Hz
    r_b_achieved: float  # bits/s/Hz
    K: np.ndarray
    D_diag: np.ndarray


@dataclass(frozen=True)
class ProblemSpec:
    channels: ChannelSet
    power_budget: float
    r_t_min: float  # bits/s/Hz

    def __post_init__(self):
        if self.power_budget <= 0:
            raise ValueError("power budget must be positive")
        if self.r_t_min < 0:
            raise ValueError("primary-rate constraint must be nonnegative")


def compute_D(channels, P):
    """Per-BD-antenna backscatter amplitudes: entry i is h_i^H P 1."""
    P = lin.as_cmat(P, channels.n_t, channels.n_t)
    ones = np.ones(channels.n_t, dtype=complex)
    return channels.H @ (P @ ones)


def compute_K(channels, P):
    """Interference-plus-noise covariance K = I + F diag(|D_i|^2) F^H."""
    d = compute_D(channels, P)
    f = channels.F
    k = np.eye(channels.n_r, dtype=complex) + (f * np.abs(d) ** 2) @ f.conj().T
    return lin.herm(k, 1e-8)


def rate_secondary(channels, P):
    """Backscatter rate R_b = log2 |K| in bits/s/Hz."""
    k = compute_K(channels, P)
    return lin.logdet_psd(k, 1e-8) / LN2


def rate_primary(channels, P):
    """Primary rate R_t = log2 |K + G P P^H G^H| - log2 |K| in bits/s/Hz."""
    P = lin.as_cmat(P, channels.n_t, channels.n_t)
    k = compute_K(channels, P)
    gp = channels.G @ P
    top = k + gp @ gp.conj().T
    return (lin.logdet_psd(top, 1e-7) - lin.logdet_psd(k, 1e-8)) / LN2


def rate_report(channels, P):
    d = compute_D(channels, P)
    k = compute_K(channels, P)
    return RateReport(
        r_t_achieved=rate_primary(channels, P),
        r_b_achieved=rate_secondary(channels, P),
        K=k,
        D_diag=d,
    )


def power_used(P):
    P = np.asarray(P, dtype=complex)
    return float(np.real(np.trace(P @ P.conj().T)))


def is_feasible(spec, P):
    """Check R_t >= r_t_min and the power budget, with small slack.

    Returns (feasible, rate_slack, power_slack); slacks positive when the
    corresponding constraint holds with margin.
    """
    rate_slack = rate_primary(spec.channels, P) - spec.r_t_min
    power_slack = spec.power_budget - power_used(P)
    ok = rate_slack >= -RATE_TOL and power_slack >= -POWER_TOL
    return ok, rate_slack, power_slack


def primary_capacity(G, budget):
    """Water-filling capacity of G alone at the given power (bits/s/Hz).

    Also returns a square beamformer achieving it.  Used for feasibility
    screening of degenerate instances where the backscatter path vanishes.
    """
    G = lin.as_cmat(G)
    n_t = G.shape[1]
    u, s, v = lin.svd(G)
    gains = s**2
    pos = gains > 1e-14
    cap = 0.0
    alloc = np.zeros(n_t)
    if np.any(pos):
        g = gains[pos]
        # water level over the active subset, dropping channels below water
        idx = np.argsort(g)[::-1]
        g = g[idx]
        for k in range(len(g), 0, -1):
            mu = (budget + np.sum(1.0 / g[:k])) / k
            p = mu - 1.0 / g[:k]
            if p[-1] > 0:
                alloc_sorted = np.zeros(len(g))
                alloc_sorted[:k] = p
                break
        else:
            alloc_sorted = np.zeros(len(g))
        full = np.zeros(n_t)
        active = np.nonzero(pos)[0]
        full[active[idx]] = alloc_sorted
        alloc = full
        cap = float(np.sum(np.log1p(gains * alloc)) / LN2)
    P = v[:, :n_t] @ np.diag(np.sqrt(alloc)).astype(complex)
    return cap, P
