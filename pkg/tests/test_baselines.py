"""Unit tests for the MRT reference beamformers."""

import numpy as np
import pytest

from srbeam import baselines, model
from tests.conftest import cn_matrix, random_channels


class TestMrtBeamformer:
    def test_diagonal_channel(self):
        ch = model.ChannelSet(G=np.diag([3.0, 1.0]), H=np.eye(2), F=np.eye(2))
        bf = baselines.mrt_beamformer(ch, 2.0, "g")
        # V = I up to per-column phase; equal power per column
        assert np.allclose(np.abs(bf.P), np.eye(2), atol=1e-10)
        assert model.power_used(bf.P) == pytest.approx(2.0, abs=1e-10)

    def test_power_exact(self, rng):
        for _ in range(20):
            ch = random_channels(rng)
            for target in ("g", "h"):
                bf = baselines.mrt_beamformer(ch, 3.7, target)
                assert model.power_used(bf.P) == pytest.approx(3.7, abs=1e-10)

    def test_unknown_target(self, rng):
        ch = random_channels(rng)
        with pytest.raises(ValueError):
            baselines.mrt_beamformer(ch, 1.0, "x")

    def test_degenerate_channel(self):
        ch = model.ChannelSet(G=np.zeros((2, 2)), H=np.eye(2), F=np.eye(2))
        with pytest.raises(baselines.DegenerateChannel):
            baselines.mrt_beamformer(ch, 1.0, "g")

    def test_left_unitary_invariance(self, rng):
        # rotating the target channel on the left changes U only; the
        # beamformer (built from V) is unchanged up to per-column phase
        for _ in range(10):
            ch = random_channels(rng)
            q, _ = np.linalg.qr(cn_matrix(rng, 2, 2))
            ch2 = model.ChannelSet(G=q @ ch.G, H=ch.H, F=ch.F)
            p1 = baselines.mrt_beamformer(ch, 2.0, "g").P
            p2 = baselines.mrt_beamformer(ch2, 2.0, "g").P
            for j in range(2):
                ip = np.vdot(p1[:, j], p2[:, j])
                phase = ip / abs(ip)
                assert np.max(np.abs(p2[:, j] - phase * p1[:, j])) <= 1e-8

    def test_square_channel_gram_is_scaled_identity(self, rng):
        # with square channels the right singular vectors form a full
        # unitary, so both MRT variants share P P^H = (budget/n_t) I and
        # differ only through the backscatter interference term
        for _ in range(20):
            ch = random_channels(rng)
            for target in ("g", "h"):
                p = baselines.mrt_beamformer(ch, 10.0, target).P
                gram = p @ p.conj().T
                assert np.max(np.abs(gram - 5.0 * np.eye(2))) <= 1e-10

    def test_variants_differ_only_via_interference(self, rng):
        for _ in range(20):
            ch = random_channels(rng)
            pg = baselines.mrt_beamformer(ch, 10.0, "g").P
            ph = baselines.mrt_beamformer(ch, 10.0, "h").P
            sig_g = ch.G @ pg @ pg.conj().T @ ch.G.conj().T
            sig_h = ch.G @ ph @ ph.conj().T @ ch.G.conj().T
            assert np.max(np.abs(sig_g - sig_h)) <= 1e-10


class TestEvaluateBaseline:
    def test_rt_zero_always_satisfied(self, rng):
        ch = random_channels(rng)
        spec = model.ProblemSpec(ch, 2.0, 0.0)
        for target in ("g", "h"):
            _, _, ok = baselines.evaluate_baseline(spec, target)
            assert ok

    def test_zero_f_zero_secondary(self, rng):
        ch0 = random_channels(rng)
        ch = model.ChannelSet(G=ch0.G, H=ch0.H, F=np.zeros((2, 2)))
        spec = model.ProblemSpec(ch, 2.0, 0.0)
        _, report, _ = baselines.evaluate_baseline(spec, "g")
        assert report.r_b_achieved == pytest.approx(0.0, abs=1e-10)

    def test_records_infeasibility_without_raising(self, rng):
        ch = random_channels(rng)
        spec = model.ProblemSpec(ch, 1e-6, 5.0)  # unattainable target
        _, report, ok = baselines.evaluate_baseline(spec, "g")
        assert not ok
        assert report.r_t_achieved < 5.0
