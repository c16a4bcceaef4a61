"""Shared helpers for the test suite."""

import numpy as np
import pytest

from srbeam import model


def cn_matrix(rng, rows, cols):
    """i.i.d. CN(0,1) matrix (variance 1 per complex entry)."""
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2.0)


def random_channels(rng, n_t=2, n_r=2, n_b=2):
    return model.ChannelSet(
        G=cn_matrix(rng, n_r, n_t),
        H=cn_matrix(rng, n_b, n_t),
        F=cn_matrix(rng, n_r, n_b),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
