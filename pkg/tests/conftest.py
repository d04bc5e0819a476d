import numpy as np
import pytest

from fdpchan import GeneralChannel, validate_channel
from fdpchan.core import evaluate, union_alphas


def make_channel(rng, max_cols=8, min_cols=1, zeros=True):
    """Random two-row channel; sometimes with zero entries so that
    zero-ratio and infinite-ratio columns get exercised."""
    n = int(rng.integers(min_cols, max_cols + 1))
    m = rng.uniform(0.05, 1.0, size=(2, n))
    if zeros and n >= 2 and rng.random() < 0.4:
        for _ in range(int(rng.integers(1, n))):
            m[int(rng.integers(0, 2)), int(rng.integers(0, n))] = 0.0
    for r in range(2):
        if m[r].sum() == 0.0:
            m[r, int(rng.integers(0, n))] = 1.0
    m /= m.sum(axis=1, keepdims=True)
    return validate_channel(m)


def make_channel_2x2(rng, zeros=False):
    return make_channel(rng, max_cols=2, min_cols=2, zeros=zeros)


def make_stochastic(rng, k, m):
    """Random row-stochastic matrix as a GeneralChannel."""
    rows = rng.dirichlet(np.ones(m), size=k)
    return GeneralChannel(rows, tuple(f"w{i}" for i in range(m)))


def make_tradeoff(rng, max_cols=6):
    from fdpchan import tradeoff_of

    return tradeoff_of(make_channel(rng, max_cols=max_cols))


def assert_matrix_close(A, B, atol=1e-9):
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    assert A.shape == B.shape, f"shapes differ: {A.shape} vs {B.shape}"
    assert np.allclose(A, B, atol=atol), f"\n{A}\nvs\n{B}"


def assert_tradeoff_close(f, g, atol=1e-9):
    for a in union_alphas(f, g):
        assert abs(evaluate(f, a) - evaluate(g, a)) <= atol, (
            f"curves differ at alpha={a}: {evaluate(f, a)} vs {evaluate(g, a)}"
        )


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
