import pytest

from fdpchan import (
    TooLarge,
    evaluate,
    oracle_refinement,
    oracle_tradeoff,
    postprocess,
    refinement_leq,
    tradeoff_of,
    validate_channel,
)
from fdpchan.core import union_alphas
from fdpchan.mechanisms import EpsDelta, canonical_eps_delta

from conftest import make_channel, make_stochastic


def test_oracle_matches_canonical_channel():
    ch = canonical_eps_delta(EpsDelta(1.0, 0.1))
    f, g = tradeoff_of(ch), oracle_tradeoff(ch)
    for a in union_alphas(f, g):
        assert abs(evaluate(f, a) - evaluate(g, a)) < 1e-9


def test_oracle_single_column():
    f = oracle_tradeoff(validate_channel([[1.0], [1.0]]))
    assert f.facets == ((0.0, 1.0), (1.0, 0.0))


def test_size_cap():
    ch = validate_channel([[1 / 21.0] * 21, [1 / 21.0] * 21])
    with pytest.raises(TooLarge):
        oracle_tradeoff(ch)


def test_oracle_tradeoff_equivalence_suite(rng):
    for _ in range(200):
        ch = make_channel(rng, max_cols=8)
        f, g = tradeoff_of(ch), oracle_tradeoff(ch)
        for a in union_alphas(f, g):
            assert abs(evaluate(f, a) - evaluate(g, a)) < 1e-9


def test_oracle_refinement_reflexive(rng):
    for _ in range(20):
        ch = make_channel(rng)
        assert oracle_refinement(ch, ch)


def test_oracle_refinement_worked_pair():
    Ca = validate_channel([[0.9, 0.1], [0.5, 0.5]])
    Ma = validate_channel([[0.9, 0.1], [0.8, 0.2]])
    assert oracle_refinement(Ca, Ma)
    assert not oracle_refinement(Ma, Ca)


def test_oracle_refinement_postprocessed_pairs(rng):
    for _ in range(100):
        M = make_channel(rng)
        W = make_stochastic(rng, M.ncols, int(rng.integers(1, 6)))
        assert oracle_refinement(M, postprocess(M, W))


def test_oracle_refinement_equivalence_suite(rng):
    for _ in range(500):
        C, M = make_channel(rng), make_channel(rng)
        assert oracle_refinement(C, M) == refinement_leq(C, M)
