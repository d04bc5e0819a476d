"""Acceptance suite: one test per criterion, each printing a pass line.

Run with ``pytest -s tests/test_acceptance.py`` to see the lines as the
criteria complete.  Tolerances are fixed here and nowhere else.
"""

import math

import numpy as np
import pytest

from fdpchan import (
    EpsDelta,
    amplification_gap,
    canonical_eps_delta,
    canonical_sort,
    channel_of,
    decomposition_channel,
    eps_delta_tradeoff,
    evaluate,
    hidden_choice,
    oracle_refinement,
    oracle_tradeoff,
    parallel,
    postprocess,
    preprocess,
    purify_profile,
    purify_with_escape,
    refinement_leq,
    symmetric_decompose,
    tradeoff_max,
    tradeoff_min,
    tradeoff_of,
    truncated_geometric,
    uniform_channel,
    validate_channel,
    visible_choice,
)
from fdpchan.core import GeneralChannel, union_alphas

from conftest import make_channel, make_stochastic, make_tradeoff

E = math.e
LOG2 = math.log(2)
LOG3 = math.log(3)


def passed(n, text):
    print(f"criterion {n:2d}: PASS - {text}")


def close_at_union(f, g, atol):
    return all(abs(evaluate(f, a) - evaluate(g, a)) <= atol for a in union_alphas(f, g))


@pytest.fixture(scope="module")
def rng():
    return np.random.default_rng(42)


def test_criterion_1_canonical_channel_fixture():
    ch = canonical_eps_delta(EpsDelta(1.0, 0.1))
    a = 0.9 / (1 + E)
    expected = np.array([[0.1, a * E, a, 0.0], [0.0, a, a * E, 0.1]])
    assert ch.ncols == 4
    assert np.allclose(ch.matrix(), expected, atol=1e-3)
    passed(1, "canonical (eps=1, delta=0.1) channel matches the four-column fixture to 1e-3")


def test_criterion_2_purification_full_support():
    M = canonical_eps_delta(EpsDelta(LOG3, 0.1))
    staged = canonical_sort(hidden_choice(M, uniform_channel(M.labels), 0.75))
    d_expected = np.array(
        [[0.56875, 0.1375, 0.0625, 0.23125], [0.23125, 0.0625, 0.1375, 0.56875]]
    )
    assert np.allclose(staged.matrix(), d_expected, atol=1e-4)

    result = purify_profile(M, 0.75, M.labels, LOG2)
    z_expected = np.array(
        [[0.4547, 0.1703, 0.1297, 0.2453], [0.2453, 0.1297, 0.1703, 0.4547]]
    )
    assert np.allclose(result.channel.matrix(), z_expected, atol=1e-3)

    facets = [(0.0, 1.0), (0.2453, 0.5453), (0.375, 0.375), (0.5453, 0.2453), (1.0, 0.0)]
    assert len(result.profile.facets) == len(facets)
    for (x, y), (ex, ey) in zip(result.profile.facets, facets):
        assert abs(x - ex) <= 1e-3 and abs(y - ey) <= 1e-3
    assert result.pure_eps is not None and math.isfinite(result.pure_eps)
    passed(2, "purification stage and output match the reference matrices; pure eps extracted")


def test_criterion_3_purification_partial_support():
    M = canonical_eps_delta(EpsDelta(LOG3, 0.1))
    result = purify_with_escape(M, 0.05, 0.75, LOG2)
    facets = [
        (0.0, 1.0),
        (0.1176, 0.7507),
        (0.2352, 0.5265),
        (0.3605, 0.3605),
        (0.5265, 0.2352),
        (0.7507, 0.1176),
        (1.0, 0.0),
    ]
    assert len(result.profile.facets) == len(facets)
    for (x, y), (ex, ey) in zip(result.profile.facets, facets):
        assert abs(x - ex) <= 1e-3 and abs(y - ey) <= 1e-3
    assert close_at_union(result.profile, result.direct_profile, 1e-9)
    passed(3, "partial-support purification matches the reference facets; both routes agree to 1e-9")


def test_criterion_4_subsampling():
    from fdpchan import subsample_profile

    ed = EpsDelta(1.0, 0.1)
    result = subsample_profile(ed, 0.2)
    facets = [(0.0, 0.98), (0.2420, 0.6548), (0.9, 0.08), (1.0, 0.0)]
    assert len(result.profile.facets) == 4
    for (x, y), (ex, ey) in zip(result.profile.facets, facets):
        assert abs(x - ex) <= 1e-3 and abs(y - ey) <= 1e-3
    for a in np.linspace(0.0, 1.0, 100):
        assert amplification_gap(ed, 0.2, float(a)) >= -1e-9
    passed(4, "sub-sampled profile matches the reference corner points; amplification gap >= 0")


def test_criterion_5_geometric_fixtures():
    geo4 = np.array(
        [
            [2 / 3, 1 / 6, 1 / 12, 1 / 12],
            [1 / 3, 1 / 3, 1 / 6, 1 / 6],
            [1 / 6, 1 / 6, 1 / 3, 1 / 3],
            [1 / 12, 1 / 12, 1 / 6, 2 / 3],
        ]
    )
    geo6 = np.array(
        [
            [2 / 3, 1 / 6, 1 / 12, 1 / 24, 1 / 48, 1 / 48],
            [1 / 3, 1 / 3, 1 / 6, 1 / 12, 1 / 24, 1 / 24],
            [1 / 6, 1 / 6, 1 / 3, 1 / 6, 1 / 12, 1 / 12],
            [1 / 12, 1 / 12, 1 / 6, 1 / 3, 1 / 6, 1 / 6],
            [1 / 24, 1 / 24, 1 / 12, 1 / 6, 1 / 3, 1 / 3],
            [1 / 48, 1 / 48, 1 / 24, 1 / 12, 1 / 6, 2 / 3],
        ]
    )
    assert np.allclose(truncated_geometric(4, LOG2).rows, geo4, atol=1e-12)
    assert np.allclose(truncated_geometric(6, LOG2).rows, geo6, atol=1e-12)
    passed(5, "geometric perturbation matrices equal the rational fixtures to 1e-12")


def test_criterion_6_galois_connection(rng):
    counterexamples = 0
    for _ in range(500):
        f = make_tradeoff(rng)
        M = make_channel(rng, max_cols=8)
        g = tradeoff_of(M)
        dominates = all(
            evaluate(f, a) <= evaluate(g, a) + 1e-9 for a in union_alphas(f, g)
        )
        if dominates != refinement_leq(channel_of(f), M):
            counterexamples += 1
    assert counterexamples == 0
    passed(6, "curve dominance and channel refinement agree on 500 random pairs")


def test_criterion_7_oracle_equivalence(rng):
    for _ in range(200):
        ch = make_channel(rng, max_cols=8)
        assert close_at_union(tradeoff_of(ch), oracle_tradeoff(ch), 1e-9)
    for _ in range(500):
        C, M = make_channel(rng, max_cols=8), make_channel(rng, max_cols=8)
        assert oracle_refinement(C, M) == refinement_leq(C, M)
    passed(7, "trade-off and refinement agree with the brute-force oracles (200 + 500 cases)")


def test_criterion_8_roundtrips(rng):
    for _ in range(200):
        M = canonical_sort(make_channel(rng, max_cols=8))
        back = channel_of(tradeoff_of(M))
        assert back.ncols == M.ncols
        assert np.allclose(back.matrix(), M.matrix(), atol=1e-9)

        f = make_tradeoff(rng)
        assert close_at_union(tradeoff_of(channel_of(f)), f, 1e-9)
    passed(8, "channel->curve->channel and curve->channel->curve roundtrips hold to 1e-9")


def test_criterion_9_composition_rules(rng):
    def relabel(ch, prefix):
        return validate_channel(ch.matrix(), [f"{prefix}{i}" for i in range(ch.ncols)])

    # (1) parallel sits below the lattice minimum
    for _ in range(200):
        C, D = make_channel(rng), make_channel(rng)
        f = tradeoff_of(parallel(C, D))
        m = tradeoff_min(tradeoff_of(C), tradeoff_of(D))
        assert all(evaluate(f, a) <= evaluate(m, a) + 1e-9 for a in union_alphas(f, m))

    # (2) visible choice sits between the lattice bounds
    for _ in range(200):
        C, D = make_channel(rng), make_channel(rng)
        r = rng.uniform()
        f = tradeoff_of(visible_choice(C, D, r))
        lo = tradeoff_min(tradeoff_of(C), tradeoff_of(D))
        hi = tradeoff_max(tradeoff_of(C), tradeoff_of(D))
        for a in union_alphas(f, lo, hi):
            assert evaluate(lo, a) <= evaluate(f, a) + 1e-9
            assert evaluate(f, a) <= evaluate(hi, a) + 1e-9

    # (3) post-processing only raises the curve
    for _ in range(200):
        C = make_channel(rng)
        Q = make_stochastic(rng, C.ncols, int(rng.integers(1, 6)))
        f, g = tradeoff_of(C), tradeoff_of(postprocess(C, Q))
        assert all(evaluate(f, a) <= evaluate(g, a) + 1e-9 for a in union_alphas(f, g))

    # (4) visible below hidden on shared labels
    for _ in range(200):
        n = int(rng.integers(1, 6))
        C = relabel(make_channel(rng, max_cols=n, min_cols=n), "y")
        D = relabel(make_channel(rng, max_cols=n, min_cols=n), "y")
        r = rng.uniform()
        vis = tradeoff_of(visible_choice(C, D, r))
        hid = tradeoff_of(hidden_choice(C, D, r))
        assert all(
            evaluate(vis, a) <= evaluate(hid, a) + 1e-9 for a in union_alphas(vis, hid)
        )

    # (5) regrouping a visible split across a hidden stage is exact
    for _ in range(200):
        n = int(rng.integers(1, 5))
        C = relabel(make_channel(rng), "z")
        D = relabel(make_channel(rng, max_cols=n, min_cols=n), "y")
        Echan = relabel(make_channel(rng, max_cols=n, min_cols=n), "y")
        p, r = rng.uniform(0.05, 0.95, size=2)
        lhs = tradeoff_of(hidden_choice(visible_choice(C, D, p), Echan, r))
        q = r * (1 - p) / (r * (1 - p) + (1 - r))
        rhs = tradeoff_of(visible_choice(C, hidden_choice(D, Echan, q), r * p))
        assert close_at_union(lhs, rhs, 1e-9)

    passed(9, "composition rules (1)-(4) and the regrouping identity (5), 200 cases each")


def test_criterion_10_monotonicity(rng):
    for _ in range(200):
        C = make_channel(rng)
        W = make_stochastic(rng, C.ncols, int(rng.integers(1, 6)))
        C2 = postprocess(C, W)
        Q = make_channel(rng)

        f1, f2 = tradeoff_of(parallel(C, Q)), tradeoff_of(parallel(C2, Q))
        assert all(evaluate(f1, a) <= evaluate(f2, a) + 1e-9 for a in union_alphas(f1, f2))

        r = rng.uniform()
        g1 = tradeoff_of(visible_choice(C, Q, r))
        g2 = tradeoff_of(visible_choice(C2, Q, r))
        assert all(evaluate(g1, a) <= evaluate(g2, a) + 1e-9 for a in union_alphas(g1, g2))

        k = int(rng.integers(1, 5))
        P = make_stochastic(rng, 2, k)
        B = make_stochastic(rng, k, int(rng.integers(2, 6)))
        V = make_stochastic(rng, B.ncols, int(rng.integers(1, 6)))
        B2 = GeneralChannel(B.rows @ V.rows, V.labels)
        h1, h2 = tradeoff_of(preprocess(P, B)), tradeoff_of(preprocess(P, B2))
        assert all(evaluate(h1, a) <= evaluate(h2, a) + 1e-9 for a in union_alphas(h1, h2))
    passed(10, "monotonicity under refinement for parallel, visible choice, pre-processing")


def test_criterion_11_symmetric_decomposition(rng):
    sd = symmetric_decompose(eps_delta_tradeoff(EpsDelta(1.0, 0.1)))
    assert len(sd.parts) == 2
    (e0, w0), (e1, w1) = sd.parts
    assert math.isinf(e0) and abs(w0 - 0.1) < 1e-12
    assert abs(e1 - 1.0) < 1e-12 and abs(w1 - 0.9) < 1e-12

    for _ in range(100):
        k = int(rng.integers(1, 4))
        eps_values = list(sorted(rng.uniform(0.2, 3.0, size=k) + np.arange(k))[::-1])
        if rng.random() < 0.3:
            eps_values = [math.inf] + eps_values[1:]
        weights = rng.dirichlet(np.ones(k))
        mixture, seen = None, 0.0
        for eps, w in zip(reversed(eps_values), reversed(list(weights))):
            part = canonical_eps_delta(EpsDelta(eps, 0.0))
            if mixture is None:
                mixture, seen = part, w
            else:
                mixture = visible_choice(part, mixture, w / (w + seen))
                seen += w
        mixture = canonical_sort(mixture)
        sd = symmetric_decompose(tradeoff_of(mixture))
        got = sorted(sd.parts, key=lambda p: -p[1])
        want = sorted(zip(eps_values, weights), key=lambda p: -p[1])
        assert len(got) == len(want)
        for (ge, gw), (we, ww) in zip(got, want):
            assert abs(gw - ww) <= 1e-9
            assert (math.isinf(ge) and math.isinf(we)) or abs(ge - we) <= 1e-9
        rebuilt = decomposition_channel(sd)
        assert np.allclose(rebuilt.matrix(), mixture.matrix(), atol=1e-9)
    passed(11, "symmetric curves decompose exactly and 100 random mixtures roundtrip to 1e-9")


def test_criterion_12_parallel_beats_budget_doubling():
    C = canonical_eps_delta(EpsDelta(1.0, 0.1))
    composed = tradeoff_of(parallel(C, C))
    doubled = eps_delta_tradeoff(EpsDelta(2.0, 0.2))
    for a in union_alphas(composed, doubled):
        assert evaluate(composed, a) >= evaluate(doubled, a) - 1e-6
    improvement = max(
        evaluate(composed, float(a)) - evaluate(doubled, float(a))
        for a in np.linspace(0.1, 0.4, 61)
    )
    assert improvement > 1e-6
    passed(12, "self-composition dominates the doubled-budget curve, strictly inside (0.1, 0.4)")
