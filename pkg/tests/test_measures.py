import math

import numpy as np
import pytest

from tiltcouple import (
    RngStream,
    StableParams,
    bridge_measure,
    crp_partition,
    diversity_estimate,
    moment_ci,
    normalize,
    sample_gg_measure,
    stick_breaking_top_weight,
)


def test_gg_measure_structure():
    m = sample_gg_measure(RngStream(1), StableParams(0.5), 1.0, 1e-6)
    assert np.all(np.diff(m.jumps) <= 0)
    assert np.all(m.jumps > 0)
    assert m.locations.shape == m.jumps.shape
    assert np.all((m.locations >= 0) & (m.locations <= 1))
    assert m.total_mass == pytest.approx(m.jumps.sum() + m.tail_bound)
    assert m.tail_bound <= 1e-6 * m.total_mass * (1 + 1e-12)


def test_gg_measure_mean_total_mass():
    # E[T] = alpha b^(alpha-1) = 0.5 at alpha = 0.5, b = 1
    totals = [sample_gg_measure(RngStream(2).spawn(i), StableParams(0.5),
                                1.0, 1e-6).total_mass for i in range(400)]
    rep = moment_ci(np.array(totals), 0.5, seed=2)
    assert rep.verdict, rep


def test_gg_measure_replays_deterministically():
    a = sample_gg_measure(RngStream(3), StableParams(0.5), 2.0, 1e-5)
    b = sample_gg_measure(RngStream(3), StableParams(0.5), 2.0, 1e-5)
    assert np.array_equal(a.jumps, b.jumps)
    assert np.array_equal(a.locations, b.locations)


def test_normalize_accounts_for_all_mass():
    m = sample_gg_measure(RngStream(4), StableParams(0.5), 1.0, 1e-4)
    w = normalize(m)
    assert abs(w.p.sum() + w.deficit - 1.0) < 1e-12
    assert np.all(np.diff(w.p) <= 0)


def test_bridge_measure_adds_one_atom():
    base = sample_gg_measure(RngStream(5), StableParams(0.5), 2.0, 1e-5)
    bridged = bridge_measure(RngStream(5), StableParams(0.5), 2.0, 1e-5)
    assert bridged.jumps.size == base.jumps.size + 1
    assert np.all(np.diff(bridged.jumps) <= 0)


def test_bridge_measure_needs_positive_tilt():
    with pytest.raises(ValueError):
        bridge_measure(RngStream(1), StableParams(0.5), 0.0, 1e-5)


def test_crp_partition_bookkeeping():
    part = crp_partition(RngStream(6), 0.5, 0.0, 5000)
    assert part.n == 5000
    assert part.block_sizes.sum() == 5000
    assert part.n_blocks == part.block_sizes.size
    assert np.all(part.block_sizes > 0)


def test_crp_partition_zero_alpha_block_count():
    # at alpha = 0, theta = 1: E[K_n] = sum_{i<n} 1/(1+i), the harmonic sum
    n = 200
    want = sum(1.0 / (1.0 + i) for i in range(n))
    counts = np.array([crp_partition(RngStream(7).spawn(r), 0.0, 1.0,
                                     n).n_blocks
                       for r in range(300)], dtype=float)
    rep = moment_ci(counts, want, seed=7)
    assert rep.verdict, rep


def test_crp_domain_checks():
    with pytest.raises(ValueError):
        crp_partition(RngStream(1), 1.0, 0.0, 10)
    with pytest.raises(ValueError):
        crp_partition(RngStream(1), 0.5, -0.6, 10)


def test_diversity_estimate_arithmetic():
    part = crp_partition(RngStream(8), 0.5, 0.0, 10_000)
    assert diversity_estimate(part, 0.5) == part.n_blocks / 100.0


def test_stick_breaking_top_weight_basics():
    w = stick_breaking_top_weight(RngStream(9), StableParams(0.5), 0.5, 500)
    assert w.shape == (500,)
    assert np.all((w > 0) & (w < 1))
    again = stick_breaking_top_weight(RngStream(9), StableParams(0.5), 0.5,
                                      500)
    assert np.array_equal(w, again)


def test_stick_breaking_accepts_zero_alpha():
    # at alpha = 0 the first stick is Beta(1, theta); the top weight
    # stochastically dominates it, so its mean exceeds 1/(1+theta)
    w = stick_breaking_top_weight(RngStream(10), 0.0, 1.0, 2000)
    assert w.mean() > 0.5
