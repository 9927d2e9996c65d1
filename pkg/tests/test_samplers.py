import math

import numpy as np
import pytest

from tiltcouple import (
    CumulantModel,
    NonIntegrable,
    RngStream,
    StableParams,
    beta_cdf,
    ks_one_sample,
    levy_half_cdf,
    moment_ci,
    sample_pos_stable,
    sample_tilted_stable,
    sample_xi,
    sample_xi_H_pair,
    xi_law,
)


def test_pos_stable_half_matches_closed_cdf():
    x = sample_pos_stable(RngStream(3), StableParams(0.5), 5000)
    rep = ks_one_sample(x, levy_half_cdf, level=0.01, seed=3)
    assert rep.verdict, rep


def test_pos_stable_negative_half_moment():
    x = sample_pos_stable(RngStream(4), StableParams(0.5), 20_000)
    rep = moment_ci(x, 2.0 / math.sqrt(math.pi),
                    moment_fn=lambda t: t ** -0.5, seed=4)
    assert rep.verdict, rep


def test_tilted_stable_laplace_transform():
    # E[exp(-u X_b)] = exp(b^a - (b+u)^a); a = 1/2, b = 1, u = 1
    x = sample_tilted_stable(RngStream(5), StableParams(0.5), 1.0,
                             size=20_000)
    rep = moment_ci(x, math.exp(1.0 - math.sqrt(2.0)),
                    moment_fn=lambda t: np.exp(-t), seed=5)
    assert rep.verdict, rep


def test_tilted_stable_zero_tilt_is_stable():
    a = sample_tilted_stable(RngStream(6), StableParams(0.5), 0.0, size=50)
    b = sample_pos_stable(RngStream(6), StableParams(0.5), 50)
    assert np.array_equal(a, b)


def test_xi_gamma_family_beta_prime_marginal():
    # xi / (1 + xi) =d Beta(nu, a - nu)
    law = xi_law(CumulantModel.gamma(2.0), 0.75)
    xi = sample_xi(RngStream(7), law, size=5000)
    rep = ks_one_sample(xi / (1.0 + xi),
                        lambda u: beta_cdf(0.75, 1.25, u), seed=7)
    assert rep.verdict, rep


def test_xi_stable_family_power_is_gamma():
    from tiltcouple import gamma_cdf
    law = xi_law(CumulantModel.stable(0.5), 1.0)
    xi = sample_xi(RngStream(8), law, size=5000)
    rep = ks_one_sample(xi ** 0.5, lambda x: gamma_cdf(2.0, x), seed=8)
    assert rep.verdict, rep


def test_xi_law_validation():
    with pytest.raises(ValueError):
        xi_law(CumulantModel.gamma(2.0), 0.0)
    with pytest.raises(NonIntegrable):
        xi_law(CumulantModel.gamma(2.0), 2.0)


def test_xi_density_integrates_to_one():
    law = xi_law(CumulantModel.tilted_stable(0.5, 1.0), 1.5)
    grid = np.concatenate(([1e-10], np.geomspace(1e-6, 400.0, 4000)))
    total = np.trapezoid(law.density(grid), grid)
    assert abs(total - 1.0) < 1e-4


def test_xi_H_pair_power_sum_is_gamma():
    from tiltcouple import gamma_cdf
    xi_H, H = sample_xi_H_pair(RngStream(9), StableParams(0.5), 0.5,
                               size=5000)
    rep = ks_one_sample((xi_H + H) ** 0.5, lambda x: gamma_cdf(2.0, x),
                        seed=9)
    assert rep.verdict, rep


def test_xi_H_pair_theta_domain():
    with pytest.raises(ValueError):
        sample_xi_H_pair(RngStream(1), StableParams(0.5), -0.5, size=10)
