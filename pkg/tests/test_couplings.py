import numpy as np
import pytest

from tiltcouple import (
    CumulantModel,
    RngStream,
    ScalarCoupling,
    StableParams,
    couple_gg_measure,
    couple_pd_bridge,
    couple_size_biased_batch,
    couple_theorem1,
    couple_theorem1_batch,
    factorization_grid_error,
    gamma_cdf,
    ks_one_sample,
    stable_gamma_algebra_check,
    tilted_scalar_batch,
)


def test_scalar_coupling_positivity():
    ScalarCoupling(0.5, 1.0, meta=())
    with pytest.raises(ValueError):
        ScalarCoupling(-0.5, 1.0, meta=())
    with pytest.raises(ValueError):
        ScalarCoupling(0.5, 0.0, meta=())


def test_theorem1_gamma_product_law():
    xi, T = couple_theorem1_batch(RngStream(1), CumulantModel.gamma(2.0),
                                  1.0, 5000)
    rep = ks_one_sample(xi * T, lambda x: gamma_cdf(1.0, x), seed=1)
    assert rep.verdict, rep


def test_theorem1_gamma_conditional_rate():
    # T | xi = s is the gamma law at rate 1 + s; its mean is a/(1+s)
    xi, T = couple_theorem1_batch(RngStream(2), CumulantModel.gamma(2.0),
                                  1.0, 40_000)
    scaled = T * (1.0 + xi)
    assert abs(scaled.mean() - 2.0) < 3.0 * scaled.std() / 200.0


def test_theorem1_tilted_stable_product_law():
    model = CumulantModel.tilted_stable(0.5, 1.0)
    xi, T = couple_theorem1_batch(RngStream(3), model, 1.0, 5000)
    rep = ks_one_sample(xi * T, lambda x: gamma_cdf(1.0, x), seed=3)
    assert rep.verdict, rep


def test_theorem1_generic_numeric_product_law():
    # numeric route on the exponential density must reproduce the gamma
    # family's coupling law
    grid = np.linspace(0.0, 50.0, 400)
    model = CumulantModel.generic(grid, np.log1p(grid),
                                  density=lambda t: np.exp(-t))
    xi, T = couple_theorem1_batch(RngStream(4), model, 0.5, 400)
    rep = ks_one_sample(xi * T, lambda x: gamma_cdf(0.5, x), seed=4)
    assert rep.verdict, rep


def test_theorem1_scalar_wrapper():
    c = couple_theorem1(RngStream(5), CumulantModel.gamma(2.0), 1.0)
    assert c.xi > 0 and c.T > 0
    assert c.meta[0] == "gamma"


def test_tilted_scalar_batch_vector_tilt():
    b = np.array([0.0, 1.0, 4.0, 9.0] * 50)
    xi, T = tilted_scalar_batch(RngStream(6), 0.5, b, 1.0, 200)
    assert xi.shape == T.shape == (200,)
    assert np.all(xi > 0) and np.all(T > 0)
    with pytest.raises(ValueError):
        tilted_scalar_batch(RngStream(6), 0.5, -1.0, 1.0, 10)


def test_measure_couplings_shapes_and_domains():
    mc = couple_gg_measure(RngStream(7), StableParams(0.5), 0.0, 0.5)
    assert mc.xi > 0 and mc.T == mc.measure.total_mass
    assert abs(mc.weights.p.sum() + mc.weights.deficit - 1.0) < 1e-12
    with pytest.raises(ValueError):
        couple_size_biased_batch(RngStream(7), StableParams(0.5), 0.0, 1.0,
                                 1e-4, 10)
    bd = couple_pd_bridge(RngStream(7), StableParams(0.5), -0.25)
    assert bd.xi_H > 0 and bd.H > 0 and bd.T > 0


def test_algebra_bundle_replays_path_at_unit_fraction():
    out = stable_gamma_algebra_check(RngStream(8), StableParams(0.5), 1.0,
                                     1.0, 2000, permutations=199)
    assert out["path_gamma"].extra["matches_scalar_bitwise"] is True


def test_algebra_bundle_domain_checks():
    with pytest.raises(ValueError):
        stable_gamma_algebra_check(RngStream(1), StableParams(0.5), 0.0,
                                   0.5, 100)
    with pytest.raises(ValueError):
        stable_gamma_algebra_check(RngStream(1), StableParams(0.5), 1.0,
                                   1.5, 100)


def test_factorization_error_is_quadrature_small():
    s = np.linspace(0.1, 5.0, 20)
    err = factorization_grid_error(CumulantModel.gamma(2.0), 1.0, s, s)
    assert err < 1e-9


def test_factorization_generic_density_route():
    grid = np.linspace(0.0, 50.0, 400)
    model = CumulantModel.generic(grid, 2.0 * np.log1p(grid),
                                  density=lambda t: t * np.exp(-t))
    s = np.linspace(0.5, 3.0, 10)
    err = factorization_grid_error(model, 1.0, s, s)
    assert err < 1e-4
