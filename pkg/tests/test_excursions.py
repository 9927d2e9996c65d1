import math

import numpy as np
import pytest
from scipy import integrate

from tiltcouple import (
    ExcursionTriple,
    NonIntegrable,
    RngStream,
    UnsupportedFamily,
    case2_weight_report,
    compound_poisson_rate,
    conjugate_excursion_batch,
    couple_excursion,
    couple_excursion_batch,
    duration_density,
    excursion_joint_density,
    excursion_xi_density,
    gamma_cdf,
    ks_one_sample,
    ks_two_sample,
    sample_excursion_direct_batch,
    sample_excursion_path_oracle_batch,
    three_case_model,
)


def _model():
    return three_case_model(0.5, 1.5, 1.0)


def test_triple_requires_exact_split():
    ExcursionTriple(0.3, 0.2, 0.5)
    with pytest.raises(ValueError):
        ExcursionTriple(0.3, 0.2, 0.6)
    with pytest.raises(ValueError):
        ExcursionTriple(0.0, 0.2, 0.2)


def test_three_case_model_rejects_heavy_untilted():
    with pytest.raises(NonIntegrable):
        three_case_model(0.5, 1.5, 0.0)


def test_duration_density_anchor():
    # f(t) = (1 - e^(-t)) lambda(t) / Psi(1) at t = 1; gg shape first
    m = _model()
    lam = 0.5 / math.sqrt(math.pi) * math.exp(-1.0)
    psi1 = 0.5 / math.sqrt(math.pi) * 0.5
    want = (1.0 - math.exp(-1.0)) * lam / psi1
    assert abs(float(duration_density(m, 1.0)) - want) < 1e-14
    # unit-rate gamma process: (1 - 1/e) e^(-1) / log 2
    from tiltcouple import LevyDensityModel
    g = LevyDensityModel.gamma_family(1.0, 1.0)
    assert abs(float(duration_density(g, 1.0))
               - 0.33549030344027864) < 1e-14


def test_duration_density_integrates_to_one():
    m = _model()
    total, _ = integrate.quad(lambda t: float(duration_density(m, t)),
                              0.0, np.inf, limit=200)
    assert abs(total - 1.0) < 1e-9


def test_joint_density_marginalizes_to_duration():
    m = _model()
    for t in (0.3, 1.0, 2.7):
        total, _ = integrate.quad(
            lambda v, _t=t: float(excursion_joint_density(m, v, _t - v)),
            0.0, t, limit=200)
        assert abs(total - float(duration_density(m, t))) < 1e-10


def test_joint_density_off_domain_is_zero():
    m = _model()
    assert float(excursion_joint_density(m, -0.1, 0.5)) == 0.0
    assert float(excursion_joint_density(m, 0.5, -0.1)) == 0.0


def test_direct_batch_split_is_exact():
    over, under, dur = sample_excursion_direct_batch(RngStream(1), _model(),
                                                     2000)
    assert np.all(over + under == dur)
    assert np.all((under > 0) & (under < dur))


def test_direct_matches_path_oracle():
    m = _model()
    od, ud, dd = sample_excursion_direct_batch(RngStream(2), m, 4000)
    op, up, dp = sample_excursion_path_oracle_batch(RngStream(3), m, 4000)
    for a, b in ((od, op), (ud, up), (dd, dp)):
        rep = ks_two_sample(a, b, seed=23)
        assert rep.verdict, rep


def test_compound_poisson_rate_anchor():
    # alpha Gamma(nu - alpha) b^(alpha - nu) / Gamma(1 - alpha)
    assert abs(compound_poisson_rate(_model())
               - 0.28209479177387814) < 1e-15


def test_compound_poisson_rate_needs_finite_activity():
    with pytest.raises(UnsupportedFamily):
        compound_poisson_rate(three_case_model(0.5, 0.25, 0.0))


def test_path_oracle_rejects_infinite_activity():
    with pytest.raises(UnsupportedFamily):
        sample_excursion_path_oracle_batch(
            RngStream(1), three_case_model(0.5, 0.25, 0.0), 10)


def test_xi_density_normalized():
    # the tilt density tail decays like s^(-3/2), so mass above the grid
    # top X is O(X^(-1/2)); at X = 1e12 that is ~1.5e-6
    pdf = excursion_xi_density(_model())
    grid = np.concatenate(([1e-12], np.geomspace(1e-8, 1e12, 9000)))
    total = np.trapezoid(pdf(grid), grid)
    assert abs(total - 1.0) < 5e-6


def test_xi_density_needs_positive_weight():
    from tiltcouple import LevyDensityModel
    weightless = LevyDensityModel.gg(0.5, 1.0, nu=0.0)
    with pytest.raises(ValueError):
        excursion_xi_density(weightless)


def test_coupled_product_law_and_split():
    m = _model()
    out = couple_excursion_batch(RngStream(4), m, 5000)
    assert np.all(out["overshoot"] + out["undershoot"] == out["duration"])
    rep = ks_one_sample(out["xi"] * out["duration"],
                        lambda x: gamma_cdf(1.5, x), seed=4)
    assert rep.verdict, rep


def test_coupling_matches_conjugate_oracle():
    m = _model()
    a = couple_excursion_batch(RngStream(5), m, 5000)
    b = conjugate_excursion_batch(RngStream(6), m, 5000)
    for key in ("xi", "duration"):
        rep = ks_two_sample(a[key], b[key], seed=56)
        assert rep.verdict, (key, rep)


def test_couple_excursion_scalar_wrapper():
    c = couple_excursion(RngStream(7), _model())
    assert c.xi > 0
    assert c.triple.overshoot + c.triple.undershoot == c.triple.duration
    assert c.params["kind"] == "gg"


def test_gamma_kind_coupling():
    from tiltcouple import LevyDensityModel
    m = LevyDensityModel.gamma_family(1.0, 2.0, nu=1.0)
    out = couple_excursion_batch(RngStream(8), m, 4000)
    rep = ks_one_sample(out["xi"] * out["duration"],
                        lambda x: gamma_cdf(1.0, x), seed=8)
    assert rep.verdict, rep


def test_case2_weight_scan_prefers_predicted_concentration():
    rep = case2_weight_report(RngStream(9), 0.5, 1500)
    assert rep["best_is_predicted"], rep
    assert rep["verdict"], rep
    assert len(rep["grid"]) == len(rep["statistic"])
