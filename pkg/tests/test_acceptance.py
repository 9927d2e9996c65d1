"""Acceptance suite: eleven gated criteria, one test and one verdict line per
criterion, at full sample sizes and stated tolerances.

Statistical criteria run at fixed seeds (1, 2, 3) and pass when at least two
seeds pass, since 1%-level tests fail about 1% of the time by design.
Deterministic criteria run once. Wall-clock limits are asserted only when
the JIT backend is active; the numpy fallback keeps every check and verdict
but carries no time contract.
"""

import pytest

from tiltcouple import claims
from tiltcouple._backend import NUMBA_ENABLED


def _finish(k: int, label: str, bundle, limit: float):
    verdict = "PASS" if bundle.passed else "FAIL"
    print(f"\ncriterion {k:02d} {label}: {verdict} "
          f"({len(bundle.checks)} checks, {bundle.elapsed:.1f}s)")
    for c in bundle.checks:
        stats = ", ".join(f"{r.statistic:.4g}" for r in c.reports)
        flag = "" if c.gate else " [recorded]"
        print(f"    {c.label}: {'PASS' if c.passed else 'FAIL'}"
              f"{flag} [{stats}]")
    failed = [c.label for c in bundle.checks if c.gate and not c.passed]
    assert bundle.passed, f"criterion {k} failed checks: {failed}"
    if NUMBA_ENABLED:
        assert bundle.elapsed < limit, (
            f"criterion {k} took {bundle.elapsed:.1f}s, limit {limit}s")


def test_criterion_01_subordinator_algebra():
    b = claims.claim_algebra(alpha=0.5, theta=1.0, n=100_000)
    _finish(1, "gamma-time subordinator algebra", b, 30.0)


def test_criterion_02_scalar_decoupling_gamma():
    b = claims.claim_thm1(nu=1.0, n=100_000)
    _finish(2, "scalar decoupling, gamma family", b, 60.0)


def test_criterion_03_factorization_identity():
    b = claims.claim_factorization(tol=1e-6)
    _finish(3, "joint-density factorization grid", b, 5.0)


def test_criterion_04_jump_measure_coupling():
    b = claims.claim_gg_measure(alpha=0.5, b=0.0, nu=0.5, n=100_000,
                                weights_n=10_000)
    _finish(4, "tilted jump-measure coupling", b, 300.0)


def test_criterion_05_size_biased_coupling():
    b = claims.claim_size_biased(alpha=0.5, b=1.0, nu=1.5, n=100_000)
    _finish(5, "size-biased bridge coupling", b, 180.0)


def test_criterion_06_full_range_bridge():
    b = claims.claim_pd_bridge(alpha=0.5, theta=-0.25, theta_weights=0.5,
                               n=100_000, weights_n=10_000)
    _finish(6, "full-range two-parameter bridge", b, 300.0)


def test_criterion_07_power_sum_law():
    b = claims.claim_beta_gamma(alpha=0.5, theta=0.5, n=100_000)
    _finish(7, "power of the summed start pair", b, 30.0)


@pytest.mark.slow
def test_criterion_08_partition_diversity():
    b = claims.claim_diversity(alpha=0.5, theta=0.0, replicates=500,
                               n=10_000, gate_d=0.05)
    _finish(8, "partition diversity limit", b, 600.0)


def test_criterion_09_excursion_coupling():
    b = claims.claim_excursion(alpha=0.5, nu=1.5, b=1.0, n=100_000,
                               oracle_n=10_000)
    _finish(9, "straddling-jump coupling", b, 300.0)


def test_criterion_10_numeric_kernels():
    b = claims.claim_kernels(density_tol=1e-8, moment_tol=1e-8,
                             exponent_tol=1e-6)
    _finish(10, "closed forms vs quadrature", b, 10.0)


def test_criterion_11_test_calibration():
    b = claims.claim_calibration(runs=200, level=0.01, rate_bound=0.04)
    _finish(11, "null false-positive calibration", b, 300.0)
