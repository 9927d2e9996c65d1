"""Statistical verdict engine.

Converts equality-in-law and independence claims into pass/fail reports:
one- and two-sample Kolmogorov-Smirnov tests at an asymptotic level,
distance correlation with a permutation null on rank-transformed margins,
and moment checks against plain 3-standard-error bands. Heavy-tailed inputs
are expected; anything rank-based is tail-safe, and moment checks are meant
for bounded transforms (negative moments, Laplace functionals).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from . import _kernels, textio
from .errors import NonMonotoneCDF
from .rng import RngStream


class TestKind(enum.Enum):
    KS1 = "KS1"
    KS2 = "KS2"
    DistCorrPerm = "DistCorrPerm"
    MomentCI = "MomentCI"
    # reserved for discrete-law bin checks; nothing emits it yet
    Chi2Binned = "Chi2Binned"


def ks_constant(level: float) -> float:
    """c with P(sup_t |F_n(t) - F(t)| > c / sqrt(n)) -> level; c(0.01) = 1.6276."""
    if not 0.0 < level < 1.0:
        raise ValueError("level must lie in (0, 1)")
    return math.sqrt(-0.5 * math.log(level / 2.0))


@dataclass
class StatReport:
    """One claim, one verdict, and the numbers behind it."""

    test: TestKind
    statistic: float
    threshold: float
    p_value: float | None
    n: int
    seed: int
    verdict: bool
    extra: dict = field(default_factory=dict)

    ROW_HEADER = ["test", "statistic", "threshold", "p_value", "n", "seed",
                  "verdict"]

    def row(self):
        return [self.test.value, self.statistic, self.threshold,
                "" if self.p_value is None else self.p_value,
                self.n, self.seed, "pass" if self.verdict else "fail"]

    def to_json(self) -> dict:
        out = {
            "test": self.test.value,
            "statistic": self.statistic,
            "threshold": self.threshold,
            "p_value": self.p_value,
            "n": self.n,
            "seed": self.seed,
            "verdict": "pass" if self.verdict else "fail",
        }
        if self.extra:
            out["extra"] = {k: v for k, v in self.extra.items()}
        return out


def _as_sample(x, name: str) -> np.ndarray:
    arr = np.asarray(x, dtype=float).ravel()
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def ks_one_sample(x, cdf, level: float = 0.01, seed: int = 0) -> StatReport:
    """Sup-distance between the empirical CDF and a reference CDF.

    The reference is evaluated on the sorted sample and checked for
    monotonicity there; numeric CDFs that wobble at quadrature scale are
    rejected rather than silently tested.
    """
    xs = np.sort(_as_sample(x, "x"))
    n = xs.size
    if n < 50:
        raise ValueError("one-sample KS needs n >= 50")
    try:
        F = np.asarray(cdf(xs), dtype=float)
        if F.shape != xs.shape:
            raise TypeError
    except (TypeError, ValueError):
        F = np.array([float(cdf(v)) for v in xs])
    if np.any(np.diff(F) < 0.0):
        raise NonMonotoneCDF("reference CDF decreases on the sample grid")
    if F[0] < -1e-12 or F[-1] > 1.0 + 1e-12:
        raise NonMonotoneCDF("reference CDF leaves [0, 1] on the sample grid")
    i = np.arange(1, n + 1, dtype=float)
    D = float(max(np.max(i / n - F), np.max(F - (i - 1.0) / n)))
    thr = ks_constant(level) / math.sqrt(n)
    p = float(special.kolmogorov(math.sqrt(n) * D))
    return StatReport(TestKind.KS1, D, thr, p, n, seed, D < thr)


def ks_two_sample(x, y, level: float = 0.01, seed: int = 0) -> StatReport:
    """Sup-distance between two empirical CDFs."""
    xs = np.sort(_as_sample(x, "x"))
    ys = np.sort(_as_sample(y, "y"))
    n, m = xs.size, ys.size
    if n < 50 or m < 50:
        raise ValueError("two-sample KS needs n, m >= 50")
    grid = np.concatenate([xs, ys])
    Fx = np.searchsorted(xs, grid, side="right") / n
    Fy = np.searchsorted(ys, grid, side="right") / m
    D = float(np.max(np.abs(Fx - Fy)))
    thr = ks_constant(level) * math.sqrt((n + m) / (n * m))
    p = float(special.kolmogorov(math.sqrt(n * m / (n + m)) * D))
    return StatReport(TestKind.KS2, D, thr, p, n + m, seed, D < thr,
                      extra={"n_x": n, "n_y": m})


def _uniform_ranks(x: np.ndarray) -> np.ndarray:
    r = np.empty(x.size)
    r[np.argsort(x, kind="stable")] = np.arange(1, x.size + 1, dtype=float)
    return r / (x.size + 1.0)


def _centered_abs_dist(r: np.ndarray) -> np.ndarray:
    d = np.abs(r[:, None] - r[None, :])
    row = d.mean(axis=1, keepdims=True)
    col = d.mean(axis=0, keepdims=True)
    d -= row
    d -= col
    d += row.mean()
    return d


def independence_test(x, y, permutations: int = 499, level: float = 0.01,
                      rng: RngStream | None = None) -> StatReport:
    """Distance-correlation permutation test on rank-transformed margins.

    The reported statistic is the empirical distance correlation; the
    permutation p-value compares distance covariances, whose variance terms
    cancel across permutations. Rank transforms make the verdict invariant
    under strictly increasing rescaling of either margin.
    """
    xa = _as_sample(x, "x")
    ya = _as_sample(y, "y")
    if xa.size != ya.size:
        raise ValueError("paired samples must have equal length")
    n = xa.size
    if not 200 <= n <= 10_000:
        raise ValueError("independence test supports n in [200, 10000]")
    permutations = int(permutations)
    if permutations < 199:
        raise ValueError("need at least 199 permutations")
    if rng is None:
        rng = RngStream(0, 104729)
    A = _centered_abs_dist(_uniform_ranks(xa))
    B = _centered_abs_dist(_uniform_ranks(ya))
    obs = float(np.mean(A * B))
    vx = float(np.mean(A * A))
    vy = float(np.mean(B * B))
    denom = math.sqrt(vx * vy)
    dcor = math.sqrt(max(0.0, obs) / denom) if denom > 0.0 else 0.0
    gen = rng.generator
    perms = np.stack([gen.permutation(n) for _ in range(permutations)])
    rng.counter += permutations
    kern = _kernels.get("dcov_perm")
    null = kern(A, B, perms)
    p = (1.0 + float(np.sum(null >= obs))) / (permutations + 1.0)
    return StatReport(TestKind.DistCorrPerm, dcor, level, p, n, rng.seed,
                      p > level,
                      extra={"dcov": obs, "permutations": permutations})


def moment_ci(x, target: float, moment_fn=None, seed: int = 0) -> StatReport:
    """Mean of a transform against a target, within 3 standard errors."""
    v = _as_sample(moment_fn(np.asarray(x, dtype=float)) if moment_fn
                   else x, "moment values")
    n = v.size
    if n < 2:
        raise ValueError("moment check needs n >= 2")
    mean = float(np.mean(v))
    sd = float(np.std(v, ddof=1))
    stat = abs(mean - float(target))
    if sd == 0.0 and stat != 0.0:
        raise ValueError("degenerate variance: constant sample off target")
    se = sd / math.sqrt(n)
    thr = 3.0 * se
    cen = v - mean
    m2 = float(np.mean(cen ** 2))
    kurt = float(np.mean(cen ** 4) / m2 ** 2 - 3.0) if m2 > 0.0 else 0.0
    p = float(special.erfc(stat / (se * math.sqrt(2.0)))) if se > 0.0 else 1.0
    return StatReport(TestKind.MomentCI, stat, thr, p, n, seed, stat <= thr,
                      extra={"mean": mean, "stderr": se,
                             "excess_kurtosis": kurt})


def write_report_csv(path, reports, preamble=()):
    """One CSV line per report; the file is the run's primary artifact."""
    textio.write_csv(path, StatReport.ROW_HEADER,
                     (r.row() for r in reports), preamble=preamble)
