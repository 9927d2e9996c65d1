"""Straddling-jump triples of subordinators at an independent exponential level.

A driftless subordinator run until it first exceeds an independent unit-mean
exponential level crosses it inside a single jump. That jump splits into an
undershoot (level minus the pre-jump position) and an overshoot (post-jump
position minus the level); their sum is the full jump, called the duration
here. For a jump intensity lambda with exponent Psi(s) = int (1 - e^(-s t))
lambda(t) dt, the pair has joint density

    h(v, w) = e^(-v) lambda(v + w) / Psi(1),   v, w > 0,

so the duration carries density f(t) = (1 - e^(-t)) lambda(t) / Psi(1) and
the undershoot given the duration is a unit-rate exponential truncated to
(0, duration). Two independent simulation routes are provided: an inverse-CDF
sampler driven by f (any integrable intensity), and a literal jump-walk that
only needs the intensity to have finite total mass.

couple_excursion draws a positive scalar first and then the triple from the
intensity tilted by that scalar. The construction makes scalar * duration a
gamma variable independent of the triple, while the duration alone keeps the
law of the weightless (nu = 0) straddling jump.
"""

import math

from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import NonIntegrable, UnsupportedFamily
from .special_fn import CaseTag, LevyDensityModel, NumericCdf, levy_exponent

__all__ = [
    "ExcursionTriple",
    "ExcursionCoupling",
    "three_case_model",
    "duration_density",
    "excursion_joint_density",
    "compound_poisson_rate",
    "sample_excursion_direct",
    "sample_excursion_direct_batch",
    "sample_excursion_path_oracle",
    "sample_excursion_path_oracle_batch",
    "excursion_xi_density",
    "couple_excursion",
    "couple_excursion_batch",
    "conjugate_excursion_batch",
    "case2_weight_report",
]

# quantile tables certify this much mass; the clipped remainder sits far
# below the resolution of any test run at n <= 1e6
_TABLE_COVERAGE = 1.0 - 1e-7


@dataclass(frozen=True)
class ExcursionTriple:
    """One straddling jump, split at the exponential level.

    duration must equal overshoot + undershoot exactly (same floats), and
    both parts must be strictly positive.
    """

    overshoot: float
    undershoot: float
    duration: float

    def __post_init__(self):
        if not (self.overshoot > 0 and self.undershoot > 0):
            raise ValueError("overshoot and undershoot must be positive")
        if self.duration != self.overshoot + self.undershoot:
            raise ValueError("duration must be the exact float sum of parts")


@dataclass(frozen=True)
class ExcursionCoupling:
    """A tilt scalar together with the triple drawn under that tilt."""

    xi: float
    triple: ExcursionTriple
    params: dict


def three_case_model(alpha: float, nu: float, b: float) -> LevyDensityModel:
    """Polynomially weighted, exponentially tilted stable jump intensity.

    lambda(t) = (alpha / Gamma(1 - alpha)) t^(nu - alpha - 1) e^(-b t).
    The sign of delta = alpha - nu picks the activity regime carried in the
    returned model's tag: delta > 0 keeps infinite activity, delta = 0 is a
    gamma process (needs b > 0), delta < 0 is compound Poisson (needs b > 0).
    The excluded corner delta <= 0 with b = 0 raises NonIntegrable.
    """
    return LevyDensityModel.gg(alpha, b, nu=nu)


def _unit_exponent(model: LevyDensityModel) -> float:
    psi1 = levy_exponent(model, 1.0)
    if not (math.isfinite(psi1) and psi1 > 0):
        raise NonIntegrable("exponent at unit argument must be finite and positive")
    return psi1


def duration_density(model: LevyDensityModel, t):
    """Density (1 - e^(-t)) lambda(t) / Psi(1) of the straddling jump."""
    psi1 = _unit_exponent(model)
    t_arr = np.asarray(t, dtype=float)
    out = np.zeros_like(t_arr, dtype=float)
    pos = t_arr > 0
    out[pos] = -np.expm1(-t_arr[pos]) * np.asarray(
        model.density(t_arr[pos]), dtype=float) / psi1
    return float(out) if np.ndim(t) == 0 else out


def excursion_joint_density(model: LevyDensityModel, v, w):
    """Joint density e^(-v) lambda(v + w) / Psi(1) of (undershoot, overshoot)."""
    psi1 = _unit_exponent(model)
    v_arr = np.asarray(v, dtype=float)
    w_arr = np.asarray(w, dtype=float)
    v_b, w_b = np.broadcast_arrays(v_arr, w_arr)
    out = np.zeros(v_b.shape, dtype=float)
    pos = (v_b > 0) & (w_b > 0)
    out[pos] = np.exp(-v_b[pos]) * np.asarray(
        model.density(v_b[pos] + w_b[pos]), dtype=float) / psi1
    scalar = np.ndim(v) == 0 and np.ndim(w) == 0
    return float(out) if scalar else out


def _duration_table(model: LevyDensityModel) -> NumericCdf:
    table = getattr(model, "_dur_table", None)
    if table is None:
        psi1 = _unit_exponent(model)
        lam = model.density

        def f(t, _p=psi1, _lam=lam):
            return -math.expm1(-t) * float(_lam(t)) / _p

        # total mass is 1 by construction of f, so coverage is certified
        # against the exact normalizer rather than a quadrature estimate
        table = NumericCdf.from_density(f, 1e-8, 64.0, total=1.0,
                                        coverage=_TABLE_COVERAGE)
        model._dur_table = table
    return table


def _split_at_level(rng, duration):
    """Undershoot as a truncated unit-rate exponential on (0, duration)."""
    v = rng.uniform(size=duration.shape[0])
    # v = 0 would put the undershoot exactly at 0; nudge that null event
    v = np.where(v == 0.0, 0.5 ** 53, v)
    under = -np.log1p(v * np.expm1(-duration))
    over = duration - under
    return over, under


def sample_excursion_direct_batch(rng, model: LevyDensityModel, n: int):
    """Vector of straddling-jump triples via the duration inverse CDF.

    Returns (overshoot, undershoot, duration) arrays with
    duration = overshoot + undershoot exactly.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    table = _duration_table(model)
    q = np.clip(rng.uniform(size=n), 1e-12, None)
    duration = np.asarray(table.ppf(q), dtype=float)
    over, under = _split_at_level(rng, duration)
    return over, under, over + under


def sample_excursion_direct(rng, model: LevyDensityModel) -> ExcursionTriple:
    """One straddling-jump triple via the duration inverse CDF."""
    over, under, dur = sample_excursion_direct_batch(rng, model, 1)
    return ExcursionTriple(float(over[0]), float(under[0]), float(dur[0]))


# ---------------------------------------------------------------------------
# jump-walk oracle, finite-activity intensities only


def compound_poisson_rate(model: LevyDensityModel) -> float:
    """Total intensity mass int lambda(t) dt of a finite-activity model."""
    if model.tag is not CaseTag.CompoundPoisson:
        raise UnsupportedFamily("total intensity mass is finite only in the "
                                "compound-Poisson regime")
    if model.kind == "gg":
        return (model.alpha * special.gamma(model.nu - model.alpha)
                / special.gamma(1.0 - model.alpha)
                * model.b ** (model.alpha - model.nu))
    return model.c * special.gamma(model.nu) * model.rate ** (-model.nu)


def _cp_jump_params(model: LevyDensityModel):
    """Shape and rate of the gamma jump-size law of a finite-activity model."""
    rate = compound_poisson_rate(model)
    if not (math.isfinite(rate) and rate > 0):
        raise NonIntegrable("jump rate must be finite and positive")
    if model.kind == "gg":
        return model.nu - model.alpha, model.b
    return model.nu, model.rate


def sample_excursion_path_oracle_batch(rng, model: LevyDensityModel, n: int):
    """Triples by walking the jump chain until it passes an Exp(1) level.

    Jump times are irrelevant to the split, so only jump sizes are drawn.
    Returns (overshoot, undershoot, duration) arrays.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    shape, rate = _cp_jump_params(model)
    level = rng.exponential(size=n)
    over = np.empty(n)
    under = np.empty(n)
    active = np.arange(n)
    below = np.zeros(n)  # last position not exceeding the level
    m = 8
    for _ in range(64):
        if active.size == 0:
            break
        block = rng.gamma(shape, size=(active.size, m)) / rate
        levels = below[active, None] + np.cumsum(block, axis=1)
        exceed = levels > level[active, None]
        hit = exceed.any(axis=1)
        rows = active[hit]
        lev_hit = levels[hit]
        first = np.argmax(exceed[hit], axis=1)
        take = np.arange(first.size)
        over[rows] = lev_hit[take, first] - level[rows]
        prev = np.where(first > 0, lev_hit[take, first - 1], below[rows])
        under[rows] = level[rows] - prev
        below[active[~hit]] = levels[~hit, -1]
        active = active[~hit]
        m *= 2
    else:  # pragma: no cover
        raise RuntimeError("jump walk failed to pass the level")
    return over, under, over + under


def sample_excursion_path_oracle(rng, model: LevyDensityModel) -> ExcursionTriple:
    """One triple from the jump-walk route."""
    over, under, dur = sample_excursion_path_oracle_batch(rng, model, 1)
    return ExcursionTriple(float(over[0]), float(under[0]), float(dur[0]))


# ---------------------------------------------------------------------------
# tilted coupling


def _base_tilt(model: LevyDensityModel) -> float:
    if model.kind == "gg":
        return model.b
    if model.kind == "gamma":
        return model.rate
    raise UnsupportedFamily("the tilted coupling needs a gg or gamma "
                            "jump intensity with a closed-form exponent")


def _weighted_exponent_at_one(model: LevyDensityModel, tilt):
    """Psi(1) of the model re-tilted to `tilt`, vectorized over tilt.

    Mirrors the closed forms of levy_exponent branch for branch with the
    roles of tilt and argument swapped.
    """
    t = np.asarray(tilt, dtype=float)
    if model.kind == "gg":
        alpha, nu = model.alpha, model.nu
        delta = alpha - nu
        if delta > 0:
            k = (alpha * special.gamma(1.0 - delta)
                 / (delta * special.gamma(1.0 - alpha)))
            return k * ((t + 1.0) ** delta - t ** delta)
        if delta == 0:
            return (alpha / special.gamma(1.0 - alpha)) * np.log1p(1.0 / t)
        k = (alpha * special.gamma(nu - alpha)
             / special.gamma(1.0 - alpha))
        return k * (t ** delta - (t + 1.0) ** delta)
    c, r, nu = model.c, model.rate, model.nu
    if nu == 0:
        return c * np.log1p(1.0 / t)
    return c * special.gamma(nu) * (t ** (-nu) - (t + 1.0) ** (-nu))


def _xi_total_mass(model: LevyDensityModel) -> float:
    """Exact normalizer int s^(nu-1) Psi_tilted(s) ds of the tilt density."""
    nu = model.nu
    if model.kind == "gg":
        b = model.b
        return special.gamma(nu) * ((b + 1.0) ** model.alpha - b ** model.alpha)
    r = model.rate
    return special.gamma(nu) * model.c * math.log1p(1.0 / r)


def excursion_xi_density(model: LevyDensityModel):
    """Normalized density of the tilt scalar attached to `model`.

    g(s) is proportional to s^(nu - 1) times the unit exponent of the model
    re-tilted by s; the normalizer is known in closed form, which is what
    lets the quantile table certify its coverage.
    """
    c0 = _base_tilt(model)
    nu = model.nu
    if nu <= 0:
        raise ValueError("the tilt density needs a positive weight nu")
    z = _xi_total_mass(model)

    def pdf(s):
        s_arr = np.asarray(s, dtype=float)
        out = np.zeros_like(s_arr, dtype=float)
        pos = s_arr > 0
        sp = s_arr[pos]
        out[pos] = sp ** (nu - 1.0) * _weighted_exponent_at_one(model, c0 + sp) / z
        return float(out) if np.ndim(s) == 0 else out

    return pdf


def _xi_table(model: LevyDensityModel) -> NumericCdf:
    table = getattr(model, "_xi_tab", None)
    if table is None:
        pdf = excursion_xi_density(model)
        # the tail decays like s^(alpha - 2) for gg models, so the table can
        # stretch many decades before certifying coverage
        table = NumericCdf.from_density(pdf, 1e-8, 1e6, total=1.0,
                                        coverage=_TABLE_COVERAGE)
        model._xi_tab = table
    return table


def _mixture_kappa(model: LevyDensityModel) -> float:
    # gamma shape of the duration given the tilt: one more than the
    # polynomial degree of (1 - e^(-t)) lambda(t) at the origin
    if model.kind == "gg":
        return model.nu - model.alpha + 1.0
    return model.nu + 1.0


def _duration_given_tilt(rng, model: LevyDensityModel, xi):
    """Durations under the intensity re-tilted by xi, one per entry.

    (1 - e^(-t)) t^(kappa - 2) e^(-c t) is a mixture over u in (c, c + 1)
    of gamma(kappa, u) densities with u-weight proportional to u^(-kappa),
    so both stages invert in closed form.
    """
    c = _base_tilt(model) + np.asarray(xi, dtype=float)
    kappa = _mixture_kappa(model)
    v = rng.uniform(size=c.shape[0])
    if kappa == 1.0:
        u = c * np.exp(v * np.log1p(1.0 / c))
    else:
        lo_pow = c ** (1.0 - kappa)
        hi_pow = (c + 1.0) ** (1.0 - kappa)
        u = (lo_pow + v * (hi_pow - lo_pow)) ** (1.0 / (1.0 - kappa))
    return rng.gamma(kappa, size=c.shape[0]) / u


def couple_excursion_batch(rng, model: LevyDensityModel, n: int):
    """Tilt scalars with triples drawn from the re-tilted intensity.

    Returns a dict of arrays (xi, overshoot, undershoot, duration) with
    duration = overshoot + undershoot exactly. The product xi * duration is
    gamma(nu) distributed and independent of the triple; the duration alone
    matches the weightless (nu = 0) straddling jump at the base tilt.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    table = _xi_table(model)
    q = np.clip(rng.uniform(size=n), 1e-12, None)
    xi = np.asarray(table.ppf(q), dtype=float)
    duration = _duration_given_tilt(rng, model, xi)
    over, under = _split_at_level(rng, duration)
    return {"xi": xi, "overshoot": over, "undershoot": under,
            "duration": over + under}


def couple_excursion(rng, model: LevyDensityModel) -> ExcursionCoupling:
    """One tilt scalar and its triple."""
    out = couple_excursion_batch(rng, model, 1)
    triple = ExcursionTriple(float(out["overshoot"][0]),
                             float(out["undershoot"][0]),
                             float(out["duration"][0]))
    params = {"kind": model.kind, "nu": model.nu,
              "tilt": _base_tilt(model), "seed": rng.seed}
    if model.kind == "gg":
        params["alpha"] = model.alpha
    else:
        params["c"] = model.c
    if model.tag is not None:
        params["case"] = model.tag.value
    return ExcursionCoupling(float(out["xi"][0]), triple, params)


def conjugate_excursion_batch(rng, model: LevyDensityModel, n: int):
    """Oracle route to the same joint law, shared with no coupling code.

    Draw the duration from the weightless model at the base tilt, then the
    tilt scalar as gamma(nu) divided by that duration; the undershoot split
    is unchanged. Exact by the conjugacy of the two conditionals.
    """
    if model.nu <= 0:
        raise ValueError("the tilt density needs a positive weight nu")
    base0 = getattr(model, "_weightless", None)
    if base0 is None:
        if model.kind == "gg":
            base0 = LevyDensityModel.gg(model.alpha, model.b, nu=0.0)
        elif model.kind == "gamma":
            base0 = LevyDensityModel.gamma_family(model.c, model.rate, nu=0.0)
        else:
            raise UnsupportedFamily("the tilted coupling needs a gg or gamma "
                                    "jump intensity with a closed-form exponent")
        model._weightless = base0
    over, under, duration = sample_excursion_direct_batch(rng, base0, n)
    xi = rng.gamma(model.nu, size=n) / duration
    return {"xi": xi, "overshoot": over, "undershoot": under,
            "duration": duration}


# ---------------------------------------------------------------------------
# gamma-process regime: ranked weights against a stick oracle


def _exp1_inverse(y):
    """Solve exp1(x) = y for x > 0, vectorized, by log-space bisection.

    The bracket reaches down to 1e-300 so that replicates whose first
    Poisson arrival lands far out in the tail still resolve jumps small
    enough for a relative-mass stopping rule.
    """
    y = np.asarray(y, dtype=float)
    lo = np.full(y.shape, math.log(1e-300))
    hi = np.full(y.shape, math.log(800.0))
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        too_big = special.exp1(np.exp(mid)) < y  # exp1 decreasing
        hi = np.where(too_big, mid, hi)
        lo = np.where(too_big, lo, mid)
    return np.exp(0.5 * (lo + hi))


def _gamma_process_top_weight(rng, conc: float, n: int, tol: float = 1e-8):
    """Largest normalized jump of a gamma subordinator at unit time.

    Jumps are generated largest first by inverting the tail intensity
    conc * exp1(x) at standard Poisson arrivals; the remainder after the
    last jump is bounded by conc * (1 - e^(-x)) and folded into the total.
    """
    top = np.empty(n)
    arrivals = np.zeros(n)
    totals = np.zeros(n)
    first = np.full(n, np.nan)
    active = np.arange(n)
    m = 16
    while active.size:
        gaps = rng.exponential(size=(active.size, m))
        gam = arrivals[active, None] + np.cumsum(gaps, axis=1)
        jumps = _exp1_inverse(gam / conc)
        new_first = np.isnan(first[active])
        first[active[new_first]] = jumps[new_first, 0]
        totals_blk = totals[active] + np.cumsum(jumps, axis=1)[:, -1]
        resid = -conc * np.expm1(-jumps[:, -1])
        done = resid <= tol * (totals_blk + resid)
        rows = active[done]
        top[rows] = first[rows] / (totals_blk[done] + resid[done])
        totals[active] = totals_blk
        arrivals[active] = gam[:, -1]
        active = active[~done]
        m *= 2
    return top


def case2_weight_report(rng, alpha: float, n: int, concentrations=None,
                        level: float = 0.01) -> dict:
    """Scan stick-breaking concentrations against gamma-process top weights.

    The gamma-process regime has jump intensity
    (alpha / Gamma(1 - alpha)) t^(-1) e^(-c t), whose ranked normalized
    weights should follow the single-parameter residual-allocation law with
    concentration alpha / Gamma(1 - alpha), independent of the tilt c. The
    report compares the largest weight from a direct jump simulation against
    stick-breaking oracles over a concentration grid and records which
    concentration fits best.
    """
    from .measures import stick_breaking_top_weight
    from .stats import ks_two_sample

    conc = alpha / special.gamma(1.0 - alpha)
    if concentrations is None:
        concentrations = conc * np.array([0.6, 0.8, 1.0, 1.25, 5.0 / 3.0])
    concentrations = np.asarray(concentrations, dtype=float)
    direct = _gamma_process_top_weight(rng.spawn(1), conc, n)
    stats = []
    pvals = []
    for j, a in enumerate(concentrations):
        oracle = stick_breaking_top_weight(rng.spawn(10 + j), 0.0, float(a), n)
        rep = ks_two_sample(direct, oracle, level=level, seed=rng.seed)
        stats.append(rep.statistic)
        pvals.append(rep.p_value)
    best = int(np.argmin(stats))
    return {
        "concentration": conc,
        "grid": concentrations.tolist(),
        "statistic": [float(s) for s in stats],
        "p_value": [float(p) for p in pvals],
        "best_concentration": float(concentrations[best]),
        "best_is_predicted": bool(
            abs(concentrations[best] - conc) <= 1e-12 * conc),
        "verdict": bool(pvals[np.argmin(np.abs(concentrations - conc))] > level),
    }
