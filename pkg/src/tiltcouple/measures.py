"""Random measures on the unit interval and exchangeable partitions.

Jump generation follows the inverse-Levy (largest-first) ordering of the
stable subordinator, thinning each proposal to install the exponential tilt;
the stopping rule bounds the expected mass of the un-simulated small-jump
tail, and that bound is carried explicitly instead of being renormalized
away. The bridge variant appends one size-biased extra atom. Stick-breaking
and sequential seating provide truncation-free reference laws for ranked
weights and partitions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import special

from . import _kernels, textio
from .errors import TruncationError
from .rng import RngStream
from .special_fn import StableParams

# first jump-proposal block; doubles on every kernel call
_FIRST_BLOCK = 512
_MAX_PROPOSALS = 50_000_000
_STICK_DEFICIT = 1e-6
_MAX_STICKS = 20_000_000


@dataclass
class JumpMeasure:
    """Purely atomic random measure on [0,1].

    ``jumps`` holds atom sizes in decreasing order, ``locations`` their
    i.i.d. uniform positions. ``total_mass`` includes ``tail_bound``, the
    expected mass of the un-simulated tail below the truncation level, so
    normalized weights plus the reported deficit sum to one to float
    precision.
    """

    jumps: np.ndarray
    locations: np.ndarray
    total_mass: float
    tail_bound: float

    def to_csv(self, path, seed):
        textio.write_csv(
            path,
            ["jump", "location"],
            zip(self.jumps, self.locations),
            preamble=[
                f"total_mass={textio.fmt(self.total_mass)} "
                f"tail_bound={textio.fmt(self.tail_bound)} seed={seed}"],
        )


@dataclass
class RankedWeights:
    """Decreasing probability weights plus the unsimulated remainder."""

    p: np.ndarray
    deficit: float

    def to_csv(self, path, seed):
        textio.write_csv(
            path,
            ["rank", "weight"],
            ((i + 1, w) for i, w in enumerate(self.p)),
            preamble=[
                f"deficit={textio.fmt(self.deficit)} seed={seed}"],
        )


@dataclass
class PartitionState:
    """Block sizes of an exchangeable partition of {1..n}."""

    n: int
    block_sizes: np.ndarray
    n_blocks: int


def _gg_tail_mass(alpha: float, b: float, x: float) -> float:
    # expected mass from jumps below level x:
    # integral_0^x t * (alpha/Gamma(1-alpha)) t^(-alpha-1) e^(-b t) dt
    if x <= 0.0:
        return 0.0
    if b == 0.0:
        return (alpha * x ** (1.0 - alpha)
                / ((1.0 - alpha) * special.gamma(1.0 - alpha)))
    return alpha * b ** (alpha - 1.0) * special.gammainc(1.0 - alpha, b * x)


def sample_gg_measure(rng: RngStream, p: StableParams, b: float,
                      truncation: float = 1e-6,
                      max_proposals: int = _MAX_PROPOSALS) -> JumpMeasure:
    """Jumps of a generalized-gamma random measure, largest first.

    Proposals come from inverting the stable tail intensity at unit-rate
    Poisson arrivals; each is kept with probability e^(-b * jump).
    Generation stops when the expected residual mass drops below
    truncation * accumulated mass.
    """
    alpha = p.alpha
    if b < 0:
        raise ValueError("tilt b must be nonnegative")
    if not 0.0 < truncation < 1.0:
        raise ValueError("truncation must lie in (0, 1)")
    g1ma = special.gamma(1.0 - alpha)
    c_env = alpha / ((1.0 - alpha) * g1ma)
    kern = _kernels.get("fk_step")
    gam = 0.0
    mass = 0.0
    level = 0.0
    parts = []
    stopped = False
    block = _FIRST_BLOCK
    proposed = 0
    while not stopped:
        if proposed >= max_proposals:
            raise TruncationError(
                "expected residual mass did not reach the tolerance within "
                f"{max_proposals} jump proposals")
        m = int(min(block, max_proposals - proposed))
        E = rng.exponential(size=m)
        U = rng.uniform(size=m)
        jumps, gam, mass, stopped, level, used = kern(
            gam, mass, E, U, alpha, float(b), float(truncation), g1ma, c_env)
        parts.append(jumps)
        proposed += used
        block *= 2
    jumps = parts[0] if len(parts) == 1 else np.concatenate(parts)
    tail = float(_gg_tail_mass(alpha, b, level))
    locations = rng.uniform(size=jumps.size)
    total = float(np.sum(jumps) + tail)
    return JumpMeasure(jumps=jumps, locations=locations,
                       total_mass=total, tail_bound=tail)


def bridge_measure(rng: RngStream, p: StableParams, b_value: float,
                   truncation: float = 1e-6) -> JumpMeasure:
    """Generalized-gamma measure plus one independent extra atom.

    The extra atom has size Gamma(1-alpha)-distributed over b and sits at a
    fresh uniform location; it is spliced into the jump list so ordering is
    preserved.
    """
    if not b_value > 0:
        raise ValueError("bridge tilt must be positive")
    base = sample_gg_measure(rng, p, b_value, truncation)
    atom = float(rng.gamma(1.0 - p.alpha)) / b_value
    loc = float(rng.uniform())
    idx = int(np.searchsorted(-base.jumps, -atom, side="left"))
    jumps = np.insert(base.jumps, idx, atom)
    locations = np.insert(base.locations, idx, loc)
    return JumpMeasure(jumps=jumps, locations=locations,
                       total_mass=float(base.total_mass + atom),
                       tail_bound=base.tail_bound)


def normalize(m: JumpMeasure) -> RankedWeights:
    """Ranked weights of the normalized measure.

    The deficit is the tail bound's share of the total, so the weights and
    the deficit account for the whole unit of mass.
    """
    if not m.total_mass > 0.0:
        raise ValueError("total mass must be positive")
    w = np.sort(np.asarray(m.jumps, dtype=float))[::-1] / m.total_mass
    return RankedWeights(p=w, deficit=float(m.tail_bound / m.total_mass))


def _alpha_of(p) -> float:
    if isinstance(p, StableParams):
        return p.alpha
    a = float(p)
    if a != 0.0:
        raise ValueError(
            "pass StableParams for a positive index; a bare 0 selects the "
            "Dirichlet boundary case")
    return 0.0


def stick_breaking_pd(rng: RngStream, p, theta: float, k: int) -> RankedWeights:
    """Ranked Poisson-Dirichlet(alpha, theta) weights by stick-breaking.

    Generates at least k sticks and keeps extending until the undealt
    residual falls below 1e-6; the realized residual decays only
    polynomially for larger alpha, in which case a TruncationError reports
    the stall instead of returning an overstated weight vector.
    """
    alpha = _alpha_of(p)
    theta = float(theta)
    if theta <= -alpha:
        raise ValueError("need theta > -alpha")
    k = int(k)
    if k < 1:
        raise ValueError("need at least one stick")
    parts = []
    residual = 1.0
    total = 0
    m = k
    while True:
        j = np.arange(total + 1, total + m + 1, dtype=float)
        W = rng.beta(1.0 - alpha, theta + j * alpha, size=m)
        cp = np.cumprod(1.0 - W)
        w = W * residual
        w[1:] *= cp[:-1]
        parts.append(w)
        residual *= float(cp[-1])
        total += m
        if residual <= _STICK_DEFICIT and total >= k:
            break
        if total >= _MAX_STICKS:
            raise TruncationError(
                "stick residual is above the deficit target after "
                f"{total} sticks; the weight tail decays too slowly at "
                "these parameters")
        m = int(min(total, _MAX_STICKS - total))
    w = np.concatenate(parts)
    w = np.sort(w[w > 0.0])[::-1]
    return RankedWeights(p=w, deficit=max(0.0, 1.0 - float(np.sum(w))))


def stick_breaking_top_weight(rng: RngStream, p, theta: float, n: int,
                              max_sticks: int = 1_000_000) -> np.ndarray:
    """Largest Poisson-Dirichlet(alpha, theta) weight, n replicates.

    Runs the stick construction for all replicates simultaneously and
    retires a replicate once its undealt residual is smaller than its
    current largest weight; from that point no later stick can win, so the
    returned maximum is exact even though the tail is never generated.
    """
    alpha = _alpha_of(p)
    theta = float(theta)
    if theta <= -alpha:
        raise ValueError("need theta > -alpha")
    n = int(n)
    best = np.zeros(n)
    residual = np.ones(n)
    idx = np.arange(n)
    j = 0
    while idx.size:
        j += 1
        if j > max_sticks:
            raise TruncationError(
                f"a replicate's top weight is still unresolved after "
                f"{max_sticks} sticks")
        W = rng.beta(1.0 - alpha, theta + j * alpha, size=idx.size)
        w = W * residual[idx]
        gain = w > best[idx]
        if gain.any():
            best[idx[gain]] = w[gain]
        residual[idx] *= 1.0 - W
        idx = idx[residual[idx] >= best[idx]]
    return best


def crp_partition(rng: RngStream, alpha: float, theta: float,
                  n: int) -> PartitionState:
    """Seat n customers by the (alpha, theta) Chinese-restaurant rule.

    Sequential seating is exact at finite n, so the partition law carries
    no truncation decisions and can adjudicate the jump-based samplers.
    """
    alpha = float(alpha)
    theta = float(theta)
    if not 0.0 <= alpha < 1.0:
        raise ValueError("need 0 <= alpha < 1")
    if theta <= -alpha:
        raise ValueError("need theta > -alpha")
    n = int(n)
    if n < 1:
        raise ValueError("need at least one customer")
    u = rng.uniform(size=n - 1)
    sizes = np.zeros(n, dtype=np.int64)
    cumw = np.zeros(n, dtype=np.float64)
    kern = _kernels.get("crp_fill")
    K = int(kern(u, alpha, theta, sizes, cumw))
    return PartitionState(n=n, block_sizes=sizes[:K].copy(), n_blocks=K)


def diversity_estimate(part: PartitionState, alpha: float) -> float:
    """Normalized block count K / n^alpha."""
    alpha = float(alpha)
    if not 0.0 < alpha < 1.0:
        raise ValueError("need 0 < alpha < 1")
    return part.n_blocks / part.n ** alpha
