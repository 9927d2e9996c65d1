"""Hot kernels, each in a numba build and a numpy build.

Every kernel consumes pre-drawn random blocks, so the two builds walk the
same randomness in the same order. The partition-seating kernel is bitwise
identical across builds. The inverse-Levy step agrees in structure
(acceptance pattern, stop index, draw counts) but its arrival levels come
from a prefix sum whose summation order differs between the scalar loop and
numpy's blocked cumsum, so jump values match only to a relative 1e-12. The
permutation statistic likewise differs by summation order and is checked to
1e-12 with identical verdicts.

Public access goes through :func:`get`, which honors the backend flag.
"""

from __future__ import annotations

import math

import numpy as np

from ._backend import NUMBA_ENABLED, njit_or_none

# ---------------------------------------------------------------------------
# Ferguson-Klass block step
#
# State: gam (Poisson arrival level), mass (accepted mass so far).
# E, U are pre-drawn standard-exponential / uniform blocks of equal length.
# c_inv = Gamma(1-alpha); jump at arrival level g is (g * c_inv)^(-1/alpha).
# Thinning keeps a jump with probability exp(-tilt * jump).
# Stop once c_env * x^(1-alpha) <= tol * mass, the conservative bound on the
# expected untilted mass below the current inversion level x.


def _fk_step_py(gam, mass, E, U, alpha, tilt, tol, c_inv, c_env):
    n = E.shape[0]
    out = np.empty(n)
    k = 0
    inv_alpha = -1.0 / alpha
    one_m_alpha = 1.0 - alpha
    x = 0.0
    for i in range(n):
        gam = gam + E[i]
        x = (gam * c_inv) ** inv_alpha
        if U[i] <= math.exp(-tilt * x):
            out[k] = x
            mass = mass + x
            k += 1
        if mass > 0.0 and c_env * x ** one_m_alpha <= tol * mass:
            return out[:k], gam, mass, True, x, i + 1
    return out[:k], gam, mass, False, x, n


def _fk_step_np(gam, mass, E, U, alpha, tilt, tol, c_inv, c_env):
    g = gam + np.cumsum(E)
    x = (g * c_inv) ** (-1.0 / alpha)
    acc = U <= np.exp(-tilt * x)
    mass_cum = mass + np.cumsum(np.where(acc, x, 0.0))
    stop = (c_env * x ** (1.0 - alpha) <= tol * mass_cum) & (mass_cum > 0.0)
    if stop.any():
        idx = int(np.argmax(stop))
        used = idx + 1
        jumps = x[:used][acc[:used]]
        return (jumps, float(g[idx]), float(mass_cum[idx]), True,
                float(x[idx]), used)
    n = E.shape[0]
    return (x[acc], float(g[-1]), float(mass_cum[-1]), False,
            float(x[-1]), n)


# ---------------------------------------------------------------------------
# sequential partition seating
#
# cumw[j] accumulates sum_{l<=j} (size_l - alpha); a new block is opened when
# the threshold draw lands beyond cumw[K-1], with total weight theta + m after
# m seated customers. Buffers must have length >= n.


def _crp_fill_py(u, alpha, theta, sizes, cumw):
    n = u.shape[0] + 1
    sizes[0] = 1
    cumw[0] = 1.0 - alpha
    K = 1
    for m in range(1, n):
        t = u[m - 1] * (theta + m)
        if t < cumw[K - 1]:
            # first index with cumw[idx] > t
            lo, hi = 0, K
            while lo < hi:
                mid = (lo + hi) // 2
                if cumw[mid] > t:
                    hi = mid
                else:
                    lo = mid + 1
            sizes[lo] += 1
            for l in range(lo, K):
                cumw[l] += 1.0
        else:
            sizes[K] = 1
            cumw[K] = cumw[K - 1] + (1.0 - alpha)
            K += 1
    return K


def _crp_fill_np(u, alpha, theta, sizes, cumw):
    n = u.shape[0] + 1
    sizes[0] = 1
    cumw[0] = 1.0 - alpha
    K = 1
    for m in range(1, n):
        t = u[m - 1] * (theta + m)
        if t < cumw[K - 1]:
            j = int(np.searchsorted(cumw[:K], t, side="right"))
            sizes[j] += 1
            cumw[j:K] += 1.0
        else:
            sizes[K] = 1
            cumw[K] = cumw[K - 1] + (1.0 - alpha)
            K += 1
    return K


# ---------------------------------------------------------------------------
# permuted distance-covariance statistics
#
# A and B are double-centered distance matrices. For each permutation p the
# statistic is mean(A * B[p][:, p]); dVar terms are permutation-invariant and
# handled by the caller.


def _dcov_perm_py(A, B, perms):
    P = perms.shape[0]
    n = A.shape[0]
    out = np.empty(P)
    for p in range(P):
        s = 0.0
        for i in range(n):
            pi = perms[p, i]
            for j in range(n):
                s += A[i, j] * B[pi, perms[p, j]]
        out[p] = s / (n * n)
    return out


def _dcov_perm_np(A, B, perms):
    P = perms.shape[0]
    n = A.shape[0]
    out = np.empty(P)
    for p in range(P):
        idx = perms[p]
        out[p] = np.mean(A * B[np.ix_(idx, idx)])
    return out


# ---------------------------------------------------------------------------
# dispatch

_nb_cache: dict = {}

_PY_IMPLS = {
    "fk_step": _fk_step_py,
    "crp_fill": _crp_fill_py,
    "dcov_perm": _dcov_perm_py,
}

_NP_IMPLS = {
    "fk_step": _fk_step_np,
    "crp_fill": _crp_fill_np,
    "dcov_perm": _dcov_perm_np,
}


def get_numba(name):
    """The JIT build of a kernel, compiling on first use. None when the
    numba backend is unavailable or disabled."""
    jit = njit_or_none()
    if jit is None:
        return None
    if name not in _nb_cache:
        _nb_cache[name] = jit(_PY_IMPLS[name])
    return _nb_cache[name]


def get_numpy(name):
    """The numpy build of a kernel."""
    return _NP_IMPLS[name]


def get(name):
    """The active build of a kernel, honoring TILTCOUPLE_DISABLE_NUMBA."""
    if NUMBA_ENABLED:
        return get_numba(name)
    return get_numpy(name)
