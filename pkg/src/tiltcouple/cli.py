"""Batch driver: configure a family and a claim, run samplers and tests,
emit CSV data and a verdict report.

Commands
--------
sample TARGET   draw from one coupling and write the joint sample as CSV
verify CLAIM    run a claim bundle; one summary line per check
excursion       draw tilted straddling-jump couplings as CSV
diversity       draw normalized partition block counts as CSV
report CLAIM    verify plus a mandatory report file (.json or .csv)

Exit codes: 0 all gated verdicts pass, 1 statistical failure, 2 usage error.
Output files are byte-identical across reruns of the same configuration:
floats carry 17 significant digits and nothing time- or host-dependent is
ever written. Worker pools only shard replicate loops whose streams are
fixed per replicate, so verdicts do not depend on --workers.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import claims as _claims
from .couplings import (
    couple_gg_measure_batch,
    couple_size_biased_batch,
    couple_theorem1_batch,
)
from .errors import TiltCoupleError
from .excursions import couple_excursion_batch, three_case_model
from .measures import bridge_measure, crp_partition, diversity_estimate, normalize
from .rng import RngStream
from .samplers import sample_pos_stable, sample_tilted_stable, sample_xi_H_pair
from .special_fn import CumulantModel, StableParams
from . import textio

SAMPLE_TARGETS = ("stable", "tilted-stable", "thm1", "gg-measure",
                  "size-biased", "pd-bridge")

_CONFIG_KEYS = {"alpha", "theta", "nu", "b", "n", "seeds", "truncation",
                "out", "workers", "level", "family", "a", "quick", "top_k",
                "replicates", "y"}

# flags forwarded to each claim runner; everything else errors loudly rather
# than being silently dropped
_CLAIM_FLAGS = {
    "algebra": ("alpha", "theta", "y", "n"),
    "thm1": ("nu", "n"),
    "factorization": (),
    "gg-measure": ("alpha", "b", "nu", "n", "truncation"),
    "size-biased": ("alpha", "b", "nu", "n", "truncation"),
    "pd-bridge": ("alpha", "theta", "n", "truncation"),
    "beta-gamma": ("alpha", "theta", "n"),
    "diversity": ("alpha", "theta", "n", "replicates"),
    "excursion": ("alpha", "nu", "b", "n"),
    "kernels": (),
    "calibration": (),
}


class UsageError(Exception):
    pass


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--alpha", type=float, default=None,
                   help="stability index in (0,1)")
    p.add_argument("--theta", type=float, default=None,
                   help="concentration / range parameter")
    p.add_argument("--nu", type=float, default=None,
                   help="polynomial tilt weight, must be positive")
    p.add_argument("--b", type=float, default=None,
                   help="exponential tilt, nonnegative")
    p.add_argument("--n", type=int, default=None, help="sample size")
    p.add_argument("--seeds", type=str, default=None,
                   help="comma-separated seed list, e.g. 1,2,3")
    p.add_argument("--truncation", type=float, default=None,
                   help="relative mass threshold for jump generation")
    p.add_argument("--out", type=str, default=None, help="output file path")
    p.add_argument("--config", type=str, default=None,
                   help="flat JSON config file; flags override it")
    p.add_argument("--workers", type=int, default=None,
                   help="replicate-pool size, default = available cores")
    p.add_argument("--level", type=float, default=None,
                   help="test level, default 0.01")
    p.add_argument("--family", type=str, default=None,
                   choices=("gamma", "stable", "tilted-stable", "size-biased"),
                   help="base family for scalar couplings")
    p.add_argument("--a", type=float, default=None, help="gamma family shape")
    p.add_argument("--y", type=float, default=None,
                   help="path split fraction for the algebra claim")
    p.add_argument("--top-k", type=int, default=None, dest="top_k",
                   help="ranked weights kept per draw (pd-bridge CSV)")
    p.add_argument("--replicates", type=int, default=None,
                   help="replicate count for partition sampling")
    p.add_argument("--quick", action="store_true", default=None,
                   help="reduced sample sizes; every claim still runs")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="tiltcouple",
        description="Couplings of tilted scalars, random measures and "
                    "straddling jumps, with their verification claims.")
    sub = ap.add_subparsers(dest="command", required=True)

    ps = sub.add_parser("sample", help="draw one coupling, write CSV")
    ps.add_argument("target", choices=SAMPLE_TARGETS)
    _add_common(ps)

    pv = sub.add_parser("verify", help="run a claim bundle")
    pv.add_argument("claim", choices=_claims.CLAIM_NAMES + ("all",))
    _add_common(pv)

    pe = sub.add_parser("excursion", help="draw straddling-jump couplings")
    _add_common(pe)

    pd = sub.add_parser("diversity", help="draw partition block counts")
    _add_common(pd)

    pr = sub.add_parser("report", help="verify and write a report file")
    pr.add_argument("claim", choices=_claims.CLAIM_NAMES + ("all",))
    _add_common(pr)
    return ap


# ---------------------------------------------------------------------------
# configuration plumbing


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as e:
        raise UsageError(f"cannot read config: {e}")
    except json.JSONDecodeError as e:
        raise UsageError(f"config is not valid JSON: {e}")
    if not isinstance(raw, dict):
        raise UsageError("config must be a flat JSON object")
    for key, val in raw.items():
        if key not in _CONFIG_KEYS:
            raise UsageError(f"unknown config key: {key!r}")
        if isinstance(val, dict):
            raise UsageError(f"config must be flat; key {key!r} nests")
    return raw


class Settings:
    """Merged view of flags over config file over per-command defaults."""

    def __init__(self, ns: argparse.Namespace):
        self._ns = ns
        self._cfg = _load_config(ns.config) if ns.config else {}

    def get(self, key, default=None):
        v = getattr(self._ns, key, None)
        if v is None:
            v = self._cfg.get(key, default)
        return v

    def seeds(self) -> tuple:
        raw = self.get("seeds")
        if raw is None:
            return _claims.DEFAULT_SEEDS
        if isinstance(raw, str):
            parts = [s for s in raw.split(",") if s.strip()]
        elif isinstance(raw, list):
            parts = raw
        else:
            raise UsageError("seeds must be a comma list or a JSON array")
        try:
            seeds = tuple(int(s) for s in parts)
        except (TypeError, ValueError):
            raise UsageError("seeds must be integers")
        if not seeds:
            raise UsageError("seeds must be non-empty")
        return seeds


def _validate(st: Settings):
    """Domain checks shared by every command; raises UsageError."""
    alpha = st.get("alpha")
    if alpha is not None and not 0.0 < alpha < 1.0:
        raise UsageError("alpha must be in (0,1)")
    nu = st.get("nu")
    if nu is not None and not nu > 0.0:
        raise UsageError("nu must be positive")
    b = st.get("b")
    if b is not None and b < 0.0:
        raise UsageError("b must be nonnegative")
    n = st.get("n")
    if n is not None and int(n) <= 0:
        raise UsageError("n must be positive")
    level = st.get("level")
    if level is not None and not 0.0 < level < 1.0:
        raise UsageError("level must be in (0,1)")
    trunc = st.get("truncation")
    if trunc is not None and not 0.0 < trunc < 1.0:
        raise UsageError("truncation must be in (0,1)")
    workers = st.get("workers")
    if workers is not None and int(workers) < 1:
        raise UsageError("workers must be at least 1")
    k = st.get("top_k")
    if k is not None and int(k) < 1:
        raise UsageError("top-k must be at least 1")
    reps = st.get("replicates")
    if reps is not None and int(reps) < 1:
        raise UsageError("replicates must be at least 1")
    st.seeds()


def _emit(path, header, rows, preamble):
    if path:
        textio.write_csv(path, header, rows, preamble)
    else:
        for line in textio.csv_lines(header, rows, preamble):
            print(line)


def _preamble(command: str, pairs) -> list:
    return [f"{command} " + " ".join(f"{k}={textio.fmt(v)}"
                                     for k, v in pairs)]


# ---------------------------------------------------------------------------
# sample command


def _scalar_model(st: Settings) -> CumulantModel:
    family = st.get("family", "gamma")
    alpha = st.get("alpha", 0.5)
    if family == "gamma":
        return CumulantModel.gamma(st.get("a", 2.0))
    if family == "stable":
        return CumulantModel.stable(alpha)
    if family == "tilted-stable":
        return CumulantModel.tilted_stable(alpha, st.get("b", 1.0))
    return CumulantModel.size_biased(alpha, st.get("b", 1.0))


def cmd_sample(ns: argparse.Namespace) -> int:
    st = Settings(ns)
    _validate(st)
    seed = st.seeds()[0]
    rng = RngStream(seed)
    n = int(st.get("n", 10_000))
    alpha = st.get("alpha", 0.5)
    trunc = st.get("truncation", 1e-4)
    target = ns.target

    if target == "stable":
        T = sample_pos_stable(rng, StableParams(alpha), n)
        pre = _preamble("sample stable", [("alpha", alpha), ("n", n),
                                          ("seed", seed)])
        _emit(st.get("out"), ["T"], ([t] for t in T), pre)
        return 0
    if target == "tilted-stable":
        b = st.get("b", 1.0)
        T = sample_tilted_stable(rng, StableParams(alpha), b, size=n)
        pre = _preamble("sample tilted-stable",
                        [("alpha", alpha), ("b", b), ("n", n), ("seed", seed)])
        _emit(st.get("out"), ["T"], ([t] for t in T), pre)
        return 0
    if target == "thm1":
        nu = st.get("nu", 1.0)
        model = _scalar_model(st)
        xi, T = couple_theorem1_batch(rng, model, nu, n)
        pre = _preamble("sample thm1",
                        [("family", model.family.value), ("nu", nu),
                         ("n", n), ("seed", seed)])
        _emit(st.get("out"), ["xi", "T"], zip(xi, T), pre)
        return 0
    if target == "gg-measure":
        b = st.get("b", 0.0)
        nu = st.get("nu", 0.5)
        xi, T, p1 = couple_gg_measure_batch(rng, StableParams(alpha), b, nu,
                                            trunc, n)
        pre = _preamble("sample gg-measure",
                        [("alpha", alpha), ("b", b), ("nu", nu),
                         ("truncation", trunc), ("n", n), ("seed", seed)])
        _emit(st.get("out"), ["xi", "T", "p1"], zip(xi, T, p1), pre)
        return 0
    if target == "size-biased":
        b = st.get("b", 1.0)
        nu = st.get("nu", 1.5)
        if not b > 0.0:
            raise UsageError("size-biased target needs b > 0")
        xi, T, p1 = couple_size_biased_batch(rng, StableParams(alpha), b, nu,
                                             trunc, n)
        pre = _preamble("sample size-biased",
                        [("alpha", alpha), ("b", b), ("nu", nu),
                         ("truncation", trunc), ("n", n), ("seed", seed)])
        _emit(st.get("out"), ["xi", "T", "p1"], zip(xi, T, p1), pre)
        return 0

    # pd-bridge: joint draw plus the k largest normalized weights
    theta = st.get("theta", -0.25)
    k = int(st.get("top_k", 8))
    p = StableParams(alpha)
    if not theta > -alpha:
        raise UsageError("theta must exceed -alpha")
    xi_H, H = sample_xi_H_pair(rng, p, theta, size=n)
    xi_H = np.atleast_1d(xi_H)
    H = np.atleast_1d(H)

    def rows():
        for i in range(n):
            m = bridge_measure(rng.spawn(i), p, float(xi_H[i] + H[i]), trunc)
            w = normalize(m).p
            top = np.zeros(k)
            top[:min(k, w.size)] = w[:k]
            yield [xi_H[i], H[i], m.total_mass, *top]

    header = ["xi_H", "H", "T"] + [f"p{j + 1}" for j in range(k)]
    pre = _preamble("sample pd-bridge",
                    [("alpha", alpha), ("theta", theta),
                     ("truncation", trunc), ("n", n), ("seed", seed)])
    _emit(st.get("out"), header, rows(), pre)
    return 0


# ---------------------------------------------------------------------------
# excursion and diversity commands


def cmd_excursion(ns: argparse.Namespace) -> int:
    st = Settings(ns)
    _validate(st)
    seed = st.seeds()[0]
    alpha = st.get("alpha", 0.5)
    nu = st.get("nu", 1.5)
    b = st.get("b", 1.0)
    n = int(st.get("n", 10_000))
    model = three_case_model(alpha, nu, b)
    out = couple_excursion_batch(RngStream(seed), model, n)
    pre = _preamble("excursion",
                    [("alpha", alpha), ("nu", nu), ("b", b),
                     ("case", model.tag.value), ("n", n), ("seed", seed)])
    _emit(st.get("out"), ["xi", "overshoot", "undershoot", "duration"],
          zip(out["xi"], out["overshoot"], out["undershoot"],
              out["duration"]), pre)
    return 0


def cmd_diversity(ns: argparse.Namespace) -> int:
    st = Settings(ns)
    _validate(st)
    seed = st.seeds()[0]
    alpha = st.get("alpha", 0.5)
    theta = st.get("theta", 0.0)
    n = int(st.get("n", 10_000))
    reps = int(st.get("replicates", 500))
    rng = RngStream(seed, 800)

    def rows():
        for r in range(reps):
            part = crp_partition(rng.spawn(r), alpha, theta, n)
            yield [r, part.n_blocks, diversity_estimate(part, alpha)]

    pre = _preamble("diversity",
                    [("alpha", alpha), ("theta", theta), ("n", n),
                     ("replicates", reps), ("seed", seed)])
    _emit(st.get("out"), ["replicate", "blocks", "diversity"], rows(), pre)
    return 0


# ---------------------------------------------------------------------------
# verify and report commands


def _json_safe(v):
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(v)
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_json_safe(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _json_safe(x) for k, x in v.items()}
    return str(v) if not isinstance(v, (str, type(None))) else v


def _bundle_json(b) -> dict:
    return {
        "claim": b.claim,
        "params": _json_safe(b.params),
        "passed": b.passed,
        "checks": [{
            "name": c.name,
            "label": c.label,
            "gate": c.gate,
            "passed": c.passed,
            "reports": [{
                "test": r.test.value,
                "statistic": _json_safe(r.statistic),
                "threshold": _json_safe(r.threshold),
                "p_value": _json_safe(r.p_value),
                "n": int(r.n),
                "seed": int(r.seed),
                "verdict": bool(r.verdict),
                "extra": _json_safe(r.extra),
            } for r in c.reports],
        } for c in b.checks],
    }


def _write_report(path: str, bundles):
    ok = all(b.passed for b in bundles)
    if path.endswith(".json"):
        doc = {"claims": [_bundle_json(b) for b in bundles], "overall": ok}
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        return
    pre = [f"claim {b.claim} params={json.dumps(_json_safe(b.params), sort_keys=True)}"
           for b in bundles]
    rows = []
    for b in bundles:
        rows.extend(b.report_rows())
    textio.write_csv(path, _claims.REPORT_HEADER, rows, pre)


def _run_verify(ns: argparse.Namespace, need_out: bool) -> int:
    st = Settings(ns)
    _validate(st)
    out = st.get("out")
    if need_out and not out:
        raise UsageError("report needs --out")
    seeds = st.seeds()
    level = st.get("level", 0.01)
    workers = st.get("workers")
    workers = int(workers) if workers is not None else None
    quick = bool(st.get("quick", False))

    if ns.claim == "all":
        bundles = _claims.run_all(quick=quick, seeds=seeds, level=level,
                                  workers=workers)
    else:
        kwargs = {}
        for key in _CLAIM_FLAGS[ns.claim]:
            v = st.get(key)
            if v is not None:
                kwargs[key] = v
        if "n" in kwargs:
            kwargs["n"] = int(kwargs["n"])
        if "replicates" in kwargs:
            kwargs["replicates"] = int(kwargs["replicates"])
        if ns.claim == "thm1":
            kwargs["model"] = _scalar_model(st)
        bundles = [_claims.run_claim(ns.claim, quick=quick, seeds=seeds,
                                     level=level, workers=workers, **kwargs)]

    for b in bundles:
        for line in b.summary_lines():
            print(line)
    ok = all(b.passed for b in bundles)
    total = sum(b.elapsed for b in bundles)
    print(f"overall: {'PASS' if ok else 'FAIL'} "
          f"({len(bundles)} claim{'s' if len(bundles) != 1 else ''}, "
          f"{total:.1f}s)")
    if out:
        _write_report(out, bundles)
    return 0 if ok else 1


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        if ns.command == "sample":
            return cmd_sample(ns)
        if ns.command == "excursion":
            return cmd_excursion(ns)
        if ns.command == "diversity":
            return cmd_diversity(ns)
        if ns.command == "verify":
            return _run_verify(ns, need_out=False)
        return _run_verify(ns, need_out=True)
    except (UsageError, TiltCoupleError, ValueError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"i/o error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
