"""Command-line interface.

Exit codes: 0 success, 2 configuration or input error, 3 simplex cap hit,
4 an acceptance check requested with ``--check`` failed.
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import logging
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import harness, limits, serialize
from .cech import cech_complex
from .config import SIMPLEX_CAP_ENV
from .errors import RandCechError, ResourceCapExceeded
from .geometry import atlas_from_config, euclidean, weighted_norm
from .homology import betti_numbers, persistence
from .sampling import (
    sample_binomial,
    sample_manifold,
    sample_poissonized,
    uniform_box,
)

log = logging.getLogger("randcech")

EXIT_OK, EXIT_CONFIG, EXIT_CAP, EXIT_CHECK = 0, 2, 3, 4

PRESETS = {
    "figure2-2d": {"setting": "euclidean", "box": [[0, 1], [0, 1]], "n": 10_000, "trials": 20,
                   "r": [0.3, 0.6, 1.0], "k_max": 1, "seed": 2024, "check": "euler", "band": 0.02},
    "figure2-3d": {"setting": "euclidean", "box": [[0, 1], [0, 1], [0, 1]], "n": 10_000, "trials": 20,
                   "r": [0.3, 0.5], "k_max": 2, "seed": 2024, "check": "euler", "band": 0.03},
    "circle-beta0": {"setting": "manifold", "atlas": {"kind": "circle", "radius": 1.0, "density": "uniform"},
                     "n": 10_000, "trials": 20, "r": [1.0], "k_max": 1, "seed": 2024, "check": "circle-beta0",
                     "band": 0.01},
    "scaling-check": {"N": 2, "lambda": 1.0, "r": 0.5, "L": 10_000.0, "theta": 4.0, "trials": 20, "seed": 2024,
                      "k_max": 1, "check": "scaling"},
}

LLN_DEFAULTS = {"setting": "euclidean", "box": [[0, 1], [0, 1]], "atlas": None, "n": 10_000, "trials": 20,
                "r": [0.6], "k_max": 1, "seed": 0, "process": "binomial", "euler": True, "check": None,
                "band": 0.0, "sigmas": 4.0}


class CliError(Exception):
    pass


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise CliError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> list[int]:
    return [int(x) for x in _floats(text)]


def parse_box(text: str) -> list[list[float]]:
    """``0,1x0,1`` → [[0, 1], [0, 1]]."""
    box = []
    for part in text.split("x"):
        lo_hi = _floats(part)
        if len(lo_hi) != 2:
            raise CliError(f"box side {part!r} must be lo,hi")
        box.append(lo_hi)
    return box


def load_config(path: str) -> dict:
    """JSON config from a .json file or from the header line of a previous output."""
    text = Path(path).read_text()
    try:
        cfg = json.loads(text)
    except json.JSONDecodeError:
        cfg = None
        for line in text.splitlines():
            if line.startswith("# {"):
                cfg = json.loads(line[2:])
                break
        if cfg is None:
            raise CliError(f"{path}: no JSON configuration found") from None
    if "config" in cfg and isinstance(cfg["config"], dict) and "command" in cfg["config"]:
        cfg = cfg["config"]
    return cfg


def _resolve(args, defaults: dict, overrides: dict) -> dict:
    cfg = dict(defaults)
    preset = getattr(args, "preset", None)
    if preset:
        if preset not in PRESETS:
            raise CliError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        cfg.update(PRESETS[preset])
        cfg["preset"] = preset
    if getattr(args, "config", None):
        loaded = load_config(args.config)
        loaded.pop("command", None)
        cfg.update(loaded)
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    return cfg


def _emit(text: str, out: str | None, suffix: str = "") -> None:
    if out is None:
        sys.stdout.write(text)
        return
    path = Path(out + suffix) if suffix else Path(out)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    log.info("wrote %s", path)


def _header(command: str, cfg: dict) -> str:
    resolved = {"command": command, **cfg}
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    return "# " + json.dumps(resolved, sort_keys=True, default=serialize._jsonable) + "\n" + f"# generated {stamp}\n"


def _threads(args) -> int:
    return max(1, int(getattr(args, "threads", None) or 1))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_sample(args) -> int:
    cfg = _resolve(args, {"box": None, "manifold": None, "atlas": None, "n": 100, "seed": 0, "poissonized": False},
                   {"box": parse_box(args.uniform_box) if args.uniform_box else None,
                    "manifold": args.manifold, "n": args.n, "seed": args.seed,
                    "poissonized": True if args.poissonized else None})
    n, seed = int(cfg["n"]), int(cfg["seed"])
    if cfg.get("manifold") or cfg.get("atlas"):
        atlas_cfg = cfg.get("atlas") or {"kind": cfg["manifold"], "density": "uniform"}
        cfg["atlas"] = atlas_cfg
        cloud = sample_manifold(atlas_from_config(atlas_cfg), n, seed, poissonized=bool(cfg["poissonized"]))
    elif cfg.get("box"):
        box = np.array(cfg["box"], dtype=float)
        dens = uniform_box(box[:, 0], box[:, 1])
        if cfg["poissonized"]:
            cloud, _ = sample_poissonized(dens, n, seed)
        else:
            cloud = sample_binomial(dens, n, seed)
    else:
        raise CliError("give --uniform-box, --manifold or a --config with box/atlas")
    if args.format == "bin":
        if args.out is None:
            raise CliError("binary output needs --out")
        serialize.write_cloud_binary(cloud, args.out)
        return EXIT_OK
    text = _header("sample", cfg) + "\n".join(
        ",".join(f"{x:.17g}" for x in row) for row in cloud.points
    ) + ("\n" if len(cloud) else "")
    _emit(text, args.out)
    return EXIT_OK


def _metric_from(cfg: dict, dim: int):
    if cfg.get("B") is not None:
        return weighted_norm(np.array(cfg["B"], dtype=float))
    if cfg.get("weights") is not None:
        return weighted_norm(np.diag(cfg["weights"]))
    return euclidean(dim)


def cmd_betti(args) -> int:
    if args.cloud.endswith(".bin"):
        pts = serialize.read_cloud_binary(args.cloud).points
    else:
        pts, _ = serialize.read_cloud_csv(args.cloud)
    cfg = {"cloud": args.cloud, "r": args.r, "k_max": args.k_max,
           "weights": _floats(args.weights) if args.weights else None,
           "B": json.loads(args.B) if args.B else None}
    if len(pts) == 0:
        print("warning: empty point cloud", file=sys.stderr)
        dim = 0
    else:
        dim = pts.shape[1]
    build = cfg["k_max"] + 1
    if len(pts) == 0:
        result = {"betti": [0] * (cfg["k_max"] + 1), "simplex_counts": [0] * (build + 1), "euler": 0}
    else:
        metric = _metric_from(cfg, dim)
        cx = cech_complex(pts, cfg["r"], metric, max_dim=build)
        pers = persistence(cx)
        b = betti_numbers(cx, cfg["k_max"], pers=pers)
        result = {"betti": b.tolist(), "simplex_counts": cx.counts().tolist()}
        if build >= metric.ambient_dim:
            result["euler"] = int(sum((-1) ** k * b[k] for k in range(metric.ambient_dim)))
        if args.pairs:
            _emit(serialize.persistence_csv(pers), args.pairs)
    result["config"] = cfg
    _emit(json.dumps(result, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def _experiment(cfg: dict, threads: int) -> harness.ExperimentConfig:
    common = dict(trials=int(cfg["trials"]), k_max=int(cfg["k_max"]), master_seed=int(cfg["seed"]),
                  process=cfg.get("process", "binomial"), euler=bool(cfg.get("euler", True)), workers=threads,
                  label=cfg.get("preset", ""))
    r_grid = tuple(cfg["r"]) if isinstance(cfg["r"], (list, tuple)) else (float(cfg["r"]),)
    if cfg.get("setting") == "manifold":
        return harness.ExperimentConfig("manifold", int(cfg["n"]), r_grid, atlas=atlas_from_config(cfg["atlas"]), **common)
    box = np.array(cfg["box"], dtype=float)
    dim = len(box)
    return harness.ExperimentConfig("euclidean", int(cfg["n"]), r_grid, density=uniform_box(box[:, 0], box[:, 1]),
                                    metric=_metric_from(cfg, dim), **common)


def _beta0_line(kappa: np.ndarray, r: float) -> np.ndarray:
    # components per unit length of a 1-D Poisson process, applied pointwise to κ
    return kappa * np.exp(-2 * kappa * r)


def check_records(cfg: dict, exp: harness.ExperimentConfig, records) -> list[tuple[str, bool]]:
    """Acceptance comparisons for the built-in checks; one ``(message, ok)`` per comparison."""
    kind = cfg.get("check")
    sig = float(cfg.get("sigmas", 4.0))
    band = float(cfg.get("band", 0.0))
    out = []
    for rec in records:
        if kind == "euler":
            mean, se = rec.stat("chi")
            target = limits.euler_limit(exp.ambient_dim, rec.r)
            tol = max(band, sig * se)
            ok = abs(mean - target) <= tol
            out.append((f"r={rec.r}: chi/n={mean:.5f}±{se:.5f} target={target:.5f} tol={tol:.4f}", ok))
        elif kind == "circle-beta0":
            mean, se = rec.stat("beta", 0)
            target = limits.manifold_limit_integral(exp.atlas, lambda k, r=rec.r: _beta0_line(k, r))
            tol = max(band, sig * se)
            out.append((f"r={rec.r}: beta0/n={mean:.5f}±{se:.5f} target={target:.5f} tol={tol:.4f}",
                        abs(mean - target) <= tol))
            b1, _ = rec.stat("beta", 1)
            out.append((f"r={rec.r}: beta1/n={b1:.2e} <= 2e-4", b1 <= 2e-4))
    return out


def _write_results(command: str, cfg: dict, exp, records, out: str | None) -> None:
    head = _header(command, cfg)
    csv_text = head + serialize.results_csv(exp.setting, records)
    if out is None:
        sys.stdout.write(csv_text)
        return
    _emit(csv_text, out, ".csv")
    _emit(serialize.results_json(exp.setting, records, {"command": command, **cfg}) + "\n", out, ".json")
    stat = "chi" if exp.euler else "beta"
    _emit(head + serialize.gnuplot_table(records, stat), out, ".dat")


def _report(checks) -> int:
    failed = False
    for msg, ok in checks:
        print(f"[{'PASS' if ok else 'FAIL'}] {msg}", file=sys.stderr)
        failed |= not ok
    return EXIT_CHECK if failed else EXIT_OK


def _lln_overrides(args) -> dict:
    return {"n": args.n, "trials": args.trials, "seed": args.seed,
            "r": _floats(args.r) if args.r else None, "k_max": args.k_max,
            "box": parse_box(args.uniform_box) if args.uniform_box else None,
            "process": args.process}


def cmd_lln(args) -> int:
    cfg = _resolve(args, LLN_DEFAULTS, _lln_overrides(args))
    exp = _experiment(cfg, _threads(args))
    records = harness.run_lln_curve(exp)
    _write_results("lln", cfg, exp, records, args.out)
    return _report(check_records(cfg, exp, records)) if args.check else EXIT_OK


def cmd_convergence(args) -> int:
    cfg = _resolve(args, {**LLN_DEFAULTS, "n_list": [1000, 10000]},
                   {**_lln_overrides(args), "n_list": _ints(args.n_list) if args.n_list else None})
    exp = _experiment(cfg, _threads(args))
    res = harness.run_convergence(exp, cfg["n_list"])
    records = [rec for n in cfg["n_list"] for rec in res[n]]
    _write_results("convergence", cfg, exp, records, args.out)
    if args.check:
        k = min(1, exp.betti_dim)
        trend = harness.dispersion_trend(res, "beta", k)
        checks = [(f"std of beta_{k}/n decreases over n={[t[0] for t in trend]}: {[round(t[3], 6) for t in trend]}",
                   all(b[3] < a[3] for a, b in zip(trend, trend[1:])))]
        return _report(checks)
    return EXIT_OK


def cmd_betahat(args) -> int:
    defaults = {"N": 2, "lambda": 1.0, "r": 0.5, "L": 10_000.0, "trials": 20, "seed": 0, "k_max": None,
                "theta": None, "check": None}
    cfg = _resolve(args, defaults, {"N": args.N, "lambda": args.lam, "r": args.r, "L": args.L,
                                    "trials": args.trials, "seed": args.seed, "k_max": args.k_max,
                                    "theta": args.theta})
    N = int(cfg["N"])
    k_max = N - 1 if cfg["k_max"] is None else int(cfg["k_max"])
    est = harness.estimate_beta_hat(float(cfg["lambda"]), float(cfg["r"]), float(cfg["L"]), N, int(cfg["trials"]),
                                    int(cfg["seed"]), k_max, workers=_threads(args))
    rows = [(N, k, est.lam, est.r, e) for k, e in enumerate(est.beta)]
    other = None
    if cfg.get("theta"):
        lam2, r2, factor = limits.scaling_map(est.lam, est.r, float(cfg["theta"]), N)
        other = harness.estimate_beta_hat(lam2, r2, float(cfg["L"]), N, int(cfg["trials"]), int(cfg["seed"]) + 1,
                                          k_max, workers=_threads(args))
        rows += [(N, k, other.lam, other.r, e) for k, e in enumerate(other.beta)]
    _emit(_header("betahat", cfg) + serialize.limit_table_csv(rows), args.out)
    if args.check and other is not None:
        checks = []
        for k in range(k_max + 1):
            a, b = est.beta[k], other.beta[k]
            diff = abs(a.value - factor * b.value)
            comb = math.hypot(a.stderr, factor * b.stderr)
            checks.append((f"k={k}: {a.value:.5f} vs {factor}·{b.value:.5f} diff={diff:.5f} 3σ={3 * comb:.5f}",
                           diff <= 3 * comb))
        return _report(checks)
    return EXIT_OK


def cmd_coupling(args) -> int:
    cfg = _resolve(args, {"box": [[0, 1], [0, 1]], "n_list": [1000, 10000], "r": [1.0], "trials": 20, "seed": 0,
                          "j": 1},
                   {"n_list": _ints(args.n) if args.n else None, "r": _floats(args.r) if args.r else None,
                    "trials": args.trials, "seed": args.seed, "j": args.j,
                    "box": parse_box(args.uniform_box) if args.uniform_box else None})
    box = np.array(cfg["box"], dtype=float)
    exp = harness.ExperimentConfig("euclidean", int(cfg["n_list"][0]), tuple(cfg["r"]), trials=int(cfg["trials"]),
                                   master_seed=int(cfg["seed"]), density=uniform_box(box[:, 0], box[:, 1]),
                                   k_max=max(int(cfg["j"]) - 1, 0), euler=False)
    recs = harness.run_coupling_gap(exp, cfg["n_list"], j=int(cfg["j"]))
    lines = ["n,r,j,mean_gap,stderr,trials,bound_ok"]
    for rec in recs:
        lines.append(f"{rec.n},{rec.r!r},{rec.j},{rec.mean_gap!r},{rec.stderr!r},{len(rec.gap)},{int(rec.bound_ok.all())}")
    _emit(_header("coupling", cfg) + "\n".join(lines) + "\n", args.out)
    if args.check:
        gaps = [rec.mean_gap for rec in recs]
        return _report([(f"mean gap decreasing: {gaps}", all(b < a for a, b in zip(gaps, gaps[1:]))),
                        ("structural bound holds on every trial", all(rec.bound_ok.all() for rec in recs))])
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="randcech", description="Random Čech complexes in the thermodynamic regime")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--seed", type=int)
        sp.add_argument("--threads", type=int, default=1)
        sp.add_argument("--out", help="output path (or prefix for multi-file outputs); stdout when omitted")
        sp.add_argument("--config", help="JSON config, or a previous output file carrying one")
        sp.add_argument("--cap", type=float, help=f"simplex cap per complex (env {SIMPLEX_CAP_ENV})")

    sp = sub.add_parser("sample", help="sample a point cloud")
    common(sp)
    sp.add_argument("--uniform-box", help="box like 0,1x0,1")
    sp.add_argument("--manifold", choices=["circle", "torus", "sphere"])
    sp.add_argument("--n", type=int)
    sp.add_argument("--poissonized", action="store_true")
    sp.add_argument("--format", choices=["csv", "bin"], default="csv")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("betti", help="Betti numbers and simplex counts of a cloud's Čech complex")
    common(sp)
    sp.add_argument("cloud")
    sp.add_argument("--r", type=float, required=True)
    sp.add_argument("--k-max", type=int, default=1)
    sp.add_argument("--weights", help="diagonal of a weighted-norm matrix, e.g. 2,1")
    sp.add_argument("--B", help="full weighted-norm matrix as JSON")
    sp.add_argument("--pairs", help="also write persistence pairs CSV here")
    sp.set_defaults(func=cmd_betti)

    for name, fn, helptext in [("lln", cmd_lln, "Betti/simplex/Euler curves over an r grid"),
                               ("convergence", cmd_convergence, "dispersion of β_k/n across n")]:
        sp = sub.add_parser(name, help=helptext)
        common(sp)
        sp.add_argument("--preset", choices=sorted(k for k in PRESETS if k != "scaling-check"))
        sp.add_argument("--n", type=int)
        sp.add_argument("--trials", type=int)
        sp.add_argument("--r", help="comma-separated r grid")
        sp.add_argument("--k-max", type=int)
        sp.add_argument("--uniform-box")
        sp.add_argument("--process", choices=["binomial", "poissonized"])
        sp.add_argument("--check", action="store_true")
        if name == "convergence":
            sp.add_argument("--n-list", help="comma-separated increasing n values")
        sp.set_defaults(func=fn)

    sp = sub.add_parser("betahat", help="estimate β̂_k from a homogeneous Poisson process")
    common(sp)
    sp.add_argument("--preset", choices=["scaling-check"])
    sp.add_argument("--N", type=int)
    sp.add_argument("--lambda", dest="lam", type=float)
    sp.add_argument("--r", type=float)
    sp.add_argument("--L", type=float)
    sp.add_argument("--trials", type=int)
    sp.add_argument("--k-max", type=int)
    sp.add_argument("--theta", type=float, help="also estimate at the scaling-map image for this θ")
    sp.add_argument("--check", action="store_true")
    sp.set_defaults(func=cmd_betahat)

    sp = sub.add_parser("coupling", help="binomial vs Poissonised simplex-count gap")
    common(sp)
    sp.add_argument("--n", help="comma-separated n values")
    sp.add_argument("--r", help="thermodynamic radius")
    sp.add_argument("--trials", type=int)
    sp.add_argument("--j", type=int)
    sp.add_argument("--uniform-box")
    sp.add_argument("--check", action="store_true")
    sp.set_defaults(func=cmd_coupling)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if getattr(args, "cap", None):
        os.environ[SIMPLEX_CAP_ENV] = str(int(args.cap))
    try:
        return args.func(args)
    except ResourceCapExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (CliError, RandCechError, OSError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
