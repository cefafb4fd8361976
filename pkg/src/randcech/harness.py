"""Thermodynamic-regime experiments.

Each trial derives its own random stream from ``(master_seed, r_index,
trial_index)``, builds the Čech complex at r_n = r · n^{−1/dim} and records
Betti numbers, simplex counts and the Euler characteristic, all divided by n.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .cech import cech_complex
from .errors import InvalidArgument
from .geometry import ChartAtlas, MetricSpec, euclidean
from .homology import betti_numbers
from .limits import LimitEstimate, a_j_constant
from .quadrature import atlas_integral
from .sampling import (
    DensitySpec,
    PointCloud,
    centred_window,
    sample_binomial,
    sample_homogeneous,
    sample_manifold,
    sample_poissonized,
)


@dataclass(frozen=True, eq=False)
class ExperimentConfig:
    """Parameters of one thermodynamic-regime run.

    ``setting`` is ``"euclidean"`` (``density`` with optional ``metric``) or
    ``"manifold"`` (``atlas``). ``euler=True`` builds to the ambient dimension
    so the Euler characteristic can be read off the Betti numbers.
    """

    setting: str
    n: int
    r_grid: tuple
    trials: int = 20
    k_max: int = 1
    master_seed: int = 0
    process: str = "binomial"
    density: Optional[DensitySpec] = None
    metric: Optional[MetricSpec] = None
    atlas: Optional[ChartAtlas] = None
    euler: bool = True
    cap: Optional[int] = None
    workers: int = 1
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "r_grid", tuple(float(r) for r in self.r_grid))
        if self.setting not in ("euclidean", "manifold"):
            raise InvalidArgument(f"unknown setting {self.setting!r}")
        if self.process not in ("binomial", "poissonized"):
            raise InvalidArgument(f"unknown process {self.process!r}")
        if self.n < 1 or self.trials < 1 or self.k_max < 0:
            raise InvalidArgument("need n >= 1, trials >= 1 and k_max >= 0")
        if not self.r_grid or any(r <= 0 for r in self.r_grid):
            raise InvalidArgument("r grid must be nonempty and positive")
        if any(b <= a for a, b in zip(self.r_grid, self.r_grid[1:])):
            raise InvalidArgument("r grid must be strictly increasing")
        if self.setting == "euclidean":
            if self.density is None:
                raise InvalidArgument("euclidean setting needs a density")
            if self.metric is not None and self.metric.dim != self.density.dim:
                raise InvalidArgument("metric and density dimensions differ")
        elif self.atlas is None:
            raise InvalidArgument("manifold setting needs an atlas")

    @property
    def intrinsic_dim(self) -> int:
        """Dimension used in the radius scaling: N for Euclidean data, m on a manifold."""
        return self.density.dim if self.setting == "euclidean" else self.atlas.m

    @property
    def ambient_dim(self) -> int:
        """Dimension of the space in which ball intersections are tested."""
        if self.setting == "manifold":
            return self.atlas.N
        return self.metric.ambient_dim if self.metric is not None else self.density.dim

    @property
    def build_dim(self) -> int:
        return max(self.k_max + 1, self.ambient_dim if self.euler else 0)

    @property
    def betti_dim(self) -> int:
        return self.build_dim - 1

    def radius_at(self, r: float, n: Optional[int] = None) -> float:
        n = self.n if n is None else n
        return r * n ** (-1.0 / self.intrinsic_dim)

    def describe(self) -> dict:
        d = {
            "setting": self.setting,
            "n": self.n,
            "r_grid": list(self.r_grid),
            "trials": self.trials,
            "k_max": self.k_max,
            "master_seed": self.master_seed,
            "process": self.process,
            "euler": self.euler,
            "label": self.label,
        }
        if self.density is not None:
            d["density"] = self.density.describe()
        if self.metric is not None:
            d["metric"] = {"kind": self.metric.kind, "dim": self.metric.dim}
            if self.metric.B is not None:
                d["metric"]["B"] = self.metric.B.tolist()
        if self.atlas is not None:
            d["atlas"] = self.atlas.config or {"name": self.atlas.name}
        return d


@dataclass
class ResultRecord:
    """Per-trial statistics at one radius plus their mean and standard error."""

    r: float
    r_n: float
    n: int
    seed: int
    betti: np.ndarray  # trials × (betti_dim+1), divided by n
    simplices: np.ndarray  # trials × (build_dim+1), divided by n
    chi: Optional[np.ndarray]  # trials, divided by n
    wall_time: float
    counts_used: np.ndarray = field(default_factory=lambda: np.empty(0))

    @property
    def trials(self) -> int:
        return len(self.betti)

    @staticmethod
    def _agg(a: np.ndarray) -> tuple[float, float]:
        if len(a) < 2:
            return float(np.mean(a)), 0.0
        return float(np.mean(a)), float(np.std(a, ddof=1) / math.sqrt(len(a)))

    def stat(self, name: str, k: int = 0) -> tuple[float, float]:
        """``(mean, stderr)`` of ``"beta"``, ``"S"`` or ``"chi"``."""
        if name == "beta":
            return self._agg(self.betti[:, k])
        if name == "S":
            return self._agg(self.simplices[:, k])
        if name == "chi":
            if self.chi is None:
                raise InvalidArgument("Euler characteristic was not computed")
            return self._agg(self.chi)
        raise InvalidArgument(f"unknown statistic {name!r}")

    def rows(self) -> list[tuple]:
        """``(k, stat, mean, stderr)`` for every statistic."""
        out = []
        for k in range(self.betti.shape[1]):
            out.append((k, "beta", *self.stat("beta", k)))
        for j in range(self.simplices.shape[1]):
            out.append((j, "S", *self.stat("S", j)))
        if self.chi is not None:
            out.append(("", "chi", *self.stat("chi")))
        return out


def sample_cloud(cfg: ExperimentConfig, key: tuple, n: Optional[int] = None, process: Optional[str] = None) -> PointCloud:
    n = cfg.n if n is None else n
    process = cfg.process if process is None else process
    if cfg.setting == "manifold":
        return sample_manifold(cfg.atlas, n, cfg.master_seed, poissonized=process == "poissonized", key=key)
    if process == "poissonized":
        return sample_poissonized(cfg.density, n, cfg.master_seed, key=key)[0]
    return sample_binomial(cfg.density, n, cfg.master_seed, key=key)


def _trial_stats(cfg: ExperimentConfig, cloud: PointCloud, radius: float, scale: float):
    cx = cech_complex(cloud, radius, cfg.metric, max_dim=cfg.build_dim, cap=cfg.cap)
    betti = np.array(betti_numbers(cx, cfg.betti_dim).values, dtype=float)
    counts = cx.counts().astype(float)
    chi = None
    if cfg.euler:
        # β_k vanishes for k >= ambient dimension, so the alternating sum stops there
        D = cfg.ambient_dim
        chi = float(sum((-1) ** k * betti[k] for k in range(min(D, len(betti)))))
    return betti / scale, counts / scale, None if chi is None else chi / scale


def _run_one(cfg: ExperimentConfig, r_index: int, trial: int, n: int, n_index: int = 0):
    r = cfg.r_grid[r_index]
    cloud = sample_cloud(cfg, (n_index, r_index, trial), n=n)
    return _trial_stats(cfg, cloud, cfg.radius_at(r, n), n) + (len(cloud),)


def _map(cfg: ExperimentConfig, fn, jobs):
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            return list(pool.map(lambda a: fn(*a), jobs))
    return [fn(*a) for a in jobs]


def _records(cfg: ExperimentConfig, n: int, n_index: int = 0) -> list[ResultRecord]:
    records = []
    for ri, r in enumerate(cfg.r_grid):
        t0 = time.perf_counter()
        res = _map(cfg, lambda t: _run_one(cfg, ri, t, n, n_index), [(t,) for t in range(cfg.trials)])
        records.append(
            ResultRecord(
                r=r,
                r_n=cfg.radius_at(r, n),
                n=n,
                seed=cfg.master_seed,
                betti=np.array([x[0] for x in res]),
                simplices=np.array([x[1] for x in res]),
                chi=None if res[0][2] is None else np.array([x[2] for x in res]),
                wall_time=time.perf_counter() - t0,
                counts_used=np.array([x[3] for x in res]),
            )
        )
    return records


def run_lln_curve(cfg: ExperimentConfig) -> list[ResultRecord]:
    """One ResultRecord per radius in the grid."""
    return _records(cfg, cfg.n)


def run_convergence(cfg: ExperimentConfig, n_list: Sequence[int]) -> dict:
    """Records for each n in ``n_list`` (increasing), keyed by n."""
    n_list = [int(n) for n in n_list]
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise InvalidArgument("n list must be increasing")
    return {n: _records(replace(cfg, n=n), n, i) for i, n in enumerate(n_list)}


def dispersion_trend(results: dict, stat: str = "beta", k: int = 1, r_index: int = 0) -> list[tuple]:
    """``(n, mean, stderr, sample std)`` per n for one statistic."""
    out = []
    for n, recs in results.items():
        rec = recs[r_index]
        if stat == "beta":
            arr = rec.betti[:, k]
        elif stat == "S":
            arr = rec.simplices[:, k]
        else:
            arr = rec.chi
        mean, se = rec.stat(stat, k)
        out.append((n, mean, se, float(np.std(arr, ddof=1)) if len(arr) > 1 else 0.0))
    return out


@dataclass
class BetaHatEstimate:
    """β_k/L estimates from a homogeneous process in a window of volume L."""

    beta: list
    euler: LimitEstimate
    per_trial: np.ndarray
    lam: float
    r: float
    L: float
    N: int


def estimate_beta_hat(
    lam: float, r: float, L: float, N: int = 2, trials: int = 20, seed: int = 0, k_max: Optional[int] = None,
    cap: Optional[int] = None, workers: int = 1,
) -> BetaHatEstimate:
    """Estimate β̂_k^{(N)}(λ, r) for k <= k_max by β_k(C(P_L(λ), r))/L."""
    if lam < 0 or not r > 0 or not L > 0 or trials < 1:
        raise InvalidArgument("need lambda >= 0, r > 0, L > 0 and trials >= 1")
    if 0 < lam * L < 10:
        raise InvalidArgument("expected point count λL must be at least 10")
    k_max = N - 1 if k_max is None else k_max
    lo, hi = centred_window(L, N)
    build = max(k_max + 1, N)

    def one(t):
        cloud = sample_homogeneous(lam, lo, hi, seed, key=(t,))
        cx = cech_complex(cloud, r, max_dim=build, cap=cap)
        return np.array(betti_numbers(cx, build - 1).values, dtype=float) / L

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(one, range(trials)))
    else:
        rows = [one(t) for t in range(trials)]
    per = np.array(rows)
    alt = per[:, :N] @ np.array([(-1) ** k for k in range(N)], dtype=float)

    def est(a):
        se = float(np.std(a, ddof=1) / math.sqrt(len(a))) if len(a) > 1 else 0.0
        return LimitEstimate(float(np.mean(a)), se, len(a), "monte-carlo")

    return BetaHatEstimate([est(per[:, k]) for k in range(k_max + 1)], est(alt), per[:, : k_max + 1], lam, r, L, N)


@dataclass
class CouplingRecord:
    n: int
    r: float
    j: int
    gap: np.ndarray  # |S_j(binomial) − S_j(poissonized)| / n per trial
    n_used: np.ndarray
    max_degree: np.ndarray
    bound_ok: np.ndarray

    @property
    def mean_gap(self) -> float:
        return float(np.mean(self.gap))

    @property
    def stderr(self) -> float:
        return float(np.std(self.gap, ddof=1) / math.sqrt(len(self.gap))) if len(self.gap) > 1 else 0.0


def run_coupling_gap(cfg: ExperimentConfig, n_list: Sequence[int], j: int = 1, r_index: int = 0) -> list[CouplingRecord]:
    """Simplex-count gap between coupled binomial and Poissonised clouds, per n.

    Also checks the per-trial bound |ΔS_j| <= |N_n − n| · C(max degree, j):
    every simplex present in only one complex contains a point present in only
    one cloud.
    """
    r = cfg.r_grid[r_index]
    out = []
    for ni, n in enumerate(n_list):
        gaps, used, degs, oks = [], [], [], []
        for t in range(cfg.trials):
            key = (ni, r_index, t)
            binom = sample_cloud(cfg, key, n=n, process="binomial")
            pois = sample_cloud(cfg, key, n=n, process="poissonized")
            rad = cfg.radius_at(r, n)
            cb = cech_complex(binom, rad, cfg.metric, max_dim=j, cap=cfg.cap)
            cp = cech_complex(pois, rad, cfg.metric, max_dim=j, cap=cfg.cap)
            diff = abs(int(cb.counts()[j]) - int(cp.counts()[j]))
            big = cb if len(binom) >= len(pois) else cp
            edges = big.simplices[1] if big.max_dim >= 1 else np.empty((0, 2), dtype=np.int64)
            deg = np.bincount(edges.ravel(), minlength=big.n_vertices) if len(edges) else np.zeros(1, dtype=int)
            maxdeg = int(deg.max()) if len(deg) else 0
            bound = abs(len(pois) - n) * math.comb(maxdeg, j)
            gaps.append(diff / n)
            used.append(len(pois))
            degs.append(maxdeg)
            oks.append(diff <= bound)
        out.append(CouplingRecord(n, r, j, np.array(gaps), np.array(used), np.array(degs), np.array(oks)))
    return out


def estimate_expected_simplex_limit(cfg: ExperimentConfig, j: int) -> list[LimitEstimate]:
    """Mean S_j/n across trials for each radius in the grid."""
    if j > cfg.build_dim:
        cfg = replace(cfg, k_max=j - 1)
    recs = run_lln_curve(cfg)
    out = []
    for rec in recs:
        mean, se = rec.stat("S", j)
        out.append(LimitEstimate(mean, se, rec.trials, "monte-carlo"))
    return out


def simplex_limit_target(cfg: ExperimentConfig, j: int, r: float, **mc) -> float:
    """A_j(r) ∫ f^{j+1}/D^j: the almost-sure limit of S_j/n.

    Supported for uniform box densities (Euclidean or weighted metric) and
    for manifolds, where the integral becomes ∫_M κ^{j+1} dz.
    """
    if cfg.setting == "manifold":
        a = a_j_constant(cfg.atlas.m, j, r, **mc).value
        return a * atlas_integral(cfg.atlas, lambda k: k ** (j + 1))
    dens = cfg.density
    if dens.kind != "box":
        raise InvalidArgument("closed-form targets need a uniform box density")
    a = a_j_constant(dens.dim, j, r, **mc).value
    D = 1.0
    if cfg.metric is not None and cfg.metric.kind == "weighted":
        D = abs(float(np.linalg.det(cfg.metric.B)))
    elif cfg.metric is not None and cfg.metric.kind == "chart":
        raise InvalidArgument("no closed-form target for chart-induced metrics in the Euclidean setting")
    return a * dens.volume ** (-j) / D**j


def nested_bound_holds(cfg: ExperimentConfig, trial_key: tuple, r_small: float, r_large: float, k: int) -> tuple:
    """Betti-difference bound between the complexes at two grid radii of one trial."""
    from .homology import betti_diff_bound_check

    cloud = sample_cloud(cfg, trial_key)
    hi = cech_complex(cloud, cfg.radius_at(r_large), cfg.metric, max_dim=k + 1, cap=cfg.cap)
    lo = hi.threshold(cfg.radius_at(r_small))
    return betti_diff_bound_check(lo, hi, k)


def uniform_config(N: int, n: int, r_grid, trials: int = 20, seed: int = 0, **kw) -> ExperimentConfig:
    from .sampling import uniform_box

    return ExperimentConfig("euclidean", n, tuple(r_grid), trials=trials, master_seed=seed,
                            density=uniform_box(np.zeros(N), np.ones(N)), metric=kw.pop("metric", euclidean(N)), **kw)
