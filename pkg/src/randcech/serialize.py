"""File formats: point clouds, complexes, persistence pairs and result tables."""

from __future__ import annotations

import csv
import io
import json
import math
import struct
from pathlib import Path
from typing import Iterable, Optional

import numpy as np

from .cech import SimplicialComplex
from .errors import InvalidArgument
from .homology import Persistence
from .sampling import PointCloud

CLOUD_MAGIC = b"RCPC"
CLOUD_VERSION = 1
# magic, version, dim, count, seed, tag length
_HEADER = struct.Struct("<4sHIQQH")


# point clouds ---------------------------------------------------------------


def header_lines(meta: dict) -> list[str]:
    return ["# " + json.dumps(meta, sort_keys=True, default=_jsonable)]


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return str(obj)


def cloud_to_csv(cloud: PointCloud, path, config: Optional[dict] = None) -> None:
    meta = {"seed": cloud.seed, "process": cloud.process, "key": list(cloud.key), "dim": cloud.dim, "count": len(cloud)}
    meta.update(cloud.meta)
    if config:
        meta["config"] = config
    with open(path, "w", newline="") as fh:
        for line in header_lines(meta):
            fh.write(line + "\n")
        np.savetxt(fh, cloud.points, delimiter=",", fmt="%.17g")


def read_cloud_csv(path) -> tuple[np.ndarray, dict]:
    """Points and header metadata from a CSV written by ``cloud_to_csv`` (or any plain numeric CSV)."""
    meta: dict = {}
    rows = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if body.startswith("{"):
                    try:
                        meta.update(json.loads(body))
                    except json.JSONDecodeError:
                        pass
                continue
            try:
                rows.append([float(x) for x in line.split(",")])
            except ValueError:
                raise InvalidArgument(f"{path}:{lineno}: not a numeric row") from None
    if not rows:
        dim = int(meta.get("dim", 0))
        return np.empty((0, dim)), meta
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise InvalidArgument(f"{path}: rows have differing lengths {sorted(widths)}")
    pts = np.array(rows, dtype=float)
    if not np.all(np.isfinite(pts)):
        raise InvalidArgument(f"{path}: non-finite coordinates")
    return pts, meta


def cloud_to_bytes(cloud: PointCloud) -> bytes:
    tag = cloud.process.encode()
    head = _HEADER.pack(CLOUD_MAGIC, CLOUD_VERSION, cloud.dim, len(cloud), cloud.seed & (2**64 - 1), len(tag))
    return head + tag + np.ascontiguousarray(cloud.points, dtype="<f8").tobytes()


def cloud_from_bytes(data: bytes) -> PointCloud:
    if len(data) < _HEADER.size:
        raise InvalidArgument("truncated cloud header")
    magic, version, dim, count, seed, tlen = _HEADER.unpack_from(data)
    if magic != CLOUD_MAGIC or version != CLOUD_VERSION:
        raise InvalidArgument("not a randcech point cloud")
    off = _HEADER.size
    tag = data[off : off + tlen].decode()
    off += tlen
    need = dim * count * 8
    if len(data) - off != need:
        raise InvalidArgument(f"expected {need} bytes of coordinates, found {len(data) - off}")
    pts = np.frombuffer(data, dtype="<f8", count=dim * count, offset=off).reshape(count, dim).copy()
    return PointCloud(pts, int(seed), tag)


def write_cloud_binary(cloud: PointCloud, path) -> None:
    Path(path).write_bytes(cloud_to_bytes(cloud))


def read_cloud_binary(path) -> PointCloud:
    return cloud_from_bytes(Path(path).read_bytes())


# complexes ------------------------------------------------------------------


def complex_lines(cx: SimplicialComplex) -> list[str]:
    """``dim v0 ... vk value`` lines in (value, dim, lexicographic) order."""
    return [f"{d} {' '.join(map(str, verts))} {v!r}" for v, d, verts in cx.filtration_order()]


def complex_from_lines(lines: Iterable[str], n_vertices: Optional[int] = None) -> SimplicialComplex:
    by_dim: dict = {}
    for line in lines:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        d = int(parts[0])
        verts = tuple(int(x) for x in parts[1:-1])
        if len(verts) != d + 1:
            raise InvalidArgument(f"line {line!r}: dimension {d} needs {d + 1} vertices")
        by_dim.setdefault(d, []).append((verts, float(parts[-1])))
    max_dim = max(by_dim) if by_dim else 0
    if n_vertices is None:
        n_vertices = 1 + max((max(v) for v, _ in by_dim.get(0, [])), default=-1)
    sims, vals = [], []
    for d in range(max_dim + 1):
        items = sorted(by_dim.get(d, []))
        sims.append(np.array([v for v, _ in items], dtype=np.int64).reshape(-1, d + 1))
        vals.append(np.array([x for _, x in items], dtype=float))
    return SimplicialComplex(n_vertices, tuple(sims), tuple(vals), max_dim)


# persistence and Betti ------------------------------------------------------


def persistence_csv(pers: Persistence) -> str:
    """Intervals for k below the top built dimension; top simplices have no cofaces to die by."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["k", "birth", "death"])
    for k in range(max(pers.max_dim, 1)):
        for b, d in pers.intervals(k):
            w.writerow([k, repr(float(b)), "inf" if math.isinf(d) else repr(float(d))])
    return buf.getvalue()


def betti_json(values) -> str:
    return json.dumps([int(v) for v in values])


# result tables --------------------------------------------------------------

RESULT_FIELDS = ["setting", "n", "r", "k", "stat", "mean", "stderr", "trials", "seed"]
LIMIT_FIELDS = ["m", "k", "lambda", "r", "value", "stderr", "samples"]


def results_csv(setting: str, records, header: Optional[dict] = None) -> str:
    buf = io.StringIO()
    if header:
        for line in header_lines(header):
            buf.write(line + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(RESULT_FIELDS)
    for rec in records:
        for k, stat, mean, se in rec.rows():
            w.writerow([setting, rec.n, repr(rec.r), k, stat, repr(mean), repr(se), rec.trials, rec.seed])
    return buf.getvalue()


def results_json(setting: str, records, header: Optional[dict] = None) -> str:
    out = {"config": header or {}, "setting": setting, "records": []}
    for rec in records:
        out["records"].append(
            {
                "r": rec.r,
                "r_n": rec.r_n,
                "n": rec.n,
                "trials": rec.trials,
                "seed": rec.seed,
                "stats": [{"k": k, "stat": s, "mean": m, "stderr": e} for k, s, m, e in rec.rows()],
            }
        )
    return json.dumps(out, indent=2, sort_keys=True, default=_jsonable)


def gnuplot_table(records, stat: str, k: int = 0) -> str:
    lines = [f"# r mean stderr ({stat}{'' if stat == 'chi' else f'_{k}'})"]
    for rec in records:
        mean, se = rec.stat(stat, k)
        lines.append(f"{rec.r!r} {mean!r} {se!r}")
    return "\n".join(lines) + "\n"


def limit_table_csv(rows: Iterable[tuple]) -> str:
    """Rows of ``(m, k, lambda, r, LimitEstimate)``."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(LIMIT_FIELDS)
    for m, k, lam, r, est in rows:
        w.writerow([m, k, repr(lam), repr(r), repr(est.value), repr(est.stderr), est.samples])
    return buf.getvalue()
