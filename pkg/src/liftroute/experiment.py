"""Seeded parameter sweeps written as CSV, plus the tour-length scaling probe."""

from __future__ import annotations

import csv
import io
import math
import statistics
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from typing import Iterable, Sequence

import numpy as np

from .core import Instance, is_lifo, validate_plan
from .gen import GAMMA, RequestDistribution, UniformCube, generate, mix, parse_distribution
from .pdp import solve_pdp
from .pdpc import UndefinedRatioError, solve_pdpc
from .scp import MATCH_THRESHOLD
from .tsp import TspBackend, build_tour, default_backend, parse_backend, tour_length

SCHEMA = "liftroute-experiment/1"


def derive_seed(base: int, *parts: int) -> int:
    """Deterministic 63-bit seed from a base seed and integer coordinates."""
    z = mix(np.uint64(base % 2**64))
    with np.errstate(over="ignore"):
        for p in parts:
            z = mix(z + np.uint64((p + 1) % 2**64) * GAMMA)
    return int(z) & (2**63 - 1)


@dataclass
class ExperimentConfig:
    ns: Sequence[int]
    cs: Sequence[int] = (2,)
    ds: Sequence[int] = (1,)
    dist: str | RequestDistribution = "uniform"
    tsp: str | None = None  # None: strip for d=1, mst otherwise
    trials: int = 1
    base_seed: int = 0
    out: str | None = None
    threads: int = 1
    with_pdp: bool = True
    match_threshold: int = MATCH_THRESHOLD
    instance: Instance | None = None  # replaces generation when set

    def __post_init__(self):
        for name in ("ns", "cs", "ds"):
            vals = list(getattr(self, name))
            if not vals or any(int(v) < 1 for v in vals):
                raise ValueError(f"{name} must be a non-empty list of positive integers")
            setattr(self, name, [int(v) for v in vals])
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass
class ResultRow:
    n: int
    c: int
    d: int
    trial: int
    seed: int
    tsp: str
    sol_pdpc: float = math.nan
    lower_bound: float = math.nan
    ratio_ub: float = math.nan
    tour_len: float = math.nan
    s0_len: float = math.nan
    sol_pdp: float = math.nan
    lemma1_rhs: float = math.nan
    lemma2_rhs: float = math.nan
    cS0_over_n: float = math.nan
    cT_over_n: float = math.nan
    mean_loaded: float = math.nan
    plan_ok: bool = False
    greedy_match: bool = False
    error: str = ""
    runtime_ms: float = 0.0

    def key(self):
        return (self.d, self.n, self.c, self.trial)


COLUMNS = [f.name for f in fields(ResultRow)]
DATA_COLUMNS = [c for c in COLUMNS if c != "runtime_ms"]


def _backend_for(name: str | None, d: int) -> TspBackend:
    return default_backend(2 * d) if name is None else parse_backend(name)


def _resolve_dist(dist, d: int) -> RequestDistribution:
    return parse_distribution(dist, d) if isinstance(dist, str) else dist


def run_cell(inst: Instance, c: int, backend: TspBackend, seed: int, trial: int = 0,
             tour=None, with_pdp: bool = True, match_threshold: int = MATCH_THRESHOLD) -> ResultRow:
    """Solve one instance at one capacity; failures are recorded in the row."""
    row = ResultRow(n=inst.n, c=c, d=inst.d, trial=trial, seed=seed, tsp=backend.name)
    t0 = time.perf_counter()
    try:
        if with_pdp:
            pdp = solve_pdp(inst, c, backend, seed, tour=tour, match_threshold=match_threshold)
            sol = pdp.pdpc
        else:
            pdp = None
            sol = solve_pdpc(inst, c, backend, seed, tour=tour)
        row.sol_pdpc = sol.sol
        row.lower_bound = sol.lower_bound
        row.tour_len = sol.tour_len
        row.lemma1_rhs = sol.lemma1_rhs
        row.mean_loaded = sol.sum_loaded / inst.n
        row.cT_over_n = c * sol.tour_len / inst.n
        ok = validate_plan(inst, sol.plan).ok and is_lifo(sol.plan)
        if pdp is not None:
            row.s0_len = pdp.scp.s0_length
            row.sol_pdp = pdp.sol_total
            row.lemma2_rhs = pdp.lemma2_rhs
            row.cS0_over_n = pdp.diag.cS0_over_n
            row.greedy_match = pdp.scp.greedy
            ok = ok and validate_plan(inst, pdp.plan).ok
        row.plan_ok = ok
        row.ratio_ub = sol.ratio_ub
    except UndefinedRatioError as exc:
        row.error = f"ratio: {exc}"
    except Exception as exc:  # noqa: BLE001 - recorded, the sweep goes on
        row.error = f"{type(exc).__name__}: {exc}"
    row.runtime_ms = (time.perf_counter() - t0) * 1000.0
    return row


def _job(args) -> list[ResultRow]:
    cfg, n, d, trial = args
    seed = derive_seed(cfg.base_seed, n, d, trial)
    backend = _backend_for(cfg.tsp, d)
    rows = []
    try:
        inst = cfg.instance if cfg.instance is not None else generate(n, d, _resolve_dist(cfg.dist, d), seed)
        tour = build_tour(inst.lifted(), backend, seed)
    except Exception as exc:  # noqa: BLE001
        return [ResultRow(n=n, c=c, d=d, trial=trial, seed=seed, tsp=backend.name,
                          error=f"{type(exc).__name__}: {exc}") for c in cfg.cs]
    for c in cfg.cs:
        rows.append(run_cell(inst, c, backend, seed, trial, tour, cfg.with_pdp, cfg.match_threshold))
    return rows


def iter_jobs(cfg: ExperimentConfig):
    if cfg.instance is not None:
        ns, ds = [cfg.instance.n], [cfg.instance.d]
    else:
        ns, ds = cfg.ns, cfg.ds
    for d in ds:
        for n in ns:
            for trial in range(cfg.trials):
                yield (cfg, n, d, trial)


def run_experiment(cfg: ExperimentConfig) -> list[ResultRow]:
    """Run every (d, n, trial) job, one row per capacity, sorted; writes CSV if ``cfg.out``."""
    jobs = list(iter_jobs(cfg))
    if cfg.threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            chunks = list(pool.map(_job, jobs, chunksize=max(1, len(jobs) // (4 * cfg.threads))))
    else:
        chunks = [_job(j) for j in jobs]
    rows = sorted((r for chunk in chunks for r in chunk), key=ResultRow.key)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            write_csv(fh, rows)
    return rows


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def write_csv(fh, rows: Iterable[ResultRow], columns: Sequence[str] = COLUMNS) -> None:
    fh.write(f"# {SCHEMA}\n")
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        d = asdict(r)
        w.writerow([_fmt(d[c]) for c in columns])


def rows_to_csv(rows: Iterable[ResultRow], columns: Sequence[str] = COLUMNS) -> str:
    buf = io.StringIO()
    write_csv(buf, rows, columns)
    return buf.getvalue()


def summarize(rows: Sequence[ResultRow]) -> list[dict]:
    """Per-cell medians over trials that finished without error."""
    cells: dict = {}
    for r in rows:
        cells.setdefault((r.d, r.n, r.c), []).append(r)
    out = []
    for (d, n, c), group in sorted(cells.items()):
        good = [r for r in group if not r.error]
        entry = {"d": d, "n": n, "c": c, "trials": len(group), "errors": len(group) - len(good)}
        for col in ("sol_pdpc", "ratio_ub", "sol_pdp", "cT_over_n", "cS0_over_n", "mean_loaded"):
            vals = [getattr(r, col) for r in good if not math.isnan(getattr(r, col))]
            entry[col] = statistics.median(vals) if vals else math.nan
        out.append(entry)
    return out


def format_summary(summary: Sequence[dict]) -> str:
    cols = ["d", "n", "c", "trials", "errors", "ratio_ub", "sol_pdpc", "sol_pdp",
            "cT_over_n", "cS0_over_n", "mean_loaded"]
    lines = ["\t".join(cols)]
    for e in summary:
        lines.append("\t".join(f"{e[c]:.6g}" if isinstance(e[c], float) else str(e[c]) for c in cols))
    return "\n".join(lines)


@dataclass
class ProbeRow:
    n: int
    mean: float
    std: float
    cv: float
    values: list = field(default_factory=list)


def bhh_probe(d: int, ns: Sequence[int], dist: str | RequestDistribution = "uniform",
              trials: int = 10, seed: int = 0, backend: TspBackend | None = None) -> list[ProbeRow]:
    """Normalized lifted tour length ``|T| * n**(1/(2d)) / n`` per ``n``, across trials."""
    law = _resolve_dist(dist, d)
    backend = backend or default_backend(2 * d)
    out = []
    for n in ns:
        vals = []
        for trial in range(trials):
            s = derive_seed(seed, n, d, trial)
            inst = generate(n, d, law, s)
            pts = inst.lifted()
            length = tour_length(pts, build_tour(pts, backend, s))
            vals.append(length * n ** (1.0 / (2 * d)) / n)
        mean = statistics.fmean(vals)
        std = statistics.pstdev(vals) if len(vals) > 1 else 0.0
        out.append(ProbeRow(n, mean, std, std / mean if mean else 0.0, vals))
    return out
