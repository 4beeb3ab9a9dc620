"""Sweep execution: analytic evaluation plus replicated simulation per point."""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .. import analytic
from ..channel import estimate_success_probability, typical_source
from ..des import aggregate, simulate_multistream, simulate_tandem
from ..errors import AoIError, ValidationError
from ..rng import derive_seed
from ..spatial import associate_nearest, sample_ground_pattern, sample_uav_pattern
from .config import ScenarioConfig

COLUMNS = ("sweep_value", "analytic_aoi", "analytic_upper", "sim_aoi", "sim_ci", "sim_peak_aoi", "rel_error", "status")


@dataclass(frozen=True)
class ResultRow:
    sweep_value: float
    analytic_aoi: float = math.nan
    analytic_upper: float = math.nan
    sim_aoi: float = math.nan
    sim_ci: float = math.nan
    sim_peak_aoi: float = math.nan
    rel_error: float = math.nan
    status: str = "ok"


def _describe(exc):
    return f"{type(exc).__name__}: {exc}".replace(",", ";").replace("\n", " ")


def estimate_psj(cfg: ScenarioConfig):
    """Average Monte Carlo success probability of a typical (central) node.

    Each spatial realisation draws fresh ground and UAV patterns; the
    source is the ground node nearest the window centre. Realisation seeds
    do not depend on the sweep point, so a density sweep compares layouts
    drawn from the same random numbers. The half-width reflects the spread
    between realisations. Returns ``(p_hat, ci_halfwidth, realisations)``.
    """
    ch = cfg.channel
    hits = []
    for r in range(ch.realizations):
        seed = derive_seed(cfg.root_seed, "psj", r)
        ground = sample_ground_pattern(cfg.spatial, cfg.window, seed)
        uavs = sample_uav_pattern(cfg.spatial, cfg.window, seed)
        if len(ground) == 0 or len(uavs) == 0:
            continue
        assoc = associate_nearest(ground, uavs)
        src = typical_source(ground, cfg.window.center)
        p, _ = estimate_success_probability(ground, assoc, src, ch.config, ch.active_prob, ch.n_samples, seed)
        hits.append(p)
    if not hits:
        raise ValidationError("spatial", "no realisation had both ground nodes and UAVs")
    hits = np.array(hits)
    p = float(hits.mean())
    if len(hits) > 1:
        ci = 1.96 * hits.std(ddof=1) / math.sqrt(len(hits))
    else:
        ci = 1.96 * math.sqrt(p * (1 - p) / ch.n_samples)
    return p, float(ci), len(hits)


def _analytic(cfg, flows):
    if cfg.system == "multistream":
        i = cfg.flows.target
        if cfg.flows.analytic_model == "mm11":
            return analytic.mm11_average_aoi(flows, i), math.nan
        return analytic.mg11_average_aoi(flows, i), math.nan
    ch = cfg.chain
    return analytic.chain_aoi_approx(ch.chain, ch.xi), analytic.chain_aoi_upper(ch.chain, ch.xi)


def _replicate(cfg, flows, point, rep):
    seed = derive_seed(cfg.root_seed, "rep", point, rep)
    if cfg.system == "multistream":
        return simulate_multistream(flows, cfg.horizon, seed).stats[cfg.flows.target]
    return simulate_tandem(cfg.chain.chain, cfg.chain.xi, cfg.horizon, seed).stats


def run_sweep(cfg: ScenarioConfig, family=None, workers: int = 1, psj_cache=None):
    """Evaluate every sweep value of ``cfg`` (within one family member).

    Replication seeds depend on (root seed, sweep index, replication index)
    only, so family members share random numbers point by point. Failures
    are recorded in the row status and never abort the sweep.
    """
    points = []
    for idx, value in enumerate(cfg.sweep_values):
        pc = cfg.at(value, family)
        flows, status = None, "ok"
        try:
            if pc.system == "multistream":
                p = None
                if pc.success_prob == "estimated":
                    key = (json.dumps(asdict(pc.spatial), sort_keys=True), repr(pc.channel), pc.window)
                    if psj_cache is not None and key in psj_cache:
                        p = psj_cache[key]
                    else:
                        p = estimate_psj(pc)[0]
                        if psj_cache is not None:
                            psj_cache[key] = p
                flows = pc.flows.flowset(p)
        except AoIError as exc:
            status = _describe(exc)
        points.append((idx, value, pc, flows, status))

    jobs = [(k, r) for k, pt in enumerate(points) if pt[4] == "ok" for r in range(pt[2].replications)]

    def work(job):
        k, r = job
        _, _, pc, flows, _ = points[k]
        try:
            return _replicate(pc, flows, points[k][0], r)
        except AoIError as exc:
            return exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(work, jobs))
    else:
        results = [work(j) for j in jobs]
    by_point = {}
    for (k, _), res in zip(jobs, results):
        by_point.setdefault(k, []).append(res)

    rows = []
    for k, (idx, value, pc, flows, status) in enumerate(points):
        a = up = math.nan
        if status == "ok":
            try:
                a, up = _analytic(pc, flows)
            except AoIError as exc:
                status = "analytic " + _describe(exc)
        reps = by_point.get(k, [])
        errs = [x for x in reps if isinstance(x, Exception)]
        if errs:
            rows.append(ResultRow(float(value), a, up, status=_describe(errs[0])))
            continue
        if not reps:
            rows.append(ResultRow(float(value), a, up, status=status))
            continue
        st = aggregate(reps)
        rel = (a - st.time_avg_aoi) / st.time_avg_aoi if math.isfinite(a) else math.nan
        rows.append(ResultRow(float(value), a, up, st.time_avg_aoi, st.ci_halfwidth, st.mean_peak_aoi, rel, status))
    return rows


def _fmt(v):
    if isinstance(v, str):
        return v
    return repr(float(v))


def emit_csv(rows, path):
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for row in rows:
            w.writerow([_fmt(getattr(row, c)) for c in COLUMNS])
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != COLUMNS:
            raise ValidationError(str(path), f"expected columns {','.join(COLUMNS)}")
        return [ResultRow(**{c: (r[c] if c == "status" else float(r[c])) for c in COLUMNS}) for r in reader]


def family_label(cfg, member):
    if not member:
        return cfg.name
    return cfg.name + "".join(f"__{k}={v}" for k, v in member.items())
