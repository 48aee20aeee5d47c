"""Seeded Monte Carlo sweeps over n, prefactor fits against log n, CSV and SVG output."""
from __future__ import annotations

import csv
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from fpplab.branching import simulate_branching
from fpplab.broadcast import async_push, sync_push
from fpplab.degrees import DegreeDistribution, distribution_from_arg, sample_degree_sequence
from fpplab.errors import ConfigError, RejectionError
from fpplab.fpp import (_resolve_threads, assign_weights, flood_time, hop_diameter,
                        weighted_diameter)
from fpplab.graph import DEFAULT_MAX_ATTEMPTS, component_labels, pair_half_edges, sample_simple

EXPERIMENTS = ("flood", "diam", "hop_diam", "abt", "sync", "branching")
GRAPH_MODES = ("simple", "multigraph")
CSV_HEADER = ["experiment", "n", "replicate", "seed", "metric", "value", "duration_ms"]
# per-replicate substreams, so a metric does not depend on which others were configured
_STREAM = {"weights": 1, "abt": 2, "sync": 3, "branching": 4}


@dataclass(frozen=True)
class ExperimentRecord:
    experiment: str
    n: int
    replicate: int
    seed: int
    metric: str
    value: float
    duration_ms: float = 0.0


@dataclass(frozen=True)
class PrefactorFit:
    slope: float
    intercept: float
    stderr: float
    method: str


@dataclass(frozen=True)
class SweepConfig:
    experiments: tuple[str, ...]
    dist: DegreeDistribution
    dist_text: str
    n_grid: tuple[int, ...]
    reps: int
    seed: int
    graph: str = "simple"
    max_attempts: int = DEFAULT_MAX_ATTEMPTS
    threads: int = 1
    timings: bool = True


def _parse_int(text: str, key: str) -> int:
    text = text.strip()
    try:
        if "^" in text:
            base, exp = text.split("^")
            return int(base) ** int(exp)
        return int(text)
    except ValueError:
        raise ConfigError(f"{key}: not an integer: {text!r}") from None


def _parse_bool(text: str, key: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}: not a boolean: {text!r}")


def parse_config(text: str) -> SweepConfig:
    """Flat ``key=value`` lines; ``#`` comments.

    Required: experiment (one or a comma list), dist, n (comma list, ``2^k``
    allowed), reps, seed. Optional: graph (simple|multigraph), max_attempts,
    threads, timings.
    """
    kv: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key=value, got {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key in kv:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        kv[key] = value
    allowed = {"experiment", "dist", "n", "reps", "seed", "graph", "max_attempts", "threads", "timings"}
    unknown = sorted(set(kv) - allowed)
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(unknown)}")
    missing = [k for k in ("experiment", "dist", "n", "reps", "seed") if k not in kv]
    if missing:
        raise ConfigError(f"missing config keys: {', '.join(missing)}")
    experiments = tuple(e.strip() for e in kv["experiment"].split(",") if e.strip())
    bad = [e for e in experiments if e not in EXPERIMENTS]
    if bad or not experiments:
        raise ConfigError(f"unknown experiment {bad or kv['experiment']!r}; choose from {EXPERIMENTS}")
    try:
        dist = distribution_from_arg(kv["dist"])
    except (ValueError, OSError) as exc:
        raise ConfigError(f"dist: {exc}") from None
    n_grid = tuple(_parse_int(x, "n") for x in kv["n"].split(",") if x.strip())
    if not n_grid or min(n_grid) < 2:
        raise ConfigError("n: need at least one value >= 2")
    reps = _parse_int(kv["reps"], "reps")
    if reps < 0:
        raise ConfigError("reps must be >= 0")
    graph = kv.get("graph", "simple")
    if graph not in GRAPH_MODES:
        raise ConfigError(f"graph must be one of {GRAPH_MODES}")
    return SweepConfig(
        experiments=experiments, dist=dist, dist_text=kv["dist"], n_grid=n_grid,
        reps=reps, seed=_parse_int(kv["seed"], "seed"), graph=graph,
        max_attempts=_parse_int(kv.get("max_attempts", str(DEFAULT_MAX_ATTEMPTS)), "max_attempts"),
        threads=_parse_int(kv.get("threads", "1"), "threads"),
        timings=_parse_bool(kv.get("timings", "true"), "timings"),
    )


def load_config(path) -> SweepConfig:
    return parse_config(Path(path).read_text())


def replicate_seed(base: int, n: int, replicate: int) -> int:
    """64-bit seed for one replicate, a pure function of (base, n, replicate)."""
    ss = np.random.SeedSequence(entropy=int(base), spawn_key=(int(n), int(replicate)))
    return int(ss.generate_state(1, np.uint64)[0])


def _substream(seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng([seed, _STREAM[name]])


def _replicate(cfg: SweepConfig, n: int, rep: int) -> list[ExperimentRecord]:
    seed = replicate_seed(cfg.seed, n, rep)
    rng = np.random.default_rng(seed)
    out = []
    t0 = time.perf_counter()

    def emit(exp, metric, value, start):
        ms = (time.perf_counter() - start) * 1000.0 if cfg.timings else 0.0
        out.append(ExperimentRecord(exp, n, rep, seed, metric, float(value), ms))

    graph_exps = [e for e in cfg.experiments if e != "branching"]
    g = None
    source = None
    if graph_exps:
        seq = sample_degree_sequence(cfg.dist, n, rng)
        if cfg.graph == "simple":
            try:
                g, _ = sample_simple(seq, rng, cfg.max_attempts)
            except RejectionError as exc:
                for e in graph_exps:
                    emit(e, "rejection_failure", exc.attempts, t0)
                graph_exps = []
        else:
            g = pair_half_edges(seq, rng)
        if g is not None:
            source = int(rng.integers(n))
            _, count = component_labels(g)
            if count > 1:
                for e in graph_exps:
                    emit(e, "disconnected", count, t0)
                graph_exps = []
    wg = None
    for exp in cfg.experiments:
        start = time.perf_counter()
        if exp == "branching":
            tr = simulate_branching(cfg.dist, target_pop=n, seed=_substream(seed, "branching"), keep=False)
            emit(exp, "T_last", tr.T_last, start)
            continue
        if exp not in graph_exps:
            continue
        if exp in ("flood", "diam"):
            if wg is None:
                wg = assign_weights(g, 1.0, _substream(seed, "weights"))
            if exp == "flood":
                emit(exp, "flood_time", flood_time(wg, source), start)
            else:
                emit(exp, "weighted_diameter", weighted_diameter(wg), start)
        elif exp == "hop_diam":
            emit(exp, "hop_diameter", hop_diameter(g), start)
        elif exp == "abt":
            emit(exp, "abt", async_push(g, source, _substream(seed, "abt")).completion, start)
        elif exp == "sync":
            emit(exp, "sync_rounds", sync_push(g, source, _substream(seed, "sync")).completion, start)
    return out


def run_sweep(cfg: SweepConfig, threads: int | None = None) -> list[ExperimentRecord]:
    """All replicates of the configured experiments, in (n, replicate) order.

    Within a replicate the graph (and source) is shared by every experiment,
    so ``abt`` and ``sync`` sweeps with the same seed see the same graphs;
    ``flood`` and ``diam`` also share the edge weights.
    Rejection failures and disconnected graphs become records with metric
    ``rejection_failure`` or ``disconnected``.
    """
    tasks = [(n, r) for n in cfg.n_grid for r in range(cfg.reps)]
    workers = _resolve_threads(threads if threads is not None else cfg.threads)
    if workers == 1 or len(tasks) < 2:
        chunks = [_replicate(cfg, n, r) for n, r in tasks]
    else:
        with ThreadPoolExecutor(workers) as pool:
            chunks = list(pool.map(lambda t: _replicate(cfg, *t), tasks))
    return [rec for chunk in chunks for rec in chunk]


def format_records(records: Iterable[ExperimentRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for r in records:
        w.writerow([r.experiment, r.n, r.replicate, r.seed, r.metric,
                    repr(float(r.value)), f"{r.duration_ms:.3f}"])
    return buf.getvalue()


def write_records(records, path) -> None:
    Path(path).write_text(format_records(records))


def parse_records(text: str) -> list[ExperimentRecord]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header != CSV_HEADER:
        raise ConfigError(f"unexpected CSV header {header}")
    return [ExperimentRecord(e, int(n), int(rep), int(s), m, float(v), float(d))
            for e, n, rep, s, m, v, d in reader]


def read_records(path) -> list[ExperimentRecord]:
    return parse_records(Path(path).read_text())


# -- prefactor regression ---------------------------------------------------

FAILURE_METRICS = ("rejection_failure", "disconnected")


def group_means(records: Iterable[ExperimentRecord], metric: str | None = None):
    """Per-n (log n, mean, standard error, count), sorted by n; failure rows skipped."""
    by_n: dict[int, list[float]] = {}
    for r in records:
        if r.metric in FAILURE_METRICS or (metric is not None and r.metric != metric):
            continue
        by_n.setdefault(r.n, []).append(r.value)
    rows = []
    for n in sorted(by_n):
        v = np.sort(np.array(by_n[n]))  # sorted so the sums do not depend on record order
        se = float(v.std(ddof=1) / math.sqrt(v.size)) if v.size > 1 else math.nan
        rows.append((math.log(n), float(v.mean()), se, int(v.size)))
    return rows


def _fit_points(x: np.ndarray, y: np.ndarray, se: np.ndarray, method: str) -> PrefactorFit:
    k = x.size
    xc = x - x.mean()
    sxx = float(xc @ xc)
    ols = float(xc @ y) / sxx
    if method == "least-squares":
        coef = xc / sxx
    elif method == "pairwise-difference":
        coef = np.zeros(k)
        for i in range(k - 1):
            c = 1.0 / ((x[i + 1] - x[i]) * (k - 1))
            coef[i + 1] += c
            coef[i] -= c
    else:
        raise ValueError(f"unknown method {method!r}")
    slope = float(coef @ y)
    intercept = float(y.mean() - slope * x.mean())
    if np.all(np.isfinite(se)):
        stderr = math.sqrt(float((coef ** 2) @ (se ** 2)))
    else:
        # no replicate spread available: use the scatter about the OLS line
        resid = y - (y.mean() + ols * xc)
        s2 = float(resid @ resid) / (k - 2)
        stderr = math.sqrt(s2 * float(coef @ coef))
    return PrefactorFit(slope, intercept, stderr, method)


def fit_prefactor(records: Sequence[ExperimentRecord], method: str = "pairwise-difference",
                  metric: str | None = None) -> PrefactorFit:
    """Slope of the per-n mean against log n.

    ``pairwise-difference`` averages (m2 - m1) / (log n2 - log n1) over
    consecutive grid points, which removes any additive constant;
    ``least-squares`` is the ordinary regression slope. Standard errors are
    propagated from the per-n standard errors of the mean.
    """
    rows = group_means(records, metric)
    if len(rows) < 3:
        raise ValueError(f"need at least 3 distinct n values, got {len(rows)}")
    x, y, se, _ = (np.array(c, dtype=np.float64) for c in zip(*rows))
    return _fit_points(x, y, se, method)


# -- plotting ----------------------------------------------------------------

def plot_svg(records: Sequence[ExperimentRecord], reference: float | None = None,
             title: str = "", metric: str | None = None, width: int = 480, height: int = 320) -> str:
    """Self-contained SVG of mean(metric)/log n against log n, one series per
    experiment, with an optional horizontal line at the theoretical prefactor."""
    names = sorted({r.experiment for r in records})
    series = []
    for name in names:
        rows = group_means([r for r in records if r.experiment == name], metric)
        if rows:
            xs = [r[0] for r in rows]
            ys = [r[1] / r[0] for r in rows]
            errs = [(r[2] / r[0]) if math.isfinite(r[2]) else 0.0 for r in rows]
            series.append((name, xs, ys, errs))
    if not series:
        raise ValueError("no records to plot")
    ref = [reference] if reference is not None else []
    lo = min([y - e for _, _, ys, es in series for y, e in zip(ys, es)] + ref)
    hi = max([y + e for _, _, ys, es in series for y, e in zip(ys, es)] + ref)
    pad = 0.1 * (hi - lo or 1.0)
    lo, hi = lo - pad, hi + pad
    all_x = sorted({x for _, xs, _, _ in series for x in xs})
    x0, x1 = all_x[0], all_x[-1]
    if x1 == x0:
        x0, x1 = x0 - 1, x1 + 1
    ml, mr, mt, mb = 60, 90, 30, 40

    def px(x):
        return ml + (x - x0) / (x1 - x0) * (width - ml - mr)

    def py(y):
        return height - mb - (y - lo) / (hi - lo) * (height - mt - mb)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{ml}" y1="{height - mb}" x2="{width - mr}" y2="{height - mb}" stroke="black"/>',
        f'<line x1="{ml}" y1="{mt}" x2="{ml}" y2="{height - mb}" stroke="black"/>',
        f'<text x="{(ml + width - mr) / 2}" y="{height - 8}" text-anchor="middle">log n</text>',
        f'<text x="14" y="{height / 2}" transform="rotate(-90 14 {height / 2})" '
        f'text-anchor="middle">mean / log n</text>',
    ]
    if title:
        parts.append(f'<text x="{width / 2}" y="18" text-anchor="middle">{title}</text>')
    for v in (lo + pad, hi - pad):
        parts.append(f'<text x="{ml - 4}" y="{py(v) + 4:.1f}" text-anchor="end">{v:.3g}</text>')
    for x in all_x:
        parts.append(f'<text x="{px(x):.1f}" y="{height - mb + 14}" text-anchor="middle">{x:.2f}</text>')
    if reference is not None:
        parts.append(f'<line x1="{ml}" y1="{py(reference):.1f}" x2="{width - mr}" '
                     f'y2="{py(reference):.1f}" stroke="red" stroke-dasharray="4 3"/>')
    colors = ["steelblue", "darkorange", "seagreen", "purple", "saddlebrown", "gray"]
    for i, (name, xs, ys, errs) in enumerate(series):
        col = colors[i % len(colors)]
        pts = " ".join(f"{px(x):.1f},{py(y):.1f}" for x, y in zip(xs, ys))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{col}"/>')
        for x, y, e in zip(xs, ys, errs):
            parts.append(f'<line x1="{px(x):.1f}" y1="{py(y - e):.1f}" x2="{px(x):.1f}" '
                         f'y2="{py(y + e):.1f}" stroke="{col}"/>')
            parts.append(f'<circle cx="{px(x):.1f}" cy="{py(y):.1f}" r="3" fill="{col}"/>')
        parts.append(f'<text x="{width - mr + 8}" y="{mt + 14 * i + 4}" fill="{col}">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
