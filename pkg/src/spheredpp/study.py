"""Variance study: repeated estimates over a grid of sample sizes, per-size
summaries, and log-log slope fits."""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import samplers
from .estimators import BUILTINS, builtin_integrand, estimate
from .exprparse import parse_integrand
from .orthopoly import is_perfect_square

log = logging.getLogger(__name__)

MASK64 = (1 << 64) - 1
METHOD_CODES = {"iid": 1, "spiral": 2, "spherical": 3, "jacobi": 4}


class ConfigError(ValueError):
    pass


class StudyError(RuntimeError):
    pass


class DegenerateFitError(ValueError):
    pass


def splitmix64(x):
    z = (x + 0x9E3779B97F4A7C15) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_seed(master, method, N, rep):
    """64-bit stream seed for one repetition; a bijective mix is applied
    after folding in each of method, N and rep."""
    h = splitmix64(master & MASK64)
    for v in (METHOD_CODES[method], N, rep):
        h = splitmix64(h ^ (v & MASK64))
    return h


def resolve_integrand(spec):
    """A builtin name, or an expression prefixed with ``expr:``."""
    if spec in BUILTINS:
        return builtin_integrand(spec)
    if spec.startswith("expr:"):
        return parse_integrand(spec[len("expr:"):], name=spec)
    raise ConfigError(f"unknown integrand {spec!r}; use one of {', '.join(BUILTINS)} or expr:<expression>")


@dataclass
class ExperimentConfig:
    methods: tuple = samplers.METHODS
    n_list: tuple = (32, 64, 128, 256, 512)
    reps: int = 200
    integrand: str = "f1"
    seed: int = 0
    spiral_c: float = samplers.DEFAULT_SPIRAL_C
    workers: int = 1

    def __post_init__(self):
        self.methods = tuple(self.methods)
        self.n_list = tuple(int(n) for n in self.n_list)
        if not self.methods:
            raise ConfigError("at least one method is required")
        for m in self.methods:
            if m not in samplers.METHODS:
                raise ConfigError(f"unknown method {m!r}")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigError("duplicate methods")
        if not self.n_list or any(n < 1 for n in self.n_list):
            raise ConfigError("N list must contain positive integers")
        if any(b <= a for a, b in zip(self.n_list, self.n_list[1:])):
            raise ConfigError(f"N list must be strictly ascending, got {list(self.n_list)}")
        if self.reps < 2:
            raise ConfigError("reps must be at least 2")
        if "jacobi" in self.methods:
            bad = [n for n in self.n_list if not is_perfect_square(n)]
            if bad:
                raise ConfigError(f"jacobi requires perfect-square N, got {bad}")
        if not self.spiral_c > 0:
            raise ConfigError("spiral constant must be positive")
        if not 0 <= self.seed <= MASK64:
            raise ConfigError("seed must fit in 64 unsigned bits")
        resolve_integrand(self.integrand)


@dataclass(frozen=True)
class Record:
    method: str
    integrand: str
    N: int
    rep: int
    seed: int
    estimate: float


@dataclass(frozen=True)
class SummaryRow:
    method: str
    integrand: str
    N: int
    reps: int
    mean: float
    variance: float
    std_error: float


@dataclass(frozen=True)
class SlopeFit:
    method: str
    integrand: str
    slope: float
    intercept: float
    r_squared: float


@dataclass
class StudyResult:
    config: ExperimentConfig
    records: list
    summary: list
    slopes: list = field(default_factory=list)


def _run_task(task):
    method, N, rep, seed, integrand_spec, spiral_c = task
    f = resolve_integrand(integrand_spec)
    rng = np.random.default_rng(seed)
    try:
        sample = samplers.draw(method, N, rng, spiral_c=spiral_c, seed=seed)
        est = estimate(sample, f)
    except Exception as exc:
        raise StudyError(f"method={method} N={N} rep={rep} seed={seed}: {exc}") from exc
    return Record(method, f.name, N, rep, seed, est.value)


def tasks_for(cfg):
    for method in cfg.methods:
        for N in cfg.n_list:
            for rep in range(cfg.reps):
                yield (method, N, rep, derive_seed(cfg.seed, method, N, rep), cfg.integrand, cfg.spiral_c)


def run_records(cfg):
    tasks = list(tasks_for(cfg))
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as pool:
            records = list(pool.map(_run_task, tasks, chunksize=8))
    else:
        records = [_run_task(t) for t in tasks]
    order = {m: i for i, m in enumerate(cfg.methods)}
    records.sort(key=lambda r: (order[r.method], r.N, r.rep))
    return records


def summarize(records):
    """Mean, unbiased variance and standard error per (method, N)."""
    groups = {}
    for r in records:
        groups.setdefault((r.method, r.integrand, r.N), []).append(r.estimate)
    rows = []
    for (method, integrand, N), vals in groups.items():
        v = np.asarray(vals)
        var = float(np.var(v, ddof=1)) if len(v) > 1 else float("nan")
        rows.append(SummaryRow(method, integrand, N, len(v), float(np.mean(v)), var, math.sqrt(var / len(v))))
    return rows


def fit_loglog_slope(summary, method):
    """Least-squares line through ``(log N, log variance)`` for one method."""
    rows = [r for r in summary if r.method == method]
    if len(rows) < 3:
        raise DegenerateFitError(f"{method}: need at least 3 sample sizes, got {len(rows)}")
    if any(not r.variance > 0 for r in rows):
        raise DegenerateFitError(f"{method}: zero or undefined variance in slope fit")
    x = np.log([r.N for r in rows])
    y = np.log([r.variance for r in rows])
    xm, ym = x.mean(), y.mean()
    sxx = np.sum((x - xm) ** 2)
    if sxx == 0:
        raise DegenerateFitError(f"{method}: sample sizes must be distinct")
    slope = float(np.sum((x - xm) * (y - ym)) / sxx)
    intercept = float(ym - slope * xm)
    ss_res = float(np.sum((y - intercept - slope * x) ** 2))
    ss_tot = float(np.sum((y - ym) ** 2))
    r2 = 1.0 if ss_tot == 0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    return SlopeFit(method, rows[0].integrand, slope, intercept, r2)


def run_variance_study(cfg):
    records = run_records(cfg)
    summary = summarize(records)
    slopes = []
    for method in cfg.methods:
        try:
            slopes.append(fit_loglog_slope(summary, method))
        except DegenerateFitError as exc:
            log.info("no slope for %s: %s", method, exc)
    return StudyResult(cfg, records, summary, slopes)
