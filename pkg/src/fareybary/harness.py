"""Seeded experiments on area ratios and run statistics.

Random points are drawn lazily: each coordinate starts with a fixed number of
random bits and gains more only when a containment test cannot be decided at
the current resolution.  Every decision is therefore exact, and the point is
uniform on the triangle.  Sample ``i`` of a run uses its own generator seeded
from ``(seed, i)``, so results do not depend on evaluation order.
"""

from __future__ import annotations

import csv
import json
import math
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import NamedTuple

from . import continuous, weighted
from .errors import PrecisionExhausted
from .minkowski import interval_trace
from .projective import (
    M0,
    barycentric,
    mat_mul,
    polygons_disjoint,
    to_fraction,
    triangle_area,
)
from .subdivision import Descent

THRESHOLDS = (Fraction(1, 10), Fraction(1, 1000), Fraction(1, 10**6))


@dataclass(frozen=True)
class ExperimentConfig:
    map: str = "weighted"
    weights: weighted.Weights | None = None
    samples: int = 200
    depth: int = 60  # number of completed runs per sample
    seed: int = 0
    precision: int = 64  # initial random bits per coordinate
    workers: int = 1

    def __post_init__(self):
        if self.map not in ("weighted", "continuous"):
            raise ValueError(f"unknown map {self.map!r}")
        if self.map == "weighted":
            w = self.weights if self.weights is not None else weighted.UNIT
            if not isinstance(w, weighted.Weights):
                w = weighted.Weights(*w)
            object.__setattr__(self, "weights", w)
        elif self.weights is not None:
            raise ValueError("the continuous map takes no weights")
        if self.samples < 1:
            raise ValueError("samples must be at least 1")
        if self.depth < 0:
            raise ValueError("depth must be nonnegative")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError("seed must fit in 64 bits")
        if self.precision < 8:
            raise ValueError("precision must be at least 8 bits")

    @property
    def grammar(self):
        if self.map == "weighted":
            return weighted.weighted_grammar(self.weights)
        return continuous.GRAMMAR

    @property
    def base(self):
        """Denominator base of the area ratio: m1+m2+m3, or 6."""
        return self.weights.total if self.map == "weighted" else 6

    def to_json(self):
        d = asdict(self)
        d["weights"] = None if self.weights is None else list(self.weights.m)
        return d

    @classmethod
    def from_json(cls, d):
        if isinstance(d, str):
            d = json.loads(d)
        d = dict(d)
        if d.get("weights") is not None:
            d["weights"] = weighted.Weights(*d["weights"])
        return cls(**d)


def sample_rng(seed: int, index: int) -> random.Random:
    return random.Random((seed << 32) + index)


class RandomPoint:
    """A lazily refined uniform random point of a triangle.

    Internally a dyadic square in the unit square, folded onto the half
    x >= y by reflection, then carried affinely onto ``vertices`` (the base
    triangle by default).  ``corners()`` are the image of the square's corners.
    """

    exact = False

    def __init__(self, rng, bits=64, step=32, max_bits=8192, vertices=None):
        self.rng = rng
        self.bits = bits
        self.step = step
        self.max_bits = max_bits
        self.x = rng.getrandbits(bits)
        self.y = rng.getrandbits(bits)
        self.refinements = 0
        if vertices is None:
            self._ints = None
        else:
            pts = [(to_fraction(a), to_fraction(b)) for a, b in vertices]
            den = math.lcm(*(c.denominator for p in pts for c in p))
            self._ints = [(int(a * den), int(b * den)) for a, b in pts]
            self._den = den
        while self.x == self.y:
            self._more(0)
        if self.x < self.y:
            self.x, self.y = self.y, self.x

    def _more(self, level):
        if self.bits + self.step > self.max_bits:
            raise PrecisionExhausted(level, f"random point needed more than {self.max_bits} bits")
        self.x = (self.x << self.step) | self.rng.getrandbits(self.step)
        self.y = (self.y << self.step) | self.rng.getrandbits(self.step)
        self.bits += self.step
        self.refinements += 1

    def refine(self, level):
        self._more(level)

    def _map(self, X, Y, D):
        if self._ints is None:
            return (X, Y, D)
        (a1, b1), (a2, b2), (a3, b3) = self._ints
        return (
            (D - X) * a1 + (X - Y) * a2 + Y * a3,
            (D - X) * b1 + (X - Y) * b2 + Y * b3,
            D * self._den,
        )

    def corners(self):
        D = 1 << self.bits
        x, y = self.x, self.y
        return [self._map(X, Y, D) for X, Y in ((x, y), (x + 1, y), (x + 1, y + 1), (x, y + 1))]

    def plane_corners(self):
        return [(Fraction(p, r), Fraction(q, r)) for p, q, r in self.corners()]


# -- traces ----------------------------------------------------------------------

class TraceRecord(NamedTuple):
    s: int  # total raw moves after this run
    kind: str
    a: int  # run length
    r_row: tuple
    rho: Fraction
    step: Fraction  # rho_n / rho_{n-1}


@dataclass
class RatioTrace:
    sample_id: int
    records: list
    resampled: int = 0

    @property
    def rhos(self):
        return [Fraction(1)] + [r.rho for r in self.records]

    @property
    def min_rho(self):
        return min(self.rhos)

    def max_type1_block(self, upto=None, grammar="weighted"):
        """Longest block of consecutive raw type I moves within the first runs."""
        best = 0
        for rec in self.records[:upto]:
            if rec.kind == "I":
                best = max(best, rec.a)
            elif grammar == "weighted":
                best = max(best, rec.a - 1)
        return best


class _Boundary(Exception):
    pass


def _collect_runs(walk, grammar_name, n_runs):
    out = []
    while len(out) < n_runs:
        segs = walk.step()
        if segs is None:
            raise _Boundary
        kind = segs[0][0]
        count = sum(c for _, c in segs)
        cont = "I" if grammar_name == "weighted" else kind
        while True:
            nxt = walk.peek()
            if nxt is None:
                raise _Boundary
            if nxt != cont:
                break
            count += sum(c for _, c in walk.step())
        out.append((kind, count, walk.matrix))
    return out


def trace_sample(cfg: ExperimentConfig, index: int) -> RatioTrace:
    """Exact area-ratio trace of the ``index``-th random point."""
    rng = sample_rng(cfg.seed, index)
    g = cfg.grammar
    resampled = 0
    while True:
        walk = Descent(g, RandomPoint(rng, bits=cfg.precision))
        try:
            runs = _collect_runs(walk, g.name, cfg.depth)
            break
        except _Boundary:  # pragma: no cover - probability zero
            resampled += 1
    records = []
    s = 0
    prev = Fraction(1)
    base = cfg.base
    for kind, count, m in runs:
        s += count
        r = m[2]
        rho = Fraction(r[0] * r[1] * r[2], base**s)
        records.append(TraceRecord(s, kind, count, tuple(r), rho, rho / prev))
        prev = rho
    return RatioTrace(index, records, resampled)


def _map(fn, items, workers):
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


class _Tracer:
    def __init__(self, cfg):
        self.cfg = cfg

    def __call__(self, i):
        return trace_sample(self.cfg, i)


def collect_traces(cfg: ExperimentConfig) -> list:
    return _map(_Tracer(cfg), range(cfg.samples), cfg.workers)


# -- exact per-trace checks ------------------------------------------------------

def am_gm_ok(trace: RatioTrace) -> bool:
    """prod(a_i) * n^n <= s_n^n at every n."""
    prod = 1
    for n, rec in enumerate(trace.records, 1):
        prod *= rec.a
        if prod * n**n > rec.s**n:
            return False
    return True


def r3_bound_ok(trace: RatioTrace, total: int) -> bool:
    """r3(n) <= a_n (m1+m2+m3) r3(n-1) along a weighted trace."""
    prev = 1
    for rec in trace.records:
        if rec.r_row[2] > rec.a * total * prev:
            return False
        prev = rec.r_row[2]
    return True


def rho_step_bound(a: int) -> Fraction:
    return Fraction(8 * a**3, 6**a)


def rho_step_ok(trace: RatioTrace) -> bool:
    """On the continuous map every type I run obeys rho_n/rho_{n-1} <= 8 a^3 / 6^a."""
    return all(rec.step <= rho_step_bound(rec.a) for rec in trace.records if rec.kind == "I")


def median(values):
    vs = sorted(values)
    if not vs:
        raise ValueError("median of nothing")
    n = len(vs)
    if n % 2:
        return vs[n // 2]
    return (vs[n // 2 - 1] + vs[n // 2]) / 2


def log10_fraction(q: Fraction) -> float:
    if q <= 0:
        return float("-inf")
    return math.log10(q.numerator) - math.log10(q.denominator)


# -- experiments -----------------------------------------------------------------

@dataclass
class RatioSummary:
    config: ExperimentConfig
    below: dict  # threshold -> fraction of samples with min rho below it
    median_min_rho: Fraction
    resampled: int
    am_gm_ok: bool
    r3_bound_ok: bool | None
    rho_step_ok: bool | None
    traces: list = field(repr=False, default_factory=list)

    def to_json(self):
        return {
            "config": self.config.to_json(),
            "below": {str(k): v for k, v in self.below.items()},
            "median_min_rho_log10": log10_fraction(self.median_min_rho),
            "resampled": self.resampled,
            "am_gm_ok": self.am_gm_ok,
            "r3_bound_ok": self.r3_bound_ok,
            "rho_step_ok": self.rho_step_ok,
        }


def run_ratio_experiment(cfg: ExperimentConfig, traces=None) -> RatioSummary:
    traces = collect_traces(cfg) if traces is None else traces
    mins = [t.min_rho for t in traces]
    below = {float(th): sum(m < th for m in mins) / len(mins) for th in THRESHOLDS}
    weighted_map = cfg.map == "weighted"
    return RatioSummary(
        config=cfg,
        below=below,
        median_min_rho=median(mins),
        resampled=sum(t.resampled for t in traces),
        am_gm_ok=all(am_gm_ok(t) for t in traces),
        r3_bound_ok=all(r3_bound_ok(t, cfg.base) for t in traces) if weighted_map else None,
        rho_step_ok=None if weighted_map else all(rho_step_ok(t) for t in traces),
        traces=traces,
    )


@dataclass
class SnSummary:
    checkpoints: tuple
    medians: dict  # n -> median of s_n / n
    values: dict = field(repr=False, default_factory=dict)

    def to_json(self):
        return {"checkpoints": list(self.checkpoints), "medians": {n: float(v) for n, v in self.medians.items()}}


def run_sn_over_n(cfg: ExperimentConfig, checkpoints=(20, 60), traces=None) -> SnSummary:
    if cfg.map != "weighted" or cfg.weights.m3 != 1:
        raise ValueError("s_n/n statistics need the weighted map with m3 = 1")
    if max(checkpoints) > cfg.depth:
        raise ValueError("checkpoints beyond the configured depth")
    traces = collect_traces(cfg) if traces is None else traces
    values = {n: [Fraction(t.records[n - 1].s, n) for t in traces] for n in checkpoints}
    return SnSummary(tuple(checkpoints), {n: median(v) for n, v in values.items()}, values)


@dataclass
class Type1Summary:
    checkpoints: tuple
    medians: dict  # n -> median max type I run within the first n runs
    fraction_at_most: dict  # n -> fraction of samples whose max run <= cutoff
    cutoff: int
    t_l_checked: int
    t_l_ok: bool
    t_l_worst_margin: Fraction  # smallest bound - ratio seen

    def to_json(self):
        return {
            "checkpoints": list(self.checkpoints),
            "medians": {n: float(v) for n, v in self.medians.items()},
            "fraction_at_most": {n: v for n, v in self.fraction_at_most.items()},
            "cutoff": self.cutoff,
            "t_l_checked": self.t_l_checked,
            "t_l_ok": self.t_l_ok,
            "t_l_worst_margin": str(self.t_l_worst_margin),
        }


def random_cells(grammar, count, max_depth, rng):
    """Farey cell matrices along uniformly random move paths."""
    cells = []
    for _ in range(count):
        depth = rng.randint(0, max_depth)
        m = M0.rows
        for _ in range(depth):
            m = mat_mul(m, grammar.farey[rng.choice(grammar.kinds)])
        cells.append(m)
    return cells


def continuous_t_l(rows, L):
    whole = triangle_area(rows)
    return 1 - triangle_area(continuous.type_run_child(rows, L)) / whole


def continuous_t_l_bound(L):
    return Fraction(8 * L**3 - 1, 8 * L**3)


def check_t_l_bounds(map_name, cells, max_L=12, w=None):
    """(checked, all_ok, worst margin) of the T_L area bounds over cells and L <= max_L."""
    checked, ok, worst = 0, True, None
    for rows in cells:
        for L in range(1, max_L + 1):
            if map_name == "continuous":
                ratio, bound = continuous_t_l(rows, L), continuous_t_l_bound(L)
            else:
                ratio, bound = weighted.t_l_region_ratio(rows, L, w)
            margin = bound - ratio
            worst = margin if worst is None else min(worst, margin)
            ok = ok and ratio <= bound
            checked += 1
    return checked, ok, worst


def run_type1_runs(cfg: ExperimentConfig, checkpoints=(10, 20, 40, 60), cutoff=3, t_l_cells=200, max_L=12, traces=None):
    if cfg.map != "continuous":
        raise ValueError("type I run statistics use the continuous map")
    if max(checkpoints) > cfg.depth:
        raise ValueError("checkpoints beyond the configured depth")
    traces = collect_traces(cfg) if traces is None else traces
    medians, frac = {}, {}
    for n in checkpoints:
        runs = [t.max_type1_block(n, "continuous") for t in traces]
        medians[n] = median([Fraction(r) for r in runs])
        frac[n] = sum(r <= cutoff for r in runs) / len(runs)
    rng = sample_rng(cfg.seed, 1 << 31)
    cells = random_cells(continuous.GRAMMAR, t_l_cells, 8, rng)
    checked, ok, worst = check_t_l_bounds("continuous", cells, max_L)
    return Type1Summary(tuple(checkpoints), medians, frac, cutoff, checked, ok, worst)


# -- partition failure -----------------------------------------------------------

@dataclass
class StageStats:
    stage: int
    particles: int
    survivors: int
    factor: float  # survivors / particles
    exact_mean: Fraction  # mean over particles of the exact surviving area fraction


@dataclass
class PartitionFailureReport:
    weights: weighted.Weights
    bound: Fraction
    stages: list
    surviving_fraction: float  # product of the per-stage factors

    def to_json(self):
        return {
            "weights": list(self.weights.m),
            "bound": str(self.bound),
            "surviving_fraction": self.surviving_fraction,
            "stages": [
                {
                    "stage": s.stage,
                    "particles": s.particles,
                    "survivors": s.survivors,
                    "factor": s.factor,
                    "exact_mean": float(s.exact_mean),
                }
                for s in self.stages
            ],
        }


def _shoelace(pts):
    (x1, y1), (x2, y2), (x3, y3) = pts
    return abs((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1)) / 2


def _strictly_inside(pt, tri):
    a, b, c = tri
    rows = ((a[0], b[0], c[0]), (a[1], b[1], c[1]), (1, 1, 1))
    return all(x > 0 for x in barycentric(pt, rows))


def _escapes(region, limits, level):
    """True if the lazy point falls in some limit triangle, False if in none."""
    tris = [t for t in limits.values() if _shoelace(t) > 0]
    while True:
        poly = region.plane_corners()
        for tri in tris:
            if all(_strictly_inside(p, tri) for p in poly):
                return True
        if all(polygons_disjoint(poly, tri) for tri in tris):
            return False
        region.refine(level)


def survival_exact(rows, w) -> Fraction:
    """Area fraction of the cell whose next run is finite."""
    whole = triangle_area(rows)
    lost = sum(_shoelace(t) for t in weighted.limit_triangles(rows, w).values())
    return 1 - lost / whole


def _next_cell(rows, region, w):
    g = weighted.weighted_grammar(w)
    walk = Descent(g, region, root=rows)
    if walk.step() is None:  # pragma: no cover - probability zero
        raise _Boundary
    while True:
        nxt = walk.peek()
        if nxt is None:  # pragma: no cover
            raise _Boundary
        if nxt != "I":
            return walk.matrix
        walk.step()


def run_partition_failure(weights, depth=10, samples=2000, seed=0, precision=64) -> PartitionFailureReport:
    """Sequential Monte Carlo estimate of the measure that keeps finite runs.

    Each stage draws a fresh uniform point in every particle's cell.  The
    point escapes when its next run is infinite, which happens exactly when it
    lies in one of the three limit triangles of the cell.  Survivors move on
    to the cell at the end of their next run; escaped particles are replaced by
    copies of survivors.
    """
    w = weights if isinstance(weights, weighted.Weights) else weighted.Weights(*weights)
    rng = sample_rng(seed, (1 << 32) - 1)
    s = w.m1 + w.m2
    bound = 1 / (1 + Fraction(1, s))
    cells = [M0.rows] * samples
    stages = []
    total = 1.0
    for stage in range(1, depth + 1):
        survivors = []
        exact = Fraction(0)
        for rows in cells:
            exact += survival_exact(rows, w)
            verts = [(Fraction(c[0], c[2]), Fraction(c[1], c[2])) for c in zip(*rows)]
            region = RandomPoint(rng, bits=precision, vertices=verts)
            if _escapes(region, weighted.limit_triangles(rows, w), stage):
                continue
            survivors.append(_next_cell(rows, region, w))
        factor = len(survivors) / len(cells)
        stages.append(StageStats(stage, len(cells), len(survivors), factor, exact / len(cells)))
        total *= factor
        if not survivors:
            break
        cells = survivors + [rng.choice(survivors) for _ in range(len(cells) - len(survivors))]
    return PartitionFailureReport(w, bound, stages, total)


# -- one-dimensional check -------------------------------------------------------

@dataclass
class SalemSummary:
    checkpoints: tuple
    medians: dict  # k -> median of length(bary)/length(farey) at depth k
    resampled: int

    def to_json(self):
        return {
            "checkpoints": list(self.checkpoints),
            "medians": {k: float(v) for k, v in self.medians.items()},
            "resampled": self.resampled,
        }


def run_salem_1d(samples=200, depth=30, seed=0, checkpoints=(10, 20, 30), bits=256) -> SalemSummary:
    if max(checkpoints) > depth:
        raise ValueError("checkpoints beyond depth")
    ratios = {k: [] for k in checkpoints}
    resampled = 0
    for i in range(samples):
        rng = sample_rng(seed, i)
        while True:
            x = Fraction(rng.getrandbits(bits), 1 << bits)
            tr = interval_trace(x, depth) if x != 0 else None
            if tr is not None and tr.boundary is None:
                break
            resampled += 1
        for k in checkpoints:
            ratios[k].append(tr.levels[k].ratio)
    return SalemSummary(tuple(checkpoints), {k: median(v) for k, v in ratios.items()}, resampled)


# -- export ----------------------------------------------------------------------

CSV_COLUMNS = ("sample_id", "depth", "s_n", "rho_num", "rho_den", "max_type1_run")


def write_csv(traces, path, grammar="weighted"):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(CSV_COLUMNS)
        for t in traces:
            for n, rec in enumerate(t.records, 1):
                out.writerow(
                    (t.sample_id, n, rec.s, rec.rho.numerator, rec.rho.denominator, t.max_type1_block(n, grammar))
                )
