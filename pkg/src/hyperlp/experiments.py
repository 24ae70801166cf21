"""Experiment drivers producing deterministic CSV tables.

Every driver is a pure function of its configuration and master seed.  Trial
``i`` uses seed ``master_seed + i``, so a trial's result does not depend on how
many trials run or in what order.
"""
import csv
import io
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from hyperlp import __version__
from hyperlp.classify import (DiscriminantWeights, accuracy_summary, estimate_covariance,
                              fisher_weights, geometric_weights, score_and_classify)
from hyperlp.errors import InvalidArgumentError, SingularMatrixError, WalkExtinctionError
from hyperlp.meanfield import ce_gap_closed_form, ce_trajectory, reduced_recurrence
from hyperlp.model import HsbmParams, sample_hsbm
from hyperlp.walks import (SeedSpec, ce_landing_profile, clique_expand, completion_index,
                           partial_clique_expand, tensor_landing_profile)

log = logging.getLogger(__name__)

METHODS = ("ce", "tensor", "cet")
DISCRIMINANTS = ("geometric", "fisher")
INITS = ("single", "uniform")

#: Extinct single-seed walks are redrawn this many times before the trial fails.
MAX_RESAMPLES = 10
#: Calibration trials for CET gap weights use seeds offset by this amount.
CALIBRATION_SEED_OFFSET = 1_000_003


def fmt(x):
    return "%.17g" % x


@dataclass
class ExperimentConfig:
    kind: str
    n: int = 100
    d: int = 3
    p: float = 0.4
    q: float = 0.1
    pmin: float = 0.05
    pmax: float = 0.95
    qmin: float = 0.05
    qmax: float = 0.95
    grid_step: float = 0.05
    steps: int = 6
    trials: int = 20
    seed: int = 0
    method: str = "ce"
    cet_order: int = None
    discriminant: str = "geometric"
    init: str = "single"
    calibration_trials: int = 5
    ridge_scale: float = 1e-8
    jobs: int = 1

    def __post_init__(self):
        if self.steps < 1:
            raise InvalidArgumentError("steps must be >= 1")
        if self.trials < 1:
            raise InvalidArgumentError("trials must be >= 1")
        if self.method not in METHODS:
            raise InvalidArgumentError(f"method must be one of {METHODS}")
        if self.discriminant not in DISCRIMINANTS:
            raise InvalidArgumentError(f"discriminant must be one of {DISCRIMINANTS}")
        if self.init not in INITS:
            raise InvalidArgumentError(f"init must be one of {INITS}")
        if self.cet_order is None:
            self.cet_order = max(2, self.d - 1)
        if self.grid_step <= 0:
            raise InvalidArgumentError("grid step must be positive")

    @property
    def params(self):
        return HsbmParams(self.n, self.d, self.p, self.q)

    def metadata(self):
        return json.dumps(asdict(self), sort_keys=True)


def param_grid(pmin, pmax, qmin, qmax, step):
    """All ``(p, q)`` on the grid with ``0 < q < p <= 1``; other points are logged and skipped."""
    def axis(lo, hi):
        count = int(math.floor((hi - lo) / step + 1e-9)) + 1
        return [round(lo + i * step, 12) for i in range(max(count, 0))]

    points = []
    for p in axis(pmin, pmax):
        for q in axis(qmin, qmax):
            if 0 < q < p <= 1:
                points.append((p, q))
            else:
                log.debug("skipping grid point p=%g q=%g (needs 0 < q < p <= 1)", p, q)
    return points


def write_table(out, header, rows, meta):
    """Write ``# meta`` then a CSV table to a path or a text stream."""
    buf = io.StringIO()
    buf.write(f"# hyperlp {__version__} {meta}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, float) else v for v in row])
    text = buf.getvalue()
    if hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


# ---------------------------------------------------------------- mean-field


def tensor_gap_sequence(params, K):
    """Mean-field tensor gap ``w_0..w_K`` (graph case for ``d = 2``)."""
    if params.d == 2:
        return ce_gap_closed_form(params, np.arange(K + 1))
    return reduced_recurrence(params, K).w


def run_meanfield_sweep(n, d, grid, K=20):
    """Gap sequences for both walks at each grid point.

    Returns ``(rows, norms)``: rows ``(method, p, q, k, w)`` for ``k = 1..K`` and
    a dict ``(method, p, q) -> sqrt(sum_k w_k^2)``.
    """
    rows, norms = [], {}
    steps = np.arange(1, K + 1)
    for p, q in grid:
        params = HsbmParams(n, d, p, q)
        gaps = {"ce": ce_gap_closed_form(params, steps),
                "tensor": tensor_gap_sequence(params, K)[1:]}
        for method, w in gaps.items():
            rows.extend((method, p, q, int(k), float(v)) for k, v in zip(steps, w))
            norms[(method, p, q)] = float(np.sqrt(np.sum(w ** 2)))
    return rows, norms


def meanfield_sweep_table(config):
    grid = param_grid(config.pmin, config.pmax, config.qmin, config.qmax, config.grid_step)
    rows, norms = run_meanfield_sweep(config.n, config.d, grid, config.steps)
    # summary rows reuse the k column with the literal "l2"
    out = [r for r in rows]
    out += [(m, p, q, "l2", v) for (m, p, q), v in norms.items()]
    return ["method", "p", "q", "k", "w"], out


def run_phase_diagram(n, d, grid, K=50, lag=10):
    """``(p, q, w_K, w_K / w_{K-lag})`` per grid point from the reduced recurrence."""
    rows = []
    back = max(K - lag, 0)
    for p, q in grid:
        w = tensor_gap_sequence(HsbmParams(n, d, p, q), K)
        rows.append((p, q, float(w[K]), float(w[K] / w[back])))
    return rows


def phase_table(config):
    grid = param_grid(config.pmin, config.pmax, config.qmin, config.qmax, config.grid_step)
    K = config.steps
    back = max(K - 10, 0)
    rows = run_phase_diagram(config.n, config.d, grid, K)
    return ["p", "q", f"w{K}", f"w{K}_over_w{back}"], rows


# ------------------------------------------------------------ concentration


@dataclass(frozen=True)
class ConcentrationRow:
    trial: int
    method: str
    k: int
    quantity: str
    empirical: float
    meanfield: float

    @property
    def rel_err(self):
        if self.meanfield == 0:
            return abs(self.empirical)
        return abs(self.empirical - self.meanfield) / abs(self.meanfield)


def block_centroids(profile, labels):
    """Empirical centroids ``a^(k)``, ``b^(k)`` (means over each block)."""
    lab = labels.array
    n = lab.size
    a = profile.x[:, lab == 0].sum(axis=1) * 2.0 / n
    b = profile.x[:, lab == 1].sum(axis=1) * 2.0 / n
    return a, b


def run_concentration_check(params, K, trials, master_seed, methods=("ce", "tensor")):
    """Empirical vs mean-field centroids under the uniform block-0 start."""
    if params.degenerate:
        raise InvalidArgumentError("degenerate parameters refused")
    rows = []
    traj = ce_trajectory(params, K)
    tensor_w = tensor_gap_sequence(params, K)
    uniform = SeedSpec("uniform")
    for t in range(trials):
        h = sample_hsbm(params, master_seed + t)
        if "ce" in methods:
            prof = ce_landing_profile(clique_expand(h), uniform, K, h.labels)
            a, b = block_centroids(prof, h.labels)
            for k in range(K + 1):
                rows.append(ConcentrationRow(t, "ce", k, "a", float(a[k]), float(traj.a[k])))
                rows.append(ConcentrationRow(t, "ce", k, "b", float(b[k]), float(traj.b[k])))
        if "tensor" in methods:
            prof = tensor_landing_profile(h, uniform, K)
            a, b = block_centroids(prof, h.labels)
            for k in range(K + 1):
                rows.append(ConcentrationRow(t, "tensor", k, "gap", float(a[k] - b[k]),
                                             float(tensor_w[k])))
    return rows


def growth_conditions(params):
    """Growth ratios ``n^(d-1) q^2 / log n`` (CE) and ``n q^2 / log n`` (tensor).

    Concentration needs both to grow with ``n``; they are reported, not enforced.
    """
    n, d, q = params.n, params.d, params.q
    return {"ce_ratio": n ** (d - 1) * q ** 2 / math.log(n), "tensor_ratio": n * q ** 2 / math.log(n)}


def concentration_table(config):
    params = config.params
    rows = run_concentration_check(params, config.steps, config.trials, config.seed)
    header = ["trial", "method", "k", "quantity", "empirical", "meanfield", "rel_err"]
    return header, [(r.trial, r.method, r.k, r.quantity, r.empirical, r.meanfield, r.rel_err)
                    for r in rows]


def trials_within(rows, method, bound):
    """Number of trials whose every row for ``method`` has ``rel_err <= bound``."""
    worst = {}
    for r in rows:
        if r.method == method:
            worst[r.trial] = max(worst.get(r.trial, 0.0), r.rel_err)
    return sum(1 for v in worst.values() if v <= bound), len(worst)


# ---------------------------------------------------------------- clustering


@dataclass(frozen=True)
class TrialRecord:
    trial: int
    method: str
    discriminant: str
    accuracy: float
    resamples: int
    status: str = "ok"


@dataclass
class ClusterResult:
    records: list
    mean: float
    stderr: float
    failed: int
    weight_source: str
    gap: np.ndarray = field(repr=False, default=None)


def _walk_builder(h, method, cet_order):
    """Return ``walk(seed_spec, K, rng) -> LandingProfile`` for one hypergraph."""
    if method == "ce":
        g = clique_expand(h)
        return lambda spec, K, rng: ce_landing_profile(g, spec, K, h.labels, rng)
    target = h if method == "tensor" else partial_clique_expand(h, cet_order)
    index = completion_index(target)
    return lambda spec, K, rng: tensor_landing_profile(target, spec, K, rng, index=index)


def _run_walk(walk, init, K, rng):
    spec = SeedSpec(init)
    resamples = 0
    while True:
        try:
            return walk(spec, K, rng), resamples
        except WalkExtinctionError:
            if init != "single" or resamples >= MAX_RESAMPLES:
                raise
            resamples += 1


def empirical_gap(params, method, init, K, seeds, cet_order):
    """Mean over calibration hypergraphs of the empirical centroid gap ``a - b``."""
    gaps = []
    for s in seeds:
        h = sample_hsbm(params, s)
        walk = _walk_builder(h, method, cet_order)
        rng = np.random.default_rng([s, 1])
        try:
            prof, _ = _run_walk(walk, init, K, rng)
        except WalkExtinctionError:
            continue
        a, b = block_centroids(prof, h.labels)
        gaps.append(a - b)
    if not gaps:
        raise InvalidArgumentError("every calibration walk went extinct")
    return np.mean(gaps, axis=0)


def gap_weights_for(config):
    """Gap sequence ``w_0..w_K`` used for geometric weights, and its provenance."""
    params, K = config.params, config.steps
    if config.method == "ce":
        return ce_gap_closed_form(params, np.arange(K + 1)), "meanfield-ce"
    if config.method == "tensor":
        return tensor_gap_sequence(params, K), "meanfield-tensor"
    seeds = [config.seed + CALIBRATION_SEED_OFFSET + j for j in range(config.calibration_trials)]
    return (empirical_gap(params, "cet", config.init, K, seeds, config.cet_order),
            "empirical-gap")


def run_trial(config, trial, gap):
    """One clustering trial; returns a :class:`TrialRecord`."""
    params, K = config.params, config.steps
    seed = config.seed + trial
    h = sample_hsbm(params, seed)
    walk = _walk_builder(h, config.method, config.cet_order)
    rng = np.random.default_rng([seed, 1])
    try:
        prof, resamples = _run_walk(walk, config.init, K, rng)
    except WalkExtinctionError:
        return TrialRecord(trial, config.method, config.discriminant, float("nan"),
                           MAX_RESAMPLES, "extinct")
    weights = geometric_weights(gap, 1, K)
    if config.discriminant == "fisher":
        try:
            cov = estimate_covariance(prof, h.labels, 1, K, config.ridge_scale)
            weights = fisher_weights(weights, cov)
        except SingularMatrixError:
            return TrialRecord(trial, config.method, config.discriminant, float("nan"),
                               resamples, "singular")
    result = score_and_classify(prof, weights, h.labels)
    return TrialRecord(trial, config.method, config.discriminant, result.accuracy, resamples)


def _run_trial_star(args):
    return run_trial(*args)


def run_cluster_benchmark(config):
    """Clustering accuracy (median-threshold rule) over ``config.trials`` trials."""
    if config.method == "cet" and not 2 <= config.cet_order < config.d:
        raise InvalidArgumentError(f"cet order must be in [2, {config.d})")
    params = config.params
    if params.degenerate:
        raise InvalidArgumentError("degenerate parameters refused")
    gap, source = gap_weights_for(config)
    if not np.any(gap[1:]):
        raise InvalidArgumentError("gap weights are all zero")
    jobs = [(config, t, gap) for t in range(config.trials)]
    if config.jobs > 1:
        with ProcessPoolExecutor(config.jobs) as pool:
            records = list(pool.map(_run_trial_star, jobs))
    else:
        records = [run_trial(*j) for j in jobs]
    ok = [r.accuracy for r in records if r.status == "ok"]
    failed = len(records) - len(ok)
    if ok:
        s = accuracy_summary(ok)
        mean, stderr = s.mean, s.stderr
    else:
        mean = stderr = float("nan")
    return ClusterResult(records, mean, stderr, failed, source, gap)


def cluster_table(config):
    res = run_cluster_benchmark(config)
    header = ["kind", "trial", "method", "discriminant", "accuracy", "stderr", "resamples", "status"]
    rows = [("trial", r.trial, r.method, r.discriminant, r.accuracy, "", r.resamples, r.status)
            for r in res.records]
    ok = len(res.records) - res.failed
    rows.append(("summary", ok, config.method, config.discriminant, res.mean, res.stderr,
                 sum(r.resamples for r in res.records), f"failed={res.failed}"))
    return header, rows, res.weight_source
