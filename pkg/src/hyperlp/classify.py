"""Linear discriminants over landing-probability vectors.

A vertex's score is ``sum_k gamma_k x_v^(k)``; the ``n/2`` highest-scoring
vertices are assigned to the seed block.
"""
from dataclasses import dataclass
from math import exp, factorial

import numpy as np

from hyperlp.errors import InvalidArgumentError, SingularMatrixError

WEIGHT_KINDS = ("geometric", "ppr", "hpr", "fisher")


@dataclass(frozen=True, eq=False)
class DiscriminantWeights:
    """``gamma[i]`` weights step ``k_min + i``."""

    gamma: np.ndarray
    k_min: int
    kind: str

    def __post_init__(self):
        g = np.array(self.gamma, dtype=float).ravel()
        if g.size == 0:
            raise InvalidArgumentError("empty weight vector")
        if not np.all(np.isfinite(g)):
            raise InvalidArgumentError("weights must be finite")
        if self.kind not in WEIGHT_KINDS:
            raise InvalidArgumentError(f"kind must be one of {WEIGHT_KINDS}")
        object.__setattr__(self, "gamma", g)

    @property
    def k_max(self):
        return self.k_min + self.gamma.size - 1


@dataclass(frozen=True, eq=False)
class CovarianceEstimate:
    k_min: int
    k_max: int
    matrix: np.ndarray
    ridge: float


@dataclass(frozen=True, eq=False)
class ClassificationResult:
    scores: np.ndarray
    predicted: np.ndarray
    accuracy: float


@dataclass(frozen=True)
class AccuracySummary:
    mean: float
    stderr: float
    trials: int
    single_trial: bool


def _steps(k_min, k_max):
    if k_max is None or k_max < k_min or k_min < 0:
        raise InvalidArgumentError(f"empty or invalid step range {k_min}..{k_max}")
    return np.arange(k_min, k_max + 1)


def geometric_weights(gaps, k_min=1, k_max=None):
    """Centroid-difference weights ``gamma_k = w_k`` taken from a gap sequence.

    ``gaps[k]`` is the gap after ``k`` steps (e.g. ``ReducedState.w``).
    """
    gaps = np.asarray(gaps, dtype=float)
    if k_max is None:
        k_max = gaps.size - 1
    steps = _steps(k_min, k_max)
    if k_max >= gaps.size:
        raise InvalidArgumentError(f"gap sequence has no step {k_max}")
    return DiscriminantWeights(gaps[steps], k_min, "geometric")


def schedule_weights(kind, param, k_min=0, k_max=None):
    """PPR ``(1 - a) a^k`` or heat-kernel ``e^-h h^k / k!`` weights (no tail renormalization)."""
    steps = _steps(k_min, k_max)
    if kind == "ppr":
        if not 0 < param < 1:
            raise InvalidArgumentError("PPR needs 0 < alpha < 1")
        gamma = (1 - param) * param ** steps.astype(float)
    elif kind == "hpr":
        if not param > 0:
            raise InvalidArgumentError("HPR needs h > 0")
        gamma = np.array([exp(-param) * param ** int(k) / factorial(int(k)) for k in steps])
    else:
        raise InvalidArgumentError("kind must be 'ppr' or 'hpr'")
    return DiscriminantWeights(gamma, k_min, kind)


def estimate_covariance(profile, labels=None, k_min=1, k_max=None, ridge_scale=1e-8):
    """Covariance of per-vertex LP vectors over steps ``k_min..k_max``.

    With ``labels`` the scatter is pooled around each block's own mean;
    without, around the global mean.  Both divide by ``n``.  The ridge is
    ``ridge_scale * trace / dim``, or ``ridge_scale`` itself when the trace is 0.
    A rank-deficient result is returned as is; only an all-zero matrix (no
    scatter and no ridge) is rejected here, the rest surface in the solve.
    """
    k_max = profile.K if k_max is None else k_max
    X = profile.features(k_min, k_max)
    n, m = X.shape
    if n < 2:
        raise InvalidArgumentError("need at least two vertices")
    if labels is None:
        centered = X - X.mean(axis=0)
    else:
        lab = labels.array if hasattr(labels, "array") else np.asarray(labels)
        centered = X.copy()
        for c in (0, 1):
            mask = lab == c
            if mask.any():
                centered[mask] -= X[mask].mean(axis=0)
    cov = centered.T @ centered / n
    cov = (cov + cov.T) / 2
    tr = float(np.trace(cov))
    ridge = ridge_scale * (tr / m if tr > 0 else 1.0)
    cov = cov + ridge * np.eye(m)
    if ridge == 0 and not np.any(cov):
        raise SingularMatrixError("zero scatter and no ridge: covariance is singular")
    return CovarianceEstimate(k_min, k_max, cov, ridge)


def fisher_weights(geometric, cov):
    """``Sigma^{-1} gamma`` via a Cholesky solve."""
    if (geometric.k_min, geometric.k_max) != (cov.k_min, cov.k_max):
        raise InvalidArgumentError("weights and covariance cover different steps")
    try:
        L = np.linalg.cholesky(cov.matrix)
        z = np.linalg.solve(L, geometric.gamma)
        gamma = np.linalg.solve(L.T, z)
    except np.linalg.LinAlgError as exc:
        raise SingularMatrixError(f"covariance solve failed: {exc}") from exc
    if not np.all(np.isfinite(gamma)):
        raise SingularMatrixError("covariance solve produced non-finite weights")
    return DiscriminantWeights(gamma, geometric.k_min, "fisher")


def score(profile, weights):
    if weights.k_max > profile.K:
        raise InvalidArgumentError(f"weights reach step {weights.k_max} but profile stops at {profile.K}")
    if not np.any(weights.gamma):
        raise InvalidArgumentError("all-zero weights cannot separate blocks")
    return profile.features(weights.k_min, weights.k_max) @ weights.gamma


def classify_scores(scores, truth):
    """Top ``n/2`` scores -> block 0 (ties to the lower index); orientation-free accuracy."""
    scores = np.asarray(scores, dtype=float)
    n = scores.size
    truth = truth.array if hasattr(truth, "array") else np.asarray(truth)
    order = np.lexsort((np.arange(n), -scores))
    predicted = np.ones(n, dtype=np.int8)
    predicted[order[: n // 2]] = 0
    agree = float(np.mean(predicted == truth))
    return ClassificationResult(scores, predicted, max(agree, 1.0 - agree))


def score_and_classify(profile, weights, truth):
    return classify_scores(score(profile, weights), truth)


def accuracy_summary(accuracies):
    acc = np.asarray(accuracies, dtype=float)
    if acc.size == 0:
        raise InvalidArgumentError("no trials to summarize")
    if acc.size == 1:
        return AccuracySummary(float(acc[0]), 0.0, 1, True)
    return AccuracySummary(float(acc.mean()), float(acc.std(ddof=1) / np.sqrt(acc.size)),
                           int(acc.size), False)
