"""Deterministic mean-field recurrences for landing-probability centroids.

Clique-expansion walks reduce to a 2x2 symmetric update with a closed-form
gap.  Tensor walks reduce from a ``2**(d-1)``-state block-pattern recurrence to
a pair of ``(d-1)``-dimensional recurrences (``beta`` for the centroid
difference, ``zeta`` for the total mass).  Both forms are implemented so one
can check the other.

Only ratios are observable, so recurrences renormalize each step unless asked
not to.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from hyperlp.errors import (InvalidArgumentError, InvalidStateError, ResourceLimitError,
                            SingularParameterError, SolverError)
from hyperlp.model import expected_block_degrees

#: Largest d accepted by :func:`fullstate_recurrence` by default.
DEFAULT_MAX_FULLSTATE_D = 16


@dataclass(frozen=True, eq=False)
class MeanFieldTrajectory:
    """Clique-expansion centroids ``a`` (seed block), ``b`` and gap ``w = a - b``."""

    a: np.ndarray
    b: np.ndarray
    w: np.ndarray

    @property
    def K(self):
        return self.a.size - 1


@dataclass(frozen=True, eq=False)
class ReducedState:
    beta: np.ndarray  # (K+1, d-1)
    zeta: np.ndarray  # (K+1, d-1)
    w: np.ndarray

    @property
    def K(self):
        return self.w.size - 1


@dataclass(frozen=True, eq=False)
class FullMeanFieldState:
    """Block-pattern masses ``Y[k, j]``.

    Bit ``d-2-i`` of ``j`` is the block of tuple position ``i``, so the last
    (most recently visited) vertex is the least significant bit and ``j = 0``
    is the all-block-0 pattern.  ``Y`` has dtype object (Fractions) when built
    with ``exact=True``.
    """

    d: int
    Y: np.ndarray

    @property
    def K(self):
        return self.Y.shape[0] - 1


@dataclass(frozen=True)
class PhaseConstants:
    """Conjectured large-d constants; not proven."""

    R: float
    C1: float
    C2: float
    C3: float


def _ce_update(params):
    p, q, d = params.p, params.q, params.d
    denom = p + (2 ** (d - 1) - 1) * q
    if denom == 0:
        raise InvalidArgumentError("p = q = 0 leaves the clique-expansion update undefined")
    same = (p + (2 ** (d - 2) - 1) * q) / denom
    cross = 2 ** (d - 2) * q / denom
    return same, cross


def ce_trajectory(params, K):
    """Iterate the 2x2 clique-expansion centroid update from ``(2/n, 0)``.

    The gap is propagated through the antisymmetric part of the update
    (factor ``same - cross``) instead of subtracting ``a - b``, which would lose
    all precision once the gap falls below ``1e-16 / n``.
    """
    if K < 0:
        raise InvalidArgumentError("K must be >= 0")
    same, cross = _ce_update(params)
    n = params.n
    a = np.empty(K + 1)
    b = np.empty(K + 1)
    w = np.empty(K + 1)
    a[0], b[0], w[0] = 2.0 / n, 0.0, 2.0 / n
    shrink = same - cross
    for k in range(1, K + 1):
        a[k] = same * a[k - 1] + cross * b[k - 1]
        b[k] = cross * a[k - 1] + same * b[k - 1]
        w[k] = shrink * w[k - 1]
    return MeanFieldTrajectory(a, b, w)


def ce_gap_closed_form(params, k):
    """``(2/n) * ((p - q) / (p + (2^(d-1) - 1) q))**k``; ``k`` may be an array."""
    p, q, d = params.p, params.q, params.d
    rate = (p - q) / (p + (2 ** (d - 1) - 1) * q)
    return 2.0 / params.n * np.power(rate, k)


def ce_unnormalized_trajectory(params, K, renormalize=True):
    """Expected block masses ``(M, N)`` of the clique-expansion path counts.

    Starts from ``(1, 0)`` and multiplies by the expected block-degree matrix.
    With ``renormalize`` each step is divided by ``M + N`` (ratios preserved).
    """
    deg = expected_block_degrees(params)
    M = np.empty(K + 1)
    N = np.empty(K + 1)
    M[0], N[0] = 1.0, 0.0
    for k in range(1, K + 1):
        m = deg.d00 * M[k - 1] + deg.d10 * N[k - 1]
        nn = deg.d01 * M[k - 1] + deg.d11 * N[k - 1]
        if renormalize:
            s = m + nn
            m, nn = m / s, nn / s
        M[k], N[k] = m, nn
    return M, N


def _reduced_matrices(params):
    d, p, q, n = params.d, params.p, params.q, params.n
    m = d - 1
    beta = np.zeros((m, m))
    beta[np.arange(1, m), np.arange(m - 1)] = q
    beta[:, -1] += p - q
    zeta = beta.copy()
    zeta[0, 0] += 2 * q
    return n / 2 * beta, n / 2 * zeta


def reduced_recurrence(params, K, renormalize=True):
    """Iterate the ``(d-1)``-state recurrences for ``beta`` and ``zeta``.

    Both start at ``4/n**2``; ``w[k] = (2/n) beta_1(k) / zeta_1(k)``.  With
    ``renormalize`` both vectors are divided by the same factor each step.
    """
    if params.d < 3:
        raise InvalidArgumentError("reduced recurrence needs d >= 3")
    if K < 0:
        raise InvalidArgumentError("K must be >= 0")
    B, Z = _reduced_matrices(params)
    m = params.d - 1
    n = params.n
    beta = np.empty((K + 1, m))
    zeta = np.empty((K + 1, m))
    beta[0] = zeta[0] = 4.0 / n ** 2
    for k in range(1, K + 1):
        bk = B @ beta[k - 1]
        zk = Z @ zeta[k - 1]
        if renormalize:
            s = zk.max()
            bk, zk = bk / s, zk / s
        beta[k], zeta[k] = bk, zk
    w = 2.0 / n * beta[:, 0] / zeta[:, 0]
    return ReducedState(beta, zeta, w)


def fullstate_recurrence(params, K, exact=False, renormalize=True,
                         max_d=DEFAULT_MAX_FULLSTATE_D):
    """Iterate the ``2**(d-1)``-state block-pattern recurrence.

    Pattern ``j`` is fed by the two patterns whose trailing ``d-2`` bits equal
    the leading ``d-2`` bits of ``j``; the coefficient is ``n p / 2`` when the
    full ``d``-block pattern is constant and ``n q / 2`` otherwise.  ``exact``
    runs in rational arithmetic (from the decimal form of ``p``, ``q``) so the
    signed contractions downstream do not cancel catastrophically; exact runs
    are never renormalized.
    """
    d, n = params.d, params.n
    if d < 3:
        raise InvalidArgumentError("full-state recurrence needs d >= 3")
    if d > max_d:
        raise ResourceLimitError("full-state patterns", 2 ** (d - 1), 2 ** (max_d - 1))
    r = d - 1
    size = 2 ** r
    j = np.arange(size)
    from_zero = j >> 1                    # predecessor whose first block is 0
    from_one = from_zero | (1 << (r - 1))  # ... first block is 1
    if exact:
        p, q = Fraction(repr(params.p)), Fraction(repr(params.q))
        half = Fraction(n, 2)
        Y = np.empty((K + 1, size), dtype=object)
        Y[0] = Fraction(0)
        Y[0, 0] = Fraction(2, n) ** r
    else:
        p, q, half = params.p, params.q, n / 2
        Y = np.zeros((K + 1, size))
        Y[0, 0] = (2.0 / n) ** r
    c0 = np.array([q] * size, dtype=object if exact else float)
    c1 = c0.copy()
    c0[0] = p          # 0 followed by all-zero pattern
    c1[size - 1] = p   # 1 followed by all-one pattern
    for k in range(1, K + 1):
        prev = Y[k - 1]
        nxt = half * (c0 * prev[from_zero] + c1 * prev[from_one])
        if renormalize and not exact:
            nxt = nxt / nxt.sum()
        Y[k] = nxt
    return FullMeanFieldState(d, Y)


def gap_from_fullstate(state, n):
    """Centroid gap ``(2/n) * sum_j s_j Y_j / sum_j Y_j`` with ``s_j = +1`` iff the
    last-position block is 0."""
    Y = state.Y
    sign = np.where(np.arange(Y.shape[1]) & 1, -1, 1)
    w = np.empty(Y.shape[0])
    for k in range(Y.shape[0]):
        total = Y[k].sum()
        if total == 0:
            raise InvalidStateError(f"zero total mass at step {k}")
        signed = (Y[k] * sign).sum()
        if Y.dtype == object:
            w[k] = float(Fraction(2, n) * signed / total)
        else:
            w[k] = 2.0 / n * signed / total
    return w


def d3_closed_form(params, k):
    """Explicit ``(beta_1(k), zeta_1(k))`` for ``d = 3`` with ``R = (p - q) / q``.

    Scaled so that ``k = 0`` gives ``4/n**2`` for both.
    """
    if params.d != 3:
        raise InvalidArgumentError("closed form only for d = 3")
    p, q, n = params.p, params.q, params.n
    if not p > q > 0:
        raise InvalidArgumentError("closed form needs p > q > 0")
    R = (p - q) / q
    k = np.asarray(k, dtype=float)
    T = np.sqrt(R ** 2 + 4)
    zeta = ((T - R - 2) / (2 * T) * (n * q / 4 * (R - T + 2)) ** k
            + (T + R + 2) / (2 * T) * (n * q / 4 * (R + T + 2)) ** k)
    S = np.sqrt(R) * np.sqrt(R + 4)
    c = np.sqrt(R / (R + 4))
    beta = (0.5 * (1 - c) * (n * q / 4 * (R - S)) ** k
            + 0.5 * (1 + c) * (n * q / 4 * (R + S)) ** k)
    scale = 4.0 / n ** 2
    return beta * scale, zeta * scale


def characteristic_polynomial(params, which):
    """Monic coefficients (highest degree first) in units of ``n q / 2``."""
    d, p, q = params.d, params.p, params.q
    if d < 3:
        raise InvalidArgumentError("characteristic polynomials need d >= 3")
    if not p > q > 0:
        raise InvalidArgumentError("characteristic polynomials need p > q > 0")
    R = (p - q) / q
    m = d - 1
    if which == "beta":
        # t^m - R (t^{m-1} + ... + 1)
        return np.array([1.0] + [-R] * m)
    if which == "zeta":
        # t^m - (2 + R) t^{m-1} + R (t^{m-2} + ... + 1)
        return np.array([1.0, -(2 + R)] + [R] * (m - 1))
    raise InvalidArgumentError("which must be 'beta' or 'zeta'")


def companion_matrix(coeffs):
    """Frobenius companion matrix of a monic polynomial (highest degree first)."""
    coeffs = np.asarray(coeffs, dtype=float)
    m = coeffs.size - 1
    C = np.zeros((m, m))
    C[1:, :-1] = np.eye(m - 1)
    C[:, -1] = -coeffs[:0:-1]
    return C


def characteristic_roots(params, which, tol=1e-8):
    """All ``d - 1`` roots of the beta or zeta characteristic polynomial."""
    coeffs = characteristic_polynomial(params, which)
    roots = np.linalg.eigvals(companion_matrix(coeffs))
    # scale-aware residual: |P(t)| / sum |c_i| |t|^i
    powers = np.abs(roots)[:, None] ** np.arange(coeffs.size - 1, -1, -1)
    scale = powers @ np.abs(coeffs)
    residual = float(np.max(np.abs(np.polyval(coeffs, roots)) / scale))
    if not residual <= tol:
        raise SolverError("characteristic root solve did not converge", residual)
    return roots


def conjectured_constants(params):
    """Large-d constants ``C1, C2, C3`` (conjectured, singular at ``p = 2q``)."""
    p, q = params.p, params.q
    if p == 2 * q:
        raise SingularParameterError("constants are singular at p = 2q")
    if q == 0:
        raise SingularParameterError("R = (p - q) / q undefined for q = 0")
    return PhaseConstants(R=(p - q) / q, C1=-q / (p - 2 * q), C2=(p - q) / (p - 2 * q),
                          C3=(p - q) / p)


def large_d_approximation(params, k):
    """Asymptotic gap ``(2/n) C3 p^k / (C1 (2q)^k + C2 p^k)``; a large-k form only."""
    c = conjectured_constants(params)
    p, q = params.p, params.q
    k = np.asarray(k, dtype=float)
    # divide through by p^k to avoid overflow at large k
    ratio = (2 * q / p) ** k
    return 2.0 / params.n * c.C3 / (c.C1 * ratio + c.C2)


@dataclass(frozen=True)
class LowerBoundReport:
    """Worst margins of the tensor-gap lower bounds over steps ``1..K``.

    ``step_margin``: min of ``w_k - rho w_{k-1}``; ``ratio_margin``: min of
    ``w_k / w_{k-1} - rho``; ``telescoped_margin``: min of ``w_k - (2/n) rho^k``;
    ``first_step_margin``: ``w_1 - rho w_0``; ``rho = (p - q) / (p + q)``.
    """

    step_margin: float
    ratio_margin: float
    telescoped_margin: float
    first_step_margin: float
    worst_step: int


def gap_lower_bound_check(params, K):
    """Check the one-step and telescoped lower bounds on the tensor gap."""
    p, q, n = params.p, params.q, params.n
    if params.d < 3 or not p > q > 0:
        raise InvalidArgumentError("lower bound check needs d >= 3 and p > q > 0")
    if K < 1:
        raise InvalidArgumentError("K must be >= 1")
    w = reduced_recurrence(params, K).w
    rho = (p - q) / (p + q)
    steps = np.arange(1, K + 1)
    step = w[1:] - rho * w[:-1]
    ratio = w[1:] / w[:-1] - rho
    tele = w[1:] - 2.0 / n * rho ** steps
    return LowerBoundReport(
        step_margin=float(step.min()),
        ratio_margin=float(ratio.min()),
        telescoped_margin=float(tele.min()),
        first_step_margin=float(step[0]),
        worst_step=int(steps[np.argmin(step)]),
    )
