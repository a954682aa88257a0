"""Gaussian-process preference model over normalized signal coordinates.

Latent utilities at the queried points carry a zero-mean GP prior with an
isotropic RBF kernel. A pairwise choice with self-reported confidence c
enters through a probit likelihood

    p(y | f, c) = Phi( y * (f(xA) - f(xB)) / sqrt(2*lambda^2 + u(c)^2) )

where u maps confidence to a noise scale (low confidence -> large noise)
and lambda is a small baseline jitter for residual actuator/response
variability. The posterior over the latent utilities is a Laplace
approximation centered at the Newton MAP; the log likelihood is concave in
f, so the prior makes the mode unique.

All covariance algebra goes through the factored form

    B = I + Q K Q^T,   Q = S^{1/2} D,

with D the (records x points) difference matrix and S the diagonal of
per-record curvature weights, so W -> 0 and rank-deficient W are handled
without ever inverting K or W explicitly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy.linalg import cho_factor, cho_solve, solve_triangular
from scipy.special import log_ndtr, ndtr

from .signal import NormalizedPoint

#: Confidence -> comparison-noise scale (utility units), calibrated so that
#: "very sure" answers are near-deterministic and "very unsure" ones nearly
#: uninformative.
DEFAULT_CONFIDENCE_NOISE: dict[int, float] = {1: 9.0, 2: 3.35, 3: 1.7, 4: 0.66, 5: 0.01}

_LOG_2PI = float(np.log(2.0 * np.pi))


class FitConvergenceError(RuntimeError):
    """Newton MAP search terminated without reaching the gradient tolerance."""

    def __init__(self, grad_norm: float, iterations: int):
        self.grad_norm = grad_norm
        self.iterations = iterations
        super().__init__(
            f"MAP fit did not converge: |grad|_inf={grad_norm:.3e} after {iterations} iterations"
        )


@dataclass(frozen=True)
class KernelConfig:
    """Isotropic RBF kernel k(x,x') = s^2 exp(-|x-x'|^2 / (2 l^2))."""

    signal_variance: float = 1.0
    lengthscale: float = 0.25
    gram_jitter: float = 1e-6

    def __post_init__(self):
        if self.signal_variance <= 0:
            raise ValueError("signal_variance must be positive")
        if self.lengthscale <= 0:
            raise ValueError("lengthscale must be positive")
        if self.gram_jitter < 0:
            raise ValueError("gram_jitter must be non-negative")


@dataclass(frozen=True)
class LikelihoodConfig:
    """Probit noise model: effective scale sqrt(2*baseline^2 + u(c)^2)."""

    baseline_jitter: float = 0.1
    confidence_noise: Mapping[int, float] = field(
        default_factory=lambda: dict(DEFAULT_CONFIDENCE_NOISE)
    )

    def __post_init__(self):
        if self.baseline_jitter <= 0:
            raise ValueError("baseline_jitter must be positive")
        table = {int(k): float(v) for k, v in dict(self.confidence_noise).items()}
        if sorted(table) != [1, 2, 3, 4, 5]:
            raise ValueError("confidence_noise must map levels 1..5")
        values = [table[c] for c in (1, 2, 3, 4, 5)]
        if values[-1] <= 0 or any(a <= b for a, b in zip(values, values[1:])):
            raise ValueError("confidence_noise must be strictly decreasing and positive")
        object.__setattr__(self, "confidence_noise", table)


@dataclass(frozen=True)
class ComparisonRecord:
    """One answered comparison: choice +1 means point_a was preferred."""

    point_a: NormalizedPoint
    point_b: NormalizedPoint
    choice: int
    confidence: int
    acquisition_score: float | None = None  # information gain logged at query time, nats
    timestamp: float | None = None

    def __post_init__(self):
        if self.choice not in (+1, -1):
            raise ValueError(f"choice must be +1 or -1, got {self.choice!r}")
        if self.confidence not in (1, 2, 3, 4, 5):
            raise ValueError(f"confidence must be in 1..5, got {self.confidence!r}")


def effective_noise(record: ComparisonRecord, cfg: LikelihoodConfig) -> float:
    """Probit denominator sqrt(2*lambda^2 + u(c)^2) for one record."""
    u = cfg.confidence_noise[record.confidence]
    return float(np.sqrt(2.0 * cfg.baseline_jitter**2 + u * u))


def kernel(x, y, cfg: KernelConfig) -> float:
    """RBF covariance between two points (NormalizedPoint or array-like)."""
    xa = x.array if isinstance(x, NormalizedPoint) else np.asarray(x, dtype=float)
    ya = y.array if isinstance(y, NormalizedPoint) else np.asarray(y, dtype=float)
    sq = float(np.sum((xa - ya) ** 2))
    return cfg.signal_variance * float(np.exp(-sq / (2.0 * cfg.lengthscale**2)))


def kernel_matrix(xs, ys, cfg: KernelConfig) -> np.ndarray:
    """Cross-covariance matrix between two point sets (no jitter)."""
    a = _as_coord_array(xs)
    b = _as_coord_array(ys)
    sq = np.sum((a[:, None, :] - b[None, :, :]) ** 2, axis=2)
    return cfg.signal_variance * np.exp(-sq / (2.0 * cfg.lengthscale**2))


def gram(points: Sequence[NormalizedPoint], cfg: KernelConfig) -> np.ndarray:
    """Prior covariance over a point list with jitter on the diagonal.

    Raises np.linalg.LinAlgError if the jittered matrix still fails a
    Cholesky factorization (severe ill-conditioning).
    """
    if len(points) == 0:
        raise ValueError("gram requires at least one point")
    K = kernel_matrix(points, points, cfg)
    K[np.diag_indices_from(K)] += cfg.gram_jitter
    np.linalg.cholesky(K)
    return K


def _as_coord_array(points) -> np.ndarray:
    if isinstance(points, np.ndarray):
        return np.atleast_2d(np.asarray(points, dtype=float))
    if isinstance(points, NormalizedPoint):
        return points.array[None, :]
    rows = [p.array if isinstance(p, NormalizedPoint) else np.asarray(p, dtype=float) for p in points]
    return np.asarray(rows, dtype=float).reshape(len(rows), -1)


def _log_phi(z: np.ndarray) -> np.ndarray:
    # log_ndtr switches to an erfc-scaled tail expansion internally, so very
    # negative arguments stay finite instead of underflowing to -inf.
    return log_ndtr(z)


def _inverse_mills(z: np.ndarray) -> np.ndarray:
    """phi(z)/Phi(z), computed in log space so the negative tail is stable."""
    log_pdf = -0.5 * z * z - 0.5 * _LOG_2PI
    return np.exp(log_pdf - log_ndtr(z))


def index_dataset(
    dataset: Sequence[ComparisonRecord],
    points: Sequence[NormalizedPoint] | None = None,
) -> tuple[list[NormalizedPoint], np.ndarray, np.ndarray]:
    """Unique queried points (first-appearance order) plus per-record indices.

    Points deduplicate by exact coordinate match; an explicit `points` list
    may seed or extend the ordering (used to probe the posterior at extra
    locations).
    """
    ordered: list[NormalizedPoint] = []
    lookup: dict[tuple, int] = {}

    def intern(p: NormalizedPoint) -> int:
        idx = lookup.get(p.coords)
        if idx is None:
            idx = len(ordered)
            lookup[p.coords] = idx
            ordered.append(p)
        return idx

    for p in points or ():
        intern(p)
    a_idx = np.empty(len(dataset), dtype=int)
    b_idx = np.empty(len(dataset), dtype=int)
    for i, rec in enumerate(dataset):
        a_idx[i] = intern(rec.point_a)
        b_idx[i] = intern(rec.point_b)
    return ordered, a_idx, b_idx


def log_posterior(
    f: np.ndarray,
    dataset: Sequence[ComparisonRecord],
    kernel_cfg: KernelConfig,
    likelihood_cfg: LikelihoodConfig,
    gram_matrix: np.ndarray | None = None,
    points: Sequence[NormalizedPoint] | None = None,
) -> tuple[float, np.ndarray, np.ndarray]:
    """Value, gradient and Hessian of the unnormalized log posterior.

    f is indexed against the unique-point list of `index_dataset(dataset,
    points)`; the Hessian is -(K^-1 + W) with W the PSD likelihood curvature.
    """
    ordered, a_idx, b_idx = index_dataset(dataset, points)
    f = np.asarray(f, dtype=float)
    if f.shape != (len(ordered),):
        raise ValueError(f"f has shape {f.shape}, expected ({len(ordered)},)")
    if len(ordered) == 0:
        return 0.0, np.zeros(0), np.zeros((0, 0))

    K = gram(ordered, kernel_cfg) if gram_matrix is None else gram_matrix
    chol = cho_factor(K, lower=True)
    alpha = cho_solve(chol, f)
    K_inv = cho_solve(chol, np.eye(len(ordered)))

    value_like, grad_like, W = _likelihood_terms(f, a_idx, b_idx, dataset, likelihood_cfg)
    value = value_like - 0.5 * float(f @ alpha)
    grad = grad_like - alpha
    hessian = -(K_inv + W)
    return value, grad, hessian


def _likelihood_terms(f, a_idx, b_idx, dataset, likelihood_cfg):
    """Sum of log Phi terms with its gradient and curvature matrix W."""
    n = len(f)
    t = len(dataset)
    if t == 0:
        return 0.0, np.zeros(n), np.zeros((n, n))
    y = np.array([rec.choice for rec in dataset], dtype=float)
    sigma = np.array([effective_noise(rec, likelihood_cfg) for rec in dataset])
    z = y * (f[a_idx] - f[b_idx]) / sigma
    value = float(np.sum(_log_phi(z)))
    r = _inverse_mills(z)
    coef = y * r / sigma
    grad = np.bincount(a_idx, weights=coef, minlength=n) - np.bincount(
        b_idx, weights=coef, minlength=n
    )
    w = r * (r + z) / sigma**2  # -(d^2/dz^2) log Phi, scaled; always >= 0
    D = np.zeros((t, n))
    D[np.arange(t), a_idx] = 1.0
    D[np.arange(t), b_idx] -= 1.0
    W = D.T @ (w[:, None] * D)
    return value, grad, W


@dataclass
class MapResult:
    """Newton MAP output: utilities over the unique-point list."""

    points: list[NormalizedPoint]
    utilities: np.ndarray
    converged: bool
    iterations: int
    grad_norm: float


def fit_map(
    dataset: Sequence[ComparisonRecord],
    kernel_cfg: KernelConfig,
    likelihood_cfg: LikelihoodConfig,
    points: Sequence[NormalizedPoint] | None = None,
    start: np.ndarray | None = None,
    tol: float = 1e-8,
    max_iter: int = 100,
) -> MapResult:
    """Damped Newton ascent of the log posterior from f = 0 (or `start`).

    The probit log likelihood is concave, so with the Gaussian prior the
    mode is unique; a halving line search keeps every step an ascent even
    when a near-deterministic confidence level makes the likelihood almost a
    step function. Non-convergence is reported through the result flags,
    never silently accepted downstream.
    """
    ordered, a_idx, b_idx = index_dataset(dataset, points)
    n = len(ordered)
    if n == 0:
        return MapResult(points=[], utilities=np.zeros(0), converged=True, iterations=0, grad_norm=0.0)

    K = gram(ordered, kernel_cfg)
    chol = cho_factor(K, lower=True)
    f = np.zeros(n) if start is None else np.asarray(start, dtype=float).copy()
    if f.shape != (n,):
        raise ValueError(f"start has shape {f.shape}, expected ({n},)")

    def objective(fv):
        value_like, grad_like, _ = _likelihood_terms(fv, a_idx, b_idx, dataset, likelihood_cfg)
        alpha = cho_solve(chol, fv)
        return value_like - 0.5 * float(fv @ alpha), grad_like - alpha

    value, grad = objective(f)
    grad_norm = float(np.max(np.abs(grad))) if n else 0.0
    iterations = 0
    for iterations in range(1, max_iter + 1):
        if grad_norm < tol:
            break
        _, _, W = _likelihood_terms(f, a_idx, b_idx, dataset, likelihood_cfg)
        delta = _solve_regularized(K, W, grad)
        step = 1.0
        improved = False
        for _ in range(60):
            candidate = f + step * delta
            cand_value, cand_grad = objective(candidate)
            cand_norm = float(np.max(np.abs(cand_grad)))
            # Near the mode the ascent per step (~|grad|^2) drops below float
            # resolution of the objective; a strict gradient decrease still
            # certifies progress there.
            flat = cand_value >= value - 1e-12 * (1.0 + abs(value))
            if cand_value > value or (flat and cand_norm < grad_norm):
                f, value, grad, grad_norm = candidate, cand_value, cand_grad, cand_norm
                improved = True
                break
            step *= 0.5
        if not improved:
            break  # line search stalled; report via flags
    converged = grad_norm < tol
    return MapResult(
        points=ordered, utilities=f, converged=converged, iterations=iterations, grad_norm=grad_norm
    )


def _solve_regularized(K: np.ndarray, W: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Solve (K^-1 + W) delta = g through the factored form.

    (K^-1 + W)^-1 = K - (QK)^T B^-1 (QK) with W = Q^T Q and B = I + Q K Q^T,
    evaluated with an eigenvalue square root of W so rank deficiency and
    W = 0 are fine.
    """
    n = len(g)
    if n == 0:
        return g.copy()
    if not np.any(W):
        return K @ g
    evals, evecs = np.linalg.eigh(W)
    keep = evals > 1e-14 * max(evals[-1], 1.0)
    Q = (np.sqrt(evals[keep])[:, None]) * evecs[:, keep].T
    QK = Q @ K
    B = np.eye(Q.shape[0]) + QK @ Q.T
    chol_B = cho_factor(B, lower=True)
    Kg = K @ g
    return Kg - QK.T @ cho_solve(chol_B, Q @ Kg)


@dataclass
class PreferencePosterior:
    """Laplace posterior over the queried points plus prediction machinery.

    laplace_covariance is (K^-1 + W)^-1 at the MAP; predictions at new
    points condition on it through the shared factored solver state.
    """

    points: list[NormalizedPoint]
    map_utilities: np.ndarray
    laplace_covariance: np.ndarray
    kernel_config: KernelConfig
    likelihood_config: LikelihoodConfig
    dataset: list[ComparisonRecord]
    _K: np.ndarray = field(repr=False, default=None)
    _chol_K: tuple = field(repr=False, default=None)
    _alpha: np.ndarray = field(repr=False, default=None)
    _Q: np.ndarray = field(repr=False, default=None)
    _chol_B: tuple = field(repr=False, default=None)

    @property
    def num_points(self) -> int:
        return len(self.points)

    def to_json_dict(self) -> dict:
        """Compact form: covariance is recomputed on load, not stored."""
        return {
            "points": [list(p.coords) for p in self.points],
            "map_utilities": [float(v) for v in self.map_utilities],
            "kernel": {
                "signal_variance": self.kernel_config.signal_variance,
                "lengthscale": self.kernel_config.lengthscale,
                "gram_jitter": self.kernel_config.gram_jitter,
            },
            "likelihood": {
                "baseline_jitter": self.likelihood_config.baseline_jitter,
                "confidence_noise": {
                    str(c): v for c, v in self.likelihood_config.confidence_noise.items()
                },
            },
            "dataset": [
                {
                    "a": list(rec.point_a.coords),
                    "b": list(rec.point_b.coords),
                    "choice": rec.choice,
                    "confidence": rec.confidence,
                    "acquisition_score": rec.acquisition_score,
                    "timestamp": rec.timestamp,
                }
                for rec in self.dataset
            ],
        }

    @classmethod
    def from_json_dict(cls, data) -> "PreferencePosterior":
        kernel_cfg = KernelConfig(**data["kernel"])
        likelihood_cfg = LikelihoodConfig(
            baseline_jitter=data["likelihood"]["baseline_jitter"],
            confidence_noise={
                int(c): v for c, v in data["likelihood"]["confidence_noise"].items()
            },
        )
        points = [NormalizedPoint(tuple(c)) for c in data["points"]]
        dataset = [
            ComparisonRecord(
                point_a=NormalizedPoint(tuple(rec["a"])),
                point_b=NormalizedPoint(tuple(rec["b"])),
                choice=rec["choice"],
                confidence=rec["confidence"],
                acquisition_score=rec.get("acquisition_score"),
                timestamp=rec.get("timestamp"),
            )
            for rec in data["dataset"]
        ]
        f = np.asarray(data["map_utilities"], dtype=float)
        result = MapResult(points=points, utilities=f, converged=True, iterations=0, grad_norm=0.0)
        return laplace(result, dataset, kernel_cfg, likelihood_cfg)


def laplace(
    map_result: MapResult,
    dataset: Sequence[ComparisonRecord],
    kernel_cfg: KernelConfig,
    likelihood_cfg: LikelihoodConfig,
) -> PreferencePosterior:
    """Gaussian approximation N(f_hat, (K^-1 + W)^-1) around a converged MAP."""
    if not map_result.converged:
        raise FitConvergenceError(map_result.grad_norm, map_result.iterations)
    points = map_result.points
    f = map_result.utilities
    n = len(points)
    if n == 0:
        return PreferencePosterior(
            points=[],
            map_utilities=np.zeros(0),
            laplace_covariance=np.zeros((0, 0)),
            kernel_config=kernel_cfg,
            likelihood_config=likelihood_cfg,
            dataset=list(dataset),
            _K=np.zeros((0, 0)),
            _chol_K=None,
            _alpha=np.zeros(0),
            _Q=np.zeros((0, 0)),
            _chol_B=None,
        )

    K = gram(points, kernel_cfg)
    chol_K = cho_factor(K, lower=True)
    alpha = cho_solve(chol_K, f)

    _, a_idx, b_idx = index_dataset(dataset, points)
    t = len(dataset)
    if t:
        y = np.array([rec.choice for rec in dataset], dtype=float)
        sigma = np.array([effective_noise(rec, likelihood_cfg) for rec in dataset])
        z = y * (f[a_idx] - f[b_idx]) / sigma
        r = _inverse_mills(z)
        w = r * (r + z) / sigma**2
        D = np.zeros((t, n))
        D[np.arange(t), a_idx] = 1.0
        D[np.arange(t), b_idx] -= 1.0
        Q = np.sqrt(w)[:, None] * D
    else:
        Q = np.zeros((0, n))

    if Q.shape[0]:
        B = np.eye(Q.shape[0]) + Q @ K @ Q.T
        chol_B = cho_factor(B, lower=True)
        R = solve_triangular(chol_B[0], Q @ K, lower=True)
        cov = K - R.T @ R
    else:
        chol_B = None
        cov = K.copy()
    cov = 0.5 * (cov + cov.T)  # scrub rounding asymmetry

    return PreferencePosterior(
        points=list(points),
        map_utilities=f.copy(),
        laplace_covariance=cov,
        kernel_config=kernel_cfg,
        likelihood_config=likelihood_cfg,
        dataset=list(dataset),
        _K=K,
        _chol_K=chol_K,
        _alpha=alpha,
        _Q=Q,
        _chol_B=chol_B,
    )


def fit_posterior(
    dataset: Sequence[ComparisonRecord],
    kernel_cfg: KernelConfig | None = None,
    likelihood_cfg: LikelihoodConfig | None = None,
    points: Sequence[NormalizedPoint] | None = None,
) -> PreferencePosterior:
    """MAP + Laplace in one call with default configs."""
    kernel_cfg = kernel_cfg or KernelConfig()
    likelihood_cfg = likelihood_cfg or LikelihoodConfig()
    result = fit_map(dataset, kernel_cfg, likelihood_cfg, points=points)
    return laplace(result, dataset, kernel_cfg, likelihood_cfg)


def posterior_mean(post: PreferencePosterior, xs) -> np.ndarray:
    """Predictive mean k(x,.)^T K^-1 f_hat at one or many points."""
    X = _as_coord_array(xs)
    if post.num_points == 0:
        return np.zeros(X.shape[0])
    k_cross = kernel_matrix(post.points, X, post.kernel_config)
    return k_cross.T @ post._alpha


def posterior_cov(post: PreferencePosterior, xs) -> np.ndarray:
    """Full predictive covariance matrix over a point set.

    Uses cov(x,x') = k(x,x') - (Q k_x)^T B^-1 (Q k_x'), which reduces to the
    prior when there is no data and never forms K^-1 or W^-1.
    """
    X = _as_coord_array(xs)
    K_xx = kernel_matrix(X, X, post.kernel_config)
    if post.num_points == 0 or post._chol_B is None:
        return K_xx
    k_cross = kernel_matrix(post.points, X, post.kernel_config)
    R = solve_triangular(post._chol_B[0], post._Q @ k_cross, lower=True)
    return K_xx - R.T @ R


def predict(post: PreferencePosterior, x) -> tuple[float, float]:
    """Predictive mean and variance of the latent utility at one point."""
    mean = float(posterior_mean(post, x)[0])
    var = float(posterior_cov(post, x)[0, 0])
    return mean, var


def predict_pair(post: PreferencePosterior, x_a, x_b) -> tuple[float, float]:
    """Gaussian stats (m, v) of the utility gap f(xA) - f(xB)."""
    means = posterior_mean(post, [x_a, x_b])
    cov = posterior_cov(post, [x_a, x_b])
    m = float(means[0] - means[1])
    v = float(cov[0, 0] + cov[1, 1] - 2.0 * cov[0, 1])
    if v < 0.0:
        if v < -1e-8:
            warnings.warn(f"pair variance clamped from {v:.3e} to 0", RuntimeWarning)
        v = 0.0
    return m, v
