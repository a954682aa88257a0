"""Active query selection over the normalized signal space.

Each round samples a fresh candidate set, scores every unordered pair under
the chosen strategy, and asks the next comparison at the argmax. The default
strategy maximizes the 1D information gain of the binary answer

    IG = h(Phi(m / sqrt(v + s_nom^2))) - E_z[ h(Phi((m + sqrt(v) z) / s_nom)) ]

with (m, v) the Gaussian stats of the utility gap, h binary entropy in nats,
and the expectation over z ~ N(0,1) done by Gauss-Hermite quadrature. A
fixed nominal noise s_nom stands in for the unknown confidence of the future
answer. EUBO (expected utility of the better of the two points) is available
as a greedier alternative, and "random" as a baseline.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import entr, ndtr

from . import prefmodel
from .prefmodel import PreferencePosterior
from .signal import NormalizedPoint

#: Look-ahead noise scale when the future answer's confidence is unknown;
#: matches the mid-table confidence noise u(3).
DEFAULT_NOMINAL_NOISE = 1.7


@dataclass(frozen=True)
class AcquisitionConfig:
    nominal_noise: float = DEFAULT_NOMINAL_NOISE
    candidate_count: int = 64
    quadrature_order: int = 32
    strategy: str = "info_gain"
    rng_seed: int | None = None

    def __post_init__(self):
        if self.nominal_noise <= 0:
            raise ValueError("nominal_noise must be positive")
        if self.candidate_count < 2:
            raise ValueError("candidate_count must be at least 2")
        if self.quadrature_order < 8:
            raise ValueError("quadrature_order must be at least 8")
        if self.strategy not in ("info_gain", "eubo", "random"):
            raise ValueError(f"unknown strategy {self.strategy!r}")


@dataclass(frozen=True)
class QueryPair:
    """Selected comparison: pair_stats is (m, v) of f(xA) - f(xB)."""

    point_a: NormalizedPoint
    point_b: NormalizedPoint
    score: float
    pair_stats: tuple[float, float]
    strategy: str = "info_gain"


def choice_probability(m, v, nominal_noise: float) -> np.ndarray | float:
    """P(answer prefers A) = Phi(m / sqrt(v + s_nom^2)), elementwise."""
    if nominal_noise <= 0:
        raise ValueError("nominal_noise must be positive")
    m = np.asarray(m, dtype=float)
    v = np.asarray(v, dtype=float)
    p = ndtr(m / np.sqrt(v + nominal_noise**2))
    return float(p) if p.ndim == 0 else p


@lru_cache(maxsize=8)
def _hermite_rule(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for E_{z~N(0,1)}[g(z)] = sum w_j g(z_j)."""
    t, w = np.polynomial.hermite.hermgauss(order)
    return np.sqrt(2.0) * t, w / np.sqrt(np.pi)


def _binary_entropy(p: np.ndarray) -> np.ndarray:
    # entr(p) = -p log p with the p=0 limit handled, so endpoints cost 0 nats.
    return entr(p) + entr(1.0 - p)


def information_gain(m, v, nominal_noise: float = DEFAULT_NOMINAL_NOISE, order: int = 32):
    """Expected entropy drop (nats) from observing the comparison outcome.

    Vectorized over matching-shape m and v. Quadrature noise can leave
    results a hair below zero; anything above -1e-9 clamps to exact 0, and
    larger negatives pass through untouched so a real defect stays visible.
    """
    m = np.asarray(m, dtype=float)
    v = np.asarray(v, dtype=float)
    scalar = m.ndim == 0 and v.ndim == 0
    m, v = np.broadcast_arrays(np.atleast_1d(m), np.atleast_1d(v))
    if np.any(v < 0):
        raise ValueError("gap variance must be non-negative")

    marginal = _binary_entropy(ndtr(m / np.sqrt(v + nominal_noise**2)))
    z, w = _hermite_rule(order)
    p_cond = ndtr((m[..., None] + np.sqrt(v)[..., None] * z) / nominal_noise)
    conditional = _binary_entropy(p_cond) @ w
    ig = marginal - conditional
    ig = np.where((ig < 0.0) & (ig > -1e-9), 0.0, ig)
    return float(ig[0]) if scalar else ig


def eubo_score(post: PreferencePosterior, x_a, x_b) -> float:
    """E[max(f(xA), f(xB))] under the joint Gaussian posterior."""
    means = prefmodel.posterior_mean(post, [x_a, x_b])
    mu_a, mu_b = float(means[0]), float(means[1])
    m, v = prefmodel.predict_pair(post, x_a, x_b)
    return _eubo_from_stats(mu_a, mu_b, m, v)


def _eubo_from_stats(mu_a, mu_b, m, v):
    if v <= 0.0:
        return max(mu_a, mu_b)
    s = np.sqrt(v)
    t = m / s
    pdf = np.exp(-0.5 * t * t) / np.sqrt(2.0 * np.pi)
    return float(mu_a * ndtr(t) + mu_b * ndtr(-t) + s * pdf)


def sample_candidates(rng: np.random.Generator, n: int, dim: int = 4) -> list[NormalizedPoint]:
    """n uniform draws from the unit hypercube."""
    if n < 2:
        raise ValueError("need at least 2 candidates")
    coords = rng.uniform(0.0, 1.0, size=(n, dim))
    return [NormalizedPoint(tuple(row)) for row in coords]


def select_pair(
    post: PreferencePosterior,
    config: AcquisitionConfig,
    rng: np.random.Generator | None = None,
    candidates: list[NormalizedPoint] | None = None,
) -> QueryPair:
    """Score all unordered candidate pairs and return the argmax.

    Pair stats for every pair come from one batch posterior covariance over
    the candidate set, so the 2016 default pairs cost a single (64, 64)
    solve. Ties break to the first pair in (i, j), i < j row-major order.
    """
    if rng is None:
        rng = np.random.default_rng(config.rng_seed)
    if candidates is None:
        candidates = sample_candidates(rng, config.candidate_count)
    mean = prefmodel.posterior_mean(post, candidates)
    cov = prefmodel.posterior_cov(post, candidates)
    i_idx, j_idx = np.triu_indices(len(candidates), k=1)
    m = mean[i_idx] - mean[j_idx]
    v = cov[i_idx, i_idx] + cov[j_idx, j_idx] - 2.0 * cov[i_idx, j_idx]
    v = np.maximum(v, 0.0)

    if config.strategy == "info_gain":
        scores = information_gain(m, v, config.nominal_noise, config.quadrature_order)
    elif config.strategy == "eubo":
        scores = np.array(
            [
                _eubo_from_stats(mean[i], mean[j], m[k], v[k])
                for k, (i, j) in enumerate(zip(i_idx, j_idx))
            ]
        )
    else:  # random baseline still goes through the same argmax plumbing
        scores = rng.uniform(0.0, 1.0, size=len(i_idx))

    best = int(np.argmax(scores))
    return QueryPair(
        point_a=candidates[i_idx[best]],
        point_b=candidates[j_idx[best]],
        score=float(scores[best]),
        pair_stats=(float(m[best]), float(v[best])),
        strategy=config.strategy,
    )


def recommend(
    post: PreferencePosterior,
    budget_points: int = 8192,
    rng: np.random.Generator | None = None,
) -> tuple[NormalizedPoint, float]:
    """Point with the highest posterior mean over a dense pool.

    The pool is budget_points uniform draws plus every queried point, so the
    answer can never be worse than the best stimulus actually rendered. Pool
    search keeps this derivative-free and deterministic under the seed.
    """
    if post.num_points == 0:
        raise ValueError("cannot recommend from an empty posterior")
    if rng is None:
        rng = np.random.default_rng(0)
    dim = len(post.points[0].coords)
    pool = rng.uniform(0.0, 1.0, size=(budget_points, dim))
    pool = np.vstack([pool, np.asarray([p.array for p in post.points])])
    means = prefmodel.posterior_mean(post, pool)
    best = int(np.argmax(means))
    return NormalizedPoint(tuple(pool[best])), float(means[best])
