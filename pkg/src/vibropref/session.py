"""Full study protocol: active learning, validation round, favorites.

A session walks forward through four phases. During `learning` it serves one
pending comparison at a time and refits the posterior after each answer.
When the comparison budget is spent it produces the posterior-mean
recommendation plus a validation set (three anchored comparisons and a
repeat with sides flipped, for catching position bias), then collects up to
three favorite configurations found by manual adjustment, each annotated
with its posterior-mean percentile.

Everything random is drawn from streams derived off the recorded seed, and
timestamps come from an injectable clock, so a fixed seed plus a scripted
set of responses reproduces the saved log byte for byte.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from . import acquisition, prefmodel, seeding, simulator
from .acquisition import AcquisitionConfig, QueryPair
from .prefmodel import ComparisonRecord, KernelConfig, LikelihoodConfig
from .signal import NormalizedPoint, SignalParams, denormalize, normalize

SCHEMA_VERSION = 1

PHASES = ("learning", "validation", "adjustment", "complete")
VALIDATION_TAGS = ("anchor_easy", "anchor_medium", "global_tradeoff", "consistency_check")

#: Minimum normalized separation among validation stimuli: 5% of the
#: hypercube diagonal (= 2 in 4-D).
VALIDATION_MIN_DISTANCE = 0.1
MAX_REJECTION_ATTEMPTS = 10_000


class ProtocolError(RuntimeError):
    """Operation not allowed in the session's current phase/order."""


class SchemaVersionError(RuntimeError):
    """Saved log has a schema_version this code does not understand."""


class SessionLogError(RuntimeError):
    """Saved log is truncated or otherwise unparseable."""


@dataclass(frozen=True)
class SessionConfig:
    budget: int = 40
    seed: int | None = None  # None -> time-based, resolved and recorded at creation
    duration_ms: float = 3000.0
    kernel: KernelConfig = field(default_factory=KernelConfig)
    likelihood: LikelihoodConfig = field(default_factory=LikelihoodConfig)
    acquisition: AcquisitionConfig = field(default_factory=AcquisitionConfig)

    def __post_init__(self):
        if self.budget < 1:
            raise ValueError("budget must be at least 1")
        if self.duration_ms <= 0:
            raise ValueError("duration_ms must be positive")


@dataclass
class PendingQuery:
    round: int  # 1-based
    pair: QueryPair
    info_gain: float
    swapped: bool  # True -> engine point_b is presented as side "A"


@dataclass
class ValidationPair:
    tag: str
    idx_a: int  # indices into ValidationSet.points
    idx_b: int
    swapped: bool


@dataclass
class ValidationSet:
    """Seven stimuli and four ordered comparisons over them.

    points[0] is x_best; the remaining six come from rejection sampling
    under the pairwise distance floor. x_worst / x_mid are the min and the
    4th-of-7 posterior means.
    """

    points: list[NormalizedPoint]
    means: list[float]
    worst_index: int
    mid_index: int
    pairs: list[ValidationPair]

    def to_json_dict(self) -> dict:
        return {
            "points": [list(p.coords) for p in self.points],
            "means": [float(m) for m in self.means],
            "worst_index": self.worst_index,
            "mid_index": self.mid_index,
            "pairs": [
                {"tag": p.tag, "idx_a": p.idx_a, "idx_b": p.idx_b, "swapped": p.swapped}
                for p in self.pairs
            ],
        }

    @classmethod
    def from_json_dict(cls, data) -> "ValidationSet":
        return cls(
            points=[NormalizedPoint(tuple(c)) for c in data["points"]],
            means=[float(m) for m in data["means"]],
            worst_index=int(data["worst_index"]),
            mid_index=int(data["mid_index"]),
            pairs=[
                ValidationPair(p["tag"], int(p["idx_a"]), int(p["idx_b"]), bool(p["swapped"]))
                for p in data["pairs"]
            ],
        )


def generate_validation_set(
    post: prefmodel.PreferencePosterior,
    rng: np.random.Generator,
    x_best: NormalizedPoint | None = None,
) -> ValidationSet:
    """Build the 7-point validation set around the current best signal.

    Six extra stimuli are rejection-sampled uniformly with all pairwise
    distances (including to x_best) at least VALIDATION_MIN_DISTANCE, so
    every comparison is between clearly distinct sensations. Presentation
    sides are drawn here too; the consistency_check repeat is forced to the
    opposite side of anchor_medium.
    """
    if post.num_points == 0:
        raise ValueError("validation set needs a fitted posterior")
    if x_best is None:
        x_best, _ = acquisition.recommend(post, rng=rng)

    dim = len(x_best.coords)
    accepted = [x_best.array]
    attempts = 0
    while len(accepted) < 7:
        if attempts >= MAX_REJECTION_ATTEMPTS:
            raise RuntimeError(
                f"could not place 6 separated validation points in "
                f"{MAX_REJECTION_ATTEMPTS} attempts (threshold {VALIDATION_MIN_DISTANCE})"
            )
        attempts += 1
        candidate = rng.uniform(0.0, 1.0, size=dim)
        dists = [float(np.linalg.norm(candidate - a)) for a in accepted]
        if min(dists) >= VALIDATION_MIN_DISTANCE:
            accepted.append(candidate)

    points = [x_best] + [NormalizedPoint(tuple(a)) for a in accepted[1:]]
    means = prefmodel.posterior_mean(post, points)
    worst_index = int(np.argmin(means))
    mid_index = int(np.argsort(means)[3])

    coords = np.asarray([p.array for p in points])
    best_product, best_pair = -1.0, (0, 1)
    for i in range(7):
        for j in range(i + 1, 7):
            product = float(np.linalg.norm(coords[i] - coords[j])) * abs(means[i] - means[j])
            if product > best_product:
                best_product, best_pair = product, (i, j)

    swaps = [bool(rng.integers(0, 2)) for _ in range(3)]
    pairs = [
        ValidationPair("anchor_easy", 0, worst_index, swaps[0]),
        ValidationPair("anchor_medium", 0, mid_index, swaps[1]),
        ValidationPair("global_tradeoff", best_pair[0], best_pair[1], swaps[2]),
        ValidationPair("consistency_check", 0, mid_index, not swaps[1]),
    ]
    return ValidationSet(
        points=points,
        means=[float(m) for m in means],
        worst_index=worst_index,
        mid_index=mid_index,
        pairs=pairs,
    )


class Session:
    """Mutable protocol state. Construct through create_session/load_session."""

    def __init__(self, config: SessionConfig, seed: int, clock=time.time):
        self.config = config
        self.seed = int(seed)
        self.session_id = f"vp-{self.seed & ((1 << 64) - 1):016x}"
        self.clock = clock
        self.phase = "learning"
        self.dataset: list[ComparisonRecord] = []
        self.round_log: list[dict] = []
        self.posterior = prefmodel.fit_posterior([], config.kernel, config.likelihood)
        self.pending: PendingQuery | None = None
        self.recommendation: dict | None = None
        self.validation: ValidationSet | None = None
        self.validation_responses: list[dict] = []
        self.consistency_ok: bool | None = None
        self.favorites: list[dict] = []
        self.annotations: dict = {}

    # -- learning phase -------------------------------------------------

    def _select_next(self):
        rnd = len(self.dataset) + 1
        rng = seeding.derived_rng(self.seed, seeding.STREAM_CANDIDATES, rnd)
        pair = acquisition.select_pair(self.posterior, self.config.acquisition, rng=rng)
        m, v = pair.pair_stats
        if self.config.acquisition.strategy == "info_gain":
            ig = pair.score
        else:
            ig = float(
                acquisition.information_gain(
                    m,
                    v,
                    self.config.acquisition.nominal_noise,
                    self.config.acquisition.quadrature_order,
                )
            )
        swap_rng = seeding.derived_rng(self.seed, seeding.STREAM_PRESENTATION, rnd)
        self.pending = PendingQuery(
            round=rnd, pair=pair, info_gain=float(ig), swapped=bool(swap_rng.integers(0, 2))
        )

    def submit_response(self, y: int, c: int, round: int | None = None) -> "Session":
        """Record an answer to the pending comparison. y=+1 prefers point_a.

        Passing the round index guards against double submission: a stale
        retry of an already-answered round is rejected instead of silently
        consuming the next pending query.
        """
        if self.phase != "learning":
            raise ProtocolError(f"cannot submit a comparison in phase {self.phase!r}")
        if self.pending is None:
            raise ProtocolError("no pending query")
        if round is not None and round != self.pending.round:
            raise ProtocolError(
                f"response targets round {round}, pending round is {self.pending.round}"
            )
        if y not in (+1, -1):
            raise ValueError(f"choice must be +1 or -1, got {y!r}")
        if c not in (1, 2, 3, 4, 5):
            raise ValueError(f"confidence must be in 1..5, got {c!r}")

        pending = self.pending
        record = ComparisonRecord(
            point_a=pending.pair.point_a,
            point_b=pending.pair.point_b,
            choice=y,
            confidence=c,
            acquisition_score=pending.info_gain,
            timestamp=float(self.clock()),
        )
        # Refit before committing so a failed fit leaves the session intact.
        trial = self.dataset + [record]
        posterior = prefmodel.fit_posterior(trial, self.config.kernel, self.config.likelihood)

        self.dataset = trial
        self.posterior = posterior
        chosen_presented = "A" if ((y == +1) != pending.swapped) else "B"
        self.round_log.append(
            {
                "round": pending.round,
                "point_a": [float(v_) for v_ in pending.pair.point_a.coords],
                "point_b": [float(v_) for v_ in pending.pair.point_b.coords],
                "params_a": denormalize(pending.pair.point_a).as_dict(),
                "params_b": denormalize(pending.pair.point_b).as_dict(),
                "presented_swapped": pending.swapped,
                "presented_choice": chosen_presented,
                "choice": y,
                "confidence": c,
                "info_gain": pending.info_gain,
                "strategy_score": float(pending.pair.score),
                "strategy": pending.pair.strategy,
                "timestamp": record.timestamp,
            }
        )
        self.pending = None
        if len(self.dataset) < self.config.budget:
            self._select_next()
        else:
            self._enter_validation()
        return self

    def _enter_validation(self):
        self.phase = "validation"
        pool_rng = seeding.derived_rng(self.seed, seeding.STREAM_RECOMMEND_POOL)
        point, mean = acquisition.recommend(self.posterior, rng=pool_rng)
        self.recommendation = {
            "point": [float(v) for v in point.coords],
            "params": denormalize(point).as_dict(),
            "posterior_mean": float(mean),
        }
        vrng = seeding.derived_rng(self.seed, seeding.STREAM_VALIDATION)
        self.validation = generate_validation_set(self.posterior, vrng, x_best=point)

    # -- validation phase -----------------------------------------------

    def next_validation_pair(self) -> ValidationPair:
        if self.phase != "validation":
            raise ProtocolError(f"no validation pair in phase {self.phase!r}")
        return self.validation.pairs[len(self.validation_responses)]

    def submit_validation_response(self, pair_tag: str, chosen_side: str) -> "Session":
        """Record which presented side the user preferred for one task."""
        if self.phase != "validation":
            raise ProtocolError(f"cannot submit validation answers in phase {self.phase!r}")
        expected = self.validation.pairs[len(self.validation_responses)]
        if pair_tag != expected.tag:
            raise ProtocolError(
                f"expected response for {expected.tag!r}, got {pair_tag!r} "
                "(out of order or repeated)"
            )
        if chosen_side not in ("A", "B"):
            raise ValueError(f"chosen_side must be 'A' or 'B', got {chosen_side!r}")

        chose_first = (chosen_side == "A") != expected.swapped
        chosen_idx = expected.idx_a if chose_first else expected.idx_b
        means = self.validation.means
        model_idx = expected.idx_a if means[expected.idx_a] >= means[expected.idx_b] else expected.idx_b
        self.validation_responses.append(
            {
                "tag": expected.tag,
                "chosen_side": chosen_side,
                "chosen_index": chosen_idx,
                "matches_model": chosen_idx == model_idx,
                "timestamp": float(self.clock()),
            }
        )
        if len(self.validation_responses) == len(self.validation.pairs):
            by_tag = {r["tag"]: r for r in self.validation_responses}
            self.consistency_ok = (
                by_tag["anchor_medium"]["chosen_index"]
                == by_tag["consistency_check"]["chosen_index"]
            )
            self.phase = "adjustment"
        return self

    # -- adjustment phase -----------------------------------------------

    def record_favorite(self, params: SignalParams) -> "Session":
        """Store one manually tuned favorite with its posterior percentile."""
        if self.phase != "adjustment":
            raise ProtocolError(f"cannot record favorites in phase {self.phase!r}")
        if len(self.favorites) >= 3:
            raise ProtocolError("already have 3 favorites")
        if not isinstance(params, SignalParams):
            params = SignalParams(**dict(params))
        point = normalize(params)
        if self.recommendation is not None and params.as_dict() == self.recommendation["params"]:
            # The favorite is the recommendation echoed back; use its exact
            # normalized coordinates rather than a re-normalization that can
            # differ in the last ulp.
            point = NormalizedPoint(tuple(self.recommendation["point"]))
        percentile = simulator.percentile_rank(self.posterior, point, self._percentile_pool())
        self.favorites.append(
            {
                "params": params.as_dict(),
                "point": [float(v) for v in point.coords],
                "posterior_percentile": float(percentile),
                "timestamp": float(self.clock()),
            }
        )
        if len(self.favorites) == 3:
            self.phase = "complete"
        return self

    def _percentile_pool(self) -> np.ndarray:
        """Same pool the recommendation searched: seeded draws + queried points."""
        rng = seeding.derived_rng(self.seed, seeding.STREAM_RECOMMEND_POOL)
        pool = rng.uniform(0.0, 1.0, size=(8192, 4))
        queried = np.asarray([p.array for p in self.posterior.points])
        return np.vstack([pool, queried]) if len(queried) else pool

    # -- persistence ------------------------------------------------------

    def to_json_dict(self) -> dict:
        pending = None
        if self.pending is not None:
            pending = {
                "round": self.pending.round,
                "point_a": [float(v) for v in self.pending.pair.point_a.coords],
                "point_b": [float(v) for v in self.pending.pair.point_b.coords],
                "strategy_score": float(self.pending.pair.score),
                "pair_stats": [float(s) for s in self.pending.pair.pair_stats],
                "strategy": self.pending.pair.strategy,
                "info_gain": self.pending.info_gain,
                "swapped": self.pending.swapped,
            }
        return {
            "schema_version": SCHEMA_VERSION,
            "session_id": self.session_id,
            "seed": self.seed,
            "phase": self.phase,
            "config": {
                "budget": self.config.budget,
                "duration_ms": self.config.duration_ms,
                "kernel": {
                    "signal_variance": self.config.kernel.signal_variance,
                    "lengthscale": self.config.kernel.lengthscale,
                    "gram_jitter": self.config.kernel.gram_jitter,
                },
                "likelihood": {
                    "baseline_jitter": self.config.likelihood.baseline_jitter,
                    "confidence_noise": {
                        str(k): v for k, v in self.config.likelihood.confidence_noise.items()
                    },
                },
                "acquisition": {
                    "nominal_noise": self.config.acquisition.nominal_noise,
                    "candidate_count": self.config.acquisition.candidate_count,
                    "quadrature_order": self.config.acquisition.quadrature_order,
                    "strategy": self.config.acquisition.strategy,
                },
            },
            "rounds": self.round_log,
            "pending_query": pending,
            "recommendation": self.recommendation,
            "validation": self.validation.to_json_dict() if self.validation else None,
            "validation_responses": self.validation_responses,
            "consistency_ok": self.consistency_ok,
            "favorites": self.favorites,
            "annotations": self.annotations,
        }

    def to_json(self) -> str:
        return seeding.canonical_json(self.to_json_dict())


def create_session(config: SessionConfig | None = None, clock=time.time) -> Session:
    """New session: resolve the seed, record it, select the first query."""
    config = config or SessionConfig()
    seed = config.seed
    if seed is None:
        seed = int(clock() * 1e9) & ((1 << 64) - 1)
    session = Session(config, seed, clock=clock)
    session._select_next()
    return session


def save_session(session: Session, path) -> None:
    with open(path, "w") as fh:
        fh.write(session.to_json())
        fh.write("\n")


def load_session(path, clock=time.time) -> Session:
    """Rebuild a session from its log; the posterior is refit from data."""
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SessionLogError(f"session log is truncated or corrupt: {exc}") from exc
    return session_from_json_dict(data, clock=clock)


def session_from_json_dict(data: dict, clock=time.time) -> Session:
    if not isinstance(data, dict) or "schema_version" not in data:
        raise SessionLogError("session log has no schema_version field")
    if data["schema_version"] != SCHEMA_VERSION:
        raise SchemaVersionError(
            f"log schema_version {data['schema_version']!r} is not supported "
            f"(expected {SCHEMA_VERSION})"
        )
    try:
        cfg_raw = data["config"]
        config = SessionConfig(
            budget=cfg_raw["budget"],
            seed=data["seed"],
            duration_ms=cfg_raw["duration_ms"],
            kernel=KernelConfig(**cfg_raw["kernel"]),
            likelihood=LikelihoodConfig(
                baseline_jitter=cfg_raw["likelihood"]["baseline_jitter"],
                confidence_noise={
                    int(k): v for k, v in cfg_raw["likelihood"]["confidence_noise"].items()
                },
            ),
            acquisition=AcquisitionConfig(**cfg_raw["acquisition"]),
        )
        session = Session(config, data["seed"], clock=clock)
        session.phase = data["phase"]
        if session.phase not in PHASES:
            raise SessionLogError(f"unknown phase {session.phase!r}")
        session.round_log = list(data["rounds"])
        session.dataset = [
            ComparisonRecord(
                point_a=NormalizedPoint(tuple(r["point_a"])),
                point_b=NormalizedPoint(tuple(r["point_b"])),
                choice=int(r["choice"]),
                confidence=int(r["confidence"]),
                acquisition_score=r["info_gain"],
                timestamp=r["timestamp"],
            )
            for r in session.round_log
        ]
        session.posterior = prefmodel.fit_posterior(
            session.dataset, config.kernel, config.likelihood
        )
        if data["pending_query"] is not None:
            p = data["pending_query"]
            session.pending = PendingQuery(
                round=int(p["round"]),
                pair=QueryPair(
                    point_a=NormalizedPoint(tuple(p["point_a"])),
                    point_b=NormalizedPoint(tuple(p["point_b"])),
                    score=float(p["strategy_score"]),
                    pair_stats=tuple(p["pair_stats"]),
                    strategy=p["strategy"],
                ),
                info_gain=float(p["info_gain"]),
                swapped=bool(p["swapped"]),
            )
        session.recommendation = data["recommendation"]
        if data["validation"] is not None:
            session.validation = ValidationSet.from_json_dict(data["validation"])
        session.validation_responses = list(data["validation_responses"])
        session.consistency_ok = data["consistency_ok"]
        session.favorites = list(data["favorites"])
        session.annotations = dict(data.get("annotations", {}))
    except (KeyError, TypeError, ValueError) as exc:
        raise SessionLogError(f"session log is missing or corrupts a field: {exc}") from exc
    return session
