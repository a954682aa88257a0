"""Command line entry points: serve the HTTP API, batch-simulate, replay logs."""

from __future__ import annotations

import argparse
import csv
import sys
from pathlib import Path

import numpy as np

from . import acquisition, seeding, session as session_mod, simulator
from .acquisition import AcquisitionConfig
from .simulator import SimulationConfig


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def _decile_means(values: list[float]) -> list[float]:
    chunks = np.array_split(np.asarray(values, dtype=float), 10)
    return [float(c.mean()) if len(c) else float("nan") for c in chunks]


def _cmd_simulate(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    acq = AcquisitionConfig(
        nominal_noise=args.nominal_noise,
        candidate_count=args.candidates,
        strategy=args.strategy,
    )
    summary_rows = []
    for seed in range(args.seeds):
        config = SimulationConfig(seed=seed, rounds=args.rounds, acquisition=acq)
        trace = simulator.run_simulation(config)
        path = out_dir / f"trace_seed{seed:03d}.json"
        path.write_text(trace.to_json() + "\n")
        rhos = [r for r in trace.spearman_series() if r is not None]
        row = {
            "seed": seed,
            "strategy": args.strategy,
            "rounds": args.rounds,
            "final_spearman": rhos[-1] if rhos else "",
            "holdout_accuracy": trace.holdout_accuracy,
            "gt_percentile": trace.recommendation["gt_percentile"],
            "degenerate": trace.degenerate_ground_truth,
        }
        for i, mean_ig in enumerate(_decile_means(trace.info_gain_series()), start=1):
            row[f"ig_decile_{i}"] = mean_ig
        summary_rows.append(row)
        print(
            f"seed {seed}: rho={row['final_spearman'] if rhos else 'n/a'} "
            f"acc={trace.holdout_accuracy:.3f} -> {path}",
            file=sys.stderr,
        )
    summary_path = out_dir / "summary.csv"
    with open(summary_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(summary_rows[0].keys()))
        writer.writeheader()
        writer.writerows(summary_rows)
    print(f"wrote {len(summary_rows)} traces and {summary_path}", file=sys.stderr)
    return 0


def _cmd_replay(args) -> int:
    session = session_mod.load_session(args.log)
    print(f"session {session.session_id} seed={session.seed} phase={session.phase}")
    print(f"comparisons recorded: {len(session.dataset)} / budget {session.config.budget}")
    if session.pending is not None:
        print(f"pending round: {session.pending.round}")
    if session.posterior.num_points == 0:
        print("no data yet; nothing to recommend")
        return 0
    pool_rng = seeding.derived_rng(session.seed, seeding.STREAM_RECOMMEND_POOL)
    point, mean = acquisition.recommend(session.posterior, rng=pool_rng)
    from .signal import denormalize

    print(f"recomputed recommendation: {denormalize(point).as_dict()} (mean {mean:.6f})")
    if session.recommendation is not None:
        stored = session.recommendation
        same = list(point.coords) == stored["point"]
        print(f"stored recommendation:     {stored['params']} (mean {stored['posterior_mean']:.6f})")
        print(f"recommendation match: {'yes' if same else 'no'}")
        if not same:
            return 1
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="vibropref")
    sub = parser.add_subparsers(dest="command", required=True)

    p_serve = sub.add_parser("serve", help="run the HTTP session API")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    p_serve.set_defaults(func=_cmd_serve)

    p_sim = sub.add_parser("simulate", help="closed-loop runs against a synthetic oracle")
    p_sim.add_argument("--seeds", type=int, default=10, help="number of seeds (0..N-1)")
    p_sim.add_argument("--rounds", type=int, default=40)
    p_sim.add_argument("--strategy", choices=["info_gain", "eubo", "random"], default="info_gain")
    p_sim.add_argument("--nominal-noise", type=float, default=acquisition.DEFAULT_NOMINAL_NOISE)
    p_sim.add_argument("--candidates", type=int, default=64)
    p_sim.add_argument("--out", required=True, help="directory for trace JSONs and summary.csv")
    p_sim.set_defaults(func=_cmd_simulate)

    p_replay = sub.add_parser("replay", help="refit a saved session log and re-recommend")
    p_replay.add_argument("--log", required=True)
    p_replay.set_defaults(func=_cmd_replay)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
