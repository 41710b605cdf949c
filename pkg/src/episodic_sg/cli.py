"""Command-line interface: validate, check-graph, solve, learn, bound, report.

Exit codes: 0 success, 1 domain failure (invalid game, failed solve,
failed verdict), 2 usage error or malformed input file.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import math
import sys
from pathlib import Path

from . import __version__
from .game_model import GameFormatError, GameValidationError, classify, load_game
from .graphs import build_graph, extended_strongly_connected, has_coprime_cycle, strongly_connected
from .learning import LearningConfig
from .solvers import (
    BackwardInductionError,
    BoundReport,
    EpisodicStrategy,
    MultichainError,
    SolutionTables,
    backward_induction_logit,
    backward_induction_minimax,
    bound_report,
)
from .simulation import run_learning

VERDICT_SLACK = 1e-6


def _read_game(path: str):
    return load_game(Path(path).read_text())


def _emit(doc: dict, out: str | None):
    text = json.dumps(doc, indent=2)
    if out:
        Path(out).write_text(text + "\n")
    else:
        print(text)


def _pair(values: list[float], name: str) -> tuple[float, float]:
    if len(values) == 1:
        return (values[0], values[0])
    if len(values) == 2:
        return (values[0], values[1])
    raise SystemExit(f"--{name} takes one shared or two per-agent values")


def cmd_validate(args) -> int:
    try:
        game = _read_game(args.game)
    except (GameFormatError, GameValidationError, OSError) as exc:
        _emit({"valid": False, "error": str(exc)}, None)
        return 1
    label = classify(game)
    _emit({"valid": True, "classification": label.to_dict()}, None)
    return 0


def cmd_check_graph(args) -> int:
    try:
        game = _read_game(args.game)
    except (GameFormatError, GameValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    graph = build_graph(game)
    coprime, witness = has_coprime_cycle(graph, args.M)
    _emit(
        {
            "strongly_connected": strongly_connected(graph),
            "coprime_cycle": coprime,
            "extended_strongly_connected": extended_strongly_connected(game, args.M),
            "witness": list(witness) if witness is not None else None,
        },
        None,
    )
    return 0


def cmd_solve(args) -> int:
    try:
        game = _read_game(args.game)
        if args.method == "logit":
            tables = backward_induction_logit(game, args.M, args.tau)
        else:
            tables = backward_induction_minimax(game, args.M)
    except (GameFormatError, GameValidationError, OSError, ValueError, BackwardInductionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(tables.to_dict(), args.out)
    return 0


def _run_one_seed(payload):
    game_doc, m_len, cfg_kwargs, n_stages, seed, start_state, cadences, out_dir, method_tau = payload
    game = load_game(json.dumps(game_doc))
    configs = (LearningConfig(**cfg_kwargs[0]), LearningConfig(**cfg_kwargs[1]))
    oracle = None
    if method_tau is not None:
        try:
            oracle = backward_induction_logit(game, m_len, method_tau)
        except BackwardInductionError:
            oracle = None
    run = run_learning(
        game,
        m_len,
        configs,
        n_stages,
        seed,
        start_state=start_state,
        oracle=oracle,
        snapshot_every=cadences[0],
        exploit_every=cadences[1],
    )
    seed_dir = Path(out_dir) / f"seed{seed}"
    seed_dir.mkdir(parents=True, exist_ok=True)
    run.metrics.to_csv(seed_dir / "metrics.csv")
    tables_doc = {
        "method": "learned",
        "tau": [configs[0].tau, configs[1].tau],
        "M": m_len,
        "q": [t.q.tolist() for t in run.tables],
        "v": [t.v.tolist() for t in run.tables],
        "strategy": [t.tolist() for t in run.strategy.tables],
        "residual": float("nan"),
        "iterations": n_stages,
    }
    (seed_dir / "tables.json").write_text(json.dumps(tables_doc, indent=2) + "\n")
    final_q_err = next(
        (row.sup_q_err for row in reversed(run.metrics.rows) if not math.isnan(row.sup_q_err)),
        float("nan"),
    )
    return {
        "seed": seed,
        "final_sup_q_err": final_q_err,
        "warnings": run.metrics.warnings,
        "wall_clock": run.metrics.wall_clock,
    }


def cmd_learn(args) -> int:
    try:
        game = _read_game(args.game)
    except (GameFormatError, GameValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    taus = _pair(args.tau, "tau")
    rhos = _pair(args.rho, "rho")
    alpha0s = _pair(args.alpha0, "alpha0")
    cfg_kwargs = tuple(
        {"tau": taus[i], "rho": rhos[i], "alpha0": alpha0s[i]} for i in (0, 1)
    )
    from .game_model import game_to_document

    payloads = [
        (
            game_to_document(game),
            args.M,
            cfg_kwargs,
            args.K,
            seed,
            args.start_state,
            (args.snapshot_every, args.exploit_every),
            args.out_dir,
            taus if not args.no_oracle else None,
        )
        for seed in args.seeds
    ]
    if len(payloads) == 1:
        summaries = [_run_one_seed(payloads[0])]
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=min(len(payloads), 8)) as pool:
            summaries = list(pool.map(_run_one_seed, payloads))
    _emit({"runs": summaries}, None)
    return 0


def cmd_bound(args) -> int:
    try:
        game = _read_game(args.game)
        doc = json.loads(Path(args.profile).read_text())
        profile = EpisodicStrategy.from_dict(doc)
        if profile.episode_len != args.M:
            raise ValueError(
                f"profile episode length {profile.episode_len} != --M {args.M}"
            )
        tau_doc = doc.get("tau")
        tau = tuple(float(t) for t in tau_doc) if tau_doc is not None else None
        report = bound_report(game, args.M, profile, tau=tau)
    except (GameFormatError, GameValidationError, OSError, ValueError, KeyError,
            json.JSONDecodeError, MultichainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    _emit(report.to_dict(), args.out)
    return 0


def cmd_report(args) -> int:
    from .simulation import RunMetrics

    try:
        metrics = RunMetrics.from_csv(args.metrics) if args.metrics else None
        bound = (
            BoundReport.from_dict(json.loads(Path(args.bound).read_text()))
            if args.bound
            else None
        )
    except (OSError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: malformed input: {exc}", file=sys.stderr)
        return 2
    if metrics is None and bound is None:
        print("error: nothing to report; pass --metrics and/or --bound", file=sys.stderr)
        return 2

    ok = True
    if metrics is not None:
        for agent in (0, 1):
            rows = [r for r in metrics.rows if r.agent == agent]
            final_q = next(
                (r.sup_q_err for r in reversed(rows) if not math.isnan(r.sup_q_err)), None
            )
            final_v = next(
                (r.sup_v_err for r in reversed(rows) if not math.isnan(r.sup_v_err)), None
            )
            print(
                f"agent {agent}: final sup|q - q*| = "
                f"{'n/a' if final_q is None else f'{final_q:.6f}'}, "
                f"final sup|v - v*| = "
                f"{'n/a' if final_v is None else f'{final_v:.6f}'}"
            )
    if bound is not None:
        for agent in (0, 1):
            eps = bound.eps[agent]
            exact = bound.exploit_infinite[agent]
            verdict = exact <= eps + VERDICT_SLACK
            ok = ok and verdict
            print(
                f"agent {agent}: exploitability {exact:.8f} "
                f"{'<=' if verdict else '>'} bound {eps:.8f} "
                f"-> {'PASS' if verdict else 'FAIL'}"
            )
    return 0 if ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="episodic-sg",
        description="Episodic equilibrium toolkit for two-agent stochastic games",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="validate and classify a game document")
    p.add_argument("--game", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("check-graph", help="reachability checks for an episode length")
    p.add_argument("--game", required=True)
    p.add_argument("--M", type=int, required=True)
    p.set_defaults(func=cmd_check_graph)

    p = sub.add_parser("solve", help="backward-induction tables for an episode length")
    p.add_argument("--game", required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--method", choices=("logit", "minimax"), default="logit")
    p.add_argument("--tau", type=float, default=0.05)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("learn", help="run the learning dynamics over seeds")
    p.add_argument("--game", required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--tau", type=float, nargs="+", default=[0.05])
    p.add_argument("--rho", type=float, nargs="+", default=[0.7])
    p.add_argument("--alpha0", type=float, nargs="+", default=[1.0])
    p.add_argument("--seeds", type=int, nargs="+", default=[0])
    p.add_argument("--start-state", type=int, default=0)
    p.add_argument("--snapshot-every", type=int, default=1000)
    p.add_argument("--exploit-every", type=int, default=100_000)
    p.add_argument("--no-oracle", action="store_true",
                   help="skip computing reference tables for error metrics")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("bound", help="error-bound report for a strategy profile")
    p.add_argument("--game", required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--profile", required=True, help="JSON with a 'strategy' field")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("report", help="summarize metrics and bound verdicts")
    p.add_argument("--metrics")
    p.add_argument("--bound")
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
