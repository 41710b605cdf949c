"""Seeded environment stepping, coordinated learning runs, and metrics.

A run owns three random streams spawned from one master seed (environment
transitions, agent 1 sampling, agent 2 sampling), so changing one agent's
configuration never perturbs the other streams.  Everything downstream of
(game, configs, seed) is bit-reproducible.

The learning loop is a flat-Python transcription of the EpisodicLearner
protocol (deferred q-update on observing the next extended state, Boltzmann
action sampling, visit-normalized steps); the tests drive the agent objects
over the same streams and require exact agreement.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .game_model import StochasticGame
from .graphs import extended_strongly_connected
from .learning import AgentTables, LearningConfig
from .solvers import (
    EpisodicStrategy,
    MultichainError,
    SolutionTables,
    delta as finite_delta,
    epsilon_bound_learning,
    infinite_exploitability,
)
from .stage_games import smoothed_best_response

_BLOCK = 8192

METRIC_COLUMNS = (
    "stage",
    "agent",
    "sup_q_err",
    "sup_v_err",
    "exploit_bound",
    "exploit_exact",
    "visits_min",
    "visits_max",
)


@dataclass(frozen=True)
class MetricRow:
    stage: int
    agent: int
    sup_q_err: float
    sup_v_err: float
    exploit_bound: float
    exploit_exact: float
    visits_min: int
    visits_max: int


@dataclass
class RunMetrics:
    rows: list[MetricRow] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    wall_clock: float = 0.0

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(METRIC_COLUMNS)
            for row in self.rows:
                writer.writerow(
                    [
                        row.stage,
                        row.agent,
                        _fmt(row.sup_q_err),
                        _fmt(row.sup_v_err),
                        _fmt(row.exploit_bound),
                        _fmt(row.exploit_exact),
                        row.visits_min,
                        row.visits_max,
                    ]
                )

    @classmethod
    def from_csv(cls, path) -> "RunMetrics":
        metrics = cls()
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            missing = [c for c in METRIC_COLUMNS if c not in (reader.fieldnames or [])]
            if missing:
                raise ValueError(f"metrics file missing columns: {', '.join(missing)}")
            for rec in reader:
                metrics.rows.append(
                    MetricRow(
                        stage=int(rec["stage"]),
                        agent=int(rec["agent"]),
                        sup_q_err=_parse(rec["sup_q_err"]),
                        sup_v_err=_parse(rec["sup_v_err"]),
                        exploit_bound=_parse(rec["exploit_bound"]),
                        exploit_exact=_parse(rec["exploit_exact"]),
                        visits_min=int(rec["visits_min"]),
                        visits_max=int(rec["visits_max"]),
                    )
                )
        return metrics


def _fmt(x: float) -> str:
    return "" if math.isnan(x) else repr(x)


def _parse(text: str) -> float:
    return float("nan") if text == "" else float(text)


class Environment:
    """Seeded stepper for one game; substage always equals stage mod M."""

    def __init__(self, game: StochasticGame, episode_len: int, rng, start_state: int = 0):
        if not (0 <= start_state < game.n_states):
            raise ValueError(f"start state {start_state} out of range")
        self.game = game
        self.episode_len = int(episode_len)
        self.rng = rng
        self.state = start_state
        self.stage = 0

    @property
    def substage(self) -> int:
        return self.stage % self.episode_len

    def step(self, a1: int, a2: int) -> tuple[float, float, int]:
        """Returns exact rewards and the sampled next state."""
        s = self.state
        r1 = float(self.game.rewards[0, s, a1, a2])
        r2 = float(self.game.rewards[1, s, a1, a2])
        u = self.rng.random()
        row = self.game.transitions[s, a1, a2]
        nxt = len(row) - 1
        acc = 0.0
        for t, prob in enumerate(row):
            acc += prob
            if u < acc:
                nxt = t
                break
        self.state = nxt
        self.stage += 1
        return r1, r2, nxt


@dataclass
class LearningRun:
    tables: tuple[AgentTables, AgentTables]
    metrics: RunMetrics
    strategy: EpisodicStrategy
    final_state: int


def induced_strategy(q_tables, taus) -> EpisodicStrategy:
    """Boltzmann response of each agent's q at every extended state."""
    out = []
    for q, tau in zip(q_tables, taus):
        table = np.empty_like(q)
        for s in range(q.shape[0]):
            for m in range(q.shape[1]):
                table[s, m] = smoothed_best_response(q[s, m], tau)
        out.append(table)
    return EpisodicStrategy(tuple(out))


def run_learning(
    game: StochasticGame,
    episode_len: int,
    configs: tuple[LearningConfig, LearningConfig],
    n_stages: int,
    seed: int,
    *,
    start_state: int = 0,
    oracle: SolutionTables | None = None,
    snapshot_every: int = 1000,
    exploit_every: int = 100_000,
) -> LearningRun:
    """Drive both agents through n_stages stages of self-play.

    Metric rows are appended every snapshot_every stages (sup-norm errors
    against the oracle tables when given) and, every exploit_every stages,
    augmented with the exact exploitability of the currently induced
    profile next to its certified bound.  Set a cadence to 0 to disable.
    Visit coverage is only guaranteed when the extended state graph is
    strongly connected; a warning is recorded otherwise.
    """
    m_len = int(episode_len)
    if m_len < 1:
        raise ValueError("episode length must be >= 1")
    metrics = RunMetrics()
    if not extended_strongly_connected(game, m_len):
        metrics.warnings.append(
            "extended state graph is not strongly connected; "
            "some extended states may be starved"
        )
    t_start = time.perf_counter()

    ss = np.random.SeedSequence(seed)
    env_rng, rng_a, rng_b = (np.random.default_rng(c) for c in ss.spawn(3))
    env_u = env_rng.random(_BLOCK)
    ag_u = [rng_a.random(_BLOCK), rng_b.random(_BLOCK)]
    rngs = [rng_a, rng_b]
    ei = 0
    ui = [0, 0]

    n_s = game.n_states
    n_act = game.n_actions
    rew = [game.rewards[0].tolist(), game.rewards[1].tolist()]
    cum = np.cumsum(game.transitions, axis=3).tolist()
    gammas = game.gammas
    taus = (configs[0].tau, configs[1].tau)
    rhos = (configs[0].rho, configs[1].rho)
    alpha0s = (configs[0].alpha0, configs[1].alpha0)
    size = n_s * m_len
    q = [
        [[float(configs[i].q_init)] * n_act[i] for _ in range(size)]
        for i in (0, 1)
    ]
    v = [[0.0] * size for _ in (0, 1)]
    counts = [0] * size
    pending = [None, None]  # (flat extended index, action, alpha)
    prev_reward = [0.0, 0.0]

    oracle_q = [np.asarray(t) for t in oracle.q] if oracle is not None else None
    oracle_v = [np.asarray(t) for t in oracle.v] if oracle is not None else None

    def record(stage_idx):
        vmin, vmax = min(counts), max(counts)
        for i in (0, 1):
            if oracle_q is not None:
                q_err = float(
                    np.max(np.abs(np.array(q[i]).reshape(n_s, m_len, n_act[i]) - oracle_q[i]))
                )
                v_err = float(np.max(np.abs(np.array(v[i]).reshape(n_s, m_len) - oracle_v[i])))
            else:
                q_err = v_err = float("nan")
            metrics.rows.append(
                MetricRow(stage_idx, i, q_err, v_err, float("nan"), float("nan"), vmin, vmax)
            )

    def record_exploit(stage_idx):
        vmin, vmax = min(counts), max(counts)
        profile = induced_strategy(
            [np.array(q[i]).reshape(n_s, m_len, n_act[i]) for i in (0, 1)], taus
        )
        d = finite_delta(game, m_len, profile)
        for i in (0, 1):
            bound = epsilon_bound_learning(float(d[i]), taus[i], n_act[i], gammas[i], m_len)
            try:
                exact = infinite_exploitability(game, profile, i)
            except MultichainError as exc:
                metrics.warnings.append(f"stage {stage_idx}: {exc}")
                exact = float("nan")
            if oracle_q is not None:
                q_err = float(
                    np.max(np.abs(np.array(q[i]).reshape(n_s, m_len, n_act[i]) - oracle_q[i]))
                )
                v_err = float(np.max(np.abs(np.array(v[i]).reshape(n_s, m_len) - oracle_v[i])))
            else:
                q_err = v_err = float("nan")
            metrics.rows.append(MetricRow(stage_idx, i, q_err, v_err, bound, exact, vmin, vmax))

    exp = math.exp
    state = start_state
    for k in range(n_stages):
        m = k % m_len
        e = state * m_len + m
        if k > 0:
            boundary = m == 0
            for i in (0, 1):
                pe, pa, alpha = pending[i]
                qhat = prev_reward[i] if boundary else prev_reward[i] + gammas[i] * v[i][e]
                row = q[i][pe]
                row[pa] += alpha * (qhat - row[pa])
        actions = [0, 0]
        for i in (0, 1):
            row = q[i][e]
            mx = max(row)
            tau = taus[i]
            ws = [exp((x - mx) / tau) for x in row]
            tot = sum(ws)
            br = [w / tot for w in ws]
            if ui[i] == _BLOCK:
                ag_u[i] = rngs[i].random(_BLOCK)
                ui[i] = 0
            u = ag_u[i][ui[i]]
            ui[i] += 1
            action = n_act[i] - 1
            acc = 0.0
            for a, prob in enumerate(br):
                acc += prob
                if u < acc:
                    action = a
                    break
            alpha = min(1.0, alpha0s[i] / (counts[e] + 1) ** rhos[i] / br[action])
            pending[i] = (e, action, alpha)
            actions[i] = action
            acc = 0.0
            for a, prob in enumerate(br):
                acc += prob * row[a]
            v[i][e] = acc
        a0, a1 = actions
        prev_reward[0] = rew[0][state][a0][a1]
        prev_reward[1] = rew[1][state][a0][a1]
        if ei == _BLOCK:
            env_u = env_rng.random(_BLOCK)
            ei = 0
        u = env_u[ei]
        ei += 1
        crow = cum[state][a0][a1]
        nxt = n_s - 1
        for t, c in enumerate(crow):
            if u < c:
                nxt = t
                break
        counts[e] += 1
        state = nxt
        elapsed = k + 1
        if exploit_every and elapsed % exploit_every == 0:
            record_exploit(elapsed)
        elif snapshot_every and elapsed % snapshot_every == 0:
            record(elapsed)

    # flush the final pending transition exactly as the next stage would
    m = n_stages % m_len
    e = state * m_len + m
    if n_stages > 0:
        boundary = m == 0
        for i in (0, 1):
            pe, pa, alpha = pending[i]
            qhat = prev_reward[i] if boundary else prev_reward[i] + gammas[i] * v[i][e]
            row = q[i][pe]
            row[pa] += alpha * (qhat - row[pa])

    tables = tuple(
        AgentTables(
            q=np.array(q[i]).reshape(n_s, m_len, n_act[i]),
            v=np.array(v[i]).reshape(n_s, m_len),
            counts=np.array(counts, dtype=np.int64).reshape(n_s, m_len),
        )
        for i in (0, 1)
    )
    strategy = induced_strategy([tables[0].q, tables[1].q], taus)
    metrics.wall_clock = time.perf_counter() - t_start
    return LearningRun(tables=tables, metrics=metrics, strategy=strategy, final_state=state)


@dataclass(frozen=True)
class UtilityEstimate:
    mean: tuple[float, float]
    stderr: tuple[float, float]


def estimate_utility(
    game: StochasticGame,
    profile: EpisodicStrategy,
    start_state: int,
    horizon: int,
    replications: int,
    seed: int,
) -> UtilityEstimate:
    """Monte Carlo estimate of the normalized utilities under a profile.

    Time-averaged agents divide the K-stage reward sum by K; discounted
    agents weight stage k by (1 - gamma) gamma^k.  Returns the mean and
    standard error over replications.
    """
    if horizon < 1 or replications < 1:
        raise ValueError("horizon and replications must be >= 1")
    rng = np.random.default_rng(seed)
    m_len = profile.episode_len
    p1, p2 = profile.tables
    totals = np.zeros((replications, 2))
    for rep in range(replications):
        env = Environment(game, m_len, rng, start_state=start_state)
        disc = [1.0, 1.0]
        acc = [0.0, 0.0]
        for k in range(horizon):
            s, m = env.state, env.substage
            a1 = rng.choice(len(p1[s, m]), p=p1[s, m])
            a2 = rng.choice(len(p2[s, m]), p=p2[s, m])
            r1, r2, _ = env.step(int(a1), int(a2))
            for i, r in enumerate((r1, r2)):
                if game.gammas[i] == 1.0:
                    acc[i] += r / horizon
                else:
                    acc[i] += (1.0 - game.gammas[i]) * disc[i] * r
                    disc[i] *= game.gammas[i]
        totals[rep] = acc
    mean = totals.mean(axis=0)
    if replications > 1:
        stderr = totals.std(axis=0, ddof=1) / math.sqrt(replications)
    else:
        stderr = np.zeros(2)
    return UtilityEstimate(mean=(float(mean[0]), float(mean[1])), stderr=(float(stderr[0]), float(stderr[1])))
