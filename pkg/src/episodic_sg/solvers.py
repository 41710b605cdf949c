"""Exact solvers on the episode-extended state space.

Backward induction over substages m = M-1, ..., 0 resolves one matrix
game per extended state (s, m) whose payoffs are

    Q^i(s, m, a1, a2) = r^i(s, a1, a2) + gamma^i * sum_s' p(s'|s, a) * v^i(s', m+1),

with the boundary convention that continuation past the last substage is
zero: the stage games at m = M-1 are the raw rewards, and the stored
value tables on m in {0..M-1} hold each stage game's value under the
computed profile (so they match what the learning iterates converge to;
the entry at m = M-1 is maintained but never read across an episode
boundary).

The module also provides exact policy evaluation for the M-stage and
infinite-horizon criteria, best-response gaps, and the closed-form
approximation-error bounds that relate them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .game_model import StochasticGame
from .graphs import DirectedGraph, strongly_connected, strongly_connected_components
from .stage_games import (
    LogitSolveError,
    MatrixGame,
    _tau_pair,
    is_zero_sum,
    logit_fixed_point,
    smoothed_best_response,
    solve_zero_sum,
)

VALUE_ITER_TOL = 1e-10
CONSISTENCY_TOL = 1e-8


class BackwardInductionError(RuntimeError):
    """A stage-game solve failed; message carries the (s, m) location."""


class MultichainError(RuntimeError):
    """Time-averaged evaluation is ambiguous: several recurrent classes."""

    def __init__(self, classes: list[list[tuple[int, int]]]):
        self.classes = classes
        names = "; ".join(
            "{" + ", ".join(f"(s={s}, m={m})" for s, m in cls) + "}" for cls in classes
        )
        super().__init__(f"induced chain has {len(classes)} recurrent classes: {names}")


@dataclass(frozen=True)
class EpisodicStrategy:
    """Joint episodic profile: per-agent tables of shape (S, M, A_i).

    Row tables[i][s, m] is agent i's mixed action at extended state (s, m).
    """

    tables: tuple[np.ndarray, np.ndarray]

    def __post_init__(self):
        tables = tuple(np.asarray(t, dtype=float) for t in self.tables)
        if len(tables) != 2:
            raise ValueError("expected tables for exactly 2 agents")
        for i, t in enumerate(tables):
            if t.ndim != 3:
                raise ValueError(f"agent {i} table must have shape (S, M, A)")
            if np.any(t < -1e-12):
                raise ValueError(f"agent {i} table has negative probabilities")
            if float(np.max(np.abs(t.sum(axis=2) - 1.0))) > 1e-9:
                raise ValueError(f"agent {i} table rows must sum to 1")
        if tables[0].shape[:2] != tables[1].shape[:2]:
            raise ValueError("agent tables disagree on (S, M)")
        object.__setattr__(self, "tables", tables)
        for t in tables:
            t.setflags(write=False)

    @property
    def n_states(self) -> int:
        return self.tables[0].shape[0]

    @property
    def episode_len(self) -> int:
        return self.tables[0].shape[1]

    def to_dict(self) -> dict:
        return {"strategy": [t.tolist() for t in self.tables], "M": self.episode_len}

    @classmethod
    def from_dict(cls, doc: dict) -> "EpisodicStrategy":
        return cls(tables=tuple(np.asarray(t, dtype=float) for t in doc["strategy"]))


def uniform_strategy(game: StochasticGame, episode_len: int) -> EpisodicStrategy:
    n1, n2 = game.n_actions
    s, m = game.n_states, episode_len
    return EpisodicStrategy(
        (np.full((s, m, n1), 1.0 / n1), np.full((s, m, n2), 1.0 / n2))
    )


@dataclass(frozen=True)
class SolutionTables:
    """Backward-induction output: q, v, and the induced profile.

    q[i] has shape (S, M, A_i) and satisfies q^i(s, m, a) =
    Q^i(s, m, a, pi^j(s, m)); v[i] has shape (S, M) with v^i(s, m) =
    q^i(s, m, .) . pi^i(s, m).  method is "logit" or "minimax"; residual
    is the worst stage-solve residual, iterations the largest stage-solve
    iteration count.
    """

    q: tuple[np.ndarray, np.ndarray]
    v: tuple[np.ndarray, np.ndarray]
    strategy: EpisodicStrategy
    method: str
    tau: tuple[float, float] | None
    residual: float
    iterations: int

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "tau": list(self.tau) if self.tau is not None else None,
            "M": self.strategy.episode_len,
            "q": [t.tolist() for t in self.q],
            "v": [t.tolist() for t in self.v],
            "strategy": [t.tolist() for t in self.strategy.tables],
            "residual": self.residual,
            "iterations": self.iterations,
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "SolutionTables":
        tau = doc.get("tau")
        return cls(
            q=tuple(np.asarray(t, dtype=float) for t in doc["q"]),
            v=tuple(np.asarray(t, dtype=float) for t in doc["v"]),
            strategy=EpisodicStrategy.from_dict(doc),
            method=doc["method"],
            tau=tuple(float(t) for t in tau) if tau is not None else None,
            residual=float(doc["residual"]),
            iterations=int(doc["iterations"]),
        )


def _stage_payoffs(game: StochasticGame, s: int, m: int, episode_len: int, v_next):
    """Global-Q payoff matrices at (s, m); zero continuation past m = M-1."""
    r1 = game.rewards[0, s]
    r2 = game.rewards[1, s]
    if m == episode_len - 1:
        return r1.copy(), r2.copy()
    g1, g2 = game.gammas
    cont1 = game.transitions[s] @ v_next[0]
    cont2 = game.transitions[s] @ v_next[1]
    return r1 + g1 * cont1, r2 + g2 * cont2


def backward_induction_logit(
    game: StochasticGame,
    episode_len: int,
    tau,
    tol: float = 1e-10,
    max_iter: int = 50_000,
) -> SolutionTables:
    """Substage-descending sweep resolving every stage game by its
    smoothed-response fixed point.

    tau may be a scalar or a per-agent pair (each agent's Boltzmann
    response uses its own temperature, as does its continuation discount).
    """
    m_len = int(episode_len)
    if m_len < 1:
        raise ValueError("episode length must be >= 1")
    t1, t2 = _tau_pair(tau)
    n_s = game.n_states
    n1, n2 = game.n_actions
    q1 = np.zeros((n_s, m_len, n1))
    q2 = np.zeros((n_s, m_len, n2))
    v1 = np.zeros((n_s, m_len))
    v2 = np.zeros((n_s, m_len))
    pi1 = np.zeros((n_s, m_len, n1))
    pi2 = np.zeros((n_s, m_len, n2))
    worst_res = 0.0
    worst_iter = 0
    for m in range(m_len - 1, -1, -1):
        v_next = (v1[:, m + 1], v2[:, m + 1]) if m < m_len - 1 else None
        for s in range(n_s):
            u1, u2 = _stage_payoffs(game, s, m, m_len, v_next)
            try:
                fp = logit_fixed_point(MatrixGame(u1, u2), (t1, t2), tol, max_iter)
            except LogitSolveError as exc:
                raise BackwardInductionError(
                    f"stage game at (s={s}, m={m}) did not converge "
                    f"(residual {exc.residual:.3g})"
                ) from exc
            x = smoothed_best_response(fp.q1, t1)
            y = smoothed_best_response(fp.q2, t2)
            q1[s, m] = fp.q1
            q2[s, m] = fp.q2
            pi1[s, m] = x
            pi2[s, m] = y
            v1[s, m] = x @ fp.q1
            v2[s, m] = y @ fp.q2
            worst_res = max(worst_res, fp.residual)
            worst_iter = max(worst_iter, fp.iterations)
    return SolutionTables(
        q=(q1, q2),
        v=(v1, v2),
        strategy=EpisodicStrategy((pi1, pi2)),
        method="logit",
        tau=(t1, t2),
        residual=worst_res,
        iterations=worst_iter,
    )


def backward_induction_minimax(game: StochasticGame, episode_len: int) -> SolutionTables:
    """Exact equilibrium of the M-stage game by per-stage minimax solves.

    Requires every state's reward game to be zero-sum and a shared
    discount factor, which keeps all derived stage games zero-sum.
    """
    m_len = int(episode_len)
    if m_len < 1:
        raise ValueError("episode length must be >= 1")
    if game.gammas[0] != game.gammas[1]:
        raise ValueError("minimax sweep requires a shared discount factor")
    for s in range(game.n_states):
        if not is_zero_sum(game.stage_game(s)):
            raise ValueError(f"state {s} rewards are not zero-sum")
    n_s = game.n_states
    n1, n2 = game.n_actions
    q1 = np.zeros((n_s, m_len, n1))
    q2 = np.zeros((n_s, m_len, n2))
    v1 = np.zeros((n_s, m_len))
    v2 = np.zeros((n_s, m_len))
    pi1 = np.zeros((n_s, m_len, n1))
    pi2 = np.zeros((n_s, m_len, n2))
    worst_res = 0.0
    for m in range(m_len - 1, -1, -1):
        v_next = (v1[:, m + 1], v2[:, m + 1]) if m < m_len - 1 else None
        for s in range(n_s):
            u1, u2 = _stage_payoffs(game, s, m, m_len, v_next)
            # the sweep preserves zero-sum structure: v2 = -v1 inductively
            sol = solve_zero_sum(MatrixGame(u1, -u1))
            q1[s, m] = u1 @ sol.col
            q2[s, m] = sol.row @ u2
            pi1[s, m] = sol.row
            pi2[s, m] = sol.col
            v1[s, m] = float(sol.row @ u1 @ sol.col)
            v2[s, m] = float(sol.row @ u2 @ sol.col)
            worst_res = max(worst_res, float(np.max(np.abs(u1 + u2))))
    return SolutionTables(
        q=(q1, q2),
        v=(v1, v2),
        strategy=EpisodicStrategy((pi1, pi2)),
        method="minimax",
        tau=None,
        residual=worst_res,
        iterations=0,
    )


def consistency_residual(game: StochasticGame, tables: SolutionTables) -> float:
    """Worst violation of the fixed-point equations the tables must satisfy.

    Reconstructs Q from the stored v through the game tensors, contracts
    with the stored profile, and compares against the stored q and v.
    """
    m_len = tables.strategy.episode_len
    pi1, pi2 = tables.strategy.tables
    worst = 0.0
    for m in range(m_len):
        v_next = (tables.v[0][:, m + 1], tables.v[1][:, m + 1]) if m < m_len - 1 else None
        for s in range(game.n_states):
            u1, u2 = _stage_payoffs(game, s, m, m_len, v_next)
            worst = max(worst, float(np.max(np.abs(tables.q[0][s, m] - u1 @ pi2[s, m]))))
            worst = max(worst, float(np.max(np.abs(tables.q[1][s, m] - pi1[s, m] @ u2))))
            worst = max(worst, abs(tables.v[0][s, m] - pi1[s, m] @ tables.q[0][s, m]))
            worst = max(worst, abs(tables.v[1][s, m] - pi2[s, m] @ tables.q[1][s, m]))
    return worst


def evaluate_finite_all(game: StochasticGame, episode_len: int, profile: EpisodicStrategy) -> np.ndarray:
    """M-stage utilities for every start state; shape (S, 2).

    Exact forward propagation of the state distribution; entry [s, i] is
    E[sum_{k<M} (gamma^i)^k r^i | s_0 = s] under the profile.
    """
    m_len = int(episode_len)
    if profile.episode_len != m_len or profile.n_states != game.n_states:
        raise ValueError("profile shape does not match game / episode length")
    p1, p2 = profile.tables
    n_s = game.n_states
    dist = np.eye(n_s)  # dist[s0] is the state distribution started at s0
    totals = np.zeros((n_s, 2))
    disc = [1.0, 1.0]
    for m in range(m_len):
        joint = np.einsum("sa,sb->sab", p1[:, m], p2[:, m])
        stage = np.einsum("sab,isab->si", joint, game.rewards)
        totals[:, 0] += disc[0] * dist @ stage[:, 0]
        totals[:, 1] += disc[1] * dist @ stage[:, 1]
        disc[0] *= game.gammas[0]
        disc[1] *= game.gammas[1]
        if m < m_len - 1:
            step = np.einsum("sab,sabt->st", joint, game.transitions)
            dist = dist @ step
    return totals


def evaluate_finite(game, episode_len, profile, start_state: int) -> np.ndarray:
    """Per-agent M-stage utilities from one start state; shape (2,)."""
    return evaluate_finite_all(game, episode_len, profile)[start_state]


def delta(game: StochasticGame, episode_len: int, profile: EpisodicStrategy) -> np.ndarray:
    """Start-state spread of the M-stage utility, per agent; shape (2,)."""
    vals = evaluate_finite_all(game, episode_len, profile)
    return vals.max(axis=0) - vals.min(axis=0)


@dataclass(frozen=True)
class BestResponseResult:
    """Exact M-stage best response of one agent to a fixed opponent.

    values[s, m] is the optimal remaining utility from (s, m); eps_per_start
    is values[., 0] minus the profile's own utility; eps_hat is its max
    over start states (floored at 0 against round-off); strategy is the
    maximizing pure Markov policy, one-hot, ties to the lowest index.
    """

    values: np.ndarray
    eps_per_start: np.ndarray
    eps_hat: float
    strategy: np.ndarray


def finite_best_response(
    game: StochasticGame, episode_len: int, profile: EpisodicStrategy, agent: int
) -> BestResponseResult:
    """Hard-max backward induction against profile's other agent."""
    if agent not in (0, 1):
        raise ValueError("agent must be 0 or 1")
    m_len = int(episode_len)
    opp = profile.tables[1 - agent]
    n_a = game.n_actions[agent]
    gamma = game.gammas[agent]
    values = np.zeros((game.n_states, m_len))
    strategy = np.zeros((game.n_states, m_len, n_a))
    v_next = np.zeros(game.n_states)
    for m in range(m_len - 1, -1, -1):
        total = game.rewards[agent] + gamma * (game.transitions @ v_next)
        if agent == 0:
            q_br = np.einsum("sab,sb->sa", total, opp[:, m])
        else:
            q_br = np.einsum("sab,sa->sb", total, opp[:, m])
        best = np.argmax(q_br, axis=1)
        values[:, m] = q_br[np.arange(game.n_states), best]
        strategy[np.arange(game.n_states), m, best] = 1.0
        v_next = values[:, m]
    own = evaluate_finite_all(game, m_len, profile)[:, agent]
    eps_per_start = values[:, 0] - own
    return BestResponseResult(
        values=values,
        eps_per_start=eps_per_start,
        eps_hat=max(0.0, float(eps_per_start.max())),
        strategy=strategy,
    )


def _check_bound_domain(d: float, eps_hat: float, gamma: float, episode_len: int):
    if d < -1e-12 or eps_hat < -1e-12:
        raise ValueError("delta and eps_hat must be nonnegative")
    if not (0.0 < gamma <= 1.0):
        raise ValueError(f"gamma = {gamma!r} outside (0, 1]")
    if episode_len < 1:
        raise ValueError("episode length must be >= 1")


def epsilon_bound(d: float, eps_hat: float, gamma: float, episode_len: int) -> float:
    """Approximation error certified for an M-episodic profile.

    (d + eps_hat) / M in the time-averaged case; (gamma^M d + eps_hat)
    * (1 - gamma) / (1 - gamma^M) in the discounted case.
    """
    _check_bound_domain(d, eps_hat, gamma, episode_len)
    d = max(0.0, d)
    eps_hat = max(0.0, eps_hat)
    if gamma == 1.0:
        return (d + eps_hat) / episode_len
    gm = gamma**episode_len
    return (gm * d + eps_hat) * (1.0 - gamma) / (1.0 - gm)


def geometric_sum(gamma: float, episode_len: int) -> float:
    """sum_{k<M} gamma^k."""
    if gamma == 1.0:
        return float(episode_len)
    return (1.0 - gamma**episode_len) / (1.0 - gamma)


def epsilon_bound_learning(
    d: float, tau: float, n_actions: int, gamma: float, episode_len: int
) -> float:
    """Error bound for the smoothed-response limit profile.

    Substitutes the exploration cost eps_hat = tau * log|A| * sum_{k<M}
    gamma^k into the closed form, which collapses to
    d/M + tau log|A| (time-averaged) and
    d * gamma^M (1-gamma)/(1-gamma^M) + tau log|A| (discounted).
    """
    if tau <= 0.0:
        raise ValueError("temperature must be positive")
    if n_actions < 1:
        raise ValueError("need at least one action")
    xi = tau * math.log(n_actions)
    return epsilon_bound(d, xi * geometric_sum(gamma, episode_len), gamma, episode_len)


def _induced_chain(game: StochasticGame, profile: EpisodicStrategy):
    """Markov chain of the profile on extended states.

    Returns (P, R) with P shape (S*M, S*M) ordered by flat index s*M+m and
    R shape (S*M, 2) the per-agent expected stage rewards.
    """
    m_len = profile.episode_len
    n_s = game.n_states
    size = n_s * m_len
    p_bar = np.zeros((size, size))
    r_bar = np.zeros((size, 2))
    p1, p2 = profile.tables
    for m in range(m_len):
        joint = np.einsum("sa,sb->sab", p1[:, m], p2[:, m])
        step = np.einsum("sab,sabt->st", joint, game.transitions)
        r_bar[m::m_len, 0] = np.einsum("sab,sab->s", joint, game.rewards[0])
        r_bar[m::m_len, 1] = np.einsum("sab,sab->s", joint, game.rewards[1])
        nxt = (m + 1) % m_len
        rows = np.arange(n_s) * m_len + m
        cols = np.arange(n_s) * m_len + nxt
        p_bar[np.ix_(rows, cols)] = step
    return p_bar, r_bar


def _recurrent_classes(p_bar: np.ndarray, episode_len: int) -> list[list[tuple[int, int]]]:
    adj = tuple(tuple(np.nonzero(row > 0.0)[0].tolist()) for row in p_bar)
    g = DirectedGraph(n=p_bar.shape[0], adj=adj)
    comps = strongly_connected_components(g)
    comp_of = {}
    for ci, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = ci
    recurrent = []
    for ci, comp in enumerate(comps):
        if all(comp_of[w] == ci for v in comp for w in adj[v]):
            recurrent.append([divmod(v, episode_len) for v in comp])
    return recurrent


def _stationary_distribution(p_class: np.ndarray) -> np.ndarray:
    n = p_class.shape[0]
    a = p_class.T - np.eye(n)
    a[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    pi = np.linalg.solve(a, b)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def evaluate_infinite_all(game: StochasticGame, profile: EpisodicStrategy) -> np.ndarray:
    """Normalized infinite-horizon utilities from every start state; (S, 2).

    Discounted agents: exact linear solve of the policy-evaluation system
    on extended states, scaled by (1 - gamma).  Time-averaged agents:
    long-run average reward of the induced chain, which requires a single
    recurrent class (raises MultichainError otherwise) and is then
    start-state independent.
    """
    m_len = profile.episode_len
    p_bar, r_bar = _induced_chain(game, profile)
    size = p_bar.shape[0]
    out = np.zeros((game.n_states, 2))
    start_rows = np.arange(game.n_states) * m_len  # substage 0
    classes = None
    for i in (0, 1):
        gamma = game.gammas[i]
        if gamma < 1.0:
            w = np.linalg.solve(np.eye(size) - gamma * p_bar, r_bar[:, i])
            out[:, i] = (1.0 - gamma) * w[start_rows]
        else:
            if classes is None:
                classes = _recurrent_classes(p_bar, m_len)
            if len(classes) != 1:
                raise MultichainError(classes)
            idx = np.array([s * m_len + m for s, m in classes[0]])
            pi = _stationary_distribution(p_bar[np.ix_(idx, idx)])
            out[:, i] = float(pi @ r_bar[idx, i])
    return out


def evaluate_infinite(game: StochasticGame, profile: EpisodicStrategy, start_state: int) -> np.ndarray:
    """Per-agent normalized infinite-horizon utilities from one start state."""
    return evaluate_infinite_all(game, profile)[start_state]


def _best_response_mdp(game: StochasticGame, profile: EpisodicStrategy, agent: int):
    """Agent's MDP on extended states against the episodic opponent.

    Returns (R, P) with R shape (S, M, A) and P shape (S, M, A, S); the
    substage advances deterministically so only the state marginal is kept.
    """
    m_len = profile.episode_len
    opp = profile.tables[1 - agent]
    n_a = game.n_actions[agent]
    r = np.zeros((game.n_states, m_len, n_a))
    p = np.zeros((game.n_states, m_len, n_a, game.n_states))
    for m in range(m_len):
        if agent == 0:
            r[:, m] = np.einsum("sab,sb->sa", game.rewards[0], opp[:, m])
            p[:, m] = np.einsum("sabt,sb->sat", game.transitions, opp[:, m])
        else:
            r[:, m] = np.einsum("sab,sa->sb", game.rewards[1], opp[:, m])
            p[:, m] = np.einsum("sabt,sa->sbt", game.transitions, opp[:, m])
    return r, p


def _mdp_support_graph(p: np.ndarray) -> DirectedGraph:
    n_s, m_len = p.shape[0], p.shape[1]
    adj = []
    for s in range(n_s):
        for m in range(m_len):
            nxt = (m + 1) % m_len
            succ = np.nonzero(p[s, m].max(axis=0) > 0.0)[0]
            adj.append(tuple(int(t) * m_len + nxt for t in succ))
    return DirectedGraph(n=n_s * m_len, adj=tuple(adj))


def _discounted_best_response_values(r, p, gamma, tol=VALUE_ITER_TOL):
    """Value iteration on the extended-state MDP; sup error below tol."""
    n_s, m_len = r.shape[0], r.shape[1]
    v = np.zeros((n_s, m_len))
    stop = tol * (1.0 - gamma) / (2.0 * gamma) if gamma > 0.5 else tol
    for _ in range(2_000_000):
        new = np.empty_like(v)
        for m in range(m_len):
            cont = p[:, m] @ v[:, (m + 1) % m_len]
            new[:, m] = (r[:, m] + gamma * cont).max(axis=1)
        diff = float(np.max(np.abs(new - v)))
        v = new
        if diff <= stop:
            return v
    raise RuntimeError("value iteration failed to converge")


def _average_best_response_gain(r, p, span_tol=1e-11, max_iter=500_000):
    """Optimal average reward by relative value iteration.

    The extended chain is periodic (every closed walk has length a
    multiple of M), so the Bellman operator is applied to the lazy kernel
    0.5 I + 0.5 P, which leaves the optimal gain and maximizers unchanged
    while restoring aperiodicity.  Requires the MDP support graph to be
    strongly connected (communicating), which makes the optimal gain
    constant; raises MultichainError otherwise.
    """
    support = _mdp_support_graph(p)
    comps = strongly_connected_components(support)
    if len(comps) != 1:
        m_len = r.shape[1]
        raise MultichainError([[divmod(v, m_len) for v in comp] for comp in comps])
    n_s, m_len = r.shape[0], r.shape[1]
    h = np.zeros((n_s, m_len))
    for _ in range(max_iter):
        th = np.empty_like(h)
        for m in range(m_len):
            cont = p[:, m] @ h[:, (m + 1) % m_len]
            th[:, m] = (r[:, m] + 0.5 * h[:, m, None] + 0.5 * cont).max(axis=1)
        diff = th - h
        lo, hi = float(diff.min()), float(diff.max())
        h = th - th.flat[0]
        if hi - lo <= span_tol:
            return 0.5 * (lo + hi)
    raise RuntimeError("relative value iteration failed to converge")


def infinite_exploitability(
    game: StochasticGame, profile: EpisodicStrategy, agent: int
) -> float:
    """How much the agent gains by best-responding to the episodic opponent.

    The opponent plays a fixed episodic strategy, so the agent faces a
    stationary MDP on extended states and its best behavioral strategy is
    attained by a stationary policy there; the computation below is exact
    up to the stated iteration tolerances.  Returns
    max_s [BR utility from (s, 0)] - [profile utility from (s, 0)],
    floored at 0 against round-off.
    """
    if agent not in (0, 1):
        raise ValueError("agent must be 0 or 1")
    r, p = _best_response_mdp(game, profile, agent)
    own = evaluate_infinite_all(game, profile)[:, agent]
    gamma = game.gammas[agent]
    if gamma < 1.0:
        v = _discounted_best_response_values(r, p, gamma)
        br = (1.0 - gamma) * v[:, 0]
    else:
        gain = _average_best_response_gain(r, p)
        br = np.full(game.n_states, gain)
    return max(0.0, float(np.max(br - own)))


@dataclass(frozen=True)
class BoundReport:
    """Per-agent error-bound ledger for a candidate episodic profile.

    eps combines the measured best-response gap eps_hat with the
    start-state spread delta; eps_smoothed replaces eps_hat with the
    exploration cost tau * log|A^i| * sum_k gamma^k and is present only
    when a temperature is supplied.  exploit_finite equals eps_hat by
    definition; exploit_infinite is the exact infinite-horizon
    exploitability that eps must dominate.
    """

    episode_len: int
    gammas: tuple[float, float]
    delta: tuple[float, float]
    eps_hat: tuple[float, float]
    eps: tuple[float, float]
    xi: tuple[float, float] | None
    eps_smoothed: tuple[float, float] | None
    exploit_finite: tuple[float, float]
    exploit_infinite: tuple[float, float]

    def to_dict(self) -> dict:
        return {
            "M": self.episode_len,
            "gammas": list(self.gammas),
            "delta": list(self.delta),
            "eps_hat": list(self.eps_hat),
            "eps": list(self.eps),
            "xi": list(self.xi) if self.xi is not None else None,
            "eps_smoothed": list(self.eps_smoothed) if self.eps_smoothed is not None else None,
            "exploit_finite": list(self.exploit_finite),
            "exploit_infinite": list(self.exploit_infinite),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "BoundReport":
        def pair(key):
            val = doc[key]
            return tuple(float(x) for x in val) if val is not None else None

        return cls(
            episode_len=int(doc["M"]),
            gammas=pair("gammas"),
            delta=pair("delta"),
            eps_hat=pair("eps_hat"),
            eps=pair("eps"),
            xi=pair("xi") if doc.get("xi") is not None else None,
            eps_smoothed=pair("eps_smoothed") if doc.get("eps_smoothed") is not None else None,
            exploit_finite=pair("exploit_finite"),
            exploit_infinite=pair("exploit_infinite"),
        )


def bound_report(
    game: StochasticGame, episode_len: int, profile: EpisodicStrategy, tau=None
) -> BoundReport:
    """Measure delta and eps_hat for the profile and evaluate the bounds."""
    d = delta(game, episode_len, profile)
    eps_hat = tuple(
        finite_best_response(game, episode_len, profile, i).eps_hat for i in (0, 1)
    )
    eps = tuple(
        epsilon_bound(d[i], eps_hat[i], game.gammas[i], episode_len) for i in (0, 1)
    )
    if tau is not None:
        taus = _tau_pair(tau)
        xi = tuple(taus[i] * math.log(game.n_actions[i]) for i in (0, 1))
        eps_smoothed = tuple(
            epsilon_bound_learning(d[i], taus[i], game.n_actions[i], game.gammas[i], episode_len)
            for i in (0, 1)
        )
    else:
        xi = None
        eps_smoothed = None
    exploit_inf = tuple(infinite_exploitability(game, profile, i) for i in (0, 1))
    return BoundReport(
        episode_len=int(episode_len),
        gammas=game.gammas,
        delta=(float(d[0]), float(d[1])),
        eps_hat=eps_hat,
        eps=eps,
        xi=xi,
        eps_smoothed=eps_smoothed,
        exploit_finite=eps_hat,
        exploit_infinite=exploit_inf,
    )
