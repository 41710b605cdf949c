"""Canonical small games and random-instance generators for experiments."""

from __future__ import annotations

import numpy as np

from .game_model import StochasticGame
from .graphs import DirectedGraph

_PENNIES = [[1.0, -1.0], [-1.0, 1.0]]


def matching_pennies(gamma: float = 0.9) -> StochasticGame:
    """Single state with a self-loop; zero-sum 2x2 stage rewards."""
    r1 = np.array([_PENNIES])
    return StochasticGame(
        states=("s0",),
        actions=(("H", "T"), ("H", "T")),
        gammas=(gamma, gamma),
        rewards=np.stack([r1, -r1]),
        transitions=np.ones((1, 2, 2, 1)),
    )


def two_state_swap_zero_sum(gamma: float = 0.9) -> StochasticGame:
    """Deterministic swap between two states, zero-sum rewards per state."""
    r1 = np.array([_PENNIES, [[0.5, -0.5], [-1.0, 1.0]]])
    p = np.zeros((2, 2, 2, 2))
    p[0, :, :, 1] = 1.0
    p[1, :, :, 0] = 1.0
    return StochasticGame(
        states=("s0", "s1"),
        actions=(("a", "b"), ("a", "b")),
        gammas=(gamma, gamma),
        rewards=np.stack([r1, -r1]),
        transitions=p,
    )


def switching_controller_game() -> StochasticGame:
    """Two-state game with alternating single controllers and mixed criteria.

    State 0 is a zero-sum stage game whose kernel depends only on agent
    1's action; state 1 is an identical-interest (hence potential) stage
    game whose kernel depends only on agent 2's action.  Agent 1 is
    time-averaged (gamma = 1), agent 2 discounted (gamma = 0.8).  All
    transition rows are strictly positive, so the state graph is complete
    with self-loops and every episodic extension is strongly connected.
    """
    r1_s0 = np.array([[0.25, 0.05], [-0.05, -0.2]])
    shared_s1 = np.array([[0.3, 0.05], [0.1, -0.1]])
    rewards = np.stack(
        [np.stack([r1_s0, shared_s1]), np.stack([-r1_s0, shared_s1])]
    )
    p = np.zeros((2, 2, 2, 2))
    p[0, 0, :, :] = [0.9, 0.1]
    p[0, 1, :, :] = [0.2, 0.8]
    p[1, :, 0, :] = [0.3, 0.7]
    p[1, :, 1, :] = [0.85, 0.15]
    return StochasticGame(
        states=("s0", "s1"),
        actions=(("a", "b"), ("a", "b")),
        gammas=(1.0, 0.8),
        rewards=rewards,
        transitions=p,
    )


def skew_symmetric_game(gamma: float = 0.9, n_states: int = 2, seed: int = 7) -> StochasticGame:
    """Zero-sum game whose per-state reward matrices are skew-symmetric.

    r1[s] = -r1[s]^T and r2 = -r1, so every stage game has value zero
    regardless of the transition structure, which is drawn at random with
    strictly positive rows.
    """
    rng = np.random.default_rng(seed)
    r1 = np.empty((n_states, 2, 2))
    for s in range(n_states):
        a = rng.uniform(-1.0, 1.0)
        r1[s] = [[0.0, a], [-a, 0.0]]
    p = rng.dirichlet(np.ones(n_states) * 2.0, size=(n_states, 2, 2))
    p = np.clip(p, 1e-3, None)
    p /= p.sum(axis=3, keepdims=True)
    return StochasticGame(
        states=tuple(f"s{i}" for i in range(n_states)),
        actions=(("a", "b"), ("a", "b")),
        gammas=(gamma, gamma),
        rewards=np.stack([r1, -r1]),
        transitions=p,
    )


def random_zero_sum_game(
    rng: np.random.Generator,
    n_states: int = 2,
    n_actions: tuple[int, int] = (2, 2),
    gamma: float = 0.9,
) -> StochasticGame:
    """Per-state zero-sum rewards in [-1, 1], Dirichlet transition rows."""
    n1, n2 = n_actions
    r1 = rng.uniform(-1.0, 1.0, size=(n_states, n1, n2))
    p = rng.dirichlet(np.ones(n_states), size=(n_states, n1, n2))
    return StochasticGame(
        states=tuple(f"s{i}" for i in range(n_states)),
        actions=(
            tuple(f"a{i}" for i in range(n1)),
            tuple(f"b{i}" for i in range(n2)),
        ),
        gammas=(gamma, gamma),
        rewards=np.stack([r1, -r1]),
        transitions=p,
    )


def random_game(
    rng: np.random.Generator,
    n_states: int = 2,
    n_actions: tuple[int, int] = (2, 2),
    gammas: tuple[float, float] = (0.9, 0.9),
) -> StochasticGame:
    """General-sum rewards in [-1, 1], Dirichlet transition rows."""
    n1, n2 = n_actions
    rewards = rng.uniform(-1.0, 1.0, size=(2, n_states, n1, n2))
    p = rng.dirichlet(np.ones(n_states), size=(n_states, n1, n2))
    return StochasticGame(
        states=tuple(f"s{i}" for i in range(n_states)),
        actions=(
            tuple(f"a{i}" for i in range(n1)),
            tuple(f"b{i}" for i in range(n2)),
        ),
        gammas=gammas,
        rewards=rewards,
        transitions=p,
    )


def random_digraph(rng: np.random.Generator, n_vertices: int, edge_prob: float) -> DirectedGraph:
    """Erdos-Renyi digraph; every vertex keeps at least one out-edge."""
    adj = []
    for v in range(n_vertices):
        succ = [w for w in range(n_vertices) if rng.random() < edge_prob]
        if not succ:
            succ = [int(rng.integers(n_vertices))]
        adj.append(tuple(succ))
    return DirectedGraph(n=n_vertices, adj=tuple(adj))
