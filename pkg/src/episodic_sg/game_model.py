"""Two-agent finite stochastic games and their episode-extended state space.

A game is a tuple (S, A^1, A^2, r^1, r^2, p, gamma^1, gamma^2): a finite
state set, per-agent finite action sets, reward tensors r^i[s, a1, a2], a
transition kernel p[s, a1, a2, s'], and per-agent discount factors in
(0, 1], where gamma^i = 1 selects the time-averaged criterion.

Episodes of length M extend the state space to pairs (s, m) with substage
m in {0, ..., M-1} advancing cyclically each stage.  Strategies contingent
on (s, m) are exactly the M-periodic (episodic) strategies of the
underlying game; for M = 1 they coincide with stationary strategies.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .stage_games import MatrixGame, is_zero_sum, recover_potential

ROW_SUM_TOL = 1e-9
EXACT_TOL = 1e-12

# per-state payoff structure labels
LABEL_ZERO_SUM = "zero-sum"
LABEL_IDENTICAL = "identical-interest"
LABEL_POTENTIAL = "potential"
LABEL_NEITHER = "neither"

# whole-game labels
CASE_ZERO_SUM = "zero-sum-SG"
CASE_IDENTICAL = "identical-interest-SG"
CASE_SWITCHING = "switching-controller"
CASE_UNSUPPORTED = "unsupported"


class GameFormatError(ValueError):
    """Raised when a game document cannot be parsed at all."""


class GameValidationError(ValueError):
    """Raised when a structurally parseable game violates an invariant."""


@dataclass(frozen=True)
class StochasticGame:
    """Immutable two-agent stochastic game.

    rewards has shape (2, S, A1, A2) and transitions (S, A1, A2, S); both
    are made read-only on construction so instances can be shared freely.
    """

    states: tuple[str, ...]
    actions: tuple[tuple[str, ...], tuple[str, ...]]
    gammas: tuple[float, float]
    rewards: np.ndarray
    transitions: np.ndarray

    def __post_init__(self):
        states = tuple(str(s) for s in self.states)
        actions = tuple(tuple(str(a) for a in acts) for acts in self.actions)
        if len(actions) != 2:
            raise GameValidationError("expected action sets for exactly 2 agents")
        gammas = tuple(float(g) for g in self.gammas)
        rewards = np.ascontiguousarray(np.asarray(self.rewards, dtype=float))
        transitions = np.ascontiguousarray(np.asarray(self.transitions, dtype=float))
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "actions", actions)
        object.__setattr__(self, "gammas", gammas)
        object.__setattr__(self, "rewards", rewards)
        object.__setattr__(self, "transitions", transitions)
        self._validate()
        rewards.setflags(write=False)
        transitions.setflags(write=False)

    def _validate(self):
        n_s = len(self.states)
        n_a = (len(self.actions[0]), len(self.actions[1]))
        if n_s < 1:
            raise GameValidationError("need at least one state")
        if min(n_a) < 1:
            raise GameValidationError("each agent needs at least one action")
        if len(self.gammas) != 2:
            raise GameValidationError("expected exactly 2 discount factors")
        for i, g in enumerate(self.gammas):
            if not (0.0 < g <= 1.0):
                raise GameValidationError(
                    f"gamma[{i}] = {g!r} outside (0, 1]"
                )
        expect_r = (2, n_s, n_a[0], n_a[1])
        if self.rewards.shape != expect_r:
            raise GameValidationError(
                f"rewards shape {self.rewards.shape} != expected {expect_r}"
            )
        expect_p = (n_s, n_a[0], n_a[1], n_s)
        if self.transitions.shape != expect_p:
            raise GameValidationError(
                f"transitions shape {self.transitions.shape} != expected {expect_p}"
            )
        if not np.all(np.isfinite(self.rewards)):
            raise GameValidationError("rewards contain non-finite entries")
        if np.any(self.transitions < 0.0) or np.any(self.transitions > 1.0):
            bad = np.argwhere((self.transitions < 0.0) | (self.transitions > 1.0))[0]
            raise GameValidationError(
                f"transition probability outside [0, 1] at (s={bad[0]}, a1={bad[1]}, a2={bad[2]})"
            )
        sums = self.transitions.sum(axis=3)
        off = np.abs(sums - 1.0)
        if np.any(off > ROW_SUM_TOL):
            s, a1, a2 = np.unravel_index(np.argmax(off), off.shape)
            raise GameValidationError(
                f"transition row (s={s}, a1={a1}, a2={a2}) sums to {sums[s, a1, a2]:.12g}"
            )

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_actions(self) -> tuple[int, int]:
        return (len(self.actions[0]), len(self.actions[1]))

    def stage_game(self, s: int) -> MatrixGame:
        """Matrix game induced by the rewards at state s."""
        return MatrixGame(self.rewards[0, s], self.rewards[1, s])


def load_game(text: str) -> StochasticGame:
    """Parse and validate a JSON game document.

    Schema: {"states": [str], "actions": [[str], [str]], "gammas": [g1, g2],
    "rewards": [r1, r2] each indexed [s][a1][a2],
    "transitions": [s][a1][a2][s_next]}.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise GameFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise GameFormatError("top-level value must be an object")
    missing = [k for k in ("states", "actions", "gammas", "rewards", "transitions") if k not in doc]
    if missing:
        raise GameFormatError(f"missing keys: {', '.join(missing)}")
    try:
        rewards = np.asarray(doc["rewards"], dtype=float)
        transitions = np.asarray(doc["transitions"], dtype=float)
        gammas = tuple(float(g) for g in doc["gammas"])
        actions = tuple(tuple(a) for a in doc["actions"])
    except (TypeError, ValueError) as exc:
        raise GameFormatError(f"malformed field: {exc}") from exc
    if len(actions) != 2 or len(gammas) != 2:
        raise GameFormatError("'actions' and 'gammas' must each have 2 entries")
    return StochasticGame(
        states=tuple(doc["states"]),
        actions=actions,
        gammas=gammas,
        rewards=rewards,
        transitions=transitions,
    )


def game_to_document(game: StochasticGame) -> dict:
    """Inverse of load_game, as a JSON-ready dict."""
    return {
        "states": list(game.states),
        "actions": [list(a) for a in game.actions],
        "gammas": list(game.gammas),
        "rewards": game.rewards.tolist(),
        "transitions": game.transitions.tolist(),
    }


@dataclass(frozen=True)
class StageClassification:
    """Per-state payoff structure plus the whole-game label.

    state_labels[s] is one of {"zero-sum", "identical-interest",
    "potential", "neither"}; potentials[s] holds the recovered potential
    table (normalized to 0 at action (0, 0)) whenever one exists,
    including for identical-interest states.  controllers[s] is the agent
    index (0 or 1) whose action alone determines the transition kernel at
    s, or None if both matter; a kernel that ignores both actions counts
    as controlled, with agent 0 as the witness.
    """

    state_labels: tuple[str, ...]
    zero_sum_states: tuple[bool, ...]
    potentials: tuple[np.ndarray | None, ...]
    controllers: tuple[int | None, ...]
    overall: str

    def to_dict(self) -> dict:
        return {
            "overall": self.overall,
            "state_labels": list(self.state_labels),
            "zero_sum_states": list(self.zero_sum_states),
            "potentials": [p.tolist() if p is not None else None for p in self.potentials],
            "controllers": list(self.controllers),
        }


def _controller(p_s: np.ndarray) -> int | None:
    # p_s has shape (A1, A2, S); independence is an exact structural
    # property of the input kernel, so the tolerance is machine-level.
    indep_a2 = float(np.max(np.abs(p_s - p_s[:, :1, :]))) <= EXACT_TOL
    indep_a1 = float(np.max(np.abs(p_s - p_s[:1, :, :]))) <= EXACT_TOL
    if indep_a2:
        return 0
    if indep_a1:
        return 1
    return None


def classify(game: StochasticGame) -> StageClassification:
    """Label every state's payoff structure and derive the game-level case.

    The game-level label is "zero-sum-SG" (all states zero-sum, shared
    gamma), "identical-interest-SG" (all states identical-interest, shared
    gamma), "switching-controller" (every state zero-sum or potential and
    every state's kernel controlled by a single agent; gammas may differ),
    or "unsupported".
    """
    labels, zs_flags, pots, ctrls = [], [], [], []
    identical_flags = []
    for s in range(game.n_states):
        g = game.stage_game(s)
        zs = is_zero_sum(g)
        identical = float(np.max(np.abs(g.u1 - g.u2))) <= EXACT_TOL
        phi = recover_potential(g)
        if zs:
            label = LABEL_ZERO_SUM
        elif identical:
            label = LABEL_IDENTICAL
        elif phi is not None:
            label = LABEL_POTENTIAL
        else:
            label = LABEL_NEITHER
        labels.append(label)
        zs_flags.append(zs)
        identical_flags.append(identical)
        pots.append(phi)
        ctrls.append(_controller(game.transitions[s]))

    shared_gamma = game.gammas[0] == game.gammas[1]
    if all(zs_flags) and shared_gamma:
        overall = CASE_ZERO_SUM
    elif all(identical_flags) and shared_gamma:
        overall = CASE_IDENTICAL
    elif all(z or (p is not None) for z, p in zip(zs_flags, pots)) and all(
        c is not None for c in ctrls
    ):
        overall = CASE_SWITCHING
    else:
        overall = CASE_UNSUPPORTED
    return StageClassification(
        state_labels=tuple(labels),
        zero_sum_states=tuple(zs_flags),
        potentials=tuple(pots),
        controllers=tuple(ctrls),
        overall=overall,
    )


@dataclass(frozen=True)
class ExtendedSpace:
    """Enumeration of the extended states (s, m), m in {0..M-1}.

    Flat index is s * M + m; the substage successor is (m + 1) mod M.
    """

    n_states: int
    episode_len: int

    def __post_init__(self):
        if self.episode_len < 1:
            raise ValueError(f"episode length must be >= 1, got {self.episode_len}")
        if self.n_states < 1:
            raise ValueError("need at least one state")

    @property
    def size(self) -> int:
        return self.n_states * self.episode_len

    def flatten(self, s: int, m: int) -> int:
        if not (0 <= s < self.n_states and 0 <= m < self.episode_len):
            raise IndexError(f"extended state ({s}, {m}) out of range")
        return s * self.episode_len + m

    def unflatten(self, idx: int) -> tuple[int, int]:
        if not (0 <= idx < self.size):
            raise IndexError(f"flat index {idx} out of range")
        return divmod(idx, self.episode_len)

    def next_substage(self, m: int) -> int:
        return (m + 1) % self.episode_len


def extend(game: StochasticGame, episode_len: int) -> ExtendedSpace:
    """Extended index space S x {0..M-1} for episodes of length M."""
    return ExtendedSpace(game.n_states, episode_len)
