"""Decentralized episodic Q-learning and its single-state specialization.

Each agent keeps a local q-table over (s, m, own action) and a value
table over (s, m), acts by sampling its Boltzmann response at the current
extended state, and updates the previously played entry once the next
extended state is observed:

    qhat = r + gamma * v(s_next, m_next)        if m < M-1,
    qhat = r                                    if m = M-1 (episode boundary),
    q(s, m, a) += alphabar * (qhat - q(s, m, a)),

with the visit-normalized step alphabar = min{1, alpha_c / br(a)} where
alpha_c = alpha0 / (c+1)^rho and c counts completed visits to (s, m).
The normalization makes every action's entry drift at the same expected
rate; the cap at 1 keeps all iterates bounded.

The agent sees only the state sequence, its own actions, and its own
rewards; the pending-transition slot below preserves exactly that
information flow (no peeking at the environment).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .stage_games import smoothed_best_response


@dataclass(frozen=True)
class LearningConfig:
    """Per-agent hyperparameters.

    rho in (0.5, 1] makes the reference steps alpha_c = alpha0 / (c+1)^rho
    square-summable but not summable.
    """

    tau: float = 0.05
    rho: float = 0.7
    alpha0: float = 1.0
    q_init: float = 0.0

    def __post_init__(self):
        if self.tau <= 0.0:
            raise ValueError(f"tau must be positive, got {self.tau}")
        if not (0.5 < self.rho <= 1.0):
            raise ValueError(f"rho must lie in (0.5, 1], got {self.rho}")
        if not (0.0 < self.alpha0 <= 1.0):
            raise ValueError(f"alpha0 must lie in (0, 1], got {self.alpha0}")


def reference_step_size(count: int, config: LearningConfig) -> float:
    """alpha_c = alpha0 / (c+1)^rho for c completed visits."""
    return config.alpha0 / (count + 1) ** config.rho


def step_size(count: int, br_prob: float, config: LearningConfig) -> float:
    """Effective step min{1, alpha_c / br(a)} for the played action.

    Every other (state, action) entry receives step 0 this stage.
    """
    return min(1.0, reference_step_size(count, config) / br_prob)


@dataclass
class AgentTables:
    """One agent's learning state over extended states (s, m)."""

    q: np.ndarray       # (S, M, A)
    v: np.ndarray       # (S, M)
    counts: np.ndarray  # (S, M), completed visits


@dataclass
class _Pending:
    state: int
    substage: int
    action: int
    alpha: float
    reward: float = 0.0


@dataclass
class EpisodicLearner:
    """Reference agent implementing the three-phase stage protocol.

    Per stage k: begin_stage((s, m)) applies the deferred update for the
    previous transition; act(u) samples the Boltzmann response from one
    uniform draw and records the pending step; finish_stage(r) writes the
    value estimate, stores the reward, and counts the visit.  The fast
    simulation loops reproduce this agent exactly (see the tests).
    """

    n_states: int
    episode_len: int
    n_actions: int
    gamma: float
    config: LearningConfig
    tables: AgentTables = field(init=False)
    _pending: _Pending | None = field(init=False, default=None)
    _position: tuple[int, int] | None = field(init=False, default=None)
    _br: np.ndarray | None = field(init=False, default=None)

    def __post_init__(self):
        shape = (self.n_states, self.episode_len, self.n_actions)
        self.tables = AgentTables(
            q=np.full(shape, float(self.config.q_init)),
            v=np.zeros(shape[:2]),
            counts=np.zeros(shape[:2], dtype=np.int64),
        )

    def begin_stage(self, state: int, substage: int):
        """Observe the new extended state; flush the deferred q-update.

        The update target uses the just-observed state's value estimate,
        except across an episode boundary where the continuation is zero.
        """
        if self._position is not None:
            raise RuntimeError("begin_stage called twice without finish_stage")
        if self._pending is not None:
            p = self._pending
            if p.substage < self.episode_len - 1:
                qhat = p.reward + self.gamma * self.tables.v[state, substage]
            else:
                qhat = p.reward
            cell = self.tables.q[p.state, p.substage]
            cell[p.action] += p.alpha * (qhat - cell[p.action])
            self._pending = None
        self._position = (state, substage)

    def act(self, u: float) -> int:
        """Sample from br(q(s, m, .)) using the uniform draw u in [0, 1)."""
        s, m = self._position
        br = smoothed_best_response(self.tables.q[s, m], self.config.tau)
        action = len(br) - 1
        acc = 0.0
        for a, prob in enumerate(br):
            acc += prob
            if u < acc:
                action = a
                break
        alpha = step_size(int(self.tables.counts[s, m]), float(br[action]), self.config)
        self._pending = _Pending(state=s, substage=m, action=action, alpha=alpha)
        self._br = br
        return action

    def update_value(self):
        """v(s, m) <- br . q(s, m, .); all other entries untouched."""
        s, m = self._position
        self.tables.v[s, m] = float(self._br @ self.tables.q[s, m])

    def finish_stage(self, reward: float):
        s, m = self._position
        self.update_value()
        self._pending.reward = float(reward)
        self.tables.counts[s, m] += 1
        self._position = None

    def flush(self, state: int, substage: int):
        """Apply the last pending update as the next begin_stage would."""
        self.begin_stage(state, substage)
        self._position = None

    def induced_profile(self) -> np.ndarray:
        """Boltzmann response of the current q at every extended state."""
        out = np.empty_like(self.tables.q)
        for s in range(self.n_states):
            for m in range(self.episode_len):
                out[s, m] = smoothed_best_response(self.tables.q[s, m], self.config.tau)
        return out


@dataclass(frozen=True)
class PayoffSequence:
    """Exogenous payoff schedule u_k = base + decay^k * perturbation.

    base[i] and perturbation[i] have shape (n_omega, A1, A2); the first
    axis is Nature's move, drawn i.i.d. from a fixed distribution each
    stage.  A constant schedule is decay = 0 or perturbation = None.
    """

    base: tuple[np.ndarray, np.ndarray]
    perturbation: tuple[np.ndarray, np.ndarray] | None = None
    decay: float = 0.0

    def __post_init__(self):
        base = tuple(np.asarray(b, dtype=float) for b in self.base)
        if len(base) != 2 or base[0].shape != base[1].shape or base[0].ndim != 3:
            raise ValueError("base payoffs must be two arrays of shape (n_omega, A1, A2)")
        pert = self.perturbation
        if pert is not None:
            pert = tuple(np.asarray(p, dtype=float) for p in pert)
            if pert[0].shape != base[0].shape or pert[1].shape != base[1].shape:
                raise ValueError("perturbation shape must match base")
        if not (0.0 <= self.decay < 1.0):
            raise ValueError("decay must lie in [0, 1)")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "perturbation", pert)

    @property
    def shape(self) -> tuple[int, int, int]:
        return self.base[0].shape

    def payoffs_at(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        if self.perturbation is None or self.decay == 0.0:
            factor = 1.0 if (self.perturbation is not None and k == 0) else 0.0
        else:
            factor = self.decay**k
        if self.perturbation is None or factor == 0.0:
            return self.base
        return (
            self.base[0] + factor * self.perturbation[0],
            self.base[1] + factor * self.perturbation[1],
        )


@dataclass
class IndividualQRun:
    q: tuple[np.ndarray, np.ndarray]
    snapshots: list[tuple[int, np.ndarray, np.ndarray]]


def run_individual_q_sequence(
    sequence: PayoffSequence,
    nature: np.ndarray,
    config: LearningConfig,
    n_stages: int,
    seed: int,
    snapshot_every: int | None = None,
) -> IndividualQRun:
    """Single-state, single-substage play against a drifting payoff sequence.

    Each stage draws Nature's move, both agents sample their Boltzmann
    responses, and each updates only the played entry toward the realized
    payoff u_k(omega, a1, a2) with the visit-normalized step (the visit
    count here is just the stage index).  This is the episodic learner
    specialized to |S| = 1, M = 1, where the episode-boundary rule removes
    the bootstrap term; the simulation loop for that case reproduces this
    function draw for draw.
    """
    nature = np.asarray(nature, dtype=float)
    n_omega, n1, n2 = sequence.shape
    if nature.shape != (n_omega,):
        raise ValueError("nature distribution length must match payoff tables")
    if abs(float(nature.sum()) - 1.0) > 1e-9 or np.any(nature < 0):
        raise ValueError("nature must be a probability distribution")

    ss = np.random.SeedSequence(seed)
    nature_rng, rng_a, rng_b = (np.random.default_rng(c) for c in ss.spawn(3))
    block = 8192
    nat_u = nature_rng.random(block)
    a_u = rng_a.random(block)
    b_u = rng_b.random(block)
    ni = ai = bi = 0

    nat_cum = np.cumsum(nature).tolist()
    base = [sequence.base[0].tolist(), sequence.base[1].tolist()]
    pert = (
        [sequence.perturbation[0].tolist(), sequence.perturbation[1].tolist()]
        if sequence.perturbation is not None
        else None
    )
    decay = sequence.decay
    factor = 1.0 if pert is not None else 0.0

    import math as _math

    exp = _math.exp
    tau = config.tau
    rho = config.rho
    alpha0 = config.alpha0
    q = [[float(config.q_init)] * n1, [float(config.q_init)] * n2]
    sizes = (n1, n2)
    pending = [None, None]  # (action, alpha)
    prev_payoff = [0.0, 0.0]
    snapshots: list[tuple[int, np.ndarray, np.ndarray]] = []

    for k in range(n_stages):
        if k > 0:
            for i in (0, 1):
                a_prev, alpha = pending[i]
                row = q[i]
                row[a_prev] += alpha * (prev_payoff[i] - row[a_prev])
        if snapshot_every and k % snapshot_every == 0:
            snapshots.append((k, np.array(q[0]), np.array(q[1])))
        # actions from the Boltzmann response of the current q
        actions = [0, 0]
        for i in (0, 1):
            row = q[i]
            mx = max(row)
            ws = [exp((x - mx) / tau) for x in row]
            tot = sum(ws)
            br = [w / tot for w in ws]
            if i == 0:
                if ai == block:
                    a_u = rng_a.random(block)
                    ai = 0
                u = a_u[ai]
                ai += 1
            else:
                if bi == block:
                    b_u = rng_b.random(block)
                    bi = 0
                u = b_u[bi]
                bi += 1
            action = sizes[i] - 1
            acc = 0.0
            for a, prob in enumerate(br):
                acc += prob
                if u < acc:
                    action = a
                    break
            alpha_ref = alpha0 / (k + 1) ** rho
            alpha = min(1.0, alpha_ref / br[action])
            pending[i] = (action, alpha)
            actions[i] = action
        # Nature's move and realized payoffs
        if ni == block:
            nat_u = nature_rng.random(block)
            ni = 0
        u = nat_u[ni]
        ni += 1
        omega = n_omega - 1
        for w, c in enumerate(nat_cum):
            if u < c:
                omega = w
                break
        a0, a1 = actions
        for i in (0, 1):
            val = base[i][omega][a0][a1]
            if pert is not None and factor > 0.0:
                val += factor * pert[i][omega][a0][a1]
            prev_payoff[i] = val
        if pert is not None:
            factor *= decay

    # flush the last pending update
    for i in (0, 1):
        if pending[i] is not None:
            a_prev, alpha = pending[i]
            row = q[i]
            row[a_prev] += alpha * (prev_payoff[i] - row[a_prev])
    final = (np.array(q[0]), np.array(q[1]))
    if snapshot_every:
        snapshots.append((n_stages, final[0].copy(), final[1].copy()))
    return IndividualQRun(q=final, snapshots=snapshots)
