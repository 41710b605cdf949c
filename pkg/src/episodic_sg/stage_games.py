"""Matrix-game primitives shared by the solvers and the learning dynamics.

Covers the Boltzmann (entropy-regularized) best response br(q)(a)
propto exp(q(a)/tau), structural predicates (zero-sum, potential,
best-response-preserving payoff offsets), exact minimax solving by linear
programming, and the smoothed-response fixed point

    qbar^1(a1) = u^1(a1, br(qbar^2)),   qbar^2(a2) = u^2(br(qbar^1), a2),

which is both the limit object of the learning dynamics and the per-stage
subproblem of backward induction.

Payoff matrices are indexed [a1][a2] for both agents.  Tie-breaking is by
lowest action index throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

ZERO_SUM_TOL = 1e-12
POTENTIAL_TOL = 1e-9
OFFSET_TOL = 1e-9

_LP_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


class LogitSolveError(RuntimeError):
    """Fixed-point search failed; carries the last residual reached."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


@dataclass(frozen=True)
class MatrixGame:
    """Two-agent matrix game with payoffs u1[a1, a2], u2[a1, a2]."""

    u1: np.ndarray
    u2: np.ndarray

    def __post_init__(self):
        u1 = np.asarray(self.u1, dtype=float)
        u2 = np.asarray(self.u2, dtype=float)
        if u1.ndim != 2 or u1.shape != u2.shape:
            raise ValueError(f"inconsistent payoff shapes {u1.shape} vs {u2.shape}")
        if not (np.all(np.isfinite(u1)) and np.all(np.isfinite(u2))):
            raise ValueError("payoffs must be finite")
        object.__setattr__(self, "u1", u1)
        object.__setattr__(self, "u2", u2)
        u1.setflags(write=False)
        u2.setflags(write=False)

    @property
    def shape(self) -> tuple[int, int]:
        return self.u1.shape


def smoothed_best_response(q, tau: float) -> np.ndarray:
    """Boltzmann distribution over actions, br(a) propto exp(q(a)/tau).

    Computed with max-subtraction so arbitrarily scaled payoff vectors are
    safe.  The result is the unique maximizer of q(mu) + tau * H(mu) over
    the simplex.
    """
    if tau <= 0.0:
        raise ValueError(f"temperature must be positive, got {tau}")
    q = np.asarray(q, dtype=float)
    if not np.all(np.isfinite(q)):
        raise ValueError("payoff vector must be finite")
    z = (q - q.max()) / tau
    w = np.exp(z)
    return w / w.sum()


def entropy_gap(q, tau: float) -> float:
    """max_a q(a) - q(br(q)): the payoff given up to exploration.

    Lies in [0, tau * log |A|].
    """
    q = np.asarray(q, dtype=float)
    br = smoothed_best_response(q, tau)
    return max(0.0, float(q.max() - br @ q))


def boltzmann_floor(q, tau: float) -> float:
    """Lower bound exp(-2 max|q| / tau) / |A| on every br(q) probability."""
    q = np.asarray(q, dtype=float)
    qbar = float(np.max(np.abs(q))) if q.size else 0.0
    return math.exp(-2.0 * qbar / tau) / q.size


def is_zero_sum(game: MatrixGame) -> bool:
    """True iff u1 + u2 vanishes identically (within 1e-12)."""
    return float(np.max(np.abs(game.u1 + game.u2))) <= ZERO_SUM_TOL


def recover_potential(game: MatrixGame) -> np.ndarray | None:
    """Recover a potential table Phi, or None when the game has none.

    Phi is integrated along paths from the base profile (0, 0): first down
    agent 1's deviations at a2 = 0, then along agent 2's deviations within
    each row.  The candidate is then verified against every unilateral
    deviation of both agents (tolerance 1e-9), which subsumes all
    four-cycle consistency conditions.  Normalized so Phi[0, 0] = 0.
    """
    u1, u2 = game.u1, game.u2
    phi = np.empty_like(u1)
    phi[:, 0] = u1[:, 0] - u1[0, 0]
    phi[:, 1:] = phi[:, :1] + u2[:, 1:] - u2[:, :1]
    d1 = u1 - phi  # must be constant within each column
    d2 = u2 - phi  # must be constant within each row
    err1 = float(np.max(d1.max(axis=0) - d1.min(axis=0)))
    err2 = float(np.max(d2.max(axis=1) - d2.min(axis=1)))
    if max(err1, err2) > POTENTIAL_TOL:
        return None
    return phi


def strategic_equivalence_offset(
    game: MatrixGame, base: MatrixGame
) -> tuple[np.ndarray, np.ndarray] | None:
    """Opponent-action offsets (g1, g2) with u^i = base.u^i + g^i(a^-i).

    Only unit payoff scaling is considered: the Boltzmann response is not
    invariant under rescaling (it changes the effective temperature), so
    this is the form under which best responses provably coincide.
    Returns (g1 over a2, g2 over a1) or None.
    """
    if game.shape != base.shape:
        raise ValueError("games must have the same shape")
    d1 = game.u1 - base.u1
    g1 = d1[0, :].copy()
    if float(np.max(np.abs(d1 - g1[None, :]))) > OFFSET_TOL:
        return None
    d2 = game.u2 - base.u2
    g2 = d2[:, 0].copy()
    if float(np.max(np.abs(d2 - g2[:, None]))) > OFFSET_TOL:
        return None
    return g1, g2


@dataclass(frozen=True)
class ZeroSumSolution:
    value: float
    row: np.ndarray
    col: np.ndarray


def solve_zero_sum(game: MatrixGame) -> ZeroSumSolution:
    """Exact minimax value and optimal mixed strategies of a zero-sum game.

    Solves the row player's max-min LP and the column player's min-max LP
    independently and cross-checks the two values (they must agree by LP
    duality); profiles are renormalized against solver round-off.
    """
    if not is_zero_sum(game):
        raise ValueError("solve_zero_sum requires u1 + u2 == 0")
    u = game.u1
    n_row, n_col = u.shape

    # row player: maximize v subject to u^T x >= v, x in simplex
    c = np.zeros(n_row + 1)
    c[-1] = -1.0
    a_ub = np.hstack([-u.T, np.ones((n_col, 1))])
    a_eq = np.hstack([np.ones((1, n_row)), np.zeros((1, 1))])
    bounds = [(0.0, None)] * n_row + [(None, None)]
    res_row = linprog(
        c, A_ub=a_ub, b_ub=np.zeros(n_col), A_eq=a_eq, b_eq=np.ones(1),
        bounds=bounds, method="highs", options=_LP_OPTIONS,
    )
    if not res_row.success:
        raise RuntimeError(f"row LP failed: {res_row.message}")

    # column player: minimize w subject to u y <= w, y in simplex
    c = np.zeros(n_col + 1)
    c[-1] = 1.0
    a_ub = np.hstack([u, -np.ones((n_row, 1))])
    a_eq = np.hstack([np.ones((1, n_col)), np.zeros((1, 1))])
    bounds = [(0.0, None)] * n_col + [(None, None)]
    res_col = linprog(
        c, A_ub=a_ub, b_ub=np.zeros(n_row), A_eq=a_eq, b_eq=np.ones(1),
        bounds=bounds, method="highs", options=_LP_OPTIONS,
    )
    if not res_col.success:
        raise RuntimeError(f"column LP failed: {res_col.message}")

    v_row = float(res_row.x[-1])
    v_col = float(res_col.x[-1])
    if abs(v_row - v_col) > 1e-9:
        raise RuntimeError(
            f"LP duality gap {abs(v_row - v_col):.3g} exceeds 1e-9"
        )
    x = np.clip(res_row.x[:-1], 0.0, None)
    y = np.clip(res_col.x[:-1], 0.0, None)
    return ZeroSumSolution(value=v_row, row=x / x.sum(), col=y / y.sum())


@dataclass(frozen=True)
class LogitFixedPoint:
    q1: np.ndarray
    q2: np.ndarray
    residual: float
    iterations: int

    def profiles(self, tau) -> tuple[np.ndarray, np.ndarray]:
        t1, t2 = _tau_pair(tau)
        return smoothed_best_response(self.q1, t1), smoothed_best_response(self.q2, t2)


def _tau_pair(tau) -> tuple[float, float]:
    if np.isscalar(tau):
        return float(tau), float(tau)
    t1, t2 = tau
    return float(t1), float(t2)


def _targets(game: MatrixGame, q1, q2, t1, t2):
    x = smoothed_best_response(q1, t1)
    y = smoothed_best_response(q2, t2)
    return game.u1 @ y, x @ game.u2, x, y


def _residual(q1, q2, f1, f2) -> float:
    return max(float(np.max(np.abs(q1 - f1))), float(np.max(np.abs(q2 - f2))))


def _newton_polish(game, q1, q2, t1, t2, tol, max_iter=100):
    """Newton iterations on F(q) = q - target(q); returns (q1, q2, res, its)."""
    n1, n2 = game.shape
    for it in range(max_iter):
        f1, f2, x, y = _targets(game, q1, q2, t1, t2)
        res = _residual(q1, q2, f1, f2)
        if res <= tol:
            return q1, q2, res, it
        dx = (np.diag(x) - np.outer(x, x)) / t1
        dy = (np.diag(y) - np.outer(y, y)) / t2
        jac = np.eye(n1 + n2)
        jac[:n1, n1:] -= game.u1 @ dy
        jac[n1:, :n1] -= game.u2.T @ dx
        rhs = np.concatenate([f1 - q1, f2 - q2])
        try:
            step = np.linalg.solve(jac, rhs)
        except np.linalg.LinAlgError:
            break
        # backtrack if the residual refuses to decrease
        scale = 1.0
        for _ in range(40):
            c1 = q1 + scale * step[:n1]
            c2 = q2 + scale * step[n1:]
            g1, g2, _, _ = _targets(game, c1, c2, t1, t2)
            if _residual(c1, c2, g1, g2) < res:
                q1, q2 = c1, c2
                break
            scale *= 0.5
        else:
            break
    f1, f2, _, _ = _targets(game, q1, q2, t1, t2)
    return q1, q2, _residual(q1, q2, f1, f2), max_iter


def logit_fixed_point(
    game: MatrixGame, tau, tol: float = 1e-10, max_iter: int = 50_000
) -> LogitFixedPoint:
    """Solve qbar^i = u^i(., br^j(qbar^j)) for both agents.

    Runs the damped iteration q <- (1 - beta) q + beta target(q) with
    beta = 0.5 first; the iteration is a contraction for large tau but can
    orbit the fixed point when tau is small relative to the payoff scale,
    so on stagnation the solver switches to Newton's method with a
    temperature continuation (anneal tau downward by halving, warm-starting
    each level).  Raises LogitSolveError with the last residual if neither
    phase reaches tol.

    tau may be a scalar or a per-agent pair.
    """
    t1, t2 = _tau_pair(tau)
    if t1 <= 0.0 or t2 <= 0.0:
        raise ValueError("temperatures must be positive")
    n1, n2 = game.shape
    q1 = game.u1 @ np.full(n2, 1.0 / n2)
    q2 = np.full(n1, 1.0 / n1) @ game.u2
    scale = max(1.0, float(np.max(np.abs(game.u1))), float(np.max(np.abs(game.u2))))

    damped_cap = min(max_iter, 5_000)
    total_iters = 0
    best = math.inf
    stall = 0
    for _ in range(damped_cap):
        f1, f2, _, _ = _targets(game, q1, q2, t1, t2)
        res = _residual(q1, q2, f1, f2)
        total_iters += 1
        if res <= tol:
            return LogitFixedPoint(q1, q2, res, total_iters)
        if res < best - 1e-16:
            best, stall = res, 0
        else:
            stall += 1
        if stall > 50 or res > 1e6 * scale:
            break
        q1 = 0.5 * (q1 + f1)
        q2 = 0.5 * (q2 + f2)

    # temperature continuation: at tau comparable to the payoff scale the
    # damped map contracts, so walk down from there with Newton polish.
    tau_hi = max(scale, t1, t2)
    levels1 = [max(t1, tau_hi * 0.5**k) for k in range(200)]
    levels2 = [max(t2, tau_hi * 0.5**k) for k in range(200)]
    q1 = game.u1 @ np.full(n2, 1.0 / n2)
    q2 = np.full(n1, 1.0 / n1) @ game.u2
    res = math.inf
    for l1, l2 in zip(levels1, levels2):
        for _ in range(200):
            f1, f2, _, _ = _targets(game, q1, q2, l1, l2)
            total_iters += 1
            if _residual(q1, q2, f1, f2) <= max(tol, 1e-12):
                break
            q1 = 0.5 * (q1 + f1)
            q2 = 0.5 * (q2 + f2)
        q1, q2, res, its = _newton_polish(game, q1, q2, l1, l2, tol)
        total_iters += its
        if l1 == t1 and l2 == t2:
            break
    if res <= tol:
        return LogitFixedPoint(q1, q2, res, total_iters)
    raise LogitSolveError(
        f"no fixed point to residual {tol:g} (reached {res:.3g})", residual=res
    )
