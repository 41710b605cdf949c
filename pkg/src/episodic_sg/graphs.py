"""Reachability structure of a stochastic game and its episodic extension.

The state-transition digraph G has an edge s -> s' whenever some joint
action moves s to s' with positive probability.  The episodic extension
Gbar lives on pairs (s, m): each G-edge is lifted to (s, m) -> (s', (m+1)
mod M).  Strong connectivity of Gbar is what guarantees every extended
state is visited infinitely often by exploring play; it holds whenever G
is strongly connected and some vertex carries a closed walk whose length
is coprime with M.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .game_model import StochasticGame


@dataclass(frozen=True)
class DirectedGraph:
    n: int
    adj: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("need at least one vertex")
        if len(self.adj) != self.n:
            raise ValueError("adjacency size does not match vertex count")
        cleaned = []
        for v, succ in enumerate(self.adj):
            uniq = tuple(sorted(set(int(w) for w in succ)))
            if uniq and (uniq[0] < 0 or uniq[-1] >= self.n):
                raise ValueError(f"successor out of range at vertex {v}")
            cleaned.append(uniq)
        object.__setattr__(self, "adj", tuple(cleaned))


def build_graph(game: StochasticGame) -> DirectedGraph:
    """Edge (s, s') present iff max over joint actions of p(s'|s, a) > 0."""
    reach = game.transitions.max(axis=(1, 2)) > 0.0
    adj = tuple(tuple(np.nonzero(row)[0].tolist()) for row in reach)
    return DirectedGraph(n=game.n_states, adj=adj)


def strongly_connected_components(g: DirectedGraph) -> list[list[int]]:
    """Tarjan's algorithm, iterative to cope with long chains."""
    index = [-1] * g.n
    low = [0] * g.n
    on_stack = [False] * g.n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(g.n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, ei = work[-1]
            if ei == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack[v] = True
            advanced = False
            while ei < len(g.adj[v]):
                w = g.adj[v][ei]
                ei += 1
                if index[w] == -1:
                    work[-1] = (v, ei)
                    work.append((w, 0))
                    advanced = True
                    break
                if on_stack[w]:
                    low[v] = min(low[v], index[w])
            if advanced:
                continue
            work.pop()
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comps


def strongly_connected(g: DirectedGraph) -> bool:
    return len(strongly_connected_components(g)) == 1


def has_coprime_cycle(g: DirectedGraph, episode_len: int) -> tuple[bool, tuple[int, int] | None]:
    """Is there a vertex on a closed walk of length coprime with M?

    Searches the product graph on pairs (vertex, length mod M): a closed
    walk at s with length residue rho exists iff (s, rho) is reachable
    from (s, 0) by at least one step, and gcd(l, M) = gcd(l mod M, M), so
    residues decide the question exactly.  Closed walks rather than simple
    cycles: any closed-walk length is a sum of cycle lengths, which only
    enlarges the achievable residue set consistently with path
    concatenation.  Returns (answer, (vertex, residue) witness or None).
    """
    m = int(episode_len)
    if m < 1:
        raise ValueError(f"episode length must be >= 1, got {m}")
    for s in range(g.n):
        seen = [[False] * m for _ in range(g.n)]
        queue: deque[tuple[int, int]] = deque()
        for w in g.adj[s]:
            rho = 1 % m
            if not seen[w][rho]:
                seen[w][rho] = True
                queue.append((w, rho))
        while queue:
            v, rho = queue.popleft()
            nxt = (rho + 1) % m
            for w in g.adj[v]:
                if not seen[w][nxt]:
                    seen[w][nxt] = True
                    queue.append((w, nxt))
        for rho in range(m):
            if seen[s][rho] and math.gcd(rho, m) == 1:
                return True, (s, rho)
    return False, None


def extend_graph(g: DirectedGraph, episode_len: int) -> DirectedGraph:
    """Lift G to extended states (v, m) with flat index v * M + m."""
    m = int(episode_len)
    if m < 1:
        raise ValueError(f"episode length must be >= 1, got {m}")
    adj = []
    for v in range(g.n):
        for sub in range(m):
            nxt = (sub + 1) % m
            adj.append(tuple(w * m + nxt for w in g.adj[v]))
    return DirectedGraph(n=g.n * m, adj=tuple(adj))


def extended_strongly_connected(game: StochasticGame, episode_len: int) -> bool:
    """Is the episodic extension of the game's state graph strongly connected?

    This is the exact condition the learning run needs; the coprime-cycle
    test above is only a sufficient criterion for it.
    """
    return strongly_connected(extend_graph(build_graph(game), episode_len))
