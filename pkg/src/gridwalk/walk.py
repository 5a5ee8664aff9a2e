"""Walk state on the N×N grid and the two evolution procedures.

The walker state over a graph with n nodes lives on an n×n grid of complex
amplitudes ``amp[j-1, k-1]`` for the basis state "walker at node j, coin
pointing to node k". One walk step is either

* the oracle form: apply per-node coins to the grid rows, then translate by
  transposing the grid (``reference_evolve``), or
* the in-place grid form: alternate the same coins between rows and columns
  without ever transposing (``evolve``).

Both produce identical states after any even number of steps; after an odd
number of steps the grid form holds the transpose of the oracle state, i.e.
nodes are indexed by columns until the next application. Coins for general
graphs are built by embedding a low-dimensional unitary on the coin states a
node is actually connected to; disconnected coin states are fixed points.
"""

from __future__ import annotations

import json
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .errors import InvariantViolation
from .graph import EdgeMask, Graph, edge_mask
from .util import check_unitary, frozen

NORM_TOL = 1e-12


@dataclass(frozen=True)
class WalkState:
    """Unit-norm n×n grid of complex amplitudes; rows are nodes, columns coins."""

    n: int
    amp: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.amp, dtype=complex)
        if self.n < 1:
            raise InvariantViolation(f"dimension must be positive, got {self.n}")
        if a.shape != (self.n, self.n):
            raise InvariantViolation(f"amplitude grid shape {a.shape}, expected {(self.n, self.n)}")
        norm = float(np.sum(np.abs(a) ** 2))
        if abs(norm - 1.0) > NORM_TOL:
            raise InvariantViolation(f"state norm² = {norm!r} deviates from 1 beyond {NORM_TOL}")
        object.__setattr__(self, "amp", frozen(a))

    def amplitude(self, j: int, k: int) -> complex:
        """Amplitude of |node j, coin k| (1-based indices)."""
        return complex(self.amp[j - 1, k - 1])


@dataclass(frozen=True)
class Distribution:
    """Probabilities over nodes 1..n."""

    p: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        if p.ndim != 1:
            raise InvariantViolation("distribution must be a vector")
        if np.any(p < -1e-15):
            raise InvariantViolation("negative probability entry")
        total = float(p.sum())
        if abs(total - 1.0) > NORM_TOL:
            raise InvariantViolation(f"probabilities sum to {total!r}, expected 1")
        object.__setattr__(self, "p", frozen(np.clip(p, 0.0, None)))

    @property
    def n(self) -> int:
        return len(self.p)

    def mean(self) -> float:
        idx = np.arange(1, self.n + 1)
        return float(np.sum(self.p * idx))

    def std(self) -> float:
        idx = np.arange(1, self.n + 1)
        mu = self.mean()
        return float(np.sqrt(np.sum(self.p * (idx - mu) ** 2)))


def init_localized(n: int, j: int, k: int) -> WalkState:
    """State fully localized at |node j, coin k|."""
    if not (1 <= j <= n and 1 <= k <= n):
        raise ValueError(f"indices ({j},{k}) outside 1..{n}")
    amp = np.zeros((n, n), dtype=complex)
    amp[j - 1, k - 1] = 1.0
    return WalkState(n, amp)


def state_from_amplitudes(amp: np.ndarray) -> WalkState:
    a = np.asarray(amp, dtype=complex)
    return WalkState(a.shape[0], a)


def transpose_state(s: WalkState) -> WalkState:
    """Swap node and coin indices: the translation |j,k| -> |k,j|."""
    return WalkState(s.n, s.amp.T)


# ---------------------------------------------------------------------------
# Coins


def hadamard_coin() -> np.ndarray:
    """(1/√2)[[1, 1], [1, −1]]."""
    return np.array([[1.0, 1.0], [1.0, -1.0]], dtype=complex) / np.sqrt(2.0)


def grover_coin(n: int) -> np.ndarray:
    """Diffusion coin with entries 2/n − δ_jk."""
    if n < 1:
        raise ValueError(f"coin dimension must be positive, got {n}")
    return np.full((n, n), 2.0 / n, dtype=complex) - np.eye(n)


def dft_coin(n: int) -> np.ndarray:
    """Discrete Fourier coin, entries exp(2πi jk/n)/√n."""
    if n < 1:
        raise ValueError(f"coin dimension must be positive, got {n}")
    jk = np.outer(np.arange(n), np.arange(n))
    return np.exp(2j * np.pi * jk / n) / np.sqrt(n)


def mask_coin(sub_coin: np.ndarray | None, row_mask: np.ndarray) -> np.ndarray:
    """Embed a unitary on the masked-in coin states; masked-out states are fixed.

    ``sub_coin`` must have dimension equal to the number of True entries of
    ``row_mask`` and is placed on those indices, leaving exact identity rows
    elsewhere so isolated amplitudes never mix. An all-False mask yields the
    identity and ``sub_coin`` may be None.
    """
    row_mask = np.asarray(row_mask, dtype=bool)
    n = len(row_mask)
    idx = np.flatnonzero(row_mask)
    out = np.eye(n, dtype=complex)
    if len(idx) == 0:
        return out
    if sub_coin is None:
        raise ValueError("sub-coin required for a non-empty mask")
    sub = np.asarray(sub_coin, dtype=complex)
    if sub.shape != (len(idx), len(idx)):
        raise ValueError(
            f"sub-coin dimension {sub.shape[0]} does not match {len(idx)} masked-in states"
        )
    check_unitary(sub, 1e-12, "sub-coin")
    out[np.ix_(idx, idx)] = sub
    return out


_COIN_KINDS = ("grover", "dft", "hadamard")


def coin_for_degree(kind: str, degree: int) -> np.ndarray:
    if kind == "grover":
        return grover_coin(degree)
    if kind == "dft":
        return dft_coin(degree)
    if kind == "hadamard":
        if degree != 2:
            raise ValueError(f"hadamard coin needs degree 2, node has degree {degree}")
        return hadamard_coin()
    raise ValueError(f"unknown coin kind {kind!r}; expected one of {_COIN_KINDS}")


def masked_node_coins(mask: EdgeMask, kind: str = "grover") -> list[np.ndarray]:
    """Per-node coins embedding the chosen coin on each node's active states.

    The per-node coin dimension follows the node degree; ``grover`` (default)
    and ``dft`` exist for every degree, ``hadamard`` requires degree 2. The
    uniform n-ary default is a convention of this package, not a canonical
    choice; callers may supply their own coins through CoinPlan instead.
    """
    coins = []
    for j in range(1, mask.n + 1):
        row = mask.row(j)
        degree = int(row.sum())
        sub = coin_for_degree(kind, degree) if degree else None
        coins.append(mask_coin(sub, row))
    return coins


# ---------------------------------------------------------------------------
# Coin plans and evolution


@dataclass(frozen=True)
class CoinPlan:
    """Per-step, per-line coin unitaries for an alternating row/column walk.

    ``step_coins[i][j]`` is the n×n coin for line j+1 at step i+1. Steps with
    odd index apply coins to rows (the H orientation), even steps to columns;
    the same per-line coins serve both orientations. Inner tuples may share
    one object across steps, so a uniform plan costs one coin set.
    """

    n: int
    step_coins: tuple[tuple[np.ndarray, ...], ...]

    def __post_init__(self):
        seen: set[int] = set()
        for coins in self.step_coins:
            if len(coins) != self.n:
                raise ValueError(f"coin set has {len(coins)} entries, expected {self.n}")
            if id(coins) in seen:
                continue
            seen.add(id(coins))
            for c in coins:
                if c.shape != (self.n, self.n):
                    raise ValueError(f"coin shape {c.shape}, expected {(self.n, self.n)}")
                check_unitary(c, 1e-12, "coin")

    @property
    def steps(self) -> int:
        return len(self.step_coins)

    def coins_for_step(self, step: int) -> tuple[np.ndarray, ...]:
        """Coin set for 1-based step index."""
        if not (1 <= step <= self.steps):
            raise ValueError(f"plan covers {self.steps} steps, step {step} requested")
        return self.step_coins[step - 1]

    @staticmethod
    def uniform(coin: np.ndarray, steps: int) -> CoinPlan:
        """Same coin at every node and every step."""
        coin = np.asarray(coin, dtype=complex)
        n = coin.shape[0]
        one_step = tuple([coin] * n)
        return CoinPlan(n, tuple([one_step] * steps))

    @staticmethod
    def from_node_coins(coins: Sequence[np.ndarray], steps: int) -> CoinPlan:
        """Same per-node coins repeated every step."""
        one_step = tuple(np.asarray(c, dtype=complex) for c in coins)
        return CoinPlan(len(one_step), tuple([one_step] * steps))

    @staticmethod
    def from_step_coins(step_coins: Sequence[Sequence[np.ndarray]]) -> CoinPlan:
        sets = tuple(tuple(np.asarray(c, dtype=complex) for c in coins) for coins in step_coins)
        return CoinPlan(len(sets[0]), sets)

    @staticmethod
    def from_graph(g: Graph, steps: int, kind: str = "grover") -> CoinPlan:
        """Masked per-node coins for a graph, repeated every step."""
        return CoinPlan.from_node_coins(masked_node_coins(edge_mask(g), kind), steps)


def apply_coin_rows(s: WalkState, coins: Sequence[np.ndarray]) -> WalkState:
    """Replace row j by coin_j · row_j (the horizontally grouped application)."""
    if len(coins) != s.n:
        raise ValueError(f"{len(coins)} coins supplied for {s.n} rows")
    out = np.empty_like(s.amp)
    for j in range(s.n):
        c = coins[j]
        if c.shape != (s.n, s.n):
            raise ValueError(f"coin {j + 1} has shape {c.shape}, expected {(s.n, s.n)}")
        out[j, :] = c @ s.amp[j, :]
    return WalkState(s.n, out)


def apply_coin_cols(s: WalkState, coins: Sequence[np.ndarray]) -> WalkState:
    """Replace column k by coin_k · column_k (the vertically grouped application)."""
    if len(coins) != s.n:
        raise ValueError(f"{len(coins)} coins supplied for {s.n} columns")
    out = np.empty_like(s.amp)
    for k in range(s.n):
        c = coins[k]
        if c.shape != (s.n, s.n):
            raise ValueError(f"coin {k + 1} has shape {c.shape}, expected {(s.n, s.n)}")
        out[:, k] = c @ s.amp[:, k]
    return WalkState(s.n, out)


def evolve(s0: WalkState, steps: int, plan: CoinPlan) -> WalkState:
    """Alternate row/column coin applications, starting with rows.

    Odd step counts end after a row application, leaving the state in the
    transposed (columns-index-nodes) convention; transpose_state restores the
    rows-index-nodes reading.
    """
    if plan.n != s0.n:
        raise ValueError(f"plan dimension {plan.n} does not match state {s0.n}")
    if plan.steps < steps:
        raise ValueError(f"plan covers {plan.steps} steps, {steps} requested")
    s = s0
    for i in range(1, steps + 1):
        coins = plan.coins_for_step(i)
        s = apply_coin_rows(s, coins) if i % 2 == 1 else apply_coin_cols(s, coins)
    return s


def reference_evolve(s0: WalkState, steps: int, plan: CoinPlan) -> WalkState:
    """Oracle evolution: per step, apply row coins then transpose the grid.

    The transpose realizes the translation |j,k| -> |k,j|. Serves as the
    independent reference for evolve: both agree exactly at even step counts.
    """
    if plan.n != s0.n:
        raise ValueError(f"plan dimension {plan.n} does not match state {s0.n}")
    if plan.steps < steps:
        raise ValueError(f"plan covers {plan.steps} steps, {steps} requested")
    s = s0
    for i in range(1, steps + 1):
        s = transpose_state(apply_coin_rows(s, plan.coins_for_step(i)))
    return s


def walk_node_distribution(s0: WalkState, steps: int, plan: CoinPlan) -> tuple[WalkState, Distribution]:
    """Evolve and read out node probabilities in the rows-index-nodes convention.

    After an odd number of grid applications the nodes sit on columns; the
    readout transposes once so the distribution always refers to nodes.
    """
    s = evolve(s0, steps, plan)
    readout = transpose_state(s) if steps % 2 == 1 else s
    return s, position_distribution(readout)


def position_distribution(s: WalkState) -> Distribution:
    """Node probabilities p_j = Σ_k |amp[j,k]|²."""
    return Distribution(np.sum(np.abs(s.amp) ** 2, axis=1))


# ---------------------------------------------------------------------------
# Serialization

_STATE_VERSION = 1


def state_to_json(s: WalkState) -> str:
    flat = s.amp.reshape(-1)
    pairs = [[float(z.real), float(z.imag)] for z in flat]
    return json.dumps({"version": _STATE_VERSION, "n": s.n, "amplitudes": pairs})


def state_from_json(text: str) -> WalkState:
    doc = json.loads(text)
    n = doc["n"]
    pairs = doc["amplitudes"]
    if len(pairs) != n * n:
        raise InvariantViolation(f"expected {n * n} amplitudes, got {len(pairs)}")
    flat = np.array([complex(re, im) for re, im in pairs])
    return WalkState(n, flat.reshape(n, n))


def distribution_to_text(d: Distribution) -> str:
    """Two-column export: node index, probability."""
    lines = [f"{j + 1} {d.p[j]:.17e}" for j in range(d.n)]
    return "\n".join(lines) + "\n"
