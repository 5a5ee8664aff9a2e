"""Staged pairwise-rotation synthesis of n×n coin unitaries.

An n×n unitary (n a power of two) factors into n−1 stages. Each stage is a
layer of n/2 simultaneous 2×2 rotations between index pairs

    (k·d + r,  k·d + r + d/2)   for k = 0..n/d−1, r = 1..d/2

at a stride d from {2, 4, …, n}; all indices 1-based, every index touched by
exactly one pair per stage. The construction recurses on the cosine-sine
factorization: the CS middle factor of a block is one stage at d = block
size, the block-diagonal side factors recurse, and sibling sub-stages acting
on disjoint halves merge into single full-width stages. Stages are ordered by
application: ``reconstruct`` multiplies stage matrices with later stages on
the left, so stage 1 acts on a state first.

The stride schedule is fixed by the recursion, sched(n) = sched(n/2) ++ [n]
++ sched(n/2) with sched(2) = [2]; the stride n stage is required to couple
the two halves, so the stride range deliberately includes d = n.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cossin

from .util import check_unitary, frozen, is_power_of_two, next_power_of_two

RECONSTRUCTION_TOL = 1e-10


@dataclass(frozen=True)
class PairRotation:
    """2×2 unitary acting on 1-based indices a < b."""

    a: int
    b: int
    u: np.ndarray

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError(f"pair indices must differ, got ({self.a},{self.b})")
        if self.a > self.b:
            raise ValueError(f"pair must be ordered a < b, got ({self.a},{self.b})")
        u = np.asarray(self.u, dtype=complex)
        if u.shape != (2, 2):
            raise ValueError(f"rotation must be 2×2, got {u.shape}")
        check_unitary(u, 1e-12, "pair rotation")
        object.__setattr__(self, "u", frozen(u))


@dataclass(frozen=True)
class Stage:
    """One layer of disjoint pairwise rotations at a common stride d."""

    d: int
    rotations: tuple[PairRotation, ...]

    def __post_init__(self):
        object.__setattr__(self, "rotations", tuple(self.rotations))
        n = 2 * len(self.rotations)
        if n == 0:
            raise ValueError("stage must contain at least one rotation")
        expected = set(stage_pairs(n, self.d))
        got = [(r.a, r.b) for r in self.rotations]
        if len(set(got)) != len(got):
            raise ValueError("stage contains duplicate index pairs")
        if set(got) != expected:
            raise ValueError(
                f"stage pairs {sorted(got)} do not match the stride-{self.d} pattern on n={n}"
            )

    @property
    def n(self) -> int:
        return 2 * len(self.rotations)

    @property
    def positions(self) -> list[int]:
        """First-member indices k·d + r of every pair, sorted."""
        return sorted(r.a for r in self.rotations)


@dataclass(frozen=True)
class StageSequence:
    """Ordered stages; a full decomposition of an n×n unitary has n−1 of them."""

    n: int
    stages: tuple[Stage, ...]

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))
        for s in self.stages:
            if s.n != self.n:
                raise ValueError(f"stage dimension {s.n} does not match sequence n={self.n}")


def stage_pairs(n: int, d: int) -> list[tuple[int, int]]:
    """Index pairs (kd+r, kd+r+d/2) of a stride-d stage, sorted by first index."""
    if not is_power_of_two(n):
        raise ValueError(f"dimension must be a power of two, got {n}")
    if d < 2 or d > n or n % d != 0 or not is_power_of_two(d):
        raise ValueError(f"stride must be a power-of-two divisor of {n} in [2,{n}], got {d}")
    pairs = []
    for k in range(n // d):
        for r in range(1, d // 2 + 1):
            pairs.append((k * d + r, k * d + r + d // 2))
    pairs.sort()
    return pairs


def identity_sequence(n: int) -> StageSequence:
    """The n−1 identity stages of the trivial decomposition."""
    eye = np.eye(2, dtype=complex)
    stages = [
        Stage(d, tuple(PairRotation(a, b, eye) for a, b in stage_pairs(n, d)))
        for d in _stride_schedule(n)
    ]
    return StageSequence(n, tuple(stages))


def _stride_schedule(n: int) -> list[int]:
    if n == 2:
        return [2]
    half = _stride_schedule(n // 2)
    return half + [n] + half


def cs_decompose(u: np.ndarray, tol: float = 1e-10) -> StageSequence:
    """Factor a power-of-two unitary into its n−1 pairwise-rotation stages.

    Raises ValueError for dimensions that are not a power of two (pad first,
    see pad_unitary) and UnitarityError when ``max|u†u − I| ≥ tol``.
    """
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    if u.shape != (n, n):
        raise ValueError(f"expected a square matrix, got {u.shape}")
    if not is_power_of_two(n):
        raise ValueError(f"dimension must be a power of two, got {n} (pad_unitary first)")
    check_unitary(u, tol, "decomposition input")
    if n == 1:
        # 1×1 input is a bare phase; nothing to schedule.
        return StageSequence(1, ())
    stages = _decompose_blocks([u], n)
    return StageSequence(n, tuple(stages))


def _decompose_blocks(blocks: list[np.ndarray], n: int) -> list[Stage]:
    """Decompose a block-diagonal unitary; block t spans indices t·m+1..(t+1)·m."""
    m = blocks[0].shape[0]
    if m == 2:
        rots = tuple(
            PairRotation(2 * t + 1, 2 * t + 2, blk) for t, blk in enumerate(blocks)
        )
        return [Stage(2, rots)]

    h = m // 2
    left_blocks: list[np.ndarray] = []
    right_blocks: list[np.ndarray] = []
    middle_rots: list[PairRotation] = []
    eye = np.eye(m)
    for t, blk in enumerate(blocks):
        if np.array_equal(blk, eye):
            # Exact identity blocks decompose into exact identity factors;
            # skip the factorization so identity inputs stay bit-clean.
            uu = csm = vdh = eye
        else:
            uu, csm, vdh = cossin(blk, p=h, q=h)
        left_blocks.extend([uu[:h, :h], uu[h:, h:]])
        right_blocks.extend([vdh[:h, :h], vdh[h:, h:]])
        base = t * m
        for r in range(h):
            rot = np.array(
                [[csm[r, r], csm[r, r + h]], [csm[r + h, r], csm[r + h, r + h]]],
                dtype=complex,
            )
            middle_rots.append(PairRotation(base + r + 1, base + r + 1 + h, rot))
    middle = Stage(m, tuple(middle_rots))
    return _decompose_blocks(right_blocks, n) + [middle] + _decompose_blocks(left_blocks, n)


def stage_matrix(stage: Stage) -> np.ndarray:
    """Dense n×n matrix of a stage: 2×2 blocks scattered onto its index pairs."""
    n = stage.n
    out = np.eye(n, dtype=complex)
    for r in stage.rotations:
        ia, ib = r.a - 1, r.b - 1
        out[ia, ia] = r.u[0, 0]
        out[ia, ib] = r.u[0, 1]
        out[ib, ia] = r.u[1, 0]
        out[ib, ib] = r.u[1, 1]
    return out


def reconstruct(seq: StageSequence) -> np.ndarray:
    """Product of the stage matrices in application order (stage 1 acts first)."""
    out = np.eye(seq.n, dtype=complex)
    for stage in seq.stages:
        out = stage_matrix(stage) @ out
    return out


def apply_stage(line: np.ndarray, stage: Stage) -> np.ndarray:
    """Apply a stage's rotations to a length-n amplitude vector.

    Pairs are disjoint, so the update order is immaterial and results are
    bit-reproducible under any permutation of the rotations.
    """
    line = np.asarray(line, dtype=complex)
    if line.shape != (stage.n,):
        raise ValueError(f"line length {line.shape} does not match stage n={stage.n}")
    out = line.copy()
    for r in stage.rotations:
        xa, xb = out[r.a - 1], out[r.b - 1]
        out[r.a - 1] = r.u[0, 0] * xa + r.u[0, 1] * xb
        out[r.b - 1] = r.u[1, 0] * xa + r.u[1, 1] * xb
    return out


def pad_unitary(u: np.ndarray) -> tuple[np.ndarray, int]:
    """Embed u ⊕ I at the next power-of-two dimension; returns (padded, original n).

    Padded indices are fixed points of the padded unitary, consistent with the
    coin-masking convention for inactive states.
    """
    u = np.asarray(u, dtype=complex)
    n = u.shape[0]
    p = next_power_of_two(n)
    if p == n:
        return u, n
    out = np.eye(p, dtype=complex)
    out[:n, :n] = u
    return out, n


# ---------------------------------------------------------------------------
# Serialization

_SEQ_VERSION = 1


def sequence_to_json(seq: StageSequence) -> str:
    stages = []
    for s in seq.stages:
        pairs = []
        for r in s.rotations:
            flat = r.u.reshape(-1)
            pairs.append({"a": r.a, "b": r.b, "u": [[float(z.real), float(z.imag)] for z in flat]})
        stages.append({"d": s.d, "pairs": pairs})
    return json.dumps({"version": _SEQ_VERSION, "n": seq.n, "stages": stages})


def sequence_from_json(text: str) -> StageSequence:
    doc = json.loads(text)
    stages = []
    for sdoc in doc["stages"]:
        rots = []
        for p in sdoc["pairs"]:
            u = np.array([complex(re, im) for re, im in p["u"]]).reshape(2, 2)
            rots.append(PairRotation(p["a"], p["b"], u))
        stages.append(Stage(sdoc["d"], tuple(rots)))
    return StageSequence(doc["n"], tuple(stages))


def unitary_to_json(u: np.ndarray) -> str:
    u = np.asarray(u, dtype=complex)
    flat = u.reshape(-1)
    return json.dumps(
        {"n": u.shape[0], "entries": [[float(z.real), float(z.imag)] for z in flat]}
    )


def unitary_from_json(text: str) -> np.ndarray:
    doc = json.loads(text)
    n = doc["n"]
    entries = doc["entries"]
    if len(entries) != n * n:
        raise ValueError(f"expected {n * n} entries, got {len(entries)}")
    return np.array([complex(re, im) for re, im in entries]).reshape(n, n)
