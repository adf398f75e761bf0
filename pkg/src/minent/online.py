"""Streaming collision-based min-entropy estimation.

Constant-memory single pass: count collisions between consecutive blocks and
turn the running collision frequency into a closed-form estimate after every
block.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import log2

from .estimators import collision_theta

__all__ = ["OnlineState", "online_init", "online_update", "online_snapshot"]


@dataclass
class OnlineState:
    """Single-writer state of the streaming estimator.

    ``collision_indices`` stays None unless index tracking was requested; it
    grows linearly with the collision count, everything else is O(1).
    """

    l: int
    b: int
    k: int
    collisions: int
    last_block: int
    collision_indices: list[int] | None = None


def online_init(first_block: int, l: int, *, track_indices: bool = False) -> OnlineState:
    """Start a stream from its first block: one block seen, no collisions."""
    b = 1 << l
    if not 0 <= first_block < b:
        raise ValueError(f"block value must lie in [0, {b}), got {first_block}")
    return OnlineState(
        l=l,
        b=b,
        k=1,
        collisions=0,
        last_block=int(first_block),
        collision_indices=[] if track_indices else None,
    )


def online_update(state: OnlineState, block: int) -> tuple[OnlineState, float]:
    """Consume one block and return the state and the new per-bit estimate.

    The collision frequency divides by k blocks seen even though only k - 1
    adjacent pairs exist; the difference is O(1/k) and is kept so the
    emitted trajectory matches the counting convention of the streaming
    procedure exactly.
    """
    if not 0 <= block < state.b:
        raise ValueError(f"block value must lie in [0, {state.b}), got {block}")
    block = int(block)
    state.k += 1
    if block == state.last_block:
        state.collisions += 1
        if state.collision_indices is not None:
            state.collision_indices.append(state.k)
    state.last_block = block
    return state, online_snapshot(state)[3]


def online_snapshot(state: OnlineState) -> tuple[int, float, float, float]:
    """Current (k, collision frequency, theta, per-bit estimate)."""
    p_c = state.collisions / state.k
    theta = collision_theta(p_c, state.b)
    return state.k, p_c, theta, -log2(theta) / state.l
