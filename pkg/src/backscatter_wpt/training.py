"""Backscatter training (chip) sequences."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SequenceError(ValueError):
    pass


@dataclass(frozen=True)
class TrainingSequence:
    chips: np.ndarray  # int8 values in {+1, -1}
    tc: float
    kind: str  # "pn" | "balanced" | "walsh_hadamard" | "lfsr" | "custom"

    def __post_init__(self):
        chips = np.asarray(self.chips, dtype=np.int8)
        if chips.ndim != 1 or len(chips) < 1:
            raise SequenceError("a training sequence needs at least one chip")
        if chips.min() < -1 or chips.max() > 1 or not chips.all():
            raise SequenceError("chips must be +1 or -1")
        chips.flags.writeable = False
        object.__setattr__(self, "chips", chips)

    @property
    def nc(self) -> int:
        return len(self.chips)


def gen_pn(nc: int, rng: np.random.Generator, tc: float = 1.0) -> TrainingSequence:
    """Equiprobable i.i.d. +/-1 chips."""
    if nc < 1:
        raise SequenceError(f"nc must be >= 1, got {nc}")
    bits = rng.integers(0, 2, size=nc, dtype=np.int8)
    return TrainingSequence(1 - 2 * bits, tc, "pn")


def gen_balanced(ns: int, chips_per_symbol: int, tc: float = 1.0, pattern: str = "halves") -> TrainingSequence:
    """Training sequence with equal +1 and -1 chips in every symbol window.

    ``pattern="halves"`` holds +1 for the first half of each window and -1 for
    the second; ``"alternating"`` flips the sign on every chip. Both cancel the
    ambient term when synchronized. Only the alternating one keeps the
    uncancelled remainder to within one chip when the real symbol duration
    differs from the design, and it has the triangular offset response.
    """
    if chips_per_symbol < 2 or chips_per_symbol % 2:
        raise SequenceError(
            f"chips_per_symbol must be even and >= 2 to balance each symbol, got {chips_per_symbol}"
        )
    if ns < 1:
        raise SequenceError(f"ns must be >= 1, got {ns}")
    half = chips_per_symbol // 2
    if pattern == "halves":
        window = np.concatenate([np.ones(half, np.int8), -np.ones(half, np.int8)])
    elif pattern == "alternating":
        window = np.tile(np.array([1, -1], np.int8), half)
    else:
        raise SequenceError(f"unknown balanced pattern {pattern!r}")
    return TrainingSequence(np.tile(window, ns), tc, "balanced")


def hadamard(order: int) -> np.ndarray:
    """Sylvester-construction Hadamard matrix of a power-of-two order."""
    if order < 1 or order & (order - 1):
        raise SequenceError(f"Hadamard order must be a power of two, got {order}")
    h = np.ones((1, 1), dtype=np.int8)
    while h.shape[0] < order:
        h = np.block([[h, h], [h, -h]])
    return h


def walsh_hadamard_row(order: int, row: int, tc: float = 1.0) -> TrainingSequence:
    if order < 2:
        raise SequenceError(f"order must be >= 2, got {order}")
    if not 0 <= row < order:
        raise SequenceError(f"row {row} out of range for order {order}")
    return TrainingSequence(hadamard(order)[row].copy(), tc, "walsh_hadamard")


def gen_lfsr(taps: tuple[int, ...], nc: int, state: int = 1, tc: float = 1.0) -> TrainingSequence:
    """Fibonacci LFSR m-sequence; ``taps`` are 1-based register positions, e.g. (5, 3)."""
    degree = max(taps)
    if not 0 < state < 1 << degree:
        raise SequenceError("LFSR state must be non-zero and fit the register")
    out = np.empty(nc, dtype=np.int8)
    for n in range(nc):
        bit = state & 1
        out[n] = 1 - 2 * bit
        fb = 0
        for t in taps:
            fb ^= (state >> (degree - t)) & 1
        state = (state >> 1) | (fb << (degree - 1))
    return TrainingSequence(out, tc, "lfsr")


def window_sums(chips: np.ndarray, ns: int) -> np.ndarray:
    """Integer chip sum over each of the ``ns`` symbol windows."""
    nc = len(chips)
    if ns < 1 or nc % ns:
        raise SequenceError(f"ns={ns} does not divide nc={nc}")
    return np.asarray(chips, dtype=np.int64).reshape(ns, nc // ns).sum(axis=1)


def is_balanced(seq: TrainingSequence, ns: int) -> bool:
    return bool(np.all(window_sums(seq.chips, ns) == 0))
