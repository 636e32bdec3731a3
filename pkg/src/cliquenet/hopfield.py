"""Hopfield baseline: Hebbian learning, synchronous recall and the
classical diversity / capacity / efficiency formulas used for comparison."""
from __future__ import annotations

import math
from typing import Optional

import numpy as np


class HopfieldNetwork:
    """Fully connected network with symmetric integer weights and no loops."""

    def __init__(self, size: int):
        if size < 2:
            raise ValueError("need at least 2 neurons")
        self.size = size
        self.weights = np.zeros((size, size), dtype=np.int32)
        self.messages_learnt = 0

    def learn(self, messages: np.ndarray) -> None:
        """Accumulate the outer-product rule over +/-1 messages (rows)."""
        arr = np.asarray(messages, dtype=np.int32)
        if arr.ndim == 1:
            arr = arr[None, :]
        if arr.shape[1:] != (self.size,):
            raise ValueError(f"messages must have length {self.size}")
        if arr.size and np.any(np.abs(arr) != 1):
            raise ValueError("message entries must be -1 or +1")
        if arr.size:
            self.weights += arr.T @ arr
            np.fill_diagonal(self.weights, 0)
            self.messages_learnt += arr.shape[0]

    def step(self, state: np.ndarray) -> np.ndarray:
        """One synchronous update; zero local field resolves to +1."""
        v = np.asarray(state, dtype=np.int32)
        if v.shape != (self.size,):
            raise ValueError(f"state must have length {self.size}")
        return np.where(self.weights @ v >= 0, 1, -1).astype(np.int32)

    def step_batch(self, states: np.ndarray) -> np.ndarray:
        arr = np.asarray(states, dtype=np.int32)
        return np.where(arr @ self.weights >= 0, 1, -1).astype(np.int32)

    def is_fixed_point(self, state: np.ndarray) -> bool:
        return bool(np.array_equal(self.step(state), np.asarray(state)))

    def recall(self, state: np.ndarray, max_iters: int = 20) -> tuple[np.ndarray, int]:
        """Iterate synchronous updates until a fixed point or the cap."""
        v = np.asarray(state, dtype=np.int32)
        for it in range(1, max_iters + 1):
            new = self.step(v)
            if np.array_equal(new, v):
                return new, it
            v = new
        return v, max_iters


def _check_size(n: int) -> None:
    if n < 2:
        raise ValueError("network size must be at least 2")


def diversity(n: int) -> float:
    """Largest number of random messages reliably stored: n / (2 ln n)."""
    _check_size(n)
    return n / (2 * math.log(n))


def capacity(n: int) -> float:
    """Stored information at the diversity bound: n^2 / (2 ln n) bits."""
    _check_size(n)
    return n * n / (2 * math.log(n))


def memory_bits(n: int, levels: int) -> float:
    """Bits needed for n(n-1)/2 connections quantized on `levels` values."""
    _check_size(n)
    if levels < 2:
        raise ValueError("need at least 2 weight levels")
    return n * (n - 1) / 2 * math.log2(levels)


def efficiency(n: int) -> float:
    """Capacity over the memory needed at full load; vanishes as n grows."""
    _check_size(n)
    return n / ((n - 1) * math.log(n) * math.log2(n / math.log(n) + 1))
