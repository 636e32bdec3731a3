"""Cluster-level winner-take-all machinery.

Contains the correlation-based soft decoder over an arbitrary codebook
(winners are all codewords of maximum correlation; output symbols are
erased wherever the winners disagree) and the neural max-selector built
from the identity max(x, y) = (x+y)/2 + |x-y|/2.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

#: erased symbol value in inputs and outputs
X = 0


@dataclass(frozen=True)
class Codebook:
    """A non-empty set of distinct codewords over {-1, +1}."""

    words: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if not self.words:
            raise ValueError("codebook must contain at least one word")
        kappa = len(self.words[0])
        for w in self.words:
            if len(w) != kappa:
                raise ValueError("all codewords must have the same length")
            if any(s not in (-1, 1) for s in w):
                raise ValueError("codeword symbols must be -1 or +1")
        if len(set(self.words)) != len(self.words):
            raise ValueError("codewords must be distinct")

    @property
    def kappa(self) -> int:
        return len(self.words[0])

    def __len__(self) -> int:
        return len(self.words)

    @classmethod
    def complete(cls, kappa: int) -> "Codebook":
        """All 2^kappa words."""
        words = []
        for v in range(1 << kappa):
            words.append(tuple(1 if (v >> (kappa - 1 - i)) & 1 else -1
                               for i in range(kappa)))
        return cls(tuple(words))

    @classmethod
    def from_text(cls, text: str) -> "Codebook":
        """Parse one codeword per line as a string over '+' and '-'."""
        words = []
        for ln, line in enumerate(text.splitlines(), start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            try:
                words.append(tuple(1 if ch == "+" else -1 if ch == "-" else _bad(ch)
                                   for ch in line))
            except ValueError as exc:
                raise ValueError(f"line {ln}: {exc}") from None
        return cls(tuple(words))

    def to_text(self) -> str:
        return "\n".join("".join("+" if s > 0 else "-" for s in w) for w in self.words)


def _bad(ch: str):
    raise ValueError(f"invalid codeword character {ch!r}")


@dataclass(frozen=True)
class SoftOutput:
    """Result of a soft decode: per-position symbols, winner set, max score."""

    symbols: tuple[int, ...]
    winners: frozenset[int]
    v_max: int

    def symbols_text(self) -> str:
        return "".join("+" if s > 0 else "-" if s < 0 else "X" for s in self.symbols)


class SoftMLDecoder:
    """Correlation decoder whose weights are the codewords themselves.

    Every codeword neuron is connected to every input position with a
    +1/-1 weight equal to the codeword symbol at that position.
    """

    def __init__(self, codebook: Codebook):
        self.codebook = codebook
        self.weights = np.array(codebook.words, dtype=np.int64)

    def decode(self, inputs: Sequence[int], sigma: int) -> SoftOutput:
        """Score all codewords, keep the maximal ones if they reach sigma.

        Input symbols are -1/+1, with 0 for an erased position (it then
        contributes nothing to any correlation).  The output symbol at a
        position is the consensus of the winners: erased when they disagree
        (or when no winner reaches the threshold).
        """
        v = np.asarray(inputs, dtype=np.int64)
        if v.shape != (self.codebook.kappa,):
            raise ValueError(f"expected {self.codebook.kappa} input symbols, got {v.shape}")
        if np.any(np.abs(v) > 1):
            raise ValueError("input symbols must be -1, 0 or +1")
        scores = self.weights @ v
        v_max = int(scores.max())
        if v_max >= sigma:
            winner_idx = np.flatnonzero(scores == v_max)
            feedback = np.sign(self.weights[winner_idx].sum(axis=0))
            winners = frozenset(winner_idx.tolist())
        else:
            feedback = np.zeros(self.codebook.kappa, dtype=np.int64)
            winners = frozenset()
        return SoftOutput(symbols=tuple(int(s) for s in feedback),
                          winners=winners, v_max=v_max)


def max2(x: float, y: float) -> float:
    """max(x, y) through the averaging identity; exact for all reals."""
    return (x + y) / 2 + abs(x - y) / 2


def _check_tree_input(values: Sequence[float]) -> list[float]:
    vals = list(values)
    n = len(vals)
    if n < 1 or n & (n - 1):
        raise ValueError("input length must be a power of two")
    if max(vals) < 0:
        raise ValueError("at least one input must be nonnegative")
    return vals


def max_tree(values: Sequence[float]) -> float:
    """Maximum of 2^q values via a balanced cascade of pairwise selectors."""
    vals = _check_tree_input(values)
    while len(vals) > 1:
        vals = [max2(a, b) for a, b in zip(vals[::2], vals[1::2])]
    return vals[0]


def _relu(x: float) -> float:
    return x if x > 0 else 0.0


def _circuit_node(x: float, y: float) -> float:
    # sum-then-rectify neurons: half-weight adder plus two rectified
    # half-difference branches, rectified once more at the output
    h = (x - y) / 2
    return _relu(x / 2 + y / 2 + _relu(h) + _relu(-h))


def max_tree_circuit(values: Sequence[float]) -> float:
    """Node-graph evaluation of the cascade built from rectifying neurons.

    Each node clamps negative intermediate results to zero, which is why
    the contract only requires one nonnegative value in the whole input
    rather than one per pair.
    """
    vals = _check_tree_input(values)
    while len(vals) > 1:
        vals = [_circuit_node(a, b) for a, b in zip(vals[::2], vals[1::2])]
    return vals[0]


def cluster_wta(scores: Sequence[int], sigma: int) -> frozenset[int]:
    """Indices attaining the maximum score, if that maximum reaches sigma."""
    arr = np.asarray(scores)
    if arr.size == 0:
        return frozenset()
    best = arr.max()
    if best < sigma:
        return frozenset()
    return frozenset(np.flatnonzero(arr == best).tolist())
