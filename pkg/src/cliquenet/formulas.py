"""Closed-form expressions for the clique network: code parameters,
density, acceptance and retrieval-error laws, and sizing helpers.

Everything here is a pure function of its arguments; the Monte Carlo
sweeps use these as theoretical overlays and the tests as oracles.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple


@dataclass(frozen=True)
class CliqueCodeParams:
    """Distance, rate and merit of the c-clique code."""

    c: int
    d_min: int
    rate: float
    merit: float


def clique_code_params(c: int) -> CliqueCodeParams:
    """Minimum distance 2(c-1) and rate floor((c+1)/2) / (c(c-1)/2).

    For even c the rate reduces to 1/(c-1) and the merit factor is
    exactly 2; for odd c the general ratio is returned as-is.
    """
    if c < 2:
        raise ValueError("clique order must be at least 2")
    d_min = 2 * (c - 1)
    rate = ((c + 1) // 2) / (c * (c - 1) / 2)
    return CliqueCodeParams(c=c, d_min=d_min, rate=rate, merit=rate * d_min)


def expected_density(m: int, l: int) -> float:
    """Expected edge density after learning m uniform messages: 1-(1-1/l^2)^m."""
    if m < 0:
        raise ValueError("message count must be nonnegative")
    if l < 2:
        raise ValueError("cluster size must be at least 2")
    return -math.expm1(m * math.log1p(-1.0 / (l * l)))


def max_ordered_messages(n: int, c: int) -> float:
    """Upper bound on learnable ordered messages: (c-1)n^2 / (2c^2 log2(n/c))."""
    if c < 2:
        raise ValueError("need at least 2 clusters")
    if n % c:
        raise ValueError("n must be divisible by c")
    l = n // c
    if l < 2 or l & (l - 1):
        raise ValueError("cluster size n/c must be a power of two >= 2")
    return (c - 1) * n * n / (2 * c * c * math.log2(l))


def accept_prob(d: float, c: int) -> float:
    """Probability that a random message is accepted: d^(c(c-1)/2)."""
    if not 0.0 <= d <= 1.0:
        raise ValueError("density must be in [0, 1]")
    if c < 2:
        raise ValueError("need at least 2 clusters")
    return d ** (c * (c - 1) // 2)


class AcceptedSetSize(NamedTuple):
    count: float
    log2_count: float


def accepted_set_size(k: int, d: float, c: int) -> AcceptedSetSize:
    """Expected number of accepted messages, 2^k * d^(c(c-1)/2).

    Returned both linearly and as a base-2 logarithm so large k does not
    overflow.
    """
    p = accept_prob(d, c)
    if p == 0.0:
        return AcceptedSetSize(0.0, -math.inf)
    log2_count = k + math.log2(p)
    count = 2.0 ** log2_count if log2_count < 1024 else math.inf
    return AcceptedSetSize(count, log2_count)


def retrieval_error(m: int, l: int, c: int, c_e: int) -> float:
    """Single-iteration retrieval error with c_e erased clusters.

    1 - (1 - d^(c-c_e))^((l-1) c_e) at the expected density for m messages.
    """
    if not 1 <= c_e < c:
        raise ValueError("erased cluster count must satisfy 1 <= c_e < c")
    d = expected_density(m, l)
    spurious = d ** (c - c_e)
    if spurious >= 1.0:
        return 1.0
    return -math.expm1((l - 1) * c_e * math.log1p(-spurious))


def retrieval_error_approx(m: int, l: int, c: int, c_e: int) -> float:
    """Low-load approximation of the retrieval error: l c_e (m/l^2)^(c-c_e)."""
    if not 1 <= c_e < c:
        raise ValueError("erased cluster count must satisfy 1 <= c_e < c")
    if m < 0:
        raise ValueError("message count must be nonnegative")
    return l * c_e * (m / (l * l)) ** (c - c_e)


def p_remain(d: float, l: int, c: int, gamma: int) -> float:
    """Probability that already-known clusters stay unambiguous.

    Equals 1 whenever the memory effect is on (gamma > 0); without it,
    every known cluster must avoid a spurious tie on its own.
    """
    if not 0.0 <= d <= 1.0:
        raise ValueError("density must be in [0, 1]")
    if gamma > 0:
        return 1.0
    return ((1 - d ** (c - 2)) ** (l - 1)) ** (c - 1)


def c_opt(n: int, p0: float) -> int:
    """Optimal cluster count for target error p0 with half the clusters erased."""
    if n < 4:
        raise ValueError("need at least 4 neurons")
    if not 0.0 < p0 < 1.0:
        raise ValueError("target error must be in (0, 1)")
    return max(2, int(round(math.log(n / (2 * p0)))))


def network_efficiency(capacity_bits: float, memory_bits: float) -> float:
    """Stored information over storage cost; can exceed 1 for unordered sets."""
    if memory_bits <= 0:
        raise ValueError("memory must be positive")
    return capacity_bits / memory_bits


def clique_memory_bits(n: int, c: int) -> int:
    """Bits to store the binary clustered adjacency: (c-1)n^2 / (2c)."""
    if c < 2:
        raise ValueError("need at least 2 clusters")
    if n % c:
        raise ValueError("n must be divisible by c")
    return (c - 1) * n * n // (2 * c)
