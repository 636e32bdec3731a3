"""Clustered binary associative memory that stores messages as cliques.

A network of ``c`` clusters, each holding ``l`` fanal neurons, memorizes a
k-bit message by fully interconnecting one fanal per cluster.  Connections
are binary, symmetric, strictly inter-cluster and only ever added, so
learning is incremental and order independent.  Recall scores every fanal
with the number of active neighbours plus a self-excitation term, then
keeps the per-cluster winners that reach a threshold.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

#: marker for a cluster with no provided fanal
ERASED = None

UNIQUE = "unique"
AMBIGUOUS = "ambiguous"
SILENT = "silent"

_MAGIC = b"GBCN"
_VERSION = 1
_HEADER = struct.Struct("<4sHIIQ")


@dataclass(frozen=True)
class ClusterTopology:
    """Shape of a clustered network: ``clusters`` groups of ``cluster_size`` fanals."""

    clusters: int
    cluster_size: int

    def __post_init__(self) -> None:
        if self.clusters < 2:
            raise ValueError("need at least 2 clusters (no inter-cluster edge exists otherwise)")
        l = self.cluster_size
        if l < 2 or l & (l - 1):
            raise ValueError("cluster size must be a power of two >= 2")

    @property
    def kappa(self) -> int:
        """Bits encoded by one cluster (log2 of the cluster size)."""
        return self.cluster_size.bit_length() - 1

    @property
    def total_fanals(self) -> int:
        return self.clusters * self.cluster_size

    @property
    def message_bits(self) -> int:
        return self.clusters * self.kappa

    @property
    def max_edges(self) -> int:
        """Maximum number of inter-cluster edges: (c-1)n^2 / (2c)."""
        return self.clusters * (self.clusters - 1) // 2 * self.cluster_size ** 2


@dataclass(frozen=True)
class Message:
    """A binary message, split into per-cluster chunks by the topology using it."""

    bits: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("message bits must be 0 or 1")

    def __len__(self) -> int:
        return len(self.bits)

    @classmethod
    def from_int(cls, value: int, length: int) -> "Message":
        if value < 0 or value >> length:
            raise ValueError(f"value does not fit in {length} bits")
        return cls(tuple((value >> (length - 1 - i)) & 1 for i in range(length)))

    @classmethod
    def from_hex(cls, text: str, length: int) -> "Message":
        digits = -(-length // 4)
        text = text.strip()
        if len(text) != digits:
            raise ValueError(f"expected {digits} hex digits for {length} bits, got {len(text)}")
        return cls.from_int(int(text, 16), length)

    def to_int(self) -> int:
        value = 0
        for b in self.bits:
            value = (value << 1) | b
        return value

    def to_hex(self) -> str:
        return format(self.to_int(), f"0{-(-len(self.bits) // 4)}x")


@dataclass(frozen=True)
class FanalPattern:
    """One fanal index per cluster; an entry may be ERASED (no information)."""

    fanals: tuple[Optional[int], ...]

    def __post_init__(self) -> None:
        for f in self.fanals:
            if f is not ERASED and (not isinstance(f, int) or f < 0):
                raise ValueError("fanal entries must be nonnegative integers or ERASED")

    def __len__(self) -> int:
        return len(self.fanals)

    @property
    def erased_count(self) -> int:
        return sum(1 for f in self.fanals if f is ERASED)

    @property
    def is_complete(self) -> bool:
        return self.erased_count == 0

    def erase(self, clusters: Iterable[int]) -> "FanalPattern":
        """Return a copy with the given cluster entries erased."""
        drop = set(clusters)
        return FanalPattern(tuple(ERASED if i in drop else f for i, f in enumerate(self.fanals)))


def _check_pattern(p: FanalPattern, t: ClusterTopology) -> None:
    if len(p) != t.clusters:
        raise ValueError(f"pattern has {len(p)} entries, topology has {t.clusters} clusters")
    for f in p.fanals:
        if f is not ERASED and f >= t.cluster_size:
            raise ValueError(f"fanal index {f} out of range for cluster size {t.cluster_size}")


def pattern_of(m: Message, t: ClusterTopology) -> FanalPattern:
    """Map a message to its fanal pattern: each chunk read as a big-endian integer."""
    if len(m) != t.message_bits:
        raise ValueError(f"message has {len(m)} bits, topology needs {t.message_bits}")
    kappa = t.kappa
    fanals = []
    for i in range(t.clusters):
        chunk = m.bits[i * kappa:(i + 1) * kappa]
        value = 0
        for b in chunk:
            value = (value << 1) | b
        fanals.append(value)
    return FanalPattern(tuple(fanals))


def message_of(p: FanalPattern, t: ClusterTopology) -> Message:
    """Exact inverse of :func:`pattern_of`; rejects patterns with erased entries."""
    _check_pattern(p, t)
    if not p.is_complete:
        raise ValueError("cannot read a message from a pattern with erased clusters")
    kappa = t.kappa
    bits: list[int] = []
    for f in p.fanals:
        bits.extend((f >> (kappa - 1 - i)) & 1 for i in range(kappa))
    return Message(tuple(bits))


@dataclass(frozen=True)
class DecodeParams:
    """Knobs of the iterative decoding loop.

    ``gamma`` is the self-excitation an active fanal adds to its own score,
    ``sigma`` the minimum score the per-cluster maximum must reach for any
    fanal to switch on.
    """

    gamma: int = 1
    sigma: int = 0
    max_iters: int = 1
    stop_on_fixed_point: bool = True

    def __post_init__(self) -> None:
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass(frozen=True)
class DecodeResult:
    """Per-cluster winner sets after decoding, plus the iteration count used."""

    winners: tuple[frozenset[int], ...]
    iterations: int

    def status(self, cluster: int) -> str:
        n = len(self.winners[cluster])
        if n == 1:
            return UNIQUE
        return SILENT if n == 0 else AMBIGUOUS

    def fanal(self, cluster: int) -> Optional[int]:
        w = self.winners[cluster]
        return next(iter(w)) if len(w) == 1 else None

    def to_pattern(self) -> Optional[FanalPattern]:
        """The decoded pattern if every cluster is uniquely active, else None."""
        if any(len(w) != 1 for w in self.winners):
            return None
        return FanalPattern(tuple(next(iter(w)) for w in self.winners))

    def matches(self, pattern: FanalPattern) -> bool:
        return all(w == {f} for w, f in zip(self.winners, pattern.fanals))


class CliqueNetwork:
    """Learned memory: bit-packed symmetric inter-cluster adjacency over fanals.

    Learning is single-writer; once learning is done the network can be
    shared read-only between any number of decoders.
    """

    def __init__(self, topology: ClusterTopology):
        self.topology = topology
        n = topology.total_fanals
        self._packed = np.zeros((n, -(-n // 8)), dtype=np.uint8)
        self._dense_cache: Optional[np.ndarray] = None
        self.learned_count = 0

    # -- learning ----------------------------------------------------------

    def learn(self, m: Message) -> None:
        self.learn_pattern(pattern_of(m, self.topology))

    def learn_pattern(self, p: FanalPattern) -> None:
        _check_pattern(p, self.topology)
        if not p.is_complete:
            raise ValueError("cannot learn a pattern with erased clusters")
        self.learn_batch(np.asarray(p.fanals, dtype=np.int64)[None, :])

    def learn_batch(self, fanal_indices: np.ndarray) -> None:
        """Learn many patterns at once; rows are per-cluster fanal indices."""
        idx = np.asarray(fanal_indices, dtype=np.int64)
        t = self.topology
        if idx.ndim != 2 or idx.shape[1] != t.clusters:
            raise ValueError(f"expected shape (M, {t.clusters})")
        if idx.size and (idx.min() < 0 or idx.max() >= t.cluster_size):
            raise ValueError("fanal index out of range")
        l = t.cluster_size
        glob = idx + np.arange(t.clusters, dtype=np.int64) * l
        for i in range(t.clusters):
            for j in range(i + 1, t.clusters):
                a, b = glob[:, i], glob[:, j]
                np.bitwise_or.at(self._packed, (a, b >> 3),
                                 (np.uint8(1) << (b & 7).astype(np.uint8)))
                np.bitwise_or.at(self._packed, (b, a >> 3),
                                 (np.uint8(1) << (a & 7).astype(np.uint8)))
        self.learned_count += idx.shape[0]
        self._dense_cache = None

    # -- inspection --------------------------------------------------------

    def edge(self, a: tuple[int, int], b: tuple[int, int]) -> bool:
        """Whether the fanals (cluster, index) a and b are connected."""
        l = self.topology.cluster_size
        ga, gb = a[0] * l + a[1], b[0] * l + b[1]
        return bool((self._packed[ga, gb >> 3] >> (gb & 7)) & 1)

    def edge_count(self) -> int:
        return int(np.unpackbits(self._packed, bitorder="little").sum()) // 2

    @property
    def max_edges(self) -> int:
        return self.topology.max_edges

    def density(self) -> float:
        """Existing edges over the maximum possible inter-cluster edges."""
        return self.edge_count() / self.max_edges

    def dense(self) -> np.ndarray:
        """Unpacked 0/1 adjacency matrix (cached; rebuilt after learning)."""
        if self._dense_cache is None:
            n = self.topology.total_fanals
            self._dense_cache = np.unpackbits(self._packed, axis=1,
                                              bitorder="little", count=n)
        return self._dense_cache

    def clique_edges(self, p: FanalPattern) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        """All cluster-pair edges of the clique a complete pattern stands on."""
        _check_pattern(p, self.topology)
        c = self.topology.clusters
        return [((i, p.fanals[i]), (j, p.fanals[j]))
                for i in range(c) for j in range(i + 1, c)]

    def has_clique(self, p: FanalPattern) -> bool:
        """Fast predicate: every edge of the pattern's clique exists."""
        if not p.is_complete:
            raise ValueError("pattern must be complete")
        idx = np.asarray(p.fanals, dtype=np.int64)[None, :]
        return bool(self.has_clique_batch(idx)[0])

    def has_clique_batch(self, fanal_indices: np.ndarray) -> np.ndarray:
        """Vectorized clique test for many patterns (rows of fanal indices)."""
        idx = np.asarray(fanal_indices, dtype=np.int64)
        t = self.topology
        if idx.ndim != 2 or idx.shape[1] != t.clusters:
            raise ValueError(f"expected shape (M, {t.clusters})")
        glob = idx + np.arange(t.clusters, dtype=np.int64) * t.cluster_size
        ok = np.ones(idx.shape[0], dtype=bool)
        for i in range(t.clusters):
            for j in range(i + 1, t.clusters):
                a, b = glob[:, i], glob[:, j]
                ok &= ((self._packed[a, b >> 3] >> (b & 7)) & 1).astype(bool)
        return ok

    # -- decoding ----------------------------------------------------------

    def activity_of(self, p: FanalPattern) -> np.ndarray:
        """Initial activity vector: one active fanal per non-erased cluster."""
        _check_pattern(p, self.topology)
        l = self.topology.cluster_size
        active = np.zeros(self.topology.total_fanals, dtype=bool)
        for i, f in enumerate(p.fanals):
            if f is not ERASED:
                active[i * l + f] = True
        return active

    def update_activity(self, active: np.ndarray, params: DecodeParams) -> np.ndarray:
        """One synchronous decoding step: integer scores, then per-cluster WTA."""
        t = self.topology
        idx = np.flatnonzero(active)
        if idx.size:
            scores = self.dense()[idx].sum(axis=0, dtype=np.int64)
            scores[idx] += params.gamma
        else:
            scores = np.zeros(t.total_fanals, dtype=np.int64)
        per = scores.reshape(t.clusters, t.cluster_size)
        best = per.max(axis=1)
        keep = (per == best[:, None]) & (best >= params.sigma)[:, None]
        return keep.ravel()

    def decode(self, p: FanalPattern, params: DecodeParams) -> DecodeResult:
        """Iterate scoring + winner-take-all until a fixed point or max_iters."""
        active = self.activity_of(p)
        iterations = 0
        for step in range(params.max_iters):
            iterations = step + 1
            new = self.update_activity(active, params)
            if params.stop_on_fixed_point and np.array_equal(new, active):
                active = new
                break
            active = new
        t = self.topology
        per = active.reshape(t.clusters, t.cluster_size)
        winners = tuple(frozenset(np.flatnonzero(row).tolist()) for row in per)
        return DecodeResult(winners=winners, iterations=iterations)

    def accepts(self, m: Message, params: Optional[DecodeParams] = None) -> bool:
        """Classification test: the message's pattern decodes to exactly itself."""
        p = pattern_of(m, self.topology)
        if params is None:
            params = DecodeParams(gamma=1, sigma=self.topology.clusters, max_iters=1)
        return self.decode(p, params).matches(p)

    # -- persistence -------------------------------------------------------

    def save(self, path) -> None:
        """Write the snapshot file (magic GBCN, header, packed triangular bits)."""
        t = self.topology
        c, l = t.clusters, t.cluster_size
        dense = self.dense()
        blocks = [dense[i * l:(i + 1) * l, j * l:(j + 1) * l].ravel()
                  for i in range(c) for j in range(i + 1, c)]
        bits = np.concatenate(blocks)
        payload = np.packbits(bits, bitorder="little").tobytes()
        header = _HEADER.pack(_MAGIC, _VERSION, c, l, self.learned_count)
        Path(path).write_bytes(header + payload)

    @classmethod
    def load(cls, path) -> "CliqueNetwork":
        raw = Path(path).read_bytes()
        if len(raw) < _HEADER.size:
            raise ValueError("snapshot file truncated")
        magic, version, c, l, learned = _HEADER.unpack_from(raw)
        if magic != _MAGIC:
            raise ValueError("not a network snapshot (bad magic)")
        if version != _VERSION:
            raise ValueError(f"unsupported snapshot version {version}")
        topology = ClusterTopology(c, l)
        n_bits = c * (c - 1) // 2 * l * l
        expected = _HEADER.size + -(-n_bits // 8)
        if len(raw) != expected:
            raise ValueError(f"snapshot payload is {len(raw)} bytes, expected {expected}")
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8, offset=_HEADER.size),
                             bitorder="little", count=n_bits)
        net = cls(topology)
        dense = np.zeros((topology.total_fanals,) * 2, dtype=np.uint8)
        pos = 0
        for i in range(c):
            for j in range(i + 1, c):
                block = bits[pos:pos + l * l].reshape(l, l)
                dense[i * l:(i + 1) * l, j * l:(j + 1) * l] = block
                dense[j * l:(j + 1) * l, i * l:(i + 1) * l] = block.T
                pos += l * l
        net._packed = np.packbits(dense, axis=1, bitorder="little")
        net._packed = net._packed[:, :net._packed.shape[1]]
        net.learned_count = learned
        return net
