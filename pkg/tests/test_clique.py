"""Unit and property tests for the clustered clique memory."""
from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cliquenet.clique import (AMBIGUOUS, ERASED, SILENT, UNIQUE, CliqueNetwork,
                              ClusterTopology, DecodeParams, FanalPattern,
                              Message, message_of, pattern_of)


# -- topology ---------------------------------------------------------------

def test_topology_derived_quantities():
    t = ClusterTopology(8, 256)
    assert t.kappa == 8
    assert t.total_fanals == 2048
    assert t.message_bits == 64
    assert t.max_edges == 8 * 7 // 2 * 256 * 256


@pytest.mark.parametrize("c,l", [(1, 8), (0, 8), (4, 0), (4, 1), (4, 3), (4, 12)])
def test_topology_rejects_bad_shapes(c, l):
    with pytest.raises(ValueError):
        ClusterTopology(c, l)


# -- messages and patterns --------------------------------------------------

@given(st.integers(min_value=0, max_value=2**64 - 1))
def test_message_int_round_trip(value):
    m = Message.from_int(value, 64)
    assert m.to_int() == value
    assert Message.from_hex(m.to_hex(), 64) == m


def test_message_rejects_out_of_range():
    with pytest.raises(ValueError):
        Message.from_int(16, 4)
    with pytest.raises(ValueError):
        Message.from_int(-1, 4)
    with pytest.raises(ValueError):
        Message((0, 1, 2))
    with pytest.raises(ValueError):
        Message.from_hex("abc", 16)  # needs 4 digits


@given(st.integers(min_value=2, max_value=8), st.integers(min_value=1, max_value=6),
       st.randoms(use_true_random=False))
def test_pattern_round_trip(c, log_l, rnd):
    t = ClusterTopology(c, 2 ** log_l)
    bits = tuple(rnd.randint(0, 1) for _ in range(t.message_bits))
    m = Message(bits)
    p = pattern_of(m, t)
    assert len(p) == c and p.is_complete
    assert message_of(p, t) == m


def test_pattern_of_chunk_order():
    # 6 bits over 3 clusters of 4 fanals: chunks are read high bits first
    t = ClusterTopology(3, 4)
    m = Message((0, 1, 1, 0, 1, 1))
    assert pattern_of(m, t) == FanalPattern((1, 2, 3))


def test_pattern_erase_and_checks():
    p = FanalPattern((3, 1, 2))
    q = p.erase([0, 2])
    assert q.fanals == (ERASED, 1, ERASED)
    assert q.erased_count == 2 and not q.is_complete
    t = ClusterTopology(3, 4)
    with pytest.raises(ValueError):
        message_of(q, t)
    with pytest.raises(ValueError):
        pattern_of(Message((0, 1)), t)
    with pytest.raises(ValueError):
        FanalPattern((0, -2))


# -- learning ---------------------------------------------------------------

def test_learning_adds_exactly_the_clique_edges():
    t = ClusterTopology(4, 8)
    net = CliqueNetwork(t)
    p = FanalPattern((1, 5, 0, 7))
    net.learn_pattern(p)
    assert net.edge_count() == 6
    assert net.has_clique(p)
    for a, b in net.clique_edges(p):
        assert net.edge(a, b) and net.edge(b, a)
    assert not net.edge((0, 1), (1, 4))
    assert net.learned_count == 1


def test_learning_is_idempotent():
    t = ClusterTopology(3, 8)
    net = CliqueNetwork(t)
    p = FanalPattern((2, 2, 2))
    for _ in range(5):
        net.learn_pattern(p)
    assert net.edge_count() == 3
    assert net.learned_count == 5


def test_learning_is_monotone():
    rng = np.random.default_rng(0)
    net = CliqueNetwork(ClusterTopology(4, 16))
    seen = 0
    for _ in range(20):
        net.learn_batch(rng.integers(0, 16, size=(10, 4)))
        assert net.edge_count() >= seen
        seen = net.edge_count()


@settings(deadline=None, max_examples=30)
@given(st.randoms(use_true_random=False))
def test_learning_order_independent(rnd):
    t = ClusterTopology(4, 8)
    rows = [[rnd.randrange(8) for _ in range(4)] for _ in range(30)]
    a, b = CliqueNetwork(t), CliqueNetwork(t)
    a.learn_batch(np.array(rows))
    shuffled = rows[:]
    rnd.shuffle(shuffled)
    b.learn_batch(np.array(shuffled))
    assert np.array_equal(a._packed, b._packed)


def test_learn_rejects_bad_input():
    net = CliqueNetwork(ClusterTopology(3, 8))
    with pytest.raises(ValueError):
        net.learn_batch(np.zeros((2, 4), dtype=int))
    with pytest.raises(ValueError):
        net.learn_batch(np.array([[0, 0, 8]]))
    with pytest.raises(ValueError):
        net.learn_pattern(FanalPattern((1, ERASED, 2)))


def test_dense_matches_packed_and_is_symmetric():
    rng = np.random.default_rng(3)
    net = CliqueNetwork(ClusterTopology(3, 16))
    net.learn_batch(rng.integers(0, 16, size=(40, 3)))
    dense = net.dense()
    assert dense.shape == (48, 48)
    assert np.array_equal(dense, dense.T)
    assert int(dense.sum()) == 2 * net.edge_count()
    # no intra-cluster or self edges
    for i in range(3):
        assert not dense[i * 16:(i + 1) * 16, i * 16:(i + 1) * 16].any()


def test_has_clique_batch_matches_scalar():
    rng = np.random.default_rng(4)
    net = CliqueNetwork(ClusterTopology(4, 8))
    net.learn_batch(rng.integers(0, 8, size=(25, 4)))
    probes = rng.integers(0, 8, size=(200, 4))
    batch = net.has_clique_batch(probes)
    for row, ok in zip(probes, batch):
        assert net.has_clique(FanalPattern(tuple(int(x) for x in row))) == ok


# -- decoding ---------------------------------------------------------------

def _net_with(messages, c=4, l=8):
    net = CliqueNetwork(ClusterTopology(c, l))
    net.learn_batch(np.array(messages))
    return net


def test_decode_recovers_erased_cluster():
    net = _net_with([[1, 2, 3, 4], [5, 6, 7, 0]])
    probe = FanalPattern((1, 2, 3, 4)).erase([2])
    result = net.decode(probe, DecodeParams(max_iters=2))
    assert result.matches(FanalPattern((1, 2, 3, 4)))
    assert result.to_pattern() == FanalPattern((1, 2, 3, 4))
    assert all(result.status(i) == UNIQUE for i in range(4))


def test_decode_ambiguous_when_two_cliques_share_context():
    # same last three clusters, two candidates for cluster 0
    net = _net_with([[1, 2, 3, 4], [5, 2, 3, 4]])
    result = net.decode(FanalPattern((ERASED, 2, 3, 4)), DecodeParams(max_iters=4))
    assert result.status(0) == AMBIGUOUS
    assert result.winners[0] == frozenset({1, 5})
    assert result.fanal(0) is None
    assert result.to_pattern() is None


def test_decode_silent_when_threshold_unreached():
    net = _net_with([[1, 2, 3, 4]])
    result = net.decode(FanalPattern((1, 2, 3, 4)),
                        DecodeParams(sigma=10, max_iters=1))
    assert all(result.status(i) == SILENT for i in range(4))


def test_decode_stops_at_fixed_point():
    net = _net_with([[1, 2, 3, 4]])
    result = net.decode(FanalPattern((1, 2, 3, 4)), DecodeParams(max_iters=50))
    assert result.iterations < 50


def test_gamma_zero_drops_memory_effect():
    net = _net_with([[1, 2, 3, 4]])
    active = net.activity_of(FanalPattern((1, 2, 3, 4)))
    with_gamma = net.update_activity(active, DecodeParams(gamma=1, sigma=4))
    assert np.array_equal(with_gamma, active)
    # without self-excitation the score of a clique member drops to c-1
    without = net.update_activity(active, DecodeParams(gamma=0, sigma=4))
    assert not without.any()


def test_accepts_learnt_and_rejects_fresh():
    net = _net_with([[1, 2, 3, 4], [5, 6, 7, 0]])
    t = net.topology
    assert net.accepts(message_of(FanalPattern((1, 2, 3, 4)), t))
    assert not net.accepts(message_of(FanalPattern((1, 2, 3, 0)), t))


def test_decode_params_validation():
    with pytest.raises(ValueError):
        DecodeParams(gamma=-1)
    with pytest.raises(ValueError):
        DecodeParams(max_iters=0)


# -- persistence ------------------------------------------------------------

def test_snapshot_round_trip(tmp_path):
    rng = np.random.default_rng(8)
    net = CliqueNetwork(ClusterTopology(5, 32))
    net.learn_batch(rng.integers(0, 32, size=(300, 5)))
    path = tmp_path / "net.gbcn"
    net.save(path)
    other = CliqueNetwork.load(path)
    assert other.topology == net.topology
    assert other.learned_count == 300
    assert np.array_equal(other._packed, net._packed)
    # identical content saves to identical bytes
    path2 = tmp_path / "again.gbcn"
    other.save(path2)
    assert path.read_bytes() == path2.read_bytes()


def test_snapshot_rejects_corruption(tmp_path):
    net = CliqueNetwork(ClusterTopology(3, 8))
    path = tmp_path / "net.gbcn"
    net.save(path)
    raw = path.read_bytes()
    (tmp_path / "short.gbcn").write_bytes(raw[:10])
    with pytest.raises(ValueError):
        CliqueNetwork.load(tmp_path / "short.gbcn")
    (tmp_path / "magic.gbcn").write_bytes(b"XXXX" + raw[4:])
    with pytest.raises(ValueError):
        CliqueNetwork.load(tmp_path / "magic.gbcn")
    (tmp_path / "trunc.gbcn").write_bytes(raw[:-1])
    with pytest.raises(ValueError):
        CliqueNetwork.load(tmp_path / "trunc.gbcn")
