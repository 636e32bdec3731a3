"""Seeded Monte Carlo sweeps over the clique network and the Hopfield baseline.

Each sweep walks a parameter grid, runs trials against freshly learned
networks and emits one record per grid point with the matching
closed-form overlay.  Randomness is derived from (seed, experiment,
point index, replicate, trial index), so a fixed spec reproduces
byte-identical output.
"""
from __future__ import annotations

import csv
import io
import math
import time
from dataclasses import dataclass, fields
from itertools import product
from typing import Iterable, Optional, Sequence

import numpy as np

from . import formulas, hopfield
from .clique import CliqueNetwork, ClusterTopology, DecodeParams

Z95 = 1.959963984540054

EXPERIMENTS = ("density", "accept", "ratio", "retrieval", "capacity", "hopfield_baseline")
_EXPERIMENT_CODES = {name: i + 1 for i, name in enumerate(EXPERIMENTS)}


def wilson_half_width(successes: int, trials: int, z: float = Z95) -> float:
    """Half-width of the Wilson score interval for a binomial estimate."""
    if trials < 1:
        raise ValueError("need at least one trial")
    p = successes / trials
    z2 = z * z
    return (z / (1 + z2 / trials)) * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials))


def wilson_center(successes: int, trials: int, z: float = Z95) -> float:
    p = successes / trials
    z2 = z * z
    return (p + z2 / (2 * trials)) / (1 + z2 / trials)


def wilson_contains(successes: int, trials: int, value: float, z: float = 3.0) -> bool:
    """Whether `value` lies inside the z-sigma Wilson interval."""
    return abs(value - wilson_center(successes, trials, z)) <= wilson_half_width(successes, trials, z)


@dataclass(frozen=True)
class SweepSpec:
    """One sweep request: experiment id, parameter grids, trial budget, seed."""

    experiment: str
    cluster_counts: tuple[int, ...] = (4,)
    cluster_sizes: tuple[int, ...] = (64,)
    message_counts: tuple[int, ...] = (1000,)
    erased_clusters: int = 1
    iterations: int = 1
    sigma: int = 0
    gamma: int = 1
    trials: int = 2000
    replicates: int = 1
    seed: int = 0
    target_error: float = 0.01
    hopfield_points: tuple[tuple[int, int], ...] = ((740, 56), (790, 60))

    def __post_init__(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if not (self.cluster_counts and self.cluster_sizes and self.message_counts):
            raise ValueError("parameter grids must be non-empty")


@dataclass
class SweepRecord:
    """One measured grid point plus its theoretical overlay."""

    experiment: str
    protocol: str
    c: Optional[int]
    l: Optional[int]
    n: Optional[int]
    m_messages: Optional[int]
    c_e: Optional[int]
    iterations: Optional[int]
    sigma: Optional[int]
    gamma: Optional[int]
    trials: int
    successes: int
    p_hat: float
    wilson_half_width: float
    theory: Optional[float]
    density: Optional[float]
    ratio: Optional[float]
    ratio_theory: Optional[float]
    diversity: Optional[float]
    capacity_bits: Optional[float]
    memory_bits: Optional[float]
    wall_time_s: float


RECORD_FIELDS = [f.name for f in fields(SweepRecord)]


def _rng(seed: int, experiment: str, point: int, extra: Sequence[int] = ()) -> np.random.Generator:
    return np.random.default_rng([seed, _EXPERIMENT_CODES[experiment], point, *extra])


def _build_network(c: int, l: int, m: int, rng: np.random.Generator) -> tuple[CliqueNetwork, np.ndarray]:
    net = CliqueNetwork(ClusterTopology(c, l))
    idx = rng.integers(0, l, size=(m, c))
    if m:
        net.learn_batch(idx)
    return net, idx


def _split_trials(total: int, parts: int) -> list[int]:
    base, rem = divmod(total, parts)
    return [base + (1 if i < rem else 0) for i in range(parts)]


def _record(experiment: str, *, protocol: str = "", c=None, l=None, n=None,
            m_messages=None, c_e=None, iterations=None, sigma=None, gamma=None,
            trials: int, successes: int, theory=None, density=None, ratio=None,
            ratio_theory=None, diversity=None, capacity_bits=None,
            memory_bits=None, wall_time_s: float = 0.0) -> SweepRecord:
    return SweepRecord(
        experiment=experiment, protocol=protocol, c=c, l=l, n=n,
        m_messages=m_messages, c_e=c_e, iterations=iterations, sigma=sigma,
        gamma=gamma, trials=trials, successes=successes,
        p_hat=successes / trials, wilson_half_width=wilson_half_width(successes, trials),
        theory=theory, density=density, ratio=ratio, ratio_theory=ratio_theory,
        diversity=diversity, capacity_bits=capacity_bits, memory_bits=memory_bits,
        wall_time_s=wall_time_s)


# -- individual experiments -------------------------------------------------

def run_density(spec: SweepSpec) -> list[SweepRecord]:
    """Measure edge density against the expected-density law."""
    records = []
    points = list(product(spec.cluster_counts, spec.cluster_sizes, spec.message_counts))
    for pi, (c, l, m) in enumerate(points):
        t0 = time.perf_counter()
        edges = 0
        possible = 0
        for r in range(spec.replicates):
            net, _ = _build_network(c, l, m, _rng(spec.seed, "density", pi, (r,)))
            edges += net.edge_count()
            possible += net.max_edges
        records.append(_record(
            "density", c=c, l=l, n=c * l, m_messages=m,
            trials=possible, successes=edges,
            theory=formulas.expected_density(m, l), density=edges / possible,
            wall_time_s=time.perf_counter() - t0))
    return records


def _accept_point(spec: SweepSpec, pi: int, c: int, l: int, m: int) -> tuple[SweepRecord, SweepRecord]:
    """One acceptance grid point: random probes plus the learnt-message check."""
    t0 = time.perf_counter()
    accepted = 0
    trials = 0
    theory_sum = 0.0
    density_sum = 0.0
    learnt_ok = 0
    learnt_total = 0
    for r, trials_r in enumerate(_split_trials(spec.trials, spec.replicates)):
        if trials_r == 0:
            continue
        net, idx = _build_network(c, l, m, _rng(spec.seed, spec.experiment, pi, (r,)))
        d_hat = net.density()
        probe_rng = _rng(spec.seed, spec.experiment, pi, (r, 1))
        probes = probe_rng.integers(0, l, size=(trials_r, c))
        accepted += int(net.has_clique_batch(probes).sum())
        trials += trials_r
        theory_sum += trials_r * formulas.accept_prob(d_hat, c)
        density_sum += trials_r * d_hat
        if m:
            learnt_ok += int(net.has_clique_batch(idx).sum())
            learnt_total += m
    probe_rec = _record(
        spec.experiment, protocol="probes", c=c, l=l, n=c * l, m_messages=m,
        iterations=1, sigma=c, gamma=spec.gamma,
        trials=trials, successes=accepted,
        theory=theory_sum / trials, density=density_sum / trials,
        wall_time_s=time.perf_counter() - t0)
    learnt_rec = _record(
        spec.experiment, protocol="learnt", c=c, l=l, n=c * l, m_messages=m,
        iterations=1, sigma=c, gamma=spec.gamma,
        trials=max(learnt_total, 1), successes=learnt_ok if learnt_total else 1,
        theory=1.0, density=probe_rec.density)
    return probe_rec, learnt_rec


def run_accept(spec: SweepSpec) -> list[SweepRecord]:
    """Acceptance probability of random probes versus the density-power law."""
    records = []
    points = list(product(spec.cluster_counts, spec.cluster_sizes, spec.message_counts))
    for pi, (c, l, m) in enumerate(points):
        probe_rec, learnt_rec = _accept_point(spec, pi, c, l, m)
        records.extend((probe_rec, learnt_rec))
    return records


def run_ratio(spec: SweepSpec) -> list[SweepRecord]:
    """Estimated (#accepted - #learnt) / #learnt from sampled acceptance."""
    records = []
    points = list(product(spec.cluster_counts, spec.cluster_sizes, spec.message_counts))
    for pi, (c, l, m) in enumerate(points):
        probe_rec, _ = _accept_point(spec, pi, c, l, m)
        k = c * ClusterTopology(c, l).kappa
        total = 2.0 ** k if k < 1024 else math.inf
        ratio = max(0.0, (total * probe_rec.p_hat - m) / m) if m else 0.0
        d_exp = formulas.expected_density(m, l)
        ratio_theory = max(0.0, (total * formulas.accept_prob(d_exp, c) - m) / m) if m else 0.0
        probe_rec.ratio = ratio
        probe_rec.ratio_theory = ratio_theory
        records.append(probe_rec)
    return records


def _retrieval_trials(net: CliqueNetwork, idx: np.ndarray, spec: SweepSpec,
                      pi: int, rep: int, trials: int,
                      checkpoints: Sequence[int]) -> dict[int, int]:
    """Run erasure-recovery trials, counting failures at each iteration checkpoint."""
    t = net.topology
    c, l, n = t.clusters, t.cluster_size, t.total_fanals
    m = idx.shape[0]
    kmax = max(checkpoints)
    cpset = set(checkpoints)
    params = DecodeParams(gamma=spec.gamma, sigma=spec.sigma, max_iters=kmax)
    offsets = np.arange(c) * l
    failures = {k: 0 for k in checkpoints}
    net.dense()  # warm the cache before the trial loop
    for trial in range(trials):
        rng = _rng(spec.seed, spec.experiment, pi, (rep, trial))
        mi = int(rng.integers(m))
        erased = rng.choice(c, size=spec.erased_clusters, replace=False)
        correct = np.zeros(n, dtype=bool)
        correct[offsets + idx[mi]] = True
        active = correct.copy()
        for e in erased:
            active[e * l:(e + 1) * l] = False
        fixed = False
        for it in range(1, kmax + 1):
            if not fixed:
                new = net.update_activity(active, params)
                fixed = np.array_equal(new, active)
                active = new
            if it in cpset and not np.array_equal(active, correct):
                failures[it] += 1
    return failures


def run_retrieval(spec: SweepSpec,
                  checkpoints: Optional[Sequence[int]] = None) -> list[SweepRecord]:
    """Erasure-recovery error rate versus the single-iteration error law.

    `checkpoints` lets one sweep report the error after several iteration
    budgets from the same trials (the default is the spec's budget only).
    """
    cps = sorted(set(checkpoints or (spec.iterations,)))
    records = []
    points = list(product(spec.cluster_counts, spec.cluster_sizes, spec.message_counts))
    for pi, (c, l, m) in enumerate(points):
        if m < 1:
            raise ValueError("retrieval sweeps need at least one learnt message")
        if not 1 <= spec.erased_clusters < c:
            raise ValueError("erased cluster count must be in [1, c)")
        t0 = time.perf_counter()
        failures = {k: 0 for k in cps}
        total = 0
        density_sum = 0.0
        for r, trials_r in enumerate(_split_trials(spec.trials, spec.replicates)):
            if trials_r == 0:
                continue
            net, idx = _build_network(c, l, m, _rng(spec.seed, "retrieval", pi, (r,)))
            part = _retrieval_trials(net, idx, spec, pi, r, trials_r, cps)
            for k in cps:
                failures[k] += part[k]
            total += trials_r
            density_sum += trials_r * net.density()
        elapsed = time.perf_counter() - t0
        theory = formulas.retrieval_error(m, l, c, spec.erased_clusters)
        for k in cps:
            records.append(_record(
                "retrieval", c=c, l=l, n=c * l, m_messages=m,
                c_e=spec.erased_clusters, iterations=k, sigma=spec.sigma,
                gamma=spec.gamma, trials=total, successes=failures[k],
                theory=theory, density=density_sum / total,
                wall_time_s=elapsed / len(cps)))
    return records


def _error_rate_at(spec: SweepSpec, pi: int, probe: int, c: int, l: int, m: int) -> float:
    """Monte Carlo retrieval error for one capacity-search probe."""
    failures = 0
    total = 0
    for r, trials_r in enumerate(_split_trials(spec.trials, spec.replicates)):
        if trials_r == 0:
            continue
        net, idx = _build_network(c, l, m, _rng(spec.seed, "capacity", pi, (probe, r)))
        part = _retrieval_trials(net, idx, spec, pi, (probe << 8) | r, trials_r,
                                 [spec.iterations])
        failures += part[spec.iterations]
        total += trials_r
    return failures / total


def run_capacity(spec: SweepSpec) -> list[SweepRecord]:
    """Largest message load meeting the target error, as capacity vs memory.

    Also emits the analytic Hopfield capacity/memory curve for comparison;
    the efficiency-one line (capacity equal to memory) is implicit.
    """
    records = []
    points = list(product(spec.cluster_counts, spec.cluster_sizes))
    for pi, (c, l) in enumerate(points):
        t0 = time.perf_counter()
        k_bits = c * ClusterTopology(c, l).kappa
        lo, hi = 1, l * l  # err(lo) ~ 0, err(hi) ~ 1
        probe = 0
        best_err = 0.0
        while hi - lo > 1:
            mid = (lo + hi) // 2
            err = _error_rate_at(spec, pi, probe, c, l, mid)
            probe += 1
            if err <= spec.target_error:
                lo, best_err = mid, err
            else:
                hi = mid
        m_star = lo
        records.append(_record(
            "capacity", protocol="clique", c=c, l=l, n=c * l, m_messages=m_star,
            c_e=spec.erased_clusters, iterations=spec.iterations,
            sigma=spec.sigma, gamma=spec.gamma,
            trials=spec.trials, successes=round(best_err * spec.trials),
            theory=formulas.retrieval_error(m_star, l, c, spec.erased_clusters),
            capacity_bits=float(m_star * k_bits),
            memory_bits=float(formulas.clique_memory_bits(c * l, c)),
            wall_time_s=time.perf_counter() - t0))
    # analytic Hopfield overlay across a size range spanning the clique points
    for n_h in (128, 256, 512, 1024, 2048, 4096):
        m_max = hopfield.diversity(n_h)
        records.append(_record(
            "capacity", protocol="hnn", n=n_h, trials=1, successes=0,
            diversity=m_max, capacity_bits=hopfield.capacity(n_h),
            memory_bits=hopfield.memory_bits(n_h, int(m_max) + 1)))
    return records


def run_hopfield_baseline(spec: SweepSpec) -> list[SweepRecord]:
    """Hopfield error rates at fixed (n, M) points under two protocols.

    'stability' counts learnt messages that move under one synchronous
    update; 'recall' counts failures to recover a learnt message from a
    probe whose erased half was replaced by random symbols.
    """
    records = []
    for pi, (n, m) in enumerate(spec.hopfield_points):
        t0 = time.perf_counter()
        networks = max(1, spec.trials // m)
        unstable = 0
        recall_fail = 0
        total = 0
        for r in range(networks):
            rng = _rng(spec.seed, "hopfield_baseline", pi, (r,))
            msgs = (rng.integers(0, 2, size=(m, n)) * 2 - 1).astype(np.int32)
            net = hopfield.HopfieldNetwork(n)
            net.learn(msgs)
            stepped = net.step_batch(msgs)
            unstable += int(np.any(stepped != msgs, axis=1).sum())
            half = n // 2
            for j in range(m):
                trng = _rng(spec.seed, "hopfield_baseline", pi, (r, j))
                probe = msgs[j].copy()
                pos = trng.choice(n, size=half, replace=False)
                probe[pos] = trng.integers(0, 2, size=half) * 2 - 1
                out, _ = net.recall(probe, max_iters=spec.iterations or 20)
                recall_fail += int(not np.array_equal(out, msgs[j]))
            total += m
        elapsed = time.perf_counter() - t0
        div = hopfield.diversity(n)
        common = dict(n=n, m_messages=m, trials=total, diversity=div,
                      capacity_bits=hopfield.capacity(n),
                      memory_bits=hopfield.memory_bits(n, m + 1))
        records.append(_record("hopfield_baseline", protocol="stability",
                               successes=unstable, wall_time_s=elapsed / 2, **common))
        records.append(_record("hopfield_baseline", protocol="recall",
                               successes=recall_fail, wall_time_s=elapsed / 2, **common))
    return records


_RUNNERS = {
    "density": run_density,
    "accept": run_accept,
    "ratio": run_ratio,
    "retrieval": run_retrieval,
    "capacity": run_capacity,
    "hopfield_baseline": run_hopfield_baseline,
}


def run_sweep(spec: SweepSpec) -> list[SweepRecord]:
    return _RUNNERS[spec.experiment](spec)


# -- output -----------------------------------------------------------------

def write_csv(records: Iterable[SweepRecord], stream) -> None:
    """Write records as CSV, one row per record, header first."""
    writer = csv.writer(stream)
    writer.writerow(RECORD_FIELDS)
    for rec in records:
        writer.writerow(["" if getattr(rec, f) is None else getattr(rec, f)
                         for f in RECORD_FIELDS])


def records_to_csv(records: Iterable[SweepRecord]) -> str:
    buf = io.StringIO()
    write_csv(records, buf)
    return buf.getvalue()


def read_csv(stream) -> list[SweepRecord]:
    """Read records previously written by :func:`write_csv`."""
    reader = csv.DictReader(stream)
    out = []
    for row in reader:
        kwargs = {}
        for f in fields(SweepRecord):
            raw = row[f.name]
            if f.name in ("experiment", "protocol"):
                kwargs[f.name] = raw
            elif raw == "":
                kwargs[f.name] = None
            elif f.name in ("c", "l", "n", "m_messages", "c_e", "iterations",
                            "sigma", "gamma", "trials", "successes"):
                kwargs[f.name] = int(raw)
            else:
                kwargs[f.name] = float(raw)
        out.append(SweepRecord(**kwargs))
    return out
