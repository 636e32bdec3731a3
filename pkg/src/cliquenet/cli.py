"""Command-line surface: learn/save networks, retrieve and classify probes,
evaluate formulas, run soft decodes and Monte Carlo sweeps."""
from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

from . import formulas, hopfield
from .clique import (AMBIGUOUS, ERASED, SILENT, CliqueNetwork, ClusterTopology,
                     DecodeParams, FanalPattern, Message, message_of, pattern_of)
from .wta import Codebook, SoftMLDecoder

EXIT_OK = 0
EXIT_AMBIGUOUS = 2
EXIT_SILENT = 3
EXIT_USAGE = 64
EXIT_DATA = 65


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 64 on bad flags instead of argparse's 2
        raise UsageError(message)


def _read_messages(path: str, topology: ClusterTopology) -> list[Message]:
    """One message per line as hex (high bits first); '#' starts a comment."""
    k = topology.message_bits
    messages = []
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    for ln, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        try:
            messages.append(Message.from_hex(line, k))
        except ValueError as exc:
            raise DataError(f"{path}:{ln}: {exc}") from None
    return messages


def _parse_probe(text: str, topology: ClusterTopology) -> FanalPattern:
    """Colon-separated hex chunks, '?' for an erased cluster."""
    chunks = text.split(":")
    if len(chunks) != topology.clusters:
        raise DataError(f"probe has {len(chunks)} chunks, network has {topology.clusters} clusters")
    fanals = []
    for i, chunk in enumerate(chunks):
        chunk = chunk.strip()
        if chunk == "?":
            fanals.append(ERASED)
            continue
        try:
            value = int(chunk, 16)
        except ValueError:
            raise DataError(f"probe chunk {i}: {chunk!r} is not hex or '?'") from None
        if value >= topology.cluster_size:
            raise DataError(f"probe chunk {i}: {value} out of range for cluster size "
                            f"{topology.cluster_size}")
        fanals.append(value)
    return FanalPattern(tuple(fanals))


def _chunk_hex(value: int, kappa: int) -> str:
    return format(value, f"0{-(-kappa // 4)}x")


# -- subcommands ------------------------------------------------------------

def _cmd_learn(args) -> int:
    topology = ClusterTopology(args.clusters, args.fanals)
    messages = _read_messages(args.messages, topology)
    net = CliqueNetwork(topology)
    for m in messages:
        net.learn(m)
    net.save(args.out)
    d = net.density()
    print(f"learned {net.learned_count} messages")
    print(f"edges {net.edge_count()} / {net.max_edges}")
    print(f"density {d:.6g} (expected {formulas.expected_density(len(messages), args.fanals):.6g})")
    return EXIT_OK


def _cmd_retrieve(args) -> int:
    net = CliqueNetwork.load(args.net)
    t = net.topology
    probe = _parse_probe(args.probe, t)
    params = DecodeParams(gamma=args.gamma, sigma=args.sigma, max_iters=args.iters)
    result = net.decode(probe, params)
    for i in range(t.clusters):
        status = result.status(i)
        if status == "unique":
            print(f"cluster {i}: {_chunk_hex(result.fanal(i), t.kappa)}")
        elif status == AMBIGUOUS:
            options = ",".join(_chunk_hex(f, t.kappa) for f in sorted(result.winners[i]))
            print(f"cluster {i}: AMBIGUOUS {{{options}}}")
        else:
            print(f"cluster {i}: SILENT")
    print(f"iterations {result.iterations}")
    pattern = result.to_pattern()
    if pattern is not None:
        print(f"message {message_of(pattern, t).to_hex()}")
        return EXIT_OK
    statuses = [result.status(i) for i in range(t.clusters)]
    return EXIT_AMBIGUOUS if AMBIGUOUS in statuses else EXIT_SILENT


def _cmd_classify(args) -> int:
    net = CliqueNetwork.load(args.net)
    t = net.topology
    messages = _read_messages(args.messages, t)
    sigma = t.clusters if args.sigma is None else args.sigma
    params = DecodeParams(gamma=args.gamma, sigma=sigma, max_iters=args.iters)
    accepted = 0
    for m in messages:
        ok = net.accepts(m, params)
        accepted += ok
        print(f"{m.to_hex()} {'accept' if ok else 'reject'}")
    rate = accepted / len(messages) if messages else 0.0
    print(f"accepted {accepted}/{len(messages)} ({rate:.4f})")
    return EXIT_OK


def _cmd_decode(args) -> int:
    try:
        book = Codebook.from_text(Path(args.codebook).read_text())
    except OSError as exc:
        raise DataError(f"cannot read {args.codebook}: {exc}") from None
    except ValueError as exc:
        raise DataError(f"{args.codebook}: {exc}") from None
    symbol_map = {"+": 1, "-": -1, "0": 0, "x": 0, "X": 0}
    try:
        inputs = [symbol_map[ch] for ch in args.input.strip()]
    except KeyError as exc:
        raise DataError(f"invalid input symbol {exc}") from None
    if len(inputs) != book.kappa:
        raise DataError(f"input has {len(inputs)} symbols, codebook words have {book.kappa}")
    out = SoftMLDecoder(book).decode(inputs, sigma=args.sigma)
    print(f"v_max {out.v_max}")
    winners = ",".join(str(j) for j in sorted(out.winners)) or "-"
    print(f"winners {winners}")
    print(f"symbols {out.symbols_text()}")
    return EXIT_OK


_FORMULAS = {
    "density": (("m", "l"), lambda a: formulas.expected_density(a.m, a.l)),
    "bound": (("n", "c"), lambda a: formulas.max_ordered_messages(a.n, a.c)),
    "accept": (("d", "c"), lambda a: formulas.accept_prob(a.d, a.c)),
    "set-size": (("k", "d", "c"), lambda a: formulas.accepted_set_size(a.k, a.d, a.c).count),
    "retrieval": (("m", "l", "c", "c_e"),
                  lambda a: formulas.retrieval_error(a.m, a.l, a.c, a.c_e)),
    "retrieval-approx": (("m", "l", "c", "c_e"),
                         lambda a: formulas.retrieval_error_approx(a.m, a.l, a.c, a.c_e)),
    "remain": (("d", "l", "c", "gamma"),
               lambda a: formulas.p_remain(a.d, a.l, a.c, a.gamma)),
    "c-opt": (("n", "p0"), lambda a: formulas.c_opt(a.n, a.p0)),
    "c_opt": (("n", "p0"), lambda a: formulas.c_opt(a.n, a.p0)),
    "merit": (("c",), lambda a: formulas.clique_code_params(a.c).merit),
    "d-min": (("c",), lambda a: formulas.clique_code_params(a.c).d_min),
    "rate": (("c",), lambda a: formulas.clique_code_params(a.c).rate),
    "memory": (("n", "c"), lambda a: formulas.clique_memory_bits(a.n, a.c)),
    "efficiency": (("capacity", "memory_bits"),
                   lambda a: formulas.network_efficiency(a.capacity, a.memory_bits)),
    "hnn-diversity": (("n",), lambda a: hopfield.diversity(a.n)),
    "hnn-capacity": (("n",), lambda a: hopfield.capacity(a.n)),
    "hnn-memory": (("n", "levels"), lambda a: hopfield.memory_bits(a.n, a.levels)),
    "hnn-efficiency": (("n",), lambda a: hopfield.efficiency(a.n)),
}


def _cmd_analyze(args) -> int:
    needed, fn = _FORMULAS[args.formula]
    missing = [name for name in needed if getattr(args, name) is None]
    if missing:
        raise UsageError(f"formula {args.formula} needs --" +
                         ", --".join(m.replace('_', '-') for m in missing))
    try:
        value = fn(args)
    except ValueError as exc:
        raise DataError(str(exc)) from None
    params = ";".join(f"{name}={getattr(args, name)}" for name in needed)
    print(f"{args.formula},{params},{value:.10g}")
    return EXIT_OK


_GRID_KEYS = {"c": "cluster_counts", "l": "cluster_sizes", "messages": "message_counts"}
_INT_KEYS = {"c_e": "erased_clusters", "iterations": "iterations", "sigma": "sigma",
             "gamma": "gamma", "trials": "trials", "replicates": "replicates",
             "seed": "seed"}


def _read_sweep_spec(path: str, args):
    from .sweeps import SweepSpec

    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from None
    except configparser.Error as exc:
        raise DataError(f"{path}: {exc}") from None
    if not parser.has_section("sweep"):
        raise DataError(f"{path}: missing [sweep] section")
    section = parser["sweep"]
    kwargs = {}
    try:
        kwargs["experiment"] = section.get("experiment", "density")
        for key, field in _GRID_KEYS.items():
            if key in section:
                kwargs[field] = tuple(int(v) for v in section[key].split())
        for key, field in _INT_KEYS.items():
            if key in section:
                kwargs[field] = section.getint(key)
        if "target_error" in section:
            kwargs["target_error"] = section.getfloat("target_error")
    except ValueError as exc:
        raise DataError(f"{path}: {exc}") from None
    if args.seed is not None:
        kwargs["seed"] = args.seed
    if args.trials is not None:
        kwargs["trials"] = args.trials
    if args.full and "cluster_sizes" not in kwargs:
        kwargs["cluster_sizes"] = (512,)
    try:
        return SweepSpec(**kwargs)
    except (TypeError, ValueError) as exc:
        raise DataError(f"{path}: {exc}") from None


def _cmd_sweep(args) -> int:
    from .sweeps import run_sweep, write_csv

    spec = _read_sweep_spec(args.config, args)
    records = run_sweep(spec)
    if args.out == "-":
        write_csv(records, sys.stdout)
    else:
        with open(args.out, "w", newline="") as fh:
            write_csv(records, fh)
        print(f"wrote {len(records)} records to {args.out}")
    if args.svg:
        from .plots import plot_records

        plot_records(records, args.svg)
        print(f"wrote plot to {args.svg}")
    return EXIT_OK


# -- parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cliquenet",
                     description="clustered clique-coded associative memory toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("learn", help="learn a message file into a network snapshot")
    p.add_argument("--clusters", "-c", type=int, required=True)
    p.add_argument("--fanals", "-l", type=int, required=True,
                   help="fanals per cluster (power of two)")
    p.add_argument("--messages", required=True, help="hex message file")
    p.add_argument("--out", required=True, help="snapshot output path")
    p.set_defaults(fn=_cmd_learn)

    p = sub.add_parser("retrieve", help="complete a partially erased probe")
    p.add_argument("--net", required=True)
    p.add_argument("--probe", required=True,
                   help="colon-separated hex chunks, '?' for an erased cluster")
    p.add_argument("--gamma", type=int, default=1)
    p.add_argument("--sigma", type=int, default=1,
                   help="activation threshold (0 keeps zero-score ties active)")
    p.add_argument("--iters", type=int, default=4)
    p.set_defaults(fn=_cmd_retrieve)

    p = sub.add_parser("classify", help="accept/reject each message of a file")
    p.add_argument("--net", required=True)
    p.add_argument("--messages", required=True)
    p.add_argument("--gamma", type=int, default=1)
    p.add_argument("--sigma", type=int, default=None, help="default: cluster count")
    p.add_argument("--iters", type=int, default=1)
    p.set_defaults(fn=_cmd_classify)

    p = sub.add_parser("decode", help="soft decode against a codebook file")
    p.add_argument("--codebook", required=True, help="one word per line over +/-")
    p.add_argument("--input", required=True, help="string over + - X")
    p.add_argument("--sigma", type=int, default=0)
    p.set_defaults(fn=_cmd_decode)

    p = sub.add_parser("analyze", help="evaluate a closed-form formula")
    p.add_argument("formula", choices=sorted(_FORMULAS))
    p.add_argument("--n", type=int)
    p.add_argument("--c", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--d", type=float)
    p.add_argument("--c-e", dest="c_e", type=int)
    p.add_argument("--p0", type=float)
    p.add_argument("--gamma", type=int)
    p.add_argument("--levels", type=int)
    p.add_argument("--capacity", type=float)
    p.add_argument("--memory-bits", dest="memory_bits", type=float)
    p.set_defaults(fn=_cmd_analyze)

    p = sub.add_parser("sweep", help="run a Monte Carlo sweep from a config file")
    p.add_argument("--config", required=True, help="INI file with a [sweep] section")
    p.add_argument("--out", required=True, help="CSV output path, '-' for stdout")
    p.add_argument("--svg", help="optional SVG plot path")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--trials", type=int, help="override the config trial count")
    p.add_argument("--full", action="store_true",
                   help="use paper-scale cluster sizes when the config leaves them unset")
    p.set_defaults(fn=_cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.fn(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
