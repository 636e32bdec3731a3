"""Clustered clique-coded associative memory, winner-take-all decoding,
closed-form analysis, a Hopfield baseline and Monte Carlo sweeps."""

from .clique import (AMBIGUOUS, ERASED, SILENT, UNIQUE, CliqueNetwork,
                     ClusterTopology, DecodeParams, DecodeResult, FanalPattern,
                     Message, message_of, pattern_of)
from .wta import Codebook, SoftMLDecoder, SoftOutput, cluster_wta, max2, max_tree
from .hopfield import HopfieldNetwork

__all__ = [
    "AMBIGUOUS", "ERASED", "SILENT", "UNIQUE",
    "CliqueNetwork", "ClusterTopology", "DecodeParams", "DecodeResult",
    "FanalPattern", "Message", "message_of", "pattern_of",
    "Codebook", "SoftMLDecoder", "SoftOutput", "cluster_wta", "max2", "max_tree",
    "HopfieldNetwork",
]

__version__ = "0.1.0"
