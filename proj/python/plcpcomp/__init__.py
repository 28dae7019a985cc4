"""Bidirectional text compression over PLCP streams."""

from ._plcpcomp import (
    CodingError,
    FormatError,
    build_index,
    compress,
    decompress,
    factorize,
    graph_stats,
    lower_bound_text,
    oracle_references,
    stats,
)

__all__ = [
    "CodingError",
    "FormatError",
    "build_index",
    "compress",
    "decompress",
    "factorize",
    "graph_stats",
    "lower_bound_text",
    "oracle_references",
    "stats",
]
