"""hMetis hypergraph files and one-block-id-per-line partition files.

Files are 1-indexed; everything in memory is 0-indexed.
"""
from __future__ import annotations

import io
import os
from typing import IO, Union

import numpy as np

from .hypergraph import Hypergraph, Partition

Source = Union[str, bytes, os.PathLike, IO[str], IO[bytes]]


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class HeaderError(ParseError):
    pass


class PinRangeError(ParseError):
    pass


class EmptyHyperedgeError(ParseError):
    pass


class WeightError(ParseError):
    pass


class PartitionFormatError(ParseError):
    pass


def _text(source: Source) -> str:
    if isinstance(source, bytes):
        return source.decode()
    if isinstance(source, (str, os.PathLike)):
        if isinstance(source, str) and "\n" in source:
            return source
        with open(source, encoding="utf-8") as fh:
            return fh.read()
    data = source.read()
    return data.decode() if isinstance(data, bytes) else data


def _lines(text: str) -> list[tuple[int, str]]:
    """Non-comment lines with their 1-based numbers, trailing blanks dropped."""
    out = [
        (number, raw.strip())
        for number, raw in enumerate(text.splitlines(), start=1)
        if not raw.lstrip().startswith("%")
    ]
    while out and not out[-1][1]:
        out.pop()
    return out


def _ints(line: str, number: int, error: type[ParseError]) -> list[int]:
    try:
        return [int(tok) for tok in line.split()]
    except ValueError:
        raise error(f"non-integer token in {line!r}", number) from None


def parse_hmetis(source: Source) -> Hypergraph:
    """Parse an hMetis hypergraph from a path, string, bytes or open stream.

    A string containing a newline is taken as file content, anything else as
    a path.
    """
    lines = _lines(_text(source))
    while lines and not lines[0][1]:
        lines.pop(0)
    if not lines:
        raise HeaderError("missing header")

    number, line = lines[0]
    header = _ints(line, number, HeaderError)
    if len(header) not in (2, 3) or header[0] < 0 or header[1] < 0:
        raise HeaderError(f"expected '|E| |V| [fmt]', got {line!r}", number)
    m, n = header[0], header[1]
    fmt = header[2] if len(header) == 3 else 0
    if fmt not in (0, 1, 10, 11):
        raise HeaderError(f"unknown format flag {fmt}", number)
    has_edge_weights = fmt in (1, 11)
    has_vertex_weights = fmt in (10, 11)
    expected = 1 + m + (n if has_vertex_weights else 0)
    if len(lines) < expected:
        raise HeaderError(f"header announces {expected - 1} data lines, found {len(lines) - 1}", number)
    if len(lines) > expected:
        number, line = lines[expected]
        raise HeaderError(f"unexpected trailing data {line!r}", number)

    edges: list[list[int]] = []
    edge_weights: list[int] = []
    for number, line in lines[1 : 1 + m]:
        values = _ints(line, number, PinRangeError)
        if has_edge_weights:
            if not values:
                raise EmptyHyperedgeError("missing hyperedge weight", number)
            if values[0] < 1:
                raise WeightError(f"non-positive hyperedge weight {values[0]}", number)
            edge_weights.append(values[0])
            values = values[1:]
        if not values:
            raise EmptyHyperedgeError("empty hyperedge", number)
        for v in values:
            if not 1 <= v <= n:
                raise PinRangeError(f"pin {v} outside 1..{n}", number)
        edges.append([v - 1 for v in values])

    vertex_weights: list[int] = []
    for number, line in lines[1 + m :]:
        values = _ints(line, number, WeightError)
        if len(values) != 1:
            raise WeightError(f"expected one vertex weight, got {line!r}", number)
        if values[0] < 1:
            raise WeightError(f"non-positive vertex weight {values[0]}", number)
        vertex_weights.append(values[0])

    return Hypergraph.from_edges(
        n,
        edges,
        vertex_weights if has_vertex_weights else None,
        edge_weights if has_edge_weights else None,
    )


def read_hmetis(path: str | os.PathLike) -> Hypergraph:
    with open(path, encoding="utf-8") as fh:
        return parse_hmetis(fh)


def write_hmetis(h: Hypergraph, stream: IO[str] | None = None) -> str:
    with_edges = bool((h.edge_weight != 1).any())
    with_vertices = bool((h.vertex_weight != 1).any())
    fmt = (10 if with_vertices else 0) + (1 if with_edges else 0)
    out = io.StringIO()
    out.write(f"{h.num_hyperedges} {h.num_vertices}" + (f" {fmt}" if fmt else "") + "\n")
    for e in range(h.num_hyperedges):
        pins = " ".join(str(v + 1) for v in h.pins_of(e))
        out.write((f"{h.edge_weight[e]} " if with_edges else "") + pins + "\n")
    if with_vertices:
        for w in h.vertex_weight:
            out.write(f"{w}\n")
    text = out.getvalue()
    if stream is not None:
        stream.write(text)
    return text


def parse_partition(source: Source, h: Hypergraph, k: int) -> Partition:
    blocks = []
    for number, line in _lines(_text(source)):
        if not line:
            continue
        values = _ints(line, number, PartitionFormatError)
        if len(values) != 1:
            raise PartitionFormatError(f"expected one block id, got {line!r}", number)
        if not 0 <= values[0] < k:
            raise PartitionFormatError(f"block id {values[0]} outside 0..{k - 1}", number)
        blocks.append(values[0])
    if len(blocks) != h.num_vertices:
        raise PartitionFormatError(f"expected {h.num_vertices} block ids, found {len(blocks)}")
    try:
        return Partition(h, k, np.asarray(blocks, dtype=np.int64))
    except ValueError as exc:
        raise PartitionFormatError(str(exc)) from None


def write_partition(p: Partition, stream: IO[str] | None = None) -> str:
    text = "".join(f"{b}\n" for b in p.assignment.tolist())
    if stream is not None:
        stream.write(text)
    return text
