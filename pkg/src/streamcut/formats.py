"""Plain-text file formats.

Edge list::

    n m
    u v        (m lines, 1-based, a repeated line is a parallel edge)

Stream file::

    n length ordering_tag case_label seed
    u v        (length lines, 1-based, in stream order)

``case_label`` and ``seed`` are written as ``-`` when unknown.

Indicator bitmask: first line ``n``; then either ``2^n`` lines holding 0 or 1
(line ``x`` is membership of the point whose integer encoding is ``x``), or a
single line ``0x...`` whose bit ``x`` (least significant first) is membership
of ``x``.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import TextIO, Union

import numpy as np

from .distributions import Case, EdgeStream
from .graph import MultiGraph

PathLike = Union[str, Path]


def _write_edges(out: TextIO, edges: np.ndarray) -> None:
    for u, v in edges:
        out.write(f"{int(u) + 1} {int(v) + 1}\n")


def _read_edges(lines: list[str], count: int, n: int, where: str) -> np.ndarray:
    if len(lines) != count:
        raise ValueError(f"{where}: expected {count} edge lines, found {len(lines)}")
    edges = np.empty((count, 2), dtype=np.int64)
    for i, line in enumerate(lines):
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{where}: line {i + 2} is not 'u v'")
        u, v = int(parts[0]), int(parts[1])
        if not (1 <= u <= n and 1 <= v <= n):
            raise ValueError(f"{where}: line {i + 2} has a vertex outside 1..{n}")
        edges[i] = (u - 1, v - 1)
    return edges


def _content_lines(text: str) -> list[str]:
    return [ln for ln in text.splitlines() if ln.strip()]


def dumps_edge_list(G: MultiGraph) -> str:
    buf = io.StringIO()
    buf.write(f"{G.n} {G.m}\n")
    _write_edges(buf, G.edges)
    return buf.getvalue()


def loads_edge_list(text: str) -> MultiGraph:
    lines = _content_lines(text)
    if not lines:
        raise ValueError("edge list: empty input")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError("edge list: header must be 'n m'")
    n, m = int(head[0]), int(head[1])
    return MultiGraph(n, _read_edges(lines[1:], m, n, "edge list"))


def write_edge_list(path: PathLike, G: MultiGraph) -> None:
    Path(path).write_text(dumps_edge_list(G))


def read_edge_list(path: PathLike) -> MultiGraph:
    return loads_edge_list(Path(path).read_text())


def dumps_stream(stream: EdgeStream) -> str:
    case = stream.case_label.value if stream.case_label is not None else "-"
    seed = str(stream.seed) if stream.seed is not None else "-"
    buf = io.StringIO()
    buf.write(f"{stream.n} {len(stream)} {stream.ordering_tag} {case} {seed}\n")
    _write_edges(buf, stream.items)
    return buf.getvalue()


def loads_stream(text: str) -> EdgeStream:
    lines = _content_lines(text)
    if not lines:
        raise ValueError("stream file: empty input")
    head = lines[0].split()
    if len(head) != 5:
        raise ValueError("stream file: header must be 'n length ordering_tag case_label seed'")
    n, length = int(head[0]), int(head[1])
    case = None if head[3] == "-" else Case.parse(head[3])
    seed = None if head[4] == "-" else int(head[4])
    items = _read_edges(lines[1:], length, n, "stream file")
    return EdgeStream(n, items, head[2], case, seed)


def write_stream(path: PathLike, stream: EdgeStream) -> None:
    Path(path).write_text(dumps_stream(stream))


def read_stream(path: PathLike) -> EdgeStream:
    return loads_stream(Path(path).read_text())


def dumps_indicator(n: int, members: np.ndarray, packed: bool = False) -> str:
    """Serialise a boolean membership table of length ``2^n``."""
    members = np.asarray(members, dtype=bool)
    if members.shape != (2**n,):
        raise ValueError(f"membership table must have length 2^{n}")
    if packed:
        value = int.from_bytes(np.packbits(members, bitorder="little").tobytes(), "little")
        return f"{n}\n{hex(value)}\n"
    return f"{n}\n" + "".join("1\n" if b else "0\n" for b in members)


def loads_indicator(text: str) -> tuple[int, np.ndarray]:
    lines = _content_lines(text)
    if not lines:
        raise ValueError("bitmask file: empty input")
    n = int(lines[0])
    size = 2**n
    body = [ln.strip() for ln in lines[1:]]
    if len(body) == 1 and body[0].lower().startswith("0x"):
        value = int(body[0], 16)
        if value >> size:
            raise ValueError("bitmask file: packed value has bits beyond 2^n")
        raw = value.to_bytes((size + 7) // 8, "little")
        members = np.unpackbits(np.frombuffer(raw, dtype=np.uint8), bitorder="little")[:size]
        return n, members.astype(bool)
    if len(body) != size:
        raise ValueError(f"bitmask file: expected {size} membership lines, found {len(body)}")
    if any(b not in ("0", "1") for b in body):
        raise ValueError("bitmask file: membership lines must be 0 or 1")
    return n, np.array([b == "1" for b in body], dtype=bool)


def read_indicator(path: PathLike) -> tuple[int, np.ndarray]:
    return loads_indicator(Path(path).read_text())


def write_indicator(path: PathLike, n: int, members: np.ndarray, packed: bool = False) -> None:
    Path(path).write_text(dumps_indicator(n, members, packed))
