"""File formats: CSV data matrices, TSV edge lists, JSON models and reports.

All text is UTF-8 with LF newlines, enforced on read and on write.  Node
indices are 1-based in every file (0-based in memory).  Writers emit
canonical bytes: sorted keys, fixed indentation, shortest round-tripping
float representation.  Serializing the same object twice, on any worker,
yields identical files.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ParseError, RaggedRow
from .graph import EdgeSet
from .numeric import DataMatrix, SymMatrix
from .synth import GgmModel, TrueGraph, covariance_from_precision

# Bumped whenever a serialized layout changes incompatibly.
FORMAT_VERSION = 1


def _read_lines(path) -> list[str]:
    """Decode a file strictly as UTF-8 and split on LF.

    A trailing newline does not produce a final empty line.  Carriage
    returns are left in place so CRLF input fails field parsing instead
    of being silently translated.
    """
    raw = Path(path).read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as e:
        raise ParseError(raw[: e.start].count(b"\n") + 1, 1, "invalid UTF-8") from None
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    return lines


def load_csv(path) -> DataMatrix:
    """Read a comma-separated data matrix with header ``x1,...,xp``.

    Columns in error messages are 1-based field positions, not character
    offsets.  Values must be finite decimal numbers; the returned matrix
    is unstandardized.
    """
    lines = _read_lines(path)
    if not lines:
        raise ParseError(1, 1, "missing header")
    header = lines[0].split(",")
    for i, name in enumerate(header):
        if name != f"x{i + 1}":
            raise ParseError(1, i + 1, f"expected header field 'x{i + 1}', got {name!r}")
    p = len(header)
    rows = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != p:
            raise RaggedRow(lineno)
        row = []
        for col, field in enumerate(fields, start=1):
            try:
                value = float(field)
            except ValueError:
                raise ParseError(lineno, col, f"not a number: {field!r}") from None
            if not np.isfinite(value):
                raise ParseError(lineno, col, f"non-finite value: {field!r}")
            row.append(value)
        rows.append(row)
    values = np.array(rows, dtype=float).reshape(len(rows), p)
    return DataMatrix(values, standardized=False)


def write_csv(data: DataMatrix, path) -> None:
    """Write a data matrix in the format ``load_csv`` reads.

    Floats are rendered with ``repr``, the shortest form that parses
    back to the same bits, so a write/read round trip is exact.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(f"x{j + 1}" for j in range(data.p)) + "\n")
        for row in data.values:
            fh.write(",".join(repr(float(v)) for v in row) + "\n")


def write_edges(edge_set: EdgeSet, path) -> None:
    """Write ``a<TAB>b`` lines, 1-based, a < b, sorted lexicographically.

    The empty edge set produces an empty file.  Because the edge set is
    already normalized and the order is canonical, write and re-read
    round-trips byte for byte.
    """
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for a, b in edge_set.sorted_edges():
            fh.write(f"{a + 1}\t{b + 1}\n")


def read_edges(path, p: int, rule: str = "truth") -> EdgeSet:
    """Read a TSV edge list onto p nodes.

    Input lines may list either endpoint first; edges are normalized on
    read.  Node indices outside 1..p, self edges, and duplicate edges are
    rejected with the offending 1-based line number.
    """
    edges: set[tuple[int, int]] = set()
    for lineno, line in enumerate(_read_lines(path), start=1):
        fields = line.split("\t")
        if len(fields) != 2:
            raise RaggedRow(lineno)
        pair = []
        for col, field in enumerate(fields, start=1):
            try:
                value = int(field)
            except ValueError:
                raise ParseError(lineno, col, f"not an integer: {field!r}") from None
            if not 1 <= value <= p:
                raise ParseError(lineno, col, f"node {value} outside 1..{p}")
            pair.append(value - 1)
        a, b = pair
        if a == b:
            raise ParseError(lineno, 1, f"self edge on node {a + 1}")
        edge = (a, b) if a < b else (b, a)
        if edge in edges:
            raise ParseError(lineno, 1, f"duplicate edge {edge[0] + 1}\t{edge[1] + 1}")
        edges.add(edge)
    return EdgeSet(p=p, edges=frozenset(edges), rule=rule)


def canonical_json(obj) -> str:
    """Serialize to the canonical report form: sorted keys, 2-space
    indent, trailing newline, no NaN or infinity."""
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def write_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(canonical_json(obj))


def read_json(path):
    raw = Path(path).read_bytes()
    try:
        return json.loads(raw.decode("utf-8"))
    except UnicodeDecodeError as e:
        raise ParseError(raw[: e.start].count(b"\n") + 1, 1, "invalid UTF-8") from None
    except json.JSONDecodeError as e:
        raise ParseError(e.lineno, e.colno, e.msg) from None


def _require(payload: dict, key: str):
    if not isinstance(payload, dict) or key not in payload:
        raise ParseError(1, 1, f"missing field {key!r}")
    return payload[key]


def write_model(model: GgmModel, path) -> None:
    """Serialize a model: graph geometry, edges, and precision entries.

    The covariance is not stored; readers recompute it from the
    precision, which is exact because the rescaled inverse is a
    deterministic function of the stored entries.
    """
    graph = model.graph
    edges = sorted(graph.edges)
    k = model.precision.values
    payload = {
        "format_version": FORMAT_VERSION,
        "kind": "model",
        "p": graph.p,
        "max_degree": graph.max_degree,
        "raw_edge_count": graph.raw_edge_count,
        "positions": [[float(x), float(y)] for x, y in graph.positions],
        "edges": [[a + 1, b + 1] for a, b in edges],
        "precision_diagonal": [float(v) for v in np.diag(k)],
        "precision_edges": [float(k[a, b]) for a, b in edges],
    }
    write_json(payload, path)


def read_model(path) -> GgmModel:
    payload = read_json(path)
    if _require(payload, "kind") != "model":
        raise ParseError(1, 1, "not a model file")
    if _require(payload, "format_version") != FORMAT_VERSION:
        raise ParseError(1, 1, f"unsupported format_version {payload['format_version']!r}")
    p = int(_require(payload, "p"))
    edges = frozenset((a - 1, b - 1) for a, b in _require(payload, "edges"))
    graph = TrueGraph(
        p=p,
        positions=np.array(_require(payload, "positions"), dtype=float).reshape(p, 2),
        edges=edges,
        raw_edge_count=int(_require(payload, "raw_edge_count")),
        max_degree=int(_require(payload, "max_degree")),
    )
    k = np.diag(np.array(_require(payload, "precision_diagonal"), dtype=float))
    for (a, b), value in zip(sorted(graph.edges), _require(payload, "precision_edges")):
        k[a, b] = k[b, a] = float(value)
    precision = SymMatrix(k)
    return GgmModel(
        graph=graph, precision=precision, covariance=covariance_from_precision(precision)
    )
