"""Mesh file formats and report documents.

Two input formats are understood:

* native JSON: one document with ``nodes``, ``triangles``, ``boundary`` and
  optionally ``constrained_edges``.  Coordinates are JSON numbers (parsed
  with correct rounding) or hexadecimal float strings such as ``"0x1.8p+1"``.
  With ``"coordinate_encoding": "hexfloat"`` the writer emits hex strings.
* Triangle's ``.node``/``.ele`` pair plus a ``.poly`` whose segments form the
  boundary cycle.  Indices may start at 0 or 1; the ``.node`` file decides.

Coordinates are never reformatted through anything lossy: decimal output is
Python's shortest round-trip repr.
"""

from __future__ import annotations

import hashlib
import json
import math
import os
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Sequence

from .model import MeshDataset, validate_dataset_preconditions

NATIVE_FORMAT = "meshcert-native"
HEXFLOAT = "hexfloat"
_HEX_RE = re.compile(r"^[+-]?0[xX]")


class ParseError(ValueError):
    def __init__(self, line: int | None, column: int | None, reason: str, source: str | None = None):
        self.line, self.column, self.reason, self.source = line, column, reason, source
        where = source or "<input>"
        if line is not None:
            where += f":{line}"
            if column is not None:
                where += f":{column}"
        super().__init__(f"{where}: {reason}")


class IndexBaseMismatch(ParseError):
    pass


class MeshFormat(str, Enum):
    NATIVE = "native"
    TRIANGLE = "triangle"


@dataclass
class MeshFile:
    """Where a mesh came from: its format, the files read and their digest."""

    format: MeshFormat
    paths: tuple[Path, ...]
    sha256: str

    def as_dict(self) -> dict:
        return {
            "format": self.format.value,
            "paths": [str(p) for p in self.paths],
            "sha256": self.sha256,
        }


def _digest(chunks: Sequence[bytes]) -> str:
    h = hashlib.sha256()
    for c in chunks:
        h.update(c)
    return h.hexdigest()


def parse_float_token(tok: str) -> float:
    """Decimal (correctly rounded) or C99 hexadecimal float literal."""
    tok = tok.strip()
    if _HEX_RE.match(tok):
        return float.fromhex(tok)
    return float(tok)


# --------------------------------------------------------------------------
# native JSON


def _line_col(text: str, pos: int) -> tuple[int, int]:
    line = text.count("\n", 0, pos) + 1
    return line, pos - (text.rfind("\n", 0, pos) + 1) + 1


def _locate(text: str, path: Sequence[str | int]) -> int | None:
    """Character offset of the value at ``path`` inside a JSON text, if found."""
    dec = json.JSONDecoder()
    ws = re.compile(r"\s*")

    def skip(i: int) -> int:
        return ws.match(text, i).end()

    pos = skip(0)
    for step in path:
        if pos >= len(text):
            return None
        if isinstance(step, str):
            if text[pos] != "{":
                return None
            i = skip(pos + 1)
            found = None
            while i < len(text) and text[i] != "}":
                key, i = dec.raw_decode(text, i)
                i = skip(i)
                i = skip(i + 1)  # ':'
                if key == step:
                    found = i
                    break
                _, i = dec.raw_decode(text, i)
                i = skip(i)
                if i < len(text) and text[i] == ",":
                    i = skip(i + 1)
            if found is None:
                return None
            pos = found
        else:
            if text[pos] != "[":
                return None
            i = skip(pos + 1)
            for _ in range(step):
                if i >= len(text) or text[i] == "]":
                    return None
                _, i = dec.raw_decode(text, i)
                i = skip(i)
                if i < len(text) and text[i] == ",":
                    i = skip(i + 1)
            if i >= len(text) or text[i] == "]":
                return None
            pos = i
    return pos


class _NativeReader:
    def __init__(self, text: str, source: str | None):
        self.text = text
        self.source = source

    def fail(self, path: Sequence[str | int], reason: str) -> ParseError:
        label = "".join(f"[{p}]" if isinstance(p, int) else (f".{p}" if i else p) for i, p in enumerate(path))
        try:
            pos = _locate(self.text, path)
        except ValueError:
            pos = None
        line, col = _line_col(self.text, pos) if pos is not None else (None, None)
        return ParseError(line, col, f"{label}: {reason}" if label else reason, self.source)

    def coordinate(self, v: Any, path: list) -> float:
        if isinstance(v, bool):
            raise self.fail(path, "coordinate must be a number")
        if isinstance(v, (int, float)):
            x = float(v)
        elif isinstance(v, str):
            if not _HEX_RE.match(v.strip()):
                raise self.fail(path, f"string coordinate {v!r} is not a hexadecimal float literal")
            try:
                x = float.fromhex(v)
            except (ValueError, OverflowError):
                raise self.fail(path, f"bad hexadecimal float literal {v!r}") from None
        else:
            raise self.fail(path, "coordinate must be a number or hex string")
        if not math.isfinite(x):
            raise self.fail(path, f"coordinate {v!r} is not finite")
        return x

    def index(self, v: Any, path: list) -> int:
        if isinstance(v, bool) or not isinstance(v, int):
            raise self.fail(path, "index must be an integer")
        return v

    def array(self, v: Any, path: list) -> list:
        if not isinstance(v, list):
            raise self.fail(path, "expected an array")
        return v

    def read(self) -> MeshDataset:
        def no_constants(name: str):
            raise ValueError(f"non-finite literal {name}")

        try:
            doc = json.loads(self.text, parse_constant=no_constants)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.lineno, exc.colno, exc.msg, self.source) from None
        except ValueError as exc:
            raise ParseError(None, None, str(exc), self.source) from None
        if not isinstance(doc, dict):
            raise self.fail([], "top level must be an object")
        for key in ("nodes", "triangles", "boundary"):
            if key not in doc:
                raise self.fail([], f"missing field {key!r}")
        enc = doc.get("coordinate_encoding", "decimal")
        if enc not in ("decimal", HEXFLOAT):
            raise self.fail(["coordinate_encoding"], f"unknown encoding {enc!r}")

        nodes = []
        for i, p in enumerate(self.array(doc["nodes"], ["nodes"])):
            if not isinstance(p, list) or len(p) != 2:
                raise self.fail(["nodes", i], "node must be [x, y]")
            nodes.append((self.coordinate(p[0], ["nodes", i, 0]), self.coordinate(p[1], ["nodes", i, 1])))
        tris = []
        for t, tri in enumerate(self.array(doc["triangles"], ["triangles"])):
            if not isinstance(tri, list) or len(tri) != 3:
                raise self.fail(["triangles", t], "triangle must list 3 node indices")
            tris.append(tuple(self.index(v, ["triangles", t, k]) for k, v in enumerate(tri)))
        boundary = [self.index(v, ["boundary", k]) for k, v in enumerate(self.array(doc["boundary"], ["boundary"]))]
        cons = []
        for k, e in enumerate(self.array(doc.get("constrained_edges", []), ["constrained_edges"])):
            if not isinstance(e, list) or len(e) != 2:
                raise self.fail(["constrained_edges", k], "edge must be [i, j]")
            i, j = (self.index(v, ["constrained_edges", k, m]) for m, v in enumerate(e))
            if i == j:
                raise self.fail(["constrained_edges", k], "edge endpoints must differ")
            cons.append((i, j))
        return MeshDataset.build(nodes, tris, boundary, cons)


def parse_native(text: str, source: str | None = None) -> MeshDataset:
    return _NativeReader(text, source).read()


def _coord_out(x: float, hexfloat: bool):
    return x.hex() if hexfloat else x


def emit_native(d: MeshDataset, hexfloat: bool = False) -> str:
    doc: dict[str, Any] = {"format": NATIVE_FORMAT}
    if hexfloat:
        doc["coordinate_encoding"] = HEXFLOAT
    doc["nodes"] = [[_coord_out(p.x, hexfloat), _coord_out(p.y, hexfloat)] for p in d.nodes]
    doc["triangles"] = [list(t) for t in d.triangles]
    doc["boundary"] = list(d.boundary)
    doc["constrained_edges"] = [list(e) for e in sorted(d.constrained_edges)]
    # one node or triangle per line keeps diffs and error locations readable
    lines = ["{"]
    keys = list(doc)
    for n, key in enumerate(keys):
        tail = "," if n < len(keys) - 1 else ""
        val = doc[key]
        if isinstance(val, list) and val and isinstance(val[0], list):
            lines.append(f"  {json.dumps(key)}: [")
            for k, item in enumerate(val):
                lines.append("    " + json.dumps(item) + ("," if k < len(val) - 1 else ""))
            lines.append("  ]" + tail)
        else:
            lines.append(f"  {json.dumps(key)}: {json.dumps(val)}{tail}")
    lines.append("}")
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# Triangle .node / .ele / .poly


def _data_lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        body = raw.split("#", 1)[0]
        toks = body.split()
        if toks:
            yield n, raw, toks


def _int_tok(tok: str, n: int, raw: str, source: str) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(n, raw.find(tok) + 1, f"expected an integer, got {tok!r}", source) from None


def _read_node(text: str, source: str) -> tuple[list[tuple[float, float]], int]:
    lines = _data_lines(text)
    try:
        n, raw, head = next(lines)
    except StopIteration:
        raise ParseError(1, 1, "empty .node file", source) from None
    count = _int_tok(head[0], n, raw, source)
    if len(head) > 1 and _int_tok(head[1], n, raw, source) != 2:
        raise ParseError(n, raw.find(head[1]) + 1, "only 2D meshes are supported", source)
    nodes = []
    base = None
    for n, raw, toks in lines:
        if len(nodes) == count:
            raise ParseError(n, 1, f"more than the declared {count} vertices", source)
        if len(toks) < 3:
            raise ParseError(n, 1, "vertex line needs an index and two coordinates", source)
        idx = _int_tok(toks[0], n, raw, source)
        if base is None:
            if idx not in (0, 1):
                raise ParseError(n, raw.find(toks[0]) + 1, f"first vertex must be numbered 0 or 1, got {idx}", source)
            base = idx
        if idx != base + len(nodes):
            raise ParseError(n, raw.find(toks[0]) + 1, f"vertices must be numbered consecutively, expected {base + len(nodes)}", source)
        xy = []
        for tok in toks[1:3]:
            try:
                v = parse_float_token(tok)
            except (ValueError, OverflowError):
                raise ParseError(n, raw.find(tok) + 1, f"bad coordinate {tok!r}", source) from None
            if not math.isfinite(v):
                raise ParseError(n, raw.find(tok) + 1, f"coordinate {tok!r} is not finite", source)
            xy.append(v)
        nodes.append((xy[0], xy[1]))
    if len(nodes) != count:
        raise ParseError(None, None, f"declared {count} vertices, found {len(nodes)}", source)
    return nodes, 0 if base is None else base


def _rebase(v: int, base: int, n_p: int, n: int, raw: str, tok: str, source: str) -> int:
    i = v - base
    if 0 <= i < n_p:
        return i
    col = raw.find(tok) + 1
    if (base == 1 and v == 0) or (base == 0 and v == n_p):
        raise IndexBaseMismatch(
            n, col, f"index {v} does not fit the {base}-based numbering of the .node file", source
        )
    raise ParseError(n, col, f"node index {v} out of range", source)


def _read_ele(text: str, source: str, base: int, n_p: int) -> list[tuple[int, int, int]]:
    lines = _data_lines(text)
    try:
        n, raw, head = next(lines)
    except StopIteration:
        raise ParseError(1, 1, "empty .ele file", source) from None
    count = _int_tok(head[0], n, raw, source)
    if len(head) > 1 and _int_tok(head[1], n, raw, source) != 3:
        raise ParseError(n, raw.find(head[1]) + 1, "only 3-node triangles are supported", source)
    tris = []
    for n, raw, toks in lines:
        if len(toks) < 4:
            raise ParseError(n, 1, "triangle line needs an index and three nodes", source)
        tri = tuple(_rebase(_int_tok(t, n, raw, source), base, n_p, n, raw, t, source) for t in toks[1:4])
        tris.append(tri)
    if len(tris) != count:
        raise ParseError(None, None, f"declared {count} triangles, found {len(tris)}", source)
    return tris  # type: ignore[return-value]


def _read_poly(text: str, source: str, base: int, n_p: int) -> list[tuple[int, int]]:
    lines = _data_lines(text)
    try:
        n, raw, head = next(lines)
    except StopIteration:
        raise ParseError(1, 1, "empty .poly file", source) from None
    if _int_tok(head[0], n, raw, source) != 0:
        raise ParseError(n, 1, "vertices must live in the .node file (vertex count 0 expected)", source)
    try:
        n, raw, head = next(lines)
    except StopIteration:
        raise ParseError(None, None, "missing segment section", source) from None
    count = _int_tok(head[0], n, raw, source)
    segs = []
    for n, raw, toks in lines:
        if len(segs) == count:
            break  # holes and regions follow; not used
        if len(toks) < 3:
            raise ParseError(n, 1, "segment line needs an index and two nodes", source)
        segs.append(tuple(_rebase(_int_tok(t, n, raw, source), base, n_p, n, raw, t, source) for t in toks[1:3]))
    if len(segs) != count:
        raise ParseError(None, None, f"declared {count} segments, found {len(segs)}", source)
    return segs  # type: ignore[return-value]


def _chain(segs: list[tuple[int, int]], nodes, source: str) -> list[int]:
    """Order undirected segments into one cycle, then make it clockwise."""
    adj: dict[int, list[int]] = {}
    for a, b in segs:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    for v, ns in adj.items():
        if len(ns) != 2:
            raise ParseError(None, None, f"boundary segments do not form a simple cycle at node {v}", source)
    start = segs[0][0]
    cycle = [start]
    prev, cur = start, adj[start][0]
    while cur != start:
        cycle.append(cur)
        a, b = adj[cur]
        prev, cur = cur, (b if a == prev else a)
    if len(cycle) != len(adj):
        raise ParseError(None, None, "boundary segments form more than one cycle", source)
    area2 = sum(
        Fraction(nodes[u][0]) * Fraction(nodes[v][1]) - Fraction(nodes[v][0]) * Fraction(nodes[u][1])
        for u, v in zip(cycle, cycle[1:] + cycle[:1])
    )
    if area2 > 0:
        cycle = [cycle[0]] + cycle[:0:-1]
    return cycle


def triangle_paths(path: str | os.PathLike) -> tuple[Path, Path, Path]:
    p = Path(path)
    stem = p.with_suffix("") if p.suffix in (".node", ".ele", ".poly") else p
    return stem.with_suffix(".node"), stem.with_suffix(".ele"), stem.with_suffix(".poly")


def parse_triangle(node_text: str, ele_text: str, poly_text: str, sources=("<node>", "<ele>", "<poly>")) -> MeshDataset:
    nodes, base = _read_node(node_text, sources[0])
    tris = _read_ele(ele_text, sources[1], base, len(nodes))
    segs = _read_poly(poly_text, sources[2], base, len(nodes))
    if not segs:
        raise ParseError(None, None, "no boundary segments", sources[2])
    return MeshDataset.build(nodes, tris, _chain(segs, nodes, sources[2]))


def emit_triangle(d: MeshDataset) -> tuple[str, str, str]:
    """Write 1-based .node, .ele and .poly texts."""
    node = [f"{d.n_points} 2 0 0"]
    node += [f"{i + 1} {p.x!r} {p.y!r}" for i, p in enumerate(d.nodes)]
    ele = [f"{d.n_triangles} 3 0"]
    ele += [f"{t + 1} {a + 1} {b + 1} {c + 1}" for t, (a, b, c) in enumerate(d.triangles)]
    b = d.boundary
    poly = ["0 2 0 0", f"{len(b)} 0"]
    poly += [f"{k + 1} {b[k] + 1} {b[(k + 1) % len(b)] + 1}" for k in range(len(b))]
    poly.append("0")
    return tuple("\n".join(x) + "\n" for x in (node, ele, poly))  # type: ignore[return-value]


# --------------------------------------------------------------------------
# file level


def detect_format(path: str | os.PathLike) -> MeshFormat:
    suffix = Path(path).suffix.lower()
    if suffix in (".node", ".ele", ".poly"):
        return MeshFormat.TRIANGLE
    return MeshFormat.NATIVE


def parse_mesh(
    path: str | os.PathLike, fmt: MeshFormat | str | None = None, check: bool = True
) -> tuple[MeshDataset, MeshFile]:
    """Read a mesh from disk.

    With ``check`` the dataset preconditions are enforced here, so a returned
    dataset is always well formed.
    """
    fmt = MeshFormat(fmt) if fmt else detect_format(path)
    if fmt is MeshFormat.NATIVE:
        p = Path(path)
        raw = p.read_bytes()
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise ParseError(None, None, f"not UTF-8: {exc}", str(p)) from None
        d = parse_native(text, str(p))
        paths: tuple[Path, ...] = (p,)
        blobs = [raw]
    else:
        paths = triangle_paths(path)
        blobs = [p.read_bytes() for p in paths]
        texts = [b.decode("utf-8", errors="replace") for b in blobs]
        d = parse_triangle(*texts, sources=tuple(str(p) for p in paths))
    if check:
        validate_dataset_preconditions(d)
    return d, MeshFile(fmt, paths, _digest(blobs))


def write_mesh(d: MeshDataset, path: str | os.PathLike, fmt: MeshFormat | str | None = None, hexfloat: bool = False) -> None:
    fmt = MeshFormat(fmt) if fmt else detect_format(path)
    if fmt is MeshFormat.NATIVE:
        Path(path).write_text(emit_native(d, hexfloat))
        return
    for p, text in zip(triangle_paths(path), emit_triangle(d)):
        p.write_text(text)


def dumps_report(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def loads_report(text: str) -> dict:
    return json.loads(text)
