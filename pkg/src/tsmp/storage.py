"""Graph persistence: a checksummed binary file and a JSON twin of the same schema.

Binary layout (little-endian)::

    header    magic "DMEG", u16 version, u16 reserved,
              u32 string count, u32 vertex count, u32 run count,
              u32 edge count, u64 timestamp count, f64 v_max
    strings   per string: u32 byte length + UTF-8 bytes (ids, names, bus ids)
    vertices  per vertex: u32 id, u32 name, f64 lat, f64 lon,
              u32 first schedule run, u32 run count
    runs      per (vertex, bus) run: u32 bus, u32 first timestamp, u32 length
    times     u32 timestamps, runs laid out back to back
    edges     per edge: u32 source, u32 target, u32 bus, i32 ride
    trailer   u32 CRC-32 of everything above

Strings are referenced by index into the string table.
"""
from __future__ import annotations

import json
import math
import struct
import sys
import zlib
from array import array
from pathlib import Path

from .graph import DmeGraph, Edge, Vertex

MAGIC = b"DMEG"
VERSION = 1
TEXT_FORMAT = "dme-graph"

_HEADER = struct.Struct("<4sHHIIIIQd")
_VERTEX = struct.Struct("<IIddII")
_EDGE = struct.Struct("<IIIi")


class GraphFormatError(Exception):
    pass


def _u32(values) -> bytes:
    a = array("I", values)
    if sys.byteorder != "little":
        a.byteswap()
    return a.tobytes()


def _read_u32(buf: bytes) -> list[int]:
    a = array("I")
    a.frombytes(buf)
    if sys.byteorder != "little":
        a.byteswap()
    return a.tolist()


def dumps(g: DmeGraph) -> bytes:
    strings: dict[str, int] = {}

    def sid(s: str) -> int:
        return strings.setdefault(s, len(strings))

    vrows, runs, times = [], [], []
    for v in g.vertices.values():
        first = len(runs) // 3
        for bus in sorted(v.schedule):
            ts = v.schedule[bus]
            runs.extend((sid(bus), len(times), len(ts)))
            times.extend(ts)
        vrows.append((sid(v.id), sid(v.name), v.lat, v.lon, first, len(runs) // 3 - first))
    erows = [(sid(e.source), sid(e.target), sid(e.bus), e.ride) for e in g.edges]

    parts = [_HEADER.pack(MAGIC, VERSION, 0, len(strings), len(vrows), len(runs) // 3,
                          len(erows), len(times), g.v_max)]
    for s in strings:
        b = s.encode("utf-8")
        parts.append(struct.pack("<I", len(b)) + b)
    parts.extend(_VERTEX.pack(*r) for r in vrows)
    try:
        parts.append(_u32(runs))
        parts.append(_u32(times))
        parts.extend(_EDGE.pack(*r) for r in erows)
    except (OverflowError, struct.error) as exc:
        raise GraphFormatError(f"graph not representable: {exc}") from None
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


def loads(data: bytes) -> DmeGraph:
    if len(data) < _HEADER.size + 4:
        raise GraphFormatError("truncated graph file")
    body, (crc,) = data[:-4], struct.unpack("<I", data[-4:])
    magic, version, _, n_str, n_v, n_runs, n_e, n_t, v_max = _HEADER.unpack_from(body)
    if magic != MAGIC:
        raise GraphFormatError("not a graph file (bad magic)")
    if version != VERSION:
        raise GraphFormatError(f"unsupported format version {version} (expected {VERSION})")
    if zlib.crc32(body) != crc:
        raise GraphFormatError("checksum mismatch: file is corrupted or truncated")
    try:
        pos = _HEADER.size
        strings = []
        for _ in range(n_str):
            (n,) = struct.unpack_from("<I", body, pos)
            pos += 4
            strings.append(body[pos:pos + n].decode("utf-8"))
            pos += n
        vrows = []
        for _ in range(n_v):
            vrows.append(_VERTEX.unpack_from(body, pos))
            pos += _VERTEX.size
        runs = _read_u32(body[pos:pos + 12 * n_runs])
        pos += 12 * n_runs
        times = _read_u32(body[pos:pos + 4 * n_t])
        pos += 4 * n_t
        edges = []
        for _ in range(n_e):
            s, t, b, ride = _EDGE.unpack_from(body, pos)
            edges.append(Edge(strings[s], strings[t], strings[b], ride))
            pos += _EDGE.size
        if pos != len(body) or len(runs) != 3 * n_runs or len(times) != n_t:
            raise GraphFormatError("graph file length does not match its header")
        vertices = []
        for vid, name, lat, lon, first, count in vrows:
            sched = {}
            for r in range(first, first + count):
                bus, start, n = runs[3 * r:3 * r + 3]
                sched[strings[bus]] = tuple(times[start:start + n])
            vertices.append(Vertex(strings[vid], strings[name], lat, lon, sched))
    except (struct.error, IndexError, UnicodeDecodeError, ValueError) as exc:
        raise GraphFormatError(f"malformed graph file: {exc}") from None
    return DmeGraph(vertices, edges, v_max=v_max)


def to_document(g: DmeGraph) -> dict:
    return {
        "format": TEXT_FORMAT,
        "version": VERSION,
        "v_max": None if math.isinf(g.v_max) else g.v_max,
        "vertices": [{"id": v.id, "name": v.name, "lat": v.lat, "lon": v.lon,
                      "schedule": {b: list(v.schedule[b]) for b in sorted(v.schedule)}}
                     for v in g.vertices.values()],
        "edges": [[e.source, e.target, e.bus, e.ride] for e in g.edges],
    }


def from_document(doc: dict) -> DmeGraph:
    if doc.get("format") != TEXT_FORMAT:
        raise GraphFormatError("not a graph document")
    if doc.get("version") != VERSION:
        raise GraphFormatError(f"unsupported format version {doc.get('version')}")
    try:
        v_max = doc["v_max"]
        vertices = [Vertex(v["id"], v["name"], float(v["lat"]), float(v["lon"]),
                           {b: tuple(ts) for b, ts in v["schedule"].items()})
                    for v in doc["vertices"]]
        edges = [Edge(s, t, b, int(r)) for s, t, b, r in doc["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise GraphFormatError(f"malformed graph document: {exc}") from None
    return DmeGraph(vertices, edges, v_max=math.inf if v_max is None else float(v_max))


def save_graph(g: DmeGraph, path: str | Path) -> None:
    """Write ``g``; a ``.json`` suffix selects the text form."""
    path = Path(path)
    if path.suffix == ".json":
        path.write_text(json.dumps(to_document(g), indent=1) + "\n", encoding="utf-8")
    else:
        path.write_bytes(dumps(g))


def load_graph(path: str | Path) -> DmeGraph:
    path = Path(path)
    data = path.read_bytes()
    if data[:4] == MAGIC:
        return loads(data)
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise GraphFormatError(f"{path}: neither a binary graph nor a graph document") from None
    if not isinstance(doc, dict):
        raise GraphFormatError(f"{path}: not a graph document")
    return from_document(doc)
