"""Dataset readers and report writers.

Two hypergraph formats are understood:

* the timestamped-simplex triple (``<prefix>-nverts.txt``,
  ``<prefix>-simplices.txt``, ``<prefix>-times.txt``) with 1-based node ids;
* a plain edge list, one hyperedge per line, node names separated by
  whitespace or commas, an optional ``@ <time>`` suffix, ``#`` comments.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import re
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, HyperembedError, ParseError
from .hypercore import Hypergraph
from .report import Report

DEFAULT_MAX_CARDINALITY = 3
_SPLIT = re.compile(r"[\s,]+")


@dataclass(frozen=True, eq=False)
class SimplexDataset:
    hypergraph: Hypergraph
    names: list[str]
    source: str
    content_hash: str
    labels: np.ndarray | None = None
    stats: dict = field(default_factory=dict)

    def with_labels(self, labels: np.ndarray) -> "SimplexDataset":
        return SimplexDataset(self.hypergraph, self.names, self.source, self.content_hash, labels, self.stats)


def _hash_files(*paths) -> str:
    h = hashlib.sha256()
    for p in paths:
        h.update(Path(p).read_bytes())
    return h.hexdigest()


def _read_numbers(path, kind):
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                out.append(kind(line))
            except ValueError:
                raise ParseError(f"{path}:{lineno}: cannot parse {line!r}") from None
    return out


def triple_paths(prefix) -> tuple[Path, Path, Path]:
    prefix = str(prefix)
    return tuple(Path(f"{prefix}-{part}.txt") for part in ("nverts", "simplices", "times"))


def read_simplex_triple_files(
    nverts_path, simplices_path, times_path, max_cardinality: int = DEFAULT_MAX_CARDINALITY
) -> SimplexDataset:
    nverts = _read_numbers(nverts_path, int)
    verts = _read_numbers(simplices_path, int)
    times = _read_numbers(times_path, float)
    if sum(nverts) != len(verts):
        raise ParseError(
            f"nverts sums to {sum(nverts)} but {simplices_path} lists {len(verts)} vertices"
        )
    if len(times) != len(nverts):
        raise ParseError(f"{len(nverts)} simplices but {len(times)} timestamps")
    kept, kept_times = [], []
    repeated = out_of_range = 0
    pos = 0
    for k, t in zip(nverts, times):
        simplex = verts[pos:pos + k]
        pos += k
        if len(set(simplex)) != len(simplex):
            repeated += 1
            continue
        if not 2 <= k <= max_cardinality:
            out_of_range += 1
            continue
        kept.append(simplex)
        kept_times.append(t)
    ids = sorted({v for s in kept for v in s})
    index = {v: i for i, v in enumerate(ids)}
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        h = Hypergraph.from_edges(
            len(ids), [[index[v] for v in s] for s in kept], kept_times, max_cardinality
        )
    stats = {
        "simplices": len(nverts),
        "repeated_node_rejected": repeated,
        "cardinality_dropped": out_of_range,
        "duplicates_dropped": h.duplicates_dropped,
    }
    if repeated or out_of_range or h.duplicates_dropped:
        warnings.warn(f"simplex import: {stats}", stacklevel=2)
    return SimplexDataset(
        hypergraph=h,
        names=[str(v) for v in ids],
        source="triple",
        content_hash=_hash_files(nverts_path, simplices_path, times_path),
        stats=stats,
    )


def read_edge_list(path, max_cardinality: int | None = None) -> SimplexDataset:
    names: list[str] = []
    index: dict[str, int] = {}
    edges, times = [], []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            time = None
            if "@" in line:
                line, _, ts = line.partition("@")
                try:
                    time = float(ts.strip())
                except ValueError:
                    raise ParseError(f"{path}:{lineno}: bad timestamp {ts.strip()!r}") from None
            tokens = [tok for tok in _SPLIT.split(line.strip()) if tok]
            if len(tokens) < 2:
                raise ParseError(f"{path}:{lineno}: hyperedge needs at least 2 nodes")
            if len(set(tokens)) != len(tokens):
                raise ParseError(f"{path}:{lineno}: node repeated within a hyperedge")
            for tok in tokens:
                if tok not in index:
                    index[tok] = len(names)
                    names.append(tok)
            edges.append([index[tok] for tok in tokens])
            times.append(time)
    stamped = [t is not None for t in times]
    if any(stamped) and not all(stamped):
        raise ParseError(f"{path}: timestamps must be given on every line or none")
    h = Hypergraph.from_edges(
        len(names), edges, times if edges and all(stamped) else None, max_cardinality
    )
    return SimplexDataset(
        hypergraph=h,
        names=names,
        source="edgelist",
        content_hash=_hash_files(path),
        stats={"duplicates_dropped": h.duplicates_dropped},
    )


def read_dataset(path, fmt: str | None = None, max_cardinality: int = DEFAULT_MAX_CARDINALITY) -> SimplexDataset:
    """Read ``path`` as an edge list or as a simplex-triple prefix."""
    path = str(path)
    if fmt is None:
        fmt = "edgelist" if Path(path).is_file() else "triple"
    if fmt == "edgelist":
        return read_edge_list(path, max_cardinality)
    if fmt == "triple":
        paths = triple_paths(path)
        missing = [str(p) for p in paths if not p.is_file()]
        if missing:
            raise ConfigError(f"missing simplex files: {', '.join(missing)}")
        return read_simplex_triple_files(*paths, max_cardinality=max_cardinality)
    raise ConfigError(f"unknown format {fmt!r}")


def _fmt_time(t: float) -> str:
    return str(int(t)) if float(t).is_integer() and abs(t) < 2**53 else repr(float(t))


def write_edge_list(h: Hypergraph, names, path) -> None:
    lines = []
    for nodes, t in h.ordered():
        line = " ".join(str(names[v]) for v in nodes)
        if t is not None:
            line += f" @ {_fmt_time(t)}"
        lines.append(line)
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""))


@dataclass(frozen=True, eq=False)
class LabelSet:
    labels: np.ndarray  # object array, None where unlabeled
    missing: list[str]

    @property
    def labeled(self) -> np.ndarray:
        return np.array([lab is not None for lab in self.labels], dtype=bool)


def read_labels(path, names) -> LabelSet:
    index = {str(nm): i for i, nm in enumerate(names)}
    labels = np.full(len(names), None, dtype=object)
    seen = set()
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = _SPLIT.split(line, maxsplit=1)
            if len(parts) != 2:
                raise ParseError(f"{path}:{lineno}: expected 'node label'")
            node, lab = parts
            if node not in index:
                raise ParseError(f"{path}:{lineno}: unknown node {node!r}")
            if node in seen:
                raise ParseError(f"{path}:{lineno}: duplicate entry for node {node!r}")
            seen.add(node)
            labels[index[node]] = lab.strip()
    missing = [str(nm) for i, nm in enumerate(names) if labels[i] is None]
    if missing:
        warnings.warn(f"{len(missing)} nodes have no label", stacklevel=2)
    return LabelSet(labels, missing)


def write_labels(labels, names, path) -> None:
    Path(path).write_text("".join(f"{nm} {lab}\n" for nm, lab in zip(names, labels) if lab is not None))


# -- reports ----------------------------------------------------------------


def _scalar(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def _fmt_float(x: float) -> str:
    if not math.isfinite(x):
        return "nan" if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return format(x, ".17g")


def _json(v) -> str:
    v = _scalar(v)
    if v is None or isinstance(v, (bool, int, str)):
        return json.dumps(v)
    if isinstance(v, float):
        return _fmt_float(v) if math.isfinite(v) else "null"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple, np.ndarray)):
        return "[" + ", ".join(_json(x) for x in v) + "]"
    raise TypeError(f"cannot serialise {type(v).__name__}")


def render_report(report: Report, fmt: str) -> str:
    if fmt == "json":
        body = {"report": report.name, "meta": report.meta, "rows": report.records()}
        return _json(body) + "\n"
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(report.columns)
        for row in report.rows:
            w.writerow([_fmt_float(x) if isinstance(x, float) else x for x in map(_scalar, row)])
        return buf.getvalue()
    raise ConfigError(f"unknown report format {fmt!r}")


def write_report(report: Report, path, fmt: str | None = None) -> None:
    """Write ``report`` as CSV or JSON; the format defaults from the suffix."""
    path = Path(path)
    if fmt is None:
        fmt = "json" if path.suffix.lower() == ".json" else "csv"
    text = render_report(report, fmt)
    try:
        path.write_text(text)
    except OSError as exc:
        raise HyperembedError(f"cannot write report to {path}: {exc}") from exc
