"""Coalesced stack-trace graphs: build, diff, and DOT emission.

Many stack traces collapse into one weighted digraph: frames become nodes
(keyed by function+file:line, or function only under the coarse policy) and
each caller->callee adjacency adds one to its edge count. Diffs subtract edge
counts between two graphs built with the same key policy; DOT output is
deterministic so renders and golden files are stable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .traces import Frame, StackTrace

GRAPH_FORMAT = "stackgraph-v1"
DIFF_FORMAT = "stackgraph-diff-v1"
KEY_POLICIES = ("fine", "coarse")


class GraphFormatError(ValueError):
    pass


class KeyPolicyMismatch(ValueError):
    pass


def frame_key(frame: Frame, key_policy: str = "fine") -> str:
    if key_policy == "coarse":
        return frame.function
    return f"{frame.function} {frame.file}:{frame.line}"


@dataclass
class StackGraph:
    key_policy: str = "fine"
    nodes: set = field(default_factory=set)
    edges: dict = field(default_factory=dict)   # (parent_key, child_key) -> count
    trace_total: int = 0


@dataclass
class GraphDiff:
    key_policy: str = "fine"
    edges: dict = field(default_factory=dict)   # (parent_key, child_key) -> delta


def build(traces, key_policy: str = "fine") -> StackGraph:
    """Coalesce traces (innermost-first) into a weighted caller->callee digraph."""
    if key_policy not in KEY_POLICIES:
        raise ValueError(f"unknown key policy: {key_policy!r}")
    g = StackGraph(key_policy=key_policy)
    for trace in traces:
        g.trace_total += 1
        keys = [frame_key(f, key_policy) for f in reversed(trace)]  # outermost first
        g.nodes.update(keys)
        for parent, child in zip(keys, keys[1:]):
            edge = (parent, child)
            g.edges[edge] = g.edges.get(edge, 0) + 1
    return g


def diff(before: StackGraph, after: StackGraph) -> GraphDiff:
    """Per-edge count deltas (after - before); zero deltas are dropped."""
    if before.key_policy != after.key_policy:
        raise KeyPolicyMismatch(
            f"cannot diff {before.key_policy!r} graph against {after.key_policy!r} graph"
        )
    d = GraphDiff(key_policy=before.key_policy)
    for edge in set(before.edges) | set(after.edges):
        delta = after.edges.get(edge, 0) - before.edges.get(edge, 0)
        if delta != 0:
            d.edges[edge] = delta
    return d


def slice_traces(traces, fraction: float):
    """Split in ledger order: head gets the first ceil(fraction*n) traces."""
    if not 0.0 < fraction < 1.0:
        raise ValueError("fraction must be strictly between 0 and 1")
    traces = list(traces)
    cut = math.ceil(fraction * len(traces))
    return traces[:cut], traces[cut:]


def _quote(name: str) -> str:
    return '"' + name.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(g: StackGraph) -> str:
    if not g.nodes and not g.edges:
        return "digraph G { }\n"
    max_count = max(g.edges.values(), default=1)
    lines = ["digraph G {", "  node [shape=box];"]
    for node in sorted(g.nodes):
        lines.append(f"  {_quote(node)};")
    for (parent, child) in sorted(g.edges):
        count = g.edges[(parent, child)]
        width = 1.0 + 3.0 * count / max_count
        lines.append(
            f"  {_quote(parent)} -> {_quote(child)} "
            f'[label="{count}", penwidth={width:.2f}];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def emit_dot_diff(d: GraphDiff) -> str:
    if not d.edges:
        return "digraph G { }\n"
    max_mag = max(abs(v) for v in d.edges.values())
    nodes = sorted({k for edge in d.edges for k in edge})
    lines = ["digraph G {", "  node [shape=box];"]
    for node in nodes:
        lines.append(f"  {_quote(node)};")
    for (parent, child) in sorted(d.edges):
        delta = d.edges[(parent, child)]
        color = "green" if delta > 0 else "red"
        label = f"+{delta}" if delta > 0 else str(delta)
        width = 1.0 + 3.0 * abs(delta) / max_mag
        lines.append(
            f"  {_quote(parent)} -> {_quote(child)} "
            f'[label="{label}", color="{color}", penwidth={width:.2f}];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_to_json(g: StackGraph) -> dict:
    return {
        "format": GRAPH_FORMAT,
        "key_policy": g.key_policy,
        "trace_total": g.trace_total,
        "nodes": sorted(g.nodes),
        "edges": [
            {"parent": p, "child": c, "count": g.edges[(p, c)]}
            for (p, c) in sorted(g.edges)
        ],
    }


def graph_from_json(obj: dict) -> StackGraph:
    if not isinstance(obj, dict) or obj.get("format") != GRAPH_FORMAT:
        raise GraphFormatError("not a stack-graph document")
    g = StackGraph(key_policy=obj["key_policy"], trace_total=obj["trace_total"])
    g.nodes = set(obj["nodes"])
    for e in obj["edges"]:
        g.edges[(e["parent"], e["child"])] = e["count"]
    return g


def diff_to_json(d: GraphDiff) -> dict:
    return {
        "format": DIFF_FORMAT,
        "key_policy": d.key_policy,
        "edges": [
            {"parent": p, "child": c, "delta": d.edges[(p, c)]}
            for (p, c) in sorted(d.edges)
        ],
    }


def save_graph(g: StackGraph, path) -> None:
    Path(path).write_text(json.dumps(graph_to_json(g), indent=2) + "\n", encoding="utf-8")


def load_graph(path) -> StackGraph:
    try:
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise GraphFormatError(f"not valid JSON: {exc.msg}") from exc
    return graph_from_json(obj)


def traces_from_events(events) -> list:
    """The stack traces of a sequence of ledger events, in ledger order."""
    return [e.trace for e in events]


def parse_trace_text(text: str) -> list:
    """Plain-text traces: blank-line-separated blocks of `function<TAB>file:line`,
    innermost frame first, for interoperability with other collectors."""
    traces = []
    current = []
    for raw in text.splitlines():
        line = raw.rstrip()
        if not line:
            if current:
                traces.append(tuple(current))
                current = []
            continue
        function, _, location = line.partition("\t")
        file, _, lineno = location.rpartition(":")
        if not function or not file or not lineno.isdigit():
            raise GraphFormatError(f"bad trace line: {raw!r}")
        current.append(Frame(function, file, int(lineno)))
    if current:
        traces.append(tuple(current))
    return traces


def format_trace_text(traces) -> str:
    blocks = []
    for trace in traces:
        blocks.append("\n".join(f"{f.function}\t{f.file}:{f.line}" for f in trace))
    return "\n\n".join(blocks) + ("\n" if blocks else "")
