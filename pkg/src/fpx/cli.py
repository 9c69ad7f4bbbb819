"""Command-line front end.

Subcommands:
  run     execute a demo (optionally fuzzing) and write gen/prop/kill logs
  replay  re-run a demo against a saved injection recording
  cstg    coalesce a log (or plain-text traces) into a stack graph / DOT
  diff    diff two stack graphs (or logs) and emit polarity-colored DOT
  render  print a log in the human block format

Exit codes: 0 success, 1 usage error, 2 I/O or file-format error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import fpbits, stackgraph
from .classify import EventKind, ValueClass
from .demos import demo_loop_kill, demo_max, demo_sim
from .injector import (InjectionConfig, Injector, RecordingFormatError,
                       load_recording, save_recording)
from .ledger import LedgerConfig, LogFormatError, parse_log, render_human
from .session import explicit_session
from .stackgraph import GraphFormatError


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_values(text):
    out = []
    for token in text.split(","):
        token = token.strip().lower()
        if token == "nan":
            out.append(float("nan"))
        elif token in ("inf", "+inf"):
            out.append(float("inf"))
        elif token == "-inf":
            out.append(float("-inf"))
        else:
            out.append(float(token))
    return out


def _parse_fuzz(tokens) -> InjectionConfig:
    fields = {"odds": 10, "n_inject": 1, "seed": 0, "value": float("nan"),
              "functions": (), "libraries": ()}
    for token in tokens:
        key, sep, raw = token.partition("=")
        if not sep:
            raise UsageError(f"--fuzz expects key=value tokens, got {token!r}")
        if key == "odds":
            fields["odds"] = int(raw)
        elif key == "n":
            fields["n_inject"] = int(raw)
        elif key == "seed":
            fields["seed"] = int(raw)
        elif key == "value":
            v = _parse_values(raw)[0]
            fields["value"] = v
        elif key == "functions":
            fields["functions"] = tuple(raw.split(","))
        elif key == "libraries":
            fields["libraries"] = tuple(raw.split(","))
        else:
            raise UsageError(f"unknown --fuzz key {key!r}")
    try:
        return InjectionConfig(**fields)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _ledger_config(args) -> LedgerConfig:
    kinds = set(EventKind)
    if args.no_prop:
        kinds.discard(EventKind.PROP)
    return LedgerConfig(max_logs=args.max_logs, log_kinds=frozenset(kinds))


def _out_dir(args) -> Path:
    if args.out is not None:
        return Path(args.out)
    return Path(os.environ.get("FPX_OUT_DIR", "fpx-logs"))


def _run_demo(name, args, session):
    if name == "max":
        result = demo_max(tuple(_parse_values(args.values)), session=session)
        print(f"max1={fpbits.format_dec(result.max1)} "
              f"max2={fpbits.format_dec(result.max2)}")
    elif name == "loop":
        result = demo_loop_kill(inject_tdir=args.inject, max_iters=args.max_iters,
                                session=session)
        state = "LIVELOCK" if result.livelocked else "completed"
        print(f"{state}: work_iterations={result.work_iterations} "
              f"guard_evaluations={result.guard_evaluations}")
    elif name == "sim":
        result = demo_sim(steps=args.steps, cells=args.cells, blowup=args.blowup,
                          session=session)
        print("final field: " + " ".join(fpbits.format_dec(x) for x in result.field))
    else:
        raise UsageError(f"unknown demo {name!r} (choose from max, loop, sim)")
    return result


def _report_events(session):
    counts = session.ledger.counts()
    print("events: " + " ".join(f"{k.value}={counts[k]}" for k in EventKind))


def cmd_run(args) -> int:
    if args.record and not args.fuzz:
        raise UsageError("--record requires --fuzz")
    injector = Injector.fuzz(_parse_fuzz(args.fuzz)) if args.fuzz else Injector.off()
    session = explicit_session(_ledger_config(args), injector)
    _run_demo(args.demo, args, session)
    _report_events(session)
    out = _out_dir(args)
    session.ledger.flush(out)
    print(f"logs written to {out}")
    if args.record:
        save_recording(session.injector.recording, args.record)
        print(f"recording written to {args.record}")
    return 0


def cmd_replay(args) -> int:
    recording = load_recording(args.recording)
    session = explicit_session(_ledger_config(args), Injector.replay(recording))
    _run_demo(args.demo, args, session)
    _report_events(session)
    out = _out_dir(args)
    session.ledger.flush(out)
    print(f"logs written to {out}")
    for message in session.injector.divergences:
        print(f"warning: {message}", file=sys.stderr)
    pending = session.injector.unconsumed_points()
    if pending:
        print(f"replay divergence: {len(pending)} unconsumed injection point(s):",
              file=sys.stderr)
        for p in pending:
            print(f"  op_counter={p.op_counter} op={p.op}", file=sys.stderr)
    return 0


def _load_traces(path, value_class=None) -> list:
    """Ledger jsonl or plain-text trace blocks, detected from content."""
    text = Path(path).read_text(encoding="utf-8")
    head = text.lstrip()
    if not head:
        return []
    if head.startswith("{"):
        events = _filter_class(parse_log(path), value_class)
        return stackgraph.traces_from_events(events)
    return stackgraph.parse_trace_text(text)


def _filter_class(events, value_class):
    if value_class is None:
        return events
    wanted = ValueClass(value_class)
    return [e for e in events if e.value_class is wanted]


def _load_graph_any(path, key_policy):
    """A saved graph document, or a log/trace file coalesced on the fly."""
    try:
        return stackgraph.load_graph(path)
    except GraphFormatError:
        return stackgraph.build(_load_traces(path), key_policy)


def _emit(text, dest) -> None:
    if dest:
        Path(dest).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_cstg(args) -> int:
    key_policy = "coarse" if args.coarse else "fine"
    traces = _load_traces(args.log, args.value_class)
    if args.split is not None:
        head, tail = stackgraph.slice_traces(traces, args.split)
        d = stackgraph.diff(stackgraph.build(head, key_policy),
                            stackgraph.build(tail, key_policy))
        _emit(stackgraph.emit_dot_diff(d), args.dot)
        if args.json:
            Path(args.json).write_text(
                json.dumps(stackgraph.diff_to_json(d), indent=2) + "\n", encoding="utf-8")
        return 0
    g = stackgraph.build(traces, key_policy)
    _emit(stackgraph.emit_dot(g), args.dot)
    if args.json:
        stackgraph.save_graph(g, args.json)
    return 0


def cmd_diff(args) -> int:
    key_policy = "coarse" if args.coarse else "fine"
    before = _load_graph_any(args.before, key_policy)
    after = _load_graph_any(args.after, key_policy)
    d = stackgraph.diff(before, after)
    _emit(stackgraph.emit_dot_diff(d), args.dot)
    if args.json:
        Path(args.json).write_text(
            json.dumps(stackgraph.diff_to_json(d), indent=2) + "\n", encoding="utf-8")
    return 0


def cmd_render(args) -> int:
    events = _filter_class(parse_log(args.log), args.value_class)
    print("\n\n".join(render_human(e) for e in events))
    return 0


def _add_demo_arguments(parser):
    parser.add_argument("demo", help="max | loop | sim")
    parser.add_argument("--out", help="log output directory (default $FPX_OUT_DIR or fpx-logs)")
    parser.add_argument("--max-logs", type=int, default=None,
                        help="per-kind cap on stored events")
    parser.add_argument("--no-prop", action="store_true", help="do not log prop events")
    parser.add_argument("--values", default="1,5,NaN,4", help="max demo input list")
    parser.add_argument("--inject", action="store_true",
                        help="loop demo: seed the loop direction with NaN")
    parser.add_argument("--max-iters", type=int, default=100,
                        help="loop demo: guard-evaluation bound")
    parser.add_argument("--steps", type=int, default=12, help="sim demo: time steps")
    parser.add_argument("--cells", type=int, default=16, help="sim demo: grid cells")
    parser.add_argument("--blowup", action="store_true",
                        help="sim demo: use an unstable coefficient")


def build_parser() -> _Parser:
    parser = _Parser(prog="fpx", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a demo and write logs")
    _add_demo_arguments(p_run)
    p_run.add_argument("--fuzz", nargs="+", metavar="KEY=VALUE",
                       help="fuzz parameters: odds=N n=K seed=S "
                            "[value=nan|inf|-inf] [functions=a,b] [libraries=p,q]")
    p_run.add_argument("--record", help="save the injection recording to this path")
    p_run.set_defaults(func=cmd_run)

    p_replay = sub.add_parser("replay", help="replay a recording against a demo")
    p_replay.add_argument("recording", help="recording file from run --record")
    _add_demo_arguments(p_replay)
    p_replay.set_defaults(func=cmd_replay)

    p_cstg = sub.add_parser("cstg", help="coalesce a log into a stack graph")
    p_cstg.add_argument("log", help="ledger jsonl or plain-text trace file")
    p_cstg.add_argument("--coarse", action="store_true", help="key nodes by function only")
    p_cstg.add_argument("--value-class", choices=("nan", "inf"), default=None,
                        help="only events of this class (ledger inputs)")
    p_cstg.add_argument("--dot", help="write DOT here instead of stdout")
    p_cstg.add_argument("--json", help="also write the portable graph document")
    p_cstg.add_argument("--split", type=float, default=None,
                        help="diff the first FRACTION of traces against the rest")
    p_cstg.set_defaults(func=cmd_cstg)

    p_diff = sub.add_parser("diff", help="diff two stack graphs")
    p_diff.add_argument("before")
    p_diff.add_argument("after")
    p_diff.add_argument("--coarse", action="store_true",
                        help="key policy when building from logs")
    p_diff.add_argument("--dot", help="write DOT here instead of stdout")
    p_diff.add_argument("--json", help="also write the diff document")
    p_diff.set_defaults(func=cmd_diff)

    p_render = sub.add_parser("render", help="print a log in human block form")
    p_render.add_argument("log")
    p_render.add_argument("--value-class", choices=("nan", "inf"), default=None,
                          help="only events of this class")
    p_render.set_defaults(func=cmd_render)

    return parser


def cli_main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (LogFormatError, RecordingFormatError, GraphFormatError, OSError) as exc:
        print(f"fpx: {exc}", file=sys.stderr)
        return 2
    except (UsageError, ValueError) as exc:
        # bad flag values, malformed --values lists, key-policy mismatches
        print(f"fpx: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))


if __name__ == "__main__":
    main()
