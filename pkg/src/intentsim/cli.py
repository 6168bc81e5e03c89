"""Headless entry point: run scenarios, emit traces, serve the protocol,
or drive a line-oriented REPL.

Exit codes: 0 success, 1 scenario parse/validation error (diagnostic on
stderr as file:line:col), 2 unexpected runtime failure.
"""

from __future__ import annotations

import argparse
import sys
import traceback

from . import runtime
from .parser import ParseError, _Parser, parse_clause, parse_program
from .runtime import (
    AddEffect,
    AssertClause,
    RemoveEffect,
    RetractClause,
    SetProperty,
    Simulation,
)
from .session import SimulationSession, report_line

REPL_HELP = """commands:
  step [n]                          advance n ticks (default 1)
  assert <target> <clause.>         add a clause (agent or class target)
  retract <target> <clause.>        remove the first matching clause
  effect add <target> <action> <tendency> <property>
  effect remove <target> <action> <property>
  set <target> <property> <value>   write a property (agent or class)
  spawn <class> [name] [x y]        create an agent
  explain <agent>                   why the last completed cycle chose what it chose
  agents                            list agents
  source <class>                    current class source
  help                              this text
  quit                              leave"""


def build_arg_parser():
    ap = argparse.ArgumentParser(prog="intentsim",
                                 description="intentional-agent simulator")
    sub = ap.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run a .iag scenario")
    runp.add_argument("scenario", help="path to the .iag file")
    runp.add_argument("--ticks", type=int, default=20, help="ticks to run (default 20)")
    runp.add_argument("--seed", type=int, default=None,
                      help="override the scenario seed")
    runp.add_argument("--budget", type=int, default=runtime.DEFAULT_BUDGET,
                      help="resolution steps per agent per tick")
    runp.add_argument("--trace", default=None, help="write JSON-lines tick reports here")
    runp.add_argument("--record", default=None,
                      help="write the applied-command schedule here")
    runp.add_argument("--replay", default=None,
                      help="play back a recorded command schedule")
    runp.add_argument("--serve", action="store_true",
                      help="serve the control protocol instead of batch-running")
    runp.add_argument("--port", type=int, default=8765,
                      help="service port (0 picks a free one)")
    runp.add_argument("--repl", action="store_true", help="interactive edit loop")
    runp.add_argument("--quiet", action="store_true", help="no progress output")
    return ap


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    if args.replay and args.repl:
        print("error: --replay and --repl are mutually exclusive", file=sys.stderr)
        return 2
    if args.ticks < 0 or args.budget < 1:
        print("error: --ticks must be >= 0 and --budget >= 1", file=sys.stderr)
        return 2

    try:
        with open(args.scenario, encoding="utf-8") as f:
            source = f.read()
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1

    try:
        program = parse_program(source)
        sim = Simulation.load(program, seed=args.seed, budget=args.budget)
    except ParseError as e:
        print(f"{args.scenario}:{e.line}:{e.col}: {e.message}", file=sys.stderr)
        return 1
    except runtime.ValidationError as e:
        print(f"{args.scenario}: {e}", file=sys.stderr)
        return 1

    session = SimulationSession(sim, trace_path=args.trace, record_path=args.record)
    try:
        if args.serve:
            from .service import SimServer

            server = SimServer(session, port=args.port).start()
            print(f"serving on ws://{server.host}:{server.port}", flush=True)
            server.wait()
            return 0
        if args.repl:
            return _repl(session, quiet=args.quiet)
        if args.replay:
            session.load_replay(args.replay)
        session.run(args.ticks)
        if not args.quiet:
            print(f"ran {args.ticks} tick(s), {len(sim.agents)} agent(s)")
        return 0
    except Exception:
        traceback.print_exc()
        return 2
    finally:
        session.close()


def _parse_value(text):
    p = _Parser(text)
    v = p.value()
    p.expect("eof", what="end of value")
    return v


def _repl(session: SimulationSession, quiet=False) -> int:
    sim = session.sim
    prompt = "" if quiet or not sys.stdin.isatty() else "intentsim> "
    while True:
        try:
            line = input(prompt)
        except EOFError:
            return 0
        line = line.strip()
        if not line:
            continue
        try:
            if _repl_command(session, sim, line, quiet):
                return 0
        except (ParseError, runtime.ValidationError, runtime.UnknownTarget,
                runtime.UnknownClass, runtime.UnknownProperty,
                runtime.NoCycleYet, ValueError) as e:
            print(f"error: {e}")


def _repl_command(session, sim: Simulation, line, quiet) -> bool:
    """Run one REPL line; True means quit."""
    word, _, rest = line.partition(" ")
    rest = rest.strip()
    if word in ("quit", "exit"):
        return True
    if word == "help":
        print(REPL_HELP)
    elif word == "step":
        n = int(rest) if rest else 1
        for _ in range(n):
            report = session.tick()
            if not quiet:
                print(report_line(report))
    elif word in ("assert", "retract"):
        target, _, text = rest.partition(" ")
        clause = parse_clause(text)
        edit = AssertClause(clause) if word == "assert" else RetractClause(clause)
        seq = session.queue_edit(target, edit)
        print(f"queued #{seq}")
    elif word == "effect":
        parts = rest.split()
        if len(parts) >= 1 and parts[0] == "add" and len(parts) == 5:
            seq = session.queue_edit(parts[1], AddEffect(parts[2], parts[3], parts[4]))
        elif len(parts) >= 1 and parts[0] == "remove" and len(parts) == 4:
            seq = session.queue_edit(parts[1], RemoveEffect(parts[2], parts[3]))
        else:
            raise ValueError("usage: effect add <target> <action> <tendency> <property>"
                             " | effect remove <target> <action> <property>")
        print(f"queued #{seq}")
    elif word == "set":
        parts = rest.split(maxsplit=2)
        if len(parts) != 3:
            raise ValueError("usage: set <target> <property> <value>")
        seq = session.queue_edit(parts[0], SetProperty(parts[1], _parse_value(parts[2])))
        print(f"queued #{seq}")
    elif word == "spawn":
        parts = rest.split()
        if not parts:
            raise ValueError("usage: spawn <class> [name] [x y]")
        name = parts[1] if len(parts) in (2, 4) else None
        pos = None
        if len(parts) >= 3:
            pos = (int(parts[-2]), int(parts[-1]))
        got = session.spawn(parts[0], name, pos=pos)
        print(f"spawned {got}")
    elif word == "explain":
        print(sim.explain(rest).to_text())
    elif word == "agents":
        for name, agent in sim.agents.items():
            entity = sim.world.entity(agent.entity_id)
            alive = "alive" if entity and entity.alive else "dead"
            print(f"{name} ({agent.cls.name}, {alive})")
    elif word == "source":
        print(sim.agent_source(rest))
    else:
        raise ValueError(f"unknown command {word!r} (try 'help')")
    return False


if __name__ == "__main__":
    sys.exit(main())
