#!/usr/bin/env python3
"""
Situation Kernel - Main Entry Point

Interactive interpreter for situations, infons, parameters, anchoring and
constraints.

Usage:
    python3 sitkernel.py [--kb FILE] [--batch FILE] [--depth N] [--max-firings N]

Without --batch an interactive prompt starts (I> in assert mode, Q> in
query mode); type :quit or press Ctrl+D to leave. With --batch every
statement of FILE is run and echoed with its output, and the exit code is
0 on success, 1 if any statement failed, 2 if a query found no solutions.
"""

import argparse
import logging
import sys

import sit_config
from kb_storage import load_kb
from sit_errors import SitError
from sit_session import Session

logger = logging.getLogger(__name__)


def parse_args(argv=None):
    parser = argparse.ArgumentParser(
        prog="sitkernel",
        description="Interpreter for situations, infons and constraints.",
    )
    parser.add_argument("--kb", help="knowledge base file to load first")
    parser.add_argument("--batch", help="run the statements in FILE and exit")
    parser.add_argument("--depth", type=int, default=sit_config.DEFAULT_DEPTH_LIMIT,
                        help="backward proof depth limit (default: %(default)s)")
    parser.add_argument("--max-firings", type=int, default=sit_config.DEFAULT_MAX_FIRINGS,
                        help="forward chaining firing cap (default: %(default)s)")
    parser.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="logging level (default: %(default)s)")
    args = parser.parse_args(argv)
    if args.depth < 0:
        parser.error("--depth must not be negative")
    if args.max_firings < 1:
        parser.error("--max-firings must be at least 1")
    return args


def run_batch(session, path):
    """Run a session file; returns the exit code."""
    with open(path, encoding="utf-8") as handle:
        lines = handle.readlines()

    for echoed, output in session.run_lines(lines):
        print(echoed)
        if output:
            print(output)

    print("\n" + "=" * sit_config.BANNER_WIDTH)
    print("BATCH COMPLETE")
    print("=" * sit_config.BANNER_WIDTH)
    print(f"Queries run: {session.queries}")
    print(f"Queries without solutions: {session.empty_queries}")
    print(f"Errors: {session.errors}")
    return session.exit_code()


def run_interactive(session):
    try:
        import readline  # noqa: F401  line editing only
    except ImportError:
        pass

    print("=" * sit_config.BANNER_WIDTH)
    print("SITUATION KERNEL")
    print("=" * sit_config.BANNER_WIDTH)
    print("Statements end at the end of the line; a trailing \\ continues it.")
    print(":mode query switches to queries, :quit leaves.\n")

    pending = ""
    while session.state.running:
        try:
            line = input("... " if pending else session.state.prompt)
        except EOFError:
            print()
            break
        if line.rstrip().endswith("\\"):
            pending += line.rstrip()[:-1] + " "
            continue
        _, output = session.repl_step(pending + line)
        pending = ""
        if output:
            print(output)
    return sit_config.EXIT_OK


def main(argv=None):
    args = parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format="%(levelname)s %(name)s: %(message)s")

    session = Session(depth_limit=args.depth, max_firings=args.max_firings)
    if args.kb:
        try:
            count = load_kb(session, args.kb)
        except (SitError, OSError) as exc:
            print(f"✗ could not load {args.kb}: {exc}")
            return sit_config.EXIT_ERROR
        print(f"✓ Loaded {count} statements from {args.kb}")

    if args.batch:
        try:
            return run_batch(session, args.batch)
        except OSError as exc:
            print(f"✗ could not read {args.batch}: {exc}")
            return sit_config.EXIT_ERROR
    return run_interactive(session)


if __name__ == "__main__":
    try:
        sys.exit(main())
    except KeyboardInterrupt:
        print("\n\nInterpreter stopped by user.")
        sys.exit(sit_config.EXIT_OK)
