"""Command-line front end: ``symik --robot puma.json --verify 100``."""
from __future__ import annotations

import argparse
import logging
import os
import sys
from typing import List, Optional, Sequence

from .bt import DEFAULT_MAX_ITERATIONS, OutcomeKind
from .emitters import EmitTarget, emit_all
from .kinmodel import RobotDefinitionError, builtin_robot_path, load_robot
from .pipeline import SOLVER_TITLES, SolvedRobot, pretty_name, solve
from .verify import DEFAULT_TOL, fuzz

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_PARTIAL = 2
EXIT_VERIFY = 3

log = logging.getLogger("symik")


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 means PartiallySolved here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _emit_list(text: str) -> List[EmitTarget]:
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            t = EmitTarget(part)
        except ValueError:
            raise argparse.ArgumentTypeError(
                f"unknown target {part!r} (choose from {', '.join(t.value for t in EmitTarget)})")
        if t not in out:
            out.append(t)
    return out


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _count(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="symik", description="Closed-form inverse kinematics from a DH table.")
    p.add_argument("--robot", required=True,
                   help="robot JSON file (or the name of a bundled robot: puma, chair_helper, olson13, planar2r)")
    p.add_argument("--out", default="./out", help="output directory (default ./out)")
    p.add_argument("--emit", type=_emit_list, default=list(EmitTarget),
                   help="comma list of latex,python,cpp,dot,json (default all)")
    p.add_argument("--verify", type=_count, default=0, metavar="N",
                   help="round-trip check on N random reachable poses (default 0 = off)")
    p.add_argument("--seed", type=_u64, default=0, help="RNG seed for --verify (default 0)")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL, help="FK residual tolerance (default 1e-6)")
    p.add_argument("--max-iterations", type=int, default=DEFAULT_MAX_ITERATIONS,
                   help="solver loop iteration cap (default 10)")
    return p


def _resolve(path: str) -> str:
    if os.path.exists(path):
        return path
    alt = builtin_robot_path(path)
    return alt if os.path.exists(alt) else path


def summary_lines(sr: SolvedRobot) -> List[str]:
    r = sr.robot
    out = [f"robot: {r.name} ({len(r.unknowns)} unknowns: {', '.join(pretty_name(u.name) for u in r.unknowns)})",
           f"outcome: {sr.outcome.kind.value} after {sr.outcome.iterations} iterations ({sr.seconds:.1f} s)"]
    for v in sr.solve_order:
        st = sr.state(v)
        name = st.chosen.solver_name
        out.append(f"  {pretty_name(v.name):<6} {SOLVER_TITLES.get(name, name):<22} "
                   f"{len(st.instances)} branch{'es' if len(st.instances) != 1 else ''}")
    if sr.outcome.unsolved:
        out.append("unsolved: " + ", ".join(pretty_name(u.name) for u in sr.outcome.unsolved))
    if sr.graph is not None:
        out.append(f"{len(sr.poses)} pose set{'s' if len(sr.poses) != 1 else ''}")
        notes = sr.not_tree_notes()
        if notes:
            out.append("graph (not tree): " + "; ".join(notes))
        else:
            out.append("graph: tree")
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        robot = load_robot(_resolve(args.robot))
    except (OSError, ValueError, RobotDefinitionError, KeyError) as exc:
        print(f"symik: cannot load robot {args.robot!r}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if args.max_iterations < 1:
        print("symik: --max-iterations must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    symbolic = [k for k, v in robot.constants.items() if v is None]
    if args.verify and symbolic:
        print(f"symik: --verify needs numeric values for constants {', '.join(symbolic)}",
              file=sys.stderr)
        return EXIT_INPUT

    sr = solve(robot, args.max_iterations)
    for line in summary_lines(sr):
        print(line)

    code = EXIT_OK if sr.outcome.kind is OutcomeKind.FULLY_SOLVED else EXIT_PARTIAL
    if code == EXIT_OK and args.verify:
        reports = fuzz(robot, sr.poses, args.verify, args.seed, args.tol)
        passed = sum(r.passed for r in reports)
        worst = max(r.max_residual for r in reports)
        print(f"verification: {passed}/{len(reports)} seeds passed "
              f"(max FK residual {worst:.3g}, tol {args.tol:g})")
        if passed != len(reports):
            code = EXIT_VERIFY

    try:
        written = emit_all(sr, args.out, args.emit)
    except OSError as exc:
        print(f"symik: cannot write to {args.out!r}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    for p in written:
        print(f"wrote {p}")
    return code


if __name__ == "__main__":
    sys.exit(main())
