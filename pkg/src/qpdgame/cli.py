"""Command-line front end.

Exit status: 0 success, 1 validation failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import re
import sys
from typing import Sequence

from . import closedform, equilibria
from .engine import COOPERATE, MIRACLE, NAMED_STRATEGIES, GameConfig, PayoffTable, Strategy, play
from .equilibria import Axis, FiniteGame, SweepGrid

CSV_HEADER = ("gamma", "r", "p1", "p2", "alpha_A", "theta_A", "alpha_B", "theta_B",
              "payoff_A", "payoff_B")

# Inputs this close to a range bound are taken as the bound (decimal-rounded pi/4 etc.).
SNAP_TOL = 1e-6

_ANGLE_RE = re.compile(
    r"^\s*(?P<sign>[+-])?\s*(?P<coef>\d*\.?\d*(?:[eE][+-]?\d+)?)\s*\*?\s*pi\s*(?:/\s*(?P<den>\d*\.?\d+))?\s*$"
)


class UsageError(Exception):
    pass


def fmt(x: float) -> str:
    return f"{x:.12g}"


def fmt_payoff(x: float) -> str:
    # Round-off below the 12-digit resolution of payoff-scale numbers prints as 0.
    return "0" if abs(x) < 5e-13 else fmt(x)


def parse_number(text: str) -> float:
    """Parse a decimal, a fraction ``a/b``, or a multiple of pi such as ``3pi/16``."""
    text = text.strip()
    m = _ANGLE_RE.match(text.lower())
    if m:
        coef = float(m["coef"]) if m["coef"] else 1.0
        val = coef * math.pi / (float(m["den"]) if m["den"] else 1.0)
        return -val if m["sign"] == "-" else val
    if "/" in text:
        num, _, den = text.partition("/")
        try:
            return float(num) / float(den)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"cannot parse number {text!r}") from None
    try:
        val = float(text)
    except ValueError:
        raise ValueError(f"cannot parse number {text!r}") from None
    if not math.isfinite(val):
        raise ValueError(f"number must be finite, got {text!r}")
    return val


_BOUNDS = {
    "gamma": (0.0, math.pi / 2, "[0, pi/2]"),
    "r": (0.0, math.pi / 4, "[0, pi/4]"),
    "p": (0.0, 1.0, "[0, 1]"),
    "p1": (0.0, 1.0, "[0, 1]"),
    "p2": (0.0, 1.0, "[0, 1]"),
    "alpha": (-math.pi, math.pi, "[-pi, pi]"),
    "theta": (0.0, math.pi, "[0, pi]"),
    "alphaB": (-math.pi, math.pi, "[-pi, pi]"),
    "thetaB": (0.0, math.pi, "[0, pi]"),
}


def in_range(name: str, value: float) -> float:
    lo, hi, text = _BOUNDS[name]
    if abs(value - lo) <= SNAP_TOL:
        return lo
    if abs(value - hi) <= SNAP_TOL:
        return hi
    if not lo <= value <= hi:
        raise ValueError(f"{name}={value!r} outside legal range {text}")
    return value


def _bounded(name: str):
    def convert(text: str) -> float:
        try:
            return in_range(name, parse_number(text))
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from None
    convert.__name__ = name
    return convert


def parse_strategy(text: str) -> Strategy:
    """``C``, ``D``, ``Q``, ``M`` or an ``alpha,theta`` / ``alpha:theta`` pair."""
    key = text.strip().upper()
    if key in NAMED_STRATEGIES:
        return NAMED_STRATEGIES[key]
    parts = re.split(r"[,:]", text)
    if len(parts) != 2:
        raise ValueError(f"malformed strategy {text!r}; use C, D, Q, M or alpha,theta")
    alpha = in_range("alpha", parse_number(parts[0]))
    theta = in_range("theta", parse_number(parts[1]))
    return Strategy(alpha, theta)


def _strategy_arg(text: str) -> Strategy:
    try:
        return parse_strategy(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _strategy_set_arg(text: str) -> list[Strategy]:
    """Comma-separated names; custom moves as ``alpha:theta``."""
    items = [t for t in text.split(",") if t.strip()]
    if not items:
        raise argparse.ArgumentTypeError("empty strategy set")
    out = []
    for item in items:
        if "," in item or (":" not in item and item.strip().upper() not in NAMED_STRATEGIES):
            raise argparse.ArgumentTypeError(f"unknown strategy {item!r} in set")
        out.append(_strategy_arg(item))
    return out


def _payoff_table_arg(text: str) -> PayoffTable:
    try:
        vals = [parse_number(t) for t in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    if len(vals) != 8:
        raise argparse.ArgumentTypeError(
            "payoff table takes 8 numbers: CC_A,CC_B,CD_A,CD_B,DC_A,DC_B,DD_A,DD_B")
    return PayoffTable(tuple(vals[0::2]), tuple(vals[1::2]))


def _parse_axis(text: str) -> Axis:
    name, sep, spec = text.partition("=")
    name = name.strip()
    parts = spec.split(":")
    if not sep or len(parts) != 3:
        raise ValueError(f"axis must look like name=start:stop:steps, got {text!r}")
    if name not in equilibria.SWEEP_PARAMS:
        raise ValueError(f"unknown axis {name!r}; expected one of {equilibria.SWEEP_PARAMS}")
    bname = {"p1": "p", "p2": "p"}.get(name, name)
    start = in_range(bname, parse_number(parts[0]))
    stop = in_range(bname, parse_number(parts[1]))
    try:
        steps = int(parts[2])
    except ValueError:
        raise ValueError(f"axis step count must be an integer, got {parts[2]!r}") from None
    if steps < 1:
        raise ValueError(f"axis {name} needs at least one step")
    return Axis(name, start, stop, steps)


def _parse_grid_values(text: str) -> tuple[str, list]:
    name, sep, spec = text.partition("=")
    name = name.strip()
    if not sep or not spec:
        raise ValueError(f"grid must look like name=v1,v2 or name=start:stop:n, got {text!r}")
    if name == "profile":
        return name, [closedform.check_profile(v) for v in spec.split(",")]
    if name not in _BOUNDS:
        raise ValueError(f"unknown grid parameter {name!r}")
    parts = spec.split(":")
    if len(parts) == 3:
        lo, hi = parse_number(parts[0]), parse_number(parts[1])
        n = int(parts[2])
        if n < 1:
            raise ValueError("grid needs at least one point")
        vals = [lo] if n == 1 else [lo + (hi - lo) * k / (n - 1) for k in range(n)]
    else:
        vals = [parse_number(v) for v in spec.split(",")]
    return name, [in_range(name, v) for v in vals]


# --- output -------------------------------------------------------------------

def record_row(config: GameConfig, alice: Strategy, bob: Strategy, payoff) -> list[str]:
    vals = (config.gamma, config.r, config.noise.p1, config.noise.p2,
            alice.alpha, alice.theta, bob.alpha, bob.theta)
    return [fmt(v) for v in vals] + [fmt_payoff(payoff[0]), fmt_payoff(payoff[1])]


def sweep_record_row(rec: equilibria.SweepRecord) -> list[str]:
    vals = (rec.gamma, rec.r, rec.p1, rec.p2, rec.alice.alpha, rec.alice.theta,
            rec.bob.alpha, rec.bob.theta)
    return [fmt(v) for v in vals] + [fmt_payoff(rec.payoff.alice), fmt_payoff(rec.payoff.bob)]


def parse_row(row: dict) -> tuple[GameConfig, Strategy, Strategy, tuple[float, float]]:
    """Inverse of :func:`record_row` for one CSV row read with ``csv.DictReader``."""
    f = {k: float(v) for k, v in row.items() if k in CSV_HEADER}
    config = GameConfig.make(f["gamma"], f["r"], f["p1"], f["p2"])
    return (config, Strategy(f["alpha_A"], f["theta_A"]), Strategy(f["alpha_B"], f["theta_B"]),
            (f["payoff_A"], f["payoff_B"]))


class _Output:
    def __init__(self, path: str | None):
        self.path = path
        self.buf = io.StringIO()

    def write(self, text: str) -> None:
        self.buf.write(text)

    def close(self) -> None:
        data = self.buf.getvalue()
        if self.path:
            with open(self.path, "w", newline="") as fh:
                fh.write(data)
        else:
            sys.stdout.write(data)
            sys.stdout.flush()


def _csv_writer(out: _Output):
    return csv.writer(out, lineterminator="\n")


# --- commands -------------------------------------------------------------------

def _config_from(args) -> GameConfig:
    p1, p2 = args.p1, args.p2
    if args.p is not None:
        if p1 is not None or p2 is not None:
            raise UsageError("--p cannot be combined with --p1/--p2")
        p1 = p2 = args.p
    return GameConfig.make(args.gamma, args.r, p1 or 0.0, p2 or 0.0, args.payoff_table)


def cmd_payoff(args, out: _Output) -> int:
    config = _config_from(args)
    pair = play(config, args.alice, args.bob)
    if args.format == "json":
        json.dump({"gamma": config.gamma, "r": config.r, "p1": config.noise.p1,
                   "p2": config.noise.p2, "alice": [args.alice.alpha, args.alice.theta],
                   "bob": [args.bob.alpha, args.bob.theta],
                   "payoff_A": pair.alice, "payoff_B": pair.bob}, out)
        out.write("\n")
        return 0
    w = _csv_writer(out)
    w.writerow(CSV_HEADER)
    w.writerow(record_row(config, args.alice, args.bob, pair))
    return 0


def cmd_table(args, out: _Output) -> int:
    config = _config_from(args)
    strategies = args.set
    w = _csv_writer(out)
    header = list(CSV_HEADER) + (["closed_A", "closed_B"] if args.closed_form else [])
    w.writerow(header)
    for a in strategies:
        for b in strategies:
            row = record_row(config, a, b, play(config, a, b))
            if args.closed_form:
                cf = closedform.closed_form_for(config, a, b)
                row += [fmt_payoff(cf.alice), fmt_payoff(cf.bob)] if cf else ["", ""]
            w.writerow(row)
    return 0


def figure_preset(number: int, steps: int = 101) -> tuple[GameConfig, SweepGrid]:
    """Configuration and grid reproducing one of the published payoff figures."""
    half_pi = math.pi / 2
    if number == 1:
        grid = SweepGrid(axes=(Axis("p", 0.0, 1.0, steps), Axis("r", 0.0, math.pi / 4, steps)),
                         profiles=equilibria.classical_profiles())
        return GameConfig.make(gamma=half_pi), grid
    if number == 2:
        grid = SweepGrid(axes=(Axis("p", 0.0, 1.0, steps),), profiles=equilibria.classical_profiles())
        return GameConfig.make(gamma=half_pi, r=math.pi / 4), grid
    if number == 3:
        grid = SweepGrid(axes=(Axis("p", 0.0, 1.0, steps), Axis("thetaB", 0.0, math.pi, steps)),
                         profiles=((MIRACLE, COOPERATE),))
        return GameConfig.make(gamma=half_pi, r=math.pi / 6), grid
    raise UsageError(f"unknown figure {number}")


def cmd_sweep(args, out: _Output) -> int:
    if args.figure is not None:
        if args.axis:
            raise UsageError("--figure cannot be combined with --axis")
        template, grid = figure_preset(args.figure, args.steps)
    else:
        axes = [_parse_axis(a) for a in (args.axis or [])]
        if len(axes) > 2:
            raise UsageError("at most 2 axes are supported")
        if args.profiles:
            profiles = []
            for item in args.profiles.split(","):
                item = item.strip().upper()
                if len(item) != 2 or any(ch not in NAMED_STRATEGIES for ch in item):
                    raise UsageError(f"profile {item!r} must be two of C, D, Q, M")
                profiles.append((NAMED_STRATEGIES[item[0]], NAMED_STRATEGIES[item[1]]))
        else:
            profiles = [(args.alice, args.bob)]
        template = _config_from(args)
        grid = SweepGrid(axes=tuple(axes), profiles=tuple(profiles))
    records = equilibria.sweep(template, grid)
    w = _csv_writer(out)
    w.writerow(CSV_HEADER)
    for rec in records:
        w.writerow(sweep_record_row(rec))
    if args.figure == 2:
        p_star = equilibria.equilibrium_crossing(template)
        shown = "none" if p_star is None else fmt(p_star)
        print(f"# equilibrium crossing at r={fmt(template.r)}: p* = {shown}", file=sys.stderr)
    return 0


def cmd_validate(args, out: _Output) -> int:
    cases = list(closedform.Case) if args.case == "all" else [closedform.Case(args.case)]
    overrides = dict(_parse_grid_values(g) for g in (args.grid or []))
    w = _csv_writer(out)
    w.writerow(["case", "points", "max_deviation", "argmax", "tol", "status"])
    ok = True
    used = set()
    for case in cases:
        names = closedform.CASE_PARAMS[case]
        grid = {k: v for k, v in overrides.items() if k in names}
        used |= set(grid)
        report = closedform.cross_validate(case, grid, tol=args.tol)
        arg = report.argmax
        where = ";".join(f"{k}={v if isinstance(v, str) else fmt(v)}" for k, v in arg.point.items())
        w.writerow([case.value, len(report), f"{report.max_deviation:.3e}", where,
                    f"{args.tol:.3e}", "pass" if report.passed else "FAIL"])
        ok &= report.passed
    unused = set(overrides) - used
    if unused:
        raise UsageError(f"grid parameter(s) {sorted(unused)} not used by the selected case(s)")
    return 0 if ok else 1


def cmd_equilibria(args, out: _Output) -> int:
    config = _config_from(args)
    game = FiniteGame.from_config(config, args.set)
    lab = game.labels
    dom = {who: equilibria.dominant_strategy(game, who, args.tol) for who in ("alice", "bob")}
    report = {
        "parameters": {"gamma": config.gamma, "r": config.r,
                       "p1": config.noise.p1, "p2": config.noise.p2},
        "strategies": lab,
        "payoffs": [[list(game.pair(i, j)) for j in range(game.n)] for i in range(game.n)],
        "nash": [list(p) for p in game.profile_labels(equilibria.nash_equilibria(game, args.tol))],
        "pareto_optimal": [list(p) for p in
                           game.profile_labels(equilibria.pareto_optimal(game, args.tol))],
        "dominant": {who: (None if k is None else lab[k]) for who, k in dom.items()},
    }
    json.dump(report, out, indent=2)
    out.write("\n")
    return 0


# --- parser ---------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--gamma", type=_bounded("gamma"), default=0.0,
                        help="entanglement, radians in [0, pi/2] (default 0)")
    common.add_argument("--r", type=_bounded("r"), default=0.0,
                        help="acceleration parameter, radians in [0, pi/4] (default 0)")
    common.add_argument("--p", type=_bounded("p"), default=None,
                        help="set both decoherence parameters")
    common.add_argument("--p1", type=_bounded("p1"), default=None, help="Alice's decoherence")
    common.add_argument("--p2", type=_bounded("p2"), default=None, help="Bob's decoherence")
    common.add_argument("--payoff-table", type=_payoff_table_arg, default=None,
                        metavar="CC_A,CC_B,CD_A,CD_B,DC_A,DC_B,DD_A,DD_B")
    common.add_argument("--out", default=None, help="write output to this file")

    parser = argparse.ArgumentParser(
        prog="qpdgame",
        description="Noisy quantum Prisoners' Dilemma with an accelerated player.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("payoff", parents=[common], help="payoffs of one strategy profile")
    p.add_argument("--alice", type=_strategy_arg, default=NAMED_STRATEGIES["C"])
    p.add_argument("--bob", type=_strategy_arg, default=NAMED_STRATEGIES["C"])
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_payoff)

    p = sub.add_parser("table", parents=[common], help="payoff table over a strategy set")
    p.add_argument("--set", type=_strategy_set_arg, default="C,D")
    p.add_argument("--closed-form", action="store_true",
                   help="append closed-form payoffs where one applies")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("sweep", parents=[common], help="evaluate payoffs over a parameter grid")
    p.add_argument("--axis", action="append",
                   help="name=start:stop:steps; name in " + ", ".join(equilibria.SWEEP_PARAMS))
    p.add_argument("--figure", type=int, choices=(1, 2, 3), default=None)
    p.add_argument("--steps", type=int, default=101, help="points per axis for --figure")
    p.add_argument("--alice", type=_strategy_arg, default=NAMED_STRATEGIES["C"])
    p.add_argument("--bob", type=_strategy_arg, default=NAMED_STRATEGIES["C"])
    p.add_argument("--profiles", default=None, help="e.g. CC,CD,DC,DD")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("validate", help="compare closed forms against the engine")
    p.add_argument("--case", choices=("table2", "e12", "e14", "e16", "all"), default="all")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--grid", action="append", help="name=v1,v2,... or name=start:stop:n")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("equilibria", parents=[common], help="Nash, Pareto and dominance report")
    p.add_argument("--set", type=_strategy_set_arg, default="C,D")
    p.add_argument("--tol", type=float, default=equilibria.DEFAULT_TOL)
    p.set_defaults(func=cmd_equilibria)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "steps", 1) < 1:
        parser.error("--steps must be at least 1")
    out = _Output(args.out)
    try:
        status = args.func(args, out)
    except (UsageError, ValueError) as exc:
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return 2
    out.close()
    return status


if __name__ == "__main__":
    sys.exit(main())
