"""Scenario files, run orchestration, and trace/summary/plot-data emission.

Scenario grammar: named sections ``[agents]``, ``[sensing]``, ``[density]``,
``[sim]``, ``[controller]``.  ``[agents]`` holds one bare row per agent with
``x y z lambda`` (optionally followed by ``ux uy uz ulambda`` to fix that
agent's nominal input; row widths must agree).  ``[density]`` holds a
``mission = xmin ymin xmax ymax`` key and one ``weight mx my scale`` row per
mixture component.  The remaining sections hold ``key = value`` pairs.
Numbers are decimal floats; ``#`` starts a comment; unknown sections and keys
are errors.  Omitted keys fall back to documented defaults (sensing r=1,
kappa=4, sigma=3, M=11, w=0.4; controller epsilon=0.2, alpha h^3,
w_lambda=3e6, guard 1e4; sim dt=0.01, steps=1000, mode ncbf).
"""

import argparse
import logging
import os
import sys
from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from aircover.controller import ClassK
from aircover.coverage import DensityField, SensingParams
from aircover.geometry import AgentState
from aircover.sim import Scenario, run

log = logging.getLogger(__name__)

LOG_ENV_VAR = "AIRCOVER_LOG"
EMIT_CHOICES = ("trace", "summary", "plotdata")

_SECTIONS = ("agents", "sensing", "density", "sim", "controller")
_FLOAT_KEYS = {
    "sensing": ("r", "kappa", "sigma", "M", "w"),
    "sim": ("dt", "grid_resolution", "min_z", "min_lambda"),
    "controller": ("epsilon", "alpha_gain", "w_lambda", "guard_threshold"),
}
_INT_KEYS = {"sim": ("steps", "seed", "hole_check_every"), "controller": ("alpha_power",)}
_STR_KEYS = {"sim": ("mode",)}


class ParseError(Exception):
    """Malformed scenario text; carries the 1-based line and column."""

    def __init__(self, message, line, col):
        super().__init__(f"line {line}, column {col}: {message}")
        self.line = line
        self.col = col


class ValidationError(Exception):
    """Well-formed scenario text whose values violate an invariant."""


@dataclass(frozen=True)
class RunConfig:
    """One CLI invocation: scenario path, output directory, and overrides."""

    scenario_path: str
    out_dir: str
    mode: str = None
    steps: int = None
    dt: float = None
    seed: int = None
    emit: tuple = ("trace", "summary")


def _tokens_with_columns(line):
    out = []
    col = 0
    for token in line.split():
        col = line.index(token, col)
        out.append((token, col + 1))
        col += len(token)
    return out


def _parse_float(token, col, lineno):
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"expected a number, got '{token}'", lineno, col) from None


def _parse_int(token, col, lineno):
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got '{token}'", lineno, col) from None


def _parse_row(line, lineno, widths, what):
    tokens = _tokens_with_columns(line.strip())
    if len(tokens) not in widths:
        allowed = " or ".join(str(w) for w in sorted(widths))
        raise ParseError(
            f"{what} row needs {allowed} numbers, got {len(tokens)}", lineno, tokens[0][1]
        )
    return [_parse_float(tok, col, lineno) for tok, col in tokens]


def parse_config(text) -> Scenario:
    """Parse scenario text into a Scenario, applying documented defaults."""
    section = None
    agent_rows = []
    density_rows = []
    keys = {"sensing": {}, "sim": {}, "controller": {}}
    mission = None
    seen = set()

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        if not line.strip():
            continue
        stripped = line.strip()
        col = line.index(stripped[0]) + 1

        if stripped.startswith("["):
            if not stripped.endswith("]"):
                raise ParseError("unterminated section header", lineno, col)
            name = stripped[1:-1].strip()
            if name not in _SECTIONS:
                raise ParseError(f"unknown section [{name}]", lineno, col)
            section = name
            continue
        if section is None:
            raise ParseError("content before any section header", lineno, col)

        if "=" in stripped:
            key, _, value = stripped.partition("=")
            key = key.strip()
            value = value.strip()
            if not key:
                raise ParseError("missing key before '='", lineno, col)
            if not value:
                raise ParseError(f"missing value for key '{key}'", lineno, col)
            if section == "agents":
                raise ParseError("[agents] holds agent rows, not keys", lineno, col)
            if section == "density":
                if key != "mission":
                    raise ParseError(f"unknown key '{key}' in [density]", lineno, col)
                parts = _tokens_with_columns(line)[2:]  # after 'mission' and '='
                if len(parts) != 4:
                    raise ParseError("mission needs 4 numbers: xmin ymin xmax ymax", lineno, col)
                mission = tuple(_parse_float(tok, c, lineno) for tok, c in parts)
                continue
            if (lineno_key := (section, key)) in seen:
                raise ParseError(f"duplicate key '{key}' in [{section}]", lineno, col)
            seen.add(lineno_key)
            value_col = line.index(value, line.index("=")) + 1
            if key in _FLOAT_KEYS.get(section, ()):
                keys[section][key] = _parse_float(value, value_col, lineno)
            elif key in _INT_KEYS.get(section, ()):
                keys[section][key] = _parse_int(value, value_col, lineno)
            elif key in _STR_KEYS.get(section, ()):
                keys[section][key] = value
            else:
                raise ParseError(f"unknown key '{key}' in [{section}]", lineno, col)
            continue

        # Bare row sections.
        if section == "agents":
            agent_rows.append((_parse_row(line, lineno, (4, 8), "agent"), lineno, col))
        elif section == "density":
            density_rows.append(_parse_row(line, lineno, (4,), "density component"))
        else:
            raise ParseError(f"[{section}] holds 'key = value' entries", lineno, col)

    widths = {len(row) for row, _, _ in agent_rows}
    if len(widths) > 1:
        row, lineno, col = next(t for t in agent_rows if len(t[0]) != max(widths))
        raise ParseError("agent rows must all have 4 or all have 8 numbers", lineno, col)

    try:
        sensing = SensingParams(
            r=keys["sensing"].get("r", 1.0),
            kappa=keys["sensing"].get("kappa", 4.0),
            sigma=keys["sensing"].get("sigma", 3.0),
            M=keys["sensing"].get("M", 11.0),
            w=keys["sensing"].get("w", 0.4),
        )
        if mission is None:
            raise ValidationError("density mission rectangle is required")
        density = DensityField(
            components=tuple((row[0], (row[1], row[2]), row[3]) for row in density_rows),
            mission=mission,
        )
        agents = tuple(AgentState(*row[:4]) for row, _, _ in agent_rows)
        fixed = None
        if widths == {8}:
            fixed = tuple(tuple(row[4:]) for row, _, _ in agent_rows)
        alpha = ClassK(
            gain=keys["controller"].get("alpha_gain", 1.0),
            power=keys["controller"].get("alpha_power", 3),
        )
        return Scenario(
            agents=agents,
            sensing=sensing,
            density=density,
            dt=keys["sim"].get("dt", 1e-2),
            steps=keys["sim"].get("steps", 1000),
            epsilon=keys["controller"].get("epsilon", 0.2),
            alpha=alpha,
            w_lambda=keys["controller"].get("w_lambda", 3.0e6),
            mode=keys["sim"].get("mode", "ncbf"),
            guard_threshold=keys["controller"].get("guard_threshold", 1e4),
            grid_resolution=keys["sim"].get("grid_resolution", 0.25),
            min_z=keys["sim"].get("min_z", 0.05),
            min_lambda=keys["sim"].get("min_lambda", 1e-4),
            seed=keys["sim"].get("seed", 0),
            hole_check_every=keys["sim"].get("hole_check_every", 10),
            fixed_nominal=fixed,
        )
    except ValueError as exc:
        raise ValidationError(str(exc)) from None


def serialize(scenario: Scenario) -> str:
    """Scenario back to config text; parse_config(serialize(s)) == s."""
    lines = ["[agents]"]
    for i, s in enumerate(scenario.agents):
        row = f"{s.x!r} {s.y!r} {s.z!r} {s.lam!r}"
        if scenario.fixed_nominal is not None:
            row += "  " + " ".join(repr(float(u)) for u in scenario.fixed_nominal[i])
        lines.append(row)
    p = scenario.sensing
    lines += ["", "[sensing]", f"r = {p.r!r}", f"kappa = {p.kappa!r}",
              f"sigma = {p.sigma!r}", f"M = {p.M!r}", f"w = {p.w!r}"]
    lines += ["", "[density]", "mission = " + " ".join(repr(float(v)) for v in scenario.density.mission)]
    for weight, mean, scale in scenario.density.components:
        lines.append(f"{weight!r} {mean[0]!r} {mean[1]!r} {scale!r}")
    lines += ["", "[sim]", f"dt = {scenario.dt!r}", f"steps = {scenario.steps}",
              f"mode = {scenario.mode}", f"grid_resolution = {scenario.grid_resolution!r}",
              f"min_z = {scenario.min_z!r}", f"min_lambda = {scenario.min_lambda!r}",
              f"seed = {scenario.seed}", f"hole_check_every = {scenario.hole_check_every}"]
    lines += ["", "[controller]", f"epsilon = {scenario.epsilon!r}",
              f"alpha_gain = {scenario.alpha.gain!r}", f"alpha_power = {scenario.alpha.power}",
              f"w_lambda = {scenario.w_lambda!r}", f"guard_threshold = {scenario.guard_threshold!r}"]
    return "\n".join(lines) + "\n"


def bundled_scenario(name: str) -> str:
    """Text of a scenario shipped with the package (trio, nine_agents, five_agents)."""
    return (resources.files("aircover") / "scenarios" / f"{name}.cfg").read_text()


def _trace_header(n_agents):
    cols = ["step", "switch", "hole_witnesses", "H", "H_M", "H_O"]
    for i in range(n_agents):
        cols += [f"x{i}", f"y{i}", f"z{i}", f"lambda{i}", f"R{i}",
                 f"min_ncbf{i}", f"trios{i}", f"fallback{i}", f"clamped{i}"]
    return cols


def write_trace(records, path):
    """Delimited trace table, one row per step, ordered by step."""
    n = len(records[0].agents)
    with open(path, "w") as fh:
        fh.write("# per-step trace; positions/R in meters; min_ncbf per agent over its trios\n")
        fh.write(",".join(_trace_header(n)) + "\n")
        for r in records:
            row = [str(r.step), str(int(r.switch)), str(r.hole_witnesses),
                   repr(r.H), repr(r.H_M), repr(r.H_O)]
            for i in range(n):
                x, y, z, lam, radius = r.agents[i]
                row += [repr(x), repr(y), repr(z), repr(lam), repr(radius),
                        repr(r.min_ncbf[i]), str(r.trio_counts[i]),
                        str(int(r.fallback[i])), str(int(r.clamped[i]))]
            fh.write(",".join(row) + "\n")


def write_summary(summary, path):
    """Flat key = value summary document."""
    with open(path, "w") as fh:
        for key, value in summary.items():
            fh.write(f"{key} = {value!r}\n")


def emit_plotdata(records, out_dir):
    """Per-series-family delimited files for external plotting; returns paths."""
    out_dir = Path(out_dir)
    n = len(records[0].agents)
    paths = []

    def family(name, header, rows):
        path = out_dir / name
        with open(path, "w") as fh:
            fh.write(",".join(header) + "\n")
            for row in rows:
                fh.write(",".join(row) + "\n")
        paths.append(str(path))

    family(
        "plot_positions.csv",
        ["step"] + [f"{axis}{i}" for i in range(n) for axis in ("x", "y", "z", "lambda")],
        ([str(r.step)] + [repr(v) for a in r.agents for v in a[:4]] for r in records),
    )
    family(
        "plot_radius.csv",
        ["step"] + [f"R{i}" for i in range(n)],
        ([str(r.step)] + [repr(a[4]) for a in r.agents] for r in records),
    )
    family(
        "plot_ncbf.csv",
        ["step"] + [f"min_ncbf{i}" for i in range(n)],
        ([str(r.step)] + [repr(v) for v in r.min_ncbf] for r in records),
    )
    family(
        "plot_global.csv",
        ["step", "H", "H_M", "H_O", "hole_witnesses"],
        (
            [str(r.step), repr(r.H), repr(r.H_M), repr(r.H_O), str(r.hole_witnesses)]
            for r in records
        ),
    )
    return paths


def run_command(config: RunConfig) -> int:
    """Execute one scenario run and write the requested outputs."""
    path = Path(config.scenario_path)
    try:
        text = path.read_text()
    except OSError as exc:
        print(f"error: cannot read scenario '{path}': {exc}", file=sys.stderr)
        return 2
    try:
        scenario = parse_config(text)
        overrides = {}
        if config.mode is not None:
            overrides["mode"] = config.mode.replace("-", "_")
        if config.steps is not None:
            overrides["steps"] = config.steps
        if config.dt is not None:
            overrides["dt"] = config.dt
        if config.seed is not None:
            overrides["seed"] = config.seed
        if overrides:
            scenario = replace(scenario, **overrides)
    except (ParseError, ValidationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    for flag in config.emit:
        if flag not in EMIT_CHOICES:
            print(f"error: unknown emit flag '{flag}'", file=sys.stderr)
            return 2

    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        records, summary = run(scenario)
    except Exception as exc:  # unrecoverable runtime failure
        print(f"error: run failed: {exc}", file=sys.stderr)
        return 1
    if "trace" in config.emit:
        write_trace(records, out_dir / "trace.csv")
    if "summary" in config.emit:
        write_summary(summary, out_dir / "summary.txt")
    if "plotdata" in config.emit:
        emit_plotdata(records, out_dir)
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=os.environ.get(LOG_ENV_VAR, "WARNING").upper())
    parser = argparse.ArgumentParser(
        prog="aircover", description="Deterministic camera-team coverage simulator"
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="simulate a scenario file")
    runp.add_argument("--config", required=True, help="scenario file path")
    runp.add_argument("--out", required=True, help="output directory")
    runp.add_argument("--mode", choices=("ncbf", "hf-only", "nominal-only"))
    runp.add_argument("--steps", type=int)
    runp.add_argument("--dt", type=float)
    runp.add_argument("--seed", type=int)
    runp.add_argument(
        "--emit",
        action="append",
        help="artifacts to write: trace, summary, plotdata "
        "(repeat the flag or pass a comma list; default: trace,summary)",
    )
    args = parser.parse_args(argv)
    emit_args = args.emit if args.emit else ["trace,summary"]
    return run_command(
        RunConfig(
            scenario_path=args.config,
            out_dir=args.out,
            mode=args.mode,
            steps=args.steps,
            dt=args.dt,
            seed=args.seed,
            emit=tuple(s.strip() for arg in emit_args for s in arg.split(",") if s.strip()),
        )
    )


if __name__ == "__main__":
    sys.exit(main())
