"""Command-line entry point: solve / oracle / gen / bench."""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .bench import emit_report, load_dataset, run_benchmark
from .cnf import (
    ORACLE_VARIABLE_CAP,
    brute_force_maxsat,
    generate_random_ksat,
    parse_dimacs_file,
    serialize_dimacs,
)
from .dynamics import DynamicsParams
from .solver import SolverConfig, default_dynamics, solve

log = logging.getLogger("oscmaxsat")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_ALL_SATISFIED = 10

CONFIG_ENV_VAR = "OSC_MAXSAT_CONFIG"

_BOOL_KEYS = {"postprocess", "anneal"}
_INT_KEYS = {"restarts", "seed", "sign_convention", "postprocess_max_iters",
             "readout_samples_per_cycle"}
_FLOAT_KEYS = {"max_cycles", "dt", "coupling_g", "steepness_beta", "noise_sigma",
               "postprocess_subbudget_fraction"}


def read_config_file(path) -> dict:
    """Parse a key=value config file; '#' starts a comment."""
    values: dict = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key in _BOOL_KEYS:
                if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise ValueError(f"{path}:{lineno}: bad boolean {value!r}")
                values[key] = value.lower() in ("true", "1", "yes")
            elif key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            else:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
    return values


def _flag_overrides(args: argparse.Namespace) -> dict:
    pairs = {
        "max_cycles": args.max_cycles,
        "dt": args.dt,
        "coupling_g": args.coupling,
        "steepness_beta": args.beta,
        "noise_sigma": args.sigma,
        "restarts": args.restarts,
        "seed": args.seed,
        "sign_convention": args.sign,
        "readout_samples_per_cycle": args.samples_per_cycle,
    }
    values = {k: v for k, v in pairs.items() if v is not None}
    if args.no_postprocess:
        values["postprocess"] = False
    if args.anneal:
        values["anneal"] = True
    return values


def build_solver_config(formula, args: argparse.Namespace) -> SolverConfig:
    """Settle the effective config: flags > config file > calibrated defaults."""
    values: dict = {}
    config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
    if config_path:
        values.update(read_config_file(config_path))
    values.update(_flag_overrides(args))

    base = default_dynamics(formula)
    dynamics = DynamicsParams(
        coupling_g=values.pop("coupling_g", base.coupling_g),
        steepness_beta=values.pop("steepness_beta", base.steepness_beta),
        noise_sigma=values.pop("noise_sigma", base.noise_sigma),
        dt=values.pop("dt", base.dt),
    )
    return SolverConfig(dynamics=dynamics, **values)


def _add_solver_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--max-cycles", type=float, default=None,
                        help="budget per restart, in oscillation periods")
    parser.add_argument("--dt", type=float, default=None, help="step size in cycles")
    parser.add_argument("--coupling", type=float, default=None,
                        help="feedback coupling (default scales as 1/M)")
    parser.add_argument("--beta", type=float, default=None, help="tanh steepness")
    parser.add_argument("--sigma", type=float, default=None,
                        help="noise amplitude, rad per sqrt(cycle)")
    parser.add_argument("--restarts", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--sign", type=int, choices=(-1, 1), default=None,
                        help="drift sign convention")
    parser.add_argument("--samples-per-cycle", type=int, default=None,
                        help="hard readouts per oscillation period")
    parser.add_argument("--no-postprocess", action="store_true")
    parser.add_argument("--anneal", action="store_true",
                        help="ramp noise linearly to zero over the budget")
    parser.add_argument("--config", default=None,
                        help=f"key=value config file (or ${CONFIG_ENV_VAR})")


def _assignment_line(values) -> str:
    lits = [str(j + 1) if v else str(-(j + 1)) for j, v in enumerate(values)]
    return "v " + " ".join(lits + ["0"])


def cmd_solve(args: argparse.Namespace) -> int:
    formula = parse_dimacs_file(args.cnf)
    config = build_solver_config(formula, args)
    log.info("solving %s: N=%d M=%d", args.cnf, formula.num_variables, formula.num_clauses)
    result = solve(formula, config)
    print(f"best {result.best_count}/{formula.num_clauses}")
    print(_assignment_line(result.best_assignment))
    print(f"cycles_to_best {result.best_found_at_cycles!r}")
    print(f"seed {config.seed}")
    return EXIT_ALL_SATISFIED if result.best_count == formula.num_clauses else EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    formula = parse_dimacs_file(args.cnf)
    best, witness = brute_force_maxsat(formula, cap=args.cap)
    print(f"best {best}/{formula.num_clauses}")
    print(_assignment_line(witness))
    return EXIT_ALL_SATISFIED if best == formula.num_clauses else EXIT_OK


def cmd_gen(args: argparse.Namespace) -> int:
    formula = generate_random_ksat(args.n, args.m, args.k, args.seed)
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        fh.write(serialize_dimacs(formula))
    log.info("wrote %s (N=%d M=%d)", args.out, args.n, args.m)
    return EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    records = load_dataset(args.dataset, sidecar=args.sidecar, oracle_cap=args.oracle_cap)
    config = build_solver_config(records[0].formula, args)

    def per_instance(formula, seed):
        # keep explicit flag/file values, rescale only the defaulted coupling
        if args.coupling is None and "coupling_g" not in _file_values(args):
            dyn = DynamicsParams(
                coupling_g=default_dynamics(formula).coupling_g,
                steepness_beta=config.dynamics.steepness_beta,
                noise_sigma=config.dynamics.noise_sigma,
                dt=config.dynamics.dt,
            )
            return SolverConfig(**{**_solver_kwargs(config), "dynamics": dyn})
        return config

    report = run_benchmark(
        records,
        config,
        frequencies=args.frequency or (),
        jobs=args.jobs,
        trace_dir=args.trace_out,
        config_factory=per_instance,
    )
    parts = [
        f"bench instances={len(report.rows)}",
        f"mean_accuracy={_fmt(report.mean_accuracy)}",
        f"max_accuracy={_fmt(report.max_accuracy)}",
        f"mean_cycles_to_best={_fmt(report.mean_cycles_to_best)}",
    ]
    if report.mean_projected_seconds is not None:
        for f, t in zip(report.frequencies_hz, report.mean_projected_seconds):
            parts.append(f"proj@{f:g}Hz={_fmt(t)}")
    print(" ".join(parts))
    if args.out:
        emit_report(report, args.format, args.out)
        log.info("report written to %s", args.out)
    return EXIT_OK


def _fmt(value) -> str:
    return "n/a" if value is None else repr(float(value))


def _file_values(args: argparse.Namespace) -> dict:
    config_path = args.config or os.environ.get(CONFIG_ENV_VAR)
    return read_config_file(config_path) if config_path else {}


def _solver_kwargs(config: SolverConfig) -> dict:
    return {
        "dynamics": config.dynamics,
        "max_cycles": config.max_cycles,
        "readout_samples_per_cycle": config.readout_samples_per_cycle,
        "restarts": config.restarts,
        "seed": config.seed,
        "sign_convention": config.sign_convention,
        "postprocess": config.postprocess,
        "postprocess_max_iters": config.postprocess_max_iters,
        "postprocess_subbudget_fraction": config.postprocess_subbudget_fraction,
        "anneal": config.anneal,
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscmaxsat",
        description="MaxSAT via simulated coupled-oscillator dynamics",
    )
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a DIMACS CNF instance")
    p_solve.add_argument("cnf")
    _add_solver_flags(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_oracle = sub.add_parser("oracle", help="exhaustive optimum for a small instance")
    p_oracle.add_argument("cnf")
    p_oracle.add_argument("--cap", type=int, default=ORACLE_VARIABLE_CAP,
                          help="refuse instances with more variables than this")
    p_oracle.set_defaults(func=cmd_oracle)

    p_gen = sub.add_parser("gen", help="generate a random k-SAT instance")
    p_gen.add_argument("n", type=int)
    p_gen.add_argument("m", type=int)
    p_gen.add_argument("k", type=int)
    p_gen.add_argument("seed", type=int)
    p_gen.add_argument("out")
    p_gen.set_defaults(func=cmd_gen)

    p_bench = sub.add_parser("bench", help="run a dataset and report accuracy/timing")
    p_bench.add_argument("dataset")
    p_bench.add_argument("--sidecar", default=None,
                         help="best-known file: 'filename count' per line")
    p_bench.add_argument("--oracle-cap", type=int, default=ORACLE_VARIABLE_CAP)
    p_bench.add_argument("--frequency", type=float, action="append", default=None,
                         help="oscillator frequency in Hz for wall-time projection (repeatable)")
    p_bench.add_argument("--format", choices=("csv", "json"), default="json")
    p_bench.add_argument("--out", default=None, help="report destination path")
    p_bench.add_argument("--trace-out", default=None,
                         help="directory for per-instance best-so-far traces")
    p_bench.add_argument("--jobs", type=int, default=1,
                         help="solve this many instances concurrently")
    _add_solver_flags(p_bench)
    p_bench.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose > 1 else
        logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.func(args)
    except Exception as exc:  # operational errors -> diagnostic + exit 1
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
