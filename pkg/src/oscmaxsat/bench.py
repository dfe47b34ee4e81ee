"""Dataset ingestion, batch evaluation, and accuracy / time-to-solution reports."""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Sequence

from .cnf import ORACLE_VARIABLE_CAP, CnfFormula, brute_force_maxsat, parse_dimacs_file
from .solver import SolveResult, SolverConfig, solve


@dataclass(frozen=True)
class InstanceRecord:
    path: str
    formula: CnfFormula
    best_known: int | None

    def __post_init__(self) -> None:
        if self.best_known is not None and not 0 <= self.best_known <= self.formula.num_clauses:
            raise ValueError(f"best_known {self.best_known} outside [0, M] for {self.path}")

    @property
    def name(self) -> str:
        return os.path.basename(self.path)


@dataclass(frozen=True)
class BenchRow:
    instance: str
    n_vars: int
    n_clauses: int
    best_count: int | None
    best_known: int | None
    accuracy: float | None
    stale_best_known: bool
    cycles_to_best: float | None
    restarts_used: int | None
    postprocessed: bool
    postprocess_iterations: int | None
    error: str | None
    projected_seconds: tuple[float, ...] | None


@dataclass(frozen=True)
class BenchReport:
    frequencies_hz: tuple[float, ...]
    rows: tuple[BenchRow, ...]
    mean_accuracy: float | None
    max_accuracy: float | None
    mean_cycles_to_best: float | None
    mean_projected_seconds: tuple[float, ...] | None
    config: dict
    metadata: dict


def read_sidecar(path) -> dict[str, int]:
    """Parse a best-known sidecar: one 'filename count' pair per line."""
    table: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 'filename count', got {line!r}")
            try:
                table[parts[0]] = int(parts[1])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-integer count {parts[1]!r}") from exc
    return table


def load_dataset(
    directory,
    sidecar=None,
    oracle_cap: int = ORACLE_VARIABLE_CAP,
) -> list[InstanceRecord]:
    """Load every .cnf file in `directory`, in lexicographic filename order.

    best_known comes from the sidecar when given, otherwise from the exhaustive
    oracle when the instance is small enough, otherwise it is left absent.
    """
    root = Path(directory)
    paths = sorted(p for p in root.iterdir() if p.suffix == ".cnf")
    if not paths:
        raise ValueError(f"no .cnf files in {directory}")
    known = read_sidecar(sidecar) if sidecar is not None else {}
    records = []
    for path in paths:
        formula = parse_dimacs_file(path)
        best = known.get(path.name)
        if best is None and formula.num_variables <= oracle_cap:
            best, _ = brute_force_maxsat(formula, cap=oracle_cap)
        records.append(InstanceRecord(str(path), formula, best))
    return records


def _solve_record(args: tuple[InstanceRecord, SolverConfig]) -> SolveResult | str:
    record, config = args
    try:
        return solve(record.formula, config)
    except RuntimeError as exc:
        return f"{type(exc).__name__}: {exc}"


def _make_row(
    record: InstanceRecord,
    outcome: SolveResult | str,
    frequencies: Sequence[float],
    postprocessed: bool,
) -> BenchRow:
    if isinstance(outcome, str):
        return BenchRow(
            instance=record.name,
            n_vars=record.formula.num_variables,
            n_clauses=record.formula.num_clauses,
            best_count=None,
            best_known=record.best_known,
            accuracy=None,
            stale_best_known=False,
            cycles_to_best=None,
            restarts_used=None,
            postprocessed=postprocessed,
            postprocess_iterations=None,
            error=outcome,
            projected_seconds=None,
        )
    accuracy = None
    if record.best_known:
        accuracy = outcome.best_count / record.best_known
    cycles = outcome.best_found_at_cycles
    return BenchRow(
        instance=record.name,
        n_vars=record.formula.num_variables,
        n_clauses=record.formula.num_clauses,
        best_count=outcome.best_count,
        best_known=record.best_known,
        accuracy=accuracy,
        stale_best_known=bool(accuracy is not None and accuracy > 1.0),
        cycles_to_best=cycles,
        restarts_used=outcome.restarts_used,
        postprocessed=postprocessed,
        postprocess_iterations=outcome.postprocess_iterations,
        error=None,
        projected_seconds=tuple(cycles / f for f in frequencies),
    )


def _mean(values: list[float]) -> float | None:
    return sum(values) / len(values) if values else None


def aggregate_rows(
    rows: Sequence[BenchRow], frequencies: Sequence[float]
) -> tuple[float | None, float | None, float | None, tuple[float, ...] | None]:
    """Mean/max accuracy and mean time-to-best over error-free rows."""
    accs = [r.accuracy for r in rows if r.error is None and r.accuracy is not None]
    cycles = [r.cycles_to_best for r in rows if r.error is None and r.cycles_to_best is not None]
    mean_acc = _mean(accs)
    max_acc = max(accs) if accs else None
    mean_cycles = _mean(cycles)
    mean_proj = None
    if cycles and frequencies:
        mean_proj = tuple(
            _mean([r.projected_seconds[i] for r in rows if r.projected_seconds is not None])
            for i in range(len(frequencies))
        )
    return mean_acc, max_acc, mean_cycles, mean_proj


def run_benchmark(
    records: Sequence[InstanceRecord],
    config: SolverConfig,
    frequencies: Sequence[float] = (),
    jobs: int = 1,
    trace_dir=None,
    config_factory: Callable[[CnfFormula, int], SolverConfig] | None = None,
) -> BenchReport:
    """Solve every record and assemble the per-instance and aggregate report.

    `config_factory(formula, seed)` overrides `config` per instance when the
    calibrated defaults should scale with instance size. Solves may run in
    `jobs` processes; assembly is an ordered reduction, so the report is
    deterministic either way. Failures are recorded per row and excluded from
    the aggregates.
    """
    if not records:
        raise ValueError("no instances to benchmark")
    freqs = tuple(float(f) for f in frequencies)
    if any(f <= 0 for f in freqs):
        raise ValueError("frequencies must be positive")
    configs = [
        config_factory(r.formula, config.seed) if config_factory is not None else config
        for r in records
    ]
    work = list(zip(records, configs))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_solve_record, work))
    else:
        outcomes = [_solve_record(w) for w in work]
    rows = tuple(
        _make_row(rec, out, freqs, cfg.postprocess)
        for (rec, cfg), out in zip(work, outcomes)
    )
    if trace_dir is not None:
        trace_root = Path(trace_dir)
        trace_root.mkdir(parents=True, exist_ok=True)
        for record, outcome in zip(records, outcomes):
            if isinstance(outcome, str):
                continue
            write_trace(outcome, trace_root / (Path(record.name).stem + ".trace.csv"))
    mean_acc, max_acc, mean_cycles, mean_proj = aggregate_rows(rows, freqs)
    return BenchReport(
        frequencies_hz=freqs,
        rows=rows,
        mean_accuracy=mean_acc,
        max_accuracy=max_acc,
        mean_cycles_to_best=mean_cycles,
        mean_projected_seconds=mean_proj,
        config=_config_snapshot(configs[0]),
        metadata={"created_utc": datetime.now(timezone.utc).isoformat()},
    )


def _config_snapshot(config: SolverConfig) -> dict:
    snap = asdict(config)
    snap["dynamics"]["omega"] = config.dynamics.omega
    return snap


def write_trace(result: SolveResult, destination) -> None:
    """Per-instance (cycle, best_so_far) pairs for external plotting."""
    with open(destination, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["cycle", "best_so_far"])
        for cycle, best in result.trace:
            writer.writerow([repr(float(cycle)), best])


def report_to_dict(report: BenchReport) -> dict:
    return {
        "schema": "oscmaxsat-bench-report/1",
        "frequencies_hz": list(report.frequencies_hz),
        "rows": [
            {**asdict(row), "projected_seconds": (
                list(row.projected_seconds) if row.projected_seconds is not None else None
            )}
            for row in report.rows
        ],
        "aggregates": {
            "mean_accuracy": report.mean_accuracy,
            "max_accuracy": report.max_accuracy,
            "mean_cycles_to_best": report.mean_cycles_to_best,
            "mean_projected_seconds": (
                list(report.mean_projected_seconds)
                if report.mean_projected_seconds is not None
                else None
            ),
        },
        "config": report.config,
        "metadata": report.metadata,
    }


_CSV_BASE_COLUMNS = [
    "instance",
    "n_vars",
    "n_clauses",
    "best_count",
    "best_known",
    "accuracy",
    "stale_best_known",
    "cycles_to_best",
    "restarts_used",
    "postprocessed",
    "postprocess_iterations",
    "error",
]


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def emit_report(report: BenchReport, format: str, destination) -> None:
    """Write the report as CSV (fixed column order) or JSON (stable schema).

    Reals are emitted with full round-trip precision in both formats; emitting,
    parsing, and re-emitting the JSON is byte-identical.
    """
    if format == "json":
        payload = json.dumps(report_to_dict(report), indent=2) + "\n"
        _write_text(destination, payload)
    elif format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        freq_cols = [f"projected_s_at_{f:g}Hz" for f in report.frequencies_hz]
        writer.writerow(_CSV_BASE_COLUMNS + freq_cols)
        for row in report.rows:
            cells = [_csv_cell(getattr(row, col)) for col in _CSV_BASE_COLUMNS]
            if row.projected_seconds is None:
                cells += ["" for _ in report.frequencies_hz]
            else:
                cells += [_csv_cell(v) for v in row.projected_seconds]
            writer.writerow(cells)
        _write_text(destination, buf.getvalue())
    else:
        raise ValueError(f"unknown report format {format!r}")


def _write_text(destination, payload: str) -> None:
    if hasattr(destination, "write"):
        destination.write(payload)
    else:
        with open(destination, "w", encoding="utf-8", newline="") as fh:
            fh.write(payload)
