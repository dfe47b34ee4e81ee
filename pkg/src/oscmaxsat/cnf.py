"""CNF instance model: DIMACS I/O, exact evaluation, exhaustive oracle, random generation."""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# 2^N enumeration above this is refused by the oracle.
ORACLE_VARIABLE_CAP = 25


class DimacsError(ValueError):
    """Structurally corrupt DIMACS CNF input."""


class DimacsWarning(UserWarning):
    """Tolerated DIMACS irregularity (e.g. clause count disagreeing with the header)."""


@dataclass(frozen=True)
class Literal:
    """A variable occurrence: 1-based index plus polarity."""

    variable_index: int
    negated: bool = False

    def __post_init__(self) -> None:
        if self.variable_index < 1:
            raise ValueError(f"variable index must be >= 1, got {self.variable_index}")

    @classmethod
    def from_int(cls, lit: int) -> "Literal":
        if lit == 0:
            raise ValueError("0 is the DIMACS clause terminator, not a literal")
        return cls(abs(lit), lit < 0)

    def to_int(self) -> int:
        return -self.variable_index if self.negated else self.variable_index


@dataclass(frozen=True)
class Clause:
    """Disjunction of literals. Duplicates are preserved; evaluation is idempotent.

    Parsed and generated clauses always hold at least one literal. An empty
    clause is an always-false marker and arises only from problem reduction.
    """

    literals: tuple[Literal, ...]

    @classmethod
    def from_ints(cls, lits: Iterable[int]) -> "Clause":
        return cls(tuple(Literal.from_int(l) for l in lits))

    def to_ints(self) -> tuple[int, ...]:
        return tuple(l.to_int() for l in self.literals)


# One Boolean per variable; index j holds the truth value of x_{j+1}.
Assignment = tuple[bool, ...]


@dataclass(frozen=True)
class CnfFormula:
    """Unweighted CNF instance: variable count and ordered clause list.

    Immutable after construction and safe to share across concurrent solver
    trajectories. ``num_variables == 0`` is permitted only for the degenerate
    clause-free formulas produced by problem reduction.
    """

    num_variables: int
    clauses: tuple[Clause, ...]

    def __post_init__(self) -> None:
        if self.num_variables < 0:
            raise ValueError("num_variables must be nonnegative")
        for clause in self.clauses:
            for lit in clause.literals:
                if lit.variable_index > self.num_variables:
                    raise ValueError(
                        f"literal on x{lit.variable_index} exceeds "
                        f"num_variables={self.num_variables}"
                    )

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    @classmethod
    def from_ints(cls, num_variables: int, clauses: Iterable[Iterable[int]]) -> "CnfFormula":
        return cls(num_variables, tuple(Clause.from_ints(c) for c in clauses))


def parse_dimacs(text: str) -> CnfFormula:
    """Parse DIMACS CNF text into a formula.

    Accepts ``c`` comment lines, one ``p cnf N M`` header, and clauses given as
    whitespace-separated signed integers terminated by ``0`` (clauses may span
    lines). A ``%`` line ends the clause section (SATLIB convention). A clause
    count that disagrees with the header is tolerated with a `DimacsWarning`;
    structural corruption (bad header, out-of-range literal, non-integer token,
    empty clause) raises `DimacsError`.
    """
    num_vars: int | None = None
    header_clauses: int | None = None
    clauses: list[Clause] = []
    pending: list[int] = []

    lines = text.splitlines()
    done = False
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        if line.startswith("%"):
            done = True
            break
        if line.startswith("p"):
            if num_vars is not None:
                raise DimacsError(f"line {lineno}: duplicate problem header")
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise DimacsError(f"line {lineno}: malformed header {line!r}")
            try:
                num_vars, header_clauses = int(parts[2]), int(parts[3])
            except ValueError as exc:
                raise DimacsError(f"line {lineno}: non-integer header field") from exc
            if num_vars < 0 or header_clauses < 0:
                raise DimacsError(f"line {lineno}: negative header field")
            continue
        if num_vars is None:
            raise DimacsError(f"line {lineno}: clause data before 'p cnf' header")
        for token in line.split():
            try:
                value = int(token)
            except ValueError as exc:
                raise DimacsError(f"line {lineno}: non-integer token {token!r}") from exc
            if value == 0:
                if not pending:
                    raise DimacsError(f"line {lineno}: empty clause")
                clauses.append(Clause.from_ints(pending))
                pending.clear()
            else:
                if abs(value) > num_vars:
                    raise DimacsError(
                        f"line {lineno}: literal {value} exceeds header N={num_vars}"
                    )
                pending.append(value)
        if done:
            break

    if num_vars is None:
        raise DimacsError("missing 'p cnf' header")
    if pending:
        warnings.warn("final clause missing terminating 0", DimacsWarning, stacklevel=2)
        clauses.append(Clause.from_ints(pending))
    if header_clauses is not None and len(clauses) != header_clauses:
        warnings.warn(
            f"header declares {header_clauses} clauses but file contains {len(clauses)}",
            DimacsWarning,
            stacklevel=2,
        )
    return CnfFormula(num_vars, tuple(clauses))


def parse_dimacs_file(path) -> CnfFormula:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_dimacs(fh.read())


def serialize_dimacs(formula: CnfFormula) -> str:
    """Emit canonical DIMACS: header line then one 0-terminated clause per line."""
    lines = [f"p cnf {formula.num_variables} {formula.num_clauses}"]
    for clause in formula.clauses:
        lines.append(" ".join(str(i) for i in clause.to_ints()) + " 0")
    return "\n".join(lines) + "\n"


def _literal_true(lit: Literal, assignment: Sequence[bool]) -> bool:
    value = assignment[lit.variable_index - 1]
    return (not value) if lit.negated else value


def clause_satisfied(clause: Clause, assignment: Sequence[bool]) -> bool:
    return any(_literal_true(lit, assignment) for lit in clause.literals)


def count_satisfied(formula: CnfFormula, assignment: Sequence[bool]) -> int:
    """Exact number of clauses with at least one true literal under `assignment`."""
    if len(assignment) != formula.num_variables:
        raise ValueError(
            f"assignment length {len(assignment)} != num_variables {formula.num_variables}"
        )
    return sum(1 for clause in formula.clauses if clause_satisfied(clause, assignment))


def _decode_assignment(code: int, n: int) -> Assignment:
    # x1 is the most significant bit, so the lowest code is the
    # lexicographically least assignment (False < True).
    return tuple(bool((code >> (n - j)) & 1) for j in range(1, n + 1))


def brute_force_maxsat(
    formula: CnfFormula, cap: int = ORACLE_VARIABLE_CAP
) -> tuple[int, Assignment]:
    """Exhaustive 2^N oracle; ties break to the lexicographically least witness.

    Enumerates in chunks with vectorized per-clause unsatisfied-subcube masks,
    independently of `count_satisfied`, so the two act as cross-checks.
    """
    n = formula.num_variables
    if n > cap:
        raise ValueError(f"brute force refused: N={n} exceeds cap {cap}")
    total = 1 << n
    chunk = min(total, 1 << 20)
    best_count = -1
    best_code = 0
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total), dtype=np.uint32)
        counts = np.zeros(idx.shape, dtype=np.int32)
        for clause in formula.clauses:
            unsat = np.ones(idx.shape, dtype=bool)
            for lit in {(l.variable_index, l.negated) for l in clause.literals}:
                var, negated = lit
                bit = (idx >> np.uint32(n - var)) & np.uint32(1)
                # literal false when the variable's bit equals its negation flag
                unsat &= bit == np.uint32(int(negated))
            counts += ~unsat
        local_best = int(counts.max()) if counts.size else 0
        if local_best > best_count:
            best_count = local_best
            best_code = start + int(np.argmax(counts == local_best))
    if best_count < 0:
        best_count = 0
    return best_count, _decode_assignment(best_code, n)


def generate_random_ksat(n: int, m: int, k: int, seed: int) -> CnfFormula:
    """Uniform random k-SAT: k distinct variables per clause, uniform polarity."""
    if k < 1 or k > n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    clauses = []
    for _ in range(m):
        variables = rng.choice(n, size=k, replace=False) + 1
        negations = rng.random(k) < 0.5
        clauses.append(
            Clause(tuple(Literal(int(v), bool(neg)) for v, neg in zip(variables, negations)))
        )
    return CnfFormula(n, tuple(clauses))
