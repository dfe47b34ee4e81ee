"""Full solves: trajectory integration, readout, restarts, and iterative reduction.

The trajectory inner loop is a compiled kernel (numba when available, plain
Python otherwise) performing the same per-step update as `dynamics.sde_step`,
with hard-assignment readouts scored exactly at evenly spaced sample times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .cnf import (
    Assignment,
    Clause,
    CnfFormula,
    Literal,
    clause_satisfied,
    count_satisfied,
)
from .dynamics import TWO_PI, DynamicsParams, PhaseState, compile_formula

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None


@dataclass(frozen=True)
class SolverConfig:
    """Everything a solve needs: dynamics parameters plus readout and search policy."""

    dynamics: DynamicsParams
    max_cycles: float = 256.0
    readout_samples_per_cycle: int = 8
    restarts: int = 4
    seed: int = 0
    sign_convention: int = 1
    postprocess: bool = True
    postprocess_max_iters: int = 20
    postprocess_subbudget_fraction: float = 0.5
    anneal: bool = False

    def __post_init__(self) -> None:
        if self.max_cycles < 1:
            raise ValueError("max_cycles must be >= 1")
        if self.readout_samples_per_cycle < 1:
            raise ValueError("readout_samples_per_cycle must be >= 1")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.sign_convention not in (-1, 1):
            raise ValueError("sign_convention must be +1 or -1")
        if self.postprocess_max_iters < 1:
            raise ValueError("postprocess_max_iters must be >= 1")
        if not 0 < self.postprocess_subbudget_fraction <= 1:
            raise ValueError("postprocess_subbudget_fraction must lie in (0, 1]")


@dataclass(frozen=True)
class SolveResult:
    """Best assignment found, its exact score, and how the search got there.

    `trace` holds (cycle, best_so_far) pairs, one per elapsed oscillation
    cycle (plus the early-exit point); post-processing appends further pairs
    with cumulative cycle accounting. best_count always equals an exact
    re-evaluation of best_assignment.
    """

    best_assignment: Assignment
    best_count: int
    best_found_at_cycles: float
    trace: tuple[tuple[float, int], ...]
    restarts_used: int
    postprocess_iterations: int
    rng_seed: int


@dataclass(frozen=True)
class ReductionState:
    """Subproblem over the variables of unsatisfied clauses, plus the fixed rest."""

    active_variables: frozenset[int]
    fixed_values: dict[int, bool]
    eliminated_satisfied_count: int
    reduced_formula: CnfFormula
    index_map: tuple[int, ...]  # reduced index r (1-based) -> index_map[r-1] original


# --- trajectory kernel -------------------------------------------------------


def _integrate_chunk_py(
    alpha,
    k_start,
    nsteps,
    dt,
    beta,
    coupling,
    sign,
    sigma0,
    sigma_slope,
    noise,
    has_noise,
    sample_steps,
    lit_var,
    lit_neg,
    clause_ptr,
    target,
    best_in,
    assign_out,
):
    n = alpha.shape[0]
    m = clause_ptr.shape[0] - 1
    sqrt_dt = math.sqrt(dt)
    s = np.empty(n)
    lp = np.empty(n)
    best = best_in
    best_k = -1
    sp = 0
    n_samples = sample_steps.shape[0]
    for step in range(nsteps):
        k = k_start + step
        t = k * dt
        for j in range(n):
            s[j] = math.sin(TWO_PI * t + alpha[j])
        if sp < n_samples and sample_steps[sp] == k:
            sp += 1
            cnt = 0
            for i in range(m):
                sat = False
                for p in range(clause_ptr[i], clause_ptr[i + 1]):
                    high = s[lit_var[p]] > 0.0
                    if lit_neg[p] == 1:
                        high = not high
                    if high:
                        sat = True
                        break
                if sat:
                    cnt += 1
            if cnt > best:
                best = cnt
                best_k = k
                for j in range(n):
                    assign_out[j] = s[j] > 0.0
                if best >= target:
                    return best, best_k, False, k
        for j in range(n):
            lp[j] = 0.5 * (1.0 + math.tanh(beta * s[j]))
        ksum = 0.0
        for i in range(m):
            prod = 1.0
            for p in range(clause_ptr[i], clause_ptr[i + 1]):
                lv = lp[lit_var[p]]
                if lit_neg[p] == 1:
                    lv = 1.0 - lv
                prod *= 1.0 - lv
            ksum += 1.0 - prod
        coef = sign * coupling * ksum * dt
        sigma = sigma0 + sigma_slope * k
        if sigma < 0.0:
            sigma = 0.0
        if has_noise:
            sq = sigma * sqrt_dt
            for j in range(n):
                alpha[j] += coef * s[j] + sq * noise[step, j]
        else:
            for j in range(n):
                alpha[j] += coef * s[j]
    bad = False
    for j in range(n):
        if not np.isfinite(alpha[j]):
            bad = True
    return best, best_k, bad, -1


if njit is not None:
    _integrate_chunk = njit(cache=True, fastmath=False)(_integrate_chunk_py)
else:  # pragma: no cover
    _integrate_chunk = _integrate_chunk_py


def _sample_steps_between(k_lo: int, k_hi: int, dt: float, spc: int) -> np.ndarray:
    """Global step indices in [k_lo, k_hi) nearest to the ideal times q/spc."""
    q_lo = max(0, int(math.floor(k_lo * dt * spc)) - 1)
    q_hi = int(math.ceil(k_hi * dt * spc)) + 1
    steps = {round(q / (spc * dt)) for q in range(q_lo, q_hi + 1)}
    return np.asarray(sorted(k for k in steps if k_lo <= k < k_hi), dtype=np.int64)


_EMPTY_NOISE = np.zeros((0, 0))


def readout(phases: PhaseState, t_cycles: float) -> Assignment:
    """Threshold the waveforms: x_j is true iff sin(2*pi*t + alpha_j) > 0."""
    s = np.sin(TWO_PI * t_cycles + phases.alphas)
    return tuple(bool(v) for v in (s > 0.0))


def run_trajectory(
    formula: CnfFormula, config: SolverConfig, rng: np.random.Generator
) -> SolveResult:
    """One SDE trajectory from random phases, scoring readouts against the formula.

    Samples `readout_samples_per_cycle` evenly spaced times per cycle (snapped
    to the dt grid), keeps the best exact satisfied count, and exits early once
    every clause is satisfied. Raises RuntimeError on phase blow-up.
    """
    comp = compile_formula(formula)
    n, m = formula.num_variables, formula.num_clauses
    dyn = config.dynamics
    dt = dyn.dt
    total_steps = max(1, round(config.max_cycles / dt))
    chunk = max(1, round(1.0 / dt))
    sigma0 = dyn.noise_sigma
    slope = -sigma0 / total_steps if config.anneal else 0.0
    has_noise = sigma0 > 0.0

    alpha = rng.uniform(0.0, TWO_PI, n)
    assign_buf = np.zeros(n, dtype=np.bool_)
    best = -1
    best_k = 0
    trace: list[tuple[float, int]] = []
    k = 0
    while k < total_steps:
        nsteps = min(chunk, total_steps - k)
        sample_steps = _sample_steps_between(k, k + nsteps, dt, config.readout_samples_per_cycle)
        noise = rng.standard_normal((nsteps, n)) if has_noise else _EMPTY_NOISE
        new_best, new_best_k, bad, exit_k = _integrate_chunk(
            alpha,
            k,
            nsteps,
            dt,
            dyn.steepness_beta,
            dyn.coupling_g,
            float(config.sign_convention),
            sigma0,
            slope,
            noise,
            has_noise,
            sample_steps,
            comp.lit_var,
            comp.lit_neg,
            comp.clause_ptr,
            m,
            best,
            assign_buf,
        )
        if bad:
            raise RuntimeError("non-finite phase during trajectory (parameter blow-up)")
        if new_best > best:
            best = new_best
            best_k = int(new_best_k)
        if exit_k >= 0:
            trace.append((exit_k * dt, best))
            break
        k += nsteps
        trace.append((k * dt, best))
    return SolveResult(
        best_assignment=tuple(bool(b) for b in assign_buf),
        best_count=int(best),
        best_found_at_cycles=best_k * dt,
        trace=tuple(trace),
        restarts_used=1,
        postprocess_iterations=0,
        rng_seed=config.seed,
    )


# --- iterative problem reduction ---------------------------------------------


def reduce_problem(formula: CnfFormula, assignment: Sequence[bool]) -> ReductionState:
    """Shrink the instance around the incumbent assignment.

    Active variables are those occurring in unsatisfied clauses. A clause is
    eliminated iff a true literal over an inactive variable keeps it satisfied
    no matter how the active variables are reassigned; remaining clauses keep
    only their active-variable literals, densely remapped.
    """
    n = formula.num_variables
    if len(assignment) != n:
        raise ValueError(f"assignment length {len(assignment)} != num_variables {n}")
    sat_flags = [clause_satisfied(c, assignment) for c in formula.clauses]
    active: set[int] = set()
    for clause, sat in zip(formula.clauses, sat_flags):
        if not sat:
            active.update(lit.variable_index for lit in clause.literals)
    ordered = sorted(active)
    new_index = {v: r + 1 for r, v in enumerate(ordered)}

    eliminated = 0
    reduced_clauses: list[Clause] = []
    for clause, sat in zip(formula.clauses, sat_flags):
        if sat and any(
            lit.variable_index not in active
            and (assignment[lit.variable_index - 1] != lit.negated)
            for lit in clause.literals
        ):
            eliminated += 1
            continue
        kept = tuple(
            Literal(new_index[lit.variable_index], lit.negated)
            for lit in clause.literals
            if lit.variable_index in active
        )
        # empty tuple: always-false marker, keeps M and count conservation exact
        reduced_clauses.append(Clause(kept))

    fixed = {v: bool(assignment[v - 1]) for v in range(1, n + 1) if v not in active}
    return ReductionState(
        active_variables=frozenset(active),
        fixed_values=fixed,
        eliminated_satisfied_count=eliminated,
        reduced_formula=CnfFormula(len(ordered), tuple(reduced_clauses)),
        index_map=tuple(ordered),
    )


def merge_assignment(reduction: ReductionState, n: int, sub: Sequence[bool]) -> Assignment:
    """Combine fixed values with a reduced-problem assignment mapped back."""
    values = [False] * n
    for v, val in reduction.fixed_values.items():
        values[v - 1] = val
    for r, v in enumerate(reduction.index_map):
        values[v - 1] = bool(sub[r])
    return tuple(values)


def post_process(
    formula: CnfFormula,
    result: SolveResult,
    config: SolverConfig,
    rng: np.random.Generator | None = None,
) -> SolveResult:
    """Iterative reduce-and-resolve refinement. Never worsens the incumbent.

    Each round reduces around the incumbent, re-solves the subproblem with a
    fraction of the main budget, and adopts the merged assignment only if its
    exact score on the original formula is at least the incumbent's. Stops when
    no active variables remain, when the active set stops shrinking, or at the
    iteration cap.
    """
    if rng is None:
        rng = np.random.default_rng(np.random.SeedSequence((config.seed, 0x705705)))
    incumbent = tuple(result.best_assignment)
    incumbent_count = result.best_count
    trace = list(result.trace)
    cum = trace[-1][0] if trace else 0.0
    best_at = result.best_found_at_cycles
    prev_eta: int | None = None
    iters = 0
    while iters < config.postprocess_max_iters:
        reduction = reduce_problem(formula, incumbent)
        eta = len(reduction.active_variables)
        if eta == 0 or (prev_eta is not None and eta >= prev_eta):
            break
        prev_eta = eta
        sub_config = replace(
            config,
            max_cycles=max(1.0, config.postprocess_subbudget_fraction * config.max_cycles),
            restarts=1,
            postprocess=False,
        )
        try:
            sub = run_trajectory(reduction.reduced_formula, sub_config, rng)
        except RuntimeError:
            break
        iters += 1
        cum += sub.trace[-1][0] if sub.trace else sub_config.max_cycles
        candidate = merge_assignment(reduction, formula.num_variables, sub.best_assignment)
        candidate_count = count_satisfied(formula, candidate)
        if candidate_count >= incumbent_count:
            if candidate_count > incumbent_count:
                best_at = cum
            incumbent = candidate
            incumbent_count = candidate_count
        trace.append((cum, incumbent_count))
        if incumbent_count == formula.num_clauses:
            break
    return replace(
        result,
        best_assignment=incumbent,
        best_count=incumbent_count,
        best_found_at_cycles=best_at,
        trace=tuple(trace),
        postprocess_iterations=result.postprocess_iterations + iters,
    )


def solve(formula: CnfFormula, config: SolverConfig) -> SolveResult:
    """Best-of-restarts solve with optional post-processing. Fully seed-deterministic.

    Ties between restarts break to the earliest best_found_at_cycles, then the
    lowest restart index. Once a restart satisfies every clause the remaining
    restarts are skipped (they cannot improve the count).
    """
    children = np.random.SeedSequence(config.seed).spawn(config.restarts + 1)
    outcomes: list[tuple[SolveResult, int]] = []
    attempted = 0
    for r in range(config.restarts):
        attempted = r + 1
        rng = np.random.default_rng(children[r])
        try:
            res = run_trajectory(formula, config, rng)
        except RuntimeError:
            continue
        outcomes.append((res, r))
        if res.best_count == formula.num_clauses:
            break
    if not outcomes:
        raise RuntimeError("all restarts failed with non-finite phases")
    best, _ = min(outcomes, key=lambda o: (-o[0].best_count, o[0].best_found_at_cycles, o[1]))
    best = replace(best, restarts_used=attempted)
    if config.postprocess:
        best = post_process(formula, best, config, np.random.default_rng(children[-1]))
    return best


# --- calibrated defaults ------------------------------------------------------

# Coupling scales inversely with clause count: only within-cycle variation of
# the summed clause signal produces net phase drift, and its useful magnitude
# grows with M while the stability limit of the explicit step shrinks as 1/M.
DEFAULT_COUPLING_PER_CLAUSE = 1.0
DEFAULT_BETA = 10.0
DEFAULT_SIGMA = 0.15
DEFAULT_DT = 0.01


def default_dynamics(formula: CnfFormula) -> DynamicsParams:
    m = max(1, formula.num_clauses)
    return DynamicsParams(
        coupling_g=DEFAULT_COUPLING_PER_CLAUSE / m,
        steepness_beta=DEFAULT_BETA,
        noise_sigma=DEFAULT_SIGMA,
        dt=DEFAULT_DT,
    )


def default_config(formula: CnfFormula, seed: int = 0, **overrides) -> SolverConfig:
    """Calibrated defaults for a given instance (see configs/default.cfg)."""
    dynamics = overrides.pop("dynamics", default_dynamics(formula))
    return SolverConfig(dynamics=dynamics, seed=seed, **overrides)
