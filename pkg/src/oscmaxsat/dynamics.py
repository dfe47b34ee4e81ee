"""Continuous-time surrogate of the oscillator network.

Phases are slow deviations from a common carrier of one oscillation period per
unit time. Literals become tanh-thresholded sinusoids, clauses a complementary
product (smooth OR), and the summed clause signal feeds back into every phase
equation, integrated as an Euler-Maruyama SDE.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import ClassVar, Sequence

import numpy as np

from .cnf import Clause, CnfFormula

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class PhaseState:
    """Per-oscillator phase deviations (radians, unwrapped) plus elapsed cycles."""

    alphas: np.ndarray
    cycles_elapsed: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "alphas", np.asarray(self.alphas, dtype=np.float64))
        if self.cycles_elapsed < 0:
            raise ValueError("cycles_elapsed must be nonnegative")


@dataclass(frozen=True)
class DynamicsParams:
    """Knobs of the phase SDE.

    coupling_g merges the perturbation-projection amplitude and the feedback
    constant (only their product enters the drift). noise_sigma is the additive
    white-noise amplitude in radians per sqrt(cycle). The carrier rate omega is
    fixed at 2*pi radians per cycle because time is measured in periods.
    """

    coupling_g: float
    steepness_beta: float = 10.0
    noise_sigma: float = 0.0
    dt: float = 0.01
    omega: ClassVar[float] = TWO_PI

    def __post_init__(self) -> None:
        if self.coupling_g < 0:
            raise ValueError("coupling_g must be nonnegative")
        if self.steepness_beta <= 0:
            raise ValueError("steepness_beta must be positive")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")
        if not 0 < self.dt <= 0.1:
            raise ValueError("dt must lie in (0, 0.1] (at least 10 steps per cycle)")


@dataclass(frozen=True)
class EntropyParams:
    """Lumped coefficients of the dissipation-rate diagnostic."""

    c_out: float = 1.0
    c_fb: float = 1.0

    def __post_init__(self) -> None:
        if self.c_out <= 0 or self.c_fb <= 0:
            raise ValueError("entropy coefficients must be strictly positive")


@dataclass(frozen=True)
class CompiledFormula:
    """Flat clause arrays for vectorized evaluation (duplicate literals removed)."""

    num_variables: int
    num_clauses: int
    lit_var: np.ndarray  # int32, 0-based variable index per kept literal
    lit_neg: np.ndarray  # uint8, 1 when the literal is negated
    clause_ptr: np.ndarray  # int32, CSR offsets, len num_clauses + 1


@lru_cache(maxsize=128)
def compile_formula(formula: CnfFormula) -> CompiledFormula:
    lit_var: list[int] = []
    lit_neg: list[int] = []
    ptr = [0]
    for clause in formula.clauses:
        seen = set()
        for lit in clause.literals:
            key = (lit.variable_index, lit.negated)
            if key in seen:
                continue
            seen.add(key)
            lit_var.append(lit.variable_index - 1)
            lit_neg.append(1 if lit.negated else 0)
        ptr.append(len(lit_var))
    return CompiledFormula(
        formula.num_variables,
        formula.num_clauses,
        np.asarray(lit_var, dtype=np.int32),
        np.asarray(lit_neg, dtype=np.uint8),
        np.asarray(ptr, dtype=np.int32),
    )


def literal_value(alpha: float, t_cycles: float, negated: bool, beta: float) -> float:
    """Smooth literal level in (0, 1): tanh-thresholded sinusoid, complemented if negated."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    ell = 0.5 * (1.0 + math.tanh(beta * math.sin(TWO_PI * t_cycles + alpha)))
    return 1.0 - ell if negated else ell


def clause_value(clause: Clause, phases: PhaseState, beta: float) -> float:
    """Smooth OR: 1 - prod(1 - literal) over the clause's distinct literals."""
    product = 1.0
    seen = set()
    for lit in clause.literals:
        key = (lit.variable_index, lit.negated)
        if key in seen:
            continue
        seen.add(key)
        value = literal_value(
            float(phases.alphas[lit.variable_index - 1]), phases.cycles_elapsed,
            lit.negated, beta,
        )
        product *= 1.0 - value
    return 1.0 - product


def _clause_values_vec(comp: CompiledFormula, alphas: np.ndarray, t_cycles: float,
                       beta: float) -> np.ndarray:
    s = np.sin(TWO_PI * t_cycles + alphas)
    ell_pos = 0.5 * (1.0 + np.tanh(beta * s))
    lit_val = ell_pos[comp.lit_var]
    np.subtract(1.0, lit_val, out=lit_val, where=comp.lit_neg == 1)
    one_minus = 1.0 - lit_val
    if comp.num_clauses == 0:
        return np.zeros(0)
    products = np.multiply.reduceat(one_minus, comp.clause_ptr[:-1])
    # reduceat yields one_minus[ptr[i]] for empty segments; force marker clauses to 0
    empties = comp.clause_ptr[:-1] == comp.clause_ptr[1:]
    if empties.any():
        products[empties] = 1.0
    return 1.0 - products


def feedback_signal(
    formula: CnfFormula, phases: PhaseState, params: DynamicsParams
) -> tuple[float, float]:
    """Summed smooth clause level and the coupled feedback voltage (v_y, k_sum)."""
    comp = compile_formula(formula)
    k_sum = float(np.sum(_clause_values_vec(comp, phases.alphas, phases.cycles_elapsed,
                                            params.steepness_beta)))
    return params.coupling_g * k_sum, k_sum


def sde_step(
    phases: PhaseState,
    formula: CnfFormula,
    params: DynamicsParams,
    noise_draws: Sequence[float],
    sign_convention: int = 1,
) -> PhaseState:
    """One Euler-Maruyama step of the phase SDE.

    All oscillators update simultaneously from the pre-step state:
    alpha_j += sign * sin(2*pi*t + alpha_j) * v_y * dt + sigma * sqrt(dt) * xi_j.
    Raises RuntimeError if the update produces a non-finite phase.
    """
    draws = np.asarray(noise_draws, dtype=np.float64)
    if draws.shape != (formula.num_variables,):
        raise ValueError(
            f"need {formula.num_variables} noise draws, got shape {draws.shape}"
        )
    if sign_convention not in (-1, 1):
        raise ValueError("sign_convention must be +1 or -1")
    t = phases.cycles_elapsed
    s = np.sin(TWO_PI * t + phases.alphas)
    v_y, _ = feedback_signal(formula, phases, params)
    new_alphas = (
        phases.alphas
        + sign_convention * s * (v_y * params.dt)
        + params.noise_sigma * math.sqrt(params.dt) * draws
    )
    if not np.all(np.isfinite(new_alphas)):
        raise RuntimeError("non-finite phase after SDE step (parameter blow-up)")
    return PhaseState(new_alphas, t + params.dt)


def entropy_rate_proxy(k_sum: float, n_vars: int, params: EntropyParams) -> float:
    """Dissipation-rate diagnostic: c_out*k_sum + c_fb*k_sum^2/n_vars.

    The feedback branch carries the square of the summed clause signal split
    over n_vars identical resistive paths, so the N-fold sum of (1/N)^2
    collapses to 1/N.
    """
    if n_vars < 1:
        raise ValueError("n_vars must be >= 1")
    if k_sum < 0:
        raise ValueError("k_sum must be nonnegative")
    return params.c_out * k_sum + params.c_fb * k_sum * k_sum / n_vars


def or_transition_count(
    input_phases: Sequence[float],
    duty_cycle: float = 0.5,
    samples_per_period: int = 2048,
) -> int:
    """Output transitions of an ideal OR of square waves over one period.

    Inputs are 50%-duty square waves offset by the given phases; the output is
    sampled at midpoints of a uniform grid and transitions are counted
    cyclically, which makes the result even for any periodic input set.
    """
    phases = np.asarray(input_phases, dtype=np.float64)
    if phases.size < 1:
        raise ValueError("need at least one input")
    if samples_per_period < 1000:
        raise ValueError("need >= 1000 samples per period")
    t = (np.arange(samples_per_period) + 0.5) / samples_per_period
    frac = (t[None, :] + phases[:, None] / TWO_PI) % 1.0
    out = (frac < duty_cycle).any(axis=0)
    return int(np.count_nonzero(out != np.roll(out, 1)))
