"""Random-walk flip baseline: an independent accuracy denominator for benchmarks.

Deliberately shares nothing with the oscillator solver beyond the formula
types, so solver accuracy can be judged against a second route.
"""

from __future__ import annotations

import numpy as np

from .cnf import Assignment, CnfFormula
from .dynamics import compile_formula

try:
    from numba import njit
except ImportError:  # pragma: no cover
    njit = None


def _walk_py(flips, true_counts, assign, occ_ptr, occ_clause, occ_neg, best_assign):
    n = assign.shape[0]
    sat = 0
    for c in range(true_counts.shape[0]):
        if true_counts[c] > 0:
            sat += 1
    best = sat
    for j in range(n):
        best_assign[j] = assign[j]
    for idx in range(flips.shape[0]):
        v = flips[idx]
        old = assign[v]
        assign[v] = not old
        for p in range(occ_ptr[v], occ_ptr[v + 1]):
            c = occ_clause[p]
            # literal true after flip iff new value differs from negation flag
            now_true = assign[v] != (occ_neg[p] == 1)
            if now_true:
                true_counts[c] += 1
                if true_counts[c] == 1:
                    sat += 1
            else:
                true_counts[c] -= 1
                if true_counts[c] == 0:
                    sat -= 1
        if sat > best:
            best = sat
            for j in range(n):
                best_assign[j] = assign[j]
    return best


_walk = njit(cache=True)(_walk_py) if njit is not None else _walk_py


def random_walk_best(formula: CnfFormula, flips: int, seed: int) -> tuple[int, Assignment]:
    """Best exact count seen along `flips` uniform single-variable flips."""
    comp = compile_formula(formula)
    n, m = formula.num_variables, formula.num_clauses
    rng = np.random.default_rng(seed)
    assign = rng.random(n) < 0.5

    order = np.argsort(comp.lit_var, kind="stable")
    occ_clause = np.empty(len(order), dtype=np.int32)
    lit_clause = np.empty(len(comp.lit_var), dtype=np.int32)
    for c in range(m):
        lit_clause[comp.clause_ptr[c] : comp.clause_ptr[c + 1]] = c
    occ_clause = lit_clause[order]
    occ_neg = comp.lit_neg[order]
    occ_var_sorted = comp.lit_var[order]
    occ_ptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(occ_ptr, occ_var_sorted + 1, 1)
    occ_ptr = np.cumsum(occ_ptr).astype(np.int64)

    true_counts = np.zeros(m, dtype=np.int32)
    for c in range(m):
        lo, hi = comp.clause_ptr[c], comp.clause_ptr[c + 1]
        lits_true = assign[comp.lit_var[lo:hi]] != (comp.lit_neg[lo:hi] == 1)
        true_counts[c] = int(np.count_nonzero(lits_true))

    flip_vars = rng.integers(0, n, size=flips).astype(np.int64) if n else np.zeros(0, np.int64)
    best_assign = np.zeros(n, dtype=np.bool_)
    best = _walk(flip_vars, true_counts, assign, occ_ptr, occ_clause, occ_neg, best_assign)
    return int(best), tuple(bool(b) for b in best_assign)
