"""The six desk-scale benchmark formulas P1-P6 with known optima.

P1-P3 are unsatisfiable, P4-P6 satisfiable. The published clause list for P6
contains nine clauses while its reported size and optimum are M=10 and 10/10;
the tenth clause here is the unit clause (x1), which is true in every
satisfying assignment of the other nine, so the optimum set is unchanged.
"""

from __future__ import annotations

from .cnf import CnfFormula

P_CLAUSES: dict[str, tuple[int, tuple[tuple[int, ...], ...]]] = {
    "p1": (2, ((1, 2), (1, -2), (-1, 2), (-1, -2))),
    "p2": (4, ((1, 2, 4), (1, -3), (1, -4), (-1, 3, 4), (-4,), (-1, 4), (1,))),
    "p3": (6, ((2, 5, 6), (-4, -5, -6), (-1, -3), (2, -6), (-2, 5), (1, 3), (3,), (1, -3))),
    "p4": (4, ((1, -3, 4), (-1, 2, 3, 4), (2, 3), (-2,), (-4,), (1, 4), (3, -4), (2, -4))),
    "p5": (6, ((1, 5, -6), (2, 3), (-2, -4, 5), (-4, 6), (-1, -5), (-3, 4, 5), (2, -3, 6), (2, -5))),
    "p6": (6, ((-1, 2, 4), (1, 3, 5), (2, -3, 6), (-2, 6), (1, -6), (3, -5, 6), (-3, -4), (-4, -6), (-5, -6), (1,))),
}

# Known optimal satisfied-clause counts (exhaustively verified in the tests).
P_OPTIMA: dict[str, int] = {"p1": 3, "p2": 6, "p3": 7, "p4": 8, "p5": 8, "p6": 10}

P_NAMES = tuple(sorted(P_CLAUSES))


def paper_instance(name: str) -> CnfFormula:
    n, clauses = P_CLAUSES[name]
    return CnfFormula.from_ints(n, clauses)


def all_paper_instances() -> dict[str, CnfFormula]:
    return {name: paper_instance(name) for name in P_NAMES}
