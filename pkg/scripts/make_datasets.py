#!/usr/bin/env python3
"""Regenerate the checked-in datasets under data/.

- data/paper_instances: the six desk-scale formulas with a best-known sidecar.
- data/uf20: the first ten oracle-verified satisfiable random 3-SAT instances
  at N=20, M=91 (generator seed order), stand-ins for the SATLIB uf20-91 suite.

Outputs are deterministic; running this script twice changes nothing.
"""

from __future__ import annotations

import argparse
from pathlib import Path

from oscmaxsat.cnf import brute_force_maxsat, generate_random_ksat, serialize_dimacs
from oscmaxsat.instances import P_NAMES, P_OPTIMA, paper_instance


def write_paper_instances(root: Path) -> None:
    out = root / "paper_instances"
    out.mkdir(parents=True, exist_ok=True)
    sidecar = []
    for name in P_NAMES:
        formula = paper_instance(name)
        (out / f"{name}.cnf").write_text(serialize_dimacs(formula), encoding="utf-8")
        sidecar.append(f"{name}.cnf {P_OPTIMA[name]}")
    (out / "best_known.txt").write_text("\n".join(sidecar) + "\n", encoding="utf-8")
    print(f"wrote {len(P_NAMES)} instances to {out}")


def write_uf20(root: Path, count: int = 10, n: int = 20, m: int = 91) -> None:
    out = root / "uf20"
    out.mkdir(parents=True, exist_ok=True)
    sidecar = []
    seed = 0
    found = 0
    while found < count:
        formula = generate_random_ksat(n, m, 3, seed=seed)
        best, _ = brute_force_maxsat(formula)
        if best == m:
            found += 1
            name = f"uf20-{found:02d}.cnf"
            (out / name).write_text(serialize_dimacs(formula), encoding="utf-8")
            sidecar.append(f"{name} {m}")
            print(f"{name}: generator seed {seed}, satisfiable")
        seed += 1
    (out / "best_known.txt").write_text("\n".join(sidecar) + "\n", encoding="utf-8")
    print(f"wrote {count} instances to {out}")


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--root", default=Path(__file__).resolve().parent.parent / "data")
    args = parser.parse_args()
    root = Path(args.root)
    write_paper_instances(root)
    write_uf20(root)


if __name__ == "__main__":
    main()
