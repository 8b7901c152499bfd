"""Exact first-order energies E_n = E^(0) + alpha E^(1) as a table of rationals."""
import argparse
from dataclasses import dataclass

from sphesusy import ProblemParams, energy_level


@dataclass
class TableConfig:
    m_max: int = 4
    n_max: int = 6


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--m-max", type=int, default=TableConfig.m_max)
    ap.add_argument("--n-max", type=int, default=TableConfig.n_max)
    cfg = TableConfig(**{k: v for k, v in vars(ap.parse_args(argv)).items()})
    print(f"{'m':>3} {'n':>3} {'E0':>6}  E1")
    for m in range(cfg.m_max + 1):
        for n in range(cfg.n_max + 1):
            c = energy_level(ProblemParams(m), n).coeffs
            print(f"{m:>3} {n:>3} {str(c[0]):>6}  {c[1]}")


if __name__ == "__main__":
    main()
