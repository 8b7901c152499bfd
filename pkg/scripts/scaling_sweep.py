"""Energy and eigenfunction error against the Galerkin oracle over an alpha sweep.

    python3 scripts/scaling_sweep.py --m-max 3 --n-max 3 --out sweep.csv
"""
import argparse
import csv
import sys
from dataclasses import dataclass, field

from sphesusy import verify


@dataclass
class SweepConfig:
    m_max: int = 3
    n_max: int = 3
    alphas: tuple[float, ...] = field(default=verify.DEFAULT_ALPHAS)
    out: str | None = None


def run(cfg: SweepConfig) -> list[dict]:
    rows = []
    for m in range(cfg.m_max + 1):
        for n in range(cfg.n_max + 1):
            e = verify.eigenvalue_scaling(m, n, cfg.alphas)
            o = verify.overlap_scaling(m, n, cfg.alphas)
            rows.append({"m": m, "n": n, "energy_slope": e.fitted_slope,
                         "deficit_slope": o["deficit_slope"],
                         "residual_slope": o["residual_slope"],
                         "max_energy_err": max(e.errors)})
    return rows


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m-max", type=int, default=3)
    ap.add_argument("--n-max", type=int, default=3)
    ap.add_argument("--out", default=None)
    a = ap.parse_args(argv)
    rows = run(SweepConfig(a.m_max, a.n_max, out=a.out))
    fh = open(a.out, "w", newline="") if a.out else sys.stdout
    w = csv.DictWriter(fh, fieldnames=list(rows[0]))
    w.writeheader()
    for r in rows:
        w.writerow({k: (f"{v:.6g}" if isinstance(v, float) else v) for k, v in r.items()})
    if a.out:
        fh.close()


if __name__ == "__main__":
    main()
