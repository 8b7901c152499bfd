"""Comparison of the perturbative construction against the Legendre-Galerkin oracle.

Exact identity checks produce :class:`LedgerEntry` rows; numerical sweeps
produce :class:`ScalingReport` / :class:`OverlapReport`. `build_report`
assembles both into a deterministic, JSON-serializable dict.
"""
from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from . import oracle, susy
from .susy import ProblemParams

SCHEMA = 1
NOISE_FLOOR = 1e-13
DEFAULT_ALPHAS = (0.0125, 0.025, 0.05, 0.1, 0.2, 0.4)

# slope floors, a little under the asymptotic orders
SLOPE_FIRST_ORDER = 1.9
SLOPE_SECOND_ORDER = 2.8
SLOPE_OVERLAP = 3.0
SLOPE_RESIDUAL = 1.9


@dataclass
class LedgerEntry:
    name: str
    passed: bool
    checked: int
    counterexample: str | None = None
    detail: dict = field(default_factory=dict)


@dataclass
class ScalingReport:
    m: int
    n: int
    order: int
    alphas: list[float]
    errors: list[float]
    fitted_slope: float
    fitted_intercept: float
    oracle_values: list[float] = field(default_factory=list)

    def __post_init__(self):
        a = np.asarray(self.alphas)
        if np.any(a <= 0) or np.any(np.diff(a) <= 0):
            raise ValueError("alphas must be positive and strictly increasing")
        if np.any(np.asarray(self.errors) < 0):
            raise ValueError("errors must be non-negative")


@dataclass
class OverlapReport:
    m: int
    n: int
    alpha: float
    overlap_deficit: float
    ode_residual: float


def fit_loglog(xs, ys, floor: float = NOISE_FLOOR) -> tuple[float, float]:
    """Least-squares slope and intercept of log(y) against log(x), y >= floor."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    keep = ys >= floor
    if keep.sum() < 2:
        return float("nan"), float("nan")
    slope, intercept = np.polyfit(np.log(xs[keep]), np.log(ys[keep]), 1)
    return float(slope), float(intercept)


# --------------------------------------------------------------------------
# numerical comparisons

def oracle_level(m: int, n: int, alpha: float) -> oracle.SpectralSolution:
    """The oracle state paired with level n: index n after sorting at fixed m."""
    sols = oracle.converge(m, alpha, n + 2)
    # no-crossing certificate: parities alternate and every level moved by
    # less than half its distance to the neighbouring alpha=0 level
    for i, s in enumerate(sols):
        l = m + i
        if s.parity != i % 2 or abs(s.eigenvalue - l * (l + 1)) >= l + 1:
            raise ArithmeticError(f"cannot pair level {i} by index at m={m}, alpha={alpha}")
    return sols[n]


def eigenvalue_scaling(m: int, n: int, alphas=DEFAULT_ALPHAS, order: int = 1) -> ScalingReport:
    alphas = [float(a) for a in alphas]
    if any(not 0 < a <= 0.5 for a in alphas):
        raise ValueError("alphas must lie in (0, 0.5]")
    E = susy.energy_level(ProblemParams(m, order=order), n)
    ref = [oracle_level(m, n, a).eigenvalue for a in alphas]
    errors = [abs(E(a) - r) for a, r in zip(alphas, ref)]
    slope, intercept = fit_loglog(alphas, errors)
    return ScalingReport(m, n, order, alphas, errors, slope, intercept, ref)


def eigenfunction_overlap(m: int, n: int, alpha: float, nodes: int = 512,
                          state: susy.Eigenstate | None = None) -> OverlapReport:
    if state is None:
        state = susy.excited_state(ProblemParams(m, alpha), n)
    sol = oracle_level(m, n, alpha)
    th, w = susy.gauss_theta(nodes)
    pert = state.wavefunction.evaluate(th, alpha)
    ref = oracle.eigenfunction_eval(sol, th)
    pert = pert / np.sqrt(np.dot(w, pert * pert))
    ref = ref / np.sqrt(np.dot(w, ref * ref))
    # sign alignment at the largest lobe of the oracle function
    i = int(np.argmax(np.abs(ref)))
    if pert[i] * ref[i] < 0:
        pert = -pert
    ov = float(np.dot(w, pert * ref))
    deficit = min(max(1.0 - ov * ov, 0.0), 1.0)
    r = susy.hamiltonian_residual(state)
    rv = r.evaluate(th, alpha)
    pv = state.wavefunction.evaluate(th, alpha)
    resid = float(np.sqrt(np.dot(w, rv * rv)) / np.sqrt(np.dot(w, pv * pv)))
    return OverlapReport(m, n, float(alpha), deficit, resid)


def overlap_scaling(m: int, n: int, alphas=DEFAULT_ALPHAS, nodes: int = 512) -> dict:
    state = susy.excited_state(ProblemParams(m), n)
    reps = [eigenfunction_overlap(m, n, a, nodes, state) for a in alphas]
    d_slope, _ = fit_loglog(alphas, [r.overlap_deficit for r in reps])
    r_slope, _ = fit_loglog(alphas, [r.ode_residual for r in reps])
    return {"m": m, "n": n, "reports": reps, "deficit_slope": d_slope, "residual_slope": r_slope}


# --------------------------------------------------------------------------
# exact identities

def _mutated_b_step(m, A):
    return ((2 * m + 1) * A - 1) / ((2 * m + 1) * A + 4)


def identity_suite(m_max: int = 10, n_max: int = 50, riccati_m_max: int | None = None,
                   mutation: str | None = None) -> list[LedgerEntry]:
    """Exact-arithmetic checks of the superpotential and recursion identities.

    ``mutation="b-numerator"`` swaps in a deliberately wrong B recursion; the
    B identities must then fail.
    """
    b_step = susy._b_step
    if mutation == "b-numerator":
        b_step = _mutated_b_step
    elif mutation is not None:
        raise ValueError(f"unknown mutation {mutation!r}")
    if riccati_m_max is None:
        riccati_m_max = m_max
    ledger = []

    # Riccati closure at orders 0, 1, 2
    fail, count, derived = None, 0, {}
    for m in range(riccati_m_max + 1):
        p = ProblemParams(m, order=2)
        r = susy.riccati_residual(p, susy.ground_energy(p))
        count += 1
        if not r.is_zero() and fail is None:
            fail = f"m={m}"
        derived[str(m)] = str(susy.derive_ground_energy(p).coeffs[2]) if r.is_zero() else None
    ledger.append(LedgerEntry("riccati_closure", fail is None, count, fail,
                              {"E02": derived}))

    # ground state is annihilated by d/dtheta + W at every retained order
    fail, count = None, 0
    for m in range(riccati_m_max + 1):
        p = ProblemParams(m, order=2)
        W = susy.superpotential_series(p)
        psi = susy.ground_state(p).wavefunction
        count += 1
        if not (psi.diff() + W * psi).is_zero() and fail is None:
            fail = f"m={m}"
    ledger.append(LedgerEntry("ground_state_annihilated", fail is None, count, fail))

    fails = {"b_closed_form": None, "b_sum": None, "shape_invariance": None, "energy_forms": None}
    counts = dict.fromkeys(fails, 0)
    for m in range(m_max + 1):
        seq = susy.ladder_sequence(m, n_max + 1, b_step=b_step)
        partial = Fraction(0)
        for n in range(n_max + 1):
            counts["b_closed_form"] += 1
            if seq[n].B != susy.b_closed_form(m, n) and fails["b_closed_form"] is None:
                fails["b_closed_form"] = f"m={m}, n={n}"
            if n >= 1:
                partial += seq[n - 1].B
                counts["b_sum"] += 1
                if partial != susy.b_sum_closed_form(m, n, seq[n].B) and fails["b_sum"] is None:
                    fails["b_sum"] = f"m={m}, n={n}"
            if mutation is None:
                counts["energy_forms"] += 1
                a = susy.energy_level_bsum(ProblemParams(m), n)
                b = susy.energy_level_lform(m, n)
                if a != b and fails["energy_forms"] is None:
                    fails["energy_forms"] = f"m={m}, n={n}"
        # V+(A_k,B_k) = V-(A_{k+1},B_{k+1}) + R_k, symbolically (kept small: forms grow)
        for k in range(1, min(n_max, 6) + 1):
            counts["shape_invariance"] += 1
            plus = susy.partner_potential(ProblemParams(m), seq[k - 1], +1)
            minus = susy.partner_potential(ProblemParams(m), seq[k], -1)
            R = susy.remainder(m, seq[k - 1], seq[k]).as_trigform(1)
            if not (plus - minus - R).is_zero() and fails["shape_invariance"] is None:
                fails["shape_invariance"] = f"m={m}, k={k}"
    for name in ("b_closed_form", "b_sum", "shape_invariance", "energy_forms"):
        if name == "energy_forms" and mutation is not None:
            continue
        ledger.append(LedgerEntry(name, fails[name] is None, counts[name], fails[name]))
    return ledger


def legendre_reduction(m_max: int = 5, n_max: int = 5) -> list[LedgerEntry]:
    """alpha^0 part of each ladder state against sin^(1/2) P_{m+n}^m."""
    out = []
    for m in range(m_max + 1):
        for n in range(n_max + 1):
            st = susy.excited_state(ProblemParams(m), n)
            psi0 = st.wavefunction.coefficient(0)
            ref = oracle.legendre_trigform(m, m + n)
            ratio = _rational_ratio(psi0, ref)
            ok = ratio is not None and ratio != 0 and st.energy.coeffs[0] == (m + n) * (m + n + 1)
            out.append(LedgerEntry(f"legendre_reduction[m={m},n={n}]", ok, 1,
                                   None if ok else f"m={m}, n={n}",
                                   {"ratio": None if ratio is None else str(ratio)}))
    return out


def _rational_ratio(a, b) -> Fraction | None:
    """r with a == r * b exactly, or None."""
    if b.is_zero():
        return None
    if a.twice_exponent != b.twice_exponent:
        return None
    pa, pb = a.poly.terms[0], b.poly.terms[0]
    lead = len(pb.coeffs) - 1
    if len(pa.coeffs) != len(pb.coeffs):
        return None
    r = pa.coeffs[lead] / pb.coeffs[lead]
    return r if (a - b * r).is_zero() else None


def mutation_detected(m_max: int = 2, n_max: int = 3) -> bool:
    return not all(e.passed for e in identity_suite(m_max, n_max, mutation="b-numerator"))


# --------------------------------------------------------------------------
# report assembly

@dataclass
class VerifyConfig:
    m_max: int | None = None
    n_max: int | None = None
    alphas: tuple[float, ...] = DEFAULT_ALPHAS
    mutation: str | None = None
    workers: int = 1

    def bounds(self, section: str) -> tuple[int, int]:
        """(m_max, n_max) for a report section; explicit bounds cap the defaults."""
        dm, dn = {"identity": (10, 50), "legendre": (5, 5), "sweep": (3, 3)}[section]
        if section == "identity":
            return (dm if self.m_max is None else self.m_max,
                    dn if self.n_max is None else self.n_max)
        return (dm if self.m_max is None else min(self.m_max, dm),
                dn if self.n_max is None else min(self.n_max, dn))


def _sweep_cell(args):
    m, n, alphas = args
    first = eigenvalue_scaling(m, n, alphas, order=1)
    second = eigenvalue_scaling(m, 0, alphas, order=2) if n == 0 else None
    ov = overlap_scaling(m, n, alphas)
    anchor = eigenfunction_overlap(m, n, 0.0).overlap_deficit
    e0 = abs(susy.energy_level(ProblemParams(m), n)(0.0) - oracle_level(m, n, 0.0).eigenvalue)
    return m, n, first, second, ov, anchor, e0


def build_report(cfg: VerifyConfig) -> dict:
    im, in_ = cfg.bounds("identity")
    lm, ln = cfg.bounds("legendre")
    sm, sn = cfg.bounds("sweep")
    alphas = tuple(float(a) for a in cfg.alphas)

    checks = []
    for e in identity_suite(im, in_, riccati_m_max=max(im, 20) if cfg.m_max is None else im,
                            mutation=cfg.mutation):
        checks.append({"section": "identity", **asdict(e)})
    for e in legendre_reduction(lm, ln):
        checks.append({"section": "legendre", **asdict(e)})

    cells = [(m, n, alphas) for m in range(sm + 1) for n in range(sn + 1)]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            results = list(ex.map(_sweep_cell, cells))
    else:
        results = [_sweep_cell(c) for c in cells]
    results.sort(key=lambda r: (r[0], r[1]))

    rows = []
    for m, n, first, second, ov, anchor, e0 in results:
        checks.append({"section": "scaling", "name": f"eigenvalue_slope[m={m},n={n},order=1]",
                       "passed": first.fitted_slope >= SLOPE_FIRST_ORDER, "checked": len(alphas),
                       "counterexample": None, "detail": {"slope": first.fitted_slope}})
        checks.append({"section": "scaling", "name": f"alpha0_anchor[m={m},n={n}]",
                       "passed": e0 < 1e-12 and anchor < 1e-10, "checked": 1,
                       "counterexample": None, "detail": {"energy_error": e0, "deficit": anchor}})
        if second is not None:
            checks.append({"section": "scaling", "name": f"eigenvalue_slope[m={m},n=0,order=2]",
                           "passed": second.fitted_slope >= SLOPE_SECOND_ORDER,
                           "checked": len(alphas), "counterexample": None,
                           "detail": {"slope": second.fitted_slope}})
        checks.append({"section": "overlap", "name": f"deficit_slope[m={m},n={n}]",
                       "passed": ov["deficit_slope"] >= SLOPE_OVERLAP, "checked": len(alphas),
                       "counterexample": None, "detail": {"slope": ov["deficit_slope"]}})
        checks.append({"section": "overlap", "name": f"residual_slope[m={m},n={n}]",
                       "passed": ov["residual_slope"] >= SLOPE_RESIDUAL, "checked": len(alphas),
                       "counterexample": None, "detail": {"slope": ov["residual_slope"]}})
        for i, a in enumerate(alphas):
            row = {"m": m, "n": n, "alpha": a,
                   "E_pert": susy.energy_level(ProblemParams(m), n)(a),
                   "E_oracle": first.oracle_values[i], "abs_err": first.errors[i],
                   "E_pert2": None, "abs_err2": None,
                   "overlap_deficit": ov["reports"][i].overlap_deficit,
                   "ode_residual": ov["reports"][i].ode_residual}
            if second is not None:
                row["E_pert2"] = susy.energy_level(ProblemParams(m, order=2), 0)(a)
                row["abs_err2"] = second.errors[i]
            rows.append(row)

    return {
        "schema": SCHEMA,
        "config": {"m_max": cfg.m_max, "n_max": cfg.n_max, "alphas": list(alphas),
                   "mutation": cfg.mutation},
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
        "table": rows,
    }


def _clean(obj):
    if isinstance(obj, float):
        return float(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def report_json(report: dict) -> str:
    return json.dumps(_clean(report), indent=2, sort_keys=True) + "\n"


REPORT_COLUMNS = ["m", "n", "alpha", "E_pert", "E_oracle", "abs_err", "E_pert2", "abs_err2",
                  "overlap_deficit", "ode_residual"]


def report_csv(report: dict) -> str:
    buf = io.StringIO()
    wr = csv.DictWriter(buf, REPORT_COLUMNS, lineterminator="\r\n")
    wr.writeheader()
    for row in report["table"]:
        wr.writerow({k: ("" if row[k] is None else repr(float(row[k])) if isinstance(row[k], float)
                         else row[k]) for k in REPORT_COLUMNS})
    return buf.getvalue()


def write_report(report: dict, outdir: str) -> list[str]:
    os.makedirs(outdir, exist_ok=True)
    paths = []
    for name, text in (("report.json", report_json(report)), ("report.csv", report_csv(report))):
        path = os.path.join(outdir, name)
        with open(path, "w", newline="") as fh:
            fh.write(text)
        paths.append(path)
    return paths
