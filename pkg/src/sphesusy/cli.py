"""Command-line entry point.

    sphesusy energy --m 0 --n 1 --alpha 0.1
    sphesusy state  --m 0 --n 2 --format json
    sphesusy ladder --m 0 --n 2 --alpha 0.1
    sphesusy oracle --m 1 --n 3 --alpha 0.0125:0.4:geometric:6 --format csv
    sphesusy verify --output out/

Exit codes: 0 success, 1 verification failure, 2 usage error,
3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import oracle, susy, verify
from .susy import ProblemParams
from .tridiag import ConvergenceError

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NOCONV = 0, 1, 2, 3


class UsageError(Exception):
    pass


def parse_alpha(spec: str) -> list[float]:
    """``0.1``, ``0.1,0.2`` or ``start:stop:geometric|linear:count``."""
    spec = spec.strip()
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 4:
            raise UsageError(f"bad sweep spec {spec!r}; expected start:stop:kind:count")
        start, stop, kind, count = float(parts[0]), float(parts[1]), parts[2], int(parts[3])
        if count < 1:
            raise UsageError("sweep count must be positive")
        if kind == "geometric":
            if start <= 0 or stop <= 0:
                raise UsageError("geometric sweeps need positive endpoints")
            vals = np.geomspace(start, stop, count)
        elif kind == "linear":
            vals = np.linspace(start, stop, count)
        else:
            raise UsageError(f"unknown sweep kind {kind!r}")
        return [float(v) for v in vals]
    try:
        return [float(v) for v in spec.split(",")]
    except ValueError:
        raise UsageError(f"bad alpha value {spec!r}") from None


@dataclass
class RunConfig:
    command: str
    m: int = 0
    n: int = 0
    alpha: tuple[float, ...] = (0.0,)
    order: int = 1
    format: str = "text"
    convention: str = "paper"
    output: str | None = None
    samples: int = 181
    m_max: int | None = None
    n_max: int | None = None
    mutate: str | None = None

    def validate(self):
        if self.m < 0:
            raise UsageError("--m must be non-negative")
        if self.n < 0:
            raise UsageError("--n must be non-negative")
        if self.order not in (1, 2):
            raise UsageError("--order must be 1 or 2")
        if self.order == 2 and self.n != 0 and self.command in ("energy", "state"):
            raise UsageError("--order 2 is only available for the ground state (n = 0)")
        if self.command == "state" and len(self.alpha) != 1:
            raise UsageError("state takes a single alpha, not a sweep")
        if self.samples < 1:
            raise UsageError("--samples must be positive")
        if self.command == "verify" and self.format not in ("text", "json", "csv"):
            raise UsageError(f"unknown format {self.format!r}")

    @property
    def paper_alphas(self) -> list[float]:
        if self.convention == "flammer":
            return [oracle.flammer_to_paper(a) for a in self.alpha]
        return list(self.alpha)

    @property
    def alpha_label(self) -> str:
        return "c2" if self.convention == "flammer" else "alpha"


def read_config_file(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment. Keys mirror long flags."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = (x.strip() for x in line.split("=", 1))
            out[key.replace("-", "_")] = value
    return out


def _fmt(x: float) -> str:
    return repr(float(x))


def _csv(rows, header) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# --------------------------------------------------------------------------
# commands

def cmd_energy(cfg: RunConfig) -> tuple[str, int]:
    params = ProblemParams(cfg.m, order=cfg.order)
    E = susy.energy_level(params, cfg.n)
    alphas = cfg.paper_alphas
    if cfg.format == "json":
        obj = {"m": cfg.m, "n": cfg.n, "order": cfg.order, "convention": cfg.convention,
               "energy": E.strings(),
               "values": [{cfg.alpha_label: a_in, "E": E(a)}
                          for a_in, a in zip(cfg.alpha, alphas)]}
        return json.dumps(obj, indent=2) + "\n", EXIT_OK
    if cfg.format == "csv":
        rows = []
        for a_in, a in zip(cfg.alpha, alphas):
            ref = verify.oracle_level(cfg.m, cfg.n, a).eigenvalue
            rows.append([cfg.m, cfg.n, _fmt(a_in), _fmt(E(a)), _fmt(ref), _fmt(abs(E(a) - ref))])
        return _csv(rows, ["m", "n", cfg.alpha_label, "E_pert", "E_oracle", "abs_err"]), EXIT_OK
    terms = " + ".join(f"({c})·α^{k}" if k else f"({c})" for k, c in enumerate(E.coeffs))
    lines = [f"m={cfg.m} n={cfg.n} order={cfg.order}  E = {terms}"]
    for a_in, a in zip(cfg.alpha, alphas):
        lines.append(f"{cfg.alpha_label}={a_in:<10g} E={E(a):.12g}")
    return "\n".join(lines) + "\n", EXIT_OK


def cmd_state(cfg: RunConfig) -> tuple[str, int]:
    alpha = cfg.paper_alphas[0]
    st = susy.excited_state(ProblemParams(cfg.m, alpha, cfg.order), cfg.n)
    psi = st.wavefunction
    if cfg.format == "text":
        shown = 0 if alpha == 0.0 else None
        return psi.to_str(max_order=shown) + "\n", EXIT_OK
    th = np.linspace(0.0, np.pi, cfg.samples + 2)[1:-1]
    vals = psi.evaluate(th, alpha)
    scale = susy.normalize(st, alpha)
    if cfg.format == "csv":
        rows = [[_fmt(t), _fmt(v), _fmt(v * scale)] for t, v in zip(th, vals)]
        return _csv(rows, ["theta", "psi", "psi_normalized"]), EXIT_OK
    obj = st.to_json()
    obj.update({"alpha": alpha, "normalization": scale,
                "samples": {"theta": [float(t) for t in th], "psi": [float(v) for v in vals]}})
    return json.dumps(obj, indent=2) + "\n", EXIT_OK


def cmd_ladder(cfg: RunConfig) -> tuple[str, int]:
    seq = susy.ladder_sequence(cfg.m, cfg.n + 1)
    rows = []
    for k in range(cfg.n + 1):
        R = susy.remainder(cfg.m, seq[k], seq[k + 1])
        rows.append({"k": seq[k].k, "A": str(seq[k].A), "B": str(seq[k].B),
                     "R": [str(c) for c in R.coeffs],
                     "R_values": [R(a) for a in cfg.paper_alphas]})
    if cfg.format == "json":
        return json.dumps({"m": cfg.m, "rows": rows}, indent=2) + "\n", EXIT_OK
    if cfg.format == "csv":
        out = []
        for r in rows:
            for a_in, v in zip(cfg.alpha, r["R_values"]):
                out.append([cfg.m, r["k"], r["A"], r["B"], r["R"][0], r["R"][1], _fmt(a_in), _fmt(v)])
        return _csv(out, ["m", "k", "A", "B", "R0", "R1", cfg.alpha_label, "R"]), EXIT_OK
    lines = [f"{'k':>3} {'A_k':>10} {'B_k':>14} {'R_k':>28}"]
    for r in rows:
        rk = f"{r['R'][0]} + ({r['R'][1]})·α"
        lines.append(f"{r['k']:>3} {r['A']:>10} {r['B']:>14} {rk:>28}")
    return "\n".join(lines) + "\n", EXIT_OK


def cmd_oracle(cfg: RunConfig) -> tuple[str, int]:
    rows = []
    for a_in, a in zip(cfg.alpha, cfg.paper_alphas):
        sols = oracle.converge(cfg.m, a, cfg.n + 1)
        for i, s in enumerate(sols):
            rows.append([cfg.m, i, a_in, s.eigenvalue, s.l_max, s.residual_estimate])
    header = ["m", "n", cfg.alpha_label, "eigenvalue", "l_max", "residual"]
    if cfg.format == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n", EXIT_OK
    if cfg.format == "csv":
        return _csv([[r[0], r[1], _fmt(r[2]), _fmt(r[3]), r[4], _fmt(r[5])] for r in rows],
                    header), EXIT_OK
    lines = [f"m={r[0]} n={r[1]} {cfg.alpha_label}={r[2]:g} E={r[3]:.15g} l_max={r[4]} "
             f"residual={r[5]:.2e}" for r in rows]
    return "\n".join(lines) + "\n", EXIT_OK


def _workers() -> int:
    try:
        return max(1, int(os.environ.get("SPHESUSY_THREADS", "1")))
    except ValueError:
        return 1


def cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    alphas = tuple(cfg.paper_alphas) if cfg.alpha != (0.0,) else verify.DEFAULT_ALPHAS
    vc = verify.VerifyConfig(cfg.m_max, cfg.n_max, alphas, cfg.mutate, _workers())
    started = time.time()
    report = verify.build_report(vc)
    outdir = cfg.output or "."
    verify.write_report(report, outdir)
    meta = {"argv": sys.argv[1:], "started": started, "elapsed_s": time.time() - started}
    with open(os.path.join(outdir, "report.meta.json"), "w") as fh:
        json.dump(meta, fh, indent=2)
    failed = [c["name"] for c in report["checks"] if not c["passed"]]
    lines = [f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']}" for c in report["checks"]]
    lines.append(f"{len(report['checks']) - len(failed)}/{len(report['checks'])} checks passed")
    return "\n".join(lines) + "\n", EXIT_OK if not failed else EXIT_FAIL


COMMANDS = {"energy": cmd_energy, "state": cmd_state, "ladder": cmd_ladder,
            "oracle": cmd_oracle, "verify": cmd_verify}


# --------------------------------------------------------------------------
# argument parsing

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--m", type=int, default=0)
    common.add_argument("--n", type=int, default=0)
    common.add_argument("--alpha", default="0", help="value, comma list, or start:stop:kind:count")
    common.add_argument("--order", type=int, default=1, choices=(1, 2))
    common.add_argument("--format", default="text", choices=("text", "json", "csv"))
    common.add_argument("--convention", default="paper", choices=("paper", "flammer"),
                        help="flammer: --alpha is c^2 of lambda - c^2 x^2")
    common.add_argument("--output", default=None, help="file (or directory for verify)")
    common.add_argument("--config", default=None, help="key=value file mirroring the flags")

    p = _Parser(prog="sphesusy", description="SUSY perturbation theory for spheroidal functions")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("energy", parents=[common], help="perturbative eigenvalues")
    st = sub.add_parser("state", parents=[common], help="symbolic + sampled eigenfunction")
    st.add_argument("--samples", type=int, default=181)
    sub.add_parser("ladder", parents=[common], help="shape-invariance parameters A_k, B_k, R_k")
    sub.add_parser("oracle", parents=[common], help="Legendre-Galerkin eigenvalues")
    ve = sub.add_parser("verify", parents=[common], help="full verification report")
    ve.add_argument("--m-max", type=int, default=None)
    ve.add_argument("--n-max", type=int, default=None)
    ve.add_argument("--mutate", default=None, choices=("b-numerator",), help=argparse.SUPPRESS)
    return p


def parse_config(argv) -> RunConfig:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            values = read_config_file(args.config)
        except OSError as exc:
            raise UsageError(f"cannot read config: {exc}") from None
        sub = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest for a in sub._actions}
        unknown = set(values) - known
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        sub.set_defaults(**values)
        args = parser.parse_args(argv)
    kw = {k: v for k, v in vars(args).items() if k not in ("config",)}
    kw["alpha"] = tuple(parse_alpha(str(kw["alpha"])))
    cfg = RunConfig(**kw)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"sphesusy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text, code = COMMANDS[cfg.command](cfg)
    except ConvergenceError as exc:
        print(f"sphesusy: non-convergence: {exc} (block={exc.block})", file=sys.stderr)
        return EXIT_NOCONV
    except (ValueError, ArithmeticError) as exc:
        print(f"sphesusy: error: {exc}", file=sys.stderr)
        return EXIT_USAGE if isinstance(exc, ValueError) else EXIT_NOCONV
    if cfg.output and cfg.command != "verify":
        with open(cfg.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
