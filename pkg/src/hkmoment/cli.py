"""Command line: ``python -m hkmoment {verify,report,gram,plot}``.

Exit codes: 0 when every check passes, 1 when any check fails, 2 for usage
errors and malformed spec files.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import calabi as cb
from . import conformality as cf
from . import fd
from . import gibbons as gh
from . import moment as mm
from .matkit import GeometryError, matrix_to_json
from .report import jsonable
from .suites import SUITES, SuiteConfig, build_report, check_seed, run

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _common(p: argparse.ArgumentParser):
    p.add_argument("--n", type=int, default=None, help="complex dimension of CP^n (default 1, or n from --spec)")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--step", type=float, default=None,
                   help="first-derivative step (default 1e-4; Laplacian and Stokes steps keep their defaults)")
    p.add_argument("--tol", type=float, default=None, help="override every finite-difference tolerance")
    p.add_argument("--spec", type=Path, default=None, help="Killing spec or action spec (JSON)")
    p.add_argument("--a", type=float, default=None, help="Gibbons-Hawking parameter (default: 0.5, 1, 2)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hkmoment", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run one suite")
    p.add_argument("suite", choices=SUITES)
    _common(p)
    p.add_argument("--out", type=Path, default=None, help="also write the JSON report here")
    p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("report", help="run suites and write a JSON report")
    _common(p)
    p.add_argument("--suites", default=",".join(SUITES), help="comma-separated subset")
    p.add_argument("--out", type=Path, default=None, help="report path (default: stdout)")

    p = sub.add_parser("gram", help="proportionality test for a torus action on CP^n")
    _common(p)
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("plot", help="write convergence tables and a dilation slice as CSV")
    _common(p)
    p.add_argument("--suites", default="moment,gibbons,calabi")
    p.add_argument("--out", type=Path, default=Path("plot-data"))
    return parser


def load_spec(path: Path | None) -> tuple[dict | None, dict | None, int | None]:
    """Return ``(killing_spec, action_spec, n)`` from a JSON file."""
    if path is None:
        return None, None, None
    try:
        obj = json.loads(Path(path).read_text())
    except OSError as exc:
        raise UsageError(f"cannot read spec {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"spec {path}: invalid JSON ({exc.msg} at line {exc.lineno})") from None
    if not isinstance(obj, dict):
        raise UsageError(f"spec {path}: expected a JSON object")
    try:
        if "generators" in obj:
            spec = cf.ActionSpec.from_json(obj)
            return None, obj, spec.n
        n, _ = mm.parse_killing_spec(obj)
        return obj, None, n
    except GeometryError as exc:
        raise UsageError(f"spec {path}: {exc}") from None


def make_config(args, suites) -> SuiteConfig:
    killing, action, spec_n = load_spec(args.spec)
    n = args.n if args.n is not None else (spec_n or 1)
    if spec_n is not None and spec_n != n:
        raise UsageError(f"--n {n} disagrees with the spec's n = {spec_n}")
    try:
        return SuiteConfig(n=n, samples=args.samples, seed=args.seed, step=args.step, tol=args.tol,
                           suites=tuple(suites), killing_spec=killing, action_spec=action, gh_a=args.a)
    except GeometryError as exc:
        raise UsageError(str(exc)) from None


def _suites_arg(text: str) -> list[str]:
    return [s.strip() for s in text.split(",") if s.strip()]


def _write_json(obj, path: Path | None):
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def cmd_run(args, suites, echo: bool) -> int:
    cfg = make_config(args, suites)
    reports = run(cfg)
    if echo:
        for r in reports:
            print(r.line())
    doc = build_report(cfg, reports, _timestamp())
    if args.out is not None or not echo:
        _write_json(doc, args.out)
    failed = [r.name for r in reports if not r.passed]
    if failed:
        print(f"{len(failed)} of {len(reports)} checks failed: {', '.join(failed)}", file=sys.stderr)
        return EXIT_FAIL
    return EXIT_OK


def cmd_gram(args) -> int:
    _, action, spec_n = load_spec(args.spec)
    if args.spec is not None and action is None:
        raise UsageError("gram needs an action spec with 'generators'")
    n = args.n if args.n is not None else (spec_n or 2)
    if args.samples < 1:
        raise UsageError("samples must be >= 1")
    spec = cf.ActionSpec.from_json(action) if action else cf.standard_torus(n)
    tol = 1e-8 if args.tol is None else args.tol
    seed = check_seed(args.seed, "gram")
    res = cf.proportionality_test(cf.sample_grams(spec, args.samples, seed), tol)
    out = {"spec": spec.to_json(), "samples": args.samples, "seed": args.seed, "tol": tol,
           "verdict": res.verdict, "distance": res.distance}
    if res.h is not None:
        out["h"] = res.h.tolist()
    if res.witness is not None:
        i, j, Pi, Pj = res.witness
        out["witness"] = {"indices": [i, j], "points": [matrix_to_json(Pi), matrix_to_json(Pj)]}
    verdict = {True: "proportional", False: "not proportional", None: "indeterminate"}[res.verdict]
    print(f"verdict: {verdict} (k={spec.k}, samples={args.samples}, distance={res.distance:.3e})",
          file=sys.stderr)
    _write_json(jsonable(out), args.out)
    return EXIT_OK if res.verdict is not None else EXIT_FAIL


# --- plot data --------------------------------------------------------------


def _write_csv(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([f"{v:.17g}" if isinstance(v, float) else v for v in row])


def emit_plot_data(cfg: SuiteConfig, outdir: Path) -> list[Path]:
    written = []
    if "moment" in cfg.suites:
        rng = np.random.default_rng(check_seed(cfg.seed, "plot.moment"))
        from .suites import killing_u

        u = killing_u(cfg, rng)
        P = mm.sample_points(cfg.n, 1, rng)[0]
        steps = [1e-2 / 2**k for k in range(6)]
        rows = []
        for h in steps:
            r = mm.hamiltonian_residuals(u, P, h)
            rows.append((h, float(np.linalg.norm(r)), math.log10(h), math.log10(float(np.linalg.norm(r)))))
        path = outdir / "hamiltonian_convergence.csv"
        _write_csv(path, ["step", "residual", "log10_step", "log10_residual"], rows)
        written.append(path)

        f = lambda Q: mm.moment_array(u, Q)
        gn = mm.harmonic_morphism_at(u, P)["grad_norms"]
        lsteps = [4e-2 / 2**k for k in range(5)]
        Ls = mm.laplacian_sequence(P, f, lsteps[0], levels=len(lsteps))
        rows = [(h, float(np.max(np.abs(L) / gn)), math.log10(h), math.log10(float(np.max(np.abs(L) / gn))))
                for h, L in zip(lsteps, Ls)]
        path = outdir / "laplacian_convergence.csv"
        _write_csv(path, ["step", "residual", "log10_step", "log10_residual"], rows)
        written.append(path)

        rows = []
        X0 = P.X / cb.pj.fs_norm(P.X)
        for s in np.linspace(0.0, 2.0, 21):
            Q = cb.make_point(P.A, s * X0)
            rows.append((float(s), mm.harmonic_morphism_at(u, Q)["lambda2"]))
        path = outdir / "lambda2_slice.csv"
        _write_csv(path, ["fibre_norm", "lambda2"], rows)
        written.append(path)

    if "gibbons" in cfg.suites:
        a = cfg.gh_a or 1.0
        x = gh.sample_ball(1, check_seed(cfg.seed, "plot.gibbons"))[0]
        setup = gh.gh_setup(a)
        steps = [4e-2 / 2**k for k in range(6)]
        Ls = [gh.laplacian_at(setup, gh.probe, x, h, richardson=False) for h in steps]
        ref = float(fd.richardson(Ls[-2], Ls[-1]))
        rows = [(h, abs(L - ref), math.log10(h), math.log10(max(abs(L - ref), 1e-300))) for h, L in zip(steps[:-2], Ls)]
        path = outdir / "gibbons_laplacian_convergence.csv"
        _write_csv(path, ["step", "error", "log10_step", "log10_error"], rows)
        written.append(path)

    if "calabi" in cfg.suites:
        rng = np.random.default_rng(check_seed(cfg.seed, "plot.calabi"))
        P = cb.random_tb_point(cfg.n, rng, scale=1.0)
        triples = [(0, 1, 2)]
        rows = []
        for h in (4e-2, 2e-2, 1e-2, 5e-3):
            e = max(cb.stokes_domega(P, h, triples).values())
            rows.append((h, e, math.log10(h), math.log10(e)))
        path = outdir / "stokes_convergence.csv"
        _write_csv(path, ["step", "residual", "log10_step", "log10_residual"], rows)
        written.append(path)
    return written


def cmd_plot(args) -> int:
    cfg = make_config(args, _suites_arg(args.suites))
    for p in emit_plot_data(cfg, args.out):
        print(p)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        if args.command == "verify":
            return cmd_run(args, [args.suite], echo=not args.quiet)
        if args.command == "report":
            return cmd_run(args, _suites_arg(args.suites), echo=False)
        if args.command == "gram":
            return cmd_gram(args)
        if args.command == "plot":
            return cmd_plot(args)
    except UsageError as exc:
        print(f"hkmoment: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    parser.error("unknown command")
    return EXIT_USAGE
