"""Command-line interface.

Subcommands:

* ``list``      — catalogue of generator sets, observables, closed forms.
* ``decompose`` — distinct eigenvalues, multiplicities and projections.
* ``charfun``   — CF traces by the exact and/or resolvent route.
* ``stone``     — spectral measure (atoms + density + cdf) by the resolvent
  ladder.
* ``verify``    — run the validation suite, report pass/fail per check.
* ``report``    — verification plus flagship workloads, written as CSV/JSON
  artifacts with rendered figures.

Exit codes: 0 success; 2 configuration/usage errors (bad arguments, unknown
catalogue keys, unparsable input files); 3 construction errors (non-Hermitian
matrices, non-unit states, dimension mismatches); 4 numerical failures
(residual/conditioning/branch-tracking problems, uncovered spectral ranges,
failed verification).
"""

from __future__ import annotations

import argparse
import os
import sys

import numpy as np

from . import __version__, catalog, forms
from ._serialize import fmt_float, json_dumps, load_matrix_file, parse_state_text, write_csv
from .errors import (
    ConfigError,
    ConstructionError,
    DimensionMismatchError,
    NumericalError,
    PreconditionError,
    RangeCoverageError,
    SpectralCfError,
    VerificationError,
)
from .linalg import HermitianOperator, StateVector, charfun_exact, decompose, spectral_measure
from .stone import ResolventProbeConfig, stone_cdf, stone_charfun
from .verify import run_suite


def _parse_range(text: str, what: str) -> tuple[float, float, int]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"{what} must be 'lo:hi:n', got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ConfigError(f"{what} must be 'lo:hi:n' with numeric parts, got {text!r}") from None
    if not (hi > lo and n >= 2):
        raise ConfigError(f"{what} needs hi > lo and n >= 2, got {text!r}")
    return lo, hi, n


def _load_observable(spec: str) -> tuple[str, HermitianOperator]:
    if spec in catalog.OBSERVABLE_NAMES:
        return spec, catalog.build_observable(spec).matrix
    if os.path.exists(spec):
        m = load_matrix_file(spec)
        return os.path.basename(spec), HermitianOperator(m, label=os.path.basename(spec))
    raise ConfigError(
        f"unknown observable {spec!r}: not a catalogue id "
        f"({', '.join(catalog.OBSERVABLE_NAMES)}) and not a file")


def _resolve_state(state_spec: str, obs_name: str, dim: int) -> tuple[StateVector, str]:
    if state_spec == "vacuum":
        try:
            return catalog.vacuum_for_observable(obs_name), "vacuum"
        except SpectralCfError:
            raise ConfigError(
                f"observable {obs_name!r} has no catalogued vacuum; "
                "pass --state with explicit amplitudes") from None
    amps = parse_state_text(state_spec)
    if amps.size != dim:
        raise ConfigError(f"state has {amps.size} amplitudes, observable dim is {dim}")
    try:
        state, drift = StateVector.normalized(amps)
    except PreconditionError as exc:
        raise ConfigError(str(exc)) from None
    if drift > 1e-12:
        print(f"note: state norm drifted by {drift:.2e}; renormalized", file=sys.stderr)
    return state, state_spec


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _csv_text(header: list[str], rows) -> str:
    from ._serialize import format_cell

    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(format_cell(c) for c in row))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------- list


def _cmd_list(args) -> int:
    doc = catalog.list_catalog()
    doc["closed_forms"] = [
        {"id": f.id, "kind": f.kind, "validity": list(f.validity),
         "variant_of": f.variant_of}
        for f in forms.registry().values()
    ]
    if args.format == "json":
        _write_text(args.output, json_dumps({"format": "spectral-cf/1",
                                             "kind": "catalog", **doc}))
        return 0
    lines = ["generator sets:"]
    for g in doc["generator_sets"]:
        lines.append(f"  {g['name']:<16} generators: {', '.join(g['generators'])}")
        for rel in g["relations"]:
            lines.append(f"    {rel}")
    lines.append("observables:")
    for o in doc["observables"]:
        ref = f" [closed form: {o['reference_cf']}]" if o["reference_cf"] else ""
        lines.append(f"  {o['name']:<12} dim {o['dim']}: {o['description']}{ref}")
    lines.append("closed forms:")
    for f in doc["closed_forms"]:
        extra = f" (variant of {f['variant_of']})" if f["variant_of"] else ""
        lines.append(f"  {f['id']:<24} kind={f['kind']}{extra}")
    _write_text(args.output, "\n".join(lines) + "\n")
    return 0


# ---------------------------------------------------------------- decompose


def _cmd_decompose(args) -> int:
    name, op = _load_observable(args.observable)
    dec = decompose(op, merge_tol=args.merge_tol)
    if args.format == "csv":
        text = _csv_text(["eigenvalue", "multiplicity"],
                         [(lam, m) for lam, m in zip(dec.eigenvalues, dec.multiplicities)])
        _write_text(args.output, text)
        return 0
    doc = {
        "format": "spectral-cf/1",
        "kind": "decomposition",
        "observable": name,
        "dim": dec.dim,
        "eigenvalues_expanded": dec.expanded_eigenvalues(),
        "eigenvalues": [
            {"value": lam, "multiplicity": mult, "projection": proj}
            for lam, mult, proj in zip(dec.eigenvalues, dec.multiplicities, dec.projections)
        ],
        "identity_residual": dec.identity_residual(),
        "reconstruction_residual": dec.reconstruction_residual(op),
    }
    _write_text(args.output, json_dumps(doc))
    return 0


# ---------------------------------------------------------------- charfun


def _stone_config(args, op: HermitianOperator, eps_list: list[float]) -> ResolventProbeConfig:
    if args.lam is not None:
        window = _parse_range(args.lam, "--lambda")
    else:
        glo, ghi = op.gershgorin_bounds()
        pad = max(10.0, 6.0 * max(eps_list))
        lo, hi = glo - pad, ghi + pad
        n = int(np.ceil((hi - lo) / (0.1 * min(eps_list)))) + 1
        if n > 2_000_001:
            raise ConfigError(
                f"auto spectral grid would need {n} nodes; pass --lambda lo:hi:n explicitly")
        window = (lo, hi, n)
    return ResolventProbeConfig(
        epsilons=tuple(sorted(eps_list, reverse=True)),
        t_grid=window,
        quadrature=args.quadrature,
        extrapolation=getattr(args, "extrapolation", "richardson"),
    )


def _cmd_charfun(args) -> int:
    name, op = _load_observable(args.observable)
    state, state_label = _resolve_state(args.state, name, op.dim)
    lo, hi, n = _parse_range(args.t, "--t")
    ts = np.linspace(lo, hi, n)

    exact = stone = None
    if args.method in ("exact", "both"):
        exact = charfun_exact(op, state, ts)
    if args.method in ("stone", "both"):
        cfg = _stone_config(args, op, [args.eps])
        stone = stone_charfun(op, state, cfg, ts)

    if args.format == "csv":
        if args.method == "exact":
            header = ["t", "re_exact", "im_exact"]
            rows = zip(ts, exact.values.real, exact.values.imag)
        elif args.method == "stone":
            header = ["t", "re_stone", "im_stone"]
            rows = zip(ts, stone.values.real, stone.values.imag)
        else:
            diff = np.abs(exact.values - stone.values)
            header = ["t", "re_exact", "im_exact", "re_stone", "im_stone", "abs_diff"]
            rows = zip(ts, exact.values.real, exact.values.imag,
                       stone.values.real, stone.values.imag, diff)
        _write_text(args.output, _csv_text(header, rows))
    else:
        doc = {
            "format": "spectral-cf/1",
            "kind": "charfun",
            "observable": name,
            "state": state_label,
            "method": args.method,
            "t": ts,
        }
        if exact is not None:
            doc["exact"] = {"re": exact.values.real, "im": exact.values.imag}
        if stone is not None:
            doc["stone"] = {"re": stone.values.real, "im": stone.values.imag,
                            "epsilon": stone.epsilon, "meta": stone.meta}
        if exact is not None and stone is not None:
            doc["abs_diff"] = np.abs(exact.values - stone.values)
        _write_text(args.output, json_dumps(doc))

    if args.figures:
        from . import figures

        figures.ensure_dir(args.figures)
        figures.charfun_figure(
            os.path.join(args.figures, f"charfun_{name}.png"), exact, stone,
            title=f"{name}, state {state_label}")
    return 0


# ---------------------------------------------------------------- stone


def _cmd_stone(args) -> int:
    name, op = _load_observable(args.observable)
    state, state_label = _resolve_state(args.state, name, op.dim)
    try:
        eps_list = [float(tok) for tok in args.eps.split(",") if tok]
    except ValueError:
        raise ConfigError(f"--eps must be a comma-separated float list, got {args.eps!r}") from None
    if not eps_list:
        raise ConfigError("--eps must name at least one smoothing width")
    cfg = _stone_config(args, op, eps_list)
    measure = stone_cdf(op, state, cfg, h_factor=args.h_factor)

    if args.format == "csv":
        if args.output is None:
            raise ConfigError("--format csv for 'stone' needs --output BASE (writes BASE.*.csv)")
        write_csv(args.output + ".atoms.csv", ["lambda", "weight"], measure.atoms)
        write_csv(args.output + ".density.csv", ["lambda", "density"],
                  measure.density_samples)
        write_csv(args.output + ".cdf.csv", ["lambda", "cdf"], measure.cdf_samples)
    else:
        doc = {
            "format": "spectral-cf/1",
            "kind": "spectral-measure",
            "observable": name,
            "state": state_label,
            "method": measure.method,
            "epsilon_used": measure.epsilon_used,
            "atoms": [{"location": lam, "weight": w} for lam, w in measure.atoms],
            "density": measure.density_samples,
            "cdf": measure.cdf_samples,
            "meta": measure.meta,
        }
        _write_text(args.output, json_dumps(doc))

    if args.figures:
        from . import figures

        figures.ensure_dir(args.figures)
        figures.measure_figure(
            os.path.join(args.figures, f"measure_{name}.png"), measure,
            title=f"{name}, state {state_label}")
    return 0


# ---------------------------------------------------------------- verify


def _verify_text(report) -> str:
    lines = []
    for r in report.results:
        flag = "PASS" if r.passed else "FAIL"
        lines.append(
            f"[{flag}] {r.name} ({r.context}): computed={fmt_float(r.computed)} "
            f"reference={fmt_float(r.reference)} abs_error={r.abs_error:.3e} "
            f"tolerance={r.tolerance:.1e}")
    n_fail = sum(not r.passed for r in report.results)
    lines.append(
        f"suite {report.suite!r}: {len(report.results)} checks, "
        + ("all passed" if n_fail == 0 else f"{n_fail} FAILED"))
    return "\n".join(lines) + "\n"


def _cmd_verify(args) -> int:
    report = run_suite(args.suite)
    if args.format == "json":
        _write_text(args.output, json_dumps(report.to_dict()))
    else:
        _write_text(args.output, _verify_text(report))
    if not report.passed:
        raise VerificationError(
            f"validation suite {args.suite!r} failed "
            f"{sum(not r.passed for r in report.results)} check(s)")
    return 0


# ---------------------------------------------------------------- report


def _cmd_report(args) -> int:
    from . import figures

    outdir = figures.ensure_dir(args.output)
    figdir = figures.ensure_dir(os.path.join(outdir, "figures"))
    artifacts: list[str] = []

    report = run_suite(args.suite)
    path = os.path.join(outdir, "verify.json")
    _write_text(path, json_dumps(report.to_dict()))
    artifacts.append(path)
    path = os.path.join(outdir, "verify.csv")
    write_csv(path, ["name", "context", "computed", "reference", "abs_error",
                     "tolerance", "passed"],
              [(r.name, r.context, r.computed, r.reference, r.abs_error,
                r.tolerance, r.passed) for r in report.results])
    artifacts.append(path)
    artifacts.append(figures.verify_figure(os.path.join(figdir, "verify.png"), report))

    # Flagship workload: the two-level hyperbolic-plane observable, both
    # routes side by side.
    name = "sl2-H"
    op = catalog.build_observable(name).matrix
    state = catalog.vacuum_for_observable(name)
    ts = np.linspace(-8.0, 8.0, 321)
    exact = charfun_exact(op, state, ts)
    cfg = ResolventProbeConfig(epsilons=(1e-2,), t_grid=(-20.0, 20.0, 40001))
    stn = stone_charfun(op, state, cfg, ts)
    path = os.path.join(outdir, f"charfun_{name}.csv")
    write_csv(path, ["t", "re_exact", "im_exact", "re_stone", "im_stone", "abs_diff"],
              zip(ts, exact.values.real, exact.values.imag,
                  stn.values.real, stn.values.imag, np.abs(exact.values - stn.values)))
    artifacts.append(path)
    artifacts.append(figures.charfun_figure(
        os.path.join(figdir, f"charfun_{name}.png"), exact, stn,
        title=f"{name}, vacuum state"))

    # Flagship workload: atom recovery through the resolvent ladder.
    cfg = ResolventProbeConfig(epsilons=(4e-3, 2e-3, 1e-3), t_grid=(-30.0, 30.0, 1201))
    measure = stone_cdf(op, state, cfg)
    write_csv(os.path.join(outdir, f"measure_{name}.atoms.csv"),
              ["lambda", "weight"], measure.atoms)
    write_csv(os.path.join(outdir, f"measure_{name}.cdf.csv"),
              ["lambda", "cdf"], measure.cdf_samples)
    artifacts.extend([os.path.join(outdir, f"measure_{name}.atoms.csv"),
                      os.path.join(outdir, f"measure_{name}.cdf.csv")])
    artifacts.append(figures.measure_figure(
        os.path.join(figdir, f"measure_{name}.png"), measure,
        title=f"{name}, vacuum state (resolvent ladder)"))

    manifest = {
        "format": "spectral-cf/1",
        "kind": "report",
        "suite": args.suite,
        "passed": report.passed,
        "metadata": report.metadata,
        "artifacts": [os.path.relpath(a, outdir) for a in artifacts],
    }
    _write_text(os.path.join(outdir, "report.json"), json_dumps(manifest))
    print(f"report written to {outdir} ({len(artifacts) + 1} artifacts)")
    if not report.passed:
        raise VerificationError(f"validation suite {args.suite!r} failed")
    return 0


# ---------------------------------------------------------------- wiring


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spectral-cf",
        description="Characteristic functions and spectral measures of "
                    "Hermitian observables, by exact decomposition and by "
                    "resolvent probing.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", help="show the catalogue")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_list)

    p = sub.add_parser("decompose", help="eigenvalues, multiplicities, projections")
    p.add_argument("--observable", required=True, help="catalogue id or matrix file path")
    p.add_argument("--merge-tol", type=float, default=None,
                   help="cluster width for degenerate eigenvalues")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_decompose)

    p = sub.add_parser("charfun", help="characteristic function traces")
    p.add_argument("--observable", required=True)
    p.add_argument("--state", default="vacuum",
                   help="'vacuum' or comma-separated amplitudes (a+bi entries)")
    p.add_argument("--method", choices=("exact", "stone", "both"), default="both")
    p.add_argument("--t", default="-10:10:401", help="time grid lo:hi:n")
    p.add_argument("--eps", type=float, default=1e-2,
                   help="smoothing width for the resolvent route")
    p.add_argument("--lambda", dest="lam", default=None,
                   help="spectral quadrature grid lo:hi:n (default: auto)")
    p.add_argument("--quadrature", choices=("simpson", "trapezoid"), default="simpson")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output", default=None)
    p.add_argument("--figures", default=None, help="directory for rendered figures")
    p.set_defaults(func=_cmd_charfun)

    p = sub.add_parser("stone", help="spectral measure via the resolvent ladder")
    p.add_argument("--observable", required=True)
    p.add_argument("--state", default="vacuum")
    p.add_argument("--eps", default="0.1,0.05,0.025",
                   help="comma-separated descending smoothing widths")
    p.add_argument("--lambda", dest="lam", default=None,
                   help="spectral evaluation grid lo:hi:n (default: auto)")
    p.add_argument("--h-factor", type=float, default=0.135,
                   help="internal rung step as a fraction of eps")
    p.add_argument("--extrapolation", choices=("richardson", "none"), default="richardson")
    p.add_argument("--quadrature", choices=("simpson", "trapezoid"), default="simpson")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--output", default=None,
                   help="output path (csv: base name for BASE.*.csv)")
    p.add_argument("--figures", default=None)
    p.set_defaults(func=_cmd_stone)

    p = sub.add_parser("verify", help="run the validation suite")
    p.add_argument("--suite", choices=("quick", "full", "paper"), default="full")
    p.add_argument("--format", choices=("text", "json"), default="text")
    p.add_argument("--output", default=None)
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("report", help="validation report with figures and CSV/JSON artifacts")
    p.add_argument("--suite", choices=("quick", "full", "paper"), default="full")
    p.add_argument("--output", required=True, help="output directory")
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConstructionError, DimensionMismatchError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except RangeCoverageError as exc:
        print(f"error: {exc}\nsuggested window: "
              f"{exc.suggested_lo:g} .. {exc.suggested_hi:g}", file=sys.stderr)
        return 4
    except (NumericalError, VerificationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
