"""Command-line interface.

Subcommands map one-to-one onto the computational modules:

    asymptotics   closed-form quasi-frequency lattices
    sl            higher-order Sturm-Liouville spectra
    peters        sector model solutions sampled along the surface
    fem           Steklov spectrum of a domain described in JSON
    reproduce     eigenvalue tables for the two worked examples
    residual      quasimode residuals against the discrete DtN map
    convergence   mesh-refinement study for selected eigenvalues
    run           execute an experiment config file

Results go to stdout, or to files under --out DIR.  Everything is
deterministic; --seed is accepted for interface stability but unused.
The heavy numerical imports happen after argument parsing so that
--threads can pin the BLAS pool size before numpy loads.
"""

import argparse
import json
import os
import sys


def _common_flags(parser):
    parser.add_argument("--format", choices=("csv", "json"), default="csv", help="output format")
    parser.add_argument("--out", metavar="DIR", default=None, help="write artifacts into DIR instead of stdout")
    parser.add_argument("--seed", type=int, default=0, help="reserved; all algorithms are deterministic")
    parser.add_argument("--threads", type=int, default=None, help="cap the BLAS thread pool")


def build_parser():
    parser = argparse.ArgumentParser(prog="sloshspec", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("asymptotics", help="quasi-frequency lattice sigma_k")
    p.add_argument("--regime", default="nn", choices=("nn", "dd", "mixed", "halfpi-neumann", "halfpi-dirichlet"))
    p.add_argument("--alpha", type=float, required=True, help="corner angle at A in radians")
    p.add_argument("--beta", type=float, required=True, help="corner angle at B in radians")
    p.add_argument("--length", type=float, default=1.0, help="sloshing surface length")
    p.add_argument("--kmax", type=int, default=10)
    _common_flags(p)

    p = sub.add_parser("sl", help="higher-order Sturm-Liouville spectrum")
    p.add_argument("--q", type=int, required=True, help="half the operator order")
    p.add_argument("--bc", default="neumann", choices=("neumann", "dirichlet"))
    p.add_argument("--length", type=float, default=1.0)
    p.add_argument("--kmax", type=int, default=8)
    _common_flags(p)

    p = sub.add_parser("peters", help="sector solution sampled along the surface ray")
    p.add_argument("--alpha", type=float, required=True, help="wedge angle in radians, at most pi/2")
    p.add_argument("--bc", default="neumann", choices=("neumann", "dirichlet"))
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--xmax", type=float, default=40.0)
    _common_flags(p)

    p = sub.add_parser("fem", help="Steklov spectrum of a JSON-described domain")
    p.add_argument("--domain", required=True, metavar="FILE", help="domain JSON document")
    p.add_argument("--h", type=float, required=True, help="target mesh size")
    p.add_argument("--neigs", type=int, default=10)
    p.add_argument("--grading", type=float, default=0.25, help="corner grading factor in (0, 1]")
    p.add_argument("--dump-mesh", metavar="FILE", default=None, help="write the mesh as plain text")
    p.add_argument("--dump-dtn", metavar="FILE", default=None, help="write the dense DtN matrix (binary)")
    _common_flags(p)

    p = sub.add_parser("reproduce", help="worked example eigenvalue tables")
    p.add_argument("--example", type=int, required=True, choices=(1, 2))
    p.add_argument("--h", type=float, default=0.01)
    p.add_argument("--grading", type=float, default=0.25)
    _common_flags(p)

    p = sub.add_parser("residual", help="quasimode residuals against the FEM DtN map")
    p.add_argument("--q", type=int, default=2)
    p.add_argument("--length", type=float, default=1.0)
    p.add_argument("--h", type=float, default=0.002)
    p.add_argument("--k", default="4,6,8", help="comma-separated lattice indices")
    p.add_argument("--grading", type=float, default=1.0)
    _common_flags(p)

    p = sub.add_parser("convergence", help="mesh refinement study")
    p.add_argument("--domain", required=True, metavar="FILE")
    p.add_argument("--h", required=True, help="comma-separated decreasing mesh sizes")
    p.add_argument("--k", default="1,2,3", help="comma-separated eigenvalue indices")
    p.add_argument("--grading", type=float, default=0.25)
    _common_flags(p)

    p = sub.add_parser("run", help="execute an experiment configuration")
    p.add_argument("--config", required=True, metavar="FILE", help="experiment config JSON")
    _common_flags(p)

    return parser


def _apply_threads(n):
    if n is None:
        return
    if n < 1:
        from .harness import ConfigError

        raise ConfigError("threads", f"thread count must be positive, got {n}")
    for var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
        os.environ[var] = str(n)


def _parse_int_list(text, flag):
    from .harness import ConfigError

    try:
        values = tuple(int(part) for part in str(text).split(",") if part.strip())
    except ValueError:
        raise ConfigError(flag, f"expected comma-separated integers, got {text!r}") from None
    if not values:
        raise ConfigError(flag, "empty list")
    return values


def _parse_float_list(text, flag):
    from .harness import ConfigError

    try:
        values = tuple(float(part) for part in str(text).split(",") if part.strip())
    except ValueError:
        raise ConfigError(flag, f"expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise ConfigError(flag, "empty list")
    return values


def _emit(args, header, rows, stem):
    """Print a table to stdout or write it under --out."""
    from .harness import _csv_text, write_atomic

    if args.format == "csv":
        text = _csv_text(header, rows)
        suffix = "csv"
    else:
        def cell(value):
            if value is None or isinstance(value, (str, int)):
                return value
            return float(value)

        doc = [{name: cell(value) for name, value in zip(header, row)} for row in rows]
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
        suffix = "json"
    if args.out is None:
        sys.stdout.write(text)
        return []
    path = os.path.join(args.out, f"{stem}.{suffix}")
    write_atomic(path, text)
    print(path)
    return [path]


def _positive(value, flag):
    from .harness import ConfigError

    if not value > 0:
        raise ConfigError(flag, f"must be positive, got {value}")
    return value


def _cmd_asymptotics(args):
    from .asymptotics import QuasiFrequencyModel, Regime, quasi_frequency
    from .harness import ConfigError

    if args.kmax < 1:
        raise ConfigError("kmax", f"kmax must be at least 1, got {args.kmax}")
    _positive(args.length, "length")
    try:
        model = QuasiFrequencyModel(
            Regime.from_string(args.regime), args.alpha, args.beta, args.length
        )
    except ValueError as exc:
        raise ConfigError("alpha", str(exc)) from None
    rows = [(k, quasi_frequency(model, k)) for k in range(1, args.kmax + 1)]
    _emit(args, ["k", "sigma"], rows, "asymptotics")
    return 0


def _cmd_sl(args):
    from .harness import ConfigError
    from .highord_sl import HighOrderSLProblem, ode_asymptotic_prediction, solve_spectrum

    if args.kmax < 1:
        raise ConfigError("kmax", f"kmax must be at least 1, got {args.kmax}")
    _positive(args.length, "length")
    try:
        problem = HighOrderSLProblem(args.q, args.length, args.bc)
    except ValueError as exc:
        raise ConfigError("q", str(exc)) from None
    spectrum = solve_spectrum(problem, args.kmax)
    rows = []
    for i, lam in enumerate(spectrum.eigenvalues, start=1):
        if i > args.q:
            pred = ode_asymptotic_prediction(args.q, args.length, i)
            rows.append((i, float(lam), pred, abs(float(lam) - pred)))
        else:
            rows.append((i, float(lam), None, None))
    _emit(args, ["k", "lambda", "prediction", "residual"], rows, "sl")
    return 0


def _cmd_peters(args):
    import numpy as np

    from .harness import ConfigError
    from .model_solutions.peters import SectorParams, eval_peters, far_field_fit

    if args.samples < 16:
        raise ConfigError("samples", "need at least 16 samples")
    _positive(args.xmax, "xmax")
    try:
        params = SectorParams(args.alpha, args.bc)
    except ValueError as exc:
        raise ConfigError("alpha", str(exc)) from None
    x = np.linspace(args.xmax / args.samples, args.xmax, args.samples)
    values = eval_peters(params, x)
    fit = far_field_fit(params, x, values)
    wave = fit.wave_coefficient * np.exp(-1j * x) + fit.offset
    rows = list(zip(x, values.real, values.imag, wave.real, np.abs(values - wave)))
    _emit(args, ["x", "re_f", "im_f", "planewave_re", "residual"], rows, "peters")
    return 0


def _load_domain_file(path):
    from .geometry import domain_from_json
    from .harness import ConfigError

    if not os.path.exists(path):
        raise ConfigError("domain", f"referenced file does not exist: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("domain", f"not valid JSON: {exc}") from None
    try:
        return domain_from_json(obj)
    except (KeyError, ValueError) as exc:
        raise ConfigError("domain", str(exc)) from None


def _cmd_fem(args):
    import numpy as np

    from .fem_steklov import assemble, dtn_matrix, solve_steklov
    from .geometry import generate_mesh, write_mesh_text
    from .harness import ConfigError

    _positive(args.h, "h")
    if args.neigs < 1:
        raise ConfigError("neigs", f"neigs must be at least 1, got {args.neigs}")
    if not 0 < args.grading <= 1:
        raise ConfigError("grading", "grading factor must lie in (0, 1]")
    domain = _load_domain_file(args.domain)
    mesh = generate_mesh(domain, args.h, args.grading)
    fine = solve_steklov(domain, args.h, args.neigs, grading_factor=args.grading, mesh=mesh)
    coarse = solve_steklov(domain, 2.0 * args.h, args.neigs, grading_factor=args.grading)
    errbar = 2.0 * np.abs(fine.eigenvalues - coarse.eigenvalues)
    if args.dump_mesh:
        write_mesh_text(mesh, args.dump_mesh)
    if args.dump_dtn:
        dtn = dtn_matrix(assemble(mesh))
        n = dtn.matrix.shape[0]
        payload = np.asarray([n], dtype="<u8").tobytes() + np.ascontiguousarray(
            dtn.matrix, dtype="<f8"
        ).tobytes()
        tmp = args.dump_dtn + ".tmp"
        with open(tmp, "wb") as fh:
            fh.write(payload)
        os.replace(tmp, args.dump_dtn)
    rows = list(zip(range(1, args.neigs + 1), fine.eigenvalues, errbar))
    _emit(args, ["k", "lambda", "errbar"], rows, "fem")
    return 0


def _cmd_reproduce(args):
    from .harness import ConfigError, report_csv, report_json, reproduce_table

    _positive(args.h, "h")
    if not 0 < args.grading <= 1:
        raise ConfigError("grading", "grading factor must lie in (0, 1]")
    report = reproduce_table(args.example, args.h, args.grading)
    text = report_csv(report) if args.format == "csv" else report_json(report)
    if args.out is None:
        sys.stdout.write(text)
    else:
        from .harness import write_atomic

        path = os.path.join(args.out, f"example_{args.example}.{args.format}")
        write_atomic(path, text)
        print(path)
    return 0


def _cmd_residual(args):
    from .harness import quasimode_residual_study

    _positive(args.h, "h")
    _positive(args.length, "length")
    k_list = _parse_int_list(args.k, "k")
    study = quasimode_residual_study(args.q, args.length, args.h, k_list, args.grading)
    _emit(args, ["k", "sigma", "residual", "nearest_gap"], list(study.rows), "residual")
    return 0


def _cmd_convergence(args):
    from .fem_steklov import convergence_study
    from .harness import ConfigError

    h_list = _parse_float_list(args.h, "h")
    k_list = _parse_int_list(args.k, "k")
    if not 0 < args.grading <= 1:
        raise ConfigError("grading", "grading factor must lie in (0, 1]")
    domain = _load_domain_file(args.domain)
    try:
        study = convergence_study(domain, h_list, k_list, grading_factor=args.grading)
    except ValueError as exc:
        raise ConfigError("h", str(exc)) from None
    rows = []
    for j, k in enumerate(study.k_values):
        for i, h in enumerate(study.h_values):
            rows.append(
                (k, h, study.values[i][j], study.observed_order[j], study.richardson[j], study.errbar[j])
            )
    _emit(args, ["k", "h", "lambda", "observed_order", "richardson", "errbar"], rows, "convergence")
    return 0


def _cmd_run(args):
    from .harness import load_config, run_experiment

    config = load_config(args.config)
    out_dir = args.out if args.out is not None else "."
    for path in run_experiment(config, out_dir):
        print(path)
    return 0


_HANDLERS = {
    "asymptotics": _cmd_asymptotics,
    "sl": _cmd_sl,
    "peters": _cmd_peters,
    "fem": _cmd_fem,
    "reproduce": _cmd_reproduce,
    "residual": _cmd_residual,
    "convergence": _cmd_convergence,
    "run": _cmd_run,
}


def _error_json(kind, exc):
    doc = {"error": {"type": kind, "message": str(exc)}}
    if getattr(exc, "field", None):
        doc["error"]["field"] = exc.field
    return json.dumps(doc, sort_keys=True)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _apply_threads(args.threads)
        return _HANDLERS[args.command](args)
    except Exception as exc:  # sort into the two documented exit codes
        from .fem_steklov import SteklovSolveError
        from .geometry import MeshError
        from .harness import ConfigError
        from .highord_sl import SLSolveError
        from .model_solutions.contour import QuadratureError

        if isinstance(exc, ConfigError):
            print(_error_json("config", exc))
            return 2
        if isinstance(exc, (MeshError, SteklovSolveError, SLSolveError, QuadratureError, ArithmeticError)):
            print(_error_json("numerical", exc))
            return 1
        raise


if __name__ == "__main__":
    sys.exit(main())
