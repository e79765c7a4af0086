"""Experiment runner behind the command-line interface.

Bundles the cross-module computations that make up the reproduction
studies: eigenvalue tables for the two worked examples, the comparison
of the triangle sloshing spectrum with the higher-order ODE spectrum,
quasimode residual measurements, and mesh-refinement studies.  Each
experiment is described by an ExperimentConfig (a flat JSON document on
disk) and produces deterministic CSV/JSON artifacts plus two-column
plot-ready series.

Runtime is recorded in the in-memory report metadata but never written
to disk, so repeated runs of the same config produce byte-identical
files.
"""

import json
import math
import os
import time
from dataclasses import dataclass, field, fields

import numpy as np
import scipy.sparse.linalg

from .asymptotics import QuasiFrequencyModel, Regime, quasi_frequency
from .fem_steklov import convergence_study, dtn_action, assemble, solve_steklov
from .geometry import (
    build_curvilinear_example,
    build_triangle_domain,
    domain_from_json,
    generate_mesh,
)
from .highord_sl import HighOrderSLProblem, solve_spectrum
from .model_solutions.hanson_lewy import quasimode_trace

EXPERIMENT_KINDS = (
    "reproduce_example_1",
    "reproduce_example_2",
    "sl_vs_sloshing",
    "peters_phase",
    "quasimode_residual",
    "convergence",
    "custom",
)


class ConfigError(ValueError):
    """Invalid experiment configuration; remembers the offending field."""

    def __init__(self, field_name, message):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat description of one experiment run.

    Only the fields relevant to `kind` are consulted; the rest keep
    their defaults.  `domain` is either an inline domain document (a
    dict following the JSON schema in geometry.io) or a path to a JSON
    file holding one.
    """

    kind: str
    h: float = 0.01
    kmax: int = 10
    q: int = 2
    surface_length: float = 1.0
    domain: object = None
    alpha: float = math.pi / 3
    condition: str = "neumann"
    k_list: tuple = ()
    h_list: tuple = ()
    samples: int = 200
    xmax: float = 40.0
    grading_factor: float = 0.25
    out_format: str = "csv"
    label: str = ""

    def __post_init__(self):
        if self.kind not in EXPERIMENT_KINDS:
            raise ConfigError("kind", f"unknown kind {self.kind!r}; expected one of {EXPERIMENT_KINDS}")
        if not self.h > 0:
            raise ConfigError("h", f"mesh size must be positive, got {self.h}")
        if self.kmax < 1:
            raise ConfigError("kmax", f"kmax must be at least 1, got {self.kmax}")
        if self.q < 1:
            raise ConfigError("q", f"q must be a positive integer, got {self.q}")
        if not self.surface_length > 0:
            raise ConfigError("surface_length", "must be positive")
        if not 0 < self.grading_factor <= 1:
            raise ConfigError("grading_factor", "must lie in (0, 1]")
        if self.out_format not in ("csv", "json"):
            raise ConfigError("out_format", f"expected 'csv' or 'json', got {self.out_format!r}")
        if self.condition not in ("neumann", "dirichlet"):
            raise ConfigError("condition", f"expected 'neumann' or 'dirichlet', got {self.condition!r}")
        if self.kind in ("convergence", "custom") and self.domain is None:
            raise ConfigError("domain", f"kind {self.kind!r} requires a domain")
        if self.kind == "convergence":
            if len(self.h_list) < 2:
                raise ConfigError("h_list", "need at least two mesh sizes")
            if not self.k_list:
                raise ConfigError("k_list", "need at least one eigenvalue index")
        if self.kind == "quasimode_residual" and not self.k_list:
            raise ConfigError("k_list", "need at least one lattice index")
        if isinstance(self.domain, str) and not os.path.exists(self.domain):
            raise ConfigError("domain", f"referenced file does not exist: {self.domain}")

    @property
    def stem(self):
        return self.label or self.kind


def config_from_json(obj):
    """Build an ExperimentConfig from a parsed JSON document."""
    if not isinstance(obj, dict):
        raise ConfigError("config", "top-level document must be a JSON object")
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(obj) - known
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown configuration field")
    if "kind" not in obj:
        raise ConfigError("kind", "missing required field")
    kwargs = dict(obj)
    for name in ("k_list", "h_list"):
        if name in kwargs:
            try:
                kwargs[name] = tuple(kwargs[name])
            except TypeError:
                raise ConfigError(name, "must be a list") from None
    for name in ("h", "surface_length", "alpha", "xmax", "grading_factor"):
        if name in kwargs:
            try:
                kwargs[name] = float(kwargs[name])
            except (TypeError, ValueError):
                raise ConfigError(name, f"must be a number, got {kwargs[name]!r}") from None
    for name in ("kmax", "q", "samples"):
        if name in kwargs:
            try:
                kwargs[name] = int(kwargs[name])
            except (TypeError, ValueError):
                raise ConfigError(name, f"must be an integer, got {kwargs[name]!r}") from None
    try:
        return ExperimentConfig(**kwargs)
    except TypeError as exc:
        raise ConfigError("config", str(exc)) from None


def load_config(path):
    with open(path, encoding="utf-8") as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError("config", f"not valid JSON: {exc}") from None
    return config_from_json(obj)


def _deviation(computed, predicted):
    if computed == 0.0:
        return None
    return abs(predicted / computed - 1.0)


@dataclass(frozen=True)
class ReportBlock:
    """One (k, computed, predicted, deviation) table block.

    The deviation column is always |predicted/computed - 1| recomputed
    from the stored values, so it can never drift out of sync with them.
    """

    label: str
    k: tuple
    computed: tuple
    predicted: tuple
    deviation: tuple = ()

    def __post_init__(self):
        if not len(self.k) == len(self.computed) == len(self.predicted):
            raise ValueError("block columns must have equal length")
        recomputed = tuple(_deviation(c, p) for c, p in zip(self.computed, self.predicted))
        if self.deviation and tuple(self.deviation) != recomputed:
            raise ValueError("deviation column inconsistent with computed/predicted")
        object.__setattr__(self, "deviation", recomputed)


@dataclass(frozen=True)
class ComparisonReport:
    blocks: tuple
    metadata: dict = field(default_factory=dict)

    def block(self, label):
        for b in self.blocks:
            if b.label == label:
                return b
        raise KeyError(label)


def _domain_description(domain):
    conds = [p.condition for p in domain.walls]
    return (
        f"surface length {domain.surface_length!r}, corner angles "
        f"({domain.corner_A.angle!r}, {domain.corner_B.angle!r}), walls {conds}"
    )


def _spectrum_with_errbar(domain, h, n_eigs, grading_factor):
    """Eigenvalues at mesh size h plus a two-mesh error bar.

    The error bar is 2 |lambda(h) - lambda(2h)| per index, the same
    convention convergence_study uses for its finest level.
    """
    fine = solve_steklov(domain, h, n_eigs, grading_factor=grading_factor)
    coarse = solve_steklov(domain, 2.0 * h, n_eigs, grading_factor=grading_factor)
    errbar = 2.0 * np.abs(fine.eigenvalues - coarse.eigenvalues)
    return fine, errbar


def reproduce_table(example, h, grading_factor=0.25):
    """Eigenvalue table for worked example 1 or 2.

    Example 1 is the (2pi/5, pi/6) triangle with surface length 2,
    solved once with Neumann walls and once with Dirichlet walls, each
    against its two-term quasi-frequency lattice.  Example 2 is the pair
    of curvilinear domains with a sinusoidal surface and one Neumann
    plus one Dirichlet circular wall, against the mixed-condition
    lattice pi(k - 1/6)/L and pi(k - 5/6)/L.
    """
    if example not in (1, 2):
        raise ConfigError("example", f"expected 1 or 2, got {example!r}")
    started = time.perf_counter()
    kmax = 10
    ks = tuple(range(1, kmax + 1))
    blocks = []
    meta = {"h": h, "grading_factor": grading_factor, "num_nodes": {}, "errbar": {}, "domain": {}}
    if example == 1:
        cases = [
            ("neumann", ("neumann", "neumann"), Regime.NEUMANN_NEUMANN),
            ("dirichlet", ("dirichlet", "dirichlet"), Regime.DIRICHLET_DIRICHLET),
        ]
        for label, walls, regime in cases:
            domain = build_triangle_domain(2 * math.pi / 5, math.pi / 6, 2.0, wall_conditions=walls)
            model = QuasiFrequencyModel(regime, 2 * math.pi / 5, math.pi / 6, 2.0)
            spec, errbar = _spectrum_with_errbar(domain, h, kmax, grading_factor)
            blocks.append(
                ReportBlock(
                    label=label,
                    k=ks,
                    computed=tuple(float(v) for v in spec.eigenvalues),
                    predicted=tuple(quasi_frequency(model, k) for k in ks),
                )
            )
            meta["num_nodes"][label] = spec.num_nodes
            meta["errbar"][label] = [float(e) for e in errbar]
            meta["domain"][label] = _domain_description(domain)
    else:
        for label, sign in (("omega_plus", "+"), ("omega_minus", "-")):
            domain = build_curvilinear_example(sign)
            dirichlet_angle = domain.corner_B.angle
            neumann_angle = domain.corner_A.angle
            model = QuasiFrequencyModel(
                Regime.MIXED_DIRICHLET_A_NEUMANN_B,
                dirichlet_angle,
                neumann_angle,
                domain.surface_length,
            )
            spec, errbar = _spectrum_with_errbar(domain, h, kmax, grading_factor)
            blocks.append(
                ReportBlock(
                    label=label,
                    k=ks,
                    computed=tuple(float(v) for v in spec.eigenvalues),
                    predicted=tuple(quasi_frequency(model, k) for k in ks),
                )
            )
            meta["num_nodes"][label] = spec.num_nodes
            meta["errbar"][label] = [float(e) for e in errbar]
            meta["domain"][label] = _domain_description(domain)
    meta["runtime_seconds"] = time.perf_counter() - started
    return ComparisonReport(blocks=tuple(blocks), metadata=meta)


def sl_vs_sloshing(q, surface_length, h, kmax, grading_factor=0.25):
    """FEM sloshing spectrum of the angle pi/2q isosceles triangle next
    to the order-2q ODE spectrum on the same interval.

    The two agree up to an error decaying exponentially in k, which is
    what makes the comparison interesting; the table shows the gap
    closing before FEM discretization error takes over.
    """
    if q == 1:
        raise ConfigError(
            "q",
            "q=1 gives corner angles pi/2 + pi/2 = pi, a degenerate triangle "
            "with no interior; use q >= 2",
        )
    if q < 1:
        raise ConfigError("q", f"q must be a positive integer, got {q}")
    started = time.perf_counter()
    angle = math.pi / (2 * q)
    domain = build_triangle_domain(angle, angle, surface_length)
    spec, errbar = _spectrum_with_errbar(domain, h, kmax, grading_factor)
    ode = solve_spectrum(HighOrderSLProblem(q, surface_length, "neumann"), kmax)
    ks = tuple(range(1, kmax + 1))
    block = ReportBlock(
        label="fem_vs_ode",
        k=ks,
        computed=tuple(float(v) for v in spec.eigenvalues),
        predicted=tuple(float(v) for v in ode.eigenvalues),
    )
    meta = {
        "h": h,
        "grading_factor": grading_factor,
        "num_nodes": {"fem_vs_ode": spec.num_nodes},
        "errbar": {"fem_vs_ode": [float(e) for e in errbar]},
        "domain": {"fem_vs_ode": _domain_description(domain)},
        "runtime_seconds": time.perf_counter() - started,
    }
    return ComparisonReport(blocks=(block,), metadata=meta)


@dataclass(frozen=True)
class ResidualStudy:
    """Quasimode residuals against the discrete Dirichlet-to-Neumann map.

    rows are (k, sigma_k, residual, nearest_gap): the lattice frequency,
    the relative residual ||D v - sigma M v|| in the norm induced by the
    inverse surface mass matrix divided by sigma, and the distance from
    sigma_k to the nearest computed eigenvalue.
    """

    rows: tuple
    metadata: dict = field(default_factory=dict)


def quasimode_residual_study(q, surface_length, h, k_list, grading_factor=1.0):
    """Measure how well explicit corner quasimodes annihilate the FEM DtN map.

    For each lattice index k the trace of the glued corner solution is
    sampled on the surface nodes, normalized in the surface mass inner
    product, and pushed through the Schur-complement DtN action; the
    residual r = D v - sigma M v is reported in the M^{-1} norm where it
    equals the eigenvector-coefficient-weighted distance to the discrete
    spectrum.
    """
    if q < 2:
        raise ConfigError("q", f"quasimode study needs q >= 2, got {q}")
    k_list = tuple(int(k) for k in k_list)
    if not k_list:
        raise ConfigError("k_list", "need at least one lattice index")
    if min(k_list) < q + 1:
        raise ConfigError("k_list", f"lattice indices must be at least q+1 = {q + 1}")
    started = time.perf_counter()
    angle = math.pi / (2 * q)
    domain = build_triangle_domain(angle, angle, surface_length)
    mesh = generate_mesh(domain, h, grading_factor)
    system = assemble(mesh)
    apply_action = dtn_action(system)
    mass = system.steklov_mass_free().tocsc()
    mass_lu = scipy.sparse.linalg.splu(mass)
    x = system.s_arclength[system.s_free_mask]
    n_eigs = max(k_list) + 2
    spectrum = solve_steklov(domain, h, n_eigs, grading_factor=grading_factor, mesh=mesh)
    rows = []
    for k in sorted(k_list):
        sigma = (math.pi * (k - 0.5) - math.pi * q / 2.0) / surface_length
        trace = quasimode_trace(q, sigma, x, surface_length)
        trace = trace / math.sqrt(float(trace @ (mass @ trace)))
        resid = apply_action(trace) - sigma * (mass @ trace)
        norm = math.sqrt(float(resid @ mass_lu.solve(resid)))
        nearest = float(np.min(np.abs(spectrum.eigenvalues - sigma)))
        rows.append((k, sigma, norm / sigma, nearest))
    meta = {
        "h": h,
        "grading_factor": grading_factor,
        "num_nodes": mesh.num_nodes,
        "domain": _domain_description(domain),
        "runtime_seconds": time.perf_counter() - started,
    }
    return ResidualStudy(rows=tuple(rows), metadata=meta)


def _float_cell(value):
    if value is None:
        return ""
    return repr(float(value))


def _csv_text(header, rows):
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, str):
                cells.append(cell)
            elif isinstance(cell, (int, np.integer)):
                cells.append(str(int(cell)))
            else:
                cells.append(_float_cell(cell))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def report_csv(report):
    """Merge the report blocks into one table keyed on k.

    Column layout per block: computed eigenvalue, predicted lattice
    value, relative deviation, mirroring the printed tables this
    reproduces (value, prediction, |prediction/value - 1|, then the
    second block's triple).
    """
    first = report.blocks[0]
    header = ["k"]
    suffixes = []
    for b in report.blocks:
        if b.k != first.k:
            raise ValueError("blocks must share the k column to merge")
        suffix = "" if len(report.blocks) == 1 else "_" + b.label
        suffixes.append(suffix)
        header += [f"lambda{suffix}", f"sigma{suffix}", f"deviation{suffix}"]
    rows = []
    for i, k in enumerate(first.k):
        row = [k]
        for b in report.blocks:
            row += [b.computed[i], b.predicted[i], b.deviation[i]]
        rows.append(row)
    return _csv_text(header, rows)


def _clean_metadata(metadata):
    return {key: value for key, value in metadata.items() if key != "runtime_seconds"}


def report_json(report):
    doc = {
        "blocks": [
            {
                "label": b.label,
                "rows": [
                    {
                        "k": int(b.k[i]),
                        "lambda": b.computed[i],
                        "sigma": b.predicted[i],
                        "deviation": b.deviation[i],
                    }
                    for i in range(len(b.k))
                ],
            }
            for b in report.blocks
        ],
        "metadata": _clean_metadata(report.metadata),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_atomic(path, text):
    """Write text through a temp file and rename into place."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    os.replace(tmp, path)


def _series_csv(xs, ys):
    return _csv_text(["x", "y"], list(zip(xs, ys)))


def _write_report_artifacts(report, config, out_dir):
    stem = config.stem
    paths = []
    body = report_csv(report) if config.out_format == "csv" else report_json(report)
    main = os.path.join(out_dir, f"{stem}.{config.out_format}")
    write_atomic(main, body)
    paths.append(main)
    meta = os.path.join(out_dir, f"{stem}_meta.json")
    write_atomic(meta, json.dumps(_clean_metadata(report.metadata), indent=2, sort_keys=True) + "\n")
    paths.append(meta)
    for b in report.blocks:
        for column, values in (("lambda", b.computed), ("sigma", b.predicted)):
            path = os.path.join(out_dir, f"{stem}_{b.label}_{column}.csv")
            write_atomic(path, _series_csv(b.k, values))
            paths.append(path)
    return paths


def _run_peters_phase(config, out_dir):
    from .model_solutions.peters import SectorParams, eval_peters, far_field_fit

    params = SectorParams(config.alpha, config.condition)
    if config.samples < 16:
        raise ConfigError("samples", "need at least 16 samples for a far-field fit")
    x = np.linspace(config.xmax / config.samples, config.xmax, config.samples)
    values = eval_peters(params, x)
    fit = far_field_fit(params, x, values)
    wave = fit.wave_coefficient * np.exp(-1j * x) + fit.offset
    rows = list(zip(x, values.real, values.imag, wave.real, np.abs(values - wave)))
    stem = config.stem
    paths = []
    table = _csv_text(["x", "re_f", "im_f", "planewave_re", "residual"], rows)
    main = os.path.join(out_dir, f"{stem}.csv")
    write_atomic(main, table)
    paths.append(main)
    summary = {
        "alpha": config.alpha,
        "condition": config.condition,
        "fitted_phase": fit.phase,
        "closed_form_phase": params.chi,
        "decay_exponent": fit.decay_exponent,
        "amplitude": fit.amplitude,
    }
    meta = os.path.join(out_dir, f"{stem}_meta.json")
    write_atomic(meta, json.dumps(summary, indent=2, sort_keys=True) + "\n")
    paths.append(meta)
    series = os.path.join(out_dir, f"{stem}_remainder.csv")
    write_atomic(series, _series_csv(x, np.abs(values - wave)))
    paths.append(series)
    return paths


def _run_quasimode_residual(config, out_dir):
    study = quasimode_residual_study(
        config.q, config.surface_length, config.h, config.k_list, config.grading_factor
    )
    stem = config.stem
    paths = []
    table = _csv_text(["k", "sigma", "residual", "nearest_gap"], study.rows)
    main = os.path.join(out_dir, f"{stem}.csv")
    write_atomic(main, table)
    paths.append(main)
    meta = os.path.join(out_dir, f"{stem}_meta.json")
    write_atomic(meta, json.dumps(_clean_metadata(study.metadata), indent=2, sort_keys=True) + "\n")
    paths.append(meta)
    series = os.path.join(out_dir, f"{stem}_residual.csv")
    write_atomic(series, _series_csv([r[1] for r in study.rows], [r[2] for r in study.rows]))
    paths.append(series)
    return paths


def _resolve_domain(config):
    if isinstance(config.domain, str):
        with open(config.domain, encoding="utf-8") as fh:
            return domain_from_json(json.load(fh))
    if isinstance(config.domain, dict):
        return domain_from_json(config.domain)
    raise ConfigError("domain", "expected an inline domain object or a file path")


def _run_convergence(config, out_dir):
    domain = _resolve_domain(config)
    h_list = tuple(float(h) for h in config.h_list)
    k_list = tuple(int(k) for k in config.k_list)
    study = convergence_study(domain, h_list, k_list, grading_factor=config.grading_factor)
    rows = []
    for j, k in enumerate(study.k_values):
        for i, h in enumerate(study.h_values):
            rows.append(
                (
                    k,
                    h,
                    study.values[i][j],
                    study.observed_order[j],
                    study.richardson[j],
                    study.errbar[j],
                )
            )
    stem = config.stem
    paths = []
    table = _csv_text(["k", "h", "lambda", "observed_order", "richardson", "errbar"], rows)
    main = os.path.join(out_dir, f"{stem}.csv")
    write_atomic(main, table)
    paths.append(main)
    for j, k in enumerate(study.k_values):
        gaps = [abs(study.values[i][j] - study.richardson[j]) for i in range(len(study.h_values))]
        series = os.path.join(out_dir, f"{stem}_k{k}_error.csv")
        write_atomic(series, _series_csv(study.h_values, gaps))
        paths.append(series)
    return paths


def _run_custom(config, out_dir):
    domain = _resolve_domain(config)
    spec, errbar = _spectrum_with_errbar(domain, config.h, config.kmax, config.grading_factor)
    ks = range(1, config.kmax + 1)
    rows = list(zip(ks, spec.eigenvalues, errbar))
    stem = config.stem
    paths = []
    table = _csv_text(["k", "lambda", "errbar"], rows)
    main = os.path.join(out_dir, f"{stem}.csv")
    write_atomic(main, table)
    paths.append(main)
    series = os.path.join(out_dir, f"{stem}_lambda.csv")
    write_atomic(series, _series_csv(list(ks), spec.eigenvalues))
    paths.append(series)
    return paths


def run_experiment(config, out_dir="."):
    """Run one configured experiment and write its artifacts.

    Returns the list of file paths written.  All writes are atomic and
    the bytes depend only on the config and package version.
    """
    os.makedirs(out_dir, exist_ok=True)
    if config.kind == "reproduce_example_1":
        report = reproduce_table(1, config.h, config.grading_factor)
        return _write_report_artifacts(report, config, out_dir)
    if config.kind == "reproduce_example_2":
        report = reproduce_table(2, config.h, config.grading_factor)
        return _write_report_artifacts(report, config, out_dir)
    if config.kind == "sl_vs_sloshing":
        report = sl_vs_sloshing(
            config.q, config.surface_length, config.h, config.kmax, config.grading_factor
        )
        return _write_report_artifacts(report, config, out_dir)
    if config.kind == "peters_phase":
        return _run_peters_phase(config, out_dir)
    if config.kind == "quasimode_residual":
        return _run_quasimode_residual(config, out_dir)
    if config.kind == "convergence":
        return _run_convergence(config, out_dir)
    if config.kind == "custom":
        return _run_custom(config, out_dir)
    raise ConfigError("kind", f"unhandled kind {config.kind!r}")
