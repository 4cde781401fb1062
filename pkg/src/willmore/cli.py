"""Batch front end.

    willmore run <config.json> [--out DIR] [--trace] [--timing]
    willmore validate <config.json>
    willmore s3-index --surface {great-sphere|clifford-torus}

The config is a JSON file describing the meromorphic input data, the test
basis degree, the radius schedule, quadrature resolution, and which checks to
run.  Reports are UTF-8 JSON; plot data comes out as RFC-4180 CSV files.
Outputs are deterministic for a fixed config (timing is only included with
--timing, so default reports are byte-identical across reruns).  The
environment variable WILLMORE_THREADS caps worker threads used to evaluate
quadrature pieces.

Exit codes: 0 when every requested check passes, 1 when some check fails,
2 on a configuration error, 3 on a numerical-stage failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .charts import Chart, IDENTITY
from .errors import ConfigError, WillmoreError
from .fields import ConstantField, SpherePolynomial, sphere_poly_basis
from .geometry import (
    boundary_one_form_values,
    composite_w,
    invert,
    one_form_exterior_derivative,
    willmore_residual,
)
from .quadrature import QuadratureSpec, annulus_nodes, circulation
from .rational import from_coeff_lists, is_infinity
from .s3 import clifford_torus, great_sphere, spectrum_report
from .variation import (
    DEFAULT_SCHEDULE,
    assemble_Q,
    fd_hessian_oracle,
    gram_matrix,
    inertia,
    mobius_invariance_check,
    polynomial_test_basis,
)
from .weierstrass import build_from_f, build_from_gauss_data, quantization_report

ALLOWED_CHECKS = ("null", "quantization", "stokes", "oracle", "mobius", "willmore_residual")


@dataclass
class RunConfig:
    input: dict
    basis_degree: int = 2
    radii_schedule: tuple = DEFAULT_SCHEDULE
    quadrature: QuadratureSpec = field(default_factory=QuadratureSpec)
    checks: tuple = ALLOWED_CHECKS
    seed: int = 20240
    oracle_samples: int = 3
    out_dir: str = "."

    @staticmethod
    def from_dict(d):
        if not isinstance(d, dict):
            raise ConfigError("config root must be a JSON object")
        if "input" not in d:
            raise ConfigError("missing 'input' section")
        basis_degree = d.get("basis_degree", 2)
        if not isinstance(basis_degree, int) or not (0 <= basis_degree <= 6):
            raise ConfigError("basis_degree must be an integer in [0, 6]")
        radii = tuple(float(r) for r in d.get("radii_schedule", DEFAULT_SCHEDULE))
        if any(r <= 0 for r in radii) or any(
            a <= b for a, b in zip(radii[:-1], radii[1:])
        ):
            raise ConfigError("radii_schedule must be strictly decreasing and positive")
        if len(radii) < 4:
            raise ConfigError("radii_schedule needs at least 4 entries")
        checks = tuple(d.get("checks", ALLOWED_CHECKS))
        bad = set(checks) - set(ALLOWED_CHECKS)
        if bad:
            raise ConfigError(f"unknown checks: {sorted(bad)}")
        try:
            quad = QuadratureSpec.from_dict(d.get("quadrature"))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad quadrature section: {exc}") from None
        seed = int(d.get("seed", 20240))
        return RunConfig(
            input=d["input"],
            basis_degree=basis_degree,
            radii_schedule=radii,
            quadrature=quad,
            checks=checks,
            seed=seed,
            oracle_samples=int(d.get("oracle_samples", 3)),
            out_dir=d.get("out_dir", "."),
        )


def _parse_rational(d):
    try:
        return from_coeff_lists(d["num"], d["den"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad rational function spec: {exc}") from None


def build_input(input_section):
    mode = input_section.get("mode")
    translation = tuple(input_section.get("translation", (0.0, 0.0, 0.0)))
    if mode == "direct":
        f = [_parse_rational(rf) for rf in input_section["f"]]
        if len(f) != 3:
            raise ConfigError("direct mode needs exactly 3 components")
        return build_from_f(f, translation)
    if mode == "gauss":
        g = _parse_rational(input_section["g"])
        eta = _parse_rational(input_section["eta"])
        return build_from_gauss_data(g, eta, translation)
    raise ConfigError("input.mode must be 'direct' or 'gauss'")


def _end_summary(imm):
    out = []
    for e in imm.ends:
        out.append(
            {
                "location": "inf" if is_infinity(e.location) else [e.location.real, e.location.imag],
                "residue_vector": [[c.real, c.imag] for c in e.residue_vector],
                "residue_norm": float(e.residue_norm),
                "alpha": float(e.alpha),
                "asymptotic_normal": [float(x) for x in e.asymptotic_normal],
                "planar": bool(e.planar),
                "embedded": bool(e.embedded),
            }
        )
    return out


def _safe_radii(imm, r_candidates=(2.0, 3.0, 4.5, 6.0)):
    """Two circle radii in the reference chart staying away from punctures."""
    finite = [p for p in imm.end_points() if not is_infinity(p)]
    good = [r for r in r_candidates if all(abs(abs(p) - r) > 0.2 for p in finite)]
    return good[0], good[1]


def run_pipeline(config: RunConfig, trace_path=None):
    """Execute the requested stages; returns (report, all_passed)."""
    report = {"config_echo": {"basis_degree": config.basis_degree,
                              "radii_schedule": list(config.radii_schedule),
                              "checks": list(config.checks),
                              "seed": config.seed},
              "checks": {}, "stages": {}}
    rng = np.random.default_rng(config.seed)
    passed = {}
    timings = {}

    def stage(name, fn):
        t0 = time.perf_counter()
        try:
            out = fn()
            timings[name] = time.perf_counter() - t0
            return out
        except WillmoreError as exc:
            timings[name] = time.perf_counter() - t0
            report["stages"][name] = {"error": type(exc).__name__, "message": str(exc)}
            raise

    imm = stage("build", lambda: build_input(config.input))
    report["immersion"] = {
        "m": imm.m,
        "genus": imm.genus,
        "translation": list(imm.translation),
        "ends": _end_summary(imm),
        "null_residual": imm.null_residual(seed=config.seed),
    }
    report["stages"]["build"] = {"ok": True}

    if "null" in config.checks:
        resid = imm.null_residual(seed=config.seed)
        passed["null"] = bool(resid < 1e-10)
        report["checks"]["null"] = {"residual": resid, "pass": passed["null"]}

    if "quantization" in config.checks:
        q = stage("quantization", lambda: quantization_report(imm, config.quadrature))
        tc_err = abs(q["total_curvature"] - q["expected_total_curvature"])
        w_err = abs(q["willmore_of_inversion"] - q["expected_willmore"])
        tol = max(1e-6, 1e-3 * q["expected_willmore"])
        passed["quantization"] = bool(tc_err < tol and w_err < tol)
        q["pass"] = passed["quantization"]
        report["checks"]["quantization"] = q
        report["quantization"] = q

    if "willmore_residual" in config.checks:
        def _resid():
            psi = invert(imm.surface())
            pts = rng.standard_normal(50) * 1.2 + 1j * rng.standard_normal(50) * 1.2
            keep = np.ones(len(pts), bool)
            for p in imm.end_points():
                if not is_infinity(p):
                    keep &= np.abs(pts - p) > 0.1
            return float(np.max(willmore_residual(psi, pts[keep])))

        worst = stage("willmore_residual", _resid)
        passed["willmore_residual"] = bool(worst < 1e-5)
        report["checks"]["willmore_residual"] = {"max_residual": worst,
                                                 "pass": passed["willmore_residual"]}

    if "stokes" in config.checks:
        def _stokes():
            surface = imm.surface()
            v = SpherePolynomial({(1, 0, 1): 0.7, (0, 0, 1): -0.3, (2, 0, 0): 0.4})
            w = composite_w(surface, v)

            def one_form(chart, nodes):
                A1, A2 = boundary_one_form_values(surface, w, chart, nodes)
                return A1.value, A2.value

            r1, r2 = _safe_radii(imm)
            c1 = circulation(one_form, IDENTITY, r1, nt=512)
            c2 = circulation(one_form, IDENTITY, r2, nt=512)
            nodes, wts = annulus_nodes(r1, r2, 40, 256, 2.0)
            area = float(np.dot(one_form_exterior_derivative(surface, w, IDENTITY, nodes), wts))
            rel = abs((c2 - c1) - area) / max(1e-12, abs(area))
            return {"r1": r1, "r2": r2, "circulation_difference": c2 - c1,
                    "area_integral": area, "relative_error": rel}

        data = stage("stokes", _stokes)
        passed["stokes"] = bool(data["relative_error"] < 1e-6)
        data["pass"] = passed["stokes"]
        report["checks"]["stokes"] = data

    assembly = None
    basis = None
    if config.checks:
        def _assemble():
            b = polynomial_test_basis(imm, config.basis_degree)
            a = assemble_Q(imm, b, config.radii_schedule, config.quadrature)
            return b, a

        basis, assembly = stage("assemble", _assemble)
        gram = gram_matrix(basis, config.quadrature)
        spectral = inertia(assembly, imm.m, gram=gram)
        report["spectral"] = spectral.to_dict()
        report["spectral"]["extrapolation_error"] = assembly.extrapolation_error
        report["spectral"]["observed_order"] = (
            assembly.observed_order if math.isfinite(assembly.observed_order) else None
        )
        report["regularized_vs_R"] = {
            str(R): [float(x) for x in np.diag(assembly.regularized[float(R)])]
            for R in assembly.radii
        }
        # eigenvalues for each nested degree (leading principal submatrices)
        nested = {}
        for deg in range(config.basis_degree + 1):
            n_sub = (deg + 1) ** 2
            sub = assembly.Q[:n_sub, :n_sub]
            gsub = gram[:n_sub, :n_sub]
            from scipy.linalg import eigh

            nested[str(deg)] = [float(x) for x in np.sort(eigh(sub, gsub, eigvals_only=True))]
        report["eigenvalues_by_degree"] = nested
        report["stages"]["assemble"] = {"ok": True}

    if "oracle" in config.checks:
        def _oracle():
            out = []
            basis2 = sphere_poly_basis(2)
            for _ in range(config.oracle_samples):
                coefs = rng.uniform(-1.0, 1.0, len(basis2))
                v = None
                for c, b in zip(coefs, basis2):
                    v = c * b if v is None else v + c * b
                from .variation import q_value

                qv = q_value(imm, v, config.radii_schedule, config.quadrature)
                fd = fd_hessian_oracle(imm, v)
                ok = abs(qv - fd) <= max(1e-3 * max(abs(qv), abs(fd)), 1e-6)
                out.append({"q": qv, "fd": fd, "delta": abs(qv - fd), "pass": bool(ok)})
            return out

        rows = stage("oracle", _oracle)
        passed["oracle"] = all(r["pass"] for r in rows)
        report["checks"]["oracle"] = {"samples": rows, "pass": passed["oracle"]}

    if "mobius" in config.checks:
        def _mobius():
            rot = Chart(np.exp(0.7j), 0.0, 0.0, 1.0)
            inv_chart = Chart(0.0, 1.0, 1.0, 0.0)
            v = ConstantField(1.0)
            d_rot = mobius_invariance_check(imm, v, rot, config.radii_schedule, config.quadrature)
            d_inv = mobius_invariance_check(imm, v, inv_chart, config.radii_schedule, config.quadrature)
            return {"rotation_delta": d_rot, "inversion_delta": d_inv}

        data = stage("mobius", _mobius)
        passed["mobius"] = bool(data["rotation_delta"] < 1e-6 and data["inversion_delta"] < 1e-6)
        data["pass"] = passed["mobius"]
        report["checks"]["mobius"] = data

    report["verdict_present"] = assembly is not None
    report["pass_map"] = passed
    report["all_passed"] = all(passed.values()) if passed else True
    report["_timings"] = timings
    if trace_path is not None:
        _write_trace(imm, config, trace_path)
    return report, report["all_passed"]


def _write_trace(imm, config, path):
    from .quadrature import sphere_cover

    pieces = sphere_cover(imm.caps(), config.quadrature, config.quadrature.start_level)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["piece", "chart_a", "chart_b", "chart_c", "chart_d", "u_re", "u_im", "weight"])
        for i, piece in enumerate(pieces):
            ch = piece.chart
            for u, wt in zip(piece.nodes, piece.weights):
                w.writerow([i, ch.a, ch.b, ch.c, ch.d, f"{u.real:.17g}", f"{u.imag:.17g}", f"{wt:.17g}"])


def emit_plot_data(report, out_dir):
    """Write the CSV companions of a run report; returns the paths written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    path = out_dir / "summary.csv"
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(["key", "value"])
        w.writerow(["m", report["immersion"]["m"]])
        w.writerow(["null_residual", f"{report['immersion']['null_residual']:.17g}"])
        for name, ok in report.get("pass_map", {}).items():
            w.writerow([f"check_{name}", "pass" if ok else "fail"])
        if "quantization" in report:
            w.writerow(["total_curvature", f"{report['quantization']['total_curvature']:.17g}"])
            w.writerow(["willmore_of_inversion", f"{report['quantization']['willmore_of_inversion']:.17g}"])
        if "spectral" in report:
            w.writerow(["negative_count", report["spectral"]["negative_count"]])
            w.writerow(["verdict", report["spectral"]["verdict"]])
    written.append(path)

    if "eigenvalues_by_degree" in report:
        path = out_dir / "eigenvalues_vs_basis.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["degree", "basis_size", "eigenvalue_index", "eigenvalue"])
            for deg, eigs in report["eigenvalues_by_degree"].items():
                for i, x in enumerate(eigs):
                    w.writerow([deg, (int(deg) + 1) ** 2, i, f"{x:.17g}"])
        written.append(path)

    if "regularized_vs_R" in report:
        path = out_dir / "regularized_vs_R.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["R", "diag_index", "regularized_value"])
            for R, diag in report["regularized_vs_R"].items():
                for i, x in enumerate(diag):
                    w.writerow([R, i, f"{x:.17g}"])
        written.append(path)

    if "stokes" in report.get("checks", {}):
        path = out_dir / "boundary_fit.csv"
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow(["key", "value"])
            for k, v in report["checks"]["stokes"].items():
                w.writerow([k, v if isinstance(v, bool) else f"{v:.17g}" if isinstance(v, float) else v])
        written.append(path)
    return written


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"not JSON serializable: {type(x)}")


def main(argv=None):
    parser = argparse.ArgumentParser(prog="willmore",
                                     description="minimal surfaces with planar ends: "
                                                 "energy quantization and index bounds")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the pipeline described by a config file")
    p_run.add_argument("config", type=Path)
    p_run.add_argument("--out", type=Path, default=None, help="output directory")
    p_run.add_argument("--trace", action="store_true", help="dump quadrature nodes to CSV")
    p_run.add_argument("--timing", action="store_true", help="include wall-clock timings in the report")

    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("config", type=Path)

    p_s3 = sub.add_parser("s3-index", help="closed-form Jacobi spectrum reports")
    p_s3.add_argument("--surface", required=True, choices=["great-sphere", "clifford-torus"])
    p_s3.add_argument("--cutoff", type=int, default=6)

    args = parser.parse_args(argv)

    if args.command == "s3-index":
        surface = great_sphere() if args.surface == "great-sphere" else clifford_torus()
        print(json.dumps(spectrum_report(surface, args.cutoff), indent=2, sort_keys=True))
        return 0

    try:
        with open(args.config, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
        config = RunConfig.from_dict(raw)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    if args.command == "validate":
        print("config ok")
        return 0

    out_dir = args.out or Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    trace_path = out_dir / "trace.csv" if args.trace else None
    try:
        report, ok = run_pipeline(config, trace_path=trace_path)
    except WillmoreError as exc:
        failure = {"error": type(exc).__name__, "message": str(exc)}
        for key in ("pole", "residue", "location", "order", "max_residual", "step"):
            if hasattr(exc, key):
                val = getattr(exc, key)
                failure[key] = str(val) if isinstance(val, complex) else val
        with open(out_dir / "report.json", "w", encoding="utf-8") as fh:
            json.dump({"failure": failure}, fh, indent=2, sort_keys=True, default=_json_default)
        print(f"numerical stage failed: {failure['error']}: {failure['message']}", file=sys.stderr)
        return 3

    timings = report.pop("_timings")
    if args.timing:
        report["timing_seconds"] = {k: round(v, 3) for k, v in timings.items()}
    with open(out_dir / "report.json", "w", encoding="utf-8") as fh:
        json.dump(report, fh, indent=2, sort_keys=True, default=_json_default)
    emit_plot_data(report, out_dir)
    print(f"report written to {out_dir / 'report.json'}; all checks "
          f"{'passed' if ok else 'FAILED'}")
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
