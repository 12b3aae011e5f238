"""Command-line entry point.

Subcommands: ``benchmark minimal``, ``verify <suite>``, ``sweep <spec.json>``,
``hierarchy``, ``protocol <spec.json>``. Every command is deterministic given
identical flags and seeds; floats print through ``repr`` (shortest exact
round-trip) and CSV cells use 17 significant digits, '.' decimals, ','
separators, and LF line endings.

Exit codes: 0 success, 1 tolerance or property failure, 2 input/validation
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import alignment as al
from . import thermo
from .advantage import AdvantageReport, advantage, optimize_advantage
from .operators import HermitianOperator, ValidationError, density_from_matrix
from .task import MinimalTaskInstance
from .verify import SUITES, PropertyResult, run_suites, sample_device_arrays

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2
EXIT_IO = 3

BENCHMARK_TARGET = 0.14644661
BENCHMARK_TOL = 1e-5


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _print(line: str = "") -> None:
    sys.stdout.write(line + "\n")


def _write_csv(path: str, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(x) for x in row))
    with open(path, "w", newline="") as handle:
        handle.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# benchmark
# ---------------------------------------------------------------------------


def _report_json(report: AdvantageReport) -> dict:
    return {
        "quantum_value": report.quantum_value,
        "classical_value": report.classical_value,
        "advantage": report.advantage,
        "optimal_theta": report.optimal_theta,
        "optimal_mu": list(report.optimal_mu),
        "analytic_gap_bound": report.analytic_gap_bound,
    }


def cmd_benchmark(args) -> int:
    if args.target != "minimal":
        _print(f"unknown benchmark target {args.target!r}; expected 'minimal'")
        return EXIT_INVALID
    report = optimize_advantage(
        grid_resolution=args.resolution, refine_tolerance=args.refine_tolerance
    )
    ok = abs(report.advantage - BENCHMARK_TARGET) < BENCHMARK_TOL
    if args.json:
        payload = _report_json(report)
        payload["status"] = "PASS" if ok else "FAIL"
        _print(json.dumps(payload, indent=2))
    else:
        _print(f"{'quantum value':<18}{report.quantum_value!r}")
        _print(f"{'classical value':<18}{report.classical_value!r}")
        _print(f"{'advantage':<18}{report.advantage!r}")
        _print(f"{'optimal theta':<18}{report.optimal_theta!r}")
        _print(f"{'optimal mu0':<18}{report.optimal_mu[0]!r}")
        _print(f"{'optimal mu1':<18}{report.optimal_mu[1]!r}")
        _print(f"{'target advantage':<18}{BENCHMARK_TARGET!r}")
        _print(f"{'status':<18}{'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_FAILURE


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _property_json(result: PropertyResult) -> dict:
    payload = {
        "name": result.name,
        "checks": result.checks,
        "failures": result.failures,
        "passed": result.passed,
    }
    if result.note:
        payload["note"] = result.note
    return payload


def cmd_verify(args) -> int:
    if args.trials is not None and args.trials < 1:
        _print(f"--trials must be at least 1, got {args.trials}")
        return EXIT_INVALID
    results = run_suites(args.suite, trials=args.trials, seed=args.seed)
    passed = all(r.passed for r in results)
    trials_label = "default" if args.trials is None else str(args.trials)
    if args.json:
        _print(
            json.dumps(
                {
                    "suite": args.suite,
                    "seed": args.seed,
                    "trials": args.trials,
                    "properties": [_property_json(r) for r in results],
                    "passed": passed,
                },
                indent=2,
            )
        )
    else:
        _print(f"verify suite={args.suite} seed={args.seed} trials={trials_label}")
        for r in results:
            status = "PASS" if r.passed else "FAIL"
            note = f" {r.note}" if r.note else ""
            _print(f"{status} {r.name:<32} checks={r.checks} failures={r.failures}{note}")
        count = sum(r.passed for r in results)
        _print(f"verify result: {'PASS' if passed else 'FAIL'} ({count}/{len(results)} properties)")
    if passed:
        return EXIT_OK
    first = next(r for r in results if not r.passed)
    if first.counterexample is not None:
        path = args.out or f"counterexample_{first.name.replace('.', '_')}.json"
        try:
            with open(path, "w") as handle:
                json.dump(
                    {"property": first.name, "counterexample": first.counterexample},
                    handle,
                    indent=2,
                )
        except OSError as exc:
            _print(f"could not write counterexample: {exc}")
            return EXIT_IO
        _print(f"counterexample written to {path}")
    return EXIT_FAILURE


# ---------------------------------------------------------------------------
# sweep
# ---------------------------------------------------------------------------

SWEEP_TARGETS = ("minimal_advantage", "hierarchy_equatorial", "protocol_lambda", "law_soundness")


@dataclass(frozen=True)
class SweepSpec:
    target: str
    ranges: dict[str, tuple[float, float, int]]
    seed: int
    output_path: str


def _sweep_spec_from_json(data: dict) -> SweepSpec:
    if not isinstance(data, dict):
        raise ValidationError("sweep spec must be a JSON object")
    target = data.get("target")
    if target not in SWEEP_TARGETS:
        raise ValidationError(f"field 'target' must be one of {SWEEP_TARGETS}, got {target!r}")
    raw_ranges = data.get("ranges")
    if not isinstance(raw_ranges, dict) or not raw_ranges:
        raise ValidationError("field 'ranges' must be a nonempty object of named ranges")
    ranges = {}
    for name, r in raw_ranges.items():
        try:
            start, stop, count = float(r["start"]), float(r["stop"]), int(r["count"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValidationError(f"range {name!r} needs numeric start/stop/count: {exc}")
        if count < 1:
            raise ValidationError(f"range {name!r} has count {count} < 1")
        if stop < start:
            raise ValidationError(f"range {name!r} is not well-ordered: {start} > {stop}")
        ranges[name] = (start, stop, count)
    seed = int(data.get("seed", 0))
    output_path = data.get("output_path")
    if not isinstance(output_path, str) or not output_path:
        raise ValidationError("field 'output_path' must be a nonempty string")
    return SweepSpec(target=target, ranges=ranges, seed=seed, output_path=output_path)


def _grid(spec: SweepSpec, name: str, default=None):
    if name not in spec.ranges:
        if default is not None:
            return default
        raise ValidationError(f"sweep target {spec.target!r} needs a range named {name!r}")
    start, stop, count = spec.ranges[name]
    return np.linspace(start, stop, count)


def _sweep_rows(spec: SweepSpec) -> tuple[list[str], list[list]]:
    if spec.target == "minimal_advantage":
        thetas = _grid(spec, "theta")
        mu0s = _grid(spec, "mu0", np.array([0.5]))
        mu1s = _grid(spec, "mu1", np.array([0.5]))
        header = ["theta", "mu0", "mu1", "quantum_value", "classical_value", "advantage"]
        rows = []
        for theta in thetas:
            for mu0 in mu0s:
                for mu1 in mu1s:
                    report = advantage(
                        MinimalTaskInstance(float(theta), float(mu0), float(mu1))
                    )
                    rows.append(
                        [
                            float(theta),
                            float(mu0),
                            float(mu1),
                            report.quantum_value,
                            report.classical_value,
                            report.advantage,
                        ]
                    )
        return header, rows

    if spec.target == "hierarchy_equatorial":
        ns = sorted({int(round(x)) for x in _grid(spec, "n")})
        header = ["n", "r", "v_c", "classical", "quantum_at_1"]
        rows = []
        for n in ns:
            r = al.equatorial_threshold(n)
            rows.append([n, r, r, 0.5 * (1.0 + r), 1.0])
        return header, rows

    if spec.target == "protocol_lambda":
        lams = _grid(spec, "lambda")
        header = [
            "lambda",
            "w_quench",
            "w_isothermal",
            "w_total",
            "w_formula",
            "free_energy_gap",
            "deficit",
        ]
        rows = []
        rho = np.diag([0.0, 1.0])
        h = np.diag([0.0, 1.0])
        for lam in lams:
            result = thermo.run_cutoff_protocol(
                thermo.ProtocolSpec(
                    rho=density_from_matrix(rho),
                    hamiltonian=HermitianOperator(h),
                    temperature=1.0,
                    cutoff_lambda=float(lam),
                )
            )
            rows.append(
                [
                    float(lam),
                    result.w_quench,
                    result.w_isothermal,
                    result.w_total,
                    result.w_formula,
                    result.free_energy_gap,
                    result.free_energy_gap - result.w_total,
                ]
            )
        return header, rows

    # law_soundness
    thetas = _grid(spec, "theta")
    mus = _grid(spec, "mu")
    devices = 50
    header = ["theta", "mu", "devices", "max_law_slack", "max_ellipse_slack"]
    rows = []
    rng = np.random.default_rng(np.random.SeedSequence([spec.seed, 97]))
    for theta in thetas:
        for mu in mus:
            inst = MinimalTaskInstance(float(theta), float(mu), float(mu))
            w, u, v, alpha, beta = sample_device_arrays(rng, devices, 8, inst.mu0, inst.mu1)
            c2, s2 = math.cos(2.0 * inst.theta), math.sin(2.0 * inst.theta)
            t = c2 * u + s2 * v
            mu0 = (w * alpha).sum(axis=1)
            mu1 = (w * beta).sum(axis=1)
            a00 = (w * (1.0 + u) * alpha).sum(axis=1)
            a10 = (w * (1.0 + t) * alpha).sum(axis=1)
            a11 = (w * (1.0 + t) * beta).sum(axis=1)
            residual = (c2 * (a10 - mu0) - (a00 - mu0)) / s2
            r0_sq = mu0 * (1.0 - mu0)
            r1 = np.sqrt(np.clip(mu1 * (1.0 - mu1), 0.0, None))
            ratio = np.clip(1.0 - residual * residual / r0_sq, 0.0, None)
            bound = np.minimum(0.5 * (a00 + mu1 + r1 * np.sqrt(ratio)), 1.0)
            law_slack = float((0.5 * (a00 + a11) - bound).max())
            ellipse_slack = float(((a10 - mu0) ** 2 + residual**2 - r0_sq).max())
            rows.append([float(theta), float(mu), devices, law_slack, ellipse_slack])
    return header, rows


def cmd_sweep(args) -> int:
    try:
        with open(args.spec) as handle:
            data = json.load(handle)
    except OSError as exc:
        _print(f"cannot read sweep spec: {exc}")
        return EXIT_IO
    except json.JSONDecodeError as exc:
        _print(f"sweep spec is not valid JSON: {exc}")
        return EXIT_INVALID
    try:
        spec = _sweep_spec_from_json(data)
        header, rows = _sweep_rows(spec)
    except ValidationError as exc:
        _print(f"invalid sweep spec: {exc}")
        return EXIT_INVALID
    path = args.out or spec.output_path
    try:
        _write_csv(path, header, rows)
    except OSError as exc:
        _print(f"cannot write sweep output: {exc}")
        return EXIT_IO
    _print(f"wrote {len(rows)} rows to {path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# hierarchy
# ---------------------------------------------------------------------------


def cmd_hierarchy(args) -> int:
    try:
        if args.family == "equatorial":
            if args.n is None:
                _print("--family equatorial requires --n")
                return EXIT_INVALID
            family = al.equatorial_family(args.n)
            label = args.n
        else:
            try:
                with open(args.family) as handle:
                    family = al.family_from_json(json.load(handle))
            except OSError as exc:
                _print(f"cannot read family file: {exc}")
                return EXIT_IO
            except json.JSONDecodeError as exc:
                _print(f"family file is not valid JSON: {exc}")
                return EXIT_INVALID
            label = family.size
        outcome = al.best_alignment(family)
        report = al.hierarchy_threshold(family, args.visibility)
    except ValidationError as exc:
        _print(f"invalid hierarchy input: {exc}")
        return EXIT_INVALID

    payload = {
        "alignment": {
            "r_value": outcome.r_value,
            "best_direction": outcome.best_direction.tolist(),
            "best_signs": list(outcome.best_signs),
            "method": outcome.method,
        },
        "threshold": {
            "visibility": args.visibility,
            "quantum": report.quantum,
            "classical": report.classical,
            "advantageous": report.advantageous,
            "v_c": report.v_c,
        },
    }
    _print(json.dumps(payload, indent=2))
    header = ["n", "r", "v_c", "classical", "quantum_at_1"]
    rows = [[label, outcome.r_value, report.v_c, report.classical, 1.0]]
    if args.out:
        try:
            _write_csv(args.out, header, rows)
        except OSError as exc:
            _print(f"cannot write CSV: {exc}")
            return EXIT_IO
        _print(f"wrote 1 row to {args.out}")
    else:
        _print(",".join(header))
        for row in rows:
            _print(",".join(_fmt(x) for x in row))
    return EXIT_OK


# ---------------------------------------------------------------------------
# protocol
# ---------------------------------------------------------------------------


def cmd_protocol(args) -> int:
    try:
        with open(args.spec) as handle:
            data = json.load(handle)
    except OSError as exc:
        _print(f"cannot read protocol spec: {exc}")
        return EXIT_IO
    except json.JSONDecodeError as exc:
        _print(f"protocol spec is not valid JSON: {exc}")
        return EXIT_INVALID
    try:
        spec = thermo.protocol_spec_from_json(data)
        result = thermo.run_cutoff_protocol(spec)
    except ValidationError as exc:
        _print(f"invalid protocol spec: {exc}")
        return EXIT_INVALID
    payload = thermo.protocol_result_to_json(result)
    if args.json:
        _print(json.dumps(payload, indent=2))
    else:
        for key, value in payload.items():
            _print(f"{key:<18}{value!r}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="workbound",
        description="Average-work benchmarks for commuting versus incompatible settings",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_bench = sub.add_parser("benchmark", help="reproduce the optimal-advantage table")
    p_bench.add_argument("target", choices=["minimal"])
    p_bench.add_argument("--resolution", type=int, default=64)
    p_bench.add_argument("--refine-tolerance", type=float, default=1e-6)
    p_bench.add_argument("--json", action="store_true")
    p_bench.set_defaults(func=cmd_benchmark)

    p_verify = sub.add_parser("verify", help="run a randomized property suite")
    p_verify.add_argument("suite", choices=[*SUITES, "all"])
    p_verify.add_argument("--trials", type=int, default=None)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--json", action="store_true")
    p_verify.add_argument("--out", default=None, help="counterexample dump path")
    p_verify.set_defaults(func=cmd_verify)

    p_sweep = sub.add_parser("sweep", help="evaluate a target over a parameter grid")
    p_sweep.add_argument("spec", help="sweep spec JSON file")
    p_sweep.add_argument("--out", default=None, help="override the output CSV path")
    p_sweep.set_defaults(func=cmd_sweep)

    p_hier = sub.add_parser("hierarchy", help="alignment benchmark for a direction family")
    p_hier.add_argument("--family", required=True, help="'equatorial' or a family JSON file")
    p_hier.add_argument("--n", type=int, default=None)
    p_hier.add_argument("--visibility", type=float, default=1.0)
    p_hier.add_argument("--out", default=None, help="CSV output path")
    p_hier.set_defaults(func=cmd_hierarchy)

    p_proto = sub.add_parser("protocol", help="run the cutoff protocol from a spec file")
    p_proto.add_argument("spec", help="protocol spec JSON file")
    p_proto.add_argument("--json", action="store_true")
    p_proto.set_defaults(func=cmd_protocol)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        _print(f"validation error: {exc}")
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
