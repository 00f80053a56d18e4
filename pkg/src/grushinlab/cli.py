"""Command-line front end.

    grushinlab run transfer --input s2.json --lambda 1,0
    grushinlab run wave --modes 4 --omega-min 0.5 --omega-max 4.5 --omega-steps 400
    grushinlab batch sweeps.txt

Reports go to stdout as deterministic JSON. Domain failures (singular
matrices, ill-posed problems, violated hypotheses) exit with status 2 and a
JSON error record on stderr; usage and parse errors exit with status 1.
Negative numbers must be attached with ``=``, e.g. ``--lambda=-1,0``.
"""
from __future__ import annotations

import argparse
import csv
import json
import shlex
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import certified_bound, gramian, hautus_margin, weighted_hautus
from .errors import DomainError
from .grushin import assemble, recover_inverse
from .io import (
    SystemFileError,
    _parse_matrix,
    dumps,
    load_system,
    make_report,
    system_to_dict,
)
from .iterate import IterationSpec, direct_iterated_inverse, iterate_system, iterated_inverse_blocks
from .lti import grushin_at, resolvent, simulate, transfer_function
from .riesz import modal_from_system, reachable_weights
from .spectral import ContourSpec, spectral_projection, trace_counts
from .wave import WaveConfig, decay_report, wave_margin_scan

COMMANDS = (
    "schur",
    "transfer",
    "hautus",
    "gramian",
    "certify",
    "trace",
    "project",
    "iterate",
    "riesz",
    "wave",
    "simulate",
)
DEFAULT_TOL = 1e-8


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _complex(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected RE,IM but got {text!r}")


def _complex_list(text: str) -> list[complex]:
    return [_complex(item) for item in text.split(";") if item.strip()]


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="grushinlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="mode", required=True)

    run = sub.add_parser("run", help="run one analysis")
    run.add_argument("command", choices=COMMANDS)
    run.add_argument("--input", help="system description file")
    run.add_argument("--lambda", dest="lam", type=_complex, help="spectral parameter RE,IM")
    run.add_argument("--omega-min", type=float)
    run.add_argument("--omega-max", type=float)
    run.add_argument("--omega-steps", type=int)
    run.add_argument("--weights", type=_float_list, help="modal weights for hautus")
    run.add_argument("--no-refine", action="store_true", help="scan the grid as given")
    run.add_argument("--contour-center", type=_complex, default=0j)
    run.add_argument("--contour-radius", type=float)
    run.add_argument("--nodes", type=int, default=256)
    run.add_argument("--g", type=_float_list, default=[1.0],
                     help="polynomial coefficients, lowest degree first")
    run.add_argument("--t-end", type=float)
    run.add_argument("--dt", type=float)
    run.add_argument("--kind", choices=("observability", "controllability"),
                     default="observability")
    run.add_argument("--modes", type=int)
    run.add_argument("--spec", help="iteration spec file with n_minus and n_plus")
    run.add_argument("--z0", type=_complex_list, help="initial state RE,IM;RE,IM;...")
    run.add_argument("--u", type=_complex_list, help="constant input RE,IM;...")
    run.add_argument("--csv", help="write the frequency sweep (omega, margin) here")
    run.add_argument("--tol", type=float, default=DEFAULT_TOL,
                     help="positivity threshold for classification flags")
    run.add_argument("--seed", type=int, default=0,
                     help="seed for randomized test vectors (simulate without --z0)")

    batch = sub.add_parser("batch", help="run one invocation per line of FILE")
    batch.add_argument("file")
    return parser


def _require(args, *names):
    missing = [n for n in names if getattr(args, n.lstrip("-").replace("-", "_")) is None]
    if missing:
        raise UsageError(
            f"{args.command} requires " + ", ".join("--" + n.replace("_", "-") for n in missing)
        )


def _omega_grid(args) -> np.ndarray:
    _require(args, "omega_min", "omega_max", "omega_steps")
    if args.omega_steps < 1:
        raise UsageError("--omega-steps must be at least 1")
    return np.linspace(args.omega_min, args.omega_max, args.omega_steps)


def _write_csv(path, report) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["omega", "margin"])
        for w, v in zip(report.grid, report.per_freq_margin):
            writer.writerow(["%.17g" % w, "%.17g" % v])


def _contour(args) -> ContourSpec:
    _require(args, "contour_radius")
    try:
        return ContourSpec(args.contour_center, args.contour_radius, args.nodes)
    except ValueError as exc:
        raise UsageError(str(exc))


def _load(args):
    _require(args, "input")
    return load_system(args.input)


def _hautus_payload(report, tol):
    return {
        "grid": report.grid,
        "per_freq_margin": report.per_freq_margin,
        "margin": report.margin,
        "argmin_freq": report.argmin_freq,
        "near_eigenfrequency": report.near_eigenfrequency,
        "positive": report.margin > tol,
    }


def _cmd_schur(args, inputs):
    system = _load(args)
    _require(args, "lam")
    n = system.n_states
    problem = assemble(args.lam * np.eye(n) - system.a, system.b, system.c, system.d)
    inv = grushin_at(system, args.lam)
    direct = resolvent(system, args.lam)
    recovered = recover_inverse(inv)
    scale = max(np.linalg.norm(direct, 2), 1e-300)
    return {
        "assembled": problem.matrix,
        "E": inv.e,
        "E_plus": inv.e_plus,
        "E_minus": inv.e_minus,
        "E_minus_plus": inv.e_minus_plus,
        "recovered_inverse": recovered,
        "resolvent": direct,
        "relative_discrepancy": float(np.linalg.norm(recovered - direct, 2) / scale),
    }


def _cmd_transfer(args, inputs):
    system = _load(args)
    _require(args, "lam")
    return {"H": transfer_function(system, args.lam)}


def _cmd_hautus(args, inputs):
    system = _load(args)
    grid = _omega_grid(args)
    if args.weights is not None:
        report = weighted_hautus(system, args.weights, grid, refine=not args.no_refine)
    else:
        report = hautus_margin(system, grid, refine=not args.no_refine)
    if args.csv:
        _write_csv(args.csv, report)
    return _hautus_payload(report, args.tol)


def _cmd_gramian(args, inputs):
    system = _load(args)
    _require(args, "t_end")
    w = gramian(system, args.kind, args.t_end)
    lam_min = float(np.linalg.eigvalsh(w)[0])
    return {"kind": args.kind, "W": w, "lambda_min": lam_min, "positive": lam_min > args.tol}


def _cmd_certify(args, inputs):
    system = _load(args)
    _require(args, "lam")
    cb = certified_bound(system, args.lam)
    return {
        "certified_constant": cb.certified_constant,
        "true_constant": cb.true_constant,
        "gap": cb.gap,
        "right_inverse_norm": cb.right_inverse_norm,
        "restricted_norm": cb.restricted_norm,
        "complement_norm": cb.complement_norm,
        "compression_lower": cb.compression_lower,
        "hypothesis_ok": cb.hypothesis_ok,
    }


def _cmd_trace(args, inputs):
    system = _load(args)
    rep = trace_counts(system, _contour(args), args.g)
    return {
        "lhs_count": rep.lhs_count,
        "rhs_count": rep.rhs_count,
        "eig_inside": rep.eig_inside,
        "eh_poles_inside": rep.eh_poles_inside,
        "eh_winding": rep.eh_winding,
        "identity_holds": rep.identity_holds,
    }


def _cmd_project(args, inputs):
    system = _load(args)
    proj = spectral_projection(system, _contour(args))
    return {
        "projection": proj,
        "trace": complex(np.trace(proj)),
        "idempotency_defect": float(np.linalg.norm(proj @ proj - proj, 2)),
    }


def _cmd_iterate(args, inputs):
    system = _load(args)
    _require(args, "spec")
    try:
        doc = json.loads(Path(args.spec).read_text())
        spec = IterationSpec(
            _parse_matrix(doc.get("n_minus"), "n_minus"),
            _parse_matrix(doc.get("n_plus"), "n_plus"),
        )
    except (json.JSONDecodeError, AttributeError) as exc:
        raise SystemFileError(f"iteration spec: {exc}") from exc
    inputs["spec"] = {"n_minus": spec.n_minus, "n_plus": spec.n_plus}
    composed = iterate_system(system, spec)
    payload = {"system": system_to_dict(composed)}
    if args.lam is not None:
        blocks = iterated_inverse_blocks(system, spec, args.lam)
        direct = direct_iterated_inverse(system, spec, args.lam)
        gap = np.linalg.norm(blocks.as_matrix() - direct.as_matrix(), 2)
        payload.update(
            {
                "H1": transfer_function(composed, args.lam),
                "blocks": {
                    "E": blocks.e,
                    "E_plus": blocks.e_plus,
                    "E_minus": blocks.e_minus,
                    "E_minus_plus": blocks.e_minus_plus,
                },
                "composed_vs_direct": float(gap / max(np.linalg.norm(direct.as_matrix(), 2), 1e-300)),
            }
        )
    return payload


def _cmd_riesz(args, inputs):
    system = _load(args)
    _require(args, "t_end")
    modal = modal_from_system(system)
    desc = reachable_weights(modal, args.t_end)
    return {
        "eigenvalues": modal.eigenvalues,
        "weights": desc.weights,
        "frame_lower": desc.frame_lower,
        "frame_upper": desc.frame_upper,
        "time_horizon": desc.time_horizon,
        "riesz_family": desc.frame_lower > args.tol,
    }


def _cmd_wave(args, inputs):
    _require(args, "modes")
    config = WaveConfig(args.modes)
    report = wave_margin_scan(config, _omega_grid(args), refine=not args.no_refine)
    if args.csv:
        _write_csv(args.csv, report)
    modes = decay_report(config)
    payload = _hautus_payload(report, args.tol)
    payload["modes"] = [
        {"k": r.k, "eigenvalues": r.eigenvalues, "spectral_abscissa": r.spectral_abscissa}
        for r in modes
    ]
    payload["spectral_abscissa"] = max(r.spectral_abscissa for r in modes)
    payload["margin_times_n2"] = report.margin * args.modes**2
    return payload


def _cmd_simulate(args, inputs):
    system = _load(args)
    _require(args, "t_end", "dt")
    if args.z0 is not None:
        z0 = np.array(args.z0)
    else:
        rng = np.random.default_rng(args.seed)
        z0 = rng.standard_normal(system.n_states) + 1j * rng.standard_normal(system.n_states)
    inputs["z0"] = z0
    u = None if args.u is None else np.array(args.u)
    traj = simulate(system, z0, u, t_end=args.t_end, dt=args.dt)
    return {
        "times": traj.times,
        "states": traj.states,
        "outputs": traj.outputs,
        "final_state": traj.states[-1],
        "state_norms": np.linalg.norm(traj.states, axis=1),
    }


_HANDLERS = {name: globals()[f"_cmd_{name}"] for name in COMMANDS}


def _inputs(args) -> dict:
    inputs = {k: v for k, v in sorted(vars(args).items()) if k not in ("mode", "input", "spec", "csv")}
    if args.input is not None:
        inputs["system"] = system_to_dict(load_system(args.input))
    return inputs


def _error(name: str, message: str, command: str | None, stream) -> None:
    record = {"error": name, "message": message}
    if command:
        record["command"] = command
    stream.write(dumps(record) + "\n")


def run_args(argv, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    command = None
    try:
        args = build_parser().parse_args(argv)
        if args.mode == "batch":
            return _run_batch(args.file, stdout, stderr)
        command = args.command
        inputs = _inputs(args)
        payload = _HANDLERS[command](args, inputs)
        stdout.write(dumps(make_report(command, inputs, payload)) + "\n")
        return 0
    except DomainError as exc:
        _error(type(exc).__name__, str(exc), command, stderr)
        return 2
    except (UsageError, SystemFileError, OSError) as exc:
        _error(type(exc).__name__, str(exc), command, stderr)
        return 1
    except ValueError as exc:
        # precondition failures of the numerical routines
        _error(type(exc).__name__, str(exc), command, stderr)
        return 2


def _run_batch(path, stdout, stderr) -> int:
    worst = 0
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        argv = shlex.split(line)
        if argv and argv[0] != "run":
            argv = ["run", *argv]
        status = run_args(argv, stdout, stderr)
        if status and not worst:
            worst = status
    return worst


def main(argv=None) -> int:
    return run_args(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
