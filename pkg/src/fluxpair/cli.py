"""Command-line entry point: ``fluxpair <command> [options]``.

Exit status is 0 on success, 1 for configuration or validation errors and 2
when a sweep finished with some failed points.
"""
from __future__ import annotations

import argparse
import json
import sys
import warnings
from pathlib import Path
from typing import List, Optional

import numpy as np

from . import analysis, fitter, io as fio, ramsey, reduction
from .coupled import DEVICE_PARAMS, SystemParams, TruncationConfig, parse_label
from .errors import FitFailure, InvalidArgumentError, LabelingError, ResourceLimitError

DEFAULT_TRANSITIONS = ("000-100", "000-010", "000-001", "100-200", "010-020")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _load_params(args) -> SystemParams:
    p = fio.load_params(args.params) if args.params else DEVICE_PARAMS
    overrides = {k: getattr(args, k) for k in ("fluxonium_basis_dim", "fluxonium_keep", "lc_fock_dim")
                 if getattr(args, k, None) is not None}
    if overrides:
        cur = p.trunc
        p = p.replace(trunc=TruncationConfig(**{**{
            "fluxonium_basis_dim": cur.fluxonium_basis_dim,
            "fluxonium_keep": cur.fluxonium_keep,
            "lc_fock_dim": cur.lc_fock_dim,
            "max_dim": cur.max_dim}, **overrides}))
    return p


def _parse_transition(text: str):
    parts = text.replace(":", "-").split("-")
    if len(parts) != 2:
        raise InvalidArgumentError(f"transition {text!r} must look like 000-100")
    return parse_label(parts[0]), parse_label(parts[1])


def cmd_spectrum(args) -> int:
    if args.transitions is not None and len(args.transitions) == 0:
        raise InvalidArgumentError("no transitions requested")
    transitions = [_parse_transition(t) for t in (args.transitions or DEFAULT_TRANSITIONS)]
    if args.points < 1:
        raise InvalidArgumentError("--points must be at least 1")
    params = _load_params(args)
    grid = np.linspace(args.phi_min, args.phi_max, args.points)
    table = analysis.flux_sweep(params, grid, transitions)
    _emit(table.to_csv(), args.output)
    for phi, msg in table.failures:
        print(f"warning: phi_ext={phi!r} failed: {msg}", file=sys.stderr)
    return 2 if table.failures else 0


def cmd_metrics(args) -> int:
    params = _load_params(args)
    if args.pure_inductive:
        params = params.pure_inductive()
    if args.j_l is not None:
        params = params.replace(J_L=args.j_l)
    _emit(json.dumps(analysis.device_metrics(params, args.phi_ext), indent=2), args.output)
    return 0


def _relative_differences(a: reduction.ReducedParams, b: reduction.ReducedParams) -> dict:
    out = {}
    for name, x, y in zip(a.to_dict(derived=False), a.fields_array(), b.fields_array()):
        den = max(abs(x), abs(y))
        out[name] = 0.0 if den == 0 else float(abs(x - y) / den)
    return out


def cmd_reduce(args) -> int:
    try:
        text = Path(args.circuit).read_text()
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read {args.circuit}: {exc.strerror}") from None
    circuit = reduction.CircuitSpec.from_json(text)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", reduction.RegimeWarning)
        reduced = reduction.reduce_closed_form(circuit, exact_inductive=args.exact_inductive)
    for w in caught:
        print(f"warning: {w.message}", file=sys.stderr)
    out = {"reduced": reduced.to_dict()}
    if args.oracle:
        oracle = reduction.reduce_numeric(circuit)
        diffs = _relative_differences(reduced, oracle)
        cap = [diffs[k] for k in ("C_A", "C_B", "C_LC", "J_C_coeff", "g_A_coeff", "g_B_coeff")]
        out["oracle"] = oracle.to_dict()
        out["relative_differences"] = diffs
        out["max_relative_difference"] = max(diffs.values())
        out["capacitive_max_relative_difference"] = max(cap)
    _emit(json.dumps(out, indent=2), args.output)
    return 0


def cmd_jl_sweep(args) -> int:
    params = _load_params(args)
    points = analysis.coupling_sweep(params, args.jl, mode=args.mode, phi_ext=args.phi_ext)
    _emit(analysis.coupling_sweep_csv(points), args.output)
    return 2 if any(np.isnan(p.zx) for p in points) else 0


def cmd_ramsey(args) -> int:
    if args.points < 8:
        raise InvalidArgumentError("--points must be at least 8")
    times = np.linspace(0.0, args.t_max, args.points)
    trace = ramsey.synthesize_ramsey(args.frequency, args.decay, times, args.noise, args.seed)
    lines = ["time_us,signal"] + [f"{t!r},{s!r}" for t, s in zip(trace.times, trace.signal)]
    _emit("\n".join(lines) + "\n", args.output)
    try:
        res = ramsey.fit_decaying_sinusoid(trace)
    except FitFailure as exc:
        print(f"fit failed: {exc} {exc.diagnostics}", file=sys.stderr)
        return 2
    fitted = {"frequency_khz": res.frequency, "decay_us": res.decay, "amplitude": res.amplitude,
              "phase": res.phase, "offset": res.offset, "residual": res.residual,
              "true_frequency_khz": trace.true_frequency}
    text = json.dumps(fitted, indent=2)
    if args.fit_output:
        Path(args.fit_output).write_text(text)
    else:
        print(text, file=sys.stderr)
    return 0


def cmd_fit(args) -> int:
    try:
        obs = fio.observations_from_csv(Path(args.observations).read_text())
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read {args.observations}: {exc.strerror}") from None
    initial = _load_params(args)
    bounds = None
    if args.bounds:
        raw = fio.read_json(args.bounds)
        if not isinstance(raw, dict):
            raise InvalidArgumentError("bounds JSON must map names to [low, high]")
        try:
            bounds = {k: (float(v[0]), float(v[1])) for k, v in raw.items()}
        except (TypeError, ValueError, IndexError):
            raise InvalidArgumentError("bounds JSON must map names to [low, high]") from None
    res = fitter.fit(obs, initial, bounds=bounds, frozen=args.freeze or (),
                     restarts=args.restarts, seed=args.seed, max_evaluations=args.max_evaluations)
    _emit(json.dumps(fio.fit_result_to_dict(res), indent=2), args.output)
    return 0 if res.converged else 2


def _add_params(p: argparse.ArgumentParser, required: bool = False) -> None:
    p.add_argument("--params", required=required,
                   help="system parameter JSON (defaults to the built-in device set)")
    p.add_argument("--fluxonium-basis-dim", type=int)
    p.add_argument("--fluxonium-keep", type=int)
    p.add_argument("--lc-fock-dim", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fluxpair", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="transition frequencies over a flux sweep (CSV)")
    _add_params(p)
    p.add_argument("--phi-min", type=float, default=np.pi - 0.7)
    p.add_argument("--phi-max", type=float, default=np.pi + 0.7)
    p.add_argument("--points", type=int, default=71)
    p.add_argument("--transitions", nargs="*", metavar="FROM-TO",
                   help="e.g. 000-100 000-001 (default: qubit and LC lines)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("metrics", help="single-point figures of merit (JSON)")
    _add_params(p)
    p.add_argument("--phi-ext", type=float, default=np.pi)
    p.add_argument("--pure-inductive", action="store_true", help="zero J_C, g_a and g_b")
    p.add_argument("--j-l", type=float, help="override J_L (GHz)")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("reduce", help="circuit elements to Hamiltonian parameters (JSON)")
    p.add_argument("circuit", help="circuit JSON in nH / fF / GHz")
    p.add_argument("--oracle", action="store_true", help="also run the numerical reduction and diff")
    p.add_argument("--exact-inductive", action="store_true",
                   help="do not assume L_M << L_A, L_B in the inductive sector")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("jl-sweep", help="|ZX| and static ZZ against J_L (CSV)")
    _add_params(p)
    p.add_argument("--jl", type=float, nargs="+", required=True, help="J_L values in GHz")
    p.add_argument("--mode", choices=("pure-inductive", "full-capacitive"), default="pure-inductive")
    p.add_argument("--phi-ext", type=float, default=np.pi)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_jl_sweep)

    p = sub.add_parser("ramsey", help="synthesize a Ramsey fringe and fit it")
    p.add_argument("--frequency", type=float, required=True, help="kHz")
    p.add_argument("--decay", type=float, required=True, help="microseconds")
    p.add_argument("--t-max", type=float, default=200.0, help="microseconds")
    p.add_argument("--points", type=int, default=401)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", help="trace CSV")
    p.add_argument("--fit-output", help="fitted parameters JSON")
    p.set_defaults(func=cmd_ramsey)

    p = sub.add_parser("fit", help="fit parameters to observed transitions (JSON)")
    p.add_argument("observations", help="CSV with phi_ext,from,to,freq_ghz,weight")
    _add_params(p, required=True)
    p.add_argument("--bounds", help="JSON mapping parameter names to [low, high]")
    p.add_argument("--freeze", nargs="*", choices=fitter.PARAM_NAMES, metavar="NAME")
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-evaluations", type=int, default=4000)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (InvalidArgumentError, ResourceLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except LabelingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
