"""JSON and CSV formats for parameters, circuits, observations and fit results."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import List, Union

from .coupled import SystemParams, TruncationConfig, format_label
from .errors import InvalidArgumentError
from .fitter import PARAM_NAMES, FitResult, Observation, params_to_vector, vector_to_params
from .fluxonium import FluxoniumParams

__all__ = [
    "params_to_dict",
    "params_from_dict",
    "load_params",
    "dump_params",
    "observations_to_csv",
    "observations_from_csv",
    "fit_result_to_dict",
    "read_json",
]

OBS_HEADER = ("phi_ext", "from", "to", "freq_ghz", "weight")
_TRUNC_KEYS = ("fluxonium_basis_dim", "fluxonium_keep", "lc_fock_dim", "max_dim")


def params_to_dict(p: SystemParams) -> dict:
    out = dict(zip(PARAM_NAMES, (float(x) for x in params_to_vector(p))))
    out["trunc"] = {k: getattr(p.trunc, k) for k in _TRUNC_KEYS}
    return out


def params_from_dict(data: dict) -> SystemParams:
    if not isinstance(data, dict):
        raise InvalidArgumentError("params JSON must be an object")
    missing = [k for k in PARAM_NAMES if k not in data]
    extra = [k for k in data if k not in PARAM_NAMES and k != "trunc"]
    if missing:
        raise InvalidArgumentError("missing field(s): " + ", ".join(missing))
    if extra:
        raise InvalidArgumentError("unknown field(s): " + ", ".join(extra))
    values = []
    for k in PARAM_NAMES:
        v = data[k]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise InvalidArgumentError(f"field {k}: expected a number, got {v!r}")
        values.append(float(v))
    trunc_data = data.get("trunc") or {}
    if not isinstance(trunc_data, dict):
        raise InvalidArgumentError("field trunc: expected an object")
    bad = [k for k in trunc_data if k not in _TRUNC_KEYS]
    if bad:
        raise InvalidArgumentError("unknown trunc field(s): " + ", ".join(bad))
    for k, v in trunc_data.items():
        if isinstance(v, bool) or not isinstance(v, int):
            raise InvalidArgumentError(f"trunc.{k}: expected an integer, got {v!r}")
    template = SystemParams(FluxoniumParams(1.0, 1.0, 1.0, "A"), FluxoniumParams(1.0, 1.0, 1.0, "B"),
                            0.0, 0.0, 0.0, 0.0, 1.0, TruncationConfig(**trunc_data))
    return vector_to_params(values, template)


def read_json(path: Union[str, Path]):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InvalidArgumentError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidArgumentError(f"{path}: malformed JSON ({exc})") from None


def load_params(path: Union[str, Path]) -> SystemParams:
    return params_from_dict(read_json(path))


def dump_params(p: SystemParams) -> str:
    return json.dumps(params_to_dict(p), indent=2)


def observations_to_csv(obs: List[Observation]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(OBS_HEADER)
    for o in obs:
        w.writerow([repr(o.phi_ext), format_label(o.start), format_label(o.end),
                    repr(o.frequency), repr(o.weight)])
    return buf.getvalue()


def observations_from_csv(text: str) -> List[Observation]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or tuple(h.strip() for h in header) != OBS_HEADER:
        raise InvalidArgumentError(f"expected CSV header {','.join(OBS_HEADER)}")
    obs = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(OBS_HEADER):
            raise InvalidArgumentError(f"line {lineno}: expected {len(OBS_HEADER)} columns")
        try:
            phi, start, end, freq, weight = row
            obs.append(Observation(float(phi), start, end, float(freq),
                                   float(weight) if weight.strip() else None))
        except ValueError as exc:
            raise InvalidArgumentError(f"line {lineno}: {exc}") from None
    return obs


def fit_result_to_dict(res: FitResult) -> dict:
    return {
        "params": params_to_dict(res.params),
        "residual_rms": res.residual_rms,
        "residuals": [float(x) for x in res.residuals],
        "iterations": res.iterations,
        "evaluations": res.evaluations,
        "converged": res.converged,
        "free": list(res.free),
    }
