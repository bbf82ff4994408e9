"""JSON state/ensemble files, CSV emitters, and atomic writes.

Floats are serialized through Python's shortest round-trip repr, so files
reload to bit-identical doubles.  Loaders re-verify normalization and the
decay guard instead of silently repairing data.
"""

from __future__ import annotations

import json
import os
import tempfile

import numpy as np

from .errors import FileFormatError
from .scenarios import SweepRow, WalkTrace
from .states import GridSpec, MixedEnsemble, PureState, UnitSystem


def atomic_write_text(path: str, text: str) -> None:
    """Write text to path via a temp file and rename, so failures leave no partial file."""
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".fluctlab-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _float_list(arr) -> list:
    return [float(v) for v in np.asarray(arr)]


def _units_dict(units: UnitSystem) -> dict:
    return {"h": float(units.h)}


def _grid_dict(grid: GridSpec) -> dict:
    return {"x_min": float(grid.x_min), "x_max": float(grid.x_max), "n": int(grid.n)}


def state_document(state: PureState, units: UnitSystem) -> dict:
    return {
        "units": _units_dict(units),
        "grid": _grid_dict(state.grid),
        "psi_re": _float_list(state.amplitudes.real),
        "psi_im": _float_list(state.amplitudes.imag),
    }


def ensemble_document(ensemble: MixedEnsemble, units: UnitSystem) -> dict:
    return {
        "units": _units_dict(units),
        "grid": _grid_dict(ensemble.grid),
        "weights": _float_list(ensemble.weights),
        "members": [
            {"psi_re": _float_list(m.amplitudes.real), "psi_im": _float_list(m.amplitudes.imag)}
            for m in ensemble.members
        ],
    }


def save_state(path: str, state: PureState, units: UnitSystem) -> None:
    atomic_write_text(path, json.dumps(state_document(state, units)))


def save_ensemble(path: str, ensemble: MixedEnsemble, units: UnitSystem) -> None:
    atomic_write_text(path, json.dumps(ensemble_document(ensemble, units)))


def _field(mapping, key, kind, where):
    if not isinstance(mapping, dict):
        raise FileFormatError(f"{where}: expected an object")
    if key not in mapping:
        raise FileFormatError(f"{where}.{key}: missing")
    value = mapping[key]
    if kind is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise FileFormatError(f"{where}.{key}: expected a number, got {type(value).__name__}")
        return float(value)
    if kind is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise FileFormatError(f"{where}.{key}: expected an integer, got {type(value).__name__}")
        return value
    if kind is list:
        if not isinstance(value, list):
            raise FileFormatError(f"{where}.{key}: expected a list, got {type(value).__name__}")
        return value
    return value


def _number_array(values, where):
    for i, v in enumerate(values):
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise FileFormatError(f"{where}[{i}]: expected a number, got {type(v).__name__}")
    return np.asarray(values, dtype=np.float64)


def _parse_units(doc) -> UnitSystem:
    return UnitSystem(h=_field(_field(doc, "units", dict, "document"), "h", float, "units"))


def _parse_grid(doc) -> GridSpec:
    grid = _field(doc, "grid", dict, "document")
    return GridSpec(
        x_min=_field(grid, "x_min", float, "grid"),
        x_max=_field(grid, "x_max", float, "grid"),
        n=_field(grid, "n", int, "grid"),
    )


def _parse_amplitudes(mapping, grid, where) -> np.ndarray:
    re = _number_array(_field(mapping, "psi_re", list, where), f"{where}.psi_re")
    im = _number_array(_field(mapping, "psi_im", list, where), f"{where}.psi_im")
    if re.size != grid.n or im.size != grid.n:
        raise FileFormatError(
            f"{where}: psi_re/psi_im lengths ({re.size}, {im.size}) do not match grid.n = {grid.n}"
        )
    return re + 1j * im


def _load_json(path: str) -> dict:
    with open(path) as handle:
        try:
            doc = json.load(handle)
        except json.JSONDecodeError as exc:
            raise FileFormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(doc, dict):
        raise FileFormatError(f"{path}: top level must be an object")
    return doc


def load_state(path: str):
    """Read a state file; returns (PureState, UnitSystem).

    Normalization and the decay guard are re-verified by the PureState
    constructor, so tampered files fail loudly.
    """
    doc = _load_json(path)
    units = _parse_units(doc)
    grid = _parse_grid(doc)
    return PureState(grid, _parse_amplitudes(doc, grid, "document")), units


def load_ensemble(path: str):
    """Read an ensemble file; returns (MixedEnsemble, UnitSystem)."""
    doc = _load_json(path)
    units = _parse_units(doc)
    grid = _parse_grid(doc)
    weights = _number_array(_field(doc, "weights", list, "document"), "weights")
    members_doc = _field(doc, "members", list, "document")
    members = tuple(
        PureState(grid, _parse_amplitudes(m, grid, f"members[{i}]"))
        for i, m in enumerate(members_doc)
    )
    return MixedEnsemble(weights, members), units


def load_target(path: str):
    """Read either file kind, sniffing by schema; returns (state-or-ensemble, units)."""
    doc = _load_json(path)
    if "members" in doc or "weights" in doc:
        return load_ensemble(path)
    return load_state(path)


# --- CSV emitters ------------------------------------------------------------

def _csv(rows, header) -> str:
    lines = [header]
    lines.extend(",".join(fields) for fields in rows)
    return "\n".join(lines) + "\n"


def write_samples_csv(path: str, draws: np.ndarray) -> None:
    rows = ((repr(float(x)), repr(float(p))) for x, p in draws)
    atomic_write_text(path, _csv(rows, "x,p"))


def write_scan_csv(path: str, xs, ps, values) -> None:
    """Mesh dump, one row per (x, p) pair, rows following xs then ps."""
    rows = (
        (repr(float(x)), repr(float(p)), repr(float(values[i, j])))
        for i, x in enumerate(xs)
        for j, p in enumerate(ps)
    )
    atomic_write_text(path, _csv(rows, "x,p,f"))


def sweep_rows_csv(rows: list[SweepRow]) -> str:
    return _csv(
        (
            (r.label, repr(r.parameter), repr(r.product), repr(r.bound), r.classification, repr(r.entropy_surrogate))
            for r in rows
        ),
        "label,parameter,product,bound,classification,entropy_surrogate",
    )


def walk_rows_csv(rows: list[WalkTrace]) -> str:
    return _csv(
        ((str(r.step), repr(r.product), repr(r.distance_to_bound)) for r in rows),
        "step,product,distance_to_bound",
    )


def sweep_rows_json(rows: list[SweepRow]) -> str:
    return json.dumps(
        [
            {
                "label": r.label,
                "parameter": r.parameter,
                "product": r.product,
                "bound": r.bound,
                "classification": r.classification,
                "entropy_surrogate": r.entropy_surrogate,
            }
            for r in rows
        ]
    )


def walk_rows_json(rows: list[WalkTrace]) -> str:
    return json.dumps(
        [
            {"step": r.step, "product": r.product, "distance_to_bound": r.distance_to_bound}
            for r in rows
        ]
    )
