"""JSON files for states, instruments, protocol inputs and reports.

Every document is checked against a versioned schema under ``schemas/``
before it is turned into library objects. Complex entries are written as
``[re, im]`` pairs; plain numbers are accepted on read as real entries.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any

import numpy as np
from jsonschema import Draft202012Validator

from .errors import InputError
from .linalg import DimProfile
from .states import Instrument, MultipartiteState
from .trees import EdgeWeightGraph

SCHEMA_VERSION = 1
SCHEMAS = (
    "state",
    "instrument",
    "protocol",
    "weights",
    "rate_report",
    "ghz_report",
    "simulation_report",
    "entropy_report",
    "pbit",
)


@lru_cache(maxsize=None)
def _validator(name: str) -> Draft202012Validator:
    if name not in SCHEMAS:
        raise KeyError(name)
    text = resources.files("qconf").joinpath("schemas", f"{name}.schema.json").read_text()
    return Draft202012Validator(json.loads(text))


def schema(name: str) -> dict:
    return _validator(name).schema


def validate(doc: Any, name: str, source: str = "<input>") -> None:
    """Raise InputError naming the first offending field."""
    errors = sorted(_validator(name).iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        err = errors[0]
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        raise InputError(f"{source}: field {where}: {err.message}")


def read_json(path: str | Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from exc


def jsonable(obj: Any) -> Any:
    """Convert numpy scalars, arrays and tuples into plain JSON values."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, (frozenset, set)):
        return sorted(jsonable(v) for v in obj)
    return obj


def write_json(doc: Any, path: str | Path) -> None:
    # float repr is the shortest string that round-trips exactly
    Path(path).write_text(json.dumps(jsonable(doc), indent=1) + "\n")


def matrix_to_json(m: np.ndarray) -> list:
    m = np.asarray(m, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in m]


def matrix_from_json(rows: list, where: str = "matrix") -> np.ndarray:
    try:
        out = [[complex(e[0], e[1]) if isinstance(e, list) else complex(e) for e in row] for row in rows]
        arr = np.array(out, dtype=complex)
    except (TypeError, ValueError, IndexError) as exc:
        raise InputError(f"field {where}: {exc}") from exc
    if arr.ndim != 2:
        raise InputError(f"field {where}: rows have unequal lengths")
    return arr


# --- states ------------------------------------------------------------------


def state_to_json(state: MultipartiteState) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "dims": list(state.profile.dims),
        "labels": list(state.profile.labels),
        "eve": state.eve_label,
        "matrix": matrix_to_json(state.matrix),
    }


def state_from_json(doc: dict, source: str = "<state>") -> MultipartiteState:
    validate(doc, "state", source)
    labels = doc.get("labels")
    try:
        profile = DimProfile(doc["dims"], labels)
    except (ValueError, InputError) as exc:
        raise InputError(f"{source}: field labels: {exc}") from exc
    eve = doc.get("eve")
    eve_index = None
    if eve is not None:
        if eve not in profile.labels:
            raise InputError(f"{source}: field eve: unknown label {eve!r}")
        eve_index = profile.index(eve)
    rho = matrix_from_json(doc["matrix"], f"{source}: matrix")
    if rho.shape != (profile.total, profile.total):
        raise InputError(f"{source}: field matrix: shape {rho.shape} does not match dims product {profile.total}")
    return MultipartiteState(rho, profile, eve_index)


def load_state(path: str | Path) -> MultipartiteState:
    return state_from_json(read_json(path), str(path))


def save_state(state: MultipartiteState, path: str | Path) -> None:
    write_json(state_to_json(state), path)


# --- instruments ---------------------------------------------------------------


def instrument_to_json(ins: Instrument) -> dict:
    return {
        "party": ins.party,
        "branches": [
            {"outcome": b.outcome, "kraus": [matrix_to_json(k) for k in b.kraus]} for b in ins.branches
        ],
    }


def instruments_from_json(doc: Any, parties: list[str] | None = None, source: str = "<instrument>") -> list[Instrument]:
    """Parse one instrument or a list; party "*" is copied to every party."""
    validate(doc, "instrument", source)
    items = doc if isinstance(doc, list) else [doc]
    out = []
    for n, item in enumerate(items):
        kraus_sets = []
        for b, branch in enumerate(item["branches"]):
            ops = [matrix_from_json(k, f"{source}: branches/{b}/kraus/{i}") for i, k in enumerate(branch["kraus"])]
            kraus_sets.append((branch["outcome"], ops))
        targets = [item["party"]]
        if item["party"] == "*":
            if parties is None:
                raise InputError(f"{source}: item {n}: wildcard party needs a state")
            targets = parties
        for party in targets:
            out.append(Instrument(party, kraus_sets))
    return out


def load_instruments(paths, parties: list[str] | None = None) -> list[Instrument]:
    if isinstance(paths, (str, Path)):
        paths = [paths]
    out = []
    for p in paths:
        out.extend(instruments_from_json(read_json(p), parties, str(p)))
    return out


def save_instruments(instruments, path: str | Path) -> None:
    doc = [instrument_to_json(i) for i in instruments]
    write_json(doc[0] if len(doc) == 1 else doc, path)


# --- weights -----------------------------------------------------------------------


def weights_from_json(doc: dict, source: str = "<weights>") -> EdgeWeightGraph:
    validate(doc, "weights", source)
    m = doc["m"]
    labels = doc.get("labels") or [f"A{k + 1}" for k in range(m)]
    if len(labels) != m:
        raise InputError(f"{source}: field labels: expected {m} labels")

    def vertex(v, where):
        if isinstance(v, str):
            if v not in labels:
                raise InputError(f"{source}: field {where}: unknown vertex {v!r}")
            return labels.index(v)
        return v

    weights = {}
    for n, e in enumerate(doc["edges"]):
        weights[(vertex(e["i"], f"edges/{n}/i"), vertex(e["j"], f"edges/{n}/j"))] = e["weight"]
    return EdgeWeightGraph(m, weights, list(labels))


def load_weights(path: str | Path) -> EdgeWeightGraph:
    return weights_from_json(read_json(path), str(path))


# --- reports -----------------------------------------------------------------------


def report_document(report: Any, kind: str) -> dict:
    """Versioned, schema-checked JSON form of a report object or dict."""
    doc = report if isinstance(report, dict) else report.to_dict()
    doc = jsonable({"schema_version": SCHEMA_VERSION, **doc})
    validate(doc, kind, kind)
    return doc
