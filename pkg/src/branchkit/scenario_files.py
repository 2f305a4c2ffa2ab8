"""Scenario file schema: one JSON format for every scenario kind.

Schema version 1. Top-level fields: ``kind`` (one of decoherence, branching,
sebens_carroll, mcqueen_vaidman, deutsch_wallace), ``parameters`` (a
kind-specific record validated here before any computation), optional ``id``
and ``tolerances`` (name -> value overrides).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .errors import ScenarioFormatError

__all__ = ["ScenarioFile", "KINDS", "load_scenario", "parse_scenario"]

KINDS = ("decoherence", "branching", "sebens_carroll", "mcqueen_vaidman", "deutsch_wallace")
SCHEMA_VERSION = 1


@dataclass(frozen=True)
class ScenarioFile:
    scenario_id: str
    kind: str
    parameters: dict
    tolerance_overrides: dict[str, float]


def _expect(mapping: dict, key: str, types, location: str, required: bool = True, default=None):
    if key not in mapping:
        if required:
            raise ScenarioFormatError(f"missing required field {key!r}", location=location)
        return default
    value = mapping[key]
    if types is not None and not isinstance(value, types):
        names = types.__name__ if isinstance(types, type) else "/".join(t.__name__ for t in types)
        raise ScenarioFormatError(
            f"field {key!r} must be {names}, got {type(value).__name__}",
            location=f"{location}.{key}")
    return value


def _validate_decoherence(params: dict, loc: str) -> None:
    tau = _expect(params, "tau_d", (int, float), loc)
    if tau <= 0:
        raise ScenarioFormatError("tau_d must be positive", location=f"{loc}.tau_d")
    grid = _expect(params, "grid", dict, loc)
    t_max = _expect(grid, "t_max", (int, float), f"{loc}.grid")
    if t_max <= 0:
        raise ScenarioFormatError("t_max must be positive", location=f"{loc}.grid.t_max")
    n_points = _expect(grid, "n_points", int, f"{loc}.grid")
    if n_points < 3:
        raise ScenarioFormatError("n_points must be at least 3", location=f"{loc}.grid.n_points")
    bath = _expect(params, "spin_bath", dict, loc, required=False)
    if bath is not None:
        n_env = _expect(bath, "n_env", int, f"{loc}.spin_bath")
        if n_env < 0:
            raise ScenarioFormatError("n_env must be non-negative", location=f"{loc}.spin_bath.n_env")
        _expect(bath, "coupling_min", (int, float), f"{loc}.spin_bath")
        _expect(bath, "coupling_max", (int, float), f"{loc}.spin_bath")
        _expect(bath, "seed", int, f"{loc}.spin_bath", required=False)
    csv_out = _expect(params, "csv_out", str, loc, required=False)
    if csv_out is not None and not csv_out:
        raise ScenarioFormatError("csv_out must be a nonempty path", location=f"{loc}.csv_out")


def _validate_branching(params: dict, loc: str) -> None:
    builtin = _expect(params, "builtin", str, loc, required=False)
    if builtin is not None:
        if builtin not in ("three-branch-mixture", "two-branch-recorded"):
            raise ScenarioFormatError(
                f"unknown builtin {builtin!r}; use three-branch-mixture or two-branch-recorded",
                location=f"{loc}.builtin")
        return
    _expect(params, "state", str, loc)
    layout = _expect(params, "layout", list, loc)
    for i, factor in enumerate(layout):
        if (not isinstance(factor, list) or len(factor) != 2
                or not isinstance(factor[0], str) or not isinstance(factor[1], int)):
            raise ScenarioFormatError("each layout factor must be [label, dim]",
                                      location=f"{loc}.layout[{i}]")
    _expect(params, "factor", str, loc)
    groups = _expect(params, "groups", dict, loc)
    for name, indices in groups.items():
        if not isinstance(indices, list) or not all(isinstance(i, int) for i in indices):
            raise ScenarioFormatError("each group must be a list of basis indices",
                                      location=f"{loc}.groups.{name}")


def _validate_sebens_carroll(params: dict, loc: str) -> None:
    setups = _expect(params, "setups", list, loc)
    if not setups:
        raise ScenarioFormatError("at least one set-up is required", location=f"{loc}.setups")
    for i, setup in enumerate(setups):
        sloc = f"{loc}.setups[{i}]"
        if not isinstance(setup, dict):
            raise ScenarioFormatError("each set-up must be an object", location=sloc)
        _expect(setup, "label", str, sloc)
        displays = _expect(setup, "displays", list, sloc)
        if not all(isinstance(d, str) for d in displays):
            raise ScenarioFormatError("displays must be strings", location=f"{sloc}.displays")
        _expect(setup, "outcome_display", str, sloc, required=False)
        columns = _expect(setup, "columns", list, sloc)
        for j, col in enumerate(columns):
            cloc = f"{sloc}.columns[{j}]"
            if not isinstance(col, dict):
                raise ScenarioFormatError("each column must be an object", location=cloc)
            symbols = _expect(col, "symbols", dict, cloc)
            missing = [d for d in displays if d not in symbols]
            if missing:
                raise ScenarioFormatError(f"column lacks a symbol row for displays {missing}",
                                          location=f"{cloc}.symbols")
            _expect(col, "weight", str, cloc)


def _validate_mcqueen_vaidman(params: dict, loc: str) -> None:
    n = _expect(params, "n", int, loc)
    if n < 2:
        raise ScenarioFormatError("n must be at least 2", location=f"{loc}.n")
    weights = _expect(params, "weights", list, loc, required=False)
    if weights is not None:
        if len(weights) != n or not all(isinstance(w, str) for w in weights):
            raise ScenarioFormatError(f"weights must be {n} rational strings",
                                      location=f"{loc}.weights")
    merge = _expect(params, "merge_stations", list, loc, required=False)
    if merge is not None and not all(isinstance(i, int) and 1 <= i <= n for i in merge):
        raise ScenarioFormatError(f"merge_stations must be station numbers in 1..{n}",
                                  location=f"{loc}.merge_stations")


def _validate_deutsch_wallace(params: dict, loc: str) -> None:
    check = _expect(params, "check", str, loc)
    if check == "erasure":
        _expect(params, "rho1", str, loc)
        _expect(params, "rho2", str, loc)
    elif check == "equivalence":
        for key in ("alpha", "beta"):
            value = _expect(params, key, (int, float, list), loc)
            if isinstance(value, list) and (len(value) != 2 or not all(
                    isinstance(x, (int, float)) for x in value)):
                raise ScenarioFormatError(f"{key} must be a number or [re, im] pair",
                                          location=f"{loc}.{key}")
    else:
        raise ScenarioFormatError(f"unknown check {check!r}; use erasure or equivalence",
                                  location=f"{loc}.check")


_VALIDATORS = {
    "decoherence": _validate_decoherence,
    "branching": _validate_branching,
    "sebens_carroll": _validate_sebens_carroll,
    "mcqueen_vaidman": _validate_mcqueen_vaidman,
    "deutsch_wallace": _validate_deutsch_wallace,
}


def parse_scenario(text: str, default_id: str = "scenario") -> ScenarioFile:
    """Parse and schema-validate a scenario document."""
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioFormatError(f"unreadable JSON: {exc.msg}", location=f"line {exc.lineno}")
    if not isinstance(raw, dict):
        raise ScenarioFormatError("scenario document must be a JSON object")
    version = raw.get("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ScenarioFormatError(f"unsupported schema_version {version!r}",
                                  location="schema_version")
    kind = _expect(raw, "kind", str, "")
    if kind not in KINDS:
        raise ScenarioFormatError(f"unknown kind {kind!r}; expected one of {', '.join(KINDS)}",
                                  location="kind")
    params = _expect(raw, "parameters", dict, "")
    _VALIDATORS[kind](params, "parameters")
    overrides_raw = raw.get("tolerances", {})
    if not isinstance(overrides_raw, dict):
        raise ScenarioFormatError("tolerances must be an object", location="tolerances")
    overrides: dict[str, float] = {}
    for name, value in overrides_raw.items():
        if not isinstance(value, (int, float)):
            raise ScenarioFormatError(f"tolerance {name!r} must be numeric",
                                      location=f"tolerances.{name}")
        overrides[name] = value
    scenario_id = raw.get("id", default_id)
    if not isinstance(scenario_id, str):
        raise ScenarioFormatError("id must be a string", location="id")
    return ScenarioFile(scenario_id=scenario_id, kind=kind, parameters=params,
                        tolerance_overrides=overrides)


def load_scenario(path: str | Path) -> ScenarioFile:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ScenarioFormatError(f"cannot read scenario file: {exc}", location=str(path))
    return parse_scenario(text, default_id=path.stem)
