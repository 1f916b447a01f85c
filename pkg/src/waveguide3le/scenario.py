"""Scenario files: parsing, validation and expansion into sweep points.

A scenario is a JSON object.  It either describes a single panel or holds a
``panels`` list; top-level keys other than ``name``, ``description``,
``caption`` and ``panels`` are defaults inherited by every panel.

Panel keys::

    name          panel label used in output file names
    topology      "lambda", "v", "ladder" or a list of them
    rates         {gamma_p, gamma_d, gamma_nr, gamma_l2, gamma_l3}
    beams         fixed {omega_p | n_probe, omega_d | n_drive, delta_p, delta_d}
    sweep         up to two axes, {param, start, stop, count, scale} or {param, values}
    observables   subset of OBSERVABLES
    delta_grid    {start, stop, count} probe detunings for response observables
    tau_grid      {start, stop, count, scale} delays for g2_curve
    kk_points     odd node count of the Kramers-Kronig grid
    maximize      "omega_d" (gain observables) or "delta_p" (phase_response)
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from .errors import ScenarioError
from .model import DriveSet, RateSet, Topology

__all__ = [
    "OBSERVABLES",
    "SWEEP_PARAMETERS",
    "Axis",
    "Panel",
    "Scenario",
    "PointSpec",
    "load_scenario",
    "parse_scenario",
    "bundled_names",
]

OBSERVABLES = (
    "transport",
    "eta_c",
    "eta_c_approx",
    "eta_inc",
    "eta_inc_approx",
    "eta_total",
    "g2_curve",
    "g2_zero",
    "phase_response",
    "amplitude_response",
    "kerr_coefficient",
    "kk_check",
)
AMPLIFYING_ONLY = {"eta_c", "eta_c_approx", "eta_inc", "eta_inc_approx"}
RATE_PARAMETERS = ("gamma_p", "gamma_d", "gamma_nr", "gamma_l2", "gamma_l3")
BEAM_PARAMETERS = ("omega_p", "omega_d", "n_probe", "n_drive", "delta_p", "delta_d")
SWEEP_PARAMETERS = RATE_PARAMETERS + BEAM_PARAMETERS
MAXIMIZE_TARGETS = {"omega_d": {"eta_c", "eta_c_approx"}, "delta_p": {"phase_response"}}
PANEL_KEYS = {
    "name", "topology", "rates", "beams", "sweep", "observables",
    "delta_grid", "tau_grid", "kk_points", "maximize",
}
SCENARIO_KEYS = PANEL_KEYS | {"description", "caption", "panels"}


def _fail(msg):
    raise ScenarioError(msg)


def _number(value, what, positive=False):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not np.isfinite(value):
        _fail(f"{what} must be a finite number, got {value!r}")
    if positive and value <= 0:
        _fail(f"{what} must be positive")
    return float(value)


def _count(value, what):
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        _fail(f"{what} must be an integer >= 1, got {value!r}")
    return value


def _spaced(spec, what, allow_log=True):
    if not isinstance(spec, dict):
        _fail(f"{what} must be an object")
    if "values" in spec:
        values = spec["values"]
        if not isinstance(values, list) or not values:
            _fail(f"{what}.values must be a non-empty list")
        return np.array([_number(v, f"{what}.values[]") for v in values])
    for key in ("start", "stop", "count"):
        if key not in spec:
            _fail(f"{what} needs start, stop and count (or values)")
    start, stop = _number(spec["start"], f"{what}.start"), _number(spec["stop"], f"{what}.stop")
    count = _count(spec["count"], f"{what}.count")
    scale = spec.get("scale", "linear")
    if count == 1:
        return np.array([start])
    if scale == "linear":
        return np.linspace(start, stop, count)
    if scale == "log" and allow_log:
        if start <= 0 or stop <= 0:
            _fail(f"{what}: a log axis needs positive start and stop")
        return np.geomspace(start, stop, count)
    _fail(f"{what}.scale must be 'linear' or 'log'")


@dataclass(frozen=True, eq=False)
class Axis:
    param: str
    values: np.ndarray


@dataclass(frozen=True)
class PointSpec:
    """One sweep point: the resolved rates and beams plus the swept values."""

    index: int
    swept: tuple
    rates: RateSet
    drives: DriveSet


@dataclass(frozen=True, eq=False)
class Panel:
    name: str
    topologies: tuple
    rates: dict
    beams: dict
    axes: tuple
    observables: tuple
    delta_grid: np.ndarray = None
    tau_grid: np.ndarray = None
    kk_points: int = 4001
    maximize: str = None

    @property
    def sweep_columns(self):
        return tuple(a.param for a in self.axes)

    def points(self):
        """All sweep points, the last axis varying fastest."""
        combos = itertools.product(*[a.values for a in self.axes]) if self.axes else [()]
        for index, combo in enumerate(combos):
            yield self.resolve(index, combo)

    def resolve(self, index, combo) -> PointSpec:
        values = dict(zip(self.sweep_columns, combo))
        rates = dict(self.rates)
        rates.update({k: v for k, v in values.items() if k in RATE_PARAMETERS})
        try:
            rate_set = RateSet(**rates)
        except (TypeError, ValueError) as exc:
            raise ScenarioError(f"panel {self.name!r}: {exc}") from None
        beams = dict(self.beams)
        beams.update({k: v for k, v in values.items() if k in BEAM_PARAMETERS})
        op = beams.get("omega_p")
        od = beams.get("omega_d")
        if "n_probe" in beams:
            op = float(np.sqrt(8.0 * beams["n_probe"]) * rate_set.gamma_p)
        if "n_drive" in beams:
            od = float(np.sqrt(8.0 * beams["n_drive"]) * rate_set.gamma_d)
        if od is None and self.maximize == "omega_d":
            od = 0.0  # placeholder, chosen per point by the runner
        if op is None or od is None:
            raise ScenarioError(f"panel {self.name!r}: both beam strengths must be given")
        drives = DriveSet(op, od, beams.get("delta_p", 0.0), beams.get("delta_d", 0.0))
        return PointSpec(index, tuple(float(c) for c in combo), rate_set, drives)


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    description: str
    panels: tuple
    caption: dict = field(default_factory=dict)


def _parse_panel(raw: dict, defaults: dict, label: str) -> Panel:
    spec = {**defaults, **raw}
    unknown = set(raw) - PANEL_KEYS
    if unknown:
        _fail(f"{label}: unknown keys {sorted(unknown)}")
    name = str(spec.get("name", ""))

    topo = spec.get("topology")
    if topo is None:
        _fail(f"{label}: topology is required")
    try:
        topologies = tuple(Topology.parse(t) for t in (topo if isinstance(topo, list) else [topo]))
    except ValueError as exc:
        raise ScenarioError(f"{label}: {exc}") from None

    rates = spec.get("rates")
    if not isinstance(rates, dict):
        _fail(f"{label}: rates must be an object")
    bad = set(rates) - set(RATE_PARAMETERS)
    if bad:
        _fail(f"{label}: unknown rates {sorted(bad)}")
    rates = {k: _number(v, f"{label}.rates.{k}") for k, v in rates.items()}

    beams = spec.get("beams", {})
    if not isinstance(beams, dict) or set(beams) - set(BEAM_PARAMETERS):
        _fail(f"{label}: beams must be an object with keys from {list(BEAM_PARAMETERS)}")
    beams = {k: _number(v, f"{label}.beams.{k}") for k, v in beams.items()}

    raw_axes = spec.get("sweep", [])
    if isinstance(raw_axes, dict):
        raw_axes = [raw_axes]
    if not isinstance(raw_axes, list) or len(raw_axes) > 2:
        _fail(f"{label}: at most two sweep axes are allowed")
    axes = []
    for k, ax in enumerate(raw_axes):
        param = ax.get("param") if isinstance(ax, dict) else None
        if param not in SWEEP_PARAMETERS:
            _fail(f"{label}.sweep[{k}]: param must be one of {list(SWEEP_PARAMETERS)}")
        if param in (a.param for a in axes):
            _fail(f"{label}.sweep[{k}]: {param} swept twice")
        axes.append(Axis(param, _spaced(ax, f"{label}.sweep[{k}]")))

    given = set(beams) | {a.param for a in axes}
    for strong, number in (("omega_p", "n_probe"), ("omega_d", "n_drive")):
        if strong in given and number in given:
            _fail(f"{label}: give either {strong} or {number}, not both")
        if strong not in given and number not in given and spec.get("maximize") != strong:
            _fail(f"{label}: {strong} (or {number}) is required")
    for k in RATE_PARAMETERS[:2]:
        if k not in rates and k not in given:
            _fail(f"{label}: rate {k} is required")

    observables = spec.get("observables")
    if not isinstance(observables, list) or not observables:
        _fail(f"{label}: observables must be a non-empty list")
    for obs in observables:
        if obs not in OBSERVABLES:
            _fail(f"{label}: unknown observable {obs!r}")
        if obs in AMPLIFYING_ONLY and Topology.LADDER in topologies:
            _fail(f"{label}: {obs} is not defined for a ladder emitter")
    if len(set(observables)) != len(observables):
        _fail(f"{label}: observables repeated")

    delta_grid = None
    if "delta_grid" in spec:
        delta_grid = _spaced(spec["delta_grid"], f"{label}.delta_grid", allow_log=False)
        if np.any(np.diff(delta_grid) <= 0):
            _fail(f"{label}.delta_grid must be ascending")
    needs_delta = {"amplitude_response", "kerr_coefficient"} | (
        set() if spec.get("maximize") == "delta_p" else {"phase_response"}
    )
    if needs_delta & set(observables) and delta_grid is None:
        _fail(f"{label}: {sorted(needs_delta & set(observables))} need a delta_grid")

    grid_like = needs_delta | {"kk_check"}
    if "delta_p" in {a.param for a in axes} and grid_like & set(observables):
        _fail(f"{label}: delta_p cannot be swept together with detuning-grid observables")

    tau_grid = None
    if "tau_grid" in spec:
        tau_grid = _spaced(spec["tau_grid"], f"{label}.tau_grid")
        if np.any(tau_grid < 0) or np.any(np.diff(tau_grid) < 0):
            _fail(f"{label}.tau_grid must be non-negative and ascending")

    kk_points = spec.get("kk_points", 4001)
    if isinstance(kk_points, bool) or not isinstance(kk_points, int) or kk_points < 4001 or kk_points % 2 == 0:
        _fail(f"{label}: kk_points must be an odd integer >= 4001")

    maximize = spec.get("maximize")
    if maximize is not None:
        if maximize not in MAXIMIZE_TARGETS:
            _fail(f"{label}: maximize must be one of {sorted(MAXIMIZE_TARGETS)}")
        if maximize in given:
            _fail(f"{label}: {maximize} cannot be both maximized and fixed")
        if not MAXIMIZE_TARGETS[maximize] & set(observables):
            _fail(f"{label}: maximize={maximize} applies to none of the observables")
        if maximize == "omega_d" and ("omega_d" in given or "n_drive" in given):
            _fail(f"{label}: omega_d is maximized, do not fix it")

    return Panel(
        name=name,
        topologies=topologies,
        rates=rates,
        beams=beams,
        axes=tuple(axes),
        observables=tuple(observables),
        delta_grid=delta_grid,
        tau_grid=tau_grid,
        kk_points=kk_points,
        maximize=maximize,
    )


def parse_scenario(data: dict) -> Scenario:
    """Validate a decoded scenario; raises :class:`ScenarioError`."""
    if not isinstance(data, dict):
        _fail("a scenario must be a JSON object")
    unknown = set(data) - SCENARIO_KEYS
    if unknown:
        _fail(f"unknown top-level keys {sorted(unknown)}")
    name = data.get("name")
    if not isinstance(name, str) or not name or any(c in name for c in "/\\"):
        _fail("name must be a non-empty string without path separators")
    defaults = {k: v for k, v in data.items() if k in PANEL_KEYS and k != "name"}
    raw_panels = data.get("panels")
    if raw_panels is None:
        panels = [_parse_panel({}, defaults, name)]
    else:
        if not isinstance(raw_panels, list) or not raw_panels:
            _fail("panels must be a non-empty list")
        panels = [_parse_panel(p, defaults, f"{name}.panels[{k}]") for k, p in enumerate(raw_panels)]
        labels = [p.name for p in panels]
        if len(set(labels)) != len(labels) or "" in labels:
            _fail("every panel needs a distinct name")
    caption = data.get("caption", {})
    if not isinstance(caption, dict):
        _fail("caption must be an object")
    return Scenario(name, str(data.get("description", "")), tuple(panels), caption)


def bundled_names():
    files = resources.files("waveguide3le").joinpath("scenarios")
    return sorted(p.name[:-5] for p in files.iterdir() if p.name.endswith(".json"))


def load_scenario(source) -> Scenario:
    """Load a scenario from a file path or a bundled name."""
    path = Path(source)
    if path.is_file():
        text = path.read_text(encoding="utf-8")
    elif str(source) in bundled_names():
        text = resources.files("waveguide3le").joinpath("scenarios", f"{source}.json").read_text(encoding="utf-8")
    else:
        raise ScenarioError(f"no scenario file or bundled scenario named {str(source)!r}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"invalid JSON: {exc}") from None
    return parse_scenario(data)
