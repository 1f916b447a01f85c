"""Evaluate scenarios point by point and write CSV datasets."""
from __future__ import annotations

import csv
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kerr, kk, observables as obs
from .dynamics import steady_state
from .errors import UndefinedCoefficient, WaveguideError
from .model import Topology, build_system
from .scenario import Panel, PointSpec, Scenario

__all__ = ["columns_for", "evaluate_point", "run_scenario", "RunReport", "format_value"]

GRID_OBSERVABLES = {
    "g2_curve": "tau",
    "amplitude_response": "delta_p",
    "kerr_coefficient": "delta_p",
    "kk_check": "delta_p",
}


def _grid_column(panel: Panel, name: str):
    if name == "phase_response" and panel.maximize != "delta_p":
        return "delta_p"
    return GRID_OBSERVABLES.get(name)


def columns_for(panel: Panel, name: str, topology: Topology):
    """Value columns (after sweep and grid columns) of one observable."""
    if name == "transport":
        return ["t_probe", "r_probe", "t_drive", "r_drive"]
    if name in ("eta_c", "eta_c_approx"):
        return (["omega_d_opt"] if panel.maximize == "omega_d" else []) + [name]
    if name in ("eta_inc", "eta_inc_approx", "eta_total", "g2_zero"):
        return [name]
    if name == "g2_curve":
        return ["g2"]
    if name == "phase_response":
        if panel.maximize == "delta_p":
            return ["delta_p_opt", "phase_shift"]
        cols = ["phase_driven", "phase_undriven", "phase_shift"]
        return cols + (["phase_shift_modified"] if topology is not Topology.V else [])
    if name == "amplitude_response":
        return ["t_re", "t_im", "amplitude_driven", "amplitude_undriven", "amplitude_shift"]
    if name == "kerr_coefficient":
        return ["k_formula", "k_numeric"]
    if name == "kk_check":
        return ["amplitude", "phase_exact", "phase_kk", "phase_error", "clamped"]
    raise ValueError(name)


def _optional(fn):
    try:
        return fn()
    except UndefinedCoefficient:
        return None


def _point_drives(panel, topology, point: PointSpec):
    """Drives for the point, with the maximized drive chosen if requested."""
    if panel.maximize != "omega_d":
        return point.drives, None
    od, _ = obs.maximize_coherent_amplification(topology, point.rates, point.drives.omega_p)
    return point.drives.with_(omega_d=od), od


def _evaluate(panel: Panel, topology: Topology, name: str, point: PointSpec):
    """Rows ``[grid value?, value columns...]`` for one observable at one point."""
    rates = point.rates
    if name in ("eta_c_approx",) and panel.maximize == "omega_d":
        od, val = obs.maximize_coherent_amplification_approx(topology, rates)
        return [[od, val]]
    drives, od_opt = _point_drives(panel, topology, point)

    if name == "eta_c_approx":
        return [[obs.coherent_amplification_approx(topology, rates, drives)]]
    if name == "eta_inc_approx":
        return [[obs.incoherent_amplification_approx(topology, rates, drives)]]
    if name == "kerr_coefficient":
        grid = panel.delta_grid
        k_num = kerr.phase_shift_slope(topology, rates, grid)
        return np.column_stack([grid, kerr.kerr_coefficient(topology, rates, grid), k_num]).tolist()
    if name == "amplitude_response":
        grid = panel.delta_grid
        shift = kerr.cross_kerr_shift(topology, rates, drives, grid)
        t = 1.0 + 2j * kerr.exact_susceptibility(topology, rates, drives.omega_p, drives.omega_d, grid, drives.delta_d)
        return np.column_stack([
            grid, t.real, t.imag, shift.driven.amplitude, shift.undriven.amplitude, shift.delta_amplitude,
        ]).tolist()
    if name == "phase_response":
        kind = "modified" if topology is Topology.LAMBDA else "cross"
        if panel.maximize == "delta_p":
            return [list(kerr.max_phase_shift(topology, rates, drives, kind=kind))]
        grid = panel.delta_grid
        shift = kerr.cross_kerr_shift(topology, rates, drives, grid)
        cols = [grid, shift.driven.phase, shift.undriven.phase, shift.delta_phase]
        if topology is not Topology.V:
            cols.append(kerr.modified_phase_shift(topology, rates, drives, grid).phase)
        return np.column_stack(cols).tolist()
    if name == "kk_check":
        grid = kk.KKGrid.for_rates(rates, n_points=panel.kk_points)
        exact = kerr.response_curve(topology, rates, drives, grid.delta_grid)
        rebuilt = kk.kk_phase_from_amplitude(exact, allow_floor=True)
        values = np.column_stack([
            grid.delta_grid, exact.amplitude, exact.phase, rebuilt.phase, rebuilt.phase - exact.phase,
        ]).tolist()
        return [row + [bool(flag)] for row, flag in zip(values, rebuilt.clamped)]

    system = build_system(topology, rates, drives)
    state = steady_state(system)
    if name == "transport":
        tc = obs.transport(topology, rates, drives, state)
        return [[_optional(lambda a=a: getattr(tc, a)) for a in ("t_probe", "r_probe", "t_drive", "r_drive")]]
    if name == "eta_c":
        val = obs.coherent_amplification(topology, rates, drives, state)
        return [[od_opt, val] if od_opt is not None else [val]]
    if name == "eta_inc":
        return [[obs.incoherent_amplification(topology, rates, drives, state)]]
    if name == "eta_total":
        return [[obs.transport(topology, rates, drives, state).t_probe - 1.0]]
    if name == "g2_zero":
        return [[obs.g2_zero(obs.transport(topology, rates, drives, state))]]
    if name == "g2_curve":
        curve = obs.g2_curve(system, tau_grid=panel.tau_grid)
        return np.column_stack([curve.tau_grid, curve.values]).tolist()
    raise ValueError(name)


def evaluate_point(task):
    """Worker: all observables of one panel/topology at one sweep point.

    Returns ``{observable: (rows, error message or None)}``.
    """
    panel, topology, point = task
    out = {}
    for name in panel.observables:
        try:
            out[name] = (_evaluate(panel, topology, name, point), None)
        except (WaveguideError, ArithmeticError, np.linalg.LinAlgError, ValueError) as exc:
            out[name] = ([], f"{type(exc).__name__}: {exc}")
    return out


def format_value(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    v = float(v)
    if not np.isfinite(v):
        return ""
    return f"{v:.15e}"


@dataclass
class RunReport:
    files: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return bool(self.errors)


def _file_stem(panel: Panel, name: str, topology: Topology):
    prefix = f"{panel.name}_" if panel.name else ""
    return f"{prefix}{name}_{topology.value}"


def run_scenario(scenario: Scenario, out_dir, jobs: int = 1) -> RunReport:
    """Evaluate every panel and write one CSV per (panel, observable, topology)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    tasks, keys = [], []
    for panel in scenario.panels:
        for topology in panel.topologies:
            for point in panel.points():
                tasks.append((panel, topology, point))
                keys.append((panel, topology, point))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(evaluate_point, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        results = [evaluate_point(t) for t in tasks]

    report = RunReport()
    manifest = []
    for panel in scenario.panels:
        for topology in panel.topologies:
            for name in panel.observables:
                grid_col = _grid_column(panel, name)
                value_cols = columns_for(panel, name, topology)
                header = list(panel.sweep_columns) + ([grid_col] if grid_col else []) + value_cols
                width = len(header) - len(panel.sweep_columns)
                stem = _file_stem(panel, name, topology)
                path = out_dir / f"{stem}.csv"
                with path.open("w", newline="", encoding="utf-8") as fh:
                    writer = csv.writer(fh, lineterminator="\n")
                    writer.writerow(header)
                    for (p, topo, point), result in zip(keys, results):
                        if p is not panel or topo is not topology:
                            continue
                        rows, err = result[name]
                        swept = [format_value(v) for v in point.swept]
                        if err is not None:
                            report.errors.append({
                                "panel": panel.name,
                                "topology": topology.value,
                                "observable": name,
                                "point": point.index,
                                "sweep": dict(zip(panel.sweep_columns, point.swept)),
                                "message": err,
                            })
                            writer.writerow(swept + [""] * width)
                            continue
                        for row in rows:
                            writer.writerow(swept + [format_value(v) for v in row])
                report.files.append(path)
                manifest.append({
                    "file": path.name,
                    "panel": panel.name,
                    "observable": name,
                    "topology": topology.value,
                    "sweep_columns": list(panel.sweep_columns),
                    "grid_column": grid_col,
                    "value_columns": value_cols,
                })
    (out_dir / "manifest.json").write_text(
        json.dumps({"scenario": scenario.name, "datasets": manifest}, indent=2, sort_keys=True) + "\n",
        encoding="utf-8",
    )
    errors_path = out_dir / "errors.jsonl"
    if report.errors:
        with errors_path.open("w", encoding="utf-8") as fh:
            for e in report.errors:
                fh.write(json.dumps(e, sort_keys=True) + "\n")
    elif errors_path.exists():
        errors_path.unlink()
    return report
