"""Trace serialization: CSV rows per control period and a JSON summary."""

from __future__ import annotations

import csv
import json
from pathlib import Path

from .sim import SimTrace

CSV_COLUMNS = (
    "t",
    "x_true", "y_true", "theta_true",
    "x_odo", "y_odo", "theta_odo",
    "err1", "err2", "err3",
    "v_cmd", "omega_cmd",
    "wl_cmd", "wr_cmd",
    "power_l", "power_r",
    "saturated",
)


def _fmt(value: float) -> str:
    text = f"{value:.9g}"
    return "0" if text == "-0" else text


def trace_rows(trace: SimTrace):
    """Yield CSV rows as lists of strings. For regulation runs err1..err3 hold
    (r, e_theta, theta_E); for tracking runs (e1, e2, e3)."""
    for rec in trace.records:
        values = (
            rec.t,
            *rec.pose_true.as_tuple(),
            *rec.pose_odo.as_tuple(),
            *rec.error_state.as_tuple(),
            rec.twist_cmd.v, rec.twist_cmd.omega,
            rec.wheel_cmds.omega_l, rec.wheel_cmds.omega_r,
            rec.power_l.value, rec.power_r.value,
        )
        yield [_fmt(v) for v in values] + ["1" if rec.saturated else "0"]


def emit_trace_csv(trace: SimTrace, path: str | Path) -> None:
    if not trace.records:
        raise ValueError("cannot write an empty trace")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(trace_rows(trace))


def summary_dict(trace: SimTrace) -> dict:
    """Deterministic summary payload (wall time is deliberately left out)."""
    s = trace.summary
    cfg = trace.config
    return {
        "mode": cfg.mode,
        "converged": s.converged,
        "diverged": s.diverged,
        "final_time": round(s.final_time, 9),
        "n_steps": s.n_steps,
        "final_pose_true": [float(_fmt(v)) for v in s.final_pose_true.as_tuple()],
        "final_pose_odo": [float(_fmt(v)) for v in s.final_pose_odo.as_tuple()],
        "initial_error_norm": float(_fmt(s.initial_error_norm)),
        "final_error": [float(_fmt(v)) for v in s.final_error],
        "final_error_norm": float(_fmt(s.final_error_norm)),
        "rms_error_norm": float(_fmt(s.rms_error_norm)),
        "peak_abs_power": float(_fmt(s.peak_abs_power)),
        "peak_abs_raw_power": float(_fmt(s.peak_abs_raw_power)),
        "saturation_count": s.saturation_count,
    }


def emit_summary_json(trace: SimTrace, path: str | Path) -> None:
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        json.dump(summary_dict(trace), fh, indent=2, sort_keys=True)
        fh.write("\n")
