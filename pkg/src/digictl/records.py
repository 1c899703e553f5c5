"""JSON design records and CSV emission."""

from __future__ import annotations

import json
import math
from pathlib import Path

from .designer import ControllerDesign, normalize_angle
from .freqresp import FrequencyPoint, margins
from .polytf import Domain, TransferFunction, series
from .xform import warp_frequency

FLOAT_FMT = "{:.12g}"


def fmt(x: float) -> str:
    return FLOAT_FMT.format(float(x))


def tf_to_dict(tf: TransferFunction) -> dict:
    return {
        "domain": tf.domain.kind,
        "sample_period": tf.T,
        "num": tf.num.descending(),
        "den": tf.den.descending(),
    }


def tf_from_dict(data: dict) -> TransferFunction:
    try:
        kind = data["domain"]
        domain = Domain(kind, data.get("sample_period"))
        return TransferFunction.from_descending(data["num"], data["den"], domain)
    except KeyError as exc:
        raise ValueError(f"transfer function record is missing field {exc.args[0]!r}") from None


def _clean(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None if math.isnan(x) else ("inf" if x > 0 else "-inf")
    return x


def design_record(d: ControllerDesign, plant_z: TransferFunction | None = None) -> dict:
    rec = {
        "method": d.method,
        "goal": {"phi_pm_deg": d.goal.phi_pm, "omega_wc_rad_s": d.goal.omega_wc, "T_s": d.goal.T},
        "theta_r_deg": d.theta_r,
        "theta_r_normalized_deg": None if d.theta_r is None else normalize_angle(d.theta_r),
        "plant_at_wc": {"magnitude": d.plant_mag, "phase_deg": d.plant_phase_deg},
        "params": {k: _clean(float(v)) for k, v in d.params.items()},
        "d_w": tf_to_dict(d.d_w),
        "d_z": tf_to_dict(d.d_z),
        "verification": {k: float(v) for k, v in d.verification.items()},
    }
    if plant_z is not None:
        rec["achieved_margins"] = margins(series(d.d_z, plant_z)).as_dict()
    return rec


def write_json(obj, path: str | Path | None, stream=None) -> None:
    write_text(json.dumps(obj, indent=2) + "\n", path, stream)


def load_controller(path: str | Path) -> TransferFunction:
    """Controller D(z) from a design record (or a bare transfer-function record)."""
    data = json.loads(Path(path).read_text())
    if "d_z" in data:
        data = data["d_z"]
    tf = tf_from_dict(data)
    if tf.domain.kind != "Z":
        raise ValueError(f"{path}: controller must be a Z-domain transfer function")
    return tf


def bode_rows(points: list[FrequencyPoint], domain: Domain) -> list[list[str]]:
    rows = [["omega_rad_s", "omega_warped_rad_s", "mag_db", "phase_deg"]]
    for p in points:
        warped = warp_frequency(p.omega, domain.sample_period) if domain.kind == "Z" else p.omega
        rows.append([fmt(p.omega), fmt(warped), fmt(p.mag_db), fmt(p.phase_deg)])
    return rows


def step_rows(t, y, kpot: float) -> list[list[str]]:
    rows = [["t_s", "y_volts", "y_deg"]]
    for ti, yi in zip(t, y):
        rows.append([fmt(ti), fmt(yi), fmt(yi / kpot)])
    return rows


def csv_text(rows: list[list[str]]) -> str:
    return "".join(",".join(r) + "\n" for r in rows)


def write_text(text: str, path: str | Path | None, stream=None) -> None:
    if path is None:
        stream.write(text)
        return
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
