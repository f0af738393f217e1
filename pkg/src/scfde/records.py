"""CSV and JSON serialization of estimate curves and run summaries."""

import csv
import dataclasses
import enum
import json
import math

from .montecarlo import EstimatePoint, SlopeFit

CSV_COLUMNS = ("snr_db", "p_hat", "ci_low", "ci_high", "trials", "successes")


def fmt_float(x):
    """17 significant digits, enough for an exact round trip."""
    return format(float(x), ".17g")


def write_curve_csv(path, points):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for p in points:
            w.writerow([fmt_float(p.snr_db), fmt_float(p.p_hat), fmt_float(p.ci_low),
                        fmt_float(p.ci_high), p.trials, p.successes])


def read_curve_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [EstimatePoint(float(r["snr_db"]), float(r["p_hat"]), int(r["trials"]),
                          int(r["successes"]), float(r["ci_low"]), float(r["ci_high"]))
            for r in rows]


def to_jsonable(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    if hasattr(obj, "item"):  # numpy scalars
        return to_jsonable(obj.item())
    return obj


def point_from_json(d):
    return EstimatePoint(float(d["snr_db"]), float(d["p_hat"]), int(d["trials"]),
                         int(d["successes"]), float(d["ci_low"]), float(d["ci_high"]))


def fit_from_json(d):
    if d is None:
        return None
    return SlopeFit(float(d["slope"]), float(d["intercept"]), tuple(d["window"]),
                    float(d["residual"]))


def write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_jsonable(payload), fh, indent=2)
        fh.write("\n")


def read_json(path):
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
