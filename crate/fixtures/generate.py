"""Regenerates the bundled fixture files. Output is deterministic."""

import csv
import json
import math
import os
import random

HERE = os.path.dirname(os.path.abspath(__file__))

PROFILE = [0.62, 0.58, 0.56, 0.55, 0.56, 0.60, 0.68, 0.76, 0.82, 0.86, 0.88, 0.89,
           0.89, 0.88, 0.88, 0.90, 0.95, 1.00, 1.00, 0.98, 0.93, 0.85, 0.76, 0.68]
LOAD_SHARE = [("B3", 0.4), ("B4", 0.3), ("B5", 0.3)]
CAP = 150.0
HISTORY_DAYS = 120


def write_json(path, obj):
    with open(path, "w") as f:
        json.dump(obj, f, indent=2)
        f.write("\n")


def write_hourly(path, ids, columns):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["hour"] + ids)
        for t in range(len(columns[0])):
            w.writerow([t + 1] + [fmt(c[t]) for c in columns])


def fmt(v):
    return repr(round(v, 3))


def gen(id, bus, p_min, p_max, ramp, su, ut, startup, no_load, blocks, quick, status, out):
    return {
        "id": id, "bus": bus, "p_min": p_min, "p_max": p_max,
        "ramp_up": ramp, "ramp_down": ramp, "startup_ramp": su, "shutdown_ramp": su,
        "min_up": ut, "min_down": ut, "startup_cost": startup, "no_load_cost": no_load,
        "fuel_curve": [{"width": w, "marginal_cost": c} for w, c in blocks],
        "quick_start": quick, "initial_status": status, "initial_output": out,
    }


def six_bus(limits=None):
    limits = limits or {}
    lines = [("L1", "B1", "B2", 0.10), ("L2", "B1", "B4", 0.15), ("L3", "B2", "B3", 0.12),
             ("L4", "B2", "B4", 0.10), ("L5", "B3", "B6", 0.15), ("L6", "B4", "B5", 0.12),
             ("L7", "B5", "B6", 0.10)]
    return {
        "name": "six_bus",
        "slack_bus": "B1",
        "buses": [{"id": f"B{i}"} for i in range(1, 7)],
        "lines": [{"id": l, "from_bus": a, "to_bus": b, "reactance": x,
                   "flow_limit": limits.get(l, 250.0)} for l, a, b, x in lines],
        "generators": [
            gen("G1", "B1", 80.0, 220.0, 120.0, 100.0, 8, 2000.0, 300.0,
                [(70.0, 14.0), (70.0, 16.0)], False, 24, 150.0),
            gen("G2", "B2", 30.0, 100.0, 40.0, 50.0, 4, 1200.0, 150.0,
                [(35.0, 24.0), (35.0, 27.0)], False, -10, 0.0),
            gen("G3", "B6", 10.0, 80.0, 80.0, 80.0, 1, 150.0, 80.0,
                [(35.0, 60.0), (35.0, 70.0)], True, -10, 0.0),
        ],
        "wind_farms": [{"id": "W1", "bus": "B5", "capacity": CAP, "x_km": 0.0, "y_km": 0.0}],
        "load_file": "load.csv",
    }


def load_columns(peaks):
    cols = [[] for _ in LOAD_SHARE]
    for peak in peaks:
        for frac in PROFILE:
            for k, (_, share) in enumerate(LOAD_SHARE):
                cols[k].append(peak * frac * share)
    return cols


def smooth_series(rng, n, lo, hi, rho=0.85, sd=18.0, start=None):
    x = start if start is not None else rng.uniform(lo, hi)
    out = []
    for _ in range(n):
        x = rho * x + (1 - rho) * (lo + hi) / 2 + rng.gauss(0.0, sd)
        x = min(max(x, 0.0), CAP)
        out.append(x)
    return out


def clip(v):
    return min(max(v, 0.0), CAP)


def history(rng, days, noise_sd):
    point = smooth_series(rng, days * 24, 20.0, 130.0)
    rows = []
    for ts, p in enumerate(point):
        actual = clip(p + rng.gauss(0.0, noise_sd))
        rows.append((ts, "W1", ts % 24, p, actual))
    return rows


def write_history(path, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["timestamp", "farm", "hour", "point_forecast", "actual"])
        for ts, farm, h, p, a in rows:
            w.writerow([ts, farm, h, fmt(p), fmt(a)])


def two_bus():
    d = os.path.join(HERE, "two_bus")
    os.makedirs(d, exist_ok=True)
    write_json(os.path.join(d, "system.json"), {
        "name": "two_bus",
        "slack_bus": "1",
        "buses": [{"id": "1"}, {"id": "2"}],
        "lines": [{"id": "L1", "from_bus": "1", "to_bus": "2", "reactance": 0.1, "flow_limit": 40.0}],
        "generators": [gen("G1", "1", 10.0, 100.0, 100.0, 100.0, 1, 100.0, 0.0,
                           [(90.0, 20.0)], False, -1, 0.0)],
        "wind_farms": [],
        "load_file": "load.csv",
    })
    write_hourly(os.path.join(d, "load.csv"), ["2"], [[50.0, 50.0, 50.0]])


def six_bus_day(rng):
    for name, limits in (("six_bus", {}), ("six_bus_congested", {"L2": 75.0})):
        d = os.path.join(HERE, name)
        os.makedirs(d, exist_ok=True)
        sys = six_bus(limits)
        sys["name"] = name
        write_json(os.path.join(d, "system.json"), sys)
        write_hourly(os.path.join(d, "load.csv"), [b for b, _ in LOAD_SHARE], load_columns([290.0]))
    hist = history(rng, HISTORY_DAYS, 30.0)
    base = HISTORY_DAYS * 24
    da = [70.0 + 35.0 * math.sin(2 * math.pi * (t - 3) / 24) for t in range(24)]
    real = [clip(v + rng.gauss(0.0, 20.0)) for v in da]
    for name in ("six_bus", "six_bus_congested"):
        d = os.path.join(HERE, name)
        write_history(os.path.join(d, "history.csv"), hist)
        write_hourly(os.path.join(d, "da_forecast.csv"), ["W1"], [da])
        write_hourly(os.path.join(d, "realized.csv"), ["W1"], [real])
    return base


def scarcity_week(rng):
    d = os.path.join(HERE, "scarcity_week")
    os.makedirs(d, exist_ok=True)
    sys = six_bus()
    sys["name"] = "scarcity_week"
    write_json(os.path.join(d, "system.json"), sys)
    peaks = [285.0, 290.0, 280.0, 290.0, 295.0, 275.0, 285.0]
    write_hourly(os.path.join(d, "load.csv"), [b for b, _ in LOAD_SHARE], load_columns(peaks))
    write_history(os.path.join(d, "history.csv"), history(rng, HISTORY_DAYS, 30.0))
    scarcity = 3
    da, real, rac = [], [], []
    for day in range(7):
        if day == scarcity:
            f = [100.0 + 8.0 * math.sin(2 * math.pi * t / 24) for t in range(24)]
            r = [clip(v - 35.0 + rng.gauss(0.0, 1.0)) for v in f]
            a = list(f)
        else:
            f = smooth_series(rng, 24, 30.0, 120.0, rho=0.9, sd=8.0)
            r = [clip(v + rng.gauss(0.0, 20.0)) for v in f]
            a = [0.7 * x + 0.3 * y for x, y in zip(r, f)]
        da += f
        real += r
        rac += a
    write_hourly(os.path.join(d, "da_forecast.csv"), ["W1"], [da])
    write_hourly(os.path.join(d, "realized.csv"), ["W1"], [real])
    write_hourly(os.path.join(d, "rac_forecast.csv"), ["W1"], [rac])


if __name__ == "__main__":
    rng = random.Random(20240607)
    two_bus()
    six_bus_day(rng)
    scarcity_week(rng)
