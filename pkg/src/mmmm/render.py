"""Deterministic CSV/JSON rendering for the command line."""
from __future__ import annotations

import csv
import io
import json
import math
from decimal import ROUND_HALF_UP, Decimal

from .core import SystemParams, TransientDistribution

SCHEMA = "mmmm/1"


def round_half_up(x: float, places: int) -> float:
    q = Decimal(1).scaleb(-places)
    return float(Decimal(repr(x)).quantize(q, rounding=ROUND_HALF_UP))


def fmt_fixed(x, precision: int) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    if isinstance(x, (int, str)):
        return str(x)
    return f"{x:.{precision}f}"


def fmt_sci(x, precision: int) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{x:.{precision}e}"


def _num(x, precision: int):
    if x is None or (isinstance(x, float) and not math.isfinite(x)):
        return None
    return float(f"{x:.{precision}f}")


def to_csv(columns, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def transient_json(params: SystemParams, dist: TransientDistribution, precision: int) -> str:
    doc = {
        "schema": SCHEMA,
        "params": {"lambda0": params.lambda0, "mu": params.mu, "m": params.m},
        "n0": dist.n0,
        "t": dist.t,
        "method": dist.method,
        "probabilities": [_num(p, precision) for p in dist.probabilities],
        # bounds are tiny; keep significant digits rather than decimals
        "error_bound": None if dist.error_bound is None else float(f"{dist.error_bound:.{precision}e}"),
        "truncation": dist.info.get("truncation"),
    }
    if "regimes" in dist.info:
        doc["regimes"] = dist.info["regimes"]
    return json.dumps(doc, indent=2) + "\n"


def transient_csv(dist: TransientDistribution, precision: int) -> str:
    trunc = dist.info.get("truncation") or {}
    regimes = dist.info.get("regimes")
    columns = ["n0", "t", "method", "n", "probability", "error_bound", "F", "phi", "theta", "regime"]
    rows = []
    for n, p in enumerate(dist.probabilities):
        rows.append([
            dist.n0, repr(dist.t), dist.method, n, fmt_fixed(float(p), precision),
            fmt_sci(dist.error_bound, precision),
            trunc.get("F", ""), trunc.get("phi", ""), trunc.get("theta", ""),
            regimes[n] if regimes else "",
        ])
    return to_csv(columns, rows)
