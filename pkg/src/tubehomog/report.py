"""Deterministic JSON / CSV encoding of every result type.

Rules: keys sorted, floats in shortest round-trip form (``repr``), +inf as
the string ``"inf"``, ``schema_version`` at the top level of each report.
Every ``to_dict`` has a matching ``from_dict`` so that a report survives a
round trip unchanged.

CSV layouts (header row always present):

* spectrum:    ``value,multiplicity,tag``; accumulation points follow as
  rows tagged ``accumulation`` with multiplicity 0
* pencil:      ``n,value,multiplicity,branch,sources,near_pole``; sources
  are ``;``-separated 0-based base indices
* convergence: ``eps,index,computed,predicted,rel_error``
"""

from __future__ import annotations

import csv
import io
import json
import math
from fractions import Fraction

import numpy as np

from .base import Spectrum
from .pencil import IntervalRoots, PencilParams, PencilRoot, PencilSpectrum
from .regimes import (Coupled, DecoupledThreshold, Pencil, RegimeLimits, ScaledLaplacian)
from .simulator import ConvergenceReport, ConvergenceRow

SCHEMA_VERSION = 1

__all__ = ["SCHEMA_VERSION", "encode", "decode_extended", "dumps", "to_dict", "from_dict", "to_csv", "export_report"]


def encode(x):
    """Recursively make ``x`` JSON-safe with infinities as ``"inf"``."""
    if isinstance(x, dict):
        return {str(k): encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [encode(v) for v in x]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            raise ValueError("NaN cannot be serialized")
        return x
    return x


def decode_extended(x):
    if x == "inf":
        return math.inf
    if x == "-inf":
        return -math.inf
    return None if x is None else float(x)


def dumps(obj) -> str:
    payload = to_dict(obj) if not isinstance(obj, dict) else obj
    return json.dumps(encode(payload), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _problem_dict(problem) -> dict:
    d = {"regime": problem.kind}
    if isinstance(problem, Pencil):
        d.update(p=problem.p, q=problem.q, omega=problem.omega)
    elif isinstance(problem, DecoupledThreshold):
        d.update(q=problem.q)
    elif isinstance(problem, ScaledLaplacian):
        d.update(c=problem.c)
    elif isinstance(problem, Coupled):
        d.update(V=problem.V)
    return d


def _problem_from(d: dict):
    kind = d["regime"]
    if kind == "pencil":
        return Pencil(p=float(d["p"]), q=float(d["q"]), omega=float(d["omega"]))
    if kind == "decoupled":
        return DecoupledThreshold(q=float(d["q"]))
    if kind == "scaled":
        return ScaledLaplacian(c=float(d["c"]))
    if kind == "coupled":
        return Coupled(V=float(d["V"]))
    raise ValueError(f"unknown regime {kind!r}")


def to_dict(obj) -> dict:
    if isinstance(obj, RegimeLimits):
        return {"type": "regime_limits", "schema_version": SCHEMA_VERSION,
                "p": obj.p, "q": obj.q, "r": obj.r, "D": obj.D, "Q": obj.Q}
    if isinstance(obj, (Pencil, DecoupledThreshold, ScaledLaplacian, Coupled)):
        return {"type": "homogenized_problem", "schema_version": SCHEMA_VERSION, **_problem_dict(obj)}
    if isinstance(obj, Spectrum):
        return {"type": "spectrum", "schema_version": SCHEMA_VERSION,
                "entries": [{"value": float(v), "multiplicity": int(m), "tag": t}
                            for v, m, t in zip(obj.values, obj.multiplicities, obj.tags)],
                "accumulation_points": [float(a) for a in obj.accumulation_points]}
    if isinstance(obj, PencilSpectrum):
        p = obj.params
        return {"type": "pencil_spectrum", "schema_version": SCHEMA_VERSION,
                "params": {"p": p.p, "q": p.q, "omega": p.omega, "pole_guard": p.pole_guard},
                "intervals": [{"n": b.n, "lower": b.lower, "upper": b.upper,
                               "roots": [{"value": r.value, "multiplicity": r.multiplicity,
                                          "branch": r.branch, "sources": list(r.sources),
                                          "near_pole": r.near_pole} for r in b.roots]}
                              for b in obj.intervals],
                "accumulation_points": [float(a) for a in obj.accumulation_points]}
    if isinstance(obj, ConvergenceReport):
        return {"type": "convergence_report", "schema_version": SCHEMA_VERSION,
                "regime": obj.regime, "eps_list": list(obj.eps_list), "threshold": obj.threshold,
                "verdicts": dict(obj.verdicts),
                "rows": [{"eps": r.eps, "computed": list(r.computed), "predicted": list(r.predicted),
                          "rel_errors": list(r.rel_errors), "dim": r.dim,
                          "ground_symmetry": r.ground_symmetry, "window_count": r.window_count,
                          "seconds": r.seconds, "error": r.error} for r in obj.rows]}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_dict(d: dict):
    kind = d.get("type")
    if kind == "regime_limits":
        Q = d.get("Q")
        return RegimeLimits(p=decode_extended(d["p"]), q=decode_extended(d["q"]), r=decode_extended(d["r"]),
                            D=decode_extended(d["D"]), Q=None if Q is None else decode_extended(Q))
    if kind == "homogenized_problem":
        return _problem_from(d)
    if kind == "spectrum":
        e = d["entries"]
        return Spectrum(np.array([x["value"] for x in e], dtype=float),
                        np.array([x["multiplicity"] for x in e], dtype=int),
                        tuple(x["tag"] for x in e), np.array(d["accumulation_points"], dtype=float))
    if kind == "pencil_spectrum":
        p = d["params"]
        params = PencilParams(p=p["p"], q=p["q"], omega=p["omega"], pole_guard=p["pole_guard"])
        blocks = tuple(
            IntervalRoots(n=b["n"], lower=b["lower"], upper=b["upper"],
                          roots=tuple(PencilRoot(r["value"], r["multiplicity"], r["branch"],
                                                 tuple(r["sources"]), r["near_pole"]) for r in b["roots"]))
            for b in d["intervals"])
        return PencilSpectrum(params=params, intervals=blocks,
                              accumulation_points=np.array(d["accumulation_points"], dtype=float))
    if kind == "convergence_report":
        rows = tuple(ConvergenceRow(eps=r["eps"], computed=tuple(r["computed"]), predicted=tuple(r["predicted"]),
                                    rel_errors=tuple(r["rel_errors"]), dim=r["dim"],
                                    ground_symmetry=r["ground_symmetry"], window_count=r["window_count"],
                                    seconds=r["seconds"], error=r["error"]) for r in d["rows"])
        return ConvergenceReport(regime=d["regime"], eps_list=tuple(d["eps_list"]), rows=rows,
                                 verdicts=dict(d["verdicts"]), threshold=d["threshold"])
    raise ValueError(f"unknown report type {kind!r}")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return buf.getvalue()


def to_csv(obj) -> str:
    if isinstance(obj, Spectrum):
        rows = [(float(v), int(m), t) for v, m, t in zip(obj.values, obj.multiplicities, obj.tags)]
        rows += [(float(a), 0, "accumulation") for a in obj.accumulation_points]
        return _csv(["value", "multiplicity", "tag"], rows)
    if isinstance(obj, PencilSpectrum):
        rows = [(b.n, r.value, r.multiplicity, r.branch, ";".join(map(str, r.sources)), int(r.near_pole))
                for b in obj.intervals for r in b.roots]
        return _csv(["n", "value", "multiplicity", "branch", "sources", "near_pole"], rows)
    if isinstance(obj, ConvergenceReport):
        rows = [(r.eps, j + 1, c, p, e)
                for r in obj.rows for j, (c, p, e) in enumerate(zip(r.computed, r.predicted, r.rel_errors))]
        return _csv(["eps", "index", "computed", "predicted", "rel_error"], rows)
    raise TypeError(f"no CSV layout for {type(obj).__name__}")


def export_report(report, fmt: str = "json") -> bytes:
    """Deterministic byte encoding of ``report`` (a result object or plain dict)."""
    if fmt == "json":
        return dumps(report).encode("utf-8")
    if fmt == "csv":
        return to_csv(report).encode("utf-8")
    raise ValueError(f"unknown format {fmt!r}")
