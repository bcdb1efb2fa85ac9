"""JSON-safe dictionaries for outcomes, certificates and verdicts.

Indices can be far larger than a double holds, so every integer that may be
an index or register value is written as a decimal string.
"""

from __future__ import annotations

import json

from .analyzer import (
    AnalyzerSelfDivergence,
    ConfigCycle,
    GaveUp,
    HaltUnreachable,
    NotHalting,
    OutOfBudget,
    Query,
    SelfSimilarRegress,
)
from .machine import Configuration, FuelExhausted, Halted


def big(v: int | None) -> str | None:
    return None if v is None else str(v)


def config_to_dict(cfg: Configuration) -> dict:
    return {
        "stalled": cfg.stalled,
        "frames": [
            {"index": big(f.index), "pc": f.pc, "regs": [big(r) for r in f.regs], "kind": f.kind}
            for f in cfg.frames
        ],
    }


def query_to_dict(q: Query) -> dict:
    return {"n": big(q.n), "m": big(q.m)}


def certificate_to_dict(cert) -> dict:
    if isinstance(cert, HaltUnreachable):
        return {"kind": "HaltUnreachable", "reachable": sorted(cert.reachable)}
    if isinstance(cert, ConfigCycle):
        return {"kind": "ConfigCycle", "period": cert.period, "at": cert.at, "entry": config_to_dict(cert.entry)}
    if isinstance(cert, SelfSimilarRegress):
        return {"kind": "SelfSimilarRegress", "re_entry_depth": cert.re_entry_depth, "at": cert.at,
                "entry": config_to_dict(cert.entry)}
    if isinstance(cert, AnalyzerSelfDivergence):
        return {"kind": "AnalyzerSelfDivergence", "query": query_to_dict(cert.query), "via": cert.via,
                "give_up_trace_length": cert.give_up_trace_length,
                "re_invocation_trace_length": cert.re_invocation_trace_length, "at": cert.at}
    raise TypeError(f"not a certificate: {cert!r}")


def outcome_to_dict(outcome) -> dict:
    if isinstance(outcome, NotHalting):
        return {"result": "NotHalting", "ticks": outcome.ticks, "certificate": certificate_to_dict(outcome.certificate)}
    if isinstance(outcome, GaveUp):
        return {"result": "GaveUp", "ticks": outcome.ticks, "reason": outcome.reason,
                "blockers": sorted(([big(b.n), big(b.m)] for b in outcome.blockers), key=str)}
    if isinstance(outcome, OutOfBudget):
        return {"result": "OutOfBudget", "ticks": outcome.ticks}
    raise TypeError(f"not an analysis outcome: {outcome!r}")


def run_to_dict(outcome) -> dict:
    if isinstance(outcome, Halted):
        return {"result": "Halted", "output": big(outcome.output), "steps": outcome.steps}
    if isinstance(outcome, FuelExhausted):
        return {"result": "FuelExhausted", "steps": outcome.steps, "final": config_to_dict(outcome.final)}
    raise TypeError(f"not a run outcome: {outcome!r}")


def verdict_to_dict(v) -> dict:
    from .decider import Halts, NotHalts, Unknown

    if isinstance(v, Halts):
        return {"verdict": "Halts", "value": 1, "output": big(v.output), "steps": v.steps, "fuel_spent": v.fuel_spent}
    if isinstance(v, NotHalts):
        return {"verdict": "NotHalts", "value": 0, "ticks": v.ticks, "fuel_spent": v.fuel_spent,
                "certificate": certificate_to_dict(v.certificate)}
    if isinstance(v, Unknown):
        return {"verdict": "Unknown", "value": None, "fuel_spent": v.fuel_spent,
                "analyzer": outcome_to_dict(v.a_outcome)}
    raise TypeError(f"not a verdict: {v!r}")


def dumps(obj: dict) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)
