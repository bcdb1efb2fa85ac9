"""The decider H = A || B and what it reports.

A (the analyzer) and B (the emulator) are deterministic and independent, so
strict alternation -- analyzer tick at odd times, emulator step at even times
-- is computed by running each side on its own share and comparing finishing
times.  The result is the same as stepping them in lock-step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .analyzer import (
    AnalysisOutcome,
    NotHalting,
    Query,
    analyze,
    check_certificate,
)
from .machine import Designated, FuelExhausted, Halted, Mode, World, emulate


class SoundnessError(AssertionError):
    """Both sides concluded: the analyzer is wrong."""


@dataclass(frozen=True)
class Halts:
    output: int
    steps: int
    fuel_spent: int = 0

    value = 1


@dataclass(frozen=True)
class NotHalts:
    certificate: object
    ticks: int = 0
    fuel_spent: int = 0

    value = 0


@dataclass(frozen=True)
class Unknown:
    fuel_spent: int
    a_outcome: AnalysisOutcome = field(compare=False)

    value = None


Verdict3 = Union[Halts, NotHalts, Unknown]


def decide(query: Query | tuple, mode: Mode | str = Mode.STRICT, fuel: int = 10**5,
           designated: Designated | None = None, budget: int | None = None) -> Verdict3:
    """Interleave analyzer and emulator on ``query``.

    ``fuel`` is the total number of rounds worth of work; without an explicit
    ``budget`` the analyzer gets the odd half and the emulator the even half.
    With ``budget`` the analyzer gets ``budget`` ticks and the emulator
    ``fuel`` steps.
    """
    if fuel < 2:
        raise ValueError("fuel must be >= 2")
    if not isinstance(query, Query):
        query = Query.of(*query)
    world = World(Mode(mode), designated)
    if budget is None:
        a_budget, b_fuel = (fuel + 1) // 2, fuel // 2
    else:
        a_budget, b_fuel = budget, fuel
    a = analyze(query, world.mode, a_budget, world.designated)
    a_done = 2 * a.ticks - 1 if isinstance(a, NotHalting) else None
    # the emulator only matters if it could finish first
    cap = b_fuel if a_done is None else min(b_fuel, (a_done - 1) // 2)
    b = emulate(query.n, query.m, cap, world) if cap >= 1 else None
    b_done = 2 * b.steps if isinstance(b, Halted) else None
    if a_done is not None and b_done is not None:
        raise SoundnessError(f"{query}: analyzer says never halts, emulator halted")
    if a_done is not None:
        return NotHalts(a.certificate, a.ticks, a_done)
    if b_done is not None:
        return Halts(b.output, b.steps, b_done)
    return Unknown(a_budget + b_fuel, a)


def verdict_name(v: Verdict3) -> str:
    return type(v).__name__


# -- tripartition ---------------------------------------------------------------

@dataclass
class TripartitionReport:
    start: int
    end: int
    fuel: int
    mode: Mode
    verdicts: list[Verdict3]

    @property
    def counts(self) -> dict[str, int]:
        out = {"Halts": 0, "NotHalts": 0, "Unknown": 0}
        for v in self.verdicts:
            out[verdict_name(v)] += 1
        return out

    def members(self, kind: str) -> list[int]:
        return [self.start + i for i, v in enumerate(self.verdicts) if verdict_name(v) == kind]


def classify(range_end: int, mode: Mode | str = Mode.STRICT, fuel: int = 10**3,
             designated: Designated | None = None, budget: int | None = None,
             start: int = 0) -> TripartitionReport:
    """Decide every index in ``[start, range_end)`` with no input."""
    if range_end < 1:
        raise ValueError("range_end must be >= 1")
    mode = Mode(mode)
    if mode is Mode.STRICT and designated is None:
        from .fixpoint import build_gallery

        designated = build_gallery().designated
    verdicts = [decide(Query.of(i, None), mode, fuel, designated, budget) for i in range(start, range_end)]
    return TripartitionReport(start, range_end, fuel, mode, verdicts)


@dataclass
class AuditResult:
    checked: int = 0
    failures: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures


def audit(report: TripartitionReport, designated: Designated | None = None,
          witness_fuel: int = 10**5) -> AuditResult:
    """Re-check every definite verdict in ``report`` independently."""
    if report.mode is Mode.STRICT and designated is None:
        from .fixpoint import build_gallery

        designated = build_gallery().designated
    world = World(report.mode, designated)
    res = AuditResult()
    for i, v in enumerate(report.verdicts):
        idx = report.start + i
        if isinstance(v, Halts):
            res.checked += 1
            direct = emulate(idx, None, v.steps, world)
            if direct != Halted(v.output, v.steps):
                res.failures.append(f"{idx}: Halts not reproduced by direct emulation")
        elif isinstance(v, NotHalts):
            res.checked += 1
            if not check_certificate(v.certificate, Query.of(idx, None), world.mode, designated):
                res.failures.append(f"{idx}: certificate rejected")
            if not isinstance(emulate(idx, None, witness_fuel, world), FuelExhausted):
                res.failures.append(f"{idx}: NotHalts but halts within {witness_fuel} steps")
    return res


# -- the reductio ----------------------------------------------------------------

@dataclass(frozen=True)
class DerivationStep:
    number: int
    formula: str
    gloss: str
    justification: str
    side_condition: str
    holds: bool | None
    discharged: bool = False


@dataclass(frozen=True)
class DerivationReport:
    steps: tuple[DerivationStep, ...]

    def to_dict(self) -> dict:
        return {"steps": [s.__dict__ for s in self.steps]}


def _reaches_call(index: int, callee: int, arg: int, fuel: int) -> bool:
    """Does the run of ``index`` enter ``callee`` on ``arg`` by APPLY?"""
    from .machine import CALL_EV, Request, Runner

    runner = Runner.start(index, None)
    for _ in range(fuel):
        ev = runner.step()
        if ev is None:
            continue
        if isinstance(ev, Request) or ev[0] != CALL_EV:
            return False
        return ev[1] == callee and ev[2] == arg
    return False


def derivation_report(designated: Designated, b: int | None = None, fuel: int = 10**5) -> DerivationReport:
    """The four-line reductio with each line's machine-checkable side condition."""
    d = designated
    strict = Mode.STRICT
    ks = decide((d.k, d.s), strict, fuel, d)
    s_run = decide((d.s, None), strict, fuel, d)
    link = _reaches_call(d.s, d.k, d.s, fuel)
    witness = None
    if b is not None:
        witness = decide((b, d.s), Mode.GENERAL, fuel, d, budget=fuel)
    steps = (
        DerivationStep(1, "A(k, s)↓", "C_k(s) has been determined not to halt",
                       "Assumption 1 (undischarged)",
                       "decide((k, s)) = NotHalts", isinstance(ks, NotHalts)),
        DerivationStep(2, "B(s, *)↓", "C_s() has been determined to halt",
                       "Assumption 2", "hypothetical; decide((s, -)) is not Halts",
                       not isinstance(s_run, Halts), discharged=True),
        DerivationStep(3, "B(k, s)↓", "C_k(s) has been determined to halt",
                       "From (2) by the Recursion Theorem, contradicts (1)",
                       "C_s enters C_k on input s (C_s ≡ C_k(s))", link),
        DerivationStep(4, "~B(s, *)↓", "It cannot be determined that C_s() halts",
                       "Conclusion by reductio, (2) discharged",
                       "general-mode witness decide((b, s)) = NotHalts",
                       None if witness is None else isinstance(witness, NotHalts)),
    )
    return DerivationReport(steps)
