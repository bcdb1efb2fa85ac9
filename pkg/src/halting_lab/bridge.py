"""Existential statements as searches.

For a total 0/1 predicate program P, ``make_searcher(P)`` is the arity-0
program that tries x = 0, 1, 2, ... and halts with the first x where P(x) = 1.
"(exists x) P(x)" is true exactly when the searcher halts, so the decider's
verdict on the searcher can be compared with a brute-force witness search.
"""

from __future__ import annotations

from dataclasses import dataclass

from .asm import Assembler
from .decider import Halts, NotHalts, decide, verdict_name
from .lang import Op, Program, encode
from .machine import FuelExhausted, Halted, Mode, emulate
from .trivalent import GAP, T, NecessitationRow, verdict_to_truth


class BridgeError(ValueError):
    pass


@dataclass(frozen=True)
class PredicateProgram:
    program: Program
    name: str = "P"
    certified_total: bool = False

    @property
    def index(self) -> int:
        return encode(self.program)

    def __post_init__(self):
        if self.program.arity != 1:
            raise BridgeError("a predicate takes one input")

    def __call__(self, x: int, fuel: int = 10**5) -> int:
        out = emulate(self.index, x, fuel, program=self.program)
        if not isinstance(out, Halted):
            raise BridgeError(f"{self.name}({x}) did not halt within {fuel} steps")
        if out.output not in (0, 1):
            raise BridgeError(f"{self.name}({x}) returned {out.output}, not 0 or 1")
        return out.output


def make_searcher(pred: PredicateProgram | Program, halt_arm: bool = True) -> Program:
    """x := 0; loop { if P(x) halt with x; x := x + 1 }.

    With ``halt_arm=False`` the success branch is a literal ``JMP 0``, which
    gives a searcher that structurally cannot halt.
    """
    prog = pred.program if isinstance(pred, PredicateProgram) else pred
    if prog.arity != 1:
        raise BridgeError("a predicate takes one input")
    a = Assembler(0)
    a.op(Op.CONST, 2, encode(prog))
    a.op(Op.CONST, 1, 0)
    a.label("test")
    a.op(Op.APPLY, 2, 1)
    a.decjz(0, "next")
    a.op(Op.COPY, 1, 0)
    if halt_arm:
        a.op(Op.HALT)
    else:
        a.jmp(0)
    a.label("next")
    a.op(Op.INC, 1)
    a.jmp("test")
    return a.build()


# -- the predicate family --------------------------------------------------------

def _pred(name: str, build) -> PredicateProgram:
    a = Assembler(1)
    build(a)
    return PredicateProgram(a.build(), name, certified_total=True)


def _const(value: int):
    def build(a: Assembler) -> None:
        a.op(Op.CONST, 0, value)
        a.op(Op.HALT)

    return build


def _equals(c: int, reduce_mod: int | None = None):
    """r0 := [r1 (mod m) == c], by counting r1 and c down together."""

    def build(a: Assembler) -> None:
        if reduce_mod is not None:
            a.op(Op.MODC, 1, reduce_mod)
        a.op(Op.CONST, 0, 0)
        a.op(Op.CONST, 2, c)
        a.label("loop")
        a.decjz(2, "drained")
        a.decjz(1, "end")  # x < c
        a.jmp("loop")
        a.label("drained")
        a.decjz(1, "yes")
        a.op(Op.HALT)  # x > c
        a.label("yes")
        a.op(Op.INC, 0)

    return build


def _at_least(c: int):
    def build(a: Assembler) -> None:
        a.op(Op.CONST, 0, 1)
        a.op(Op.CONST, 2, c)
        a.label("loop")
        a.decjz(2, "end")
        a.decjz(1, "no")
        a.jmp("loop")
        a.label("no")
        a.op(Op.CONST, 0, 0)

    return build


def predicate_family() -> dict[str, PredicateProgram]:
    """Ten total predicates: equality tests, parity, thresholds, constants."""
    specs = {
        "x = 0": _equals(0),
        "x = 3": _equals(3),
        "x = 5": _equals(5),
        "x = 12": _equals(12),
        "x even": _equals(0, reduce_mod=2),
        "x odd": _equals(1, reduce_mod=2),
        "x mod 7 = 6": _equals(6, reduce_mod=7),
        "x >= 4": _at_least(4),
        "true": _const(1),
        "false": _const(0),
    }
    return {name: _pred(name, build) for name, build in specs.items()}


# -- correspondence ----------------------------------------------------------------

CONSISTENT, PARTIAL, AUDIT, INCONCLUSIVE, INCONSISTENT = (
    "consistent", "partial", "audit", "inconclusive", "inconsistent")


@dataclass(frozen=True)
class CorrespondenceReport:
    name: str
    bound: int
    witness: int | None
    verdict: object
    searcher_index: int
    status: str

    @property
    def hard_failure(self) -> bool:
        return self.status == INCONSISTENT

    @property
    def exists_truth(self):
        """Truth of "(exists x) P(x)": T with a checked witness, else a gap
        (falsity over all naturals is not something a bounded search shows)."""
        if self.witness is not None:
            return T
        if isinstance(self.verdict, Halts):
            return T
        return GAP

    @property
    def row(self) -> NecessitationRow:
        return NecessitationRow(verdict_to_truth(self.verdict), self.exists_truth)

    def to_dict(self) -> dict:
        from .serialize import verdict_to_dict

        return {
            "predicate": self.name,
            "bound": self.bound,
            "witness": self.witness,
            "searcher_index": str(self.searcher_index),
            "verdict": verdict_to_dict(self.verdict),
            "status": self.status,
        }


def correspondence_check(pred: PredicateProgram, bound: int = 10, fuel: int = 10**5,
                         mode: Mode | str = Mode.GENERAL) -> CorrespondenceReport:
    """Brute-force a witness below ``bound`` and compare with the decider."""
    if bound < 1:
        raise ValueError("bound must be >= 1")
    witness = next((x for x in range(bound) if pred(x) == 1), None)
    searcher = make_searcher(pred)
    idx = encode(searcher)
    if Mode(mode) is Mode.STRICT:
        from .fixpoint import build_gallery

        designated = build_gallery().designated
    else:
        designated = None
    v = decide((idx, None), mode, fuel, designated)
    if isinstance(v, Halts):
        # the searcher's output must itself be a witness, and the least one
        if pred(v.output) != 1 or (witness is not None and v.output != witness):
            status = INCONSISTENT
        else:
            status = CONSISTENT
    elif isinstance(v, NotHalts):
        status = INCONSISTENT if witness is not None else AUDIT
    else:
        status = INCONCLUSIVE if witness is not None else PARTIAL
    return CorrespondenceReport(pred.name, bound, witness, v, idx, status)


def halt_free_verdict(pred: PredicateProgram, fuel: int = 10**5):
    """Verdict on the searcher variant whose success branch loops."""
    return decide((encode(make_searcher(pred, halt_arm=False)), None), Mode.GENERAL, fuel)


def count_predicate_calls(pred: PredicateProgram, fuel: int = 10**5) -> int | None:
    """Number of APPLY events in the searcher's run, or None if it ran out."""
    from .machine import CALL_EV, trace_of

    tr = trace_of(encode(make_searcher(pred)), None, fuel, sample_every=fuel)
    if isinstance(tr.outcome, FuelExhausted):
        return None
    return sum(1 for e in tr if e.event == CALL_EV)


__all__ = [
    "BridgeError",
    "CorrespondenceReport",
    "PredicateProgram",
    "correspondence_check",
    "count_predicate_calls",
    "halt_free_verdict",
    "make_searcher",
    "predicate_family",
    "verdict_name",
]
