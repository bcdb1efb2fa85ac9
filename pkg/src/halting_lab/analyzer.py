"""The non-halting prover A.

Contract: whenever :func:`analyze` returns :class:`NotHalting` for (n, m),
program n never halts on m.  It says nothing otherwise.

Layers, first conclusive wins:

* L0 (strict mode): the designated self-referential indices s and q are
  refused outright, as the C fragment does with ``if (n == s) C_s();``.
* L1: no HALT (or fall-through past the end) reachable in the control-flow
  graph.
* L2: an exact repeat of the whole configuration during emulation.
* L3: a call frame entered with the same (index, registers) as one of its
  ancestors -- the outer run cannot finish before an identical inner run.
* L4: ANALYZE/HCALL met during emulation are resolved as sub-queries.  A
  sub-query already in flight makes the current query give up (contagion).
  A sub-query that gives up on its own account means the object-level
  instruction falls back to running its target; if that run reaches the same
  instruction again, the instruction can never complete.

Outcomes carry the set of in-flight queries their give-up depended on.  A
sub-result is only trusted when it would come out the same with no queries in
flight, which is how the instruction behaves at object level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

from .lang import Op, Program, decode
from .machine import (
    CALL_EV,
    HALT_EV,
    Configuration,
    Designated,
    Mode,
    Request,
    Runner,
    World,
    _object_request,
)


@dataclass(frozen=True)
class Query:
    n: int
    m: int | None

    @classmethod
    def of(cls, n: int, m: int | None) -> "Query":
        """Arity-0 programs ignore their input, so drop it."""
        if m is not None and decode(n).arity == 0:
            m = None
        return cls(n, m)

    def __str__(self) -> str:
        return f"({_short(self.n)}, {'-' if self.m is None else _short(self.m)})"


def _short(v: int) -> str:
    s = str(v)
    return s if len(s) <= 16 else f"{s[:6]}..{s[-6:]}[{len(s)}d]"


# -- certificates -----------------------------------------------------------

@dataclass(frozen=True)
class HaltUnreachable:
    reachable: frozenset[int]


@dataclass(frozen=True)
class ConfigCycle:
    entry: Configuration
    period: int
    at: int


@dataclass(frozen=True)
class SelfSimilarRegress:
    entry: Configuration
    re_entry_depth: int
    at: int


@dataclass(frozen=True)
class AnalyzerSelfDivergence:
    query: Query
    give_up_trace_length: int
    re_invocation_trace_length: int
    via: str = "analyze"
    at: int = 0


Certificate = Union[HaltUnreachable, ConfigCycle, SelfSimilarRegress, AnalyzerSelfDivergence]


@dataclass
class Resolution:
    """One node of the sub-query tree."""

    query: Query
    via: str
    result: str = "pending"
    ticks: int = 0
    children: list["Resolution"] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "query": {"n": str(self.query.n), "m": None if self.query.m is None else str(self.query.m)},
            "via": self.via,
            "result": self.result,
            "ticks": self.ticks,
            "children": [c.to_dict() for c in self.children],
        }


@dataclass(frozen=True)
class NotHalting:
    certificate: Certificate
    ticks: int = 0
    tree: Resolution | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class GaveUp:
    reason: str
    ticks: int = 0
    blockers: frozenset = frozenset()
    tree: Resolution | None = field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class OutOfBudget:
    ticks: int
    tree: Resolution | None = field(default=None, compare=False, repr=False)


AnalysisOutcome = Union[NotHalting, GaveUp, OutOfBudget]


class _Exhausted(Exception):
    pass


class _Meter:
    __slots__ = ("budget", "used")

    def __init__(self, budget: int):
        self.budget = budget
        self.used = 0

    def tick(self, n: int = 1) -> None:
        self.used += n
        if self.used > self.budget:
            self.used = self.budget
            raise _Exhausted


# -- L1 -----------------------------------------------------------------------

def cfg_reachable(program: Program) -> tuple[frozenset[int], bool]:
    """Offsets reachable from entry, and whether a halt point is among them."""
    n = len(program.instrs)
    seen: set[int] = set()
    todo = [0]
    halts = False
    while todo:
        pc = todo.pop()
        if pc in seen:
            continue
        seen.add(pc)
        if pc == n:
            halts = True
            continue
        ins = program.instrs[pc]
        if ins.op is Op.HALT:
            halts = True
            continue
        if ins.op is Op.JMP:
            todo.append(pc + ins.a)
        elif ins.op is Op.DECJZ:
            todo.extend((pc + 1, pc + ins.b))
        else:
            todo.append(pc + 1)
    return frozenset(seen), halts


# -- the resolver --------------------------------------------------------------

class _Analysis:
    def __init__(self, world: World, meter: _Meter):
        self.world = world
        self.meter = meter

    def resolve(self, q: Query, pending: frozenset, node: Resolution):
        start = self.meter.used
        try:
            out = self._resolve(q, pending, node)
        finally:
            node.ticks = self.meter.used - start
        node.result = type(out).__name__
        return out

    def _resolve(self, q: Query, pending: frozenset, node: Resolution):
        meter = self.meter
        meter.tick()
        world = self.world
        if world.mode is Mode.STRICT:
            d = world.designated
            if q.n == d.s:
                return GaveUp("designated s: falls back to running C_s")
            if q.n == d.q:
                return GaveUp("designated q: falls back to running C_q")
        prog = decode(q.n)
        reach, halts = cfg_reachable(prog)
        if not halts:
            return NotHalting(HaltUnreachable(reach))

        runner = Runner.start(q.n, q.m, prog)
        seen = {runner.snapshot(): 0}
        inner = pending | {q}
        while True:
            ev = runner.step()
            if isinstance(ev, Request):
                sub_q = Query.of(ev.n, ev.m)
                via = "analyze" if ev.op is Op.ANALYZE else "hcall"
                if sub_q in inner:
                    node.children.append(Resolution(sub_q, via, "in-flight"))
                    return GaveUp(f"{via} {sub_q} already in flight", blockers=frozenset({sub_q}))
                child = Resolution(sub_q, via)
                node.children.append(child)
                at = runner.transitions
                sub = self.resolve(sub_q, inner, child)
                if isinstance(sub, NotHalting):
                    meter.tick()
                    runner.complete(0)
                else:
                    extra = sub.blockers - {sub_q}
                    if extra:
                        return GaveUp(f"{via} {sub_q} depends on in-flight queries", blockers=extra)
                    status, length = self._fallback(sub_q, ev.op)
                    if status == "reinvoked":
                        return NotHalting(AnalyzerSelfDivergence(sub_q, child.ticks, length, via, at))
                    if status == "halted" and ev.op is Op.HCALL:
                        meter.tick()
                        runner.complete(1)
                    else:
                        return GaveUp(f"{via} {sub_q} gave up and its fallback {status}")
            else:
                meter.tick()
                if ev is not None:
                    if ev[0] == HALT_EV:
                        return GaveUp("target halts")
                    if ev[0] == CALL_EV:
                        hit = self._regress(runner)
                        if hit is not None:
                            return NotHalting(SelfSimilarRegress(runner.snapshot(), hit, runner.transitions))
            snap = runner.snapshot()
            t = runner.transitions
            first = seen.get(snap)
            if first is not None:
                return NotHalting(ConfigCycle(snap, t - first, first))
            seen[snap] = t

    @staticmethod
    def _regress(runner: Runner) -> int | None:
        top = runner.stack[-1]
        key = (top[0], top[4])
        depth = len(runner.stack)
        for i, fr in enumerate(runner.stack[:-1]):
            if (fr[0], fr[4]) == key:
                return depth - 1 - i
        return None

    def _fallback(self, q: Query, op: Op) -> tuple[str, int]:
        """Trace the object-level fallback run of ``q`` looking for ``op q``."""
        runner = Runner.start(q.n, q.m)
        while True:
            ev = runner.step()
            if isinstance(ev, Request):
                if ev.op is op and Query.of(ev.n, ev.m) == q:
                    return "reinvoked", runner.transitions
                return "blocked", runner.transitions
            self.meter.tick()
            if ev is not None and ev[0] == HALT_EV:
                return "halted", runner.transitions


def _world(mode, designated) -> World:
    return World(Mode(mode), designated)


def analyze(query: Query | tuple, mode: Mode | str = Mode.GENERAL, budget: int = 10**5,
            designated: Designated | None = None) -> AnalysisOutcome:
    """Run the layered prover on ``query`` with ``budget`` ticks."""
    if budget < 1:
        raise ValueError("budget must be >= 1")
    if not isinstance(query, Query):
        query = Query.of(*query)
    return analyze_in(query, _world(mode, designated), budget)


def analyze_in(query: Query, world: World, budget: int) -> AnalysisOutcome:
    # the budget only decides where the run is cut off, so a run that
    # concluded within ``budget`` ticks is the run any larger budget gets.
    # Designated indices are huge and int hashes are not cached, hence the
    # identity key; the stored table keeps that identity alive.
    key = (query, world.mode, id(world.designated))
    hit = _CONCLUDED.get(key)
    if hit is not None and hit[0] is world.designated and hit[1].ticks <= budget:
        return hit[1]
    meter = _Meter(budget)
    root = Resolution(query, "root")
    try:
        out = _Analysis(world, meter).resolve(query, frozenset(), root)
    except _Exhausted:
        _mark_exhausted(root)
        return OutOfBudget(meter.used, root)
    if isinstance(out, NotHalting):
        out = NotHalting(out.certificate, meter.used, root)
    else:
        out = GaveUp(out.reason, meter.used, out.blockers, root)
    if len(_CONCLUDED) >= _CACHE_SIZE:
        _CONCLUDED.pop(next(iter(_CONCLUDED)))
    _CONCLUDED[key] = (world.designated, out)
    return out


_CACHE_SIZE = 4096
_CONCLUDED: dict[tuple, tuple[Designated | None, AnalysisOutcome]] = {}


def _mark_exhausted(node: Resolution) -> None:
    if node.result == "pending":
        node.result = "OutOfBudget"
    for c in node.children:
        _mark_exhausted(c)


def tick_count(outcome: AnalysisOutcome) -> int:
    return outcome.ticks


# -- certificate audit ---------------------------------------------------------

_REPLAY_FUEL = 10**7


def _advance(runner: Runner, target: int, world: World) -> bool:
    """Step the object-level machine until ``target`` transitions are done."""
    while runner.transitions < target:
        ev = runner.step()
        if isinstance(ev, Request):
            _, action, value = _object_request(ev, _REPLAY_FUEL, world)
            if action == "complete":
                runner.complete(value)
            elif action == "fallback":
                runner.fallback(ev.n, ev.m)
            else:
                return False
        elif ev is not None and ev[0] == HALT_EV:
            return False
    return runner.transitions == target


def check_certificate(certificate: Certificate, query: Query | tuple, mode: Mode | str = Mode.GENERAL,
                      designated: Designated | None = None) -> bool:
    """Re-derive ``certificate`` for ``query`` independently of the analyzer."""
    if not isinstance(query, Query):
        query = Query.of(*query)
    world = _world(mode, designated)
    prog = decode(query.n)
    if isinstance(certificate, HaltUnreachable):
        reach, halts = cfg_reachable(prog)
        return not halts and reach == certificate.reachable

    if isinstance(certificate, ConfigCycle):
        if certificate.period < 1:
            return False
        runner = Runner.start(query.n, query.m, prog)
        if not _advance(runner, certificate.at, world) or runner.snapshot() != certificate.entry:
            return False
        # the period must be the least one, so an inflated period is rejected
        for t in range(certificate.at + 1, certificate.at + certificate.period + 1):
            if not _advance(runner, t, world):
                return False
            if runner.snapshot() == certificate.entry:
                return t == certificate.at + certificate.period
        return False

    if isinstance(certificate, SelfSimilarRegress):
        runner = Runner.start(query.n, query.m, prog)
        if not _advance(runner, certificate.at, world):
            return False
        cfg = runner.snapshot()
        if cfg != certificate.entry:
            return False
        top = cfg.top
        k = certificate.re_entry_depth
        if top.pc != 0 or top.regs != top.entry or not 1 <= k < cfg.depth:
            return False
        anc = cfg.frames[-1 - k]
        return anc.index == top.index and anc.entry == top.entry

    if isinstance(certificate, AnalyzerSelfDivergence):
        inner = certificate.query
        op = Op.ANALYZE if certificate.via == "analyze" else Op.HCALL
        runner = Runner.start(query.n, query.m, prog)
        if not _advance(runner, certificate.at, world):
            return False
        ev = runner.step()
        if not (isinstance(ev, Request) and ev.op is op and Query.of(ev.n, ev.m) == inner):
            return False
        sub = analyze(inner, world.mode, budget=_REPLAY_FUEL, designated=world.designated)
        if not isinstance(sub, GaveUp) or sub.blockers - {inner}:
            return False
        if sub.ticks != certificate.give_up_trace_length:
            return False
        fb = Runner.start(inner.n, inner.m)
        while fb.transitions <= certificate.re_invocation_trace_length:
            ev = fb.step()
            if isinstance(ev, Request):
                return (ev.op is op and Query.of(ev.n, ev.m) == inner
                        and fb.transitions == certificate.re_invocation_trace_length)
            if ev is not None and ev[0] == HALT_EV:
                return False
        return False
    return False


def report(outcome: AnalysisOutcome, query: Query) -> dict:
    """Machine-readable analysis report."""
    from .serialize import outcome_to_dict, query_to_dict

    return {
        "query": query_to_dict(query),
        **outcome_to_dict(outcome),
        "tree": outcome.tree.to_dict() if outcome.tree else None,
    }
