"""Small-step semantics, the emulator, and execution traces.

A configuration is the whole call stack.  Each frame records the program
index it runs, its pc and registers, the registers it was entered with, and
how it was entered: ``root``, ``apply`` (an APPLY callee, returns r0 to the
caller) or ``fallback`` (the target run an ANALYZE falls back to after the
analyzer gives up; when it returns, the ANALYZE never completes and the
machine stalls for good).

ANALYZE and HCALL are not executed by :class:`Runner` itself; it reports a
request and the driver decides.  The object-level driver here asks the
analyzer and the decider; the analyzer's own driver resolves them by
reflection.  Analyzer ticks and decider work are charged as machine steps.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterator, NamedTuple, Union

from . import _kernels
from .lang import NREGS, Op, Program, decode, encode


class Mode(str, Enum):
    STRICT = "strict-appendix-b"
    GENERAL = "general"


class Designated(NamedTuple):
    k: int
    s: int
    p: int
    q: int


@dataclass(frozen=True)
class World:
    """Which analyzer ANALYZE and HCALL refer to."""

    mode: Mode = Mode.GENERAL
    designated: Designated | None = None

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.mode is Mode.STRICT and self.designated is None:
            raise ValueError("strict-appendix-b mode needs the designated index table")


GENERAL = World()


class Frame(NamedTuple):
    index: int
    pc: int
    regs: tuple[int, ...]
    entry: tuple[int, ...]
    kind: str


@dataclass(frozen=True)
class Configuration:
    frames: tuple[Frame, ...]
    stalled: bool = False

    @property
    def top(self) -> Frame:
        return self.frames[-1]

    @property
    def pc(self) -> int:
        return self.frames[-1].pc

    @property
    def regs(self) -> tuple[int, ...]:
        return self.frames[-1].regs

    @property
    def depth(self) -> int:
        return len(self.frames)


@dataclass(frozen=True)
class Halted:
    output: int
    steps: int


@dataclass(frozen=True)
class FuelExhausted:
    steps: int
    final: Configuration = field(repr=False, compare=False)


RunOutcome = Union[Halted, FuelExhausted]


def fresh_regs(program: Program, inp: int | None) -> tuple[int, ...]:
    regs = [0] * NREGS
    if program.arity == 1 and inp is not None:
        regs[1] = inp
    return tuple(regs)


# -- the stepper ------------------------------------------------------------

class Request(NamedTuple):
    """An ANALYZE or HCALL waiting for the driver."""

    op: Op
    n: int
    m: int


HALT_EV, CALL_EV, RETURN_EV, STALL_EV = "halt", "call", "return", "stall"


class Runner:
    """Mutable single-run interpreter state."""

    __slots__ = ("stack", "frozen", "stalled", "output", "transitions")

    def __init__(self, config: Configuration):
        self.stack: list[list] = []
        for f in config.frames:
            prog = decode(f.index)
            self.stack.append([f.index, prog.instrs, f.pc, list(f.regs), f.entry, f.kind])
        self.frozen: list[Frame] = list(config.frames[:-1])
        self.stalled = config.stalled
        self.output: int | None = None
        self.transitions = 0

    @classmethod
    def start(cls, index: int, inp: int | None = None, program: Program | None = None) -> "Runner":
        if program is None:
            program = decode(index)
        regs = fresh_regs(program, inp)
        r = cls.__new__(cls)
        r.stack = [[index, program.instrs, 0, list(regs), regs, "root"]]
        r.frozen = []
        r.stalled = False
        r.output = None
        r.transitions = 0
        return r

    def snapshot(self) -> Configuration:
        idx, _, pc, regs, entry, kind = self.stack[-1]
        top = Frame(idx, pc, tuple(regs), entry, kind)
        return Configuration(tuple(self.frozen) + (top,), self.stalled)

    @property
    def depth(self) -> int:
        return len(self.stack)

    @property
    def top_index(self) -> int:
        return self.stack[-1][0]

    def current(self):
        """(instruction or None at one-past-end, registers) of the top frame."""
        fr = self.stack[-1]
        instrs, pc = fr[1], fr[2]
        return (instrs[pc] if pc < len(instrs) else None), fr[3]

    def _push(self, index: int, inp: int | None, kind: str) -> None:
        fr = self.stack[-1]
        self.frozen.append(Frame(fr[0], fr[2], tuple(fr[3]), fr[4], fr[5]))
        prog = decode(index)
        regs = fresh_regs(prog, inp)
        self.stack.append([index, prog.instrs, 0, list(regs), regs, kind])

    def step(self):
        """Execute one transition.

        Returns None for an ordinary instruction, a :class:`Request` for
        ANALYZE/HCALL (state unchanged, nothing counted), or an event tuple.
        """
        if self.stalled:
            self.transitions += 1
            return (STALL_EV,)
        fr = self.stack[-1]
        instrs, pc, regs = fr[1], fr[2], fr[3]
        if pc >= len(instrs):
            op = Op.HALT
        else:
            op, a, b = instrs[pc]
        if op is Op.HALT:
            self.transitions += 1
            out = regs[0]
            if len(self.stack) == 1:
                self.output = out
                return (HALT_EV, out)
            kind = fr[5]
            self.stack.pop()
            self.frozen.pop()
            caller = self.stack[-1]
            if kind == "fallback":
                self.stalled = True
                return (STALL_EV, out)
            caller[3][0] = out
            caller[2] += 1
            return (RETURN_EV, out)
        if op is Op.ANALYZE or op is Op.HCALL:
            return Request(op, regs[a], regs[b])
        self.transitions += 1
        if op is Op.INC:
            regs[a] += 1
        elif op is Op.CONST:
            regs[a] = b
        elif op is Op.ADDC:
            regs[a] += b
        elif op is Op.MULC:
            regs[a] *= b
        elif op is Op.DIVC:
            regs[a] //= b
        elif op is Op.MODC:
            regs[a] %= b
        elif op is Op.COPY:
            regs[b] = regs[a]
        elif op is Op.DECJZ:
            if regs[a] == 0:
                fr[2] = pc + b
                return None
            regs[a] -= 1
        elif op is Op.JMP:
            fr[2] = pc + a
            return None
        elif op is Op.APPLY:
            n, m = regs[a], regs[b]
            self._push(n, m, "apply")
            return (CALL_EV, n, m)
        fr[2] = pc + 1
        return None

    def complete(self, value: int) -> None:
        """Finish a pending ANALYZE/HCALL with ``value`` in r0."""
        fr = self.stack[-1]
        fr[3][0] = value
        fr[2] += 1
        self.transitions += 1

    def fallback(self, n: int, m: int) -> None:
        """Turn a given-up ANALYZE into a run of its target."""
        self._push(n, m, "fallback")
        self.transitions += 1


# -- object-level driver ---------------------------------------------------

class TraceEntry(NamedTuple):
    step: int
    config: Configuration
    event: str | None
    detail: tuple = ()


_LATE: list = []


def _late_modules():
    """analyzer and decider import this module, so bind them on first use."""
    if not _LATE:
        from . import analyzer, decider

        _LATE.extend((analyzer, decider))
    return _LATE


def _object_request(req: Request, remaining: int, world: World):
    """Resolve a request the way the idealised machine would.

    Returns (charge, action, value) with action one of "complete",
    "fallback", "exhausted".
    """
    A, D = _late_modules()
    q = A.Query.of(req.n, req.m)
    if req.op is Op.ANALYZE:
        res = A.analyze_in(q, world, max(remaining, 1))
        NotHalting, GaveUp = A.NotHalting, A.GaveUp
        charge = max(res.ticks, 1)
        if isinstance(res, NotHalting):
            return charge, "complete", 0
        if isinstance(res, GaveUp):
            return charge, "fallback", None
        return remaining, "exhausted", None
    if remaining < 2:
        return remaining, "exhausted", None
    v = D.decide(q, world.mode, fuel=remaining, designated=world.designated)
    if isinstance(v, D.Halts):
        return max(v.fuel_spent, 1), "complete", 1
    if isinstance(v, D.NotHalts):
        return max(v.fuel_spent, 1), "complete", 0
    return remaining, "exhausted", None


def drive(runner: Runner, fuel: int, world: World = GENERAL,
          on_step: Callable[[int, Runner, object], None] | None = None) -> RunOutcome:
    """Run ``runner`` until it halts or ``fuel`` steps are spent."""
    steps = 0
    while steps < fuel:
        if runner.stalled:
            if on_step is None:
                return FuelExhausted(fuel, runner.snapshot())
            steps += 1
            runner.step()
            on_step(steps, runner, (STALL_EV,))
            continue
        ev = runner.step()
        if isinstance(ev, Request):
            charge, action, value = _object_request(ev, fuel - steps, world)
            if steps + charge > fuel:
                return FuelExhausted(fuel, runner.snapshot())
            steps += charge
            if action == "complete":
                runner.complete(value)
            elif action == "fallback":
                runner.fallback(ev.n, ev.m)
            else:
                return FuelExhausted(fuel, runner.snapshot())
            if on_step is not None:
                on_step(steps, runner, (ev.op.name.lower(), ev.n, ev.m, action))
            continue
        steps += 1
        if on_step is not None:
            on_step(steps, runner, ev)
        if ev is not None and ev[0] == HALT_EV:
            return Halted(ev[1], steps)
    return FuelExhausted(fuel, runner.snapshot())


def _run_kernel(program: Program, index: int, inp: int | None, fuel: int, world: World) -> RunOutcome | None:
    lowered = _kernels.lower(program)
    regs = fresh_regs(program, inp)
    if lowered is None or not _kernels.fits(regs):
        return None
    arr = _kernels.as_array(regs)
    status, pc, steps = _kernels.run_flat(*lowered, arr, 0, fuel)
    pc, steps = int(pc), int(steps)
    pyregs = tuple(int(x) for x in arr)
    if status == _kernels.HALTED:
        return Halted(pyregs[0], steps)
    config = Configuration((Frame(index, pc, pyregs, regs, "root"),))
    if status == _kernels.EXHAUSTED:
        return FuelExhausted(steps, config)
    rest = drive(Runner(config), fuel - steps, world)
    if isinstance(rest, Halted):
        return Halted(rest.output, rest.steps + steps)
    return FuelExhausted(fuel, rest.final)


def emulate(index: int, inp: int | None = None, fuel: int = 10**5, world: World = GENERAL,
            program: Program | None = None) -> RunOutcome:
    """Run program ``index`` on ``inp`` for at most ``fuel`` steps."""
    if fuel < 1:
        raise ValueError("fuel must be >= 1")
    if program is None:
        program = decode(index)
    if not program.has_calls:
        out = _run_kernel(program, index, inp, fuel, world)
        if out is not None:
            return out
    return drive(Runner.start(index, inp, program), fuel, world)


def run(program: Program, inp: int | None = None, fuel: int = 10**6, world: World = GENERAL) -> RunOutcome:
    """Run a program value directly (its index is computed for the frame)."""
    return emulate(encode(program), inp, fuel, world, program=program)


def step(program: Program, config: Configuration, world: World = GENERAL,
         fuel: int = 10**6) -> Configuration | Halted:
    """One transition of the object-level machine from ``config``.

    An ANALYZE or HCALL is one transition whose cost (up to ``fuel``) is
    whatever the analyzer or decider spends.
    """
    if decode(config.frames[0].index) != program:
        raise ValueError("configuration does not belong to program")
    runner = Runner(config)
    ev = runner.step()
    if isinstance(ev, Request):
        _, action, value = _object_request(ev, fuel, world)
        if action == "complete":
            runner.complete(value)
        elif action == "fallback":
            runner.fallback(ev.n, ev.m)
    elif ev is not None and ev[0] == HALT_EV:
        return Halted(ev[1], 1)
    return runner.snapshot()


def initial(index: int, inp: int | None = None) -> Configuration:
    program = decode(index)
    regs = fresh_regs(program, inp)
    return Configuration((Frame(index, 0, regs, regs, "root"),))


# -- traces -----------------------------------------------------------------

@dataclass
class Trace:
    entries: list[TraceEntry]
    outcome: RunOutcome

    def __iter__(self) -> Iterator[TraceEntry]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def records(self) -> Iterator[dict]:
        for e in self.entries:
            yield {
                "step": e.step,
                "pc": e.config.pc,
                "regs": [str(r) for r in e.config.regs],
                "depth": e.config.depth,
                "index": str(e.config.top.index),
                "event": e.event,
            }

    def to_jsonl(self) -> str:
        return "".join(json.dumps(r, sort_keys=True) + "\n" for r in self.records())


def trace_of(index: int, inp: int | None = None, fuel: int = 10**4, sample_every: int = 1,
             world: World = GENERAL) -> Trace:
    """Deterministic trace: every ``sample_every``-th configuration plus all
    call, return, request, stall and halt events."""
    if fuel < 1 or sample_every < 1:
        raise ValueError("fuel and sample_every must be >= 1")
    entries: list[TraceEntry] = []

    def record(steps: int, runner: Runner, ev) -> None:
        name = ev[0] if ev else None
        if name is not None or steps % sample_every == 0:
            entries.append(TraceEntry(steps, runner.snapshot(), name, tuple(ev[1:]) if ev else ()))

    outcome = drive(Runner.start(index, inp), fuel, world, on_step=record)
    return Trace(entries, outcome)
