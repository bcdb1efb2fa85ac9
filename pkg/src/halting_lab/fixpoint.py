"""Recursion Theorem construction and the diagonal programs built with it.

``construct_fixpoint(T)`` returns R = A . B . T' where

* A = printer_for(<B . T'>) leaves the code of the rest in r0,
* B = move r0 to r1, then ``wrapcode_machine`` turns w into
  <printer_for(w) . decode(w)>, which is exactly <R>,
* T' = move r0 to r1, clear the other registers, then T.

So R() computes r = <R> itself and hands it to T with the register file a
fresh call would have.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property, lru_cache
from pathlib import Path

from .asm import format_asm, parse_asm
from .lang import NREGS, Instruction, Op, Program, compose, encode, printer_for, wrapcode_machine
from .machine import (
    GENERAL,
    Designated,
    Halted,
    HALT_EV,
    Mode,
    Request,
    Runner,
    World,
    _object_request,
    emulate,
    run,
)


class FixpointError(ValueError):
    pass


def _move_r0_to_r1(clear_rest: bool) -> Program:
    ins = [Instruction(Op.COPY, 0, 1), Instruction(Op.CONST, 0, 0)]
    if clear_rest:
        ins += [Instruction(Op.CONST, r, 0) for r in range(2, NREGS)]
    return Program(tuple(ins), 1)


@dataclass(frozen=True)
class FixpointResult:
    R: Program
    r: int
    T: Program
    offset: int

    @property
    def t_index(self) -> int:
        return encode(self.T)


def construct_fixpoint(T: Program, allow_reflective: bool = False) -> FixpointResult:
    """Build R with R() = T(<R>)."""
    if T.arity != 1:
        raise FixpointError("T must take one input (register 1)")
    if not allow_reflective and any(i.op in (Op.ANALYZE, Op.HCALL) for i in T.instrs):
        raise FixpointError("T calls the analyzer or decider; R() = T(r) is not checkable within fuel")
    b_stage = compose(_move_r0_to_r1(False), wrapcode_machine())
    t_stage = compose(_move_r0_to_r1(True), T)
    body = compose(b_stage, t_stage)
    a_stage = printer_for(encode(body))
    R = compose(a_stage, body)
    offset = len(a_stage) + len(b_stage) + len(t_stage) - len(T)
    return FixpointResult(R, encode(R), T, offset)


def _advance(runner: Runner, world: World) -> object:
    ev = runner.step()
    if isinstance(ev, Request):
        _, action, value = _object_request(ev, 10**7, world)
        if action == "complete":
            runner.complete(value)
        elif action == "fallback":
            runner.fallback(ev.n, ev.m)
        else:
            runner.stalled = True
    return ev


def _local(cfg, offset: int):
    root = cfg.frames[0]
    return (root.pc - offset, root.regs) + tuple((f.index, f.pc, f.regs, f.kind) for f in cfg.frames[1:]) + (cfg.stalled,)


def verify_fixpoint(result: FixpointResult, fuel: int = 10**6, sample_every: int = 97,
                    world: World = GENERAL) -> bool:
    """R() and T(r) halt with equal outputs, or both run on in lock-step."""
    if fuel < 1:
        raise ValueError("fuel must be >= 1")
    if encode(result.R) != result.r:
        return False
    a = run(result.R, None, fuel, world)
    b = emulate(result.t_index, result.r, fuel, world, program=result.T)
    if isinstance(a, Halted) or isinstance(b, Halted):
        return isinstance(a, Halted) and isinstance(b, Halted) and a.output == b.output
    # both ran out: compare configurations past the pipeline prefix
    ra = Runner.start(result.r, None, result.R)
    prefix = 0
    while not (len(ra.stack) == 1 and ra.stack[0][2] == result.offset):
        ev = _advance(ra, world)
        prefix += 1
        if prefix > fuel or (ev is not None and not isinstance(ev, Request) and ev[0] == HALT_EV):
            return False
    rb = Runner.start(result.t_index, result.r, result.T)
    for i in range(fuel - prefix):
        if i % sample_every == 0 and _local(ra.snapshot(), result.offset) != _local(rb.snapshot(), 0):
            return False
        _advance(ra, world)
        _advance(rb, world)
    return True


# -- the T family used to exercise the construction -------------------------------

def _p(*ins, arity=1) -> Program:
    return Program(tuple(Instruction(Op(i[0]), *i[1:]) for i in ins), arity)


T_FAMILY: dict[str, Program] = {
    "constant": _p((Op.CONST, 0, 42), (Op.HALT,)),
    "identity": _p((Op.COPY, 1, 0), (Op.HALT,)),
    "successor": _p((Op.COPY, 1, 0), (Op.INC, 0), (Op.HALT,)),
    "doubler": _p((Op.COPY, 1, 0), (Op.MULC, 0, 2), (Op.HALT,)),
    "digit-length": _p(
        (Op.COPY, 1, 2),
        (Op.DECJZ, 2, 5),
        (Op.DIVC, 1, 16),
        (Op.INC, 0),
        (Op.COPY, 1, 2),
        (Op.JMP, -4),
        (Op.HALT,),
    ),
}

T_LOOP = _p((Op.JMP, 0))


# -- the diagonal gallery ---------------------------------------------------------

@dataclass(frozen=True)
class DiagonalGallery:
    k: int
    s: int
    p: int
    q: int
    b: int
    C_k: Program
    C_s: Program
    C_p: Program
    C_q: Program
    C_b: Program
    mode: Mode = Mode.STRICT

    @cached_property
    def designated(self) -> Designated:
        return Designated(self.k, self.s, self.p, self.q)

    def world(self, mode: Mode | str | None = None) -> World:
        return World(Mode(mode or self.mode), self.designated)

    def programs(self) -> dict[str, tuple[int, Program]]:
        return {
            "C_k": (self.k, self.C_k),
            "C_s": (self.s, self.C_s),
            "C_p": (self.p, self.C_p),
            "C_q": (self.q, self.C_q),
            "C_b": (self.b, self.C_b),
        }


@lru_cache(maxsize=2)
def build_gallery(mode: Mode | str = Mode.STRICT) -> DiagonalGallery:
    """C_k(n) = A(n, n);  C_s() = C_k(s);  C_p(n) = H(n, n);
    C_q() = if C_p(q) = 0 then halt else loop;  C_b(m) = C_s()."""
    C_k = _p((Op.ANALYZE, 1, 1), (Op.HALT,))
    k = encode(C_k)
    T_s = _p((Op.CONST, 2, k), (Op.APPLY, 2, 1), (Op.HALT,))
    fs = construct_fixpoint(T_s)
    C_p = _p((Op.HCALL, 1, 1), (Op.HALT,))
    p = encode(C_p)
    T_q = _p((Op.CONST, 2, p), (Op.APPLY, 2, 1), (Op.DECJZ, 0, 2), (Op.JMP, 0), (Op.HALT,))
    fq = construct_fixpoint(T_q)
    C_b = _p((Op.CONST, 2, fs.r), (Op.APPLY, 2, 1), (Op.HALT,))
    return DiagonalGallery(k, fs.r, p, fq.r, encode(C_b), C_k, fs.R, C_p, fq.R, C_b, Mode(mode))


def export_gallery(gallery: DiagonalGallery, directory: Path | str) -> Path:
    """Write each program as assembly plus a JSON manifest of indices."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    manifest = {"mode": gallery.mode.value, "programs": {}}
    for name, (index, prog) in gallery.programs().items():
        fname = f"{name}.asm"
        (out / fname).write_text(format_asm(prog, f"{name}, index {index}"))
        manifest["programs"][name] = {"index": str(index), "file": fname, "length": len(prog)}
    path = out / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def load_gallery(manifest: Path | str) -> DiagonalGallery:
    path = Path(manifest)
    data = json.loads(path.read_text())
    progs = {}
    for name, entry in data["programs"].items():
        prog = parse_asm((path.parent / entry["file"]).read_text())
        if encode(prog) != int(entry["index"]):
            raise FixpointError(f"{name}: assembly does not match recorded index")
        progs[name] = prog
    idx = {n: encode(p) for n, p in progs.items()}
    return DiagonalGallery(idx["C_k"], idx["C_s"], idx["C_p"], idx["C_q"], idx["C_b"],
                           progs["C_k"], progs["C_s"], progs["C_p"], progs["C_q"], progs["C_b"],
                           Mode(data.get("mode", Mode.STRICT.value)))
