"""Inner interpreter loop for call-free programs on machine-word registers.

The kernel runs until HALT, fuel exhaustion, or the next instruction would
leave the int64-safe range; in the last case the caller continues with
arbitrary-precision integers from the returned state.  Compiled with numba
unless ``HALTING_LAB_NO_NUMBA`` is set (or numba is missing), in which case
the same function runs as plain Python over the numpy arrays.
"""

from __future__ import annotations

import os

import numpy as np

from .lang import NREGS, Op, Program

HALTED, EXHAUSTED, OVERFLOW = 0, 1, 2
LIMIT = 1 << 62

_OP_INC = int(Op.INC)
_OP_CONST = int(Op.CONST)
_OP_ADDC = int(Op.ADDC)
_OP_MULC = int(Op.MULC)
_OP_DIVC = int(Op.DIVC)
_OP_MODC = int(Op.MODC)
_OP_COPY = int(Op.COPY)
_OP_DECJZ = int(Op.DECJZ)
_OP_JMP = int(Op.JMP)
_OP_HALT = int(Op.HALT)


def _run_flat(ops, a, b, regs, pc, fuel):
    n = ops.shape[0]
    steps = 0
    while steps < fuel:
        if pc == n:
            return HALTED, pc, steps + 1
        op = ops[pc]
        x = a[pc]
        y = b[pc]
        if op == _OP_HALT:
            return HALTED, pc, steps + 1
        elif op == _OP_INC:
            if regs[x] >= LIMIT:
                return OVERFLOW, pc, steps
            regs[x] += 1
            pc += 1
        elif op == _OP_CONST:
            regs[x] = y
            pc += 1
        elif op == _OP_ADDC:
            if regs[x] >= LIMIT - y:
                return OVERFLOW, pc, steps
            regs[x] += y
            pc += 1
        elif op == _OP_MULC:
            if y != 0 and regs[x] > LIMIT // y:
                return OVERFLOW, pc, steps
            regs[x] *= y
            pc += 1
        elif op == _OP_DIVC:
            regs[x] //= y
            pc += 1
        elif op == _OP_MODC:
            regs[x] %= y
            pc += 1
        elif op == _OP_COPY:
            regs[y] = regs[x]
            pc += 1
        elif op == _OP_DECJZ:
            if regs[x] == 0:
                pc += y
            else:
                regs[x] -= 1
                pc += 1
        elif op == _OP_JMP:
            pc += x
        else:
            # call instructions never reach the kernel
            return OVERFLOW, pc, steps
        steps += 1
    return EXHAUSTED, pc, steps


def _want_numba() -> bool:
    return os.environ.get("HALTING_LAB_NO_NUMBA", "") in ("", "0")


try:
    if not _want_numba():
        raise ImportError
    from numba import njit

    run_flat = njit(cache=False, nogil=True)(_run_flat)
    USING_NUMBA = True
except ImportError:
    run_flat = _run_flat
    USING_NUMBA = False

run_flat_py = _run_flat


def lower(program: Program):
    """Arrays for the kernel, or None when the program is not kernel-safe."""
    if program.has_calls:
        return None
    n = len(program.instrs)
    ops = np.empty(n, dtype=np.int64)
    a = np.empty(n, dtype=np.int64)
    b = np.empty(n, dtype=np.int64)
    for i, ins in enumerate(program.instrs):
        if abs(ins.a) >= LIMIT or abs(ins.b) >= LIMIT:
            return None
        ops[i] = int(ins.op)
        a[i] = ins.a
        b[i] = ins.b
    return ops, a, b


def fits(regs) -> bool:
    return all(0 <= r < LIMIT for r in regs)


def as_array(regs) -> np.ndarray:
    out = np.zeros(NREGS, dtype=np.int64)
    out[:] = regs
    return out
