"""Hypothesis strategies for well-formed programs."""

from hypothesis import strategies as st

from halting_lab.lang import Instruction, Op, Program

regs = st.integers(0, 7)
nats = st.one_of(st.integers(0, 20), st.integers(0, 2**70))
CALL_FREE = [Op.HALT, Op.INC, Op.CONST, Op.ADDC, Op.MULC, Op.DIVC, Op.MODC, Op.COPY, Op.DECJZ, Op.JMP]


@st.composite
def instruction(draw, pc: int, n: int, ops=CALL_FREE, small: bool = False):
    op = draw(st.sampled_from(ops))
    val = st.integers(0, 9) if small else nats
    if op in (Op.HALT,):
        return Instruction(op)
    if op is Op.INC:
        return Instruction(op, draw(regs))
    if op in (Op.CONST, Op.ADDC, Op.MULC):
        return Instruction(op, draw(regs), draw(val))
    if op in (Op.DIVC, Op.MODC):
        return Instruction(op, draw(regs), draw(val.filter(lambda v: v >= 1)))
    if op in (Op.COPY, Op.APPLY, Op.ANALYZE, Op.HCALL):
        return Instruction(op, draw(regs), draw(regs))
    off = draw(st.integers(-pc, n - pc))
    if op is Op.JMP:
        return Instruction(op, off)
    return Instruction(op, draw(regs), off)


@st.composite
def programs(draw, max_len: int = 8, ops=CALL_FREE, small: bool = False, arity=None):
    n = draw(st.integers(1, max_len))
    instrs = tuple(draw(instruction(pc, n, ops, small)) for pc in range(n))
    a = draw(st.sampled_from([0, 1])) if arity is None else arity
    return Program(instrs, a)
