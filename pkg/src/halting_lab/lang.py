"""Toy register-machine language and its Gödel numbering.

A program index is a natural whose hexadecimal digits, read from the least
significant end, form a self-delimiting stream::

    stream  := arity  nat(len(instrs) - 1)  instr*
    instr   := opcode operands
    reg     := one digit, 0..7
    nat     := prefix digits   (prefix: 15 15 ... r with r < 15, length = sum;
                                digits: most significant first, no leading 0)
    off     := sign nat        (sign 0 = forward, 1 = backward; no "-0")

Operand layout per opcode is given by ``LAYOUT``.  Digits above the consumed
part of the stream must be zero; otherwise (or on any other malformation) the
index decodes to the canonical diverging program ``[JMP 0]``.  Every natural
therefore names some program.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from functools import lru_cache
from typing import NamedTuple, Sequence

BASE = 16
R_MAX = 7
NREGS = R_MAX + 1
# digits past the top of an index read as zero, and zeros spell a whole
# instruction, so the count field alone could demand billions of them
MAX_INSTRS = 1 << 16


class Op(IntEnum):
    ANALYZE = 0
    HALT = 1
    INC = 2
    CONST = 3
    ADDC = 4
    MULC = 5
    DIVC = 6
    MODC = 7
    COPY = 8
    DECJZ = 9
    JMP = 10
    APPLY = 11
    HCALL = 12


# operand kinds: "r" register digit, "n" natural field, "o" signed offset
LAYOUT: dict[Op, str] = {
    Op.ANALYZE: "rr",
    Op.HALT: "",
    Op.INC: "r",
    Op.CONST: "rn",
    Op.ADDC: "rn",
    Op.MULC: "rn",
    Op.DIVC: "rn",
    Op.MODC: "rn",
    Op.COPY: "rr",
    Op.DECJZ: "ro",
    Op.JMP: "o",
    Op.APPLY: "rr",
    Op.HCALL: "rr",
}

CALL_OPS = frozenset({Op.APPLY, Op.ANALYZE, Op.HCALL})
JUMP_OPS = frozenset({Op.DECJZ, Op.JMP})


class Instruction(NamedTuple):
    """One instruction. Unused operands are zero.

    For ``JMP`` the offset lives in ``a``; for ``DECJZ`` the register is ``a``
    and the offset ``b``.
    """

    op: Op
    a: int = 0
    b: int = 0

    def __str__(self) -> str:
        kinds = LAYOUT[self.op]
        parts = [self.op.name]
        for kind, val in zip(kinds, (self.a, self.b)):
            if kind == "r":
                parts.append(f"r{val}")
            elif kind == "o":
                parts.append(f"{val:+d}")
            else:
                parts.append(str(val))
        return " ".join(parts)

    def target(self, pc: int) -> int | None:
        if self.op is Op.JMP:
            return pc + self.a
        if self.op is Op.DECJZ:
            return pc + self.b
        return None


class LangError(ValueError):
    pass


@dataclass(frozen=True)
class Program:
    instrs: tuple[Instruction, ...]
    arity: int = 0

    def __post_init__(self) -> None:
        if not all(type(i) is Instruction and type(i.op) is Op for i in self.instrs):
            object.__setattr__(self, "instrs", tuple(Instruction(Op(i[0]), *i[1:]) for i in self.instrs))
        problem = _check(self.instrs, self.arity)
        if problem:
            raise LangError(problem)

    def __len__(self) -> int:
        return len(self.instrs)

    def __str__(self) -> str:
        return "; ".join(str(i) for i in self.instrs)

    @property
    def has_calls(self) -> bool:
        return any(i.op in CALL_OPS for i in self.instrs)


def _check(instrs: Sequence[Instruction], arity: int) -> str | None:
    if arity not in (0, 1):
        return f"arity must be 0 or 1, got {arity}"
    if not instrs:
        return "program must be non-empty"
    n = len(instrs)
    for pc, ins in enumerate(instrs):
        for kind, val in zip(LAYOUT[ins.op], (ins.a, ins.b)):
            if kind == "r" and not 0 <= val <= R_MAX:
                return f"pc {pc}: register r{val} out of range"
            if kind == "n" and val < 0:
                return f"pc {pc}: constant must be a natural"
        if ins.op in (Op.DIVC, Op.MODC) and ins.b < 1:
            return f"pc {pc}: {ins.op.name} by zero"
        t = ins.target(pc)
        if t is not None and not 0 <= t <= n:
            return f"pc {pc}: jump target {t} outside [0, {n}]"
    return None


def P(*instrs: Instruction | tuple, arity: int = 0) -> Program:
    """Shorthand constructor: ``P((Op.INC, 0), (Op.HALT,))``."""
    return Program(tuple(Instruction(Op(i[0]), *i[1:]) if not isinstance(i, Instruction) else i for i in instrs), arity)


DIVERGE = Program((Instruction(Op.JMP, 0),))


# -- digit streams ---------------------------------------------------------

def _nat_digits(v: int) -> list[int]:
    if v == 0:
        return [0]
    body = []
    while v:
        body.append(v % BASE)
        v //= BASE
    body.reverse()
    length = len(body)
    prefix = [15] * (length // 15) + [length % 15]
    return prefix + body


def _instr_digits(ins: Instruction) -> list[int]:
    out = [int(ins.op)]
    for kind, val in zip(LAYOUT[ins.op], (ins.a, ins.b)):
        if kind == "r":
            out.append(val)
        elif kind == "n":
            out.extend(_nat_digits(val))
        else:
            out.append(1 if val < 0 else 0)
            out.extend(_nat_digits(abs(val)))
    return out


def stream(program: Program) -> list[int]:
    """Digit stream of ``program``, first digit least significant."""
    out = [program.arity]
    out.extend(_nat_digits(len(program.instrs) - 1))
    for ins in program.instrs:
        out.extend(_instr_digits(ins))
    return out


def encode(program: Program) -> int:
    value = 0
    for d in reversed(stream(program)):
        value = value * BASE + d
    return value


class _Reader:
    __slots__ = ("v", "used")

    def __init__(self, v: int):
        self.v = v
        self.used = 0

    def digit(self) -> int:
        d = self.v % BASE
        self.v //= BASE
        self.used += 1
        return d

    def nat(self) -> int:
        length = 0
        while True:
            d = self.digit()
            length += d
            if d < 15:
                break
        value = 0
        for i in range(length):
            d = self.digit()
            if i == 0 and d == 0:
                raise LangError("leading zero in natural field")
            value = value * BASE + d
        return value

    def off(self) -> int:
        sign = self.digit()
        if sign > 1:
            raise LangError("bad sign digit")
        mag = self.nat()
        if sign and not mag:
            raise LangError("negative zero offset")
        return -mag if sign else mag


_OPS = tuple(Op)
_ZERO_INSTR = Instruction(Op.ANALYZE, 0, 0)


def parse_index(index: int) -> Program:
    """Strict decoder: raises ``LangError`` on invalid encodings."""
    if index < 0:
        raise LangError("indices are naturals")
    rd = _Reader(index)
    arity = rd.digit()
    count = rd.nat() + 1
    if count > MAX_INSTRS:
        raise LangError(f"instruction count {count} exceeds {MAX_INSTRS}")
    instrs: list[Instruction] = []
    for _ in range(count):
        if not rd.v:
            # only implicit zeros remain, and each spells ANALYZE r0 r0
            instrs.extend([_ZERO_INSTR] * (count - len(instrs)))
            break
        code = rd.digit()
        if code >= len(_OPS):
            raise LangError(f"unknown opcode {code}")
        op = _OPS[code]
        ops = []
        for kind in LAYOUT[op]:
            if kind == "r":
                r = rd.digit()
                if r > R_MAX:
                    raise LangError(f"register digit {r}")
                ops.append(r)
            elif kind == "n":
                ops.append(rd.nat())
            else:
                ops.append(rd.off())
        instrs.append(Instruction(op, *ops))
    if rd.v:
        raise LangError("trailing digits after program")
    return Program(tuple(instrs), arity)


@lru_cache(maxsize=4096)
def decode(index: int) -> Program:
    """Total decoder; invalid encodings name ``[JMP 0]``."""
    try:
        return parse_index(index)
    except LangError:
        return DIVERGE


def is_valid(index: int) -> bool:
    try:
        parse_index(index)
    except LangError:
        return False
    return True


# -- composition and code-as-data -----------------------------------------

def compose(first: Program, second: Program) -> Program:
    """Run ``first`` then ``second`` on the shared registers.

    ``first``'s HALTs become jumps to one past its end; the result keeps
    ``first``'s arity.
    """
    n = len(first.instrs)
    head = tuple(
        Instruction(Op.JMP, n - pc) if ins.op is Op.HALT else ins
        for pc, ins in enumerate(first.instrs)
    )
    return Program(head + second.instrs, first.arity)


def compose_all(*programs: Program) -> Program:
    out = programs[0]
    for p in programs[1:]:
        out = compose(out, p)
    return out


def hex_digits(v: int) -> list[int]:
    """Base-16 digits of ``v``, most significant first; empty for 0."""
    out = []
    while v:
        out.append(v % BASE)
        v //= BASE
    return out[::-1]


def printer_for(code: int) -> Program:
    """Straight-line program leaving ``code`` in r0 (no HALT)."""
    instrs = [Instruction(Op.CONST, 0, 0)]
    for d in hex_digits(code):
        instrs.append(Instruction(Op.MULC, 0, BASE))
        instrs.append(Instruction(Op.ADDC, 0, d))
    return Program(tuple(instrs), 0)


# field values used by the wrapcode machine when it prepends instructions
def _field(ins: Instruction) -> tuple[int, int]:
    ds = _instr_digits(ins)
    return sum(d * BASE**i for i, d in enumerate(ds)), len(ds)


@lru_cache(maxsize=1)
def wrapcode_machine() -> Program:
    """Arity-1 program mapping w to encode(compose(printer_for(w), decode(w))).

    Leaves the result in r0 and ends without HALT.  Only meaningful for w that
    is a valid encoding.  Register use: r1 input/tail, r2 printer digits,
    r3 lengths, r4/r6 scratch, r5 instruction count minus one, r0 result.
    """
    from .asm import Assembler

    addc0_val, addc0_len = _field(Instruction(Op.ADDC, 0, 0))
    addc1_val, addc1_len = _field(Instruction(Op.ADDC, 0, 1))
    digit_weight = BASE ** (addc1_len - 1)
    assert addc1_len == 4 and digit_weight == 4096
    mulc_val, mulc_len = _field(Instruction(Op.MULC, 0, BASE))
    const_val, const_len = _field(Instruction(Op.CONST, 0, 0))

    a = Assembler(arity=1)
    a.op(Op.COPY, 1, 2)
    a.op(Op.DIVC, 1, BASE)                       # drop arity digit
    a.label("prefix")                            # r3 := length of count field
    a.op(Op.COPY, 1, 4)
    a.op(Op.MODC, 4, BASE)
    a.op(Op.DIVC, 1, BASE)
    a.op(Op.COPY, 4, 6)
    a.op(Op.ADDC, 6, 1)
    a.op(Op.DIVC, 6, BASE)                       # r6 = 1 iff digit == 15
    a.label("prefix_add")
    a.decjz(4, "prefix_added")
    a.op(Op.INC, 3)
    a.jmp("prefix_add")
    a.label("prefix_added")
    a.decjz(6, "count")
    a.jmp("prefix")
    a.label("count")                             # r5 := count - 1
    a.decjz(3, "header_done")
    a.op(Op.MULC, 5, BASE)
    a.op(Op.COPY, 1, 4)
    a.op(Op.MODC, 4, BASE)
    a.op(Op.DIVC, 1, BASE)
    a.label("count_add")
    a.decjz(4, "count")
    a.op(Op.INC, 5)
    a.jmp("count_add")
    a.label("header_done")
    a.op(Op.COPY, 1, 0)                          # r0 := instruction fields of M
    a.label("printer")                           # prepend printer, last instruction first
    a.op(Op.COPY, 2, 4)
    a.decjz(4, "printer_done")
    a.op(Op.COPY, 2, 4)
    a.op(Op.MODC, 4, BASE)
    a.op(Op.DIVC, 2, BASE)
    a.op(Op.COPY, 4, 6)
    a.decjz(6, "addc_zero")
    a.op(Op.MULC, 0, BASE**addc1_len)
    a.op(Op.ADDC, 0, addc1_val - digit_weight)
    a.label("addc_digit")
    a.decjz(4, "addc_done")
    a.op(Op.ADDC, 0, digit_weight)
    a.jmp("addc_digit")
    a.label("addc_zero")
    a.op(Op.MULC, 0, BASE**addc0_len)
    a.op(Op.ADDC, 0, addc0_val)
    a.label("addc_done")
    a.op(Op.MULC, 0, BASE**mulc_len)
    a.op(Op.ADDC, 0, mulc_val)
    a.op(Op.INC, 5)
    a.op(Op.INC, 5)
    a.jmp("printer")
    a.label("printer_done")
    a.op(Op.MULC, 0, BASE**const_len)
    a.op(Op.ADDC, 0, const_val)
    a.op(Op.INC, 5)
    a.label("cdigits")                           # prepend digits of r5, least significant first
    a.op(Op.COPY, 5, 4)
    a.decjz(4, "cprefix")
    a.op(Op.COPY, 5, 4)
    a.op(Op.MODC, 4, BASE)
    a.op(Op.DIVC, 5, BASE)
    a.op(Op.MULC, 0, BASE)
    a.label("cdigit_add")
    a.decjz(4, "cdigit_next")
    a.op(Op.INC, 0)
    a.jmp("cdigit_add")
    a.label("cdigit_next")
    a.op(Op.INC, 3)
    a.jmp("cdigits")
    a.label("cprefix")                           # prefix 15*q + r, r written last in the stream
    a.op(Op.COPY, 3, 4)
    a.op(Op.MODC, 4, 15)
    a.op(Op.DIVC, 3, 15)
    a.op(Op.MULC, 0, BASE)
    a.label("cprefix_add")
    a.decjz(4, "fifteens")
    a.op(Op.INC, 0)
    a.jmp("cprefix_add")
    a.label("fifteens")
    a.decjz(3, "arity")
    a.op(Op.MULC, 0, BASE)
    a.op(Op.ADDC, 0, 15)
    a.jmp("fifteens")
    a.label("arity")
    a.op(Op.MULC, 0, BASE)                       # arity digit 0
    return a.build()
