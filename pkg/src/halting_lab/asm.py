"""Text assembly for the toy language, plus a label-resolving builder.

Format, one instruction per line::

    ;; arity 1
    CONST r0 5      # comment
    DECJZ r2 -3
    APPLY r1 r1
    HALT

Jump operands are signed relative offsets.  Lines may also carry a
``name:`` label, and a jump operand may name a label instead of an offset;
labels are resolved to relative offsets at assembly time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .lang import LAYOUT, R_MAX, Instruction, LangError, Op, Program


@dataclass
class AsmError(LangError):
    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


class Assembler:
    """Incremental builder with symbolic jump targets."""

    def __init__(self, arity: int = 0):
        self.arity = arity
        self._items: list[tuple[Op, list]] = []
        self._labels: dict[str, int] = {}

    def label(self, name: str) -> None:
        if name in self._labels:
            raise ValueError(f"duplicate label {name}")
        self._labels[name] = len(self._items)

    def op(self, op: Op, a: int = 0, b: int = 0) -> None:
        self._items.append((op, [a, b]))

    def jmp(self, target: str | int) -> None:
        self._items.append((Op.JMP, [target, 0]))

    def decjz(self, reg: int, target: str | int) -> None:
        self._items.append((Op.DECJZ, [reg, target]))

    def extend(self, program: Program) -> None:
        for ins in program.instrs:
            self._items.append((ins.op, [ins.a, ins.b]))

    def build(self) -> Program:
        out = []
        for pc, (op, (a, b)) in enumerate(self._items):
            if op is Op.JMP and isinstance(a, str):
                a = self._resolve(a) - pc
            if op is Op.DECJZ and isinstance(b, str):
                b = self._resolve(b) - pc
            out.append(Instruction(op, a, b))
        return Program(tuple(out), self.arity)

    def _resolve(self, name: str) -> int:
        if name == "end":
            return len(self._items)
        try:
            return self._labels[name]
        except KeyError:
            raise ValueError(f"undefined label {name}") from None


_REG = re.compile(r"^r([0-9]+)$")
_LABEL = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*):$")


def _operand(tok: str, kind: str, lineno: int):
    if kind == "r":
        m = _REG.match(tok)
        if not m:
            raise AsmError(lineno, f"expected register, got {tok!r}")
        r = int(m.group(1))
        if r > R_MAX:
            raise AsmError(lineno, f"register r{r} out of range (r0..r{R_MAX})")
        return r
    if kind == "o" and re.match(r"^[A-Za-z_]", tok):
        return tok
    try:
        v = int(tok, 0)
    except ValueError:
        raise AsmError(lineno, f"expected number, got {tok!r}") from None
    if kind == "n" and v < 0:
        raise AsmError(lineno, f"constant must be a natural, got {v}")
    return v


def parse_asm(text: str) -> Program:
    arity = 0
    asm = Assembler()
    source_lines: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = re.match(r"^;;\s*arity\s+([0-9]+)\s*$", line)
        if m:
            arity = int(m.group(1))
            continue
        line = line.split("#", 1)[0].strip()
        if not line or line.startswith(";"):
            continue
        toks = line.split()
        while toks and _LABEL.match(toks[0]):
            try:
                asm.label(_LABEL.match(toks[0]).group(1))
            except ValueError as e:
                raise AsmError(lineno, str(e)) from None
            toks = toks[1:]
        if not toks:
            continue
        try:
            op = Op[toks[0].upper()]
        except KeyError:
            raise AsmError(lineno, f"unknown mnemonic {toks[0]!r}") from None
        kinds = LAYOUT[op]
        if len(toks) - 1 != len(kinds):
            raise AsmError(lineno, f"{op.name} takes {len(kinds)} operand(s), got {len(toks) - 1}")
        ops = [_operand(t, k, lineno) for t, k in zip(toks[1:], kinds)]
        source_lines.append(lineno)
        if op is Op.JMP:
            asm.jmp(ops[0])
        elif op is Op.DECJZ:
            asm.decjz(ops[0], ops[1])
        else:
            asm.op(op, *ops)
    if not asm._items:
        raise AsmError(0, "empty program")
    asm.arity = arity
    try:
        return asm.build()
    except (ValueError, LangError) as e:
        m = re.match(r"^pc ([0-9]+): (.*)$", str(e))
        if m:
            raise AsmError(source_lines[int(m.group(1))], m.group(2)) from None
        raise AsmError(0, str(e)) from None


def format_asm(program: Program, comment: str | None = None) -> str:
    lines = []
    if comment:
        lines.extend(f"# {c}" for c in comment.splitlines())
    lines.append(f";; arity {program.arity}")
    lines.extend(str(ins) for ins in program.instrs)
    return "\n".join(lines) + "\n"
