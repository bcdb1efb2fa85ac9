import pytest
from hypothesis import given

from halting_lab.asm import AsmError, Assembler, format_asm, parse_asm
from halting_lab.lang import Op, P, encode

from strategies import programs


def test_parse_basic_file():
    text = """
    ;; arity 1
    # count r1 down into r0
    top: DECJZ r1 end
         INC r0
         JMP top
    """
    prog = parse_asm(text)
    assert prog.arity == 1
    assert prog == P((Op.DECJZ, 1, 3), (Op.INC, 0), (Op.JMP, -2), arity=1)


def test_numeric_offsets_and_hex_constants():
    prog = parse_asm("CONST r0 0x10\nDECJZ r0 +2\nJMP -1\nHALT")
    assert prog.instrs[0].b == 16
    assert prog.instrs[1].b == 2


@pytest.mark.parametrize("text,line", [
    ("HALT\nBOGUS r1", 2),
    ("INC r9", 1),
    ("CONST r0", 1),
    ("CONST r0 -4", 1),
    ("JMP nowhere", 0),
    ("a: HALT\na: HALT", 2),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(AsmError) as exc:
        parse_asm(text)
    assert exc.value.line == line
    assert str(exc.value).startswith(f"line {line}:")


def test_empty_program_is_an_error():
    with pytest.raises(AsmError):
        parse_asm("# nothing here\n")


@given(programs(max_len=10, arity=None))
def test_format_parse_roundtrip(p):
    assert parse_asm(format_asm(p, "comment")) == p


def test_assembler_end_label():
    a = Assembler(0)
    a.decjz(0, "end")
    a.jmp(0)
    prog = a.build()
    assert prog == P((Op.DECJZ, 0, 2), (Op.JMP, 0))
    assert encode(prog) > 0


def test_out_of_range_jump_reports_its_line():
    with pytest.raises(AsmError) as exc:
        parse_asm("INC r0\n\nJMP +5\n")
    assert exc.value.line == 3
