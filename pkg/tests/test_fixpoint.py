import json

import pytest

from halting_lab.fixpoint import (
    T_FAMILY,
    T_LOOP,
    FixpointError,
    FixpointResult,
    construct_fixpoint,
    export_gallery,
    load_gallery,
    verify_fixpoint,
)
from halting_lab.lang import Instruction, Op, P, Program, decode, encode
from halting_lab.machine import FuelExhausted, Halted, Mode, World, emulate, run


@pytest.fixture(scope="module")
def fixpoints():
    return {name: construct_fixpoint(T) for name, T in T_FAMILY.items()}


def test_family_size():
    assert list(T_FAMILY) == ["constant", "identity", "successor", "doubler", "digit-length"]


@pytest.mark.parametrize("name", list(T_FAMILY))
def test_fixpoint_equation(fixpoints, name):
    fx = fixpoints[name]
    assert fx.r == encode(fx.R)
    assert decode(fx.r) == fx.R
    a = run(fx.R, None, 10**6)
    b = emulate(encode(fx.T), fx.r, 10**6)
    assert isinstance(a, Halted) and isinstance(b, Halted)
    assert a.output == b.output
    assert verify_fixpoint(fx, 10**6)


def test_specific_outputs(fixpoints):
    assert run(fixpoints["constant"].R).output == 42
    assert run(fixpoints["identity"].R).output == fixpoints["identity"].r
    assert run(fixpoints["successor"].R).output == fixpoints["successor"].r + 1
    assert run(fixpoints["doubler"].R).output == 2 * fixpoints["doubler"].r
    r = fixpoints["digit-length"].r
    assert run(fixpoints["digit-length"].R).output == len(format(r, "x"))


def test_diverging_t_matches_by_trace():
    fx = construct_fixpoint(T_LOOP)
    assert isinstance(run(fx.R, None, 10**4), FuelExhausted)
    assert verify_fixpoint(fx, 2 * 10**4)


def test_corrupted_fixpoint_is_rejected(fixpoints):
    fx = fixpoints["identity"]
    instrs = list(fx.R.instrs)
    # change one digit of the printed code
    i = next(j for j, ins in enumerate(instrs) if ins.op is Op.ADDC and ins.b < 15)
    instrs[i] = Instruction(Op.ADDC, 0, instrs[i].b + 1)
    bad_R = Program(tuple(instrs), 0)
    assert not verify_fixpoint(FixpointResult(bad_R, encode(bad_R), fx.T, fx.offset), 10**6)
    assert not verify_fixpoint(FixpointResult(fx.R, fx.r + 1, fx.T, fx.offset), 10**6)


def test_rejects_reflective_or_arity_zero_t():
    with pytest.raises(FixpointError):
        construct_fixpoint(P((Op.ANALYZE, 1, 1), (Op.HALT,), arity=1))
    with pytest.raises(FixpointError):
        construct_fixpoint(P((Op.HALT,)))
    fx = construct_fixpoint(P((Op.HCALL, 1, 1), (Op.HALT,), arity=1), allow_reflective=True)
    assert fx.r == encode(fx.R)


def test_gallery_shapes(gallery):
    g = gallery
    assert decode(g.k) == P((Op.ANALYZE, 1, 1), (Op.HALT,), arity=1)
    assert decode(g.p) == P((Op.HCALL, 1, 1), (Op.HALT,), arity=1)
    assert decode(g.b) == P((Op.CONST, 2, g.s), (Op.APPLY, 2, 1), (Op.HALT,), arity=1)
    assert g.C_s.arity == 0 and encode(g.C_s) == g.s
    assert g.C_q.arity == 0 and encode(g.C_q) == g.q
    tail = g.C_s.instrs[-3:]
    assert tail == (Instruction(Op.CONST, 2, g.k), Instruction(Op.APPLY, 2, 1), Instruction(Op.HALT))


def test_c_s_reaches_c_k_on_its_own_index(gallery):
    from halting_lab.decider import _reaches_call

    assert _reaches_call(gallery.s, gallery.k, gallery.s, 10**5)
    assert _reaches_call(gallery.q, gallery.p, gallery.q, 10**5)


def test_c_s_diverges(gallery):
    w = World(Mode.STRICT, gallery.designated)
    assert isinstance(emulate(gallery.s, None, 10**4, w), FuelExhausted)


@pytest.mark.parametrize("answer,halts", [(0, True), (1, False)])
def test_c_q_branch_with_stubbed_decider(gallery, answer, halts):
    # replace the call to C_p by a constant answer and keep C_q's branch
    tail = gallery.C_q.instrs[-3:]
    assert tail[0].op is Op.DECJZ
    stub = Program((Instruction(Op.CONST, 0, answer),) + tail, 0)
    out = run(stub, None, 1000)
    assert isinstance(out, Halted) is halts


def test_gallery_export_roundtrip(tmp_path, gallery):
    path = export_gallery(gallery, tmp_path)
    data = json.loads(path.read_text())
    assert set(data["programs"]) == {"C_k", "C_s", "C_p", "C_q", "C_b"}
    loaded = load_gallery(path)
    assert loaded.designated == gallery.designated and loaded.b == gallery.b


def test_gallery_manifest_detects_edits(tmp_path, gallery):
    path = export_gallery(gallery, tmp_path)
    f = tmp_path / "C_k.asm"
    f.write_text(f.read_text().replace("ANALYZE r1 r1", "HCALL r1 r1"))
    with pytest.raises(FixpointError):
        load_gallery(path)
