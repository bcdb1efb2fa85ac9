import json
from dataclasses import replace

import pytest
from hypothesis import given, strategies as st

from halting_lab.analyzer import (
    AnalyzerSelfDivergence,
    ConfigCycle,
    GaveUp,
    HaltUnreachable,
    NotHalting,
    OutOfBudget,
    Query,
    SelfSimilarRegress,
    analyze,
    cfg_reachable,
    check_certificate,
    report,
    tick_count,
)
from halting_lab.lang import Op, P, encode
from halting_lab.machine import FuelExhausted, Mode, emulate

from strategies import programs

LOOP = encode(P((Op.JMP, 0)))
STRICT, GENERAL = Mode.STRICT, Mode.GENERAL


def test_halt_unreachable():
    out = analyze((LOOP, None))
    assert isinstance(out, NotHalting)
    assert isinstance(out.certificate, HaltUnreachable)
    assert out.certificate.reachable == frozenset({0})
    assert check_certificate(out.certificate, (LOOP, None))


def test_one_past_end_counts_as_halt():
    reach, halts = cfg_reachable(P((Op.INC, 0)))
    assert halts and reach == frozenset({0, 1})


def test_tick_count_is_deterministic_and_positive():
    a = analyze((LOOP, None))
    b = analyze((LOOP, None))
    assert tick_count(a) == tick_count(b) >= 1
    assert tick_count(OutOfBudget(37)) == 37


def _cycle_program():
    # r0 := 1; DECJZ falls through into a self-loop, though HALT is CFG-reachable
    return P((Op.CONST, 0, 1), (Op.DECJZ, 0, 2), (Op.JMP, 0), (Op.HALT,))


def test_config_cycle_and_tampering():
    q = (encode(_cycle_program()), None)
    out = analyze(q)
    assert isinstance(out.certificate, ConfigCycle)
    assert out.certificate.period == 1
    assert check_certificate(out.certificate, q)
    bad = replace(out.certificate, period=out.certificate.period + 1)
    assert not check_certificate(bad, q)
    entry = out.certificate.entry
    moved = replace(entry, frames=(entry.frames[0]._replace(regs=(1,) + entry.frames[0].regs[1:]),))
    assert not check_certificate(replace(out.certificate, entry=moved), q)


def test_self_similar_regress():
    selfcall = P((Op.APPLY, 1, 1), (Op.HALT,), arity=1)
    c = encode(selfcall)
    out = analyze((c, c))
    assert isinstance(out.certificate, SelfSimilarRegress)
    assert out.certificate.re_entry_depth == 1
    assert check_certificate(out.certificate, (c, c))
    assert isinstance(emulate(c, c, 10**4), FuelExhausted)
    # the same program on another input just halts
    assert isinstance(analyze((c, encode(P((Op.HALT,))))), GaveUp)


def test_out_of_budget():
    prog = P((Op.INC, 0), (Op.DECJZ, 1, -1), (Op.HALT,))
    out = analyze((encode(prog), None), budget=100)
    assert isinstance(out, OutOfBudget)
    assert out.ticks == 100 == tick_count(out)


def test_halting_target_gives_up():
    out = analyze((encode(P((Op.INC, 0), (Op.HALT,))), None))
    assert isinstance(out, GaveUp) and out.reason == "target halts"


def test_budget_must_be_positive():
    with pytest.raises(ValueError):
        analyze((LOOP, None), budget=0)


def test_strict_mode_needs_designated():
    with pytest.raises(ValueError):
        analyze((LOOP, None), STRICT)


@pytest.mark.parametrize("mode", [STRICT, GENERAL])
def test_k_s_self_divergence_in_both_modes(mode, designated):
    d = designated
    out = analyze((d.k, d.s), mode, 10**5, d)
    assert isinstance(out, NotHalting)
    assert isinstance(out.certificate, AnalyzerSelfDivergence)
    assert out.ticks <= 10**5
    assert check_certificate(out.certificate, (d.k, d.s), mode, d)
    tampered = replace(out.certificate, re_invocation_trace_length=out.certificate.re_invocation_trace_length - 1)
    assert not check_certificate(tampered, (d.k, d.s), mode, d)


@pytest.mark.parametrize("m", ["zero", "s", "seventeen"])
def test_strict_s_gives_up_for_every_input(m, designated):
    d = designated
    arg = {"zero": 0, "s": d.s, "seventeen": 17}[m]
    assert isinstance(analyze((d.s, arg), STRICT, 10**5, d), GaveUp)


@pytest.mark.parametrize("fuel", [10**3, 10**4, 10**5])
def test_object_level_analyze_of_s_diverges(fuel, designated, gallery):
    from halting_lab.machine import World

    d = designated
    assert isinstance(emulate(d.k, d.s, fuel, World(STRICT, d)), FuelExhausted)


def test_general_mode_proves_b_s(gallery, designated):
    d = designated
    out = analyze((gallery.b, d.s), GENERAL, 10**5, d)
    assert isinstance(out, NotHalting)
    assert check_certificate(out.certificate, (gallery.b, d.s), GENERAL, d)


def test_general_mode_s_s_stays_given_up(designated):
    d = designated
    out = analyze((d.s, d.s), GENERAL, 10**5, d)
    assert not isinstance(out, NotHalting)


def test_query_normalises_input_of_arity_zero_programs(designated):
    assert Query.of(designated.s, 5) == Query(designated.s, None)
    assert Query.of(designated.k, 5) == Query(designated.k, 5)


def test_report_is_json_serialisable(designated):
    d = designated
    q = Query.of(d.k, d.s)
    rec = report(analyze(q, STRICT, 10**5, d), q)
    text = json.dumps(rec, sort_keys=True)
    assert json.loads(text)["certificate"]["kind"] == "AnalyzerSelfDivergence"
    assert rec["tree"]["children"][0]["via"] == "analyze"


@given(programs(max_len=6, small=True, arity=1), st.integers(0, 5))
def test_soundness_on_random_call_free_programs(p, x):
    idx = encode(p)
    out = analyze((idx, x), budget=500)
    if isinstance(out, NotHalting):
        assert check_certificate(out.certificate, (idx, x))
        assert isinstance(emulate(idx, x, 10**4, program=p), FuelExhausted)


CALL_OPS = [Op.HALT, Op.INC, Op.CONST, Op.DECJZ, Op.JMP, Op.APPLY, Op.ANALYZE]


@given(programs(max_len=5, ops=CALL_OPS, small=True, arity=1), st.integers(0, 3))
def test_soundness_with_calls(p, x):
    idx = encode(p)
    out = analyze((idx, x), budget=300)
    if isinstance(out, NotHalting):
        assert check_certificate(out.certificate, (idx, x))
        assert isinstance(emulate(idx, x, 3000, program=p), FuelExhausted)


def test_modes_agree_away_from_designated_indices(designated):
    for i in range(2001):
        a = analyze((i, None), STRICT, 10**3, designated)
        b = analyze((i, None), GENERAL, 10**3, designated)
        assert type(a) is type(b), i
        if isinstance(a, NotHalting):
            assert type(a.certificate) is type(b.certificate)


def test_analysis_is_pure(designated):
    d = designated
    a = analyze((d.k, d.s), STRICT, 10**5, d)
    b = analyze((d.k, d.s), STRICT, 10**5, d)
    assert a == b and a.ticks == b.ticks
