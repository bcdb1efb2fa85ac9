"""One check per acceptance criterion; each prints a PASS or FAIL line.

Run under pytest (lines are repeated in the terminal summary) or directly
with ``python tests/test_acceptance.py``.
"""

import json
import subprocess
import sys
import time

from conftest import ACCEPTANCE_LINES
from halting_lab.analyzer import HaltUnreachable, check_certificate
from halting_lab.bridge import correspondence_check, halt_free_verdict, predicate_family
from halting_lab.decider import Halts, NotHalts, Unknown, audit, classify, decide, derivation_report
from halting_lab.fixpoint import T_FAMILY, build_gallery, construct_fixpoint, verify_fixpoint
from halting_lab.lang import encode
from halting_lab.machine import FuelExhausted, Halted, Mode, World, emulate, run
from halting_lab.trivalent import (
    F, GAP, LINES, NecessitationRow, equivalence_refuted, evaluate, gallery_rows,
    necessitation_holds, verdict_to_truth, witnessed_rows)

STRICT, GENERAL = Mode.STRICT, Mode.GENERAL
FUELS = (10**3, 10**4, 10**5)


def report(name: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def _gallery():
    g = build_gallery()
    return g, g.designated


def test_diagonal_claims():
    g, d = _gallery()
    t0 = time.perf_counter()
    ks = decide((d.k, d.s), STRICT, 10**5, d, budget=10**5)
    elapsed = time.perf_counter() - t0
    cert_ok = isinstance(ks, NotHalts) and ks.ticks <= 10**5 and check_certificate(ks.certificate, (d.k, d.s), STRICT, d)
    s_kinds = {(inp, f): type(decide((d.s, inp), STRICT, f, d)).__name__ for inp in (0, d.s) for f in FUELS}
    unknown_ok = set(s_kinds.values()) == {"Unknown"}
    world = World(STRICT, d)
    direct = [emulate(d.k, d.s, 10**6, world), emulate(d.s, None, 10**6, world)]
    fuel_ok = all(isinstance(o, FuelExhausted) and o.steps == 10**6 for o in direct)
    report("diagonal", cert_ok and elapsed < 10 and unknown_ok and fuel_ok,
           f"(k,s)={type(ks).__name__} ticks={getattr(ks, 'ticks', None)} "
           f"certificate={type(getattr(ks, 'certificate', None)).__name__} in {elapsed:.2f}s; "
           f"(s,0),(s,s) over fuels {FUELS}: {sorted(set(s_kinds.values()))}; "
           f"C_k(s), C_s() at 1e6: {[type(o).__name__ for o in direct]}")


def test_q_claims():
    g, d = _gallery()
    q_kinds = [type(decide((d.q, 0), STRICT, f, d)).__name__ for f in FUELS]
    pq = decide((d.p, d.q), STRICT, 10**5, d)
    ok = q_kinds == ["Unknown"] * 3 and isinstance(pq, NotHalts)
    report("q-diagonal", ok, f"(q,0) over fuels: {q_kinds}; (p,q)={type(pq).__name__}")


def test_general_mode_conclusion():
    g, d = _gallery()
    bs = decide((g.b, d.s), GENERAL, 10**5, d, budget=10**5)
    deriv = derivation_report(d, g.b, 10**5)
    steps_ok = (len(deriv.steps) == 4 and deriv.steps[1].discharged
                and not any(s.discharged for i, s in enumerate(deriv.steps) if i != 1))
    report("general-mode conclusion", isinstance(bs, NotHalts) and steps_ok,
           f"(b,s)={type(bs).__name__} ticks={getattr(bs, 'ticks', None)}; derivation steps={len(deriv.steps)}, "
           f"discharged={[s.number for s in deriv.steps if s.discharged]}, "
           f"side conditions={[s.holds for s in deriv.steps]}")


def test_recursion_theorem():
    t0 = time.perf_counter()
    details, ok = [], True
    for name, T in T_FAMILY.items():
        fx = construct_fixpoint(T)
        verified = verify_fixpoint(fx, 10**6)
        a = run(fx.R, None, 10**6)
        b = emulate(encode(T), fx.r, 10**6)
        exact = isinstance(a, Halted) and a == Halted(b.output, a.steps) and isinstance(b, Halted)
        exact = exact and fx.r == encode(fx.R)
        if name == "identity":
            exact = exact and a.output == fx.r
        ok = ok and verified and exact
        details.append(f"{name}={'ok' if verified and exact else 'bad'}")
    elapsed = time.perf_counter() - t0
    report("recursion theorem", ok and elapsed < 60, f"{', '.join(details)}; identity is a quine; {elapsed:.1f}s")


def test_soundness_sweep():
    g, d = _gallery()
    rep = classify(2001, STRICT, 10**3, d, budget=10**3)
    res = audit(rep, d, witness_fuel=10**5)
    counts = rep.counts
    ok = res.ok and all(counts.values()) and res.checked == counts["Halts"] + counts["NotHalts"]
    report("soundness sweep", ok,
           f"counts={counts}; audited {res.checked} definite verdicts, {len(res.failures)} failures "
           f"(incl. NotHalts that halt within 1e5)")


def test_sentence_table():
    values = [evaluate(s) for s in LINES]
    rows = witnessed_rows()
    ok = [v.value for v in values] == ["GAP", "T", "T", "T", "F", "F"]
    ok = ok and necessitation_holds(rows) and equivalence_refuted(rows)
    report("sentence table", ok, f"lines={[v.value for v in values]}; rows={[(r.left.value, r.right.value) for r in rows]}")


def test_program_tables():
    g, d = _gallery()
    rows = gallery_rows(10**5)
    middle = NecessitationRow(verdict_to_truth(decide((d.s, 0), STRICT, 10**5, d)),
                              verdict_to_truth(decide((d.k, d.s), STRICT, 10**5, d)))
    ok = necessitation_holds(r.row for r in rows) and middle == (GAP, F) and middle in [r.row for r in rows]
    report("program tables", ok,
           f"rows={[(r.name, r.row.left.value, r.row.right.value) for r in rows]}; middle witness={tuple(v.value for v in middle)}")


def test_bridge():
    fam = predicate_family()
    five = correspondence_check(fam["x = 5"], 10)
    brute = [x for x in range(10) if fam["x = 5"](x) == 1]
    five_ok = isinstance(five.verdict, Halts) and brute == [5] and five.verdict.output == 5 == five.witness
    false = correspondence_check(fam["false"], 10)
    free = halt_free_verdict(fam["false"])
    reports = [correspondence_check(p, 10) for p in fam.values()]
    ok = (five_ok and isinstance(false.verdict, Unknown) and isinstance(free, NotHalts)
          and isinstance(free.certificate, HaltUnreachable) and not any(r.hard_failure for r in reports))
    report("bridge", ok,
           f"x=5 -> {type(five.verdict).__name__}({getattr(five.verdict, 'output', None)}), brute force {brute}; "
           f"false -> {type(false.verdict).__name__}; HALT-free -> {type(free).__name__}; "
           f"statuses={sorted({r.status for r in reports})}")


DETERMINISM_RUNS = [
    ["demo-diagonal", "--format", "json"],
    ["tables", "--format", "json"],
    ["sweep", "--range", "200", "--fuel", "1000", "--budget", "1000", "--format", "json"],
    ["bridge", "--format", "json"],
    ["liar", "self: not-true", "--format", "json"],
    ["demo-recursion", "--fuel", "100000", "--format", "json"],
]


def _cli(argv):
    out = subprocess.run([sys.executable, "-m", "halting_lab", *argv], capture_output=True, check=False)
    return out.returncode, out.stdout


def test_determinism():
    diffs = []
    for argv in DETERMINISM_RUNS:
        first, second = _cli(argv), _cli(argv)
        if first != second or not first[1]:
            diffs.append(argv[0])
        for line in first[1].splitlines():
            json.loads(line)
    report("determinism", not diffs,
           f"{len(DETERMINISM_RUNS)} commands run twice in fresh processes; differing: {diffs or 'none'}")


if __name__ == "__main__":
    failed = 0
    for fn in [v for k, v in dict(globals()).items() if k.startswith("test_")]:
        try:
            fn()
        except AssertionError:
            failed += 1
    sys.exit(1 if failed else 0)
