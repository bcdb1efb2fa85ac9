"""Command-line entry point.

Exit codes: 0 success or definite answer, 1 usage or parse error,
2 fuel exhausted or Unknown, 3 soundness-audit failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from .asm import AsmError, format_asm, parse_asm
from .lang import LangError, Program, decode, encode, is_valid
from .machine import Halted, Mode, World
from .serialize import big, run_to_dict, verdict_to_dict

EXIT_OK, EXIT_USAGE, EXIT_UNDECIDED, EXIT_UNSOUND = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _short(v: int | None, width: int = 24) -> str:
    if v is None:
        return "-"
    s = str(v)
    return s if len(s) <= width else f"{s[:8]}...{s[-8:]} ({len(s)} digits)"


def _load_program(spec: str) -> tuple[int, Program]:
    """A decimal index or a path to an assembly file."""
    if spec.isdigit():
        idx = int(spec)
        return idx, decode(idx)
    path = Path(spec)
    if not path.exists():
        raise UsageError(f"no such file: {spec}")
    prog = parse_asm(path.read_text())
    return encode(prog), prog


def _input(value: str | None) -> int | None:
    if value is None:
        return None
    if not value.isdigit():
        raise UsageError(f"input must be a natural number, got {value!r}")
    return int(value)


def _designated(mode: Mode):
    if mode is Mode.STRICT:
        from .fixpoint import build_gallery

        return build_gallery().designated
    return None


def _emit(args, record: dict, human: str) -> None:
    if args.format == "json":
        print(json.dumps(record, sort_keys=True))
    else:
        print(human)


# -- subcommands -----------------------------------------------------------------

def cmd_encode(args) -> int:
    idx, prog = _load_program(args.program)
    _emit(args, {"index": str(idx), "length": len(prog), "arity": prog.arity}, str(idx))
    return EXIT_OK


def cmd_decode(args) -> int:
    if not args.index.isdigit():
        raise UsageError("decode takes a decimal index")
    idx = int(args.index)
    prog = decode(idx)
    valid = is_valid(idx)
    note = None if valid else "invalid encoding; names the canonical diverging program"
    if args.format == "json":
        print(json.dumps({"index": str(idx), "valid": valid, "arity": prog.arity,
                          "instrs": [str(i) for i in prog.instrs]}, sort_keys=True))
    else:
        sys.stdout.write(format_asm(prog, note))
    return EXIT_OK


def cmd_run(args) -> int:
    from .machine import emulate, trace_of

    idx, prog = _load_program(args.program)
    world = World(Mode(args.mode), _designated(Mode(args.mode)))
    if args.trace:
        tr = trace_of(idx, _input(args.input), args.fuel, args.sample_every, world)
        Path(args.trace).write_text(tr.to_jsonl())
        out = tr.outcome
    else:
        out = emulate(idx, _input(args.input), args.fuel, world, program=prog)
    if isinstance(out, Halted):
        human = f"Halted output={_short(out.output)} steps={out.steps}"
    else:
        human = f"FuelExhausted steps={out.steps}"
    _emit(args, run_to_dict(out), human)
    return EXIT_OK if isinstance(out, Halted) else EXIT_UNDECIDED


def cmd_analyze(args) -> int:
    from .analyzer import NotHalting, Query, analyze, report

    idx, _ = _load_program(args.program)
    mode = Mode(args.mode)
    q = Query.of(idx, _input(args.input))
    out = analyze(q, mode, args.budget, _designated(mode))
    rec = report(out, q)
    human = f"{type(out).__name__} ticks={out.ticks}"
    if isinstance(out, NotHalting):
        human += f" certificate={type(out.certificate).__name__}"
    elif hasattr(out, "reason"):
        human += f" reason={out.reason}"
    _emit(args, rec, human)
    return EXIT_OK if isinstance(out, NotHalting) else EXIT_UNDECIDED


def _verdict_line(label: str, v) -> str:
    from .decider import Halts, NotHalts

    if isinstance(v, Halts):
        return f"{label}: Halts output={_short(v.output)} steps={v.steps}"
    if isinstance(v, NotHalts):
        c = v.certificate
        extra = ""
        if hasattr(c, "give_up_trace_length"):
            extra = (f" via={c.via} give_up_trace={c.give_up_trace_length}"
                     f" re_invocation_trace={c.re_invocation_trace_length}")
        return f"{label}: NotHalts certificate={type(c).__name__}{extra} ticks={v.ticks}"
    a = v.a_outcome
    why = f" ({a.reason})" if hasattr(a, "reason") else ""
    return f"{label}: Unknown a-outcome={type(a).__name__}{why}"


def cmd_decide(args) -> int:
    from .decider import Unknown, decide

    idx, _ = _load_program(args.program)
    mode = Mode(args.mode)
    v = decide((idx, _input(args.input)), mode, args.fuel, _designated(mode), args.budget)
    _emit(args, verdict_to_dict(v), _verdict_line(f"({_short(idx)}, {_short(_input(args.input))})", v))
    return EXIT_UNDECIDED if isinstance(v, Unknown) else EXIT_OK


def cmd_demo_diagonal(args) -> int:
    from .decider import decide, derivation_report
    from .fixpoint import build_gallery, export_gallery, load_gallery

    g = load_gallery(args.manifest) if args.manifest else build_gallery()
    if args.export:
        export_gallery(g, args.export)
    d = g.designated
    mode = Mode(args.mode)
    rows = [("(k, s)", (d.k, d.s)), ("(s, 0)", (d.s, 0)), ("(p, q)", (d.p, d.q)), ("(q, 0)", (d.q, 0))]
    verdicts = [(label, decide(q, mode, args.fuel, d)) for label, q in rows]
    witness = decide((g.b, d.s), Mode.GENERAL, args.fuel, d, budget=args.fuel)
    deriv = derivation_report(d, g.b, args.fuel)
    if args.format == "json":
        print(json.dumps({
            "mode": mode.value,
            "indices": {name: str(idx) for name, (idx, _) in g.programs().items()},
            "verdicts": {label: verdict_to_dict(v) for label, v in verdicts},
            "general_witness_b_s": verdict_to_dict(witness),
            "derivation": deriv.to_dict(),
        }, sort_keys=True))
        return EXIT_OK
    print(f"mode {mode.value}")
    for name, (idx, prog) in g.programs().items():
        print(f"  {name}: index {_short(idx)}, {len(prog)} instructions")
    for label, v in verdicts:
        print(_verdict_line(label, v))
    print(_verdict_line("(b, s) [general]", witness))
    print("derivation:")
    for st in deriv.steps:
        mark = {True: "ok", False: "FAILS", None: "n/a"}[st.holds]
        tag = " [discharged]" if st.discharged else ""
        print(f"  ({st.number}) {st.formula:12s} {st.justification}{tag}; check: {st.side_condition} -> {mark}")
    return EXIT_OK


def cmd_demo_recursion(args) -> int:
    from .fixpoint import T_FAMILY, construct_fixpoint, verify_fixpoint
    from .machine import run

    results = {}
    for name, T in T_FAMILY.items():
        fx = construct_fixpoint(T)
        ok = verify_fixpoint(fx, args.fuel)
        out = run(fx.R, None, args.fuel)
        results[name] = {
            "verified": ok,
            "r": str(fx.r),
            "output": big(out.output) if isinstance(out, Halted) else None,
            "quine": isinstance(out, Halted) and out.output == fx.r,
            "length": len(fx.R),
        }
    if args.format == "json":
        print(json.dumps(results, sort_keys=True))
    else:
        for name, r in results.items():
            out = "-" if r["output"] is None else _short(int(r["output"]))
            print(f"{name:13s} verified={r['verified']} R()={out} quine={r['quine']} |R|={r['length']}")
    return EXIT_OK if all(r["verified"] for r in results.values()) else EXIT_UNSOUND


def cmd_sweep(args) -> int:
    from .decider import audit, classify

    if args.range < 1:
        raise UsageError("--range must be >= 1")
    mode = Mode(args.mode)
    d = _designated(mode)
    rep = classify(args.range, mode, args.fuel, d, args.budget)
    res = audit(rep, d, args.witness_fuel)
    if args.format == "json":
        for i, v in enumerate(rep.verdicts):
            print(json.dumps({"index": str(rep.start + i), **verdict_to_dict(v)}, sort_keys=True))
        print(json.dumps({"summary": rep.counts, "audit_checked": res.checked,
                          "audit_failures": res.failures}, sort_keys=True))
    else:
        for kind, n in rep.counts.items():
            if n or args.range > 1:
                print(f"{kind:9s} {n}")
        print(f"audit: {res.checked} checked, {len(res.failures)} failures")
        for f in res.failures:
            print(f"  {f}")
        examples = {k: rep.members(k)[:5] for k in rep.counts}
        print("examples: " + "; ".join(f"{k} {v}" for k, v in examples.items() if v))
    return EXIT_OK if res.ok else EXIT_UNSOUND


def cmd_liar(args) -> int:
    from .trivalent import NotationError, evaluate_with_path, format_sentence, parse_sentence, render

    try:
        s = parse_sentence(args.sentence)
    except NotationError as e:
        raise UsageError(str(e)) from None
    ev = evaluate_with_path(s)
    if args.format == "json":
        print(json.dumps({"sentence": format_sentence(s), "text": render(s), "value": ev.value.value,
                          "path": [{"sentence": format_sentence(p.sentence), "note": p.note} for p in ev.path]},
                         sort_keys=True))
    else:
        print(ev.value.value)
        print(f"  {render(s)}")
        for i, p in enumerate(ev.path):
            mark = "  <- loop" if i == ev.loop_at else ""
            print(f"  {i}: {format_sentence(p.sentence)} [{p.note}]{mark}")
    return EXIT_OK


def cmd_tables(args) -> int:
    from .bridge import correspondence_check, predicate_family
    from .trivalent import (
        LINES, REFERENCE_ROWS, TABLE_LABELS, NotationError, equivalence_refuted, evaluate,
        gallery_rows, necessitation_holds, parse_rows, render, witnessed_rows)

    if args.rows:
        try:
            rows = parse_rows(Path(args.rows).read_text())
        except (OSError, NotationError) as e:
            raise UsageError(str(e)) from None
        rec = {"rows": [[r.left.value, r.right.value] for r in rows],
               "necessitation": necessitation_holds(rows), "equivalence_refuted": equivalence_refuted(rows)}
        _emit(args, rec, f"necessitation={rec['necessitation']} equivalence_refuted={rec['equivalence_refuted']}")
        return EXIT_OK
    lines = [evaluate(s).value for s in LINES]
    w = witnessed_rows()
    prog_rows = gallery_rows(args.fuel)
    bridge = [correspondence_check(p, 10, args.fuel) for p in predicate_family().values()]
    b_rows = [r.row for r in bridge]
    rec = {
        "sentences": {"lines": lines, "rows": [[r.left.value, r.right.value] for r in w],
                      "necessitation": necessitation_holds(w), "equivalence_refuted": equivalence_refuted(w)},
        "programs": {"rows": [{"name": r.name, "left": r.row.left.value, "right": r.row.right.value}
                                for r in prog_rows],
                       "necessitation": necessitation_holds(r.row for r in prog_rows)},
        "searchers": {"reference_rows": [[r.left.value, r.right.value] for r in REFERENCE_ROWS],
                      "equivalence_refuted": equivalence_refuted(REFERENCE_ROWS),
                      "bridge_rows": {r.name: [r.row.left.value, r.row.right.value] for r in bridge},
                      "bridge_necessitation": necessitation_holds(b_rows)},
    }
    if args.format == "json":
        print(json.dumps(rec, sort_keys=True))
        return EXIT_OK
    print("Sentences")
    for i, (s, v) in enumerate(zip(LINES, lines), 1):
        print(f"  line {i}: {v:3s}  {render(s)}")
    print(f"  rows {[(r.left.value, r.right.value) for r in w]}"
          f"  necessitation={rec['sentences']['necessitation']}"
          f" equivalence_refuted={rec['sentences']['equivalence_refuted']}")
    for table, labels in TABLE_LABELS.items():
        print(f"Programs, {table} wording  (R() | T(r))")
        for r in prog_rows:
            print(f"  {labels[r.row.left]:30s} | {labels[r.row.right]:30s}  [{r.name}]")
    print(f"  necessitation={rec['programs']['necessitation']}")
    print("Searchers (Prog_P halts | exists x P(x))")
    for r in bridge:
        print(f"  {r.row.left.value:3s} | {r.row.right.value:3s}  [{r.name}]")
    print(f"  necessitation={rec['searchers']['bridge_necessitation']}"
          f" reference equivalence_refuted={rec['searchers']['equivalence_refuted']}")
    return EXIT_OK


def cmd_bridge(args) -> int:
    from .bridge import PredicateProgram, correspondence_check, predicate_family

    if args.predicate:
        _, prog = _load_program(args.predicate)
        try:
            preds = {args.predicate: PredicateProgram(prog, args.predicate)}
        except ValueError as e:
            raise UsageError(str(e)) from None
    else:
        preds = predicate_family()
    reports = [correspondence_check(p, args.bound, args.fuel) for p in preds.values()]
    if args.format == "json":
        for r in reports:
            print(json.dumps(r.to_dict(), sort_keys=True))
    else:
        for r in reports:
            w = "-" if r.witness is None else r.witness
            print(f"{r.name:12s} witness<{r.bound}: {w:>2}  verdict={type(r.verdict).__name__:8s} {r.status}")
    return EXIT_UNSOUND if any(r.hard_failure for r in reports) else EXIT_OK


# -- parser -------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--fuel", type=int, default=10**5, help="emulation steps (default 10^5)")
    common.add_argument("--budget", type=int, default=10**5, help="analyzer ticks (default 10^5)")
    common.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.STRICT.value)
    common.add_argument("--format", choices=["human", "json"], default="human")

    p = argparse.ArgumentParser(prog="halting-lab", description="Toy halting analysis laboratory")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=fn)
        return sp

    add("encode", cmd_encode, "index of an assembly file").add_argument("program")
    add("decode", cmd_decode, "assembly for an index").add_argument("index")
    sp = add("run", cmd_run, "emulate a program")
    sp.add_argument("program")
    sp.add_argument("--input")
    sp.add_argument("--trace", help="write a JSONL trace to this path")
    sp.add_argument("--sample-every", type=int, default=1)
    for name, fn, help_ in (("analyze", cmd_analyze, "run the analyzer"), ("decide", cmd_decide, "run the decider")):
        sp = add(name, fn, help_)
        sp.add_argument("program")
        sp.add_argument("--input")
    sp = add("demo-diagonal", cmd_demo_diagonal, "gallery verdicts and the reductio")
    sp.add_argument("--manifest", help="load the gallery from an exported manifest")
    sp.add_argument("--export", help="write the gallery as assembly plus manifest to this directory")
    add("demo-recursion", cmd_demo_recursion, "fixpoints for the T family")
    sp = add("sweep", cmd_sweep, "classify an index range and audit it")
    sp.add_argument("--range", type=int, default=2001, help="classify indices [0, RANGE)")
    sp.add_argument("--witness-fuel", type=int, default=10**5)
    add("liar", cmd_liar, "evaluate a pointer sentence").add_argument("sentence")
    add("tables", cmd_tables, "reproduce the truth tables").add_argument("--rows", help="check rows from a text file")
    sp = add("bridge", cmd_bridge, "predicate/searcher correspondence")
    sp.add_argument("predicate", nargs="?", help="predicate assembly file or index (default: built-in family)")
    sp.add_argument("--bound", type=int, default=10)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    try:
        if args.fuel < 2:
            raise UsageError("--fuel must be >= 2")
        if args.budget < 1:
            raise UsageError("--budget must be >= 1")
        return args.func(args)
    except AsmError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, LangError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
