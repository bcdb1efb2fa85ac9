#!/usr/bin/env python3
"""Compare the numba-compiled interpreter loop with the plain Python one.

Usage: python benchmarks/bench_kernels.py [--fuel N] [--repeat K]

The workload is a call-free countdown loop, the shape of program the kernel
exists for.  Also times a full ``emulate`` in each configuration by running
a child process with HALTING_LAB_NO_NUMBA set and unset.
"""

import argparse
import os
import subprocess
import sys
import time

from halting_lab import _kernels
from halting_lab.lang import Op, P


def countdown(n: int):
    # r1 := n; loop { r0 += 3; r0 %= 1000003; if r1 == 0 halt; r1 -= 1 }
    return P((Op.CONST, 1, n), (Op.ADDC, 0, 3), (Op.MODC, 0, 1000003), (Op.DECJZ, 1, 2), (Op.JMP, -3), (Op.HALT,))


def best_of(fn, repeat: int) -> float:
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def kernel_table(fuel: int, repeat: int) -> None:
    lowered = _kernels.lower(countdown(fuel))
    regs = lambda: _kernels.as_array((0,) * 8)  # noqa: E731
    t0 = time.perf_counter()
    compiled = _kernels.run_flat(*lowered, regs(), 0, fuel)
    first = time.perf_counter() - t0
    pure = _kernels.run_flat_py(*lowered, regs(), 0, fuel)
    assert tuple(map(int, compiled)) == tuple(map(int, pure)), (compiled, pure)
    t_fast = best_of(lambda: _kernels.run_flat(*lowered, regs(), 0, fuel), repeat)
    t_pure = best_of(lambda: _kernels.run_flat_py(*lowered, regs(), 0, fuel), max(1, repeat // 2))
    label = "numba" if _kernels.USING_NUMBA else "python (numba disabled)"
    print(f"kernel, {fuel} steps")
    print(f"  {label:24s} {t_fast * 1e3:10.2f} ms  (first call incl. compile {first * 1e3:.0f} ms)")
    print(f"  {'pure python':24s} {t_pure * 1e3:10.2f} ms")
    print(f"  speedup {t_pure / t_fast:.1f}x")



def emulate_table(fuel: int) -> None:
    code = (
        "import time, sys\n"
        "from halting_lab.machine import run\n"
        "from halting_lab.lang import Op, P\n"
        f"prog = P((Op.CONST, 1, {fuel}), (Op.ADDC, 0, 3), (Op.MODC, 0, 1000003), (Op.DECJZ, 1, 2), (Op.JMP, -3), (Op.HALT,))\n"
        f"run(prog, None, {fuel * 5})\n"
        "t0 = time.perf_counter()\n"
        f"out = run(prog, None, {fuel * 5})\n"
        "print(time.perf_counter() - t0, out.steps)\n"
    )
    print(f"emulate, {fuel}-iteration loop (about {4 * fuel} steps)")
    for flag in ("0", "1"):
        env = dict(os.environ, HALTING_LAB_NO_NUMBA=flag)
        res = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        secs, steps = res.stdout.split()
        print(f"  HALTING_LAB_NO_NUMBA={flag}   {float(secs) * 1e3:10.2f} ms  steps={steps}")


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--fuel", type=int, default=10**6)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    kernel_table(args.fuel, args.repeat)
    emulate_table(args.fuel // 4)


if __name__ == "__main__":
    main()
