"""Compare the numba and numpy batch evaluators on exhaustive model enumeration.

    python3 benchmarks/bench_kernels.py [--worlds 3] [--formulas 50] [--repeat 3]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from modalred import _kernels
from modalred.corpus import random_corpus
from modalred.decide import frames_of_class
from modalred.formula import variables
from modalred.kripke import FrameClass


def _workload(worlds: int, count: int, seed: int):
    succ = np.concatenate(list(frames_of_class(worlds, FrameClass.K)))
    jobs = []
    for phi in random_corpus(count=count, seed=seed):
        var_list = sorted(variables(phi))
        prog = _kernels.compile_formulas([phi], var_indices=var_list)
        jobs.append((prog, _kernels.valuation_table(worlds, len(var_list))))
    return succ, jobs


def _run(worlds, succ, jobs, use_numba):
    return [_kernels.eval_batch(prog, worlds, succ, vals, use_numba=use_numba) for prog, vals in jobs]


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--worlds", type=int, default=3)
    ap.add_argument("--formulas", type=int, default=50)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    succ, jobs = _workload(args.worlds, args.formulas, args.seed)
    pairs = sum(len(succ) * len(vals) for _, vals in jobs)
    print(f"{args.formulas} formulas, {len(succ)} frames of {args.worlds} worlds, {pairs} (frame, valuation) pairs")

    modes = [("numpy", False)]
    if _kernels.HAVE_NUMBA:
        _run(args.worlds, succ[:1], jobs[:1], True)  # compile outside the timed region
        modes.append(("numba", True))
    else:
        print("numba unavailable (or MODALRED_DISABLE_NUMBA set); timing numpy only")

    results = {}
    for name, flag in modes:
        best = float("inf")
        for _ in range(args.repeat):
            t0 = time.perf_counter()
            results[name] = _run(args.worlds, succ, jobs, flag)
            best = min(best, time.perf_counter() - t0)
        print(f"{name:6s} best of {args.repeat}: {best:.3f}s  ({pairs / best / 1e6:.2f} M pairs/s)")

    if len(results) == 2:
        same = all(np.array_equal(a, b) for a, b in zip(results["numpy"], results["numba"]))
        print(f"outputs identical: {same}")


if __name__ == "__main__":
    main()
