"""Benchmark the jitted dense kernel against the numpy fallback.

Two comparisons:

* dense: rank of random square matrices mod p through the numba kernel and
  through the vectorized numpy path (same pivot scan, identical ranks);
* end-to-end: one large sparse elimination whose dense tail routes through
  the dispatching kernel, run once with the jitted path enabled and once
  with it disabled (the same switch the SOFICLEN_DISABLE_NUMBA environment
  variable flips at import time).

Usage:
    python benchmarks/bench_kernels.py [--sizes 200,400,800] [--repeats 3]
                                       [--prime 2147483647] [--seed 0]
                                       [--json OUT]
"""

import argparse
import json
from time import perf_counter

import numpy as np

from soficlen import _kernels
from soficlen.exactla import rank_mod_p
from soficlen.groupring import INTEGERS, GroupRingElement, GroupRingMatrix
from soficlen.groups import free_group
from soficlen.meanlength import build_sigma_bar
from soficlen.sofic import build_random_free


def time_dense(fn, a, p, repeats):
    best = None
    rank = None
    for _ in range(repeats):
        start = perf_counter()
        rank = fn(a, p)
        elapsed = perf_counter() - start
        best = elapsed if best is None else min(best, elapsed)
    return rank, best


def bench_dense(sizes, p, repeats, seed):
    rng = np.random.default_rng(seed)
    rows = []
    for n in sizes:
        a = rng.integers(0, p, size=(n, n), dtype=np.int64)
        entry = {"size": n}
        if _kernels.JIT_ENABLED:
            rank_nb, t_nb = time_dense(_kernels.dense_rank_mod_p_numba,
                                       a, p, repeats)
            entry["numba_s"] = t_nb
        else:
            rank_nb = None
            entry["numba_s"] = None
        rank_np, t_np = time_dense(_kernels.dense_rank_mod_p_numpy,
                                   a, p, repeats)
        entry["numpy_s"] = t_np
        if rank_nb is not None and rank_nb != rank_np:
            raise AssertionError(
                f"kernel disagreement at n={n}: {rank_nb} vs {rank_np}")
        entry["rank"] = rank_np
        rows.append(entry)
    return rows


def bench_end_to_end(p):
    """Sparse elimination of the large free-group model matrix."""
    F2 = free_group(2)
    s_minus = GroupRingElement.from_terms(
        F2, INTEGERS, [(F2.element((1,)), 1), (F2.identity(), -1)])
    t_minus = GroupRingElement.from_terms(
        F2, INTEGERS, [(F2.element((2,)), 1), (F2.identity(), -1)])
    f = GroupRingMatrix(F2, INTEGERS, [[s_minus], [t_minus]])
    bar = build_sigma_bar(f, build_random_free(2, 20000, 1))
    result = {"nnz": len(bar.val)}
    saved = _kernels.JIT_ENABLED
    try:
        for label, enabled in (("numba_s", True), ("numpy_s", False)):
            if enabled and not saved:
                result[label] = None
                continue
            _kernels.JIT_ENABLED = enabled
            start = perf_counter()
            rank = rank_mod_p(bar, p).rank
            result[label] = perf_counter() - start
            result.setdefault("rank", rank)
            if result["rank"] != rank:
                raise AssertionError(
                    f"path disagreement: {result['rank']} vs {rank}")
    finally:
        _kernels.JIT_ENABLED = saved
    return result


def fmt_seconds(value):
    return "   n/a  " if value is None else f"{value:7.3f}s"


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="compare the jitted and numpy dense kernels")
    parser.add_argument("--sizes", default="200,400,800",
                        help="comma-separated dense matrix sizes")
    parser.add_argument("--repeats", type=int, default=3,
                        help="repeats per dense measurement (best kept)")
    parser.add_argument("--prime", type=int, default=2**31 - 1,
                        help="modulus for every rank computation")
    parser.add_argument("--seed", type=int, default=0,
                        help="seed for the random dense matrices")
    parser.add_argument("--skip-end-to-end", action="store_true",
                        help="only run the dense micro-benchmark")
    parser.add_argument("--json", metavar="OUT",
                        help="also write the measurements as JSON")
    args = parser.parse_args(argv)
    sizes = [int(tok) for tok in args.sizes.split(",") if tok]

    if _kernels.JIT_ENABLED:
        _kernels.warmup()
        print("jitted kernel: enabled (warmed up)")
    else:
        print("jitted kernel: disabled or unavailable; numpy path only")

    dense_rows = bench_dense(sizes, args.prime, args.repeats, args.seed)
    print(f"\ndense rank mod {args.prime} "
          f"(best of {args.repeats}):")
    print("  size    rank     numba     numpy")
    for entry in dense_rows:
        print(f"  {entry['size']:4d}  {entry['rank']:6d}  "
              f"{fmt_seconds(entry['numba_s'])}  "
              f"{fmt_seconds(entry['numpy_s'])}")

    report = {"prime": args.prime, "dense": dense_rows}
    if not args.skip_end_to_end:
        e2e = bench_end_to_end(args.prime)
        print(f"\nend-to-end sparse elimination "
              f"(20000-point free-group model, nnz={e2e['nnz']}):")
        print(f"  rank {e2e['rank']}   "
              f"numba {fmt_seconds(e2e['numba_s'])}   "
              f"numpy {fmt_seconds(e2e['numpy_s'])}")
        report["end_to_end"] = e2e

    if args.json:
        with open(args.json, "w") as fh:
            json.dump(report, fh, indent=2)
        print(f"\nwrote {args.json}")


if __name__ == "__main__":
    main()
