"""Compare the compiled and numpy kernel backends.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N] [--json FILE]``.
Each workload is timed under both backends (best of ``--repeat``) and the
results are checked to agree before the timing is reported.
"""
from __future__ import annotations

import argparse
import json
import sys
import timeit

import numpy as np

from limitpower import kernels
from limitpower.algebra import congruence_lattice, direct_product, omega
from limitpower.clone import ClonePower, full_power
from limitpower.partitions import all_filters
from limitpower.tables import standard_tables
from limitpower.verify import verify_thm2, verify_thm3


def _apply_workload():
    cp = full_power(4, 3)
    tables = standard_tables(4)
    rows = tables.by_arity[2]
    rng = np.random.default_rng(0)
    args = rng.integers(0, cp.size, size=(2, 512))
    return lambda: cp.apply_batch(rows, args)


def _principal_workload():
    alg = direct_product(direct_product(omega(3), omega(3)), omega(3))
    trans = alg.translations(standard_tables(3))
    return lambda: kernels.principal_congruences(trans)


def _closure_workload():
    alg = ClonePower(3, all_filters(3)[-1])
    trans = alg.translations(standard_tables(3))
    seeds = np.arange(alg.size) % 7
    return lambda: kernels.congruence_closure(trans, seeds)


def _lattice_workload():
    cp = ClonePower(3, all_filters(3)[1])
    tables = standard_tables(3)
    return lambda: [c.labels.tolist() for c in congruence_lattice(cp, tables)]


WORKLOADS = {
    "apply_tables: 2580 binary tables x 512 pairs, A=4, |I|=3": _apply_workload,
    "principal_congruences: Ω(3)×Ω(3)×Ω(3), 27 elements": _principal_workload,
    "congruence_closure: discrete-filter clone power, 27 elements": _closure_workload,
    "congruence_lattice: clone power A=3, I=3, 9 elements": _lattice_workload,
    "suite thm2: A=3, I=3": lambda: (lambda: verify_thm2(3, 3)["ok"]),
    "suite thm3: A=3, I=3": lambda: (lambda: verify_thm3(3, 3)["ok"]),
}


def _result(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    return value


def run(repeat: int) -> list[dict]:
    if kernels.compiled_backend is None:
        sys.exit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
    rows = []
    for name, make in WORKLOADS.items():
        times, outs = {}, {}
        for backend in ("compiled", "python"):
            kernels.use(backend)
            fn = make()
            outs[backend] = _result(fn())
            times[backend] = min(timeit.repeat(fn, number=1, repeat=repeat))
        if outs["compiled"] != outs["python"]:
            raise SystemExit(f"backends disagree on {name}")
        rows.append({"workload": name, "compiled_s": times["compiled"], "python_s": times["python"],
                     "speedup": times["python"] / max(times["compiled"], 1e-9)})
    kernels.use("compiled")
    return rows


def main(argv=None) -> int:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--json", help="also write the rows here")
    args = p.parse_args(argv)
    rows = run(args.repeat)
    width = max(len(r["workload"]) for r in rows)
    print(f"{'workload':<{width}}  {'compiled':>10}  {'python':>10}  {'speedup':>8}")
    for r in rows:
        print(f"{r['workload']:<{width}}  {r['compiled_s']:>9.4f}s  {r['python_s']:>9.4f}s  {r['speedup']:>7.1f}x")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)
    return 0


if __name__ == "__main__":
    sys.exit(main())
