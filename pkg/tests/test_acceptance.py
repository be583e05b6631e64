"""Acceptance criteria 1 to 9, each at its stated size and time limit.

Every test prints one ``criterion N: PASS|FAIL`` line (shown even under
output capture) before asserting.
"""
import time

import pytest

from limitpower.tables import standard_tables
from limitpower.verify import (
    verify_ba,
    verify_colimit,
    verify_free,
    verify_functor,
    verify_los,
    verify_thm1,
    verify_thm2,
    verify_thm3,
)

from oracles import homomorphism_oracle

_REPORTS = {}


def _timed(key, fn, **kw):
    if key not in _REPORTS:
        t0 = time.perf_counter()
        rep = fn(**kw)
        _REPORTS[key] = (rep, time.perf_counter() - t0)
    return _REPORTS[key]


def _verdict(capsys, n, ok, seconds, limit, detail=""):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} ({seconds:.1f}s, limit {limit}s){' ' + detail if detail else ''}"
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


def _failed(rep):
    return [c for c in rep["cases"] if not c.get("ok")][:3]


def test_criterion_1_subalgebra_filter_round_trip(capsys):
    rep, dt = _timed("thm1", verify_thm1, base=4, index=3, trials=200, seed=0)
    ok = rep["ok"] and rep["count"] == 200 and dt < 30
    _verdict(capsys, 1, ok, dt, 30, f"{rep['count']} subalgebras, {rep['failures']} failures")


def test_criterion_2_block_boolean_algebras(capsys):
    rep, dt = _timed("ba", verify_ba, max_index=4)
    n4 = [c for c in rep["cases"] if c.get("index") == 4]
    ok = rep["ok"] and dt < 5 and len(n4) == 15
    _verdict(capsys, 2, ok, dt, 5, f"{rep['count']} filters, {rep['failures']} failures")


def test_criterion_3_congruence_filter_bijection(capsys):
    rep, dt = _timed("thm2", verify_thm2, base=3, index=3)
    ok = rep["ok"] and rep["count"] == 5 and dt < 120
    _verdict(capsys, 3, ok, dt, 120, f"{rep['count']} filters, failing: {_failed(rep)}")


def test_criterion_4_simplicity_equivalences(capsys):
    rep, dt = _timed("thm3", verify_thm3, base=3, index=3, depth=2)
    ultra = sum(c["ultra"] for c in rep["cases"])
    ok = rep["ok"] and 0 < ultra < rep["count"] and dt < 300
    _verdict(capsys, 4, ok, dt, 300, f"{rep['count']} (F, Z) pairs, {ultra} ultra, failing: {_failed(rep)}")


def test_criterion_5_freeness(capsys):
    oracle = homomorphism_oracle(standard_tables(2))
    rep, dt = _timed("free", verify_free, base=2, gens=(1, 2), max_size=16, oracle=oracle)
    gens = {c["gens"] for c in rep["cases"]}
    ok = rep["ok"] and gens == {1, 2} and dt < 120
    _verdict(capsys, 5, ok, dt, 120, f"{rep['count']} (target, G) cases, failing: {_failed(rep)}")


def test_criterion_6_functoriality(capsys):
    rep, dt = _timed("functor", verify_functor, trials=100, seed=0, base=3)
    ok = rep["ok"] and rep["count"] == 100 and dt < 60
    _verdict(capsys, 6, ok, dt, 60, f"{rep['count']} pairs, failing: {_failed(rep)}")


def test_criterion_7_los(capsys):
    rep, dt = _timed("los", verify_los, base=3, index=3, count=100, depth=2, seed=0)
    ultra = [c for c in rep["cases"] if "sentences" in c]
    witness = rep["cases"][-1].get("necessity_witness")
    ok = (rep["ok"] and ultra and all(c["sentences"] == 100 and not c["failures"] for c in ultra)
          and witness is not None and dt < 180)
    _verdict(capsys, 7, ok, dt, 180, f"{len(ultra)} ultra Z, witness {witness}")


def test_criterion_8_colimit(capsys):
    rep, dt = _timed("colimit", verify_colimit, trials=20, seed=0, base=3, max_size=27)
    ok = rep["ok"] and rep["count"] == 20 and dt < 120
    _verdict(capsys, 8, ok, dt, 120, f"{rep['count']} systems, failing: {_failed(rep)}")


def test_criterion_9_permutability(capsys):
    thm2, d2 = _timed("thm2", verify_thm2, base=3, index=3)
    thm3, d3 = _timed("thm3", verify_thm3, base=3, index=3, depth=2)
    flags = [c["permutable"] for c in thm2["cases"] + thm3["cases"]]
    # folded into the runtime of suites 3 and 4
    dt = d2 + d3
    ok = len(flags) > 0 and all(flags) and dt < 120 + 300
    _verdict(capsys, 9, ok, dt, 120 + 300, f"{len(flags)} algebras checked")


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(pytest.main([__file__, "-v"]))
