import numpy as np
import pytest
from hypothesis import given, strategies as st

from limitpower import kernels
from limitpower.algebra import congruence_lattice, direct_product, omega
from limitpower.clone import ClonePower, free_algebra, full_power
from limitpower.partitions import SetPartition, principal_filter
from limitpower.tables import standard_tables

from oracles import congruences_brute

BACKENDS = ["python"] + (["compiled"] if kernels.compiled_backend is not None else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    before = kernels.BACKEND
    kernels.use(request.param)
    yield request.param
    kernels.use(before)


def test_compiled_backend_is_built():
    # the editable install compiles the extension; a silent fallback would hide a broken build
    assert kernels.compiled_backend is not None


def _apply_brute(entries, idx, base, codes, labels):
    table = dict(zip(codes.tolist(), labels.tolist()))
    out = np.empty((len(entries), len(idx)), dtype=np.int64)
    for t, row in enumerate(entries):
        for n, cell in enumerate(idx):
            code = 0
            for c in cell:
                code = code * base + int(row[c])
            out[t, n] = table.get(code, -1)
    return out


@given(st.integers(2, 4), st.integers(1, 4), st.integers(1, 2), st.integers(0, 2 ** 32 - 1), st.booleans())
def test_apply_tables_matches_brute(base, width, arity, seed, sparse):
    rng = np.random.default_rng(seed)
    for name in BACKENDS:
        kernels.use(name)
        total = base ** width
        keep = rng.random(total) < (0.5 if sparse else 1.0)
        keep[0] = True
        codes = np.flatnonzero(keep).astype(np.int64)
        labels = rng.integers(0, len(codes), len(codes)).astype(np.int64)
        entries = rng.integers(0, base, size=(5, base ** arity)).astype(np.uint8)
        idx = rng.integers(0, base ** arity, size=(7, width)).astype(np.int64)
        got = kernels.apply_tables(entries, idx, base, codes, labels)
        assert np.array_equal(got, _apply_brute(entries, idx, base, codes, labels))
    kernels.use(BACKENDS[-1])


def _closure_brute(trans, labels):
    n = trans.shape[1]
    rel = {(x, y) for x in range(n) for y in range(n) if labels[x] == labels[y]}
    while True:
        new = set(rel)
        for x, y in rel:
            for row in trans:
                new.add((int(row[x]), int(row[y])))
        for x, y in list(new):
            for y2, z in list(new):
                if y == y2:
                    new.add((x, z))
        if new == rel:
            break
        rel = new
    lab = [min(y for y in range(n) if (x, y) in rel) for x in range(n)]
    return SetPartition(lab)


@given(st.integers(2, 7), st.integers(0, 4), st.integers(0, 2 ** 32 - 1))
def test_congruence_closure_matches_brute(n, rows, seed):
    rng = np.random.default_rng(seed)
    trans = rng.integers(0, n, size=(rows, n)).astype(np.int64)
    start = rng.integers(0, n, n)
    expect = _closure_brute(trans, start)
    for name in BACKENDS:
        kernels.use(name)
        got = kernels.congruence_closure(trans, start.astype(np.int32))
        assert SetPartition(got.tolist()) == expect
        prin = kernels.principal_congruences(trans)
        k = 0
        for x in range(n):
            for y in range(x + 1, n):
                lab = np.arange(n)
                lab[y] = x
                assert SetPartition(prin[k].tolist()) == _closure_brute(trans, lab)
                k += 1


def _small_algebras():
    O = omega(2)
    return [O, direct_product(O, O), full_power(2, 2), free_algebra(2, 1).algebra,
            ClonePower(2, principal_filter(SetPartition.from_blocks([[0, 1], [2]])))]


@pytest.mark.parametrize("k", range(5))
def test_congruence_lattice_matches_brute(backend, k):
    alg = _small_algebras()[k]
    tables = standard_tables(2)
    ours = {c.partition for c in congruence_lattice(alg, tables)}
    brute = {SetPartition(lab) for lab in congruences_brute(alg, tables)}
    assert ours == brute


def test_backends_agree_on_lattice():
    cp = ClonePower(3, principal_filter(SetPartition.from_blocks([[0, 1], [2]])))
    tables = standard_tables(3)
    results = []
    for name in BACKENDS:
        kernels.use(name)
        cp._trans_cache.clear()
        results.append([c.partition for c in congruence_lattice(cp, tables)])
    kernels.use(BACKENDS[-1])
    assert all(r == results[0] for r in results)
    assert len(results[0]) == 4
