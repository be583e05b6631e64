"""Slow, independent reference implementations used as test oracles.

Nothing here calls the numeric kernels, ``apply_batch`` or the closure
and congruence routines of the package: operations are recomputed
pointwise on representative vectors in plain Python.
"""
from __future__ import annotations

from itertools import combinations, product

import numpy as np

from limitpower.logic import And, App, Const, Eq, Exists, Forall, Not, Or, Var


# -- partitions -----------------------------------------------------------------

def blocks_of(labels):
    out = {}
    for i, x in enumerate(labels):
        out.setdefault(x, set()).add(i)
    return [frozenset(b) for b in out.values()]


def rgs_partitions(n):
    """All partitions of range(n) as restricted growth strings."""
    for s in product(range(n), repeat=n):
        if all(s[i] <= max(s[:i], default=-1) + 1 for i in range(n)):
            yield s


def refines_brute(p, q):
    """Every block of ``p`` lies inside a block of ``q`` (label tuples)."""
    return all(any(b <= c for c in blocks_of(q)) for b in blocks_of(p))


def meet_brute(p, q):
    bs = [b & c for b in blocks_of(p) for c in blocks_of(q) if b & c]
    lab = [0] * len(p)
    for k, b in enumerate(bs):
        for i in b:
            lab[i] = k
    return canon(lab)


def canon(labels):
    seen = {}
    return tuple(seen.setdefault(x, len(seen)) for x in labels)


def partition_filters_brute(n):
    """Nonempty, coarsening-closed, meet-closed families of partitions of range(n)."""
    parts = list(rgs_partitions(n))
    out = []
    for bits in range(1, 1 << len(parts)):
        fam = {parts[k] for k in range(len(parts)) if bits >> k & 1}
        up = all(q in fam for p in fam for q in parts if refines_brute(p, q))
        meet = all(meet_brute(p, q) in fam for p in fam for q in fam)
        if up and meet:
            out.append(frozenset(fam))
    return out


def ba_filters_brute(elements, top):
    """Upward-closed, intersection-closed, nonempty families of the given masks."""
    els = list(elements)
    out = []
    for bits in range(1, 1 << len(els)):
        fam = {els[k] for k in range(len(els)) if bits >> k & 1}
        if top not in fam:
            continue
        if all(s in fam for r in fam for s in els if r & s == r) and all(r & s in fam for r in fam for s in fam):
            out.append(frozenset(fam))
    return out


def is_ultra_brute(fam, all_filters):
    """Proper and maximal among proper filters."""
    if 0 in fam:
        return False
    return not any(fam < g and 0 not in g for g in all_filters)


# -- algebras -------------------------------------------------------------------

class Model:
    """An algebra read back as plain tuples with a dictionary lookup."""

    def __init__(self, alg):
        self.base = alg.base
        self.elements = [tuple(int(v) for v in row) for row in alg.rep_vectors]
        self.lookup = {tuple(int(v) for v in row): int(lab) for row, lab in zip(alg.vectors, alg.labels)}
        self.size = len(self.elements)

    def apply(self, entries, *args):
        k = len(args)
        vecs = [self.elements[a] for a in args]
        out = []
        for coords in zip(*vecs) if k else [()]:
            idx = 0
            for x in coords:
                idx = idx * self.base + x
            out.append(int(entries[idx]))
        if not k:
            out = out * len(self.elements[0])
        return self.lookup[tuple(out)]

    def constant(self, a):
        return self.lookup[(a,) * len(self.elements[0])]


def closure_brute(alg, S, tables):
    """Least superset of ``S`` plus constants closed under every table row."""
    m = Model(alg)
    cur = set(int(s) for s in S) | {m.constant(a) for a in range(alg.base)}
    while True:
        new = set()
        for k, rows in tables.by_arity.items():
            for row in rows:
                for args in product(sorted(cur), repeat=k):
                    new.add(m.apply(row, *args))
        if new <= cur:
            return sorted(cur)
        cur |= new


def unary_polys(alg, tables):
    """Maps x -> t(c.., x, ..c) for every table row, argument slot and parameter tuple."""
    m = Model(alg)
    polys = set()
    for k, rows in tables.by_arity.items():
        for row in rows:
            for slot in range(k):
                for params in product(range(m.size), repeat=k - 1):
                    f = []
                    for x in range(m.size):
                        args = list(params[:slot]) + [x] + list(params[slot:])
                        f.append(m.apply(row, *args))
                    polys.add(tuple(f))
    return polys


def congruences_brute(alg, tables):
    """Every partition of the carrier closed under all unary polynomials."""
    polys = unary_polys(alg, tables)
    out = []
    for lab in rgs_partitions(alg.size):
        if all(lab[p[x]] == lab[p[y]] for p in polys
               for x in range(alg.size) for y in range(x + 1, alg.size) if lab[x] == lab[y]):
            out.append(lab)
    return out


def homomorphisms_brute(src, tgt, tables):
    """All homomorphisms ``src -> tgt`` by backtracking with propagation.

    Unary and binary rows drive the propagation; every surviving map is
    then checked against every row of every arity.
    """
    S, T = Model(src), Model(tgt)
    n = S.size
    rows1 = list(tables.by_arity.get(1, []))
    rows2 = list(tables.by_arity.get(2, []))
    s1 = [[S.apply(r, x) for x in range(n)] for r in rows1]
    t1 = [[T.apply(r, y) for y in range(T.size)] for r in rows1]
    s2 = [[[S.apply(r, x, y) for y in range(n)] for x in range(n)] for r in rows2]
    t2 = [[[T.apply(r, x, y) for y in range(T.size)] for x in range(T.size)] for r in rows2]

    def propagate(h):
        changed = True
        while changed:
            changed = False
            done = [x for x in range(n) if h[x] is not None]
            for u in range(len(rows1)):
                for x in done:
                    z, w = s1[u][x], t1[u][h[x]]
                    if h[z] is None:
                        h[z], changed = w, True
                    elif h[z] != w:
                        return False
            for b in range(len(rows2)):
                for x in done:
                    for y in done:
                        z, w = s2[b][x][y], t2[b][h[x]][h[y]]
                        if h[z] is None:
                            h[z], changed = w, True
                        elif h[z] != w:
                            return False
        return True

    found = []

    def search(h):
        if not propagate(h):
            return
        free = [x for x in range(n) if h[x] is None]
        if not free:
            found.append(list(h))
            return
        for y in range(T.size):
            g = list(h)
            g[free[0]] = y
            search(g)

    search([None] * n)
    higher = [(k, rows) for k, rows in tables.by_arity.items() if k > 2]
    checks = [(_op_table(S, rows, k), _op_table(T, rows, k), k) for k, rows in higher]
    out = []
    for h in found:
        h = np.array(h)
        ok = True
        for s_op, t_op, k in checks:
            # t_op is indexed by the mixed-radix code of the image tuple
            img = _image_codes(h, S.size, T.size, k)
            if not np.array_equal(h[s_op], t_op[:, img]):
                ok = False
                break
        if ok:
            out.append(h)
    return out


def _op_table(m: Model, rows, k):
    """``(R, size**k)`` labels of every row applied to every argument tuple."""
    vecs = np.array(m.elements, dtype=np.int64)
    grids = np.meshgrid(*[np.arange(m.size)] * k, indexing="ij")
    idx = np.zeros((m.size ** k, vecs.shape[1]), dtype=np.int64)
    for g in grids:
        idx = idx * m.base + vecs[g.ravel()]
    keys = sorted(m.lookup)
    weights = m.base ** np.arange(vecs.shape[1] - 1, -1, -1, dtype=np.int64)
    codes = np.array([int(np.dot(key, weights)) for key in keys], dtype=np.int64)
    labels = np.array([m.lookup[key] for key in keys])
    order = np.argsort(codes)
    codes, labels = codes[order], labels[order]
    out = np.empty((len(rows), m.size ** k), dtype=np.int64)
    for r, row in enumerate(np.asarray(rows, dtype=np.int64)):
        res = row[idx] @ weights
        pos = np.searchsorted(codes, res)
        assert np.array_equal(codes[pos], res), "result left the universe"
        out[r] = labels[pos]
    return out


def _image_codes(h, n, nt, k):
    grids = np.meshgrid(*[np.arange(n)] * k, indexing="ij")
    code = np.zeros(n ** k, dtype=np.int64)
    for g in grids:
        code = code * nt + h[g.ravel()]
    return code


def homomorphism_oracle(tables):
    """Adapter for the ``oracle`` argument of the freeness suite."""
    return lambda src, tgt: homomorphisms_brute(src, tgt, tables)


# -- logic ----------------------------------------------------------------------

def naive_term(m: Model, registry, t, env):
    if isinstance(t, Var):
        return env[t.name]
    if isinstance(t, Const):
        return m.constant(t.value)
    assert isinstance(t, App)
    table = registry.tables[t.symbol]
    return m.apply(table.entries, *[naive_term(m, registry, a, env) for a in t.args])


def naive_holds(m: Model, registry, phi, env=None):
    env = dict(env or {})
    if isinstance(phi, Eq):
        return naive_term(m, registry, phi.left, env) == naive_term(m, registry, phi.right, env)
    if isinstance(phi, Not):
        return not naive_holds(m, registry, phi.body, env)
    if isinstance(phi, And):
        return all(naive_holds(m, registry, p, env) for p in phi.parts)
    if isinstance(phi, Or):
        return any(naive_holds(m, registry, p, env) for p in phi.parts)
    if isinstance(phi, (Forall, Exists)):
        vals = (naive_holds(m, registry, phi.body, {**env, phi.var: x}) for x in range(m.size))
        return all(vals) if isinstance(phi, Forall) else any(vals)
    raise TypeError(phi)


def subsets(n, k):
    return combinations(range(n), k)


def closure_vectors(base, seeds, tables):
    """Pointwise closure of a set of vectors in ``A^n`` (constants included).

    Works on raw tuples, so it does not depend on any algebra object.
    """
    seeds = [tuple(int(v) for v in s) for s in seeds]
    n = len(seeds[0]) if seeds else 1
    cur = set(seeds) | {(a,) * n for a in range(base)}
    while True:
        arr = np.array(sorted(cur), dtype=np.int64)
        new = set()
        for k, rows in tables.by_arity.items():
            rows = np.asarray(rows, dtype=np.uint8)
            grids = np.meshgrid(*[np.arange(len(arr))] * k, indexing="ij")
            idx = np.zeros((len(arr) ** k, n), dtype=np.int64)
            for g in grids:
                idx = idx * base + arr[g.ravel()]
            code = np.zeros((len(rows), len(idx)), dtype=np.int64)
            for j in range(n):
                code = code * base + rows[:, idx[:, j]]
            for c in np.unique(code).tolist():
                digits = []
                for _ in range(n):
                    digits.append(c % base)
                    c //= base
                new.add(tuple(reversed(digits)))
        if new <= cur:
            return cur
        cur |= new
