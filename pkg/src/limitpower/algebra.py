"""Finite algebras in the variety generated by the full clone on ``range(base)``.

Every algebra here is a quotient of a subpower: a sorted *universe* of
vectors in ``base**width`` closed under pointwise application of tables,
plus a carrier label per universe vector.  Carrier element ``k`` is the
class whose lexicographically least vector is ``vectors[reps[k]]``; carrier
indices follow that order.  Operations act on representatives pointwise and
read the label of the result, which covers powers, quotients and products
uniformly.
"""
from __future__ import annotations

import itertools
import math
from functools import cached_property

import numpy as np

from . import kernels
from .partitions import SetPartition
from .tables import FunctionTable, TableSet, standard_tables

MAX_CARRIER = 3 ** 9
MAX_CONGRUENCE_CARRIER = 4096
# rows of (table, tuple) results evaluated per batch
_BATCH = 1 << 21
WORK_BUDGET = 1 << 27


class AlgebraError(ValueError):
    pass


class SizeCapError(AlgebraError):
    pass


class ClosureError(AlgebraError):
    """A pointwise result left the universe: the construction is not closed."""


class CongruenceError(AlgebraError):
    pass


class HomomorphismError(AlgebraError):
    pass


def _first_occurrence_labels(labels: np.ndarray) -> np.ndarray:
    _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first)] = np.arange(len(first))
    return rank[inv.ravel()]


def unique_rows(rows: np.ndarray) -> np.ndarray:
    """Distinct rows of a nonnegative integer matrix, in lexicographic order."""
    top = int(rows.max()) if rows.size else 0
    dtype = np.uint8 if top < 256 else (np.uint16 if top < 65536 else np.uint32)
    packed = np.ascontiguousarray(rows.astype(dtype)).byteswap() if dtype != np.uint8 else np.ascontiguousarray(rows.astype(dtype))
    void = packed.view(np.dtype((np.void, packed.shape[1] * packed.itemsize))).ravel()
    _, first = np.unique(void, return_index=True)
    return rows[first]


def argument_tuples(n: int, k: int, cost: int, rng, max_tuples: int = 1 << 16,
                    budget: int = WORK_BUDGET) -> np.ndarray:
    """All ``k``-tuples over ``range(n)`` as a ``(k, N)`` array, or a seeded sample.

    ``cost`` is the work per tuple; the exhaustive grid is used when it has at
    most ``max_tuples`` tuples and fits in ``budget``.
    """
    total = n ** k
    if total <= max_tuples and total * cost <= budget:
        return np.indices((n,) * k).reshape(k, -1)
    m = max(64, min(max_tuples, budget // max(1, cost)))
    return rng.integers(0, n, size=(k, m))


def compact(values: np.ndarray, bound: int) -> np.ndarray:
    """``values`` (all below ``bound``) in the smallest unsigned dtype."""
    dtype = np.uint8 if bound <= 1 << 8 else np.uint16 if bound <= 1 << 16 else np.int64
    return np.asarray(values).astype(dtype, copy=False)


def encode(vectors: np.ndarray, base: int) -> np.ndarray:
    m = vectors.shape[1]
    weights = base ** np.arange(m - 1, -1, -1, dtype=np.int64)
    return vectors.astype(np.int64) @ weights


class VarietyAlgebra:
    def __init__(self, base: int, vectors, labels=None, provenance: str = "omega", info: dict | None = None):
        vectors = np.ascontiguousarray(vectors, dtype=np.uint8)
        if vectors.ndim != 2 or len(vectors) == 0:
            raise AlgebraError("universe must be a nonempty 2-d array")
        if vectors.shape[1] and float(base) ** vectors.shape[1] >= 2 ** 62:
            raise SizeCapError("vectors too wide to encode")
        self.base = base
        self.vectors = vectors
        self.codes = encode(vectors, base)
        if np.any(np.diff(self.codes) <= 0):
            raise AlgebraError("universe must be sorted and duplicate-free")
        if labels is None:
            labels = np.arange(len(vectors))
        self.labels = _first_occurrence_labels(np.asarray(labels))
        self.reps = np.flatnonzero(self._first_flags())
        if len(self.reps) > MAX_CARRIER:
            raise SizeCapError(f"carrier of {len(self.reps)} exceeds cap {MAX_CARRIER}")
        self.provenance = provenance
        self.info = dict(info or {})
        self._trans_cache: dict[int, np.ndarray] = {}
        self._op_cache: dict = {}

    def _first_flags(self):
        flags = np.zeros(len(self.labels), dtype=bool)
        _, first = np.unique(self.labels, return_index=True)
        flags[first] = True
        return flags

    @property
    def size(self) -> int:
        return len(self.reps)

    def __len__(self):
        return self.size

    @property
    def width(self) -> int:
        return self.vectors.shape[1]

    @cached_property
    def rep_vectors(self) -> np.ndarray:
        return np.ascontiguousarray(self.vectors[self.reps])

    def element(self, k: int) -> tuple[int, ...]:
        return tuple(int(v) for v in self.rep_vectors[k])

    def index_many(self, vectors) -> np.ndarray:
        vectors = np.atleast_2d(np.asarray(vectors))
        codes = encode(vectors, self.base)
        pos = np.searchsorted(self.codes, codes)
        pos_c = np.minimum(pos, len(self.codes) - 1)
        if np.any((pos >= len(self.codes)) | (self.codes[pos_c] != codes)):
            raise ClosureError("vector outside the universe")
        return self.labels[pos_c]

    def index(self, vector) -> int:
        return int(self.index_many([vector])[0])

    @cached_property
    def constants(self) -> np.ndarray:
        """Carrier index of each named constant."""
        return self.index_many(np.repeat(np.arange(self.base, dtype=np.uint8)[:, None], self.width, axis=1))

    def constant(self, a: int) -> int:
        return int(self.constants[a])

    def apply_batch(self, entries: np.ndarray, args) -> np.ndarray:
        """Apply each table row of ``entries`` to each argument tuple.

        ``args`` has shape ``(k, N)`` (carrier indices); the result has shape
        ``(T, N)``.
        """
        entries = np.ascontiguousarray(entries, dtype=np.uint8)
        if entries.ndim == 1:
            entries = entries[None, :]
        args = np.asarray(args, dtype=np.int64)
        if args.ndim == 1:
            args = args[:, None]
        k = args.shape[0]
        if entries.shape[1] != self.base ** k:
            raise AlgebraError(f"table width {entries.shape[1]} does not match arity {k}")
        N = args.shape[1]
        idx = np.zeros((N, self.width), dtype=np.int64)
        R = self.rep_vectors.astype(np.int64)
        for j in range(k):
            idx = idx * self.base + R[args[j]]
        out = np.empty((len(entries), N), dtype=np.int64)
        step = max(1, _BATCH // max(1, N * max(1, self.width)))
        for t0 in range(0, len(entries), step):
            out[t0:t0 + step] = kernels.apply_tables(entries[t0:t0 + step], idx, self.base, self.codes, self.labels)
        if np.any(out < 0):
            raise ClosureError(f"{self.provenance} algebra is not closed under the applied tables")
        return out

    def apply(self, table: FunctionTable, *args):
        """Apply one table; arguments may be ints or equal-length index arrays."""
        if table.base != self.base:
            raise AlgebraError("table over a different base")
        if len(args) != table.arity:
            raise AlgebraError(f"table of arity {table.arity} given {len(args)} arguments")
        scalar = all(np.ndim(a) == 0 for a in args)
        if table.arity == 0:
            return self.constant(table.entries[0])
        cols = np.broadcast_arrays(*[np.asarray(a, dtype=np.int64) for a in args])
        shape = cols[0].shape
        res = self.apply_batch(table.array, np.stack([c.ravel() for c in cols]))[0].reshape(shape)
        return int(res) if scalar else res

    def translations(self, tables: TableSet | None = None) -> np.ndarray:
        """Distinct basic translations ``x -> t(h.., x, ..h)`` as rows over the carrier."""
        tables = tables or standard_tables(self.base)
        key = id(tables)
        if key not in self._trans_cache:
            self._trans_cache[key] = _translations(self, tables)
        return self._trans_cache[key]

    def _sample_results(self, tables: TableSet, k: int, max_tuples: int, seed: int, budget: int, width: int):
        key = (id(tables), k, max_tuples, seed, budget, width)
        hit = self._op_cache.get(key)
        if hit is None or hit[0] is not tables:
            rng = np.random.default_rng(seed + k)
            entries = tables.by_arity[k]
            args = argument_tuples(self.size, k, len(entries) * width, rng, max_tuples, budget)
            hit = (tables, args, compact(self.apply_batch(entries, args), self.size))
            self._op_cache[key] = hit
        return hit[1], hit[2]

    def _full_operation(self, tables: TableSet, k: int, limit: int = 1 << 22):
        """``(T, size**k)`` results of every table, or None when too large."""
        entries = tables.by_arity[k]
        if self.size ** k * len(entries) > limit:
            return None
        key = ("full", id(tables), k)
        hit = self._op_cache.get(key)
        if hit is None or hit[0] is not tables:
            hit = (tables, compact(self.operation(entries, k), self.size))
            self._op_cache[key] = hit
        return hit[1]

    def operation(self, entries: np.ndarray, arity: int) -> np.ndarray:
        """Full operation table (``n**k`` entries) for each row of ``entries``."""
        k = arity
        grid = np.indices((self.size,) * k).reshape(k, -1)
        return self.apply_batch(entries, grid)

    def to_json(self) -> dict:
        out = {"base": self.base, "provenance": self.provenance}
        out.update(self.info)
        return out

    def describe(self) -> dict:
        out = self.to_json()
        out["size"] = self.size
        out["carrier"] = [list(self.element(k)) for k in range(min(self.size, 64))]
        return out

    def __repr__(self):
        return f"<{type(self).__name__} {self.provenance} base={self.base} size={self.size} width={self.width}>"


def _translations(alg: VarietyAlgebra, tables: TableSet) -> np.ndarray:
    n = alg.size
    found = [np.arange(n, dtype=np.int32)[None, :]]
    for k, entries in tables.by_arity.items():
        slots = [0] if tables.symmetric else range(k)
        params = list(itertools.product(range(n), repeat=k - 1))
        per = max(1, _BATCH // max(1, len(entries) * n))
        for slot in slots:
            for p0 in range(0, len(params), per):
                chunk = params[p0:p0 + per]
                args = np.empty((k, len(chunk) * n), dtype=np.int64)
                x = np.tile(np.arange(n), len(chunk))
                others = np.repeat(np.array(chunk, dtype=np.int64).reshape(len(chunk), k - 1), n, axis=0)
                col = 0
                for j in range(k):
                    if j == slot:
                        args[j] = x
                    else:
                        args[j] = others[:, col]
                        col += 1
                res = alg.apply_batch(entries, args).reshape(-1, n).astype(np.int32)
                found.append(unique_rows(res))
    allrows = unique_rows(np.concatenate(found))
    return np.ascontiguousarray(allrows, dtype=np.int32)


# -- constructions ---------------------------------------------------------

def omega(base: int) -> VarietyAlgebra:
    """The full clone on ``range(base)`` itself."""
    return VarietyAlgebra(base, np.arange(base, dtype=np.uint8)[:, None], provenance="omega")


def trivial_algebra(base: int) -> VarietyAlgebra:
    return VarietyAlgebra(base, np.arange(base, dtype=np.uint8)[:, None], labels=np.zeros(base),
                          provenance="quotient", info={"of": {"base": base, "provenance": "omega"}, "partition": [list(range(base))]})


def direct_product(alg1: VarietyAlgebra, alg2: VarietyAlgebra) -> VarietyAlgebra:
    if alg1.base != alg2.base:
        raise AlgebraError("factors over different bases")
    U1, U2 = len(alg1.vectors), len(alg2.vectors)
    if U1 * U2 > 1 << 22:
        raise SizeCapError("product universe too large")
    vectors = np.concatenate([np.repeat(alg1.vectors, U2, axis=0), np.tile(alg2.vectors, (U1, 1))], axis=1)
    labels = (alg1.labels[:, None] * alg2.size + alg2.labels[None, :]).ravel()
    return VarietyAlgebra(alg1.base, vectors, labels, provenance="product",
                          info={"factors": [alg1.to_json(), alg2.to_json()]})


def subalgebra(alg: VarietyAlgebra, subset) -> tuple[VarietyAlgebra, np.ndarray]:
    """The subalgebra on ``subset`` and the inclusion map as carrier indices."""
    subset = np.unique(np.asarray(subset, dtype=np.int64))
    keep = np.isin(alg.labels, subset)
    sub = VarietyAlgebra(alg.base, alg.vectors[keep], alg.labels[keep], provenance="subalgebra",
                         info={"of": alg.to_json(), "subset": subset.tolist()})
    inclusion = alg.labels[keep][sub.reps]
    return sub, inclusion


class Congruence:
    def __init__(self, parent: VarietyAlgebra, partition: SetPartition | np.ndarray):
        if not isinstance(partition, SetPartition):
            partition = SetPartition(np.asarray(partition).tolist())
        if partition.n != parent.size:
            raise CongruenceError("partition is not on the carrier")
        self.parent = parent
        self.partition = partition

    @cached_property
    def labels(self) -> np.ndarray:
        return np.asarray(self.partition.labels, dtype=np.int64)

    def relates(self, x: int, y: int) -> bool:
        return self.partition.same_block(x, y)

    @property
    def is_diagonal(self) -> bool:
        return len(self.partition) == self.parent.size

    @property
    def is_full(self) -> bool:
        return len(self.partition) == 1

    def __le__(self, other: "Congruence") -> bool:
        return self.partition <= other.partition

    def __eq__(self, other):
        return isinstance(other, Congruence) and self.parent is other.parent and self.partition == other.partition

    def __hash__(self):
        return hash(self.partition)

    def __repr__(self):
        return f"Congruence({len(self.partition)} classes on {self.parent.size})"


def diagonal(alg: VarietyAlgebra) -> Congruence:
    return Congruence(alg, SetPartition.discrete(alg.size))


def full_congruence(alg: VarietyAlgebra) -> Congruence:
    return Congruence(alg, SetPartition.indiscrete(alg.size))


def is_compatible(alg: VarietyAlgebra, labels, tables: TableSet | None = None) -> bool:
    """Whether the equivalence with these carrier labels is a congruence."""
    labels = np.asarray(labels, dtype=np.int64)
    trans = alg.translations(tables)
    img = labels[trans]
    _, first = np.unique(labels, return_index=True)
    lead = first[np.searchsorted(np.unique(labels), labels)]
    return bool(np.all(img == img[:, lead]))


def congruence_generated(alg: VarietyAlgebra, pairs, tables: TableSet | None = None) -> Congruence:
    labels = np.arange(alg.size)
    part = SetPartition(labels)
    if len(pairs):
        uf = list(range(alg.size))

        def find(x):
            while uf[x] != x:
                uf[x] = uf[uf[x]]
                x = uf[x]
            return x

        for x, y in pairs:
            uf[find(y)] = find(x)
        part = SetPartition([find(x) for x in range(alg.size)])
    closed = kernels.congruence_closure(alg.translations(tables), np.asarray(part.labels, dtype=np.int32))
    return Congruence(alg, SetPartition(closed.tolist()))


def congruence_lattice(alg: VarietyAlgebra, tables: TableSet | None = None,
                       cap: int = MAX_CONGRUENCE_CARRIER) -> list[Congruence]:
    """All congruences, finest first, as joins of principal congruences."""
    n = alg.size
    if n > cap:
        raise SizeCapError(f"carrier of {n} exceeds congruence cap {cap}")
    found = {tuple(range(n))}
    if n > 1:
        prin = kernels.principal_congruences(alg.translations(tables))
        found.update(tuple(r) for r in unique_rows(prin).tolist())
    parts = {SetPartition(t) for t in found}
    frontier = set(parts)
    while frontier:
        new = set()
        for P in frontier:
            for Q in parts:
                J = P | Q
                if J not in parts:
                    new.add(J)
        parts |= new
        frontier = new
    ordered = sorted(parts, key=lambda P: (-len(P), P.labels))
    return [Congruence(alg, P) for P in ordered]


def quotient_algebra(alg: VarietyAlgebra, theta: Congruence, tables: TableSet | None = None,
                     check: bool = True) -> VarietyAlgebra:
    if theta.parent is not alg:
        raise CongruenceError("congruence belongs to another algebra")
    if check and not is_compatible(alg, theta.labels, tables):
        raise CongruenceError("partition is not compatible with the operations")
    return VarietyAlgebra(alg.base, alg.vectors, theta.labels[alg.labels], provenance="quotient",
                          info={"of": alg.to_json(), "partition": theta.partition.to_json()})


def relation_matrix(labels) -> np.ndarray:
    labels = np.asarray(labels)
    return labels[:, None] == labels[None, :]


def compose(theta1: Congruence, theta2: Congruence) -> np.ndarray:
    """Relational composition as a boolean matrix."""
    a = relation_matrix(theta1.labels).astype(np.int32)
    b = relation_matrix(theta2.labels).astype(np.int32)
    return (a @ b) > 0


def permute(theta1: Congruence, theta2: Congruence) -> bool:
    return bool(np.array_equal(compose(theta1, theta2), compose(theta2, theta1)))


def congruences_permute(alg: VarietyAlgebra, cons: list[Congruence] | None = None,
                        tables: TableSet | None = None) -> bool:
    cons = cons if cons is not None else congruence_lattice(alg, tables)
    return all(permute(s, t) for s, t in itertools.combinations(cons, 2))


def factor_pairs(cons: list[Congruence]) -> list[tuple[Congruence, Congruence]]:
    """Pairs of proper congruences meeting in the diagonal, joining to the top and permuting."""
    out = []
    for s, t in itertools.combinations(cons, 2):
        if s.is_full or t.is_full:
            continue
        if len(s.partition & t.partition) == s.parent.size and len(s.partition | t.partition) == 1 and permute(s, t):
            out.append((s, t))
    return out


def classify(alg: VarietyAlgebra, tables: TableSet | None = None,
             cons: list[Congruence] | None = None) -> dict[str, bool]:
    """Simple / subdirectly irreducible / directly indecomposable flags.

    A one-element algebra gets all three flags false.
    """
    if alg.size <= 1:
        return {"simple": False, "subdirectly_irreducible": False, "directly_indecomposable": False}
    cons = cons if cons is not None else congruence_lattice(alg, tables)
    nontrivial = [c for c in cons if not c.is_diagonal]
    minimal = [c for c in nontrivial if not any(d != c and d <= c for d in nontrivial)]
    return {
        "simple": len(cons) == 2,
        "subdirectly_irreducible": len(minimal) == 1,
        "directly_indecomposable": not factor_pairs(cons),
    }


class Homomorphism:
    def __init__(self, source: VarietyAlgebra, target: VarietyAlgebra, mapping, name: str = ""):
        mapping = np.asarray(mapping, dtype=np.int64)
        if mapping.shape != (source.size,):
            raise HomomorphismError("map must be total on the source carrier")
        if np.any((mapping < 0) | (mapping >= target.size)):
            raise HomomorphismError("map leaves the target carrier")
        if source.base != target.base:
            raise HomomorphismError("source and target over different bases")
        self.source = source
        self.target = target
        self.mapping = mapping
        self.name = name

    def __call__(self, x):
        return self.mapping[x]

    def violations(self, tables: TableSet | None = None, max_tuples: int = 1 << 16, seed: int = 0,
                   budget: int = WORK_BUDGET, stop_early: bool = False) -> int:
        """Number of (table, tuple) pairs where the map fails to commute.

        Tuples are exhaustive when that fits (see ``argument_tuples``),
        otherwise a seeded sample.  Source results are cached per table set,
        and small targets use their full operation tables.
        """
        tables = tables or standard_tables(self.source.base)
        bad = int(np.sum(self.mapping[self.source.constants] != self.target.constants))
        if bad and stop_early:
            return bad
        for k, entries in tables.by_arity.items():
            args, res = self.source._sample_results(tables, k, max_tuples, seed, budget,
                                                    max(self.source.width, self.target.width))
            small = compact(self.mapping, self.target.size)
            lhs = np.take(small, res)
            mapped = self.mapping[args]
            full = self.target._full_operation(tables, k)
            if full is not None:
                flat = np.zeros(mapped.shape[1], dtype=np.int64)
                for j in range(k):
                    flat = flat * self.target.size + mapped[j]
                rhs = np.take(full, flat, axis=1)
            else:
                rhs = compact(self.target.apply_batch(entries, mapped), self.target.size)
            bad += int(np.count_nonzero(lhs != rhs))
            if bad and stop_early:
                return bad
        return bad

    def is_homomorphism(self, tables: TableSet | None = None, **kw) -> bool:
        kw.setdefault("stop_early", True)
        return self.violations(tables, **kw) == 0

    def verify(self, tables: TableSet | None = None, **kw) -> "Homomorphism":
        bad = self.violations(tables, **kw)
        if bad:
            raise HomomorphismError(f"{self.name or 'map'} fails to commute in {bad} places")
        return self

    @property
    def injective(self) -> bool:
        return len(np.unique(self.mapping)) == self.source.size

    @property
    def surjective(self) -> bool:
        return len(np.unique(self.mapping)) == self.target.size

    def is_isomorphism(self, tables: TableSet | None = None) -> bool:
        return self.injective and self.surjective and self.is_homomorphism(tables)

    def image(self) -> np.ndarray:
        return np.unique(self.mapping)

    def kernel(self) -> Congruence:
        return Congruence(self.source, SetPartition(self.mapping.tolist()))

    def then(self, other: "Homomorphism") -> "Homomorphism":
        if other.source is not self.target:
            raise HomomorphismError("maps do not compose")
        return Homomorphism(self.source, other.target, other.mapping[self.mapping])

    def __eq__(self, other):
        return isinstance(other, Homomorphism) and np.array_equal(self.mapping, other.mapping)

    def __repr__(self):
        return f"Homomorphism({self.source!r} -> {self.target!r})"


def identity(alg: VarietyAlgebra) -> Homomorphism:
    return Homomorphism(alg, alg, np.arange(alg.size))


def canonical_embedding(alg: VarietyAlgebra, tables: TableSet | None = None) -> Homomorphism:
    """The map ``a -> a^L`` from the full clone into ``alg``, checked to be a homomorphism."""
    e = Homomorphism(omega(alg.base), alg, alg.constants, name="e")
    return e.verify(tables)


def _fresh_tuples(old: np.ndarray, new: np.ndarray, cur: np.ndarray, k: int, chunk: int):
    """Chunks of ``k``-tuples over ``cur`` with at least one entry in ``new``.

    Each tuple appears once: split by the position of its first new entry.
    """
    for j in range(k):
        sets = [old] * j + [new] + [cur] * (k - j - 1)
        shape = tuple(len(x) for x in sets)
        total = int(np.prod(shape, dtype=np.int64))
        for a in range(0, total, chunk):
            flat = np.arange(a, min(total, a + chunk))
            coords = np.unravel_index(flat, shape)
            yield np.stack([sets[i][coords[i]] for i in range(k)])


def generate_subalgebra(alg: VarietyAlgebra, S, tables: TableSet | None = None,
                        record: bool = False, budget: int = WORK_BUDGET):
    """Least subset containing ``S`` and all constants, closed under ``tables``.

    With ``record=True`` also returns a derivation for every element not in
    the seed: ``{x: (arity, row, args)}``.
    """
    tables = tables or standard_tables(alg.base)
    seeds = [int(s) for s in S]
    have = np.zeros(alg.size, dtype=bool)
    have[seeds] = True
    derivations: dict[int, tuple] = {}
    for a, c in enumerate(alg.constants.tolist()):
        if not have[c]:
            have[c] = True
            derivations.setdefault(c, (0, a, ()))
    new = np.flatnonzero(have)
    old = np.zeros(0, dtype=np.int64)
    while len(new) and not have.all():
        cur = np.flatnonzero(have)
        fresh: list[int] = []
        for k, entries in tables.by_arity.items():
            chunk = max(1, min(1 << 16, budget // (len(entries) * max(1, alg.width))))
            for grid in _fresh_tuples(old, new, cur, k, chunk):
                res = alg.apply_batch(entries, grid)
                vals = np.unique(res)
                vals = vals[~have[vals]]
                if len(vals) == 0:
                    continue
                if record:
                    for v in vals.tolist():
                        t, s = np.argwhere(res == v)[0]
                        derivations[v] = (k, int(t), tuple(int(a) for a in grid[:, s]))
                have[vals] = True
                fresh.extend(vals.tolist())
                if have.all():
                    break
            if have.all():
                break
        old = cur
        new = np.array(sorted(fresh), dtype=np.int64)
    out = np.flatnonzero(have)
    return (out, derivations) if record else out


def single_generator(alg: VarietyAlgebra, tables: TableSet | None = None) -> int | None:
    """Least carrier element generating the whole algebra, if any."""
    for x in range(alg.size):
        if len(generate_subalgebra(alg, [x], tables)) == alg.size:
            return x
    return None


def minimal_generating_set(alg: VarietyAlgebra, tables: TableSet | None = None, search_limit: int = 4096) -> list[int]:
    """Smallest generating set when an exhaustive search is affordable.

    Subsets are tried by size and then lexicographically while there are at
    most ``search_limit`` of a size; after that the least element not yet
    generated is added greedily.
    """
    have = generate_subalgebra(alg, [], tables)
    if len(have) == alg.size:
        return []
    k = 1
    while math.comb(alg.size, k) <= search_limit:
        for combo in itertools.combinations(range(alg.size), k):
            if len(generate_subalgebra(alg, combo, tables)) == alg.size:
                return list(combo)
        k += 1
    gens: list[int] = []
    while len(have) < alg.size:
        missing = np.setdiff1d(np.arange(alg.size), have)
        gens.append(int(missing[0]))
        have = generate_subalgebra(alg, gens, tables)
    return gens


def _extend(alg1: VarietyAlgebra, alg2: VarietyAlgebra, gens, images, deriv, order, tables) -> np.ndarray | None:
    m = np.full(alg1.size, -1, dtype=np.int64)
    m[gens] = images
    for x in order:
        k, row, args = deriv[x]
        if k == 0:
            val = alg2.constant(row)
        else:
            val = int(alg2.apply_batch(tables.by_arity[k][row], m[list(args)][:, None])[0, 0])
        if m[x] >= 0 and m[x] != val:
            return None
        m[x] = val
    return None if np.any(m < 0) else m


def enumerate_homomorphisms(alg1: VarietyAlgebra, alg2: VarietyAlgebra,
                            tables: TableSet | None = None) -> list[Homomorphism]:
    """Every homomorphism ``alg1 -> alg2``: images of a generating set, extended and checked."""
    tables = tables or standard_tables(alg1.base)
    gens = minimal_generating_set(alg1, tables)
    _, deriv = generate_subalgebra(alg1, gens, tables, record=True)
    order = sorted(deriv, key=lambda x: _depth(x, deriv, set(gens)))
    out = []
    for images in itertools.product(range(alg2.size), repeat=len(gens)):
        m = _extend(alg1, alg2, gens, images, deriv, order, tables)
        if m is not None:
            h = Homomorphism(alg1, alg2, m)
            if h.is_homomorphism(tables):
                out.append(h)
    return out


def find_isomorphism(alg1: VarietyAlgebra, alg2: VarietyAlgebra,
                     tables: TableSet | None = None) -> Homomorphism | None:
    """Backtracking over generator images; constants are fixed by necessity.

    Each candidate image of the generating set is extended along recorded
    derivations and then checked to be a bijective homomorphism.
    """
    if alg1.size != alg2.size or alg1.base != alg2.base:
        return None
    tables = tables or standard_tables(alg1.base)
    gens = minimal_generating_set(alg1, tables)
    _, deriv = generate_subalgebra(alg1, gens, tables, record=True)
    order = sorted(deriv, key=lambda x: _depth(x, deriv, set(gens)))
    for images in itertools.product(range(alg2.size), repeat=len(gens)):
        m = _extend(alg1, alg2, gens, images, deriv, order, tables)
        if m is None:
            continue
        h = Homomorphism(alg1, alg2, m)
        if h.injective and h.is_homomorphism(tables):
            return h
    return None


def _depth(x, deriv, gens, memo=None):
    memo = {} if memo is None else memo
    if x in gens or x not in deriv:
        return 0
    if x not in memo:
        memo[x] = 1 + max((_depth(a, deriv, gens, memo) for a in deriv[x][2]), default=0)
    return memo[x]


def first_isomorphism(h: Homomorphism, tables: TableSet | None = None) -> Homomorphism:
    """``source / ker(h)`` onto the image of ``h``, verified as an isomorphism."""
    q = quotient_algebra(h.source, h.kernel(), tables)
    img, inclusion = subalgebra(h.target, h.image())
    # class k of the quotient is represented by source element reps of that class
    src_rep = h.source.labels[q.reps]
    into_target = h.mapping[src_rep]
    position = np.searchsorted(inclusion, into_target)
    iso = Homomorphism(q, img, position, name="first isomorphism")
    if not iso.is_isomorphism(tables):
        raise HomomorphismError("quotient by the kernel is not isomorphic to the image")
    return iso


def factorization_map(alg: VarietyAlgebra, theta1: Congruence, theta2: Congruence,
                      tables: TableSet | None = None) -> Homomorphism:
    """``x -> ([x]_1, [x]_2)`` into the product of the two quotients."""
    q1 = quotient_algebra(alg, theta1, tables)
    q2 = quotient_algebra(alg, theta2, tables)
    prod = direct_product(q1, q2)
    c1 = q1.labels[alg.reps]
    c2 = q2.labels[alg.reps]
    return Homomorphism(alg, prod, c1 * q2.size + c2, name="factorization")
