"""Clone powers, limit reduced powers and free algebras of the full clone.

``Ω(A)^F`` is the subpower of all ``f: I -> A`` whose kernel lies in the
partition filter ``F``.  Its congruences correspond to filters ``Z`` on the
block Boolean algebra of ``F`` (``f ~ g`` iff they agree on a member of
``Z``), and the quotients are the limit reduced powers.

The free algebra on ``k`` generators is ``Ω(A)^P`` over the index set
``A^k``; it is materialised only when it fits under the carrier cap.
Quotients of it by ``Z`` are represented by restriction to the generator of
``Z``, which works without materialising the free algebra at all.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import product

import numpy as np

from .algebra import (
    MAX_CARRIER,
    AlgebraError,
    Congruence,
    Homomorphism,
    SizeCapError,
    VarietyAlgebra,
    argument_tuples,
    generate_subalgebra,
    subalgebra,
)
from .partitions import (
    BAFilter,
    BlockBooleanAlgebra,
    PartitionFilter,
    SetPartition,
    block_boolean_algebra,
    coarsenings,
    kernel_partition,
    mask_of,
    members_of,
    meet,
)
from .tables import TableSet, standard_tables


class PreconditionError(ValueError):
    pass


class RoundTripError(AlgebraError):
    pass


def power_vectors(base: int, n: int) -> np.ndarray:
    """All of ``A^n`` in lexicographic order, one vector per row."""
    if float(base) ** n > 1 << 24:
        raise SizeCapError(f"{base}^{n} vectors is too many")
    return np.ascontiguousarray(np.indices((base,) * n, dtype=np.uint8).reshape(n, -1).T)


def _constant_on_blocks(vectors: np.ndarray, P: SetPartition) -> np.ndarray:
    ok = np.ones(len(vectors), dtype=bool)
    for block in P.blocks:
        ok &= np.all(vectors[:, block] == vectors[:, [block[0]]], axis=1)
    return ok


class ClonePower(VarietyAlgebra):
    """``Ω(A)^F``: the functions ``I -> A`` with kernel in ``F``."""

    def __init__(self, base: int, F: PartitionFilter, provenance: str = "clone_power"):
        vectors = power_vectors(base, F.ground)
        # kernel in F  <=>  the filter base refines the kernel
        vectors = vectors[_constant_on_blocks(vectors, F.base)]
        info = {"index": F.ground, "filter": F.to_json()}
        super().__init__(base, vectors, provenance=provenance, info=info)
        self.F = F

    @property
    def index_size(self) -> int:
        return self.F.ground

    @cached_property
    def ba(self) -> BlockBooleanAlgebra:
        return block_boolean_algebra(self.F)

    def kernel_of(self, k: int) -> SetPartition:
        return kernel_partition(self.element(k))


def check_closed(alg: VarietyAlgebra, tables: TableSet | None = None, max_tuples: int = 1 << 16, seed: int = 0) -> None:
    """Apply every table to every tuple (or a seeded sample); raises ClosureError."""
    tables = tables or standard_tables(alg.base)
    rng = np.random.default_rng(seed)
    n = alg.size
    for k, entries in tables.by_arity.items():
        alg.apply_batch(entries, argument_tuples(n, k, len(entries) * alg.width, rng, max_tuples))


def build_clone_power(base: int, F: PartitionFilter, tables: TableSet | None = None, verify: bool = True) -> ClonePower:
    cp = ClonePower(base, F)
    if verify:
        check_closed(cp, tables)
    return cp


def full_power(base: int, n: int) -> ClonePower:
    """``Ω(A)^I`` (the filter is all of ``Π(I)``)."""
    return ClonePower(base, PartitionFilter(n, [SetPartition.discrete(n)]))


# -- subalgebras and filters --------------------------------------------------

def pair_encode(f, g, base: int) -> tuple[int, ...]:
    """Pointwise injective code of ``(f(i), g(i))``; kernel is the meet of the kernels.

    Fails when more than ``base`` distinct pairs are realised.
    """
    codes: dict = {}
    out = []
    for p in zip(f, g):
        if p not in codes:
            codes[p] = len(codes)
        out.append(codes[p])
    if len(codes) > base:
        raise PreconditionError(f"{len(codes)} realised pairs cannot be coded injectively into {base} values")
    return tuple(out)


def _require_room(base: int, n: int) -> None:
    if base < n:
        raise PreconditionError(f"needs |A| >= |I| (got |A|={base}, |I|={n})")


def subalgebra_to_filter(power: ClonePower, B, tables: TableSet | None = None) -> PartitionFilter:
    """The filter ``F`` with ``B = {f | Π(f) in F}`` for a subalgebra ``B`` of ``Ω(A)^I``.

    Checks on the way: ``B`` is closed and holds the constants, the kernels
    are meet-closed (via pairing) and upward closed (via relabelling), and
    the final round trip is exact.
    """
    base, n = power.base, power.index_size
    _require_room(base, n)
    B = np.unique(np.asarray(B, dtype=np.int64))
    inB = np.zeros(power.size, dtype=bool)
    inB[B] = True
    if not inB[power.constants].all():
        raise PreconditionError("B does not contain the constants")
    tables = tables or standard_tables(base)
    for k, entries in tables.by_arity.items():
        grid = B[np.indices((len(B),) * k).reshape(k, -1)]
        if not inB[power.apply_batch(entries, grid)].all():
            raise PreconditionError("B is not closed under the table set")

    by_kernel: dict[SetPartition, int] = {}
    for x in B.tolist():
        by_kernel.setdefault(power.kernel_of(x), x)
    kernels_ = list(by_kernel)
    for P in kernels_:
        f = power.element(by_kernel[P])
        for Q in kernels_:
            h = pair_encode(f, power.element(by_kernel[Q]), base)
            if not inB[power.index(h)] or kernel_partition(h) != meet(P, Q):
                raise RoundTripError("kernels of B are not closed under meets")
        for R in set(coarsenings(P)):
            relabel = {}
            g = tuple(relabel.setdefault(R.labels[i], len(relabel)) for i in range(n))
            if not inB[power.index(g)]:
                raise RoundTripError("kernels of B are not upward closed")

    F = PartitionFilter(n, kernels_)
    rebuilt = _constant_on_blocks(power.rep_vectors, F.base)
    if not np.array_equal(rebuilt, inB):
        raise RoundTripError("B differs from {f | Π(f) in F}")
    return F


def membership_by_filter(power: ClonePower, S, g) -> bool:
    """Whether ``g`` lies in the subalgebra generated by ``S``, by kernels alone."""
    _require_room(power.base, power.index_size)
    n = power.index_size
    M = SetPartition.indiscrete(n)
    for s in S:
        M = meet(M, kernel_partition(power.element(int(s)) if np.ndim(s) == 0 else tuple(s)))
    return M <= kernel_partition(tuple(g))


# -- congruences and Z filters ------------------------------------------------

def _restriction_codes(vectors: np.ndarray, mask: int, base: int) -> np.ndarray:
    cols = members_of(mask)
    if not cols:
        return np.zeros(len(vectors), dtype=np.int64)
    sub = vectors[:, cols].astype(np.int64)
    weights = base ** np.arange(len(cols) - 1, -1, -1, dtype=np.int64)
    return sub @ weights


def congruence_to_Zfilter(cp: ClonePower, theta: Congruence) -> BAFilter:
    """``R in Z`` iff any two members agreeing on ``R`` are ``theta``-related."""
    _require_room(cp.base, cp.index_size)
    if theta.parent is not cp:
        raise PreconditionError("congruence belongs to another algebra")
    V = cp.rep_vectors
    lab = theta.labels
    members = []
    for R in cp.ba.elements:
        key = _restriction_codes(V, R, cp.base)
        pairs = np.unique(np.stack([key, lab], axis=1), axis=0)
        if len(np.unique(pairs[:, 0])) == len(pairs):
            members.append(R)
    return BAFilter.from_members(cp.ba, members)


def Zfilter_to_congruence(cp: ClonePower, Z: BAFilter) -> Congruence:
    """``f ~ g`` iff ``{i | f(i) = g(i)}`` lies in ``Z``.

    ``Z`` is principal, so this is agreement on its generator.
    """
    if Z.parent != cp.ba:
        raise PreconditionError("Z is not a filter on the block algebra of this clone power")
    key = _restriction_codes(cp.rep_vectors, Z.generator, cp.base)
    return Congruence(cp, SetPartition(key.tolist()))


def agreement_set(f, g) -> int:
    return mask_of(i for i, (a, b) in enumerate(zip(f, g)) if a == b)


class LimitReducedPower(VarietyAlgebra):
    """``Ω(A)^F / Z``; ``ultra`` mirrors ``Z.ultra``."""

    base_power: VarietyAlgebra
    Z: BAFilter

    @property
    def ultra(self) -> bool:
        return self.Z.ultra


def limit_reduced_power(cp: ClonePower, Z: BAFilter) -> LimitReducedPower:
    theta = Zfilter_to_congruence(cp, Z)
    info = dict(cp.info)
    info["Z"] = Z.to_json()
    out = LimitReducedPower(cp.base, cp.vectors, theta.labels[cp.labels], provenance="limit_reduced_power", info=info)
    out.base_power = cp
    out.Z = Z
    return out


def reduced_power_set_filter(base: int, n: int, W) -> LimitReducedPower:
    """``Ω(A)^I / W`` for a filter ``W`` of subsets of ``I`` (given as member masks or a BAFilter)."""
    cp = full_power(base, n)
    if isinstance(W, BAFilter):
        W = W.members
    try:
        Z = BAFilter.from_members(cp.ba, [int(w) for w in W])
    except ValueError as exc:
        raise PreconditionError(f"W is not a filter on subsets of I: {exc}") from None
    return limit_reduced_power(cp, Z)


# -- the free algebra -------------------------------------------------------

class FreeAlgebra:
    """``F(A, k)``: functions ``A^k -> A`` whose kernel is in ``P(A, k)``.

    Elements are value vectors over the points of ``A^k`` in lexicographic
    order, which is exactly the row-major table of a ``k``-ary operation.
    """

    def __init__(self, base: int, gens: int):
        if gens < 0:
            raise PreconditionError("negative number of generators")
        self.base = base
        self.gens = gens
        self.points = power_vectors(base, gens) if gens else np.zeros((1, 0), dtype=np.uint8)
        self.npoints = len(self.points)

    @cached_property
    def projections(self) -> np.ndarray:
        """Row ``i`` is ``π_i``, the value vector ``x -> x[i]``."""
        return np.ascontiguousarray(self.points.T)

    @cached_property
    def filter(self) -> PartitionFilter:
        """``P(A, I)``, generated by the kernels of the projections."""
        if self.gens == 0:
            return PartitionFilter(self.npoints, [])
        return PartitionFilter(self.npoints, [kernel_partition(p.tolist()) for p in self.projections])

    @property
    def size(self) -> int:
        return self.base ** self.npoints

    @property
    def materializable(self) -> bool:
        return self.size <= MAX_CARRIER

    @cached_property
    def algebra(self) -> ClonePower:
        if not self.materializable:
            raise SizeCapError(f"F({self.base},{self.gens}) has {self.size} elements")
        cp = ClonePower(self.base, self.filter, provenance="free")
        cp.info = {"gens": self.gens}
        return cp

    @cached_property
    def projection_indices(self) -> list[int]:
        return [self.algebra.index(p) for p in self.projections]

    def constant(self, a: int) -> np.ndarray:
        return np.full(self.npoints, a, dtype=np.uint8)

    def to_json(self) -> dict:
        return {"base": self.base, "provenance": "free", "gens": self.gens}

    def __repr__(self):
        return f"FreeAlgebra(base={self.base}, gens={self.gens})"


def free_algebra(base: int, gens: int) -> FreeAlgebra:
    return FreeAlgebra(base, gens)


@dataclass(frozen=True)
class GeneratorAssignment:
    """``α: I -> L`` as carrier indices of ``target``."""

    target: VarietyAlgebra
    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if any(not 0 <= v < self.target.size for v in self.values):
            raise PreconditionError("assignment leaves the target carrier")

    @property
    def index_size(self) -> int:
        return len(self.values)

    def restrict(self, idx) -> "GeneratorAssignment":
        return GeneratorAssignment(self.target, tuple(self.values[i] for i in idx))


def evaluate(vectors: np.ndarray, alpha: GeneratorAssignment) -> np.ndarray:
    """``φ_α`` on free-algebra elements given as value vectors (rows)."""
    L = alpha.target
    vectors = np.atleast_2d(np.asarray(vectors, dtype=np.uint8))
    k = alpha.index_size
    if vectors.shape[1] != L.base ** k:
        raise PreconditionError("element is not a function on A^I for this assignment")
    if k == 0:
        return L.constants[vectors[:, 0]]
    return L.apply_batch(vectors, np.array(alpha.values, dtype=np.int64)[:, None])[:, 0]


class PhiMap:
    """``φ_α: F(A, I) -> L`` with ``π_i -> α(i)``."""

    def __init__(self, free: FreeAlgebra, alpha: GeneratorAssignment):
        if alpha.index_size != free.gens:
            raise PreconditionError("assignment size differs from the number of generators")
        if alpha.target.base != free.base:
            raise PreconditionError("target over a different base")
        self.free = free
        self.alpha = alpha

    def __call__(self, vectors) -> np.ndarray:
        return evaluate(vectors, self.alpha)

    def check_well_defined(self, vectors) -> None:
        """Re-evaluate under other term representations and compare.

        Representations tried: arguments reversed (table transposed to
        match) and a padded one with a dummy trailing argument.
        """
        vectors = np.atleast_2d(np.asarray(vectors, dtype=np.uint8))
        direct = self(vectors)
        a, k = self.free.base, self.free.gens
        if k == 0:
            return
        L = self.alpha.target
        grid = np.indices((a,) * k).reshape(k, -1)
        rev = vectors[:, np.ravel_multi_index(grid[::-1], (a,) * k)]
        other = L.apply_batch(rev, np.array(self.alpha.values[::-1], dtype=np.int64)[:, None])[:, 0]
        padded = np.repeat(vectors, a, axis=1)
        extra = L.apply_batch(padded, np.array(self.alpha.values + (self.alpha.values[0],), dtype=np.int64)[:, None])[:, 0]
        if not (np.array_equal(direct, other) and np.array_equal(direct, extra)):
            raise AlgebraError("φ_α depends on the representation: target is not in the variety")

    def homomorphism(self, tables: TableSet | None = None, verify: bool = True) -> Homomorphism:
        """As a carrier map from the materialised free algebra."""
        F = self.free.algebra
        vectors = F.rep_vectors
        self.check_well_defined(vectors)
        h = Homomorphism(F, self.alpha.target, self(vectors), name="φ_α")
        return h.verify(tables) if verify else h


def phi_alpha(free: FreeAlgebra, alpha: GeneratorAssignment) -> PhiMap:
    return PhiMap(free, alpha)


class FreeQuotient(LimitReducedPower):
    """``F(A, I)/Z`` with ``Z`` generated by ``M``, stored by restriction to ``M``.

    Class ``k`` is represented by the least free element with the given
    values on ``M``: zero at every other point.
    """

    def __init__(self, free: FreeAlgebra, M: int):
        self.free = free
        self.M = M
        self.points_in_M = members_of(M)
        if self.points_in_M and self.points_in_M[-1] >= free.npoints:
            raise PreconditionError("generator is not a set of points of A^I")
        width = len(self.points_in_M)
        if width:
            vectors, labels = power_vectors(free.base, width), None
        else:
            # improper Z: one class, kept over a one-coordinate universe
            vectors, labels = np.arange(free.base, dtype=np.uint8)[:, None], np.zeros(free.base)
        info = {"gens": free.gens, "Z": {"generator": self.points_in_M}}
        VarietyAlgebra.__init__(self, free.base, vectors, labels, provenance="free_quotient", info=info)
        self.Z = BAFilter(BlockBooleanAlgebra(free.npoints, [1 << p for p in range(free.npoints)]), M)
        self.base_power = free

    def class_of(self, vectors) -> np.ndarray:
        vectors = np.atleast_2d(np.asarray(vectors, dtype=np.uint8))
        if not self.points_in_M:
            return np.zeros(len(vectors), dtype=np.int64)
        return self.index_many(vectors[:, self.points_in_M])

    def rep(self, k) -> np.ndarray:
        """Canonical free-algebra representatives of the classes ``k``."""
        k = np.atleast_1d(np.asarray(k))
        out = np.zeros((len(k), self.free.npoints), dtype=np.uint8)
        if self.points_in_M:
            out[:, self.points_in_M] = self.rep_vectors[k]
        return out

    @cached_property
    def all_reps(self) -> np.ndarray:
        return self.rep(np.arange(self.size))


def Z_generator_by_probes(phi: PhiMap) -> int:
    """Generator of ``Z_α`` from single-point probes.

    A point ``x`` lies in the generator iff the complement of ``{x}`` is not
    in ``Z_α``, i.e. iff the indicator of ``x`` and the zero function have
    different images under ``φ_α``.
    """
    free = phi.free
    probes = np.zeros((free.npoints + 1, free.npoints), dtype=np.uint8)
    probes[np.arange(free.npoints), np.arange(free.npoints)] = 1
    vals = phi(probes)
    return mask_of(int(x) for x in np.flatnonzero(vals[:-1] != vals[-1]))


class Iota:
    """``ι_α: F(A,I)/Z_α -> <α(I)>``, ``[ℓ] -> φ_α(ℓ)``."""

    def __init__(self, quotient: FreeQuotient, phi: PhiMap, tables: TableSet | None = None, verify: bool = True):
        self.quotient = quotient
        self.phi = phi
        self.target = phi.alpha.target
        self.mapping = phi(quotient.all_reps)
        self.homomorphism = Homomorphism(quotient, self.target, self.mapping, name="ι_α")
        if verify:
            self.verify(tables)

    @cached_property
    def generated(self) -> np.ndarray:
        return generate_subalgebra(self.target, self.phi.alpha.values)

    def verify(self, tables: TableSet | None = None) -> None:
        h = self.homomorphism
        if not h.injective:
            raise AlgebraError("ι_α is not injective")
        if not np.array_equal(np.unique(self.mapping), self.generated):
            raise AlgebraError("ι_α is not onto the generated subalgebra")
        h.verify(tables)

    def inverse(self, elements) -> np.ndarray:
        """Classes mapped onto the given target elements."""
        lookup = np.full(self.target.size, -1, dtype=np.int64)
        lookup[self.mapping] = np.arange(self.quotient.size)
        out = lookup[np.asarray(elements)]
        if np.any(out < 0):
            raise AlgebraError("element outside the generated subalgebra")
        return out

    def image_algebra(self) -> VarietyAlgebra:
        return subalgebra(self.target, self.generated)[0]


@dataclass
class ZAlpha:
    Z: BAFilter
    quotient: FreeQuotient
    iota: Iota
    phi: PhiMap


def Z_alpha(free: FreeAlgebra, alpha: GeneratorAssignment, tables: TableSet | None = None,
            verify: bool = True) -> ZAlpha:
    """``Z_α``, the quotient ``F(A,I)/Z_α`` and ``ι_α``.

    Materialisable free algebras go through the congruence-to-filter map on
    ``ker φ_α``; larger ones use single-point probes.
    """
    phi = phi_alpha(free, alpha)
    if free.materializable and free.base >= free.npoints:
        kernel = phi.homomorphism(tables, verify=verify).kernel()
        Z = congruence_to_Zfilter(free.algebra, kernel)
        M = Z.generator
    else:
        M = Z_generator_by_probes(phi)
    Q = FreeQuotient(free, M)
    iota = Iota(Q, phi, tables, verify=verify)
    return ZAlpha(Q.Z, Q, iota, phi)


def free_quotient_of_materialized(free: FreeAlgebra, Z: BAFilter) -> LimitReducedPower:
    return limit_reduced_power(free.algebra, Z)


def all_assignments(target: VarietyAlgebra, k: int):
    for values in product(range(target.size), repeat=k):
        yield GeneratorAssignment(target, values)
