"""Partition uniformities, induced maps and directed colimits.

Points of a power space ``A^n`` are indexed lexicographically (first
coordinate most significant), so a map ``f: A^I -> A^J`` is an integer
array over ``A^I`` and its coordinate ``π_j∘f`` is a value vector, i.e. an
element of the free algebra ``F(A, I)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations

import numpy as np

from .algebra import (
    AlgebraError,
    Homomorphism,
    HomomorphismError,
    VarietyAlgebra,
    encode,
    generate_subalgebra,
)
from .clone import (
    ClonePower,
    FreeQuotient,
    GeneratorAssignment,
    PreconditionError,
    ZAlpha,
    Z_alpha,
    evaluate,
    free_algebra,
    phi_alpha,
    power_vectors,
)
from .partitions import (
    PartitionFilter,
    kernel_partition,
    mask_of,
    members_of,
    preimage_partition,
)
from .tables import TableSet


class UniformityError(ValueError):
    pass


@dataclass(frozen=True)
class UniformSpace:
    """A finite set of points with a filter of uniform partitions."""

    points: int
    filter: PartitionFilter
    shape: tuple[int, int] | None = None  # (base, n) for power spaces A^n

    def __post_init__(self):
        if self.filter.ground != self.points:
            raise UniformityError("filter ground differs from the point set")

    def to_json(self) -> dict:
        return {"points": self.points, "filter": self.filter.to_json()}


def power_space(base: int, n: int, filter: PartitionFilter | None = None) -> UniformSpace:
    """``A^n`` with ``P(A, n)`` (generated by the kernels of the projections) unless given."""
    pts = power_vectors(base, n) if n else np.zeros((1, 0), dtype=np.uint8)
    if filter is None:
        filter = PartitionFilter(len(pts), [kernel_partition(col.tolist()) for col in pts.T])
    return UniformSpace(len(pts), filter, (base, n))


def is_uniformly_continuous(f, F_src: PartitionFilter, G_tgt: PartitionFilter) -> bool:
    """Preimage of every generator of ``G_tgt`` lies in ``F_src``."""
    f = [int(x) for x in f]
    if len(f) != F_src.ground or any(not 0 <= x < G_tgt.ground for x in f):
        raise UniformityError("map does not fit the two spaces")
    return all(preimage_partition(f, P) in F_src for P in G_tgt.generators)


class UniformMap:
    def __init__(self, source: UniformSpace, target: UniformSpace, values, check: bool = True):
        values = np.asarray(values, dtype=np.int64)
        if values.shape != (source.points,) or np.any((values < 0) | (values >= target.points)):
            raise UniformityError("map is not total on the source points")
        self.source = source
        self.target = target
        self.values = values
        if check and not is_uniformly_continuous(values, source.filter, target.filter):
            raise UniformityError("map is not uniformly continuous")

    @classmethod
    def from_coordinates(cls, base: int, n_in: int, coords, check: bool = True) -> "UniformMap":
        """``A^I -> A^J`` from the value vectors of ``π_j∘f``."""
        coords = np.asarray(coords, dtype=np.uint8).reshape(-1, base ** n_in)
        n_out = len(coords)
        values = encode(coords.T, base) if n_out else np.zeros(base ** n_in, dtype=np.int64)
        return cls(power_space(base, n_in), power_space(base, n_out), values, check)

    @cached_property
    def coordinates(self) -> np.ndarray:
        """Row ``j`` is ``π_j∘f`` as a value vector over the source points."""
        if self.target.shape is None:
            raise UniformityError("target is not a power space")
        base, n = self.target.shape
        pts = power_vectors(base, n) if n else np.zeros((1, 0), dtype=np.uint8)
        return np.ascontiguousarray(pts[self.values].T)

    def then(self, g: "UniformMap") -> "UniformMap":
        """``g∘f``."""
        if g.source.points != self.target.points:
            raise UniformityError("maps do not compose")
        return UniformMap(self.source, g.target, g.values[self.values], check=False)

    def __eq__(self, other):
        return isinstance(other, UniformMap) and np.array_equal(self.values, other.values)

    def __repr__(self):
        return f"UniformMap({self.source.points} -> {self.target.points} points)"

    def to_json(self) -> list[int]:
        return self.values.tolist()


def identity_map(space: UniformSpace) -> UniformMap:
    return UniformMap(space, space, np.arange(space.points), check=False)


def preimage_set(f: UniformMap, R: int) -> int:
    """``f_{-1}(R)`` for a point set given as a bitmask."""
    return mask_of(int(x) for x in np.flatnonzero([(R >> int(v)) & 1 for v in f.values]))


def image_set(f: UniformMap, R: int) -> int:
    return mask_of(int(f.values[x]) for x in members_of(R))


# -- f* and f-bar -------------------------------------------------------------

class Pullback:
    """``f*: g -> g∘f`` from ``Ω(A)^G`` on the target space to ``Ω(A)^F`` on the source.

    With the ``P`` filters on power spaces this is ``F(A,J) -> F(A,I)``.
    Elements are value vectors over the points.
    """

    def __init__(self, f: UniformMap, base: int | None = None):
        self.f = f
        if base is None:
            if f.source.shape is None:
                raise UniformityError("base set unknown for a non-power space")
            base = f.source.shape[0]
        self.base = base

    def __call__(self, vectors) -> np.ndarray:
        vectors = np.atleast_2d(np.asarray(vectors, dtype=np.uint8))
        return np.ascontiguousarray(vectors[:, self.f.values])

    def on_generators(self) -> np.ndarray:
        """``f*(π_j) = π_j∘f``."""
        return self(free_algebra(self.base, self.f.target.shape[1]).projections)

    def check_lands(self, vectors) -> None:
        """``g∘f`` has a uniform kernel for each ``g`` in ``vectors``."""
        self._check_kernels(self(vectors))

    def _check_kernels(self, pulled) -> None:
        F = self.f.source.filter
        for row in pulled:
            if kernel_partition(row.tolist()) not in F:
                raise UniformityError("g∘f has a non-uniform kernel: f is not uniformly continuous")

    @cached_property
    def source_algebra(self) -> VarietyAlgebra:
        return ClonePower(self.base, self.f.target.filter, provenance="free" if self.f.target.shape else "clone_power")

    @cached_property
    def target_algebra(self) -> VarietyAlgebra:
        return ClonePower(self.base, self.f.source.filter, provenance="free" if self.f.source.shape else "clone_power")

    def homomorphism(self, tables: TableSet | None = None, verify: bool = True) -> Homomorphism:
        src, tgt = self.source_algebra, self.target_algebra
        img = self(src.rep_vectors)
        self._check_kernels(img)
        h = Homomorphism(src, tgt, tgt.index_many(img), name="f*")
        return h.verify(tables) if verify else h


def pullback_hom(f: UniformMap, base: int | None = None) -> Pullback:
    return Pullback(f, base)


def essential_coordinates(vector, base: int, n: int) -> list[int]:
    """Coordinates a function ``A^n -> A`` (value vector) actually depends on."""
    v = np.asarray(vector).reshape((base,) * n) if n else np.asarray(vector)
    out = []
    for i in range(n):
        first = np.take(v, 0, axis=i)
        if any(not np.array_equal(first, np.take(v, a, axis=i)) for a in range(1, base)):
            out.append(i)
    return out


def restrict_to(vector, base: int, n: int, coords: list[int]) -> np.ndarray:
    """The function of the kept coordinates, others fixed at 0."""
    v = np.asarray(vector).reshape((base,) * n) if n else np.asarray(vector)
    index = tuple(slice(None) if i in coords else 0 for i in range(n))
    return np.ascontiguousarray(v[index]).reshape(-1)


def induced_map(f: UniformMap, L: VarietyAlgebra, check: bool = True):
    """``f̄^L: L^I -> L^J`` as a function of assignments."""
    if f.source.shape is None or f.source.shape[0] != L.base:
        raise UniformityError("f must be a map between powers of the base set")
    base, n = f.source.shape
    coords = f.coordinates

    def fbar(alpha: GeneratorAssignment) -> GeneratorAssignment:
        if alpha.index_size != n or alpha.target is not L:
            raise PreconditionError("assignment does not match the map")
        values = evaluate(coords, alpha) if len(coords) else np.zeros(0, dtype=np.int64)
        if check:
            phi_alpha(free_algebra(base, n), alpha).check_well_defined(coords)
            for j, row in enumerate(coords):
                keep = essential_coordinates(row, base, n)
                short = evaluate(restrict_to(row, base, n, keep), alpha.restrict(keep))
                if int(short[0]) != int(values[j]):
                    raise AlgebraError("induced map depends on the representation")
        return GeneratorAssignment(L, values)

    return fbar


# -- the generator preorder ---------------------------------------------------

_quotient_cache: dict = {}


def _zalpha(alpha: GeneratorAssignment, tables=None, verify: bool = False) -> ZAlpha:
    key = (id(alpha.target), alpha.values, id(tables), verify)
    hit = _quotient_cache.get(key)
    if hit is None or hit[0] is not alpha.target:
        hit = (alpha.target, Z_alpha(free_algebra(alpha.target.base, alpha.index_size), alpha, tables, verify=verify))
        if len(_quotient_cache) > 512:
            _quotient_cache.clear()
        _quotient_cache[key] = hit
    return hit[1]


def generated(alpha: GeneratorAssignment, tables: TableSet | None = None) -> np.ndarray:
    return generate_subalgebra(alpha.target, alpha.values, tables)


def _term_for(value: int, alpha: GeneratorAssignment, tables=None, exclude=()):
    """``(coords, ℓ)`` with ``φ_{α|coords}(ℓ) = value``: fewest coordinates first,
    then lexicographic coordinate tuples, then the least class."""
    n = alpha.index_size
    for r in range(n + 1):
        for coords in combinations(range(n), r):
            if (coords, value) in exclude:
                continue
            za = _zalpha(alpha.restrict(coords), tables)
            hits = np.flatnonzero(za.iota.mapping == value)
            if len(hits):
                return list(coords), za.quotient.rep(hits[:1])[0]
    return None


def _lift(coords: list[int], ell: np.ndarray, base: int, n: int) -> np.ndarray:
    """``ℓ∘(projection onto coords)`` as a value vector over ``A^n``."""
    pts = power_vectors(base, n) if n else np.zeros((1, 0), dtype=np.uint8)
    if not coords:
        return np.full(len(pts), ell[0], dtype=np.uint8)
    return ell[encode(pts[:, coords], base)]


def leq(beta: GeneratorAssignment, alpha: GeneratorAssignment, tables: TableSet | None = None,
        witness: bool = True, exclude=()):
    """``β <= α`` iff ``<β(J)> ⊆ <α(I)>``; with a witness ``f`` having ``f̄(α) = β``.

    Witness coordinates are projections where ``β(j)`` is some ``α(i)``
    (the identity when ``β = α``), otherwise the first term found by
    ``_term_for``.
    """
    if beta.target is not alpha.target:
        raise PreconditionError("assignments into different algebras")
    inside = np.zeros(alpha.target.size, dtype=bool)
    inside[generated(alpha, tables)] = True
    ok = bool(inside[list(beta.values)].all())
    if not witness:
        return ok
    if not ok:
        return False, None
    base, n = alpha.target.base, alpha.index_size
    if beta.values == alpha.values and not exclude:
        return True, identity_map(power_space(base, n))
    rows = []
    for v in beta.values:
        # a generator itself is witnessed by its projection
        hits = [i for i, a in enumerate(alpha.values) if a == v and ((i,), v) not in exclude]
        if hits:
            coords, ell = [hits[0]], np.arange(base, dtype=np.uint8)
        else:
            coords, ell = _term_for(v, alpha, tables, exclude)
        rows.append(_lift(coords, ell, base, n))
    f = UniformMap.from_coordinates(base, n, np.array(rows, dtype=np.uint8).reshape(len(rows), base ** n))
    got = induced_map(f, alpha.target)(alpha)
    if got.values != beta.values:
        raise AlgebraError("witness does not carry α to β")
    return True, f


def alternative_witness(beta: GeneratorAssignment, alpha: GeneratorAssignment, tables=None):
    """A second witness avoiding the first choice of terms where possible."""
    _, f = leq(beta, alpha, tables)
    base, n = alpha.target.base, alpha.index_size
    rows = []
    for j, v in enumerate(beta.values):
        coords = essential_coordinates(f.coordinates[j], base, n)
        found = _term_for(v, alpha, tables, exclude={(tuple(coords), v)} | {((), v)})
        if found is None:
            rows.append(f.coordinates[j])
        else:
            rows.append(_lift(found[0], found[1], base, n))
    return UniformMap.from_coordinates(base, n, np.array(rows, dtype=np.uint8).reshape(len(rows), base ** n))


# -- connecting maps ------------------------------------------------------------

@dataclass
class Connecting:
    beta: GeneratorAssignment
    alpha: GeneratorAssignment
    witness: UniformMap
    homomorphism: Homomorphism
    z_beta: ZAlpha
    z_alpha: ZAlpha
    checks: dict = field(default_factory=dict)

    @property
    def mapping(self) -> np.ndarray:
        return self.homomorphism.mapping


def _push(f: UniformMap, Qb: FreeQuotient, Qa: FreeQuotient, vectors) -> np.ndarray:
    return Qa.class_of(np.asarray(vectors, dtype=np.uint8)[:, f.values])


def connecting_map(beta: GeneratorAssignment, alpha: GeneratorAssignment, f: UniformMap | None = None,
                   tables: TableSet | None = None, verify: bool = True, seed: int = 0) -> Connecting:
    """``E^{β,α}: F(A,J)/Z_β -> F(A,I)/Z_α``, ``[ℓ] -> [ℓ∘f]``.

    Checked against ``ι_α⁻¹ ∘ ι_β`` (the commuting square), against a
    second witness, on random non-canonical representatives, and for the
    transfer ``R in Z_β <=> f_{-1}(R) in Z_α``.
    """
    if f is None:
        ok, f = leq(beta, alpha, tables)
        if not ok:
            raise PreconditionError("β is not below α")
    zb, za = _zalpha(beta, tables), _zalpha(alpha, tables)
    Qb, Qa = zb.quotient, za.quotient
    mapping = _push(f, Qb, Qa, Qb.all_reps)
    h = Homomorphism(Qb, Qa, mapping, name="E")
    out = Connecting(beta, alpha, f, h, zb, za)
    if not verify:
        return out
    square = za.iota.inverse(zb.iota.mapping)
    if not np.array_equal(square, mapping):
        raise HomomorphismError("ι_α E ≠ ι_β: the square does not commute")
    out.checks["square"] = True
    rng = np.random.default_rng(seed)
    noisy = Qb.all_reps.copy()
    off = np.setdiff1d(np.arange(Qb.free.npoints), Qb.points_in_M)
    if len(off):
        noisy[:, off] = rng.integers(0, Qb.base, size=(len(noisy), len(off)))
    if not np.array_equal(_push(f, Qb, Qa, noisy), mapping):
        raise HomomorphismError("[ℓ] -> [ℓ∘f] depends on the representative")
    g = alternative_witness(beta, alpha, tables)
    if not np.array_equal(_push(g, Qb, Qa, Qb.all_reps), mapping):
        raise HomomorphismError("connecting map depends on the witness")
    out.checks["witness_independent"] = True
    out.checks["z_transfer"] = z_transfer_holds(f, zb, za, rng)
    if not out.checks["z_transfer"]:
        raise HomomorphismError("Z transfer fails")
    h.verify(tables)
    return out


def z_transfer_holds(f: UniformMap, zb: ZAlpha, za: ZAlpha, rng=None, samples: int = 256) -> bool:
    """``R in Z_β <=> f_{-1}(R) in Z_α`` for all ``R``.

    Both filters are principal, so this is ``gen(Z_β) = f[gen(Z_α)]``;
    sampled sets ``R`` are checked directly as well.
    """
    Mb, Ma = zb.quotient.M, za.quotient.M
    if image_set(f, Ma) != Mb:
        return False
    rng = rng or np.random.default_rng(0)
    npts = zb.quotient.free.npoints
    for _ in range(samples):
        R = mask_of(int(x) for x in np.flatnonzero(rng.integers(0, 2, npts)))
        if rng.integers(0, 2):
            R |= Mb
        if ((R & Mb) == Mb) != ((preimage_set(f, R) & Ma) == Ma):
            return False
    return True


# -- directed systems and colimits --------------------------------------------

class DirectedSystem:
    """Finite directed preorder ``D`` with assignments ``α_d`` into one algebra."""

    def __init__(self, target: VarietyAlgebra, stages: list[GeneratorAssignment], edges, tables: TableSet | None = None,
                 validate: bool = True):
        self.target = target
        self.stages = list(stages)
        self.tables = tables
        m = len(self.stages)
        if m == 0:
            raise UniformityError("empty index poset")
        reach = np.eye(m, dtype=bool)
        for d, e in edges:
            reach[d, e] = True
        for k in range(m):
            reach |= reach[:, [k]] & reach[[k], :]
        self.le = reach
        if validate:
            self.validate()

    @property
    def size(self) -> int:
        return len(self.stages)

    def pairs(self):
        return [(d, e) for d in range(self.size) for e in range(self.size) if self.le[d, e]]

    def validate(self) -> None:
        m = self.size
        for d in range(m):
            if self.stages[d].target is not self.target:
                raise UniformityError("stage assignment into a different algebra")
            for e in range(m):
                if not (self.le[d] & self.le[e]).any():
                    raise UniformityError(f"stages {d} and {e} have no upper bound")
        for d, e in self.pairs():
            if not leq(self.stages[d], self.stages[e], self.tables, witness=False):
                raise UniformityError(f"α_{d} is not below α_{e}")
        covered = np.zeros(self.target.size, dtype=bool)
        for a in self.stages:
            covered[generated(a, self.tables)] = True
        if not covered.all():
            raise UniformityError("the generated subalgebras do not cover the algebra")

    @cached_property
    def top(self) -> int:
        """Least-index stage above every stage."""
        tops = np.flatnonzero(self.le.all(axis=0))
        return int(tops[0])

    def to_json(self) -> dict:
        edges = [[d, e] for d, e in self.pairs() if d != e]
        return {"poset": edges,
                "stages": [{"index_size": a.index_size, "alpha": list(a.values)} for a in self.stages]}


@dataclass
class Colimit:
    algebra: VarietyAlgebra
    to_target: Homomorphism
    injections: dict
    connecting: dict


def directed_colimit(sys: DirectedSystem, tables: TableSet | None = None, verify: bool = True) -> Colimit:
    """Glue the quotients ``F(A,I_d)/Z_d`` along the connecting maps."""
    m = sys.size
    zs = [_zalpha(a, tables) for a in sys.stages]
    conn = {(d, e): connecting_map(sys.stages[d], sys.stages[e], tables=tables, verify=verify)
            for d, e in sys.pairs()}
    if verify:
        for d in range(m):
            if not np.array_equal(conn[d, d].mapping, np.arange(zs[d].quotient.size)):
                raise HomomorphismError(f"E_{d},{d} is not the identity")
        for d, e in conn:
            for g in range(m):
                if sys.le[e, g] and not np.array_equal(conn[e, g].mapping[conn[d, e].mapping], conn[d, g].mapping):
                    raise HomomorphismError(f"E_{d},{g} ≠ E_{e},{g} E_{d},{e}")
    offsets = np.cumsum([0] + [z.quotient.size for z in zs])
    parent = list(range(int(offsets[-1])))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for (d, e), c in conn.items():
        for x, y in enumerate(c.mapping.tolist()):
            rx, ry = find(offsets[d] + x), find(offsets[e] + y)
            if rx != ry:
                parent[max(rx, ry)] = min(rx, ry)
    top = sys.top
    Qt = zs[top].quotient
    # every class meets the top stage; label classes by their top representative
    root_to_class = {find(offsets[top] + x): x for x in range(Qt.size)}
    injections = {}
    for d in range(m):
        injections[d] = np.array([root_to_class[find(offsets[d] + x)] for x in range(zs[d].quotient.size)],
                                 dtype=np.int64)
    if len(root_to_class) != len({find(x) for x in range(len(parent))}):
        raise AlgebraError("colimit class without a top-stage member")
    colim = VarietyAlgebra(Qt.base, Qt.vectors, Qt.labels, provenance="quotient",
                           info={"colimit": sys.to_json(), "top": top})
    h = Homomorphism(colim, sys.target, zs[top].iota.mapping, name="colimit iso")
    if verify:
        for d in range(m):
            if not np.array_equal(h.mapping[injections[d]], zs[d].iota.mapping):
                raise HomomorphismError(f"cocone fails at stage {d}")
        if not h.is_isomorphism(tables):
            raise HomomorphismError("colimit is not isomorphic to the target")
    return Colimit(colim, h, injections, conn)
