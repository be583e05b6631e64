"""Finite set partitions, partition filters and the block Boolean algebra.

Ground sets are always ``range(n)``.  A :class:`SetPartition` is stored as a
restricted growth string (``labels[i]`` is the index of the block holding
``i``, blocks numbered by their minimum element), which makes the canonical
form, equality and hashing exact.

Subsets of a ground set are handled as integer bitmasks throughout.
"""
from __future__ import annotations

from functools import cached_property, reduce
from itertools import combinations
from typing import Iterable, Iterator, Sequence


class PartitionError(ValueError):
    pass


def _canonical_labels(values: Sequence) -> tuple[int, ...]:
    seen: dict = {}
    out = []
    for v in values:
        if v not in seen:
            seen[v] = len(seen)
        out.append(seen[v])
    return tuple(out)


def mask_of(items: Iterable[int]) -> int:
    m = 0
    for i in items:
        m |= 1 << i
    return m


def members_of(mask: int) -> list[int]:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


class SetPartition:
    """A partition of ``range(n)``."""

    __slots__ = ("labels", "__dict__")

    def __init__(self, labels: Sequence):
        if len(labels) == 0:
            raise PartitionError("empty ground set")
        self.labels = _canonical_labels(labels)

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]], n: int | None = None) -> "SetPartition":
        blocks = [list(b) for b in blocks]
        if any(not b for b in blocks):
            raise PartitionError("empty block")
        size = sum(len(b) for b in blocks)
        if n is None:
            n = size
        labels = [-1] * n
        for k, b in enumerate(blocks):
            for i in b:
                if not 0 <= i < n or labels[i] != -1:
                    raise PartitionError(f"blocks are not a partition of range({n})")
                labels[i] = k
        if -1 in labels:
            raise PartitionError(f"blocks do not cover range({n})")
        return cls(labels)

    @classmethod
    def discrete(cls, n: int) -> "SetPartition":
        return cls(range(n))

    @classmethod
    def indiscrete(cls, n: int) -> "SetPartition":
        return cls([0] * n)

    @property
    def n(self) -> int:
        return len(self.labels)

    @cached_property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(max(self.labels) + 1)]
        for i, k in enumerate(self.labels):
            out[k].append(i)
        return tuple(tuple(b) for b in out)

    @cached_property
    def block_masks(self) -> tuple[int, ...]:
        return tuple(mask_of(b) for b in self.blocks)

    def __len__(self):
        return len(self.blocks)

    def same_block(self, x: int, y: int) -> bool:
        return self.labels[x] == self.labels[y]

    def __eq__(self, other):
        return isinstance(other, SetPartition) and self.labels == other.labels

    def __hash__(self):
        return hash(self.labels)

    def __repr__(self):
        return f"SetPartition({[list(b) for b in self.blocks]})"

    def to_json(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]

    @classmethod
    def from_json(cls, data, n: int | None = None) -> "SetPartition":
        return cls.from_blocks(data, n)

    def __le__(self, other: "SetPartition") -> bool:
        return refines(self, other)

    def __and__(self, other: "SetPartition") -> "SetPartition":
        return meet(self, other)

    def __or__(self, other: "SetPartition") -> "SetPartition":
        return join(self, other)


def _check_ground(P: SetPartition, Q: SetPartition) -> None:
    if P.n != Q.n:
        raise PartitionError(f"ground sets differ: {P.n} vs {Q.n}")


def kernel_partition(f: Sequence) -> SetPartition:
    """Partition of the domain of ``f`` into its nonempty fibres."""
    if len(f) == 0:
        raise PartitionError("empty ground set")
    return SetPartition(f)


def refines(P: SetPartition, Q: SetPartition) -> bool:
    """True iff every block of ``P`` lies inside a block of ``Q``."""
    _check_ground(P, Q)
    image: dict[int, int] = {}
    for p, q in zip(P.labels, Q.labels):
        if image.setdefault(p, q) != q:
            return False
    return True


def meet(P: SetPartition, Q: SetPartition) -> SetPartition:
    _check_ground(P, Q)
    return SetPartition(list(zip(P.labels, Q.labels)))


def join(P: SetPartition, Q: SetPartition) -> SetPartition:
    _check_ground(P, Q)
    parent = list(range(P.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for part in (P, Q):
        for block in part.blocks:
            r = find(block[0])
            for x in block[1:]:
                s = find(x)
                if s != r:
                    parent[s] = r
    return SetPartition([find(x) for x in range(P.n)])


def meet_all(parts: Iterable[SetPartition], n: int) -> SetPartition:
    return reduce(meet, parts, SetPartition.indiscrete(n))


def preimage_partition(f: Sequence[int], P: SetPartition) -> SetPartition:
    """``{f^-1(R) | R in P}`` with empty preimages dropped.

    ``f`` maps ``range(len(f))`` into ``range(P.n)``.
    """
    if len(f) == 0:
        raise PartitionError("empty ground set")
    try:
        return SetPartition([P.labels[y] for y in f])
    except IndexError:
        raise PartitionError("map leaves the ground set of the partition") from None


def all_partitions(n: int) -> Iterator[SetPartition]:
    """Every partition of ``range(n)``, in restricted-growth-string order."""
    if n <= 0:
        raise PartitionError("empty ground set")

    def grow(prefix, top):
        if len(prefix) == n:
            yield SetPartition(prefix)
            return
        for k in range(top + 2):
            prefix.append(k)
            yield from grow(prefix, max(top, k))
            prefix.pop()

    yield from grow([0], 0)


def coarsenings(P: SetPartition) -> Iterator[SetPartition]:
    """Every partition coarser than or equal to ``P``."""
    for Q in all_partitions(len(P)):
        yield SetPartition([Q.labels[k] for k in P.labels])


class PartitionFilter:
    """A filter on the partition lattice of ``range(ground)``.

    On a finite lattice every filter is principal, so the meet of the
    generators decides membership.
    """

    def __init__(self, ground: int, generators: Iterable[SetPartition] = ()):
        if ground <= 0:
            raise PartitionError("empty ground set")
        self.ground = ground
        self.generators = tuple(generators)
        for P in self.generators:
            if P.n != ground:
                raise PartitionError(f"generator {P} is not a partition of range({ground})")

    @cached_property
    def base(self) -> SetPartition:
        return meet_all(self.generators, self.ground)

    def __contains__(self, P: SetPartition) -> bool:
        if P.n != self.ground:
            raise PartitionError(f"ground sets differ: {P.n} vs {self.ground}")
        return refines(self.base, P)

    def members(self) -> list[SetPartition]:
        return sorted(set(coarsenings(self.base)), key=lambda P: (len(P), P.labels), reverse=True)

    def __eq__(self, other):
        return isinstance(other, PartitionFilter) and self.ground == other.ground and self.base == other.base

    def __hash__(self):
        return hash((self.ground, self.base))

    def __repr__(self):
        return f"PartitionFilter(ground={self.ground}, base={self.base.to_json()})"

    def to_json(self) -> dict:
        return {"ground": self.ground, "generators": [P.to_json() for P in self.generators]}

    @classmethod
    def from_json(cls, data: dict) -> "PartitionFilter":
        n = data["ground"]
        return cls(n, [SetPartition.from_blocks(g, n) for g in data.get("generators", [])])


def filter_generate(ground: int, base: Iterable[SetPartition]) -> PartitionFilter:
    return PartitionFilter(ground, base)


def filter_contains(F: PartitionFilter, P: SetPartition) -> bool:
    return P in F


def principal_filter(P: SetPartition) -> PartitionFilter:
    return PartitionFilter(P.n, [P])


def all_filters(n: int) -> list[PartitionFilter]:
    return [principal_filter(P) for P in all_partitions(n)]


# Explicit enumeration of the partitions in a filter is only done up to
# this ground size (Bell(8) = 4140).
EXPLICIT_BA_LIMIT = 8


class BAError(ValueError):
    pass


class BlockBooleanAlgebra:
    """The Boolean algebra ``{empty} ∪ (blocks of members of F)``.

    Elements are bitmasks over the ground set.  The atoms are the blocks of
    the meet of ``F``; ``elements`` is materialised on demand.
    """

    def __init__(self, ground: int, atoms: Iterable[int], elements: Iterable[int] | None = None):
        self.ground = ground
        self.atoms = tuple(sorted(atoms, key=lambda m: (m & -m)))
        self.top = (1 << ground) - 1
        if elements is not None:
            self.__dict__["elements"] = tuple(sorted(set(elements)))

    @classmethod
    def from_partition(cls, P: SetPartition) -> "BlockBooleanAlgebra":
        return cls(P.n, P.block_masks)

    @cached_property
    def elements(self) -> tuple[int, ...]:
        if len(self.atoms) > 20:
            raise BAError(f"{2 ** len(self.atoms)} elements is too many to list")
        out = []
        for r in range(len(self.atoms) + 1):
            for combo in combinations(self.atoms, r):
                out.append(reduce(int.__or__, combo, 0))
        return tuple(sorted(out))

    def __len__(self):
        return 2 ** len(self.atoms)

    def __contains__(self, mask: int) -> bool:
        if mask & ~self.top:
            return False
        return all((mask & a) in (0, a) for a in self.atoms)

    def complement(self, mask: int) -> int:
        return self.top & ~mask

    def check_closure(self) -> None:
        els = set(self.elements)
        if 0 not in els or self.top not in els:
            raise BAError("missing bottom or top")
        for r in els:
            if self.complement(r) not in els:
                raise BAError(f"not closed under complement at {members_of(r)}")
            for s in els:
                if r & s not in els or r | s not in els:
                    raise BAError(f"not closed at {members_of(r)}, {members_of(s)}")

    def to_json(self) -> list[list[int]]:
        return [members_of(m) for m in self.elements]

    def __eq__(self, other):
        return isinstance(other, BlockBooleanAlgebra) and self.ground == other.ground and self.atoms == other.atoms

    def __hash__(self):
        return hash((self.ground, self.atoms))

    def __repr__(self):
        return f"BlockBooleanAlgebra(ground={self.ground}, atoms={[members_of(a) for a in self.atoms]})"


def block_boolean_algebra(F: PartitionFilter) -> BlockBooleanAlgebra:
    """Collect every block of every partition in ``F``, plus the empty set.

    Small ground sets are enumerated partition by partition and the result is
    checked for closure; larger ones fall back to the atoms of the meet.
    """
    atomic = BlockBooleanAlgebra.from_partition(F.base)
    if F.ground > EXPLICIT_BA_LIMIT:
        return atomic
    found = {0}
    for P in all_partitions(F.ground):
        if P in F:
            found.update(P.block_masks)
    ba = BlockBooleanAlgebra(F.ground, atomic.atoms, found)
    ba.check_closure()
    if set(ba.elements) != set(atomic.elements):
        raise BAError("block family disagrees with the atoms of the filter base")
    return ba


class BAFilter:
    """A filter ``Z`` on a finite block Boolean algebra.

    Stored by its generator (the meet of its members); the improper filter
    has generator 0.
    """

    def __init__(self, parent: BlockBooleanAlgebra, generator: int):
        if generator not in parent:
            raise BAError(f"{members_of(generator)} is not an element of the algebra")
        self.parent = parent
        self.generator = generator

    @classmethod
    def from_members(cls, parent: BlockBooleanAlgebra, members: Iterable[int]) -> "BAFilter":
        members = set(members)
        if parent.top not in members:
            raise BAError("a filter must contain the top element")
        for r in members:
            if r not in parent:
                raise BAError(f"{members_of(r)} is not an element of the algebra")
        for r in members:
            for s in members:
                if r & s not in members:
                    raise BAError("not closed under intersection")
        for r in members:
            for s in parent.elements:
                if r & s == r and s not in members:
                    raise BAError("not upward closed")
        gen = reduce(int.__and__, members, parent.top)
        return cls(parent, gen)

    @cached_property
    def members(self) -> tuple[int, ...]:
        return tuple(r for r in self.parent.elements if r & self.generator == self.generator)

    def __contains__(self, mask: int) -> bool:
        return mask in self.parent and mask & self.generator == self.generator

    @property
    def proper(self) -> bool:
        return self.generator != 0

    @property
    def ultra(self) -> bool:
        return self.generator in self.parent.atoms

    def __le__(self, other: "BAFilter") -> bool:
        return self.generator & other.generator == other.generator

    def __eq__(self, other):
        return isinstance(other, BAFilter) and self.parent == other.parent and self.generator == other.generator

    def __hash__(self):
        return hash((self.parent, self.generator))

    def __repr__(self):
        tag = "ultra" if self.ultra else ("proper" if self.proper else "improper")
        return f"BAFilter(generator={members_of(self.generator)}, {tag})"

    def to_json(self) -> dict:
        out = {"generator": members_of(self.generator), "proper": self.proper, "ultra": self.ultra}
        if len(self.parent.atoms) <= 12:
            out["members"] = [members_of(m) for m in self.members]
        return out


def ba_filters(ba: BlockBooleanAlgebra) -> list[BAFilter]:
    """All filters of a finite Boolean algebra, smallest first.

    Each one is principal, generated by an element of the algebra.
    """
    gens = sorted(ba.elements, key=lambda m: (-bin(m).count("1"), m))
    return [BAFilter(ba, g) for g in gens]


def refinement_dot(n: int) -> str:
    """Hasse diagram of the partition lattice of ``range(n)``."""
    parts = sorted(all_partitions(n), key=lambda P: (-len(P), P.labels))
    names = {P: "|".join("".join(map(str, b)) for b in P.blocks) for P in parts}
    lines = ["digraph partitions {", "  rankdir=BT;"]
    for P in parts:
        lines.append(f'  "{names[P]}";')
    for P in parts:
        for Q in parts:
            if P != Q and refines(P, Q) and len(Q) == len(P) - 1:
                lines.append(f'  "{names[P]}" -> "{names[Q]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"


def filter_lattice_dot(ba: BlockBooleanAlgebra) -> str:
    """Hasse diagram of the filters of ``ba``, labelled by generator."""
    filters = ba_filters(ba)

    def name(Z):
        return "{" + ",".join(map(str, members_of(Z.generator))) + "}"

    lines = ["digraph filters {", "  rankdir=BT;"]
    for Z in filters:
        shape = "doublecircle" if Z.ultra else "ellipse"
        lines.append(f'  "{name(Z)}" [shape={shape}];')
    for Z in filters:
        for W in filters:
            # covers: the generators differ by exactly one atom
            if Z <= W and sum(1 for a in ba.atoms if a & Z.generator and not a & W.generator) == 1:
                lines.append(f'  "{name(Z)}" -> "{name(W)}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
