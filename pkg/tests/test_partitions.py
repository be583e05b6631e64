from itertools import product

import pytest
from hypothesis import given, strategies as st

from limitpower.partitions import (
    BAError,
    BAFilter,
    BlockBooleanAlgebra,
    PartitionError,
    PartitionFilter,
    SetPartition,
    all_filters,
    all_partitions,
    ba_filters,
    block_boolean_algebra,
    filter_contains,
    filter_generate,
    filter_lattice_dot,
    join,
    kernel_partition,
    mask_of,
    meet,
    members_of,
    preimage_partition,
    principal_filter,
    refinement_dot,
    refines,
)

from oracles import ba_filters_brute, canon, is_ultra_brute, meet_brute, partition_filters_brute, refines_brute

P = SetPartition.from_blocks

BELL = [1, 1, 2, 5, 15, 52]


def partitions_of(n):
    return st.lists(st.integers(0, n - 1), min_size=n, max_size=n).map(SetPartition)


sizes = st.integers(1, 6)


@st.composite
def partition_pair(draw, k=2):
    n = draw(sizes)
    return [draw(partitions_of(n)) for _ in range(k)]


# -- examples -------------------------------------------------------------------

def test_refines_examples():
    Q = P([[0, 2], [1]])
    assert refines(SetPartition.discrete(3), Q)
    assert refines(Q, Q)
    assert not refines(P([[0, 1], [2]]), SetPartition.discrete(3))


def test_meet_examples():
    a, b = P([[0, 1], [2, 3]]), P([[0, 2], [1, 3]])
    assert meet(a, b) == SetPartition.discrete(4)
    assert meet(a, a) == a
    assert meet(a, SetPartition.indiscrete(4)) == a


def test_join_examples():
    a, b = P([[0, 1], [2, 3]]), P([[1, 2], [0], [3]])
    assert join(a, b) == SetPartition.indiscrete(4)
    assert join(a, a) == a
    assert join(a, SetPartition.discrete(4)) == a


def test_ground_mismatch():
    with pytest.raises(PartitionError):
        meet(SetPartition.discrete(2), SetPartition.discrete(3))
    with pytest.raises(PartitionError):
        P([[0, 1], [1, 2]])
    with pytest.raises(PartitionError):
        P([[0], [2]], 3)


def test_preimage_examples():
    Q = P([[0, 1], [2]])
    assert preimage_partition([0, 1, 2], Q) == Q
    assert preimage_partition([0, 0, 1], SetPartition.discrete(2)) == P([[0, 1], [2]])
    assert kernel_partition([5, 5, 7]) == P([[0, 1], [2]])


def test_filter_generate_examples():
    G = P([[0, 1], [2]])
    F = principal_filter(G)
    assert {m for m in F.members()} == {G, SetPartition.indiscrete(3)}
    assert len(filter_generate(3, [SetPartition.discrete(3)]).members()) == 5
    F2 = filter_generate(3, [P([[0, 1], [2]]), P([[0, 2], [1]])])
    assert F2.base == SetPartition.discrete(3)
    assert len(F2.members()) == 5


def test_filter_contains_examples():
    G = P([[0, 1], [2, 3]])
    F = principal_filter(G)
    assert filter_contains(F, G)
    assert not filter_contains(F, P([[0], [1], [2, 3]]))
    a, b = P([[0, 1], [2], [3]]), P([[0], [1, 2, 3]])
    F2 = filter_generate(4, [a, b])
    assert filter_contains(F2, meet(a, b))


def test_block_boolean_algebra_examples():
    ba = block_boolean_algebra(principal_filter(P([[0, 1], [2]])))
    assert ba.to_json() == [[], [0, 1], [2], [0, 1, 2]]
    full = block_boolean_algebra(principal_filter(SetPartition.discrete(3)))
    assert len(full.elements) == 8
    top = block_boolean_algebra(principal_filter(SetPartition.indiscrete(3)))
    assert top.elements == (0, 7)


def test_ba_filter_examples():
    two = BlockBooleanAlgebra(2, [3])
    fs = ba_filters(two)
    assert len(fs) == 2
    assert sum(Z.ultra for Z in fs) == 1
    assert [Z.proper for Z in fs] == [True, False]

    four = BlockBooleanAlgebra(3, [0b011, 0b100])
    proper = [set(Z.members) for Z in ba_filters(four) if Z.proper]
    assert sorted(map(sorted, proper)) == sorted(map(sorted, [{7}, {7, 3}, {7, 4}]))
    assert sum(Z.ultra for Z in ba_filters(four)) == 2

    eight = BlockBooleanAlgebra(3, [1, 2, 4])
    assert sum(Z.ultra for Z in ba_filters(eight)) == 3


def test_ba_filter_errors():
    ba = BlockBooleanAlgebra(3, [0b011, 0b100])
    with pytest.raises(BAError):
        BAFilter(ba, 0b001)
    with pytest.raises(BAError):
        BAFilter.from_members(ba, [0b011])
    with pytest.raises(BAError):
        BAFilter.from_members(ba, [7, 3, 4])


def test_json_round_trip():
    F = filter_generate(4, [P([[0, 1], [2, 3]]), P([[0, 1, 2], [3]])])
    G = PartitionFilter.from_json(F.to_json())
    assert G == F and G.base == P([[0, 1], [2], [3]])
    assert SetPartition.from_json(F.base.to_json(), 4) == F.base


def test_dot_exports():
    dot = refinement_dot(3)
    assert dot.startswith("digraph") and dot.count("->") == 6
    ba = block_boolean_algebra(principal_filter(P([[0, 1], [2]])))
    assert filter_lattice_dot(ba).count("->") == 4


# -- oracle comparisons ---------------------------------------------------------

@pytest.mark.parametrize("n", range(1, 6))
def test_partition_count_is_bell(n):
    parts = list(all_partitions(n))
    assert len(parts) == BELL[n] == len(set(parts))


@pytest.mark.parametrize("n", range(1, 5))
def test_exhaustive_against_brute(n):
    parts = list(all_partitions(n))
    for p, q in product(parts, repeat=2):
        assert refines(p, q) == refines_brute(p.labels, q.labels)
        assert meet(p, q).labels == meet_brute(p.labels, q.labels)


@pytest.mark.parametrize("n", range(1, 4))
def test_filters_against_brute(n):
    brute = {frozenset(fam) for fam in partition_filters_brute(n)}
    ours = {frozenset(m.labels for m in F.members()) for F in all_filters(n)}
    assert ours == brute


@pytest.mark.parametrize("atoms", [[7], [3, 4], [1, 2, 4], [1, 6], [1, 2, 4, 8]])
def test_ba_filters_against_brute(atoms):
    ground = max(atoms).bit_length()
    ba = BlockBooleanAlgebra(ground, atoms)
    brute = ba_filters_brute(ba.elements, ba.top)
    ours = ba_filters(ba)
    assert {frozenset(Z.members) for Z in ours} == set(brute)
    for Z in ours:
        assert Z.ultra == is_ultra_brute(frozenset(Z.members), brute)


# -- properties -----------------------------------------------------------------

@given(partition_pair(3))
def test_lattice_axioms(ps):
    a, b, c = ps
    assert a & a == a and a | a == a
    assert a & b == b & a and a | b == b | a
    assert (a & b) & c == a & (b & c)
    assert (a | b) | c == a | (b | c)
    assert a & (a | b) == a and a | (a & b) == a
    assert (a <= b) == (a & b == a) == (a | b == b)


@given(partition_pair(2))
def test_meet_is_greatest_lower_bound(ps):
    a, b = ps
    m = a & b
    assert m <= a and m <= b
    for c in all_partitions(a.n) if a.n <= 4 else []:
        if c <= a and c <= b:
            assert c <= m


@given(partition_pair(2))
def test_canonical_form_unique(ps):
    a, b = ps
    assert (a == b) == (a.to_json() == b.to_json())
    relabel = SetPartition([7 * x + 3 for x in a.labels])
    assert relabel == a and hash(relabel) == hash(a)


@given(st.data())
def test_preimage_distributes_over_meets(data):
    n = data.draw(st.integers(1, 6))
    m = data.draw(st.integers(1, 6))
    f = data.draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n))
    qs = data.draw(st.lists(partitions_of(m), min_size=1, max_size=4))
    lhs = preimage_partition(f, qs[0] if len(qs) == 1 else _meet_all(qs))
    rhs = _meet_all([preimage_partition(f, q) for q in qs])
    assert lhs == rhs


@given(st.data())
def test_preimage_functorial(data):
    n, m, k = (data.draw(st.integers(1, 5)) for _ in range(3))
    g = data.draw(st.lists(st.integers(0, m - 1), min_size=n, max_size=n))
    f = data.draw(st.lists(st.integers(0, k - 1), min_size=m, max_size=m))
    Q = data.draw(partitions_of(k))
    fg = [f[x] for x in g]
    assert preimage_partition(fg, Q) == preimage_partition(g, preimage_partition(f, Q))


def _meet_all(ps):
    out = ps[0]
    for p in ps[1:]:
        out = out & p
    return out


@pytest.mark.parametrize("n", range(1, 5))
def test_block_algebra_closed_for_every_filter(n):
    for F in all_filters(n):
        ba = block_boolean_algebra(F)
        els = set(ba.elements)
        top = (1 << n) - 1
        assert 0 in els and top in els
        assert all(top & ~r in els for r in els)
        assert all(r & s in els and r | s in els for r in els for s in els)
        brute = {0} | {mask_of(b) for P_ in F.members() for b in P_.blocks}
        assert els == brute


@given(st.sets(st.integers(1, 15), min_size=0, max_size=3), st.data())
def test_ultrafilter_dichotomy(seeds, data):
    atoms = []
    used = 0
    for s in sorted(seeds):
        if s & used == 0:
            atoms.append(s)
            used |= s
    rest = 15 & ~used
    if rest:
        atoms.append(rest)
    ba = BlockBooleanAlgebra(4, atoms)
    for Z in ba_filters(ba):
        assert (Z.generator in Z.members) and ba.top in Z.members
        assert Z.proper == (0 not in Z.members)
        if Z.ultra:
            assert Z.proper
            for r in ba.elements:
                assert (r in Z) != (ba.complement(r) in Z)
        elif Z.proper and len(ba.atoms) > 1:
            assert any(r not in Z and ba.complement(r) not in Z for r in ba.elements)


def test_members_of_and_mask():
    assert members_of(mask_of([0, 2, 5])) == [0, 2, 5]
    assert canon([3, 3, 1]) == (0, 0, 1)
