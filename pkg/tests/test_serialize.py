import numpy as np
import pytest

from limitpower.algebra import (
    congruence_lattice,
    direct_product,
    find_isomorphism,
    omega,
    quotient_algebra,
    subalgebra,
)
from limitpower.clone import ClonePower, full_power, limit_reduced_power
from limitpower.partitions import BAFilter, all_filters
from limitpower.serialize import DescriptorError, load_algebra, load_system, read_json, write_json
from limitpower.verify import target_catalog


def same_algebra(a, b):
    return (a.base == b.base and np.array_equal(a.vectors, b.vectors) and np.array_equal(a.labels, b.labels))


@pytest.mark.parametrize("base,cap", [(2, 16), (3, 27)])
def test_catalog_round_trip(base, cap):
    for alg in target_catalog(base, cap):
        back = load_algebra(alg.to_json())
        assert back.size == alg.size
        if back.provenance == alg.provenance and back.provenance != "free_quotient":
            assert same_algebra(back, alg), alg.to_json()
        else:
            assert find_isomorphism(alg, back) is not None


def test_constructions_round_trip(tmp_path):
    cp = ClonePower(3, all_filters(3)[2])
    full = full_power(3, 2)
    L = limit_reduced_power(full, BAFilter(full.ba, 1))
    P = direct_product(omega(3), omega(3))
    theta = [c for c in congruence_lattice(P) if not c.is_diagonal and not c.is_full][0]
    Q = quotient_algebra(P, theta)
    S = subalgebra(cp, [cp.constant(a) for a in range(3)])[0]
    for alg in (cp, L, P, Q, S):
        path = tmp_path / "a.json"
        write_json(path, alg.to_json())
        back = load_algebra(read_json(path))
        assert back.size == alg.size
        assert find_isomorphism(alg, back) is not None


@pytest.mark.parametrize("data,msg", [
    ([], "must be an object"),
    ({"base": 3}, "provenance"),
    ({"base": 3, "provenance": "clone_power"}, "filter"),
    ({"base": 3, "provenance": "product", "factors": [{"base": 3, "provenance": "omega"}]}, "two factors"),
    ({"base": 3, "provenance": "wat"}, "unknown provenance"),
])
def test_bad_descriptors(data, msg):
    with pytest.raises(DescriptorError, match=msg):
        load_algebra(data)


def test_load_system():
    target = {"base": 3, "provenance": "product",
              "factors": [{"base": 3, "provenance": "omega"}, {"base": 3, "provenance": "omega"}]}
    system = load_system({"target": target, "poset": [[0, 1]],
                          "stages": [{"alpha": [5]}, {"index_size": 2, "alpha": [5, 1]}]})
    assert system.target.size == 9
    with pytest.raises(DescriptorError, match="index_size"):
        load_system({"target": target, "stages": [{"index_size": 3, "alpha": [5]}]})
