"""JSON descriptors for algebras, filters and directed systems.

An algebra descriptor names its construction, e.g.::

    {"base": 3, "provenance": "omega"}
    {"base": 3, "provenance": "clone_power", "index": 3, "filter": {"ground": 3, "generators": [[[0, 1], [2]]]}}
    {"base": 3, "provenance": "limit_reduced_power", "index": 3, "filter": {...}, "Z": {"members": [[0, 1], [0, 1, 2]]}}
    {"base": 2, "provenance": "free", "gens": 1}
    {"base": 3, "provenance": "product", "factors": [{...}, {...}]}
    {"base": 3, "provenance": "quotient", "of": {...}, "partition": [[0, 1], [2]]}
"""
from __future__ import annotations

import json
from pathlib import Path

from .algebra import (
    AlgebraError,
    Congruence,
    VarietyAlgebra,
    direct_product,
    omega,
    quotient_algebra,
    subalgebra,
)
from .clone import (
    ClonePower,
    FreeQuotient,
    GeneratorAssignment,
    free_algebra,
    limit_reduced_power,
)
from .partitions import BAFilter, PartitionFilter, SetPartition, mask_of


class DescriptorError(ValueError):
    pass


def _require(data: dict, *keys):
    for k in keys:
        if k not in data:
            raise DescriptorError(f"descriptor lacks {k!r}")


def load_filter(data: dict) -> PartitionFilter:
    _require(data, "ground", "generators")
    return PartitionFilter.from_json(data)


def load_Z(ba, data: dict) -> BAFilter:
    if "generator" in data:
        return BAFilter(ba, mask_of(data["generator"]))
    _require(data, "members")
    return BAFilter.from_members(ba, [mask_of(m) for m in data["members"]])


def load_algebra(data: dict) -> VarietyAlgebra:
    if not isinstance(data, dict):
        raise DescriptorError("algebra descriptor must be an object")
    _require(data, "base", "provenance")
    base, kind = int(data["base"]), data["provenance"]
    try:
        if kind == "omega":
            return omega(base)
        if kind == "clone_power":
            _require(data, "filter")
            return ClonePower(base, load_filter(data["filter"]))
        if kind == "limit_reduced_power":
            _require(data, "filter", "Z")
            cp = ClonePower(base, load_filter(data["filter"]))
            return limit_reduced_power(cp, load_Z(cp.ba, data["Z"]))
        if kind == "free":
            _require(data, "gens")
            return free_algebra(base, int(data["gens"])).algebra
        if kind == "free_quotient":
            _require(data, "gens", "Z")
            return FreeQuotient(free_algebra(base, int(data["gens"])), mask_of(data["Z"]["generator"]))
        if kind == "product":
            _require(data, "factors")
            algs = [load_algebra(d) for d in data["factors"]]
            if len(algs) < 2:
                raise DescriptorError("a product needs two factors")
            out = algs[0]
            for a in algs[1:]:
                out = direct_product(out, a)
            return out
        if kind == "quotient":
            _require(data, "of", "partition")
            parent = load_algebra(data["of"])
            return quotient_algebra(parent, Congruence(parent, SetPartition.from_json(data["partition"], parent.size)))
        if kind == "subalgebra":
            _require(data, "of", "subset")
            return subalgebra(load_algebra(data["of"]), data["subset"])[0]
    except (KeyError, TypeError) as exc:
        raise DescriptorError(f"malformed {kind} descriptor: {exc}") from None
    raise DescriptorError(f"unknown provenance {kind!r}")


def dump_algebra(alg: VarietyAlgebra) -> dict:
    return alg.to_json()


def load_assignment(target: VarietyAlgebra, values) -> GeneratorAssignment:
    return GeneratorAssignment(target, tuple(int(v) for v in values))


def load_system(data: dict):
    """``{"target": algebra, "poset": [[d, e], ...], "stages": [{"index_size": k, "alpha": [...]}]}``."""
    from .uniform import DirectedSystem

    _require(data, "target", "stages")
    target = load_algebra(data["target"])
    stages = []
    for st in data["stages"]:
        _require(st, "alpha")
        alpha = load_assignment(target, st["alpha"])
        if "index_size" in st and int(st["index_size"]) != alpha.index_size:
            raise DescriptorError("index_size disagrees with the assignment")
        stages.append(alpha)
    return DirectedSystem(target, stages, [tuple(e) for e in data.get("poset", [])])


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DescriptorError(f"{path}: {exc}") from None


def write_json(path, data) -> None:
    Path(path).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")


__all__ = ["DescriptorError", "load_algebra", "dump_algebra", "load_filter", "load_Z", "load_system",
           "load_assignment", "read_json", "write_json", "AlgebraError"]
