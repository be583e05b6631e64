"""Function tables on ``range(base)`` and the declared generating table sets.

A table of arity ``k`` is stored row-major: the value at ``(x_1, ..., x_k)``
sits at index ``sum(x_j * base**(k-j))``.  Arity 0 is a named constant.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product

import numpy as np


class TableError(ValueError):
    pass


@dataclass(frozen=True)
class FunctionTable:
    base: int
    arity: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.arity < 0:
            raise TableError("negative arity")
        if len(self.entries) != self.base ** self.arity:
            raise TableError(f"arity {self.arity} over {self.base} needs {self.base ** self.arity} entries")
        if any(not 0 <= v < self.base for v in self.entries):
            raise TableError("entry outside the base set")

    @classmethod
    def constant(cls, base: int, value: int) -> "FunctionTable":
        return cls(base, 0, (value,))

    @classmethod
    def from_function(cls, base: int, arity: int, fn) -> "FunctionTable":
        return cls(base, arity, tuple(fn(*args) for args in product(range(base), repeat=arity)))

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.entries, dtype=np.uint8)

    def __call__(self, *args: int) -> int:
        if len(args) != self.arity:
            raise TableError(f"expected {self.arity} arguments, got {len(args)}")
        idx = 0
        for x in args:
            idx = idx * self.base + x
        return self.entries[idx]

    def to_json(self) -> dict:
        return {"arity": self.arity, "entries": list(self.entries)}

    @classmethod
    def from_json(cls, base: int, data: dict) -> "FunctionTable":
        return cls(base, data["arity"], tuple(data["entries"]))


def all_tables(base: int, arity: int) -> np.ndarray:
    """Every table of the given arity, one per row, in lexicographic order."""
    width = base ** arity
    count = base ** width
    if count > 1 << 22:
        raise TableError(f"{count} tables of arity {arity} over {base} is too many to enumerate")
    rows = np.indices((base,) * width, dtype=np.uint8).reshape(width, -1).T
    return np.ascontiguousarray(rows)


def pairing_tables(base: int, max_pairs: int) -> np.ndarray:
    """Binary tables that are injective on some set of at most ``max_pairs`` pairs.

    For every such set ``R`` (in lexicographic order) the table sends the
    members of ``R`` to ``0, 1, ...`` and everything else to 0.  This is the
    finite stand-in for an injection ``A x A -> A``.
    """
    max_pairs = min(max_pairs, base)
    pairs = list(product(range(base), repeat=2))
    rows = []
    for r in range(1, max_pairs + 1):
        for R in combinations(range(len(pairs)), r):
            row = np.zeros(base * base, dtype=np.uint8)
            for code, p in enumerate(R):
                row[p] = code
            rows.append(row)
    return np.array(rows, dtype=np.uint8)


class TableSet:
    """The tables against which compatibility and homomorphisms are checked.

    ``by_arity`` maps arity to a ``(T, base**arity)`` uint8 array.  A set is
    ``symmetric`` when every binary table's argument swap is also present,
    which lets translation enumeration fill one argument slot only.
    """

    def __init__(self, base: int, by_arity: dict[int, np.ndarray], symmetric: bool = False, note: str = ""):
        self.base = base
        self.by_arity = {k: np.ascontiguousarray(v, dtype=np.uint8) for k, v in sorted(by_arity.items()) if len(v)}
        self.symmetric = symmetric
        self.note = note
        for k, arr in self.by_arity.items():
            if k < 1 or arr.ndim != 2 or arr.shape[1] != base ** k:
                raise TableError(f"bad table block for arity {k}")

    @classmethod
    def standard(cls, base: int, seed: int = 0, sample: int = 64) -> "TableSet":
        """All unary and binary tables for ``base <= 3`` (plus ternary for 2).

        For larger bases: all unary tables, every pairing table on up to
        ``base`` pairs, and ``sample`` seeded random binary tables.
        """
        if base < 1:
            raise TableError("empty base set")
        if base == 1:
            return cls(1, {1: all_tables(1, 1)}, symmetric=True, note="complete")
        if base <= 3:
            by = {1: all_tables(base, 1), 2: all_tables(base, 2)}
            if base == 2:
                by[3] = all_tables(2, 3)
            return cls(base, by, symmetric=True, note="complete up to arity %d" % max(by))
        rng = np.random.default_rng(seed)
        binary = np.concatenate([
            pairing_tables(base, base),
            rng.integers(0, base, size=(sample, base * base), dtype=np.uint8),
        ])
        return cls(base, {1: all_tables(base, 1), 2: binary}, symmetric=False,
                   note=f"unary complete; pairing tables on <= {base} pairs; {sample} random binary (seed {seed})")

    @property
    def max_arity(self) -> int:
        return max(self.by_arity)

    def __len__(self):
        return sum(len(v) for v in self.by_arity.values())

    def table(self, arity: int, row: int) -> FunctionTable:
        return FunctionTable(self.base, arity, tuple(int(v) for v in self.by_arity[arity][row]))

    def describe(self) -> dict:
        return {"base": self.base, "counts": {str(k): len(v) for k, v in self.by_arity.items()}, "note": self.note}


_STANDARD: dict[int, TableSet] = {}


def standard_tables(base: int) -> TableSet:
    """Cached :meth:`TableSet.standard` with the default seed."""
    if base not in _STANDARD:
        _STANDARD[base] = TableSet.standard(base)
    return _STANDARD[base]
