"""Finite semigroups as multiplication tables.

A table of size n maps element indices: table[x][y] is the index of x*y.
Associativity is checked on construction (fully up to size 150, by sampling
above that, where a full triple scan is no longer a desk-scale operation).
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError, ParseError

MAX_MONOGENIC = 16
_FULL_ASSOC_LIMIT = 150
_ASSOC_SAMPLES = 1_000_000


@dataclass(frozen=True)
class OpTable:
    """An associative multiplication table with element display names."""

    table: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...]

    def __init__(self, table, labels=None, validate: str = "auto"):
        rows = tuple(tuple(int(v) for v in row) for row in table)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("table must be square")
        if any(not 0 <= v < n for r in rows for v in r):
            raise ValueError("table entries must be element indices")
        if labels is None:
            labels = tuple(f"x{i}" for i in range(n))
        else:
            labels = tuple(str(s) for s in labels)
            if len(labels) != n or len(set(labels)) != n:
                raise ValueError("labels must be distinct, one per element")
        object.__setattr__(self, "table", rows)
        object.__setattr__(self, "labels", labels)
        if validate == "auto":
            validate = "full" if n <= _FULL_ASSOC_LIMIT else "sample"
        if validate != "skip" and n > 0:
            witness = find_nonassociative_triple(self, sample_only=(validate == "sample"))
            if witness is not None:
                x, y, z = witness
                raise ValueError(f"not associative at ({x},{y},{z})")

    @property
    def size(self) -> int:
        return len(self.table)

    def mult(self, x: int, y: int) -> int:
        return self.table[x][y]

    def array(self) -> np.ndarray:
        return np.array(self.table, dtype=np.int64)

    def label_index(self, label: str) -> int:
        return self.labels.index(label)

    def to_json(self) -> dict:
        return {"size": self.size, "labels": list(self.labels),
                "table": [list(r) for r in self.table]}

    @classmethod
    def from_json(cls, data: dict) -> "OpTable":
        try:
            size = int(data["size"])
            table = data["table"]
            labels = data.get("labels")
            if len(table) != size:
                raise ValueError("size field disagrees with table")
            return cls(table, labels)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"bad table object: {exc}") from exc


def load_table(path: str) -> OpTable:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read table file {path}: {exc}") from exc
    return OpTable.from_json(data)


def save_table(op: OpTable, path: str):
    with open(path, "w") as fh:
        json.dump(op.to_json(), fh, indent=1)
        fh.write("\n")


def find_nonassociative_triple(op: OpTable, sample_only: bool = False):
    """A triple (x, y, z) with (xy)z != x(yz), or None.

    Full scan via array indexing; for very large tables a seeded sample of
    one million triples is used instead.
    """
    n = op.size
    if n == 0:
        return None
    t = op.array()
    if not sample_only:
        left = t[t]            # left[x,y,z] = t[t[x,y],z]
        right = t[:, t]        # right[x,y,z] = t[x,t[y,z]]
        bad = np.argwhere(left != right)
        if len(bad):
            x, y, z = bad[0]
            return int(x), int(y), int(z)
        return None
    rng = np.random.default_rng(20240811)
    xs = rng.integers(0, n, size=_ASSOC_SAMPLES)
    ys = rng.integers(0, n, size=_ASSOC_SAMPLES)
    zs = rng.integers(0, n, size=_ASSOC_SAMPLES)
    bad = np.nonzero(t[t[xs, ys], zs] != t[xs, t[ys, zs]])[0]
    if len(bad):
        i = int(bad[0])
        return int(xs[i]), int(ys[i]), int(zs[i])
    return None


def check_associative(table: Sequence[Sequence[int]]) -> bool:
    """Full associativity scan on a raw table (no construction-time check)."""
    n = len(table)
    if n == 0:
        return True
    t = np.array([[int(v) for v in row] for row in table], dtype=np.int64)
    if t.min() < 0 or t.max() >= n:
        return False
    return bool(np.array_equal(t[t], t[:, t]))


@dataclass(frozen=True)
class MonogenicSpec:
    """Monogenic semigroup with the given index r and period m.

    Elements are the powers a, a^2, ..., a^(r+m-1) with a^(r+m) = a^r.
    """

    r: int
    m: int

    def __post_init__(self):
        if self.r < 1 or self.m < 1:
            raise ValueError("index and period must be positive")
        if self.size > MAX_MONOGENIC:
            raise CapacityError(f"monogenic size {self.size} exceeds {MAX_MONOGENIC}")

    @property
    def size(self) -> int:
        return self.r + self.m - 1

    @property
    def generator_position(self) -> int:
        return 0

    def reduce_exponent(self, e: int) -> int:
        """Canonical exponent in 1..r+m-1 of a^e."""
        if e < 1:
            raise ValueError("exponents start at 1")
        if e <= self.size:
            return e
        return self.r + (e - self.r) % self.m

    def element_of_power(self, e: int) -> int:
        return self.reduce_exponent(e) - 1

    @property
    def idempotent_exponent(self) -> int:
        """The unique multiple of the period among r..r+m-1."""
        for e in range(self.r, self.r + self.m):
            if e % self.m == 0:
                return e
        raise AssertionError("unreachable")

    def __str__(self):
        return f"M({self.r},{self.m})"


def power_label(e: int) -> str:
    return "a" if e == 1 else f"a^{e}"


def make_monogenic(spec: MonogenicSpec | tuple[int, int]) -> OpTable:
    if not isinstance(spec, MonogenicSpec):
        spec = MonogenicSpec(*spec)
    n = spec.size
    rows = [[spec.element_of_power(i + j) for j in range(1, n + 1)] for i in range(1, n + 1)]
    labels = [power_label(e) for e in range(1, n + 1)]
    return OpTable(rows, labels)


def idempotents(op: OpTable) -> tuple[int, ...]:
    return tuple(e for e in range(op.size) if op.table[e][e] == e)


def power_ideal(op: OpTable, k: int) -> tuple[int, ...]:
    """All products of exactly k elements, computed iteratively."""
    if k < 1:
        raise ValueError("k must be positive")
    current = frozenset(range(op.size))
    for _ in range(k - 1):
        current = frozenset(op.table[x][y] for x in range(op.size) for y in current)
    return tuple(sorted(current))


def ideal_chain(op: OpTable) -> list[tuple[int, ...]]:
    """The descending chain of k-fold product ideals until it stabilizes.

    chain[0] is the whole semigroup; chain[i] is the (i+1)-fold ideal.  The
    last entry repeats once so the stabilization point is visible.
    """
    chain = [tuple(range(op.size))]
    while True:
        prev = chain[-1]
        nxt = tuple(sorted({op.table[x][y] for x in range(op.size) for y in prev}))
        chain.append(nxt)
        if nxt == prev:
            return chain


def element_depths(op: OpTable) -> tuple[int, ...]:
    """Per element, the largest k (capped at chain stabilization) with the
    element in the k-fold product ideal.  Automorphism-invariant."""
    chain = ideal_chain(op)
    depth = [1] * op.size
    for k, members in enumerate(chain[1:-1], start=2):
        for x in members:
            depth[x] = k
    return tuple(depth)


def max_subgroup_of_monogenic(spec: MonogenicSpec) -> tuple[tuple[int, ...], int]:
    """The maximal (cyclic) subgroup of a monogenic semigroup and its
    neutral element, as element indices."""
    members = tuple(range(spec.r - 1, spec.size))
    neutral = spec.idempotent_exponent - 1
    return members, neutral


def is_closed(op: OpTable, subset: Iterable[int]) -> bool:
    sub = set(subset)
    return all(op.table[x][y] in sub for x in sub for y in sub)


def subtable(op: OpTable, subset: Sequence[int]) -> OpTable:
    """Restriction of the table to a multiplicatively closed element subset.

    Elements are renumbered in the order given; labels carry over.
    """
    subset = list(subset)
    if not is_closed(op, subset):
        raise ValueError("subset is not closed under the operation")
    pos = {x: i for i, x in enumerate(subset)}
    rows = [[pos[op.table[x][y]] for y in subset] for x in subset]
    return OpTable(rows, [op.labels[x] for x in subset])


def monogenic_specs(max_size: int, min_size: int = 1) -> list[MonogenicSpec]:
    """All monogenic specs with min_size <= r+m-1 <= max_size, ordered by
    (size, index)."""
    out = []
    for size in range(min_size, max_size + 1):
        for r in range(1, size + 1):
            out.append(MonogenicSpec(r, size - r + 1))
    return out


def random_triple_check(op: OpTable, samples: int, seed: int = 0) -> int:
    """Count associativity failures over `samples` seeded random triples."""
    n = op.size
    t = op.array()
    rng = np.random.default_rng(seed)
    xs = rng.integers(0, n, size=samples)
    ys = rng.integers(0, n, size=samples)
    zs = rng.integers(0, n, size=samples)
    return int(np.count_nonzero(t[t[xs, ys], zs] != t[xs, t[ys, zs]]))
