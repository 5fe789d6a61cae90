"""The superextension of a finite semigroup.

The maximal linked upfamilies over a semigroup S carry an associative
product: C belongs to A*B exactly when the set of elements a whose left
quotient of C lies in B is itself a member of A.  That membership test is
equivalent to the generated-family form of the product (the test suite
checks it against a direct evaluation of that definition) and is polynomial
in 2^|S| per product.

Element label scheme (sizes 3, 4, 5), rendered into table labels and used
by the expected-results catalog; indices are 1-based powers of the
generator:

* size 3: "a","a^2","a^3" (principal) and "Tr" (the three 2-subsets).
* size 4: principal, "Tr_i" (2-subsets avoiding point i), "Sq_i" (the
  3-set avoiding i plus the pairs through i).
* size 5: principal; "O" (all subsets of size >= 3); "T_ij" (the pair ij
  plus balanced triples); "Tr_ijk" (2-subsets inside ijk); "L^i" (pairs
  through i plus the 4-set avoiding i); "D^n_ijk" (pairs from n into ijk
  plus ijk itself); "L^i_jk" (pairs ij, ik plus the triples meeting ijk in
  exactly {i} or {j,k}).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .errors import CapacityError
from .setfam import (FamilyUniverse, GroundSet, LinkedFamily, code_of,
                     enumerate_mlf, member_mask, minimize, points_of)
from .tables import MonogenicSpec, OpTable, make_monogenic, power_ideal

_BATCH_CAP = 6  # ground sizes with at most 64 subsets fit the uint64 batch path


@lru_cache(maxsize=32)
def _inv_table_cached(table: tuple[tuple[int, ...], ...], n: int) -> tuple[tuple[int, ...], ...]:
    """inv[a][C] = the subset of x with a*x in C."""
    full = (1 << n) - 1
    out = []
    for a in range(n):
        row = table[a]
        per_c = [0] * (full + 1)
        for c in range(full + 1):
            m = 0
            for x in range(n):
                if c >> row[x] & 1:
                    m |= 1 << x
            per_c[c] = m
        out.append(tuple(per_c))
    return tuple(out)


def _star_mask(memb_a: int, memb_b: int, inv, n: int) -> int:
    full = (1 << n) - 1
    out = 0
    for c in range(1, full + 1):
        m = 0
        for a in range(n):
            if memb_b >> inv[a][c] & 1:
                m |= 1 << a
        if memb_a >> m & 1:
            out |= 1 << c
    return out


def _mask_to_minsets(mask: int, n: int) -> tuple[int, ...]:
    from .setfam import _up_down

    _, down = _up_down(n)
    full = (1 << n) - 1
    mins = []
    for s in range(1, full + 1):
        if mask >> s & 1 and down[s] & mask == 1 << s:
            mins.append(s)
    return tuple(mins)


def star(a: LinkedFamily, b: LinkedFamily, base: OpTable) -> LinkedFamily:
    """The induced product of two maximal linked families over `base`."""
    n = base.size
    if a.ground.n != n or b.ground.n != n:
        raise ValueError("family ground size must match the semigroup size")
    inv = _inv_table_cached(base.table, n)
    mask = _star_mask(a.member_mask(), b.member_mask(), inv, n)
    return LinkedFamily(a.ground, _mask_to_minsets(mask, n))


@dataclass(frozen=True)
class ElementLabel:
    """Canonical name of a superextension element: kind plus index tuples."""

    kind: str                      # "a", "O", "T", "Tr", "L", "D", "Sq"
    sup: tuple[int, ...] = ()
    sub: tuple[int, ...] = ()

    def render(self, base_labels: Sequence[str] | None = None) -> str:
        if self.kind == "a":
            i = self.sub[0]
            if base_labels is not None:
                return base_labels[i - 1]
            return "a" if i == 1 else f"a^{i}"
        body = self.kind
        if self.sup:
            body += "^" + "".join(map(str, self.sup))
        if self.sub:
            body += "_" + "".join(map(str, self.sub))
        return body


def _label_definitions(n: int) -> list[tuple[ElementLabel, tuple[int, ...]]]:
    """Label and generating sets (1-based point indices become bit 0-based)."""
    pts = list(range(1, n + 1))
    bit = lambda i: 1 << (i - 1)
    out: list[tuple[ElementLabel, tuple[int, ...]]] = []
    for i in pts:
        out.append((ElementLabel("a", sub=(i,)), (bit(i),)))
    if n == 3:
        out.append((ElementLabel("Tr"), tuple(bit(i) | bit(j) for i, j in combinations(pts, 2))))
        return out
    if n == 4:
        for i in pts:
            rest = [p for p in pts if p != i]
            out.append((ElementLabel("Tr", sub=(i,)),
                        tuple(bit(a) | bit(b) for a, b in combinations(rest, 2))))
        for i in pts:
            rest = [p for p in pts if p != i]
            sets = [code_of([p - 1 for p in rest])]
            sets += [bit(i) | bit(x) for x in rest]
            out.append((ElementLabel("Sq", sub=(i,)), tuple(sets)))
        return out
    if n == 5:
        out.append((ElementLabel("O"),
                    tuple(code_of([a - 1, b - 1, c - 1]) for a, b, c in combinations(pts, 3))))
        for i, j in combinations(pts, 2):
            sets = [bit(i) | bit(j)]
            for trip in combinations(pts, 3):
                code = code_of([p - 1 for p in trip])
                if len({i, j} & set(trip)) == 1:
                    sets.append(code)
            out.append((ElementLabel("T", sub=(i, j)), tuple(sets)))
        for trip in combinations(pts, 3):
            i, j, k = trip
            out.append((ElementLabel("Tr", sub=trip),
                        (bit(i) | bit(j), bit(i) | bit(k), bit(j) | bit(k))))
        for i in pts:
            rest = [p for p in pts if p != i]
            sets = [code_of([p - 1 for p in rest])]
            sets += [bit(i) | bit(x) for x in rest]
            out.append((ElementLabel("L", sup=(i,)), tuple(sets)))
        for trip in combinations(pts, 3):
            for nn in pts:
                if nn in trip:
                    continue
                i, j, k = trip
                out.append((ElementLabel("D", sup=(nn,), sub=trip),
                            (bit(nn) | bit(i), bit(nn) | bit(j), bit(nn) | bit(k),
                             bit(i) | bit(j) | bit(k))))
        for j, k in combinations(pts, 2):
            for i in pts:
                if i in (j, k):
                    continue
                sets = [bit(i) | bit(j), bit(i) | bit(k)]
                for trip in combinations(pts, 3):
                    inter = set(trip) & {i, j, k}
                    if inter == {i} or inter == {j, k}:
                        sets.append(code_of([p - 1 for p in trip]))
                out.append((ElementLabel("L", sup=(i,), sub=(j, k)), tuple(sets)))
        return out
    raise CapacityError(f"no label scheme for ground size {n}")


def assign_labels(universe: FamilyUniverse) -> tuple[ElementLabel, ...]:
    """Bijective labeling of a universe on 3, 4 or 5 points."""
    n = universe.ground.n
    defs = _label_definitions(n)
    if len(defs) != len(universe):
        raise AssertionError("label scheme does not cover the universe")
    labels: list[ElementLabel | None] = [None] * len(universe)
    for label, sets in defs:
        idx = universe.index_of(sets)
        if labels[idx] is not None:
            raise AssertionError(f"duplicate label target: {label}")
        labels[idx] = label
    return tuple(labels)  # type: ignore[arg-type]


def _batch_lambda_table(base: OpTable, universe: FamilyUniverse) -> list[list[int]]:
    """All pairwise products at once (membership criterion, vectorized)."""
    n = base.size
    full = (1 << n) - 1
    count = len(universe)
    masks = np.array(universe.member_masks(), dtype=np.uint64)
    subs = np.arange(full + 1, dtype=np.uint64)
    memb = (masks[:, None] >> subs[None, :]) & np.uint64(1)
    memb = memb.astype(bool)
    inv = np.array(_inv_table_cached(base.table, n), dtype=np.int64)
    weights = (1 << np.arange(n)).astype(np.int64)
    out = np.zeros((count, count), dtype=np.uint64)
    for c in range(1, full + 1):
        sel = memb[:, inv[:, c]]                     # [B, a]: a^-1 c in B
        mcodes = sel @ weights                       # subset of elements per B
        res = memb[:, mcodes]                        # [A, B]: that subset in A
        out |= res.astype(np.uint64) << np.uint64(c)
    uniq, inverse = np.unique(out, return_inverse=True)
    idx = np.array([universe.index_of_mask(int(u)) for u in uniq], dtype=np.int64)
    return idx[inverse].reshape(count, count).tolist()


@dataclass
class LambdaSemigroup:
    """A semigroup together with its superextension table.

    `embed` maps base elements to the indices of their principal families in
    the universe order; it is an injective homomorphism into `table`.
    """

    base: OpTable
    universe: FamilyUniverse
    table: OpTable
    embed: tuple[int, ...]
    spec: MonogenicSpec | None = None
    element_labels: tuple[ElementLabel, ...] | None = None
    _subtables: dict = field(default_factory=dict, repr=False)

    def __len__(self):
        return len(self.universe)

    def label_str(self, i: int) -> str:
        return self.table.labels[i]

    def by_label(self, name: str) -> int:
        return self.table.label_index(name)

    def labels_of(self, members: Iterable[int]) -> frozenset[str]:
        return frozenset(self.table.labels[i] for i in members)

    def ideal_members(self, k: int) -> tuple[int, ...]:
        """Indices of families supported inside the k-fold ideal of the base.

        This is the embedded copy of the superextension of the subsemigroup."""
        mask = code_of(power_ideal(self.base, k))
        return tuple(
            i for i, mins in enumerate(self.universe.families)
            if all(s & mask == s for s in mins)
        )

    def ideal_subtable(self, k: int) -> tuple[OpTable, tuple[int, ...]]:
        if k not in self._subtables:
            from .tables import subtable

            members = self.ideal_members(k)
            self._subtables[k] = (subtable(self.table, members), members)
        return self._subtables[k]

    def principal_of_power(self, e: int) -> int:
        if self.spec is None:
            raise ValueError("power lookup needs a monogenic base")
        return self.embed[self.spec.element_of_power(e)]


def build_lambda(
    base: OpTable,
    spec: MonogenicSpec | None = None,
    perf: bool = False,
) -> LambdaSemigroup:
    """Construct the superextension table over `base`.

    Sizes up to 5 are the supported tier; size 6 (a 2646 element table) is
    gated behind perf=True.  The principal embedding is verified to be a
    homomorphism, and the table's associativity is checked on construction.
    """
    n = base.size
    if n > _BATCH_CAP:
        raise CapacityError(f"superextension table capped at base size {_BATCH_CAP}")
    if n == 6 and not perf:
        raise CapacityError("base size 6 is the performance tier; pass perf=True")
    ground = GroundSet(n, base.labels)
    universe = enumerate_mlf(ground)
    rows = _batch_lambda_table(base, universe)

    element_labels: tuple[ElementLabel, ...] | None = None
    if n in (3, 4, 5):
        element_labels = assign_labels(universe)
        names = [lab.render(base.labels) for lab in element_labels]
    else:
        names = []
        for mins in universe.families:
            if len(mins) == 1 and mins[0].bit_count() == 1:
                names.append(base.labels[mins[0].bit_length() - 1])
            else:
                names.append("|".join(ground.subset_str(s) for s in mins))
    table = OpTable(rows, names)

    embed = tuple(universe.principal_index(x) for x in range(n))
    for x in range(n):
        for y in range(n):
            if table.table[embed[x]][embed[y]] != embed[base.table[x][y]]:
                raise AssertionError("principal embedding is not a homomorphism")
    return LambdaSemigroup(base, universe, table, embed, spec, element_labels)


@lru_cache(maxsize=64)
def lambda_of_monogenic(r: int, m: int, perf: bool = False) -> LambdaSemigroup:
    spec = MonogenicSpec(r, m)
    return build_lambda(make_monogenic(spec), spec, perf=perf)


def lambda_hom(
    phi: Sequence[int],
    lam_src: LambdaSemigroup,
    lam_dst: LambdaSemigroup,
) -> tuple[int, ...]:
    """The induced map between superextensions of a base homomorphism.

    Checks that phi is a homomorphism of the bases and that the induced map
    is a homomorphism of the superextension tables.
    """
    a, b = lam_src.base, lam_dst.base
    if len(phi) != a.size:
        raise ValueError("phi must be total on the source")
    for x in range(a.size):
        for y in range(a.size):
            if phi[a.table[x][y]] != b.table[phi[x]][phi[y]]:
                raise ValueError("phi is not a homomorphism of the bases")
    tgt_ground = lam_dst.universe.ground
    out = []
    from .setfam import map_family

    for i in range(len(lam_src)):
        img = map_family(phi, lam_src.universe.family(i), tgt_ground)
        out.append(lam_dst.universe.index[img.minimal_sets])
    ts, td = lam_src.table.table, lam_dst.table.table
    for i in range(len(lam_src)):
        for j in range(len(lam_src)):
            if out[ts[i][j]] != td[out[i]][out[j]]:
                raise AssertionError("induced map failed the homomorphism check")
    return tuple(out)


@dataclass
class ShiftAnalysis:
    """A multiplication shift on (part of) a superextension: its image,
    fibers, and the good-shift / retraction / auto-shift verdicts."""

    lam: LambdaSemigroup
    shift_element: int                 # index in the lambda table
    domain: tuple[int, ...]
    mapping: dict[int, int]
    image: tuple[int, ...]
    fibers: dict[int, tuple[int, ...]]
    good: bool
    retraction: bool
    auto: bool | None = None

    @property
    def fiber_sizes(self) -> dict[int, int]:
        return {k: len(v) for k, v in self.fibers.items()}

    def fibers_by_label(self) -> dict[str, frozenset[str]]:
        lab = self.lam.table.labels
        return {lab[t]: frozenset(lab[x] for x in members)
                for t, members in self.fibers.items()}

    def to_json(self) -> dict:
        lab = self.lam.table.labels
        return {
            "shift": lab[self.shift_element],
            "good": self.good,
            "retraction": self.retraction,
            "auto": self.auto,
            "fibers": {lab[t]: sorted(lab[x] for x in v) for t, v in self.fibers.items()},
        }


def element_shift(
    lam: LambdaSemigroup,
    elt: int,
    domain: Sequence[int] | None = None,
    aut=None,
) -> ShiftAnalysis:
    """Analysis of the left shift by a fixed element, restricted to a
    multiplicatively closed domain (default: everything)."""
    from . import shifts as _shifts
    from .tables import is_closed, subtable

    t = lam.table.table
    dom = tuple(range(len(lam))) if domain is None else tuple(sorted(domain))
    mapping = {i: t[elt][i] for i in dom}
    image = tuple(sorted(set(mapping.values())))
    fibers: dict[int, list[int]] = {}
    for i in dom:
        fibers.setdefault(mapping[i], []).append(i)
    fib = {k: tuple(sorted(v)) for k, v in fibers.items()}

    if domain is None:
        sub_op = lam.table
        local = mapping
    else:
        if not is_closed(lam.table, dom):
            raise ValueError("shift domain must be closed under the operation")
        sub_op = subtable(lam.table, dom)
        pos = {x: i for i, x in enumerate(dom)}
        local = {pos[i]: pos[mapping[i]] for i in dom}
    good = _shifts.is_good_shift(local, sub_op)
    retraction = all(mapping.get(v, None) == v for v in image) and all(
        mapping[t[x][y]] == t[mapping[x]][mapping[y]] for x in dom for y in dom
    )
    auto = None
    if aut is not None and domain is None:
        auto = good and _shifts.is_auto_shift(local, sub_op, aut)
    return ShiftAnalysis(lam, elt, dom, mapping, image, fib, good, retraction, auto)


def shift_analysis(
    lam: LambdaSemigroup,
    k: int,
    domain: Sequence[int] | None = None,
    aut=None,
) -> ShiftAnalysis:
    """Left shift by the k-th power of the generator of a monogenic base.

    k equal to the idempotent exponent gives the homomorphic retraction onto
    the superextension of the maximal subgroup.
    """
    if lam.spec is None:
        raise ValueError("shift_analysis needs a monogenic base")
    if k < 1:
        raise ValueError("k must be positive")
    return element_shift(lam, lam.principal_of_power(k), domain, aut)
