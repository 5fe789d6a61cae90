"""Permutations and permutation groups with stabilizer chains.

Permutations act on 0..degree-1 and are stored as tuples of images.  A group
carries a base-and-strong-generating-set structure: per base point, the orbit
of the point under the generators fixing all earlier base points, together
with transversal permutations.  That supports exact order (a product of orbit
lengths), membership by sifting, and uniform random elements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from random import Random
from typing import Iterable, Sequence

Perm = tuple[int, ...]


def identity(n: int) -> Perm:
    return tuple(range(n))


def is_identity(p: Perm) -> bool:
    return all(i == x for i, x in enumerate(p))


def compose(p: Perm, q: Perm) -> Perm:
    """Apply q first, then p."""
    return tuple(p[x] for x in q)


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, x in enumerate(p):
        inv[x] = i
    return tuple(inv)


def transposition(n: int, a: int, b: int) -> Perm:
    img = list(range(n))
    img[a], img[b] = b, a
    return tuple(img)


def perm_order(p: Perm) -> int:
    seen = [False] * len(p)
    out = 1
    for i in range(len(p)):
        if seen[i]:
            continue
        length = 0
        j = i
        while not seen[j]:
            seen[j] = True
            j = p[j]
            length += 1
        out = math.lcm(out, length)
    return out


def cycle_str(p: Perm) -> str:
    seen = set()
    parts = []
    for i in range(len(p)):
        if i in seen or p[i] == i:
            continue
        cyc = [i]
        j = p[i]
        while j != i:
            seen.add(j)
            cyc.append(j)
            j = p[j]
        parts.append("(%s)" % " ".join(map(str, cyc)))
    return "".join(parts) if parts else "()"


@dataclass
class ChainLevel:
    point: int
    gens: list[Perm]                 # generators fixing all earlier base points
    transversal: dict[int, Perm]     # orbit point -> perm mapping base point there

    def rebuild(self):
        """BFS orbit of the level's base point under the level's generators."""
        tr = {self.point: identity(len(self.gens[0]) if self.gens else 0)}
        if self.gens:
            frontier = [self.point]
            while frontier:
                nxt = []
                for x in frontier:
                    ux = tr[x]
                    for g in self.gens:
                        y = g[x]
                        if y not in tr:
                            tr[y] = compose(g, ux)
                            nxt.append(y)
                frontier = nxt
        self.transversal = tr


@dataclass
class StabChain:
    degree: int
    levels: list[ChainLevel] = field(default_factory=list)

    @property
    def base(self) -> list[int]:
        return [lv.point for lv in self.levels]

    def order(self) -> int:
        out = 1
        for lv in self.levels:
            out *= len(lv.transversal)
        return out

    def sift(self, p: Perm, start: int = 0) -> tuple[Perm, int]:
        """Reduce p through the chain; returns (residue, level reached)."""
        for i in range(start, len(self.levels)):
            lv = self.levels[i]
            x = p[lv.point]
            if x not in lv.transversal:
                return p, i
            p = compose(inverse(lv.transversal[x]), p)
        return p, len(self.levels)

    def contains(self, p: Perm) -> bool:
        res, _ = self.sift(p)
        return is_identity(res)


def _fix_prefix(p: Perm, base: Sequence[int]) -> bool:
    return all(p[b] == b for b in base)


def schreier_sims(gens: Iterable[Perm], degree: int) -> StabChain:
    """Deterministic Schreier-Sims: a stabilizer chain from raw generators.

    Written for small degrees (the generic path is used for groups acting on
    at most a few dozen points); larger groups in this package come out of
    the automorphism search or the direct symmetric-product constructor.
    """
    chain = StabChain(degree)
    strong = [tuple(g) for g in gens if not is_identity(tuple(g))]
    for g in strong:
        if len(g) != degree:
            raise ValueError("generator degree mismatch")

    def gens_at(i: int) -> list[Perm]:
        return [g for g in strong if _fix_prefix(g, chain.base[:i])]

    def extend_base_for(p: Perm):
        for x in range(degree):
            if p[x] != x:
                chain.levels.append(ChainLevel(x, [], {}))
                return
        raise AssertionError("identity passed to extend_base_for")

    def rebuild(i: int):
        lv = chain.levels[i]
        lv.gens = gens_at(i)
        lv.rebuild()

    for g in strong:
        if not chain.levels:
            extend_base_for(g)
    for i in range(len(chain.levels)):
        rebuild(i)

    changed = True
    while changed:
        changed = False
        for i in range(len(chain.levels) - 1, -1, -1):
            lv = chain.levels[i]
            for x in sorted(lv.transversal):
                ux = lv.transversal[x]
                for s in lv.gens:
                    # Schreier generator for this orbit edge
                    sg = compose(inverse(lv.transversal[s[x]]), compose(s, ux))
                    if is_identity(sg):
                        continue
                    res, _ = chain.sift(sg, i + 1)
                    if is_identity(res):
                        continue
                    strong.append(res)
                    if _fix_prefix(res, chain.base):
                        extend_base_for(res)
                    for j in range(len(chain.levels)):
                        rebuild(j)
                    changed = True
                    break
                if changed:
                    break
            if changed:
                break
    return chain


class PermGroup:
    """A permutation group backed by a stabilizer chain."""

    def __init__(self, degree: int, generators: Sequence[Perm], chain: StabChain):
        self.degree = degree
        self.generators = [tuple(g) for g in generators]
        self.chain = chain

    @classmethod
    def trivial(cls, degree: int) -> "PermGroup":
        return cls(degree, [], StabChain(degree))

    @classmethod
    def from_generators(cls, gens: Sequence[Perm], degree: int) -> "PermGroup":
        gens = [tuple(g) for g in gens]
        return cls(degree, [g for g in gens if not is_identity(g)], schreier_sims(gens, degree))

    @classmethod
    def symmetric_product(cls, classes: Sequence[Sequence[int]], degree: int) -> "PermGroup":
        """All permutations moving each listed class within itself.

        Builds the stabilizer chain directly: base points are the class
        members except the last one per class, transversals are
        transpositions.  Exact by construction.
        """
        chain = StabChain(degree)
        gens: list[Perm] = []
        for cls_pts in classes:
            pts = sorted(cls_pts)
            if len(pts) < 2:
                continue
            head = pts[0]
            for x in pts[1:]:
                gens.append(transposition(degree, head, x))
            for t in range(len(pts) - 1):
                b = pts[t]
                tr = {b: identity(degree)}
                for x in pts[t + 1:]:
                    tr[x] = transposition(degree, b, x)
                lvl_gens = [transposition(degree, b, x) for x in pts[t + 1:]]
                chain.levels.append(ChainLevel(b, lvl_gens, tr))
        return cls(degree, gens, chain)

    def order(self) -> int:
        return self.chain.order()

    def contains(self, p: Perm) -> bool:
        p = tuple(p)
        if len(p) != self.degree:
            return False
        return self.chain.contains(p)

    __contains__ = contains

    def is_subgroup_of(self, other: "PermGroup") -> bool:
        return all(other.contains(g) for g in self.generators)

    def orbits(self) -> list[tuple[int, ...]]:
        """Orbit partition of the natural action, fixed points included."""
        parent = list(range(self.degree))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for g in self.generators:
            for x in range(self.degree):
                rx, ry = find(x), find(g[x])
                if rx != ry:
                    parent[ry] = rx
        buckets: dict[int, list[int]] = {}
        for x in range(self.degree):
            buckets.setdefault(find(x), []).append(x)
        return sorted(tuple(sorted(v)) for v in buckets.values())

    def random_element(self, rng: Random) -> Perm:
        p = identity(self.degree)
        for lv in self.chain.levels:
            pts = sorted(lv.transversal)
            p = compose(p, lv.transversal[pts[rng.randrange(len(pts))]])
        return p

    def elements(self, limit: int = 100000):
        """Iterate all elements via transversal products (guarded by limit)."""
        if self.order() > limit:
            raise ValueError(f"group too large to enumerate (order {self.order()})")

        def rec(i: int, acc: Perm):
            if i < 0:
                yield acc
                return
            for x in sorted(self.chain.levels[i].transversal):
                yield from rec(i - 1, compose(acc, self.chain.levels[i].transversal[x]))

        if not self.chain.levels:
            yield identity(self.degree)
            return
        yield from rec(len(self.chain.levels) - 1, identity(self.degree))


@dataclass(frozen=True)
class GroupShape:
    """Order plus, when recognisable, a symbolic form of a permutation group.

    named_form is either a small-group name (C1..C6, C2xC2, S3, S4) or a
    product of symmetric groups written like "S3xS5" or "S4^3xS9^2x...".
    sym_classes carries the element classes when the group is exactly all
    class-wise permutations of those classes.
    """

    order: int
    named_form: str | None = None
    sym_classes: tuple[tuple[int, ...], ...] | None = None

    @property
    def sym_sizes(self) -> tuple[int, ...] | None:
        if self.sym_classes is None:
            return None
        return tuple(sorted(len(c) for c in self.sym_classes))

    def to_json(self) -> dict:
        out: dict = {"order": str(self.order)}
        if self.named_form:
            out["named_form"] = self.named_form
        if self.sym_classes is not None:
            out["sym_classes"] = [list(c) for c in self.sym_classes]
        return out


def sym_product_name(sizes: Sequence[int]) -> str:
    sizes = sorted(sizes)
    parts = []
    for s in sorted(set(sizes)):
        k = sizes.count(s)
        parts.append(f"S{s}" if k == 1 else f"S{s}^{k}")
    return "x".join(parts) if parts else "C1"


_SMALL_CYCLIC = {1: "C1", 2: "C2", 3: "C3", 4: "C4", 5: "C5", 6: "C6"}


def _small_group_name(group: PermGroup) -> str | None:
    """Identify groups of order <= 24 that occur here, by element order profile."""
    n = group.order()
    if n > 24:
        return None
    orders = sorted(perm_order(e) for e in group.elements(limit=10000))
    profile: dict[int, int] = {}
    for o in orders:
        profile[o] = profile.get(o, 0) + 1
    if n in _SMALL_CYCLIC and profile.get(n, 0) > 0:
        return _SMALL_CYCLIC[n]
    if n == 4 and profile.get(2, 0) == 3:
        return "C2xC2"
    if n == 6 and profile == {1: 1, 2: 3, 3: 2}:
        return "S3"
    if n == 24 and profile == {1: 1, 2: 9, 3: 8, 4: 6}:
        return "S4"
    return None


def group_shape(group: PermGroup, hint_classes: Sequence[Sequence[int]] | None = None) -> GroupShape:
    """Order always; named form when the group is a known small group or is
    exactly the product of symmetric groups on its (hinted or orbit) classes."""
    order = group.order()
    classes = hint_classes if hint_classes is not None else group.orbits()
    moved = [tuple(sorted(c)) for c in classes if len(c) >= 2]
    expected = 1
    for c in moved:
        expected *= math.factorial(len(c))
    if moved and order == expected:
        ok = all(
            group.contains(transposition(group.degree, c[0], x))
            for c in moved
            for x in c[1:]
        )
        if ok:
            sizes = [len(c) for c in moved]
            name = sym_product_name(sizes)
            if sizes == [2]:
                name = "C2"
            return GroupShape(order, name, tuple(moved))
    if order == 1:
        return GroupShape(1, "C1", ())
    name = _small_group_name(group)
    return GroupShape(order, name, None)
