"""Ground-set combinatorics behind superextensions.

A subset of an n-point ground set is encoded as an n-bit integer: bit i set
means point i is a member.  An upfamily (a family of nonempty subsets closed
under supersets) is stored as the antichain of its inclusion-minimal members.
A family is *linked* when every two members intersect, and *maximal linked*
when no linked upfamily properly contains it; equivalently, for every subset
exactly one of the subset and its complement belongs to the family.  Maximal
linked upfamilies are the same thing as self-dual monotone Boolean functions,
counted by the Hosten-Morris numbers (OEIS A001206).

Canonical form used throughout: minimal sets sorted ascending as integers,
families of a universe sorted lexicographically by that tuple.  The ordering
is a convention of this library, chosen for reproducibility.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .errors import CapacityError

MAX_GROUND = 16      # SubsetCode width cap
MAX_ENUMERATE = 7    # enumeration cap; n = 7 is the slow tier
_MAX_TABLES = 12     # cap for the precomputed up/down closure tables


@lru_cache(maxsize=None)
def _up_down(n: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """up[s] / down[s]: bit mask over all subsets t with t >= s resp. t <= s."""
    if n > _MAX_TABLES:
        raise CapacityError(f"closure tables not available for n = {n}")
    full = (1 << n) - 1
    up = [0] * (full + 1)
    down = [0] * (full + 1)
    for s in range(full + 1):
        comp = full ^ s
        t, acc = comp, 0
        while True:
            acc |= 1 << (s | t)
            if t == 0:
                break
            t = (t - 1) & comp
        up[s] = acc
        t, acc = s, 0
        while True:
            acc |= 1 << t
            if t == 0:
                break
            t = (t - 1) & s
        down[s] = acc
    return tuple(up), tuple(down)


@dataclass(frozen=True)
class GroundSet:
    """An n-point ground set with optional display names for the points."""

    n: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if not 1 <= self.n <= MAX_GROUND:
            raise CapacityError(f"ground size {self.n} outside 1..{MAX_GROUND}")
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != self.n or len(set(labels)) != self.n:
                raise ValueError("labels must be distinct and one per point")
            object.__setattr__(self, "labels", labels)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def label(self, point: int) -> str:
        if self.labels is not None:
            return self.labels[point]
        return f"p{point}"

    def subset_str(self, code: int) -> str:
        names = [self.label(i) for i in range(self.n) if code >> i & 1]
        return "{%s}" % ",".join(names)


def points_of(code: int) -> tuple[int, ...]:
    """0-based point indices of a subset code."""
    out = []
    i = 0
    while code:
        if code & 1:
            out.append(i)
        code >>= 1
        i += 1
    return tuple(out)


def code_of(points: Iterable[int]) -> int:
    mask = 0
    for p in points:
        mask |= 1 << p
    return mask


def minimize(sets: Iterable[int], ground: GroundSet) -> tuple[int, ...]:
    """Inclusion-minimal members of the upfamily generated by `sets`.

    The generated upfamily (all supersets of the given sets) is unchanged;
    only the canonical antichain generating it is returned.  Raises on an
    empty input or any empty or out-of-range subset.
    """
    full = ground.full_mask
    uniq = set(sets)
    if not uniq:
        raise ValueError("a family needs at least one generating set")
    for s in uniq:
        if not 0 < s <= full:
            raise ValueError(f"subset code {s} empty or outside the ground set")
    mins: list[int] = []
    for s in sorted(uniq, key=lambda x: (x.bit_count(), x)):
        if not any(m & s == m for m in mins):
            mins.append(s)
    return tuple(sorted(mins))


def is_linked(sets: Sequence[int]) -> bool:
    """True when every two member sets intersect."""
    sets = list(sets)
    for i, a in enumerate(sets):
        for b in sets[i + 1:]:
            if a & b == 0:
                return False
    return True


@dataclass(frozen=True)
class LinkedFamily:
    """A linked upfamily, canonically stored by its minimal sets."""

    ground: GroundSet
    minimal_sets: tuple[int, ...]

    def __post_init__(self):
        mins = minimize(self.minimal_sets, self.ground)
        if mins != tuple(self.minimal_sets):
            raise ValueError("minimal_sets must be a canonical antichain")
        if not is_linked(mins):
            raise ValueError("family is not linked")

    @classmethod
    def from_sets(cls, ground: GroundSet, sets: Iterable[int]) -> "LinkedFamily":
        return cls(ground, minimize(sets, ground))

    @classmethod
    def principal(cls, ground: GroundSet, point: int) -> "LinkedFamily":
        return cls(ground, (1 << point,))

    def contains(self, code: int) -> bool:
        return contains(self, code)

    def member_mask(self) -> int:
        return member_mask(self.minimal_sets, self.ground.n)

    def text(self) -> str:
        return "|".join(self.ground.subset_str(s) for s in self.minimal_sets)

    def to_json(self) -> dict:
        return {
            "n": self.ground.n,
            "minimal_sets": [list(points_of(s)) for s in self.minimal_sets],
        }

    @classmethod
    def from_json(cls, data: dict, ground: GroundSet | None = None) -> "LinkedFamily":
        g = ground if ground is not None else GroundSet(int(data["n"]))
        return cls.from_sets(g, [code_of(ps) for ps in data["minimal_sets"]])


def contains(family: LinkedFamily, code: int) -> bool:
    """Upfamily membership: some minimal set is contained in `code`."""
    if code > family.ground.full_mask:
        raise ValueError("subset code outside the ground set")
    return any(m & code == m for m in family.minimal_sets)


def member_mask(minimal_sets: Sequence[int], n: int) -> int:
    """Bit mask over all 2^n subsets that belong to the upfamily."""
    up, _ = _up_down(n)
    acc = 0
    for m in minimal_sets:
        acc |= up[m]
    return acc


def is_maximal_linked(family: LinkedFamily) -> bool:
    """Self-duality test: exactly one of each complementary pair is a member.

    For linked upfamilies this is equivalent to maximality among linked
    upfamilies (cross-checked against extension search in the test suite).
    """
    n = family.ground.n
    full = family.ground.full_mask
    memb = family.member_mask()
    for c in range(full + 1):
        if (memb >> c & 1) == (memb >> (full ^ c) & 1):
            return False
    return True


def map_family(
    f: Sequence[int],
    family: LinkedFamily,
    target: GroundSet | None = None,
) -> LinkedFamily:
    """Push a family forward along a point map f (the induced map on families).

    The image family is generated by the pointwise images of the minimal
    sets.  Images of linked families are linked; images of maximal linked
    families are again maximal linked.
    """
    src = family.ground
    if len(f) != src.n:
        raise ValueError("point map must be total on the source ground set")
    tgt = target if target is not None else src
    point_img = [1 << f[i] for i in range(src.n)]
    for img in point_img:
        if img > tgt.full_mask:
            raise ValueError("point map leaves the target ground set")
    images = []
    for s in family.minimal_sets:
        acc = 0
        for i in points_of(s):
            acc |= point_img[i]
        images.append(acc)
    return LinkedFamily.from_sets(tgt, images)


@dataclass
class FamilyUniverse:
    """All maximal linked families on a ground set, canonically ordered.

    `families` holds raw canonical antichains (tuples of subset codes); use
    `family(i)` for a LinkedFamily view.  Derived lookup tables are built
    lazily and cached.
    """

    ground: GroundSet
    families: list[tuple[int, ...]]

    def __post_init__(self):
        self._index: dict[tuple[int, ...], int] | None = None
        self._memb: list[int] | None = None
        self._mask_index: dict[int, int] | None = None

    def __len__(self) -> int:
        return len(self.families)

    def family(self, i: int) -> LinkedFamily:
        return LinkedFamily(self.ground, self.families[i])

    @property
    def index(self) -> dict[tuple[int, ...], int]:
        if self._index is None:
            self._index = {f: i for i, f in enumerate(self.families)}
        return self._index

    def index_of(self, sets: Iterable[int]) -> int:
        return self.index[minimize(sets, self.ground)]

    def principal_index(self, point: int) -> int:
        return self.index[(1 << point,)]

    def member_masks(self) -> list[int]:
        if self._memb is None:
            n = self.ground.n
            self._memb = [member_mask(f, n) for f in self.families]
        return self._memb

    def index_of_mask(self, mask: int) -> int:
        if self._mask_index is None:
            self._mask_index = {m: i for i, m in enumerate(self.member_masks())}
        return self._mask_index[mask]


def _survey(n: int, collect: bool):
    """Depth-first assignment of complementary subset pairs.

    Exactly one side of each pair {C, X minus C} belongs to a maximal linked
    family, and membership is closed upward.  The search assigns pairs in
    order of the smaller side's cardinality, propagating upward closure (IN)
    and the induced exclusions (OUT), and prunes on IN/OUT conflicts.  Every
    leaf is a maximal linked family and each family is reached exactly once.
    """
    if not 1 <= n <= MAX_ENUMERATE:
        raise CapacityError(f"enumeration supports 1 <= n <= {MAX_ENUMERATE}")
    full = (1 << n) - 1
    up, down = _up_down(n)
    reps = set()
    for c in range(1, full + 1):
        d = full ^ c
        if d == 0:
            continue  # the pair (empty, full) is forced
        reps.add(min(c, d, key=lambda x: (x.bit_count(), x)))
    order = sorted(reps, key=lambda x: (x.bit_count(), x))
    pairs = [(c, full ^ c) for c in order]
    npairs = len(pairs)

    results: list[tuple[int, ...]] = []
    count = 0
    path = [full]

    def emit():
        nonlocal count
        if not collect:
            count += 1
            return
        mins: list[int] = []
        for s in sorted(path, key=lambda x: (x.bit_count(), x)):
            if not any(m & s == m for m in mins):
                mins.append(s)
        results.append(tuple(sorted(mins)))

    def rec(i: int, inm: int, outm: int):
        mark = len(path)
        while i < npairs:
            c, d = pairs[i]
            i += 1
            if (inm >> c | inm >> d) & 1:
                continue
            if outm >> c & 1:
                if outm >> d & 1:
                    del path[mark:]
                    return
                s = d
            elif outm >> d & 1:
                s = c
            else:
                for s2 in (c, d):
                    ni = inm | up[s2]
                    no = outm | down[full ^ s2]
                    if ni & no:
                        continue
                    path.append(s2)
                    rec(i, ni, no)
                    path.pop()
                del path[mark:]
                return
            ni = inm | up[s]
            no = outm | down[full ^ s]
            if ni & no:
                del path[mark:]
                return
            inm, outm = ni, no
            path.append(s)
        emit()
        del path[mark:]

    # start from the forced facts: the full set is a member, the empty set is not
    rec(0, 1 << full, 1)
    return results if collect else count


def count_mlf(n: int) -> int:
    """Number of maximal linked families on n points, without materializing them."""
    return _survey(n, collect=False)


@lru_cache(maxsize=None)
def _enumerate_cached(n: int) -> FamilyUniverse:
    families = sorted(_survey(n, collect=True))
    return FamilyUniverse(GroundSet(n), families)


def enumerate_mlf(ground: GroundSet | int) -> FamilyUniverse:
    """Every maximal linked family on the ground set, canonically ordered.

    Universes for n <= 6 are cached and shared; n = 7 (the slow tier) is
    recomputed per call to keep the cache small.
    """
    if isinstance(ground, GroundSet):
        n, g = ground.n, ground
    else:
        n, g = ground, GroundSet(ground)
    if n <= 6:
        uni = _enumerate_cached(n)
        if g.labels is None:
            return uni
        return FamilyUniverse(g, uni.families)
    families = sorted(_survey(n, collect=True))
    return FamilyUniverse(g, families)
