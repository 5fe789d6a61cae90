"""Good shifts, auto-shifts, kernels, and restriction operators.

A self-map s of a semigroup X is a *good shift* when X*X lands inside s(X)
and elements with the same s-image are indistinguishable by left and right
multiplication.  Good shifts force a large subgroup of Aut(X): all bijections
that permute each fiber of s while fixing X*X pointwise.  An *auto-shift*
additionally commutes with every automorphism; restriction of Aut(X) to the
image of an auto-shift is then a homomorphism whose kernel is the product of
symmetric groups on the fiber remainders, and whose range is bounded by two
explicitly checkable groups (here called G and H) that become exact when the
shift is a homomorphic retraction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .autos import automorphism_group, verify_map
from .errors import CapacityError
from .perms import GroupShape, PermGroup, group_shape, sym_product_name, transposition
from .tables import OpTable, is_closed, subtable


def _as_map(s, size: int) -> list[int]:
    if isinstance(s, Mapping):
        out = [s[i] for i in range(size)]
    else:
        out = list(s)
    if len(out) != size or any(not 0 <= v < size for v in out):
        raise ValueError("shift must be a total self-map of the table")
    return out


def products_of(op: OpTable) -> frozenset[int]:
    return frozenset(op.table[x][y] for x in range(op.size) for y in range(op.size))


def is_good_shift(s, op: OpTable) -> bool:
    """X*X inside the image, and equal-image elements act identically."""
    m = _as_map(s, op.size)
    image = set(m)
    if any(p not in image for p in products_of(op)):
        return False
    fibers: dict[int, list[int]] = {}
    for x in range(op.size):
        fibers.setdefault(m[x], []).append(x)
    t = op.table
    n = op.size
    for members in fibers.values():
        if len(members) < 2:
            continue
        x0 = members[0]
        row0 = t[x0]
        col0 = tuple(t[z][x0] for z in range(n))
        for x in members[1:]:
            if t[x] != row0:
                return False
            if tuple(t[z][x] for z in range(n)) != col0:
                return False
    return True


def is_auto_shift(s, op: OpTable, aut: PermGroup) -> bool:
    """A good shift commuting with every automorphism (checked on generators)."""
    m = _as_map(s, op.size)
    if not is_good_shift(m, op):
        raise ValueError("not a good shift")
    for g in aut.generators:
        if any(m[g[x]] != g[m[x]] for x in range(op.size)):
            return False
    return True


def shift_fibers(s, op: OpTable) -> dict[int, tuple[int, ...]]:
    m = _as_map(s, op.size)
    fibers: dict[int, list[int]] = {}
    for x in range(op.size):
        fibers.setdefault(m[x], []).append(x)
    return {k: tuple(v) for k, v in fibers.items()}


def kernel_classes(s, op: OpTable, excluded: Sequence[int] | None = None) -> list[tuple[int, ...]]:
    """Fiber remainders: each fiber of the shift minus the excluded set
    (default X*X).  The bijections permuting these classes and fixing the
    rest form the kernel subgroup of a good shift."""
    cut = frozenset(products_of(op) if excluded is None else excluded)
    out = []
    for members in shift_fibers(s, op).values():
        rest = tuple(x for x in members if x not in cut)
        if rest:
            out.append(rest)
    return sorted(out)


def kernel_subgroup(s, op: OpTable) -> PermGroup:
    """The subgroup of bijections with s o psi = s fixing X*X pointwise.

    Every generating transposition is re-verified to be a table
    automorphism (this is the content of the kernel proposition; a failure
    raises rather than returning a wrong group).
    """
    if not is_good_shift(s, op):
        raise ValueError("kernel subgroup requires a good shift")
    classes = kernel_classes(s, op)
    n = op.size
    for cls in classes:
        head = cls[0]
        for x in cls[1:]:
            tr = transposition(n, head, x)
            if not verify_map(op, op, tr):
                raise AssertionError(f"kernel transposition {head},{x} is not an automorphism")
    return PermGroup.symmetric_product(classes, n)


@dataclass
class RestrictionReport:
    """Everything the restriction operator Aut(X) -> Aut(s(X)) determines.

    `g_shape` bounds the range by fiber data alone, `h_shape` adds the
    characteristic-set refinement (evaluated per automorphism orbit), and
    `fiber_size_shape` is the weaker bound that only matches raw fiber
    cardinalities.  `checks` records each verified identity.
    """

    sub: tuple[int, ...]
    whole_order: int
    kernel_order: int
    kernel_shape: GroupShape
    range_shape: GroupShape
    g_order: int
    h_order: int
    g_shape: GroupShape
    h_shape: GroupShape
    fiber_size_shape: GroupShape
    retraction: bool
    range_trivial: bool
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {
            "sub_size": len(self.sub),
            "whole_aut_order": str(self.whole_order),
            "kernel_order": str(self.kernel_order),
            "kernel_shape": self.kernel_shape.to_json(),
            "range_shape": self.range_shape.to_json(),
            "G_order": str(self.g_order),
            "H_order": str(self.h_order),
            "fiber_size_bound": self.fiber_size_shape.to_json(),
            "retraction": self.retraction,
            "range_trivial": self.range_trivial,
            "checks": dict(self.checks),
        }


def restriction_report(
    whole: OpTable,
    sub: Sequence[int],
    s,
    aut_whole: PermGroup | None = None,
    node_budget: int = 10**8,
) -> RestrictionReport:
    """Restrict Aut(whole) to a good-shift image and compare with the bounds.

    `sub` must be closed and equal to the image of the shift `s`.  The
    kernel is checked against the symmetric product over fiber remainders,
    and the chain  range <= H <= G  is verified by sifting generators, with
    equality checks when the shift is a homomorphic retraction.
    """
    n = whole.size
    m = _as_map(s, n)
    sub = tuple(sorted(sub))
    pos = {x: i for i, x in enumerate(sub)}
    if set(m) != set(sub):
        raise ValueError("sub must be exactly the image of the shift")
    if not is_closed(whole, sub):
        raise ValueError("sub must be closed under the operation")
    if not is_good_shift(m, whole):
        raise ValueError("restriction analysis requires a good shift")

    aut = aut_whole if aut_whole is not None else automorphism_group(whole, node_budget=node_budget)
    checks: dict[str, bool] = {}
    t = whole.table

    checks["image_is_ideal"] = all(
        t[x][i] in pos and t[i][x] in pos for x in range(n) for i in sub
    )
    checks["shift_commutes_with_aut"] = all(
        m[g[x]] == g[m[x]] for g in aut.generators for x in range(n)
    )
    checks["image_characteristic"] = all(
        all((g[x] in pos) == (x in pos) for x in range(n)) for g in aut.generators
    )

    restricted = []
    for g in aut.generators:
        restricted.append(tuple(pos[g[x]] for x in sub))
    range_group = PermGroup.from_generators(restricted, len(sub))
    whole_order = aut.order()
    range_order = range_group.order()
    checks["order_factorization"] = whole_order % range_order == 0
    kernel_order = whole_order // range_order

    fibers = shift_fibers(m, whole)
    remainders = kernel_classes(m, whole, excluded=sub)
    expected_kernel = math.prod(math.factorial(len(c)) for c in remainders)
    checks["kernel_is_fiber_symmetric_product"] = kernel_order == expected_kernel
    checks["kernel_transpositions_are_automorphisms"] = all(
        verify_map(whole, whole, transposition(n, c[0], x)) and
        aut.contains(transposition(n, c[0], x))
        for c in remainders for x in c[1:]
    )
    moved = [c for c in remainders if len(c) >= 2]
    kernel_shape = GroupShape(
        expected_kernel,
        sym_product_name([len(c) for c in moved]) if moved else "C1",
        tuple(moved),
    )

    sub_op = subtable(whole, sub)
    sigma_local = [pos[m[x]] for x in sub]
    outside = {img: sum(1 for x in members if x not in pos) for img, members in fibers.items()}
    outside_color = [outside.get(x, 0) for x in sub]
    g_group = automorphism_group(
        sub_op, colors=outside_color, commute_with=[sigma_local], node_budget=node_budget
    )
    orbits = aut.orbits()
    orbit_vec = []
    for x in sub:
        fib = set(fibers.get(x, ()))
        orbit_vec.append(tuple(len(fib & set(o)) for o in orbits))
    h_colors = [(outside_color[i], orbit_vec[i]) for i in range(len(sub))]
    h_group = automorphism_group(
        sub_op, colors=h_colors, commute_with=[sigma_local], node_budget=node_budget
    )
    size_color = [len(fibers.get(x, ())) for x in sub]
    fiber_size_group = automorphism_group(sub_op, colors=size_color, node_budget=node_budget)

    checks["range_in_H"] = all(h_group.contains(g) for g in range_group.generators)
    checks["H_in_G"] = all(g_group.contains(g) for g in h_group.generators)

    retraction = all(m[m[x]] == m[x] for x in range(n)) and all(
        m[t[x][y]] == t[m[x]][m[y]] for x in range(n) for y in range(n)
    )
    if retraction:
        checks["retraction_equality"] = (
            range_order == h_group.order() == g_group.order()
        )

    return RestrictionReport(
        sub=sub,
        whole_order=whole_order,
        kernel_order=kernel_order,
        kernel_shape=kernel_shape,
        range_shape=group_shape(range_group),
        g_order=g_group.order(),
        h_order=h_group.order(),
        g_shape=group_shape(g_group),
        h_shape=group_shape(h_group),
        fiber_size_shape=group_shape(fiber_size_group),
        retraction=retraction,
        range_trivial=range_order == 1,
        checks=checks,
    )


@dataclass
class ProbeRow:
    conjecture: str           # "C1" or "C2"
    size: int
    subject: str
    status: str               # verified / bound / undetermined / violated / vacuous
    detail: str

    def to_json(self) -> dict:
        return self.__dict__.copy()


def _shape_key(shape: GroupShape):
    return shape.order, shape.sym_sizes


def conjecture_probe(max_size: int, perf: bool = False, node_budget: int = 10**8) -> list[ProbeRow]:
    """Per-size evidence for the two open questions about these groups.

    C1: monogenic semigroups of equal size and index >= 3 should have
    isomorphic superextension automorphism groups (compared by order and
    symmetric-product shape).  C2: for index >= 2 the restriction operator
    to the square ideal should have trivial range.  Sizes up to 5 are
    decided exactly; size 6 rows only report kernel shapes and the G bound
    and never claim more than the computation shows.
    """
    from .extension import lambda_of_monogenic, shift_analysis
    from .tables import MonogenicSpec, monogenic_specs

    if max_size > 6:
        raise CapacityError("probe supports sizes up to 6")
    if max_size >= 6 and not perf:
        raise CapacityError("size 6 probing is the performance tier; pass perf=True")

    rows: list[ProbeRow] = []
    for size in range(1, max_size + 1):
        specs = [sp for sp in monogenic_specs(size, size)]
        c1_specs = [sp for sp in specs if sp.r >= 3]
        if len(c1_specs) < 2:
            rows.append(ProbeRow("C1", size, ",".join(map(str, c1_specs)) or "-",
                                 "vacuous", "fewer than two eligible semigroups"))
        elif size <= 5:
            shapes = {}
            for sp in c1_specs:
                lam = lambda_of_monogenic(sp.r, sp.m)
                aut = automorphism_group(lam.table, node_budget=node_budget)
                shapes[str(sp)] = group_shape(aut)
            keys = {k: _shape_key(v) for k, v in shapes.items()}
            agree = len(set(keys.values())) == 1
            some = next(iter(shapes.values()))
            rows.append(ProbeRow(
                "C1", size, ",".join(sorted(shapes)),
                "verified" if agree else "violated",
                f"shared shape {some.named_form} (order {some.order})" if agree
                else f"shapes differ: {keys}"))
        else:
            kernels = {}
            for sp in c1_specs:
                kernels[str(sp)] = _size6_kernel_shape(sp, node_budget)
            keyed = {k: (v.order, v.sym_sizes) for k, v in kernels.items()}
            agree = len(set(keyed.values())) == 1
            rows.append(ProbeRow(
                "C1", size, ",".join(sorted(kernels)),
                "bound" if agree else "undetermined",
                "kernel shapes agree: " + next(iter(kernels.values())).named_form
                if agree else f"kernel shapes differ: {keyed}"))
        for sp in specs:
            if sp.r < 2:
                continue
            if size <= 5:
                lam = lambda_of_monogenic(sp.r, sp.m)
                aut = automorphism_group(lam.table, node_budget=node_budget)
                ana = shift_analysis(lam, 1)
                _, members = lam.ideal_subtable(2)
                rep = restriction_report(
                    lam.table, members, [ana.mapping[i] for i in range(len(lam))],
                    aut_whole=aut, node_budget=node_budget)
                rows.append(ProbeRow(
                    "C2", size, str(sp),
                    "verified" if rep.range_trivial else "violated",
                    f"range order {rep.range_shape.order}, kernel {rep.kernel_shape.named_form}"))
            else:
                g_order, kshape = _size6_restriction_bound(sp, node_budget)
                if g_order == 1:
                    rows.append(ProbeRow("C2", size, str(sp), "bound",
                                         f"G bound is trivial; kernel {kshape.named_form}"))
                else:
                    rows.append(ProbeRow("C2", size, str(sp), "undetermined",
                                         f"G bound has order {g_order}; kernel {kshape.named_form}"))
    return rows


from functools import lru_cache


@lru_cache(maxsize=8)
def _size6_shift_data(sp, node_budget: int = 0):
    """Shift fibers of the generator shift on a size-6 monogenic semigroup,
    without materializing the full 2646 by 2646 table."""
    from .extension import _inv_table_cached, _mask_to_minsets, _star_mask
    from .setfam import GroundSet, enumerate_mlf, member_mask
    from .tables import make_monogenic

    base = make_monogenic(sp)
    n = base.size
    uni = enumerate_mlf(GroundSet(n, base.labels))
    inv = _inv_table_cached(base.table, n)
    masks = uni.member_masks()
    gen_mask = masks[uni.principal_index(0)]
    mapping = []
    for mb in masks:
        out = _star_mask(gen_mask, mb, inv, n)
        mapping.append(uni.index_of_mask(out))
    return base, uni, mapping


def _size6_kernel_shape(sp, node_budget: int) -> GroupShape:
    from .setfam import code_of
    from .tables import power_ideal

    base, uni, mapping = _size6_shift_data(sp, node_budget)
    ideal_mask = code_of(power_ideal(base, 2))
    in_sub = [all(s & ideal_mask == s for s in f) for f in uni.families]
    fibers: dict[int, int] = {}
    for i, img in enumerate(mapping):
        if not in_sub[i]:
            fibers[img] = fibers.get(img, 0) + 1
    sizes = sorted(v for v in fibers.values() if v >= 2)
    order = math.prod(math.factorial(v) for v in sizes)
    return GroupShape(order, sym_product_name(sizes), None)


def _size6_restriction_bound(sp, node_budget: int) -> tuple[int, GroupShape]:
    """The G bound for the restriction operator of a size-6 semigroup,
    computed entirely on the square ideal's superextension (81 elements)."""
    from .extension import build_lambda
    from .setfam import code_of
    from .tables import power_ideal

    base, uni, mapping = _size6_shift_data(sp, node_budget)
    ideal = power_ideal(base, 2)
    ideal_mask = code_of(ideal)
    members = [i for i, f in enumerate(uni.families) if all(s & ideal_mask == s for s in f)]
    pos = {x: i for i, x in enumerate(members)}
    outside: dict[int, int] = {}
    for i, img in enumerate(mapping):
        if i not in pos:
            outside[img] = outside.get(img, 0) + 1

    sub_base = subtable(base, ideal)
    lam_sub = build_lambda(sub_base)
    # align the standalone 81-element universe with the embedded families
    shift = min(ideal)
    align = {}
    for j, mins in enumerate(lam_sub.universe.families):
        embedded = tuple(sorted(s << shift for s in mins))
        align[j] = pos[uni.index[embedded]]
    inv_align = {v: k for k, v in align.items()}
    sigma_local = [inv_align[pos[mapping[members[align[j]]]]] for j in range(len(members))]
    outside_color = [outside.get(members[align[j]], 0) for j in range(len(members))]
    g_group = automorphism_group(
        lam_sub.table, colors=outside_color, commute_with=[sigma_local],
        node_budget=node_budget)
    return g_group.order(), _size6_kernel_shape(sp, node_budget)
