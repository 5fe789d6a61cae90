"""Automorphism and isomorphism search for operation tables.

The search has two layers.  Colour refinement (a one-dimensional
Weisfeiler-Leman pass over the ternary relation x*y=z, with canonical
ordinal assignment so results are independent of element order) splits the
elements into classes that any (prefix-respecting) automorphism must
preserve.  A backtracking search then extends partial maps, propagating
every product constraint of already-mapped pairs; found automorphisms are
organised level by level into a stabilizer chain, and candidate images
already reachable by the known subgroup are skipped.

Every map this module returns has been re-verified against the full table,
independently of the search bookkeeping.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import BudgetExceededError
from .perms import ChainLevel, Perm, PermGroup, StabChain, identity
from .tables import OpTable, element_depths

DEFAULT_BUDGET = 10**8


def power_profile(op: OpTable, x: int) -> tuple[int, int]:
    """Index and period of the monogenic subsemigroup generated by x."""
    seen: dict[int, int] = {}
    cur = x
    step = 1
    while cur not in seen:
        seen[cur] = step
        cur = op.table[cur][x]
        step += 1
    first = seen[cur]
    return first, step - first


def initial_colors(op: OpTable, extra: Sequence | None = None) -> list[tuple]:
    """Automorphism-invariant starting colours: idempotency, ideal depth and
    the element's own index/period, optionally joined with caller-provided
    per-element invariants."""
    depth = element_depths(op)
    cols = []
    for x in range(op.size):
        c = (op.table[x][x] == x, depth[x], power_profile(op, x))
        if extra is not None:
            c = c + (extra[x],)
        cols.append(c)
    return cols


def _rank(values: list) -> list[int]:
    order = {v: i for i, v in enumerate(sorted(set(values)))}
    return [order[v] for v in values]


def refine_colors(
    op: OpTable,
    colors: Sequence,
    unary: Sequence[Sequence[int]] = (),
    max_rounds: int = 100,
) -> list[int]:
    """Canonical colour refinement to a stable partition."""
    n = op.size
    t = op.table
    cols = _rank(list(colors))
    for _ in range(max_rounds):
        sigs = []
        for x in range(n):
            row = sorted((cols[y], cols[t[x][y]], cols[t[y][x]]) for y in range(n))
            sig = (cols[x], tuple(cols[f[x]] for f in unary), tuple(row))
            sigs.append(sig)
        new = _rank(sigs)
        if new == cols:
            break
        cols = new
        if len(set(cols)) == n:
            break
    return cols


def _individualize(op: OpTable, cols: list[int], pin: int,
                   unary: Sequence[Sequence[int]] = ()) -> list[int]:
    marked = [(c, 1 if x == pin else 0) for x, c in enumerate(cols)]
    return refine_colors(op, marked, unary)


def _joint_individualize(
    op: OpTable,
    cols: Sequence[int],
    pin_src: int,
    pin_dst: int,
    unary: Sequence[Sequence[int]] = (),
    max_rounds: int = 100,
) -> tuple[list[int], list[int], bool]:
    """Refine two pinnings of the same colouring against a shared alphabet.

    The two colourings stay comparable cell by cell; returns them plus a
    flag that turns False as soon as the colour histograms diverge, which
    refutes any prefix-respecting map sending pin_src to pin_dst.
    """
    n = op.size
    t = op.table
    ca: list = [(c, 1 if x == pin_src else 0) for x, c in enumerate(cols)]
    cb: list = [(c, 1 if x == pin_dst else 0) for x, c in enumerate(cols)]
    joint = _rank(ca + cb)
    ca, cb = joint[:n], joint[n:]
    if sorted(ca) != sorted(cb):
        return ca, cb, False
    for _ in range(max_rounds):
        sigs = []
        for side in (ca, cb):
            for x in range(n):
                row = sorted((side[y], side[t[x][y]], side[t[y][x]]) for y in range(n))
                sigs.append((side[x], tuple(side[f[x]] for f in unary), tuple(row)))
        joint = _rank(sigs)
        na, nb = joint[:n], joint[n:]
        if sorted(na) != sorted(nb):
            return na, nb, False
        if na == ca and nb == cb:
            break
        ca, cb = na, nb
    return ca, cb, True


class _Budget:
    __slots__ = ("left",)

    def __init__(self, limit: int):
        self.left = limit

    def spend(self, amount: int = 1):
        self.left -= amount
        if self.left < 0:
            raise BudgetExceededError("search node budget exhausted")


class _MapSearch:
    """Backtracking search for one table map respecting colours, products,
    and optional unary maps (constraints p(f(x)) = g(p(x)))."""

    def __init__(self, src: OpTable, dst: OpTable, col_src: Sequence[int],
                 col_dst: Sequence[int], unary: Sequence[tuple[Sequence[int], Sequence[int]]],
                 budget: _Budget):
        self.ts = src.table
        self.td = dst.table
        self.cs = list(col_src)
        self.cd = list(col_dst)
        self.unary = [(tuple(f), tuple(g)) for f, g in unary]
        self.n = src.size
        self.m = dst.size
        self.budget = budget
        self.p = [-1] * self.n
        self.q = [-1] * self.m
        self.done: list[int] = []
        self.processed = 0
        # candidate targets per colour, and a deterministic source order:
        # smallest colour class first, then smallest element
        by_color: dict[int, list[int]] = {}
        for y in range(self.m):
            by_color.setdefault(self.cd[y], []).append(y)
        self.targets = by_color
        sizes: dict[int, int] = {}
        for x in range(self.n):
            sizes[self.cs[x]] = sizes.get(self.cs[x], 0) + 1
        self.order = sorted(range(self.n), key=lambda x: (sizes[self.cs[x]], self.cs[x], x))

    def _assign(self, x: int, y: int) -> bool:
        px = self.p[x]
        if px != -1:
            return px == y
        if self.q[y] != -1 or self.cs[x] != self.cd[y]:
            return False
        self.budget.spend()
        self.p[x] = y
        self.q[y] = x
        self.done.append(x)
        return True

    def _propagate(self) -> bool:
        while self.processed < len(self.done):
            t = self.processed
            self.processed += 1
            x = self.done[t]
            y = self.p[x]
            for f, g in self.unary:
                if not self._assign(f[x], g[y]):
                    return False
            ts, td, p, done = self.ts, self.td, self.p, self.done
            for j in range(t + 1):
                u = done[j]
                v = p[u]
                if not self._assign(ts[x][u], td[y][v]):
                    return False
                if not self._assign(ts[u][x], td[v][y]):
                    return False
        return True

    def _undo(self, mark: int):
        while len(self.done) > mark:
            x = self.done.pop()
            y = self.p[x]
            self.p[x] = -1
            self.q[y] = -1
        self.processed = min(self.processed, mark)

    def _extend(self) -> bool:
        x = -1
        for cand in self.order:
            if self.p[cand] == -1:
                x = cand
                break
        if x == -1:
            return True
        mark = len(self.done)
        for y in self.targets.get(self.cs[x], ()):
            if self.q[y] != -1:
                continue
            if self._assign(x, y) and self._propagate() and self._extend():
                return True
            self._undo(mark)
        return False

    def run(self, seeds: Sequence[tuple[int, int]]) -> list[int] | None:
        mark = len(self.done)
        for x, y in seeds:
            if not self._assign(x, y):
                self._undo(mark)
                return None
        if not (self._propagate() and self._extend()):
            self._undo(mark)
            return None
        return list(self.p)


def verify_map(src: OpTable, dst: OpTable, p: Sequence[int]) -> bool:
    """Full independent check that p is a bijective homomorphism src -> dst."""
    n = src.size
    if dst.size != n or sorted(p) != list(range(n)):
        return False
    arr = np.asarray(p, dtype=np.int64)
    ts = src.array()
    td = dst.array()
    return bool(np.array_equal(arr[ts], td[np.ix_(arr, arr)]))


def _orbit(point: int, gens: list[Perm], n: int) -> set[int]:
    seen = {point}
    frontier = [point]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = g[x]
                if y not in seen:
                    seen.add(y)
                    nxt.append(y)
        frontier = nxt
    return seen


def automorphism_group(
    op: OpTable,
    *,
    colors: Sequence | None = None,
    commute_with: Sequence[Sequence[int]] = (),
    node_budget: int = DEFAULT_BUDGET,
) -> PermGroup:
    """The group of table automorphisms, optionally constrained.

    `colors` adds per-element invariants every automorphism must preserve;
    `commute_with` lists self-maps f with which every returned permutation
    must commute.  Output is deterministic: base points and generators come
    out in a fixed order for a given input.
    """
    n = op.size
    unary = [tuple(f) for f in commute_with]
    if n == 0:
        return PermGroup.trivial(0)
    budget = _Budget(node_budget)
    cols = refine_colors(op, initial_colors(op, colors), unary)

    base: list[int] = []
    level_colors: list[list[int]] = [cols]
    cur = cols
    while True:
        cells: dict[int, list[int]] = {}
        for x in range(n):
            cells.setdefault(cur[x], []).append(x)
        nontrivial = [v for v in cells.values() if len(v) > 1]
        if not nontrivial:
            break
        cell = min(nontrivial, key=lambda v: (len(v), v[0]))
        b = cell[0]
        base.append(b)
        cur = _individualize(op, cur, b, unary)
        level_colors.append(cur)

    k = len(base)
    gens_by_level: list[list[Perm]] = [[] for _ in range(k)]

    def gens_from(i: int) -> list[Perm]:
        out = []
        for j in range(i, k):
            out.extend(gens_by_level[j])
        return out

    unary_pairs = [(f, f) for f in unary]
    for i in range(k - 1, -1, -1):
        lc = level_colors[i]
        b = base[i]
        cands = sorted(w for w in range(n) if w != b and lc[w] == lc[b])
        if not cands:
            continue
        seeds_prefix = [(base[j], base[j]) for j in range(i)]
        orb = _orbit(b, gens_from(i), n)
        for w in cands:
            if w in orb:
                continue
            # individualize b on the source side and the candidate image w on
            # the target side, refining both against one colour alphabet;
            # any map fixing the prefix with b -> w must respect the result
            src_cols, dst_cols, feasible = _joint_individualize(op, lc, b, w, unary)
            if not feasible:
                continue
            search = _MapSearch(op, op, src_cols, dst_cols, unary_pairs, budget)
            res = search.run(seeds_prefix + [(b, w)])
            if res is None:
                continue
            g = tuple(res)
            if not verify_map(op, op, g):
                raise AssertionError("search produced a non-automorphism")
            if any(g[f[x]] != f[g[x]] for f in unary for x in range(n)):
                raise AssertionError("search violated a commuting constraint")
            gens_by_level[i].append(g)
            orb = _orbit(b, gens_from(i), n)

    levels = []
    for i in range(k):
        lvl = ChainLevel(base[i], gens_from(i), {})
        if lvl.gens:
            lvl.rebuild()
        else:
            lvl.transversal = {base[i]: identity(n)}
        levels.append(lvl)
    chain = StabChain(n, levels)
    all_gens = gens_from(0)
    return PermGroup(n, all_gens, chain)


def brute_force_automorphism_count(op: OpTable) -> int:
    """Count table automorphisms by exhausting all bijections (small sizes).

    Independent of the search machinery; used as an oracle.
    """
    n = op.size
    if n > 9:
        raise ValueError("brute force capped at size 9")
    t = op.table
    count = 0
    p = [-1] * n
    used = [False] * n

    def rec(x: int):
        nonlocal count
        if x == n:
            count += 1
            return
        for y in range(n):
            if used[y]:
                continue
            p[x] = y
            used[y] = True
            ok = True
            for u in range(x + 1):
                if p[t[x][u]] != -1 and p[t[x][u]] != t[y][p[u]]:
                    ok = False
                    break
                if p[t[u][x]] != -1 and p[t[u][x]] != t[p[u]][y]:
                    ok = False
                    break
            if ok and all(
                p[t[u][v]] == t[p[u]][p[v]]
                for u in range(x + 1)
                for v in range(x + 1)
                if p[t[u][v]] != -1
            ):
                rec(x + 1)
            p[x] = -1
            used[y] = False

    rec(0)
    return count


def _joint_refinement(a: OpTable, b: OpTable, max_rounds: int = 100):
    """Refine both tables against a shared colour alphabet.

    Returns (colors_a, colors_b, matched) where matched is False as soon as
    the colour histograms diverge (a proof of non-isomorphism).
    """
    ca = initial_colors(a)
    cb = initial_colors(b)
    joint = _rank(ca + cb)
    na = a.size
    cols_a, cols_b = joint[:na], joint[na:]
    for _ in range(max_rounds):
        sigs_a = [
            (cols_a[x], tuple(sorted((cols_a[y], cols_a[a.table[x][y]], cols_a[a.table[y][x]]) for y in range(na))))
            for x in range(na)
        ]
        nb = b.size
        sigs_b = [
            (cols_b[x], tuple(sorted((cols_b[y], cols_b[b.table[x][y]], cols_b[b.table[y][x]]) for y in range(nb))))
            for x in range(nb)
        ]
        joint = _rank(sigs_a + sigs_b)
        new_a, new_b = joint[:na], joint[na:]
        if sorted(new_a) != sorted(new_b):
            return new_a, new_b, False
        if new_a == cols_a and new_b == cols_b:
            break
        cols_a, cols_b = new_a, new_b
    return cols_a, cols_b, True


def find_isomorphism(
    a: OpTable,
    b: OpTable,
    node_budget: int = DEFAULT_BUDGET,
) -> tuple[list[int] | None, dict | None]:
    """A witness isomorphism a -> b, or a distinguishing explanation.

    On failure the second component names the first invariant separating the
    tables: size, idempotent count, ideal-chain profile, refinement
    signature, or an exhausted search.
    """
    if a.size != b.size:
        return None, {"invariant": "size", "a": a.size, "b": b.size}
    ia = sum(1 for x in range(a.size) if a.table[x][x] == x)
    ib = sum(1 for x in range(b.size) if b.table[x][x] == x)
    if ia != ib:
        return None, {"invariant": "idempotent_count", "a": ia, "b": ib}
    from .tables import ideal_chain

    prof_a = [len(s) for s in ideal_chain(a)]
    prof_b = [len(s) for s in ideal_chain(b)]
    if prof_a != prof_b:
        return None, {"invariant": "ideal_chain", "a": prof_a, "b": prof_b}
    pow_a = sorted(power_profile(a, x) for x in range(a.size))
    pow_b = sorted(power_profile(b, x) for x in range(b.size))
    if pow_a != pow_b:
        return None, {"invariant": "power_profile", "a": pow_a, "b": pow_b}
    cols_a, cols_b, matched = _joint_refinement(a, b)
    if not matched:
        return None, {"invariant": "refinement"}
    budget = _Budget(node_budget)
    search = _MapSearch(a, b, cols_a, cols_b, [], budget)
    res = search.run([])
    if res is None:
        return None, {"invariant": "search"}
    if not verify_map(a, b, res):
        raise AssertionError("search produced a non-isomorphism")
    return res, None
