"""Exact combinatorial quantities of the underlying graph, plus balance tests.

Everything here works on vertex bitmasks; graphs are small (tens of
vertices at most) and the exact searches are exponential by nature.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

from .gain_core import ONE, GainGraph, Graph, GraphError, UnitComplex, gain_of_walk, induced_subgraph, negate

GAIN_TOL = 1e-9
COVER_CAP = 40
CYCLE_VERTEX_CAP = 16
CYCLE_COUNT_CAP = 10**6
SUBSET_CAP = 16


class CapExceeded(ValueError):
    """An exact search was asked to run beyond its configured size cap."""


@dataclass(frozen=True)
class FundamentalCycleBasis:
    tree_edges: frozenset
    non_tree_edges: tuple
    cycles: tuple  # vertex sequences, closing edge implied
    gains: tuple  # UnitComplex per cycle, same orientation as ``cycles``

    def real_parts_sum(self) -> float:
        return sum(g.re for g in self.gains)


@dataclass(frozen=True)
class CombinatorialProfile:
    matching_number: int
    vertex_cover_number: int
    odd_cycle_count: int
    bipartite_obstruction: int
    is_bipartite: bool
    components: tuple


@dataclass(frozen=True)
class ComponentClass:
    vertices: tuple
    is_isolated_vertex: bool
    is_complete_bipartite: bool
    part_sizes: tuple | None
    has_perfect_matching: bool
    is_balanced: bool
    is_star: bool


@dataclass(frozen=True)
class StructuralClass:
    components: tuple = field(default_factory=tuple)
    equality_class_matching: bool = False
    equality_class_cover: bool = False


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def components(g) -> list[list[int]]:
    """Connected components as sorted vertex lists, ordered by smallest vertex."""
    seen = [False] * g.n
    out = []
    for s in range(g.n):
        if seen[s]:
            continue
        seen[s] = True
        comp, queue = [s], deque([s])
        while queue:
            v = queue.popleft()
            for u in g.neighbors[v]:
                if not seen[u]:
                    seen[u] = True
                    comp.append(u)
                    queue.append(u)
        out.append(sorted(comp))
    return out


def is_connected(g) -> bool:
    return g.n <= 1 or len(components(g)) == 1


def two_coloring(masks, alive: int) -> dict[int, int] | None:
    """Proper 2-colouring of the subgraph induced on ``alive``, or None."""
    color = {}
    for s in _bits(alive):
        if s in color:
            continue
        color[s] = 0
        queue = [s]
        while queue:
            v = queue.pop()
            for u in _bits(masks[v] & alive):
                if u not in color:
                    color[u] = 1 - color[v]
                    queue.append(u)
                elif color[u] == color[v]:
                    return None
    return color


def is_bipartite(g) -> bool:
    return two_coloring(g.masks, (1 << g.n) - 1) is not None


def bipartition(g) -> tuple[list[int], list[int]] | None:
    color = two_coloring(g.masks, (1 << g.n) - 1)
    if color is None:
        return None
    return ([v for v in range(g.n) if color[v] == 0], [v for v in range(g.n) if color[v] == 1])


def fundamental_cycles(g: GainGraph) -> FundamentalCycleBasis:
    """Fundamental cycles of the depth-first forest.

    Each component is rooted at its lowest vertex and neighbours are visited
    in ascending order.  The cycle of a non-tree edge (u, v), u < v, starts
    at u, follows the tree path to v and closes along v -> u.
    """
    n = g.n
    parent = [-1] * n
    depth = [0] * n
    seen = [False] * n
    tree = set()
    for root in range(n):
        if seen[root]:
            continue
        seen[root] = True
        stack = [(root, iter(g.neighbors[root]))]
        while stack:
            v, it = stack[-1]
            for u in it:
                if not seen[u]:
                    seen[u] = True
                    parent[u] = v
                    depth[u] = depth[v] + 1
                    tree.add((min(u, v), max(u, v)))
                    stack.append((u, iter(g.neighbors[u])))
                    break
            else:
                stack.pop()

    non_tree = tuple(e for e in g.pairs if e not in tree)
    cycles, gains = [], []
    for u, v in non_tree:
        up, down = [u], [v]
        a, b = u, v
        while depth[a] > depth[b]:
            a = parent[a]
            up.append(a)
        while depth[b] > depth[a]:
            b = parent[b]
            down.append(b)
        while a != b:
            a, b = parent[a], parent[b]
            up.append(a)
            down.append(b)
        path = up + down[-2::-1]
        cycles.append(tuple(path))
        if isinstance(g, GainGraph):
            gains.append(gain_of_walk(g, path + [u]))
        else:
            gains.append(ONE)
    return FundamentalCycleBasis(frozenset(tree), non_tree, tuple(cycles), tuple(gains))


def is_balanced(g: GainGraph, tol: float = GAIN_TOL) -> bool:
    return all(gain.distance(ONE) <= tol for gain in fundamental_cycles(g).gains)


def is_antibalanced(g: GainGraph, tol: float = GAIN_TOL) -> bool:
    return is_balanced(negate(g), tol)


def switching_equivalent(g1: GainGraph, g2: GainGraph, tol: float = GAIN_TOL) -> bool:
    if g1.n != g2.n or g1.pairs != g2.pairs:
        raise GraphError("switching equivalence needs identical underlying graphs")
    b1, b2 = fundamental_cycles(g1), fundamental_cycles(g2)
    return all(x.distance(y) <= tol for x, y in zip(b1.gains, b2.gains))


def maximum_matching(g) -> list[tuple[int, int]]:
    """Maximum cardinality matching by Edmonds' blossom algorithm."""
    n = g.n
    adj = g.neighbors
    match = [-1] * n
    for v in range(n):
        if match[v] == -1:
            for u in adj[v]:
                if match[u] == -1:
                    match[u], match[v] = v, u
                    break

    for root in range(n):
        if match[root] != -1:
            continue
        end, parent = _augmenting_path(root, adj, match)
        v = end
        while v != -1:
            pv = parent[v]
            nxt = match[pv]
            match[v], match[pv] = pv, v
            v = nxt
    return sorted((v, match[v]) for v in range(n) if match[v] > v)


def _augmenting_path(root, adj, match):
    n = len(adj)
    used = [False] * n
    parent = [-1] * n
    base = list(range(n))
    used[root] = True
    queue = deque([root])

    def lca(a, b):
        on_path = [False] * n
        while True:
            a = base[a]
            on_path[a] = True
            if match[a] == -1:
                break
            a = parent[match[a]]
        while True:
            b = base[b]
            if on_path[b]:
                return b
            b = parent[match[b]]

    def mark(v, b, child, blossom):
        while base[v] != b:
            blossom[base[v]] = blossom[base[match[v]]] = True
            parent[v] = child
            child = match[v]
            v = parent[match[v]]

    while queue:
        v = queue.popleft()
        for to in adj[v]:
            if base[v] == base[to] or match[v] == to:
                continue
            if to == root or (match[to] != -1 and parent[match[to]] != -1):
                cur = lca(v, to)
                blossom = [False] * n
                mark(v, cur, to, blossom)
                mark(to, cur, v, blossom)
                for i in range(n):
                    if blossom[base[i]]:
                        base[i] = cur
                        if not used[i]:
                            used[i] = True
                            queue.append(i)
            elif parent[to] == -1:
                parent[to] = v
                if match[to] == -1:
                    return to, parent
                used[match[to]] = True
                queue.append(match[to])
    return -1, parent


def matching_number(g) -> int:
    return len(maximum_matching(g))


def _greedy_matching_size(masks, alive: int) -> int:
    size = 0
    free = alive
    for v in _bits(alive):
        if not free >> v & 1:
            continue
        nb = masks[v] & free & ~(1 << v)
        if nb:
            u = (nb & -nb).bit_length() - 1
            free &= ~((1 << v) | (1 << u))
            size += 1
    return size


def vertex_cover_number(g, cap: int = COVER_CAP) -> int:
    """Exact minimum vertex cover by branch and bound.

    Degree-1 and triangle degree-2 reductions, greedy-matching lower bound,
    branching on a maximum-degree vertex (take it, or take its neighbourhood).
    """
    if g.n > cap:
        raise CapExceeded(f"vertex cover capped at n={cap}, got n={g.n}")
    masks = g.masks
    best = [g.n]

    def search(alive: int, taken: int):
        while True:
            changed = False
            for v in _bits(alive):
                nb = masks[v] & alive
                deg = nb.bit_count()
                if deg == 0:
                    alive &= ~(1 << v)
                    changed = True
                elif deg == 1:
                    alive &= ~(nb | (1 << v))
                    taken += 1
                    changed = True
                elif deg == 2:
                    a, b = _bits(nb)
                    if masks[a] >> b & 1:
                        alive &= ~(nb | (1 << v))
                        taken += 2
                        changed = True
                if changed:
                    break
            if not changed:
                break
        if taken >= best[0]:
            return
        if not alive:
            best[0] = taken
            return
        if taken + _greedy_matching_size(masks, alive) >= best[0]:
            return
        v = max(_bits(alive), key=lambda x: ((masks[x] & alive).bit_count(), -x))
        nb = masks[v] & alive
        search(alive & ~(1 << v), taken + 1)
        search(alive & ~(nb | (1 << v)), taken + nb.bit_count())

    search((1 << g.n) - 1, 0)
    return best[0]


def simple_cycles(g, cap_vertices: int = CYCLE_VERTEX_CAP, cap_count: int = CYCLE_COUNT_CAP):
    """Yield every simple cycle once, as a vertex tuple.

    A cycle is reported starting at its smallest vertex, oriented so the
    second vertex is smaller than the last.
    """
    if g.n > cap_vertices:
        raise CapExceeded(f"cycle enumeration capped at n={cap_vertices}, got n={g.n}")
    masks = g.masks
    count = 0
    for s in range(g.n):
        allowed = ((1 << g.n) - 1) & ~((1 << (s + 1)) - 1)
        path = [s]
        stack = [iter(list(_bits(masks[s] & allowed)))]
        on_path = 1 << s
        while stack:
            for u in stack[-1]:
                if masks[u] >> s & 1 and len(path) >= 2 and path[1] < u:
                    count += 1
                    if count > cap_count:
                        raise CapExceeded(f"more than {cap_count} simple cycles")
                    yield tuple(path) + (u,)
                nxt = masks[u] & allowed & ~on_path & ~(1 << u)
                path.append(u)
                on_path |= 1 << u
                stack.append(iter(list(_bits(nxt))))
                break
            else:
                stack.pop()
                v = path.pop()
                on_path &= ~(1 << v)


def odd_cycle_count(g, cap_vertices: int = CYCLE_VERTEX_CAP, cap_count: int = CYCLE_COUNT_CAP) -> int:
    return sum(1 for c in simple_cycles(g, cap_vertices, cap_count) if len(c) % 2)


def bipartite_obstruction(g, cap: int = SUBSET_CAP) -> int:
    """Fewest vertices whose removal leaves a bipartite graph."""
    if g.n > cap:
        raise CapExceeded(f"bipartite obstruction capped at n={cap}, got n={g.n}")
    full = (1 << g.n) - 1
    for k in range(g.n + 1):
        for drop in combinations(range(g.n), k):
            alive = full
            for v in drop:
                alive &= ~(1 << v)
            if two_coloring(g.masks, alive) is not None:
                return k
    return g.n


def _forest_matching(masks, alive: int) -> int | None:
    """Matching number of the induced subgraph if it is a forest, else None."""
    deg = {v: (masks[v] & alive).bit_count() for v in _bits(alive)}
    edges = sum(deg.values()) // 2
    # forest iff edges == vertices - components
    comps = 0
    seen = 0
    for s in _bits(alive):
        if seen >> s & 1:
            continue
        comps += 1
        frontier = 1 << s
        seen |= frontier
        while frontier:
            nxt = 0
            for v in _bits(frontier):
                nxt |= masks[v] & alive
            frontier = nxt & ~seen
            seen |= frontier
    if edges != len(deg) - comps:
        return None
    # leaves first: matching a leaf to its neighbour is always optimal in a forest
    size = 0
    remaining = alive
    leaves = [v for v, d in deg.items() if d == 1]
    while leaves:
        v = leaves.pop()
        if not remaining >> v & 1:
            continue
        nb = masks[v] & remaining
        if not nb:
            remaining &= ~(1 << v)
            continue
        u = (nb & -nb).bit_length() - 1
        size += 1
        remaining &= ~((1 << v) | (1 << u))
        for w in _bits(masks[u] & remaining):
            if (masks[w] & remaining).bit_count() == 1:
                leaves.append(w)
    return size


def max_acyclic_deletion_matching(g, cap: int = SUBSET_CAP) -> int:
    """max mu(G - V0) over proper subsets V0 (the empty set included) leaving a forest."""
    if g.n > cap:
        raise CapExceeded(f"acyclic deletion search capped at n={cap}, got n={g.n}")
    masks = g.masks
    best = 0
    for alive in range(1, 1 << g.n):
        mu = _forest_matching(masks, alive)
        if mu is not None and mu > best:
            best = mu
    return best


def structural_class(g: GainGraph) -> StructuralClass:
    classes = []
    delta = g.max_degree
    for comp in components(g):
        sub = induced_subgraph(g, comp)
        parts = bipartition(sub)
        complete = False
        sizes = None
        if sub.m and parts is not None:
            x, y = parts
            complete = sub.m == len(x) * len(y)
            if complete:
                sizes = tuple(sorted((len(x), len(y))))
        mu = matching_number(sub)
        classes.append(ComponentClass(
            vertices=tuple(comp),
            is_isolated_vertex=len(comp) == 1,
            is_complete_bipartite=complete,
            part_sizes=sizes,
            has_perfect_matching=2 * mu == len(comp),
            is_balanced=is_balanced(sub) if isinstance(sub, GainGraph) else True,
            is_star=complete and sizes[0] == 1,
        ))
    nontrivial = [c for c in classes if not c.is_isolated_vertex]
    matching_class = all(
        c.is_complete_bipartite and c.part_sizes[0] == c.part_sizes[1] and c.is_balanced
        for c in nontrivial
    )
    # each star K_{1,delta} needs one cover vertex, so this is exactly tau(G) copies
    cover_class = all(
        c.is_star and c.part_sizes == (1, delta) and c.is_balanced for c in nontrivial
    )
    return StructuralClass(tuple(classes), matching_class, cover_class)


def combinatorial_profile(g) -> CombinatorialProfile:
    bip = is_bipartite(g)
    return CombinatorialProfile(
        matching_number=matching_number(g),
        vertex_cover_number=vertex_cover_number(g),
        odd_cycle_count=0 if bip else odd_cycle_count(g),
        bipartite_obstruction=0 if bip else bipartite_obstruction(g),
        is_bipartite=bip,
        components=tuple(tuple(c) for c in components(g)),
    )
