"""Named graph families, random gains, small-graph enumeration, file formats."""

from __future__ import annotations

import enum
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, combinations_with_replacement
from typing import Iterator, Sequence

import numpy as np

from .combinatorics import CapExceeded, is_bipartite
from .gain_core import (
    ONE,
    GainGraph,
    GainParseError,
    Graph,
    GraphError,
    UnitComplex,
    parse_angle,
)

I = UnitComplex(0.0, 1.0)
MINUS_I = UnitComplex(0.0, -1.0)
MINUS_ONE = UnitComplex(-1.0, 0.0)
FILE_UNIT_TOL = 1e-9


class GainMode(str, enum.Enum):
    ALL_ONE = "all-one"
    ALL_MINUS_ONE = "all-minus-one"
    GAUSSIAN_SET = "gaussian"
    UNIFORM_CIRCLE = "uniform"
    EXPLICIT = "explicit"
    CYCLE_PHASE = "cycle-phase"


@dataclass(frozen=True)
class GainAssignmentSpec:
    mode: GainMode = GainMode.ALL_ONE
    seed: int = 0
    explicit: tuple = ()
    theta: object = 0.0

    @property
    def is_random(self) -> bool:
        return self.mode in (GainMode.GAUSSIAN_SET, GainMode.UNIFORM_CIRCLE)


ALL_ONE = GainAssignmentSpec()


def random_gains(g, spec: GainAssignmentSpec = ALL_ONE) -> GainGraph:
    """Put gains on the underlying graph of ``g`` according to ``spec``.

    Random modes draw from numpy's PCG64 seeded with ``spec.seed``, one draw
    per edge in sorted edge order, so the result depends only on the seed.
    """
    under = g.underlying()
    m = under.m
    mode = GainMode(spec.mode)
    if mode is GainMode.ALL_ONE:
        gains = [ONE] * m
    elif mode is GainMode.ALL_MINUS_ONE:
        gains = [MINUS_ONE] * m
    elif mode is GainMode.GAUSSIAN_SET:
        rng = np.random.default_rng(spec.seed)
        pick = (ONE, I, MINUS_I)
        gains = [pick[k] for k in rng.integers(0, 3, size=m)]
    elif mode is GainMode.UNIFORM_CIRCLE:
        rng = np.random.default_rng(spec.seed)
        gains = [UnitComplex.from_angle(float(t)) for t in rng.uniform(0.0, 2 * math.pi, size=m)]
    elif mode is GainMode.EXPLICIT:
        if len(spec.explicit) != m:
            raise GraphError(f"explicit gain list has {len(spec.explicit)} entries for {m} edges")
        gains = [UnitComplex.coerce(x) for x in spec.explicit]
    else:
        # CYCLE_PHASE: the whole phase sits on the first edge
        gains = [ONE] * m
        if m:
            gains[0] = _angle_gain(spec.theta)
    return GainGraph.from_graph(under, gains)


def _angle_gain(theta) -> UnitComplex:
    if isinstance(theta, str):
        theta = parse_angle(theta)
    return UnitComplex.from_angle(theta)


# -- named families -------------------------------------------------------

def make_cycle(n: int, theta=0.0) -> GainGraph:
    """C_n whose oriented cycle 0 -> 1 -> ... -> n-1 -> 0 has gain e^{i theta}."""
    if n < 3:
        raise GraphError("a cycle needs at least 3 vertices")
    edges = [(0, 1, _angle_gain(theta))]
    edges += [(i, i + 1, ONE) for i in range(1, n - 1)]
    edges.append((n - 1, 0, ONE))
    return GainGraph(n, edges)


def make_complete_bipartite(p: int, q: int, spec: GainAssignmentSpec = ALL_ONE) -> GainGraph:
    if p < 1 or q < 1:
        raise GraphError("part sizes must be at least 1")
    return random_gains(Graph(p + q, [(i, p + j) for i in range(p) for j in range(q)]), spec)


def make_complete(n: int, spec: GainAssignmentSpec = ALL_ONE) -> GainGraph:
    if n < 1:
        raise GraphError("need at least one vertex")
    return random_gains(Graph(n, combinations(range(n), 2)), spec)


def make_star(r: int, spec: GainAssignmentSpec = ALL_ONE) -> GainGraph:
    """K_{1,r} with centre 0."""
    return make_complete_bipartite(1, r, spec)


def make_path(n: int, spec: GainAssignmentSpec = ALL_ONE) -> GainGraph:
    if n < 1:
        raise GraphError("need at least one vertex")
    return random_gains(Graph(n, [(i, i + 1) for i in range(n - 1)]), spec)


# u, v, u', v', x3, y3
FIGURE2_LABELS = ("u", "v", "u'", "v'", "x3", "y3")
FIGURE2_EDGES = ((0, 1), (2, 3), (0, 3), (1, 4), (0, 5), (4, 5))
# removing the edges incident with e = (v, x3) leaves K_2 + P_4
FIGURE2_DISTINGUISHED_EDGE = (1, 4)


def make_figure2_graph(spec: GainAssignmentSpec = ALL_ONE) -> GainGraph:
    """The six-vertex bipartite graph used in the pendant-path strictness argument.

    A 4-cycle u-v-x3-y3 with the path u-v'-u' hanging off u.
    """
    g = random_gains(Graph(6, FIGURE2_EDGES), spec)
    from .combinatorics import is_connected, matching_number

    assert matching_number(g) == 3 and is_bipartite(g) and is_connected(g)
    return g


# -- graph6 ---------------------------------------------------------------

def _g6_size(text: str) -> tuple[int, int]:
    if not text:
        raise GainParseError("graph6: empty input")
    codes = [ord(ch) for ch in text]
    if any(c < 63 or c > 126 for c in codes):
        raise GainParseError("graph6: character outside the printable range 63..126")
    if codes[0] < 126:
        return codes[0] - 63, 1
    if len(codes) >= 4 and codes[1] < 126:
        return ((codes[1] - 63) << 12) | ((codes[2] - 63) << 6) | (codes[3] - 63), 4
    raise GainParseError("graph6: malformed size header")


def parse_graph6(text: str) -> Graph:
    line = text.rstrip("\n")
    if line.startswith(">>graph6<<"):
        line = line[len(">>graph6<<"):]
    if "\n" in line:
        raise GainParseError("graph6: trailing garbage after the first line")
    n, offset = _g6_size(line)
    nbits = n * (n - 1) // 2
    need = (nbits + 5) // 6
    payload = line[offset:]
    if len(payload) < need:
        raise GainParseError(f"graph6: truncated payload ({len(payload)} of {need} bytes)")
    if len(payload) > need:
        raise GainParseError("graph6: trailing garbage after the payload")
    bits = 0
    for ch in payload:
        bits = (bits << 6) | (ord(ch) - 63)
    pad = need * 6 - nbits
    if bits & ((1 << pad) - 1):
        raise GainParseError("graph6: nonzero padding bits")
    bits >>= pad
    pairs = []
    k = nbits - 1
    for j in range(1, n):
        for i in range(j):
            if bits >> k & 1:
                pairs.append((i, j))
            k -= 1
    return Graph(n, pairs)


def encode_graph6(g) -> str:
    n = g.n
    if n < 0 or n > 258047:
        raise GraphError("graph6 supports 0..258047 vertices")
    if n < 63:
        head = chr(63 + n)
    else:
        head = chr(126) + "".join(chr(63 + ((n >> s) & 63)) for s in (12, 6, 0))
    bits = []
    for j in range(1, n):
        for i in range(j):
            bits.append(1 if g.has_edge(i, j) else 0)
    bits += [0] * (-len(bits) % 6)
    body = "".join(chr(63 + int("".join(map(str, bits[k:k + 6])), 2)) for k in range(0, len(bits), 6))
    return head + body


# -- GGF ------------------------------------------------------------------

def parse_ggf(text: str) -> GainGraph:
    """Parse the ``GGF1 n m`` gain-graph format; see README for the grammar."""
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0].strip()
        if body:
            lines.append((lineno, body.split()))
    if not lines:
        raise GainParseError("GGF: empty file")
    lineno, head = lines[0]
    if len(head) != 3 or head[0] != "GGF1":
        raise GainParseError(f"GGF line {lineno}: expected header 'GGF1 <n> <m>'")
    try:
        n, m = int(head[1]), int(head[2])
    except ValueError:
        raise GainParseError(f"GGF line {lineno}: n and m must be integers") from None
    if n < 0 or m < 0:
        raise GainParseError(f"GGF line {lineno}: negative size")
    if len(lines) - 1 != m:
        raise GainParseError(f"GGF: header promises {m} edges, found {len(lines) - 1}")
    edges = []
    seen = set()
    for lineno, tok in lines[1:]:
        try:
            u, v = int(tok[0]), int(tok[1])
        except (ValueError, IndexError):
            raise GainParseError(f"GGF line {lineno}: bad vertex indices") from None
        if not (0 <= u < n and 0 <= v < n):
            raise GainParseError(f"GGF line {lineno}: vertex index out of range for n={n}")
        if u == v:
            raise GainParseError(f"GGF line {lineno}: loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise GainParseError(f"GGF line {lineno}: duplicate edge {key}")
        seen.add(key)
        edges.append((u, v, _parse_gain_tokens(tok[2:], lineno)))
    return GainGraph(n, edges)


def _parse_gain_tokens(tok: Sequence[str], lineno: int) -> UnitComplex:
    if len(tok) == 1 and tok[0].startswith("@"):
        try:
            return _angle_gain(tok[0][1:])
        except (ValueError, GainParseError) as exc:
            raise GainParseError(f"GGF line {lineno}: {exc}") from None
    if len(tok) != 2:
        raise GainParseError(f"GGF line {lineno}: gain must be '<re> <im>' or '@<angle>'")
    try:
        re_, im_ = float(tok[0]), float(tok[1])
    except ValueError:
        raise GainParseError(f"GGF line {lineno}: gain components must be numbers") from None
    if not (math.isfinite(re_) and math.isfinite(im_)):
        raise GainParseError(f"GGF line {lineno}: non-finite gain")
    mod = math.hypot(re_, im_)
    if abs(mod - 1.0) > FILE_UNIT_TOL:
        raise GainParseError(f"GGF line {lineno}: gain modulus {mod!r} is not 1")
    if abs(re_ * re_ + im_ * im_ - 1.0) <= 1e-12:
        return UnitComplex(re_, im_)
    return UnitComplex(re_ / mod, im_ / mod)


def write_ggf(g: GainGraph) -> str:
    out = [f"GGF1 {g.n} {g.m}"]
    for p, q, gain in g.edges:
        out.append(f"{p} {q} {gain.re:.17g} {gain.im:.17g}")
    return "\n".join(out) + "\n"


# -- canonical labelling and enumeration ------------------------------------

def _refine(nbrs, colors):
    """Equitable refinement; colours are ints and cells keep their relative order."""
    ncells = len(set(colors))
    while True:
        sig = [(colors[v], tuple(sorted(Counter(colors[u] for u in nb).items())))
               for v, nb in enumerate(nbrs)]
        order = sorted(set(sig))
        rank = {s: i for i, s in enumerate(order)}
        colors = [rank[s] for s in sig]
        if len(order) == ncells:
            return colors
        ncells = len(order)


def _twin_classes(masks, cell):
    """Group vertices of a cell with the same neighbourhood (open or closed)."""
    groups = []
    for v in cell:
        for grp in groups:
            u = grp[0]
            open_u, open_v = masks[u] & ~(1 << v), masks[v] & ~(1 << u)
            if open_u == open_v:
                grp.append(v)
                break
        else:
            groups.append([v])
    return [grp[0] for grp in groups]


def canonical_form(g) -> tuple[int, tuple[int, ...]]:
    """Canonical (n, relabelled adjacency masks) by refinement and individualisation.

    Two graphs are isomorphic exactly when their canonical forms are equal.
    Twins are interchangeable under an automorphism, so only one per twin
    class is individualised.
    """
    masks = g.masks
    nbrs = g.neighbors
    n = g.n
    best = [None]

    def leaf(colors):
        pos = colors  # discrete: colour is the new position
        code = [0] * n
        for v in range(n):
            m = 0
            for u in range(n):
                if masks[v] >> u & 1:
                    m |= 1 << pos[u]
            code[pos[v]] = m
        code = tuple(code)
        if best[0] is None or code > best[0]:
            best[0] = code

    def search(colors):
        colors = _refine(nbrs, colors)
        cells = {}
        for v, c in enumerate(colors):
            cells.setdefault(c, []).append(v)
        if len(cells) == n:
            leaf(colors)
            return
        target = min((c for c in cells if len(cells[c]) > 1), key=lambda c: (len(cells[c]), c))
        for v in _twin_classes(masks, cells[target]):
            # individualised vertex goes first within its cell
            search([2 * c + (c == target and u != v) for u, c in enumerate(colors)])

    if n:
        search([0] * n)
    return n, best[0] or ()


def graph_from_canonical(form) -> Graph:
    n, code = form
    return Graph(n, [(i, j) for i in range(n) for j in range(i + 1, n) if code[i] >> j & 1])


CONNECTED_COUNTS = {1: 1, 2: 1, 3: 2, 4: 6, 5: 21, 6: 112, 7: 853, 8: 11117, 9: 261080}
ALL_COUNTS = {0: 1, 1: 1, 2: 2, 3: 4, 4: 11, 5: 34, 6: 156, 7: 1044, 8: 12346}
ENUMERATION_CAP = 8


@lru_cache(maxsize=None)
def _connected_forms(n: int) -> tuple:
    """Canonical forms of connected graphs on n vertices, by adding a vertex to smaller ones."""
    if n > ENUMERATION_CAP:
        raise CapExceeded(f"exhaustive enumeration capped at n={ENUMERATION_CAP}")
    if n == 1:
        return ((1, (0,)),)
    found = set()
    for parent in _connected_forms(n - 1):
        base = graph_from_canonical(parent)
        for s in range(1, 1 << (n - 1)):
            child = Graph(n, list(base.pairs) + [(u, n - 1) for u in range(n - 1) if s >> u & 1])
            if _new_vertex_is_canonical_kind(child):
                found.add(canonical_form(child))
    forms = tuple(sorted(found))
    if len(forms) != CONNECTED_COUNTS[n]:
        raise AssertionError(f"enumerated {len(forms)} connected graphs on {n} vertices, "
                             f"expected {CONNECTED_COUNTS[n]}")
    return forms


def _new_vertex_is_canonical_kind(g: Graph) -> bool:
    """Keep a child only if its last vertex has least degree among non-cut vertices.

    Every connected graph has such a vertex, and deleting it gives a connected
    parent, so this filter loses no isomorphism class.
    """
    last = g.n - 1
    d = g.degree(last)
    full = (1 << g.n) - 1
    for u in range(last):
        if g.degree(u) < d and _connected_without(g.masks, full & ~(1 << u)):
            return False
    return True


def _connected_without(masks, alive: int) -> bool:
    start = alive & -alive
    seen = frontier = start
    while frontier:
        nxt = 0
        while frontier:
            low = frontier & -frontier
            nxt |= masks[low.bit_length() - 1]
            frontier ^= low
        frontier = nxt & alive & ~seen
        seen |= frontier
    return seen == alive


def connected_graphs(n: int) -> list[Graph]:
    return [graph_from_canonical(f) for f in _connected_forms(n)]


def _partitions(n, largest=None):
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _partitions(n - k, k):
            yield (k,) + rest


def all_graphs(n: int) -> list[Graph]:
    """Every graph on n vertices up to isomorphism, as disjoint unions of connected ones."""
    out = []
    for parts in _partitions(n):
        per_size = Counter(parts)
        choices = [list(combinations_with_replacement(range(len(_connected_forms(k))), c))
                   for k, c in sorted(per_size.items())]
        sizes = sorted(per_size)
        for pick in _product(choices):
            pairs, offset = [], 0
            for k, idxs in zip(sizes, pick):
                for i in idxs:
                    comp = graph_from_canonical(_connected_forms(k)[i])
                    pairs += [(p + offset, q + offset) for p, q in comp.pairs]
                    offset += k
            out.append(Graph(n, pairs))
    if n in ALL_COUNTS and len(out) != ALL_COUNTS[n]:
        raise AssertionError(f"built {len(out)} graphs on {n} vertices, expected {ALL_COUNTS[n]}")
    return out


def _product(lists):
    if not lists:
        yield ()
        return
    for head in lists[0]:
        for tail in _product(lists[1:]):
            yield (head,) + tail


@dataclass(frozen=True)
class CorpusSpec:
    n_min: int = 1
    n_max: int = 7
    connected_only: bool = True
    bipartite_only: bool = False
    gain_modes: tuple = (GainMode.ALL_ONE, GainMode.ALL_MINUS_ONE, GainMode.UNIFORM_CIRCLE,
                         GainMode.GAUSSIAN_SET)
    samples_per_graph: int = 2
    exhaustive_max: int = 8
    random_graphs_beyond: int = 200
    seed: int = 0
    extra: dict = field(default_factory=dict, compare=False)


def _random_connected(n: int, rng: np.random.Generator) -> Graph:
    from .combinatorics import is_connected

    while True:
        p = rng.uniform(0.2, 0.8)
        mask = rng.random(n * (n - 1) // 2) < p
        pairs = [e for e, keep in zip(combinations(range(n), 2), mask) if keep]
        g = Graph(n, pairs)
        if is_connected(g):
            return g


def enumerate_underlying(corpus: CorpusSpec) -> Iterator[tuple[str, Graph]]:
    """Yield ``(key, graph)`` pairs.

    Up to ``exhaustive_max`` vertices every graph is produced once up to
    isomorphism; larger sizes are sampled from G(n, p) with the corpus seed.
    Keys are stable strings (graph6 of the canonical labelling, or a sample
    index) so sweeps can sort by them.
    """
    if corpus.n_max > 62:
        raise CapExceeded("corpus vertex count capped at 62")
    for n in range(max(corpus.n_min, 1), corpus.n_max + 1):
        if n <= corpus.exhaustive_max:
            graphs = connected_graphs(n) if corpus.connected_only else all_graphs(n)
            keyed = ((encode_graph6(g), g) for g in graphs)
        else:
            rng = np.random.default_rng([corpus.seed, n])
            keyed = ((f"sample:n={n}:{i}:{encode_graph6(g)}", g)
                     for i, g in ((i, _random_connected(n, rng)) for i in range(corpus.random_graphs_beyond)))
        for key, g in keyed:
            if corpus.bipartite_only and not is_bipartite(g):
                continue
            yield key, g


def gain_samples(g: Graph, corpus: CorpusSpec, key: str) -> Iterator[tuple[GainAssignmentSpec, GainGraph]]:
    """Gain assignments for one underlying graph; random seeds derive from the corpus seed and key."""
    base = _stable_seed(corpus.seed, key)
    for mode in corpus.gain_modes:
        mode = GainMode(mode)
        reps = corpus.samples_per_graph if mode in (GainMode.GAUSSIAN_SET, GainMode.UNIFORM_CIRCLE) else 1
        for k in range(reps):
            spec = GainAssignmentSpec(mode, seed=(base + 1009 * k + hash_mode(mode)) % 2**63)
            yield spec, random_gains(g, spec)


def hash_mode(mode: GainMode) -> int:
    return sum((i + 1) * ord(ch) for i, ch in enumerate(mode.value))


def _stable_seed(seed: int, key: str) -> int:
    acc = seed & (2**63 - 1)
    for ch in key:
        acc = (acc * 1000003 + ord(ch)) % 2**63
    return acc
