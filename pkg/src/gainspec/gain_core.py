"""Gain-graph data model and structural transformations.

A gain graph here is a simple undirected graph whose oriented edges carry
unit-modulus complex numbers, with the reverse orientation carrying the
conjugate.  Only the low-to-high orientation is stored.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

UNIT_TOL = 1e-12
RENORMALIZE_EVERY = 16


class GraphError(ValueError):
    pass


class GainParseError(ValueError):
    pass


_R2 = math.sqrt(2.0) / 2.0
_R3 = math.sqrt(3.0) / 2.0
# exact (cos, sin) of k*pi/12 for the k where a closed form is cheap
_EXACT_TWELFTHS = {
    0: (1.0, 0.0), 2: (_R3, 0.5), 3: (_R2, _R2), 4: (0.5, _R3), 6: (0.0, 1.0),
    8: (-0.5, _R3), 9: (-_R2, _R2), 10: (-_R3, 0.5), 12: (-1.0, 0.0),
    14: (-_R3, -0.5), 15: (-_R2, -_R2), 16: (-0.5, -_R3), 18: (0.0, -1.0),
    20: (0.5, -_R3), 21: (_R2, -_R2), 22: (_R3, -0.5),
}

_ANGLE_RE = re.compile(
    r"^\s*(?P<sign>[+-]?)\s*(?P<num>\d+(?:\.\d*)?)?\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+))?\s*$"
)


def parse_angle(text: str) -> float | Fraction:
    """Parse ``pi``, ``pi/k``, ``j pi/k`` (returned as a Fraction of pi) or a float in radians."""
    s = text.strip().lower().replace("π", "pi")
    m = _ANGLE_RE.match(s)
    if m:
        num = m.group("num")
        den = int(m.group("den") or 1)
        if den == 0:
            raise GainParseError(f"zero denominator in angle {text!r}")
        if num is not None and "." in num:
            value = float(num) / den * math.pi
            return -value if m.group("sign") == "-" else value
        frac = Fraction(int(num) if num is not None else 1, den)
        return -frac if m.group("sign") == "-" else frac
    try:
        return float(s)
    except ValueError:
        raise GainParseError(f"cannot parse angle {text!r}") from None


@dataclass(frozen=True)
class UnitComplex:
    """A complex number on the unit circle, stored as (re, im)."""

    re: float
    im: float

    def __post_init__(self):
        mod2 = self.re * self.re + self.im * self.im
        if not abs(mod2 - 1.0) <= UNIT_TOL:
            raise GraphError(f"gain ({self.re}, {self.im}) is not unit modulus")

    @classmethod
    def one(cls) -> UnitComplex:
        return cls(1.0, 0.0)

    @classmethod
    def from_angle(cls, theta: float | Fraction) -> UnitComplex:
        """Gain e^{i theta}; a Fraction is read as a multiple of pi."""
        if isinstance(theta, Fraction):
            twelfths = theta * 12
            if twelfths.denominator == 1:
                k = int(twelfths) % 24
                if k in _EXACT_TWELFTHS:
                    return cls(*_EXACT_TWELFTHS[k])
            theta = float(theta) * math.pi
        return cls(math.cos(theta), math.sin(theta))

    @classmethod
    def from_complex(cls, z: complex, tol: float = UNIT_TOL) -> UnitComplex:
        z = complex(z)
        if abs(abs(z) - 1.0) > tol:
            raise GraphError(f"gain {z} is not unit modulus")
        return cls._renormalized(z.real, z.imag)

    @classmethod
    def parse(cls, text: str) -> UnitComplex:
        """Parse ``a+bi`` style complex literals or ``@<angle>`` angle forms."""
        s = text.strip()
        if s.startswith("@"):
            return cls.from_angle(parse_angle(s[1:]))
        t = s.replace(" ", "").replace("I", "i").replace("i", "j")
        try:
            z = complex(t)
        except ValueError:
            raise GainParseError(f"cannot parse gain {text!r}") from None
        return cls.from_complex(z)

    @classmethod
    def coerce(cls, value) -> UnitComplex:
        if isinstance(value, UnitComplex):
            return value
        if isinstance(value, str):
            return cls.parse(value)
        return cls.from_complex(complex(value))

    @classmethod
    def _renormalized(cls, re_: float, im_: float) -> UnitComplex:
        r = math.hypot(re_, im_)
        if r == 0.0:
            raise GraphError("cannot renormalize zero")
        return cls(re_ / r, im_ / r)

    def __complex__(self) -> complex:
        return complex(self.re, self.im)

    def __mul__(self, other: UnitComplex) -> UnitComplex:
        other = UnitComplex.coerce(other)
        re_ = self.re * other.re - self.im * other.im
        im_ = self.re * other.im + self.im * other.re
        return UnitComplex._unchecked(re_, im_)

    def __neg__(self) -> UnitComplex:
        return UnitComplex._unchecked(-self.re, -self.im)

    @classmethod
    def _unchecked(cls, re_: float, im_: float) -> UnitComplex:
        obj = object.__new__(cls)
        object.__setattr__(obj, "re", re_)
        object.__setattr__(obj, "im", im_)
        return obj

    def conjugate(self) -> UnitComplex:
        return UnitComplex._unchecked(self.re, -self.im)

    inverse = conjugate

    def normalized(self) -> UnitComplex:
        return UnitComplex._renormalized(self.re, self.im)

    @property
    def angle(self) -> float:
        return math.atan2(self.im, self.re)

    def distance(self, other) -> float:
        other = UnitComplex.coerce(other)
        return math.hypot(self.re - other.re, self.im - other.im)

    def is_close(self, other, tol: float = 1e-9) -> bool:
        return self.distance(other) <= tol


ONE = UnitComplex(1.0, 0.0)


class Graph:
    """Simple undirected graph on vertices 0..n-1."""

    __slots__ = ("n", "pairs", "neighbors", "_masks")

    def __init__(self, n: int, pairs: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise GraphError("negative vertex count")
        seen = set()
        for p, q in pairs:
            p, q = int(p), int(q)
            if p == q:
                raise GraphError(f"loop at vertex {p}")
            if not (0 <= p < n and 0 <= q < n):
                raise GraphError(f"edge ({p}, {q}) out of range for n={n}")
            key = (p, q) if p < q else (q, p)
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
        self.n = n
        self.pairs = tuple(sorted(seen))
        self.neighbors = _neighbor_lists(n, self.pairs)
        self._masks = None

    @property
    def m(self) -> int:
        return len(self.pairs)

    @property
    def masks(self) -> tuple[int, ...]:
        """Neighbourhood bitmasks, one int per vertex."""
        if self._masks is None:
            self._masks = tuple(sum(1 << u for u in nb) for nb in self.neighbors)
        return self._masks

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    @property
    def max_degree(self) -> int:
        return max((len(nb) for nb in self.neighbors), default=0)

    def has_edge(self, p: int, q: int) -> bool:
        return q in self.neighbors[p]

    def underlying(self) -> Graph:
        return self

    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.pairs == other.pairs

    def __hash__(self):
        return hash((self.n, self.pairs))

    def __repr__(self):
        return f"Graph(n={self.n}, pairs={list(self.pairs)})"


def _neighbor_lists(n, pairs):
    nbrs = [[] for _ in range(n)]
    for p, q in pairs:
        nbrs[p].append(q)
        nbrs[q].append(p)
    return tuple(tuple(sorted(nb)) for nb in nbrs)


class GainGraph:
    """Undirected simple graph with a gain on each oriented edge.

    ``edges`` holds ``(p, q, gain)`` with ``p < q`` and ``gain`` the value on
    the orientation p -> q.  Edges given high-to-low are flipped and their
    gain conjugated.
    """

    __slots__ = ("n", "edges", "_gain", "neighbors", "_graph")

    def __init__(self, n: int, edges: Iterable[tuple[int, int, object]] = ()):
        canon = {}
        for p, q, gain in edges:
            p, q = int(p), int(q)
            gain = UnitComplex.coerce(gain)
            if p == q:
                raise GraphError(f"loop at vertex {p}")
            if not (0 <= p < n and 0 <= q < n):
                raise GraphError(f"edge ({p}, {q}) out of range for n={n}")
            if p > q:
                p, q, gain = q, p, gain.conjugate()
            if (p, q) in canon:
                raise GraphError(f"duplicate edge {(p, q)}")
            canon[(p, q)] = gain
        self.n = n
        self.edges = tuple((p, q, canon[p, q]) for p, q in sorted(canon))
        self._gain = canon
        self._graph = Graph(n, canon.keys())
        self.neighbors = self._graph.neighbors

    @classmethod
    def from_graph(cls, graph: Graph, gains: Sequence | None = None) -> GainGraph:
        if gains is None:
            gains = [ONE] * graph.m
        if len(gains) != graph.m:
            raise GraphError(f"expected {graph.m} gains, got {len(gains)}")
        return cls(graph.n, ((p, q, g) for (p, q), g in zip(graph.pairs, gains)))

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        return self._graph.pairs

    @property
    def masks(self) -> tuple[int, ...]:
        return self._graph.masks

    @property
    def gains(self) -> tuple[UnitComplex, ...]:
        return tuple(g for _, _, g in self.edges)

    def gain(self, p: int, q: int) -> UnitComplex:
        """Gain of the orientation p -> q."""
        if p < q:
            key = (p, q)
        else:
            key = (q, p)
        try:
            g = self._gain[key]
        except KeyError:
            raise GraphError(f"vertices {p} and {q} are not adjacent") from None
        return g if p < q else g.conjugate()

    def has_edge(self, p: int, q: int) -> bool:
        return (min(p, q), max(p, q)) in self._gain

    def degree(self, v: int) -> int:
        return len(self.neighbors[v])

    @property
    def degrees(self) -> list[int]:
        return [len(nb) for nb in self.neighbors]

    @property
    def max_degree(self) -> int:
        return self._graph.max_degree

    def underlying(self) -> Graph:
        return self._graph

    def is_all_one(self, tol: float = 0.0) -> bool:
        return all(g.distance(ONE) <= tol for g in self.gains)

    def __eq__(self, other):
        return isinstance(other, GainGraph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        body = ", ".join(f"({p},{q},{complex(g):.6g})" for p, q, g in self.edges)
        return f"GainGraph(n={self.n}, [{body}])"


class HermitianMatrix:
    """Dense Hermitian matrix, read-only once built.

    The lower triangle is rebuilt from the upper one so conjugate symmetry
    holds exactly; the input only has to be Hermitian within ``tol``.
    """

    __slots__ = ("_a",)

    def __init__(self, data, tol: float = 1e-12):
        a = np.array(data, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise GraphError(f"expected a square matrix, got shape {a.shape}")
        scale = max(1.0, float(np.abs(a).max(initial=0.0)))
        if a.size and np.abs(a - a.conj().T).max() > tol * scale:
            raise GraphError("matrix is not Hermitian")
        upper = np.triu(a, 1)
        a = upper + upper.conj().T + np.diag(a.diagonal().real)
        a.setflags(write=False)
        self._a = a

    @property
    def n(self) -> int:
        return self._a.shape[0]

    @property
    def array(self) -> np.ndarray:
        return self._a

    def __array__(self, dtype=None, copy=None):
        return self._a if dtype is None else self._a.astype(dtype)

    def entry(self, p: int, q: int) -> complex:
        return complex(self._a[p, q])

    def __repr__(self):
        return f"HermitianMatrix(n={self.n})"


@dataclass(frozen=True)
class SwitchingFunction:
    """Diagonal of a switching unitary, one unit gain per vertex."""

    values: tuple[UnitComplex, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(UnitComplex.coerce(v) for v in self.values))

    def __len__(self):
        return len(self.values)

    @classmethod
    def from_angles(cls, angles: Iterable[float]) -> SwitchingFunction:
        return cls(tuple(UnitComplex.from_angle(a) for a in angles))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> SwitchingFunction:
        return cls.from_angles(rng.uniform(0.0, 2.0 * math.pi, size=n))

    def as_array(self) -> np.ndarray:
        return np.array([complex(v) for v in self.values])


def adjacency(g: GainGraph) -> HermitianMatrix:
    a = np.zeros((g.n, g.n), dtype=complex)
    for p, q, gain in g.edges:
        z = complex(gain)
        a[p, q] = z
        a[q, p] = z.conjugate()
    return HermitianMatrix(a)


def adjacency_array(g) -> np.ndarray:
    """Plain ndarray adjacency; a 0/1 real matrix for a :class:`Graph`."""
    if isinstance(g, Graph):
        a = np.zeros((g.n, g.n))
        for p, q in g.pairs:
            a[p, q] = a[q, p] = 1.0
        return a
    return adjacency(g).array


def switch(g: GainGraph, s: SwitchingFunction) -> GainGraph:
    if len(s) != g.n:
        raise GraphError(f"switching function has length {len(s)}, graph has {g.n} vertices")
    v = s.values
    return GainGraph(g.n, ((p, q, (v[p] * gain * v[q].conjugate()).normalized()) for p, q, gain in g.edges))


def negate(g: GainGraph) -> GainGraph:
    return GainGraph(g.n, ((p, q, -gain) for p, q, gain in g.edges))


def induced_subgraph(g, keep: Iterable[int], return_map: bool = False):
    """Subgraph induced on ``keep``, relabelled 0..k-1 in ascending order."""
    kept = sorted(set(int(v) for v in keep))
    for v in kept:
        if not 0 <= v < g.n:
            raise GraphError(f"vertex {v} out of range")
    old_to_new = {v: i for i, v in enumerate(kept)}
    if isinstance(g, Graph):
        sub = Graph(len(kept), ((old_to_new[p], old_to_new[q]) for p, q in g.pairs
                                if p in old_to_new and q in old_to_new))
    else:
        sub = GainGraph(len(kept), ((old_to_new[p], old_to_new[q], gain) for p, q, gain in g.edges
                                    if p in old_to_new and q in old_to_new))
    return (sub, old_to_new) if return_map else sub


def delete_edges(g, cut: Iterable[tuple[int, int]]):
    drop = set()
    for p, q in cut:
        key = (min(p, q), max(p, q))
        if not g.has_edge(*key):
            raise GraphError(f"edge {key} not in graph")
        drop.add(key)
    if isinstance(g, Graph):
        return Graph(g.n, (e for e in g.pairs if e not in drop))
    return GainGraph(g.n, ((p, q, gain) for p, q, gain in g.edges if (p, q) not in drop))


def cut_set_between(g, part: Iterable[int]) -> frozenset[tuple[int, int]]:
    side = set(part)
    if not side or len(side) >= g.n or any(not 0 <= v < g.n for v in side):
        raise GraphError("part must be a nonempty proper subset of the vertices")
    return frozenset((p, q) for p, q in g.pairs if (p in side) != (q in side))


def gain_of_walk(g: GainGraph, walk: Sequence[int]) -> UnitComplex:
    """Ordered product of directed gains along ``walk``.

    Pass a closed walk (first vertex repeated at the end) to get a cycle gain.
    """
    acc = ONE
    for i, (p, q) in enumerate(zip(walk, walk[1:]), start=1):
        acc = acc * g.gain(p, q)
        if i % RENORMALIZE_EVERY == 0:
            acc = acc.normalized()
    return acc.normalized()


def cycle_gain(g: GainGraph, cycle: Sequence[int]) -> UnitComplex:
    """Gain of the oriented cycle visiting ``cycle`` in order and closing back."""
    return gain_of_walk(g, list(cycle) + [cycle[0]])


def kronecker_with_simple(g: GainGraph, h) -> GainGraph:
    """Gain Kronecker product with a simple graph; vertex (p, q) gets index p*h.n + q."""
    h = h.underlying()
    edges = []
    for p, a, gain in g.edges:
        for q, b in h.pairs:
            # (p,q)~(a,b) and (p,b)~(a,q), both carrying phi(p->a)
            edges.append((p * h.n + q, a * h.n + b, gain))
            edges.append((p * h.n + b, a * h.n + q, gain))
    return GainGraph(g.n * h.n, edges)


K2 = Graph(2, [(0, 1)])


def bipartite_double(g: GainGraph) -> GainGraph:
    return kronecker_with_simple(g, K2)
