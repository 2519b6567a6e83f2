"""Full delta-ary tree environments.

Vertices use implicit heap numbering: the root is 0 and the j-th child
(0-indexed, left to right) of vertex ``i`` is ``i * delta + j + 1``.  Points
on the tree are :class:`Location` values, an edge (named by its deeper
endpoint) plus an exact offset measured from the shallower endpoint.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import ValidationError

ROOT = 0


@dataclass(frozen=True)
class Environment:
    d: int
    delta: int
    rho: int

    def __post_init__(self):
        for name in ("d", "delta", "rho"):
            if not isinstance(getattr(self, name), int) or isinstance(getattr(self, name), bool):
                raise ValidationError(f"{name} must be an integer")
        if self.d < 2:
            raise ValidationError("d must satisfy d >= 2")
        if self.delta < 2:
            raise ValidationError("delta must satisfy delta >= 2")
        if not 1 <= self.rho < self.d:
            raise ValidationError("rho must satisfy 1 <= rho < d")

    # -- counts -----------------------------------------------------------

    def first_id(self, depth: int) -> int:
        """Id of the leftmost vertex at ``depth``."""
        return (self.delta**depth - 1) // (self.delta - 1)

    @property
    def n_vertices(self) -> int:
        return self.first_id(self.d + 1)

    @property
    def n_edges(self) -> int:
        return self.n_vertices - 1

    # -- structure --------------------------------------------------------

    def is_vertex(self, i) -> bool:
        return isinstance(i, int) and not isinstance(i, bool) and 0 <= i < self.n_vertices

    def depth(self, i: int) -> int:
        k = 0
        while i > 0:
            i = (i - 1) // self.delta
            k += 1
        return k

    def parent(self, i: int) -> int:
        if i == ROOT:
            raise ValueError("the root has no parent")
        return (i - 1) // self.delta

    def children(self, i: int) -> range:
        if self.depth(i) >= self.d:
            return range(0)
        first = i * self.delta + 1
        return range(first, first + self.delta)

    def is_leaf(self, i: int) -> bool:
        return self.first_id(self.d) <= i < self.n_vertices

    def ancestor_at(self, i: int, depth: int) -> int:
        """The ancestor of ``i`` (or ``i`` itself) lying at ``depth``."""
        k = self.depth(i)
        if depth > k:
            raise ValueError(f"vertex {i} has depth {k} < {depth}")
        for _ in range(k - depth):
            i = (i - 1) // self.delta
        return i

    def is_ancestor(self, a: int, b: int) -> bool:
        """True when ``a`` is ``b`` or lies on the path from ``b`` to the root."""
        while b > a:
            b = (b - 1) // self.delta
        return a == b

    def lca(self, u: int, w: int) -> int:
        while u != w:
            if u > w:
                u = (u - 1) // self.delta
            else:
                w = (w - 1) // self.delta
        return u

    def vertex_path(self, u: int, w: int) -> list[int]:
        """Vertices on the unique path from ``u`` to ``w``, both included."""
        a = self.lca(u, w)
        up = [u]
        while up[-1] != a:
            up.append(self.parent(up[-1]))
        down = [w]
        while down[-1] != a:
            down.append(self.parent(down[-1]))
        return up + down[-2::-1]

    # -- locations --------------------------------------------------------

    def location(self, edge_child: int, offset) -> Location:
        """Build a canonical Location; offset 0 folds onto the parent vertex."""
        offset = Fraction(offset)
        if not self.is_vertex(edge_child):
            raise ValidationError(f"no vertex {edge_child!r}")
        if not 0 <= offset <= 1:
            raise ValidationError("offset must lie in [0, 1]")
        if offset == 0:
            if edge_child == ROOT:
                raise ValidationError("the root has no incoming edge")
            return Location(self.parent(edge_child), Fraction(1))
        if edge_child == ROOT and offset != 1:
            raise ValidationError("the root has no incoming edge")
        return Location(edge_child, offset)

    def point_depth(self, loc: Location) -> Fraction:
        return self.depth(loc.edge_child) - 1 + loc.offset

    def point_at_depth(self, below: int, depth) -> Location:
        """The point at ``depth`` on the path from the root to vertex ``below``."""
        depth = Fraction(depth)
        k = -(-depth.numerator // depth.denominator)  # ceil
        c = self.ancestor_at(below, k)
        if depth == k:
            return Location(c, Fraction(1))
        return Location(c, depth - (k - 1))


@dataclass(frozen=True, order=True)
class Location:
    """A point on the tree.

    Vertices are stored as ``Location(v, 1)`` (the root as ``Location(0, 1)``),
    so equality is structural.  Use :meth:`Environment.location` when an
    offset of 0 may occur; the raw constructor rejects it.
    """

    edge_child: int
    offset: Fraction

    def __post_init__(self):
        if not 0 < self.offset <= 1:
            raise ValidationError("raw Location offset must lie in (0, 1]; use Environment.location")

    @classmethod
    def at(cls, vertex: int) -> Location:
        return cls(vertex, Fraction(1))

    @property
    def is_vertex(self) -> bool:
        return self.offset == 1

    @property
    def vertex(self) -> int | None:
        return self.edge_child if self.offset == 1 else None

    def __str__(self):
        if self.offset == 1:
            return f"v{self.edge_child}"
        return f"e{self.edge_child}@{self.offset}"


def build_environment(d: int, delta: int, rho: int) -> Environment:
    return Environment(d, delta, rho)


def perimeter_vertices(env: Environment) -> list[int]:
    return list(range(env.first_id(env.rho), env.first_id(env.rho + 1)))


def leaf_entrances(env: Environment) -> list[int]:
    return list(range(env.first_id(env.d), env.n_vertices))


def branch_entrances(env: Environment, v: int) -> list[int]:
    """Leaves of the branch rooted at ``v``; a leaf is its own branch."""
    lo = hi = v
    for _ in range(env.d - env.depth(v)):
        lo = lo * env.delta + 1
        hi = hi * env.delta + env.delta
    return list(range(lo, hi + 1))


def dist_vertices(env: Environment, u: int, w: int) -> int:
    return env.depth(u) + env.depth(w) - 2 * env.depth(env.lca(u, w))


def _exits(env: Environment, loc: Location):
    """Vertices through which a path leaves ``loc``, with the distance to each."""
    if loc.offset == 1:
        return ((loc.edge_child, Fraction(0)),)
    c = loc.edge_child
    return ((env.parent(c), loc.offset), (c, 1 - loc.offset))


def dist_locations(env: Environment, a: Location, b: Location) -> Fraction:
    if a == b:
        return Fraction(0)
    if a.offset != 1 and b.offset != 1 and a.edge_child == b.edge_child:
        return abs(a.offset - b.offset)
    return min(
        da + dist_vertices(env, x, y) + db
        for x, da in _exits(env, a)
        for y, db in _exits(env, b)
    )


def nearest_perimeter_vertex(env: Environment, leaf: int) -> int:
    if not env.is_leaf(leaf):
        raise ValidationError(f"vertex {leaf} is not a leaf")
    return env.ancestor_at(leaf, env.rho)


def sweep_walk(env: Environment, start: int = ROOT) -> list[int]:
    """Closed left-most depth-first walk over the branch rooted at ``start``."""
    walk = [start]
    stack = [iter(env.children(start))]
    while stack:
        child = next(stack[-1], None)
        if child is None:
            stack.pop()
            if stack:
                walk.append(env.parent(walk[-1]))
            continue
        walk.append(child)
        stack.append(iter(env.children(child)))
    return walk
