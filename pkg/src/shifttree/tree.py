"""Rooted, leafless, locally finite directed trees with finite branching index.

A tree is a finite *core* (explicit edges between named vertices) plus a
finite number of infinite *rays* hanging off core vertices.  All branching
happens in the core, so generation sets are finite and computed exactly.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Union

from .errors import InvalidParam, InvalidTree, UnknownBuiltin, UnknownVertex

__all__ = [
    "Core",
    "Ray",
    "VertexId",
    "DirectedTree",
    "builtin",
    "BUILTIN_NAMES",
]


@dataclass(frozen=True)
class Core:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Ray:
    ray: str
    depth: int

    def __str__(self):
        return f"{self.ray}@{self.depth}"


VertexId = Union[Core, Ray]

_DIGITS = re.compile(r"(\d+)")


def natural_key(token: str) -> tuple:
    """Sort key treating digit runs numerically, so "r10" sorts after "r2"."""
    parts = _DIGITS.split(token)
    return tuple((0, int(p)) if p.isdigit() else (1, p) for p in parts if p)


class DirectedTree:
    """Validated tree: ``root`` name, ``core_edges`` pairs, ``rays`` as (attach, id).

    Immutable after construction.
    """

    def __init__(self, root: str, core_edges: Iterable, rays: Iterable, *, name: str | None = None):
        self.name = name
        self.root = Core(str(root))
        self.core_edges = tuple((str(u), str(v)) for u, v in core_edges)
        self.rays = tuple((str(a), str(r)) for a, r in rays)
        self._validate()

    def _validate(self):
        children: dict[str, list[str]] = {self.root.name: []}
        parent: dict[str, str] = {}
        for u, v in self.core_edges:
            if u == v:
                raise InvalidTree(f"self-loop at {u!r}")
            children.setdefault(u, []).append(v)
            children.setdefault(v, [])
            if v in parent and parent[v] != u:
                raise InvalidTree(f"vertex {v!r} has two parents ({parent[v]!r}, {u!r})")
            if v in parent:
                raise InvalidTree(f"duplicate edge ({u!r}, {v!r})")
            parent[v] = u
        if self.root.name in parent:
            raise InvalidTree(f"root {self.root.name!r} has a parent (circuit through root)")

        gen = {self.root.name: 0}
        queue = deque([self.root.name])
        while queue:
            u = queue.popleft()
            for v in children[u]:
                if v in gen:
                    raise InvalidTree(f"circuit detected at {v!r}")
                gen[v] = gen[u] + 1
                queue.append(v)
        unreached = sorted(set(children) - set(gen), key=natural_key)
        if unreached:
            raise InvalidTree(f"core vertices not reachable from root (disconnected or circuit): {unreached}")

        ray_ids = set()
        rays_at: dict[str, list[str]] = {}
        for attach, rid in self.rays:
            if attach not in gen:
                raise InvalidTree(f"ray {rid!r} attached at unknown core vertex {attach!r}")
            if rid in ray_ids:
                raise InvalidTree(f"duplicate ray id {rid!r}")
            ray_ids.add(rid)
            rays_at.setdefault(attach, []).append(rid)
        for u in gen:
            if not children[u] and u not in rays_at:
                raise InvalidTree(f"core vertex {u!r} is a leaf")

        self._core_children = {
            u: sorted(vs, key=natural_key) for u, vs in children.items()
        }
        self._core_parent = parent
        self._core_gen = gen
        self._rays_at = {u: sorted(rs, key=natural_key) for u, rs in rays_at.items()}
        self._ray_attach = {rid: attach for attach, rid in self.rays}
        self._ray_start = {rid: gen[attach] + 1 for attach, rid in self.rays}
        self.core_depth = max(gen.values())

    # -- ordering ---------------------------------------------------------

    def sort_key(self, v: VertexId) -> tuple:
        if isinstance(v, Core):
            return (self.generation_of(v), 0, natural_key(v.name), 0)
        return (self.generation_of(v), 1, natural_key(v.ray), v.depth)

    def sorted(self, vs: Iterable[VertexId]) -> list[VertexId]:
        return sorted(vs, key=self.sort_key)

    # -- membership and local structure -----------------------------------

    def __contains__(self, v) -> bool:
        if isinstance(v, Core):
            return v.name in self._core_gen
        if isinstance(v, Ray):
            return v.ray in self._ray_attach and v.depth >= 0
        return False

    def _check(self, v):
        if v not in self:
            raise UnknownVertex(v)

    def generation_of(self, v: VertexId) -> int:
        self._check(v)
        if isinstance(v, Core):
            return self._core_gen[v.name]
        return self._ray_start[v.ray] + v.depth

    def children(self, v: VertexId) -> list[VertexId]:
        self._check(v)
        if isinstance(v, Ray):
            return [Ray(v.ray, v.depth + 1)]
        out: list[VertexId] = [Core(c) for c in self._core_children[v.name]]
        out += [Ray(r, 0) for r in self._rays_at.get(v.name, ())]
        return self.sorted(out)

    def parent(self, v: VertexId) -> VertexId | None:
        self._check(v)
        if isinstance(v, Ray):
            return Ray(v.ray, v.depth - 1) if v.depth > 0 else Core(self._ray_attach[v.ray])
        p = self._core_parent.get(v.name)
        return None if p is None else Core(p)

    def ancestor(self, v: VertexId, k: int) -> VertexId | None:
        """par^<k>(v), or None if it does not exist."""
        for _ in range(k):
            if v is None:
                return None
            v = self.parent(v)
        return v

    def out_degree(self, v: VertexId) -> int:
        if isinstance(v, Ray):
            return 1
        return len(self._core_children[v.name]) + len(self._rays_at.get(v.name, ()))

    # -- global combinatorics ---------------------------------------------

    @cached_property
    def core_vertices(self) -> list[Core]:
        return self.sorted(Core(u) for u in self._core_gen)

    @cached_property
    def ray_ids(self) -> list[str]:
        """Ray ids in canonical order (start generation, then natural order)."""
        return sorted(self._ray_attach, key=lambda r: (self._ray_start[r], natural_key(r)))

    def ray_start(self, rid: str) -> int:
        return self._ray_start[rid]

    def ray_attach(self, rid: str) -> Core:
        return Core(self._ray_attach[rid])

    @cached_property
    def branching_vertices(self) -> list[Core]:
        """V_prec: vertices with at least two children (always core vertices)."""
        return [u for u in self.core_vertices if self.out_degree(u) >= 2]

    @cached_property
    def branching_index(self) -> int:
        bv = self.branching_vertices
        if not bv:
            return 0
        return 1 + max(self.generation_of(w) for w in bv)

    def generation(self, n: int) -> list[VertexId]:
        """Chi^<n>(root) in canonical order; empty for n < 0."""
        if n < 0:
            return []
        out: list[VertexId] = [u for u in self.core_vertices if self._core_gen[u.name] == n]
        out += [Ray(r, n - s) for r, s in self._ray_start.items() if s <= n]
        return self.sorted(out)

    def window(self, n: int) -> list[VertexId]:
        """W_n: union of generations n .. n + k_T."""
        out = []
        for j in range(n, n + self.branching_index + 1):
            out += self.generation(j)
        return out

    def vertices_upto(self, g: int) -> list[VertexId]:
        out = []
        for j in range(g + 1):
            out += self.generation(j)
        return out

    def descendants(self, v: VertexId, k: int) -> list[VertexId]:
        """Chi^<k>(v)."""
        self._check(v)
        if k < 0:
            return []
        if isinstance(v, Ray):
            return [Ray(v.ray, v.depth + k)]
        level: list[VertexId] = [v]
        for i in range(k):
            if all(isinstance(u, Ray) for u in level):
                return self.sorted(Ray(u.ray, u.depth + k - i) for u in level)
            nxt = []
            for u in level:
                nxt += self.children(u)
            level = nxt
        return self.sorted(level)

    def rays_below(self, v: VertexId) -> list[str]:
        """Ids of rays that pass through (or hang below) ``v``."""
        if isinstance(v, Ray):
            return [v.ray]
        out = []
        for r in self.ray_ids:
            a: VertexId | None = self.ray_attach(r)
            while a is not None:
                if a == v:
                    out.append(r)
                    break
                a = self.parent(a)
        return out

    def count_descendants(self, v: VertexId, k: int) -> int:
        return len(self.descendants(v, k))

    def to_dict(self) -> dict:
        return {
            "root": self.root.name,
            "core_edges": [list(e) for e in self.core_edges],
            "rays": [{"attach": a, "id": r} for a, r in self.rays],
        }

    def __repr__(self):
        label = self.name or "DirectedTree"
        return f"<{label}: {len(self._core_gen)} core vertices, {len(self.rays)} rays, k_T={self.branching_index}>"


def _t1():
    return DirectedTree("0", [], [("0", "1")], name="T1")


def _t2():
    return DirectedTree("(0,0)", [], [("(0,0)", "1"), ("(0,0)", "2")], name="T2")


def _t3():
    return DirectedTree(
        "(0,0)", [("(0,0)", "(1,1)")], [("(1,1)", "2"), ("(1,1)", "3")], name="T3"
    )


def _t4():
    return DirectedTree(
        "(0,0)",
        [("(0,0)", "(1,1)"), ("(1,1)", "(2,2)")],
        [("(2,2)", "3"), ("(2,2)", "4")],
        name="T4",
    )


def _tfan(d=3):
    d = int(d)
    if d < 2:
        raise InvalidParam(f"Tfan needs d >= 2, got {d}")
    return DirectedTree("(0,0)", [], [("(0,0)", str(k)) for k in range(d)], name=f"Tfan({d})")


_BUILTINS = {"T1": _t1, "T2": _t2, "T3": _t3, "T4": _t4, "Tfan": _tfan}
BUILTIN_NAMES = tuple(_BUILTINS)


def builtin(name: str, **params) -> DirectedTree:
    """Named example trees.

    Vertex labels follow the usual pictures: in T2..T4 ``Ray(j, d)`` is the
    vertex ``(j, d+1)``; in T1 ``Ray("1", d)`` is the vertex ``d+1``; in
    ``Tfan(d)`` ``Ray(k, i)`` is the vertex ``(i+1, k)``.
    """
    m = re.fullmatch(r"Tfan\((\d+)\)", name)
    if m:
        name, params = "Tfan", {"d": int(m.group(1)), **params}
    try:
        factory = _BUILTINS[name]
    except KeyError:
        raise UnknownBuiltin(name) from None
    return factory(**params)
