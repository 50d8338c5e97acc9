"""Rooted directed trees with every edge oriented toward the root.

Information flows leaves -> root.  The unique out-neighbor of a node is
its parent; ``subtree(u)`` collects every node with a directed path to
``u``, including ``u`` itself.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InstanceError


@dataclass(frozen=True)
class RootedTree:
    nodes: frozenset[int]
    edges: frozenset[tuple[int, int]]
    root: int

    @staticmethod
    def make(nodes: Iterable[int], edges: Iterable[Sequence[int]], root: int) -> "RootedTree":
        return RootedTree(
            frozenset(nodes), frozenset((int(u), int(v)) for u, v in edges), int(root)
        )


def validate_tree(tree: RootedTree) -> str | None:
    """Return None if the tree is well formed, else the first violation found."""
    if tree.root not in tree.nodes:
        return f"root {tree.root} is not a node"
    for u, v in tree.edges:
        if u not in tree.nodes or v not in tree.nodes:
            return f"edge {u}->{v} references an unknown node"
        if u == v:
            return f"self-loop at node {u}"

    out: dict[int, list[int]] = {u: [] for u in tree.nodes}
    for u, v in tree.edges:
        out[u].append(v)

    cycle = _find_directed_cycle(tree.nodes, out)
    if cycle is not None:
        return "cycle: " + " -> ".join(str(u) for u in cycle)

    for u in sorted(tree.nodes):
        if u == tree.root:
            if out[u]:
                return f"root {u} has an outgoing edge to {sorted(out[u])[0]}"
        elif len(out[u]) == 0:
            return f"node {u} has no outgoing edge"
        elif len(out[u]) > 1:
            return f"node {u} has multiple outgoing edges to {sorted(out[u])}"

    reached = {tree.root}
    frontier = [tree.root]
    incoming = _incoming_map(tree)
    while frontier:
        v = frontier.pop()
        for u in incoming[v]:
            if u not in reached:
                reached.add(u)
                frontier.append(u)
    if reached != tree.nodes:
        missing = sorted(tree.nodes - reached)
        return f"disconnected: nodes {missing} cannot reach the root"
    return None


def _find_directed_cycle(nodes, out) -> list[int] | None:
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {u: WHITE for u in nodes}
    for start in sorted(nodes):
        if color[start] != WHITE:
            continue
        stack = [(start, iter(sorted(out[start])))]
        color[start] = GRAY
        path = [start]
        while stack:
            node, it = stack[-1]
            advanced = False
            for nxt in it:
                if color[nxt] == GRAY:
                    return path[path.index(nxt):] + [nxt]
                if color[nxt] == WHITE:
                    color[nxt] = GRAY
                    stack.append((nxt, iter(sorted(out[nxt]))))
                    path.append(nxt)
                    advanced = True
                    break
            if not advanced:
                color[node] = BLACK
                stack.pop()
                path.pop()
    return None


def _incoming_map(tree: RootedTree) -> dict[int, set[int]]:
    inc: dict[int, set[int]] = {u: set() for u in tree.nodes}
    for u, v in tree.edges:
        inc[v].add(u)
    return inc


def _require_node(tree: RootedTree, u: int):
    if u not in tree.nodes:
        raise InstanceError(f"unknown node id {u}")


def incoming(tree: RootedTree, u: int) -> frozenset[int]:
    _require_node(tree, u)
    return frozenset(a for a, b in tree.edges if b == u)


def parent(tree: RootedTree, u: int) -> int | None:
    """The unique out-neighbor of u; None for the root."""
    _require_node(tree, u)
    for a, b in tree.edges:
        if a == u:
            return b
    return None


def subtree(tree: RootedTree, u: int) -> frozenset[int]:
    """All nodes with a directed path to u, including u itself."""
    _require_node(tree, u)
    inc = _incoming_map(tree)
    seen = {u}
    frontier = [u]
    while frontier:
        v = frontier.pop()
        for w in inc[v]:
            if w not in seen:
                seen.add(w)
                frontier.append(w)
    return frozenset(seen)


def unrelated(tree: RootedTree, u: int) -> frozenset[int]:
    """Nodes with no directed path to or from u."""
    sub = subtree(tree, u)
    return frozenset(v for v in tree.nodes if v not in sub and u not in subtree(tree, v))


@dataclass(frozen=True)
class Relations:
    incoming: frozenset[int]
    parent: int | None
    subtree: frozenset[int]
    unrelated: frozenset[int]


def relations(tree: RootedTree, u: int) -> Relations:
    return Relations(incoming(tree, u), parent(tree, u), subtree(tree, u), unrelated(tree, u))


def depths(tree: RootedTree) -> dict[int, int]:
    """Directed-path length from each node to the root."""
    d = {tree.root: 0}
    inc = _incoming_map(tree)
    frontier = [tree.root]
    while frontier:
        v = frontier.pop()
        for u in inc[v]:
            d[u] = d[v] + 1
            frontier.append(u)
    return d


@dataclass(frozen=True)
class Ordering:
    """A transmission schedule: nodes listed in the order they send."""

    sequence: tuple[int, ...]

    def rank(self, u: int) -> int:
        return self.sequence.index(u) + 1

    @property
    def ranks(self) -> dict[int, int]:
        return {u: i + 1 for i, u in enumerate(self.sequence)}


def check_ordering(tree: RootedTree, ordering: Ordering) -> str | None:
    if sorted(ordering.sequence) != sorted(tree.nodes):
        return "ordering is not a bijection on the node set"
    rank = ordering.ranks
    for u, v in tree.edges:
        if rank[u] >= rank[v]:
            return f"edge {u}->{v} runs against the ordering"
    return None


def canonical_ordering(tree: RootedTree) -> Ordering:
    """Deterministic default: deepest nodes first, ties by node id."""
    d = depths(tree)
    return Ordering(tuple(sorted(tree.nodes, key=lambda u: (-d[u], u))))


@dataclass(frozen=True)
class OrderingView:
    """Ordering-relative node sets around a focus node."""

    earlier: frozenset[int]
    later: frozenset[int]
    pending_roots: frozenset[int]


def ordering_sets(tree: RootedTree, ordering: Ordering, u: int) -> OrderingView:
    """Nodes scheduled before/after u, and the roots of the already-sent
    forest whose parents transmit at or after u (excluding u itself)."""
    _require_node(tree, u)
    err = check_ordering(tree, ordering)
    if err is not None:
        raise InstanceError(err)
    rank = ordering.ranks
    ru = rank[u]
    earlier = frozenset(v for v in tree.nodes if rank[v] < ru)
    later = frozenset(v for v in tree.nodes if rank[v] > ru)
    pending = frozenset(
        v for v in earlier if parent(tree, v) not in earlier and parent(tree, v) != u
    )
    return OrderingView(earlier, later, pending)


def enumerate_orderings(tree: RootedTree, limit: int | None = None) -> list[Ordering]:
    """All transmission schedules consistent with the edges.

    The canonical ordering comes first; the rest follow in lexicographic
    order of their node sequences.  ``limit`` truncates the output.
    """
    inc = _incoming_map(tree)
    n = len(tree.nodes)
    results: list[tuple[int, ...]] = []
    placed: set[int] = set()
    seq: list[int] = []

    def rec():
        if limit is not None and len(results) > limit:
            return
        if len(seq) == n:
            results.append(tuple(seq))
            return
        for v in sorted(tree.nodes):
            if v in placed or not inc[v] <= placed:
                continue
            placed.add(v)
            seq.append(v)
            rec()
            seq.pop()
            placed.remove(v)
            if limit is not None and len(results) > limit:
                return

    rec()
    canonical = canonical_ordering(tree).sequence
    ordered = [canonical] + [s for s in results if s != canonical]
    if limit is not None:
        ordered = ordered[:limit]
    return [Ordering(s) for s in ordered]


@dataclass(frozen=True)
class Cut:
    """A downward-closed node set: members contain their whole subtrees."""

    members: frozenset[int]
    boundary: frozenset[int]


def enumerate_valid_cuts(tree: RootedTree) -> list[Cut]:
    """Every nonempty proper node set closed under taking subtrees.

    Each cut is the disjoint union of the subtrees of its boundary, the
    members whose parent lies outside.
    """
    nonroot = sorted(tree.nodes - {tree.root})
    subs = {v: subtree(tree, v) for v in nonroot}
    cuts: list[Cut] = []

    def rec(i: int, chosen: list[int], used: frozenset[int]):
        if i == len(nonroot):
            if chosen:
                cuts.append(Cut(used, frozenset(chosen)))
            return
        v = nonroot[i]
        rec(i + 1, chosen, used)
        if v not in used and not subs[v] & frozenset(chosen):
            rec(i + 1, chosen + [v], used | subs[v])

    rec(0, [], frozenset())
    cuts.sort(key=lambda c: (len(c.members), sorted(c.members)))
    return cuts
