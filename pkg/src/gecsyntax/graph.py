"""Undirected syntax graphs over constituency and dependency trees.

All tree nodes become graph nodes and every parent-child connection
becomes one undirected edge.  Node order is fixed: terminals first, by
position, then non-terminals in pre-order, so the first ``num_terminals``
rows of any node matrix are the token representations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import tree as T


@dataclass
class SyntaxGraph:
    num_terminals: int
    nt_labels: list[str]                 # pre-order, node id = num_terminals + index
    adjacency: list[list[int]]           # symmetric neighbor lists
    _edges: tuple[np.ndarray, np.ndarray] | None = field(
        default=None, init=False, repr=False, compare=False)

    @property
    def num_nodes(self) -> int:
        return self.num_terminals + len(self.nt_labels)

    @property
    def num_edges(self) -> int:
        return sum(len(n) for n in self.adjacency) // 2

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def directed_edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Both directions of every edge, as (sources, targets) id arrays."""
        if self._edges is None:
            us, vs = [], []
            for v, neigh in enumerate(self.adjacency):
                for u in neigh:
                    us.append(u)
                    vs.append(v)
            self._edges = (np.asarray(us, dtype=np.intp),
                           np.asarray(vs, dtype=np.intp))
        return self._edges

    def dense_adjacency(self) -> np.ndarray:
        a = np.zeros((self.num_nodes, self.num_nodes))
        for v, neigh in enumerate(self.adjacency):
            for u in neigh:
                a[v, u] = 1.0
        return a


def _add_edge(adjacency: list[list[int]], u: int, v: int) -> None:
    adjacency[u].append(v)
    adjacency[v].append(u)


def build_graph(root: T.NonTerminal) -> SyntaxGraph:
    """Graph over all nodes of a constituency tree, edges per tree link."""
    num_terminals = sum(1 for _ in T.terminals(root))
    nt_labels: list[str] = []
    ids: dict[int, int] = {}

    def assign(node: T.Node) -> None:
        if isinstance(node, T.Terminal):
            ids[id(node)] = node.position
            return
        ids[id(node)] = num_terminals + len(nt_labels)
        nt_labels.append(node.label)
        for child in node.children:
            assign(child)

    assign(root)
    adjacency: list[list[int]] = [[] for _ in range(num_terminals + len(nt_labels))]

    def connect(node: T.Node) -> None:
        if isinstance(node, T.Terminal):
            return
        for child in node.children:
            _add_edge(adjacency, ids[id(node)], ids[id(child)])
            connect(child)

    connect(root)
    return SyntaxGraph(num_terminals, nt_labels, adjacency)


def build_graph_dep(heads: Sequence[int], root_sentinel: int = 0) -> SyntaxGraph:
    """Graph over the tokens of a dependency tree.

    ``heads[i]`` is the 1-based head of token ``i + 1``; the sentinel
    value (0 by convention) marks the root.  Raises ``ValueError`` unless
    the heads encode a single-rooted tree.
    """
    n = len(heads)
    roots = [i for i, h in enumerate(heads) if h == root_sentinel]
    if n and not roots:
        raise ValueError("dependency heads contain no root")
    if len(roots) > 1:
        raise ValueError(f"multiple roots at tokens {[r + 1 for r in roots]}")
    adjacency: list[list[int]] = [[] for _ in range(n)]
    for i, h in enumerate(heads):
        if h == root_sentinel:
            continue
        if not (1 <= h <= n):
            raise ValueError(f"head index {h} out of range for {n} tokens")
        _add_edge(adjacency, i, h - 1)
    # A single-rooted, (n-1)-edge head assignment is a tree iff every token
    # reaches the root without revisiting a node.
    for start in range(n):
        seen = set()
        i = start
        while heads[i] != root_sentinel:
            if i in seen:
                raise ValueError("dependency heads contain a cycle")
            seen.add(i)
            i = heads[i] - 1
    return SyntaxGraph(n, [], adjacency)


def write_edge_list(graph: SyntaxGraph, fh) -> None:
    """Export edges as one "u v" line each (u < v), for inspection."""
    seen = set()
    for v, neigh in enumerate(graph.adjacency):
        for u in neigh:
            key = (min(u, v), max(u, v))
            if key not in seen:
                seen.add(key)
                fh.write(f"{key[0]} {key[1]}\n")


def graphs_from_trees(trees: Iterable[T.NonTerminal]) -> list[SyntaxGraph]:
    return [build_graph(t) for t in trees]
