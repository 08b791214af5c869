"""Accessibility analysis of the upper transition operator.

The accessibility graph has an edge x -> y exactly when the one-step upper
probability of reaching y from x is positive; this is decided from row
supports, never from numeric thresholds.  On top of it we compute
communication classes, the class partial order, closedness, the top class,
and the two structural conditions that govern limit behaviour:

* top class regular (TCR): the top class exists and is aperiodic;
* top class absorbing (TCA): the top class exists and no nonempty set of
  outside states can confine the process forever.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import TransitionModel


@dataclass(frozen=True)
class AccessibilityGraph:
    """Boolean adjacency plus its reflexive-transitive closure."""

    adjacency: np.ndarray
    reachable: np.ndarray

    @property
    def n(self) -> int:
        return self.adjacency.shape[0]


@dataclass(frozen=True)
class ClassDecomposition:
    """Communication classes with their accessibility partial order.

    Classes are numbered in ascending order of their smallest state index.
    ``class_reach[i, j]`` holds when class j is accessible from class i.
    """

    classes: tuple[tuple[int, ...], ...]
    class_of: np.ndarray
    class_reach: np.ndarray
    closed: tuple[bool, ...]
    top_class: int | None


@dataclass(frozen=True)
class AccessibilityReport:
    graph: AccessibilityGraph
    decomposition: ClassDecomposition
    tcr: bool
    tca: bool
    period: int | None
    confining_set: tuple[int, ...] | None


def build_graph(model: TransitionModel) -> AccessibilityGraph:
    n = model.n
    adj = np.zeros((n, n), dtype=bool)
    for x, row in enumerate(model.rows):
        adj[x] = row.upper_support()
    reach = adj | np.eye(n, dtype=bool)
    for k in range(n):
        reach |= np.outer(reach[:, k], reach[k, :])
    return AccessibilityGraph(adjacency=adj, reachable=reach)


def _tarjan_scc(adj: np.ndarray) -> list[list[int]]:
    """Iterative single-pass lowlink DFS; components in reverse topological order."""
    n = adj.shape[0]
    targets = [np.flatnonzero(adj[v]).tolist() for v in range(n)]
    index = [-1] * n
    low = [0] * n
    onstack = [False] * n
    stack: list[int] = []
    comps: list[list[int]] = []
    counter = 0
    for root in range(n):
        if index[root] != -1:
            continue
        work = [(root, 0)]
        while work:
            v, pos = work.pop()
            if pos == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                onstack[v] = True
            recurse = False
            for i in range(pos, len(targets[v])):
                w = targets[v][i]
                if index[w] == -1:
                    work.append((v, i + 1))
                    work.append((w, 0))
                    recurse = True
                    break
                if onstack[w]:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    onstack[w] = False
                    comp.append(w)
                    if w == v:
                        break
                comps.append(sorted(comp))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return comps


def decompose(graph: AccessibilityGraph) -> ClassDecomposition:
    n = graph.n
    comps = sorted(_tarjan_scc(graph.adjacency), key=lambda c: c[0])
    class_of = np.empty(n, dtype=int)
    for ci, comp in enumerate(comps):
        class_of[comp] = ci
    c = len(comps)
    class_reach = np.zeros((c, c), dtype=bool)
    for ci, comp in enumerate(comps):
        reach_states = np.any(graph.reachable[comp], axis=0)
        class_reach[ci] = np.bincount(class_of[reach_states], minlength=c) > 0
        class_reach[ci, ci] = True
    closed = tuple(
        not np.any(graph.adjacency[np.ix_(comp, np.setdiff1d(np.arange(n), comp))])
        for comp in comps
    )
    n_closed = sum(closed)
    top = closed.index(True) if n_closed == 1 else None
    return ClassDecomposition(
        classes=tuple(tuple(comp) for comp in comps),
        class_of=class_of,
        class_reach=class_reach,
        closed=closed,
        top_class=top,
    )


def globally_reachable_states(graph: AccessibilityGraph) -> tuple[int, ...]:
    """States accessible from every state; nonempty exactly when a top class exists."""
    return tuple(np.flatnonzero(np.all(graph.reachable, axis=0)))


def _class_period(adj: np.ndarray, comp: tuple[int, ...]) -> int:
    """gcd of cycle lengths in the strongly connected subgraph on ``comp``.

    Returns 0 when the subgraph has no edges (a single state without a
    self-loop), which counts as not aperiodic.
    """
    inside = set(comp)
    root = comp[0]
    level = {root: 0}
    queue = [root]
    while queue:
        u = queue.pop(0)
        for v in np.flatnonzero(adj[u]):
            v = int(v)
            if v in inside and v not in level:
                level[v] = level[u] + 1
                queue.append(v)
    g = 0
    for u in comp:
        for v in np.flatnonzero(adj[u]):
            v = int(v)
            if v in inside:
                g = math.gcd(g, level[u] + 1 - level[v])
    return g


def check_tcr(graph: AccessibilityGraph, dec: ClassDecomposition) -> tuple[bool, int | None]:
    """Top class regularity; the second value is the top-class period when known."""
    if dec.top_class is None:
        return False, None
    period = _class_period(graph.adjacency, dec.classes[dec.top_class])
    return period == 1, period


def check_tca(model: TransitionModel, dec: ClassDecomposition) -> tuple[bool, tuple[int, ...] | None]:
    """Top class absorption, decided by the exact confining-set iteration.

    Starting from all states outside the top class, repeatedly discard states
    whose row cannot keep the process inside the current set.  The fixed
    point is the largest set the process can stay in forever; absorption
    holds exactly when it is empty, and otherwise the fixed point is returned
    as a witness.
    """
    if dec.top_class is None:
        return False, None
    top = set(dec.classes[dec.top_class])
    current = [x for x in range(model.n) if x not in top]
    while current:
        mask = np.zeros(model.n, dtype=bool)
        mask[current] = True
        kept = [x for x in current if model.rows[x].can_confine(mask)]
        if len(kept) == len(current):
            break
        current = kept
    if current:
        return False, tuple(current)
    return True, None


def classify(model: TransitionModel) -> AccessibilityReport:
    """Full structural classification of a model's accessibility graph."""
    graph = build_graph(model)
    dec = decompose(graph)
    tcr, period = check_tcr(graph, dec)
    tca, confining = check_tca(model, dec)
    return AccessibilityReport(
        graph=graph,
        decomposition=dec,
        tcr=tcr,
        tca=tca,
        period=period,
        confining_set=confining,
    )


def to_dot(model: TransitionModel, graph: AccessibilityGraph | None = None) -> str:
    """Render the accessibility graph in DOT format."""
    if graph is None:
        graph = build_graph(model)
    labels = model.states.labels
    lines = ["digraph accessibility {"]
    for lab in labels:
        lines.append(f'  "{lab}";')
    for x in range(graph.n):
        for y in np.flatnonzero(graph.adjacency[x]):
            lines.append(f'  "{labels[x]}" -> "{labels[int(y)]}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
