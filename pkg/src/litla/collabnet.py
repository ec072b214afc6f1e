"""Collaboration-network analytics: components, diameter, hop coverage,
centralities, clique counts, categorical assortativity and the top-active
author subnetwork."""

from __future__ import annotations

import warnings
from collections import Counter, deque
from dataclasses import dataclass

import numpy as np

from .countries import UNKNOWN
from .errors import ConvergenceError
from .graph import NODE_AUTHOR, KnowledgeGraph, NodeRef, ProjectedGraph
from .stats import modal_country


@dataclass
class ComponentReport:
    sizes: list[int]            # descending
    count: int
    largest_size: int
    diameter_of_largest: int


@dataclass
class AssortativityResult:
    attribute: str
    r: float
    categories: list[str]
    mixing: list[list[float]]   # edge-endpoint fractions, rows/cols sum to 1


# --- connectivity ---------------------------------------------------------------


def connected_components(pg: ProjectedGraph) -> list[list[str]]:
    """Components as sorted node lists, largest first (ties by first node)."""
    seen: set[str] = set()
    comps: list[list[str]] = []
    for start in pg.sorted_nodes():
        if start in seen:
            continue
        comp = []
        queue = deque([start])
        seen.add(start)
        while queue:
            u = queue.popleft()
            comp.append(u)
            for v in pg.neighbors(u):
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
        comps.append(sorted(comp))
    comps.sort(key=lambda c: (-len(c), c[0]))
    return comps


def _bfs_distances(pg: ProjectedGraph, source: str) -> dict[str, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in pg.neighbors(u):
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def components(pg: ProjectedGraph) -> ComponentReport:
    comps = connected_components(pg)
    sizes = [len(c) for c in comps]
    if not comps:
        return ComponentReport(sizes=[], count=0, largest_size=0, diameter_of_largest=0)
    return ComponentReport(
        sizes=sizes,
        count=len(comps),
        largest_size=sizes[0],
        diameter_of_largest=_diameter_of(pg, comps[0]),
    )


def _diameter_of(pg: ProjectedGraph, component: list[str]) -> int:
    best = 0
    for u in component:
        ecc = max(_bfs_distances(pg, u).values())
        best = max(best, ecc)
    return best


def diameter_lcc(pg: ProjectedGraph) -> int:
    """Exact diameter of the largest connected component via all-sources BFS."""
    comps = connected_components(pg)
    if not comps:
        raise ValueError("empty graph has no diameter")
    return _diameter_of(pg, comps[0])


def hop_coverage(pg: ProjectedGraph) -> list[tuple[int, float]]:
    """Fraction of the largest component reached within k hops of its
    highest-degree node (degree ties broken lexicographically)."""
    comps = connected_components(pg)
    if not comps:
        raise ValueError("empty graph")
    lcc = comps[0]
    source = min(lcc, key=lambda u: (-pg.degree(u), u))
    dist = _bfs_distances(pg, source)
    n = len(lcc)
    ecc = max(dist.values())
    layer_counts = Counter(dist.values())
    out = []
    reached = 0
    for k in range(ecc + 1):
        reached += layer_counts.get(k, 0)
        out.append((k, reached / n))
    return out


def degree_histogram(pg: ProjectedGraph, lcc_only: bool = False) -> list[tuple[int, int]]:
    nodes = connected_components(pg)[0] if lcc_only and pg.nodes else pg.nodes
    counts = Counter(pg.degree(u) for u in nodes)
    return sorted(counts.items())


# --- centralities ---------------------------------------------------------------


def pagerank(pg: ProjectedGraph, damping: float = 0.85, tol: float = 1e-10,
             max_iter: int = 500) -> dict[str, float]:
    """PageRank on the weighted undirected graph.

    Undirected edges act as reciprocal directed pairs with transition
    probability proportional to edge weight; nodes with zero weighted
    degree spread their mass uniformly. Scores sum to 1; convergence is
    max absolute change < tol.
    """
    if not 0.0 < damping < 1.0:
        raise ValueError("damping must lie in (0, 1)")
    nodes = pg.sorted_nodes()
    n = len(nodes)
    if n == 0:
        return {}
    idx = {u: i for i, u in enumerate(nodes)}
    src, dst, prob = [], [], []
    dangling = np.zeros(n, dtype=bool)
    for u in nodes:
        nbrs = sorted(pg.neighbors(u))
        weights = [pg.edge_attrs(u, v).get("weight", 1.0) for v in nbrs]
        wsum = float(sum(weights))
        if wsum <= 0.0 or not nbrs:
            dangling[idx[u]] = True
            continue
        for v, w in zip(nbrs, weights):
            src.append(idx[u])
            dst.append(idx[v])
            prob.append(w / wsum)
    src = np.array(src, dtype=int)
    dst = np.array(dst, dtype=int)
    prob = np.array(prob, dtype=float)

    p = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        inflow = np.zeros(n)
        if len(src):
            np.add.at(inflow, dst, p[src] * prob)
        inflow += p[dangling].sum() / n
        p_new = damping * inflow + (1.0 - damping) / n
        residual = float(np.max(np.abs(p_new - p)))
        p = p_new
        if residual < tol:
            return {u: float(p[idx[u]]) for u in nodes}
    raise ConvergenceError(f"pagerank failed to converge in {max_iter} iterations", residual)


def betweenness(pg: ProjectedGraph) -> dict[str, float]:
    """Exact shortest-path betweenness (Brandes accumulation, hop metric),
    normalized by (n-1)(n-2)/2 so a star center scores 1."""
    nodes = pg.sorted_nodes()
    n = len(nodes)
    cb = {u: 0.0 for u in nodes}
    for s in nodes:
        stack: list[str] = []
        preds: dict[str, list[str]] = {u: [] for u in nodes}
        sigma = {u: 0.0 for u in nodes}
        sigma[s] = 1.0
        dist = {s: 0}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in sorted(pg.neighbors(v)):
                if w not in dist:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = {u: 0.0 for u in nodes}
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                cb[w] += delta[w]
    norm = (n - 1) * (n - 2) / 2.0
    if norm <= 0:
        return {u: 0.0 for u in nodes}
    # each unordered pair is accumulated from both endpoints
    return {u: cb[u] / 2.0 / norm for u in nodes}


# --- cliques ---------------------------------------------------------------------


def count_k_cliques(pg: ProjectedGraph, k: int) -> int:
    """Exact number of k-vertex complete subgraphs, by ordered backtracking
    over neighbor intersections (intended for k in {3, 4, 5})."""
    if k < 1:
        raise ValueError("k must be positive")
    nodes = pg.sorted_nodes()
    if k == 1:
        return len(nodes)
    adj = {u: pg.neighbors(u) for u in nodes}

    count = 0

    def extend(last: str, common: set[str], size: int):
        nonlocal count
        if size == k:
            count += 1
            return
        for v in sorted(common):
            if v > last:
                extend(v, common & adj[v], size + 1)

    for u in nodes:
        extend(u, set(adj[u]), 1)
    return count


# --- node attributes and mixing ----------------------------------------------------


def author_attribute(kg: KnowledgeGraph, author_key: str, kind: str,
                     topic_labels: dict[str, int] | None = None) -> str:
    """Modal category of an author across their papers.

    nationality: modal resolved country over (paper, author) incidences.
    primary_topic: modal topic id over the author's papers, outliers (-1)
    excluded. Ties break lexicographically; UNKNOWN when no data.
    """
    attrs = kg.nodes[NodeRef(NODE_AUTHOR, author_key)]
    incidences = attrs["incidences"]
    if kind == "nationality":
        return modal_country(incidences)
    if kind == "primary_topic":
        if topic_labels is None:
            raise ValueError("primary_topic requires topic_labels")
        counts = Counter()
        for _year, pid, _c in incidences:
            label = topic_labels.get(pid, -1)
            if label != -1:
                counts[label] += 1
        if not counts:
            return UNKNOWN
        return str(min(counts, key=lambda t: (-counts[t], str(t))))
    raise ValueError(f"unknown attribute kind {kind!r}")


def assortativity_categorical(pg: ProjectedGraph, labels: dict[str, str],
                              attribute: str = "label",
                              exclude_unknown: bool = False
                              ) -> AssortativityResult | None:
    """Newman categorical assortativity r = (sum e_ii - sum a_i b_i) / (1 - sum a_i b_i).

    The mixing matrix counts each undirected edge once in each direction.
    Returns None (with a warning) when every endpoint falls in a single
    category, which makes the denominator vanish.
    """
    pairs = []
    for (u, v) in sorted(pg.edges):
        cu, cv = labels[u], labels[v]
        if exclude_unknown and (cu == UNKNOWN or cv == UNKNOWN):
            continue
        pairs.append((cu, cv))
    if not pairs:
        return None
    cats = sorted({c for p in pairs for c in p})
    index = {c: i for i, c in enumerate(cats)}
    m = np.zeros((len(cats), len(cats)))
    for cu, cv in pairs:
        m[index[cu], index[cv]] += 1.0
        m[index[cv], index[cu]] += 1.0
    m /= m.sum()
    a = m.sum(axis=1)
    b = m.sum(axis=0)
    ab = float(np.dot(a, b))
    if abs(1.0 - ab) < 1e-15:
        warnings.warn(f"assortativity undefined for {attribute!r}: single category")
        return None
    r = (float(np.trace(m)) - ab) / (1.0 - ab)
    return AssortativityResult(attribute=attribute, r=r, categories=cats,
                               mixing=m.tolist())


# --- top-active subnetwork ----------------------------------------------------------


def top_active_subnetwork(pg: ProjectedGraph, k: int,
                          scores: dict[str, float] | None = None) -> ProjectedGraph:
    """Induced subgraph of the k top-PageRank authors; node attrs carry the
    score and first-publication year, edges keep co-authorship weights."""
    if k > pg.node_count():
        raise ValueError("k exceeds node count")
    if scores is None:
        scores = pagerank(pg)
    top = sorted(pg.nodes, key=lambda u: (-scores[u], u))[:k]
    top_set = set(top)
    nodes = {
        u: {"pagerank": scores[u], "entry_year": pg.nodes[u].get("year")}
        for u in top
    }
    edges = {
        (u, v): {"weight": attrs.get("weight", 1.0), "year": attrs.get("year")}
        for (u, v), attrs in pg.edges.items()
        if u in top_set and v in top_set
    }
    return ProjectedGraph(directed=False, nodes=nodes, edges=edges)
