"""Citation-network analytics: growth and densification, preferential
attachment, CD disruptiveness, lexical novelty, and the three-step main-path
backbone (mutual-reinforcement ranking, one-hop trimming, similarity
weighting).
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .graph import (
    FLAG_CYCLE,
    FLAG_TEMPORAL_ANOMALY,
    NODE_PAPER,
    PROJECTION_CITATION,
    KnowledgeGraph,
    ProjectedGraph,
)
from .powerlaw import PowerLawFit, fit_power_law_ls
from .stats import YearSeries
from .textutil import tokenize


# --- growth ----------------------------------------------------------------------


def growth_series(cit: ProjectedGraph) -> tuple[list[int], list[int], list[int]]:
    """Cumulative (years, node counts, edge counts) of yearly snapshots."""
    if not cit.nodes:
        return [], [], []
    node_years = sorted(attrs["year"] for attrs in cit.nodes.values())
    lo, hi = node_years[0], node_years[-1]
    years = list(range(lo, hi + 1))
    # an edge exists once the edge year and both endpoints have appeared
    edge_years = sorted(
        max(attrs["year"], cit.nodes[u]["year"], cit.nodes[v]["year"])
        for (u, v), attrs in cit.edges.items()
    )
    n_t, e_t = [], []
    ni = ei = 0
    for y in years:
        while ni < len(node_years) and node_years[ni] <= y:
            ni += 1
        while ei < len(edge_years) and edge_years[ei] <= y:
            ei += 1
        n_t.append(ni)
        e_t.append(ei)
    return years, n_t, e_t


def densification_fit(cit: ProjectedGraph) -> PowerLawFit:
    """Densification law e(t) ~ n(t)^alpha over yearly snapshots."""
    _years, n_t, e_t = growth_series(cit)
    pairs = [(n, e) for n, e in zip(n_t, e_t) if n > 0 and e > 0]
    return fit_power_law_ls([p[0] for p in pairs], [p[1] for p in pairs])


def in_degree_samples(cit: ProjectedGraph) -> list[int]:
    """In-network citation counts (in-degrees), sorted ascending."""
    return sorted(cit.in_degree(u) for u in cit.nodes)


# --- preferential attachment -------------------------------------------------------


def preferential_attachment_curve(
    snapshots: list[ProjectedGraph],
) -> tuple[list[tuple[float, float]], PowerLawFit | None]:
    """Mean citation gain per prior-citation bucket, plus a power-law fit.

    For each consecutive snapshot pair, papers are bucketed by their
    in-network citation count k >= 1 (log2 bins against the heavy tail) and
    the average gain over the next snapshot is recorded. The fit runs over
    bucket means with positive gain and needs at least 3 such buckets.
    """
    if len(snapshots) < 2:
        raise ValueError("need at least 2 snapshots")
    gains: dict[int, list[tuple[int, int]]] = defaultdict(list)
    for g0, g1 in zip(snapshots, snapshots[1:]):
        for u in g0.nodes:
            if u not in g1.nodes:
                continue
            k = g0.in_degree(u)
            if k < 1:
                continue
            delta = g1.in_degree(u) - k
            gains[int(math.floor(math.log2(k)))].append((k, delta))
    curve = []
    for b in sorted(gains):
        pairs = gains[b]
        mean_k = sum(k for k, _ in pairs) / len(pairs)
        mean_d = sum(d for _, d in pairs) / len(pairs)
        curve.append((mean_k, mean_d))
    positive = [(k, d) for k, d in curve if d > 0]
    fit = None
    if len(positive) >= 3:
        fit = fit_power_law_ls([k for k, _ in positive], [d for _, d in positive])
    return curve, fit


# --- CD disruptiveness ----------------------------------------------------------


@dataclass
class CdResult:
    paper: str
    cd: float
    n_t: int
    f_count: int
    b_count: int


def _valid_edge(attrs: dict) -> bool:
    return FLAG_TEMPORAL_ANOMALY not in attrs.get("flags", frozenset())


def cd_index(cit: ProjectedGraph, focal: str, window: int | None = None,
             exclude_self_citations: bool = True) -> CdResult | None:
    """CD disruptiveness index of a focal paper.

    With R the focal's in-corpus references and S the later papers citing
    the focal or any member of R (restricted to ``window`` years after the
    focal when given):

        CD = (1/|S|) * sum_i (f_i - 2 f_i b_i)

    where f_i / b_i flag whether citer i cites the focal / any reference.
    Papers sharing an author with the focal are dropped from S by default.
    Returns None when S is empty (the index is undefined, never 0).
    """
    if focal not in cit.nodes:
        raise KeyError(f"unknown paper {focal!r}")
    t0 = cit.nodes[focal]["year"]
    focal_authors = set(cit.nodes[focal].get("authors", ()))
    refs = {v for v in cit.successors(focal) if _valid_edge(cit.edge_attrs(focal, v))}

    candidates = {u for u in cit.predecessors(focal) if _valid_edge(cit.edge_attrs(u, focal))}
    for r in refs:
        candidates.update(u for u in cit.predecessors(r) if _valid_edge(cit.edge_attrs(u, r)))
    candidates.discard(focal)

    total = f_count = b_count = 0
    acc = 0
    for i in sorted(candidates):
        yi = cit.nodes[i]["year"]
        if yi <= t0:
            continue
        if window is not None and yi > t0 + window:
            continue
        if exclude_self_citations and focal_authors and \
                focal_authors & set(cit.nodes[i].get("authors", ())):
            continue
        f = 1 if (cit.has_edge(i, focal) and _valid_edge(cit.edge_attrs(i, focal))) else 0
        b = 1 if any(cit.has_edge(i, r) and _valid_edge(cit.edge_attrs(i, r))
                     for r in refs) else 0
        total += 1
        f_count += f
        b_count += b
        acc += f - 2 * f * b
    if total == 0:
        return None
    return CdResult(paper=focal, cd=acc / total, n_t=total,
                    f_count=f_count, b_count=b_count)


def cd_index_all(cit: ProjectedGraph, window: int | None = None,
                 exclude_self_citations: bool = True) -> list[CdResult]:
    out = []
    for pid in sorted(cit.nodes):
        res = cd_index(cit, pid, window, exclude_self_citations)
        if res is not None:
            out.append(res)
    return out


def cd_index_yearly(cit: ProjectedGraph, window: int | None = None,
                    exclude_self_citations: bool = True) -> YearSeries:
    """Mean CD by publication year; years without a defined CD are omitted."""
    by_year: dict[int, list[float]] = defaultdict(list)
    for res in cd_index_all(cit, window, exclude_self_citations):
        by_year[cit.nodes[res.paper]["year"]].append(res.cd)
    years = sorted(by_year)
    return YearSeries(years, [sum(by_year[y]) / len(by_year[y]) for y in years])


# --- lexical novelty -------------------------------------------------------------


def type_token_ratio(texts_by_year: dict[int, list[str]]) -> YearSeries:
    """Distinct/total token ratio per year over concatenated texts; years
    with no tokens are omitted. Tokens keep stopwords so the ratio counts
    every word of the title+abstract stream."""
    years, values = [], []
    for y in sorted(texts_by_year):
        tokens = []
        for text in texts_by_year[y]:
            tokens.extend(tokenize(text, drop_stopwords=False))
        if not tokens:
            continue
        years.append(y)
        values.append(len(set(tokens)) / len(tokens))
    return YearSeries(years, values)


# --- main path step 1: mutual-reinforcement ranking --------------------------------


def rank_essential(kg: KnowledgeGraph, decay: float = 0.2, damping: float = 0.85,
                   tol: float = 1e-10, max_iter: int = 500) -> dict[str, float]:
    """Paper importance via mutual reinforcement between papers, authors and
    venues.

    Each iteration:
      paper  p(u) = damping * (citations(u) + mean-author(u) + venue(u)) / 3
                    + (1 - damping)/|P|
      citations(u) = sum over citers c of p(c)/outdeg(c) * exp(-decay*(t_now - t_c))
      author a = mean of its papers' scores; venue v = mean of its papers'.

    All three vectors are renormalized to sum 1 every iteration; iteration
    stops when the maximum absolute change falls below ``tol``.
    """
    papers, _authors, _venues = rank_essential_full(kg, decay, damping, tol, max_iter)
    return papers


def rank_essential_full(kg: KnowledgeGraph, decay: float = 0.2, damping: float = 0.85,
                        tol: float = 1e-10, max_iter: int = 500
                        ) -> tuple[dict[str, float], dict[str, float], dict[str, float]]:
    """As :func:`rank_essential` but returning all three fixed-point vectors
    (papers, authors, venues), each normalized to sum 1."""
    papers = [ref.key for ref in kg.nodes_of_type(NODE_PAPER)]
    if not papers:
        return {}, {}, {}
    p_idx = {pid: i for i, pid in enumerate(papers)}
    years = np.array([kg.paper(pid)["year"] for pid in papers], dtype=float)
    t_now = years.max()

    authors = sorted({a for pid in papers for a in kg.paper(pid)["authors"]})
    a_idx = {a: i for i, a in enumerate(authors)}
    venues = sorted({kg.paper(pid)["venue"] for pid in papers if kg.paper(pid)["venue"]})
    v_idx = {v: i for i, v in enumerate(venues)}

    pa_papers, pa_authors = [], []
    for pid in papers:
        for a in kg.paper(pid)["authors"]:
            pa_papers.append(p_idx[pid])
            pa_authors.append(a_idx[a])
    pa_papers = np.array(pa_papers, dtype=int)
    pa_authors = np.array(pa_authors, dtype=int)
    paper_author_n = np.bincount(pa_papers, minlength=len(papers)).astype(float)
    author_paper_n = np.bincount(pa_authors, minlength=len(authors)).astype(float)

    pv_papers, pv_venues = [], []
    for pid in papers:
        v = kg.paper(pid)["venue"]
        if v:
            pv_papers.append(p_idx[pid])
            pv_venues.append(v_idx[v])
    pv_papers = np.array(pv_papers, dtype=int)
    pv_venues = np.array(pv_venues, dtype=int)
    venue_paper_n = np.bincount(pv_venues, minlength=len(venues)).astype(float)

    cit = kg.project(PROJECTION_CITATION)
    src_idx, dst_idx = [], []
    for (u, v), _attrs in sorted(cit.edges.items()):
        src_idx.append(p_idx[u])
        dst_idx.append(p_idx[v])
    src_idx = np.array(src_idx, dtype=int)
    dst_idx = np.array(dst_idx, dtype=int)
    out_deg = np.bincount(src_idx, minlength=len(papers)).astype(float)
    edge_factor = np.exp(-decay * (t_now - years[src_idx])) / np.maximum(out_deg[src_idx], 1.0)

    n_p, n_a, n_v = len(papers), len(authors), len(venues)
    p = np.full(n_p, 1.0 / n_p)
    a = np.full(n_a, 1.0 / n_a) if n_a else np.zeros(0)
    v = np.full(n_v, 1.0 / n_v) if n_v else np.zeros(0)

    for _ in range(max_iter):
        cit_term = np.zeros(n_p)
        if len(src_idx):
            np.add.at(cit_term, dst_idx, p[src_idx] * edge_factor)
        author_term = np.zeros(n_p)
        if n_a:
            np.add.at(author_term, pa_papers, a[pa_authors])
            author_term /= np.maximum(paper_author_n, 1.0)
        venue_term = np.zeros(n_p)
        if n_v:
            np.add.at(venue_term, pv_papers, v[pv_venues])
        p_new = damping * (cit_term + author_term + venue_term) / 3.0 \
            + (1.0 - damping) / n_p
        p_new /= p_new.sum()

        if n_a:
            a_new = np.zeros(n_a)
            np.add.at(a_new, pa_authors, p_new[pa_papers])
            a_new /= author_paper_n
            a_new /= a_new.sum()
        else:
            a_new = a
        if n_v:
            v_new = np.zeros(n_v)
            np.add.at(v_new, pv_venues, p_new[pv_papers])
            v_new /= venue_paper_n
            v_new /= v_new.sum()
        else:
            v_new = v

        residual = float(np.max(np.abs(p_new - p)))
        if n_a:
            residual = max(residual, float(np.max(np.abs(a_new - a))))
        if n_v:
            residual = max(residual, float(np.max(np.abs(v_new - v))))
        p, a, v = p_new, a_new, v_new
        if residual < tol:
            return (
                {pid: float(p[i]) for pid, i in p_idx.items()},
                {aid: float(a[i]) for aid, i in a_idx.items()},
                {vid: float(v[i]) for vid, i in v_idx.items()},
            )
    raise ConvergenceError(f"ranking failed to converge in {max_iter} iterations", residual)


# --- main path step 2: one-hop trimming --------------------------------------------


def trim_network(nodes, edges) -> set[tuple[str, str]]:
    """Drop every edge u->w implied by a one-hop detour u->v->w.

    The redundancy condition is evaluated on the input edge set (nodes are
    processed in topological order, which also rejects cyclic input), so
    reachability between surviving nodes is preserved exactly.
    """
    nodes = list(nodes)
    edge_set = set(edges)
    succ: dict[str, set[str]] = {u: set() for u in nodes}
    indeg: dict[str, int] = {u: 0 for u in nodes}
    for u, w in edge_set:
        if u not in succ or w not in succ:
            raise ValueError(f"edge ({u}, {w}) references unknown node")
        succ[u].add(w)
        indeg[w] += 1
    queue = sorted(u for u in nodes if indeg[u] == 0)
    topo = []
    while queue:
        u = queue.pop(0)
        topo.append(u)
        added = []
        for w in succ[u]:
            indeg[w] -= 1
            if indeg[w] == 0:
                added.append(w)
        queue.extend(sorted(added))
    if len(topo) != len(nodes):
        raise ValueError("cycle detected in citation subgraph; pre-filter anomalies")
    kept = set()
    for u in topo:
        for w in succ[u]:
            if not any(w in succ[v] for v in succ[u] if v != w):
                kept.add((u, w))
    return kept


def transitive_reduction(nodes, edges) -> set[tuple[str, str]]:
    """Full reduction: drop u->w when any longer path u->...->w exists."""
    kept = set(trim_network(nodes, edges))  # validates DAG, removes 2-hop
    succ: dict[str, set[str]] = {u: set() for u in nodes}
    for u, w in edges:
        succ[u].add(w)

    reach_cache: dict[str, set[str]] = {}

    def reach(u: str) -> set[str]:
        if u not in reach_cache:
            acc = set()
            for v in succ[u]:
                acc.add(v)
                acc |= reach(v)
            reach_cache[u] = acc
        return reach_cache[u]

    out = set()
    for u, w in kept:
        if not any(w in reach(v) for v in succ[u] if v != w):
            out.add((u, w))
    return out


# --- main path step 3: similarity weighting ----------------------------------------


@dataclass
class BackboneGraph:
    nodes: dict[str, dict]                     # paper -> {score, year, citations}
    edges: dict[tuple[str, str], dict]         # (u, v) -> {weight, cocite, jaccard}


def weight_edges(trimmed_edges, full: ProjectedGraph,
                 node_attrs: dict[str, dict] | None = None,
                 normalization: str = "minmax") -> BackboneGraph:
    """Weight surviving edges by co-citation and bibliographic coupling.

    cocite(u, v) counts papers citing both endpoints in the full citation
    graph; jaccard(u, v) compares in-corpus reference sets with the pair
    itself excluded (u citing v is the link being weighted, not shared
    background). The edge weight is the mean of the normalized co-citation
    count and raw Jaccard. Default normalization is min-max over the
    surviving edge set (all-equal counts map to 0), which keeps weights in
    [0, 1]; "zscore" standardizes instead and can leave that range.
    """
    if normalization not in ("minmax", "zscore"):
        raise ValueError(f"unknown normalization {normalization!r}")
    edges = sorted(set(trimmed_edges))
    cocites = {}
    jaccards = {}
    for u, v in edges:
        citers_u = full.predecessors(u)
        citers_v = full.predecessors(v)
        cocites[(u, v)] = len(citers_u & citers_v)
        refs_u = full.successors(u) - {v}
        refs_v = full.successors(v) - {u}
        union = refs_u | refs_v
        jaccards[(u, v)] = len(refs_u & refs_v) / len(union) if union else 0.0
    counts = np.array([cocites[pair] for pair in edges], dtype=float)
    if len(counts) == 0:
        normalized = counts
    elif normalization == "minmax":
        span = counts.max() - counts.min()
        normalized = (counts - counts.min()) / span if span else np.zeros_like(counts)
    else:
        std = counts.std()
        normalized = (counts - counts.mean()) / std if std else np.zeros_like(counts)
    out_edges = {}
    for pair, c_norm in zip(edges, normalized):
        out_edges[pair] = {
            "weight": (float(c_norm) + jaccards[pair]) / 2.0,
            "cocite": cocites[pair],
            "jaccard": jaccards[pair],
        }
    node_ids = sorted({n for pair in edges for n in pair})
    nodes = {n: dict(node_attrs.get(n, {})) if node_attrs else {} for n in node_ids}
    return BackboneGraph(nodes=nodes, edges=out_edges)


def main_path_backbone(kg: KnowledgeGraph, k: int, decay: float = 0.2,
                       damping: float = 0.85, tol: float = 1e-10,
                       max_iter: int = 500, full_reduction: bool = False
                       ) -> BackboneGraph:
    """Rank papers, keep the top k, trim one-hop redundancy in their induced
    citation subgraph and weight the surviving links."""
    if k < 2:
        raise ValueError("k must be at least 2")
    scores = rank_essential(kg, decay=decay, damping=damping, tol=tol, max_iter=max_iter)
    top = sorted(scores, key=lambda pid: (-scores[pid], pid))[:k]
    top_set = set(top)
    cit = kg.project(PROJECTION_CITATION)
    induced = {
        (u, v) for (u, v), attrs in cit.edges.items()
        if u in top_set and v in top_set
        and not attrs.get("flags", frozenset()) & {FLAG_TEMPORAL_ANOMALY, FLAG_CYCLE}
    }
    reducer = transitive_reduction if full_reduction else trim_network
    trimmed = reducer(top, induced)
    node_attrs = {
        pid: {"score": scores[pid], "year": cit.nodes[pid]["year"],
              "citations": cit.in_degree(pid)}
        for pid in top
    }
    backbone = weight_edges(trimmed, cit, node_attrs)
    # isolated top-ranked papers stay in the backbone node set
    for pid in top:
        backbone.nodes[pid] = node_attrs[pid]
    return backbone
