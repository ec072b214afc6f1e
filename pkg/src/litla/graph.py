"""Heterogeneous bibliographic knowledge graph and its homogeneous projections.

Nodes are papers, authors, venues, keywords and institutions; typed edges
carry a first-appearance year plus the full list of occurrence years so that
time-sliced snapshots can recount weights (e.g. joint-paper counts) exactly.
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass, replace
from itertools import combinations

from .countries import UNKNOWN, infer_country
from .records import PaperRecord
from .textutil import contains_phrase, tokenize

NODE_PAPER = "paper"
NODE_AUTHOR = "author"
NODE_VENUE = "venue"
NODE_KEYWORD = "keyword"
NODE_INSTITUTION = "institution"
NODE_TYPES = (NODE_PAPER, NODE_AUTHOR, NODE_VENUE, NODE_KEYWORD, NODE_INSTITUTION)

EDGE_CITES = "cites"
EDGE_AUTHOR_OF = "author_of"
EDGE_AFFILIATED_WITH = "affiliated_with"
EDGE_PUBLISHED_AT = "published_at"
EDGE_MENTIONS_KEYWORD = "mentions_keyword"
EDGE_COAUTHORS_WITH = "coauthors_with"

# edge type -> (src node type, dst node type)
_EDGE_ENDPOINTS = {
    EDGE_CITES: (NODE_PAPER, NODE_PAPER),
    EDGE_AUTHOR_OF: (NODE_AUTHOR, NODE_PAPER),
    EDGE_AFFILIATED_WITH: (NODE_AUTHOR, NODE_INSTITUTION),
    EDGE_PUBLISHED_AT: (NODE_PAPER, NODE_VENUE),
    EDGE_MENTIONS_KEYWORD: (NODE_PAPER, NODE_KEYWORD),
    EDGE_COAUTHORS_WITH: (NODE_AUTHOR, NODE_AUTHOR),
}

FLAG_TEMPORAL_ANOMALY = "temporal_anomaly"
FLAG_CYCLE = "cycle"

PROJECTION_CITATION = "citation"
PROJECTION_COAUTHORSHIP = "coauthorship"
PROJECTION_KEYWORD = "keyword_cooccurrence"


def canonical(text: str) -> str:
    """Case-fold, trim and collapse whitespace."""
    return " ".join(text.casefold().split())


def institution_key(affiliation: str) -> str:
    """Canonical institution key: first comma-separated segment of the address."""
    return canonical(affiliation.split(",", 1)[0])


@dataclass(frozen=True, order=True)
class NodeRef:
    node_type: str
    key: str

    def __post_init__(self):
        if self.node_type not in NODE_TYPES:
            raise ValueError(f"unknown node type {self.node_type!r}")
        if not self.key:
            raise ValueError("node key must be non-empty")


@dataclass(frozen=True)
class Edge:
    src: NodeRef
    dst: NodeRef
    edge_type: str
    weight: float = 1.0
    year: int = 0
    years: tuple[int, ...] = ()
    flags: frozenset[str] = frozenset()

    def __post_init__(self):
        expect = _EDGE_ENDPOINTS.get(self.edge_type)
        if expect is None:
            raise ValueError(f"unknown edge type {self.edge_type!r}")
        if (self.src.node_type, self.dst.node_type) != expect:
            raise ValueError(
                f"{self.edge_type} edge requires endpoints {expect}, got "
                f"({self.src.node_type}, {self.dst.node_type})")
        if self.weight < 0:
            raise ValueError("edge weight must be non-negative")

    def sort_key(self):
        return (self.edge_type, self.src, self.dst, self.year)


class KnowledgeGraph:
    """Immutable-after-build typed multigraph with O(1) per-type node counts."""

    def __init__(self, nodes: dict[NodeRef, dict], edges: list[Edge],
                 corpus_year_range: tuple[int, int]):
        for e in edges:
            if e.src not in nodes or e.dst not in nodes:
                raise ValueError(f"dangling edge endpoint: {e.src} -> {e.dst}")
        self.nodes = nodes
        self.edges = sorted(edges, key=Edge.sort_key)
        self.corpus_year_range = corpus_year_range
        self._type_counts = Counter(ref.node_type for ref in nodes)

    def __eq__(self, other):
        if not isinstance(other, KnowledgeGraph):
            return NotImplemented
        return (self.nodes == other.nodes and self.edges == other.edges
                and self.corpus_year_range == other.corpus_year_range)

    def node_count(self, node_type: str) -> int:
        return self._type_counts.get(node_type, 0)

    def nodes_of_type(self, node_type: str) -> list[NodeRef]:
        return sorted(ref for ref in self.nodes if ref.node_type == node_type)

    def edges_of_type(self, edge_type: str) -> list[Edge]:
        return [e for e in self.edges if e.edge_type == edge_type]

    def attrs(self, ref: NodeRef) -> dict:
        return self.nodes[ref]

    def paper(self, paper_id: str) -> dict:
        return self.nodes[NodeRef(NODE_PAPER, paper_id)]

    # -- time slicing ---------------------------------------------------------

    def snapshot(self, year: int) -> "KnowledgeGraph":
        """Induced subgraph of everything first appearing in or before ``year``.

        Weights backed by occurrence-year lists (co-authorship frequency,
        keyword co-mentions) are recounted over the retained years, so
        ``snapshot(max_year)`` reproduces the graph exactly.
        """
        lo, hi = self.corpus_year_range
        if year < lo:
            warnings.warn(f"snapshot year {year} precedes corpus start {lo}; empty graph")
            return KnowledgeGraph({}, [], (lo, lo))
        nodes: dict[NodeRef, dict] = {}
        for ref, attrs in self.nodes.items():
            if attrs.get("year", lo) > year:
                continue
            if "incidences" in attrs:
                attrs = dict(attrs)
                attrs["incidences"] = tuple(
                    inc for inc in attrs["incidences"] if inc[0] <= year)
            nodes[ref] = attrs
        edges: list[Edge] = []
        for e in self.edges:
            if e.year > year or e.src not in nodes or e.dst not in nodes:
                continue
            if e.years:
                kept = tuple(t for t in e.years if t <= year)
                edges.append(replace(e, years=kept, weight=float(len(kept))))
            else:
                edges.append(e)
        return KnowledgeGraph(nodes, edges, (lo, min(year, hi)))

    # -- homogeneous views ----------------------------------------------------

    def project(self, kind: str) -> "ProjectedGraph":
        if kind == PROJECTION_CITATION:
            nodes = {
                ref.key: {"year": attrs["year"], "authors": attrs["authors"]}
                for ref, attrs in self.nodes.items() if ref.node_type == NODE_PAPER
            }
            edges = {
                (e.src.key, e.dst.key): {"year": e.year, "weight": 1.0, "flags": e.flags}
                for e in self.edges if e.edge_type == EDGE_CITES
            }
            return ProjectedGraph(directed=True, nodes=nodes, edges=edges)
        if kind == PROJECTION_COAUTHORSHIP:
            nodes = {
                ref.key: {"year": attrs["year"]}
                for ref, attrs in self.nodes.items() if ref.node_type == NODE_AUTHOR
            }
            edges = {
                (e.src.key, e.dst.key): {"year": e.year, "weight": e.weight, "years": e.years}
                for e in self.edges if e.edge_type == EDGE_COAUTHORS_WITH
            }
            return ProjectedGraph(directed=False, nodes=nodes, edges=edges)
        if kind == PROJECTION_KEYWORD:
            return self._project_keywords()
        raise ValueError(f"unknown projection {kind!r}")

    def _project_keywords(self) -> "ProjectedGraph":
        first_seen: dict[str, int] = {}
        pair_years: dict[tuple[str, str], list[int]] = {}
        for ref in self.nodes_of_type(NODE_PAPER):
            attrs = self.nodes[ref]
            kws = sorted(set(attrs["text_keywords"]))
            year = attrs["year"]
            for kw in kws:
                if kw not in first_seen or year < first_seen[kw]:
                    first_seen[kw] = year
            for u, v in combinations(kws, 2):
                pair_years.setdefault((u, v), []).append(year)
        nodes = {kw: {"year": y} for kw, y in first_seen.items()}
        edges = {
            pair: {"year": min(years), "weight": float(len(years)),
                   "years": tuple(sorted(years))}
            for pair, years in pair_years.items()
        }
        return ProjectedGraph(directed=False, nodes=nodes, edges=edges)


class ProjectedGraph:
    """Homogeneous graph view. Undirected edges are keyed by canonical
    (u < v) pairs; adjacency is precomputed for read-heavy analysis."""

    def __init__(self, directed: bool, nodes: dict[str, dict],
                 edges: dict[tuple[str, str], dict]):
        self.directed = directed
        self.nodes = nodes
        self.edges = {}
        self._adj: dict[str, set[str]] = {u: set() for u in nodes}
        self._radj: dict[str, set[str]] = {u: set() for u in nodes} if directed else self._adj
        for (u, v), attrs in edges.items():
            if u not in nodes or v not in nodes:
                raise ValueError(f"dangling edge endpoint: {u} -> {v}")
            if u == v:
                raise ValueError(f"self-loop on {u}")
            if not directed and u > v:
                u, v = v, u
            self.edges[(u, v)] = attrs
            self._adj[u].add(v)
            if directed:
                self._radj[v].add(u)
            else:
                self._adj[v].add(u)

    def node_count(self) -> int:
        return len(self.nodes)

    def edge_count(self) -> int:
        return len(self.edges)

    def sorted_nodes(self) -> list[str]:
        return sorted(self.nodes)

    def has_edge(self, u: str, v: str) -> bool:
        if not self.directed and u > v:
            u, v = v, u
        return (u, v) in self.edges

    def edge_attrs(self, u: str, v: str) -> dict:
        if not self.directed and u > v:
            u, v = v, u
        return self.edges[(u, v)]

    def neighbors(self, u: str) -> set[str]:
        return self._adj[u]

    def successors(self, u: str) -> set[str]:
        return self._adj[u]

    def predecessors(self, u: str) -> set[str]:
        return self._radj[u]

    def degree(self, u: str) -> int:
        return len(self._adj[u])

    def weighted_degree(self, u: str) -> float:
        if self.directed:
            raise ValueError("weighted_degree is defined for undirected graphs")
        return sum(self.edges[(min(u, v), max(u, v))].get("weight", 1.0)
                   for v in sorted(self._adj[u]))

    def in_degree(self, u: str) -> int:
        return len(self._radj[u])

    def out_degree(self, u: str) -> int:
        return len(self._adj[u])

    def snapshot(self, year: int) -> "ProjectedGraph":
        nodes = {u: a for u, a in self.nodes.items() if a.get("year", year) <= year}
        edges = {}
        for (u, v), attrs in self.edges.items():
            if attrs.get("year", year) > year or u not in nodes or v not in nodes:
                continue
            years = attrs.get("years")
            if years:
                kept = tuple(t for t in years if t <= year)
                attrs = dict(attrs, years=kept, weight=float(len(kept)))
            edges[(u, v)] = attrs
        return ProjectedGraph(self.directed, nodes, edges)


# --- construction -------------------------------------------------------------


def _tarjan_scc(adj: dict[str, list[str]]) -> list[list[str]]:
    """Iterative Tarjan strongly-connected components."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    sccs: list[list[str]] = []
    counter = 0
    for root in adj:
        if root in index:
            continue
        work = [(root, iter(adj[root]))]
        index[root] = low[root] = counter
        counter += 1
        stack.append(root)
        on_stack.add(root)
        while work:
            node, it = work[-1]
            advanced = False
            for nxt in it:
                if nxt not in index:
                    index[nxt] = low[nxt] = counter
                    counter += 1
                    stack.append(nxt)
                    on_stack.add(nxt)
                    work.append((nxt, iter(adj[nxt])))
                    advanced = True
                    break
                if nxt in on_stack:
                    low[node] = min(low[node], index[nxt])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[node])
            if low[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == node:
                        break
                sccs.append(comp)
    return sccs


def match_text_keywords(record: PaperRecord) -> list[str]:
    """Canonical keywords of a record that occur in its title or abstract.

    The candidate set is the union of extracted and author keywords; a
    keyword matches when its token sequence appears contiguously in the
    lowercased title+abstract token stream.
    """
    text_tokens = tokenize(record.title + " " + record.abstract, drop_stopwords=False)
    matched = []
    for kw in sorted({canonical(k) for k in record.extracted_keywords + record.author_keywords if k.strip()}):
        if contains_phrase(text_tokens, tokenize(kw, drop_stopwords=False)):
            matched.append(kw)
    return matched


def build_graph(records: list[PaperRecord]) -> KnowledgeGraph:
    """Assemble the knowledge graph from deduplicated records.

    Citation edges are restricted to within-corpus targets; external
    reference counts stay on the paper node. Backward-in-time citations are
    flagged as temporal anomalies and citation cycles among the remaining
    edges are flagged so DAG-based analyses can drop them.
    """
    if not records:
        return KnowledgeGraph({}, [], (0, 0))
    ids = [r.id for r in records]
    if len(set(ids)) != len(ids):
        dupes = sorted(k for k, c in Counter(ids).items() if c > 1)
        raise ValueError(f"duplicate record ids: {dupes}")
    corpus_ids = set(ids)
    year_lo = min(r.year for r in records)
    year_hi = max(r.year for r in records)

    nodes: dict[NodeRef, dict] = {}
    edges: list[Edge] = []
    author_meta: dict[str, dict] = {}
    venue_meta: dict[str, dict] = {}
    keyword_first: dict[str, int] = {}
    inst_meta: dict[str, dict] = {}
    coauthor_years: dict[tuple[str, str], list[int]] = {}
    affil_years: dict[tuple[str, str], list[int]] = {}

    for rec in sorted(records, key=lambda r: r.id):
        paper_ref = NodeRef(NODE_PAPER, rec.id)
        author_keys = []
        countries = []
        for a in rec.authors:
            akey = canonical(a.name)
            if not akey:
                continue
            country = infer_country(a.affiliation) if a.affiliation else UNKNOWN
            meta = author_meta.setdefault(akey, {"name": a.name, "incidences": []})
            meta["incidences"].append((rec.year, rec.id, country))
            author_keys.append(akey)
            countries.append(country)
            ikey = institution_key(a.affiliation)
            if ikey:
                inst_meta.setdefault(ikey, {"name": a.affiliation.split(",", 1)[0].strip(),
                                            "year": rec.year})
                inst_meta[ikey]["year"] = min(inst_meta[ikey]["year"], rec.year)
                affil_years.setdefault((akey, ikey), []).append(rec.year)
        author_keys = list(dict.fromkeys(author_keys))  # dedupe, keep order

        vkey = canonical(rec.venue)
        if vkey:
            meta = venue_meta.setdefault(vkey, {"name": rec.venue, "paper_years": []})
            meta["paper_years"].append(rec.year)

        all_keywords = sorted({canonical(k) for k in rec.extracted_keywords + rec.author_keywords
                               if k.strip()})
        for kw in all_keywords:
            keyword_first[kw] = min(keyword_first.get(kw, rec.year), rec.year)
        text_kws = match_text_keywords(rec)

        in_refs = sorted(r for r in set(rec.references) if r in corpus_ids and r != rec.id)
        known_countries = sorted({c for c in countries if c != UNKNOWN})
        intents = tuple(s.intent for s in rec.citation_statements if s.intent)
        nodes[paper_ref] = {
            "year": rec.year,
            "title": rec.title,
            "venue": vkey,
            "pub_type": rec.pub_type,
            "authors": tuple(author_keys),
            "countries": tuple(known_countries) if known_countries else (UNKNOWN,) if rec.authors else (),
            "subject_categories": tuple(dict.fromkeys(rec.subject_categories)),
            "intents": intents,
            "keywords": tuple(all_keywords),
            "text_keywords": tuple(text_kws),
            "references": tuple(rec.references),
            "external_refs": len(set(rec.references)) - len(in_refs),
            "reported_citations": rec.citation_count,
            "language": rec.language,
            "doc_type": rec.doc_type,
            "page_count": rec.page_count,
            "publisher": rec.publisher,
            "embedding": tuple(rec.embedding) if rec.embedding is not None else None,
        }

        for u, v in combinations(sorted(author_keys), 2):
            coauthor_years.setdefault((u, v), []).append(rec.year)

    # entity nodes and per-paper edges
    for akey, meta in sorted(author_meta.items()):
        incidences = tuple(sorted(meta["incidences"]))
        nodes[NodeRef(NODE_AUTHOR, akey)] = {
            "name": meta["name"],
            "year": incidences[0][0],
            "incidences": incidences,
        }
    for vkey, meta in sorted(venue_meta.items()):
        years = tuple(sorted(meta["paper_years"]))
        nodes[NodeRef(NODE_VENUE, vkey)] = {
            "name": meta["name"], "year": years[0], "incidences": tuple((y,) for y in years),
        }
    for kw, first in sorted(keyword_first.items()):
        nodes[NodeRef(NODE_KEYWORD, kw)] = {"year": first}
    for ikey, meta in sorted(inst_meta.items()):
        nodes[NodeRef(NODE_INSTITUTION, ikey)] = {"name": meta["name"], "year": meta["year"]}

    by_id = {ref.key: ref for ref in nodes if ref.node_type == NODE_PAPER}
    cites_pairs: list[tuple[str, str]] = []
    for rec in sorted(records, key=lambda r: r.id):
        ref = by_id[rec.id]
        attrs = nodes[ref]
        year = attrs["year"]
        for akey in attrs["authors"]:
            edges.append(Edge(NodeRef(NODE_AUTHOR, akey), ref, EDGE_AUTHOR_OF, 1.0, year))
        if attrs["venue"]:
            edges.append(Edge(ref, NodeRef(NODE_VENUE, attrs["venue"]),
                              EDGE_PUBLISHED_AT, 1.0, year))
        for kw in attrs["keywords"]:
            edges.append(Edge(ref, NodeRef(NODE_KEYWORD, kw), EDGE_MENTIONS_KEYWORD, 1.0, year))
        for tgt in sorted(set(rec.references)):
            if tgt in corpus_ids and tgt != rec.id:
                cites_pairs.append((rec.id, tgt))

    # cycle detection runs on temporally valid edges only
    paper_years = {ref.key: nodes[ref]["year"] for ref in by_id.values()}
    valid_adj: dict[str, list[str]] = {pid: [] for pid in paper_years}
    for src, dst in cites_pairs:
        if paper_years[src] >= paper_years[dst]:
            valid_adj[src].append(dst)
    cycle_nodes: dict[str, int] = {}
    for i, comp in enumerate(_tarjan_scc(valid_adj)):
        if len(comp) > 1:
            for node in comp:
                cycle_nodes[node] = i
    for src, dst in cites_pairs:
        flags = set()
        if paper_years[src] < paper_years[dst]:
            flags.add(FLAG_TEMPORAL_ANOMALY)
        elif src in cycle_nodes and cycle_nodes.get(dst) == cycle_nodes[src]:
            flags.add(FLAG_CYCLE)
        edges.append(Edge(by_id[src], by_id[dst], EDGE_CITES, 1.0,
                          paper_years[src], flags=frozenset(flags)))

    for (u, v), years in sorted(coauthor_years.items()):
        edges.append(Edge(NodeRef(NODE_AUTHOR, u), NodeRef(NODE_AUTHOR, v),
                          EDGE_COAUTHORS_WITH, float(len(years)), min(years),
                          years=tuple(sorted(years))))
    for (akey, ikey), years in sorted(affil_years.items()):
        edges.append(Edge(NodeRef(NODE_AUTHOR, akey), NodeRef(NODE_INSTITUTION, ikey),
                          EDGE_AFFILIATED_WITH, float(len(years)), min(years),
                          years=tuple(sorted(years))))

    return KnowledgeGraph(nodes, edges, (year_lo, year_hi))
