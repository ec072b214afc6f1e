"""Command-line pipeline: ingest -> stats -> topics -> citenet -> collabnet
-> predict, driven by one config file.

Each subcommand re-derives the knowledge graph from the input records (cheap
at corpus scale and keeps stages independent), writes its reports into the
output directory and appends an entry to ``run_manifest.json``. Outputs are
byte-identical across re-runs for a fixed config and seed; durations in the
manifest are the one exception.
"""

from __future__ import annotations

import argparse
import sys
import time
import traceback

from . import citenet as cn
from . import collabnet as co
from . import predict as pr
from . import stats, topics
from .config import ConfigError, RunConfig, load_config
from .exports import (
    kg_to_dot,
    kg_to_graphml,
    projected_to_graphml,
    write_csv,
    write_graphml,
    write_json,
)
from .graph import (
    NODE_PAPER,
    PROJECTION_CITATION,
    PROJECTION_COAUTHORSHIP,
    PROJECTION_KEYWORD,
    KnowledgeGraph,
    build_graph,
)
from .powerlaw import fit_power_law_ls, fit_power_law_mle
from .records import ExclusionPolicy, apply_exclusions, load_records, rejection_counts

STAGES = ("ingest", "stats", "topics", "citenet", "collabnet", "predict")


def _policy(cfg: RunConfig) -> ExclusionPolicy:
    ex = cfg.exclusions
    return ExclusionPolicy(
        min_pages=ex.min_pages,
        allowed_languages=frozenset(ex.allowed_languages),
        excluded_doc_types=frozenset(ex.excluded_doc_types),
        drop_extended_versions=ex.drop_extended_versions,
        extended_version_ids=frozenset(ex.extended_version_ids),
    )


def _load_corpus(cfg: RunConfig):
    records, errors = load_records(cfg.records_path)
    kept, rejected = apply_exclusions(records, _policy(cfg))
    kg = build_graph(kept)
    return records, errors, kept, rejected, kg


def _paper_docs(kept) -> dict[str, str]:
    return {r.id: r.title + " " + r.abstract for r in kept}


def _cluster_assignment(kg: KnowledgeGraph, cfg: RunConfig) -> topics.TopicAssignment:
    ids, embs = [], []
    missing = []
    for ref in kg.nodes_of_type(NODE_PAPER):
        emb = kg.nodes[ref]["embedding"]
        if emb is None:
            missing.append(ref.key)
        else:
            ids.append(ref.key)
            embs.append(list(emb))
    assignment = topics.cluster_embeddings(embs, cfg.topics.eps, cfg.topics.min_pts, ids=ids)
    for pid in missing:
        assignment.labels[pid] = topics.NOISE
    return assignment


# --- stages ------------------------------------------------------------------------


def stage_ingest(cfg: RunConfig, outdir) -> list[str]:
    records, errors, kept, rejected, kg = _load_corpus(cfg)
    write_csv(outdir / "parse_errors.csv", ["line", "message"],
              [(e.line, e.message) for e in errors])
    write_csv(outdir / "rejections.csv", ["id", "reason"],
              sorted((rec.id, reason) for rec, reason in rejected))
    kg_to_graphml(outdir / "graph.graphml", kg)
    kg_to_dot(outdir / "graph.dot", kg)
    flagged = [e for e in kg.edges_of_type("cites") if e.flags]
    write_json(outdir / "ingest_summary.json", {
        "records_parsed": len(records),
        "parse_errors": len(errors),
        "records_kept": len(kept),
        "rejections_by_reason": rejection_counts(rejected),
        "corpus_year_range": list(kg.corpus_year_range),
        "node_counts": {t: kg.node_count(t) for t in
                        ("paper", "author", "venue", "keyword", "institution")},
        "edge_counts": _edge_counts(kg),
        "citation_flags": {
            "temporal_anomaly": sum(1 for e in flagged if "temporal_anomaly" in e.flags),
            "cycle": sum(1 for e in flagged if "cycle" in e.flags),
        },
    })
    return ["parse_errors.csv", "rejections.csv", "graph.graphml", "graph.dot",
            "ingest_summary.json"]


def _edge_counts(kg: KnowledgeGraph) -> dict[str, int]:
    counts: dict[str, int] = {}
    for e in kg.edges:
        counts[e.edge_type] = counts.get(e.edge_type, 0) + 1
    return dict(sorted(counts.items()))


def _series_payload(series: stats.YearSeries) -> dict:
    return {"years": series.years, "values": series.values}


def _fit_payload(fn, *args):
    try:
        fit = fn(*args)
    except (ValueError, RuntimeError) as exc:
        return {"error": str(exc)}
    if hasattr(fit, "as_dict"):
        return fit.as_dict()
    return {"a": fit.a, "b": fit.b, "c": fit.c, "r_squared": fit.r_squared}


def stage_stats(cfg: RunConfig, outdir) -> list[str]:
    _records, _errors, _kept, _rejected, kg = _load_corpus(cfg)
    pubs = stats.publications_per_year(kg)
    per_year, cum_authors = stats.authors_per_year(kg)
    outputs = []
    facet_files = {
        "venue": "venue.csv",
        "pub_type": "pub_type.csv",
        "subject_category": "subject_category.csv",
        "intent": "intent.csv",
        "country": "country.csv",
    }
    summary_dists = {}
    for facet, fname in facet_files.items():
        rows = stats.distribution(kg, facet)
        write_csv(outdir / fname, ["label", "count", "share"],
                  [(label, count, repr(share)) for label, count, share in rows])
        summary_dists[facet] = [
            {"label": label, "count": count, "share": share}
            for label, count, share in rows[:20]
        ]
        outputs.append(fname)
    author_rows = stats.author_country_tally(kg)
    write_csv(outdir / "author_countries.csv", ["label", "count", "share"],
              [(label, count, repr(share)) for label, count, share in author_rows])
    outputs.append("author_countries.csv")
    write_json(outdir / "stats_summary.json", {
        "publications_per_year": _series_payload(pubs),
        "publications_cumulative": _series_payload(pubs.cumulative()) if pubs.years else {},
        "authors_per_year": _series_payload(per_year),
        "authors_cumulative_distinct": _series_payload(cum_authors),
        "quadratic_fit_cumulative_publications":
            _fit_payload(stats.fit_quadratic, pubs.cumulative()) if pubs.years else None,
        "quadratic_fit_cumulative_authors":
            _fit_payload(stats.fit_quadratic, cum_authors) if cum_authors.years else None,
        "distributions_top20": summary_dists,
    })
    outputs.append("stats_summary.json")
    return outputs


def stage_topics(cfg: RunConfig, outdir) -> list[str]:
    _records, _errors, kept, _rejected, kg = _load_corpus(cfg)
    docs = _paper_docs(kept)
    years = {r.id: r.year for r in kept}
    assignment = _cluster_assignment(kg, cfg)
    outputs = []

    write_csv(outdir / "assignments.csv", ["paper_id", "topic"],
              sorted(assignment.labels.items()))
    outputs.append("assignments.csv")

    pools = topics.topic_token_pools(assignment, docs)
    summaries = topics.ctfidf(pools, top_n=cfg.topics.top_terms) if pools else []
    write_json(outdir / "topic_report.json", {
        "n_topics": assignment.n_topics(),
        "outliers": sum(1 for l in assignment.labels.values() if l == topics.NOISE),
        "topics": [
            {"id": s.topic, "size": assignment.topic_sizes.get(s.topic, 0),
             "top_terms": [[term, score] for term, score in s.top_terms]}
            for s in summaries
        ],
    })
    outputs.append("topic_report.json")

    embeddings = {pid: kg.paper(pid)["embedding"] for pid in assignment.labels
                  if kg.paper(pid)["embedding"] is not None}
    centroids = []
    names = []
    for topic in sorted(assignment.topic_sizes):
        member_embs = [embeddings[pid] for pid in assignment.members(topic)
                       if pid in embeddings]
        if member_embs:
            names.append(f"T{topic}")
            centroids.append([sum(col) / len(col) for col in zip(*member_embs)])
    if len(centroids) >= 2:
        merges = topics.hierarchical_topics(centroids)
        write_json(outdir / "dendrogram.json", topics.dendrogram_json(merges, names))
    else:
        write_json(outdir / "dendrogram.json",
                   {"name": names[0] if names else None, "height": 0.0})
    outputs.append("dendrogram.json")

    if cfg.queries_path is not None:
        queries = topics.load_queries(cfg.queries_path)
        multilabel = topics.assign_by_query(queries, docs)
        write_csv(outdir / "multilabel.csv", ["paper_id", "topics"],
                  [(pid, ";".join(sorted(lbls))) for pid, lbls in sorted(multilabel.items())])
        outputs.append("multilabel.csv")
        trend_labels: dict = multilabel
    else:
        trend_labels = assignment.labels

    for mode, fname in (("count", "topic_trends_count.csv"),
                        ("share", "topic_trends_share.csv")):
        trends = topics.topic_trend(trend_labels, years, mode=mode)
        rows = []
        for topic in sorted(trends, key=str):
            for y, v in zip(trends[topic].years, trends[topic].values):
                rows.append((str(topic), y, repr(v)))
        write_csv(outdir / fname, ["topic", "year", "value"], rows)
        outputs.append(fname)

    count_trends = topics.topic_trend(trend_labels, years, mode="count")
    emerging = topics.emerging_topics(count_trends, cfg.topics.trend_since,
                                      cfg.topics.emerging_k)
    write_csv(outdir / "emerging.csv", ["topic", "growth_rate"],
              [(str(t), repr(rate)) for t, rate in emerging])
    outputs.append("emerging.csv")

    if cfg.linkage.themes:
        abstracts = {r.id: r.abstract for r in kept}
        matrix = topics.topic_linkage(cfg.linkage.themes, abstracts, cfg.linkage.epsilon)
        header = ["theme"] + matrix.themes
        write_csv(outdir / "linkage.csv", header,
                  [(t, *[repr(w) for w in row])
                   for t, row in zip(matrix.themes, matrix.weights)])
        write_csv(outdir / "linkage_shares.csv", header,
                  [(t, *[repr(w) for w in row])
                   for t, row in zip(matrix.themes, matrix.row_shares())])
        outputs.extend(["linkage.csv", "linkage_shares.csv"])
    return outputs


def stage_citenet(cfg: RunConfig, outdir) -> list[str]:
    _records, _errors, kept, _rejected, kg = _load_corpus(cfg)
    cit = kg.project(PROJECTION_CITATION)
    block = cfg.citenet
    outputs = []

    years, n_t, e_t = cn.growth_series(cit)
    write_csv(outdir / "growth.csv", ["year", "nodes", "edges"],
              list(zip(years, n_t, e_t)))
    outputs.append("growth.csv")

    fits: dict = {"densification": _fit_payload(cn.densification_fit, cit)}
    degrees = [d for d in cn.in_degree_samples(cit) if d >= max(1, block.degree_xmin)]
    fits["degree_mle"] = _fit_payload(fit_power_law_mle, degrees, block.degree_xmin)

    snapshots = [cit.snapshot(y) for y in years]
    if len(snapshots) >= 2:
        curve, pa_fit = cn.preferential_attachment_curve(snapshots)
        write_csv(outdir / "pref_attachment.csv", ["mean_prior_citations", "mean_gain"],
                  [(repr(k), repr(d)) for k, d in curve])
        fits["preferential_attachment"] = pa_fit.as_dict() if pa_fit else None
    else:
        write_csv(outdir / "pref_attachment.csv", ["mean_prior_citations", "mean_gain"], [])
        fits["preferential_attachment"] = None
    outputs.append("pref_attachment.csv")
    write_json(outdir / "fits.json", fits)
    outputs.append("fits.json")

    window = block.window()
    results = cn.cd_index_all(cit, window=window, exclude_self_citations=block.cd_exclude_self)
    write_csv(outdir / "cd_papers.csv", ["paper_id", "cd", "n_t", "f_count", "b_count"],
              [(r.paper, repr(r.cd), r.n_t, r.f_count, r.b_count) for r in results])
    yearly = cn.cd_index_yearly(cit, window=window,
                                exclude_self_citations=block.cd_exclude_self)
    write_csv(outdir / "cd_yearly.csv", ["year", "mean_cd"],
              [(y, repr(v)) for y, v in zip(yearly.years, yearly.values)])
    outputs.extend(["cd_papers.csv", "cd_yearly.csv"])

    texts_by_year: dict[int, list[str]] = {}
    for rec in kept:
        texts_by_year.setdefault(rec.year, []).append(rec.title + " " + rec.abstract)
    ttr = cn.type_token_ratio(texts_by_year)
    write_csv(outdir / "ttr.csv", ["year", "type_token_ratio"],
              [(y, repr(v)) for y, v in zip(ttr.years, ttr.values)])
    outputs.append("ttr.csv")

    k = min(block.backbone_k, kg.node_count("paper"))
    if k >= 2:
        backbone = cn.main_path_backbone(kg, k, decay=block.decay, damping=block.damping,
                                         tol=block.tol, max_iter=block.max_iter)
        write_graphml(outdir / "backbone.graphml", backbone.nodes,
                      [(u, v, attrs) for (u, v), attrs in sorted(backbone.edges.items())],
                      directed=True)
        outputs.append("backbone.graphml")
    return outputs


def stage_collabnet(cfg: RunConfig, outdir) -> list[str]:
    _records, _errors, _kept, _rejected, kg = _load_corpus(cfg)
    coauth = kg.project(PROJECTION_COAUTHORSHIP)
    block = cfg.collabnet
    outputs = []

    assignment = _cluster_assignment(kg, cfg)
    nationality = {}
    topic_label = {}
    for u in coauth.sorted_nodes():
        nationality[u] = co.author_attribute(kg, u, "nationality")
        topic_label[u] = co.author_attribute(kg, u, "primary_topic",
                                             topic_labels=assignment.labels)

    lo, hi = kg.corpus_year_range
    per_year = []
    for y in range(lo, hi + 1):
        snap = coauth.snapshot(y)
        if snap.node_count() == 0:
            continue
        report = co.components(snap)
        entry = {
            "year": y,
            "nodes": snap.node_count(),
            "edges": snap.edge_count(),
            "components": report.count,
            "largest_component": report.largest_size,
            "diameter": report.diameter_of_largest,
        }
        for name, labels in (("nationality", nationality), ("primary_topic", topic_label)):
            res = co.assortativity_categorical(
                snap, labels, attribute=name, exclude_unknown=block.exclude_unknown)
            entry[f"assortativity_{name}"] = res.r if res else None
        per_year.append(entry)

    pairs = [(e["nodes"], e["edges"]) for e in per_year if e["nodes"] > 0 and e["edges"] > 0]
    growth_fit = None
    if len(pairs) >= 3:
        growth_fit = fit_power_law_ls([p[0] for p in pairs],
                                      [p[1] for p in pairs]).as_dict()

    report = co.components(coauth)
    write_csv(outdir / "component_sizes.csv", ["size", "count"],
              sorted(_histogram(report.sizes[1:]).items()))
    outputs.append("component_sizes.csv")
    write_csv(outdir / "degree_distribution.csv", ["degree", "count"],
              co.degree_histogram(coauth))
    outputs.append("degree_distribution.csv")

    hops = co.hop_coverage(coauth) if coauth.node_count() else []
    scores = co.pagerank(coauth, damping=block.damping, tol=block.tol,
                         max_iter=block.max_iter) if coauth.node_count() else {}
    between = co.betweenness(coauth) if coauth.node_count() else {}

    k = min(block.top_k, coauth.node_count())
    cliques = {}
    if k >= 1:
        sub = co.top_active_subnetwork(coauth, k, scores=scores)
        projected_to_graphml(outdir / "top_authors.graphml", sub)
        outputs.append("top_authors.graphml")
        cliques = {str(size): co.count_k_cliques(sub, size) for size in (3, 4, 5)}

    top_between = sorted(between.items(), key=lambda kv: (-kv[1], kv[0]))[:20]
    write_json(outdir / "collab_metrics.json", {
        "per_year": per_year,
        "growth_fit": growth_fit,
        "components": report.count,
        "largest_component": report.largest_size,
        "diameter": report.diameter_of_largest,
        "hop_coverage": [[k_, repr(f)] for k_, f in hops],
        "clique_counts_top_subnetwork": cliques,
        "top_betweenness": [[u, v] for u, v in top_between],
    })
    outputs.append("collab_metrics.json")
    return outputs


def _histogram(values) -> dict[int, int]:
    out: dict[int, int] = {}
    for v in values:
        out[v] = out.get(v, 0) + 1
    return out


def stage_predict(cfg: RunConfig, outdir) -> list[str]:
    _records, _errors, _kept, _rejected, kg = _load_corpus(cfg)
    kw = kg.project(PROJECTION_KEYWORD)
    block = cfg.predict
    if kw.node_count() == 0:
        raise RuntimeError("keyword co-occurrence network is empty")
    lo, hi = kg.corpus_year_range
    snapshots = {y: kw.snapshot(y) for y in range(lo, hi + 1)}

    eval_year = hi
    first_train = max(lo + 1, block.train_start) if block.train_start else lo + 1
    train_samples = []
    used_years = []
    for year in range(first_train, eval_year):
        try:
            batch = pr.build_training_set(snapshots, year, neg_ratio=block.neg_ratio,
                                          seed=cfg.seed + year)
        except pr.DegenerateYearError:
            continue
        train_samples.extend(batch)
        used_years.append(year)
    if not train_samples:
        raise RuntimeError("no usable training years: keyword network never grew")

    model = pr.train_link_model(train_samples, n_trees=block.n_trees,
                                max_depth=block.max_depth,
                                learning_rate=block.learning_rate,
                                min_leaf=block.min_leaf, seed=cfg.seed)
    model.save(outdir / "model.json")

    eval_payload = None
    try:
        test_samples = pr.build_training_set(snapshots, eval_year,
                                             neg_ratio=block.neg_ratio,
                                             seed=cfg.seed + eval_year)
        X, y = pr.samples_to_matrices(test_samples)
        auc = pr.evaluate_auc(model.predict_proba(X), y)
        eval_payload = {
            "year": eval_year,
            "auc": auc,
            "positives": int(y.sum()),
            "negatives": int(len(y) - y.sum()),
        }
    except (pr.DegenerateYearError, ValueError) as exc:
        eval_payload = {"year": eval_year, "error": str(exc)}

    candidates = pr.all_unconnected_pairs(snapshots[eval_year])
    ranked = pr.predict_links(model, snapshots, eval_year, candidates,
                              top_n=block.top_n)
    write_csv(outdir / "predictions.csv",
              ["keyword_a", "keyword_b", "probability", "rank"],
              [(u, v, repr(p), i + 1) for i, ((u, v), p) in enumerate(ranked)])
    write_json(outdir / "prediction_eval.json", {
        "train_years": used_years,
        "train_samples": len(train_samples),
        "train_positives": sum(1 for s in train_samples if s.label == 1),
        "final_train_loss": model.loss_curve[-1],
        "heldout": eval_payload,
        "candidates_scored": len(candidates),
    })
    return ["model.json", "predictions.csv", "prediction_eval.json"]


_STAGE_FUNCS = {
    "ingest": stage_ingest,
    "stats": stage_stats,
    "topics": stage_topics,
    "citenet": stage_citenet,
    "collabnet": stage_collabnet,
    "predict": stage_predict,
}


# --- driver ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="litla",
        description="Literature-landscape analytics over bibliographic records.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name in STAGES + ("all",):
        p = sub.add_parser(name, help=f"run the {name} stage" if name != "all"
                           else "run every stage in dependency order")
        p.add_argument("--config", required=True, help="path to the run config (TOML)")
        p.add_argument("--output", default=None, help="override the output directory")
        p.add_argument("--seed", type=int, default=None, help="override the run seed")
        p.add_argument("--threads", type=int, default=None,
                       help="cap worker threads (stages currently run single-worker)")
    return parser


def run_stages(cfg: RunConfig, stage_names: list[str]) -> int:
    outdir = cfg.output_dir
    outdir.mkdir(parents=True, exist_ok=True)
    manifest = {
        "config_hash": cfg.config_hash(),
        "seed": cfg.seed,
        "stages": [],
    }
    failed = False
    for name in stage_names:
        start = time.monotonic()
        entry = {"stage": name, "status": "ok", "error": None, "outputs": []}
        try:
            entry["outputs"] = _STAGE_FUNCS[name](cfg, outdir)
        except Exception as exc:  # record per-stage failures, keep going
            entry["status"] = "failed"
            entry["error"] = f"{type(exc).__name__}: {exc}"
            failed = True
            traceback.print_exc(file=sys.stderr)
        entry["duration_s"] = round(time.monotonic() - start, 6)
        manifest["stages"].append(entry)
    write_json(outdir / "run_manifest.json", manifest)
    return 1 if failed else 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = load_config(args.config, output_override=args.output,
                          seed_override=args.seed, threads_override=args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    stage_names = list(STAGES) if args.command == "all" else [args.command]
    return run_stages(cfg, stage_names)


if __name__ == "__main__":
    sys.exit(main())
