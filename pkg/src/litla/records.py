"""Bibliographic records: JSONL parsing, canonical serialization, exclusions.

The input format is line-delimited JSON, one record per line, with field
names exactly matching :class:`PaperRecord`. Malformed lines never abort a
batch; they are reported as :class:`ParseError` entries with line numbers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable

PUB_TYPES = ("journal", "conference", "other")
INTENT_LABELS = ("background", "method", "extension", "comparison")

YEAR_MIN = 1900
YEAR_MAX = 2100


@dataclass
class Author:
    name: str
    affiliation: str = ""


@dataclass
class CitationStatement:
    text: str
    intent: str | None = None


@dataclass
class PaperRecord:
    id: str
    title: str
    year: int
    abstract: str = ""
    authors: list[Author] = field(default_factory=list)
    venue: str = ""
    pub_type: str = "other"
    author_keywords: list[str] = field(default_factory=list)
    subject_categories: list[str] = field(default_factory=list)
    publisher: str = ""
    citation_count: int = 0
    page_count: int = 0
    references: list[str] = field(default_factory=list)
    language: str = "English"
    doc_type: str = "article"
    citation_statements: list[CitationStatement] = field(default_factory=list)
    extracted_keywords: list[str] = field(default_factory=list)
    embedding: list[float] | None = None


@dataclass
class ParseError:
    line: int
    message: str


_FIELD_NAMES = (
    "id", "title", "abstract", "authors", "year", "venue", "pub_type",
    "author_keywords", "subject_categories", "publisher", "citation_count",
    "page_count", "references", "language", "doc_type",
    "citation_statements", "extracted_keywords", "embedding",
)


class SchemaError(ValueError):
    pass


def _expect(cond: bool, message: str) -> None:
    if not cond:
        raise SchemaError(message)


def _str_list(value, name: str) -> list[str]:
    _expect(isinstance(value, list) and all(isinstance(v, str) for v in value),
            f"{name} must be a list of strings")
    return list(value)


def _record_from_obj(obj: dict) -> PaperRecord:
    _expect(isinstance(obj, dict), "record must be a JSON object")
    unknown = set(obj) - set(_FIELD_NAMES)
    _expect(not unknown, f"unknown fields: {sorted(unknown)}")
    _expect("id" in obj, "missing required field 'id'")
    _expect(isinstance(obj["id"], str) and obj["id"], "id must be a non-empty string")
    _expect("title" in obj, "missing required field 'title'")
    _expect(isinstance(obj["title"], str), "title must be a string")
    _expect("year" in obj, "missing required field 'year'")
    year = obj["year"]
    _expect(isinstance(year, int) and not isinstance(year, bool)
            and YEAR_MIN <= year <= YEAR_MAX,
            f"year must be an integer in [{YEAR_MIN}, {YEAR_MAX}]")

    authors = []
    for a in obj.get("authors", []):
        _expect(isinstance(a, dict) and isinstance(a.get("name"), str) and a["name"],
                "author entries must be objects with a non-empty 'name'")
        _expect(set(a) <= {"name", "affiliation"}, "author entries allow only name/affiliation")
        aff = a.get("affiliation", "")
        _expect(isinstance(aff, str), "author affiliation must be a string")
        authors.append(Author(name=a["name"], affiliation=aff))

    statements = []
    for s in obj.get("citation_statements", []):
        _expect(isinstance(s, dict) and isinstance(s.get("text"), str),
                "citation statements must be objects with 'text'")
        _expect(set(s) <= {"text", "intent"}, "citation statements allow only text/intent")
        intent = s.get("intent")
        _expect(intent is None or intent in INTENT_LABELS,
                f"intent must be one of {INTENT_LABELS} or null")
        statements.append(CitationStatement(text=s["text"], intent=intent))

    pub_type = obj.get("pub_type", "other")
    _expect(pub_type in PUB_TYPES, f"pub_type must be one of {PUB_TYPES}")

    for name in ("citation_count", "page_count"):
        v = obj.get(name, 0)
        _expect(isinstance(v, int) and not isinstance(v, bool) and v >= 0,
                f"{name} must be a non-negative integer")

    embedding = obj.get("embedding")
    if embedding is not None:
        _expect(isinstance(embedding, list) and len(embedding) > 0
                and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                        for v in embedding),
                "embedding must be a non-empty list of numbers")
        embedding = [float(v) for v in embedding]

    for name in ("abstract", "venue", "publisher", "language", "doc_type"):
        _expect(isinstance(obj.get(name, ""), str), f"{name} must be a string")

    return PaperRecord(
        id=obj["id"],
        title=obj["title"],
        year=year,
        abstract=obj.get("abstract", ""),
        authors=authors,
        venue=obj.get("venue", ""),
        pub_type=pub_type,
        author_keywords=_str_list(obj.get("author_keywords", []), "author_keywords"),
        subject_categories=_str_list(obj.get("subject_categories", []), "subject_categories"),
        publisher=obj.get("publisher", ""),
        citation_count=obj.get("citation_count", 0),
        page_count=obj.get("page_count", 0),
        references=_str_list(obj.get("references", []), "references"),
        language=obj.get("language", "English"),
        doc_type=obj.get("doc_type", "article"),
        citation_statements=statements,
        extracted_keywords=_str_list(obj.get("extracted_keywords", []), "extracted_keywords"),
        embedding=embedding,
    )


def record_to_obj(rec: PaperRecord) -> dict:
    return {
        "id": rec.id,
        "title": rec.title,
        "abstract": rec.abstract,
        "authors": [{"name": a.name, "affiliation": a.affiliation} for a in rec.authors],
        "year": rec.year,
        "venue": rec.venue,
        "pub_type": rec.pub_type,
        "author_keywords": list(rec.author_keywords),
        "subject_categories": list(rec.subject_categories),
        "publisher": rec.publisher,
        "citation_count": rec.citation_count,
        "page_count": rec.page_count,
        "references": list(rec.references),
        "language": rec.language,
        "doc_type": rec.doc_type,
        "citation_statements": [
            {"text": s.text, "intent": s.intent} for s in rec.citation_statements
        ],
        "extracted_keywords": list(rec.extracted_keywords),
        "embedding": rec.embedding,
    }


def serialize_record(rec: PaperRecord) -> str:
    """Canonical single-line JSON (sorted keys, no spaces). Fixpoint of
    parse -> serialize, which makes round-trips byte-identical."""
    return json.dumps(record_to_obj(rec), sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False)


def serialize_records(records: Iterable[PaperRecord]) -> str:
    return "".join(serialize_record(r) + "\n" for r in records)


def parse_records(stream: IO) -> tuple[list[PaperRecord], list[ParseError]]:
    """Parse line-delimited records from a text or byte stream.

    Every well-formed line yields one record; malformed lines yield errors
    with 1-based line numbers. Records whose embedding dimension differs
    from the first embedding seen are rejected (dimension must be constant
    per corpus).
    """
    records: list[PaperRecord] = []
    errors: list[ParseError] = []
    dim: int | None = None
    for lineno, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                errors.append(ParseError(lineno, f"invalid UTF-8: {exc}"))
                continue
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            errors.append(ParseError(lineno, f"invalid JSON: {exc.msg}"))
            continue
        try:
            rec = _record_from_obj(obj)
        except SchemaError as exc:
            errors.append(ParseError(lineno, str(exc)))
            continue
        if rec.embedding is not None:
            if dim is None:
                dim = len(rec.embedding)
            elif len(rec.embedding) != dim:
                errors.append(ParseError(
                    lineno, f"embedding dimension {len(rec.embedding)} != corpus dimension {dim}"))
                continue
        records.append(rec)
    return records, errors


def load_records(path) -> tuple[list[PaperRecord], list[ParseError]]:
    with open(path, "rb") as fh:
        return parse_records(fh)


# --- exclusion protocol ------------------------------------------------------

DEFAULT_EXCLUDED_DOC_TYPES = frozenset({"book", "keynote", "workshop paper", "unpublished"})

REASON_LANGUAGE = "language"
REASON_MIN_PAGES = "min_pages"
REASON_DOC_TYPE = "doc_type"
REASON_EXTENDED = "extended_version"


@dataclass
class ExclusionPolicy:
    min_pages: int = 4
    allowed_languages: frozenset[str] = frozenset({"english"})
    excluded_doc_types: frozenset[str] = DEFAULT_EXCLUDED_DOC_TYPES
    drop_extended_versions: bool = False
    extended_version_ids: frozenset[str] = frozenset()


def rejection_reason(rec: PaperRecord, policy: ExclusionPolicy) -> str | None:
    """First violated predicate, in protocol order, or None when kept."""
    if rec.language.casefold() not in {l.casefold() for l in policy.allowed_languages}:
        return REASON_LANGUAGE
    if rec.page_count < policy.min_pages:
        return REASON_MIN_PAGES
    if rec.doc_type.casefold() in {d.casefold() for d in policy.excluded_doc_types}:
        return REASON_DOC_TYPE
    if policy.drop_extended_versions and rec.id in policy.extended_version_ids:
        return REASON_EXTENDED
    return None


def apply_exclusions(
    records: list[PaperRecord], policy: ExclusionPolicy
) -> tuple[list[PaperRecord], list[tuple[PaperRecord, str]]]:
    """Split records into (kept, rejected-with-reason). Pure and idempotent:
    each rejected record carries exactly one primary reason."""
    kept: list[PaperRecord] = []
    rejected: list[tuple[PaperRecord, str]] = []
    for rec in records:
        reason = rejection_reason(rec, policy)
        if reason is None:
            kept.append(rec)
        else:
            rejected.append((rec, reason))
    return kept, rejected


def rejection_counts(rejected: list[tuple[PaperRecord, str]]) -> dict[str, int]:
    counts: dict[str, int] = {}
    for _, reason in rejected:
        counts[reason] = counts.get(reason, 0) + 1
    return dict(sorted(counts.items()))
