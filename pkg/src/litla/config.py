"""Run configuration: a single TOML-style file drives every pipeline stage.

A minimal TOML subset is parsed here (sections, dotted sections, scalar
values, JSON-style arrays, quoted keys) so runs stay declarative without an
external dependency. Unknown keys are rejected, and relative paths resolve
against the config file's directory.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields
from pathlib import Path


class ConfigError(ValueError):
    pass


# --- TOML-subset parsing ---------------------------------------------------------


def _strip_comment(line: str) -> str:
    out = []
    in_string = False
    for ch in line:
        if ch == '"':
            in_string = not in_string
        if ch == "#" and not in_string:
            break
        out.append(ch)
    return "".join(out)


def _parse_scalar(text: str, lineno: int):
    text = text.strip()
    if not text:
        raise ConfigError(f"line {lineno}: empty value")
    if text.startswith('"'):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {lineno}: bad string: {exc.msg}") from exc
    if text.startswith("["):
        try:
            value = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {lineno}: bad array (JSON-style required): {exc.msg}") from exc
        if not isinstance(value, list):
            raise ConfigError(f"line {lineno}: expected array")
        return value
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        raise ConfigError(f"line {lineno}: cannot parse value {text!r}") from None


def _parse_key(text: str, lineno: int) -> str:
    text = text.strip()
    if text.startswith('"'):
        try:
            key = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"line {lineno}: bad quoted key: {exc.msg}") from exc
        return key
    if not text or any(ch in text for ch in ' \t[]"'):
        raise ConfigError(f"line {lineno}: bad key {text!r}")
    return text


def parse_toml(text: str) -> dict:
    """Parse the supported TOML subset into nested dicts."""
    root: dict = {}
    current = root
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise ConfigError(f"line {lineno}: unterminated section header")
            path = line[1:-1].strip()
            if not path:
                raise ConfigError(f"line {lineno}: empty section name")
            current = root
            for part in path.split("."):
                part = _parse_key(part, lineno)
                nxt = current.setdefault(part, {})
                if not isinstance(nxt, dict):
                    raise ConfigError(f"line {lineno}: section {path!r} clashes with a value")
                current = nxt
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key_text, value_text = line.split("=", 1)
        key = _parse_key(key_text, lineno)
        if key in current:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        current[key] = _parse_scalar(value_text, lineno)
    return root


# --- typed blocks -----------------------------------------------------------------


@dataclass
class ExclusionBlock:
    min_pages: int = 4
    allowed_languages: list[str] = field(default_factory=lambda: ["English"])
    excluded_doc_types: list[str] = field(
        default_factory=lambda: ["book", "keynote", "workshop paper", "unpublished"])
    drop_extended_versions: bool = False
    extended_version_ids: list[str] = field(default_factory=list)


@dataclass
class TopicsBlock:
    eps: float = 0.5
    min_pts: int = 5
    top_terms: int = 10
    trend_since: int = 2018
    emerging_k: int = 5


@dataclass
class LinkageBlock:
    epsilon: float = 0.15
    themes: dict = field(default_factory=dict)   # theme name -> keyword list


@dataclass
class CitenetBlock:
    decay: float = 0.2
    damping: float = 0.85
    tol: float = 1e-10
    max_iter: int = 500
    cd_window: int = 0            # 0 means "all later papers"
    cd_exclude_self: bool = True
    backbone_k: int = 40
    degree_xmin: int = 1

    def window(self) -> int | None:
        return None if self.cd_window <= 0 else self.cd_window


@dataclass
class CollabnetBlock:
    damping: float = 0.85
    tol: float = 1e-10
    max_iter: int = 500
    top_k: int = 50
    exclude_unknown: bool = True


@dataclass
class PredictBlock:
    n_trees: int = 50
    max_depth: int = 3
    learning_rate: float = 0.1
    min_leaf: int = 5
    neg_ratio: int = 5
    train_start: int = 0          # 0 means earliest feasible year
    top_n: int = 100


_BLOCK_TYPES = {
    "exclusions": ExclusionBlock,
    "topics": TopicsBlock,
    "linkage": LinkageBlock,
    "citenet": CitenetBlock,
    "collabnet": CollabnetBlock,
    "predict": PredictBlock,
}


@dataclass
class RunConfig:
    records_path: Path
    output_dir: Path
    seed: int = 0
    threads: int = 1
    queries_path: Path | None = None
    exclusions: ExclusionBlock = field(default_factory=ExclusionBlock)
    topics: TopicsBlock = field(default_factory=TopicsBlock)
    linkage: LinkageBlock = field(default_factory=LinkageBlock)
    citenet: CitenetBlock = field(default_factory=CitenetBlock)
    collabnet: CollabnetBlock = field(default_factory=CollabnetBlock)
    predict: PredictBlock = field(default_factory=PredictBlock)

    def as_dict(self) -> dict:
        def plain(obj):
            if isinstance(obj, Path):
                return str(obj)
            if hasattr(obj, "__dataclass_fields__"):
                return {f.name: plain(getattr(obj, f.name)) for f in fields(obj)}
            if isinstance(obj, dict):
                return {k: plain(v) for k, v in obj.items()}
            if isinstance(obj, list):
                return [plain(v) for v in obj]
            return obj

        return plain(self)

    def config_hash(self) -> str:
        # output_dir is where results land, not part of what they contain
        payload = {k: v for k, v in self.as_dict().items() if k != "output_dir"}
        return hashlib.sha256(
            json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()


def _build_block(cls, data: dict, section: str):
    allowed = {f.name for f in fields(cls)}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"[{section}] unknown keys: {sorted(unknown)}")
    kwargs = {}
    for f in fields(cls):
        if f.name not in data:
            continue
        value = data[f.name]
        if f.name == "themes":
            if not isinstance(value, dict) or not all(
                    isinstance(v, list) for v in value.values()):
                raise ConfigError(f"[{section}.themes] must map names to keyword arrays")
        kwargs[f.name] = value
    return cls(**kwargs)


def load_config(path, output_override=None, seed_override=None,
                threads_override=None) -> RunConfig:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    data = parse_toml(path.read_text(encoding="utf-8"))
    base = path.resolve().parent

    known_sections = {"run", "input", "output"} | set(_BLOCK_TYPES)
    unknown = set(data) - known_sections
    if unknown:
        raise ConfigError(f"unknown config sections/keys: {sorted(unknown)}")

    run = data.get("run", {})
    if not isinstance(run, dict) or set(run) - {"seed", "threads"}:
        raise ConfigError("[run] allows only seed and threads")
    inp = data.get("input", {})
    if not isinstance(inp, dict) or set(inp) - {"records", "queries"}:
        raise ConfigError("[input] allows only records and queries")
    if "records" not in inp:
        raise ConfigError("[input] records is required")
    out = data.get("output", {})
    if not isinstance(out, dict) or set(out) - {"dir"}:
        raise ConfigError("[output] allows only dir")

    records_path = (base / inp["records"]).resolve()
    if not records_path.is_file():
        raise ConfigError(f"records file not found: {records_path}")
    queries_path = None
    if "queries" in inp:
        queries_path = (base / inp["queries"]).resolve()
        if not queries_path.is_file():
            raise ConfigError(f"queries file not found: {queries_path}")

    if output_override is not None:
        output_dir = Path(output_override)
    elif "dir" in out:
        output_dir = base / out["dir"]
    else:
        raise ConfigError("output directory required ([output] dir or --output)")

    blocks = {}
    for section, cls in _BLOCK_TYPES.items():
        section_data = data.get(section, {})
        if not isinstance(section_data, dict):
            raise ConfigError(f"[{section}] must be a section")
        blocks[section] = _build_block(cls, section_data, section)

    seed = seed_override if seed_override is not None else run.get("seed", 0)
    threads = threads_override if threads_override is not None else run.get("threads", 1)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed must be an integer")
    if not isinstance(threads, int) or threads < 1:
        raise ConfigError("threads must be a positive integer")

    return RunConfig(records_path=records_path, output_dir=output_dir,
                     seed=seed, threads=threads, queries_path=queries_path,
                     **blocks)
