"""Corpus and lexicon ingestion, CSV/ARFF emission, configuration files."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError, EmptyLabelUniverse, IoFailure, MissingDirectory, NoCorpusFiles
from .lexparser import LexDatabase, build_database
from .pipeline import ClassDataset

log = logging.getLogger(__name__)

LEX_FILE_NAME = re.compile(r"^(noun|verb|adj|adv)\.[A-Za-z_]+$")
_ATTR_OK = re.compile(r"[^a-z0-9_.-]")
_BAD_LABEL = re.compile(r"[,\r\n]")


@dataclass(frozen=True)
class NonUTF8Line:
    file: str
    line: int


def read_corpus(directory) -> list[ClassDataset]:
    """One dataset per regular file; the file stem is the class label."""
    d = Path(directory)
    if not d.is_dir():
        raise MissingDirectory(str(d))
    paths = sorted(p for p in d.iterdir() if p.is_file() and not p.name.startswith("."))
    if not paths:
        raise NoCorpusFiles(str(d))
    out = []
    for path in paths:
        lines, skipped = [], []
        for no, raw in enumerate(path.read_bytes().splitlines(), start=1):
            try:
                lines.append(raw.decode("utf-8"))
            except UnicodeDecodeError:
                skipped.append(NonUTF8Line(str(path), no))
                log.warning("%s:%d: not valid UTF-8, line skipped", path, no)
        out.append(ClassDataset.from_lines(path.stem, lines, skipped))
    return out


def write_corpus(directory, corpus: dict[str, list[str]]):
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for label, tweets in corpus.items():
        (d / f"{label}.txt").write_text("".join(t + "\n" for t in tweets), encoding="utf-8")


def read_lexicon_dir(directory) -> LexDatabase:
    d = Path(directory)
    if not d.is_dir():
        raise MissingDirectory(str(d))
    paths = sorted(p for p in d.iterdir() if p.is_file() and LEX_FILE_NAME.match(p.name))
    if not paths:
        raise NoCorpusFiles(f"{d}: no lexicographer files (expected names like noun.person)")
    return build_database([(p.name, p.read_text(encoding="utf-8")) for p in paths])


def write_lexicon_dir(directory, files: dict[str, str]):
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for name, content in files.items():
        (d / name).write_text(content, encoding="utf-8")


def column_names(names) -> list[str]:
    """Attribute names restricted to ``[a-z0-9_.-]``, made unique with ``-N`` suffixes."""
    out, seen = [], set()
    for name in names:
        base = _ATTR_OK.sub("_", name.lower()) or "attr"
        cand, n = base, 1
        while cand in seen or cand == "class":
            n += 1
            cand = f"{base}-{n}"
        seen.add(cand)
        out.append(cand)
    return out


def _names(schema_or_names):
    names = getattr(schema_or_names, "names", schema_or_names)
    return column_names(list(names))


def write_csv(rows, schema, path):
    """``rows`` are ``(vector, label)`` pairs; header is the attribute names then ``class``."""
    names = _names(schema)
    lines = [",".join(names + ["class"])]
    for vec, label in rows:
        if len(vec) != len(names):
            raise ValueError(f"vector length {len(vec)} != {len(names)} attributes")
        if _BAD_LABEL.search(label) or not label:
            raise ValueError(f"class label {label!r} cannot be written unquoted")
        lines.append(",".join(str(int(x)) for x in vec) + "," + label)
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def read_csv(path) -> tuple[list[str], list[tuple[tuple[int, ...], str]]]:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise IoFailure(f"{path}: empty CSV file")
    header = lines[0].split(",")
    if header[-1] != "class":
        raise IoFailure(f"{path}: last column must be 'class'")
    rows = []
    for line in lines[1:]:
        *counts, label = line.split(",")
        rows.append((tuple(int(c) for c in counts), label))
    return header[:-1], rows


def _arff_quote(name: str) -> str:
    if re.search(r"[\s,{}'\"%]", name):
        return "'" + name.replace("\\", "\\\\").replace("'", "\\'") + "'"
    return name


def write_arff(rows, schema, relation_name, path, labels=None):
    names = _names(schema)
    if labels is None:
        labels = sorted({label for _, label in rows})
    if not labels:
        raise EmptyLabelUniverse("ARFF needs at least one class label")
    lines = [f"@relation {_arff_quote(relation_name)}"]
    lines += [f"@attribute {_arff_quote(n)} numeric" for n in names]
    lines.append("@attribute class {" + ",".join(_arff_quote(c) for c in labels) + "}")
    lines.append("@data")
    for vec, label in rows:
        lines.append(",".join(str(int(x)) for x in vec) + "," + _arff_quote(label))
    try:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


# -- configuration ----------------------------------------------------------


@dataclass
class PipelineConfig:
    lexicon_dir: Path | None = None
    corpus_dir: Path | None = None
    threshold: int = 2500
    n_workers: int | None = None  # None: TWEETPREP_WORKERS or 2x physical cores
    seed: int = 0
    n_trees: int = 10
    k_features: int | None = None  # None: floor(log2(schema_len)) + 1
    output_dir: Path = Path("out")
    arff: bool = False
    backend: str = "thread"

    def validate(self, need=("lexicon_dir", "corpus_dir")):
        for name in need:
            value = getattr(self, name)
            if value is None:
                raise ConfigError(f"{name.replace('_', '-')} is required")
            if not Path(value).is_dir():
                raise MissingDirectory(str(value))
        if self.threshold < 1:
            raise ConfigError("threshold must be >= 1")
        if self.n_workers is not None and self.n_workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.n_trees < 1:
            raise ConfigError("trees must be >= 1")
        if self.k_features is not None and self.k_features < 1:
            raise ConfigError("k-features must be >= 1")
        if self.backend not in ("thread", "process"):
            raise ConfigError("backend must be 'thread' or 'process'")

    def echo(self) -> dict:
        return {f.name: (str(v) if isinstance(v := getattr(self, f.name), Path) else v) for f in fields(self)}


# config-file / CLI key -> PipelineConfig field
CONFIG_KEYS = {
    "lexicon-dir": "lexicon_dir",
    "corpus-dir": "corpus_dir",
    "threshold": "threshold",
    "workers": "n_workers",
    "seed": "seed",
    "trees": "n_trees",
    "k-features": "k_features",
    "out": "output_dir",
    "arff": "arff",
    "backend": "backend",
}


def _coerce(field_name: str, value: str):
    if field_name in ("lexicon_dir", "corpus_dir", "output_dir"):
        return Path(value)
    if field_name == "arff":
        if value.lower() in ("1", "true", "yes", "on"):
            return True
        if value.lower() in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"arff: expected a boolean, got {value!r}")
    if field_name == "backend":
        return value
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"{field_name}: expected an integer, got {value!r}") from None


def read_key_values(path) -> dict[str, str]:
    """Flat ``key=value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(exc)) from exc
    for no, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{no}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("_", "-")] = value
    return out


def load_config(path=None, overrides=None) -> PipelineConfig:
    """Defaults, then the config file, then ``overrides`` (CLI keys -> raw values)."""
    cfg = PipelineConfig()
    layers = []
    if path is not None:
        layers.append(read_key_values(path))
    if overrides:
        layers.append({k: v for k, v in overrides.items() if v is not None})
    for layer in layers:
        for key, value in layer.items():
            if key not in CONFIG_KEYS:
                raise ConfigError(f"unknown configuration key {key!r}")
            name = CONFIG_KEYS[key]
            setattr(cfg, name, value if not isinstance(value, str) else _coerce(name, value))
    return cfg
