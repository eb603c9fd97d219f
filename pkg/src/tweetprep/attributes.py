"""Attribute schema built from the hypernym graph, and count-vector queries.

Every lemma is linked to the top-most ancestors of its hypernym chains. Roots
with at least ``threshold`` hyponyms become attributes of their own. Lemmas
under weaker roots fall back to the attribute named after their
lexicographer file.
"""

from __future__ import annotations

import graphlib
from collections import Counter
from dataclasses import dataclass, field

from .errors import CycleDetected
from .lexparser import HYPERNYM_SYMBOLS, LexDatabase

FeatureVector = tuple  # tuple[int, ...], one slot per schema attribute

HYPERNYM_ROOT = "hypernym_root"
FILE_NAME = "file_name"
MAX_NGRAM_CAP = 3


@dataclass
class HypernymGraph:
    nodes: set[str]
    edges: dict[str, set[str]]
    dangling_roots: set[str]

    def hypernym_words(self) -> set[str]:
        """Words that occur as a hypernym of at least one other word."""
        out = set()
        for targets in self.edges.values():
            out |= targets
        return out


def build_graph(db: LexDatabase) -> HypernymGraph:
    members = db.lemmas()
    edges: dict[str, set[str]] = {}
    for syn in db.synsets():
        targets = {
            p.target_lemma
            for p in syn.pointers
            if p.symbol in HYPERNYM_SYMBOLS and p.source_lemma is None
        }
        if not targets:
            continue
        for lemma in syn.lemmas:
            # word-level graph merges senses; "x is-a x" carries no information
            t = targets - {lemma}
            if t:
                edges.setdefault(lemma, set()).update(t)
    targets = set().union(*edges.values()) if edges else set()
    dangling = targets - members
    graph = HypernymGraph(nodes=members | dangling, edges=edges, dangling_roots=dangling)
    _topological_order(graph)
    return graph


def _topological_order(graph: HypernymGraph) -> list[str]:
    """Hypernyms before hyponyms; raises CycleDetected."""
    sorter = graphlib.TopologicalSorter()
    for node in sorted(graph.nodes):
        sorter.add(node, *sorted(graph.edges.get(node, ())))
    try:
        return list(sorter.static_order())
    except graphlib.CycleError as exc:
        cycle = exc.args[1]
        # graphlib lists the cycle against edge direction
        raise CycleDetected(list(reversed(cycle))) from None


def collapse_chains(g: HypernymGraph) -> dict[str, frozenset[str]]:
    """Map every node to the set of top-most ancestors reachable from it."""
    roots: dict[str, frozenset[str]] = {}
    for node in _topological_order(g):
        hypers = g.edges.get(node)
        if not hypers:
            roots[node] = frozenset((node,))
        else:
            acc = set()
            for h in hypers:
                acc |= roots[h]
            roots[node] = frozenset(acc)
    return roots


def count_hyponyms(roots: dict[str, frozenset[str]]) -> dict[str, int]:
    counts = Counter()
    for lemma, rs in roots.items():
        for r in rs:
            if r != lemma:
                counts[r] += 1
    out = {}
    for rs in roots.values():
        for r in rs:
            out[r] = counts[r]
    return out


@dataclass
class AttributeSchema:
    attributes: list[tuple[str, str]]
    word_map: dict[str, tuple[int, ...]]
    threshold: int
    max_ngram: int
    stats: dict[str, int] = field(default_factory=dict)

    def __len__(self):
        return len(self.attributes)

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.attributes]

    def index_of(self, name: str) -> int:
        return self.names.index(name)

    def dumps(self) -> str:
        lines = [
            f"#schema\tattributes={len(self.attributes)}\tthreshold={self.threshold}"
            f"\tmax_ngram={self.max_ngram}"
        ]
        lines.extend(f"{name}\t{kind}" for name, kind in self.attributes)
        for lemma in sorted(self.word_map):
            idx = ",".join(str(i) for i in self.word_map[lemma])
            lines.append(f"{lemma}\t{idx}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "AttributeSchema":
        lines = text.splitlines()
        if not lines or not lines[0].startswith("#schema\t"):
            raise ValueError("not a schema file")
        header = dict(part.split("=", 1) for part in lines[0].split("\t")[1:])
        n = int(header["attributes"])
        attributes = []
        for line in lines[1 : 1 + n]:
            name, kind = line.split("\t")
            attributes.append((name, kind))
        word_map = {}
        for line in lines[1 + n :]:
            lemma, idx = line.split("\t")
            word_map[lemma] = tuple(int(i) for i in idx.split(","))
        return cls(attributes, word_map, int(header["threshold"]), int(header["max_ngram"]))


def build_schema(db: LexDatabase, threshold: int) -> AttributeSchema:
    if threshold < 1:
        raise ValueError("threshold must be >= 1")
    graph = build_graph(db)
    roots = collapse_chains(graph)
    counts = count_hyponyms(roots)

    qualifying = sorted(r for r, c in counts.items() if c >= threshold)
    files = sorted(db.file_names)
    attributes = [(r, HYPERNYM_ROOT) for r in qualifying]
    attributes += [(f, FILE_NAME) for f in files]
    root_idx = {r: i for i, r in enumerate(qualifying)}
    file_idx = {f: len(qualifying) + i for i, f in enumerate(files)}

    word_map: dict[str, tuple[int, ...]] = {}
    for lemma in sorted(db.lemmas()):
        hits = sorted(root_idx[r] for r in roots[lemma] if r in root_idx)
        if not hits:
            hits = sorted(file_idx[f] for f in db.files_of(lemma))
        word_map[lemma] = tuple(hits)
    # dangling roots that qualify are still mentionable in text
    for r in qualifying:
        word_map.setdefault(r, (root_idx[r],))
    word_map = dict(sorted(word_map.items()))

    longest = max((lemma.count("_") + 1 for lemma in word_map), default=1)
    stats = {
        "hypernym_words": len(graph.hypernym_words()),
        "pre_threshold_roots": sum(1 for c in counts.values() if c >= 1),
        "hypernym_root_attributes": len(qualifying),
        "file_name_attributes": len(files),
        "dangling_roots": len(graph.dangling_roots),
        "lemmas": len(db.lemmas()),
    }
    return AttributeSchema(
        attributes=attributes,
        word_map=word_map,
        threshold=threshold,
        max_ngram=min(MAX_NGRAM_CAP, longest),
        stats=stats,
    )


def match_lemmas(tokens, schema: AttributeSchema):
    """Yield schema lemmas found in ``tokens``, longest match first, no overlap."""
    word_map = schema.word_map
    n = len(tokens)
    i = 0
    while i < n:
        for size in range(min(schema.max_ngram, n - i), 0, -1):
            key = tokens[i] if size == 1 else "_".join(tokens[i : i + size])
            if key in word_map:
                yield key
                i += size
                break
        else:
            i += 1


def query(tokens, schema: AttributeSchema) -> FeatureVector:
    counts = [0] * len(schema.attributes)
    for lemma in match_lemmas(tokens, schema):
        for idx in schema.word_map[lemma]:
            counts[idx] += 1
    return tuple(counts)
