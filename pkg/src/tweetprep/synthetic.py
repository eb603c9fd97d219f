"""Seeded generators for a synthetic lexicon and a labeled tweet corpus.

The lexicon is emitted as lexicographer source text so it goes through the
real parser. The corpus gives every class a disjoint slice of the qualifying
hypernym roots, which makes a deduplicated corpus perfectly separable.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

from .attributes import HYPERNYM_ROOT, AttributeSchema

LEX_FILES = (
    "noun.act",
    "noun.artifact",
    "noun.communication",
    "noun.event",
    "noun.food",
    "noun.location",
    "noun.person",
    "noun.plant",
)

DEFAULT_CLASSES = ("art", "business", "lifestyle", "politics", "technology")

FILLERS = (
    "the", "a", "and", "is", "so", "lol", "omg", "today", "my", "just", "now", "this",
    "really", "why", "with", "for", "on", "in", "new", "what", "cant", "wait", "love",
    "best", "ever", "rt", "haha", "yes", "no", "tonight",
)

_ONSETS = ("b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "ch", "sh", "tr", "pl")
_VOWELS = ("a", "e", "i", "o", "u", "ai", "ou")


class _Namer:
    def __init__(self, rng: random.Random, taken=()):
        self.rng = rng
        self.taken = set(taken)

    def word(self) -> str:
        while True:
            n = self.rng.randint(2, 4)
            w = "".join(self.rng.choice(_ONSETS) + self.rng.choice(_VOWELS) for _ in range(n))
            if w not in self.taken:
                self.taken.add(w)
                return w


def synthetic_lexicon(
    n_roots: int = 60,
    hyponyms: tuple[int, int] = (6, 14),
    n_small: int = 20,
    small_size: tuple[int, int] = (1, 2),
    n_isolated: int = 30,
    n_files: int = 5,
    multiword_rate: float = 0.15,
    seed: int = 0,
) -> dict[str, str]:
    """Lexicographer files holding ``n_roots`` large hypernym trees plus small ones.

    Large trees have between ``hyponyms[0]`` and ``hyponyms[1]`` synsets below
    the root; small trees have ``small_size`` single-word synsets, and isolated
    words have no hypernym at all.
    """
    rng = random.Random(seed)
    namer = _Namer(rng, FILLERS)
    files = {name: [] for name in LEX_FILES[:n_files]}
    names = list(files)

    def lemma():
        if rng.random() < multiword_rate:
            return f"{namer.word()}_{namer.word()}"
        w = namer.word()
        r = rng.random()
        if r < 0.1:
            return w.capitalize()
        if r < 0.2:
            return f"{w}{rng.randint(1, 3)}"
        return w

    def tree(file_name, n_below, max_words):
        root = namer.word()
        lines = [f"{{ {root}, (top concept {root}) }}"]
        nodes = [root]
        for _ in range(n_below):
            parent = rng.choice(nodes)
            words = [lemma() for _ in range(rng.randint(1, max_words))]
            sym = "@i" if rng.random() < 0.2 else "@"
            body = " ".join(f"{w}," for w in words)
            lines.append(f"{{ {body} {parent},{sym} (a kind of {parent}) }}")
            # later synsets may hang below any word of this one
            nodes.append(words[0].rstrip("0123456789").lower())
        files[file_name].extend(lines)

    for i in range(n_roots):
        tree(names[i % len(names)], rng.randint(*hyponyms), 2)
    for i in range(n_small):
        tree(names[i % len(names)], rng.randint(*small_size), 1)
    for i in range(n_isolated):
        w = namer.word()
        files[names[i % len(names)]].append(f"{{ {w}, (a standalone word) }}")

    out = {}
    for name, lines in files.items():
        out[name] = f"( synthetic lexicographer file {name} )\n" + "\n".join(lines) + "\n"
    return out


@dataclass
class SyntheticCorpus:
    tweets: dict[str, list[str]]
    vocab: dict[str, list[str]]
    nohit: set[str] = field(default_factory=set)
    cross_injected: int = 0
    within_dups: int = 0

    @property
    def n_tweets(self):
        return sum(len(v) for v in self.tweets.values())


def class_labels(n_classes: int) -> list[str]:
    if n_classes <= len(DEFAULT_CLASSES):
        return list(DEFAULT_CLASSES[:n_classes])
    return [f"topic{i:02d}" for i in range(n_classes)]


def class_vocabularies(schema: AttributeSchema, labels) -> dict[str, list[str]]:
    """Split hypernym-root attributes round-robin; a lemma belongs to a class if all its attributes do."""
    roots = [i for i, (_, kind) in enumerate(schema.attributes) if kind == HYPERNYM_ROOT]
    if len(roots) < len(labels):
        raise ValueError(f"{len(roots)} hypernym-root attributes cannot cover {len(labels)} classes")
    owner = {idx: labels[k % len(labels)] for k, idx in enumerate(roots)}
    vocab = {c: [] for c in labels}
    for lemma, idxs in schema.word_map.items():
        owners = {owner.get(i) for i in idxs}
        if len(owners) == 1 and None not in owners:
            vocab[owners.pop()].append(lemma)
    return vocab


def synthetic_corpus(
    schema: AttributeSchema,
    n_classes: int = 5,
    tweets_per_class: int = 1000,
    words: tuple[int, int] = (1, 4),
    fillers: tuple[int, int] = (2, 6),
    nohit_rate: float = 0.05,
    within_dup_rate: float = 0.05,
    cross_dup_rate: float = 0.10,
    seed: int = 0,
) -> SyntheticCorpus:
    rng = random.Random(seed)
    labels = class_labels(n_classes)
    vocab = class_vocabularies(schema, labels)
    fill = [w for w in FILLERS if w not in schema.word_map]

    def render(lemma):
        parts = lemma.split("_")
        style = rng.random()
        if style < 0.15:
            parts = [p.upper() for p in parts]
        elif style < 0.3:
            parts = [p.capitalize() for p in parts]
        return " ".join(parts)

    def noise():
        r = rng.random()
        if r < 0.15:
            return f"@{rng.choice(fill)}{rng.randint(1, 999)}"
        if r < 0.25:
            return f"http://t.co/{rng.randrange(16**6):06x}"
        if r < 0.35:
            return f"#{rng.choice(fill)}"
        return rng.choice(fill)

    def tweet(label, hits=True):
        chunks = [noise() for _ in range(rng.randint(*fillers))]
        if hits:
            chunks += [render(rng.choice(vocab[label])) for _ in range(rng.randint(*words))]
        rng.shuffle(chunks)
        text = " ".join(chunks)
        return text + rng.choice(("", "", "!", "?", " :)"))

    corpus = SyntheticCorpus({c: [] for c in labels}, vocab)
    originals = {}
    for label in labels:
        out = []
        for _ in range(tweets_per_class):
            r = rng.random()
            if out and r < within_dup_rate:
                src = rng.choice(out)
                # a different @handle still normalizes to the same text
                copy = src.replace("@", "@x", 1) if "@" in src else src
                if src in corpus.nohit:
                    corpus.nohit.add(copy)
                out.append(copy)
                corpus.within_dups += 1
            elif r < within_dup_rate + nohit_rate:
                t = tweet(label, hits=False)
                corpus.nohit.add(t)
                out.append(t)
            else:
                out.append(tweet(label))
        originals[label] = list(out)
        corpus.tweets[label] = out

    n_inject = int(round(cross_dup_rate * tweets_per_class))
    for label in labels:
        others = [c for c in labels if c != label]
        if not others:
            break
        slots = rng.sample(range(tweets_per_class), n_inject)
        for s in slots:
            src_label = rng.choice(others)
            t = rng.choice(originals[src_label])
            corpus.tweets[label][s] = t
            if t in corpus.nohit:
                continue
            corpus.cross_injected += 1
    # replaced originals may have been the only no-hit copies
    present = {t for ts in corpus.tweets.values() for t in ts}
    corpus.nohit &= present
    return corpus
