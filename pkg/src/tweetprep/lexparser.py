"""Parser for WordNet lexicographer source files (``noun.person`` and friends).

A file is a sequence of brace-delimited synsets::

    { Zeus, Greek_deity,@i noun.group:Greek_mythology,:c (the supreme god ...) }

Inside a synset, word entries end with a comma, pointer entries are
``[file:]lemma,SYMBOL`` and an optional parenthesized gloss closes the synset.
Bracketed groups ``[ word, file:target,+ ]`` attach lexical pointers to one word.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from .errors import DuplicateFileName, EmptyFile, MalformedSynset


class PointerSymbol(str, enum.Enum):
    HYPERNYM = "@"
    INSTANCE_HYPERNYM = "@i"
    DOMAIN_CATEGORY = ":c"
    MEMBER_HOLONYM = "#m"
    DERIVATION = "+"
    OTHER = "other"


_SYMBOLS = {
    "@": PointerSymbol.HYPERNYM,
    "@i": PointerSymbol.INSTANCE_HYPERNYM,
    ":c": PointerSymbol.DOMAIN_CATEGORY,
    ";c": PointerSymbol.DOMAIN_CATEGORY,
    "#m": PointerSymbol.MEMBER_HOLONYM,
    "+": PointerSymbol.DERIVATION,
}

HYPERNYM_SYMBOLS = frozenset({PointerSymbol.HYPERNYM, PointerSymbol.INSTANCE_HYPERNYM})


@dataclass(frozen=True)
class RawPointer:
    target_lemma: str
    target_file: str | None
    symbol: PointerSymbol
    # verbatim symbol text, e.g. "@i" or "=" for symbols we do not model
    symbol_text: str
    # adjective-cluster marker after "^", e.g. "divine2" in "heavenly^divine2"
    satellite: str | None = None
    # head word of the bracketed group carrying this pointer, None at synset level
    source_lemma: str | None = None


@dataclass(frozen=True)
class Synset:
    source_file: str
    lemmas: tuple[str, ...]
    raw_lemmas: tuple[str, ...]
    pointers: tuple[RawPointer, ...]
    gloss: str = ""

    def normalized(self):
        """Structural key ignoring raw token spelling."""
        return (self.source_file, self.lemmas, self.pointers, self.gloss)


_SENSE_DIGITS = re.compile(r"\d+$")
_ADJ_MARKER = re.compile(r"\((?:a|p|ip)\)$")
_FRAME_NUM = re.compile(r"\d+,?$")
# a structural character, or a token that does not start with "(".
_LEX = re.compile(r"\s*(?:([{}\[\]()])|([^\s{}\[\]()][^\s{}\[\]]*))")


def normalize_lemma(raw: str) -> str:
    """Drop a trailing sense number and case-fold: ``"dame1" -> "dame"``."""
    stripped = _SENSE_DIGITS.sub("", raw)
    return (stripped or raw).lower()


class _Scanner:
    def __init__(self, content: str, file_name: str):
        self.content = content
        self.file_name = file_name
        self.pos = 0

    def error(self, message, pos=None):
        pos = len(self.content) if pos is None else pos
        offset = len(self.content[:pos].encode("utf-8"))
        raise MalformedSynset(message, offset, self.file_name)

    def next(self):
        """Return (start, structural_char, token) or None at end of input."""
        m = _LEX.match(self.content, self.pos)
        if m is None or m.end() == m.start() or (m.group(1) is None and m.group(2) is None):
            rest = self.content[self.pos:]
            if rest.strip():
                self.error("unrecognized text", self.pos + len(rest) - len(rest.lstrip()))
            self.pos = len(self.content)
            return None
        self.pos = m.end()
        start = m.start(1) if m.group(1) is not None else m.start(2)
        return start, m.group(1), m.group(2)

    def balanced(self, open_pos):
        """Consume a parenthesized run starting at ``open_pos``; return its inner text."""
        depth = 0
        text = self.content
        i = open_pos
        n = len(text)
        while i < n:
            c = text[i]
            if c == "(":
                depth += 1
            elif c == ")":
                depth -= 1
                if depth == 0:
                    self.pos = i + 1
                    return text[open_pos + 1 : i]
            i += 1
        self.error("unbalanced '('", None)


def _parse_pointer(scanner, start, head, sym, group_head):
    target_file = None
    if ":" in head:
        target_file, head = head.split(":", 1)
    satellite = None
    if "^" in head:
        head, satellite = head.split("^", 1)
    if not head:
        scanner.error("pointer without target lemma", start)
    symbol = _SYMBOLS.get(sym, PointerSymbol.OTHER)
    if satellite is not None:
        symbol = PointerSymbol.OTHER
    return RawPointer(
        target_lemma=normalize_lemma(head),
        target_file=target_file or None,
        symbol=symbol,
        symbol_text=sym,
        satellite=satellite,
        source_lemma=group_head,
    )


def _parse_synset(scanner: _Scanner, open_pos: int) -> Synset:
    lemmas, raw_lemmas, pointers = [], [], []
    gloss = None
    in_group = False
    group_head = None
    group_pos = None
    skipping_frames = False
    while True:
        item = scanner.next()
        if item is None:
            scanner.error("unterminated synset (missing '}')", None)
        start, struct, token = item
        if token is not None and skipping_frames and _FRAME_NUM.match(token):
            continue
        skipping_frames = False
        if struct == "}":
            if in_group:
                scanner.error("unclosed '['", group_pos)
            break
        if struct == "{":
            scanner.error("nested '{'", start)
        if struct == "[":
            if in_group:
                scanner.error("nested '['", start)
            in_group, group_head, group_pos = True, None, start
            continue
        if struct == "]":
            if not in_group:
                scanner.error("unmatched ']'", start)
            if group_head is None:
                scanner.error("word group without a word", group_pos)
            in_group = False
            group_head = None
            continue
        if struct == "(":
            if in_group:
                scanner.error("gloss inside word group", start)
            if gloss is not None:
                scanner.error("second gloss", start)
            gloss = scanner.balanced(start).strip()
            continue
        if struct == ")":
            scanner.error("unmatched ')'", start)

        if gloss is not None:
            scanner.error("text after gloss", start)
        if token == "frames:":
            skipping_frames = True
            continue
        if "," not in token:
            scanner.error(f"expected ',' after {token!r}", start)
        head, sym = token.rsplit(",", 1)
        if sym == "":
            word = _ADJ_MARKER.sub("", head)
            if not word:
                scanner.error("empty word", start)
            if in_group:
                if group_head is not None:
                    scanner.error("second word in group", start)
                group_head = normalize_lemma(word)
            lemmas.append(normalize_lemma(word))
            raw_lemmas.append(head)
        else:
            if in_group and group_head is None:
                scanner.error("pointer before word in group", start)
            pointers.append(_parse_pointer(scanner, start, head, sym, group_head))

    if not lemmas:
        scanner.error("synset has no words", open_pos)
    return Synset(
        source_file=scanner.file_name,
        lemmas=tuple(lemmas),
        raw_lemmas=tuple(raw_lemmas),
        pointers=tuple(pointers),
        gloss=gloss or "",
    )


def parse_lex_file(content: str, file_name: str) -> list[Synset]:
    """Parse one lexicographer file into synsets, in file order.

    Top-level parenthesized comments are skipped, as are the ``[``, ``]`` and
    ``----`` markers that wrap adjective clusters.
    """
    if not file_name:
        raise ValueError("file_name must be non-empty")
    scanner = _Scanner(content, file_name)
    synsets = []
    while True:
        item = scanner.next()
        if item is None:
            break
        start, struct, token = item
        if struct == "{":
            synsets.append(_parse_synset(scanner, start))
        elif struct == "(":
            scanner.balanced(start)
        elif struct in ("[", "]"):
            continue
        elif token is not None and set(token) == {"-"}:
            continue
        else:
            scanner.error(f"unexpected {struct or token!r} outside synset", start)
    if not synsets:
        raise EmptyFile(f"{file_name}: no synsets found")
    return synsets


def format_pointer(p: RawPointer) -> str:
    target = p.target_lemma
    if p.satellite is not None:
        target = f"{target}^{p.satellite}"
    if p.target_file:
        target = f"{p.target_file}:{target}"
    return f"{target},{p.symbol_text}"


def format_synset(s: Synset) -> str:
    """Render ``s`` back to lexicographer syntax, using normalized lemmas."""
    grouped: dict[str, list[RawPointer]] = {}
    for p in s.pointers:
        if p.source_lemma is not None:
            grouped.setdefault(p.source_lemma, []).append(p)
    parts = []
    emitted = set()
    for lemma in s.lemmas:
        ptrs = grouped.get(lemma)
        if ptrs and lemma not in emitted:
            emitted.add(lemma)
            parts.append("[ " + " ".join([f"{lemma},"] + [format_pointer(p) for p in ptrs]) + " ]")
        else:
            parts.append(f"{lemma},")
    parts.extend(format_pointer(p) for p in s.pointers if p.source_lemma is None)
    if s.gloss:
        parts.append(f"({s.gloss})")
    return "{ " + " ".join(parts) + " }"


class Resolution(str, enum.Enum):
    RESOLVED = "resolved"
    # target file loaded but no synset there has the lemma
    UNRESOLVED = "unresolved"
    # target file not loaded
    EXTERNAL = "external"


@dataclass
class LexDatabase:
    files: dict[str, list[Synset]]
    lemma_index: dict[tuple[str, str], list[int]]
    file_names: list[str]
    dangling: list[tuple[str, RawPointer, Resolution]] = field(default_factory=list)

    def synsets(self):
        for name in self.file_names:
            yield from self.files[name]

    def lemmas(self) -> set[str]:
        return {lemma for lemma, _ in self.lemma_index}

    def files_of(self, lemma: str) -> list[str]:
        return [f for f in self.file_names if (lemma, f) in self.lemma_index]

    def resolve(self, pointer: RawPointer, from_file: str) -> Resolution:
        target_file = pointer.target_file or from_file
        if target_file not in self.files:
            return Resolution.EXTERNAL
        if (pointer.target_lemma, target_file) in self.lemma_index:
            return Resolution.RESOLVED
        return Resolution.UNRESOLVED

    @property
    def n_synsets(self) -> int:
        return sum(len(v) for v in self.files.values())


def build_database(files) -> LexDatabase:
    """Parse ``[(file_name, content), ...]`` into a :class:`LexDatabase`.

    Pointer targets that cannot be resolved are kept and listed in
    ``db.dangling`` rather than rejected.
    """
    files = list(files)
    if not files:
        raise ValueError("at least one lexicographer file is required")
    parsed: dict[str, list[Synset]] = {}
    order = []
    for name, content in files:
        if name in parsed:
            raise DuplicateFileName(name)
        parsed[name] = parse_lex_file(content, name)
        order.append(name)

    index: dict[tuple[str, str], list[int]] = {}
    for name in order:
        for i, syn in enumerate(parsed[name]):
            for lemma in dict.fromkeys(syn.lemmas):
                index.setdefault((lemma, name), []).append(i)

    db = LexDatabase(files=parsed, lemma_index=index, file_names=order)
    for name in order:
        for syn in parsed[name]:
            for p in syn.pointers:
                status = db.resolve(p, name)
                if status is not Resolution.RESOLVED:
                    db.dangling.append((name, p, status))
    return db
