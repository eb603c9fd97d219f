"""Stage 3: recursive cross-class duplicate elimination.

Class objects are merged pairwise from both ends of the list inwards (the
middle one sits out when the count is odd). Each merge moves vectors seen under
two labels into the shared duplicate set. A sweep then strips every object's
partitions of the duplicates the other objects have found. Rounds repeat until
one object is left.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import DuplicateClassLabel, OverlappingClassLabels


@dataclass
class ClassObject:
    # label -> {vector: representative record}, insertion-ordered
    partitions: dict[str, dict[tuple, object]]
    duplicates: frozenset = field(default_factory=frozenset)

    @classmethod
    def from_rows(cls, label: str, rows) -> "ClassObject":
        """Build from ``(record, vector)`` rows, keeping the first record per vector."""
        part: dict[tuple, object] = {}
        for rec, vec in rows:
            part.setdefault(tuple(vec), rec)
        return cls({label: part})

    @property
    def labels(self) -> list[str]:
        return list(self.partitions)

    def vector_sets(self) -> dict[str, frozenset]:
        return {label: frozenset(p) for label, p in self.partitions.items()}

    def all_vectors(self) -> set:
        out = set()
        for p in self.partitions.values():
            out.update(p)
        return out

    def n_rows(self) -> int:
        return sum(len(p) for p in self.partitions.values())

    def same_as(self, other: "ClassObject") -> bool:
        return self.vector_sets() == other.vector_sets() and set(self.duplicates) == set(
            other.duplicates
        )


def _without(partitions, drop) -> dict:
    if not drop:
        return {label: dict(p) for label, p in partitions.items()}
    return {label: {v: r for v, r in p.items() if v not in drop} for label, p in partitions.items()}


def remove_inter_class_duplicates(x: ClassObject, y: ClassObject) -> ClassObject:
    """Merge two objects, moving vectors shared between them into the duplicate set."""
    overlap = set(x.partitions) & set(y.partitions)
    if overlap:
        raise OverlappingClassLabels(sorted(overlap))
    xs, ys = x.all_vectors(), y.all_vectors()
    if len(xs) > len(ys):
        xs, ys = ys, xs
    cross = {v for v in xs if v in ys}
    dups = frozenset(x.duplicates | y.duplicates | cross)
    merged = dict(x.partitions)
    merged.update(y.partitions)
    return ClassObject(_without(merged, dups), dups)


def remove_class_duplicates(x: ClassObject, other: ClassObject) -> ClassObject:
    """Drop from ``x`` every vector listed in ``other``'s duplicate set."""
    return ClassObject(_without(x.partitions, other.duplicates), x.duplicates)


def _check_labels(objects):
    seen = set()
    for obj in objects:
        for label in obj.partitions:
            if label in seen:
                raise DuplicateClassLabel(label)
            seen.add(label)


def pair_indices(n: int) -> tuple[list[tuple[int, int]], int | None]:
    """Ends-inward pairs for one round and the pass-through index (odd ``n``)."""
    pairs = [(i, n - 1 - i) for i in range(n // 2)]
    middle = n // 2 if n % 2 else None
    return pairs, middle


def recursive_duplicate_elimination(objects, trace=None) -> ClassObject:
    """Sequential reference implementation.

    ``trace``, if given, collects ``(round, "pair", i, j)`` and
    ``(round, "sweep", i)`` tuples in execution order.
    """
    objects = list(objects)
    if not objects:
        raise ValueError("at least one class object is required")
    _check_labels(objects)
    a = objects
    round_no = 0
    while len(a) > 1:
        pairs, middle = pair_indices(len(a))
        b = []
        for i, j in pairs:
            if trace is not None:
                trace.append((round_no, "pair", i, j))
            b.append(remove_inter_class_duplicates(a[i], a[j]))
        if middle is not None:
            b.append(a[middle])
        c = []
        if len(b) > 1:
            for i, temp in enumerate(b):
                if trace is not None:
                    trace.append((round_no, "sweep", i))
                for j, other in enumerate(b):
                    if i != j:
                        temp = remove_class_duplicates(temp, other)
                c.append(temp)
        else:
            c = b
        a = c
        round_no += 1
    return a[0]


def oracle_dedup(objects) -> ClassObject:
    """Direct definition: keep vectors owned by exactly one class and never marked."""
    objects = list(objects)
    _check_labels(objects)
    owners: dict[tuple, set] = {}
    marked = set()
    for obj in objects:
        marked |= obj.duplicates
        for label, part in obj.partitions.items():
            for v in part:
                owners.setdefault(v, set()).add(label)
    dups = marked | {v for v, labels in owners.items() if len(labels) > 1}
    partitions = {}
    for obj in objects:
        for label, part in obj.partitions.items():
            partitions[label] = {v: r for v, r in part.items() if v not in dups}
    return ClassObject(partitions, frozenset(dups))
