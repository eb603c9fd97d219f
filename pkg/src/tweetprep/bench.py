"""Stage-3 speedup benchmark on a synthetic corpus."""

from __future__ import annotations

import json
import os
import statistics
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .attributes import build_schema
from .dataio import read_key_values
from .dedup import ClassObject, recursive_duplicate_elimination
from .lexparser import build_database
from .parallel import parallel_dedup
from .pipeline import ClassDataset, preprocess
from .synthetic import synthetic_corpus, synthetic_lexicon

# processing 307,000 tweets into 17,861 rows: sequential vs 4 threads, in minutes
REFERENCE_SEQUENTIAL_MIN = 421
REFERENCE_THREADED_MIN = 259
REFERENCE_TWEETS = 307_000
REFERENCE_ROWS = 17_861


@dataclass
class BenchConfig:
    seed: int = 0
    n_classes: int = 16
    repeats: int = 3
    backend: str = "process"
    cross_dup_rate: float = 0.10
    words_per_tweet: tuple[int, int] = (3, 8)
    speedup_target: float = 1.3
    min_cores: int = 4
    min_rows: int = 100_000

    @classmethod
    def from_file(cls, path) -> "BenchConfig":
        cfg = cls()
        for key, value in read_key_values(path).items():
            name = key.replace("-", "_")
            current = getattr(cfg, name)
            if isinstance(current, tuple):
                value = tuple(int(x) for x in value.split(","))
            elif isinstance(current, bool):
                value = value.lower() in ("1", "true", "yes")
            else:
                value = type(current)(value)
            setattr(cfg, name, value)
        return cfg


@dataclass
class BenchCell:
    size: int
    workers: int
    rows_in: int
    rows_out: int
    times: list[float]

    @property
    def median(self) -> float:
        return statistics.median(self.times)


@dataclass
class BenchReport:
    backend: str
    cpu_count: int
    cells: list[BenchCell] = field(default_factory=list)
    sequential: dict[int, float] = field(default_factory=dict)

    def cell(self, size, workers) -> BenchCell:
        return next(c for c in self.cells if c.size == size and c.workers == workers)

    def speedup(self, size, workers) -> float:
        return self.cell(size, 1).median / self.cell(size, workers).median

    def monotone_in_size(self, tolerance: float = 0.25) -> bool:
        """Soft check: a larger input never runs faster by more than ``tolerance``."""
        for w in {c.workers for c in self.cells}:
            cells = sorted((c for c in self.cells if c.workers == w), key=lambda c: c.size)
            for a, b in zip(cells, cells[1:]):
                if b.median < a.median * (1 - tolerance):
                    return False
        return True

    def format(self) -> str:
        lines = [
            f"stage-3 dedup benchmark  backend={self.backend}  cpus={self.cpu_count}",
            f"{'tweets':>9} {'workers':>7} {'rows in':>8} {'rows out':>8} {'median s':>9} {'speedup':>8}",
        ]
        for c in sorted(self.cells, key=lambda c: (c.size, c.workers)):
            sp = self.speedup(c.size, c.workers) if any(
                x.size == c.size and x.workers == 1 for x in self.cells) else float("nan")
            lines.append(
                f"{c.size:>9} {c.workers:>7} {c.rows_in:>8} {c.rows_out:>8} {c.median:>9.4f} {sp:>7.2f}x"
            )
        for size, t in sorted(self.sequential.items()):
            lines.append(f"{size:>9} {'seq':>7} {'':>8} {'':>8} {t:>9.4f}   (reference engine)")
        lines.append(reference_run())
        return "\n".join(lines)

    def to_json(self) -> str:
        d = asdict(self)
        d["speedups"] = {
            f"{c.size}/{c.workers}": round(self.speedup(c.size, c.workers), 4)
            for c in self.cells
            if any(x.size == c.size and x.workers == 1 for x in self.cells)
        }
        return json.dumps(d, indent=2, sort_keys=True) + "\n"


def reference_run() -> str:
    reduction = 1 - REFERENCE_THREADED_MIN / REFERENCE_SEQUENTIAL_MIN
    return (
        f"reference run: {REFERENCE_TWEETS:,} tweets -> {REFERENCE_ROWS:,} rows; "
        f"{REFERENCE_SEQUENTIAL_MIN} min sequential vs {REFERENCE_THREADED_MIN} min with 4 threads "
        f"= {100 * reduction:.2f}% less time ({REFERENCE_SEQUENTIAL_MIN / REFERENCE_THREADED_MIN:.2f}x)"
    )


def bench_objects(size: int, cfg: BenchConfig) -> list[ClassObject]:
    """Synthetic corpus of about ``size`` tweets, run through stages 1-2 (untimed)."""
    lex = synthetic_lexicon(
        n_roots=cfg.n_classes * 24, hyponyms=(8, 16), n_small=cfg.n_classes * 4,
        n_isolated=cfg.n_classes * 4, n_files=8, seed=cfg.seed,
    )
    schema = build_schema(build_database(sorted(lex.items())), 5)
    corpus = synthetic_corpus(
        schema, n_classes=cfg.n_classes, tweets_per_class=max(1, size // cfg.n_classes),
        words=cfg.words_per_tweet, cross_dup_rate=cfg.cross_dup_rate, seed=cfg.seed + size,
    )
    objects = []
    for label, tweets in corpus.tweets.items():
        ds = preprocess(ClassDataset.from_lines(label, tweets), schema)
        objects.append(ClassObject.from_rows(label, ds.rows))
    return objects


def bench_dedup(cfg: BenchConfig, sizes, worker_counts, include_sequential: bool = True) -> BenchReport:
    worker_counts = sorted(set(worker_counts) | {1})
    report = BenchReport(cfg.backend, os.cpu_count() or 1)
    for size in sizes:
        objects = bench_objects(size, cfg)
        rows_in = sum(o.n_rows() for o in objects)
        for w in worker_counts:
            times, result = [], None
            for _ in range(cfg.repeats):
                start = time.perf_counter()
                result = parallel_dedup(objects, w, backend=cfg.backend)
                times.append(time.perf_counter() - start)
            report.cells.append(BenchCell(size, w, rows_in, result.n_rows(), times))
        if include_sequential:
            times = []
            for _ in range(cfg.repeats):
                start = time.perf_counter()
                recursive_duplicate_elimination(objects)
                times.append(time.perf_counter() - start)
            report.sequential[size] = statistics.median(times)
    return report


def write_report(report: BenchReport, out_dir) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "bench.txt").write_text(report.format() + "\n", encoding="utf-8")
    path = out / "bench.json"
    path.write_text(report.to_json(), encoding="utf-8")
    return path
