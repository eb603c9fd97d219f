"""End-to-end pipeline: lexicon -> schema -> stages 1-3 -> CSV/ARFF -> models."""

from __future__ import annotations

import json
import logging
import random
import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .attributes import build_schema
from .classifiers import (
    LabeledDataset,
    dump_model,
    evaluate,
    predictor,
    train_nb,
    train_random_forest,
)
from .dataio import PipelineConfig, read_corpus, read_lexicon_dir, write_arff, write_csv
from .dedup import ClassObject
from .errors import PipelineError
from .parallel import parallel_dedup
from .pipeline import preprocess

log = logging.getLogger(__name__)

STAGES = ("read", "stage1", "vectorize", "stage2", "collapse", "stage3")


@dataclass
class RunManifest:
    stages: dict[str, dict[str, list[int]]] = field(default_factory=dict)
    totals: dict[str, list[int]] = field(default_factory=dict)
    attributes: dict[str, int] = field(default_factory=dict)
    evaluation: dict[str, dict] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def input_total(self) -> int:
        kept, dropped = self.totals["read"]
        return kept + dropped

    @property
    def final_rows(self) -> int:
        return self.totals["stage3"][0]

    @property
    def discard_fraction(self) -> float:
        return 1 - self.final_rows / self.input_total if self.input_total else 0.0

    def to_json(self, with_timings: bool = True) -> str:
        d = asdict(self)
        d["input_total"] = self.input_total
        d["final_rows"] = self.final_rows
        d["discard_fraction"] = round(self.discard_fraction, 6)
        if not with_timings:
            d.pop("timings")
        return json.dumps(d, indent=2, sort_keys=True) + "\n"


def stratified_split(rows, seed: int, test_fraction: float = 0.2):
    """Per-class shuffled split; both halves keep the input order."""
    rng = random.Random(seed)
    by_label: dict[str, list[int]] = {}
    for i, (_, label) in enumerate(rows):
        by_label.setdefault(label, []).append(i)
    test_idx = set()
    for label in sorted(by_label):
        idx = list(by_label[label])
        rng.shuffle(idx)
        test_idx.update(idx[: int(round(len(idx) * test_fraction))])
    train = [r for i, r in enumerate(rows) if i not in test_idx]
    test = [r for i, r in enumerate(rows) if i in test_idx]
    return train, test


def final_rows(final: ClassObject) -> list[tuple[tuple, str]]:
    """Deduplicated ``(vector, label)`` rows, labels sorted, first-seen order within a label."""
    return [(v, label) for label in sorted(final.partitions) for v in final.partitions[label]]


def run_pipeline(cfg: PipelineConfig) -> RunManifest:
    cfg.validate()
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = RunManifest(config=cfg.echo())

    @contextmanager
    def stage(name):
        start = time.perf_counter()
        try:
            yield
        except Exception as exc:
            raise PipelineError(name, exc) from exc
        manifest.timings[name] = round(time.perf_counter() - start, 6)
        log.info("stage %s done in %.3fs", name, manifest.timings[name])

    with stage("lexicon"):
        db = read_lexicon_dir(cfg.lexicon_dir)
    with stage("schema"):
        schema = build_schema(db, cfg.threshold)
        (out / "schema.tsv").write_text(schema.dumps(), encoding="utf-8")
        manifest.attributes = dict(schema.stats, total=len(schema))
    with stage("corpus"):
        datasets = read_corpus(cfg.corpus_dir)
    with stage("preprocess"):
        datasets = [preprocess(ds, schema) for ds in datasets]
    with stage("dedup"):
        objects = [ClassObject.from_rows(ds.class_label, ds.rows) for ds in datasets]
        final = parallel_dedup(objects, cfg.n_workers, backend=cfg.backend)
        for ds, obj in zip(datasets, objects):
            before = len(ds.rows)
            collapsed = obj.n_rows()
            kept = len(final.partitions[ds.class_label])
            ds.stage_counts["collapse"] = (collapsed, before - collapsed)
            ds.stage_counts["stage3"] = (kept, collapsed - kept)
        manifest.stages = {
            ds.class_label: {s: list(ds.stage_counts[s]) for s in STAGES} for ds in datasets
        }
        manifest.totals = {
            s: [sum(ds.stage_counts[s][0] for ds in datasets), sum(ds.stage_counts[s][1] for ds in datasets)]
            for s in STAGES
        }
    rows = final_rows(final)
    with stage("write"):
        write_csv(rows, schema, out / "deduped.csv")
        manifest.outputs.append("deduped.csv")
        if cfg.arff:
            write_arff(rows, schema, "tweets", out / "deduped.arff")
            manifest.outputs.append("deduped.arff")
    with stage("train"):
        train_rows, test_rows = stratified_split(rows, cfg.seed)
        train = LabeledDataset(len(schema), train_rows)
        labels = train.class_labels
        test = LabeledDataset(len(schema), test_rows, labels)
        forest = train_random_forest(train, cfg.n_trees, cfg.k_features, cfg.seed)
        nb = train_nb(train, 1.0)
        reports = []
        for name, model in (("random_forest", forest), ("naive_bayes", nb)):
            (out / f"model.{name}.txt").write_text(dump_model(model), encoding="utf-8")
            manifest.outputs.append(f"model.{name}.txt")
            entry = {"train_size": len(train), "test_size": len(test)}
            if test.rows:
                rep = evaluate(predictor(model), test, labels)
                entry.update(accuracy=round(rep.accuracy, 6), kappa=round(rep.kappa, 6),
                             confusion=rep.confusion)
                reports.append(f"== {name} (holdout) ==\n{rep.format()}\n")
            manifest.evaluation[name] = entry
        (out / "evaluation.txt").write_text("\n".join(reports), encoding="utf-8")
        manifest.outputs.append("evaluation.txt")
    (out / "manifest.json").write_text(manifest.to_json(), encoding="utf-8")
    return manifest
