"""Command line entry point: ``tweetprep <subcommand> [flags]``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import bench as bench_mod
from .attributes import AttributeSchema, build_schema
from .classifiers import (
    LabeledDataset,
    dump_model,
    evaluate,
    load_model,
    predictor,
    train_nb,
    train_random_forest,
    train_random_tree,
)
from .dataio import (
    CONFIG_KEYS,
    load_config,
    read_corpus,
    read_csv,
    read_lexicon_dir,
    write_arff,
    write_csv,
)
from .dedup import ClassObject
from .errors import ConfigError, DataError, PipelineError
from .parallel import parallel_dedup
from .pipeline import preprocess
from .runner import final_rows, run_pipeline

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _common(p):
    p.add_argument("--config", help="key=value file; command-line flags override it")
    p.add_argument("--lexicon-dir", help="directory of lexicographer files (noun.person, ...)")
    p.add_argument("--corpus-dir", help="directory with one tweet file per class")
    p.add_argument("--threshold", help="minimum hyponym count for a hypernym attribute (default 2500)")
    p.add_argument("--workers", help="stage-3 worker count (default: $TWEETPREP_WORKERS or 2x cores)")
    p.add_argument("--seed", help="random seed (default 0)")
    p.add_argument("--trees", help="random forest size (default 10)")
    p.add_argument("--k-features", help="attributes sampled per tree node (default log2(n)+1)")
    p.add_argument("--out", help="output directory (default ./out)")
    p.add_argument("--arff", action="store_const", const="true", help="also emit ARFF")
    p.add_argument("--backend", choices=("thread", "process"), help="stage-3 worker backend")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="tweetprep", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("build-index", help="build and save the attribute schema")
    _common(p)

    p = sub.add_parser("preprocess", help="normalize, vectorize, stages 1-2 -> preprocessed.csv")
    _common(p)
    p.add_argument("--schema", help="schema.tsv from build-index (else built from --lexicon-dir)")

    p = sub.add_parser("dedup", help="stage 3 on a CSV -> deduped.csv")
    _common(p)
    p.add_argument("--input", help="CSV to deduplicate (default OUT/preprocessed.csv)")

    p = sub.add_parser("train", help="train a model on a CSV")
    _common(p)
    p.add_argument("--input", help="training CSV (default OUT/deduped.csv)")
    p.add_argument("--model-type", choices=("rf", "rt", "nb"), default="rf")

    p = sub.add_parser("evaluate", help="evaluate a saved model on a CSV")
    _common(p)
    p.add_argument("--model", required=True)
    p.add_argument("--input", required=True)

    p = sub.add_parser("run", help="full pipeline")
    _common(p)

    p = sub.add_parser("bench", help="stage-3 speedup benchmark")
    _common(p)
    p.add_argument("--bench-config", help="bench key=value file (speedup target etc.)")
    p.add_argument("--sizes", default="25000,50000,100000")
    p.add_argument("--worker-counts", default="1,2,4")
    p.add_argument("--repeats", type=int)
    p.add_argument("--classes", type=int)
    return parser


def _config(args):
    overrides = {key: getattr(args, key.replace("-", "_"), None) for key in CONFIG_KEYS}
    return load_config(args.config, overrides)


def _schema(args, cfg):
    if getattr(args, "schema", None):
        return AttributeSchema.loads(Path(args.schema).read_text(encoding="utf-8"))
    if cfg.lexicon_dir is None:
        raise ConfigError("--lexicon-dir (or --schema) is required")
    return build_schema(read_lexicon_dir(cfg.lexicon_dir), cfg.threshold)


def cmd_build_index(args, cfg):
    schema = _schema(args, cfg)
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "schema.tsv").write_text(schema.dumps(), encoding="utf-8")
    print(json.dumps(dict(schema.stats, total=len(schema), threshold=cfg.threshold), indent=2))


def cmd_preprocess(args, cfg):
    schema = _schema(args, cfg)
    if cfg.corpus_dir is None:
        raise ConfigError("--corpus-dir is required")
    datasets = [preprocess(ds, schema) for ds in read_corpus(cfg.corpus_dir)]
    rows = [(vec, ds.class_label) for ds in datasets for _, vec in ds.rows]
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(rows, schema, out / "preprocessed.csv")
    counts = {ds.class_label: {k: list(v) for k, v in ds.stage_counts.items()} for ds in datasets}
    (out / "preprocess_counts.json").write_text(json.dumps(counts, indent=2, sort_keys=True) + "\n")
    print(f"{len(rows)} rows -> {out / 'preprocessed.csv'}")


def _csv_objects(path):
    names, rows = read_csv(path)
    by_label: dict[str, list] = {}
    for i, (vec, label) in enumerate(rows):
        by_label.setdefault(label, []).append((i, vec))
    return names, [ClassObject.from_rows(label, r) for label, r in by_label.items()]


def cmd_dedup(args, cfg):
    out = Path(cfg.output_dir)
    src = Path(args.input) if args.input else out / "preprocessed.csv"
    names, objects = _csv_objects(src)
    final = parallel_dedup(objects, cfg.n_workers, backend=cfg.backend)
    rows = final_rows(final)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(rows, names, out / "deduped.csv")
    if cfg.arff:
        write_arff(rows, names, "tweets", out / "deduped.arff")
    n_in = sum(o.n_rows() for o in objects)
    print(f"{n_in} distinct rows in, {len(rows)} out, {len(final.duplicates)} cross-class vectors removed")


def _dataset(path, labels=None):
    names, rows = read_csv(path)
    return LabeledDataset(len(names), rows, labels or [])


def cmd_train(args, cfg):
    out = Path(cfg.output_dir)
    data = _dataset(Path(args.input) if args.input else out / "deduped.csv")
    if args.model_type == "rf":
        model = train_random_forest(data, cfg.n_trees, cfg.k_features, cfg.seed)
    elif args.model_type == "rt":
        model = train_random_tree(data, cfg.k_features, cfg.seed)
    else:
        model = train_nb(data, 1.0)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"model.{args.model_type}.txt"
    path.write_text(dump_model(model), encoding="utf-8")
    report = evaluate(predictor(model), data, model.class_labels)
    print(f"model -> {path}\n== training set ==\n{report.format()}")


def cmd_evaluate(args, cfg):
    model = load_model(Path(args.model).read_text(encoding="utf-8"))
    data = _dataset(args.input, model.class_labels)
    print(evaluate(predictor(model), data, model.class_labels).format())


def cmd_run(args, cfg):
    manifest = run_pipeline(cfg)
    t = manifest.totals
    print(f"tweets read: {manifest.input_total}")
    for stage in ("stage1", "stage2", "collapse", "stage3"):
        print(f"{stage:>9}: kept {t[stage][0]:>7}  dropped {t[stage][1]:>7}")
    print(f"discarded: {100 * manifest.discard_fraction:.1f}% of input tweets")
    for name, ev in manifest.evaluation.items():
        if "accuracy" in ev:
            print(f"{name}: holdout accuracy {ev['accuracy']:.4f}, kappa {ev['kappa']:.4f}")
    print(f"outputs in {cfg.output_dir}")


def cmd_bench(args, cfg):
    bcfg = bench_mod.BenchConfig.from_file(args.bench_config) if args.bench_config else bench_mod.BenchConfig()
    bcfg.seed = cfg.seed
    if args.backend:
        bcfg.backend = args.backend
    if args.repeats:
        bcfg.repeats = args.repeats
    if args.classes:
        bcfg.n_classes = args.classes
    try:
        sizes = [int(s) for s in args.sizes.split(",")]
        workers = [int(w) for w in args.worker_counts.split(",")]
    except ValueError:
        raise ConfigError("--sizes and --worker-counts take comma-separated integers") from None
    report = bench_mod.bench_dedup(bcfg, sizes, workers)
    print(report.format())
    print(f"report -> {bench_mod.write_report(report, cfg.output_dir)}")


COMMANDS = {
    "build-index": cmd_build_index,
    "preprocess": cmd_preprocess,
    "dedup": cmd_dedup,
    "train": cmd_train,
    "evaluate": cmd_evaluate,
    "run": cmd_run,
    "bench": cmd_bench,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = _config(args)
        if cfg.threshold < 1 or (cfg.n_workers is not None and cfg.n_workers < 1):
            raise ConfigError("threshold and workers must be >= 1")
        COMMANDS[args.command](args, cfg)
    except PipelineError as exc:
        print(f"tweetprep: {exc}", file=sys.stderr)
        return EXIT_DATA if isinstance(exc.cause, (DataError, OSError)) else EXIT_INTERNAL
    except (DataError, OSError) as exc:
        print(f"tweetprep: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception as exc:  # noqa: BLE001
        logging.getLogger(__name__).debug("internal error", exc_info=True)
        print(f"tweetprep: internal error: {exc!r}", file=sys.stderr)
        return EXIT_INTERNAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
