"""Write a synthetic lexicon and a labeled tweet corpus to disk.

    python scripts/make_synthetic.py data/synth --classes 5 --tweets 1000
"""

import argparse
from pathlib import Path

from tweetprep.attributes import build_schema
from tweetprep.dataio import write_corpus, write_lexicon_dir
from tweetprep.lexparser import build_database
from tweetprep.synthetic import synthetic_corpus, synthetic_lexicon


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out", type=Path)
    ap.add_argument("--classes", type=int, default=5)
    ap.add_argument("--tweets", type=int, default=1000, help="tweets per class")
    ap.add_argument("--roots", type=int, default=60)
    ap.add_argument("--threshold", type=int, default=5)
    ap.add_argument("--cross-dup-rate", type=float, default=0.10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    lex = synthetic_lexicon(n_roots=args.roots, seed=args.seed)
    write_lexicon_dir(args.out / "lexicon", lex)
    schema = build_schema(build_database(sorted(lex.items())), args.threshold)
    corpus = synthetic_corpus(
        schema, n_classes=args.classes, tweets_per_class=args.tweets,
        cross_dup_rate=args.cross_dup_rate, seed=args.seed,
    )
    write_corpus(args.out / "corpus", corpus.tweets)
    print(
        f"lexicon: {len(lex)} files, {schema.stats['lemmas']} lemmas, "
        f"{len(schema)} attributes at threshold {args.threshold}\n"
        f"corpus: {corpus.n_tweets} tweets in {args.classes} classes, "
        f"{corpus.cross_injected} cross-class copies injected\n"
        f"-> {args.out}"
    )


if __name__ == "__main__":
    main()
