"""Walk the noun.person excerpt through parser, graph, schema and query.

    python scripts/excerpt_demo.py [--threshold 5] [tweet ...]
"""

import argparse
from pathlib import Path

from tweetprep.attributes import build_graph, build_schema, collapse_chains, count_hyponyms, query
from tweetprep.lexparser import build_database
from tweetprep.pipeline import normalize_tweet, tokenize

EXCERPT = Path(__file__).resolve().parent.parent / "tests" / "data" / "noun.person"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("tweets", nargs="*", default=["Zeus loves @hera and Hera loves Zeus", "the Dalai Lama!"])
    ap.add_argument("--threshold", type=int, default=5)
    args = ap.parse_args()

    db = build_database([("noun.person", EXCERPT.read_text(encoding="utf-8"))])
    graph = build_graph(db)
    roots = collapse_chains(graph)
    counts = count_hyponyms(roots)
    print(f"{db.n_synsets} synsets, {len(db.lemmas())} lemmas, {len(graph.dangling_roots)} dangling roots")
    for status in ("unresolved", "external"):
        targets = sorted({p.target_lemma for _, p, s in db.dangling if s.value == status})
        print(f"  {status}: {', '.join(targets)}")
    print("\nroots by hyponym count:")
    for root, n in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0])):
        if n:
            print(f"  {n:3d}  {root}")

    schema = build_schema(db, args.threshold)
    print(f"\nschema at threshold {args.threshold}: {schema.names}")
    for tweet in args.tweets:
        tokens = tokenize(normalize_tweet(tweet))
        print(f"  {tweet!r} -> {tokens} -> {list(query(tokens, schema))}")


if __name__ == "__main__":
    main()
