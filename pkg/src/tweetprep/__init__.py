"""Preprocess labeled short-text corpora into deduplicated hypernym-attribute count vectors."""

from .attributes import AttributeSchema, build_schema, query
from .dedup import ClassObject, oracle_dedup, recursive_duplicate_elimination
from .lexparser import build_database, parse_lex_file
from .parallel import parallel_dedup
from .pipeline import normalize_tweet, tokenize

__version__ = "0.1.0"

__all__ = [
    "AttributeSchema",
    "ClassObject",
    "build_database",
    "build_schema",
    "normalize_tweet",
    "oracle_dedup",
    "parallel_dedup",
    "parse_lex_file",
    "query",
    "recursive_duplicate_elimination",
    "tokenize",
]
