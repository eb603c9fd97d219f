from pathlib import Path

import pytest

from tweetprep.attributes import build_schema
from tweetprep.lexparser import build_database

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def excerpt():
    return (DATA / "noun.person").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def excerpt_db(excerpt):
    return build_database([("noun.person", excerpt)])


@pytest.fixture(scope="session")
def excerpt_schema(excerpt_db):
    return build_schema(excerpt_db, 5)


def make_synthetic(root, classes=5, tweets=1000, seed=0, threshold=5):
    from tweetprep.dataio import write_corpus, write_lexicon_dir
    from tweetprep.synthetic import synthetic_corpus, synthetic_lexicon

    lex = synthetic_lexicon(seed=seed)
    write_lexicon_dir(root / "lexicon", lex)
    schema = build_schema(build_database(sorted(lex.items())), threshold)
    corpus = synthetic_corpus(schema, n_classes=classes, tweets_per_class=tweets, cross_dup_rate=0.10, seed=seed)
    write_corpus(root / "corpus", corpus.tweets)
    return schema, corpus


@pytest.fixture(scope="session")
def small_synth(tmp_path_factory):
    root = tmp_path_factory.mktemp("synth")
    schema, corpus = make_synthetic(root, tweets=200)
    return root, schema, corpus


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    return request.config.stash.setdefault(_ACCEPTANCE, [])


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
