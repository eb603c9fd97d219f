import pytest
from hypothesis import given, strategies as st

from tweetprep.errors import DuplicateFileName, EmptyFile, MalformedSynset
from tweetprep.lexparser import (
    PointerSymbol,
    Resolution,
    build_database,
    format_synset,
    normalize_lemma,
    parse_lex_file,
)


def test_excerpt_parses_to_21_synsets(excerpt):
    synsets = parse_lex_file(excerpt, "noun.person")
    assert len(synsets) == 21
    assert excerpt.count("\n{") + excerpt.startswith("{") == 21
    assert all(s.source_file == "noun.person" and s.lemmas for s in synsets)


def test_zeus_has_one_instance_hypernym(excerpt):
    zeus = next(s for s in parse_lex_file(excerpt, "noun.person") if "zeus" in s.lemmas)
    hyper = [p for p in zeus.pointers if p.symbol in (PointerSymbol.HYPERNYM, PointerSymbol.INSTANCE_HYPERNYM)]
    assert len(hyper) == 1
    assert hyper[0].symbol is PointerSymbol.INSTANCE_HYPERNYM
    assert hyper[0].target_lemma == "greek_deity"
    assert zeus.gloss.startswith("(Greek mythology) the supreme god of ancient")


def test_cross_file_pointer():
    (s,) = parse_lex_file("{ self, noun.Tops:person,@ (a person ...) }", "noun.person")
    assert s.lemmas == ("self",)
    (p,) = s.pointers
    assert (p.target_lemma, p.target_file, p.symbol) == ("person", "noun.Tops", PointerSymbol.HYPERNYM)
    assert s.gloss == "a person ..."


def test_bracket_groups_and_satellites(excerpt):
    synsets = parse_lex_file(excerpt, "noun.person")
    deity = next(s for s in synsets if s.lemmas[0] == "deity")
    assert deity.lemmas == ("deity", "divinity", "god", "immortal")
    assert deity.raw_lemmas[2] == "god1"
    grouped = [p for p in deity.pointers if p.source_lemma is not None]
    assert [(p.target_file, p.target_lemma, p.source_lemma, p.symbol) for p in grouped] == [
        ("verb.cognition", "deify", "deity", PointerSymbol.DERIVATION),
        # adjective-cluster reference: kept, but not modeled
        ("adj.all", "heavenly", "divinity", PointerSymbol.OTHER),
    ]
    assert grouped[1].satellite == "divine2"
    assert grouped[1].symbol_text == "+"
    member = [p for p in deity.pointers if p.symbol is PointerSymbol.MEMBER_HOLONYM]
    assert [(p.target_file, p.target_lemma) for p in member] == [("noun.group", "pantheon")]


def test_unknown_symbol_kept_verbatim():
    (s,) = parse_lex_file("{ a, b,~ c,%p (g) }", "noun.x")
    assert [(p.symbol, p.symbol_text) for p in s.pointers] == [
        (PointerSymbol.OTHER, "~"),
        (PointerSymbol.OTHER, "%p"),
    ]


def test_multiline_synset_and_comments():
    text = "( file comment )\n{ alpha,\n   beta,@\n (spans\n lines) }\n"
    (s,) = parse_lex_file(text, "noun.x")
    assert s.lemmas == ("alpha",)
    assert s.pointers[0].target_lemma == "beta"
    assert s.gloss == "spans\n lines"


@pytest.mark.parametrize("text", ["", "   \n", "( only a comment )"])
def test_empty_file(text):
    with pytest.raises(EmptyFile):
        parse_lex_file(text, "noun.x")


@pytest.mark.parametrize(
    "text, offset",
    [
        ("{ a, b,@ ", 9),
        ("{ a, (unclosed gloss }", 22),
        ("{ [a, b,+ }", 2),
        ("{ a, b,@ } }", 11),
    ],
)
def test_malformed_reports_offset(text, offset):
    with pytest.raises(MalformedSynset) as info:
        parse_lex_file(text, "noun.x")
    assert info.value.offset == offset
    assert "noun.x" in str(info.value)


def test_offset_is_in_bytes():
    with pytest.raises(MalformedSynset) as info:
        parse_lex_file("{ café, b,@ ", "noun.x")
    assert info.value.offset == len("{ café, b,@ ".encode())


@pytest.mark.parametrize(
    "raw, norm",
    [
        ("dame1", "dame"),
        ("Otto_I", "otto_i"),
        ("bounty_hunter1", "bounty_hunter"),
        ("paper-pusher", "paper-pusher"),
        ("B12_vitamin3", "b12_vitamin"),
        ("42", "42"),
    ],
)
def test_normalize_lemma(raw, norm):
    assert normalize_lemma(raw) == norm


def test_round_trip_excerpt(excerpt):
    for s in parse_lex_file(excerpt, "noun.person"):
        (again,) = parse_lex_file(format_synset(s), "noun.person")
        assert again.normalized() == s.normalized()


def test_parse_is_deterministic(excerpt):
    assert parse_lex_file(excerpt, "noun.person") == parse_lex_file(excerpt, "noun.person")


def test_database_counts_and_resolution(excerpt_db):
    assert excerpt_db.file_names == ["noun.person"]
    assert excerpt_db.n_synsets == 21
    assert ("zeus", "noun.person") in excerpt_db.lemma_index
    by_target = {p.target_lemma: status for _, p, status in excerpt_db.dangling}
    # never a member word in the excerpt, although its file is loaded
    assert by_target["supernatural_being"] is Resolution.UNRESOLVED
    assert by_target["pantheon"] is Resolution.EXTERNAL
    assert "greek_deity" not in by_target


def test_every_synset_indexed(excerpt_db):
    indexed = {i for ids in excerpt_db.lemma_index.values() for i in ids}
    assert indexed == set(range(excerpt_db.n_synsets))


def test_duplicate_file_name(excerpt):
    with pytest.raises(DuplicateFileName):
        build_database([("noun.person", excerpt), ("noun.person", excerpt)])


def test_malformed_carries_file_name():
    with pytest.raises(MalformedSynset) as info:
        build_database([("noun.a", "{ x, (g) }"), ("noun.b", "{ y,")])
    assert info.value.file_name == "noun.b"


def test_synset_count_sums_over_files(excerpt):
    db = build_database([("noun.person", excerpt), ("noun.extra", "{ a, (g) }\n{ b, a,@ (h) }")])
    assert db.n_synsets == 23
    assert db.files_of("a") == ["noun.extra"]


_word = st.from_regex(r"[a-z][a-z_]{0,6}[a-z]", fullmatch=True)


@given(
    lemmas=st.lists(_word, min_size=1, max_size=4),
    targets=st.lists(st.tuples(st.sampled_from(["", "noun.tops:"]), _word, st.sampled_from(["@", "@i", "#m", ";c"])), max_size=3),
    gloss=st.from_regex(r"[a-z ;,.'\"]{0,30}", fullmatch=True),
)
def test_round_trip_generated(lemmas, targets, gloss):
    body = " ".join(f"{w}," for w in lemmas)
    ptrs = " ".join(f"{f}{t},{sym}" for f, t, sym in targets)
    (s,) = parse_lex_file(f"{{ {body} {ptrs} ({gloss}) }}", "noun.x")
    (again,) = parse_lex_file(format_synset(s), "noun.x")
    assert again.normalized() == s.normalized()
    assert list(s.lemmas) == lemmas
