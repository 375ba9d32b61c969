import pytest

from lexiscreen import DataError
from lexiscreen.lexicon import load_default_lexicon, parse_lexicon

SAMPLE = (
    "%\n"
    "1\tpronoun\n"
    "2\tverb\n"
    "3\tsocial\n"
    "%\n"
    "i\t1\n"
    "talk*\t2\t3\n"
    "talking\t2\n"
    "friend*\t3\n"
)


def test_parse_basic():
    lex = parse_lexicon(SAMPLE)
    assert lex.category_names == ("pronoun", "verb", "social")
    assert lex.lookup_names("i") == {"pronoun"}
    assert lex.lookup_names("friends") == {"social"}


def test_exact_beats_wildcard():
    lex = parse_lexicon(SAMPLE)
    # "talking" has an exact entry that shadows the talk* stem; no union
    assert lex.lookup_names("talking") == {"verb"}
    assert lex.lookup_names("talks") == {"verb", "social"}


def test_longest_stem_wins():
    text = "%\n1\ta\n2\tb\n%\nre*\t1\nrepea*\t2\n"
    lex = parse_lexicon(text)
    assert lex.lookup_names("repeat") == {"b"}
    assert lex.lookup_names("return") == {"a"}


def test_stem_does_not_match_shorter_token():
    lex = parse_lexicon(SAMPLE)
    assert lex.lookup("tal") == frozenset()
    assert lex.lookup_names("talk") == {"verb", "social"}


def test_unknown_word_has_no_categories():
    lex = parse_lexicon(SAMPLE)
    assert lex.lookup("zebra") == frozenset()


def test_unknown_category_id_rejected():
    bad = "%\n1\tpronoun\n%\nword\t1\t9\n"
    with pytest.raises(DataError, match="unknown category id 9"):
        parse_lexicon(bad)


def test_missing_header_rejected():
    with pytest.raises(DataError, match="expected '%'"):
        parse_lexicon("word\t1\n")


def test_unterminated_header_rejected():
    with pytest.raises(DataError, match="never closed"):
        parse_lexicon("%\n1\tpronoun\n")


def test_duplicate_category_id_rejected():
    bad = "%\n1\tpronoun\n1\tverb\n%\nword\t1\n"
    with pytest.raises(DataError, match="duplicate category id 1"):
        parse_lexicon(bad)


def test_misplaced_star_rejected():
    bad = "%\n1\tpronoun\n%\nwo*rd\t1\n"
    with pytest.raises(DataError, match="final character"):
        parse_lexicon(bad)


def test_errors_carry_line_numbers():
    bad = "%\n1\tpronoun\n%\nok\t1\nbad\tx\n"
    with pytest.raises(DataError, match="line 5"):
        parse_lexicon(bad)


def test_default_lexicon_shape(default_lexicon):
    names = default_lexicon.category_names
    assert len(names) == 87
    assert names[0] == "pronoun"
    assert "assent" in names
    assert "informal" in names


def test_default_lexicon_planted_words(default_lexicon):
    assert "pronoun" in default_lexicon.lookup_names("he")
    assert "assent" in default_lexicon.lookup_names("yeah")
    # filler terms are informal but not assent, keeping the signals apart
    cats = default_lexicon.lookup_names("um")
    assert "informal" in cats and "assent" not in cats
