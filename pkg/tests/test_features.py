import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lexiscreen import DataError
from lexiscreen import features as F
from lexiscreen.lexicon import parse_lexicon

# ---------------------------------------------------------------- tokenizer


def test_tokenize_sentences():
    ts = F.tokenize("The cat. The cat ran!")
    assert ts.tokens == ("the", "cat", "the", "cat", "ran")
    assert ts.sentence_bounds == (2, 5)
    assert ts.sentence_count == 2


def test_tokenize_internal_apostrophe():
    ts = F.tokenize("It's here")
    assert ts.tokens == ("it's", "here")


def test_tokenize_quote_apostrophes_stripped():
    # leading/trailing apostrophes are quotation, not contraction
    assert F.tokenize("'quoted' words don't split").tokens == (
        "quoted", "words", "don't", "split")


def test_tokenize_curly_apostrophe_normalized():
    assert F.tokenize("it’s fine").tokens == ("it's", "fine")


def test_tokenize_empty_sentences_dropped():
    ts = F.tokenize("Stop... now?!")
    assert ts.tokens == ("stop", "now")
    assert ts.sentence_bounds == (1, 2)


def test_tokenize_trailing_text_closes_sentence():
    ts = F.tokenize("no final period")
    assert ts.sentence_bounds == (3,)


def test_tokenize_numbers_kept():
    assert F.tokenize("saw 3 dogs").tokens == ("saw", "3", "dogs")


def test_tokenize_empty_text():
    ts = F.tokenize("   ...  ")
    assert ts.tokens == ()
    assert ts.sentence_bounds == ()


# ------------------------------------------------------------ pos lexicon


def test_pos_suffix_requires_stem(default_pos):
    assert default_pos.tag("walked") == "verb"
    assert default_pos.tag("bed") is None  # stem would be 1 char
    assert default_pos.tag("quickly") == "adv"


def test_pos_exact_beats_suffix(default_pos):
    # closed-class entries shadow the -ed/-ing fallbacks
    assert default_pos.tag("the") == "det"


def test_pos_proposition_tags(default_pos):
    assert default_pos.is_proposition("and")
    assert default_pos.is_proposition("on")
    assert not default_pos.is_proposition("the")
    assert not default_pos.is_proposition("xyzzy")


def test_pos_conflicting_tags_rejected():
    with pytest.raises(DataError, match="conflicting tags"):
        F.parse_pos_lexicon("run\tverb\nrun\tadj\n")


def test_pos_duplicate_same_tag_tolerated():
    lex = F.parse_pos_lexicon("run\tverb\nrun\tverb\n")
    assert lex.tag("run") == "verb"


def test_pos_unknown_tag_rejected():
    with pytest.raises(DataError, match="unknown tag"):
        F.parse_pos_lexicon("word\tnoun\n")


# ----------------------------------------------------- diversity formulas


def _stream(tokens):
    return F.TokenStream(tokens=tuple(tokens), sentence_bounds=(len(tokens),))


def test_cttr_oracle(default_pos):
    # N=100, V=50: cttr = 50/sqrt(200)
    tokens = [f"w{i}" for i in range(50)] * 2
    div = F.lexical_diversity(_stream(tokens), default_pos)
    assert div.cttr == pytest.approx(3.5355, abs=1e-3)


def test_brunet_oracle(default_pos):
    tokens = [f"w{i}" for i in range(50)] * 2
    div = F.lexical_diversity(_stream(tokens), default_pos)
    assert div.brunet_w == pytest.approx(11.1897, abs=1e-3)


def test_honore_oracle(default_pos):
    # N=10, V=7, V1=5: R = 100 ln(10) / (1 - 5/7)
    tokens = ["a", "a", "a", "b", "b", "c", "d", "e", "f", "g"]
    div = F.lexical_diversity(_stream(tokens), default_pos)
    assert div.honore_r == pytest.approx(805.9048, abs=1e-3)


def test_honore_all_hapax_sentinel(default_pos):
    tokens = ["one", "two", "three"]
    div = F.lexical_diversity(_stream(tokens), default_pos)
    assert math.isinf(div.honore_r)
    resolved = F.resolve_honore(div, _stream(tokens))
    assert resolved == pytest.approx(200.0 * 3 * math.log(3))


def test_resolve_honore_finite_passthrough(default_pos):
    tokens = ["a", "a", "b"]
    div = F.lexical_diversity(_stream(tokens), default_pos)
    assert F.resolve_honore(div, _stream(tokens)) == div.honore_r


def test_duplicate_proportion(default_pos):
    div = F.lexical_diversity(_stream(["the", "the", "cat"]), default_pos)
    assert div.duplicate_proportion == pytest.approx(1.0 / 3.0)


def test_idea_density(default_pos):
    # walked(-ed verb) quickly(-ly adv) and(conj) on(prep) cat(untagged)
    div = F.lexical_diversity(_stream(["walked", "quickly", "and", "on", "cat"]),
                              default_pos)
    assert div.idea_density == pytest.approx(4.0 / 5.0)


def test_diversity_empty_rejected(default_pos):
    with pytest.raises(DataError, match="empty transcript"):
        F.lexical_diversity(_stream([]), default_pos)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from("abcdefgh"), min_size=2, max_size=40))
def test_cttr_self_concat_scales_by_sqrt2(tokens):
    pos = F.parse_pos_lexicon("")
    one = F.lexical_diversity(_stream(tokens), pos)
    two = F.lexical_diversity(_stream(tokens + tokens), pos)
    # doubling N with V fixed divides cttr by sqrt(2)
    assert two.cttr == pytest.approx(one.cttr / math.sqrt(2.0), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(["a", "b", "c", "dd", "ee"]), min_size=1, max_size=30))
def test_honore_infinite_iff_all_hapax(tokens):
    pos = F.parse_pos_lexicon("")
    div = F.lexical_diversity(_stream(tokens), pos)
    from collections import Counter
    all_hapax = all(c == 1 for c in Counter(tokens).values())
    assert math.isinf(div.honore_r) == all_hapax


# ------------------------------------------------------------ categories

TOY_LEX = parse_lexicon(
    "%\n1\tanimal\n2\tverb\n%\ncat\t1\ndog\t1\nran\t2\nrunning\t1\t2\n")


def test_category_percentages_counts():
    prof = F.category_percentages(F.tokenize("the cat ran. the dog sat."), TOY_LEX)
    assert prof.percentages["animal"] == pytest.approx(100.0 * 2 / 6)
    assert prof.percentages["verb"] == pytest.approx(100.0 * 1 / 6)
    assert prof.dictionary_pct == pytest.approx(100.0 * 3 / 6)
    assert prof.word_count == 6
    assert prof.words_per_sentence == pytest.approx(3.0)


def test_category_multilabel_counts_once_per_category():
    prof = F.category_percentages(F.tokenize("running"), TOY_LEX)
    assert prof.percentages["animal"] == 100.0
    assert prof.percentages["verb"] == 100.0
    assert prof.dictionary_pct == 100.0


def test_all_categories_present_even_when_unhit():
    prof = F.category_percentages(F.tokenize("nothing matches here"), TOY_LEX)
    assert prof.percentages == {"animal": 0.0, "verb": 0.0}


def test_six_letter_pct_strictly_longer_than_six():
    prof = F.category_percentages(F.tokenize("lengthy longer short"), TOY_LEX)
    # lengthy(7) yes, longer(6) no, short(5) no
    assert prof.six_letter_pct == pytest.approx(100.0 / 3)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from(["cat", "dog", "ran", "running", "x"]),
                min_size=1, max_size=25))
def test_dictionary_pct_bounds_categories(tokens):
    prof = F.category_percentages(_stream_text(tokens), TOY_LEX)
    top = max(prof.percentages.values())
    assert prof.dictionary_pct >= top - 1e-12
    assert 0.0 <= prof.dictionary_pct <= 100.0


def _stream_text(tokens):
    return F.TokenStream(tokens=tuple(tokens), sentence_bounds=(len(tokens),))


# ---------------------------------------------------------------- schema


def test_default_schema_shape(default_schema):
    assert len(default_schema) == 100
    kinds = default_schema.kinds
    assert kinds.count("diversity") == 5
    assert kinds.count("descriptor") == 4
    assert kinds.count("summary") == 4
    assert kinds.count("category") == 87


def test_default_schema_fingerprint_frozen(default_schema):
    assert default_schema.fingerprint.startswith("8ced9da8df15")
    assert default_schema.fingerprint == F.fingerprint_names(default_schema.names)


def test_schema_index_lookup(default_schema):
    i = default_schema.index_of("cttr")
    assert default_schema.names[i] == "cttr"
    with pytest.raises(DataError):
        default_schema.index_of("no_such_feature")


def test_parse_schema_rejects_bad_kind():
    with pytest.raises(DataError, match="kind"):
        F.parse_schema("foo\tmystery\t\n")


def test_parse_schema_summary_requires_affine():
    with pytest.raises(DataError):
        F.parse_schema("tone\tsummary\t\n")


def test_affine_spec_parse_roundtrip(default_schema):
    spec = default_schema.summaries["tone"]
    assert spec.intercept == 50.0
    assert dict(spec.weights) == {"posemo": 1.0, "negemo": -1.0}
    assert (spec.lo, spec.hi) == (1.0, 99.0)


def test_summary_variables_clamped(default_schema):
    pct = {name: 0.0 for name in default_schema.category_names}
    pct["posemo"] = 80.0
    pct["negemo"] = 0.0
    out = F.summary_variables(pct, default_schema)
    assert out["tone"] == 99.0  # 50 + 80 clamps at hi
    pct["posemo"], pct["negemo"] = 0.0, 80.0
    assert F.summary_variables(pct, default_schema)["tone"] == 1.0


def test_summary_variables_missing_category_warns(default_schema):
    pct = {name: 0.0 for name in default_schema.category_names}
    del pct["posemo"]
    with pytest.warns(UserWarning, match="posemo"):
        out = F.summary_variables(pct, default_schema)
    assert out["tone"] == 50.0


# ------------------------------------------------------------ extraction


def test_extract_assent_and_duplicates(default_lexicon, default_pos, default_schema):
    fv = F.extract_features("yeah yeah yeah .", default_lexicon, default_pos,
                            default_schema, record_id="r1")
    assert fv["assent"] == 100.0
    assert fv["duplicate_proportion"] == pytest.approx(2.0 / 3.0)
    assert fv["word_count"] == 3.0


def test_extract_is_deterministic(default_lexicon, default_pos, default_schema):
    text = "Well he went to the park. He saw, um, a dog running fast!"
    a = F.extract_features(text, default_lexicon, default_pos, default_schema)
    b = F.extract_features(text, default_lexicon, default_pos, default_schema)
    assert np.array_equal(a.values, b.values)
    assert np.isfinite(a.values).all()


def test_extract_empty_transcript_names_record(default_lexicon, default_pos,
                                               default_schema):
    with pytest.raises(DataError, match="'r9'"):
        F.extract_features("...", default_lexicon, default_pos, default_schema,
                           record_id="r9")


def test_feature_vector_length_checked(default_schema):
    with pytest.raises(DataError, match="length"):
        F.FeatureVector(schema=default_schema, values=np.zeros(3))


def test_extract_dataset_skip_bad(default_lexicon, default_pos, default_schema):
    from lexiscreen.corpus import Dataset, TranscriptRecord
    recs = (
        TranscriptRecord(id="a", text="the cat sat down."),
        TranscriptRecord(id="b", text="..."),
        TranscriptRecord(id="c", text="a dog ran by."),
    )
    ds = Dataset(records=recs, name="t")
    with pytest.raises(DataError):
        F.extract_dataset(ds, default_lexicon, default_pos, default_schema)
    ids, matrix, skipped = F.extract_dataset(
        ds, default_lexicon, default_pos, default_schema, skip_bad=True)
    assert ids == ["a", "c"]
    assert matrix.shape == (2, 100)
    assert len(skipped) == 1 and skipped[0][0] == "b"


def test_features_csv_roundtrip(tmp_path, default_lexicon, default_pos,
                                default_schema):
    texts = ["the cat sat on the mat.", "yeah yeah well he went home. it's fine."]
    rows = [F.extract_features(t, default_lexicon, default_pos, default_schema).values
            for t in texts]
    matrix = np.vstack(rows)
    path = tmp_path / "features.csv"
    F.write_features_csv(path, ["r1", "r2"], matrix, default_schema)
    ids, back, names = F.read_features_csv(path)
    assert ids == ["r1", "r2"]
    assert tuple(names) == default_schema.names
    np.testing.assert_allclose(back, matrix, rtol=1e-8)


def test_features_csv_write_is_stable(tmp_path, default_schema):
    rng = np.random.default_rng(5)
    matrix = rng.random((3, 100)) * 100
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    F.write_features_csv(p1, ["x", "y", "z"], matrix, default_schema)
    F.write_features_csv(p2, ["x", "y", "z"], matrix, default_schema)
    assert p1.read_bytes() == p2.read_bytes()


def test_read_features_csv_bad_cell(tmp_path, default_schema):
    path = tmp_path / "bad.csv"
    header = "id," + ",".join(default_schema.names)
    row = "r1," + ",".join(["1.0"] * 99 + ["oops"])
    path.write_text(header + "\n" + row + "\n")
    with pytest.raises(DataError, match="line 2"):
        F.read_features_csv(path)
