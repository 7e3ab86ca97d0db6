import random
from dataclasses import replace
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from backends.classifiers import POLARITY_WORDS, SP_FEATURE_ORDER, PolarityVector, sp_vector
from conftest import read_fixture_json, synthetic_issue
from features.keywords import KEYWORD_NAMES, keyword_dict, keyword_flags
from features.pair_features import (
    PAIR_VECTOR_NAMES,
    CrossIssue,
    SameSentence,
    extract_pair_features,
    pair_vector,
    token_jaccard,
)
from features.sentence_features import (
    DIMENSIONS,
    FEATURE_COUNT,
    FEATURE_NAMES,
    SentenceFeatureExtractor,
    UnknownSentence,
    mask_dimension,
)
from features.sentiment import NEUTRAL, MissingLexicon, SentimentScorer, load_lexicon, sentiment_scores
from ingestion.issue_segmenter import IssueSegmenter

# =========================
# Sentiment
# =========================

COMPOUND_CASES = [
    ("This is great!", 0.6589),
    ("This is terrible.", -0.4767),
    ("VADER is smart, handsome, and funny.", 0.8316),
    ("VADER is smart, handsome, and funny!", 0.8439),
    ("VADER is very smart, handsome, and funny.", 0.8545),
    ("VADER is VERY SMART, handsome, and FUNNY.", 0.9227),
    ("VADER is VERY SMART, handsome, and FUNNY!!!", 0.9342),
    ("VADER is not smart, handsome, nor funny.", -0.7424),
    ("The book was good.", 0.4404),
    ("At least it isn't a horrible book.", 0.431),
    ("The book was only kind of good.", 0.3832),
    ("Today SUX!", -0.5461),
    ("Today only kinda sux! But I'll get by, lol", 0.5249),
    ("Not bad at all", 0.431),
    ("The plot was good, but the characters are uncompelling and the dialog is not great.", -0.7042),
    ("I love this approach.", 0.6369),
    ("I hate this bug.", -0.5719),
    ("This is not good.", -0.3412),
    ("Thanks!", 0.4926),
    ("The cat sat on the mat.", 0.0),
]


@pytest.mark.parametrize("sentence, compound", COMPOUND_CASES)
def test_compound_matches_reference(sentence, compound):
    assert sentiment_scores(sentence).compound == pytest.approx(compound, abs=0.05)


def test_positive_share():
    scores = sentiment_scores("This is great!")
    assert scores.pos == pytest.approx(0.687, abs=0.05)
    assert scores.neg == 0.0


def test_neutral_sentence():
    assert sentiment_scores("The cat sat on the mat.") == NEUTRAL
    assert sentiment_scores("") == NEUTRAL


SENTIMENT_WORDS = [
    "good", "great", "bad", "terrible", "elegant", "robust", "ugly", "broken", "fail", "love",
    "hate", "thanks", "no", "not", "never", "isn't", "very", "extremely", "slightly", "kind",
    "of", "but", "least", "at", "the", "cache", "patch", "we", "should", "GREAT", "BAD", "!", "?",
]


@given(st.lists(st.sampled_from(SENTIMENT_WORDS), max_size=25))
def test_shares_sum_to_one(words):
    scores = sentiment_scores(" ".join(words))
    assert scores.pos + scores.neu + scores.neg == pytest.approx(1.0, abs=1e-6)
    assert -1.0 <= scores.compound <= 1.0


def test_default_lexicon_is_the_published_one():
    assert len(load_lexicon()) > 7000
    assert load_lexicon()["elegant"] > 0


@pytest.mark.parametrize(
    "sentence, positive",
    [
        ("This design is elegant and robust.", True),
        ("Great idea, thanks for fixing this!", True),
        ("This is a terrible workaround.", False),
        ("The build is broken and the tests fail.", False),
    ],
)
def test_issue_sentences_have_polarity(sentence, positive):
    compound = sentiment_scores(sentence).compound
    if positive:
        assert compound > 0.3
    else:
        assert compound < -0.3


def test_missing_lexicon(tmp_path):
    with pytest.raises(MissingLexicon):
        SentimentScorer(str(tmp_path / "nope.txt"))


def test_custom_lexicon(tmp_path):
    path = tmp_path / "lexicon.txt"
    path.write_text("# comentario\nshiny\t2.0\t0.5\t[2, 2]\n", encoding="utf-8")
    assert sentiment_scores("A shiny api", str(path)).compound > 0
    assert sentiment_scores("A great api", str(path)).compound == 0.0


# =========================
# Keywords
# =========================

def test_keyword_names():
    assert len(KEYWORD_NAMES) == 14


@pytest.mark.parametrize(
    "sentence, expected",
    [
        ("Why should we use direct buffers?", {"why", "modal_should_shall", "qmark"}),
        ("Thanks, but then it can fail!", {"greeting", "transitional", "causal", "modal_can_could", "bang"}),
        ("Whatever the showcase does, however, is fine.", {"transitional"}),
        ("SHALL we? Maybe it MIGHT work.", {"modal_should_shall", "qmark", "modal_may_might"}),
        ("Which one and who decides when?", {"which", "who", "when", "qmark"}),
        ("Plain statement.", set()),
    ],
)
def test_keyword_cases(sentence, expected):
    flags = keyword_dict(sentence)
    assert {name for name, on in flags.items() if on} == expected


ASCII_TEXT = st.text(alphabet=st.sampled_from(list("abcdefghijklmnopqrstuvwxyzWHY ?!.,'")), max_size=80)


@given(ASCII_TEXT)
def test_keywords_ignore_case(text):
    assert keyword_flags(text) == keyword_flags(text.upper()) == keyword_flags(text.lower())


@pytest.mark.parametrize("sentence", ["soß", "Weiß so, why?", "STRASSE then"])
def test_keywords_survive_case_mapping(sentence):
    assert keyword_flags(sentence) == keyword_flags(sentence.upper()) == keyword_flags(sentence.lower())


# =========================
# Sentence features
# =========================

@pytest.fixture
def extractor():
    return SentenceFeatureExtractor()


def test_feature_layout():
    assert FEATURE_COUNT == 29
    assert len(set(FEATURE_NAMES)) == 29
    sizes = {name: block.stop - block.start for name, block in DIMENSIONS.items()}
    assert sizes == {"process": 5, "position": 3, "keyword": 14, "structure": 3, "sentiment": 4}


def test_flink_features_match_fixture(extractor, flink_segmented):
    expected = read_fixture_json("features-flink-1320.json")["c0-s0"]
    features = extractor.extract(flink_segmented.get("c0-s0"), flink_segmented)
    assert features.flatten() == pytest.approx(expected)


def test_creator_comment_features(extractor, flink_segmented):
    f = extractor.extract(flink_segmented.get("c2-s0"), flink_segmented)
    assert f.is_creator
    assert f.author_comments_count == 1
    assert f.comment_index_rel == pytest.approx(1.0)
    assert f.sentence_index_rel == pytest.approx(0.5)
    assert f.global_index == 8


def test_description_features(extractor, flink_segmented):
    f = extractor.extract(flink_segmented.get("d-s2"), flink_segmented)
    assert f.is_des and f.has_url and not f.has_code
    assert f.comment_index_rel == 0.0
    assert f.sentence_index_rel == pytest.approx(1.0)


def test_greeting_sentence_features(extractor, flink_segmented):
    f = extractor.extract(flink_segmented.get("c2-s1"), flink_segmented)
    assert f.greeting and f.bang
    assert f.sentiment.pos > 0


def test_foreign_sentence_is_rejected(extractor, flink_segmented):
    s = replace(flink_segmented.get("c0-s0"), text="Something else entirely.")
    with pytest.raises(UnknownSentence):
        extractor.extract(s, flink_segmented)

    other = IssueSegmenter().segment(synthetic_issue(1))
    with pytest.raises(UnknownSentence):
        extractor.extract(other.summary_sentence, flink_segmented)


@given(st.integers(min_value=0, max_value=5_000))
def test_every_sentence_has_29_features(seed):
    issue = IssueSegmenter().segment(synthetic_issue(seed))
    for features in SentenceFeatureExtractor().extract_all(issue).values():
        assert len(features.flatten()) == FEATURE_COUNT


def test_generated_sentences_have_29_features_and_43_sp_slots():
    rng = random.Random(5)
    segmenter, extractor = IssueSegmenter(), SentenceFeatureExtractor()
    seen, seed = 0, 0
    while seen < 1000:
        issue = segmenter.segment(synthetic_issue(seed, number=seed + 1))
        seed += 1
        for features in extractor.extract_all(issue).values():
            polarity = PolarityVector(tuple(rng.random() for _ in POLARITY_WORDS))
            assert len(features.flatten()) == FEATURE_COUNT == 29
            assert len(sp_vector(polarity, features)) == len(SP_FEATURE_ORDER) == 43
            seen += 1


@pytest.mark.parametrize("dimension", list(DIMENSIONS))
def test_mask_dimension_zeroes_its_block(dimension):
    vector = [1.0] * (14 + FEATURE_COUNT)
    masked = mask_dimension(vector, dimension, offset=14)
    block = DIMENSIONS[dimension]
    assert len(masked) == len(vector)
    assert masked.count(0.0) == block.stop - block.start
    assert all(masked[i] == 0.0 for i in range(block.start + 14, block.stop + 14))


def test_mask_unknown_dimension():
    with pytest.raises(KeyError):
        mask_dimension([0.0] * FEATURE_COUNT, "lexical")


# =========================
# Pair features
# =========================

def test_pair_features_same_comment(flink_segmented):
    pf = extract_pair_features(flink_segmented.get("c0-s0"), flink_segmented.get("c0-s1"))
    assert pf.in_same_comment and pf.distance == 1


def test_pair_features_other_comment(flink_segmented):
    pf = extract_pair_features(flink_segmented.get("c0-s0"), flink_segmented.get("c1-s0"))
    assert not pf.in_same_comment and pf.distance == 2


def test_description_sentences_are_not_in_a_comment(flink_segmented):
    pf = extract_pair_features(flink_segmented.get("d-s0"), flink_segmented.get("d-s1"))
    assert not pf.in_same_comment


def test_pair_errors(flink_segmented):
    s = flink_segmented.get("c0-s0")
    with pytest.raises(SameSentence):
        extract_pair_features(s, s)
    other = IssueSegmenter().segment(synthetic_issue(3)).summary_sentence
    with pytest.raises(CrossIssue):
        extract_pair_features(s, other)


@given(st.integers(min_value=0, max_value=5_000))
def test_pair_features_are_symmetric(seed):
    sentences = IssueSegmenter().segment(synthetic_issue(seed)).sentences
    for a, b in combinations(sentences, 2):
        assert extract_pair_features(a, b) == extract_pair_features(b, a)


def test_pair_vector(flink_segmented):
    s1, s2 = flink_segmented.get("c0-s0"), flink_segmented.get("c2-s0")
    vector = pair_vector(s1, s2, extract_pair_features(s1, s2))
    assert len(vector) == len(PAIR_VECTOR_NAMES) == 6
    assert vector[:2] == [0.0, 4.0]
    # ambas llevan "could"
    assert vector[5] == 1.0


def test_token_jaccard():
    assert token_jaccard("a b c", "b c d") == pytest.approx(0.5)
    assert token_jaccard("", "") == 0.0
