import pytest
from hypothesis import assume, given, settings, strategies as st

from conftest import fixture_path
from features.pair_features import PairFeatures, extract_pair_features
from ingestion.issue_segmenter import COMMENT, Sentence
from prompts.budget import BudgetExhausted, TokenBudget, fit_prefix, register_token_counter
from prompts.dsea_prompt import MASK_TOKEN, RESERVED, build_dsea_prompt, truncate_dsea
from prompts.dspa_prompt import (
    LABEL_SLOT,
    RESPONSE_HEADER,
    build_dspa_prompt,
    sentence_cap,
    template_length,
    truncate_dspa,
)

WORD = st.text(alphabet=st.sampled_from(list("abcdefghijklmnopqrstuvwxyz")), min_size=1, max_size=8)
TOKENS = st.lists(WORD, max_size=700)


def _sentence(sid: str, text: str, index: int, comment: int = 0) -> Sentence:
    return Sentence(
        id=sid,
        issue_key="X-1",
        text=text,
        source=COMMENT,
        comment_index=comment,
        sentence_index_in_source=0,
        global_index=index,
        author="a",
    )


# =========================
# Budget
# =========================

@pytest.mark.parametrize("max_sequence", [0, 8, 16])
def test_budget_needs_more_than_sixteen_tokens(max_sequence):
    with pytest.raises(ValueError):
        TokenBudget(max_sequence)


def test_unknown_counter():
    with pytest.raises(KeyError):
        TokenBudget(64, counter="no-such-counter")


def test_fit_prefix_with_registered_counter():
    # dos unidades por token largo, una por token corto
    register_token_counter("test-subword", lambda text: sum(2 if len(w) > 3 else 1 for w in text.split()))
    budget = TokenBudget(64, counter="test-subword")
    tokens = ["a", "long", "b", "words", "c"]

    kept = fit_prefix(tokens, 4, budget)
    assert kept == ["a", "long", "b"]
    assert budget.count(" ".join(kept)) <= 4
    assert budget.count(" ".join(tokens[: len(kept) + 1])) > 4


# =========================
# DSEA prompts
# =========================

SUMMARY = "Add an off-heap variant of the managed memory"


def test_dsea_prompt_text():
    prompt = build_dsea_prompt("We could allocate the memory segments with direct byte buffers.", SUMMARY, TokenBudget(384))
    assert prompt.text == (
        "We could allocate the memory segments with direct byte buffers. "
        "is [MASK] related to the issue: Add an off-heap variant of the managed memory"
    )
    assert prompt.summary_tokens_used == 8
    assert prompt.sentence_tokens_used == 10


def test_dsea_truncation_keeps_the_head():
    tokens = [f"t{i}" for i in range(12)]
    assert truncate_dsea(tokens, summary_len=4, budget=TokenBudget(20)) == tokens[:8]


def test_dsea_budget_exhausted():
    with pytest.raises(BudgetExhausted):
        truncate_dsea(["a"], summary_len=9, budget=TokenBudget(17))


def test_dsea_needs_a_summary():
    with pytest.raises(ValueError):
        truncate_dsea(["a"], summary_len=0, budget=TokenBudget(384))
    with pytest.raises(ValueError):
        build_dsea_prompt("a sentence", "   ", TokenBudget(384))


def test_dsea_prompt_has_a_single_mask():
    prompt = build_dsea_prompt("Replace [MASK] here", "About [MASK] tokens", TokenBudget(384))
    assert prompt.text.count(MASK_TOKEN) == 1


@given(TOKENS, st.integers(min_value=1, max_value=375))
def test_dsea_truncation_is_a_bounded_prefix(tokens, summary_len):
    budget = TokenBudget(384)
    kept = truncate_dsea(tokens, summary_len, budget)
    cap = 384 - summary_len - 8
    assert kept == tokens[: len(kept)]
    assert len(kept) == min(len(tokens), cap)


# leyes de truncado: generación barata (longitudes), muchos ejemplos
TRUNCATION_LAWS = settings(max_examples=10_000, deadline=None)
POOL = [f"w{i}" for i in range(800)]


@st.composite
def dsea_room(draw):
    max_sequence = draw(st.integers(min_value=17, max_value=800))
    summary_len = draw(st.integers(min_value=1, max_value=max_sequence - RESERVED - 1))
    return max_sequence, summary_len


@TRUNCATION_LAWS
@given(dsea_room(), st.integers(min_value=0, max_value=800))
def test_dsea_truncation_law(room, n):
    max_sequence, summary_len = room
    tokens = POOL[:n]
    kept = truncate_dsea(tokens, summary_len, TokenBudget(max_sequence))
    assert kept == tokens[: min(n, max_sequence - summary_len - RESERVED)]


@TRUNCATION_LAWS
@given(
    st.integers(min_value=17, max_value=800),
    st.integers(min_value=1, max_value=800),
    st.integers(min_value=0, max_value=50),
)
def test_dsea_budget_exhausted_iff_no_room(max_sequence, summary_len, n):
    budget = TokenBudget(max_sequence)
    if max_sequence - summary_len - RESERVED < 1:
        with pytest.raises(BudgetExhausted):
            truncate_dsea(POOL[:n], summary_len, budget)
    else:
        assert len(truncate_dsea(POOL[:n], summary_len, budget)) <= max_sequence - summary_len - RESERVED


# =========================
# DSPA prompts
# =========================

def test_dspa_golden_prompt(flink_segmented):
    s1, s2 = flink_segmented.get("c0-s0"), flink_segmented.get("c1-s0")
    prompt = build_dspa_prompt(s1, s2, extract_pair_features(s1, s2), TokenBudget(512))
    with open(fixture_path("dspa-prompt-c0s0-c1s0.txt"), "r", encoding="utf-8") as f:
        assert prompt.text == f.read()


def test_dspa_generation_prompt_stops_at_response(flink_segmented):
    s1, s2 = flink_segmented.get("c0-s0"), flink_segmented.get("c0-s1")
    prompt = build_dspa_prompt(s1, s2, extract_pair_features(s1, s2), TokenBudget(512))
    assert prompt.generation_prompt.endswith(RESPONSE_HEADER)
    assert prompt.text == prompt.generation_prompt + LABEL_SLOT
    assert "Two sentences are in the same comment and their distance is 1." in prompt.input


def test_template_lengths():
    budget = TokenBudget(512)
    assert template_length(PairFeatures(True, 1), budget) == 43
    assert template_length(PairFeatures(False, 12), budget) == 44
    assert sentence_cap(44, budget) == 234


def test_short_sentence_does_not_lend_its_margin():
    budget = TokenBudget(64)
    cap = sentence_cap(44, budget)
    t1, t2 = truncate_dspa(["short"], ["w"] * 100, 44, budget)
    assert t1 == ["short"]
    assert len(t2) == cap == 10


def test_dspa_budget_exhausted():
    with pytest.raises(BudgetExhausted):
        truncate_dspa(["a"], ["b"], 44, TokenBudget(45))


def test_dspa_rejects_identical_sentences():
    s = _sentence("c0-s0", "same", 0)
    with pytest.raises(ValueError):
        build_dspa_prompt(s, s, PairFeatures(True, 0), TokenBudget(512))


@given(TOKENS, TOKENS, st.booleans(), st.integers(min_value=1, max_value=99))
def test_dspa_prompt_fits_the_budget(tokens1, tokens2, same_comment, distance):
    assume(tokens1 and tokens2)
    budget = TokenBudget(512)
    s1 = _sentence("c0-s0", " ".join(tokens1), 0)
    s2 = _sentence("c1-s0", " ".join(tokens2), distance, comment=0 if same_comment else 1)
    pf = extract_pair_features(s1, s2)

    prompt = build_dspa_prompt(s1, s2, pf, budget)
    cap = sentence_cap(prompt.template_len, budget)

    assert budget.count(prompt.text) <= 512
    assert prompt.s1_tokens_used == min(len(tokens1), cap)
    assert prompt.s2_tokens_used == min(len(tokens2), cap)
    assert budget.count(prompt.text) == prompt.template_len + prompt.s1_tokens_used + prompt.s2_tokens_used


@TRUNCATION_LAWS
@given(
    st.integers(min_value=46, max_value=800),
    st.integers(min_value=1, max_value=800),
    st.integers(min_value=1, max_value=800),
    st.booleans(),
    st.integers(min_value=1, max_value=99),
)
def test_dspa_truncation_law(max_sequence, n1, n2, same_comment, distance):
    budget = TokenBudget(max_sequence)
    s1 = _sentence("c0-s0", " ".join(POOL[:n1]), 0)
    s2 = _sentence("c1-s0", " ".join(POOL[:n2]), distance, comment=0 if same_comment else 1)

    prompt = build_dspa_prompt(s1, s2, extract_pair_features(s1, s2), budget)
    cap = (max_sequence - prompt.template_len) // 2

    assert prompt.s1_tokens_used == min(n1, cap)
    assert prompt.s2_tokens_used == min(n2, cap)
    assert budget.count(prompt.text) == prompt.template_len + prompt.s1_tokens_used + prompt.s2_tokens_used
    assert budget.count(prompt.text) <= max_sequence


@TRUNCATION_LAWS
@given(
    st.integers(min_value=17, max_value=800),
    st.integers(min_value=0, max_value=800),
    st.integers(min_value=0, max_value=50),
)
def test_dspa_budget_exhausted_iff_no_room(max_sequence, template_len, n):
    budget = TokenBudget(max_sequence)
    if (max_sequence - template_len) // 2 < 1:
        with pytest.raises(BudgetExhausted):
            truncate_dspa(POOL[:n], POOL[:n], template_len, budget)
    else:
        t1, t2 = truncate_dspa(POOL[:n], POOL[:n], template_len, budget)
        assert len(t1) == len(t2) == min(n, (max_sequence - template_len) // 2)
