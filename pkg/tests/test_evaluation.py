import csv
import random

import pandas as pd
import pytest
from hypothesis import given, strategies as st

from conftest import fixture_path, labelled_rows
from evaluation.ablation import AblationDataset, Sample, UnknownDimension, ablate, ablate_all, masked_slots
from evaluation.annotations import (
    AnnotatedSentence,
    AnnotationError,
    CoverageMismatch,
    adjudicate,
    design_related_ids,
    gold_rationales,
    load_annotations,
    validate_annotations,
    write_annotations,
)
from evaluation.dataset_split import TooFewIssues, group_by_project, split_dataset
from evaluation.metrics import eval_dsea, eval_rationales, eval_sentences, evaluate, map_prediction
from evaluation.reports import eval_report_frame, render_table, summarize_dataset, to_json
from pipelines.training import ablation_dataset
from rationale.rationale_builder import DesignRationale


def _rationales(text: str):
    """'a b/c' -> dos racionales con soluciones (a, b) y (c)."""
    if not text:
        return []
    return [DesignRationale("X-1", tuple(chunk.split())) for chunk in text.split("/")]


def _metric_cases():
    with open(fixture_path("metrics.csv"), "r", encoding="utf-8", newline="") as f:
        return [
            pytest.param(row["predicted"], row["gold"], float(row["precision"]), float(row["recall"]), float(row["f1"]), id=row["case"])
            for row in csv.DictReader(f)
        ]


# =========================
# Metrics
# =========================

@pytest.mark.parametrize("predicted, gold, precision, recall, f1", _metric_cases())
def test_rationale_metric_cases(predicted, gold, precision, recall, f1):
    score = eval_rationales(_rationales(predicted), _rationales(gold))
    assert (score.precision, score.recall, score.f1) == pytest.approx((precision, recall, f1), abs=1e-3)


def test_hand_computed_rationale_score():
    score = eval_rationales(_rationales("a/b/x"), _rationales("a/b"))
    assert score.precision == pytest.approx(2 / 3)
    assert score.recall == 1.0
    assert score.f1 == pytest.approx(0.8)
    assert (score.tp, score.fp, score.fn) == (2, 1, 0)


def test_rationales_only_match_within_their_issue():
    pred = [DesignRationale("A-1", ("s0",))]
    gold = [DesignRationale("B-1", ("s0",))]
    assert eval_rationales(pred, gold).precision == 0.0


def test_sentence_level_scores():
    pred = [DesignRationale("X-1", ("a", "b"), (("c",),))]
    gold = [DesignRationale("X-1", ("a",), (("c", "d"),))]
    scores = eval_sentences(pred, gold)
    assert (scores["solution"].precision, scores["solution"].recall) == (0.5, 1.0)
    assert (scores["argument"].precision, scores["argument"].recall) == (1.0, 0.5)


def test_unmapped_prediction_scores_nothing():
    pred = [DesignRationale("X-1", ("z",), (("c",),))]
    gold = [DesignRationale("X-1", ("a",), (("c",),))]
    assert map_prediction(pred[0], gold) is None
    assert eval_sentences(pred, gold)["argument"].precision == 0.0


def test_map_prediction_breaks_ties_by_position():
    p = DesignRationale("X-1", ("c1-s0", "d-s2"))
    gold = [DesignRationale("X-1", ("c1-s0",)), DesignRationale("X-1", ("d-s2",))]
    assert map_prediction(p, gold) is gold[1]
    assert map_prediction(p, gold[::-1]) is gold[1]


SOLUTIONS = [("c2-s1", "c0-s3"), ("c2-s1", "d-s0"), ("c0-s3", "sum-s0"), ("c10-s0", "d-s0"), ("c9-s9", "sum-s0")]


@given(st.permutations(SOLUTIONS))
def test_map_prediction_ignores_gold_order(solutions):
    # tres candidatos empatan con dos oraciones; c2 va antes que c10
    p = DesignRationale("X-1", ("c0-s3", "c2-s1", "d-s0", "c10-s0"))
    gold = [DesignRationale("X-1", solution) for solution in solutions]
    assert map_prediction(p, gold) == DesignRationale("X-1", ("c2-s1", "d-s0"))


def test_dsea_score():
    score = eval_dsea({"a", "b", "c"}, {"a", "b"})
    assert (score.precision, score.recall) == (pytest.approx(2 / 3), 1.0)
    assert eval_dsea(set(), set()).f1 == 1.0


def _oracle_rationale_score(pred, gold):
    pred_sets = [set(p.solution) for p in pred]
    gold_sets = [set(g.solution) for g in gold]
    if not pred and not gold:
        return 1.0, 1.0, 1.0
    if not pred:
        return 0.0, 0.0, 0.0
    p = sum(1 for ps in pred_sets if any(ps & gs for gs in gold_sets)) / len(pred)
    r = sum(1 for gs in gold_sets if any(gs & ps for ps in pred_sets)) / len(gold) if gold else 1.0
    f = 0.0 if p + r == 0 else 2 * p * r / (p + r)
    return p, r, f


def _oracle_sentence_scores(pred, gold):
    result = {}
    for category in ("solution", "argument"):
        def members(r):
            return set(r.solution) if category == "solution" else {s for grp in r.arguments for s in grp}

        tp = n_pred = 0
        hit = set()
        for p in pred:
            overlaps = [len(set(p.solution) & set(g.solution)) for g in gold]
            target = set()
            if overlaps and max(overlaps) > 0:
                tied = [g for g, o in zip(gold, overlaps) if o == max(overlaps)]
                target = members(min(tied, key=lambda g: sorted(g.solution)))
            for sid in members(p):
                n_pred += 1
                if sid in target:
                    tp += 1
                    hit.add(sid)
        n_gold = sum(len(members(g)) for g in gold)
        if n_pred == 0 and n_gold == 0:
            result[category] = (1.0, 1.0)
        elif n_pred == 0:
            result[category] = (0.0, 0.0)
        else:
            result[category] = (tp / n_pred, len(hit) / n_gold if n_gold else 1.0)
    return result


def _random_rationales(rng, ids):
    pool = list(ids)
    rng.shuffle(pool)
    rationales = []
    while pool and rng.random() < 0.8:
        solution = tuple(pool.pop() for _ in range(min(len(pool), rng.randint(1, 2))))
        arguments = []
        while pool and rng.random() < 0.5:
            arguments.append(tuple(pool.pop() for _ in range(min(len(pool), rng.randint(1, 2)))))
        rationales.append(DesignRationale("X-1", solution, tuple(arguments)))
    return rationales


def test_metrics_match_brute_force():
    rng = random.Random(99)
    ids = [f"s{i}" for i in range(10)]
    for _ in range(600):
        pred = _random_rationales(rng, ids)
        gold = _random_rationales(rng, ids)

        score = eval_rationales(pred, gold)
        assert (score.precision, score.recall, score.f1) == pytest.approx(_oracle_rationale_score(pred, gold))

        sentences = eval_sentences(pred, gold)
        for category, (p, r) in _oracle_sentence_scores(pred, gold).items():
            assert (sentences[category].precision, sentences[category].recall) == pytest.approx((p, r))


# =========================
# Annotations
# =========================

@pytest.fixture
def records():
    return load_annotations(fixture_path("annotations", "flink.jsonl"))


def test_gold_rationales_from_fixture(records):
    (first, second) = gold_rationales(records)["FLINK-1320"]
    assert first.solution == ("c0-s0", "c0-s1")
    assert first.arguments == (("c1-s0", "c1-s1"),)
    assert second.solution == ("c2-s0",) and second.arguments == ()
    assert len(design_related_ids(records)) == 5


def test_gold_against_itself_is_perfect(records):
    gold = gold_rationales(records)["FLINK-1320"]
    report = evaluate(gold, gold)
    assert report.rationale.f1 == report.solution.f1 == report.argument.f1 == 1.0


@pytest.mark.parametrize(
    "kwargs",
    [
        {"label": "maybe"},
        {"label": "solution"},
        {"label": "argument", "rationale_id": "r1"},
        {"label": "unrelated", "argument_group_id": "g1"},
    ],
)
def test_invalid_records(kwargs):
    with pytest.raises(AnnotationError):
        AnnotatedSentence(issue_key="X-1", sentence_id="c0-s0", text="t", **kwargs)


def test_dataset_level_validation():
    sol = AnnotatedSentence("X-1", "c0-s0", "t", "solution", rationale_id="r1")
    with pytest.raises(AnnotationError):
        validate_annotations([sol, sol])

    orphan = AnnotatedSentence("X-1", "c0-s1", "t", "argument", rationale_id="r2", argument_group_id="g1")
    with pytest.raises(AnnotationError):
        validate_annotations([sol, orphan])

    split_group = AnnotatedSentence("X-1", "c1-s0", "t", "argument", rationale_id="r1", argument_group_id="g1")
    other = AnnotatedSentence("X-1", "c1-s1", "t", "argument", rationale_id="r2", argument_group_id="g1")
    sol2 = AnnotatedSentence("X-1", "c2-s0", "t", "solution", rationale_id="r2")
    with pytest.raises(AnnotationError):
        validate_annotations([sol, sol2, split_group, other])


def test_write_and_reload(tmp_path, records):
    path = write_annotations(records, str(tmp_path / "out.jsonl"))
    assert load_annotations(path) == records
    assert load_annotations(str(tmp_path)) == records


def _stream(labels):
    out = []
    for n, label in enumerate(labels):
        kwargs = {}
        if label != "unrelated":
            kwargs["rationale_id"] = "r1"
        if label == "argument":
            kwargs["argument_group_id"] = "g1"
        out.append(AnnotatedSentence("X-1", f"c0-s{n}", f"text {n}", label, **kwargs))
    return out


def test_adjudicate_majority_and_split():
    a = _stream(["solution", "argument", "solution"])
    b = _stream(["solution", "unrelated", "unrelated"])
    expert = _stream(["unrelated", "solution", "unrelated"])

    final = adjudicate(a, b, expert)
    assert [r.label for r in final] == ["solution", "solution", "unrelated"]
    assert final[0] == a[0]
    assert final[1] == expert[1]


def test_adjudicate_needs_equal_coverage():
    a = _stream(["solution"])
    with pytest.raises(CoverageMismatch):
        adjudicate(a, a, _stream(["solution", "unrelated"]))


# =========================
# Split
# =========================

KEYS = [f"{project}-{n}" for project in ("FLINK", "HADOOP", "KAFKA") for n in range(1, 11)]


def test_split_sizes():
    train, test = split_dataset(group_by_project(KEYS), seed=13)
    assert len(test) == 3 and len(train) == 27
    assert {k.split("-")[0] for k in test} == {"FLINK", "HADOOP", "KAFKA"}
    assert not set(train) & set(test)


def test_split_is_seeded():
    grouped = group_by_project(KEYS)
    assert split_dataset(grouped, 5) == split_dataset(grouped, 5)
    splits = [split_dataset(grouped, seed) for seed in range(100)]
    assert all(split == split_dataset(grouped, seed) for seed, split in enumerate(splits))
    assert len({tuple(test) for _, test in splits}) > 1


def test_split_needs_two_issues_per_project():
    with pytest.raises(TooFewIssues):
        split_dataset({"SOLO": ["SOLO-1"]}, 0)


# =========================
# Ablation
# =========================

SIGNAL = 14 + 22  # has_code dentro del bloque de rasgos


def _ablation_dataset(seed=0):
    rng = random.Random(seed)

    def sample(n):
        vector = [0.0] * 43
        vector[0] = rng.random()
        vector[SIGNAL] = float(n % 2)
        return Sample(("X-1", f"s{n}"), tuple(vector), n % 2)

    return AblationDataset(train=[sample(n) for n in range(40)], test=[sample(n) for n in range(40, 60)])


@pytest.mark.parametrize(
    "dimension, slots",
    [("process", 5), ("position", 3), ("keyword", 14), ("structure", 3), ("sentiment", 4)],
)
def test_masked_slot_counts(dimension, slots):
    assert masked_slots(dimension) == slots


def test_unknown_dimension():
    with pytest.raises(UnknownDimension):
        ablate(_ablation_dataset(), "lexical")


def test_ablation_finds_the_informative_dimension():
    table = ablate_all(_ablation_dataset(), seed=1).set_index("dimension")
    assert list(table.index) == ["full", "process", "position", "keyword", "structure", "sentiment"]
    assert table.loc["full", "f1"] == 1.0
    assert table.loc["structure", "f1"] < 1.0
    assert table.loc["structure", "f1_drop_pct"] > 0
    assert table.loc["keyword", "f1"] == 1.0
    assert table.loc["keyword", "masked"] == 14


def test_ablation_on_the_labelled_corpus_never_beats_the_full_model():
    rows = labelled_rows(200, seed=11)
    dataset = ablation_dataset(rows[:150], rows[150:], "baseline")
    table = ablate_all(dataset, seed=2).set_index("dimension")

    full = table.loc["full", "f1"]
    assert full >= 0.9
    for dimension in ["process", "position", "keyword", "structure", "sentiment"]:
        assert table.loc[dimension, "f1"] <= full


def test_short_vectors_are_rejected():
    with pytest.raises(ValueError):
        AblationDataset(train=[Sample("k", (0.0,) * 20, 0)], test=[])


# =========================
# Reports
# =========================

def test_summarize_dataset(records):
    table = summarize_dataset(records)
    assert list(table.columns) == ["solution", "argument", "unrelated", "total"]
    assert table.loc["FLINK"].tolist() == [3, 2, 5, 10]
    assert table.loc["Total", "total"] == 10
    assert "Total" in render_table(table)


def test_summarize_empty_dataset():
    table = summarize_dataset([])
    assert table.loc["Total"].tolist() == [0, 0, 0, 0]


def test_eval_report_frame(records):
    gold = gold_rationales(records)["FLINK-1320"]
    frame = eval_report_frame(evaluate(gold, gold))
    assert list(frame.index) == ["rationale", "solution", "argument"]
    assert isinstance(frame, pd.DataFrame)
    assert '"rationale"' in to_json(frame)
