import logging
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple

from backends.base import Backend
from backends.classifiers import SP_FEATURE_ORDER, RelationLabel, mask_probabilities, sp_vector
from backends.linear_head import HeadHyperParams, HeadModel, train_head
from backends.tfidf_baseline import BaselineModel, expected_order, fit_vocabulary, train_baseline, train_pair_baseline
from evaluation.ablation import AblationDataset, Sample
from evaluation.annotations import AnnotatedSentence, pair_training_samples, sentence_training_labels
from features.pair_features import extract_pair_features, pair_vector
from features.sentence_features import SentenceFeatureExtractor, SentenceFeatures
from ingestion.issue_segmenter import SegmentedIssue, Sentence
from prompts.budget import TokenBudget
from prompts.dsea_prompt import build_dsea_prompt

logger = logging.getLogger(__name__)

PAIR_LABELS = [label.value for label in RelationLabel]


@dataclass(frozen=True)
class SentenceRow:
    issue: SegmentedIssue
    sentence: Sentence
    features: SentenceFeatures
    label: int

    @property
    def key(self) -> Tuple[str, str]:
        return self.issue.key, self.sentence.id


def sentence_rows(
    segmented: Dict[str, SegmentedIssue],
    records: Iterable[AnnotatedSentence],
    extractor: SentenceFeatureExtractor,
    issue_keys: Optional[Iterable[str]] = None,
) -> List[SentenceRow]:
    """Une anotaciones y oraciones enumeradas; las anotaciones sin oración se descartan con aviso."""
    labels = sentence_training_labels(records)
    wanted = set(issue_keys) if issue_keys is not None else None
    rows = []

    for (issue_key, sentence_id), label in sorted(labels.items()):
        if wanted is not None and issue_key not in wanted:
            continue
        issue = segmented.get(issue_key)
        if issue is None or sentence_id not in issue.by_id:
            logger.warning(f"{issue_key}/{sentence_id}: annotated sentence not found in corpus, skipped")
            continue
        s = issue.get(sentence_id)
        rows.append(SentenceRow(issue, s, extractor.extract(s, issue), label))
    return rows


# -----------------------------
# DSEA
# -----------------------------

def sp_samples(rows: List[SentenceRow], backend: Backend, budget: TokenBudget) -> List[Sample]:
    samples = []
    for row in rows:
        prompt = build_dsea_prompt(row.sentence.text, row.issue.issue.summary, budget)
        polarity = mask_probabilities(backend, prompt)
        samples.append(Sample(row.key, tuple(sp_vector(polarity, row.features)), row.label))
    return samples


def train_dsea_head(samples: List[Sample], seed: int, hparams: Optional[HeadHyperParams] = None) -> HeadModel:
    return train_head(
        [(s.vector, s.label) for s in samples],
        hparams=hparams,
        seed=seed,
        feature_order=list(SP_FEATURE_ORDER),
    )


def train_dsea_baseline(
    rows: List[SentenceRow], seed: int, hparams: Optional[HeadHyperParams] = None
) -> BaselineModel:
    return train_baseline(
        [(row.sentence.text, row.features.flatten(), row.label) for row in rows],
        hparams=hparams,
        seed=seed,
    )


def baseline_samples(rows: List[SentenceRow], model: BaselineModel) -> List[Sample]:
    return [
        Sample(row.key, tuple(model.sentence_vector(row.sentence.text, row.features.flatten())), row.label)
        for row in rows
    ]


# -----------------------------
# DSPA
# -----------------------------

def pair_samples(
    segmented: Dict[str, SegmentedIssue],
    records: Iterable[AnnotatedSentence],
    issue_keys: Optional[Iterable[str]] = None,
) -> List[Tuple[List[float], str]]:
    wanted = set(issue_keys) if issue_keys is not None else None
    samples = []
    for issue_key, id1, id2, label in pair_training_samples(records):
        if wanted is not None and issue_key not in wanted:
            continue
        issue = segmented.get(issue_key)
        if issue is None or id1 not in issue.by_id or id2 not in issue.by_id:
            continue
        s1, s2 = issue.get(id1), issue.get(id2)
        samples.append((pair_vector(s1, s2, extract_pair_features(s1, s2)), label))
    return samples


def train_dspa_baseline(
    samples: List[Tuple[List[float], str]], seed: int, hparams: Optional[HeadHyperParams] = None
) -> BaselineModel:
    return train_pair_baseline(samples, PAIR_LABELS, hparams=hparams, seed=seed)


# -----------------------------
# Ablation
# -----------------------------

def ablation_dataset(
    train_rows: List[SentenceRow],
    test_rows: List[SentenceRow],
    mode: str,
    backend: Optional[Backend] = None,
    budget: Optional[TokenBudget] = None,
) -> AblationDataset:
    if mode == "baseline":
        vocabulary, idf = fit_vocabulary([row.sentence.text for row in train_rows])
        model = BaselineModel(task="dsea", head=None, vocabulary=vocabulary, idf=idf)
        return AblationDataset(
            train=baseline_samples(train_rows, model),
            test=baseline_samples(test_rows, model),
            offset=len(vocabulary),
            feature_order=expected_order("dsea", vocabulary),
        )

    return AblationDataset(
        train=sp_samples(train_rows, backend, budget),
        test=sp_samples(test_rows, backend, budget),
        offset=14,
        feature_order=list(SP_FEATURE_ORDER),
    )
