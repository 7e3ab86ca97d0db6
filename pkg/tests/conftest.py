import json
import os
import random
from datetime import datetime, timedelta, timezone

import hypothesis
import pytest

from features.sentence_features import SentenceFeatureExtractor
from ingestion.issue_loader import Comment, IssueLog, load_issue
from ingestion.issue_segmenter import COMMENT, IssueSegmenter
from pipelines.training import SentenceRow

hypothesis.settings.register_profile("ci", max_examples=200, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=20, deadline=None)
hypothesis.settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "ci"))

ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIXTURES = os.path.join(ROOT_DIR, "tests", "fixtures")


def fixture_path(*parts: str) -> str:
    return os.path.join(FIXTURES, *parts)


def read_fixture_json(*parts: str):
    with open(fixture_path(*parts), "r", encoding="utf-8") as f:
        return json.load(f)


# -----------------------------
# FLINK-1320
# -----------------------------

@pytest.fixture
def flink_issue() -> IssueLog:
    return load_issue(fixture_path("corpus", "FLINK-1320.json"))


@pytest.fixture
def flink_segmented(flink_issue):
    return IssueSegmenter().segment(flink_issue)


# -----------------------------
# Synthetic corpus
# -----------------------------

WORDS = [
    "cache", "buffer", "memory", "segment", "thread", "queue", "lock", "index",
    "we", "should", "could", "use", "the", "a", "heap", "state", "job", "copy",
]
START = datetime(2020, 1, 1, tzinfo=timezone.utc)


def _sentence(rng: random.Random) -> str:
    words = [rng.choice(WORDS) for _ in range(rng.randint(3, 9))]
    return " ".join(words).capitalize() + rng.choice([".", "?", "!"])


def synthetic_issue(seed: int, project: str = "SYN", number: int = 1, max_comments: int = 5) -> IssueLog:
    """Issue aleatorio pero reproducible, ya limpio (sin código, citas ni URLs)."""
    rng = random.Random(seed)
    authors = ["alice", "bob", "carol", "dave"]
    comments = [
        Comment(
            index=i,
            author=rng.choice(authors),
            timestamp=START + timedelta(hours=i + 1),
            body=" ".join(_sentence(rng) for _ in range(rng.randint(1, 4))),
        )
        for i in range(rng.randint(0, max_comments))
    ]
    return IssueLog(
        key=f"{project}-{number}",
        project=project,
        summary=_sentence(rng).rstrip(".?!"),
        description=" ".join(_sentence(rng) for _ in range(rng.randint(0, 3))),
        reporter=rng.choice(authors),
        created=START,
        comments=tuple(comments),
    )


@pytest.fixture
def synthetic_corpus():
    return [synthetic_issue(seed, number=seed + 1) for seed in range(20)]


# -----------------------------
# Labelled synthetic corpus
# -----------------------------

DESIGN_WORDS = ["buffer", "pool", "allocate", "segment", "heap", "spill"]
CHATTER_WORDS = ["thanks", "report", "build", "green", "log", "attached"]
SHARED_WORDS = ["the", "we", "now", "it"]


def _labelled_sentence(rng: random.Random, label: int) -> str:
    words = [rng.choice(DESIGN_WORDS if label else CHATTER_WORDS) for _ in range(rng.randint(2, 4))]
    words += [rng.choice(SHARED_WORDS) for _ in range(rng.randint(1, 3))]
    rng.shuffle(words)
    return " ".join(words).capitalize() + "."


def labelled_rows(n: int = 200, seed: int = 0, per_issue: int = 20):
    """n oraciones de comentario separables por vocabulario (1 = diseño), con sus 29 rasgos reales."""
    rng = random.Random(seed)
    labels = [i % 2 for i in range(n)]
    rng.shuffle(labels)
    segmenter, extractor = IssueSegmenter(), SentenceFeatureExtractor()

    rows = []
    for start in range(0, n, per_issue):
        chunk = labels[start:start + per_issue]
        comments = tuple(
            Comment(
                index=i,
                author=rng.choice(["alice", "bob", "carol"]),
                timestamp=START + timedelta(hours=i + 1),
                body=_labelled_sentence(rng, label),
            )
            for i, label in enumerate(chunk)
        )
        issue = IssueLog(
            key=f"LAB-{start // per_issue + 1}",
            project="LAB",
            summary="Rework the memory manager",
            description="",
            reporter="alice",
            created=START,
            comments=comments,
        )
        segmented = segmenter.segment(issue)
        sentences = [s for s in segmented.sentences if s.source == COMMENT]
        assert len(sentences) == len(chunk)
        rows += [SentenceRow(segmented, s, extractor.extract(s, segmented), label) for s, label in zip(sentences, chunk)]
    return rows
