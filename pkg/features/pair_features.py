from dataclasses import dataclass
from typing import List

from features.keywords import keyword_flags
from ingestion.issue_segmenter import COMMENT, Sentence


class SameSentence(ValueError):
    """Raised when a pair is built from one sentence."""


class CrossIssue(ValueError):
    """Raised when the two sentences come from different issues."""


@dataclass(frozen=True)
class PairFeatures:
    in_same_comment: bool
    distance: int


def extract_pair_features(s1: Sentence, s2: Sentence) -> PairFeatures:
    if s1.issue_key != s2.issue_key:
        raise CrossIssue(f"{s1.id} ({s1.issue_key}) and {s2.id} ({s2.issue_key}) belong to different issues")
    if s1.id == s2.id:
        raise SameSentence(f"Cannot pair {s1.id} with itself")

    in_same_comment = s1.source == COMMENT and s2.source == COMMENT and s1.comment_index == s2.comment_index
    return PairFeatures(in_same_comment=in_same_comment, distance=abs(s1.global_index - s2.global_index))


# -----------------------------
# Baseline pair vector
# -----------------------------

PAIR_VECTOR_NAMES = [
    "in_same_comment",
    "distance",
    "token_jaccard",
    "s1_words",
    "s2_words",
    "shared_keyword_flags",
]


def token_jaccard(text1: str, text2: str) -> float:
    a = set(text1.lower().split())
    b = set(text2.lower().split())
    if not a and not b:
        return 0.0
    return len(a & b) / len(a | b)


def pair_vector(s1: Sentence, s2: Sentence, pf: PairFeatures) -> List[float]:
    shared = sum(1 for x, y in zip(keyword_flags(s1.text), keyword_flags(s2.text)) if x and y)
    return [
        float(pf.in_same_comment),
        float(pf.distance),
        token_jaccard(s1.text, s2.text),
        float(len(s1.text.split())),
        float(len(s2.text.split())),
        float(shared),
    ]
