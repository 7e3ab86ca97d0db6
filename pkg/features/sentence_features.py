from dataclasses import astuple, dataclass
from typing import Dict, List, Optional

from features.keywords import KEYWORD_NAMES, keyword_flags
from features.sentiment import SentimentScorer, SentimentScores
from ingestion.issue_segmenter import COMMENT, DESCRIPTION, Sentence, SegmentedIssue
from ingestion.text_cleaner import CODE_TOKEN, URL_TOKEN

PROCESS_NAMES = ["is_des", "is_creator", "author_comments_count", "comments_count", "sentences_count"]
POSITION_NAMES = ["comment_index_rel", "sentence_index_rel", "global_index"]
STRUCTURE_NAMES = ["has_code", "has_url", "words_count"]
SENTIMENT_NAMES = ["pos", "neu", "neg", "compound"]

FEATURE_NAMES = PROCESS_NAMES + POSITION_NAMES + list(KEYWORD_NAMES) + STRUCTURE_NAMES + SENTIMENT_NAMES
FEATURE_COUNT = len(FEATURE_NAMES)


def _dimension_slices() -> Dict[str, slice]:
    slices = {}
    start = 0
    for name, names in (
        ("process", PROCESS_NAMES),
        ("position", POSITION_NAMES),
        ("keyword", KEYWORD_NAMES),
        ("structure", STRUCTURE_NAMES),
        ("sentiment", SENTIMENT_NAMES),
    ):
        slices[name] = slice(start, start + len(names))
        start += len(names)
    return slices


DIMENSIONS = _dimension_slices()


class UnknownSentence(LookupError):
    """Raised when a sentence does not belong to the issue it is scored against."""


@dataclass(frozen=True)
class SentenceFeatures:
    # process
    is_des: bool
    is_creator: bool
    author_comments_count: int
    comments_count: int
    sentences_count: int
    # position
    comment_index_rel: float
    sentence_index_rel: float
    global_index: int
    # keyword
    what: bool
    why: bool
    when: bool
    who: bool
    which: bool
    how: bool
    modal_should_shall: bool
    modal_can_could: bool
    modal_may_might: bool
    qmark: bool
    bang: bool
    greeting: bool
    causal: bool
    transitional: bool
    # structure
    has_code: bool
    has_url: bool
    words_count: int
    # sentiment
    pos: float
    neu: float
    neg: float
    compound: float

    def flatten(self) -> List[float]:
        return [float(v) for v in astuple(self)]

    @property
    def sentiment(self) -> SentimentScores:
        return SentimentScores(pos=self.pos, neu=self.neu, neg=self.neg, compound=self.compound)


class SentenceFeatureExtractor:
    """
    Calcula las cinco dimensiones de rasgos de una oración:
    proceso, posición, palabras clave, estructura y sentimiento.
    """

    def __init__(self, scorer: Optional[SentimentScorer] = None, lexicon_path: Optional[str] = None):
        self.scorer = scorer or SentimentScorer(lexicon_path)

    def extract(self, s: Sentence, issue: SegmentedIssue) -> SentenceFeatures:
        if s.issue_key != issue.key or not issue.contains(s):
            raise UnknownSentence(f"Sentence {s.id} does not belong to {issue.key}")

        log = issue.issue
        comments_count = len(log.comments)

        if s.source == COMMENT:
            comment_index_rel = (s.comment_index + 1) / comments_count
        else:
            comment_index_rel = 0.0

        keywords = keyword_flags(s.text)
        sentiment = self.scorer.score(s.text)

        return SentenceFeatures(
            is_des=s.source == DESCRIPTION,
            is_creator=s.author == log.reporter,
            author_comments_count=log.comments_by(s.author),
            comments_count=comments_count,
            sentences_count=len(issue.sentences),
            comment_index_rel=comment_index_rel,
            sentence_index_rel=(s.sentence_index_in_source + 1) / issue.block_size(s),
            global_index=s.global_index,
            **dict(zip(KEYWORD_NAMES, keywords)),
            has_code=CODE_TOKEN in s.text,
            has_url=URL_TOKEN in s.text,
            words_count=len(s.text.split()),
            pos=sentiment.pos,
            neu=sentiment.neu,
            neg=sentiment.neg,
            compound=sentiment.compound,
        )

    def extract_all(self, issue: SegmentedIssue) -> Dict[str, SentenceFeatures]:
        return {s.id: self.extract(s, issue) for s in issue.sentences}


def extract_sentence_features(
    s: Sentence, issue: SegmentedIssue, scorer: Optional[SentimentScorer] = None
) -> SentenceFeatures:
    return SentenceFeatureExtractor(scorer).extract(s, issue)


def mask_dimension(vector: List[float], dimension: str, offset: int = 0) -> List[float]:
    """Pone a cero las casillas de una dimensión dentro del bloque de 29 rasgos."""
    if dimension not in DIMENSIONS:
        raise KeyError(dimension)
    block = DIMENSIONS[dimension]
    masked = list(vector)
    for i in range(block.start + offset, block.stop + offset):
        masked[i] = 0.0
    return masked
