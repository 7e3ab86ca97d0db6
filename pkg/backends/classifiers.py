import logging
import re
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from backends.base import Backend, CapabilityUnsupported
from backends.linear_head import HeadModel, ModelMissing
from backends.tfidf_baseline import BaselineBackend, BaselineModel
from backends.wire import ProtocolError
from features.pair_features import PairFeatures, pair_vector
from features.sentence_features import FEATURE_NAMES, SentenceFeatureExtractor, SentenceFeatures
from ingestion.issue_segmenter import SegmentedIssue, Sentence
from prompts.budget import DSEA_MAX_SEQUENCE, TokenBudget
from prompts.dsea_prompt import DseaPrompt, build_dsea_prompt
from prompts.dspa_prompt import DspaPrompt

logger = logging.getLogger(__name__)

POSITIVE_POLARITY = ["surely", "directly", "closely", "certainly", "strongly", "highly", "absolutely"]
NEGATIVE_POLARITY = ["not", "un", "never", "no", "little", "hardly", "rarely"]
POLARITY_WORDS = POSITIVE_POLARITY + NEGATIVE_POLARITY

SP_FEATURE_ORDER = [f"polarity:{w}" for w in POLARITY_WORDS] + list(FEATURE_NAMES)

PROMPT_HEAD = "prompt_head"
BASELINE = "baseline"
MODES = (PROMPT_HEAD, BASELINE)

THRESHOLD = 0.5


class UnparsableResponse(ValueError):
    """Raised when a generation contains no relation label word."""


class RelationLabel(str, Enum):
    SUPPORTING = "supporting"
    COMPLEMENTARY = "complementary"
    UNRELATED = "unrelated"


# empates exactos: nunca inventar estructura
TIE_ORDER = [RelationLabel.UNRELATED, RelationLabel.COMPLEMENTARY, RelationLabel.SUPPORTING]
LABEL_PATTERN = re.compile(r"\b(supporting|complementary|unrelated)\b", re.IGNORECASE)


@dataclass(frozen=True)
class Relation:
    label: RelationLabel
    argument: Optional[str] = None
    solution: Optional[str] = None


@dataclass(frozen=True)
class PolarityVector:
    values: Tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != len(POLARITY_WORDS):
            raise ProtocolError(f"Polarity vector needs {len(POLARITY_WORDS)} entries, got {len(self.values)}")
        for v in self.values:
            if not 0.0 <= v <= 1.0:
                raise ProtocolError(f"Polarity probability out of range: {v}")

    def as_list(self) -> List[float]:
        return list(self.values)


@dataclass
class Models:
    dsea_head: Optional[HeadModel] = None
    dsea_baseline: Optional[BaselineModel] = None
    dspa_baseline: Optional[BaselineModel] = None


# ============================================================
# DSEA
# ============================================================

def mask_probabilities(
    backend: Backend, prompt: DseaPrompt, candidates: Sequence[str] = POLARITY_WORDS
) -> PolarityVector:
    if not backend.supports_mask_scoring:
        raise CapabilityUnsupported(f"{backend.name} backend does not score masked tokens")
    probs = backend.mask_probs(prompt.text, list(candidates))
    if len(probs) != len(candidates):
        raise ProtocolError(f"Expected {len(candidates)} probabilities, got {len(probs)}")
    return PolarityVector(tuple(float(p) for p in probs))


def sp_vector(polarity: PolarityVector, features: SentenceFeatures) -> List[float]:
    return polarity.as_list() + features.flatten()


class SentenceClassifier:
    """
    Clasificación binaria de oraciones (relacionada con el diseño o no).
      prompt_head -> polaridad remota (14) ⊕ rasgos (29) -> cabeza logística de 43
      baseline    -> TF-IDF ⊕ rasgos (29) -> cabeza logística
    """

    def __init__(
        self,
        mode: str,
        models: Models,
        backend: Optional[Backend] = None,
        budget: Optional[TokenBudget] = None,
        extractor: Optional[SentenceFeatureExtractor] = None,
    ):
        if mode not in MODES:
            raise ValueError(f"Unknown mode: {mode}")
        self.mode = mode
        self.models = models
        self.backend = backend
        self.budget = budget or TokenBudget(DSEA_MAX_SEQUENCE)
        self.extractor = extractor or SentenceFeatureExtractor()

    def score(self, s: Sentence, issue: SegmentedIssue) -> float:
        features = self.extractor.extract(s, issue)

        if self.mode == BASELINE:
            if self.models.dsea_baseline is None:
                raise ModelMissing("Baseline mode needs a dsea baseline model")
            return self.models.dsea_baseline.score_sentence(s.text, features.flatten())

        if self.models.dsea_head is None:
            raise ModelMissing("prompt_head mode needs a dsea head model")
        if self.backend is None:
            raise CapabilityUnsupported("prompt_head mode needs a mask-scoring backend")

        prompt = build_dsea_prompt(s.text, issue.issue.summary, self.budget)
        polarity = mask_probabilities(self.backend, prompt)
        return self.models.dsea_head.predict_proba(sp_vector(polarity, features))

    def classify(self, s: Sentence, issue: SegmentedIssue) -> Tuple[bool, float]:
        score = self.score(s, issue)
        return score >= THRESHOLD, score


def classify_sentence(
    mode: str,
    s: Sentence,
    issue: SegmentedIssue,
    models: Models,
    backend: Optional[Backend] = None,
    budget: Optional[TokenBudget] = None,
) -> Tuple[bool, float]:
    return SentenceClassifier(mode, models, backend, budget).classify(s, issue)


# ============================================================
# DSPA
# ============================================================

def parse_label(text: str) -> RelationLabel:
    match = LABEL_PATTERN.search(text or "")
    if match is None:
        raise UnparsableResponse(f"No relation label in generation: {text!r}")
    return RelationLabel(match.group(1).lower())


def pick_label(scores: Dict[RelationLabel, float]) -> RelationLabel:
    best = TIE_ORDER[0]
    for label in TIE_ORDER[1:]:
        if scores[label] > scores[best]:
            best = label
    return best


def _relation(label: RelationLabel, s1: Sentence, s2: Sentence) -> Relation:
    # la primera oración es siempre el argumento
    if label == RelationLabel.SUPPORTING:
        return Relation(label, argument=s1.id, solution=s2.id)
    return Relation(label)


def classify_pair(
    backend: Backend,
    prompt: DspaPrompt,
    pf: PairFeatures,
    s1: Sentence,
    s2: Sentence,
    max_tokens: Optional[int] = None,
) -> Tuple[Relation, Dict[RelationLabel, float]]:
    if isinstance(backend, BaselineBackend):
        if backend.pair_model is None:
            raise ModelMissing("Baseline backend needs a dspa baseline model")
        raw = backend.pair_model.pair_scores(pair_vector(s1, s2, pf))
        scores = {RelationLabel(label): p for label, p in raw.items()}
        return _relation(pick_label(scores), s1, s2), scores

    if not backend.supports_generation:
        raise CapabilityUnsupported(f"{backend.name} backend does not generate text")

    generation = backend.generate(prompt.generation_prompt, max_tokens)
    label = parse_label(generation)
    scores = {other: 1.0 if other == label else 0.0 for other in RelationLabel}
    return _relation(label, s1, s2), scores
