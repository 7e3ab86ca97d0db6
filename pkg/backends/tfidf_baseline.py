import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.feature_extraction.text import TfidfVectorizer

from backends.base import Backend
from backends.linear_head import (
    BINARY,
    SOFTMAX,
    FingerprintMismatch,
    HeadHyperParams,
    HeadModel,
    read_json,
    train_head,
    write_json,
)
from features.pair_features import PAIR_VECTOR_NAMES
from features.sentence_features import FEATURE_NAMES

logger = logging.getLogger(__name__)

DSEA = "dsea"
DSPA = "dspa"
MIN_DF = 2
TFIDF_PREFIX = "tfidf:"


def tfidf_feature_names(vocabulary: Dict[str, int]) -> List[str]:
    return [TFIDF_PREFIX + token for token, _ in sorted(vocabulary.items(), key=lambda kv: kv[1])]


def expected_order(task: str, vocabulary: Dict[str, int]) -> List[str]:
    if task == DSEA:
        return tfidf_feature_names(vocabulary) + list(FEATURE_NAMES)
    return list(PAIR_VECTOR_NAMES)


@dataclass
class BaselineModel:
    """
    Modelo de referencia nativo:
      dsea -> TF-IDF del texto ⊕ 29 rasgos -> cabeza logística
      dspa -> vector de 6 rasgos del par -> cabeza softmax
    """

    task: str
    head: HeadModel
    vocabulary: Dict[str, int] = field(default_factory=dict)
    idf: List[float] = field(default_factory=list)
    seed: int = 0

    # ===============================
    # FEATURES
    # ===============================

    def tfidf(self, text: str) -> np.ndarray:
        vec = np.zeros(len(self.vocabulary))
        if not self.vocabulary:
            return vec
        for token in text.lower().split():
            idx = self.vocabulary.get(token)
            if idx is not None:
                vec[idx] += 1.0
        vec *= np.asarray(self.idf)
        norm = np.linalg.norm(vec)
        return vec / norm if norm > 0 else vec

    def sentence_vector(self, text: str, features: Sequence[float]) -> List[float]:
        return list(self.tfidf(text)) + [float(v) for v in features]

    # ===============================
    # INFERENCE
    # ===============================

    def score_sentence(self, text: str, features: Sequence[float]) -> float:
        return self.head.predict_proba(self.sentence_vector(text, features))

    def pair_scores(self, vector: Sequence[float]) -> Dict[str, float]:
        return dict(zip(self.head.labels, self.head.predict_proba(vector)))

    # ===============================
    # PERSISTENCE
    # ===============================

    def to_json(self) -> dict:
        return {
            "kind": "baseline",
            "task": self.task,
            "seed": self.seed,
            "vocabulary": dict(sorted(self.vocabulary.items(), key=lambda kv: kv[1])),
            "idf": list(self.idf),
            "head": self.head.to_json(),
        }

    def save(self, path: str) -> str:
        write_json(self.to_json(), path)
        return path

    @classmethod
    def load(cls, path: str, task: Optional[str] = None) -> "BaselineModel":
        data = read_json(path)
        if data.get("kind") != "baseline":
            raise FingerprintMismatch(f"{path} is not a baseline model")
        if task is not None and data.get("task") != task:
            raise FingerprintMismatch(f"{path} is a {data.get('task')} model, expected {task}")

        vocabulary = {k: int(v) for k, v in (data.get("vocabulary") or {}).items()}
        head = HeadModel.from_json(data["head"], expected_order(data["task"], vocabulary))
        return cls(
            task=data["task"],
            head=head,
            vocabulary=vocabulary,
            idf=[float(v) for v in data.get("idf") or []],
            seed=data.get("seed", 0),
        )


# -----------------------------
# Training
# -----------------------------

def fit_vocabulary(texts: Sequence[str], min_df: int = MIN_DF) -> Tuple[Dict[str, int], List[float]]:
    """
    Vocabulario (tokens por espacios, en minúsculas, df >= min_df) e idf suavizado
    ln((1+N)/(1+df)) + 1. Devuelve vacío si ningún token supera el filtro.
    """
    vectorizer = TfidfVectorizer(
        lowercase=True,
        tokenizer=str.split,
        token_pattern=None,
        min_df=min_df,
        smooth_idf=True,
        norm="l2",
    )
    try:
        vectorizer.fit(list(texts))
    except ValueError as e:
        logger.warning(f"Empty TF-IDF vocabulary ({e}); falling back to features only")
        return {}, []

    vocabulary = {token: int(idx) for token, idx in vectorizer.vocabulary_.items()}
    return vocabulary, [float(v) for v in vectorizer.idf_]


def train_baseline(
    samples: Sequence[Tuple[str, Sequence[float], Any]],
    hparams: Optional[HeadHyperParams] = None,
    seed: int = 0,
) -> BaselineModel:
    """samples: (texto, 29 rasgos, etiqueta 0/1)."""
    vocabulary, idf = fit_vocabulary([text for text, _, _ in samples])
    model = BaselineModel(task=DSEA, head=None, vocabulary=vocabulary, idf=idf, seed=seed)

    vectors = [(model.sentence_vector(text, feats), label) for text, feats, label in samples]
    model.head = train_head(
        vectors,
        hparams=hparams,
        seed=seed,
        feature_order=expected_order(DSEA, vocabulary),
        kind=BINARY,
    )
    return model


def train_pair_baseline(
    samples: Sequence[Tuple[Sequence[float], str]],
    labels: List[str],
    hparams: Optional[HeadHyperParams] = None,
    seed: int = 0,
) -> BaselineModel:
    """samples: (vector de 6 rasgos del par, etiqueta de relación)."""
    head = train_head(
        list(samples),
        hparams=hparams,
        seed=seed,
        feature_order=list(PAIR_VECTOR_NAMES),
        kind=SOFTMAX,
        labels=list(labels),
    )
    return BaselineModel(task=DSPA, head=head, seed=seed)


class BaselineBackend(Backend):
    """
    Backend nativo sin conexión: no puntúa máscaras ni genera texto;
    clasifica pares con su modelo dspa.
    """

    name = "baseline"

    def __init__(self, pair_model: Optional[BaselineModel] = None):
        self.pair_model = pair_model
