import logging
from dataclasses import dataclass
from typing import Any, Dict, Hashable, List, Optional, Sequence, Tuple

import pandas as pd

from backends.linear_head import HeadHyperParams, train_head
from evaluation.metrics import Score, eval_dsea
from features.sentence_features import DIMENSIONS, FEATURE_COUNT, mask_dimension

logger = logging.getLogger(__name__)

FULL = "full"


class UnknownDimension(KeyError):
    """Raised when an ablation names a feature dimension that does not exist."""


@dataclass(frozen=True)
class Sample:
    key: Hashable
    vector: Tuple[float, ...]
    label: int


@dataclass
class AblationDataset:
    """
    Vectores de entrada de la cabeza DSEA. Los 29 rasgos empiezan en `offset`
    (14 tras la polaridad, o el tamaño del vocabulario en el baseline).
    """

    train: List[Sample]
    test: List[Sample]
    offset: int = 14
    feature_order: Optional[List[str]] = None

    def __post_init__(self):
        for s in self.train + self.test:
            if len(s.vector) < self.offset + FEATURE_COUNT:
                raise ValueError(f"Vector for {s.key} is shorter than offset + {FEATURE_COUNT}")


@dataclass(frozen=True)
class AblationReport:
    dimension: str
    masked_slots: int
    score: Score


def masked_slots(dimension: str) -> int:
    if dimension not in DIMENSIONS:
        raise UnknownDimension(dimension)
    block = DIMENSIONS[dimension]
    return block.stop - block.start


def _mask(samples: List[Sample], dimension: Optional[str], offset: int) -> List[Sample]:
    if dimension is None:
        return samples
    return [Sample(s.key, tuple(mask_dimension(s.vector, dimension, offset)), s.label) for s in samples]


def _train_and_score(
    dataset: AblationDataset, dimension: Optional[str], hparams: Optional[HeadHyperParams], seed: int
) -> Score:
    train = _mask(dataset.train, dimension, dataset.offset)
    test = _mask(dataset.test, dimension, dataset.offset)

    head = train_head(
        [(s.vector, s.label) for s in train],
        hparams=hparams,
        seed=seed,
        feature_order=dataset.feature_order,
    )
    predicted = {s.key for s in test if head.predict_proba(s.vector) >= 0.5}
    gold = {s.key for s in test if s.label}
    return eval_dsea(predicted, gold)


def ablate(
    dataset: AblationDataset,
    dimension: str,
    hparams: Optional[HeadHyperParams] = None,
    seed: int = 0,
) -> AblationReport:
    """
    Anula las casillas de una dimensión en el bloque de 29 rasgos
    (la entrada de la cabeza conserva su anchura), reentrena y evalúa.
    """
    slots = masked_slots(dimension)
    score = _train_and_score(dataset, dimension, hparams, seed)
    logger.info(f"Ablation {dimension}: masked {slots} slots, F1={score.f1:.3f}")
    return AblationReport(dimension=dimension, masked_slots=slots, score=score)


def ablate_all(
    dataset: AblationDataset,
    hparams: Optional[HeadHyperParams] = None,
    seed: int = 0,
    dimensions: Optional[Sequence[str]] = None,
) -> pd.DataFrame:
    """Tabla con el modelo completo y una fila por dimensión eliminada."""
    full = _train_and_score(dataset, None, hparams, seed)
    rows = [_row(FULL, 0, full, full)]

    for dimension in dimensions or list(DIMENSIONS):
        report = ablate(dataset, dimension, hparams, seed)
        rows.append(_row(dimension, report.masked_slots, report.score, full))

    return pd.DataFrame(rows, columns=["dimension", "masked", "precision", "recall", "f1", "f1_drop_pct"])


def _row(name: str, slots: int, score: Score, full: Score) -> Dict[str, Any]:
    drop = 0.0 if full.f1 == 0 else (full.f1 - score.f1) / full.f1 * 100
    return {
        "dimension": name,
        "masked": slots,
        "precision": score.precision,
        "recall": score.recall,
        "f1": score.f1,
        "f1_drop_pct": drop,
    }
