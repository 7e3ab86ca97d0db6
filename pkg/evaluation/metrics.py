import re
from dataclasses import asdict, dataclass
from typing import Dict, Iterable, List, Optional, Set, Tuple

from rationale.rationale_builder import DesignRationale

SOLUTION = "solution"
ARGUMENT = "argument"


@dataclass(frozen=True)
class Score:
    precision: float
    recall: float
    f1: float
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def as_dict(self) -> Dict:
        return asdict(self)


def f1_score(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def score_from_counts(tp: int, n_pred: int, matched_gold: int, n_gold: int) -> Score:
    """
    tp sobre predicciones, matched_gold sobre la referencia.
    Ambos vacíos -> 1/1/1; sin predicciones -> 0/0/0; referencia vacía -> P 0, R 1.
    """
    fp = n_pred - tp
    fn = n_gold - matched_gold

    if n_pred == 0 and n_gold == 0:
        return Score(1.0, 1.0, 1.0, tp, fp, fn)
    if n_pred == 0:
        return Score(0.0, 0.0, 0.0, tp, fp, fn)

    precision = tp / n_pred
    recall = matched_gold / n_gold if n_gold else 1.0
    return Score(precision, recall, f1_score(precision, recall), tp, fp, fn)


# ============================================================
# DSEA
# ============================================================

def eval_dsea(pred: Iterable, gold: Iterable) -> Score:
    pred, gold = set(pred), set(gold)
    tp = len(pred & gold)
    return score_from_counts(tp, len(pred), tp, len(gold))


# ============================================================
# Rationale level
# ============================================================

def _solution_keys(r: DesignRationale) -> Set[Tuple[str, str]]:
    return {(r.issue_key, sid) for sid in r.solution}


def eval_rationales(pred: List[DesignRationale], gold: List[DesignRationale]) -> Score:
    """
    TP: predicción que comparte al menos una oración de solución con algún racional de referencia.
    Recall: racionales de referencia alcanzados / total de referencia.
    Sirve para un issue o para un corpus (las oraciones se comparan con su issue).
    """
    gold_keys = [_solution_keys(g) for g in gold]
    pred_keys = [_solution_keys(p) for p in pred]

    tp = sum(1 for p in pred_keys if any(p & g for g in gold_keys))
    matched = sum(1 for g in gold_keys if any(g & p for p in pred_keys))
    return score_from_counts(tp, len(pred), matched, len(gold))


# ============================================================
# Sentence level
# ============================================================

SENTENCE_ID = re.compile(r"^(?:(sum)|d|c(\d+))-s(\d+)$")


def sentence_order(sentence_id: str) -> Tuple[int, int, int, str]:
    """Orden global deducido del id: resumen, descripción, comentarios; ids ajenos al final."""
    m = SENTENCE_ID.match(sentence_id)
    if m is None:
        return (3, 0, 0, sentence_id)
    summary, comment, position = m.groups()
    if summary:
        return (0, 0, int(position), "")
    if comment is None:
        return (1, 0, int(position), "")
    return (2, int(comment), int(position), "")


def _tie_key(r: DesignRationale):
    return (
        sorted(sentence_order(sid) for sid in r.solution),
        sorted(sentence_order(sid) for sid in r.sentence_ids()),
    )


def map_prediction(p: DesignRationale, gold: List[DesignRationale]) -> Optional[DesignRationale]:
    """
    Racional de referencia con mayor solapamiento de soluciones;
    empate -> la solución con menor posición global; sin solapamiento -> None.
    No depende del orden de `gold`.
    """
    solution = set(p.solution)
    overlaps = [(len(solution & set(g.solution)), g) for g in gold if g.issue_key == p.issue_key]
    best_overlap = max((overlap for overlap, _ in overlaps), default=0)
    if best_overlap == 0:
        return None
    return min((g for overlap, g in overlaps if overlap == best_overlap), key=_tie_key)


def eval_sentences(pred: List[DesignRationale], gold: List[DesignRationale]) -> Dict[str, Score]:
    tp = {SOLUTION: 0, ARGUMENT: 0}
    n_pred = {SOLUTION: 0, ARGUMENT: 0}
    hit: Dict[str, Set[Tuple[str, str]]] = {SOLUTION: set(), ARGUMENT: set()}

    for p in pred:
        mapped = map_prediction(p, gold)
        targets = {
            SOLUTION: set(mapped.solution) if mapped else set(),
            ARGUMENT: {sid for group in mapped.arguments for sid in group} if mapped else set(),
        }
        predicted = {
            SOLUTION: list(p.solution),
            ARGUMENT: [sid for group in p.arguments for sid in group],
        }
        for category in (SOLUTION, ARGUMENT):
            for sid in predicted[category]:
                n_pred[category] += 1
                if sid in targets[category]:
                    tp[category] += 1
                    hit[category].add((p.issue_key, sid))

    n_gold = {
        SOLUTION: sum(len(g.solution) for g in gold),
        ARGUMENT: sum(len(group) for g in gold for group in g.arguments),
    }
    return {
        category: score_from_counts(tp[category], n_pred[category], len(hit[category]), n_gold[category])
        for category in (SOLUTION, ARGUMENT)
    }


@dataclass(frozen=True)
class EvalReport:
    rationale: Score
    solution: Score
    argument: Score

    def as_dict(self) -> Dict:
        return {
            "rationale": self.rationale.as_dict(),
            "solution": self.solution.as_dict(),
            "argument": self.argument.as_dict(),
        }


def evaluate(pred: List[DesignRationale], gold: List[DesignRationale]) -> EvalReport:
    sentences = eval_sentences(pred, gold)
    return EvalReport(
        rationale=eval_rationales(pred, gold),
        solution=sentences[SOLUTION],
        argument=sentences[ARGUMENT],
    )
