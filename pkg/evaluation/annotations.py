import json
import logging
import os
from collections import defaultdict
from dataclasses import asdict, dataclass, replace
from typing import Dict, Iterable, List, Optional, Set, Tuple

from rationale.rationale_builder import DesignRationale

logger = logging.getLogger(__name__)

SOLUTION = "solution"
ARGUMENT = "argument"
UNRELATED = "unrelated"
LABELS = (SOLUTION, ARGUMENT, UNRELATED)

SentenceKey = Tuple[str, str]


class AnnotationError(ValueError):
    """Raised when an annotation record breaks the dataset schema."""


class CoverageMismatch(ValueError):
    """Raised when annotator streams do not cover the same sentences."""


@dataclass(frozen=True)
class AnnotatedSentence:
    issue_key: str
    sentence_id: str
    text: str
    label: str
    rationale_id: Optional[str] = None
    argument_group_id: Optional[str] = None
    project: Optional[str] = None
    global_index: Optional[int] = None

    def __post_init__(self):
        if self.label not in LABELS:
            raise AnnotationError(f"{self.issue_key}/{self.sentence_id}: unknown label {self.label!r}")
        if self.label != UNRELATED and not self.rationale_id:
            raise AnnotationError(f"{self.issue_key}/{self.sentence_id}: {self.label} needs a rationale_id")
        if (self.label == ARGUMENT) != bool(self.argument_group_id):
            raise AnnotationError(
                f"{self.issue_key}/{self.sentence_id}: argument_group_id is required iff label is argument"
            )
        if self.project is None:
            object.__setattr__(self, "project", self.issue_key.split("-")[0])

    @property
    def key(self) -> SentenceKey:
        return self.issue_key, self.sentence_id

    def to_json(self) -> Dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_json(cls, data: Dict) -> "AnnotatedSentence":
        try:
            return cls(
                issue_key=data["issue_key"],
                sentence_id=data["sentence_id"],
                text=data.get("text", ""),
                label=data["label"],
                rationale_id=data.get("rationale_id"),
                argument_group_id=data.get("argument_group_id"),
                project=data.get("project"),
                global_index=data.get("global_index"),
            )
        except KeyError as e:
            raise AnnotationError(f"Annotation record is missing {e}") from e


# -----------------------------
# IO
# -----------------------------

def _read_jsonl(path: str) -> List[AnnotatedSentence]:
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for n, line in enumerate(f, start=1):
            if not line.strip():
                continue
            try:
                data = json.loads(line)
            except json.JSONDecodeError as e:
                raise AnnotationError(f"{path}:{n}: invalid JSON ({e})") from e
            records.append(AnnotatedSentence.from_json(data))
    return records


def load_annotations(path: str) -> List[AnnotatedSentence]:
    """Un fichero .jsonl o un directorio de ellos."""
    if os.path.isdir(path):
        records = []
        for name in sorted(os.listdir(path)):
            if name.endswith(".jsonl"):
                records.extend(_read_jsonl(os.path.join(path, name)))
    else:
        records = _read_jsonl(path)

    validate_annotations(records)
    logger.info(f"Loaded {len(records)} annotated sentences from {path}")
    return records


def write_annotations(records: Iterable[AnnotatedSentence], path: str) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        for r in records:
            f.write(json.dumps(r.to_json(), ensure_ascii=False) + "\n")
    return path


def validate_annotations(records: List[AnnotatedSentence]) -> None:
    seen: Set[SentenceKey] = set()
    solutions: Dict[Tuple[str, str], int] = defaultdict(int)
    rationale_ids: Set[Tuple[str, str]] = set()
    group_owner: Dict[Tuple[str, str], str] = {}

    for r in records:
        if r.key in seen:
            raise AnnotationError(f"Duplicate annotation for {r.issue_key}/{r.sentence_id}")
        seen.add(r.key)

        if r.label == UNRELATED:
            continue
        rationale_ids.add((r.issue_key, r.rationale_id))
        if r.label == SOLUTION:
            solutions[(r.issue_key, r.rationale_id)] += 1
        else:
            owner = group_owner.setdefault((r.issue_key, r.argument_group_id), r.rationale_id)
            if owner != r.rationale_id:
                raise AnnotationError(
                    f"{r.issue_key}: argument group {r.argument_group_id} spans rationales {owner} and {r.rationale_id}"
                )

    for issue_key, rationale_id in sorted(rationale_ids):
        if solutions[(issue_key, rationale_id)] == 0:
            raise AnnotationError(f"{issue_key}: rationale {rationale_id} has no solution sentence")


# -----------------------------
# Derived views
# -----------------------------

def by_issue(records: Iterable[AnnotatedSentence]) -> Dict[str, List[AnnotatedSentence]]:
    grouped: Dict[str, List[AnnotatedSentence]] = defaultdict(list)
    for r in records:
        grouped[r.issue_key].append(r)
    return dict(grouped)


def _position(records: List[AnnotatedSentence]) -> Dict[str, int]:
    # sin global_index se usa el orden del fichero
    return {
        r.sentence_id: r.global_index if r.global_index is not None else n
        for n, r in enumerate(records)
    }


def gold_rationales(records: Iterable[AnnotatedSentence]) -> Dict[str, List[DesignRationale]]:
    """Racionales de referencia por issue, ordenados por la primera oración de su solución."""
    result = {}
    for issue_key, items in by_issue(records).items():
        position = _position(items)
        solutions: Dict[str, List[str]] = defaultdict(list)
        groups: Dict[str, Dict[str, List[str]]] = defaultdict(lambda: defaultdict(list))

        for r in items:
            if r.label == SOLUTION:
                solutions[r.rationale_id].append(r.sentence_id)
            elif r.label == ARGUMENT:
                groups[r.rationale_id][r.argument_group_id].append(r.sentence_id)

        rationales = []
        for rationale_id, solution in solutions.items():
            ordered = tuple(sorted(solution, key=position.get))
            arguments = sorted(
                (tuple(sorted(g, key=position.get)) for g in groups[rationale_id].values()),
                key=lambda g: position[g[0]],
            )
            rationales.append(DesignRationale(issue_key=issue_key, solution=ordered, arguments=tuple(arguments)))

        result[issue_key] = sorted(rationales, key=lambda r: position[r.solution[0]])
    return result


def design_related_ids(records: Iterable[AnnotatedSentence]) -> Set[SentenceKey]:
    return {r.key for r in records if r.label != UNRELATED}


def sentence_training_labels(records: Iterable[AnnotatedSentence]) -> Dict[SentenceKey, int]:
    return {r.key: int(r.label != UNRELATED) for r in records}


def pair_label(first: AnnotatedSentence, second: AnnotatedSentence) -> str:
    """Relación de un par ordenado de oraciones de diseño del mismo issue."""
    same_rationale = first.rationale_id == second.rationale_id
    if same_rationale and first.label == ARGUMENT and second.label == SOLUTION:
        return "supporting"
    if same_rationale and first.label == SOLUTION and second.label == SOLUTION:
        return "complementary"
    if same_rationale and first.label == ARGUMENT and second.label == ARGUMENT:
        if first.argument_group_id == second.argument_group_id:
            return "complementary"
    return "unrelated"


def pair_training_samples(records: Iterable[AnnotatedSentence]) -> List[Tuple[str, str, str, str]]:
    """(issue, id1, id2, relación) para cada par ordenado de oraciones de diseño."""
    samples = []
    for issue_key, items in by_issue(records).items():
        design = [r for r in items if r.label != UNRELATED]
        for first in design:
            for second in design:
                if first.sentence_id != second.sentence_id:
                    samples.append((issue_key, first.sentence_id, second.sentence_id, pair_label(first, second)))
    return samples


# -----------------------------
# Adjudication
# -----------------------------

def adjudicate(
    ann_a: Iterable[AnnotatedSentence],
    ann_b: Iterable[AnnotatedSentence],
    expert: Iterable[AnnotatedSentence],
) -> List[AnnotatedSentence]:
    """
    Voto mayoritario por oración. Los ids de racional/grupo salen del lado
    mayoritario (experto primero, luego a, luego b); en un empate a tres gana el experto.
    """
    a = {r.key: r for r in ann_a}
    b = {r.key: r for r in ann_b}
    expert = list(expert)
    e = {r.key: r for r in expert}

    if not (set(a) == set(b) == set(e)):
        missing = (set(a) | set(b) | set(e)) - (set(a) & set(b) & set(e))
        sample = ", ".join(f"{k[0]}/{k[1]}" for k in sorted(missing)[:5])
        raise CoverageMismatch(f"Annotation streams cover different sentences: {sample}")

    final = []
    for r in expert:
        voters = [e[r.key], a[r.key], b[r.key]]
        labels = [v.label for v in voters]
        majority = next((label for label in labels if labels.count(label) >= 2), None)

        if majority is None:
            final.append(e[r.key])
            continue
        chosen = next(v for v in voters if v.label == majority)
        final.append(replace(chosen, text=e[r.key].text or chosen.text))

    return final
