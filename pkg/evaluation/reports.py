import json
from typing import Dict, Iterable

import pandas as pd

from evaluation.annotations import LABELS, AnnotatedSentence
from evaluation.metrics import EvalReport, Score

TOTAL = "Total"


def summarize_dataset(records: Iterable[AnnotatedSentence]) -> pd.DataFrame:
    """Recuento de oraciones por proyecto y etiqueta, con fila de totales."""
    rows = [{"project": r.project, "label": r.label} for r in records]
    columns = list(LABELS) + ["total"]

    if not rows:
        return pd.DataFrame([{**dict.fromkeys(columns, 0)}], index=pd.Index([TOTAL], name="project"))[columns]

    df = pd.DataFrame(rows)
    table = pd.crosstab(df["project"], df["label"]).reindex(columns=list(LABELS), fill_value=0)
    table["total"] = table.sum(axis=1)
    table.loc[TOTAL] = table.sum(axis=0)
    table.columns.name = None
    return table.astype(int)


def eval_report_frame(report: EvalReport) -> pd.DataFrame:
    rows = []
    for level, score in (("rationale", report.rationale), ("solution", report.solution), ("argument", report.argument)):
        rows.append({"level": level, **score.as_dict()})
    return pd.DataFrame(rows).set_index("level")


def score_frame(scores: Dict[str, Score]) -> pd.DataFrame:
    return pd.DataFrame([{"name": name, **s.as_dict()} for name, s in scores.items()]).set_index("name")


def render_table(df: pd.DataFrame) -> str:
    return df.to_string(float_format=lambda v: f"{v:.4f}") + "\n"


def to_json(data) -> str:
    if isinstance(data, EvalReport):
        data = data.as_dict()
    elif isinstance(data, pd.DataFrame):
        data = json.loads(data.to_json(orient="index" if data.index.name else "records"))
    return json.dumps(data, indent=2, ensure_ascii=False) + "\n"
