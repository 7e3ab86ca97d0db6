import json
import os
from typing import Dict, List, Mapping

from rationale.rationale_builder import DesignRationale


def _refs(ids, texts: Mapping[str, str]) -> List[Dict[str, str]]:
    return [{"id": sid, "text": texts.get(sid, "")} for sid in ids]


def rationales_to_dict(issue_key: str, rationales: List[DesignRationale], texts: Mapping[str, str]) -> Dict:
    return {
        "issue_key": issue_key,
        "rationales": [
            {
                "solution": _refs(r.solution, texts),
                "arguments": [_refs(group, texts) for group in r.arguments],
            }
            for r in rationales
        ],
    }


def rationales_to_json(issue_key: str, rationales: List[DesignRationale], texts: Mapping[str, str]) -> str:
    return json.dumps(rationales_to_dict(issue_key, rationales, texts), indent=2, ensure_ascii=False) + "\n"


def rationales_from_dict(data: Dict) -> List[DesignRationale]:
    key = data["issue_key"]
    return [
        DesignRationale(
            issue_key=key,
            solution=tuple(ref["id"] for ref in r["solution"]),
            arguments=tuple(tuple(ref["id"] for ref in group) for group in r["arguments"]),
        )
        for r in data["rationales"]
    ]


def render_markdown(issue_key: str, rationales: List[DesignRationale], texts: Mapping[str, str]) -> str:
    lines = [f"# {issue_key}", ""]
    if not rationales:
        lines.append("_No design rationales found._")

    for n, r in enumerate(rationales, start=1):
        lines.append(f"## Rationale {n}")
        lines.append("")
        lines.append("- **Solution**")
        lines.extend(f"  - {texts.get(sid, sid)}" for sid in r.solution)
        if r.arguments:
            lines.append("- **Arguments**")
            for m, group in enumerate(r.arguments, start=1):
                lines.append(f"  - Argument {m}")
                lines.extend(f"    - {texts.get(sid, sid)}" for sid in group)
        lines.append("")

    return "\n".join(lines).rstrip("\n") + "\n"


def render_repair_context(issue_key: str, rationales: List[DesignRationale], texts: Mapping[str, str]) -> str:
    """
    Bloque de texto plano con cada solución y sus argumentos,
    pensado para pegarlo en un prompt de reparación de programas.
    """
    lines = [f"Design rationales discussed in {issue_key}:"]
    if not rationales:
        lines.append("(none)")

    for n, r in enumerate(rationales, start=1):
        lines.append(f"Solution {n}: " + " ".join(texts.get(sid, sid) for sid in r.solution))
        for m, group in enumerate(r.arguments, start=1):
            lines.append(f"  Argument {n}.{m}: " + " ".join(texts.get(sid, sid) for sid in group))

    return "\n".join(lines) + "\n"


def write_text(content: str, path: str) -> str:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(content)
    return path
