import json
import logging
import os
import re
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from typing import Dict, List, Tuple

logger = logging.getLogger(__name__)

REQUIRED_FIELDS = ("key", "summary")

_JIRA_OFFSET = re.compile(r"([+-]\d{2})(\d{2})$")


class MalformedExport(ValueError):
    """Raised when an issue export lacks a mandatory field or is not an object."""


class BadTimestamp(ValueError):
    """Raised when a timestamp cannot be parsed as ISO-8601."""


@dataclass(frozen=True)
class Comment:
    index: int
    author: str
    timestamp: datetime
    body: str


@dataclass(frozen=True)
class IssueLog:
    key: str
    project: str
    summary: str
    description: str
    reporter: str
    created: datetime
    comments: Tuple[Comment, ...] = field(default_factory=tuple)

    def comments_by(self, author: str) -> int:
        return sum(1 for c in self.comments if c.author == author)

    def with_comments(self, comments: List[Comment]) -> "IssueLog":
        """Devuelve una copia con los comentarios re-indexados (0..n-1)."""
        reindexed = tuple(replace(c, index=i) for i, c in enumerate(comments))
        return replace(self, comments=reindexed)


# -----------------------------
# Timestamp helpers
# -----------------------------

def parse_timestamp(value) -> datetime:
    if not isinstance(value, str) or not value.strip():
        raise BadTimestamp(f"Unparseable timestamp: {value!r}")

    text = value.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    # Jira escribe los offsets como +0000
    text = _JIRA_OFFSET.sub(r"\1:\2", text)

    try:
        parsed = datetime.fromisoformat(text)
    except ValueError as e:
        raise BadTimestamp(f"Unparseable timestamp: {value!r}") from e

    if parsed.tzinfo is None:
        parsed = parsed.replace(tzinfo=timezone.utc)
    return parsed


def format_timestamp(value: datetime) -> str:
    return value.isoformat(timespec="milliseconds")


# -----------------------------
# Public API
# -----------------------------

def parse_issue(raw: Dict) -> IssueLog:
    """
    Convierte un export JSON de Jira (formato del corpus) en un IssueLog.
    Los comentarios quedan ordenados cronológicamente.
    """
    if not isinstance(raw, dict):
        raise MalformedExport("Issue export must be a JSON object")

    for name in REQUIRED_FIELDS:
        value = raw.get(name)
        if not isinstance(value, str) or not value.strip():
            raise MalformedExport(f"Issue export is missing '{name}'")

    key = raw["key"].strip()
    project = raw.get("project") or key.split("-")[0]
    reporter = raw.get("reporter") or ""
    created = parse_timestamp(raw["created"]) if raw.get("created") else datetime.fromtimestamp(0, timezone.utc)

    comments = []
    for position, c in enumerate(raw.get("comments") or []):
        if not isinstance(c, dict):
            raise MalformedExport(f"{key}: comment #{position} is not an object")
        comments.append(
            Comment(
                index=position,
                author=c.get("author") or "",
                timestamp=parse_timestamp(c.get("created")),
                body=c.get("body") or "",
            )
        )

    # sorted() es estable: empates conservan el orden del export
    comments = sorted(comments, key=lambda c: c.timestamp)

    issue = IssueLog(
        key=key,
        project=project,
        summary=raw["summary"],
        description=raw.get("description") or "",
        reporter=reporter,
        created=created,
    )
    return issue.with_comments(comments)


def issue_to_dict(issue: IssueLog) -> Dict:
    return {
        "key": issue.key,
        "project": issue.project,
        "summary": issue.summary,
        "description": issue.description,
        "reporter": issue.reporter,
        "created": format_timestamp(issue.created),
        "comments": [
            {
                "author": c.author,
                "created": format_timestamp(c.timestamp),
                "body": c.body,
            }
            for c in issue.comments
        ],
    }


def load_issue(path: str) -> IssueLog:
    with open(path, "r", encoding="utf-8") as f:
        try:
            raw = json.load(f)
        except json.JSONDecodeError as e:
            raise MalformedExport(f"{path}: invalid JSON ({e})") from e
    return parse_issue(raw)


def load_corpus(corpus_dir: str) -> List[IssueLog]:
    """
    Carga todos los *.json del directorio. Las claves deben ser únicas.
    """
    issues: Dict[str, IssueLog] = {}

    for name in sorted(os.listdir(corpus_dir)):
        if not name.endswith(".json"):
            continue
        issue = load_issue(os.path.join(corpus_dir, name))
        if issue.key in issues:
            raise MalformedExport(f"Duplicate issue key in corpus: {issue.key}")
        issues[issue.key] = issue

    logger.info(f"Loaded {len(issues)} issues from {corpus_dir}")
    return [issues[k] for k in sorted(issues)]


def write_issue(issue: IssueLog, output_dir: str) -> str:
    os.makedirs(output_dir, exist_ok=True)
    output_path = os.path.join(output_dir, f"{issue.key}.json")

    with open(output_path, "w", encoding="utf-8") as f:
        json.dump(issue_to_dict(issue), f, indent=2, ensure_ascii=False)
        f.write("\n")

    return output_path
