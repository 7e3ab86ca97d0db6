import logging
import re
from functools import lru_cache
from typing import Iterable, List, Optional

from ingestion.issue_loader import Comment, IssueLog

logger = logging.getLogger(__name__)

CODE_TOKEN = "[code]"
URL_TOKEN = "[URL]"

DEFAULT_ENCODING = "cp1252"
DEFAULT_BOT_AUTHORS = (
    "hudson",
    "jenkins",
    "githubbot",
    "asfbot",
    "asf github bot",
    "flinkbot",
    "hadoop qa",
)
DEFAULT_BOT_MARKERS = ("bot",)
MAX_PASSES = 10

# {code}, {code:java}, {noformat} y bloques ``` ; sin cierre llegan al final del texto
CODE_PATTERNS = [
    re.compile(r"\{code(?::[^}]*)?\}.*?(?:\{code\}|\Z)", re.DOTALL),
    re.compile(r"\{noformat(?::[^}]*)?\}.*?(?:\{noformat\}|\Z)", re.DOTALL),
    re.compile(r"```.*?(?:```|\Z)", re.DOTALL),
]
QUOTE_BLOCK = re.compile(r"\{quote\}.*?(?:\{quote\}|\Z)", re.DOTALL)
QUOTE_LINE = re.compile(r"^[ \t]*>.*(?:\n|\Z)", re.MULTILINE)
URL_PATTERN = re.compile(
    r"(?:https?|ftp)://[^\s<>\"'\[\]|{}]*[^\s<>\"'\[\]|{}.,;:!?)]"
)


@lru_cache(maxsize=65536)
def _encodable(ch: str, encoding: str) -> bool:
    try:
        ch.encode(encoding)
        return True
    except UnicodeEncodeError:
        return False


class TextCleaner:
    """
    Aplica los filtros de preprocesado a los textos de un issue:
    caracteres no codificables, bloques de código, citas y URLs.
    """

    def __init__(
        self,
        encoding: str = DEFAULT_ENCODING,
        bot_authors: Optional[Iterable[str]] = None,
        bot_markers: Optional[Iterable[str]] = None,
    ):
        self.encoding = encoding
        self.bot_authors = {a.lower() for a in (bot_authors if bot_authors is not None else DEFAULT_BOT_AUTHORS)}
        self.bot_markers = tuple(m.lower() for m in (bot_markers if bot_markers is not None else DEFAULT_BOT_MARKERS))

    # -----------------------------
    # Text filters
    # -----------------------------

    def _drop_unencodable(self, text: str) -> str:
        return "".join(ch for ch in text if _encodable(ch, self.encoding))

    def _replace_code(self, text: str) -> str:
        for pattern in CODE_PATTERNS:
            text = pattern.sub(CODE_TOKEN, text)
        return text

    def _strip_quotes(self, text: str) -> str:
        text = QUOTE_BLOCK.sub("", text)
        return QUOTE_LINE.sub("", text)

    def _replace_urls(self, text: str) -> str:
        return URL_PATTERN.sub(URL_TOKEN, text)

    def _single_pass(self, text: str) -> str:
        text = self._replace_code(text)
        text = self._strip_quotes(text)
        return self._replace_urls(text)

    def clean(self, text: str) -> str:
        if not text:
            return ""
        text = self._drop_unencodable(text)

        # quitar una cita puede unir dos mitades de un marcador: repetimos hasta punto fijo
        for _ in range(MAX_PASSES):
            cleaned = self._single_pass(text)
            if cleaned == text:
                break
            text = cleaned
        return text

    # -----------------------------
    # Issue level
    # -----------------------------

    def is_bot(self, author: str) -> bool:
        name = (author or "").lower()
        if name in self.bot_authors:
            return True
        return any(marker in name for marker in self.bot_markers)

    def clean_issue(self, issue: IssueLog) -> IssueLog:
        kept: List[Comment] = []

        for c in issue.comments:
            if self.is_bot(c.author):
                logger.debug(f"{issue.key}: dropping bot comment #{c.index} by {c.author}")
                continue
            kept.append(Comment(index=c.index, author=c.author, timestamp=c.timestamp, body=self.clean(c.body)))

        summary = self.clean(issue.summary).strip() or issue.key
        cleaned = IssueLog(
            key=issue.key,
            project=issue.project,
            summary=summary,
            description=self.clean(issue.description),
            reporter=issue.reporter,
            created=issue.created,
        )
        return cleaned.with_comments(kept)


_DEFAULT_CLEANER = TextCleaner()


def clean_text(text: str) -> str:
    return _DEFAULT_CLEANER.clean(text)
