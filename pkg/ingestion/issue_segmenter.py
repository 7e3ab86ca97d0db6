from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Tuple

from ingestion.issue_loader import IssueLog
from ingestion.sentence_splitter import SentenceSplitter
from ingestion.text_cleaner import TextCleaner

SUMMARY = "summary"
DESCRIPTION = "description"
COMMENT = "comment"


@dataclass(frozen=True)
class Sentence:
    id: str
    issue_key: str
    text: str
    source: str  # summary | description | comment
    comment_index: Optional[int]
    sentence_index_in_source: int
    global_index: int
    author: str

    @property
    def source_label(self) -> str:
        if self.source == COMMENT:
            return f"Comment({self.comment_index})"
        return self.source.capitalize()


@dataclass(frozen=True)
class SegmentedIssue:
    """Un issue limpio junto con sus oraciones enumeradas."""

    issue: IssueLog
    sentences: Tuple[Sentence, ...]

    @property
    def key(self) -> str:
        return self.issue.key

    @property
    def summary_sentence(self) -> Sentence:
        return self.sentences[0]

    @cached_property
    def by_id(self) -> Dict[str, Sentence]:
        return {s.id: s for s in self.sentences}

    @cached_property
    def _block_sizes(self) -> Counter:
        return Counter((s.source, s.comment_index) for s in self.sentences)

    def get(self, sentence_id: str) -> Sentence:
        return self.by_id[sentence_id]

    def block_size(self, s: Sentence) -> int:
        return self._block_sizes[(s.source, s.comment_index)]

    def contains(self, s: Sentence) -> bool:
        found = self.by_id.get(s.id)
        return found is not None and found == s


class IssueSegmenter:
    """
    Limpia un IssueLog y enumera sus oraciones:
    resumen -> descripción -> comentarios en orden cronológico.
    """

    def __init__(self, cleaner: Optional[TextCleaner] = None, splitter: Optional[SentenceSplitter] = None):
        self.cleaner = cleaner or TextCleaner()
        self.splitter = splitter or SentenceSplitter()

    def clean_issue(self, issue: IssueLog) -> IssueLog:
        return self.cleaner.clean_issue(issue)

    def enumerate_sentences(self, issue: IssueLog) -> List[Sentence]:
        sentences: List[Sentence] = []

        def emit(sentence_id, text, source, comment_index, position, author):
            sentences.append(
                Sentence(
                    id=sentence_id,
                    issue_key=issue.key,
                    text=text,
                    source=source,
                    comment_index=comment_index,
                    sentence_index_in_source=position,
                    global_index=len(sentences),
                    author=author,
                )
            )

        # el resumen es un título: una sola oración, nunca se segmenta
        emit("sum-s0", " ".join(issue.summary.split()), SUMMARY, None, 0, issue.reporter)

        for i, text in enumerate(self.splitter.split(issue.description)):
            emit(f"d-s{i}", text, DESCRIPTION, None, i, issue.reporter)

        for c in issue.comments:
            for i, text in enumerate(self.splitter.split(c.body)):
                emit(f"c{c.index}-s{i}", text, COMMENT, c.index, i, c.author)

        return sentences

    def segment(self, issue: IssueLog) -> SegmentedIssue:
        cleaned = self.clean_issue(issue)
        return SegmentedIssue(issue=cleaned, sentences=tuple(self.enumerate_sentences(cleaned)))


def enumerate_sentences(issue: IssueLog) -> List[Sentence]:
    return IssueSegmenter().enumerate_sentences(issue)
