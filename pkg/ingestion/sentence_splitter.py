import re
from typing import Iterable, List, Optional

DEFAULT_ABBREVIATIONS = ("e.g.", "i.e.", "etc.", "Mr.", "Dr.", "vs.")

# una racha de terminadores, cierres opcionales y después espacio o fin de texto
TERMINATOR = re.compile(r"[.!?]+[\"')\]]*(?=\s|\Z)")
PARAGRAPH_BREAK = re.compile(r"\n[ \t]*\n\s*")
BULLET_START = re.compile(r"\n(?=[ \t]*(?:[*#-]+|\d+[.)])[ \t]+\S)")


class SentenceSplitter:
    """
    Segmenta texto ya limpio en oraciones.
    Respeta abreviaturas configurables y nunca parte los tokens [code]/[URL].
    """

    def __init__(self, abbreviations: Optional[Iterable[str]] = None):
        source = abbreviations if abbreviations is not None else DEFAULT_ABBREVIATIONS
        self.abbreviations = {a.lower() for a in source}

    def _split_blocks(self, text: str) -> List[str]:
        blocks = []
        for paragraph in PARAGRAPH_BREAK.split(text):
            blocks.extend(BULLET_START.split(paragraph))
        return blocks

    def _is_abbreviation(self, block: str, start: int, end: int) -> bool:
        if block[start:end] != ".":
            return False
        token_start = max(block.rfind(" ", 0, start), block.rfind("\n", 0, start), block.rfind("\t", 0, start)) + 1
        token = block[token_start:end].lstrip("(\"'").lower()
        return token in self.abbreviations

    def _split_block(self, block: str) -> List[str]:
        sentences = []
        begin = 0

        for m in TERMINATOR.finditer(block):
            # m.start() apunta al primer terminador; los cierres van detrás
            run_end = m.start() + len(m.group(0).rstrip("\"')]"))
            if self._is_abbreviation(block, m.start(), run_end):
                continue
            sentences.append(block[begin:m.end()])
            begin = m.end()

        sentences.append(block[begin:])
        return sentences

    def split(self, text: str) -> List[str]:
        if not text or not text.strip():
            return []

        result = []
        for block in self._split_blocks(text):
            for raw in self._split_block(block):
                sentence = " ".join(raw.split())
                if sentence:
                    result.append(sentence)
        return result


_DEFAULT_SPLITTER = SentenceSplitter()


def segment_sentences(text: str) -> List[str]:
    return _DEFAULT_SPLITTER.split(text)
