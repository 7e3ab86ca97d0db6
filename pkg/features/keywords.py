import re
from typing import Dict, FrozenSet, List

WORD = re.compile(r"[a-z]+")

INTERROGATIVES = ("what", "why", "when", "who", "which", "how")

# grupos de palabras completas; una subcadena de otra palabra no cuenta
WORD_GROUPS: Dict[str, FrozenSet[str]] = {
    "modal_should_shall": frozenset({"should", "shall"}),
    "modal_can_could": frozenset({"can", "could"}),
    "modal_may_might": frozenset({"may", "might"}),
}
CUE_GROUPS: Dict[str, FrozenSet[str]] = {
    "greeting": frozenset({"hi", "hello", "bye", "thanks", "thx", "thank"}),
    "causal": frozenset({"so", "therefore", "then"}),
    "transitional": frozenset({"but", "yet", "however"}),
}

KEYWORD_NAMES = (
    list(INTERROGATIVES)
    + list(WORD_GROUPS)
    + ["qmark", "bang"]
    + list(CUE_GROUPS)
)


def keyword_flags(sentence: str) -> List[bool]:
    """
    Devuelve las 14 banderas de palabras clave en el orden de KEYWORD_NAMES.
    Coincidencia de palabra completa sobre el texto en casefold.
    """
    text = (sentence or "").casefold()
    words = set(WORD.findall(text))

    flags = [w in words for w in INTERROGATIVES]
    flags += [bool(words & group) for group in WORD_GROUPS.values()]
    flags += ["?" in text, "!" in text]
    flags += [bool(words & group) for group in CUE_GROUPS.values()]
    return flags


def keyword_dict(sentence: str) -> Dict[str, bool]:
    return dict(zip(KEYWORD_NAMES, keyword_flags(sentence)))
