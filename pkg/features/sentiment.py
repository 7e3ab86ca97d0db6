import logging
import math
import os
import string
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional

from vaderSentiment import vaderSentiment as vader_module

logger = logging.getLogger(__name__)

# léxico publicado, distribuido con el paquete vaderSentiment
DEFAULT_LEXICON_PATH = os.path.join(os.path.dirname(vader_module.__file__), "vader_lexicon.txt")

# incrementos empíricos de VADER
B_INCR = 0.293
B_DECR = -0.293
C_INCR = 0.733
N_SCALAR = -0.74
ALPHA = 15

EP_WEIGHT = 0.292
EP_MAX = 4
QM_WEIGHT = 0.18
QM_MAX_AMPLIFIER = 0.96

NEGATE = {
    "aint", "arent", "cannot", "cant", "couldnt", "darent", "didnt", "doesnt",
    "ain't", "aren't", "can't", "couldn't", "daren't", "didn't", "doesn't",
    "dont", "hadnt", "hasnt", "havent", "isnt", "mightnt", "mustnt", "neither",
    "don't", "hadn't", "hasn't", "haven't", "isn't", "mightn't", "mustn't",
    "neednt", "needn't", "never", "none", "nope", "nor", "not", "nothing", "nowhere",
    "oughtnt", "shant", "shouldnt", "uhuh", "wasnt", "werent",
    "oughtn't", "shan't", "shouldn't", "uh-uh", "wasn't", "weren't",
    "without", "wont", "wouldnt", "won't", "wouldn't", "rarely", "seldom", "despite",
}

BOOSTER_DICT = {
    **dict.fromkeys(
        [
            "absolutely", "amazingly", "awfully", "completely", "considerable", "considerably",
            "decidedly", "deeply", "effing", "enormous", "enormously", "entirely", "especially",
            "exceptional", "exceptionally", "extreme", "extremely", "fabulously", "flipping",
            "flippin", "frackin", "fracking", "fricking", "frickin", "frigging", "friggin",
            "fully", "fuckin", "fucking", "fuggin", "fugging", "greatly", "hella", "highly",
            "hugely", "incredible", "incredibly", "intensely", "major", "majorly", "more", "most",
            "particularly", "purely", "quite", "really", "remarkably", "so", "substantially",
            "thoroughly", "total", "totally", "tremendous", "tremendously", "uber",
            "unbelievably", "unusually", "utter", "utterly", "very",
        ],
        B_INCR,
    ),
    **dict.fromkeys(
        [
            "almost", "barely", "hardly", "just enough", "kind of", "kinda", "kindof", "kind-of",
            "less", "little", "marginal", "marginally", "occasional", "occasionally", "partly",
            "scarce", "scarcely", "slight", "slightly", "somewhat", "sort of", "sorta", "sortof",
            "sort-of",
        ],
        B_DECR,
    ),
}

SPECIAL_CASES = {
    "the shit": 3, "the bomb": 3, "bad ass": 1.5, "badass": 1.5, "bus stop": 0.0,
    "yeah right": -2, "kiss of death": -1.5, "to die for": 3,
    "beating heart": 3.1, "broken heart": -2.9,
    "cut the mustard": 2, "hand to mouth": -2, "back handed": -2, "blow smoke": -2,
    "blowing smoke": -2, "upper hand": 1, "break a leg": 2, "cooking with gas": 2,
    "in the black": 2, "in the red": -2, "on the ball": 2, "under the weather": -2,
}


class MissingLexicon(FileNotFoundError):
    """Raised when the sentiment lexicon file is absent."""


@dataclass(frozen=True)
class SentimentScores:
    pos: float
    neu: float
    neg: float
    compound: float

    def as_list(self) -> List[float]:
        return [self.pos, self.neu, self.neg, self.compound]


NEUTRAL = SentimentScores(pos=0.0, neu=1.0, neg=0.0, compound=0.0)


# -----------------------------
# Lexicon
# -----------------------------

@lru_cache(maxsize=8)
def load_lexicon(path: str = DEFAULT_LEXICON_PATH) -> Dict[str, float]:
    """
    Lee un léxico en formato VADER: token<TAB>valencia[<TAB>...].
    Se carga una sola vez por ruta y se comparte en modo lectura.
    """
    if not os.path.isfile(path):
        raise MissingLexicon(f"Sentiment lexicon not found: {path}")

    lexicon = {}
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) < 2:
                continue
            lexicon[parts[0]] = float(parts[1])

    logger.info(f"Loaded {len(lexicon)} lexicon entries from {path}")
    return lexicon


# -----------------------------
# Helpers
# -----------------------------

def negated(word: str) -> bool:
    word = word.lower()
    return word in NEGATE or "n't" in word


def normalize(score: float, alpha: float = ALPHA) -> float:
    norm = score / math.sqrt(score * score + alpha)
    return max(-1.0, min(1.0, norm))


def _strip_punc_if_word(token: str) -> str:
    stripped = token.strip(string.punctuation)
    # emoticonos y tokens cortos se quedan como están
    if len(stripped) <= 2:
        return token
    return stripped


def _allcap_differential(words: List[str]) -> bool:
    allcaps = sum(1 for w in words if w.isupper())
    return 0 < len(words) - allcaps < len(words)


def _scalar_inc_dec(word: str, valence: float, is_cap_diff: bool) -> float:
    scalar = BOOSTER_DICT.get(word.lower(), 0.0)
    if scalar == 0.0:
        return 0.0
    if valence < 0:
        scalar *= -1
    if word.isupper() and is_cap_diff:
        scalar = scalar + C_INCR if valence > 0 else scalar - C_INCR
    return scalar


class SentimentScorer:
    """
    Re-creación de las reglas de VADER (léxico + heurísticas).
    Las puntuaciones no se redondean.
    """

    def __init__(self, lexicon_path: Optional[str] = None):
        self.lexicon_path = lexicon_path or DEFAULT_LEXICON_PATH
        self.lexicon = load_lexicon(self.lexicon_path)

    # ===============================
    # PUBLIC API
    # ===============================

    def score(self, text: str) -> SentimentScores:
        words = [_strip_punc_if_word(t) for t in (text or "").split()]
        if not words:
            return NEUTRAL

        is_cap_diff = _allcap_differential(words)
        lowered = [w.lower() for w in words]
        sentiments: List[float] = []

        for i, item in enumerate(words):
            if lowered[i] in BOOSTER_DICT:
                sentiments.append(0.0)
                continue
            if i < len(words) - 1 and lowered[i] == "kind" and lowered[i + 1] == "of":
                sentiments.append(0.0)
                continue
            sentiments.append(self._valence(words, lowered, i, is_cap_diff))

        sentiments = self._but_check(lowered, sentiments)
        return self._score_valence(sentiments, text)

    # ===============================
    # RULES
    # ===============================

    def _valence(self, words: List[str], lowered: List[str], i: int, is_cap_diff: bool) -> float:
        item = words[i]
        item_lower = lowered[i]
        if item_lower not in self.lexicon:
            return 0.0

        valence = self.lexicon[item_lower]

        # "no" delante de otra palabra del léxico actúa como negador
        if item_lower == "no" and i != len(words) - 1 and lowered[i + 1] in self.lexicon:
            valence = 0.0
        if (
            (i > 0 and lowered[i - 1] == "no")
            or (i > 1 and lowered[i - 2] == "no")
            or (i > 2 and lowered[i - 3] == "no" and lowered[i - 1] in ("or", "nor"))
        ):
            valence = self.lexicon[item_lower] * N_SCALAR

        if item.isupper() and is_cap_diff:
            valence = valence + C_INCR if valence > 0 else valence - C_INCR

        for start_i in range(3):
            if i > start_i and lowered[i - (start_i + 1)] not in self.lexicon:
                s = _scalar_inc_dec(words[i - (start_i + 1)], valence, is_cap_diff)
                if start_i == 1 and s != 0:
                    s *= 0.95
                if start_i == 2 and s != 0:
                    s *= 0.9
                valence += s
                valence = self._negation_check(valence, lowered, start_i, i)
                if start_i == 2:
                    valence = self._special_idioms_check(valence, lowered, i)

        return self._least_check(valence, lowered, i)

    @staticmethod
    def _negation_check(valence: float, lowered: List[str], start_i: int, i: int) -> float:
        if start_i == 0:
            if negated(lowered[i - 1]):
                valence *= N_SCALAR
        elif start_i == 1:
            if lowered[i - 2] == "never" and lowered[i - 1] in ("so", "this"):
                valence *= 1.25
            elif lowered[i - 2] == "without" and lowered[i - 1] == "doubt":
                pass
            elif negated(lowered[i - 2]):
                valence *= N_SCALAR
        else:
            if (lowered[i - 3] == "never" and lowered[i - 2] in ("so", "this")) or lowered[i - 1] in ("so", "this"):
                valence *= 1.25
            elif lowered[i - 3] == "without" and "doubt" in (lowered[i - 2], lowered[i - 1]):
                pass
            elif negated(lowered[i - 3]):
                valence *= N_SCALAR
        return valence

    @staticmethod
    def _special_idioms_check(valence: float, lowered: List[str], i: int) -> float:
        onezero = f"{lowered[i - 1]} {lowered[i]}"
        twoonezero = f"{lowered[i - 2]} {lowered[i - 1]} {lowered[i]}"
        twoone = f"{lowered[i - 2]} {lowered[i - 1]}"
        threetwoone = f"{lowered[i - 3]} {lowered[i - 2]} {lowered[i - 1]}"
        threetwo = f"{lowered[i - 3]} {lowered[i - 2]}"

        for seq in (onezero, twoonezero, twoone, threetwoone, threetwo):
            if seq in SPECIAL_CASES:
                valence = SPECIAL_CASES[seq]
                break

        if len(lowered) - 1 > i:
            zeroone = f"{lowered[i]} {lowered[i + 1]}"
            if zeroone in SPECIAL_CASES:
                valence = SPECIAL_CASES[zeroone]
        if len(lowered) - 1 > i + 1:
            zeroonetwo = f"{lowered[i]} {lowered[i + 1]} {lowered[i + 2]}"
            if zeroonetwo in SPECIAL_CASES:
                valence = SPECIAL_CASES[zeroonetwo]

        # bigramas atenuadores tipo "kind of" / "sort of"
        for n_gram in (threetwoone, threetwo, twoone):
            if n_gram in BOOSTER_DICT:
                valence += BOOSTER_DICT[n_gram]
        return valence

    def _least_check(self, valence: float, lowered: List[str], i: int) -> float:
        if i > 1 and lowered[i - 1] not in self.lexicon and lowered[i - 1] == "least":
            if lowered[i - 2] not in ("at", "very"):
                valence *= N_SCALAR
        elif i > 0 and lowered[i - 1] not in self.lexicon and lowered[i - 1] == "least":
            valence *= N_SCALAR
        return valence

    @staticmethod
    def _but_check(lowered: List[str], sentiments: List[float]) -> List[float]:
        if "but" not in lowered:
            return sentiments
        bi = lowered.index("but")
        return [
            s * 0.5 if si < bi else s * 1.5 if si > bi else s
            for si, s in enumerate(sentiments)
        ]

    @staticmethod
    def _punctuation_emphasis(text: str) -> float:
        ep_amplifier = min(text.count("!"), EP_MAX) * EP_WEIGHT
        qm_count = text.count("?")
        qm_amplifier = 0.0
        if qm_count > 1:
            qm_amplifier = qm_count * QM_WEIGHT if qm_count <= 3 else QM_MAX_AMPLIFIER
        return ep_amplifier + qm_amplifier

    def _score_valence(self, sentiments: List[float], text: str) -> SentimentScores:
        amplifier = self._punctuation_emphasis(text)

        sum_s = float(sum(sentiments))
        if sum_s > 0:
            sum_s += amplifier
        elif sum_s < 0:
            sum_s -= amplifier
        compound = normalize(sum_s)

        pos_sum = sum(s + 1 for s in sentiments if s > 0)
        neg_sum = sum(s - 1 for s in sentiments if s < 0)
        neu_count = sum(1 for s in sentiments if s == 0)

        if pos_sum > abs(neg_sum):
            pos_sum += amplifier
        elif pos_sum < abs(neg_sum):
            neg_sum -= amplifier

        total = pos_sum + abs(neg_sum) + neu_count
        if total == 0:
            return NEUTRAL

        return SentimentScores(
            pos=abs(pos_sum / total),
            neu=abs(neu_count / total),
            neg=abs(neg_sum / total),
            compound=compound,
        )


@lru_cache(maxsize=8)
def _scorer_for(lexicon_path: str) -> SentimentScorer:
    return SentimentScorer(lexicon_path)


def sentiment_scores(sentence: str, lexicon_path: Optional[str] = None) -> SentimentScores:
    return _scorer_for(lexicon_path or DEFAULT_LEXICON_PATH).score(sentence)
