from dataclasses import dataclass
from typing import Callable, Dict, List

DSEA_MAX_SEQUENCE = 384
DSPA_MAX_SEQUENCE = 512
MIN_SEQUENCE = 16

WHITESPACE = "whitespace"

TokenCounter = Callable[[str], int]


class BudgetExhausted(ValueError):
    """Raised when the fixed parts of a prompt leave no room for the sentence."""


def whitespace_count(text: str) -> int:
    return len(text.split())


_COUNTERS: Dict[str, TokenCounter] = {WHITESPACE: whitespace_count}


def register_token_counter(name: str, counter: TokenCounter) -> None:
    """
    Registra un contador exacto (solo cuenta, no tokeniza) para un backend.
    """
    _COUNTERS[name] = counter


def get_token_counter(name: str) -> TokenCounter:
    try:
        return _COUNTERS[name]
    except KeyError:
        raise KeyError(f"Unknown token counter: {name}") from None


@dataclass(frozen=True)
class TokenBudget:
    max_sequence: int
    counter: str = WHITESPACE

    def __post_init__(self):
        if self.max_sequence <= MIN_SEQUENCE:
            raise ValueError(f"max_sequence must be > {MIN_SEQUENCE}, got {self.max_sequence}")
        get_token_counter(self.counter)

    def count(self, text: str) -> int:
        return get_token_counter(self.counter)(text)

    @property
    def uses_whitespace(self) -> bool:
        return self.counter == WHITESPACE


def fit_prefix(tokens: List[str], limit: int, budget: TokenBudget) -> List[str]:
    """
    Prefijo más largo de tokens (por espacios) cuyo conteo cabe en limit.
    """
    if budget.uses_whitespace:
        return tokens if len(tokens) <= limit else tokens[:limit]

    if budget.count(" ".join(tokens)) <= limit:
        return tokens

    # el conteo es monótono en la longitud del prefijo: búsqueda binaria
    lo, hi = 0, len(tokens)
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if budget.count(" ".join(tokens[:mid])) <= limit:
            lo = mid
        else:
            hi = mid - 1
    return tokens[:lo]
