from dataclasses import dataclass
from typing import List

from prompts.budget import BudgetExhausted, TokenBudget, fit_prefix

MASK_TOKEN = "[MASK]"
DSEA_TEMPLATE = "{sentence} is " + MASK_TOKEN + " related to the issue: {summary}"

# "is [MASK] related to the issue:" cuenta como 7 unidades; +1 por el token especial inicial
FIXED_DESCRIPTION_LEN = 7
RESERVED = FIXED_DESCRIPTION_LEN + 1


@dataclass(frozen=True)
class DseaPrompt:
    text: str
    sentence_tokens_used: int
    summary_tokens_used: int


def sentence_cap(summary_len: int, budget: TokenBudget) -> int:
    return budget.max_sequence - summary_len - RESERVED


def truncate_dsea(sentence_tokens: List[str], summary_len: int, budget: TokenBudget) -> List[str]:
    """
    Recorta la oración a L = max_sequence - summary_len - 8 tokens,
    conservando la cabeza de la oración.
    """
    if summary_len < 1:
        raise ValueError("summary_len must be >= 1")

    cap = sentence_cap(summary_len, budget)
    if cap < 1:
        raise BudgetExhausted(
            f"Summary of {summary_len} tokens leaves no room in a {budget.max_sequence}-token sequence"
        )
    return fit_prefix(sentence_tokens, cap, budget)


def _neutralize_mask(text: str) -> str:
    # el prompt debe contener exactamente un [MASK]
    return text.replace(MASK_TOKEN, "MASK")


def build_dsea_prompt(sentence: str, summary: str, budget: TokenBudget) -> DseaPrompt:
    summary = " ".join(_neutralize_mask(summary or "").split())
    if not summary:
        raise ValueError("summary must be non-empty")

    summary_len = budget.count(summary)
    kept = truncate_dsea(_neutralize_mask(sentence).split(), summary_len, budget)

    text = DSEA_TEMPLATE.format(sentence=" ".join(kept), summary=summary)
    used = len(kept) if budget.uses_whitespace else budget.count(" ".join(kept))
    return DseaPrompt(text=text, sentence_tokens_used=used, summary_tokens_used=summary_len)
