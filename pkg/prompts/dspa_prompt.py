from dataclasses import dataclass
from typing import List, Tuple

from features.pair_features import PairFeatures
from ingestion.issue_segmenter import Sentence
from prompts.budget import BudgetExhausted, TokenBudget, fit_prefix

INSTRUCTION = (
    "The following two sentences may be argument or solution for an issue. "
    "Is their relationship argument-solution supporting, complementary, or unrelated?"
)
LABEL_SLOT = "[LABEL]"

INSTRUCTION_HEADER = "### Instruction:\n"
INPUT_HEADER = "### Input:\n"
RESPONSE_HEADER = "### Response:\n"

INPUT_TEMPLATE = "Sentence 1: {s1}\nSentence 2: {s2}\n{clause}"
CLAUSE_TEMPLATE = "Two sentences are {where} the same comment and their distance is {distance}."


@dataclass(frozen=True)
class DspaPrompt:
    instruction: str
    input: str
    template_len: int
    s1_tokens_used: int
    s2_tokens_used: int
    response_slot: str = LABEL_SLOT

    @property
    def generation_prompt(self) -> str:
        """Lo que se envía al generador: todo hasta la cabecera de respuesta."""
        return f"{INSTRUCTION_HEADER}{self.instruction}\n{INPUT_HEADER}{self.input}\n{RESPONSE_HEADER}"

    @property
    def text(self) -> str:
        return self.generation_prompt + self.response_slot


def feature_clause(pf: PairFeatures) -> str:
    where = "in" if pf.in_same_comment else "not in"
    return CLAUSE_TEMPLATE.format(where=where, distance=pf.distance)


def _layout(s1: str, s2: str, clause: str) -> str:
    prompt = DspaPrompt(
        instruction=INSTRUCTION,
        input=INPUT_TEMPLATE.format(s1=s1, s2=s2, clause=clause),
        template_len=0,
        s1_tokens_used=0,
        s2_tokens_used=0,
    )
    return prompt.text


def template_length(pf: PairFeatures, budget: TokenBudget) -> int:
    """Tokens fijos del prompt, cláusula de rasgos incluida, con las oraciones vacías."""
    return budget.count(_layout("", "", feature_clause(pf)))


def sentence_cap(template_len: int, budget: TokenBudget) -> int:
    return (budget.max_sequence - template_len) // 2


def truncate_dspa(
    s1_tokens: List[str], s2_tokens: List[str], template_len: int, budget: TokenBudget
) -> Tuple[List[str], List[str]]:
    """
    Cada oración se recorta por separado a L = floor((max - template_len) / 2).
    El margen que deja una oración corta no pasa a la otra.
    """
    cap = sentence_cap(template_len, budget)
    if cap < 1:
        raise BudgetExhausted(
            f"Template of {template_len} tokens leaves no room in a {budget.max_sequence}-token sequence"
        )
    return fit_prefix(s1_tokens, cap, budget), fit_prefix(s2_tokens, cap, budget)


def build_dspa_prompt(s1: Sentence, s2: Sentence, pf: PairFeatures, budget: TokenBudget) -> DspaPrompt:
    if s1.id == s2.id and s1.issue_key == s2.issue_key:
        raise ValueError(f"Cannot build a pair prompt from {s1.id} and itself")

    clause = feature_clause(pf)
    template_len = template_length(pf, budget)
    t1, t2 = truncate_dspa(s1.text.split(), s2.text.split(), template_len, budget)
    text1, text2 = " ".join(t1), " ".join(t2)

    def used(tokens: List[str], text: str) -> int:
        return len(tokens) if budget.uses_whitespace else budget.count(text)

    return DspaPrompt(
        instruction=INSTRUCTION,
        input=INPUT_TEMPLATE.format(s1=text1, s2=text2, clause=clause),
        template_len=template_len,
        s1_tokens_used=used(t1, text1),
        s2_tokens_used=used(t2, text2),
    )
