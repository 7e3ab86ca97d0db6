import hashlib
import json
import logging
from typing import Dict, List, Optional, Union

from backends.base import Backend
from backends.wire import ProtocolError

logger = logging.getLogger(__name__)

Probs = Union[List[float], Dict[str, float]]


def prompt_hash(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class ScriptedBackend(Backend):
    """
    Backend determinista guiado por un guion JSON.

    Estructura del guion:
      mask_probs          {sha256(prompt): probs}
      generate            {sha256(prompt): texto}
      rules               [{"contains": str | [str], "probs": probs | "text": texto}]
      default_mask_probs  probs
      default_generation  texto

    `probs` es una lista alineada con los candidatos o un objeto
    palabra -> probabilidad (las palabras ausentes valen 0).
    Las reglas se prueban en orden, después de los hashes exactos.
    """

    name = "scripted"
    supports_mask_scoring = True
    supports_generation = True

    def __init__(self, script: Dict):
        self.script = script or {}
        self.rules = list(self.script.get("rules") or [])

    @classmethod
    def from_file(cls, path: str) -> "ScriptedBackend":
        with open(path, "r", encoding="utf-8") as f:
            return cls(json.load(f))

    # -----------------------------
    # Lookup
    # -----------------------------

    def _matches(self, rule: Dict, prompt: str) -> bool:
        contains = rule.get("contains") or []
        if isinstance(contains, str):
            contains = [contains]
        return all(fragment in prompt for fragment in contains)

    def _lookup(self, prompt: str, table: str, field: str, default: str):
        exact = (self.script.get(table) or {}).get(prompt_hash(prompt))
        if exact is not None:
            return exact

        for rule in self.rules:
            if field in rule and self._matches(rule, prompt):
                return rule[field]

        if default in self.script:
            return self.script[default]
        raise ProtocolError(f"Script has no {table} answer for prompt {prompt_hash(prompt)[:12]}")

    # -----------------------------
    # Backend API
    # -----------------------------

    def mask_probs(self, prompt: str, candidates: List[str]) -> List[float]:
        probs = self._lookup(prompt, "mask_probs", "probs", "default_mask_probs")

        if isinstance(probs, dict):
            return [float(probs.get(word, 0.0)) for word in candidates]
        if len(probs) != len(candidates):
            raise ProtocolError(f"Expected {len(candidates)} probabilities, script has {len(probs)}")
        return [float(p) for p in probs]

    def generate(self, prompt: str, max_tokens: Optional[int] = None) -> str:
        return str(self._lookup(prompt, "generate", "text", "default_generation"))
