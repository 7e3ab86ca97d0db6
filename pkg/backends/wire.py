"""
Mensajes del protocolo remoto (JSON sobre HTTP).

    POST /v1/mask-probs  {"prompt", "candidates"} -> {"probs"}
    POST /v1/generate    {"prompt", "max_tokens"} -> {"text"}
"""

from dataclasses import dataclass
from typing import Any, Dict, List

MASK_PROBS_PATH = "/v1/mask-probs"
GENERATE_PATH = "/v1/generate"
MASK_TOKEN = "[MASK]"


class ProtocolError(ValueError):
    """Raised when a wire message is missing a field or carries the wrong type."""


def _require(data: Any, name: str, kind) -> Any:
    if not isinstance(data, dict):
        raise ProtocolError(f"Expected a JSON object, got {type(data).__name__}")
    if name not in data:
        raise ProtocolError(f"Missing field '{name}'")
    value = data[name]
    # bool es subclase de int: no vale como número
    if isinstance(value, bool) or not isinstance(value, kind):
        raise ProtocolError(f"Field '{name}' has the wrong type ({type(value).__name__})")
    return value


def _number_list(data: Dict, name: str) -> List[float]:
    values = _require(data, name, list)
    for v in values:
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ProtocolError(f"Field '{name}' must contain only numbers")
    return [float(v) for v in values]


def _string_list(data: Dict, name: str) -> List[str]:
    values = _require(data, name, list)
    if not all(isinstance(v, str) for v in values):
        raise ProtocolError(f"Field '{name}' must contain only strings")
    return list(values)


@dataclass(frozen=True)
class MaskProbsRequest:
    prompt: str
    candidates: List[str]

    def to_json(self) -> Dict:
        return {"prompt": self.prompt, "candidates": list(self.candidates)}

    @classmethod
    def from_json(cls, data: Any) -> "MaskProbsRequest":
        prompt = _require(data, "prompt", str)
        if MASK_TOKEN not in prompt:
            raise ProtocolError(f"Prompt must contain {MASK_TOKEN}")
        return cls(prompt=prompt, candidates=_string_list(data, "candidates"))


@dataclass(frozen=True)
class MaskProbsResponse:
    probs: List[float]

    def to_json(self) -> Dict:
        return {"probs": list(self.probs)}

    @classmethod
    def from_json(cls, data: Any) -> "MaskProbsResponse":
        return cls(probs=_number_list(data, "probs"))


@dataclass(frozen=True)
class GenerateRequest:
    prompt: str
    max_tokens: int

    def to_json(self) -> Dict:
        return {"prompt": self.prompt, "max_tokens": self.max_tokens}

    @classmethod
    def from_json(cls, data: Any) -> "GenerateRequest":
        prompt = _require(data, "prompt", str)
        max_tokens = _require(data, "max_tokens", int)
        if max_tokens < 1:
            raise ProtocolError("max_tokens must be >= 1")
        return cls(prompt=prompt, max_tokens=max_tokens)


@dataclass(frozen=True)
class GenerateResponse:
    text: str

    def to_json(self) -> Dict:
        return {"text": self.text}

    @classmethod
    def from_json(cls, data: Any) -> "GenerateResponse":
        return cls(text=_require(data, "text", str))
