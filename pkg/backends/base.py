from typing import List


class CapabilityUnsupported(RuntimeError):
    """Raised when a backend is asked for an operation it does not offer."""


class TransportError(RuntimeError):
    """Raised on connection failures and non-200 responses."""


class Backend:
    """
    Contrato mínimo de un backend de clasificación.
    Las subclases declaran qué capacidades ofrecen.
    """

    name = "backend"
    supports_mask_scoring = False
    supports_generation = False

    def mask_probs(self, prompt: str, candidates: List[str]) -> List[float]:
        raise CapabilityUnsupported(f"{self.name} backend does not score masked tokens")

    def generate(self, prompt: str, max_tokens: int) -> str:
        raise CapabilityUnsupported(f"{self.name} backend does not generate text")
