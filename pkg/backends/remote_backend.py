import logging
from typing import Any, Dict, List, Optional

import requests

from backends.base import Backend, TransportError
from backends.wire import (
    GENERATE_PATH,
    MASK_PROBS_PATH,
    GenerateRequest,
    GenerateResponse,
    MaskProbsRequest,
    MaskProbsResponse,
    ProtocolError,
)

DEFAULT_MAX_TOKENS = 16


class RemoteBackend(Backend):
    """
    Cliente HTTP del protocolo de inferencia remota.
    Acepta cualquier sesión con un `post` compatible con requests
    (en los tests, el TestClient de fastapi).
    """

    name = "remote"
    supports_mask_scoring = True
    supports_generation = True

    def __init__(
        self,
        base_url: str,
        auth_token: Optional[str] = None,
        timeout: float = 60,
        max_tokens: int = DEFAULT_MAX_TOKENS,
        session: Any = None,
    ):
        self.base_url = base_url.rstrip("/")
        self.auth_token = auth_token
        self.timeout = timeout
        self.max_tokens = max_tokens
        self.session = session or requests

        self.logger = logging.getLogger(__name__)

    # ===============================
    # PUBLIC API
    # ===============================

    def mask_probs(self, prompt: str, candidates: List[str]) -> List[float]:
        request = MaskProbsRequest(prompt=prompt, candidates=list(candidates))
        data = self._post(MASK_PROBS_PATH, request.to_json())
        response = MaskProbsResponse.from_json(data)

        if len(response.probs) != len(candidates):
            raise ProtocolError(
                f"Expected {len(candidates)} probabilities, got {len(response.probs)}"
            )
        return response.probs

    def generate(self, prompt: str, max_tokens: Optional[int] = None) -> str:
        request = GenerateRequest(prompt=prompt, max_tokens=max_tokens or self.max_tokens)
        data = self._post(GENERATE_PATH, request.to_json())
        return GenerateResponse.from_json(data).text

    # ===============================
    # HTTP
    # ===============================

    def _headers(self) -> Dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.auth_token:
            headers["Authorization"] = f"Bearer {self.auth_token}"
        return headers

    def _post(self, path: str, payload: Dict) -> Any:
        url = f"{self.base_url}{path}"
        try:
            response = self.session.post(url, json=payload, headers=self._headers(), timeout=self.timeout)
        except requests.RequestException as e:
            raise TransportError(f"Request to {url} failed: {e}") from e

        if response.status_code != 200:
            raise TransportError(f"Remote backend error: {response.status_code} - {response.text}")

        try:
            return response.json()
        except ValueError as e:
            raise ProtocolError(f"Response from {url} is not JSON") from e
