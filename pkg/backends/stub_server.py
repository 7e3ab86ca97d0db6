import logging
from typing import Any

from fastapi import Body, FastAPI, HTTPException

from backends.base import Backend, CapabilityUnsupported
from backends.wire import (
    GENERATE_PATH,
    MASK_PROBS_PATH,
    GenerateRequest,
    GenerateResponse,
    MaskProbsRequest,
    MaskProbsResponse,
    ProtocolError,
)

logger = logging.getLogger(__name__)


def create_app(backend: Backend) -> FastAPI:
    """
    Servidor stub del protocolo remoto respaldado por cualquier backend
    (normalmente el guionizado). 400 ante peticiones mal formadas.
    """
    app = FastAPI(title="drminer stub backend")

    @app.post(MASK_PROBS_PATH)
    def mask_probs(payload: Any = Body(...)):
        try:
            request = MaskProbsRequest.from_json(payload)
            probs = backend.mask_probs(request.prompt, request.candidates)
        except ProtocolError as e:
            raise HTTPException(status_code=400, detail=str(e))
        except CapabilityUnsupported as e:
            raise HTTPException(status_code=501, detail=str(e))
        return MaskProbsResponse(probs=probs).to_json()

    @app.post(GENERATE_PATH)
    def generate(payload: Any = Body(...)):
        try:
            request = GenerateRequest.from_json(payload)
            text = backend.generate(request.prompt, request.max_tokens)
        except ProtocolError as e:
            raise HTTPException(status_code=400, detail=str(e))
        except CapabilityUnsupported as e:
            raise HTTPException(status_code=501, detail=str(e))
        return GenerateResponse(text=text).to_json()

    logger.info(f"Stub server ready ({backend.name} backend)")
    return app
