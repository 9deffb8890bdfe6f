import logging
from typing import Any, Dict, List, Optional

from fastapi import Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from module.codec import decode_sheeted, decode_tuple, to_jsonable
from module.coset_space import canonicalize, reconstruct, sheeted
from module.errors import SpectralError
from module.group_actions import BRANCH_MODES, GroupWord, act_form, act_tuple
from module.montecarlo import DEFAULT_CHUNK
from module.suite_manager import suite_manager

logger = logging.getLogger(__name__)

VERSION = "1.0.0"


def _error(e: Exception, status_code: int = 400) -> JSONResponse:
    exit_code = e.exit_code if isinstance(e, SpectralError) else 2
    logger.warning(f"请求失败: {e}")
    return JSONResponse(status_code=status_code, content={"success": False, "error": str(e), "exit_code": exit_code})


def setup_routes(app):
    class TuplesRequest(BaseModel):
        tuples: List[Dict[str, Any]]

    class FormsRequest(BaseModel):
        forms: List[Dict[str, Any]]

    class ActRequest(BaseModel):
        word: str
        tuples: Optional[List[Dict[str, Any]]] = None
        forms: Optional[List[Dict[str, Any]]] = None
        branch: Optional[str] = "theta"

    class VerifyRequest(BaseModel):
        params: Optional[Dict[str, Any]] = {}

    @app.get("/health")
    async def health_check():
        return {"status": "ok", "message": "Π(n) toolkit is running", "version": VERSION}

    @app.post("/api/zeta")
    async def api_zeta(body: TuplesRequest):
        try:
            forms = [sheeted(decode_tuple(t, i + 1)) for i, t in enumerate(body.tuples)]
        except SpectralError as e:
            return _error(e)
        return {"success": True, "forms": to_jsonable(forms)}

    @app.post("/api/reconstruct")
    async def api_reconstruct(body: FormsRequest):
        try:
            tuples = [reconstruct(decode_sheeted(f, i + 1)) for i, f in enumerate(body.forms)]
        except SpectralError as e:
            return _error(e)
        return {"success": True, "tuples": to_jsonable(tuples)}

    @app.post("/api/canonicalize")
    async def api_canonicalize(body: TuplesRequest):
        try:
            tuples = [canonicalize(decode_tuple(t, i + 1)) for i, t in enumerate(body.tuples)]
        except SpectralError as e:
            return _error(e)
        return {"success": True, "tuples": to_jsonable(tuples)}

    @app.post("/api/act")
    async def api_act(body: ActRequest):
        if body.branch not in BRANCH_MODES:
            return JSONResponse(status_code=422, content={"success": False, "error": f"branch 只能是 {BRANCH_MODES}", "exit_code": 2})
        try:
            word = GroupWord.parse(body.word)
            result: Dict[str, Any] = {"success": True, "word": str(word)}
            if body.tuples is not None:
                result["tuples"] = to_jsonable([act_tuple(decode_tuple(t, i + 1), word) for i, t in enumerate(body.tuples)])
            if body.forms is not None:
                result["forms"] = to_jsonable([act_form(decode_sheeted(f, i + 1), word, body.branch) for i, f in enumerate(body.forms)])
        except (SpectralError, IndexError) as e:
            return _error(e)
        return result

    @app.get("/api/suites")
    async def api_suites():
        return {"suites": suite_manager.list_suites()}

    @app.post("/api/verify/{suite}")
    async def api_verify(suite: str, request: Request, body: Optional[VerifyRequest] = None):
        params = dict((body.params if body else None) or {})
        seed = params.get("seed", getattr(request.app.state, "seed", None))
        if seed is None:
            return JSONResponse(status_code=422, content={"success": False, "error": "随机检验需要 seed", "exit_code": 2})
        params["seed"] = seed
        params.setdefault("chunk_size", getattr(request.app.state, "chunk_size", None) or DEFAULT_CHUNK)
        try:
            result = await suite_manager.run(suite, **params)
        except ValueError as e:
            return _error(e, status_code=404)
        return JSONResponse(status_code=200 if result.get("success") else 400, content=to_jsonable(result))
