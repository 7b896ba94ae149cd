"""Stateless JSON-over-HTTP layout service consumed by the explorer UI.

Endpoints:
    POST /layout    LayoutRequest -> scene + diagnostics + metrics
    POST /validate  graph -> diagnostics
    GET  /health    liveness probe

Responses are serialized canonically, so identical requests yield
byte-identical bodies.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from fastapi import FastAPI, Request, Response
from fastapi.middleware.cors import CORSMiddleware

from .ingest import ParseError, parse_function_network, parse_generic
from .model import CompoundGraph, validate
from .pipeline import FatalDiagnosticsError, LayoutConfig, run_pipeline
from .scene import compute_metrics, scene_to_dict, to_svg

RESPONSE_SCHEMA = "layout-response/1"


class _BadRequest(Exception):
    pass


def _canonical(payload: dict[str, Any], status: int = 200) -> Response:
    return Response(
        content=json.dumps(payload, sort_keys=True, separators=(",", ":")),
        status_code=status,
        media_type="application/json",
    )


def _error(status: int, message: str, **extra: Any) -> Response:
    return _canonical({"error": message, **extra}, status=status)


async def _request_json(request: Request) -> dict[str, Any]:
    try:
        data = await request.json()
    except Exception as exc:
        raise _BadRequest(f"request body is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise _BadRequest("request body must be a JSON object")
    return data


def _graph_from_request(data: dict[str, Any]) -> CompoundGraph:
    inline = data.get("graph")
    file_ref = data.get("graph_file")
    if (inline is None) == (file_ref is None):
        raise _BadRequest("exactly one of 'graph' or 'graph_file' is required")
    fmt = data.get("format")
    if fmt not in (None, "generic", "fn"):
        raise _BadRequest("format must be 'generic' or 'fn'")
    config = data.get("config") or {}
    reverse = bool(config.get("reverse_arrows", True))
    if inline is not None:
        text = json.dumps(inline)
        if fmt is None:
            fmt = "fn" if "wires" in inline else "generic"
    else:
        path = Path(str(file_ref))
        if not path.exists():
            raise _BadRequest(f"graph_file not found: {file_ref}")
        text = path.read_text(encoding="utf-8")
        if fmt is None:
            fmt = "fn" if str(file_ref).endswith(".fn.json") else "generic"
    try:
        if fmt == "fn":
            return parse_function_network(text, reverse_arrows=reverse)
        return parse_generic(text)
    except ParseError as exc:
        raise _BadRequest(str(exc)) from exc


def create_app(ui_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="portlayout", docs_url=None, redoc_url=None)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.get("/health")
    async def health() -> Response:
        return _canonical({"status": "ok"})

    @app.post("/validate")
    async def validate_graph(request: Request) -> Response:
        try:
            data = await _request_json(request)
            graph = _graph_from_request(data)
        except _BadRequest as exc:
            return _error(400, str(exc))
        result = validate(graph)
        return _canonical(
            {"diagnostics": [d.to_dict() for d in result.diagnostics]}
        )

    @app.post("/layout")
    async def layout(request: Request) -> Response:
        try:
            data = await _request_json(request)
            graph = _graph_from_request(data)
            expansion = data.get("expansion", [])
            if not isinstance(expansion, list):
                raise _BadRequest("expansion must be a list of group ids")
            output = data.get("output", "scene")
            if output not in ("scene", "svg", "both"):
                raise _BadRequest("output must be 'scene', 'svg' or 'both'")
            try:
                config = LayoutConfig.from_dict(dict(data.get("config") or {}))
            except (ValueError, TypeError) as exc:
                raise _BadRequest(str(exc)) from exc
        except _BadRequest as exc:
            return _error(400, str(exc))

        try:
            result = run_pipeline(graph, set(map(str, expansion)), config)
        except FatalDiagnosticsError as exc:
            return _canonical(
                {
                    "error": "graph has fatal diagnostics",
                    "diagnostics": [d.to_dict() for d in exc.diagnostics],
                },
                status=422,
            )
        except ValueError as exc:
            return _error(400, str(exc))

        payload: dict[str, Any] = {
            "schema": RESPONSE_SCHEMA,
            "expansion": list(result.expansion),
            "diagnostics": [d.to_dict() for d in result.diagnostics],
            "metrics": compute_metrics(result.scene, result.tree).to_dict(),
        }
        if output in ("scene", "both"):
            payload["scene"] = scene_to_dict(result.scene)
        if output in ("svg", "both"):
            payload["svg"] = to_svg(result.scene)
        return _canonical(payload)

    if ui_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app


def serve(port: int, ui_dir: str | None = None) -> None:
    """Run the service with uvicorn (blocking)."""
    import uvicorn

    uvicorn.run(create_app(ui_dir), host="127.0.0.1", port=port, log_level="warning")
