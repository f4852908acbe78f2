"""Gaze-contingent rendering service.

Serves the viewer assets over HTTP, a stateless single-frame probe at
GET /frame, and a bidirectional stream at /stream (WebSocket).  Inbound
stream messages are JSON text carrying a fixation and optional parameter
overrides:

    {"x": 960, "y": 540, "e_corner": 40, "strength": 1.5, "fragment": 16,
     "method": "blockwise"}

Each accepted message triggers one render and one outbound binary frame:
a 4-byte big-endian stats length, a JSON stats block
({render_ms, regions, fragment, method, shift, x, y, warning?}), then the
PNG-encoded frame.  If fixations arrive faster than rendering, intermediate
ones are dropped (latest wins) - only the current gaze matters.  Malformed
messages are answered with a JSON text error and the stream stays open.
"""

from __future__ import annotations

import asyncio
import io
import json
import struct
import time
from dataclasses import replace
from pathlib import Path

from fastapi import FastAPI, Query, WebSocket, WebSocketDisconnect
from fastapi.responses import HTMLResponse, PlainTextResponse, Response
from starlette.concurrency import run_in_threadpool
from starlette.staticfiles import StaticFiles
from PIL import Image

from foveakit import blockwise, pyramid
from foveakit.imaging import RasterImage
from foveakit.retinal import FoveationParams, pixel_sigma_map

METHODS = ("blockwise", "pyramid", "off")

_FALLBACK_PAGE = """<!doctype html>
<html><head><title>foveakit</title></head>
<body>
<h1>foveakit streaming service</h1>
<p>No viewer assets were found. Build the viewer (see frontend/README.md)
and restart with --assets frontend/dist, or probe a single frame:</p>
<p><code>GET /frame?x=100&amp;y=100</code></p>
</body></html>
"""


def png_bytes(img: RasterImage) -> bytes:
    arr = img.data[:, :, 0] if img.channels == 1 else img.data
    buf = io.BytesIO()
    Image.fromarray(arr, mode="L" if img.channels == 1 else "RGB").save(buf, format="PNG")
    return buf.getvalue()


def _clamp_fixation(x: float, y: float, size: tuple[int, int]) -> tuple[float, float, bool]:
    w, h = size
    cx = min(max(x, 0.0), w - 1.0)
    cy = min(max(y, 0.0), h - 1.0)
    return cx, cy, (cx != x or cy != y)


def render_frame(
    source: RasterImage,
    params: FoveationParams,
    method: str = "blockwise",
    workers: int = 1,
) -> tuple[RasterImage, dict]:
    """One frame plus its stats block; pure in (source, params, method)."""
    if method == "blockwise":
        out, grid, _, s = blockwise.foveate(source, params, workers=workers)
        stats = {
            "render_ms": round(s.render_ms, 3),
            "regions": s.regions,
            "fragment": s.fragment_size,
            "method": method,
            "shift": [s.shift[0], s.shift[1]],
        }
    elif method == "pyramid":
        t0 = time.perf_counter()
        sigma = pixel_sigma_map(source.size, params)
        out = pyramid.sample_foveated(pyramid.build_pyramid(source, 6), sigma)
        ms = (time.perf_counter() - t0) * 1000.0
        stats = {
            "render_ms": round(ms, 3),
            "regions": 0,
            "fragment": params.fragment_size,
            "method": method,
            "shift": [0, 0],
        }
    elif method == "off":
        out = source
        stats = {
            "render_ms": 0.0,
            "regions": 0,
            "fragment": params.fragment_size,
            "method": method,
            "shift": [0, 0],
        }
    else:
        raise ValueError(f"unknown method {method!r}, expected one of {METHODS}")
    return out, stats


def encode_frame(png: bytes, stats: dict) -> bytes:
    blob = json.dumps(stats, separators=(",", ":")).encode("utf-8")
    return struct.pack(">I", len(blob)) + blob + png


def decode_frame(data: bytes) -> tuple[dict, bytes]:
    """Inverse of encode_frame; used by tests and scripted clients."""
    n = struct.unpack(">I", data[:4])[0]
    stats = json.loads(data[4 : 4 + n].decode("utf-8"))
    return stats, data[4 + n :]


class _ConnectionState:
    """Per-connection parameters; overrides persist across messages."""

    def __init__(self, params: FoveationParams, method: str = "blockwise"):
        self.params = params
        self.method = method

    def apply(self, msg: dict, size: tuple[int, int]) -> tuple[FoveationParams, str, bool]:
        if "x" not in msg or "y" not in msg:
            raise ValueError("message must carry fixation fields 'x' and 'y'")
        updates = {}
        if "e_corner" in msg:
            updates["e_corner"] = float(msg["e_corner"])
        if "strength" in msg:
            updates["strength"] = float(msg["strength"])
        if "fragment" in msg:
            updates["fragment_size"] = int(msg["fragment"])
        if "method" in msg:
            method = str(msg["method"])
            if method not in METHODS:
                raise ValueError(f"unknown method {method!r}")
            self.method = method
        x, y, clamped = _clamp_fixation(float(msg["x"]), float(msg["y"]), size)
        updates["fixation"] = (x, y)
        self.params = replace(self.params, **updates)
        return self.params, self.method, clamped


def create_app(
    source: RasterImage,
    params: FoveationParams | None = None,
    assets_dir=None,
    workers: int = 1,
) -> FastAPI:
    initial = params if params is not None else FoveationParams()
    app = FastAPI(title="foveakit")
    assets = Path(assets_dir) if assets_dir else None

    @app.get("/", response_class=HTMLResponse)
    def index():
        if assets and (assets / "index.html").is_file():
            return HTMLResponse((assets / "index.html").read_text())
        return HTMLResponse(_FALLBACK_PAGE)

    if assets and assets.is_dir():
        app.mount("/assets", StaticFiles(directory=str(assets)), name="assets")

    @app.get("/frame")
    def frame(
        x: float = Query(...),
        y: float = Query(...),
        e_corner: float | None = None,
        strength: float | None = None,
        fragment: int | None = None,
        method: str = "blockwise",
    ):
        state = _ConnectionState(initial)
        msg = {"x": x, "y": y}
        if e_corner is not None:
            msg["e_corner"] = e_corner
        if strength is not None:
            msg["strength"] = strength
        if fragment is not None:
            msg["fragment"] = fragment
        msg["method"] = method
        try:
            p, m, _ = state.apply(msg, source.size)
            out, _ = render_frame(source, p, m, workers)
        except ValueError as exc:
            return PlainTextResponse(str(exc), status_code=400)
        return Response(content=png_bytes(out), media_type="image/png")

    @app.websocket("/stream")
    async def stream(ws: WebSocket):
        await ws.accept()
        state = _ConnectionState(initial)
        pending: list[dict | None] = [None]
        wakeup = asyncio.Event()
        closed = asyncio.Event()

        async def reader():
            try:
                while True:
                    text = await ws.receive_text()
                    try:
                        msg = json.loads(text)
                        if not isinstance(msg, dict):
                            raise ValueError("message must be a JSON object")
                    except ValueError as exc:
                        await ws.send_text(json.dumps({"error": str(exc)}))
                        continue
                    pending[0] = msg  # latest wins
                    wakeup.set()
            except WebSocketDisconnect:
                closed.set()
                wakeup.set()

        reader_task = asyncio.create_task(reader())
        try:
            while not closed.is_set():
                await wakeup.wait()
                wakeup.clear()
                msg = pending[0]
                pending[0] = None
                if msg is None:
                    continue
                try:
                    p, m, clamped = state.apply(msg, source.size)
                except ValueError as exc:
                    await ws.send_text(json.dumps({"error": str(exc)}))
                    continue
                out, stats = await run_in_threadpool(render_frame, source, p, m, workers)
                stats["x"] = p.fixation[0]
                stats["y"] = p.fixation[1]
                if clamped:
                    stats["warning"] = "fixation clamped to image bounds"
                await ws.send_bytes(encode_frame(png_bytes(out), stats))
        finally:
            reader_task.cancel()

    return app


def serve(
    source: RasterImage,
    params: FoveationParams | None = None,
    port: int = 8080,
    assets_dir=None,
    workers: int = 1,
    host: str = "127.0.0.1",
) -> None:
    import uvicorn

    app = create_app(source, params, assets_dir=assets_dir, workers=workers)
    uvicorn.run(app, host=host, port=port, log_level="warning")
