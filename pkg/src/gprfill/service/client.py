"""HTTP client used by the CLI.

With a base URL the client talks to a running server; without one it mounts
the FastAPI app on an in-process ASGI transport, so file-based workflows need
no server while still exercising the exact request/response surface.
"""

from __future__ import annotations

import asyncio

import httpx

from ..errors import GprFillError


class ServiceError(GprFillError):
    """The service rejected a request; carries the HTTP detail message."""


class _InProcessTransport(httpx.BaseTransport):
    """Sync httpx transport that drives an ASGI app directly."""

    def __init__(self, app):
        self._asgi = httpx.ASGITransport(app=app)

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        return asyncio.run(self._roundtrip(request))

    async def _roundtrip(self, request: httpx.Request) -> httpx.Response:
        # Rebuild with in-memory content: the sync request carries a sync
        # byte stream the ASGI transport cannot iterate.
        async_request = httpx.Request(request.method, request.url,
                                      headers=request.headers, content=request.content)
        response = await self._asgi.handle_async_request(async_request)
        body = b"".join([chunk async for chunk in response.stream])
        return httpx.Response(status_code=response.status_code,
                              headers=response.headers, content=body)


class ServiceClient:
    """Thin JSON client over the gprfill API."""

    def __init__(self, base_url: str | None = None):
        if base_url:
            self._client = httpx.Client(base_url=base_url,
                                        timeout=httpx.Timeout(None))
        else:
            from .app import app  # deferred: only in-process mode needs it

            self._client = httpx.Client(transport=_InProcessTransport(app),
                                        base_url="http://gprfill.local")

    def close(self) -> None:
        self._client.close()

    def __enter__(self) -> "ServiceClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def post(self, path: str, payload: dict) -> dict:
        response = self._client.post(path, json=payload)
        if response.status_code >= 400:
            try:
                detail = response.json().get("detail", response.text)
            except ValueError:
                detail = response.text
            raise ServiceError(f"{path}: {detail}")
        return response.json()

    def get(self, path: str) -> dict:
        response = self._client.get(path)
        response.raise_for_status()
        return response.json()
