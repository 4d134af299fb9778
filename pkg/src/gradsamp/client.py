"""Thin HTTP client the CLI talks through.

Default transport is the in-process ASGI app (no server needed);
pass a base URL to target a running instance instead.
"""
from typing import Optional


class ServiceClient:
    def __init__(self, base_url: Optional[str] = None, timeout: float = 600.0):
        if base_url:
            import httpx

            self._client = httpx.Client(base_url=base_url, timeout=timeout)
        else:
            import warnings

            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                from fastapi.testclient import TestClient

            from .service.app import app

            # raise_server_exceptions off so 500s arrive as responses,
            # exactly like a remote server
            self._client = TestClient(app, raise_server_exceptions=False)

    def get(self, path: str):
        return self._client.get(path)

    def post(self, path: str, payload: dict):
        return self._client.post(path, json=payload)

    def close(self):
        self._client.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
