"""JSON-over-HTTP POST with bounded retries and exponential backoff."""

from __future__ import annotations

import time

import requests


class EndpointError(RuntimeError):
    """External service unreachable or returned an invalid response after retries."""


def post_json(url: str, payload: dict, *, retries: int = 3, backoff: float = 0.5,
              timeout: float = 30.0) -> dict:
    """POST ``payload`` as JSON, returning the decoded response body.

    Connection errors, timeouts, and 5xx responses are retried up to
    ``retries`` attempts with exponential backoff; 4xx responses and
    undecodable bodies fail immediately.
    """
    last_error: EndpointError | None = None
    for attempt in range(retries):
        try:
            resp = requests.post(url, json=payload, timeout=timeout)
        except (requests.ConnectionError, requests.Timeout) as exc:
            last_error = EndpointError(f"POST {url} failed: {exc}")
        else:
            if resp.status_code >= 500:
                last_error = EndpointError(f"POST {url} failed: HTTP {resp.status_code}")
            elif resp.status_code >= 400:
                raise EndpointError(f"POST {url} failed: HTTP {resp.status_code}: {resp.text[:200]}")
            else:
                try:
                    return resp.json()
                except ValueError as exc:
                    raise EndpointError(f"POST {url}: response is not valid JSON: {exc}") from None
        if attempt + 1 < retries:
            time.sleep(backoff * (2 ** attempt))
    assert last_error is not None
    raise last_error
