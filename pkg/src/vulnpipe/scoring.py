"""Classifier boundary: batch scoring protocol, remote client, offline stub.

Wire protocol, so any backend language can serve it::

    POST {base_url}/score
    -> {"items": [{"id": "...", "text": "..."}]}
    <- 200 {"items": [{"id": "...", "p_vulnerable": 0.0}]}
    <- non-200 {"error": "..."}

Responses are matched by id, so backends may reorder items.  The client
chunks large requests and retries a transport failure once (scoring is
idempotent).
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from typing import Protocol, Sequence

import requests

from .errors import ScorerProtocolError, ScorerTransportError
from .phplex import tokenize

DEFAULT_MARKERS = ("eval",)
DEFAULT_BATCH_SIZE = 64
DEFAULT_TIMEOUT = 10.0
MARKER_SCORE = 0.95
EMPTY_SCORE = 0.0
HASH_SCORE_CEILING = 0.4
ENV_SCORER_URL = "VULNPIPE_SCORER_URL"


@dataclass(frozen=True)
class ScoreItem:
    id: str
    text: str


@dataclass
class ScoreRequest:
    items: list[ScoreItem]

    def __post_init__(self) -> None:
        if not self.items:
            raise ScorerProtocolError("request items must be non-empty")
        ids = [item.id for item in self.items]
        if len(set(ids)) != len(ids):
            raise ScorerProtocolError("request ids must be unique")

    def to_payload(self) -> dict:
        return {"items": [{"id": i.id, "text": i.text} for i in self.items]}

    @classmethod
    def from_payload(cls, payload: dict) -> "ScoreRequest":
        items = payload.get("items")
        if not isinstance(items, list):
            raise ScorerProtocolError("request must carry an 'items' list")
        parsed = []
        for item in items:
            if not isinstance(item, dict) or "id" not in item or "text" not in item:
                raise ScorerProtocolError("each item needs 'id' and 'text'")
            if not isinstance(item["id"], str) or not isinstance(item["text"], str):
                raise ScorerProtocolError("'id' and 'text' must be strings")
            parsed.append(ScoreItem(id=item["id"], text=item["text"]))
        return cls(items=parsed)


@dataclass
class ScoredItem:
    id: str
    p_vulnerable: float


@dataclass
class ScoreResponse:
    items: list[ScoredItem]

    def to_payload(self) -> dict:
        return {"items": [{"id": i.id, "p_vulnerable": i.p_vulnerable}
                          for i in self.items]}

    @classmethod
    def from_payload(cls, payload: dict) -> "ScoreResponse":
        items = payload.get("items")
        if not isinstance(items, list):
            raise ScorerProtocolError("response must carry an 'items' list")
        parsed = []
        for item in items:
            if not isinstance(item, dict) or "id" not in item or "p_vulnerable" not in item:
                raise ScorerProtocolError("each item needs 'id' and 'p_vulnerable'")
            p = item["p_vulnerable"]
            if not isinstance(p, (int, float)) or isinstance(p, bool) or not 0.0 <= p <= 1.0:
                raise ScorerProtocolError(
                    f"p_vulnerable out of range for id {item['id']!r}: {p!r}")
            parsed.append(ScoredItem(id=item["id"], p_vulnerable=float(p)))
        return cls(items=parsed)

    def check_covers(self, request: ScoreRequest) -> None:
        want = [i.id for i in request.items]
        got = [i.id for i in self.items]
        if sorted(want) != sorted(got):
            missing = set(want) - set(got)
            extra = set(got) - set(want)
            raise ScorerProtocolError(
                f"response ids are not a permutation of request ids "
                f"(missing={sorted(missing)}, extra={sorted(extra)})")


class Scorer(Protocol):
    def score(self, request: ScoreRequest) -> ScoreResponse: ...


def stub_score(text: str, markers: Sequence[str] = DEFAULT_MARKERS) -> float:
    """Deterministic, seedless offline score.

    0.0 for empty input, 0.95 when any marker token is present, otherwise a
    stable hash of the token sequence mapped into [0, 0.4).
    """
    tokens = tokenize(text)
    if not tokens:
        return EMPTY_SCORE
    if any(m in tokens for m in markers):
        return MARKER_SCORE
    digest = hashlib.sha256("\x00".join(tokens).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") / 2 ** 64 * HASH_SCORE_CEILING


class StubScorer:
    """Offline test double implementing the scorer protocol."""

    def __init__(self, markers: Sequence[str] = DEFAULT_MARKERS):
        self.markers = tuple(markers)

    def score(self, request: ScoreRequest) -> ScoreResponse:
        return ScoreResponse(items=[
            ScoredItem(id=item.id, p_vulnerable=stub_score(item.text, self.markers))
            for item in request.items
        ])


class RemoteScorer:
    """HTTP client for a `/score` backend."""

    def __init__(self, base_url: str, *, timeout: float = DEFAULT_TIMEOUT,
                 bearer_token: str | None = None,
                 session: requests.Session | None = None):
        self.url = base_url.rstrip("/") + "/score"
        self.timeout = timeout
        self.headers = {"Content-Type": "application/json"}
        if bearer_token:
            self.headers["Authorization"] = f"Bearer {bearer_token}"
        self.session = session or requests.Session()

    def score(self, request: ScoreRequest) -> ScoreResponse:
        payload = request.to_payload()
        last_exc: Exception | None = None
        for _ in range(2):  # one retry: scoring is idempotent
            try:
                resp = self.session.post(self.url, json=payload,
                                         headers=self.headers,
                                         timeout=self.timeout)
                break
            except requests.RequestException as exc:
                last_exc = exc
        else:
            raise ScorerTransportError(f"cannot reach {self.url}: {last_exc}")
        if resp.status_code != 200:
            try:
                detail = resp.json().get("error", resp.text)
            except ValueError:
                detail = resp.text
            raise ScorerProtocolError(
                f"backend returned {resp.status_code}: {detail}")
        try:
            body = resp.json()
        except ValueError as exc:
            raise ScorerProtocolError(f"backend response is not JSON: {exc}")
        return ScoreResponse.from_payload(body)


def score_batch(
    scorer: Scorer,
    request: ScoreRequest,
    *,
    batch_size: int = DEFAULT_BATCH_SIZE,
) -> ScoreResponse:
    """Score a request through *scorer*, chunking to the batch-size cap.

    The assembled response preserves request item order regardless of how
    each chunk's backend ordered its reply.
    """
    if batch_size < 1:
        raise ValueError("batch_size must be >= 1")
    by_id: dict[str, float] = {}
    for start in range(0, len(request.items), batch_size):
        chunk = ScoreRequest(items=request.items[start:start + batch_size])
        response = scorer.score(chunk)
        response.check_covers(chunk)
        for item in response.items:
            by_id[item.id] = item.p_vulnerable
    return ScoreResponse(items=[
        ScoredItem(id=item.id, p_vulnerable=by_id[item.id])
        for item in request.items
    ])


def scorer_from_spec(spec: str | None, *, markers: Sequence[str] = DEFAULT_MARKERS,
                     timeout: float = DEFAULT_TIMEOUT,
                     bearer_token: str | None = None) -> Scorer:
    """Build a scorer from a CLI/config spec: 'stub', a URL, or None.

    None falls back to the VULNPIPE_SCORER_URL environment variable, then
    to the stub.
    """
    if spec is None:
        spec = os.environ.get(ENV_SCORER_URL) or "stub"
    if spec == "stub":
        return StubScorer(markers=markers)
    return RemoteScorer(spec, timeout=timeout, bearer_token=bearer_token)
