"""Utterance embeddings: file I/O, an embedding-endpoint client, and cosine similarity.

Embeddings are an external input (a JSONL file or an OpenAI-embeddings-shaped
HTTP service), never an in-process model.  Vectors are held at float64
regardless of input precision.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Sequence

import numpy as np

from ._http import EndpointError, post_json
from .corpus import Corpus


class EmbeddingError(ValueError):
    """Embedding input violates the matrix contract (missing key, bad vector, ...)."""


@dataclass(frozen=True)
class EmbeddingMatrix:
    """One float64 row per corpus utterance, aligned to corpus iteration order."""

    keys: tuple[tuple[str, int], ...]
    rows: np.ndarray

    def __post_init__(self):
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2:
            raise EmbeddingError(f"rows must be 2-D, got shape {rows.shape}")
        if rows.shape[0] != len(self.keys):
            raise EmbeddingError(f"{rows.shape[0]} rows for {len(self.keys)} keys")
        if rows.shape[1] < 1:
            raise EmbeddingError("embedding dimension must be >= 1")
        if not np.all(np.isfinite(rows)):
            raise EmbeddingError("non-finite value in embedding matrix")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_index", {k: i for i, k in enumerate(self.keys)})
        if len(self._index) != len(self.keys):
            raise EmbeddingError("duplicate utterance key in embedding matrix")

    @property
    def dim(self) -> int:
        return int(self.rows.shape[1])

    def row(self, dialog_id: str, turn_index: int) -> np.ndarray:
        return self.rows[self._index[(dialog_id, turn_index)]]

    def dialog_rows(self, dialog_id: str, n_turns: int) -> np.ndarray:
        idx = [self._index[(dialog_id, t)] for t in range(n_turns)]
        return self.rows[idx]

    def subset(self, corpus: Corpus) -> "EmbeddingMatrix":
        """Re-align to another corpus whose utterances are a subset of this matrix."""
        keys = tuple(corpus.utterance_keys())
        try:
            idx = [self._index[k] for k in keys]
        except KeyError as exc:
            raise EmbeddingError(f"missing embedding for utterance {exc.args[0]}") from None
        return EmbeddingMatrix(keys=keys, rows=self.rows[idx])


def _check_vector(key: tuple[str, int], vec: np.ndarray, dim: int | None) -> int:
    if vec.ndim != 1 or vec.size < 1:
        raise EmbeddingError(f"{key}: vector must be a non-empty 1-D array")
    if dim is not None and vec.size != dim:
        raise EmbeddingError(f"{key}: dimension {vec.size} != expected {dim}")
    if not np.all(np.isfinite(vec)):
        raise EmbeddingError(f"{key}: non-finite value in vector")
    if float(np.linalg.norm(vec)) == 0.0:
        raise EmbeddingError(f"{key}: zero-norm vector")
    return int(vec.size)


def load_embeddings(path: str | Path | IO[str], corpus: Corpus) -> EmbeddingMatrix:
    """Read embedding JSONL and align rows to the corpus iteration order.

    Each line is {"dialog_id": str, "turn_index": int, "vector": [...]}.
    File order is irrelevant; alignment is by (dialog_id, turn_index).
    Raises EmbeddingError naming the first missing or duplicated key.
    """
    if hasattr(path, "read"):
        lines = path  # type: ignore[assignment]
        close = False
    else:
        lines = open(path, "r", encoding="utf-8")
        close = True
    by_key: dict[tuple[str, int], np.ndarray] = {}
    dim: int | None = None
    try:
        for lineno, raw in enumerate(lines, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise EmbeddingError(f"line {lineno}: invalid JSON: {exc}") from None
            try:
                key = (str(obj["dialog_id"]), int(obj["turn_index"]))
                vec = np.asarray(obj["vector"], dtype=np.float64)
            except (KeyError, TypeError, ValueError) as exc:
                raise EmbeddingError(f"line {lineno}: bad record: {exc}") from None
            if key in by_key:
                raise EmbeddingError(f"line {lineno}: duplicate key {key}")
            dim = _check_vector(key, vec, dim)
            by_key[key] = vec
    finally:
        if close:
            lines.close()

    keys = tuple(corpus.utterance_keys())
    missing = [k for k in keys if k not in by_key]
    if missing:
        raise EmbeddingError(f"missing embedding for utterance {missing[0]}")
    rows = np.vstack([by_key[k] for k in keys])
    return EmbeddingMatrix(keys=keys, rows=rows)


def save_embeddings(matrix: EmbeddingMatrix, path: str | Path | IO[str]) -> None:
    """Write embedding JSONL; floats use repr so a reload is bit-exact."""
    if hasattr(path, "write"):
        fh = path  # type: ignore[assignment]
        close = False
    else:
        fh = open(path, "w", encoding="utf-8")
        close = True
    try:
        for (dialog_id, turn_index), row in zip(matrix.keys, matrix.rows):
            fh.write(json.dumps({
                "dialog_id": dialog_id,
                "turn_index": turn_index,
                "vector": [float(x) for x in row],
            }) + "\n")
    finally:
        if close:
            fh.close()


def fetch_embeddings(endpoint: str, corpus: Corpus, batch_size: int = 32, *,
                     model: str | None = None, max_inflight: int = 4,
                     retries: int = 3, backoff: float = 0.5,
                     timeout: float = 30.0) -> EmbeddingMatrix:
    """Embed every utterance text via an embedding-service endpoint.

    Wire protocol: POST {endpoint} {"input": [texts...], "model": str?} ->
    {"data": [{"index": int, "embedding": [...]}, ...]}, matched by index.
    Up to ``max_inflight`` batches are in flight concurrently; assembly is
    deterministic in corpus order.
    """
    if batch_size < 1:
        raise ValueError(f"batch_size must be >= 1, got {batch_size}")
    keys = tuple(corpus.utterance_keys())
    texts = [u.text for u in corpus.iter_utterances()]
    batches = [texts[i : i + batch_size] for i in range(0, len(texts), batch_size)]

    def fetch_one(batch: list[str]) -> list[np.ndarray]:
        payload: dict = {"input": batch}
        if model is not None:
            payload["model"] = model
        data = post_json(endpoint, payload, retries=retries, backoff=backoff, timeout=timeout)
        items = data.get("data")
        if not isinstance(items, list) or len(items) != len(batch):
            raise EndpointError(
                f"embedding endpoint returned {0 if not isinstance(items, list) else len(items)} "
                f"vectors for a batch of {len(batch)}"
            )
        out: list[np.ndarray | None] = [None] * len(batch)
        for item in items:
            try:
                idx = int(item["index"])
                vec = np.asarray(item["embedding"], dtype=np.float64)
            except (KeyError, TypeError, ValueError) as exc:
                raise EndpointError(f"malformed embedding item: {exc}") from None
            if not 0 <= idx < len(batch) or out[idx] is not None:
                raise EndpointError(f"bad or repeated index {idx} in embedding response")
            out[idx] = vec
        return out  # type: ignore[return-value]

    with ThreadPoolExecutor(max_workers=max(1, max_inflight)) as pool:
        results = list(pool.map(fetch_one, batches))

    vectors = [vec for batch in results for vec in batch]
    dim: int | None = None
    for key, vec in zip(keys, vectors):
        dim = _check_vector(key, vec, dim)
    return EmbeddingMatrix(keys=keys, rows=np.vstack(vectors))


def cosine(u: Sequence[float] | np.ndarray, v: Sequence[float] | np.ndarray) -> float:
    """Cosine similarity u.v / (|u||v|); raises on dimension mismatch or zero norm."""
    ua = np.asarray(u, dtype=np.float64)
    va = np.asarray(v, dtype=np.float64)
    if ua.shape != va.shape:
        raise EmbeddingError(f"dimension mismatch: {ua.shape} vs {va.shape}")
    nu = float(np.linalg.norm(ua))
    nv = float(np.linalg.norm(va))
    if nu == 0.0 or nv == 0.0:
        raise EmbeddingError("cosine undefined for zero-norm vector")
    return float(np.dot(ua, va) / (nu * nv))


def dialog_stagnation(rows: np.ndarray) -> float:
    """Mean cosine similarity over consecutive utterance pairs of one dialog."""
    rows = np.asarray(rows, dtype=np.float64)
    if rows.shape[0] < 2:
        raise EmbeddingError("stagnation undefined for fewer than 2 utterances")
    sims = [cosine(rows[j], rows[j + 1]) for j in range(rows.shape[0] - 1)]
    return float(np.mean(sims))
