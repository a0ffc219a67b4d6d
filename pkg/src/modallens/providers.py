"""Prediction providers: black boxes that score batches of feature-matrix triples.

All providers take a batch of ``{modality: T x D array}`` triples and return one
real output per element.  Builtin providers run in-process; the subprocess and
HTTP providers speak the line-delimited request/response protocol::

    handshake (worker -> host):  {"schema_fingerprint": str, "max_batch": int}
    request   (host -> worker):  {"batch_id": int, "inputs": [triples...]}
    response  (worker -> host):  {"batch_id": int, "outputs": [floats...]}
"""
from __future__ import annotations

import json
import shlex
import subprocess
import sys
from pathlib import Path

import numpy as np

from .errors import ArgumentError, ParseError, ProviderError
from .schema import MODALITIES

FeatureTriple = dict  # modality -> T x D ndarray


def _time_means(triple: FeatureTriple) -> np.ndarray:
    return np.concatenate([np.asarray(triple[m], dtype=float).mean(axis=0) for m in MODALITIES])


class LinearProvider:
    """f(x) = sum_m w_m . time_mean(X_m) + bias."""

    kind = "builtin-linear"

    def __init__(self, weights: dict[str, np.ndarray], bias: float = 0.0):
        self.weights = {m: np.asarray(weights[m], dtype=float) for m in MODALITIES}
        self.bias = float(bias)

    def predict(self, batch: list[FeatureTriple]) -> np.ndarray:
        out = np.empty(len(batch))
        for i, triple in enumerate(batch):
            total = self.bias
            for m in MODALITIES:
                total += float(self.weights[m] @ np.asarray(triple[m], dtype=float).mean(axis=0))
            out[i] = total
        return out

    def to_dict(self) -> dict:
        return {
            "kind": "linear",
            "weights": {m: self.weights[m].tolist() for m in MODALITIES},
            "bias": self.bias,
        }


class MlpToyProvider:
    """Tiny fixed one-hidden-layer tanh network over concatenated time-means."""

    kind = "builtin-mlp-toy"

    def __init__(self, w1: np.ndarray, b1: np.ndarray, w2: np.ndarray, b2: float):
        self.w1 = np.asarray(w1, dtype=float)
        self.b1 = np.asarray(b1, dtype=float)
        self.w2 = np.asarray(w2, dtype=float)
        self.b2 = float(b2)

    @classmethod
    def random(cls, dims: dict[str, int], hidden: int = 8, seed: int = 0) -> "MlpToyProvider":
        rng = np.random.default_rng(seed)
        d = sum(dims[m] for m in MODALITIES)
        return cls(
            w1=rng.normal(scale=1.0 / np.sqrt(d), size=(hidden, d)),
            b1=rng.normal(scale=0.1, size=hidden),
            w2=rng.normal(scale=1.0 / np.sqrt(hidden), size=hidden),
            b2=0.0,
        )

    def predict(self, batch: list[FeatureTriple]) -> np.ndarray:
        x = np.stack([_time_means(t) for t in batch])
        return np.tanh(x @ self.w1.T + self.b1) @ self.w2 + self.b2

    def to_dict(self) -> dict:
        return {
            "kind": "mlp-toy",
            "w1": self.w1.tolist(),
            "b1": self.b1.tolist(),
            "w2": self.w2.tolist(),
            "b2": self.b2,
        }


def _triple_to_json(triple: FeatureTriple) -> dict:
    return {m: np.asarray(triple[m], dtype=float).tolist() for m in MODALITIES}


class SubprocessProvider:
    """Drives an external model worker over stdin/stdout."""

    kind = "subprocess"

    def __init__(self, command: str):
        self.command = command
        self._proc = None
        self._batch_id = 0
        self.max_batch = 1

    def _ensure_started(self):
        if self._proc is not None and self._proc.poll() is None:
            return
        self._proc = subprocess.Popen(
            shlex.split(self.command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            text=True,
        )
        handshake = self._proc.stdout.readline()
        try:
            hs = json.loads(handshake)
            self.max_batch = int(hs.get("max_batch", 1))
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise ProviderError(f"bad handshake from {self.command!r}: {handshake!r}") from exc

    def predict(self, batch: list[FeatureTriple]) -> np.ndarray:
        self._ensure_started()
        outputs: list[float] = []
        for start in range(0, len(batch), self.max_batch):
            chunk = batch[start : start + self.max_batch]
            self._batch_id += 1
            req = {"batch_id": self._batch_id, "inputs": [_triple_to_json(t) for t in chunk]}
            try:
                self._proc.stdin.write(json.dumps(req) + "\n")
                self._proc.stdin.flush()
                line = self._proc.stdout.readline()
                resp = json.loads(line)
            except (BrokenPipeError, json.JSONDecodeError) as exc:
                raise ProviderError(f"worker failed on batch {self._batch_id}: {exc}") from exc
            if resp.get("batch_id") != self._batch_id or len(resp.get("outputs", [])) != len(chunk):
                raise ProviderError(f"mismatched response for batch {self._batch_id}: {resp}")
            outputs.extend(float(v) for v in resp["outputs"])
        return np.array(outputs)

    def close(self):
        if self._proc is not None and self._proc.poll() is None:
            self._proc.stdin.close()
            self._proc.wait(timeout=10)


class HttpProvider:
    """POSTs the same request payload to a single callback endpoint."""

    kind = "http-callback"

    def __init__(self, url: str):
        self.url = url
        self._batch_id = 0

    def predict(self, batch: list[FeatureTriple]) -> np.ndarray:
        import httpx

        self._batch_id += 1
        req = {"batch_id": self._batch_id, "inputs": [_triple_to_json(t) for t in batch]}
        try:
            resp = httpx.post(self.url, json=req, timeout=60.0)
            resp.raise_for_status()
            doc = resp.json()
        except httpx.HTTPError as exc:
            raise ProviderError(f"http provider failed on batch {self._batch_id}: {exc}") from exc
        if doc.get("batch_id") != self._batch_id or len(doc.get("outputs", [])) != len(batch):
            raise ProviderError(f"mismatched http response for batch {self._batch_id}")
        return np.array([float(v) for v in doc["outputs"]])


def save_provider(provider, path: str | Path) -> None:
    Path(path).write_text(json.dumps(provider.to_dict()))


def load_provider_file(path: str | Path):
    try:
        doc = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read provider model {path}: {exc}") from exc
    kind = doc.get("kind")
    if kind == "linear":
        return LinearProvider(
            {m: np.asarray(doc["weights"][m]) for m in MODALITIES}, doc.get("bias", 0.0)
        )
    if kind == "mlp-toy":
        return MlpToyProvider(doc["w1"], doc["b1"], doc["w2"], doc["b2"])
    raise ParseError(f"unknown provider model kind {kind!r}")


def resolve_provider(spec: str):
    """Parse a provider spec: linear:FILE | mlp:FILE | subprocess:CMD | http:URL."""
    scheme, _, rest = spec.partition(":")
    if not rest:
        raise ArgumentError(f"provider spec {spec!r} needs a scheme: prefix")
    if scheme in ("linear", "mlp"):
        return load_provider_file(rest)
    if scheme == "subprocess":
        return SubprocessProvider(rest)
    if scheme == "http":
        return HttpProvider(rest)
    raise ArgumentError(f"unknown provider scheme {scheme!r}")


def worker_main(argv=None) -> int:
    """Entry point for a subprocess worker backed by a builtin model file.

    Usage: python -m modallens.providers MODEL.json [--max-batch N]
    """
    args = list(sys.argv[1:] if argv is None else argv)
    max_batch = 64
    if "--max-batch" in args:
        i = args.index("--max-batch")
        max_batch = int(args[i + 1])
        del args[i : i + 2]
    model = load_provider_file(args[0])
    print(json.dumps({"schema_fingerprint": "", "max_batch": max_batch}), flush=True)
    for line in sys.stdin:
        line = line.strip()
        if not line:
            continue
        req = json.loads(line)
        batch = [
            {m: np.asarray(t[m], dtype=float) for m in MODALITIES} for t in req["inputs"]
        ]
        outputs = model.predict(batch)
        print(
            json.dumps({"batch_id": req["batch_id"], "outputs": [float(v) for v in outputs]}),
            flush=True,
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(worker_main())
