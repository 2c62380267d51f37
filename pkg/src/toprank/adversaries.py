"""Oblivious relevance-stream generators and the stream file format.

Every generator is a pure function of its config, so the full sequence is
fixed before any learner acts. The noisy-fixed family perturbs a fixed
base preference with per-round Gaussian noise: most users agree on most
objects, with occasional flips.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("noisy-fixed", "iid", "replay", "graded-noisy-fixed")


@dataclass(frozen=True)
class AdversaryConfig:
    kind: str
    m: int
    T: int
    seed: int = 0
    noise_sd: float = 0.2
    probs: tuple[float, ...] | None = None
    path: str | None = None
    n: int = 1

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown adversary kind {self.kind!r}")
        if self.m < 1 or self.T < 0:
            raise ValueError("m must be >= 1 and T >= 0")
        if self.noise_sd < 0:
            raise ValueError("noise_sd must be non-negative")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.kind == "replay" and not self.path:
            raise ValueError("replay adversary needs a stream file path")
        if self.probs is not None and len(self.probs) != self.m:
            raise ValueError("need one probability per object")


def noisy_fixed_base(m: int) -> np.ndarray:
    """Base preference: the first ceil(m/2) objects relevant, the rest not."""
    base = np.zeros(m, dtype=np.int64)
    base[: (m + 1) // 2] = 1
    return base


def graded_base(m: int, n: int) -> np.ndarray:
    """Graded base preference: levels fall off evenly from n to 0 by index."""
    if m == 1:
        return np.array([n], dtype=np.int64)
    return np.rint(n * (m - 1 - np.arange(m)) / (m - 1)).astype(np.int64)


def generate_stream(config: AdversaryConfig) -> np.ndarray:
    """Materialize the full (T, m) stream of integer relevance levels."""
    rng = np.random.default_rng(config.seed)
    if config.kind == "noisy-fixed":
        base = noisy_fixed_base(config.m).astype(np.float64)
        noisy = base + rng.normal(0.0, config.noise_sd, size=(config.T, config.m))
        return (noisy > 0.5).astype(np.int64)
    if config.kind == "graded-noisy-fixed":
        base = graded_base(config.m, config.n).astype(np.float64)
        noisy = base + rng.normal(0.0, config.noise_sd, size=(config.T, config.m))
        return np.clip(np.rint(noisy), 0, config.n).astype(np.int64)
    if config.kind == "iid":
        probs = np.full(config.m, 0.5) if config.probs is None else np.asarray(config.probs)
        return (rng.random((config.T, config.m)) < probs).astype(np.int64)
    stream, n = read_stream(config.path)
    if stream.shape[1] != config.m:
        raise ValueError(f"replay file has m={stream.shape[1]}, config wants {config.m}")
    if stream.shape[0] < config.T:
        raise ValueError(f"replay file has {stream.shape[0]} rounds, config wants {config.T}")
    if n > config.n:
        raise ValueError(f"replay file has levels up to {n}, config allows {config.n}")
    return stream[: config.T]


def write_stream(path, stream: np.ndarray, n: int = 1) -> None:
    """Stream file: a ``m= n= T=`` header, then one line of levels per round."""
    stream = np.asarray(stream)
    T, m = stream.shape
    with open(path, "w") as fh:
        fh.write(f"m={m} n={n} T={T}\n")
        for row in stream:
            fh.write(" ".join(str(int(v)) for v in row) + "\n")


def read_stream(path) -> tuple[np.ndarray, int]:
    with open(path) as fh:
        header = fh.readline().split()
        try:
            fields = dict(part.split("=", 1) for part in header)
            m, n, T = int(fields["m"]), int(fields["n"]), int(fields["T"])
        except (ValueError, KeyError):
            raise ValueError(f"{path}: malformed header, expected 'm=<int> n=<int> T=<int>'") from None
        rows = []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            values = [int(v) for v in line.split()]
            if len(values) != m:
                raise ValueError(f"{path}:{lineno}: expected {m} levels, got {len(values)}")
            if any(not 0 <= v <= n for v in values):
                raise ValueError(f"{path}:{lineno}: level outside 0..{n}")
            rows.append(values)
    if len(rows) != T:
        raise ValueError(f"{path}: header says T={T} but found {len(rows)} rounds")
    return np.asarray(rows, dtype=np.int64).reshape(T, m), n
