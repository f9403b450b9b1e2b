"""Deterministic sequence generators and streaming file ingestion.

Streams hand out numpy ``uint8`` chunks of symbol indices.  Every stream is
re-iterable: each call to ``chunks()`` starts a fresh cursor, so independent
consumers never interfere.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
from dataclasses import asdict, dataclass
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterator

import numpy as np

from .core import BINARY, Alphabet, Word
from .errors import BadSymbol, FileNotReadable

CHUNK = 1 << 16
PRNG_ALGORITHM = "numpy.random.PCG64"


class SymbolStream:
    def __init__(self, alphabet: Alphabet, chunk_factory: Callable[[int], Iterator[np.ndarray]],
                 length: int | None = None, metadata: dict | None = None):
        self.alphabet = alphabet
        self._factory = chunk_factory
        self.length = length
        self.metadata = metadata or {}

    def chunks(self, chunk_size: int = CHUNK) -> Iterator[np.ndarray]:
        remaining = self.length
        for chunk in self._factory(chunk_size):
            if remaining is not None:
                if remaining <= 0:
                    return
                chunk = chunk[:remaining]
                remaining -= len(chunk)
            if len(chunk):
                yield chunk

    def take(self, n: int | None = None) -> np.ndarray:
        parts, got = [], 0
        for chunk in self.chunks():
            if n is not None and got + len(chunk) > n:
                chunk = chunk[: n - got]
            parts.append(chunk)
            got += len(chunk)
            if n is not None and got >= n:
                break
        if not parts:
            return np.zeros(0, dtype=np.uint8)
        return np.concatenate(parts).astype(np.uint8, copy=False)

    def word(self, n: int | None = None) -> Word:
        return Word(self.alphabet, tuple(self.take(n).tolist()))

    def limit(self, n: int) -> "SymbolStream":
        n = n if self.length is None else min(n, self.length)
        return SymbolStream(self.alphabet, self._factory, n, dict(self.metadata, n=n))

    @classmethod
    def from_array(cls, data, alphabet: Alphabet = BINARY, metadata=None) -> "SymbolStream":
        arr = np.asarray(data, dtype=np.uint8)

        def factory(size):
            for i in range(0, len(arr), size):
                yield arr[i:i + size]

        return cls(alphabet, factory, len(arr), metadata or {"kind": "array"})


def as_stream(x, alphabet: Alphabet = BINARY) -> SymbolStream:
    if isinstance(x, SymbolStream):
        return x
    if isinstance(x, Word):
        return SymbolStream.from_array(np.asarray(x.data, dtype=np.uint8), x.alphabet)
    if isinstance(x, str):
        return SymbolStream.from_array(np.asarray(alphabet.encode(x), dtype=np.uint8), alphabet)
    return SymbolStream.from_array(x, alphabet)


@dataclass
class GeneratorConfig:
    kind: str
    n: int
    pattern: str | None = None
    base: int = 2
    bias: Fraction | None = None
    seed: int = 0
    path: str | None = None
    alphabet: tuple[str, ...] = ("0", "1")
    skip_whitespace: bool = True

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be at least 1")
        if self.kind not in ("periodic", "champernowne", "bernoulli", "thue_morse", "file"):
            raise ValueError(f"unknown generator kind {self.kind!r}")
        if self.kind == "bernoulli":
            self.bias = Fraction(self.bias if self.bias is not None else Fraction(1, 2))
            if not 0 < self.bias < 1:
                raise ValueError("bias must lie strictly between 0 and 1")
        if self.kind == "champernowne" and self.base < 2:
            raise ValueError("base must be at least 2")
        if self.kind == "periodic" and not self.pattern:
            raise ValueError("periodic generator needs a non-empty pattern")

    def metadata(self) -> dict:
        meta = {k: (str(v) if isinstance(v, Fraction) else v) for k, v in asdict(self).items()}
        meta["alphabet"] = list(self.alphabet)
        if self.kind == "bernoulli":
            meta["prng"] = PRNG_ALGORITHM
            meta["draw"] = "symbol 1 iff uniform double in [0,1) < bias"
        return meta


def _periodic(pattern: np.ndarray):
    def factory(size):
        reps = -(-size // len(pattern))
        block = np.tile(pattern, reps + 1)
        offset = 0
        while True:
            yield block[offset:offset + size]
            offset = (offset + size) % len(pattern)
    return factory


def _digits(i: int, base: int) -> list[int]:
    if i == 0:
        return [0]
    out = []
    while i:
        i, r = divmod(i, base)
        out.append(r)
    return out[::-1]


def _champernowne(base: int):
    def factory(size):
        buf: list[int] = []
        for i in itertools.count():
            buf.extend(_digits(i, base))
            if len(buf) >= size:
                yield np.asarray(buf[:size], dtype=np.uint8)
                buf = buf[size:]
    return factory


def _bernoulli(bias: Fraction, seed: int):
    threshold = float(bias)

    def factory(size):
        rng = np.random.Generator(np.random.PCG64(seed))
        while True:
            yield (rng.random(size) < threshold).astype(np.uint8)
    return factory


def _popcount_parity(idx: np.ndarray) -> np.ndarray:
    v = idx.astype(np.uint64)
    out = np.zeros(len(v), dtype=np.uint8)
    one = np.uint64(1)
    while v.any():
        out ^= (v & one).astype(np.uint8)
        v >>= one
    return out


def _thue_morse(size):
    start = 0
    while True:
        yield _popcount_parity(np.arange(start, start + size, dtype=np.uint64))
        start += size


def generate(config: GeneratorConfig) -> SymbolStream:
    alphabet = Alphabet(tuple(config.alphabet))
    if config.kind == "periodic":
        factory = _periodic(np.asarray(alphabet.encode(config.pattern), dtype=np.uint8))
    elif config.kind == "champernowne":
        alphabet = Alphabet.of_size(config.base) if config.base != alphabet.sigma else alphabet
        factory = _champernowne(config.base)
    elif config.kind == "bernoulli":
        factory = _bernoulli(config.bias, config.seed)
    elif config.kind == "thue_morse":
        factory = _thue_morse
    else:
        return ingest(config.path, alphabet, skip_whitespace=config.skip_whitespace).limit(config.n)
    return SymbolStream(alphabet, factory, config.n, config.metadata())


def _lookup_table(alphabet: Alphabet) -> np.ndarray:
    table = np.full(256, -1, dtype=np.int16)
    for i, g in enumerate(alphabet.symbols):
        raw = g.encode()
        if len(raw) != 1:
            raise ValueError(f"file ingestion needs single-byte glyphs, got {g!r}")
        table[raw[0]] = i
    return table


_WHITESPACE = np.zeros(256, dtype=bool)
_WHITESPACE[[9, 10, 11, 12, 13, 32]] = True


def ingest(path, alphabet: Alphabet = BINARY, skip_whitespace: bool = True) -> SymbolStream:
    """Stream a glyph file without materializing it; offsets in errors are byte offsets."""
    path = Path(path)
    if not path.is_file() or not os.access(path, os.R_OK):
        raise FileNotReadable(f"cannot read {path}")
    table = _lookup_table(alphabet)

    def factory(size):
        offset = 0
        with open(path, "rb") as fh:
            while True:
                raw = fh.read(size)
                if not raw:
                    return
                b = np.frombuffer(raw, dtype=np.uint8)
                idx = table[b]
                keep = np.ones(len(b), dtype=bool)
                if skip_whitespace:
                    keep = ~_WHITESPACE[b]
                bad = np.flatnonzero((idx < 0) & keep)
                if len(bad):
                    pos = int(bad[0])
                    raise BadSymbol(chr(raw[pos]), offset + pos)
                offset += len(raw)
                yield idx[keep].astype(np.uint8)

    meta = {"kind": "file", "path": str(path), "sha256": file_sha256(path)}
    return SymbolStream(alphabet, factory, None, meta)


def file_sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def write_corpus(stream: SymbolStream, path) -> Path:
    """Write a stream as glyph text plus a ``<name>.json`` metadata sidecar."""
    path = Path(path)
    glyphs = np.frombuffer("".join(stream.alphabet.symbols).encode(), dtype=np.uint8)
    with open(path, "wb") as fh:
        for chunk in stream.chunks():
            fh.write(glyphs[chunk].tobytes())
    sidecar = path.with_suffix(path.suffix + ".json")
    meta = dict(stream.metadata, sha256=file_sha256(path), alphabet=list(stream.alphabet.symbols))
    sidecar.write_text(json.dumps(meta, indent=2, sort_keys=True))
    return sidecar


def parse_gen(text: str, n: int) -> GeneratorConfig:
    """Parse the inline ``kind:params`` syntax, e.g. ``bernoulli:1/4:seed42``."""
    kind, _, rest = text.partition(":")
    parts = [p for p in rest.split(":") if p] if rest else []
    if kind == "periodic":
        if not parts:
            raise ValueError("periodic needs a pattern, e.g. periodic:01")
        glyphs = tuple(sorted(set(parts[0]) | {"0", "1"})) if set(parts[0]) <= {"0", "1"} else tuple(sorted(set(parts[0])))
        return GeneratorConfig("periodic", n, pattern=parts[0], alphabet=glyphs)
    if kind == "champernowne":
        base = int(parts[0]) if parts else 2
        return GeneratorConfig("champernowne", n, base=base, alphabet=Alphabet.of_size(base).symbols)
    if kind == "bernoulli":
        bias, seed = Fraction(1, 2), 0
        for p in parts:
            if p.startswith("seed"):
                seed = int(p[4:])
            else:
                bias = Fraction(p)
        return GeneratorConfig("bernoulli", n, bias=bias, seed=seed)
    if kind in ("thue_morse", "thue-morse"):
        return GeneratorConfig("thue_morse", n)
    raise ValueError(f"unknown generator {kind!r}")
