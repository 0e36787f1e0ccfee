"""Back-translation clients behind a single translator boundary.

Four kinds of translator are supported: an external line-in/line-out
command, a JSON HTTP service, and two deterministic mocks. Failures are
recorded per input index instead of aborting the run, except when the
external command cannot be started at all.
"""

from __future__ import annotations

import enum
import logging
import shlex
import subprocess
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import httpx

from .errors import (
    ConfigError,
    CorpusIOError,
    HttpError,
    ProcessExitNonZero,
    ProcessSpawnError,
    ShapeMismatch,
    TranslatorError,
    TranslatorLineCountMismatch,
)
from .tokenizer import DelimiterSet, get_tokenizer

log = logging.getLogger(__name__)


class TranslatorKind(enum.Enum):
    EXTERNAL_COMMAND = "cmd"
    HTTP_SERVICE = "http"
    MOCK_DICTIONARY = "mock-dict"
    MOCK_IDENTITY = "mock-identity"


@dataclass(frozen=True)
class TranslatorSpec:
    kind: TranslatorKind
    endpoint: str | None = None
    dictionary: Mapping[str, str] | None = None
    batch_size: int = 64
    timeout: float = 60.0
    retries: int = 1
    concurrency: int = 4
    # detokenize inputs / retokenize outputs for cmd and http translators
    joiner: str = " "
    tokenizer: str = "whitespace"
    delims: DelimiterSet = DelimiterSet()

    def __post_init__(self):
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")
        if not self.timeout > 0:
            raise ConfigError("timeout must be > 0")
        if self.retries < 0 or self.concurrency < 1:
            raise ConfigError("retries must be >= 0 and concurrency >= 1")
        if self.kind in (TranslatorKind.EXTERNAL_COMMAND, TranslatorKind.HTTP_SERVICE) and not self.endpoint:
            raise ConfigError(f"{self.kind.value} translator needs an endpoint")
        if self.kind is TranslatorKind.MOCK_DICTIONARY and self.dictionary is None:
            raise ConfigError("mock-dict translator needs a dictionary")

    @classmethod
    def parse(cls, text: str, **options) -> "TranslatorSpec":
        """Build a spec from ``cmd:"..."``, ``http:URL``, ``mock-identity`` or ``mock-dict:FILE``."""
        if text == "mock-identity":
            return cls(TranslatorKind.MOCK_IDENTITY, **options)
        kind, sep, rest = text.partition(":")
        if not sep or not rest:
            raise ConfigError(f"cannot parse translator {text!r}")
        if kind == "cmd":
            rest = rest.strip()
            if len(rest) >= 2 and rest[0] == rest[-1] and rest[0] in "'\"":
                rest = rest[1:-1]
            return cls(TranslatorKind.EXTERNAL_COMMAND, endpoint=rest, **options)
        if kind == "http":
            # "http:http://host/x" and "http://host/x" both work
            url = rest if rest.startswith(("http://", "https://")) else f"http:{rest}"
            return cls(TranslatorKind.HTTP_SERVICE, endpoint=url, **options)
        if kind == "https":
            return cls(TranslatorKind.HTTP_SERVICE, endpoint=text, **options)
        if kind == "mock-dict":
            return cls(TranslatorKind.MOCK_DICTIONARY, dictionary=load_dictionary(rest), **options)
        raise ConfigError(f"unknown translator kind {kind!r}")


def load_dictionary(path) -> dict[str, str]:
    """Read ``word<TAB>translation`` lines."""
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise CorpusIOError(f"cannot read dictionary {path}: {exc}") from exc
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise CorpusIOError(f"{path}: line {lineno}: expected word<TAB>translation")
        out[parts[0]] = parts[1]
    return out


@dataclass
class TranslationBatchResult:
    """``outputs[i]`` is the translation of input i, or None if it is in ``failures``."""

    outputs: list = field(default_factory=list)
    failures: list = field(default_factory=list)

    @property
    def succeeded(self) -> int:
        return sum(o is not None for o in self.outputs)


def _texts(seq) -> tuple[str, ...]:
    return tuple(getattr(t, "text", t) for t in seq)


class _Client:
    def __init__(self, spec: TranslatorSpec):
        self.spec = spec
        self._tokenize = get_tokenizer(spec.tokenizer)

    def retokenize(self, line: str):
        if not line.strip():
            return None
        return tuple(t.text for t in self._tokenize(line, self.spec.delims))

    def run_batch(self, items, first: int):
        """Translate one batch; return a list of token tuples (None = empty output)."""
        raise NotImplementedError


class _IdentityClient(_Client):
    def run_batch(self, items, first):
        return [tuple(it) for it in items]


class _DictionaryClient(_Client):
    def run_batch(self, items, first):
        d = self.spec.dictionary
        out = []
        for it in items:
            toks = []
            for w in it:
                toks.extend(d.get(w, w).split())
            out.append(tuple(toks) or None)
        return out


class _CommandClient(_Client):
    def __init__(self, spec):
        super().__init__(spec)
        self.argv = shlex.split(spec.endpoint)
        if not self.argv:
            raise ConfigError("empty translator command")

    def run_batch(self, items, first):
        rng = (first, first + len(items))
        payload = "".join(self.spec.joiner.join(it) + "\n" for it in items)
        try:
            proc = subprocess.run(self.argv, input=payload.encode("utf-8"), capture_output=True,
                                  timeout=self.spec.timeout)
        except (FileNotFoundError, PermissionError, NotADirectoryError) as exc:
            raise ProcessSpawnError(f"cannot start translator {self.argv[0]!r}: {exc}", rng) from exc
        except subprocess.TimeoutExpired:
            raise TranslatorError(f"translator timed out after {self.spec.timeout}s", rng) from None
        if proc.returncode != 0:
            err = proc.stderr.decode("utf-8", "replace").strip()[-200:]
            raise ProcessExitNonZero(f"translator exited with {proc.returncode}: {err}", rng)
        try:
            text = proc.stdout.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TranslatorError(f"translator output is not UTF-8: {exc}", rng) from None
        lines = text.split("\n")
        if lines and lines[-1] == "":
            lines.pop()
        if len(lines) != len(items):
            raise TranslatorLineCountMismatch(
                f"translator returned {len(lines)} lines for {len(items)} inputs", rng)
        return [self.retokenize(ln.rstrip("\r")) for ln in lines]


class _HttpClient(_Client):
    def __init__(self, spec, transport=None):
        super().__init__(spec)
        self.client = httpx.Client(timeout=spec.timeout, transport=transport)

    def run_batch(self, items, first):
        rng = (first, first + len(items))
        texts = [self.spec.joiner.join(it) for it in items]
        try:
            resp = self.client.post(self.spec.endpoint, json={"texts": texts})
        except httpx.HTTPError as exc:
            raise HttpError(f"request to {self.spec.endpoint} failed: {exc}", rng) from None
        if resp.status_code != 200:
            raise HttpError(f"HTTP {resp.status_code} from {self.spec.endpoint}", rng)
        try:
            translations = resp.json()["translations"]
        except (ValueError, KeyError, TypeError) as exc:
            raise ShapeMismatch(f"malformed response body: {exc!r}", rng) from None
        if not isinstance(translations, list) or len(translations) != len(items):
            got = len(translations) if isinstance(translations, list) else type(translations).__name__
            raise ShapeMismatch(f"expected {len(items)} translations, got {got}", rng)
        return [self.retokenize(t) if isinstance(t, str) else None for t in translations]

    def close(self):
        self.client.close()


def make_client(spec: TranslatorSpec, transport=None) -> _Client:
    if spec.kind is TranslatorKind.MOCK_IDENTITY:
        return _IdentityClient(spec)
    if spec.kind is TranslatorKind.MOCK_DICTIONARY:
        return _DictionaryClient(spec)
    if spec.kind is TranslatorKind.EXTERNAL_COMMAND:
        return _CommandClient(spec)
    return _HttpClient(spec, transport)


def _run_with_retry(client: _Client, items, first, retries):
    attempt = 0
    while True:
        try:
            return client.run_batch(items, first), None
        except ProcessSpawnError:
            raise
        except TranslatorError as exc:
            if attempt >= retries:
                return None, str(exc)
            attempt += 1
            log.warning("retrying batch %d:%d after: %s", first, first + len(items), exc)


def _translate(client: _Client, items: Sequence[tuple], spec: TranslatorSpec) -> TranslationBatchResult:
    n = len(items)
    batches = [(i, items[i:i + spec.batch_size]) for i in range(0, n, spec.batch_size)]

    def work(batch):
        first, chunk = batch
        return first, chunk, _run_with_retry(client, chunk, first, spec.retries)

    if spec.kind is TranslatorKind.HTTP_SERVICE and spec.concurrency > 1 and len(batches) > 1:
        with ThreadPoolExecutor(max_workers=spec.concurrency) as pool:
            done = list(pool.map(work, batches))
    else:
        done = [work(b) for b in batches]

    result = TranslationBatchResult(outputs=[None] * n)
    for first, chunk, (outputs, reason) in done:
        if outputs is None:
            result.failures.extend((first + k, reason) for k in range(len(chunk)))
            continue
        for k, out in enumerate(outputs):
            if out:
                result.outputs[first + k] = out
            else:
                result.failures.append((first + k, "empty translation"))
    result.failures.sort()
    return result


def backtranslate(partials: Sequence, spec: TranslatorSpec, transport=None) -> TranslationBatchResult:
    """Translate target-side token sequences into source-side token sequences, in order."""
    if not partials:
        raise ConfigError("nothing to back-translate")
    client = make_client(spec, transport)
    try:
        return _translate(client, [_texts(p) for p in partials], spec)
    finally:
        if isinstance(client, _HttpClient):
            client.close()


class TranslationCache:
    """Exact-match memo of target token sequence -> source token sequence."""

    def __init__(self):
        self._store = {}
        self.hits = 0
        self.misses = 0

    def lookup(self, key):
        key = _texts(key)
        if key in self._store:
            self.hits += 1
            return self._store[key]
        self.misses += 1
        return None

    def store(self, key, value):
        self._store[_texts(key)] = value

    def __len__(self):
        return len(self._store)


class Backtranslator:
    """A translator plus an optional cache, so repeated partials are sent once.

    ``sent`` counts inputs actually handed to the underlying translator.
    """

    def __init__(self, spec: TranslatorSpec, cache: bool = True, transport=None):
        self.spec = spec
        self.cache = TranslationCache() if cache else None
        self.transport = transport
        self.sent = 0

    def dedupe_cache(self, key):
        return None if self.cache is None else self.cache.lookup(key)

    def translate(self, partials: Sequence) -> TranslationBatchResult:
        keys = [_texts(p) for p in partials]
        result = TranslationBatchResult(outputs=[None] * len(keys))
        if not keys:
            return result
        if self.cache is None:
            todo = list(range(len(keys)))
            unique = [keys[i] for i in todo]
            slot = {i: i for i in todo}
        else:
            pending, unique, slot = {}, [], {}
            for i, k in enumerate(keys):
                hit = self.dedupe_cache(k)
                if hit is not None:
                    result.outputs[i] = hit
                    continue
                if k not in pending:
                    pending[k] = len(unique)
                    unique.append(k)
                slot[i] = pending[k]
        if unique:
            self.sent += len(unique)
            sub = backtranslate(unique, self.spec, self.transport)
            failed = dict(sub.failures)
            for i, u in slot.items():
                if sub.outputs[u] is not None:
                    result.outputs[i] = sub.outputs[u]
                else:
                    result.failures.append((i, failed.get(u, "translation failed")))
            if self.cache is not None:
                for u, k in enumerate(unique):
                    if sub.outputs[u] is not None:
                        self.cache.store(k, sub.outputs[u])
        result.failures.sort()
        return result
