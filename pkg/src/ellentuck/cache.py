"""Optional on-disk memo of norm values and certificates."""
from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import tempfile
from fractions import Fraction
from typing import Optional

from .codec import (
    CodecError,
    certificate_from_json,
    certificate_to_json,
    dumps,
    params_to_json,
    parse_rational,
    rational_to_str,
    vector_to_json,
)
from .norm import norm, verify_certificate
from .space import Params, Vector

VERSION = 1
SPOT_CHECK_RATE = 0.01

log = logging.getLogger(__name__)


def entry_key(params: Params, x: Vector) -> str:
    return dumps([params_to_json(params), vector_to_json(x)])


def digest(cert_json) -> str:
    return hashlib.sha256(dumps(cert_json).encode()).hexdigest()


class NormCache:
    """Maps (params, vector) to (value, certificate, certificate digest).

    Unreadable files and version mismatches are treated as empty with a
    warning.  Every hit is re-verified, and a seeded 1% of hits are also
    recomputed from scratch.
    """

    def __init__(self, path: Optional[str] = None, seed: int = 0,
                 spot_rate: float = SPOT_CHECK_RATE):
        self.path = path
        self.entries: dict = {}
        self.rng = random.Random(seed)
        self.spot_rate = spot_rate
        self.hits = 0
        self.misses = 0
        self.spot_checks = 0
        self.dirty = False
        if path and os.path.exists(path):
            self._load()

    def _load(self):
        try:
            with open(self.path, encoding="utf-8") as fh:
                data = json.load(fh)
            if not isinstance(data, dict) or data.get("version") != VERSION:
                log.warning("cache %s has an unknown version; starting cold", self.path)
                return
            entries = data.get("entries")
            if not isinstance(entries, dict):
                raise ValueError("entries missing")
            self.entries = entries
        except (OSError, ValueError) as exc:
            log.warning("cache %s is unreadable (%s); starting cold", self.path, exc)
            self.entries = {}

    def _decode(self, key: str, params: Params, x: Vector):
        raw = self.entries.get(key)
        if raw is None:
            return None
        try:
            cert_json = raw["certificate"]
            if digest(cert_json) != raw["digest"]:
                raise ValueError("digest mismatch")
            value = parse_rational(raw["value"])
            cert = certificate_from_json(cert_json)
        except (KeyError, TypeError, ValueError, CodecError) as exc:
            log.warning("dropping corrupt cache entry (%s)", exc)
            return None
        if cert.value != value or not verify_certificate(x, params, cert):
            log.warning("dropping cache entry whose certificate does not verify")
            return None
        return value, cert

    def norm(self, x: Vector, params: Params):
        key = entry_key(params, x)
        hit = self._decode(key, params, x)
        if hit is not None:
            self.hits += 1
            if self.rng.random() < self.spot_rate:
                self.spot_checks += 1
                fresh = norm(x, params)
                if fresh[0] != hit[0]:
                    log.warning("cache spot check failed for %s; replacing entry", key)
                    self._store(key, fresh)
                    return fresh
            return hit
        self.misses += 1
        result = norm(x, params)
        self._store(key, result)
        return result

    def _store(self, key: str, result):
        value, cert = result
        cert_json = certificate_to_json(cert)
        self.entries[key] = {"value": rational_to_str(value), "certificate": cert_json,
                             "digest": digest(cert_json)}
        self.dirty = True

    def save(self):
        if not self.path or not self.dirty:
            return
        folder = os.path.dirname(os.path.abspath(self.path))
        fd, tmp = tempfile.mkstemp(dir=folder, suffix=".tmp")
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            json.dump({"version": VERSION, "entries": self.entries}, fh)
        os.replace(tmp, self.path)
        self.dirty = False


def cached_value(x: Vector, params: Params, cache: Optional[NormCache]) -> Fraction:
    return (cache.norm(x, params) if cache else norm(x, params))[0]
