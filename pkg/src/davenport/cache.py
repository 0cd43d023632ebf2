"""Append-only JSON-lines store of exact invariant results."""

from __future__ import annotations

import json
import logging
import os
from pathlib import Path
from typing import Optional

from .search import InvariantResult

log = logging.getLogger(__name__)

CACHE_ENV = "DAVENPORT_CACHE"


def default_path() -> Optional[Path]:
    value = os.environ.get(CACHE_ENV)
    return Path(value) if value else None


def key_of(group_literal: str, kind: str, m: int = 1) -> tuple:
    return (group_literal, kind, m if kind == "Dm" else 1)


class ResultCache:
    """Results keyed by (canonical group literal, invariant, m).

    Lines that fail to parse are skipped with a warning; later lines win
    over earlier ones for the same key.
    """

    def __init__(self, path):
        self.path = Path(path)
        self._records: dict = {}
        self._load()

    def _load(self) -> None:
        if not self.path.exists():
            return
        with self.path.open(encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    rec = json.loads(line)
                    result = InvariantResult.from_record(rec)
                except (ValueError, KeyError, TypeError) as err:
                    log.warning("%s:%d: skipping corrupt cache line (%s)", self.path, lineno, err)
                    continue
                self._records[key_of(result.group.literal, result.kind, result.m)] = rec

    def __len__(self) -> int:
        return len(self._records)

    def get(self, group_literal: str, kind: str, m: int = 1) -> Optional[InvariantResult]:
        rec = self._records.get(key_of(group_literal, kind, m))
        return None if rec is None else InvariantResult.from_record(rec)

    def put(self, result: InvariantResult) -> None:
        rec = result.as_record()
        key = key_of(result.group.literal, result.kind, result.m)
        if self._records.get(key) == rec:
            return
        self._records[key] = rec
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
