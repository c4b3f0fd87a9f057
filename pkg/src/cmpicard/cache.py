"""Append-only cache of per-order results, one JSON record per line."""

import hashlib
import json
import logging
import os
import threading

SCHEMA_VERSION = 1

log = logging.getLogger(__name__)


def canonical(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(key, payload):
    return hashlib.sha256(canonical([SCHEMA_VERSION, key, payload]).encode()).hexdigest()


def make_record(key, payload):
    return {"schema": SCHEMA_VERSION, "key": key, "payload": payload, "digest": digest(key, payload)}


def record_ok(rec):
    try:
        return rec["schema"] == SCHEMA_VERSION and rec["digest"] == digest(rec["key"], rec["payload"])
    except (KeyError, TypeError):
        return False


class Cache:
    """Records keyed by canonical(key); later duplicates of a key are ignored."""

    def __init__(self, path):
        self.path = path
        self.records = {}
        self.corrupt = 0
        self._lock = threading.Lock()
        if path and os.path.exists(path):
            self._load()

    def _load(self):
        with open(self.path) as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line:
                    continue
                try:
                    rec = json.loads(line)
                except json.JSONDecodeError:
                    rec = None
                if rec is None or not record_ok(rec):
                    log.warning("skipping corrupt cache line %d in %s", lineno, self.path)
                    self.corrupt += 1
                    continue
                self.records.setdefault(canonical(rec["key"]), rec)

    def get(self, key):
        rec = self.records.get(canonical(key))
        return None if rec is None else rec["payload"]

    def put(self, key, payload):
        k = canonical(key)
        with self._lock:
            if k in self.records:
                return
            rec = make_record(key, payload)
            self.records[k] = rec
            if self.path:
                with open(self.path, "a") as fh:
                    fh.write(canonical(rec) + "\n")

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records.values())
