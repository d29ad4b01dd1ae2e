"""Durable storage: trained models, uploaded datasets, staff accounts,
login sessions, and singular-evaluation history.

Backed by an embedded SQLite file (":memory:" works for tests). Writes are
serialized behind one lock and wrapped in transactions, so the store is
safe to share across request handlers. Models are stored as canonical JSON
documents: sorted keys, compact separators, shortest round-trip numbers,
branch lists that preserve branch order, and a whole-document SHA-256
checksum, which makes serialization byte-stable and golden-testable.
"""

from __future__ import annotations

import hashlib
import hmac
import json
import re
import secrets
import sqlite3
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .dataset import (
    AttributeSchema,
    Categorical,
    ClassDistribution,
    Continuous,
    Role,
    Schema,
)
from .errors import (
    AuthRequired,
    BadCredentials,
    CorruptDocument,
    DomainViolation,
    DuplicateEmail,
    Forbidden,
    InvalidEmail,
    NotFound,
    WeakPassword,
)
from .induction import (
    CategoricalSplit,
    ContinuousSplit,
    Internal,
    Leaf,
    ModelStats,
    TrainConfig,
    TrainedModel,
    TreeNode,
)

DOCUMENT_VERSION = 1
PBKDF2_ITERATIONS = 120_000
MIN_PASSWORD_LENGTH = 8

_EMAIL = re.compile(r"[^@\s]+@[^@\s]+\.[^@\s]+\Z")


# ------------------------------------------------------- model documents

def _schema_document(schema: Schema) -> dict:
    attributes = []
    for a in schema.attributes:
        if isinstance(a.kind, Categorical):
            kind = {"type": "categorical",
                    "domain": list(a.kind.domain) if a.kind.domain else None}
        else:
            kind = {"type": "continuous", "unit": a.kind.unit}
        attributes.append({"name": a.name, "kind": kind, "role": a.role.value})
    return {"attributes": attributes}


def _schema_from_document(doc: dict) -> Schema:
    attributes = []
    for a in doc["attributes"]:
        kind_doc = a["kind"]
        if kind_doc["type"] == "categorical":
            domain = kind_doc["domain"]
            kind = Categorical(tuple(domain) if domain is not None else None)
        else:
            kind = Continuous(kind_doc["unit"])
        attributes.append(AttributeSchema(a["name"], kind, Role(a["role"])))
    return Schema(tuple(attributes))


def _tree_document(node: TreeNode) -> dict:
    counts = {k: float(v) for k, v in node.distribution.counts.items()}
    if isinstance(node, Leaf):
        return {"kind": "leaf", "label": node.label, "distribution": counts}
    if isinstance(node.test, CategoricalSplit):
        test = {"type": "categorical", "attribute": node.test.attribute}
    else:
        test = {"type": "continuous", "attribute": node.test.attribute,
                "threshold": node.test.threshold}
    return {"kind": "internal", "test": test,
            "branches": [[key, _tree_document(sub)]
                         for key, sub in node.branches.items()],
            "fallback": node.fallback_label, "distribution": counts}


def _tree_from_document(doc: dict) -> TreeNode:
    dist = ClassDistribution({k: float(v)
                              for k, v in doc["distribution"].items()})
    if doc["kind"] == "leaf":
        return Leaf(doc["label"], dist)
    if doc["kind"] != "internal":
        raise CorruptDocument(f"unknown node kind {doc['kind']!r}")
    test_doc = doc["test"]
    if test_doc["type"] == "categorical":
        test = CategoricalSplit(test_doc["attribute"])
    else:
        test = ContinuousSplit(test_doc["attribute"], test_doc["threshold"])
    branches = {key: _tree_from_document(sub) for key, sub in doc["branches"]}
    return Internal(test, branches, doc["fallback"], dist)


def _canonical(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def model_to_document(m: TrainedModel) -> dict:
    doc = {
        "version": DOCUMENT_VERSION,
        "algorithm": m.algorithm,
        "schema": _schema_document(m.schema),
        "tree": _tree_document(m.root),
        "config": {"min_leaf_size": m.config.min_leaf_size,
                   "prune": m.config.prune,
                   "confidence_factor": m.config.confidence_factor},
        "stats": {"training_rows": m.stats.training_rows,
                  "node_count": m.stats.node_count,
                  "leaf_count": m.stats.leaf_count},
    }
    doc["checksum"] = hashlib.sha256(_canonical(doc).encode()).hexdigest()
    return doc


def serialize_model(m: TrainedModel) -> str:
    return _canonical(model_to_document(m))


def document_to_model(doc: dict) -> TrainedModel:
    body = dict(doc)
    stored_checksum = body.pop("checksum", None)
    computed = hashlib.sha256(_canonical(body).encode()).hexdigest()
    if stored_checksum != computed:
        raise CorruptDocument("checksum mismatch")
    if body.get("version") != DOCUMENT_VERSION:
        raise CorruptDocument(f"unsupported version {body.get('version')!r}")
    try:
        config_doc = body["config"]
        stats_doc = body["stats"]
        return TrainedModel(
            body["algorithm"],
            _tree_from_document(body["tree"]),
            _schema_from_document(body["schema"]),
            TrainConfig(config_doc["min_leaf_size"], config_doc["prune"],
                        config_doc["confidence_factor"]),
            ModelStats(stats_doc["training_rows"], stats_doc["node_count"],
                       stats_doc["leaf_count"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptDocument(str(exc)) from exc


def deserialize_model(text: str) -> TrainedModel:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CorruptDocument(str(exc)) from exc
    if not isinstance(doc, dict):
        raise CorruptDocument("model document must be an object")
    return document_to_model(doc)


# ---------------------------------------------------------- stored records

@dataclass(frozen=True)
class StaffAccount:
    account_id: str
    name: str
    gender: str
    branch: str
    email: str
    password_digest: str
    created_at: str


@dataclass(frozen=True)
class HistoryEntry:
    entry_id: str
    account_id: str
    app_id: str
    name: str
    gender: str
    percent_raw: float
    merit_raw: float
    admission_type_raw: str
    algorithm: str
    predicted: str
    created_at: str


@dataclass(frozen=True)
class StoredDataset:
    dataset_id: str
    account_id: str
    name: str
    content: str
    created_at: str


def _digest_password(password: str) -> str:
    salt = secrets.token_bytes(16)
    digest = hashlib.pbkdf2_hmac("sha256", password.encode(), salt,
                                 PBKDF2_ITERATIONS)
    return f"pbkdf2_sha256${PBKDF2_ITERATIONS}${salt.hex()}${digest.hex()}"


def _verify_password(password: str, stored: str) -> bool:
    try:
        scheme, iterations, salt_hex, digest_hex = stored.split("$")
        if scheme != "pbkdf2_sha256":
            return False
        digest = hashlib.pbkdf2_hmac("sha256", password.encode(),
                                     bytes.fromhex(salt_hex), int(iterations))
        return hmac.compare_digest(digest.hex(), digest_hex)
    except (ValueError, TypeError):
        return False


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="microseconds")


def _new_id() -> str:
    return secrets.token_hex(8)


_TABLES = """
CREATE TABLE IF NOT EXISTS accounts (
    account_id TEXT PRIMARY KEY,
    name TEXT NOT NULL,
    gender TEXT NOT NULL,
    branch TEXT NOT NULL,
    email TEXT NOT NULL UNIQUE,
    password_digest TEXT NOT NULL,
    created_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS sessions (
    token TEXT PRIMARY KEY,
    account_id TEXT NOT NULL REFERENCES accounts(account_id),
    expires_at REAL NOT NULL
);
CREATE TABLE IF NOT EXISTS models (
    model_id TEXT PRIMARY KEY,
    algorithm TEXT NOT NULL,
    document TEXT NOT NULL,
    created_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS datasets (
    dataset_id TEXT PRIMARY KEY,
    account_id TEXT NOT NULL REFERENCES accounts(account_id),
    name TEXT NOT NULL,
    content TEXT NOT NULL,
    created_at TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS history (
    entry_id TEXT PRIMARY KEY,
    account_id TEXT NOT NULL REFERENCES accounts(account_id),
    app_id TEXT NOT NULL,
    name TEXT NOT NULL,
    gender TEXT NOT NULL,
    percent_raw REAL NOT NULL,
    merit_raw REAL NOT NULL,
    admission_type_raw TEXT NOT NULL,
    algorithm TEXT NOT NULL,
    predicted TEXT NOT NULL,
    created_at TEXT NOT NULL
);
"""


class Store:
    """Single-file store; every public method is safe to call from
    concurrent request handlers."""

    def __init__(self, path: str | Path = ":memory:"):
        self._conn = sqlite3.connect(str(path), check_same_thread=False)
        self._conn.execute("PRAGMA foreign_keys = ON")
        self._lock = threading.RLock()
        with self._lock, self._conn:
            self._conn.executescript(_TABLES)

    def close(self) -> None:
        with self._lock:
            self._conn.close()

    # -- models

    def save_model(self, m: TrainedModel, model_id: str | None = None) -> str:
        model_id = model_id or _new_id()
        document = serialize_model(m)
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT OR REPLACE INTO models VALUES (?, ?, ?, ?)",
                (model_id, m.algorithm, document, _now_iso()))
        return model_id

    def load_model(self, model_id: str) -> TrainedModel:
        with self._lock:
            row = self._conn.execute(
                "SELECT document FROM models WHERE model_id = ?",
                (model_id,)).fetchone()
        if row is None:
            raise NotFound(f"no model {model_id!r}")
        return deserialize_model(row[0])

    def latest_model(self, algorithm: str) -> tuple[str, TrainedModel]:
        with self._lock:
            row = self._conn.execute(
                "SELECT model_id, document FROM models WHERE algorithm = ? "
                "ORDER BY created_at DESC, rowid DESC LIMIT 1",
                (algorithm,)).fetchone()
        if row is None:
            raise NotFound(f"no trained {algorithm} model")
        return row[0], deserialize_model(row[1])

    def list_models(self) -> list[tuple[str, str, str]]:
        """(model_id, algorithm, created_at), newest first."""
        with self._lock:
            rows = self._conn.execute(
                "SELECT model_id, algorithm, created_at FROM models "
                "ORDER BY created_at DESC, rowid DESC").fetchall()
        return [tuple(r) for r in rows]

    # -- accounts and sessions

    def register(self, name: str, gender: str, branch: str, email: str,
                 password: str) -> str:
        if not _EMAIL.match(email):
            raise InvalidEmail(email)
        if len(password) < MIN_PASSWORD_LENGTH:
            raise WeakPassword(
                f"password must have at least {MIN_PASSWORD_LENGTH} characters")
        if gender not in ("Male", "Female"):
            raise DomainViolation(f"gender {gender!r} must be Male or Female")
        account_id = _new_id()
        try:
            with self._lock, self._conn:
                self._conn.execute(
                    "INSERT INTO accounts VALUES (?, ?, ?, ?, ?, ?, ?)",
                    (account_id, name, gender, branch, email,
                     _digest_password(password), _now_iso()))
        except sqlite3.IntegrityError as exc:
            raise DuplicateEmail(email) from exc
        return account_id

    def account(self, account_id: str) -> StaffAccount:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM accounts WHERE account_id = ?",
                (account_id,)).fetchone()
        if row is None:
            raise NotFound(f"no account {account_id!r}")
        return StaffAccount(*row)

    def authenticate(self, email: str, password: str,
                     ttl_seconds: float = 86400.0) -> str:
        with self._lock:
            row = self._conn.execute(
                "SELECT account_id, password_digest FROM accounts "
                "WHERE email = ?", (email,)).fetchone()
        if row is None or not _verify_password(password, row[1]):
            raise BadCredentials("invalid email or password")
        token = secrets.token_urlsafe(32)
        with self._lock, self._conn:
            self._conn.execute("INSERT INTO sessions VALUES (?, ?, ?)",
                               (token, row[0], time.time() + ttl_seconds))
        return token

    def session_account(self, token: str) -> str:
        with self._lock:
            row = self._conn.execute(
                "SELECT account_id, expires_at FROM sessions WHERE token = ?",
                (token,)).fetchone()
            if row is not None and row[1] < time.time():
                with self._conn:
                    self._conn.execute("DELETE FROM sessions WHERE token = ?",
                                       (token,))
                row = None
        if row is None:
            raise AuthRequired("missing, expired, or revoked session token")
        return row[0]

    def revoke_session(self, token: str) -> None:
        with self._lock, self._conn:
            self._conn.execute("DELETE FROM sessions WHERE token = ?", (token,))

    # -- datasets (private to the uploading account)

    def save_dataset(self, account_id: str, name: str, content: str) -> str:
        dataset_id = _new_id()
        with self._lock, self._conn:
            self._conn.execute("INSERT INTO datasets VALUES (?, ?, ?, ?, ?)",
                               (dataset_id, account_id, name, content,
                                _now_iso()))
        return dataset_id

    def load_dataset(self, dataset_id: str, account_id: str) -> StoredDataset:
        with self._lock:
            row = self._conn.execute(
                "SELECT * FROM datasets WHERE dataset_id = ?",
                (dataset_id,)).fetchone()
        if row is None:
            raise NotFound(f"no dataset {dataset_id!r}")
        stored = StoredDataset(*row)
        if stored.account_id != account_id:
            raise Forbidden("dataset belongs to another account")
        return stored

    def list_datasets(self, account_id: str) -> list[tuple[str, str, str]]:
        """(dataset_id, name, created_at) for one account, newest first."""
        with self._lock:
            rows = self._conn.execute(
                "SELECT dataset_id, name, created_at FROM datasets "
                "WHERE account_id = ? ORDER BY created_at DESC, rowid DESC",
                (account_id,)).fetchall()
        return [tuple(r) for r in rows]

    # -- singular-evaluation history

    def history_append(self, account_id: str, app_id: str, name: str,
                       gender: str, percent_raw: float, merit_raw: float,
                       admission_type_raw: str, algorithm: str,
                       predicted: str) -> HistoryEntry:
        if predicted not in ("pass", "fail"):
            raise DomainViolation(f"predicted label {predicted!r}")
        self.account(account_id)  # owner must exist
        entry = HistoryEntry(_new_id(), account_id, app_id, name, gender,
                             float(percent_raw), float(merit_raw),
                             admission_type_raw, algorithm, predicted,
                             _now_iso())
        with self._lock, self._conn:
            self._conn.execute(
                "INSERT INTO history VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)",
                (entry.entry_id, entry.account_id, entry.app_id, entry.name,
                 entry.gender, entry.percent_raw, entry.merit_raw,
                 entry.admission_type_raw, entry.algorithm, entry.predicted,
                 entry.created_at))
        return entry

    def history_list(self, account_id: str) -> list[HistoryEntry]:
        with self._lock:
            rows = self._conn.execute(
                "SELECT * FROM history WHERE account_id = ? "
                "ORDER BY created_at DESC, rowid DESC",
                (account_id,)).fetchall()
        return [HistoryEntry(*row) for row in rows]

    def history_delete(self, account_id: str, entry_id: str) -> None:
        with self._lock, self._conn:
            row = self._conn.execute(
                "SELECT account_id FROM history WHERE entry_id = ?",
                (entry_id,)).fetchone()
            if row is None:
                raise NotFound(f"no history entry {entry_id!r}")
            if row[0] != account_id:
                raise Forbidden("history entry belongs to another account")
            self._conn.execute("DELETE FROM history WHERE entry_id = ?",
                               (entry_id,))
