"""Local vulnerability store.

Ingests NVD JSON feeds (format 1.1, optionally gzipped) into a SQLite
database and answers device-name searches. A search tokenizes the device
name, drops marketing noise (colors, sizes, the word "smart", bare numbers),
and returns the records whose description contains every remaining keyword
as a whole token. Records without CVSS metrics are skipped at ingest time
because the downstream exploit classifier needs the subscores.
"""

from __future__ import annotations

import gzip
import json
import logging
import re
import sqlite3
from dataclasses import dataclass
from pathlib import Path

log = logging.getLogger(__name__)


class StoreError(RuntimeError):
    """Store file missing or feed malformed."""


# Tokens that match far too many records to identify a product.
GENERIC_TOKENS = frozenset({"smart", "wifi", "device", "the", "a"})
COLOR_TOKENS = frozenset({"white", "black", "red", "green", "blue", "yellow", "gray", "grey"})
SIZE_TOKENS = frozenset({"mini", "small", "large", "big"})

_WORD = re.compile(r"[a-z0-9]+")
_CVE_YEAR = re.compile(r"^CVE-(\d{4})-\d+$")

_IMPACT_LEVELS = ("none", "low", "high")
_V2_IMPACT = {"NONE": "none", "PARTIAL": "low", "COMPLETE": "high"}
_VECTORS = ("network", "adjacent", "local", "physical")


def tokenize(text: str) -> list[str]:
    """Lowercase alphanumeric tokens, in order, without duplicates."""

    seen: dict[str, None] = {}
    for token in _WORD.findall(text.lower()):
        seen.setdefault(token, None)
    return list(seen)


def query_tokens(device_name: str) -> list[str]:
    """Search keywords for a device name, with noise words removed."""

    out = []
    for token in tokenize(device_name):
        if token in GENERIC_TOKENS or token in COLOR_TOKENS or token in SIZE_TOKENS:
            continue
        if token.isdigit():
            continue
        out.append(token)
    return out


@dataclass(frozen=True)
class CveRecord:
    """One CVE with the CVSS fields the exploit classifier consumes."""

    cve_id: str
    description: str
    attack_vector: str
    conf_impact: str
    integ_impact: str
    avail_impact: str
    impact_score: float
    exploitability_score: float
    year: int

    def __post_init__(self) -> None:
        if self.attack_vector not in _VECTORS:
            raise StoreError(f"{self.cve_id}: bad attack vector {self.attack_vector!r}")
        for name in ("conf_impact", "integ_impact", "avail_impact"):
            if getattr(self, name) not in _IMPACT_LEVELS:
                raise StoreError(f"{self.cve_id}: bad {name} {getattr(self, name)!r}")


_SCHEMA = """
CREATE TABLE IF NOT EXISTS records (
    cve_id TEXT PRIMARY KEY,
    description TEXT NOT NULL,
    attack_vector TEXT NOT NULL,
    conf_impact TEXT NOT NULL,
    integ_impact TEXT NOT NULL,
    avail_impact TEXT NOT NULL,
    impact_score REAL NOT NULL,
    exploitability_score REAL NOT NULL,
    year INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS tokens (
    token TEXT NOT NULL,
    cve_id TEXT NOT NULL,
    PRIMARY KEY (token, cve_id)
) WITHOUT ROWID;
CREATE INDEX IF NOT EXISTS tokens_by_token ON tokens (token);
"""

_COLUMNS = (
    "cve_id, description, attack_vector, conf_impact, integ_impact, avail_impact, "
    "impact_score, exploitability_score, year"
)


class CveStore:
    """SQLite-backed CVE records with a whole-token inverted index."""

    def __init__(self, path: str | Path = ":memory:"):
        self.path = str(path)
        self._conn = sqlite3.connect(self.path)
        self._conn.executescript(_SCHEMA)

    def __enter__(self) -> "CveStore":
        return self

    def __exit__(self, *exc: object) -> None:
        self.close()

    def close(self) -> None:
        self._conn.close()

    @staticmethod
    def open_existing(path: str | Path) -> "CveStore":
        if str(path) != ":memory:" and not Path(path).exists():
            raise StoreError(f"vulnerability store not found: {path}")
        return CveStore(path)

    def count(self) -> int:
        return self._conn.execute("SELECT COUNT(*) FROM records").fetchone()[0]

    def add(self, record: CveRecord) -> None:
        """Insert or replace one record and reindex its description tokens."""

        with self._conn:
            self._conn.execute("DELETE FROM tokens WHERE cve_id = ?", (record.cve_id,))
            self._conn.execute(
                f"INSERT OR REPLACE INTO records ({_COLUMNS}) VALUES (?,?,?,?,?,?,?,?,?)",
                (
                    record.cve_id,
                    record.description,
                    record.attack_vector,
                    record.conf_impact,
                    record.integ_impact,
                    record.avail_impact,
                    record.impact_score,
                    record.exploitability_score,
                    record.year,
                ),
            )
            self._conn.executemany(
                "INSERT OR IGNORE INTO tokens (token, cve_id) VALUES (?, ?)",
                [(token, record.cve_id) for token in tokenize(record.description)],
            )

    def get(self, cve_id: str) -> CveRecord | None:
        row = self._conn.execute(
            f"SELECT {_COLUMNS} FROM records WHERE cve_id = ?", (cve_id,)
        ).fetchone()
        return CveRecord(*row) if row else None

    def all_records(self) -> list[CveRecord]:
        rows = self._conn.execute(f"SELECT {_COLUMNS} FROM records ORDER BY cve_id").fetchall()
        return [CveRecord(*row) for row in rows]

    def search(self, device_name: str) -> list[CveRecord]:
        """Records whose description contains every keyword of the name.

        Matching is exact per whole token; there is no stemming, so a
        record mentioning "locks" does not match the keyword "lock".
        """

        keywords = query_tokens(device_name)
        if not keywords:
            log.warning("device name %r has no searchable keywords", device_name)
            return []
        marks = ",".join("?" for _ in keywords)
        rows = self._conn.execute(
            f"SELECT {_COLUMNS} FROM records WHERE cve_id IN ("
            f"  SELECT cve_id FROM tokens WHERE token IN ({marks})"
            f"  GROUP BY cve_id HAVING COUNT(DISTINCT token) = ?"
            f") ORDER BY cve_id",
            (*keywords, len(keywords)),
        ).fetchall()
        return [CveRecord(*row) for row in rows]

    def ingest_feed(self, feed_path: str | Path) -> tuple[int, int]:
        """Load an NVD 1.1 JSON feed. Returns (ingested, skipped) counts.

        Re-ingesting a feed is idempotent: records are replaced, not
        duplicated. Items without CVSS metrics are skipped.
        """

        added = skipped = 0
        for item in _read_feed_items(feed_path):
            record = _record_from_item(item)
            if record is None:
                skipped += 1
                continue
            self.add(record)
            added += 1
        return added, skipped


def _read_feed_items(feed_path: str | Path) -> list[dict]:
    path = Path(feed_path)
    if not path.exists():
        raise StoreError(f"feed file not found: {path}")
    blob = path.read_bytes()
    if blob[:2] == b"\x1f\x8b":
        blob = gzip.decompress(blob)
    try:
        doc = json.loads(blob)
    except json.JSONDecodeError as exc:
        raise StoreError(f"feed {path} is not valid JSON: {exc.msg}") from None
    items = doc.get("CVE_Items")
    if not isinstance(items, list):
        raise StoreError(f"feed {path} has no CVE_Items array")
    return items


def _english_description(cve: dict) -> str:
    for entry in cve.get("description", {}).get("description_data", []):
        if entry.get("lang") == "en":
            return entry.get("value", "")
    return ""


def _record_from_item(item: dict) -> CveRecord | None:
    try:
        cve_id = item["cve"]["CVE_data_meta"]["ID"]
    except (KeyError, TypeError):
        return None
    m = _CVE_YEAR.match(cve_id)
    if not m:
        return None
    description = _english_description(item["cve"])
    impact = item.get("impact", {})
    if "baseMetricV3" in impact:
        metric = impact["baseMetricV3"]
        cvss = metric.get("cvssV3", {})
        vector = cvss.get("attackVector", "").lower()
        if vector == "adjacent_network":
            vector = "adjacent"
        levels = [
            cvss.get("confidentialityImpact", "").lower(),
            cvss.get("integrityImpact", "").lower(),
            cvss.get("availabilityImpact", "").lower(),
        ]
    elif "baseMetricV2" in impact:
        metric = impact["baseMetricV2"]
        cvss = metric.get("cvssV2", {})
        vector = cvss.get("accessVector", "").lower()
        if vector == "adjacent_network":
            vector = "adjacent"
        levels = [
            _V2_IMPACT.get(cvss.get("confidentialityImpact", ""), ""),
            _V2_IMPACT.get(cvss.get("integrityImpact", ""), ""),
            _V2_IMPACT.get(cvss.get("availabilityImpact", ""), ""),
        ]
    else:
        return None
    if vector not in _VECTORS or any(level not in _IMPACT_LEVELS for level in levels):
        return None
    try:
        record = CveRecord(
            cve_id=cve_id,
            description=description,
            attack_vector=vector,
            conf_impact=levels[0],
            integ_impact=levels[1],
            avail_impact=levels[2],
            impact_score=float(metric.get("impactScore", 0.0)),
            exploitability_score=float(metric.get("exploitabilityScore", 0.0)),
            year=int(m.group(1)),
        )
    except (StoreError, ValueError):
        return None
    return record
