"""Retrieval of researcher publication records from an OpenAlex-style API.

Fetches work listings for an author or institution, keeps the per-year
citation counts needed for windowed indicators, and maps the payload into
ResearcherRecord objects. Requests are cursor-paginated, rate-limited,
retried with backoff on transient failures, and cached to disk keyed by
request URL so an interrupted crawl resumes where it stopped.

The base URL is configurable, which is also how tests point the fetcher
at a local fixture server.
"""

from __future__ import annotations

import json
import threading
import time
import urllib.parse
from dataclasses import dataclass
from pathlib import Path

import requests

from .cohort import Publication, ResearcherRecord

RETRYABLE_STATUSES = {429, 500, 502, 503, 504}


class FetchError(RuntimeError):
    """HTTP retrieval failed after the configured retries."""

    def __init__(self, message: str, status: int | None = None):
        super().__init__(message)
        self.status = status


@dataclass
class FetchConfig:
    base_url: str = "https://api.openalex.org"
    per_page: int = 200
    max_retries: int = 3
    retry_backoff_s: float = 1.0
    rate_limit_s: float = 0.1
    timeout_s: float = 30.0
    cache_dir: str | None = None
    mailto: str | None = None


class _UrlCache:
    """Append-only NDJSON cache of successful responses, keyed by URL.

    Writes are serialized within the process; concurrent fetch jobs must
    use distinct cache directories.
    """

    def __init__(self, cache_dir: str | None):
        self._lock = threading.Lock()
        self._entries: dict[str, dict] = {}
        self._path: Path | None = None
        if cache_dir is not None:
            directory = Path(cache_dir)
            directory.mkdir(parents=True, exist_ok=True)
            self._path = directory / "responses.ndjson"
            if self._path.exists():
                with open(self._path, encoding="utf-8") as fh:
                    for line in fh:
                        if line.strip():
                            entry = json.loads(line)
                            self._entries[entry["url"]] = entry["body"]

    def get(self, url: str) -> dict | None:
        return self._entries.get(url)

    def put(self, url: str, body: dict) -> None:
        with self._lock:
            self._entries[url] = body
            if self._path is not None:
                with open(self._path, "a", encoding="utf-8") as fh:
                    fh.write(json.dumps({"url": url, "body": body}) + "\n")


def _request_json(session: requests.Session, url: str, config: FetchConfig) -> dict:
    last_status = None
    for attempt in range(config.max_retries + 1):
        if attempt > 0:
            time.sleep(config.retry_backoff_s * attempt)
        try:
            resp = session.get(url, timeout=config.timeout_s)
        except requests.RequestException as exc:
            last_status = None
            last_error = str(exc)
            continue
        last_status = resp.status_code
        last_error = f"HTTP {resp.status_code}"
        if resp.status_code == 200:
            try:
                return resp.json()
            except ValueError as exc:
                raise ValueError(f"response is not valid JSON: {exc}") from exc
        if resp.status_code not in RETRYABLE_STATUSES:
            break
    raise FetchError(
        f"fetch failed after {config.max_retries} retries: {last_error} ({url})",
        status=last_status,
    )


def _work_filter(entity_id: str) -> str:
    eid = entity_id.rsplit("/", 1)[-1]
    if eid.startswith("A"):
        return f"author.id:{eid}"
    if eid.startswith("I"):
        return f"institutions.id:{eid}"
    raise ValueError(f"entity id must start with A (author) or I (institution), got {entity_id!r}")


def _require(work: dict, field: str):
    if field not in work or work[field] is None:
        raise ValueError(f"work {work.get('id', '<no id>')} missing field '{field}'")
    return work[field]


def _publication_from_work(work: dict) -> Publication:
    wid = _require(work, "id")
    year = int(_require(work, "publication_year"))
    counts = work.get("counts_by_year")
    if counts is None:
        raise ValueError(f"work {wid} missing field 'counts_by_year'")
    by_year = {}
    for row in counts:
        if "year" not in row or "cited_by_count" not in row:
            raise ValueError(f"work {wid} has a counts_by_year row missing 'year'/'cited_by_count'")
        by_year[int(row["year"])] = int(row["cited_by_count"])
    return Publication(str(wid), year, by_year)


def fetch_openalex(entity_id: str, config: FetchConfig | None = None) -> list[ResearcherRecord]:
    """Fetch all works for an author (A...) or institution (I...) id.

    Returns one ResearcherRecord per author found. For an institution
    query, a work is attributed to every listed author affiliated with
    that institution on the work.
    """
    config = config or FetchConfig()
    eid = entity_id.rsplit("/", 1)[-1]
    flt = _work_filter(eid)
    cache = _UrlCache(config.cache_dir)
    session = requests.Session()

    pubs_by_author: dict[str, list[Publication]] = {}
    institute_by_author: dict[str, str] = {}

    cursor = "*"
    while cursor:
        params = {"filter": flt, "per-page": str(config.per_page), "cursor": cursor}
        if config.mailto:
            params["mailto"] = config.mailto
        url = f"{config.base_url}/works?{urllib.parse.urlencode(params)}"
        body = cache.get(url)
        if body is None:
            body = _request_json(session, url, config)
            cache.put(url, body)
            if config.rate_limit_s > 0:
                time.sleep(config.rate_limit_s)
        if "results" not in body:
            raise ValueError("response missing field 'results'")
        for work in body["results"]:
            publication = _publication_from_work(work)
            for author_id, inst_id in _attributions(work, eid):
                pubs_by_author.setdefault(author_id, []).append(publication)
                institute_by_author.setdefault(author_id, inst_id)
        cursor = (body.get("meta") or {}).get("next_cursor")
        if not body["results"]:
            break

    return [
        ResearcherRecord(author_id, institute_by_author.get(author_id, ""), tuple(pubs))
        for author_id, pubs in sorted(pubs_by_author.items())
    ]


def _attributions(work: dict, entity_id: str) -> list[tuple[str, str]]:
    """(author_id, institute_id) pairs this work contributes to."""
    authorships = work.get("authorships") or []
    out = []
    for auth in authorships:
        author = (auth.get("author") or {}).get("id")
        if not author:
            continue
        author = author.rsplit("/", 1)[-1]
        inst_ids = [
            (inst.get("id") or "").rsplit("/", 1)[-1] for inst in (auth.get("institutions") or [])
        ]
        if entity_id.startswith("A"):
            if author == entity_id:
                out.append((author, inst_ids[0] if inst_ids else ""))
        else:
            if entity_id in inst_ids:
                out.append((author, entity_id))
    return out
