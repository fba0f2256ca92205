"""Gazetteer files and their loaders.

All gazetteers are UTF-8 text, one entry per line, `#` comments ignored.
Section keywords and degree forms carry a tab-separated label column; the
remaining files are plain term lists. The packaged defaults live under
``talentrank/data/gazetteers`` and can be overridden with custom files.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from pathlib import Path

_WS_RX = re.compile(r"\s+")
_PUNCT_RX = re.compile(r"[^\w\s+#&]", flags=re.UNICODE)


def normalize_term(text: str) -> str:
    """Lowercase, strip punctuation, collapse whitespace.

    Shared normal form for gazetteer lookups, institution keys, and
    headline keyword matching.
    """
    lowered = text.lower().replace("/", " ").replace("-", " ")
    stripped = _PUNCT_RX.sub("", lowered)
    return _WS_RX.sub(" ", stripped).strip()


def iter_gazetteer_lines(text: str):
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        yield line


def parse_term_list(text: str) -> frozenset[str]:
    return frozenset(normalize_term(line) for line in iter_gazetteer_lines(text))


def parse_labeled_terms(text: str) -> dict[str, str]:
    entries: dict[str, str] = {}
    for line in iter_gazetteer_lines(text):
        term, _, label = line.partition("\t")
        entries[normalize_term(term)] = label.strip()
    return entries


@dataclass(frozen=True)
class EntityGazetteers:
    """Immutable bundle of every gazetteer the extraction rules consult."""

    section_keywords: dict[str, str]   # normalized keyword -> section label name
    degree_forms: dict[str, str]       # normalized surface -> degree level name
    institute_keywords: frozenset[str]
    title_keywords: frozenset[str]
    locations: frozenset[str] = field(default_factory=frozenset)
    institutions: frozenset[str] = field(default_factory=frozenset)  # keyword-less names


def _read_packaged(name: str) -> str:
    return (resources.files("talentrank") / "data" / "gazetteers" / name).read_text("utf-8")


@lru_cache(maxsize=1)
def load_default_gazetteers() -> EntityGazetteers:
    return EntityGazetteers(
        section_keywords=parse_labeled_terms(_read_packaged("section_keywords.txt")),
        degree_forms=parse_labeled_terms(_read_packaged("degree_forms.txt")),
        institute_keywords=parse_term_list(_read_packaged("institute_keywords.txt")),
        title_keywords=parse_term_list(_read_packaged("title_keywords.txt")),
        locations=parse_term_list(_read_packaged("locations.txt")),
        institutions=parse_term_list(_read_packaged("institutions.txt")),
    )


def load_gazetteers_from_dir(directory: str | Path) -> EntityGazetteers:
    """Load a full gazetteer set from a directory using the packaged filenames.

    institutions.txt is optional; the other five files are required.
    """
    d = Path(directory)
    institutions_file = d / "institutions.txt"
    return EntityGazetteers(
        section_keywords=parse_labeled_terms((d / "section_keywords.txt").read_text("utf-8")),
        degree_forms=parse_labeled_terms((d / "degree_forms.txt").read_text("utf-8")),
        institute_keywords=parse_term_list((d / "institute_keywords.txt").read_text("utf-8")),
        title_keywords=parse_term_list((d / "title_keywords.txt").read_text("utf-8")),
        locations=parse_term_list((d / "locations.txt").read_text("utf-8")),
        institutions=parse_term_list(institutions_file.read_text("utf-8"))
        if institutions_file.exists()
        else frozenset(),
    )
