"""Entity extraction: dates, degrees, career steps, and profile assembly.

Labeled segments become structured entities through gazetteer and pattern
rules: date expressions normalize to exact day spans, degree surface forms
map to a closed level enum with spelling tolerance, work sections split into
career steps, and everything assembles into a CandidateProfile that keeps
block-level provenance for each extracted item.
"""

from __future__ import annotations

import calendar
import hashlib
import re
from dataclasses import dataclass, field
from datetime import date
from enum import Enum

from .errors import NormalizationError, ParameterError
from .gazetteers import EntityGazetteers, load_default_gazetteers, normalize_term
from .ingest import (
    LayoutDocument,
    SectionLabel,
    Segment,
    SegmentationParams,
    detect_headlines,
)
from .skillspace import normalize_skill

# ---------------------------------------------------------------------------
# Date normalization
# ---------------------------------------------------------------------------

_MONTHS = {
    "jan": 1, "january": 1, "feb": 2, "february": 2, "mar": 3, "march": 3,
    "apr": 4, "april": 4, "may": 5, "jun": 6, "june": 6, "jul": 7, "july": 7,
    "aug": 8, "august": 8, "sep": 9, "sept": 9, "september": 9, "oct": 10,
    "october": 10, "nov": 11, "november": 11, "dec": 12, "december": 12,
}

# northern-hemisphere season table; winter runs into the following year
_SEASONS = {
    "spring": ((3, 1), (5, 31)),
    "summer": ((6, 1), (8, 31)),
    "fall": ((9, 1), (11, 30)),
    "autumn": ((9, 1), (11, 30)),
}

_OPEN_TOKENS = {"present", "now", "current"}

_MONTH_WORD = (
    r"(?:jan(?:uary)?|feb(?:ruary)?|mar(?:ch)?|apr(?:il)?|may|jun(?:e)?|jul(?:y)?"
    r"|aug(?:ust)?|sep(?:t(?:ember)?)?|oct(?:ober)?|nov(?:ember)?|dec(?:ember)?)\.?"
)
_SEASON_WORD = r"(?:spring|summer|fall|autumn|winter)"
_YEAR = r"(?:19|20)\d{2}"
_MD = r"\d{1,2}"
_ELEMENT = (
    rf"(?:{_MD}/{_MD}/{_YEAR}"
    rf"|{_MONTH_WORD},?\s+{_YEAR}"
    rf"|{_SEASON_WORD}\s+(?:of\s+)?{_YEAR}"
    rf"|{_YEAR}\s*[,./-]\s*{_MD}"
    rf"|{_MD}\s*[,./-]\s*{_YEAR}"
    rf"|{_YEAR})"
)
_OPEN_WORD = r"(?:present|now|current)"
_RANGE_SEP = r"(?:\s*[-–—]\s*|\s+(?:to|until|through)\s+)"

DATE_RANGE_RX = re.compile(rf"\b{_ELEMENT}{_RANGE_SEP}(?:{_ELEMENT}|{_OPEN_WORD})\b", re.I)
DATE_SINGLE_RX = re.compile(rf"\b{_ELEMENT}\b", re.I)

_MDY_RX = re.compile(r"^(\d{1,2})/(\d{1,2})/(\d{4})$")
_MONTH_YEAR_RX = re.compile(r"^([a-z]+)\.?,?\s+(\d{4})$")
_SEASON_YEAR_RX = re.compile(rf"^({_SEASON_WORD})\s+(?:of\s+)?(\d{{4}})$")
_PAIR_RX = re.compile(r"^(\d{1,4})\s*([,./-])\s*(\d{1,4})$")
_BARE_YEAR_RX = re.compile(r"^(\d{4})$")
_SPLIT_RX = re.compile(_RANGE_SEP)

_OPEN = object()


@dataclass(frozen=True)
class DateSpan:
    """A closed or open-ended date range with a deterministic resolved end."""

    start: date
    end: date | None
    open_ended: bool
    resolved_end: date

    def render(self) -> str:
        return f"{render_date(self.start)} - {render_date(self.resolved_end)}"


def render_date(d: date) -> str:
    return f"{d.month:02d}/{d.day:02d}/{d.year:04d}"


def _last_day(year: int, month: int) -> int:
    return calendar.monthrange(year, month)[1]


def _valid_year(year: int) -> bool:
    return 1900 <= year <= 2099


def _parse_element(text: str):
    """Parse one date element into (start, end) day bounds, _OPEN, or None."""
    t = text.strip().strip("()[].,;:").strip().lower()
    if not t:
        return None
    if t in _OPEN_TOKENS:
        return _OPEN

    m = _MDY_RX.match(t)
    if m:
        month, day, year = (int(g) for g in m.groups())
        if not _valid_year(year):
            return None
        try:
            exact = date(year, month, day)
        except ValueError:
            return None
        return exact, exact

    m = _MONTH_YEAR_RX.match(t)
    if m and m.group(1) in _MONTHS:
        month, year = _MONTHS[m.group(1)], int(m.group(2))
        if not _valid_year(year):
            return None
        return date(year, month, 1), date(year, month, _last_day(year, month))

    m = _SEASON_YEAR_RX.match(t)
    if m:
        season, year = m.group(1), int(m.group(2))
        if not _valid_year(year):
            return None
        if season == "winter":
            return date(year, 12, 1), date(year + 1, 2, _last_day(year + 1, 2))
        (sm, sd), (em, ed) = _SEASONS[season]
        return date(year, sm, sd), date(year, em, ed)

    m = _PAIR_RX.match(t)
    if m:
        a, _, b = m.groups()
        four = [len(v) == 4 for v in (a, b)]
        if four.count(True) != 1:
            return None
        year_s, month_s = (a, b) if four[0] else (b, a)
        year, month = int(year_s), int(month_s)
        if not _valid_year(year) or not 1 <= month <= 12 or len(month_s) > 2:
            return None
        return date(year, month, 1), date(year, month, _last_day(year, month))

    m = _BARE_YEAR_RX.match(t)
    if m and _valid_year(int(m.group(1))):
        year = int(m.group(1))
        return date(year, 1, 1), date(year, 12, 31)
    return None


def normalize_date_expression(text: str, reference_date: date) -> DateSpan:
    """Normalize a date expression into an exact day span.

    Recognizes month-name, numeric year/month pairs, bare years, seasons,
    mm/dd/yyyy, ranges joined by `-`, en/em dashes, or `to`, and the
    open-ended tokens Present/Now/Current, which resolve against
    `reference_date`. Partial dates expand to their unit boundaries.
    """
    if not text or not text.strip():
        raise NormalizationError(text, "empty date expression")

    whole = _parse_element(text)
    if whole is _OPEN:
        return DateSpan(start=reference_date, end=None, open_ended=True, resolved_end=reference_date)
    if whole is not None:
        start, end = whole
        return DateSpan(start=start, end=end, open_ended=False, resolved_end=end)

    stripped = text.strip()
    for sep in _SPLIT_RX.finditer(stripped):
        left_text = stripped[: sep.start()]
        right_text = stripped[sep.end() :]
        left = _parse_element(left_text)
        if left is None or left is _OPEN:
            continue
        right = _parse_element(right_text)
        if right is None:
            continue
        start = left[0]
        if right is _OPEN:
            if start > reference_date:
                raise NormalizationError(text, "open-ended span starts after the reference date")
            return DateSpan(start=start, end=None, open_ended=True, resolved_end=reference_date)
        end = right[1]
        if start > end:
            raise NormalizationError(text, "range start is after its end")
        return DateSpan(start=start, end=end, open_ended=False, resolved_end=end)

    raise NormalizationError(text)


def months(span: DateSpan) -> int:
    """Inclusive month count: both endpoint months contribute one point."""
    return (
        (span.resolved_end.year - span.start.year) * 12
        + (span.resolved_end.month - span.start.month)
        + 1
    )


_DETECTION_REFERENCE = date(2099, 12, 31)  # permissive "today" for recognizability checks


def find_date_range(text: str):
    """First recognizable date-range expression in `text`, as a regex match, or None."""
    for m in DATE_RANGE_RX.finditer(text):
        try:
            normalize_date_expression(m.group(0), _DETECTION_REFERENCE)
        except NormalizationError:
            continue
        return m
    return None


def find_single_date(text: str, allow_bare_year: bool = True):
    """First recognizable single date element in `text`, or None."""
    for m in DATE_SINGLE_RX.finditer(text):
        candidate = m.group(0)
        if not allow_bare_year and _BARE_YEAR_RX.match(candidate.strip()):
            continue
        if _parse_element(candidate) in (None, _OPEN):
            continue
        return m
    return None


# ---------------------------------------------------------------------------
# Degree normalization
# ---------------------------------------------------------------------------

class DegreeLevel(str, Enum):
    Bachelor = "Bachelor"
    Master = "Master"
    Doctoral = "Doctoral"
    Other = "Other"


_LEVEL_PRECEDENCE = {"Doctoral": 0, "Master": 1, "Bachelor": 2}
_FUZZY_MIN_LEN = 5
_FUZZY_MAX_DIST = 2


def _edit_distance(a: str, b: str, cap: int) -> int:
    if abs(len(a) - len(b)) > cap:
        return cap + 1
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (ca != cb)))
        if min(cur) > cap:
            return cap + 1
        prev = cur
    return prev[-1]


def normalize_degree(text: str, gazetteers: EntityGazetteers | None = None) -> DegreeLevel:
    """Map a degree surface form to its level.

    Case- and punctuation-insensitive; a whole-word gazetteer hit wins, then
    a fuzzy match with edit distance <= 2 against entries of length >= 5.
    Unmatched text maps to Other.
    """
    gaz = gazetteers or load_default_gazetteers()
    norm = normalize_term(text)
    if not norm:
        return DegreeLevel.Other
    exact = gaz.degree_forms.get(norm)
    if exact:
        return DegreeLevel(exact)

    hits = [
        (len(entry), -_LEVEL_PRECEDENCE[level], entry, level)
        for entry, level in gaz.degree_forms.items()
        if re.search(rf"\b{re.escape(entry)}\b", norm)
    ]
    if hits:
        return DegreeLevel(max(hits)[3])

    best = None
    for entry, level in gaz.degree_forms.items():
        if len(entry) < _FUZZY_MIN_LEN:
            continue
        dist = _edit_distance(norm, entry, _FUZZY_MAX_DIST)
        if dist <= _FUZZY_MAX_DIST:
            key = (-dist, len(entry), -_LEVEL_PRECEDENCE[level])
            if best is None or key > best[0]:
                best = (key, level)
    if best:
        return DegreeLevel(best[1])
    return DegreeLevel.Other


# ---------------------------------------------------------------------------
# Entity types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EducationEntry:
    institution_raw: str
    institution_key: str
    degree: DegreeLevel
    field_of_study: str | None
    span: DateSpan | None
    source_blocks: tuple[int, ...]


@dataclass(frozen=True)
class WorkEntry:
    employer_raw: str
    employer_key: str
    title: str | None
    span: DateSpan
    source_blocks: tuple[int, ...]


@dataclass(frozen=True)
class SkillMention:
    raw: str
    token: str
    source_blocks: tuple[int, ...]


@dataclass
class ExtractedEntities:
    """Section-specific extraction output; unused parts stay empty."""

    label: SectionLabel
    personal: dict[str, tuple[str, int]] = field(default_factory=dict)
    educations: list[EducationEntry] = field(default_factory=list)
    works: list[WorkEntry] = field(default_factory=list)
    skills: list[SkillMention] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class CandidateProfile:
    candidate_id: str
    source_document: str
    reference_date: date
    name: str | None
    email: str | None
    phone: str | None
    location: str | None
    educations: tuple[EducationEntry, ...]
    works: tuple[WorkEntry, ...]
    skills: tuple[SkillMention, ...]
    provenance: dict[str, tuple[int, ...]] = field(default_factory=dict)
    warnings: tuple[str, ...] = ()

    def skill_tokens(self) -> set[str]:
        return {s.token for s in self.skills}


EMPLOYER_LEGAL_SUFFIXES = ("inc", "llc", "gmbh", "ltd", "corp")


def normalize_employer(text: str) -> str:
    """Normalized employer key with trailing legal suffixes stripped."""
    norm = normalize_term(text)
    tokens = norm.split()
    while len(tokens) > 1 and tokens[-1] in EMPLOYER_LEGAL_SUFFIXES:
        tokens.pop()
    key = " ".join(tokens)
    return key or norm


# ---------------------------------------------------------------------------
# Career-step splitting
# ---------------------------------------------------------------------------

def split_career_steps(
    segment: Segment,
    doc: LayoutDocument,
    params: SegmentationParams | None = None,
    keywords: frozenset[str] | None = None,
) -> list[Segment]:
    """Split a work-experience segment into career steps.

    Re-applies the headline and gap rules restricted to the segment's blocks,
    plus one extra boundary: a block containing a recognizable date-range
    expression starts a new step. The steps cover every segment block.
    """
    if segment.label != SectionLabel.WorkExperience:
        raise ParameterError("split_career_steps requires a WorkExperience segment")
    indices = segment.block_indices
    sub_doc = LayoutDocument(source_id=doc.source_id, blocks=tuple(doc.blocks[i] for i in indices))
    headline_flags = detect_headlines(sub_doc, params, keywords)

    boundaries = []
    for pos, doc_index in enumerate(indices):
        if pos == 0:
            continue
        if headline_flags[pos] or find_date_range(doc.blocks[doc_index].text) is not None:
            boundaries.append(pos)
    # the section headline alone is not a career step; fold it into the first one
    if boundaries and boundaries[0] == 1 and segment.headline_block == indices[0]:
        boundaries.pop(0)

    steps = []
    starts = [0] + boundaries
    for i, start in enumerate(starts):
        end = starts[i + 1] if i + 1 < len(starts) else len(indices)
        step_indices = indices[start:end]
        headline = None
        if i == 0 and segment.headline_block == step_indices[0]:
            headline = segment.headline_block
        elif i > 0 and headline_flags[start]:
            headline = step_indices[0]
        steps.append(Segment(block_indices=step_indices, headline_block=headline, label=segment.label))
    return steps


# ---------------------------------------------------------------------------
# Section extraction
# ---------------------------------------------------------------------------

_SUBLINE_RX = re.compile(r"\s*[|•·;]\s*|\s+/\s+")
_EMAIL_RX = re.compile(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}")
_PHONE_RX = re.compile(r"(?<![\w@.])\+?\(?\d[\d\s().\-/]{5,}\d")
_URL_RX = re.compile(r"https?://|www\.", re.I)
_SKILL_SPLIT_RX = re.compile(r"[,\n;•·|]")


def _lines(segment: Segment, doc: LayoutDocument, skip_headline: bool = True):
    """(block_index, sub-line text) pairs, splitting blocks on list separators."""
    out = []
    indices = segment.body_indices() if skip_headline else segment.block_indices
    for i in indices:
        for part in _SUBLINE_RX.split(doc.blocks[i].text):
            part = part.strip()
            if part:
                out.append((i, part))
    return out


def _strip_date(text: str, allow_bare_year: bool = False) -> str:
    m = find_date_range(text) or find_single_date(text, allow_bare_year=allow_bare_year)
    if m is None:
        return text.strip()
    cleaned = (text[: m.start()] + " " + text[m.end() :]).strip(" \t,·-–—:")
    return re.sub(r"\s+", " ", cleaned).strip()


def _is_pure_date(text: str) -> bool:
    if find_date_range(text) is None and find_single_date(text) is None:
        return False
    return not _strip_date(text, allow_bare_year=True)


def _contains_word(norm_text: str, terms) -> bool:
    return any(re.search(rf"\b{re.escape(t)}\b", norm_text) for t in terms)


def _extract_personal(segment: Segment, doc: LayoutDocument, gaz: EntityGazetteers) -> ExtractedEntities:
    out = ExtractedEntities(label=SectionLabel.Personal)
    lines = _lines(segment, doc, skip_headline=False)

    for i, text in lines:
        m = _EMAIL_RX.search(text)
        if m and "email" not in out.personal:
            out.personal["email"] = (m.group(0), i)

    for i, text in lines:
        if "phone" in out.personal:
            break
        if find_date_range(text) is not None:
            continue
        masked = _EMAIL_RX.sub(" ", text)
        m = _PHONE_RX.search(masked)
        if m and sum(c.isdigit() for c in m.group(0)) >= 7:
            out.personal["phone"] = (m.group(0).strip(), i)

    for i, text in lines:
        if "location" in out.personal:
            break
        norm = normalize_term(text)
        hits = sorted((e for e in gaz.locations if re.search(rf"\b{re.escape(e)}\b", norm)), key=len)
        if hits:
            entry = hits[-1]
            raw = re.search(r"\b" + r"\s+".join(re.escape(w) for w in entry.split()) + r"\b", text, re.I)
            out.personal["location"] = (raw.group(0) if raw else entry, i)

    headline_ish = detect_headlines(doc)
    for pass_headline_only in (True, False):
        if "name" in out.personal:
            break
        for i, text in lines:
            if pass_headline_only and not headline_ish[i]:
                continue
            if any(ch.isdigit() for ch in text) or "@" in text or _URL_RX.search(text):
                continue
            norm = normalize_term(text)
            if not norm or norm in gaz.section_keywords:
                continue
            if _contains_word(norm, gaz.locations):
                continue
            if not 1 <= len(text.split()) <= 6:
                continue
            out.personal["name"] = (text, i)
            break
    return out


def _field_of_study(degree_line: str, gaz: EntityGazetteers) -> str | None:
    tokens = degree_line.split()
    best_len = 0
    for plen in range(1, min(4, len(tokens)) + 1):
        if normalize_term(" ".join(tokens[:plen])) in gaz.degree_forms:
            best_len = plen
    if best_len == 0 or best_len == len(tokens):
        return None
    rest = tokens[best_len:]
    while rest and rest[0].lower() in ("of", "in", ","):
        rest = rest[1:]
    text = " ".join(rest).strip(" ,;:-")
    return text or None


def _extract_education(segment: Segment, doc: LayoutDocument, gaz: EntityGazetteers) -> ExtractedEntities:
    out = ExtractedEntities(label=SectionLabel.Education)
    lines = _lines(segment, doc)

    def is_institution(text: str) -> bool:
        norm = normalize_term(text)
        return _contains_word(norm, gaz.institute_keywords) or _contains_word(norm, gaz.institutions)

    # entries anchor on institution lines; leading lines join the first group
    groups: list[list[tuple[int, str]]] = []
    for item in lines:
        if is_institution(item[1]) and groups and any(is_institution(t) for _, t in groups[-1]):
            groups.append([item])
        else:
            if not groups:
                groups.append([])
            groups[-1].append(item)

    for group in groups:
        institution = next(((i, t) for i, t in group if is_institution(t)), None)
        degree_line = None
        for i, t in group:
            if institution is not None and (i, t) == institution:
                continue
            if normalize_degree(t, gaz) != DegreeLevel.Other:
                degree_line = (i, t)
                break
        if degree_line is None and institution is not None:
            if normalize_degree(institution[1], gaz) != DegreeLevel.Other:
                degree_line = institution
        if institution is None and degree_line is None:
            continue

        span_text = None
        span_block = None
        for i, t in group:
            m = find_date_range(t) or find_single_date(t)
            if m is not None:
                span_text, span_block = m.group(0), i
                break

        degree = DegreeLevel.Other
        fos = None
        if degree_line is not None:
            degree = normalize_degree(degree_line[1], gaz)
            if degree_line != institution:
                fos = _field_of_study(degree_line[1], gaz)

        sources = set()
        if institution:
            sources.add(institution[0])
        if degree_line:
            sources.add(degree_line[0])
        if span_block is not None:
            sources.add(span_block)
        inst_raw = institution[1].strip(" ,") if institution else ""
        out.educations.append(
            EducationEntry(
                institution_raw=inst_raw,
                institution_key=normalize_term(inst_raw),
                degree=degree,
                field_of_study=fos,
                span=span_text,  # raw text; build_profile normalizes it
                source_blocks=tuple(sorted(sources)),
            )
        )
    return out


def _extract_work_step(step: Segment, doc: LayoutDocument, gaz: EntityGazetteers, out: ExtractedEntities):
    lines = _lines(step, doc)
    span_text = None
    span_block = None
    for i, t in lines:
        m = find_date_range(t)
        if m is not None:
            span_text, span_block = m.group(0), i
            break
    if span_text is None:
        for i, t in lines:
            m = find_single_date(t, allow_bare_year=False)
            if m is not None:
                span_text, span_block = m.group(0), i
                break
    if span_text is None:
        out.warnings.append(f"career step at blocks {step.block_indices} has no recognizable dates; skipped")
        return

    title_line = None
    for i, t in lines:
        if _contains_word(normalize_term(_strip_date(t)), gaz.title_keywords):
            title_line = (i, t)
            break

    employer_line = None
    for i, t in lines:
        if _is_pure_date(t):
            continue
        if title_line is not None and (i, t) == title_line:
            continue
        employer_line = (i, t)
        break
    if employer_line is None and title_line is not None:
        employer_line = title_line
        title_line = None
    if employer_line is None:
        out.warnings.append(f"career step at blocks {step.block_indices} has no employer line; skipped")
        return

    employer_raw = _strip_date(employer_line[1])
    key = normalize_employer(employer_raw)
    if not key:
        out.warnings.append(f"career step at blocks {step.block_indices} employer is empty; skipped")
        return
    title = _strip_date(title_line[1]) if title_line else None

    out.works.append(
        WorkEntry(
            employer_raw=employer_raw,
            employer_key=key,
            title=title or None,
            span=span_text,  # placeholder, resolved by caller with reference date
            source_blocks=tuple(sorted({employer_line[0], span_block} | ({title_line[0]} if title_line else set()))),
        )
    )


def _extract_work(segment: Segment, doc: LayoutDocument, gaz: EntityGazetteers,
                  params: SegmentationParams | None, keywords) -> ExtractedEntities:
    out = ExtractedEntities(label=SectionLabel.WorkExperience)
    for step in split_career_steps(segment, doc, params, keywords):
        _extract_work_step(step, doc, gaz, out)
    return out


def _extract_skills(segment: Segment, doc: LayoutDocument) -> ExtractedEntities:
    out = ExtractedEntities(label=SectionLabel.Skills)
    for i in segment.body_indices():
        for part in _SKILL_SPLIT_RX.split(doc.blocks[i].text):
            raw = part.strip()
            if not raw:
                continue
            try:
                token = normalize_skill(raw)
            except NormalizationError:
                continue
            out.skills.append(SkillMention(raw=raw, token=token, source_blocks=(i,)))
    return out


def extract_entities(
    segment: Segment,
    doc: LayoutDocument,
    gazetteers: EntityGazetteers | None = None,
    params: SegmentationParams | None = None,
) -> ExtractedEntities:
    """Run the section-specific extraction rules for a labeled segment.

    Date expressions inside education and work entries are kept as raw text
    here; `build_profile` normalizes them against the profile reference date.
    Missing entities are simply left unset.
    """
    if segment.label is None:
        raise ParameterError("segment must be classified before extraction")
    gaz = gazetteers or load_default_gazetteers()
    keywords = frozenset(gaz.section_keywords)
    if segment.label == SectionLabel.Personal:
        return _extract_personal(segment, doc, gaz)
    if segment.label == SectionLabel.Education:
        return _extract_education(segment, doc, gaz)
    if segment.label == SectionLabel.WorkExperience:
        return _extract_work(segment, doc, gaz, params, keywords)
    if segment.label == SectionLabel.Skills:
        return _extract_skills(segment, doc)
    return ExtractedEntities(label=segment.label)


# ---------------------------------------------------------------------------
# Profile assembly
# ---------------------------------------------------------------------------

def candidate_id_for(source_id: str) -> str:
    return hashlib.sha256(source_id.encode("utf-8")).hexdigest()[:16]


def _span_sort_key(entry):
    if entry.span is None:
        return (1, 0)
    return (0, -entry.span.start.toordinal())


def build_profile(
    doc: LayoutDocument,
    classified: list[Segment],
    entity_sets: list[ExtractedEntities],
    reference_date: date,
) -> CandidateProfile:
    """Merge per-segment entities into one CandidateProfile.

    Education and work entries sort by span start descending with unknown
    spans last; the first extracted name wins and later conflicting names
    are recorded as warnings; raw date texts are normalized against
    `reference_date` here so open-ended spans resolve deterministically.
    """
    personal: dict[str, tuple[str, int]] = {}
    warnings: list[str] = []
    educations: list[EducationEntry] = []
    works: list[WorkEntry] = []
    skills: list[SkillMention] = []

    for entities in entity_sets:
        warnings.extend(entities.warnings)
        for key, (value, block) in entities.personal.items():
            if key not in personal:
                personal[key] = (value, block)
            elif key == "name" and personal[key][0] != value:
                warnings.append(f"conflicting name {value!r}; kept {personal[key][0]!r}")

        for edu in entities.educations:
            span = edu.span
            if isinstance(span, str):
                try:
                    span = normalize_date_expression(span, reference_date)
                except NormalizationError as exc:
                    warnings.append(str(exc))
                    span = None
            educations.append(
                EducationEntry(
                    institution_raw=edu.institution_raw,
                    institution_key=edu.institution_key,
                    degree=edu.degree,
                    field_of_study=edu.field_of_study,
                    span=span,
                    source_blocks=edu.source_blocks,
                )
            )
        for work in entities.works:
            span = work.span
            if isinstance(span, str):
                try:
                    span = normalize_date_expression(span, reference_date)
                except NormalizationError as exc:
                    warnings.append(str(exc))
                    continue
            works.append(
                WorkEntry(
                    employer_raw=work.employer_raw,
                    employer_key=work.employer_key,
                    title=work.title,
                    span=span,
                    source_blocks=work.source_blocks,
                )
            )
        skills.extend(entities.skills)

    n = len(doc.blocks)
    for collection in (educations, works, skills):
        for item in collection:
            if any(not 0 <= b < n for b in item.source_blocks):
                raise ParameterError(f"provenance block index out of range in {item!r}")

    educations.sort(key=_span_sort_key)
    works.sort(key=_span_sort_key)
    provenance = {key: (block,) for key, (_, block) in personal.items()}

    return CandidateProfile(
        candidate_id=candidate_id_for(doc.source_id),
        source_document=doc.source_id,
        reference_date=reference_date,
        name=personal.get("name", (None, 0))[0],
        email=personal.get("email", (None, 0))[0],
        phone=personal.get("phone", (None, 0))[0],
        location=personal.get("location", (None, 0))[0],
        educations=tuple(educations),
        works=tuple(works),
        skills=tuple(skills),
        provenance=provenance,
        warnings=tuple(warnings),
    )


def render_profile_text(profile: CandidateProfile) -> str:
    """Stable text rendering of a profile; the golden-sidecar format."""
    def opt(v):
        return v if v is not None else "-"

    lines = [
        f"candidate_id\t{profile.candidate_id}",
        f"source\t{profile.source_document}",
        f"reference_date\t{profile.reference_date.isoformat()}",
        f"name\t{opt(profile.name)}",
        f"email\t{opt(profile.email)}",
        f"phone\t{opt(profile.phone)}",
        f"location\t{opt(profile.location)}",
    ]
    for e in profile.educations:
        span = e.span.render() if e.span else "-"
        blocks = ",".join(str(b) for b in e.source_blocks)
        lines.append(f"education\t{e.institution_raw or '-'}\t{e.degree.value}\t{opt(e.field_of_study)}\t{span}\t{blocks}")
    for w in profile.works:
        blocks = ",".join(str(b) for b in w.source_blocks)
        lines.append(f"work\t{w.employer_raw}\t{w.employer_key}\t{opt(w.title)}\t{w.span.render()}\t{blocks}")
    for s in profile.skills:
        blocks = ",".join(str(b) for b in s.source_blocks)
        lines.append(f"skill\t{s.raw}\t{s.token}\t{blocks}")
    for w in profile.warnings:
        lines.append(f"warning\t{w}")
    return "\n".join(lines) + "\n"
