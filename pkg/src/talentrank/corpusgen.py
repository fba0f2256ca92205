"""Synthetic resume corpus generation.

Stands in for a large real profile corpus: documents are rendered as
block-table files from data-driven templates (correlated skill groups,
employers, universities with ranking scores), fully deterministic per seed.
The same templates drive the ranking CSVs so a generated corpus is
self-contained for the train/score pipeline.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from datetime import date
from importlib import resources
from pathlib import Path

from .extract import (
    CandidateProfile,
    DateSpan,
    DegreeLevel,
    EducationEntry,
    SkillMention,
    WorkEntry,
    candidate_id_for,
    normalize_employer,
)
from .gazetteers import normalize_term

DEFAULT_REFERENCE_DATE = date(2025, 1, 1)

_MONTH_ABBREV = ["Jan", "Feb", "Mar", "Apr", "May", "Jun", "Jul", "Aug", "Sep", "Oct", "Nov", "Dec"]


def load_templates() -> dict:
    text = (resources.files("talentrank") / "data" / "corpus_templates.json").read_text("utf-8")
    return json.loads(text)


def ranking_tables(templates: dict | None = None) -> tuple[str, str]:
    """THE and QS ranking CSVs for the template university pool."""
    templates = templates or load_templates()
    the_lines = ["institution,score"]
    qs_lines = ["institution,score"]
    for uni in templates["universities"]:
        if uni["the"] is not None:
            the_lines.append(f"{uni['name']},{uni['the']}")
        if uni["qs"] is not None:
            qs_lines.append(f"{uni['name']},{uni['qs']}")
    return "\n".join(the_lines) + "\n", "\n".join(qs_lines) + "\n"


# ---------------------------------------------------------------------------
# Block-table rendering
# ---------------------------------------------------------------------------

_BODY_FONT = 10.5
_BODY_HEIGHT = 12
_HEADLINE_FONT = 16
_HEADLINE_HEIGHT = 18
_NAME_FONT = 20
_NAME_HEIGHT = 22
_LINE_GAP = 4
_SECTION_GAP = 18


class _BlockWriter:
    def __init__(self):
        self.lines: list[str] = []
        self.y = 60

    def add(self, text: str, font: float, height: int, bold: bool, gap: int = _LINE_GAP):
        if self.lines:
            self.y += gap
        self.lines.append(
            "\t".join(["0", "72", str(self.y), "451", str(height), str(font), "1" if bold else "0", "", text])
        )
        self.y += height

    def body(self, text: str):
        self.add(text, _BODY_FONT, _BODY_HEIGHT, bold=False)

    def headline(self, text: str):
        self.add(text, _HEADLINE_FONT, _HEADLINE_HEIGHT, bold=True, gap=_SECTION_GAP)

    def render(self) -> str:
        return "\n".join(self.lines) + "\n"


def _month_span_text(rng: random.Random, start: tuple[int, int], end: tuple[int, int] | None) -> str:
    """Render a (year, month) range in one of several surface forms."""
    style = rng.choice(("name", "name", "slash", "pair"))
    def fmt(ym):
        year, month = ym
        if style == "name":
            return f"{_MONTH_ABBREV[month - 1]} {year}"
        if style == "slash":
            return f"{month:02d}/{year}"
        return f"{year},{month}"
    left = fmt(start)
    right = "Present" if end is None else fmt(end)
    return f"{left} - {right}"


def _add_months(ym: tuple[int, int], delta: int) -> tuple[int, int]:
    index = ym[0] * 12 + (ym[1] - 1) + delta
    return index // 12, index % 12 + 1


@dataclass
class _SyntheticSpec:
    name: str
    email: str
    phone: str
    city: str
    educations: list[tuple[str, str, int, int]]        # university, degree text, start year, end year
    works: list[tuple[str, str, tuple[int, int], tuple[int, int] | None]]  # employer, title, start ym, end ym
    skills: list[str]


def _synthesize(rng: random.Random, templates: dict, index: int) -> _SyntheticSpec:
    first = rng.choice(templates["first_names"])
    last = rng.choice(templates["last_names"])
    name = f"{first} {last}"
    email = f"{first.lower()}.{last.lower()}{index}@example.com"
    phone = f"+1 (415) 555-{rng.randrange(10000):04d}"
    city = rng.choice(templates["cities"])

    groups = templates["skill_groups"]
    primary = rng.choice(sorted(groups))
    pool = list(groups[primary])
    if rng.random() < 0.3:
        secondary = rng.choice(sorted(g for g in groups if g != primary))
        extra = groups[secondary]
        pool.extend(rng.sample(extra, k=max(1, round(len(extra) * templates["group_mix"]["secondary_share"]))))
    n_skills = rng.randint(5, min(9, len(pool)))
    skills = rng.sample(pool, k=n_skills)

    degree_specs = templates["degrees"]
    bachelor_start = rng.randint(2000, 2014)
    educations = []
    bachelor = rng.choice([d for d in degree_specs if d["level"] == "Bachelor"])
    educations.append((rng.choice(templates["universities"])["name"], bachelor["text"],
                       bachelor_start, bachelor_start + 4))
    graduate_end = bachelor_start + 4
    if rng.random() < 0.5:
        higher = rng.choice([d for d in degree_specs if d["level"] in ("Master", "Doctoral")])
        educations.append((rng.choice(templates["universities"])["name"], higher["text"],
                           graduate_end, graduate_end + 2))
        graduate_end += 2
    educations.reverse()  # most recent first, matching typical resumes

    n_jobs = rng.randint(1, 4)
    works = []
    cursor = (min(2024, graduate_end + rng.randint(0, 2)), rng.randint(1, 12))
    open_ended = rng.random() < 0.3
    for job_i in range(n_jobs):
        duration = rng.randint(8, 48)
        start = _add_months(cursor, -duration)
        end = None if (job_i == 0 and open_ended) else cursor
        works.append((rng.choice(templates["employers"]), rng.choice(templates["titles"]), start, end))
        cursor = _add_months(start, -rng.randint(1, 6))
    return _SyntheticSpec(name=name, email=email, phone=phone, city=city,
                          educations=educations, works=works, skills=skills)


def _render_document(spec: _SyntheticSpec, rng: random.Random) -> str:
    w = _BlockWriter()
    w.add(spec.name, _NAME_FONT, _NAME_HEIGHT, bold=True)
    w.body(f"{spec.email} · {spec.phone}")
    w.body(spec.city)

    w.headline(rng.choice(("EDUCATION", "Education")))
    for university, degree_text, start_year, end_year in spec.educations:
        w.body(f"{university} · {start_year} - {end_year}")
        w.body(degree_text)

    w.headline(rng.choice(("WORK EXPERIENCE", "EXPERIENCE", "Professional Experience")))
    for employer, title, start, end in spec.works:
        w.body(f"{employer} · {_month_span_text(rng, start, end)}")
        w.body(title)

    w.headline(rng.choice(("SKILLS", "Skills", "TECHNICAL SKILLS")))
    half = (len(spec.skills) + 1) // 2
    w.body(", ".join(spec.skills[:half]))
    if spec.skills[half:]:
        w.body(", ".join(spec.skills[half:]))
    return w.render()


def generate_documents(n: int, seed: int, templates: dict | None = None) -> list[tuple[str, str]]:
    """(filename, block-table text) pairs for `n` synthetic resumes."""
    if n < 1:
        raise ValueError("n must be >= 1")
    templates = templates or load_templates()
    rng = random.Random(seed)
    width = max(4, len(str(n)))
    out = []
    for i in range(1, n + 1):
        spec = _synthesize(rng, templates, i)
        out.append((f"profile_{i:0{width}d}.blocks", _render_document(spec, rng)))
    return out


def write_corpus(outdir: str | Path, n: int, seed: int) -> list[Path]:
    """Write the synthetic corpus plus its THE/QS ranking tables; returns file paths."""
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    templates = load_templates()
    paths = []
    for filename, text in generate_documents(n, seed, templates):
        path = outdir / filename
        path.write_text(text, encoding="utf-8")
        paths.append(path)
    the_csv, qs_csv = ranking_tables(templates)
    (outdir / "the_rankings.csv").write_text(the_csv, encoding="utf-8")
    (outdir / "qs_rankings.csv").write_text(qs_csv, encoding="utf-8")
    return paths


# ---------------------------------------------------------------------------
# Planted-partition skill corpus (for embedding/cluster evaluation)
# ---------------------------------------------------------------------------

def planted_skill_corpus(
    n_groups: int = 4,
    group_size: int = 8,
    profiles_per_group: int = 40,
    skills_per_profile: int = 5,
    seed: int = 0,
) -> tuple[list[set[str]], dict[str, int]]:
    """Profiles drawing skills from disjoint groups; returns (corpus, token -> group)."""
    rng = random.Random(seed)
    groups = [[f"g{g}s{s}" for s in range(group_size)] for g in range(n_groups)]
    token_group = {token: g for g, tokens in enumerate(groups) for token in tokens}
    corpus = []
    for g in range(n_groups):
        for _ in range(profiles_per_group):
            k = min(skills_per_profile, group_size)
            corpus.append(set(rng.sample(groups[g], k=k)))
    return corpus, token_group


# ---------------------------------------------------------------------------
# Direct random profiles (for property tests)
# ---------------------------------------------------------------------------

def random_profile(rng: random.Random, reference_date: date = DEFAULT_REFERENCE_DATE,
                   templates: dict | None = None, source_id: str | None = None) -> CandidateProfile:
    """A structurally valid random CandidateProfile built without the parser."""
    templates = templates or load_templates()
    spec = _synthesize(rng, templates, rng.randrange(10 ** 6))
    source = source_id or f"random-{rng.randrange(10 ** 9)}"

    educations = []
    for university, degree_text, start_year, end_year in spec.educations:
        level = next(d["level"] for d in templates["degrees"] if d["text"] == degree_text)
        span = DateSpan(
            start=date(start_year, 1, 1), end=date(end_year, 12, 31),
            open_ended=False, resolved_end=date(end_year, 12, 31),
        )
        educations.append(
            EducationEntry(
                institution_raw=university,
                institution_key=normalize_term(university),
                degree=DegreeLevel(level),
                field_of_study=None,
                span=span,
                source_blocks=(0,),
            )
        )
    works = []
    for employer, title, start, end in spec.works:
        start_date = date(start[0], start[1], 1)
        if end is None:
            span = DateSpan(start=start_date, end=None, open_ended=True, resolved_end=reference_date)
        else:
            end_date = date(end[0], end[1], 28)
            span = DateSpan(start=start_date, end=end_date, open_ended=False, resolved_end=end_date)
        works.append(
            WorkEntry(
                employer_raw=employer,
                employer_key=normalize_employer(employer),
                title=title,
                span=span,
                source_blocks=(0,),
            )
        )
    skills = tuple(SkillMention(raw=s, token=s, source_blocks=(0,)) for s in spec.skills)
    return CandidateProfile(
        candidate_id=candidate_id_for(source),
        source_document=source,
        reference_date=reference_date,
        name=spec.name,
        email=spec.email,
        phone=spec.phone,
        location=spec.city,
        educations=tuple(educations),
        works=tuple(works),
        skills=skills,
    )
