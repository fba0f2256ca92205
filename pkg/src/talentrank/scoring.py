"""Candidate scoring against job profiles.

Education combines a degree constant (20/35/50) with the mean of two
external university ranking scores, work experience counts one point per
month plus a recency-weighted employer-score average, and each desired
skill scores `score_match - alpha * distance` against the best-matching
candidate skill. The overall score is the weighted category average with
skills counting double by default. Every score lives in [0, 100].
"""

from __future__ import annotations

import csv
import hashlib
import io
from dataclasses import dataclass, field

from .errors import NotFoundError, ParameterError, ParseError
from .extract import CandidateProfile, DegreeLevel, EducationEntry, months
from .gazetteers import normalize_term
from .persistence import canonical_json
from .skillspace import SkillEmbedding, normalize_skill

DEFAULT_DEGREE_SCORES = {"Bachelor": 20.0, "Master": 35.0, "Doctoral": 50.0, "Other": 0.0}
DEFAULT_WEIGHTS = (1.0, 1.0, 2.0)  # education, work, skills


@dataclass(frozen=True)
class ScoringConfig:
    degree_scores: dict = field(default_factory=lambda: dict(DEFAULT_DEGREE_SCORES))
    weight_education: float = 1.0
    weight_work: float = 1.0
    weight_skills: float = 2.0
    score_match: float = 100.0
    alpha: float = 100.0
    recency_half_life_years: float = 5.0
    category_cap: float = 100.0

    def __post_init__(self):
        if min(self.weight_education, self.weight_work, self.weight_skills) <= 0:
            raise ParameterError("category weights must be positive")
        if not 0 < self.score_match <= 100:
            raise ParameterError("score_match must be in (0, 100]")
        if self.alpha < 0:
            raise ParameterError("alpha must be non-negative")
        if self.recency_half_life_years <= 0:
            raise ParameterError("recency half-life must be positive")

    @property
    def weights(self) -> tuple[float, float, float]:
        return (self.weight_education, self.weight_work, self.weight_skills)

    def to_payload(self) -> dict:
        return {
            "degree_scores": dict(self.degree_scores),
            "weight_education": self.weight_education,
            "weight_work": self.weight_work,
            "weight_skills": self.weight_skills,
            "score_match": self.score_match,
            "alpha": self.alpha,
            "recency_half_life_years": self.recency_half_life_years,
            "category_cap": self.category_cap,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "ScoringConfig":
        return cls(**payload)


_CONFIG_KEYS = {
    "score_match", "alpha", "recency_half_life_years", "category_cap",
    "weight.education", "weight.work", "weight.skills",
    "degree.bachelor", "degree.master", "degree.doctoral", "degree.other",
}


def parse_config(text: str) -> ScoringConfig:
    """Parse the `key = value` config format; absent keys keep their defaults."""
    values: dict[str, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = (part.strip() for part in line.partition("="))
        if not sep or key not in _CONFIG_KEYS:
            raise ParseError(f"unknown config entry {line!r}", line=lineno)
        try:
            values[key] = float(value)
        except ValueError:
            raise ParseError(f"non-numeric value for {key}: {value!r}", line=lineno) from None

    degree_scores = dict(DEFAULT_DEGREE_SCORES)
    for level in DegreeLevel:
        key = f"degree.{level.value.lower()}"
        if key in values:
            degree_scores[level.value] = values[key]
    return ScoringConfig(
        degree_scores=degree_scores,
        weight_education=values.get("weight.education", 1.0),
        weight_work=values.get("weight.work", 1.0),
        weight_skills=values.get("weight.skills", 2.0),
        score_match=values.get("score_match", 100.0),
        alpha=values.get("alpha", 100.0),
        recency_half_life_years=values.get("recency_half_life_years", 5.0),
        category_cap=values.get("category_cap", 100.0),
    )


# ---------------------------------------------------------------------------
# University rankings
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class UniversityRankingTable:
    """Normalized institution key -> (THE score, QS score); either may be absent."""

    entries: dict[str, tuple[float | None, float | None]]
    warnings: tuple[str, ...] = ()

    def to_payload(self) -> dict:
        return {
            "entries": {k: [v[0], v[1]] for k, v in self.entries.items()},
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "UniversityRankingTable":
        return cls(
            entries={
                k: (v[0], v[1]) for k, v in payload["entries"].items()
            },
            warnings=tuple(payload.get("warnings", ())),
        )


def parse_ranking_csv(text: str, source: str) -> tuple[dict[str, float], list[str]]:
    """Parse one `institution,score` table; duplicates keep the max score."""
    scores: dict[str, float] = {}
    warnings: list[str] = []
    reader = csv.reader(io.StringIO(text))
    header = next(reader, None)
    if header is None or [h.strip().lower() for h in header[:2]] != ["institution", "score"]:
        raise ParseError(f"{source}: expected header 'institution,score'", line=1)
    for lineno, row in enumerate(reader, start=2):
        if not row or (len(row) == 1 and not row[0].strip()):
            continue
        if len(row) != 2:
            raise ParseError(f"{source}: expected 2 columns, found {len(row)}", line=lineno)
        institution, score_s = row[0].strip(), row[1].strip()
        key = normalize_term(institution)
        if not key:
            raise ParseError(f"{source}: empty institution name", line=lineno)
        try:
            score = float(score_s)
        except ValueError:
            raise ParseError(f"{source}: non-numeric score {score_s!r}", line=lineno) from None
        if not 0 <= score <= 100:
            raise ParseError(f"{source}: score {score} outside [0, 100]", line=lineno)
        if key in scores:
            warnings.append(f"{source}: duplicate institution {institution!r}; kept max score")
            score = max(score, scores[key])
        scores[key] = score
    return scores, warnings


def import_university_rankings(the_text: str, qs_text: str) -> UniversityRankingTable:
    """Join the THE and QS tables on normalized institution keys."""
    the_scores, warnings = parse_ranking_csv(the_text, "THE")
    qs_scores, qs_warnings = parse_ranking_csv(qs_text, "QS")
    warnings.extend(qs_warnings)
    entries = {
        key: (the_scores.get(key), qs_scores.get(key))
        for key in sorted(set(the_scores) | set(qs_scores))
    }
    return UniversityRankingTable(entries=entries, warnings=tuple(warnings))


def university_score(key: str, table: UniversityRankingTable) -> float:
    """Mean of both ranking scores; a missing ranking (or institution) counts as 0."""
    the_score, qs_score = table.entries.get(key, (None, None))
    return ((the_score or 0.0) + (qs_score or 0.0)) / 2.0


# ---------------------------------------------------------------------------
# Education
# ---------------------------------------------------------------------------

def most_recent_education(profile: CandidateProfile) -> EducationEntry | None:
    """Entry with the latest span start; span-less entries rank last, ties keep profile order."""
    best = None
    best_key = None
    for position, entry in enumerate(profile.educations):
        key = (entry.span is None, -entry.span.start.toordinal() if entry.span else 0, position)
        if best_key is None or key < best_key:
            best, best_key = entry, key
    return best


def most_recent_degree(profile: CandidateProfile) -> DegreeLevel | None:
    entry = most_recent_education(profile)
    return entry.degree if entry else None


def _education_details(profile, table: UniversityRankingTable, config: ScoringConfig) -> tuple[float, dict]:
    entry = most_recent_education(profile)
    if entry is None:
        return 0.0, {}
    degree_points = config.degree_scores[entry.degree.value]
    the_score, qs_score = table.entries.get(entry.institution_key, (None, None))
    uni = university_score(entry.institution_key, table)
    raw = degree_points + uni
    score = min(config.category_cap, raw)
    return score, {
        "institution": entry.institution_raw,
        "institution_key": entry.institution_key,
        "degree": entry.degree.value,
        "degree_points": degree_points,
        "university_the": the_score,
        "university_qs": qs_score,
        "university_score": uni,
        "capped": raw > config.category_cap,
    }


def education_score(profile: CandidateProfile, table: UniversityRankingTable, config: ScoringConfig) -> float:
    """Degree constant plus university ranking score for the most recent education, capped."""
    return _education_details(profile, table, config)[0]


# ---------------------------------------------------------------------------
# Work experience
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EmployerScoreTable:
    """Employer key -> mean education score of its (most recent) employees."""

    scores: dict[str, float]
    profile_counts: dict[str, int]
    corpus_hash: str

    def score(self, key: str) -> float:
        return self.scores.get(key, 0.0)

    def to_payload(self) -> dict:
        return {
            "scores": dict(self.scores),
            "profile_counts": dict(self.profile_counts),
            "corpus_hash": self.corpus_hash,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "EmployerScoreTable":
        return cls(
            scores=dict(payload["scores"]),
            profile_counts={k: int(v) for k, v in payload["profile_counts"].items()},
            corpus_hash=payload["corpus_hash"],
        )


def corpus_profile_hash(candidate_ids) -> str:
    """Stable fingerprint of the candidate corpus an employer table was built from."""
    return hashlib.sha256(canonical_json(sorted(candidate_ids))).hexdigest()[:16]


def most_recent_work(profile: CandidateProfile):
    best = None
    best_key = None
    for position, entry in enumerate(profile.works):
        key = (-entry.span.start.toordinal(), position)
        if best_key is None or key < best_key:
            best, best_key = entry, key
    return best


def build_employer_scores(
    corpus: list[CandidateProfile],
    table: UniversityRankingTable,
    config: ScoringConfig,
) -> EmployerScoreTable:
    """Average education score of each employer's employees, grouped by the
    employer of every profile's most recent work entry."""
    if not corpus:
        raise ParameterError("corpus is empty")
    groups: dict[str, list[float]] = {}
    for profile in corpus:
        work = most_recent_work(profile)
        if work is None:
            continue
        groups.setdefault(work.employer_key, []).append(education_score(profile, table, config))
    digest = corpus_profile_hash(p.candidate_id for p in corpus)
    return EmployerScoreTable(
        scores={k: sum(v) / len(v) for k, v in sorted(groups.items())},
        profile_counts={k: len(v) for k, v in sorted(groups.items())},
        corpus_hash=digest,
    )


def experience_points(profile: CandidateProfile) -> float:
    """One point per employment month, summed over all entries (overlaps both count)."""
    return float(sum(months(w.span) for w in profile.works))


def _recency_weight(end, reference, half_life_years: float) -> float:
    years = max(0.0, (reference - end).days) / 365.25
    return 0.5 ** (years / half_life_years)


def _work_details(profile, employers: EmployerScoreTable, config: ScoringConfig) -> tuple[float, dict]:
    if not profile.works:
        return 0.0, {"experience_points": 0.0, "weighted_employer_average": 0.0, "entries": []}
    points = 0.0
    weight_sum = 0.0
    weighted = 0.0
    entries = []
    for work in profile.works:
        entry_months = months(work.span)
        weight = _recency_weight(work.span.resolved_end, profile.reference_date, config.recency_half_life_years)
        employer_score = employers.score(work.employer_key)
        points += entry_months
        weight_sum += weight
        weighted += weight * employer_score
        entries.append(
            {
                "employer": work.employer_raw,
                "employer_key": work.employer_key,
                "months": entry_months,
                "weight": weight,
                "employer_score": employer_score,
            }
        )
    average = weighted / weight_sum if weight_sum > 0 else 0.0
    score = min(config.category_cap, points + average)
    return score, {
        "experience_points": points,
        "weighted_employer_average": average,
        "entries": entries,
    }


def work_score(profile: CandidateProfile, employers: EmployerScoreTable, config: ScoringConfig) -> float:
    """Experience months plus the recency-weighted employer average, capped at 100."""
    return _work_details(profile, employers, config)[0]


# ---------------------------------------------------------------------------
# Skills
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SkillMatch:
    desired: str
    matched: str | None
    distance: float
    score: float

    def to_payload(self) -> dict:
        return {
            "desired": self.desired,
            "matched": self.matched,
            "distance": self.distance,
            "score": self.score,
        }


def per_skill_score(distance: float, score_match: float = 100.0, alpha: float = 100.0) -> float:
    """The desired-skill score: clamp(score_match - alpha * distance, 0, 100)."""
    return min(100.0, max(0.0, score_match - alpha * distance))


def skill_score(
    candidate_skills: set[str],
    desired: tuple[str, ...] | list[str],
    emb: SkillEmbedding,
    config: ScoringConfig,
) -> tuple[tuple[SkillMatch, ...], float]:
    """Match every desired skill to the closest candidate skill and average.

    An exact token match forces distance 0 regardless of the embedding; an
    out-of-vocabulary desired skill (or a candidate with no in-vocabulary
    skills) falls back to distance 1. Argmin ties break by vocabulary index.
    """
    if not desired:
        raise ParameterError("desired skill list is empty")
    vocab = emb.vocabulary
    in_vocab = sorted(
        (vocab.index_of(t) for t in candidate_skills if t in vocab)
    )
    results = []
    for want in desired:
        if want in candidate_skills:
            dist, matched = 0.0, want
        elif want in vocab and in_vocab:
            want_vec = emb.vector(want)
            dist, matched_idx = 1.0, None
            for idx in in_vocab:
                cos = float(want_vec @ emb.vectors[idx])
                d = min(1.0, max(0.0, 1.0 - cos))
                if matched_idx is None or d < dist:
                    dist, matched_idx = d, idx
            matched = vocab.tokens[matched_idx]
        else:
            dist, matched = 1.0, None
        results.append(
            SkillMatch(
                desired=want,
                matched=matched,
                distance=dist,
                score=per_skill_score(dist, config.score_match, config.alpha),
            )
        )
    average = sum(r.score for r in results) / len(results)
    return tuple(results), average


# ---------------------------------------------------------------------------
# Composition
# ---------------------------------------------------------------------------

def overall_score(edu: float, work: float, skills: float, weights=DEFAULT_WEIGHTS) -> float:
    """Weighted average of the three category scores; skills weigh double by default."""
    w_e, w_w, w_s = weights
    if min(w_e, w_w, w_s) <= 0:
        raise ParameterError("category weights must be positive")
    return (w_e * edu + w_w * work + w_s * skills) / (w_e + w_w + w_s)


@dataclass(frozen=True)
class JobProfile:
    job_id: str
    name: str
    desired_skills: tuple[str, ...]
    min_experience_years: float | None = None
    required_degrees: frozenset[DegreeLevel] | None = None
    weight_overrides: tuple[float, float, float] | None = None

    @classmethod
    def create(
        cls,
        job_id: str,
        name: str,
        desired_skills,
        min_experience_years=None,
        required_degrees=None,
        weight_overrides=None,
    ) -> "JobProfile":
        """Validating constructor: normalizes and deduplicates desired skills."""
        if not job_id or not str(job_id).strip():
            raise ParameterError("job_id must be non-empty")
        normalized: list[str] = []
        for skill in desired_skills:
            token = normalize_skill(skill)
            if token not in normalized:
                normalized.append(token)
        if not normalized:
            raise ParameterError("desired_skills must be non-empty")
        if min_experience_years is not None and min_experience_years < 0:
            raise ParameterError("min_experience_years must be >= 0")
        degrees = None
        if required_degrees is not None:
            degrees = frozenset(DegreeLevel(d) for d in required_degrees)
            if not degrees:
                raise ParameterError("required_degrees must be non-empty when present")
        overrides = None
        if weight_overrides is not None:
            overrides = tuple(float(w) for w in weight_overrides)
            if len(overrides) != 3 or min(overrides) <= 0:
                raise ParameterError("weight_overrides must be three positive numbers")
        return cls(
            job_id=str(job_id),
            name=str(name),
            desired_skills=tuple(normalized),
            min_experience_years=min_experience_years,
            required_degrees=degrees,
            weight_overrides=overrides,
        )

    def to_payload(self) -> dict:
        return {
            "job_id": self.job_id,
            "name": self.name,
            "desired_skills": list(self.desired_skills),
            "min_experience_years": self.min_experience_years,
            "required_degrees": sorted(d.value for d in self.required_degrees)
            if self.required_degrees is not None
            else None,
            "weight_overrides": list(self.weight_overrides) if self.weight_overrides else None,
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "JobProfile":
        return cls.create(
            job_id=payload["job_id"],
            name=payload.get("name", payload["job_id"]),
            desired_skills=payload["desired_skills"],
            min_experience_years=payload.get("min_experience_years"),
            required_degrees=payload.get("required_degrees"),
            weight_overrides=payload.get("weight_overrides"),
        )


@dataclass(frozen=True)
class ScoringModels:
    """Everything score_candidate needs, bundled."""

    embedding: SkillEmbedding
    rankings: UniversityRankingTable
    employers: EmployerScoreTable
    config: ScoringConfig


@dataclass(frozen=True)
class ScoreCard:
    candidate_id: str
    job_id: str
    education_score: float
    work_score: float
    skills_score: float
    overall_score: float
    skill_matches: tuple[SkillMatch, ...]
    education_evidence: dict
    work_evidence: dict
    weights: tuple[float, float, float]

    def category(self, column: str) -> float:
        if column == "overall":
            return self.overall_score
        if column == "education":
            return self.education_score
        if column == "work":
            return self.work_score
        if column == "skills":
            return self.skills_score
        if column.startswith("skill:"):
            token = column.split(":", 1)[1]
            for match in self.skill_matches:
                if match.desired == token:
                    return match.score
            raise NotFoundError(f"no desired skill {token!r} on this card")
        raise ParameterError(f"unknown score column {column!r}")

    def to_payload(self) -> dict:
        return {
            "candidate_id": self.candidate_id,
            "job_id": self.job_id,
            "education_score": self.education_score,
            "work_score": self.work_score,
            "skills_score": self.skills_score,
            "overall_score": self.overall_score,
            "skill_matches": [m.to_payload() for m in self.skill_matches],
            "education_evidence": self.education_evidence,
            "work_evidence": self.work_evidence,
            "weights": list(self.weights),
        }


def score_candidate(profile: CandidateProfile, job: JobProfile, models: ScoringModels) -> ScoreCard:
    """Compose the three category scores and their weighted overall for one candidate."""
    config = models.config
    edu, edu_evidence = _education_details(profile, models.rankings, config)
    work, work_evidence = _work_details(profile, models.employers, config)
    matches, skills = skill_score(profile.skill_tokens(), job.desired_skills, models.embedding, config)
    weights = job.weight_overrides or config.weights
    return ScoreCard(
        candidate_id=profile.candidate_id,
        job_id=job.job_id,
        education_score=edu,
        work_score=work,
        skills_score=skills,
        overall_score=overall_score(edu, work, skills, weights),
        skill_matches=matches,
        education_evidence=edu_evidence,
        work_evidence=work_evidence,
        weights=weights,
    )


def job_match_scores(
    profile: CandidateProfile,
    jobs: list[JobProfile],
    models: ScoringModels,
) -> list[tuple[JobProfile, float]]:
    """Score the profile against every job, best first; ties break by job_id."""
    if not jobs:
        raise ParameterError("jobs list is empty")
    scored = [(job, score_candidate(profile, job, models).overall_score) for job in jobs]
    scored.sort(key=lambda item: (-item[1], item[0].job_id))
    return scored
