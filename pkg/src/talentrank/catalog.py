"""Candidate store, filter queries, ranked orderings, and persistence.

The store keeps candidates, job templates, and trained models in memory with
copy-on-write snapshots: readers always see one consistent, immutable bundle
while a single writer publishes replacements atomically. Every artifact
persists through the versioned file envelope and round-trips bit-exactly
under `store/candidates/`, `store/jobs/`, and `store/models/`.
"""

from __future__ import annotations

import hashlib
import json
import math
import threading
import warnings
from dataclasses import dataclass, replace
from datetime import date
from importlib import resources
from pathlib import Path

from .errors import ConflictError, NotFoundError, ParameterError, StateError
from .extract import (
    CandidateProfile,
    DateSpan,
    DegreeLevel,
    EducationEntry,
    SkillMention,
    WorkEntry,
    months,
)
from .ingest import LayoutBlock, LayoutDocument, SectionClassifierModel
from .persistence import dump_artifact, load_artifact, save_artifact
from .scoring import (
    EmployerScoreTable,
    JobProfile,
    ScoreCard,
    ScoringConfig,
    ScoringModels,
    UniversityRankingTable,
    corpus_profile_hash,
    most_recent_degree,
    score_candidate,
)
from .skillspace import SkillEmbedding, SkillMap2D, SkillVocabulary

RANK_MODES = ("overall", "education", "work", "skills", "scorechart")


# ---------------------------------------------------------------------------
# Payload converters (documented wire/file schema for profiles and documents)
# ---------------------------------------------------------------------------

def document_to_payload(doc: LayoutDocument) -> dict:
    return {
        "source_id": doc.source_id,
        "blocks": [
            [b.text, b.page, b.x, b.y, b.width, b.height, b.font_size, int(b.bold), b.font_name]
            for b in doc.blocks
        ],
    }


def document_from_payload(payload: dict) -> LayoutDocument:
    blocks = [
        LayoutBlock(
            text=row[0], page=row[1], x=row[2], y=row[3], width=row[4],
            height=row[5], font_size=row[6], bold=bool(row[7]), font_name=row[8],
        )
        for row in payload["blocks"]
    ]
    return LayoutDocument(source_id=payload["source_id"], blocks=tuple(blocks))


def _span_to_payload(span: DateSpan | None):
    if span is None:
        return None
    return {
        "start": span.start.isoformat(),
        "end": span.end.isoformat() if span.end else None,
        "open_ended": span.open_ended,
        "resolved_end": span.resolved_end.isoformat(),
    }


def _span_from_payload(payload) -> DateSpan | None:
    if payload is None:
        return None
    return DateSpan(
        start=date.fromisoformat(payload["start"]),
        end=date.fromisoformat(payload["end"]) if payload["end"] else None,
        open_ended=payload["open_ended"],
        resolved_end=date.fromisoformat(payload["resolved_end"]),
    )


def profile_to_payload(profile: CandidateProfile) -> dict:
    return {
        "candidate_id": profile.candidate_id,
        "source_document": profile.source_document,
        "reference_date": profile.reference_date.isoformat(),
        "name": profile.name,
        "email": profile.email,
        "phone": profile.phone,
        "location": profile.location,
        "educations": [
            {
                "institution_raw": e.institution_raw,
                "institution_key": e.institution_key,
                "degree": e.degree.value,
                "field_of_study": e.field_of_study,
                "span": _span_to_payload(e.span),
                "source_blocks": list(e.source_blocks),
            }
            for e in profile.educations
        ],
        "works": [
            {
                "employer_raw": w.employer_raw,
                "employer_key": w.employer_key,
                "title": w.title,
                "span": _span_to_payload(w.span),
                "source_blocks": list(w.source_blocks),
            }
            for w in profile.works
        ],
        "skills": [[s.raw, s.token, list(s.source_blocks)] for s in profile.skills],
        "provenance": {k: list(v) for k, v in profile.provenance.items()},
        "warnings": list(profile.warnings),
    }


def profile_from_payload(payload: dict) -> CandidateProfile:
    return CandidateProfile(
        candidate_id=payload["candidate_id"],
        source_document=payload["source_document"],
        reference_date=date.fromisoformat(payload["reference_date"]),
        name=payload["name"],
        email=payload["email"],
        phone=payload["phone"],
        location=payload["location"],
        educations=tuple(
            EducationEntry(
                institution_raw=e["institution_raw"],
                institution_key=e["institution_key"],
                degree=DegreeLevel(e["degree"]),
                field_of_study=e["field_of_study"],
                span=_span_from_payload(e["span"]),
                source_blocks=tuple(e["source_blocks"]),
            )
            for e in payload["educations"]
        ),
        works=tuple(
            WorkEntry(
                employer_raw=w["employer_raw"],
                employer_key=w["employer_key"],
                title=w["title"],
                span=_span_from_payload(w["span"]),
                source_blocks=tuple(w["source_blocks"]),
            )
            for w in payload["works"]
        ),
        skills=tuple(SkillMention(raw=s[0], token=s[1], source_blocks=tuple(s[2])) for s in payload["skills"]),
        provenance={k: tuple(v) for k, v in payload["provenance"].items()},
        warnings=tuple(payload["warnings"]),
    )


# ---------------------------------------------------------------------------
# Store
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CandidateRecord:
    profile: CandidateProfile
    document: LayoutDocument
    bookmarked: bool = False


@dataclass(frozen=True)
class ApiSnapshot:
    """Immutable, version-consistent view served to all concurrent readers."""

    candidates: dict[str, CandidateRecord]
    jobs: dict[str, JobProfile]
    embedding: SkillEmbedding | None
    skill_map: SkillMap2D | None
    rankings: UniversityRankingTable | None
    employers: EmployerScoreTable | None
    config: ScoringConfig
    section_model: SectionClassifierModel | None
    model_version: str

    def scoring_models(self) -> ScoringModels:
        if self.embedding is None or self.rankings is None or self.employers is None:
            raise StateError("store has no trained models; run import-rankings and train first")
        return ScoringModels(
            embedding=self.embedding,
            rankings=self.rankings,
            employers=self.employers,
            config=self.config,
        )


_MODEL_FILES = {
    "embedding": "embedding.tr",
    "skill_map": "skill_map.tr",
    "rankings": "rankings.tr",
    "employers": "employers.tr",
    "config": "config.tr",
    "section_model": "section_model.tr",
}


class CandidateStore:
    """Directory-backed store with snapshot reads and single-writer mutations."""

    def __init__(self, root: str | Path | None = None):
        self.root = Path(root) if root is not None else None
        self._lock = threading.Lock()
        self._candidates: dict[str, CandidateRecord] = {}
        self._jobs: dict[str, JobProfile] = {}
        self._embedding: SkillEmbedding | None = None
        self._skill_map: SkillMap2D | None = None
        self._rankings: UniversityRankingTable | None = None
        self._employers: EmployerScoreTable | None = None
        self._config: ScoringConfig = ScoringConfig()
        self._section_model: SectionClassifierModel | None = None
        self._scorecards: dict[tuple, ScoreCard] = {}
        self._snapshot: ApiSnapshot | None = None

    # -- construction -----------------------------------------------------

    @classmethod
    def create(cls, root: str | Path, seed_templates: bool = True) -> "CandidateStore":
        """Create the directory layout and seed the shipped job templates."""
        store = cls(root)
        for sub in ("candidates", "jobs", "models"):
            (store.root / sub).mkdir(parents=True, exist_ok=True)
        if seed_templates and not any((store.root / "jobs").iterdir()):
            for job in load_seed_job_templates():
                store._jobs[job.job_id] = job
                store._persist_job(job)
        store._persist_model("config", store._config)
        store._publish()
        return store

    @classmethod
    def open(cls, root: str | Path) -> "CandidateStore":
        """Load a store directory; fails atomically on any corrupt artifact."""
        root = Path(root)
        if not root.is_dir():
            raise NotFoundError(f"store directory {root} does not exist")
        store = cls(root)
        candidates: dict[str, CandidateRecord] = {}
        for path in sorted((root / "candidates").glob("*.tr")):
            payload = load_artifact(path, "candidate")
            record = CandidateRecord(
                profile=profile_from_payload(payload["profile"]),
                document=document_from_payload(payload["document"]),
                bookmarked=bool(payload.get("bookmarked", False)),
            )
            candidates[record.profile.candidate_id] = record
        jobs: dict[str, JobProfile] = {}
        for path in sorted((root / "jobs").glob("*.tr")):
            job = JobProfile.from_payload(load_artifact(path, "job"))
            jobs[job.job_id] = job
        models_dir = root / "models"
        loaded: dict[str, object] = {}
        if (models_dir / _MODEL_FILES["embedding"]).exists():
            loaded["embedding"] = SkillEmbedding.from_payload(
                load_artifact(models_dir / _MODEL_FILES["embedding"], "embedding")
            )
        if (models_dir / _MODEL_FILES["skill_map"]).exists():
            loaded["skill_map"] = SkillMap2D.from_payload(
                load_artifact(models_dir / _MODEL_FILES["skill_map"], "skill_map")
            )
        if (models_dir / _MODEL_FILES["rankings"]).exists():
            loaded["rankings"] = UniversityRankingTable.from_payload(
                load_artifact(models_dir / _MODEL_FILES["rankings"], "rankings")
            )
        if (models_dir / _MODEL_FILES["employers"]).exists():
            loaded["employers"] = EmployerScoreTable.from_payload(
                load_artifact(models_dir / _MODEL_FILES["employers"], "employers")
            )
        if (models_dir / _MODEL_FILES["config"]).exists():
            loaded["config"] = ScoringConfig.from_payload(
                load_artifact(models_dir / _MODEL_FILES["config"], "config")
            )
        if (models_dir / _MODEL_FILES["section_model"]).exists():
            loaded["section_model"] = SectionClassifierModel.from_payload(
                load_artifact(models_dir / _MODEL_FILES["section_model"], "section_model")
            )
        store._candidates = candidates
        store._jobs = jobs
        store._embedding = loaded.get("embedding")
        store._skill_map = loaded.get("skill_map")
        store._rankings = loaded.get("rankings")
        store._employers = loaded.get("employers")
        store._config = loaded.get("config", ScoringConfig())
        store._section_model = loaded.get("section_model")
        employers = store._employers
        current_hash = corpus_profile_hash(c.profile.candidate_id for c in candidates.values())
        if employers is not None and employers.corpus_hash != current_hash:
            warnings.warn(
                "employer-score table was built from a different candidate corpus; "
                "re-run train to refresh it",
                stacklevel=2,
            )
        store._publish()
        return store

    @classmethod
    def open_or_create(cls, root: str | Path) -> "CandidateStore":
        root = Path(root)
        if (root / "candidates").is_dir():
            return cls.open(root)
        return cls.create(root)

    # -- snapshots ---------------------------------------------------------

    def _model_version(self) -> str:
        h = hashlib.sha256()
        for name, value in (
            ("embedding", self._embedding),
            ("skill_map", self._skill_map),
            ("rankings", self._rankings),
            ("employers", self._employers),
            ("config", self._config),
        ):
            if value is not None:
                h.update(dump_artifact(name, value.to_payload()))
        if self._section_model is not None:
            h.update(dump_artifact("section_model", self._section_model.to_payload()))
        return h.hexdigest()[:12]

    def _publish(self):
        self._snapshot = ApiSnapshot(
            candidates=dict(self._candidates),
            jobs=dict(self._jobs),
            embedding=self._embedding,
            skill_map=self._skill_map,
            rankings=self._rankings,
            employers=self._employers,
            config=self._config,
            section_model=self._section_model,
            model_version=self._model_version(),
        )

    def snapshot(self) -> ApiSnapshot:
        return self._snapshot

    # -- candidates ---------------------------------------------------------

    def _persist_candidate(self, record: CandidateRecord):
        if self.root is None:
            return
        payload = {
            "profile": profile_to_payload(record.profile),
            "document": document_to_payload(record.document),
            "bookmarked": record.bookmarked,
        }
        save_artifact(self.root / "candidates" / f"{record.profile.candidate_id}.tr", "candidate", payload)

    def add_candidate(self, profile: CandidateProfile, document: LayoutDocument) -> str:
        with self._lock:
            if profile.candidate_id in self._candidates:
                raise ConflictError(f"candidate for source {profile.source_document!r} already stored")
            record = CandidateRecord(profile=profile, document=document)
            self._candidates = {**self._candidates, profile.candidate_id: record}
            self._persist_candidate(record)
            self._publish()
        return profile.candidate_id

    def get_candidate(self, candidate_id: str) -> CandidateRecord:
        record = self._snapshot.candidates.get(candidate_id)
        if record is None:
            raise NotFoundError(f"unknown candidate {candidate_id!r}")
        return record

    def set_bookmark(self, candidate_id: str, flag: bool) -> bool:
        with self._lock:
            record = self._candidates.get(candidate_id)
            if record is None:
                raise NotFoundError(f"unknown candidate {candidate_id!r}")
            updated = replace(record, bookmarked=bool(flag))
            self._candidates = {**self._candidates, candidate_id: updated}
            self._persist_candidate(updated)
            self._publish()
        return updated.bookmarked

    # -- jobs ----------------------------------------------------------------

    def _persist_job(self, job: JobProfile):
        if self.root is None:
            return
        save_artifact(self.root / "jobs" / f"{job.job_id}.tr", "job", job.to_payload())

    def get_job(self, job_id: str) -> JobProfile:
        job = self._snapshot.jobs.get(job_id)
        if job is None:
            raise NotFoundError(f"unknown job {job_id!r}")
        return job

    def list_jobs(self) -> list[JobProfile]:
        return [self._snapshot.jobs[k] for k in sorted(self._snapshot.jobs)]

    def create_job(self, job: JobProfile) -> JobProfile:
        with self._lock:
            if job.job_id in self._jobs:
                raise ConflictError(f"job {job.job_id!r} already exists")
            self._jobs = {**self._jobs, job.job_id: job}
            self._persist_job(job)
            self._publish()
        return job

    def update_job(self, job: JobProfile) -> JobProfile:
        with self._lock:
            if job.job_id not in self._jobs:
                raise NotFoundError(f"unknown job {job.job_id!r}")
            self._jobs = {**self._jobs, job.job_id: job}
            self._persist_job(job)
            self._publish()
        return job

    def delete_job(self, job_id: str):
        with self._lock:
            if job_id not in self._jobs:
                raise NotFoundError(f"unknown job {job_id!r}")
            jobs = dict(self._jobs)
            del jobs[job_id]
            self._jobs = jobs
            if self.root is not None:
                path = self.root / "jobs" / f"{job_id}.tr"
                if path.exists():
                    path.unlink()
            self._publish()

    # -- models ---------------------------------------------------------------

    def _persist_model(self, name: str, value):
        if self.root is None or value is None:
            return
        save_artifact(self.root / "models" / _MODEL_FILES[name], name, value.to_payload())

    def set_models(self, *, embedding=None, skill_map=None, rankings=None,
                   employers=None, config=None, section_model=None):
        """Replace any subset of model artifacts and publish a new snapshot."""
        with self._lock:
            if embedding is not None:
                self._embedding = embedding
                self._persist_model("embedding", embedding)
            if skill_map is not None:
                self._skill_map = skill_map
                self._persist_model("skill_map", skill_map)
            if rankings is not None:
                self._rankings = rankings
                self._persist_model("rankings", rankings)
            if employers is not None:
                self._employers = employers
                self._persist_model("employers", employers)
            if config is not None:
                self._config = config
                self._persist_model("config", config)
            if section_model is not None:
                self._section_model = section_model
                self._persist_model("section_model", section_model)
            self._publish()

    # -- scorecards -------------------------------------------------------------

    def scorecard(self, candidate_id: str, job: JobProfile) -> ScoreCard:
        """Score with caching keyed by (candidate, job content, model version)."""
        snapshot = self._snapshot
        job_hash = hashlib.sha256(json.dumps(job.to_payload(), sort_keys=True).encode()).hexdigest()[:12]
        key = (candidate_id, job.job_id, job_hash, snapshot.model_version)
        cached = self._scorecards.get(key)
        if cached is not None:
            return cached
        record = self.get_candidate(candidate_id)
        card = score_candidate(record.profile, job, snapshot.scoring_models())
        self._scorecards[key] = card
        return card


# ---------------------------------------------------------------------------
# Seed templates
# ---------------------------------------------------------------------------

def load_seed_job_templates() -> list[JobProfile]:
    base = resources.files("talentrank") / "data" / "job_templates"
    jobs = []
    for entry in sorted(base.iterdir(), key=lambda e: e.name):
        if entry.name.endswith(".json"):
            jobs.append(JobProfile.from_payload(json.loads(entry.read_text("utf-8"))))
    return jobs


# ---------------------------------------------------------------------------
# Filtering and ranking
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FilterSpec:
    min_experience_years: float | None = None
    required_degrees: frozenset[DegreeLevel] | None = None

    def __post_init__(self):
        if self.min_experience_years is not None and self.min_experience_years < 0:
            raise ParameterError("min_experience_years must be >= 0")
        if self.required_degrees is not None and not self.required_degrees:
            raise ParameterError("required_degrees must be non-empty when present")


def total_experience_months(profile: CandidateProfile) -> int:
    return sum(months(w.span) for w in profile.works)


def filter_candidates(store: CandidateStore, spec: FilterSpec) -> set[str]:
    """Ids of candidates passing the experience and degree filters.

    Filtering never touches scoring: it only reduces the visible pool.
    """
    kept = set()
    for candidate_id, record in store.snapshot().candidates.items():
        profile = record.profile
        if spec.min_experience_years is not None:
            if total_experience_months(profile) / 12.0 < spec.min_experience_years:
                continue
        if spec.required_degrees is not None:
            if most_recent_degree(profile) not in spec.required_degrees:
                continue
        kept.add(candidate_id)
    return kept


@dataclass(frozen=True)
class RankedList:
    mode: str
    entries: tuple[tuple[str, ScoreCard], ...]
    columns: tuple[str, ...]
    top_decile: dict[str, frozenset[str]]


def parse_rank_mode(mode: str, job: JobProfile) -> str:
    if mode in RANK_MODES:
        return mode
    if mode.startswith("skill:"):
        token = mode.split(":", 1)[1]
        if token in job.desired_skills:
            return mode
        raise ParameterError(f"job {job.job_id!r} has no desired skill {token!r}")
    raise ParameterError(f"unknown sort mode {mode!r}")


def _sort_key(mode: str):
    if mode == "scorechart":
        return lambda item: (-item[1].skills_score, -item[1].work_score, item[0])
    if mode == "overall":
        return lambda item: (-item[1].overall_score, item[0])
    return lambda item: (-item[1].category(mode), item[0])


def rank_candidates(store: CandidateStore, ids, job: JobProfile, mode: str = "overall") -> RankedList:
    """Deterministic total ordering of `ids` for the requested view mode.

    ScoreChart sorts by skills then work score; every mode breaks remaining
    ties by candidate id. Top-decile flags mark exactly ceil(0.1 * n) entries
    per score column.
    """
    mode = parse_rank_mode(mode, job)
    cards = [(cid, store.scorecard(cid, job)) for cid in sorted(ids)]
    cards.sort(key=_sort_key(mode))

    columns = ("overall", "education", "work", "skills") + tuple(
        f"skill:{t}" for t in job.desired_skills
    )
    flags: dict[str, frozenset[str]] = {}
    n_flagged = math.ceil(0.1 * len(cards)) if cards else 0
    for column in columns:
        by_column = sorted(cards, key=lambda item: (-item[1].category(column), item[0]))
        flags[column] = frozenset(cid for cid, _ in by_column[:n_flagged])
    return RankedList(mode=mode, entries=tuple(cards), columns=columns, top_decile=flags)


def autocomplete_skills(prefix: str, vocab: SkillVocabulary, k: int) -> list[tuple[str, int]]:
    """Prefix suggestions ranked by corpus frequency, then alphabetically."""
    if k < 1:
        raise ParameterError("k must be >= 1")
    p = prefix.strip().lower()
    matches = [
        (token, vocab.frequencies[i])
        for i, token in enumerate(vocab.tokens)
        if token.startswith(p)
    ]
    matches.sort(key=lambda item: (-item[1], item[0]))
    return matches[:k]


def manage_job_templates(store: CandidateStore, op: str, payload: JobProfile | None = None,
                         job_id: str | None = None):
    """CRUD over persisted job templates; list returns job_id-ascending order."""
    if op == "create":
        return store.create_job(payload)
    if op == "update":
        return store.update_job(payload)
    if op == "delete":
        return store.delete_job(job_id if job_id is not None else payload.job_id)
    if op == "get":
        return store.get_job(job_id)
    if op == "list":
        return store.list_jobs()
    raise ParameterError(f"unknown job-template operation {op!r}")
