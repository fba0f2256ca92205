"""HTTP interface for the recruiter console and scripts.

Every handler reads one immutable snapshot, so a response never mixes model
versions; the snapshot hash is echoed in every body. Mutations (ingest,
bookmarks, job CRUD) funnel through the store's single-writer contract and
publish new snapshots atomically. Malformed documented inputs map to 4xx
errors with machine-readable codes, never a 500.
"""

from __future__ import annotations

from datetime import date

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from .catalog import (
    CandidateStore,
    FilterSpec,
    autocomplete_skills,
    document_to_payload,
    filter_candidates,
    profile_to_payload,
    rank_candidates,
)
from .errors import ParameterError, StateError, TalentRankError
from .extract import DegreeLevel
from .ingest import LAYOUT_FORMATS, import_layout
from .pipeline import DEFAULT_REFERENCE_DATE, process_document, train_default_section_model
from .scoring import JobProfile, job_match_scores, most_recent_degree
from .skillspace import distance as skill_distance

_STATUS_BY_CODE = {
    "parse_error": 400,
    "no_blocks": 400,
    "normalization_error": 400,
    "not_found": 404,
    "conflict": 409,
    "missing_state": 409,
    "invalid_parameter": 422,
}

RELATED_SKILLS_K = 5


def _error_response(exc: TalentRankError) -> JSONResponse:
    return JSONResponse(
        status_code=_STATUS_BY_CODE.get(exc.code, 400),
        content={"code": exc.code, "message": str(exc)},
    )


def _parse_filters(min_years, degrees) -> FilterSpec:
    min_experience = None
    if min_years is not None and min_years != "":
        try:
            min_experience = float(min_years)
        except ValueError:
            raise ParameterError(f"min_years must be numeric, got {min_years!r}") from None
    required = None
    if degrees:
        try:
            required = frozenset(DegreeLevel(d.strip()) for d in degrees.split(",") if d.strip())
        except ValueError as exc:
            raise ParameterError(f"unknown degree in filter: {exc}") from None
        if not required:
            required = None
    return FilterSpec(min_experience_years=min_experience, required_degrees=required)


def _section_model(store: CandidateStore):
    model = store.snapshot().section_model
    if model is None:
        model = train_default_section_model()
        store.set_models(section_model=model)
    return model


def create_app(store: CandidateStore, webroot: str | None = None) -> FastAPI:
    app = FastAPI(title="talentrank", docs_url=None, redoc_url=None)

    @app.exception_handler(TalentRankError)
    async def handle_domain_error(request: Request, exc: TalentRankError):
        return _error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={"code": "invalid_parameter", "message": str(exc.errors())},
        )

    # -- candidates ---------------------------------------------------------

    @app.post("/api/candidates", status_code=201)
    async def create_candidate(body: dict):
        source_id = body.get("source_id")
        format_flag = body.get("format")
        content = body.get("content")
        if not source_id or format_flag not in LAYOUT_FORMATS or not isinstance(content, str):
            raise ParameterError(
                "body must carry source_id, format (block-table | html-subset), and content"
            )
        reference = body.get("reference_date")
        try:
            reference_date = date.fromisoformat(reference) if reference else DEFAULT_REFERENCE_DATE
        except (TypeError, ValueError):
            raise ParameterError(f"reference_date must be YYYY-MM-DD, got {reference!r}") from None
        doc = import_layout(content.encode("utf-8"), format_flag, source_id)
        profile = process_document(doc, _section_model(store), reference_date=reference_date)
        store.add_candidate(profile, doc)
        snap = store.snapshot()
        return {
            "candidate_id": profile.candidate_id,
            "source_id": source_id,
            "warnings": list(profile.warnings),
            "snapshot_version": snap.model_version,
        }

    @app.get("/api/candidates")
    async def list_candidates(job: str, min_years: str | None = None,
                              degrees: str | None = None, sort: str = "overall"):
        snap = store.snapshot()
        job_profile = store.get_job(job)
        spec = _parse_filters(min_years, degrees)
        ids = filter_candidates(store, spec)
        ranked = rank_candidates(store, ids, job_profile, sort)
        candidates = []
        for rank_pos, (cid, card) in enumerate(ranked.entries, start=1):
            record = snap.candidates[cid]
            candidates.append(
                {
                    "rank": rank_pos,
                    "candidate_id": cid,
                    "name": record.profile.name,
                    "bookmarked": record.bookmarked,
                    "most_recent_degree": _most_recent_degree_name(record.profile),
                    "scorecard": card.to_payload(),
                    "top_decile": {col: cid in ranked.top_decile[col] for col in ranked.columns},
                }
            )
        return {
            "job_id": job_profile.job_id,
            "sort": ranked.mode,
            "columns": list(ranked.columns),
            "candidates": candidates,
            "snapshot_version": snap.model_version,
        }

    @app.get("/api/candidates/{candidate_id}")
    async def candidate_detail(candidate_id: str, job: str):
        snap = store.snapshot()
        job_profile = store.get_job(job)
        record = store.get_candidate(candidate_id)
        card = store.scorecard(candidate_id, job_profile)
        models = snap.scoring_models()
        emb = models.embedding

        related: dict[str, list[dict]] = {}
        candidate_tokens = sorted(record.profile.skill_tokens())
        for desired in job_profile.desired_skills:
            contributions = []
            if desired in emb.vocabulary:
                scored = []
                for token in candidate_tokens:
                    if token in emb.vocabulary and token != desired:
                        d = skill_distance(emb, desired, token)
                        scored.append((d, emb.vocabulary.index_of(token), token))
                scored.sort()
                contributions = [
                    {"token": token, "similarity": (1.0 - d) * 100.0}
                    for d, _, token in scored[:RELATED_SKILLS_K]
                ]
            related[desired] = contributions

        matches = job_match_scores(record.profile, store.list_jobs(), models)
        return {
            "candidate": profile_to_payload(record.profile),
            "document": document_to_payload(record.document),
            "scorecard": card.to_payload(),
            "related_skills": related,
            "job_scores": [
                {"job_id": j.job_id, "name": j.name, "overall_score": s} for j, s in matches
            ],
            "bookmarked": record.bookmarked,
            "snapshot_version": snap.model_version,
        }

    @app.put("/api/candidates/{candidate_id}/bookmark")
    async def set_bookmark(candidate_id: str, body: dict):
        if "bookmarked" not in body or not isinstance(body["bookmarked"], bool):
            raise ParameterError("body must carry a boolean 'bookmarked' field")
        flag = store.set_bookmark(candidate_id, body["bookmarked"])
        return {
            "candidate_id": candidate_id,
            "bookmarked": flag,
            "snapshot_version": store.snapshot().model_version,
        }

    # -- skills ---------------------------------------------------------------

    @app.get("/api/skills/autocomplete")
    async def autocomplete(q: str = "", k: int = 10):
        if k < 1:
            raise ParameterError("k must be >= 1")
        snap = store.snapshot()
        suggestions = []
        if snap.embedding is not None:
            suggestions = [
                {"token": token, "frequency": freq}
                for token, freq in autocomplete_skills(q, snap.embedding.vocabulary, k)
            ]
        return {"suggestions": suggestions, "snapshot_version": snap.model_version}

    @app.get("/api/skills/map")
    async def skill_map():
        snap = store.snapshot()
        if snap.skill_map is None:
            raise StateError("no trained skill map; run the train command first")
        records = [
            {
                "token": token,
                "x": float(snap.skill_map.coords[i][0]),
                "y": float(snap.skill_map.coords[i][1]),
                "cluster_id": int(snap.skill_map.cluster_ids[i]),
            }
            for i, token in enumerate(snap.skill_map.tokens)
        ]
        return {"skills": records, "snapshot_version": snap.model_version}

    # -- jobs -------------------------------------------------------------------

    @app.get("/api/jobs")
    async def list_jobs():
        snap = store.snapshot()
        return {
            "jobs": [store.get_job(job_id).to_payload() for job_id in sorted(snap.jobs)],
            "snapshot_version": snap.model_version,
        }

    @app.post("/api/jobs", status_code=201)
    async def create_job(body: dict):
        try:
            job = JobProfile.from_payload(body)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParameterError(f"invalid job payload: {exc}") from None
        store.create_job(job)
        return {"job": job.to_payload(), "snapshot_version": store.snapshot().model_version}

    @app.get("/api/jobs/{job_id}")
    async def get_job(job_id: str):
        return {
            "job": store.get_job(job_id).to_payload(),
            "snapshot_version": store.snapshot().model_version,
        }

    @app.put("/api/jobs/{job_id}")
    async def update_job(job_id: str, body: dict):
        payload = dict(body)
        payload["job_id"] = job_id
        try:
            job = JobProfile.from_payload(payload)
        except (KeyError, TypeError, ValueError) as exc:
            raise ParameterError(f"invalid job payload: {exc}") from None
        store.update_job(job)
        return {"job": job.to_payload(), "snapshot_version": store.snapshot().model_version}

    @app.delete("/api/jobs/{job_id}")
    async def delete_job(job_id: str):
        store.delete_job(job_id)
        return {"deleted": job_id, "snapshot_version": store.snapshot().model_version}

    if webroot:
        app.mount("/", StaticFiles(directory=webroot, html=True), name="console")
    return app


def _most_recent_degree_name(profile) -> str | None:
    degree = most_recent_degree(profile)
    return degree.value if degree else None
