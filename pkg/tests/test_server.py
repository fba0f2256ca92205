"""HTTP API behavior: status codes, snapshot consistency, payload contracts."""

import pytest
from fastapi.testclient import TestClient

from talentrank.catalog import CandidateStore
from talentrank.corpusgen import write_corpus
from talentrank.ingest import import_layout
from talentrank.pipeline import process_document, train_default_section_model
from talentrank.scoring import ScoringConfig, build_employer_scores, import_university_rankings
from talentrank.server import create_app
from talentrank.skillspace import build_cooccurrence, build_skill_map, train_embedding

BLOCK_TABLE_BODY = (
    "0\t72\t60\t451\t22\t20\t1\t\tPat Miller\n"
    "0\t72\t90\t451\t12\t10.5\t0\t\tpat.miller@example.com · +1 (415) 555-8000\n"
    "0\t72\t120\t451\t18\t16\t1\t\tEDUCATION\n"
    "0\t72\t150\t451\t12\t10.5\t0\t\tStanford University · 2012 - 2016\n"
    "0\t72\t170\t451\t12\t10.5\t0\t\tB.Sc. Computer Science\n"
    "0\t72\t210\t451\t18\t16\t1\t\tWORK EXPERIENCE\n"
    "0\t72\t240\t451\t12\t10.5\t0\t\tAcme Software Inc · Jan 2019 - Present\n"
    "0\t72\t260\t451\t12\t10.5\t0\t\tSoftware Engineer\n"
    "0\t72\t300\t451\t18\t16\t1\t\tSKILLS\n"
    "0\t72\t330\t451\t12\t10.5\t0\t\tJava, SQL, Docker, Microservices\n"
)


@pytest.fixture(scope="module")
def client(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("server")
    corpus_dir = tmp / "corpus"
    write_corpus(corpus_dir, 10, 77)
    store = CandidateStore.create(tmp / "store")
    model = train_default_section_model()
    store.set_models(section_model=model)
    for path in sorted(corpus_dir.glob("*.blocks")):
        doc = import_layout(path.read_bytes(), "block-table", path.stem)
        store.add_candidate(process_document(doc, model), doc)
    rankings = import_university_rankings(
        (corpus_dir / "the_rankings.csv").read_text(),
        (corpus_dir / "qs_rankings.csv").read_text(),
    )
    profiles = [r.profile for r in store.snapshot().candidates.values()]
    _, matrix = build_cooccurrence((p.skill_tokens() for p in profiles), min_count=1)
    embedding = train_embedding(matrix, d=min(20, len(matrix.vocabulary)), seed=2)
    skill_map = build_skill_map(embedding, perplexity=5.0, iterations=300, seed=2)
    employers = build_employer_scores(
        sorted(profiles, key=lambda p: p.candidate_id), rankings, ScoringConfig()
    )
    store.set_models(embedding=embedding, skill_map=skill_map,
                     rankings=rankings, employers=employers)
    return TestClient(create_app(store))


def test_post_candidate_happy_path(client):
    response = client.post("/api/candidates", json={
        "source_id": "pat-resume", "format": "block-table", "content": BLOCK_TABLE_BODY,
    })
    assert response.status_code == 201
    body = response.json()
    assert body["candidate_id"]
    assert body["source_id"] == "pat-resume"
    assert "snapshot_version" in body


def test_post_candidate_duplicate_conflict(client):
    payload = {"source_id": "pat-resume", "format": "block-table", "content": BLOCK_TABLE_BODY}
    response = client.post("/api/candidates", json=payload)
    assert response.status_code == 409
    assert response.json()["code"] == "conflict"


def test_post_candidate_malformed_body_400(client):
    response = client.post("/api/candidates", json={
        "source_id": "bad", "format": "block-table", "content": "0\tnot-enough-columns\n",
    })
    assert response.status_code == 400
    assert "line 1" in response.json()["message"]


def test_post_candidate_missing_fields_422(client):
    response = client.post("/api/candidates", json={"format": "block-table"})
    assert response.status_code == 422
    assert response.json()["code"] == "invalid_parameter"


def test_list_candidates_ranked(client):
    response = client.get("/api/candidates", params={"job": "backend-engineer"})
    assert response.status_code == 200
    body = response.json()
    ranks = [c["rank"] for c in body["candidates"]]
    assert ranks == list(range(1, len(body["candidates"]) + 1))
    overall = [c["scorecard"]["overall_score"] for c in body["candidates"]]
    assert overall == sorted(overall, reverse=True)
    versions = {c["scorecard"]["job_id"] for c in body["candidates"]}
    assert versions == {"backend-engineer"}
    assert all(set(c["top_decile"]) == set(body["columns"]) for c in body["candidates"])


def test_list_candidates_unknown_job_404(client):
    assert client.get("/api/candidates", params={"job": "nope"}).status_code == 404


def test_list_candidates_invalid_filters_422(client):
    r = client.get("/api/candidates", params={"job": "backend-engineer", "min_years": "abc"})
    assert r.status_code == 422
    r = client.get("/api/candidates", params={"job": "backend-engineer", "degrees": "Wizard"})
    assert r.status_code == 422
    r = client.get("/api/candidates", params={"job": "backend-engineer", "sort": "sideways"})
    assert r.status_code == 422


def test_list_candidates_high_min_years_empty_200(client):
    response = client.get("/api/candidates", params={"job": "backend-engineer", "min_years": 99})
    assert response.status_code == 200
    assert response.json()["candidates"] == []


def test_list_candidates_scorechart_ordering(client):
    response = client.get("/api/candidates", params={"job": "backend-engineer", "sort": "scorechart"})
    cards = [c["scorecard"] for c in response.json()["candidates"]]
    keys = [(-c["skills_score"], -c["work_score"], c["candidate_id"]) for c in cards]
    assert keys == sorted(keys)


def test_top_decile_flags_one_per_column_when_ten(client):
    response = client.get("/api/candidates", params={"job": "backend-engineer", "min_years": 0})
    body = response.json()
    pool = body["candidates"]
    if len(pool) >= 1:
        for column in body["columns"]:
            flagged = [c for c in pool if c["top_decile"][column]]
            import math

            assert len(flagged) == math.ceil(0.1 * len(pool))


def test_candidate_detail(client):
    listing = client.get("/api/candidates", params={"job": "backend-engineer"}).json()
    cid = listing["candidates"][0]["candidate_id"]
    response = client.get(f"/api/candidates/{cid}", params={"job": "backend-engineer"})
    assert response.status_code == 200
    body = response.json()
    assert body["candidate"]["candidate_id"] == cid
    assert body["document"]["blocks"]
    # provenance: every skill mention lists valid source blocks
    n_blocks = len(body["document"]["blocks"])
    for raw, token, blocks in body["candidate"]["skills"]:
        assert blocks and all(0 <= b < n_blocks for b in blocks)
    # related skills carry similarity percentages for desired skills
    assert set(body["related_skills"]) == set(
        client.get("/api/jobs/backend-engineer").json()["job"]["desired_skills"]
    )
    for contributions in body["related_skills"].values():
        for item in contributions:
            assert 0.0 <= item["similarity"] <= 100.0
    # job scores cover all stored jobs, sorted descending
    scores = [j["overall_score"] for j in body["job_scores"]]
    assert scores == sorted(scores, reverse=True)
    assert body["snapshot_version"] == listing["snapshot_version"]


def test_candidate_detail_404s(client):
    assert client.get("/api/candidates/zzz", params={"job": "backend-engineer"}).status_code == 404
    listing = client.get("/api/candidates", params={"job": "backend-engineer"}).json()
    cid = listing["candidates"][0]["candidate_id"]
    assert client.get(f"/api/candidates/{cid}", params={"job": "zzz"}).status_code == 404


def test_autocomplete(client):
    response = client.get("/api/skills/autocomplete", params={"q": "ja", "k": 5})
    assert response.status_code == 200
    suggestions = response.json()["suggestions"]
    assert suggestions and all(s["token"].startswith("ja") for s in suggestions)
    freqs = [s["frequency"] for s in suggestions]
    assert freqs == sorted(freqs, reverse=True)
    assert client.get("/api/skills/autocomplete", params={"q": "", "k": 3}).status_code == 200
    assert client.get("/api/skills/autocomplete", params={"q": "x", "k": 0}).status_code == 422


def test_skill_map_endpoint(client):
    response = client.get("/api/skills/map")
    assert response.status_code == 200
    skills = response.json()["skills"]
    assert skills
    for record in skills:
        assert set(record) == {"token", "x", "y", "cluster_id"}


def test_skill_map_409_when_untrained(tmp_path):
    store = CandidateStore.create(tmp_path / "store")
    client = TestClient(create_app(store))
    response = client.get("/api/skills/map")
    assert response.status_code == 409
    assert response.json()["code"] == "missing_state"


def test_jobs_crud_roundtrip(client):
    payload = {"job_id": "platform-eng", "name": "Platform Engineer",
               "desired_skills": ["Kubernetes", "Terraform"], "min_experience_years": 1}
    created = client.post("/api/jobs", json=payload)
    assert created.status_code == 201
    got = client.get("/api/jobs/platform-eng")
    assert got.status_code == 200
    assert got.json()["job"]["desired_skills"] == ["kubernetes", "terraform"]
    assert client.post("/api/jobs", json=payload).status_code == 409
    updated = client.put("/api/jobs/platform-eng", json={
        "job_id": "platform-eng", "name": "Platform Engineer",
        "desired_skills": ["kubernetes"], "min_experience_years": 3,
    })
    assert updated.status_code == 200
    assert client.get("/api/jobs/platform-eng").json()["job"]["min_experience_years"] == 3
    listing = client.get("/api/jobs").json()["jobs"]
    ids = [j["job_id"] for j in listing]
    assert ids == sorted(ids)
    assert client.delete("/api/jobs/platform-eng").status_code == 200
    assert client.get("/api/jobs/platform-eng").status_code == 404
    assert client.delete("/api/jobs/platform-eng").status_code == 404


def test_bookmark_roundtrip_idempotent(client):
    listing = client.get("/api/candidates", params={"job": "backend-engineer"}).json()
    cid = listing["candidates"][0]["candidate_id"]
    assert client.put(f"/api/candidates/{cid}/bookmark", json={"bookmarked": True}).json()[
        "bookmarked"] is True
    assert client.put(f"/api/candidates/{cid}/bookmark", json={"bookmarked": True}).json()[
        "bookmarked"] is True
    refreshed = client.get("/api/candidates", params={"job": "backend-engineer"}).json()
    flag = next(c["bookmarked"] for c in refreshed["candidates"] if c["candidate_id"] == cid)
    assert flag is True
    assert client.put("/api/candidates/zzz/bookmark", json={"bookmarked": True}).status_code == 404
    bad = client.put(f"/api/candidates/{cid}/bookmark", json={"bookmarked": "yes"})
    assert bad.status_code == 422


def test_snapshot_version_uniform_across_body(client):
    a = client.get("/api/jobs").json()["snapshot_version"]
    b = client.get("/api/skills/map").json()["snapshot_version"]
    c = client.get("/api/candidates", params={"job": "backend-engineer"}).json()["snapshot_version"]
    assert a == b == c


def test_malformed_inputs_never_500(client):
    cases = [
        ("post", "/api/candidates", {"source_id": "x", "format": "block-table",
                                     "content": BLOCK_TABLE_BODY, "reference_date": "not-a-date"}),
        ("post", "/api/jobs", {"name": "missing fields"}),
        ("put", "/api/jobs/backend-engineer", {"nonsense": True}),
        ("post", "/api/jobs", {"job_id": "bad", "name": "B", "desired_skills": []}),
    ]
    for method, url, payload in cases:
        response = getattr(client, method)(url, json=payload)
        assert 400 <= response.status_code < 500, (url, response.status_code)
        body = response.json()
        assert "code" in body and "message" in body
