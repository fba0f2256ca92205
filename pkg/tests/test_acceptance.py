"""Acceptance suite: one test per criterion, each printing a PASS line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
report. Every tolerance and runtime bound is pinned here.
"""

import csv
import dataclasses
import io
import math
import random
import time
from datetime import date

import numpy as np
import pytest
from click.testing import CliRunner

from talentrank.catalog import (
    CandidateStore,
    FilterSpec,
    filter_candidates,
    rank_candidates,
)
from talentrank.cli import main as cli_main
from talentrank.corpusgen import planted_skill_corpus, random_profile
from talentrank.errors import IntegrityError, VersionError
from talentrank.extract import DegreeLevel, months, normalize_date_expression
from talentrank.gazetteers import load_default_gazetteers
from talentrank.ingest import (
    classify_section,
    segment_document,
    train_section_classifier,
)
from talentrank.persistence import dump_artifact, load_artifact, save_artifact
from talentrank.pipeline import fixture_training_examples, load_fixture_corpus
from talentrank.scoring import (
    EmployerScoreTable,
    JobProfile,
    ScoringConfig,
    ScoringModels,
    UniversityRankingTable,
    education_score,
    experience_points,
    overall_score,
    per_skill_score,
    score_candidate,
    skill_score,
    university_score,
    work_score,
)
from talentrank.skillspace import (
    SkillEmbedding,
    SkillVocabulary,
    build_cooccurrence,
    build_skill_map,
    distance,
    nearest,
    project_2d,
    train_embedding,
)

from tests.test_scoring import education, profile, work
from tests.test_skillspace import brute_force_cooccurrence

CONFIG = ScoringConfig()


def _report(number, message):
    print(f"\n[criterion {number:02d}] PASS  {message}")


def _random_unit_embedding(n_tokens, dim, seed):
    gen = np.random.default_rng(seed)
    vectors = gen.normal(size=(n_tokens, dim))
    vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
    tokens = tuple(f"sk{i:03d}" for i in range(n_tokens))
    return SkillEmbedding(
        vocabulary=SkillVocabulary(tokens=tokens, frequencies=(1,) * n_tokens),
        vectors=vectors, dimension=dim, seed=seed, method="manual", corpus_hash="acc",
    )


def test_criterion_01_per_skill_formula_exactness():
    started = time.perf_counter()
    rng = random.Random(101)
    for _ in range(1000):
        score_match = rng.uniform(0.0001, 100.0)
        alpha = rng.uniform(0.0, 250.0)
        dist = rng.uniform(0.0, 1.0)
        got = per_skill_score(dist, score_match, alpha)
        want = min(100.0, max(0.0, score_match - alpha * dist))
        assert abs(got - want) <= 1e-12
        assert per_skill_score(0.0, score_match, alpha) == score_match
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    _report(1, f"per-skill formula exact on 1000 random triples; zero distance returns score_match "
               f"({elapsed:.3f}s)")


def test_criterion_02_scoring_golden_cases():
    started = time.perf_counter()
    table = UniversityRankingTable(entries={
        "midtier": (40.0, 50.0), "top": (90.0, 80.0),
    })
    assert education_score(profile([education("unranked", DegreeLevel.Bachelor, 2015)]),
                           table, CONFIG) == 20.0
    assert education_score(profile([education("midtier", DegreeLevel.Master, 2015)]),
                           table, CONFIG) == 80.0
    assert education_score(profile([education("top", DegreeLevel.Doctoral, 2015)]),
                           table, CONFIG) == 100.0
    employers = EmployerScoreTable(scores={"acme": 50.0}, profile_counts={}, corpus_hash="h")
    ref = date(2023, 12, 31)
    p24 = profile(works=[work("acme", date(2022, 1, 1), ref)], reference=ref)
    assert work_score(p24, employers, CONFIG) == 74.0
    p120 = profile(works=[work("nobody", date(2014, 1, 1), ref)], reference=ref)
    assert work_score(p120, employers, CONFIG) == 100.0
    assert overall_score(80.0, 60.0, 90.0, (1.0, 1.0, 2.0)) == 80.0
    elapsed = time.perf_counter() - started
    assert elapsed < 1.0
    _report(2, f"education 20/80/100-cap, work 74/100-cap, overall 80 all exact ({elapsed:.3f}s)")


def test_criterion_03_skill_match_oracle():
    started = time.perf_counter()
    emb = _random_unit_embedding(40, 8, seed=103)
    tokens = emb.vocabulary.tokens
    rng = random.Random(103)
    for trial in range(200):
        candidate = set(rng.sample(tokens, k=rng.randint(1, 20)))
        if rng.random() < 0.3:
            candidate.add(f"oov-{trial}")
        desired = rng.sample(tokens, k=rng.randint(1, 20))
        if rng.random() < 0.3:
            desired[rng.randrange(len(desired))] = f"missing-{trial}"
        matches, average = skill_score(candidate, desired, emb, CONFIG)

        # independent exhaustive search per the stated rules
        expected_scores = []
        for j, want in enumerate(desired):
            if want in candidate:
                best_token, best_dist = want, 0.0
            elif want in emb.vocabulary and any(c in emb.vocabulary for c in candidate):
                options = [
                    (distance(emb, want, c), emb.vocabulary.index_of(c), c)
                    for c in candidate if c in emb.vocabulary
                ]
                best_dist, _, best_token = min(options)
            else:
                best_token, best_dist = None, 1.0
            assert matches[j].matched == best_token
            assert matches[j].distance == best_dist
            expected = min(100.0, max(0.0, CONFIG.score_match - CONFIG.alpha * best_dist))
            assert matches[j].score == expected
            expected_scores.append(expected)
        assert average == sum(expected_scores) / len(expected_scores)
    elapsed = time.perf_counter() - started
    assert elapsed < 10.0
    _report(3, f"argmin match and scores equal brute force on 200 random sets ({elapsed:.2f}s)")


def test_criterion_04_date_golden_table():
    from tests.test_extract import DATE_GOLDEN, REF

    assert len(DATE_GOLDEN) >= 33
    passed = 0
    for text, start, end, open_ended in DATE_GOLDEN:
        span = normalize_date_expression(text, REF)
        assert (span.start, span.resolved_end, span.open_ended) == (start, end, open_ended)
        passed += 1
    _report(4, f"all {passed} documented date expressions normalize exactly "
               f"(including the three classic forms)")


def test_criterion_05_fixture_segmentation_and_classification():
    started = time.perf_counter()
    fixtures = load_fixture_corpus()
    assert len(fixtures) >= 20

    exact_boundary_docs = 0
    for fixture in fixtures:
        segments = segment_document(fixture.document)
        got = [(s.block_indices[0], s.block_indices[-1]) for s in segments]
        want = [(first, last) for _, first, last in fixture.sections]
        exact_boundary_docs += got == want
    boundary_rate = exact_boundary_docs / len(fixtures)
    assert boundary_rate >= 0.90

    train = [f for i, f in enumerate(fixtures) if i % 2 == 0]
    held_out = [f for i, f in enumerate(fixtures) if i % 2 == 1]
    model = train_section_classifier(fixture_training_examples(train), seed=0)
    gaz = load_default_gazetteers()
    examples = fixture_training_examples(held_out)
    correct = sum(
        classify_section(model, seg, doc, gaz)[0] == label for seg, doc, label in examples
    )
    accuracy = correct / len(examples)
    assert accuracy >= 0.95
    elapsed = time.perf_counter() - started
    assert elapsed < 30.0
    _report(5, f"boundary exact-match {boundary_rate:.0%} (>=90%), held-out label accuracy "
               f"{accuracy:.1%} (>=95%) on {len(fixtures)} resumes ({elapsed:.2f}s)")


def test_criterion_06_cooccurrence_oracle():
    rng = random.Random(106)
    alphabet = [f"s{i}" for i in range(40)]
    checked = 0
    for _ in range(100):
        corpus = [
            set(rng.sample(alphabet, k=rng.randint(1, 10)))
            for _ in range(rng.randint(1, 50))
        ]
        min_count = rng.randint(1, 3)
        kept, freq, pairs = brute_force_cooccurrence(corpus, min_count)
        if not kept:
            continue
        vocab, matrix = build_cooccurrence(corpus, min_count=min_count)
        assert list(vocab.tokens) == kept
        assert [vocab.frequencies[i] for i in range(len(kept))] == [freq[t] for t in kept]
        assert matrix.pairs == pairs
        assert matrix.n_profiles == len(corpus)
        checked += 1
    assert checked >= 90
    _report(6, f"build_cooccurrence equals brute-force pair enumeration on {checked} random corpora")


def _planted(seed=107):
    corpus, groups = planted_skill_corpus(
        n_groups=4, group_size=10, profiles_per_group=60, skills_per_profile=5, seed=seed
    )
    _, matrix = build_cooccurrence(corpus, min_count=2)
    emb = train_embedding(matrix, d=min(20, len(matrix.vocabulary)), seed=seed)
    return emb, groups


def test_criterion_07_embedding_sanity():
    emb, groups = _planted()
    tokens = emb.vocabulary.tokens
    rng = random.Random(107)
    hits = 0
    trials = 2000
    for _ in range(trials):
        a = rng.choice(tokens)
        same = [t for t in tokens if groups[t] == groups[a] and t != a]
        cross = [t for t in tokens if groups[t] != groups[a]]
        b, c = rng.choice(same), rng.choice(cross)
        hits += distance(emb, a, b) < distance(emb, a, c)
    rate = hits / trials
    assert rate >= 0.95

    for token in tokens:
        got = nearest(emb, token, k=5)
        scored = sorted(
            ((distance(emb, token, other), i, other)
             for i, other in enumerate(tokens) if other != token)
        )
        want = [(other, (1.0 - d) * 100.0) for d, _, other in scored[:5]]
        assert got == want
    _report(7, f"within-group closer than cross-group in {rate:.1%} of triples (>=95%); "
               f"nearest lists equal the exhaustive oracle")


def test_criterion_08_map_and_clustering():
    started = time.perf_counter()
    emb, groups = _planted(seed=108)
    coords1 = project_2d(emb, perplexity=6.0, iterations=800, seed=8)
    coords2 = project_2d(emb, perplexity=6.0, iterations=800, seed=8)
    assert np.array_equal(coords1, coords2)

    skill_map = build_skill_map(emb, perplexity=6.0, iterations=800, seed=8, min_pts=3)
    ids = skill_map.cluster_ids
    clusters = sorted(set(int(c) for c in ids if c >= 0))
    assert len(clusters) >= 2
    clustered = 0
    majority = 0
    for cluster in clusters:
        members = [groups[skill_map.tokens[i]] for i in np.flatnonzero(ids == cluster)]
        clustered += len(members)
        majority += max(members.count(g) for g in set(members))
    purity = majority / clustered
    assert purity >= 0.90
    elapsed = time.perf_counter() - started
    assert elapsed < 60.0
    _report(8, f"projection bit-deterministic; {len(clusters)} clusters at purity "
               f"{purity:.1%} (>=90%) ({elapsed:.1f}s)")


def test_criterion_09_monotonicity_suite():
    rng = random.Random(109)
    table = UniversityRankingTable(entries={
        "stanford university": (95.0, 98.0), "northfield university": (82.0, 76.0),
        "riverside institute of technology": (71.0, 64.0),
    })
    employers = EmployerScoreTable(scores={"acme": 40.0}, profile_counts={}, corpus_hash="h")
    emb = _random_unit_embedding(30, 6, seed=109)
    tokens = emb.vocabulary.tokens
    upgrade = {DegreeLevel.Bachelor: DegreeLevel.Master, DegreeLevel.Master: DegreeLevel.Doctoral,
               DegreeLevel.Other: DegreeLevel.Bachelor, DegreeLevel.Doctoral: DegreeLevel.Doctoral}
    violations = 0
    profiles = [random_profile(rng, source_id=f"mono-{i}") for i in range(1000)]
    for p in profiles:
        # degree upgrade on the most recent education never lowers the score
        if p.educations:
            before = education_score(p, table, CONFIG)
            from talentrank.scoring import most_recent_education

            recent = most_recent_education(p)
            upgraded = tuple(
                dataclasses.replace(e, degree=upgrade[e.degree]) if e is recent else e
                for e in p.educations
            )
            after = education_score(dataclasses.replace(p, educations=upgraded), table, CONFIG)
            violations += after < before

        # extending any employment by one month never lowers experience points
        if p.works:
            idx = rng.randrange(len(p.works))
            entry = p.works[idx]
            end = entry.span.resolved_end
            month_index = end.year * 12 + end.month  # next month, same day clamp at 28
            extended_end = date(month_index // 12, month_index % 12 + 1, min(end.day, 28))
            new_span = dataclasses.replace(
                entry.span, end=extended_end, open_ended=False, resolved_end=extended_end
            )
            works = tuple(
                dataclasses.replace(w, span=new_span) if i == idx else w
                for i, w in enumerate(p.works)
            )
            p_ext = dataclasses.replace(p, works=works)
            violations += experience_points(p_ext) != experience_points(p) + 1
            violations += work_score(p_ext, employers, CONFIG) < work_score(p, employers, CONFIG)

        # adding an exact match for an unmatched desired skill never lowers skills
        desired = rng.sample(tokens, k=3)
        candidate = p.skill_tokens() & set(tokens) or {tokens[0]}
        missing = [t for t in desired if t not in candidate]
        if missing:
            _, before_avg = skill_score(candidate, desired, emb, CONFIG)
            _, after_avg = skill_score(candidate | {rng.choice(missing)}, desired, emb, CONFIG)
            violations += after_avg < before_avg - 1e-12

    # tightening the experience filter never adds candidates
    store = CandidateStore()
    blocks_doc = None
    for p in profiles[:200]:
        store._candidates[p.candidate_id] = type(
            "R", (), {"profile": p, "document": blocks_doc, "bookmarked": False}
        )()
    store._publish()
    previous = None
    for years in (0, 0.5, 1, 2, 3, 5, 8, 13, 21, 99):
        kept = filter_candidates(store, FilterSpec(min_experience_years=years))
        if previous is not None and not kept <= previous:
            violations += 1
        previous = kept

    assert violations == 0
    _report(9, "zero monotonicity violations across 1000 randomized profiles")


def test_criterion_10_ranking_comparator_oracle():
    rng = random.Random(110)
    emb = _random_unit_embedding(30, 6, seed=110)
    tokens = emb.vocabulary.tokens
    store = CandidateStore()
    store._embedding = emb
    store._rankings = UniversityRankingTable(entries={"stanford university": (95.0, 98.0)})
    store._employers = EmployerScoreTable(
        scores={"acme": 55.0, "globex": 75.0}, profile_counts={}, corpus_hash="h"
    )
    pool = {}
    for i in range(48):
        p = random_profile(rng, source_id=f"rank-{i}")
        skills = tuple(rng.sample(tokens, k=rng.randint(1, 6)))
        p = dataclasses.replace(
            p,
            skills=tuple(
                dataclasses.replace(s, token=t, raw=t) for s, t in zip(p.skills, skills)
            ) or p.skills,
        )
        pool[p.candidate_id] = p
    # force the score-chart tie: two candidates with identical skills, different work
    tie_a = profile(works=[work("acme", date(2023, 1, 1), date(2023, 12, 31))],
                    skills=[tokens[0]], cid="tie-a")
    tie_b = profile(works=[work("globex", date(2023, 1, 1), date(2023, 12, 31))],
                    skills=[tokens[0]], cid="tie-b")
    pool["tie-a"], pool["tie-b"] = tie_a, tie_b
    store._candidates = {
        cid: type("R", (), {"profile": p, "document": None, "bookmarked": False})()
        for cid, p in pool.items()
    }
    store._publish()

    job = JobProfile.create("oracle-job", "Oracle", [tokens[0], tokens[1], tokens[2]])
    ids = set(pool)
    cards = {cid: store.scorecard(cid, job) for cid in ids}

    modes = {
        "overall": lambda c: (-c.overall_score,),
        "education": lambda c: (-c.education_score,),
        "work": lambda c: (-c.work_score,),
        "skills": lambda c: (-c.skills_score,),
        "scorechart": lambda c: (-c.skills_score, -c.work_score),
    }
    for token in job.desired_skills:
        modes[f"skill:{token}"] = (
            lambda c, t=token: (-next(m.score for m in c.skill_matches if m.desired == t),)
        )
    for mode, keyfn in modes.items():
        ranked = rank_candidates(store, ids, job, mode)
        oracle = [cid for cid, _ in sorted(cards.items(), key=lambda kv: keyfn(kv[1]) + (kv[0],))]
        assert [cid for cid, _ in ranked.entries] == oracle, mode
        assert rank_candidates(store, ids, job, mode).entries == ranked.entries

    chart = rank_candidates(store, ids, job, "scorechart")
    order = [cid for cid, _ in chart.entries]
    assert order.index("tie-b") < order.index("tie-a")  # equal skills, better work first

    for column in chart.columns:
        assert len(chart.top_decile[column]) == math.ceil(0.1 * len(ids))
    _report(10, f"rank_candidates equals the comparator oracle for {len(modes)} modes on a "
                f"{len(ids)}-candidate pool, including the work-score tiebreak")


def test_criterion_11_end_to_end_determinism(tmp_path):
    started = time.perf_counter()
    runner = CliRunner()
    outputs = []
    for run in ("run1", "run2"):
        base = tmp_path / run
        corpus = base / "corpus"
        store = base / "store"
        r = runner.invoke(cli_main, ["gen-corpus", "--profiles", "2000", "--seed", "42",
                                     "--out", str(corpus)])
        assert r.exit_code == 0, r.output
        files = sorted(str(p) for p in corpus.glob("*.blocks"))
        r = runner.invoke(cli_main, ["ingest", *files, "--store", str(store)])
        assert r.exit_code == 0, r.output
        r = runner.invoke(cli_main, ["import-rankings", "--the", str(corpus / "the_rankings.csv"),
                                     "--qs", str(corpus / "qs_rankings.csv"), "--store", str(store)])
        assert r.exit_code == 0, r.output
        r = runner.invoke(cli_main, ["train", "--store", str(store), "--seed", "9",
                                     "--iterations", "600"])
        assert r.exit_code == 0, r.output
        r = runner.invoke(cli_main, ["rank", "--job", "backend-engineer", "--store", str(store),
                                     "--format", "csv"])
        assert r.exit_code == 0, r.output
        models = {
            p.name: p.read_bytes() for p in sorted((store / "models").glob("*.tr"))
        }
        outputs.append((models, r.output))

    assert set(outputs[0][0]) == set(outputs[1][0])
    for name in outputs[0][0]:
        assert outputs[0][0][name] == outputs[1][0][name], f"model file {name} differs"
    assert outputs[0][1] == outputs[1][1]
    rows = list(csv.reader(io.StringIO(outputs[0][1])))
    assert len(rows) > 100
    elapsed = time.perf_counter() - started
    assert elapsed < 120.0
    _report(11, f"two full gen->ingest->train->rank runs on 2000 profiles are byte-identical "
                f"({elapsed:.1f}s)")


def test_criterion_12_persistence(tmp_path):
    job = JobProfile.create("persist-job", "Persist", ["python", "sql"])
    path = tmp_path / "job.tr"
    save_artifact(path, "job", job.to_payload())
    loaded = JobProfile.from_payload(load_artifact(path, "job"))
    assert loaded == job
    assert dump_artifact("job", loaded.to_payload()) == path.read_bytes()

    emb = _random_unit_embedding(12, 4, seed=112)
    emb_path = tmp_path / "embedding.tr"
    save_artifact(emb_path, "embedding", emb.to_payload())
    emb_loaded = SkillEmbedding.from_payload(load_artifact(emb_path, "embedding"))
    assert np.array_equal(emb_loaded.vectors, emb.vectors)
    assert dump_artifact("embedding", emb_loaded.to_payload()) == emb_path.read_bytes()

    truncated = tmp_path / "truncated.tr"
    truncated.write_bytes(path.read_bytes()[:-9])
    with pytest.raises(IntegrityError):
        load_artifact(truncated, "job")

    corrupted = bytearray(path.read_bytes())
    corrupted[-2] ^= 0x01
    corrupt_path = tmp_path / "corrupt.tr"
    corrupt_path.write_bytes(bytes(corrupted))
    with pytest.raises(IntegrityError):
        load_artifact(corrupt_path, "job")

    future = tmp_path / "future.tr"
    future.write_bytes(path.read_bytes().replace(b":v1:", b":v9:", 1))
    with pytest.raises(VersionError):
        load_artifact(future, "job")

    store_dir = tmp_path / "store"
    store = CandidateStore.create(store_dir)
    victim = sorted((store_dir / "jobs").glob("*.tr"))[0]
    victim.write_bytes(victim.read_bytes()[:30])
    with pytest.raises(IntegrityError):
        CandidateStore.open(store_dir)
    _report(12, "artifacts round-trip bit-exactly; truncated, corrupted, and future-version "
                "files are rejected without partial loads")
