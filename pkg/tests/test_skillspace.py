"""Co-occurrence counting, embeddings, projection, and clustering."""

import itertools
import random

import numpy as np
import pytest

from talentrank.corpusgen import planted_skill_corpus
from talentrank.errors import NormalizationError, OutOfVocabularyError, ParameterError
from talentrank.persistence import dump_artifact, parse_artifact
from talentrank.skillspace import (
    SkillEmbedding,
    SkillMap2D,
    build_cooccurrence,
    build_skill_map,
    cluster_map,
    distance,
    factorize_ppmi,
    map_to_csv,
    nearest,
    normalize_skill,
    ppmi_matrix,
    project_2d,
    train_embedding,
)
from tests.conftest import SMALL_CORPUS


@pytest.mark.parametrize(
    "raw,token",
    [
        ("  Machine  Learning ", "machine learning"),
        ("C++", "c++"),
        (".NET", ".net"),
        ("'SQL'", "sql"),
        ("• Python", "python"),
        ("node.js", "node.js"),
    ],
)
def test_normalize_skill(raw, token):
    assert normalize_skill(raw) == token


def test_normalize_skill_empty_error():
    with pytest.raises(NormalizationError):
        normalize_skill("!!!")


def brute_force_cooccurrence(corpus, min_count):
    """Independent oracle: plain double loop over profiles and pairs."""
    freq = {}
    for profile in corpus:
        for token in set(profile):
            freq[token] = freq.get(token, 0) + 1
    kept = sorted(t for t, c in freq.items() if c >= min_count)
    index = {t: i for i, t in enumerate(kept)}
    pairs = {}
    for profile in corpus:
        tokens = sorted(set(profile) & set(kept))
        for a, b in itertools.combinations(tokens, 2):
            key = (index[a], index[b])
            pairs[key] = pairs.get(key, 0) + 1
    return kept, {t: freq[t] for t in kept}, pairs


def test_cooccurrence_counting_semantics():
    corpus = [{"a", "b"}, {"a", "b"}]
    vocab, matrix = build_cooccurrence(corpus, min_count=1)
    ia, ib = vocab.index_of("a"), vocab.index_of("b")
    assert matrix.count(ia, ib) == 2
    assert matrix.count(ia, ia) == 2


def test_cooccurrence_set_semantics():
    vocab, matrix = build_cooccurrence([["a", "a", "b"]], min_count=1)
    assert matrix.count(vocab.index_of("a"), vocab.index_of("b")) == 1
    assert vocab.frequencies[vocab.index_of("a")] == 1


def test_cooccurrence_min_count_filter():
    vocab, _ = build_cooccurrence([{"a", "b"}, {"a"}], min_count=2)
    assert vocab.tokens == ("a",)
    with pytest.raises(ParameterError):
        build_cooccurrence([{"a"}, {"b"}], min_count=2)


def test_cooccurrence_matches_brute_force_fixture():
    vocab, matrix = build_cooccurrence(SMALL_CORPUS, min_count=1)
    kept, freq, pairs = brute_force_cooccurrence(SMALL_CORPUS, 1)
    assert list(vocab.tokens) == kept
    assert [vocab.frequencies[i] for i in range(len(kept))] == [freq[t] for t in kept]
    assert matrix.pairs == pairs


def test_cooccurrence_matches_brute_force_random():
    rng = random.Random(11)
    alphabet = [f"s{i}" for i in range(30)]
    for _ in range(25):
        corpus = [
            set(rng.sample(alphabet, k=rng.randint(1, 8)))
            for _ in range(rng.randint(1, 40))
        ]
        min_count = rng.randint(1, 3)
        try:
            vocab, matrix = build_cooccurrence(corpus, min_count=min_count)
        except ParameterError:
            kept, _, _ = brute_force_cooccurrence(corpus, min_count)
            assert kept == []
            continue
        kept, freq, pairs = brute_force_cooccurrence(corpus, min_count)
        assert list(vocab.tokens) == kept
        assert matrix.pairs == pairs
        assert matrix.n_profiles == len(corpus)


def test_embedding_separates_cooccurring_skills(small_embedding):
    # a and b always co-occur; c never appears with a
    assert distance(small_embedding, "a", "b") < distance(small_embedding, "a", "c")


def test_embedding_deterministic():
    _, matrix = build_cooccurrence(SMALL_CORPUS, min_count=1)
    e1 = train_embedding(matrix, d=3, seed=5)
    e2 = train_embedding(matrix, d=3, seed=5)
    assert np.array_equal(e1.vectors, e2.vectors)


def test_full_rank_factorization_reconstructs_ppmi():
    _, matrix = build_cooccurrence(SMALL_CORPUS, min_count=1)
    P = ppmi_matrix(matrix)
    u, s, vt = factorize_ppmi(P, P.shape[0])
    assert np.linalg.norm(u @ np.diag(s) @ vt - P) < 1e-6


def test_embedding_rows_unit_norm(small_embedding):
    norms = np.linalg.norm(small_embedding.vectors, axis=1)
    assert np.all(np.abs(norms - 1.0) <= 1e-9)


def test_embedding_dimension_bounds():
    _, matrix = build_cooccurrence(SMALL_CORPUS, min_count=1)
    with pytest.raises(ParameterError):
        train_embedding(matrix, d=len(matrix.vocabulary) + 1, seed=0)


def test_distance_identity_symmetry_range(small_embedding):
    tokens = small_embedding.vocabulary.tokens
    for t in tokens:
        assert distance(small_embedding, t, t) == 0.0
    for a in tokens:
        for b in tokens:
            d_ab = distance(small_embedding, a, b)
            assert d_ab == distance(small_embedding, b, a)
            assert 0.0 <= d_ab <= 1.0


def test_distance_unknown_token(small_embedding):
    with pytest.raises(OutOfVocabularyError):
        distance(small_embedding, "a", "nope")


def test_orthogonal_vectors_distance_one():
    vocab_tokens = ("p", "q")
    from talentrank.skillspace import SkillVocabulary

    emb = SkillEmbedding(
        vocabulary=SkillVocabulary(tokens=vocab_tokens, frequencies=(1, 1)),
        vectors=np.array([[1.0, 0.0], [0.0, 1.0]]),
        dimension=2, seed=0, method="manual", corpus_hash="x",
    )
    assert distance(emb, "p", "q") == 1.0


def test_nearest_oracle_equivalence(small_embedding):
    vocab = small_embedding.vocabulary
    for token in vocab.tokens:
        got = nearest(small_embedding, token, k=len(vocab) - 1)
        # exhaustive scan oracle
        scored = sorted(
            ((distance(small_embedding, token, other), i, other)
             for i, other in enumerate(vocab.tokens) if other != token),
        )
        want = [(other, (1.0 - d) * 100.0) for d, _, other in scored]
        assert got == want
        assert token not in [t for t, _ in got]


def test_nearest_k1_fixture(small_embedding):
    assert nearest(small_embedding, "a", k=1)[0][0] == "b"


def test_project_requires_min_vocab(small_embedding):
    _, matrix = build_cooccurrence([{"a", "b"}, {"a", "b"}], min_count=1)
    tiny = train_embedding(matrix, d=2, seed=0)
    with pytest.raises(ParameterError):
        project_2d(tiny, perplexity=1.0, iterations=10, seed=0)
    with pytest.raises(ParameterError):
        project_2d(small_embedding, perplexity=50.0, iterations=10, seed=0)


def _planted_embedding(seed=0):
    corpus, groups = planted_skill_corpus(
        n_groups=3, group_size=6, profiles_per_group=30, skills_per_profile=4, seed=seed
    )
    _, matrix = build_cooccurrence(corpus, min_count=2)
    emb = train_embedding(matrix, d=min(10, len(matrix.vocabulary)), seed=seed)
    return emb, groups


def test_projection_deterministic():
    emb, _ = _planted_embedding()
    y1 = project_2d(emb, perplexity=4.0, iterations=400, seed=9)
    y2 = project_2d(emb, perplexity=4.0, iterations=400, seed=9)
    assert np.array_equal(y1, y2)


def test_projection_kl_decreases_after_exaggeration():
    emb, _ = _planted_embedding()
    _, trace = project_2d(emb, perplexity=4.0, iterations=600, seed=1, return_kl_trace=True)
    # compare consecutive 50-iteration windows after early exaggeration ends
    window_means = [np.mean(trace[i : i + 50]) for i in range(250, 600, 50)]
    for prev, cur in zip(window_means, window_means[1:]):
        assert cur <= prev + 1e-9


def test_projection_separates_planted_blocks():
    emb, groups = _planted_embedding()
    coords = project_2d(emb, perplexity=4.0, iterations=600, seed=3)
    tokens = emb.vocabulary.tokens
    intra, inter = [], []
    for i, a in enumerate(tokens):
        for j in range(i + 1, len(tokens)):
            d = float(np.linalg.norm(coords[i] - coords[j]))
            (intra if groups[a] == groups[tokens[j]] else inter).append(d)
    assert np.mean(inter) > np.mean(intra)


def brute_force_dbscan(coords, eps, min_pts):
    """Oracle: explicit core mask + connected components + border assignment."""
    n = len(coords)
    coords = np.asarray(coords, dtype=float)
    within = [
        [j for j in range(n) if np.linalg.norm(coords[i] - coords[j]) <= eps + 1e-12]
        for i in range(n)
    ]
    core = [len(within[i]) >= min_pts for i in range(n)]
    labels = [-1] * n
    cluster = 0
    for i in range(n):
        if labels[i] != -1 or not core[i]:
            continue
        frontier = [i]
        labels[i] = cluster
        while frontier:
            p = frontier.pop(0)
            for q in within[p]:
                if labels[q] == -1:
                    labels[q] = cluster
                    if core[q]:
                        frontier.append(q)
        cluster += 1
    return labels


def test_dbscan_two_blobs():
    rng = np.random.default_rng(4)
    blob1 = rng.normal((0, 0), 0.3, size=(20, 2))
    blob2 = rng.normal((10, 10), 0.3, size=(20, 2))
    coords = np.vstack([blob1, blob2])
    labels = cluster_map(coords, eps=1.5, min_pts=3)
    assert set(labels.tolist()) == {0, 1}
    assert labels.tolist() == brute_force_dbscan(coords, 1.5, 3)


def test_dbscan_all_noise():
    coords = np.array([[0.0, 0.0], [10.0, 0.0], [0.0, 10.0]])
    labels = cluster_map(coords, eps=1.0, min_pts=2)
    assert labels.tolist() == [-1, -1, -1]


def test_dbscan_single_point():
    labels = cluster_map(np.array([[1.0, 2.0]]), eps=0.5, min_pts=1)
    assert labels.tolist() == [0]


def test_dbscan_random_oracle():
    rng = np.random.default_rng(12)
    for _ in range(10):
        coords = rng.normal(0, 3, size=(rng.integers(5, 40), 2))
        eps = float(rng.uniform(0.5, 3.0))
        min_pts = int(rng.integers(1, 5))
        assert cluster_map(coords, eps, min_pts).tolist() == brute_force_dbscan(coords, eps, min_pts)


def test_dbscan_parameter_errors():
    coords = np.zeros((3, 2))
    with pytest.raises(ParameterError):
        cluster_map(coords, eps=0.0, min_pts=1)
    with pytest.raises(ParameterError):
        cluster_map(coords, eps=1.0, min_pts=0)
    with pytest.raises(ParameterError):
        cluster_map(np.array([[np.inf, 0.0]]), eps=1.0, min_pts=1)


def test_cluster_ids_contiguous():
    emb, _ = _planted_embedding()
    skill_map = build_skill_map(emb, perplexity=4.0, iterations=400, seed=2)
    ids = sorted(set(int(c) for c in skill_map.cluster_ids if c >= 0))
    assert ids == list(range(len(ids)))
    assert np.all(np.isfinite(skill_map.coords))


def test_embedding_serialization_bit_exact(small_embedding):
    blob = dump_artifact("embedding", small_embedding.to_payload())
    loaded = SkillEmbedding.from_payload(parse_artifact(blob, "embedding"))
    assert np.array_equal(loaded.vectors, small_embedding.vectors)
    assert dump_artifact("embedding", loaded.to_payload()) == blob
    norms = np.linalg.norm(loaded.vectors, axis=1)
    assert np.all(np.abs(norms - 1.0) <= 1e-9)


def test_map_serialization_and_csv(tmp_path):
    emb, _ = _planted_embedding()
    skill_map = build_skill_map(emb, perplexity=4.0, iterations=300, seed=2)
    blob = dump_artifact("skill_map", skill_map.to_payload())
    loaded = SkillMap2D.from_payload(parse_artifact(blob, "skill_map"))
    assert dump_artifact("skill_map", loaded.to_payload()) == blob
    csv_text = map_to_csv(skill_map)
    lines = csv_text.strip().splitlines()
    assert lines[0] == "token,x,y,cluster_id"
    assert len(lines) == len(skill_map.tokens) + 1
    assert map_to_csv(loaded) == csv_text


def test_corpus_growth_new_skill_appears():
    corpus = [set(p) for p in SMALL_CORPUS]
    _, matrix = build_cooccurrence(corpus, min_count=2)
    assert "rust" not in matrix.vocabulary
    grown = corpus + [{"rust", "a"}, {"rust", "b"}]
    vocab, matrix2 = build_cooccurrence(grown, min_count=2)
    assert "rust" in vocab
    emb = train_embedding(matrix2, d=3, seed=0)
    assert len(nearest(emb, "rust", k=2)) == 2
