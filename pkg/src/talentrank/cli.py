"""Command-line entry points for the full pipeline.

Exit codes: 0 success, 1 operational failure, 2 usage error. Every
subcommand with randomness takes an explicit --seed and is bit-reproducible.
The store directory defaults to the TALENTRANK_STORE environment variable.
"""

from __future__ import annotations

import json
import sys
from datetime import date
from pathlib import Path

import click

from . import corpusgen
from .catalog import CandidateStore, FilterSpec, filter_candidates, rank_candidates
from .errors import TalentRankError
from .extract import DegreeLevel
from .ingest import import_layout
from .pipeline import DEFAULT_REFERENCE_DATE, process_document, train_default_section_model
from .scoring import (
    JobProfile,
    ScoringConfig,
    build_employer_scores,
    import_university_rankings,
    most_recent_degree,
    parse_config,
)
from .skillspace import build_cooccurrence, build_skill_map, map_to_csv, train_embedding

_STORE_OPTION = click.option(
    "--store", "store_dir", envvar="TALENTRANK_STORE", required=True,
    type=click.Path(path_type=Path), help="Store directory (env: TALENTRANK_STORE).",
)


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(1)


@click.group()
def main():
    """Resume analysis and candidate ranking."""


def _detect_format(path: Path, forced: str | None) -> str:
    if forced:
        return forced
    if path.suffix.lower() in (".html", ".htm"):
        return "html-subset"
    return "block-table"


def _section_model_for(store: CandidateStore):
    model = store.snapshot().section_model
    if model is None:
        model = train_default_section_model()
        store.set_models(section_model=model)
        click.echo("trained section classifier from the bundled fixture corpus", err=True)
    return model


@main.command()
@click.argument("files", nargs=-1, type=click.Path(path_type=Path))
@_STORE_OPTION
@click.option("--format", "format_flag", type=click.Choice(["block-table", "html-subset"]),
              default=None, help="Force input format (default: by file extension).")
@click.option("--reference-date", default=None, help="Reference date (YYYY-MM-DD) for open-ended spans.")
def ingest(files, store_dir, format_flag, reference_date):
    """Parse resume FILES into candidate profiles in the store."""
    if not files:
        raise click.UsageError("no input files given")
    reference = date.fromisoformat(reference_date) if reference_date else DEFAULT_REFERENCE_DATE
    store = CandidateStore.open_or_create(store_dir)
    model = _section_model_for(store)
    failures = 0
    for path in files:
        try:
            data = Path(path).read_bytes()
            doc = import_layout(data, _detect_format(path, format_flag), path.stem)
            profile = process_document(doc, model, reference_date=reference)
            store.add_candidate(profile, doc)
            click.echo(f"{path.stem} -> {profile.candidate_id}")
        except (TalentRankError, OSError) as exc:
            failures += 1
            click.echo(f"error: {path}: {exc}", err=True)
    if failures:
        sys.exit(1)


@main.command("gen-corpus")
@click.option("--profiles", "n", type=int, required=True, help="Number of synthetic profiles.")
@click.option("--seed", type=int, required=True)
@click.option("--out", "outdir", type=click.Path(path_type=Path), required=True)
def gen_corpus(n, seed, outdir):
    """Generate a synthetic resume corpus plus its ranking tables."""
    if n < 1:
        raise click.UsageError("--profiles must be >= 1")
    paths = corpusgen.write_corpus(outdir, n, seed)
    click.echo(f"wrote {len(paths)} documents and 2 ranking tables to {outdir}")


@main.command("import-rankings")
@click.option("--the", "the_file", type=click.Path(path_type=Path), required=True)
@click.option("--qs", "qs_file", type=click.Path(path_type=Path), required=True)
@_STORE_OPTION
def import_rankings(the_file, qs_file, store_dir):
    """Import the THE and QS university ranking tables."""
    store = CandidateStore.open_or_create(store_dir)
    try:
        table = import_university_rankings(
            Path(the_file).read_text("utf-8"), Path(qs_file).read_text("utf-8")
        )
    except TalentRankError as exc:
        _fail(str(exc))
    for warning in table.warnings:
        click.echo(f"warning: {warning}", err=True)
    store.set_models(rankings=table)
    both = sum(1 for v in table.entries.values() if v[0] is not None and v[1] is not None)
    click.echo(f"imported {len(table.entries)} institutions ({both} present in both sources)")


@main.command()
@_STORE_OPTION
@click.option("--dims", type=int, default=100, show_default=True)
@click.option("--seed", type=int, required=True)
@click.option("--min-count", type=int, default=2, show_default=True)
@click.option("--perplexity", type=float, default=12.0, show_default=True)
@click.option("--iterations", type=int, default=1000, show_default=True)
@click.option("--eps", type=float, default=None, help="Cluster radius (default: data-driven).")
@click.option("--min-pts", type=int, default=3, show_default=True)
@click.option("--config", "config_file", type=click.Path(path_type=Path), default=None,
              help="Scoring config file (key = value lines).")
def train(store_dir, dims, seed, min_count, perplexity, iterations, eps, min_pts, config_file):
    """Train the skill embedding, 2-D map, and employer-score table."""
    store = CandidateStore.open_or_create(store_dir)
    snap = store.snapshot()
    profiles = [record.profile for record in snap.candidates.values()]
    if not profiles:
        _fail("store has no candidates; run ingest first")
    if snap.rankings is None:
        _fail("store has no ranking table; run import-rankings first")
    config = snap.config
    if config_file is not None:
        try:
            config = parse_config(Path(config_file).read_text("utf-8"))
        except TalentRankError as exc:
            _fail(str(exc))

    try:
        _, matrix = build_cooccurrence((p.skill_tokens() for p in profiles), min_count=min_count)
    except TalentRankError as exc:
        _fail(str(exc))
    v = len(matrix.vocabulary)
    d = min(dims, v)
    if d < dims:
        click.echo(f"note: clamped dims to vocabulary size {v}", err=True)
    embedding = train_embedding(matrix, d=d, seed=seed)
    skill_map = None
    if v >= 4:
        bound = (v - 1) / 3
        perp = perplexity
        if perp >= bound:
            perp = bound * 0.99
            click.echo(f"note: clamped perplexity to {perp:.2f} for |V|={v}", err=True)
        skill_map = build_skill_map(
            embedding, perplexity=perp, iterations=iterations, seed=seed,
            eps=eps, min_pts=min_pts,
        )
    else:
        click.echo("note: vocabulary too small for a 2-D map; skipped projection", err=True)
    employers = build_employer_scores(sorted(profiles, key=lambda p: p.candidate_id),
                                      snap.rankings, config)
    store.set_models(embedding=embedding, skill_map=skill_map, employers=employers, config=config)
    clusters = 0
    if skill_map is not None:
        clusters = len(set(int(c) for c in skill_map.cluster_ids if c >= 0))
    click.echo(f"trained embedding |V|={v} d={d}; map clusters={clusters}; "
               f"employers={len(employers.scores)}")


def _load_job(store: CandidateStore, job_ref: str) -> JobProfile:
    path = Path(job_ref)
    if path.exists() and path.suffix == ".json":
        return JobProfile.from_payload(json.loads(path.read_text("utf-8")))
    return store.get_job(job_ref)


def _parse_degrees(degrees: str | None):
    if not degrees:
        return None
    return frozenset(DegreeLevel(d.strip()) for d in degrees.split(",") if d.strip())


@main.command()
@click.option("--job", "job_ref", required=True, help="Job id in the store, or a job JSON file.")
@_STORE_OPTION
@click.option("--min-years", type=float, default=None)
@click.option("--degrees", default=None, help="Comma-separated required degrees.")
@click.option("--sort", "sort_mode", default="overall", show_default=True)
@click.option("--format", "output_format", type=click.Choice(["table", "csv"]), default="table")
@click.option("--plot", "plot_file", type=click.Path(path_type=Path), default=None,
              help="Also render the score chart to this image file.")
def rank(job_ref, store_dir, min_years, degrees, sort_mode, output_format, plot_file):
    """Rank stored candidates for a job, with optional filters."""
    try:
        store = CandidateStore.open(store_dir)
        job = _load_job(store, job_ref)
        spec = FilterSpec(min_experience_years=min_years, required_degrees=_parse_degrees(degrees))
        ids = filter_candidates(store, spec)
        ranked = rank_candidates(store, ids, job, sort_mode)
    except (TalentRankError, ValueError, OSError) as exc:
        _fail(str(exc))

    snap = store.snapshot()
    header = ["rank", "candidate_id", "name", "education", "work", "skills", "overall"]
    rows = []
    for position, (cid, card) in enumerate(ranked.entries, start=1):
        name = snap.candidates[cid].profile.name or ""
        rows.append([
            str(position), cid, name,
            repr(card.education_score), repr(card.work_score),
            repr(card.skills_score), repr(card.overall_score),
        ])
    if output_format == "csv":
        click.echo(",".join(header))
        for row in rows:
            click.echo(",".join(_csv_cell(c) for c in row))
    else:
        widths = [max(len(r[i]) for r in rows + [header]) for i in range(len(header))]
        click.echo("  ".join(h.ljust(w) for h, w in zip(header, widths)))
        for row in rows:
            click.echo("  ".join(c.ljust(w) for c, w in zip(row, widths)))
    if plot_file is not None:
        from .plots import render_score_chart

        entries = [
            (snap.candidates[cid].profile.name or cid, card.skills_score, card.work_score)
            for cid, card in ranked.entries
        ]
        render_score_chart(entries, plot_file)
        click.echo(f"wrote score chart to {plot_file}", err=True)


def _csv_cell(value: str) -> str:
    if "," in value or '"' in value:
        return '"' + value.replace('"', '""') + '"'
    return value


@main.command()
@click.option("--candidate", "candidate_id", required=True)
@click.option("--job", "job_ref", required=True)
@_STORE_OPTION
def score(candidate_id, job_ref, store_dir):
    """Print the full scorecard explanation for one candidate."""
    try:
        store = CandidateStore.open(store_dir)
        job = _load_job(store, job_ref)
        card = store.scorecard(candidate_id, job)
        record = store.get_candidate(candidate_id)
    except TalentRankError as exc:
        _fail(str(exc))

    profile = record.profile
    click.echo(f"candidate {candidate_id} ({profile.name or 'unnamed'}) vs job {job.job_id}")
    click.echo(f"  education: {card.education_score!r}")
    ev = card.education_evidence
    if ev:
        click.echo(f"    degree {ev['degree']} = {ev['degree_points']!r} points; "
                   f"university {ev['institution'] or 'unknown'} "
                   f"(THE {ev['university_the']}, QS {ev['university_qs']}) = {ev['university_score']!r}"
                   + (" [capped]" if ev["capped"] else ""))
    click.echo(f"  work: {card.work_score!r}")
    wev = card.work_evidence
    if wev:
        click.echo(f"    experience points: {wev['experience_points']!r}; "
                   f"weighted employer average: {wev['weighted_employer_average']!r}")
        for entry in wev.get("entries", ()):
            click.echo(f"    - {entry['employer']}: {entry['months']} months, "
                       f"weight {entry['weight']:.4f}, employer score {entry['employer_score']!r}")
    click.echo(f"  skills: {card.skills_score!r}")
    for match in card.skill_matches:
        matched = match.matched or "(no match)"
        click.echo(f"    - {match.desired}: matched {matched}, distance {match.distance!r}, "
                   f"score {match.score!r}")
    click.echo(f"  overall: {card.overall_score!r} (weights {card.weights})")


@main.command()
@_STORE_OPTION
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--webroot", type=click.Path(path_type=Path), default=None,
              help="Serve the built web console from this directory.")
def serve(store_dir, host, port, webroot):
    """Run the HTTP API (and optionally the web console)."""
    import uvicorn

    from .server import create_app

    try:
        store = CandidateStore.open(store_dir)
    except TalentRankError as exc:
        _fail(str(exc))
    app = create_app(store, webroot=str(webroot) if webroot else None)
    click.echo(f"serving on http://{host}:{port}")
    try:
        uvicorn.run(app, host=host, port=port, log_level="warning")
    except SystemExit:
        raise
    except OSError as exc:
        _fail(str(exc))


@main.command("export-map")
@_STORE_OPTION
@click.option("--out", "out_file", type=click.Path(path_type=Path), required=True)
@click.option("--plot", "plot_file", type=click.Path(path_type=Path), default=None,
              help="Also render the skill map to this image file.")
def export_map(store_dir, out_file, plot_file):
    """Export the 2-D skill map as CSV (token, x, y, cluster_id)."""
    try:
        store = CandidateStore.open(store_dir)
    except TalentRankError as exc:
        _fail(str(exc))
    skill_map = store.snapshot().skill_map
    if skill_map is None:
        _fail("no trained skill map in the store; run train first")
    Path(out_file).write_text(map_to_csv(skill_map), encoding="utf-8")
    click.echo(f"wrote {len(skill_map.tokens)} skills to {out_file}")
    if plot_file is not None:
        from .plots import render_skill_map

        render_skill_map(skill_map, plot_file)
        click.echo(f"wrote skill map figure to {plot_file}", err=True)


if __name__ == "__main__":
    main()
