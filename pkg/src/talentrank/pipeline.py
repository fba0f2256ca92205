"""End-to-end document processing and the bundled fixture corpus.

Wires segmentation, classification, and extraction into one call, and loads
the hand-labeled fixture resumes used both as classifier training data and
as evaluation ground truth.
"""

from __future__ import annotations

from dataclasses import dataclass
from datetime import date
from functools import lru_cache
from importlib import resources
from pathlib import Path

from .corpusgen import DEFAULT_REFERENCE_DATE
from .extract import CandidateProfile, build_profile, extract_entities
from .gazetteers import EntityGazetteers, load_default_gazetteers
from .ingest import (
    LayoutDocument,
    SectionClassifierModel,
    SectionLabel,
    Segment,
    SegmentationParams,
    classify_segments,
    parse_block_table,
    segment_document,
    train_section_classifier,
)

SECTION_MODEL_SEED = 0


@dataclass(frozen=True)
class FixtureResume:
    name: str
    document: LayoutDocument
    sections: tuple[tuple[SectionLabel, int, int], ...]   # label, first, last block

    def gold_segments(self) -> list[Segment]:
        return [
            Segment(block_indices=tuple(range(first, last + 1)), label=label)
            for label, first, last in self.sections
        ]


def fixture_dir():
    return resources.files("talentrank") / "data" / "fixtures"


@lru_cache(maxsize=1)
def load_fixture_corpus() -> tuple[FixtureResume, ...]:
    base = fixture_dir()
    fixtures = []
    names = sorted(
        entry.name[: -len(".blocks")] for entry in base.iterdir() if entry.name.endswith(".blocks")
    )
    for name in names:
        doc = parse_block_table((base / f"{name}.blocks").read_text("utf-8"), name)
        sections = []
        for line in (base / f"{name}.sections").read_text("utf-8").splitlines():
            label, first, last = line.split("\t")
            sections.append((SectionLabel(label), int(first), int(last)))
        fixtures.append(FixtureResume(name=name, document=doc, sections=tuple(sections)))
    return tuple(fixtures)


def fixture_training_examples(fixtures=None):
    """(segment, document, label) triples from sidecar-annotated sections."""
    fixtures = fixtures if fixtures is not None else load_fixture_corpus()
    examples = []
    for fixture in fixtures:
        doc = fixture.document
        segments = segment_document(doc)
        by_first = {seg.block_indices[0]: seg for seg in segments}
        for label, first, last in fixture.sections:
            seg = by_first.get(first)
            if seg is None or seg.block_indices[-1] != last:
                seg = Segment(
                    block_indices=tuple(range(first, last + 1)),
                    headline_block=first if first in by_first else None,
                )
            examples.append((seg, doc, label))
    return examples


def train_default_section_model(seed: int = SECTION_MODEL_SEED) -> SectionClassifierModel:
    """Train the section classifier on the full bundled fixture corpus."""
    return train_section_classifier(fixture_training_examples(), seed=seed)


def process_document(
    doc: LayoutDocument,
    model: SectionClassifierModel,
    gazetteers: EntityGazetteers | None = None,
    params: SegmentationParams | None = None,
    reference_date: date = DEFAULT_REFERENCE_DATE,
) -> CandidateProfile:
    """Full pipeline for one document: segment, classify, extract, assemble."""
    gaz = gazetteers or load_default_gazetteers()
    keywords = frozenset(gaz.section_keywords)
    segments = segment_document(doc, params, keywords)
    classified = classify_segments(model, segments, doc, gaz)
    entity_sets = [extract_entities(seg, doc, gaz, params) for seg in classified]
    return build_profile(doc, classified, entity_sets, reference_date)


def load_fixture_document(name: str) -> LayoutDocument:
    base = fixture_dir()
    return parse_block_table((base / f"{name}.blocks").read_text("utf-8"), name)


def read_fixture_text(filename: str) -> str:
    return (fixture_dir() / filename).read_text("utf-8")
