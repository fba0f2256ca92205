"""Layout-document ingestion, section segmentation, and section classification.

Documents arrive either as a tab-separated block table or as a small HTML
subset; both become a :class:`LayoutDocument` of position- and font-annotated
blocks in reading order. Segmentation finds headline boundaries from font
size, boldness, and whitespace gaps; a trainable log-linear classifier (with
a gazetteer override for canonical headlines) labels each segment.
"""

from __future__ import annotations

import re
import statistics
from dataclasses import dataclass, field, replace
from enum import Enum
from html.parser import HTMLParser

import numpy as np

from .errors import (
    IncompatibleModelError,
    NoBlocksError,
    ParameterError,
    ParseError,
    TrainingError,
)
from .gazetteers import load_default_gazetteers, normalize_term
from .persistence import decode_array, encode_array

FEATURE_SPEC_VERSION = "1"

BLOCK_TABLE_COLUMNS = ("page", "x", "y", "width", "height", "font_size", "bold", "font_name", "text")


class SectionLabel(str, Enum):
    Personal = "Personal"
    Education = "Education"
    WorkExperience = "WorkExperience"
    Skills = "Skills"
    Other = "Other"


SECTION_LABELS = tuple(SectionLabel)


@dataclass(frozen=True)
class LayoutBlock:
    """One text block with page position and font evidence."""

    text: str
    page: int
    x: float
    y: float
    width: float
    height: float
    font_size: float
    bold: bool
    font_name: str = ""

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("block text is empty after trimming")
        if self.page < 0:
            raise ValueError("page must be non-negative")
        if self.width <= 0 or self.height <= 0 or self.font_size <= 0:
            raise ValueError("width, height, and font_size must be positive")


@dataclass(frozen=True)
class LayoutDocument:
    source_id: str
    blocks: tuple[LayoutBlock, ...]

    @classmethod
    def from_blocks(cls, source_id: str, blocks) -> "LayoutDocument":
        """Build a document with blocks stably sorted into (page, y, x) reading order."""
        ordered = sorted(blocks, key=lambda b: (b.page, b.y, b.x))
        if not ordered:
            raise NoBlocksError("no blocks")
        return cls(source_id=source_id, blocks=tuple(ordered))

    def __len__(self):
        return len(self.blocks)


@dataclass
class Segment:
    """A contiguous run of block indices, labeled after classification."""

    block_indices: tuple[int, ...]
    headline_block: int | None = None
    label: SectionLabel | None = None
    confidence: float = 0.0

    def __post_init__(self):
        if not self.block_indices:
            raise ValueError("segment must cover at least one block")
        if any(nxt <= cur for cur, nxt in zip(self.block_indices, self.block_indices[1:])):
            raise ValueError("block indices must be strictly increasing")

    def headline_text(self, doc: LayoutDocument) -> str | None:
        if self.headline_block is None:
            return None
        return doc.blocks[self.headline_block].text

    def body_indices(self) -> tuple[int, ...]:
        return tuple(i for i in self.block_indices if i != self.headline_block)


@dataclass(frozen=True)
class SegmentationParams:
    """Headline-detection thresholds; scale-free in font units."""

    headline_font_ratio: float = 1.15
    headline_gap_ratio: float = 1.8
    bold_headline_max_chars: int = 40


# ---------------------------------------------------------------------------
# Import formats
# ---------------------------------------------------------------------------

def parse_block_table(text: str, source_id: str) -> LayoutDocument:
    """Parse the tab-separated block-table format.

    One block per line: page, x, y, width, height, font_size, bold(0|1),
    font_name (may be empty), text. `#`-prefixed lines are comments.
    """
    blocks = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != len(BLOCK_TABLE_COLUMNS):
            raise ParseError(
                f"expected {len(BLOCK_TABLE_COLUMNS)} tab-separated fields, found {len(parts)}",
                line=lineno,
            )
        page_s, x_s, y_s, w_s, h_s, fs_s, bold_s, font_name, block_text = parts
        try:
            page = int(page_s)
            x, y, w, h, fs = (float(v) for v in (x_s, y_s, w_s, h_s, fs_s))
        except ValueError as exc:
            raise ParseError(f"bad numeric field: {exc}", line=lineno) from None
        if bold_s not in ("0", "1"):
            raise ParseError(f"bold flag must be 0 or 1, found {bold_s!r}", line=lineno)
        if not block_text.strip():
            raise ParseError("empty block text", line=lineno)
        try:
            blocks.append(
                LayoutBlock(
                    text=block_text, page=page, x=x, y=y, width=w, height=h,
                    font_size=fs, bold=bold_s == "1", font_name=font_name,
                )
            )
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
    if not blocks:
        raise NoBlocksError("no blocks")
    return LayoutDocument.from_blocks(source_id, blocks)


_BLOCK_TAGS = {"p", "div", "li", "h1", "h2", "h3", "h4", "h5", "h6"}
_HEADER_SIZES = {"h1": 24.0, "h2": 20.0, "h3": 18.0, "h4": 16.0, "h5": 14.0, "h6": 13.0}
_DEFAULT_FONT_SIZE = 11.0
_FONT_SIZE_RX = re.compile(r"font-size\s*:\s*([0-9.]+)\s*(pt|px)?", re.I)
_FONT_WEIGHT_RX = re.compile(r"font-weight\s*:\s*(bold|[0-9]+)", re.I)


class _HtmlSubsetParser(HTMLParser):
    """Maps a simple HTML subset to layout blocks.

    Each block-level element becomes one block; `font-size`/`font-weight`
    style attributes (or h1..h6 defaults) set its font fields, and element
    order fixes the synthetic (y) positions.
    """

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.blocks: list[tuple[str, float, bool]] = []
        self._text_parts: list[str] = []
        self._font_size = _DEFAULT_FONT_SIZE
        self._bold = False
        self._inline_bold_depth = 0

    def _parse_style(self, tag, attrs):
        style = dict(attrs).get("style", "") or ""
        size = _HEADER_SIZES.get(tag, _DEFAULT_FONT_SIZE)
        bold = tag in _HEADER_SIZES
        m = _FONT_SIZE_RX.search(style)
        if m:
            try:
                size = float(m.group(1))
            except ValueError:
                raise ParseError(f"bad font-size value {m.group(1)!r}", line=self.getpos()[0]) from None
            if size <= 0:
                raise ParseError("font-size must be positive", line=self.getpos()[0])
        m = _FONT_WEIGHT_RX.search(style)
        if m:
            value = m.group(1).lower()
            bold = value == "bold" or (value.isdigit() and int(value) >= 600)
        return size, bold

    def _flush(self):
        text = re.sub(r"\s+", " ", "".join(self._text_parts)).strip()
        if text:
            self.blocks.append((text, self._font_size, self._bold))
        self._text_parts = []

    def handle_starttag(self, tag, attrs):
        if tag in _BLOCK_TAGS:
            self._flush()
            self._font_size, self._bold = self._parse_style(tag, attrs)
        elif tag in ("b", "strong"):
            self._inline_bold_depth += 1
        elif tag == "br":
            self._flush()

    def handle_endtag(self, tag):
        if tag in _BLOCK_TAGS:
            self._flush()
            self._font_size, self._bold = _DEFAULT_FONT_SIZE, False
        elif tag in ("b", "strong") and self._inline_bold_depth > 0:
            self._inline_bold_depth -= 1

    def handle_data(self, data):
        self._text_parts.append(data)

    def close(self):
        super().close()
        self._flush()


def parse_html_subset(text: str, source_id: str) -> LayoutDocument:
    parser = _HtmlSubsetParser()
    parser.feed(text)
    parser.close()
    blocks = []
    y = 72.0
    for block_text, font_size, bold in parser.blocks:
        height = round(font_size * 1.25, 2)
        blocks.append(
            LayoutBlock(
                text=block_text, page=0, x=72.0, y=y, width=451.0, height=height,
                font_size=font_size, bold=bold, font_name="",
            )
        )
        y += height + 4.0
    if not blocks:
        raise NoBlocksError("no blocks")
    return LayoutDocument.from_blocks(source_id, blocks)


LAYOUT_FORMATS = ("block-table", "html-subset")


def import_layout(data: bytes, format: str, source_id: str) -> LayoutDocument:
    """Decode `data` in the named format into a LayoutDocument in reading order."""
    if format not in LAYOUT_FORMATS:
        raise ParameterError(f"unknown layout format {format!r}; expected one of {LAYOUT_FORMATS}")
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise ParseError(f"input is not valid UTF-8: {exc}") from None
    if format == "block-table":
        return parse_block_table(text, source_id)
    return parse_html_subset(text, source_id)


# ---------------------------------------------------------------------------
# Segmentation
# ---------------------------------------------------------------------------

def _median_font(doc: LayoutDocument) -> float:
    return statistics.median(b.font_size for b in doc.blocks)


def _gaps_above(doc: LayoutDocument) -> list[float | None]:
    """Vertical whitespace above each block; None for the first block, inf on page breaks."""
    gaps: list[float | None] = []
    for i, block in enumerate(doc.blocks):
        if i == 0:
            gaps.append(None)
        elif block.page != doc.blocks[i - 1].page:
            gaps.append(float("inf"))
        else:
            prev = doc.blocks[i - 1]
            gaps.append(max(0.0, block.y - (prev.y + prev.height)))
    return gaps


def _median_gap(gaps) -> float:
    finite = [g for g in gaps if g is not None and g != float("inf")]
    return statistics.median(finite) if finite else 0.0


def detect_headlines(
    doc: LayoutDocument,
    params: SegmentationParams | None = None,
    keywords: frozenset[str] | None = None,
) -> list[bool]:
    """Apply the three headline rules to every block of `doc`.

    A block is a headline iff its font is >= 1.15x the body median, or it is
    bold and short, or it sits under an outsized whitespace gap and matches a
    section keyword. Ratios keep the rules invariant under font scaling.
    """
    params = params or SegmentationParams()
    if keywords is None:
        keywords = frozenset(load_default_gazetteers().section_keywords)
    median_font = _median_font(doc)
    gaps = _gaps_above(doc)
    gap_threshold = params.headline_gap_ratio * _median_gap(gaps)
    flags = []
    for block, gap in zip(doc.blocks, gaps):
        is_headline = block.font_size >= params.headline_font_ratio * median_font
        if not is_headline and block.bold and len(block.text.strip()) <= params.bold_headline_max_chars:
            is_headline = True
        if not is_headline and gap is not None and gap >= gap_threshold:
            is_headline = normalize_term(block.text) in keywords
        flags.append(is_headline)
    return flags


def segment_document(
    doc: LayoutDocument,
    params: SegmentationParams | None = None,
    keywords: frozenset[str] | None = None,
) -> list[Segment]:
    """Partition `doc` into segments, starting a new one at every headline.

    Blocks before the first headline form a leading segment with no headline.
    Always returns at least one segment; together the segments cover every
    block exactly once.
    """
    if not doc.blocks:
        raise NoBlocksError("no blocks")
    flags = detect_headlines(doc, params, keywords)
    boundaries = [i for i, f in enumerate(flags) if f]
    segments = []
    if not boundaries or boundaries[0] > 0:
        first_end = boundaries[0] if boundaries else len(doc.blocks)
        segments.append(Segment(block_indices=tuple(range(first_end))))
    for pos, start in enumerate(boundaries):
        end = boundaries[pos + 1] if pos + 1 < len(boundaries) else len(doc.blocks)
        segments.append(Segment(block_indices=tuple(range(start, end)), headline_block=start))
    return segments


# ---------------------------------------------------------------------------
# Section classifier
# ---------------------------------------------------------------------------

_TOKEN_RX = re.compile(r"[a-z0-9+#]+")
_BODY_TOKEN_CAP = 100
_STRUCTURAL_FEATURES = ("pos:relative", "font:ratio", "blocks:count")


def _tokenize(text: str) -> list[str]:
    return _TOKEN_RX.findall(text.lower())


def segment_feature_tokens(segment: Segment, doc: LayoutDocument) -> list[str]:
    """Bag-of-feature tokens: headline tokens plus the first 100 body tokens."""
    tokens = []
    headline = segment.headline_text(doc)
    if headline:
        tokens.extend("h:" + t for t in _tokenize(headline))
    body_tokens: list[str] = []
    for i in segment.body_indices():
        if len(body_tokens) >= _BODY_TOKEN_CAP:
            break
        body_tokens.extend(_tokenize(doc.blocks[i].text))
    tokens.extend("b:" + t for t in body_tokens[:_BODY_TOKEN_CAP])
    return tokens


def _structural_features(segment: Segment, doc: LayoutDocument) -> list[float]:
    first = segment.block_indices[0]
    relative_pos = first / max(1, len(doc.blocks) - 1)
    mean_font = sum(doc.blocks[i].font_size for i in segment.block_indices) / len(segment.block_indices)
    return [relative_pos, mean_font / _median_font(doc), len(segment.block_indices) / 10.0]


@dataclass(frozen=True)
class SectionClassifierModel:
    """Multinomial log-linear section classifier; immutable once trained."""

    vocabulary: dict[str, int]
    weights: np.ndarray          # |classes| x (|vocabulary| + structural)
    class_priors: np.ndarray
    feature_spec_version: str
    seed: int

    def to_payload(self) -> dict:
        return {
            "vocabulary": self.vocabulary,
            "weights": encode_array(self.weights),
            "class_priors": encode_array(self.class_priors),
            "feature_spec_version": self.feature_spec_version,
            "seed": self.seed,
            "classes": [c.value for c in SECTION_LABELS],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "SectionClassifierModel":
        return cls(
            vocabulary=dict(payload["vocabulary"]),
            weights=decode_array(payload["weights"]),
            class_priors=decode_array(payload["class_priors"]),
            feature_spec_version=payload["feature_spec_version"],
            seed=int(payload["seed"]),
        )


def _feature_vector(model_vocab: dict[str, int], segment: Segment, doc: LayoutDocument) -> tuple[np.ndarray, int]:
    n_vocab = len(model_vocab)
    x = np.zeros(n_vocab + len(_STRUCTURAL_FEATURES))
    hits = 0
    for token in segment_feature_tokens(segment, doc):
        idx = model_vocab.get(token)
        if idx is not None and x[idx] == 0.0:
            x[idx] = 1.0
            hits += 1
    x[n_vocab:] = _structural_features(segment, doc)
    return x, hits


def train_section_classifier(
    labeled: list[tuple[Segment, LayoutDocument, SectionLabel]],
    seed: int,
    epochs: int = 300,
    learning_rate: float = 0.5,
    l2: float = 1e-4,
) -> SectionClassifierModel:
    """Train the softmax section classifier with full-batch gradient steps.

    Deterministic for fixed inputs and seed: zero-initialized weights, a fixed
    epoch count, and a vocabulary sorted lexicographically.
    """
    if not labeled:
        raise TrainingError("empty training set")
    present = {label for _, _, label in labeled}
    missing = [c.value for c in SECTION_LABELS if c not in present]
    if missing:
        raise TrainingError(f"training data is missing classes: {', '.join(missing)}")

    vocab_terms = sorted({t for seg, doc, _ in labeled for t in segment_feature_tokens(seg, doc)})
    vocabulary = {term: i for i, term in enumerate(vocab_terms)}
    n_features = len(vocabulary) + len(_STRUCTURAL_FEATURES)
    class_index = {c: i for i, c in enumerate(SECTION_LABELS)}

    X = np.zeros((len(labeled), n_features))
    y = np.zeros(len(labeled), dtype=np.intp)
    for row, (seg, doc, label) in enumerate(labeled):
        X[row], _ = _feature_vector(vocabulary, seg, doc)
        y[row] = class_index[label]

    priors = np.bincount(y, minlength=len(SECTION_LABELS)).astype(float) / len(labeled)
    W = np.zeros((len(SECTION_LABELS), n_features))
    onehot = np.zeros((len(labeled), len(SECTION_LABELS)))
    onehot[np.arange(len(labeled)), y] = 1.0
    for _ in range(epochs):
        logits = X @ W.T
        logits -= logits.max(axis=1, keepdims=True)
        probs = np.exp(logits)
        probs /= probs.sum(axis=1, keepdims=True)
        grad = (probs - onehot).T @ X / len(labeled) + l2 * W
        W -= learning_rate * grad

    return SectionClassifierModel(
        vocabulary=vocabulary,
        weights=W,
        class_priors=priors,
        feature_spec_version=FEATURE_SPEC_VERSION,
        seed=seed,
    )


def classify_section(
    model: SectionClassifierModel,
    segment: Segment,
    doc: LayoutDocument,
    gazetteers=None,
) -> tuple[SectionLabel, float]:
    """Label one segment.

    A headline whose normalized text equals a canonical section keyword wins
    outright with confidence 1.0; otherwise the classifier decides, falling
    back to class priors when no vocabulary feature fires.
    """
    if model.feature_spec_version != FEATURE_SPEC_VERSION:
        raise IncompatibleModelError(
            f"model feature spec {model.feature_spec_version!r} != library {FEATURE_SPEC_VERSION!r}"
        )
    gaz = gazetteers or load_default_gazetteers()
    headline = segment.headline_text(doc)
    if headline is not None:
        label_name = gaz.section_keywords.get(normalize_term(headline))
        if label_name is not None:
            return SectionLabel(label_name), 1.0

    x, hits = _feature_vector(model.vocabulary, segment, doc)
    if hits == 0:
        best = int(np.argmax(model.class_priors))
        return SECTION_LABELS[best], float(model.class_priors[best])
    logits = model.weights @ x
    logits -= logits.max()
    probs = np.exp(logits)
    probs /= probs.sum()
    best = int(np.argmax(probs))
    return SECTION_LABELS[best], float(probs[best])


def classify_segments(
    model: SectionClassifierModel,
    segments: list[Segment],
    doc: LayoutDocument,
    gazetteers=None,
) -> list[Segment]:
    """Classify every segment, returning labeled copies in order."""
    labeled = []
    for seg in segments:
        label, confidence = classify_section(model, seg, doc, gazetteers)
        labeled.append(replace(seg, label=label, confidence=confidence))
    return labeled
