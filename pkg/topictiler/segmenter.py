"""
TextTiling segmentation.

The non-stopword token stream is cut into fixed-size windows, each window
becomes a tf-idf weighted term vector, adjacent windows are compared with
the Dice coefficient and the resulting curve is smoothed. Boundaries are
placed at the local minima of the smoothed curve and ranked by how deep
each minimum sits between its neighbouring maxima.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from topictiler.entities import Segment, Token
from topictiler.lexicon import Lexicon, filter_stopwords, tokenize
from topictiler.models import SegmenterConfig

logger = logging.getLogger("topictiler.segmenter")


@dataclass
class Window:
    index: int
    token_span: Tuple[int, int]  # first and last index in the filtered token stream, inclusive
    char_span: Tuple[int, int]
    counts: Counter  # term -> occurrences in this window

    def __len__(self) -> int:
        return self.token_span[1] - self.token_span[0] + 1


@dataclass
class WeightedVector:
    vocabulary: Tuple[str, ...]
    weights: np.ndarray

    def as_dict(self) -> dict:
        return {term: float(w) for term, w in zip(self.vocabulary, self.weights) if w != 0.0}


@dataclass
class SimilarityCurve:
    values: np.ndarray  # one value per gap between adjacent windows
    smoothing_trace: List[np.ndarray] = field(default_factory=list)  # snapshots, raw curve first

    def __len__(self) -> int:
        return len(self.values)


@dataclass
class Boundary:
    gap_index: int  # boundary lies between window gap_index and gap_index + 1
    relevance: float
    token_offset: int = 0  # index of the first token after the boundary in the full token list
    char_offset: int = 0


@dataclass
class SegmentationResult:
    tokens: List[Token]
    windows: List[Window]
    raw_curve: SimilarityCurve
    curve: SimilarityCurve
    candidates: List[Boundary]  # every detected minimum
    boundaries: List[Boundary]  # after filtering
    segments: List[Segment]

    @property
    def word_count(self) -> int:
        return len(self.tokens)


def term_of(token: Token) -> str:
    """The token's lemma if it has exactly one, else its surface, lowercased"""
    lemmas = {reading.lemma for reading in token.lemma_candidates}
    if len(lemmas) == 1:
        return next(iter(lemmas)).lower()
    return token.surface.lower()


def make_windows(tokens: Sequence[Token], window_size: int) -> List[Window]:
    if window_size < 1:
        raise ValueError("window_size must be >= 1")
    windows = []
    for index, first in enumerate(range(0, len(tokens), window_size)):
        chunk = tokens[first:first + window_size]
        windows.append(Window(
            index=index,
            token_span=(first, first + len(chunk) - 1),
            char_span=(chunk[0].start, chunk[-1].end),
            counts=Counter(term_of(t) for t in chunk),
        ))
    return windows


def weight_windows(windows: Sequence[Window]) -> List[WeightedVector]:
    """w_ij = g_ij * ln(N / df_j) over the shared vocabulary of all windows"""
    if not windows:
        return []
    vocabulary = tuple(sorted(set().union(*(w.counts for w in windows))))
    column = {term: j for j, term in enumerate(vocabulary)}
    counts = np.zeros((len(windows), len(vocabulary)))
    for i, window in enumerate(windows):
        for term, g in window.counts.items():
            counts[i, column[term]] = g

    document_frequency = (counts > 0).sum(axis=0)
    idf = np.log(len(windows) / np.maximum(document_frequency, 1))
    weights = counts * idf
    return [WeightedVector(vocabulary, row) for row in weights]


def dice_similarity(u: WeightedVector, v: WeightedVector, product: bool = False) -> float:
    if u.vocabulary != v.vocabulary:
        raise ValueError("vectors must share one vocabulary")
    numerator = 2.0 * float(np.dot(u.weights, v.weights))
    su, sv = float(np.dot(u.weights, u.weights)), float(np.dot(v.weights, v.weights))
    denominator = su * sv if product else su + sv
    if denominator == 0.0:
        return 0.0
    return numerator / denominator


def similarity_curve(vectors: Sequence[WeightedVector], product: bool = False) -> SimilarityCurve:
    values = np.array([dice_similarity(vectors[i], vectors[i + 1], product)
                       for i in range(len(vectors) - 1)], dtype=float)
    return SimilarityCurve(values)


def smooth_curve(curve: SimilarityCurve, step: float = 0.5, iterations: int = 2) -> SimilarityCurve:
    """Move every interior point a fraction ``step`` towards its neighbours' midpoint.

    All points of one iteration are updated together; endpoints stay fixed.
    """
    if not 0.0 < step <= 1.0:
        raise ValueError("step must lie in (0, 1]")
    if iterations < 0:
        raise ValueError("iterations must be >= 0")
    values = np.array(curve.values, dtype=float)
    trace = [values.copy()]
    for _ in range(iterations):
        if len(values) >= 3:
            midpoints = (values[:-2] + values[2:]) / 2.0
            values[1:-1] += step * (midpoints - values[1:-1])
        trace.append(values.copy())
    return SimilarityCurve(values, trace)


def _peak_left(values: np.ndarray, i: int) -> float:
    while i > 0 and values[i - 1] >= values[i]:
        i -= 1
    return float(values[i])


def _peak_right(values: np.ndarray, i: int) -> float:
    while i < len(values) - 1 and values[i + 1] >= values[i]:
        i += 1
    return float(values[i])


def detect_boundaries(curve: SimilarityCurve) -> List[Boundary]:
    """Boundaries at strict local minima; a flat minimum counts once, at its left end"""
    values = np.asarray(curve.values, dtype=float)
    boundaries = []
    i = 1
    while i < len(values) - 1:
        if values[i] >= values[i - 1]:
            i += 1
            continue
        j = i
        while j + 1 < len(values) and values[j + 1] == values[i]:
            j += 1
        if j + 1 < len(values) and values[j + 1] > values[i]:
            relevance = (_peak_left(values, i) + _peak_right(values, j)) / 2.0 - float(values[i])
            boundaries.append(Boundary(gap_index=i, relevance=relevance))
        i = j + 1
    return boundaries


def filter_boundaries(boundaries: Sequence[Boundary], min_relevance: Optional[float] = None,
                      max_count: Optional[int] = None) -> List[Boundary]:
    kept = [b for b in boundaries if min_relevance is None or b.relevance >= min_relevance]
    if max_count is not None and len(kept) > max_count:
        # Stable sort keeps the leftmost of equally relevant boundaries
        kept = sorted(kept, key=lambda b: -b.relevance)[:max_count]
    return sorted(kept, key=lambda b: b.gap_index)


def segments_from_offsets(tokens: Sequence[Token], offsets: Sequence[int]) -> List[Segment]:
    """Cut the token list before each offset; the segments cover every token"""
    if not tokens:
        return []
    edges = [0] + sorted(set(offsets)) + [len(tokens)]
    segments = []
    for start, end in zip(edges, edges[1:]):
        if start >= end:
            continue
        segments.append(Segment(len(segments), start, end, tokens[start].start, tokens[end - 1].end))
    return segments


def segment_document(text: str, lexicon: Lexicon, config: Optional[SegmenterConfig] = None) -> SegmentationResult:
    config = config or SegmenterConfig()
    tokens = tokenize(text, lexicon)
    kept_positions = [i for i, token in enumerate(tokens) if not lexicon.is_stopword(token.surface)]
    content = filter_stopwords(tokens, lexicon)

    windows = make_windows(content, config.window_size)
    raw = similarity_curve(weight_windows(windows), product=config.dice_product)
    smoothed = smooth_curve(raw, config.step, config.iterations)
    candidates = detect_boundaries(smoothed)

    located = []
    for boundary in candidates:
        first = windows[boundary.gap_index + 1].token_span[0]
        token_offset = kept_positions[first]
        located.append(replace(boundary, token_offset=token_offset, char_offset=tokens[token_offset].start))
    boundaries = filter_boundaries(located, config.min_relevance, config.max_boundaries)

    segments = segments_from_offsets(tokens, [b.token_offset for b in boundaries])
    logger.debug("Segmented %d tokens into %d windows, %d candidate and %d kept boundaries",
                 len(tokens), len(windows), len(candidates), len(boundaries))
    return SegmentationResult(tokens, windows, raw, smoothed, located, boundaries, segments)


def segment(text: str, lexicon: Lexicon, config: Optional[SegmenterConfig] = None) -> List[Segment]:
    return segment_document(text, lexicon, config).segments
