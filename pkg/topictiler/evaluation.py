"""
Evaluation of segmentations and extracted concepts.

Segmentations are compared through the segment indices of every word:
for each pair of words the distance in segments is taken in both
segmentations and the absolute differences are averaged.

Extracted concepts are compared with reference concepts through a
normalized Leacock-Chodorow similarity read as a match probability, from
which expected precision, recall, F-measure and accuracy follow.
"""

import logging
import math
import random
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from topictiler.errors import EvaluationError, SegmentationMismatch, UndefinedScoreError
from topictiler.lexicon import Lexicon, tokenize
from topictiler.taxonomy import ConceptDag, lch_similarity

logger = logging.getLogger("topictiler.evaluation")


@dataclass(frozen=True)
class Segmentation:
    """Word count plus boundary offsets; a boundary is the number of words before it"""
    word_count: int
    boundaries: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.word_count < 0:
            raise EvaluationError("word count must be >= 0")
        ordered = tuple(sorted(self.boundaries))
        if len(set(ordered)) != len(ordered):
            raise EvaluationError("duplicate boundary offsets")
        for offset in ordered:
            if not 1 <= offset <= self.word_count - 1:
                raise EvaluationError(f"boundary {offset} outside 1..{self.word_count - 1}")
        object.__setattr__(self, "boundaries", ordered)

    @property
    def segment_count(self) -> int:
        return len(self.boundaries) + 1 if self.word_count else 0


def position_vector(seg: Segmentation) -> np.ndarray:
    """1-based segment index of every word"""
    words = np.arange(seg.word_count)
    return 1 + np.searchsorted(np.asarray(seg.boundaries, dtype=int), words, side="right")


def position_matrix(seg: Segmentation) -> np.ndarray:
    """M[j, i] = |D_j - D_i| for i < j, zero on and above the diagonal"""
    d = position_vector(seg)
    return np.tril(np.abs(d[:, None] - d[None, :]), k=-1)


def segmentation_error(real: Segmentation, found: Segmentation) -> float:
    """Mean over word pairs of | |R_j - R_i| - |F_j - F_i| |"""
    if real.word_count != found.word_count:
        raise SegmentationMismatch(
            f"segmentations cover {real.word_count} and {found.word_count} words"
        )
    n = real.word_count
    if n < 2:
        return 0.0
    # Both vectors are non-decreasing, so each entry equals |X_j - X_i| with X = D_r - D_f
    x = np.sort(position_vector(real) - position_vector(found))
    ranks = 2 * np.arange(n) - (n - 1)
    total = int(np.dot(x, ranks))
    return total / (n * (n - 1) / 2)


def random_baseline_error(real: Segmentation, n_boundaries: int, trials: int = 1000,
                          seed: Optional[int] = 0) -> float:
    """Mean error of random segmentations with ``n_boundaries`` boundaries"""
    candidates = real.word_count - 1
    if n_boundaries > max(candidates, 0):
        raise EvaluationError(f"cannot place {n_boundaries} boundaries in {real.word_count} words")
    rng = np.random.default_rng(seed)
    errors = []
    for _ in range(trials):
        chosen = rng.choice(candidates, size=n_boundaries, replace=False) + 1 if n_boundaries else []
        errors.append(segmentation_error(real, Segmentation(real.word_count, tuple(int(b) for b in chosen))))
    return float(np.mean(errors)) if errors else 0.0


def match_probability(taxonomy: ConceptDag, c: str, C: str, hypernym_only: bool = False) -> float:
    """Similarity divided by its maximum, ln(2D)"""
    return lch_similarity(taxonomy, c, C, hypernym_only) / math.log(2 * taxonomy.max_depth)


@dataclass
class MatchProbabilities:
    produced: List[Tuple[str, float]]  # sorted by descending probability
    reference: List[Tuple[str, float]]
    pair_matrix: Optional[np.ndarray] = None  # rows follow the produced input order, columns the reference

    @classmethod
    def from_marginals(cls, produced: Iterable[Tuple[str, float]],
                       reference: Iterable[Tuple[str, float]]) -> "MatchProbabilities":
        return cls(_by_probability(produced), _by_probability(reference))

    @property
    def produced_probabilities(self) -> np.ndarray:
        return np.array([p for _, p in self.produced], dtype=float)

    @property
    def reference_probabilities(self) -> np.ndarray:
        return np.array([p for _, p in self.reference], dtype=float)


def _by_probability(pairs: Iterable[Tuple[str, float]]) -> List[Tuple[str, float]]:
    return sorted(pairs, key=lambda pair: -pair[1])


def marginals_from_pairs(pair_matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """p(c_i) = 1 - prod_k (1 - p(c_i|C_k)) and dually for the reference side"""
    complement = 1.0 - np.asarray(pair_matrix, dtype=float)
    return 1.0 - complement.prod(axis=1), 1.0 - complement.prod(axis=0)


def aggregate_probabilities(prod: Sequence[str], ref: Sequence[str], taxonomy: ConceptDag,
                            hypernym_only: bool = False) -> MatchProbabilities:
    prod = list(dict.fromkeys(prod))
    ref = list(dict.fromkeys(ref))
    if not prod or not ref:
        raise UndefinedScoreError("precision and recall need non-empty produced and reference lists")
    pairs = np.array([[match_probability(taxonomy, c, C, hypernym_only) for C in ref] for c in prod])
    p_prod, p_ref = marginals_from_pairs(pairs)
    return MatchProbabilities(
        produced=_by_probability(zip(prod, p_prod.tolist())),
        reference=_by_probability(zip(ref, p_ref.tolist())),
        pair_matrix=pairs,
    )


def precision_recall(mp: MatchProbabilities) -> Tuple[float, float]:
    if not mp.produced or not mp.reference:
        raise UndefinedScoreError("precision and recall need non-empty produced and reference lists")
    return float(mp.produced_probabilities.mean()), float(mp.reference_probabilities.mean())


def f_measure(precision: float, recall: float, b: float = 1.0) -> float:
    if b <= 0:
        raise ValueError("b must be > 0")
    if precision == 0.0 and recall == 0.0:
        return 0.0
    return (b * b + 1) * precision * recall / (b * b * precision + recall)


def accuracy(mp: MatchProbabilities) -> float:
    """Probability that every produced concept is correct"""
    if not mp.produced:
        raise UndefinedScoreError("accuracy needs a non-empty produced list")
    return float(np.prod(mp.produced_probabilities))


@dataclass
class PRPoint:
    theta: float
    precision: float
    recall: float
    f_measure: float
    accuracy: float
    n_produced: int = 0  # surviving produced concepts
    n_reference: int = 0  # surviving reference concepts

    @property
    def defined(self) -> bool:
        return not math.isnan(self.precision)


def threshold_sweep(mp: MatchProbabilities, thetas: Iterable[float], b: float = 1.0) -> List[PRPoint]:
    """Precision and recall keeping only concepts with probability above each threshold.

    Precision averages over the surviving produced concepts; recall sums the
    surviving reference probabilities over the full reference size. A
    threshold of 0 keeps every concept, zero probabilities included, and so
    matches ``precision_recall`` and ``accuracy``. A threshold that leaves
    no produced concept yields an undefined point.
    """
    produced = mp.produced_probabilities
    reference = mp.reference_probabilities
    if not len(reference):
        raise UndefinedScoreError("recall needs a non-empty reference list")
    points = []
    for theta in thetas:
        if not 0.0 <= theta < 1.0:
            raise ValueError(f"threshold {theta} outside [0, 1)")
        if theta == 0.0:
            kept_prod, kept_ref = produced, reference
        else:
            kept_prod = produced[produced > theta]
            kept_ref = reference[reference > theta]
        recall = float(kept_ref.sum() / len(reference))
        if not len(kept_prod):
            logger.warning("No produced concept above threshold %.4f, point undefined", theta)
            points.append(PRPoint(theta, math.nan, recall, math.nan, math.nan, 0, len(kept_ref)))
            continue
        precision = float(kept_prod.mean())
        points.append(PRPoint(
            theta=theta,
            precision=precision,
            recall=recall,
            f_measure=f_measure(precision, recall, b),
            accuracy=float(np.prod(kept_prod)),
            n_produced=len(kept_prod),
            n_reference=len(kept_ref),
        ))
    return points


def default_thetas(step: float = 0.01) -> List[float]:
    count = int(round(1.0 / step))
    return [round(i * step, 10) for i in range(count)]


def average_sweeps(sweeps: Sequence[Sequence[PRPoint]]) -> List[PRPoint]:
    """Macro-average per threshold, skipping undefined values"""
    if not sweeps:
        return []
    averaged = []
    for column in zip(*sweeps):
        def mean(values):
            values = np.array(values, dtype=float)
            values = values[~np.isnan(values)]
            return float(values.mean()) if len(values) else math.nan

        averaged.append(PRPoint(
            theta=column[0].theta,
            precision=mean([p.precision for p in column]),
            recall=mean([p.recall for p in column]),
            f_measure=mean([p.f_measure for p in column]),
            accuracy=mean([p.accuracy for p in column]),
            n_produced=sum(p.n_produced for p in column),
            n_reference=sum(p.n_reference for p in column),
        ))
    return averaged


def evaluate_exact_match(prod: Iterable[str], ref: Iterable[str], b: float = 1.0) -> Tuple[float, float, float]:
    produced, reference = set(prod), set(ref)
    common = len(produced & reference)
    precision = common / len(produced) if produced else 0.0
    recall = common / len(reference) if reference else 0.0
    return precision, recall, f_measure(precision, recall, b)


@dataclass
class SyntheticText:
    text: str
    segmentation: Segmentation
    doc_indices: List[int] = field(default_factory=list)  # source documents, in order


def synthesize_eval_corpus(docs: Sequence[str], group_size: int, seed: Optional[int],
                           lexicon: Optional[Lexicon] = None) -> SyntheticText:
    """Concatenate ``group_size`` randomly chosen documents; boundaries fall at the junctions"""
    if group_size < 2:
        raise EvaluationError("group_size must be >= 2")
    if len(docs) < group_size:
        raise EvaluationError(f"need at least {group_size} documents, got {len(docs)}")
    lexicon = lexicon or Lexicon.empty()
    rng = random.Random(seed)
    chosen = rng.sample(range(len(docs)), group_size)

    boundaries = []
    word_count = 0
    for position, index in enumerate(chosen):
        words = len(tokenize(docs[index], lexicon))
        if not words:
            raise EvaluationError(f"document {index} contains no words")
        if position:
            boundaries.append(word_count)
        word_count += words
    text = "\n\n".join(docs[i] for i in chosen)
    return SyntheticText(text, Segmentation(word_count, tuple(boundaries)), chosen)
