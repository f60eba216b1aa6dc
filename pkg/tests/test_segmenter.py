import math
from collections import Counter

import numpy as np
import pytest

from topictiler.evaluation import Segmentation, random_baseline_error, segmentation_error
from topictiler.lexicon import Lexicon, tokenize
from topictiler.models import SegmenterConfig
from topictiler.segmenter import (
    Boundary, SimilarityCurve, WeightedVector, Window, detect_boundaries, dice_similarity,
    filter_boundaries, make_windows, segment, segment_document, smooth_curve, term_of, weight_windows
)
from topictiler.synth import synthesize_block_documents


def words(n):
    return tokenize(" ".join(f"w{i}" for i in range(n)), Lexicon.empty())


def window(*terms):
    return Window(0, (0, 0), (0, 0), Counter(terms))


def vector(*weights):
    return WeightedVector(tuple(f"t{i}" for i in range(len(weights))), np.array(weights, dtype=float))


@pytest.mark.parametrize("n_tokens, sizes", [(100, [25, 25, 25, 25]), (10, [10]), (26, [25, 1]), (0, [])])
def test_make_windows_partition(n_tokens, sizes):
    windows = make_windows(words(n_tokens), 25)
    assert [len(w) for w in windows] == sizes
    assert [w.index for w in windows] == list(range(len(sizes)))


def test_make_windows_rejects_zero_size():
    with pytest.raises(ValueError):
        make_windows(words(3), 0)


def test_term_prefers_unique_lemma(sample_lexicon):
    tokens = tokenize("Cats barks Unknown", sample_lexicon)
    assert [term_of(t) for t in tokens] == ["cat", "bark", "unknown"]


def test_weights():
    ln2 = weight_windows([window("a"), window("b")])
    assert ln2[0].as_dict() == {"a": pytest.approx(math.log(2))}

    vectors = weight_windows([window("a", "a", "z"), window("z"), window("z"), window("z")])
    assert vectors[0].as_dict() == {"a": pytest.approx(2 * math.log(4), abs=1e-4)}
    assert all(v.as_dict() == {} for v in vectors[1:])


def test_dice_examples():
    assert dice_similarity(vector(1, 2), vector(1, 2)) == pytest.approx(1.0)
    assert dice_similarity(vector(1, 0), vector(0, 3)) == 0.0
    assert dice_similarity(vector(1, 0), vector(1, 1)) == pytest.approx(2 / 3)
    assert dice_similarity(vector(0, 0), vector(0, 0)) == 0.0


def test_dice_product_variant():
    assert dice_similarity(vector(1, 0), vector(1, 1), product=True) == pytest.approx(1.0)
    assert dice_similarity(vector(2, 0), vector(2, 0), product=True) == pytest.approx(0.5)


def test_dice_symmetric_and_bounded():
    rng = np.random.default_rng(3)
    for _ in range(100):
        u = vector(*rng.random(6) * (rng.random(6) > 0.4))
        v = vector(*rng.random(6) * (rng.random(6) > 0.4))
        value = dice_similarity(u, v)
        assert 0.0 <= value <= 1.0 + 1e-12
        assert value == pytest.approx(dice_similarity(v, u))


def test_dice_vocabulary_mismatch():
    with pytest.raises(ValueError):
        dice_similarity(vector(1.0), vector(1.0, 2.0))


def test_smoothing_examples():
    line = SimilarityCurve(np.array([0.1, 0.2, 0.3, 0.4]))
    np.testing.assert_allclose(smooth_curve(line, 0.3, 5).values, line.values)

    peak = smooth_curve(SimilarityCurve(np.array([0.0, 1.0, 0.0])), 0.5, 1)
    np.testing.assert_allclose(peak.values, [0.0, 0.5, 0.0])

    values = np.array([0.3, 0.9, 0.1])
    assert np.array_equal(smooth_curve(SimilarityCurve(values), 0.5, 0).values, values)


def test_smoothing_updates_in_parallel():
    smoothed = smooth_curve(SimilarityCurve(np.array([0.0, 1.0, 1.0, 0.0])), 1.0, 1)
    np.testing.assert_allclose(smoothed.values, [0.0, 0.5, 0.5, 0.0])


def test_smoothing_trace_has_every_iteration():
    smoothed = smooth_curve(SimilarityCurve(np.array([0.2, 0.8, 0.1, 0.5])), 0.5, 3)
    assert len(smoothed.smoothing_trace) == 4
    assert np.array_equal(smoothed.smoothing_trace[-1], smoothed.values)


def test_smoothing_contracts_second_difference():
    rng = np.random.default_rng(11)
    for _ in range(50):
        values = rng.random(rng.integers(3, 30))
        for step in (0.25, 0.5, 1.0):
            previous = values
            for snapshot in smooth_curve(SimilarityCurve(values), step, 4).smoothing_trace[1:]:
                assert np.abs(np.diff(snapshot, 2)).max() <= np.abs(np.diff(previous, 2)).max() + 1e-12
                assert snapshot[0] == values[0] and snapshot[-1] == values[-1]
                previous = snapshot


def test_bad_smoothing_parameters():
    curve = SimilarityCurve(np.array([0.0, 1.0, 0.0]))
    with pytest.raises(ValueError):
        smooth_curve(curve, 0.0, 1)
    with pytest.raises(ValueError):
        smooth_curve(curve, 0.5, -1)


def test_detect_boundaries_examples():
    assert detect_boundaries(SimilarityCurve(np.array([0.1, 0.2, 0.5, 0.9]))) == []

    (single,) = detect_boundaries(SimilarityCurve(np.array([0.8, 0.2, 0.9])))
    assert single.gap_index == 1
    assert single.relevance == pytest.approx(0.65)

    found = detect_boundaries(SimilarityCurve(np.array([0.5, 0.4, 0.45, 0.3, 0.6])))
    assert [b.gap_index for b in found] == [1, 3]
    assert [b.relevance for b in found] == pytest.approx([0.075, 0.225])


def test_plateau_minimum_reported_once_at_left_end():
    found = detect_boundaries(SimilarityCurve(np.array([0.9, 0.2, 0.2, 0.2, 0.7])))
    assert [b.gap_index for b in found] == [1]
    assert found[0].relevance == pytest.approx(0.6)


def test_boundaries_are_interior_minima():
    rng = np.random.default_rng(5)
    for _ in range(50):
        values = rng.random(rng.integers(1, 25))
        found = detect_boundaries(SimilarityCurve(values))
        assert len(found) <= max(len(values) - 2, 0)
        for b in found:
            assert 0 < b.gap_index < len(values) - 1
            assert values[b.gap_index] < values[b.gap_index - 1]
            assert b.relevance >= 0


def test_filter_boundaries():
    found = detect_boundaries(SimilarityCurve(np.array([0.5, 0.4, 0.45, 0.3, 0.6])))
    assert filter_boundaries(found, min_relevance=0) == found
    assert [b.gap_index for b in filter_boundaries(found, max_count=1)] == [3]
    assert [b.gap_index for b in filter_boundaries(found, min_relevance=0.1)] == [3]
    assert filter_boundaries([], 0.5, 2) == []


def test_filter_keeps_position_order():
    boundaries = [Boundary(1, 0.2), Boundary(4, 0.9), Boundary(7, 0.5)]
    assert [b.gap_index for b in filter_boundaries(boundaries, max_count=2)] == [4, 7]


def test_short_document_is_one_segment():
    tokens = words(10)
    segments = segment(" ".join(t.surface for t in tokens), Lexicon.empty(), SegmenterConfig(window_size=25))
    assert len(segments) == 1
    assert (segments[0].token_start, segments[0].token_end) == (0, 10)


def test_fully_stopped_text_is_one_segment():
    lexicon = Lexicon.empty(stoplist=["the", "of"])
    result = segment_document("the of the of the", lexicon, SegmenterConfig(window_size=2))
    assert result.windows == []
    assert len(result.segments) == 1
    assert len(result.segments[0]) == 5


def test_boundary_offsets_skip_stopwords(sample_lexicon):
    text = "the cat and the dog " * 6 + "the car and the truck " * 6
    result = segment_document(text, sample_lexicon, SegmenterConfig(window_size=4, iterations=0))
    for boundary in result.candidates:
        token = result.tokens[boundary.token_offset]
        assert not token.is_stopword
        assert boundary.char_offset == token.start


def test_two_disjoint_documents_split_at_junction():
    documents = synthesize_block_documents(2, words_per_block=200, vocabulary_size=5, seed=4)
    config = SegmenterConfig(window_size=40, iterations=0, min_relevance=0.3)
    result = segment_document("\n\n".join(documents), Lexicon.empty(), config)
    assert len(result.boundaries) == 1
    assert abs(result.boundaries[0].token_offset - 200) <= 40


@pytest.mark.parametrize("n_blocks", [5, 10])
@pytest.mark.parametrize("window_size", [25, 40, 60])
def test_junction_recovery_with_known_count(n_blocks, window_size):
    """The boundary count is supplied through max_boundaries; error stays within a quarter of random."""
    documents = synthesize_block_documents(n_blocks, words_per_block=240, vocabulary_size=10, seed=n_blocks)
    config = SegmenterConfig(window_size=window_size, max_boundaries=n_blocks - 1)
    result = segment_document("\n\n".join(documents), Lexicon.empty(), config)

    junctions = [240 * k for k in range(1, n_blocks)]
    offsets = [b.token_offset for b in result.boundaries]
    assert len(offsets) == n_blocks - 1
    for junction, offset in zip(junctions, offsets):
        assert abs(offset - junction) <= window_size

    real = Segmentation(240 * n_blocks, tuple(junctions))
    found = Segmentation(240 * n_blocks, tuple(offsets))
    baseline = random_baseline_error(real, n_blocks - 1, trials=1000, seed=1)
    assert segmentation_error(real, found) <= 0.25 * baseline


@pytest.mark.parametrize("n_blocks", [5, 10])
def test_relevance_threshold_finds_every_junction(n_blocks):
    """No boundary count given: the relevance threshold alone keeps one boundary per junction."""
    documents = synthesize_block_documents(n_blocks, words_per_block=240, vocabulary_size=5, seed=n_blocks)
    config = SegmenterConfig(window_size=40, iterations=1, min_relevance=0.25)
    result = segment_document("\n\n".join(documents), Lexicon.empty(), config)

    junctions = [240 * k for k in range(1, n_blocks)]
    offsets = [b.token_offset for b in result.boundaries]
    assert len(offsets) == n_blocks - 1
    for junction, offset in zip(junctions, offsets):
        assert abs(offset - junction) <= 40

    real = Segmentation(240 * n_blocks, tuple(junctions))
    found = Segmentation(240 * n_blocks, tuple(offsets))
    assert segmentation_error(real, found) <= 0.25 * random_baseline_error(real, n_blocks - 1, trials=1000, seed=1)


def test_segmentation_is_deterministic():
    text = "\n\n".join(synthesize_block_documents(3, seed=9))
    first = segment_document(text, Lexicon.empty(), SegmenterConfig(window_size=30))
    second = segment_document(text, Lexicon.empty(), SegmenterConfig(window_size=30))
    assert first.boundaries == second.boundaries
    assert np.array_equal(first.curve.values, second.curve.values)
