"""Topic segmentation and concept-hierarchy annotation of documents"""

from topictiler.entities import (
    InflectionRule, LemmaEntry, LemmaReading, Token, ConceptNode, PathStats, Segment
)
from topictiler.errors import (
    TopicTilerError, ConfigError, LexiconError, TaxonomyError, CycleError,
    DuplicateConceptError, UnknownConceptError, OrphanConceptError, NothingToExtract,
    InvalidCutError, OracleRefusal, EvaluationError, SegmentationMismatch, UndefinedScoreError
)
from topictiler.models import SegmenterConfig, ExtractionConfig, RunConfig
from topictiler.lexicon import Lexicon, build_lexicon, tokenize, filter_stopwords
from topictiler.taxonomy import (
    ConceptDag, load_taxonomy, leaf_path_count, compute_path_stats, build_leaf_distance_table,
    shortest_node_path, lch_similarity, describe_taxonomy
)
from topictiler.segmenter import (
    make_windows, weight_windows, dice_similarity, smooth_curve, detect_boundaries,
    filter_boundaries, segment, segment_document
)
from topictiler.extractor import (
    bag_of_concepts, build_spanning_dag, score_s1, score_s2, combine_scores, extract_cut,
    cut_score, count_cuts, brute_force_best_cut, annotate
)
from topictiler.evaluation import (
    Segmentation, position_vector, segmentation_error, match_probability,
    aggregate_probabilities, precision_recall, f_measure, accuracy, threshold_sweep,
    evaluate_exact_match, synthesize_eval_corpus
)
from topictiler.parsers.lexicon_parser import LexiconParser, load_lexicon
from topictiler.parsers.taxonomy_parser import TaxonomyParser

__all__ = [
    'InflectionRule', 'LemmaEntry', 'LemmaReading', 'Token', 'ConceptNode', 'PathStats', 'Segment',
    'TopicTilerError', 'ConfigError', 'LexiconError', 'TaxonomyError', 'CycleError',
    'DuplicateConceptError', 'UnknownConceptError', 'OrphanConceptError', 'NothingToExtract',
    'InvalidCutError', 'OracleRefusal', 'EvaluationError', 'SegmentationMismatch', 'UndefinedScoreError',
    'SegmenterConfig', 'ExtractionConfig', 'RunConfig',
    'Lexicon', 'build_lexicon', 'tokenize', 'filter_stopwords',
    'ConceptDag', 'load_taxonomy', 'leaf_path_count', 'compute_path_stats', 'build_leaf_distance_table',
    'shortest_node_path', 'lch_similarity', 'describe_taxonomy',
    'make_windows', 'weight_windows', 'dice_similarity', 'smooth_curve', 'detect_boundaries',
    'filter_boundaries', 'segment', 'segment_document',
    'bag_of_concepts', 'build_spanning_dag', 'score_s1', 'score_s2', 'combine_scores', 'extract_cut',
    'cut_score', 'count_cuts', 'brute_force_best_cut', 'annotate',
    'Segmentation', 'position_vector', 'segmentation_error', 'match_probability',
    'aggregate_probabilities', 'precision_recall', 'f_measure', 'accuracy', 'threshold_sweep',
    'evaluate_exact_match', 'synthesize_eval_corpus',
    'LexiconParser', 'load_lexicon', 'TaxonomyParser',
]
