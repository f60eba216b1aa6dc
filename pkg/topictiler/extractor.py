"""
Concept extraction: bag of concepts, spanning sub-hierarchy and best cut.

A cut is a set of concepts such that every leaf path of the spanning DAG
(a downward path from a root to a bag concept) is covered by exactly one
selected concept. Its score is the average, over leaf paths, of the
combined score U of the covering concept. ``extract_cut`` finds the best
cut bottom-up in reverse topological order, choosing at each node between
selecting it and expanding it into its children.

A bag concept that also has bag concepts below it owns one extra leaf
path of its own, which it keeps covering when expanded.
"""

import itertools
import logging
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx

from topictiler.entities import Segment, Token
from topictiler.errors import InvalidCutError, NothingToExtract, OracleRefusal, UnknownConceptError
from topictiler.lexicon import Lexicon
from topictiler.models import ExtractionConfig, SegmenterConfig
from topictiler.segmenter import SegmentationResult, segment_document
from topictiler.taxonomy import ConceptDag

logger = logging.getLogger("topictiler.extractor")

ORACLE_MAX_NODES = 20


@dataclass
class BagEntry:
    lemmas: Set[str] = field(default_factory=set)
    positions: List[int] = field(default_factory=list)  # token indices
    count: int = 0


@dataclass
class BagOfConcepts:
    entries: Dict[str, BagEntry] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, concept_id: str) -> bool:
        return concept_id in self.entries

    def __iter__(self):
        return iter(self.entries)

    @classmethod
    def of(cls, concept_ids: Iterable[str]) -> "BagOfConcepts":
        bag = cls()
        for concept_id in concept_ids:
            entry = bag.entries.setdefault(concept_id, BagEntry())
            entry.count += 1
        return bag


@dataclass
class SpanningNode:
    concept: str
    covered_leaf_paths: int  # n_i
    in_bag: bool
    leaf_paths: Counter  # bag concept -> number of leaf paths from this node ending there
    s1: float = 0.0
    s2: float = 0.0
    u: float = 0.0
    anonymous: bool = False
    stored_score: float = 0.0  # best average score over this node's leaf paths
    expand: bool = False


@dataclass
class SpanningDag:
    taxonomy: ConceptDag
    bag: BagOfConcepts
    graph: nx.DiGraph  # super -> sub, restricted to bag concepts and their ancestors
    nodes: Dict[str, SpanningNode]
    roots: List[str]
    total_leaf_paths: int  # M

    @property
    def leaf_set(self) -> FrozenSet[str]:
        return frozenset(self.bag)

    def order(self) -> List[str]:
        """Topological order, ties broken by concept id"""
        return list(nx.lexicographical_topological_sort(self.graph))

    def is_tree(self) -> bool:
        return all(d <= 1 for _, d in self.graph.in_degree())


@dataclass
class CutItem:
    concept: str
    covered_leaf_paths: int
    leaf_paths: Counter  # bag concept -> covered paths ending there
    u: float
    headword: Optional[str] = None


@dataclass
class ScoredCut:
    selected: List[CutItem]
    score: float
    total_leaf_paths: int

    @classmethod
    def empty(cls) -> "ScoredCut":
        return cls([], 0.0, 0)

    @property
    def concepts(self) -> List[str]:
        return [item.concept for item in self.selected]


def _usable(concept_id: str, taxonomy: ConceptDag) -> bool:
    if concept_id not in taxonomy:
        logger.warning("Concept %s is not in the taxonomy, dropped", concept_id)
        return False
    if concept_id in taxonomy.orphans:
        logger.warning("Concept %s is an orphan, dropped", concept_id)
        return False
    if concept_id in taxonomy.anonymous:
        logger.debug("Anonymous concept %s dropped from the bag", concept_id)
        return False
    return True


def bag_of_concepts(tokens: Iterable[Token], taxonomy: ConceptDag, offset: int = 0) -> BagOfConcepts:
    """Collect the concepts of every reading of every token; no sense disambiguation"""
    bag = BagOfConcepts()
    rejected: Set[str] = set()
    for position, token in enumerate(tokens, start=offset):
        seen: Set[str] = set()
        for reading in token.lemma_candidates:
            for concept_id in reading.concept_ids:
                if concept_id in rejected:
                    continue
                if concept_id not in bag.entries and not _usable(concept_id, taxonomy):
                    rejected.add(concept_id)
                    continue
                entry = bag.entries.setdefault(concept_id, BagEntry())
                entry.lemmas.add(reading.lemma)
                if concept_id not in seen:
                    entry.positions.append(position)
                    entry.count += 1
                    seen.add(concept_id)
    return bag


def score_s1(covered_leaf_paths: int, total_leaf_paths: int) -> float:
    """Genericity: (n - 1) / (M - 1), 0 when M == 1"""
    if total_leaf_paths <= 1:
        return 0.0
    return (covered_leaf_paths - 1) / (total_leaf_paths - 1)


def score_s2(concept_id: str, taxonomy: ConceptDag) -> float:
    """Informativeness: one minus the normalized separation from the leaves"""
    return 1.0 - taxonomy.path_stats(concept_id).leaf_distance


def combine_scores(s1: float, s2: float, a: float) -> float:
    """Weighted geometric mean S1^(1-a) * S2^a, with 0^0 = 1"""
    if not 0.0 <= a <= 1.0:
        raise ValueError("a must lie in [0, 1]")
    return s1 ** (1.0 - a) * s2 ** a


def build_spanning_dag(bag: BagOfConcepts, taxonomy: ConceptDag,
                       config: Optional[ExtractionConfig] = None) -> SpanningDag:
    config = config or ExtractionConfig()
    for concept_id in bag:
        if concept_id not in taxonomy:
            raise UnknownConceptError(f"bag concept {concept_id!r} is not in the taxonomy")
    leaves = BagOfConcepts({c: e for c, e in bag.entries.items() if _usable(c, taxonomy)})
    if not leaves:
        raise NothingToExtract("bag of concepts is empty")

    members = set(leaves)
    for concept_id in leaves:
        members |= nx.ancestors(taxonomy.graph, concept_id)
    graph = taxonomy.graph.subgraph(members).copy()

    nodes: Dict[str, SpanningNode] = {}
    for concept_id in reversed(list(nx.lexicographical_topological_sort(graph))):
        in_bag = concept_id in leaves
        paths = Counter({concept_id: 1}) if in_bag else Counter()
        for child in graph.successors(concept_id):
            paths.update(nodes[child].leaf_paths)
        nodes[concept_id] = SpanningNode(
            concept=concept_id,
            covered_leaf_paths=sum(paths.values()),
            in_bag=in_bag,
            leaf_paths=paths,
            anonymous=concept_id in taxonomy.anonymous,
        )

    roots = sorted(n for n, d in graph.in_degree() if d == 0)
    total = sum(nodes[r].covered_leaf_paths for r in roots)
    for node in nodes.values():
        node.s1 = score_s1(node.covered_leaf_paths, total)
        node.s2 = score_s2(node.concept, taxonomy)
        node.u = combine_scores(node.s1, node.s2, config.a)

    logger.debug("Spanning DAG: %d concepts, %d bag concepts, %d leaf paths", len(nodes), len(leaves), total)
    return SpanningDag(taxonomy, leaves, graph, nodes, roots, total)


def extract_cut(dag: SpanningDag, config: Optional[ExtractionConfig] = None) -> ScoredCut:
    """Best cut by dynamic programming.

    A node is expanded when its local score does not exceed the average
    score of its children (ties expand). Anonymous concepts are always
    expanded.
    """
    config = config or ExtractionConfig()
    if not dag.nodes:
        raise NothingToExtract("spanning DAG is empty")

    order = dag.order()
    best_total: Dict[str, Fraction] = {}
    for concept_id in reversed(order):
        node = dag.nodes[concept_id]
        children = list(dag.graph.successors(concept_id))
        u = Fraction(node.u)
        select_total = u * node.covered_leaf_paths
        if not children:
            node.expand = False
            best_total[concept_id] = select_total
            node.stored_score = node.u
            continue

        if config.unweighted_average:
            parts = [dag.nodes[c].stored_score for c in children]
            if node.in_bag:
                parts.append(node.u)
            average = sum(Fraction(p) for p in parts) / len(parts)
            node.expand = node.anonymous or node.u <= average
            node.stored_score = float(average) if node.expand else node.u
            best_total[concept_id] = Fraction(node.stored_score) * node.covered_leaf_paths
            continue

        expand_total = (u if node.in_bag else Fraction(0)) + sum(best_total[c] for c in children)
        node.expand = node.anonymous or select_total <= expand_total
        best_total[concept_id] = expand_total if node.expand else select_total
        node.stored_score = float(best_total[concept_id] / node.covered_leaf_paths)

    return _collect_cut(dag, order)


def _collect_cut(dag: SpanningDag, order: List[str]) -> ScoredCut:
    """Walk down from the roots through expanded nodes, counting arrival paths"""
    reach = Counter({root: 1 for root in dag.roots})
    items: List[CutItem] = []
    for concept_id in order:
        arrivals = reach[concept_id]
        if not arrivals:
            continue
        node = dag.nodes[concept_id]
        if node.expand:
            for child in dag.graph.successors(concept_id):
                reach[child] += arrivals
            if node.in_bag:
                items.append(_item(dag, node, Counter({concept_id: arrivals})))
        else:
            leaf_paths = Counter({leaf: count * arrivals for leaf, count in node.leaf_paths.items()})
            items.append(_item(dag, node, leaf_paths))
    total = sum(Fraction(item.u) * item.covered_leaf_paths for item in items)
    return ScoredCut(items, float(total / dag.total_leaf_paths), dag.total_leaf_paths)


def _item(dag: SpanningDag, node: SpanningNode, leaf_paths: Counter) -> CutItem:
    return CutItem(
        concept=node.concept,
        covered_leaf_paths=sum(leaf_paths.values()),
        leaf_paths=leaf_paths,
        u=node.u,
        headword=dag.taxonomy.nodes[node.concept].headword,
    )


def cut_score(cut: ScoredCut, dag: SpanningDag) -> float:
    """Average U of the covering concept over all leaf paths; the cut must cover each exactly once"""
    covered = Counter()
    total = Fraction(0)
    for item in cut.selected:
        if item.concept not in dag.nodes:
            raise InvalidCutError(f"concept {item.concept!r} is not in the spanning DAG")
        if dag.nodes[item.concept].anonymous:
            raise InvalidCutError(f"anonymous concept {item.concept!r} cannot be selected")
        if item.covered_leaf_paths <= 0:
            raise InvalidCutError(f"concept {item.concept!r} covers no leaf path")
        covered.update(item.leaf_paths)
        total += Fraction(dag.nodes[item.concept].u) * item.covered_leaf_paths

    expected = Counter()
    for root in dag.roots:
        expected.update(dag.nodes[root].leaf_paths)
    if covered != expected:
        raise InvalidCutError(
            f"cut covers {sum(covered.values())} leaf paths, expected each of {dag.total_leaf_paths} exactly once"
        )
    return float(total / dag.total_leaf_paths)


def count_cuts(branching: int, depth: int) -> int:
    """Cuts of a complete tree: C(1) = 1, C(p) = C(p-1)^b + 1"""
    if branching < 1 or depth < 1:
        raise ValueError("branching and depth must be >= 1")
    count = 1
    for _ in range(depth - 1):
        count = count ** branching + 1
    return count


def _require_small_tree(dag: SpanningDag) -> None:
    if not dag.is_tree():
        raise OracleRefusal("exhaustive enumeration requires a tree")
    if len(dag.nodes) > ORACLE_MAX_NODES:
        raise OracleRefusal(f"exhaustive enumeration is limited to {ORACLE_MAX_NODES} concepts, got {len(dag.nodes)}")


Selection = Tuple[Tuple[str, bool], ...]  # (concept, covers only its own leaf path)


def enumerate_cuts(dag: SpanningDag) -> List[Selection]:
    """Every cut of a small tree"""
    _require_small_tree(dag)

    def cuts_below(concept_id: str) -> List[Selection]:
        node = dag.nodes[concept_id]
        options = [] if node.anonymous else [((concept_id, False),)]
        children = sorted(dag.graph.successors(concept_id))
        if children:
            own = ((concept_id, True),) if node.in_bag else ()
            for combo in itertools.product(*(cuts_below(c) for c in children)):
                options.append(own + tuple(itertools.chain.from_iterable(combo)))
        return options

    return [tuple(itertools.chain.from_iterable(combo))
            for combo in itertools.product(*(cuts_below(r) for r in dag.roots))]


def _selection_items(dag: SpanningDag, selection: Selection) -> List[CutItem]:
    items = []
    for concept_id, self_only in selection:
        node = dag.nodes[concept_id]
        leaf_paths = Counter({concept_id: 1}) if self_only else Counter(node.leaf_paths)
        items.append(_item(dag, node, leaf_paths))
    return items


def brute_force_best_cut(dag: SpanningDag, config: Optional[ExtractionConfig] = None) -> ScoredCut:
    """Score every cut of a tree with at most twenty concepts and keep the best"""
    best_total, best_selection = None, None
    for selection in enumerate_cuts(dag):
        total = Fraction(0)
        for concept_id, self_only in selection:
            node = dag.nodes[concept_id]
            total += Fraction(node.u) * (1 if self_only else node.covered_leaf_paths)
        if best_total is None or total > best_total:
            best_total, best_selection = total, selection
    items = _selection_items(dag, best_selection)
    return ScoredCut(items, float(best_total / dag.total_leaf_paths), dag.total_leaf_paths)


def extract_topics(tokens: List[Token], taxonomy: ConceptDag, config: Optional[ExtractionConfig] = None,
                   offset: int = 0) -> Tuple[Optional[SpanningDag], ScoredCut]:
    """Best cut for a run of tokens; stopwords are skipped, positions index the full token list"""
    config = config or ExtractionConfig()
    positions = [offset + i for i, t in enumerate(tokens) if not t.is_stopword]
    bag = bag_of_concepts([t for t in tokens if not t.is_stopword], taxonomy)
    for entry in bag.entries.values():
        entry.positions = [positions[p] for p in entry.positions]
    if not bag:
        return None, ScoredCut.empty()
    dag = build_spanning_dag(bag, taxonomy, config)
    return dag, extract_cut(dag, config)


def annotate_result(result: SegmentationResult, taxonomy: ConceptDag,
                    config: Optional[ExtractionConfig] = None) -> List[Tuple[Segment, ScoredCut]]:
    annotated = []
    for seg in result.segments:
        _, cut = extract_topics(result.tokens[seg.token_start:seg.token_end], taxonomy, config, seg.token_start)
        if not cut.selected:
            logger.info("Segment %d has no concepts", seg.index)
        annotated.append((seg, cut))
    return annotated


def annotate(text: str, lexicon: Lexicon, taxonomy: ConceptDag,
             seg_config: Optional[SegmenterConfig] = None,
             ext_config: Optional[ExtractionConfig] = None) -> List[Tuple[Segment, ScoredCut]]:
    """Segment a document, then extract the best cut of every segment"""
    return annotate_result(segment_document(text, lexicon, seg_config), taxonomy, ext_config)
