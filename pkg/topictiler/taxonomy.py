"""
Concept hierarchy: validation, path statistics and path-based similarity.

The hierarchy is stored as a networkx DiGraph with edges pointing from a
concept to its sub-concepts, so roots have no predecessors and leaves no
successors. Path statistics are computed once when the DAG is built.
"""

import logging
import math
import os
from collections import Counter
from typing import BinaryIO, Dict, FrozenSet, Iterable, Optional, Tuple, Union

import networkx as nx

from topictiler.entities import ConceptNode, PathStats
from topictiler.errors import (
    CycleError, DuplicateConceptError, OrphanConceptError, TaxonomyError, UnknownConceptError
)
from topictiler.parsers.taxonomy_parser import TaxonomyParser

logger = logging.getLogger("topictiler.taxonomy")

LeafDistanceTable = Dict[str, Counter]  # concept -> Counter{(leaf, edge_count): paths}


def _shifted(lengths: Counter, by: int = 1) -> Counter:
    return Counter({length + by: count for length, count in lengths.items()})


class ConceptDag:
    """Validated, immutable concept hierarchy"""

    def __init__(self, nodes: Iterable[ConceptNode], edges: Iterable[Tuple[str, str]]):
        self.nodes: Dict[str, ConceptNode] = {}
        for node in nodes:
            if node.id in self.nodes:
                raise DuplicateConceptError(f"duplicate concept id {node.id!r}")
            self.nodes[node.id] = node
        if not self.nodes:
            raise TaxonomyError("taxonomy has no concepts")

        self.graph = nx.DiGraph()
        self.graph.add_nodes_from(self.nodes)
        for sub, sup in edges:
            for concept_id in (sub, sup):
                if concept_id not in self.nodes:
                    raise UnknownConceptError(f"edge {sub!r} -> {sup!r} references unknown concept {concept_id!r}")
            if self.graph.has_edge(sup, sub):
                logger.debug("Ignoring repeated edge %s -> %s", sub, sup)
            self.graph.add_edge(sup, sub)

        try:
            cycle = nx.find_cycle(self.graph)
        except nx.NetworkXNoCycle:
            cycle = None
        if cycle:
            raise CycleError(cycle)

        self.orphans: FrozenSet[str] = frozenset(nx.isolates(self.graph))
        self.roots: FrozenSet[str] = frozenset(n for n, d in self.graph.in_degree() if d == 0)
        self.leaves: FrozenSet[str] = frozenset(
            n for n, d in self.graph.out_degree() if d == 0 and n not in self.orphans
        )
        self.anonymous: FrozenSet[str] = frozenset(n.id for n in self.nodes.values() if n.is_anonymous)
        self.max_depth = nx.dag_longest_path_length(self.graph) + 1
        if self.orphans:
            logger.warning("Taxonomy has %d orphan concepts (no super and no sub concept)", len(self.orphans))

        self._topological = list(nx.topological_sort(self.graph))
        self._up: Dict[str, Counter] = {}
        self._down: Dict[str, Counter] = {}
        self._precompute()
        self._undirected = self.graph.to_undirected(as_view=True)
        self._upward = self.graph.reverse(copy=False)
        logger.info("Taxonomy loaded: %d concepts, %d edges, %d roots, depth %d",
                    len(self.nodes), self.graph.number_of_edges(), len(self.roots), self.max_depth)

    def _precompute(self):
        for concept in self._topological:
            parents = list(self.graph.predecessors(concept))
            if not parents:
                self._up[concept] = Counter({0: 1})
            else:
                up = Counter()
                for parent in parents:
                    up.update(_shifted(self._up[parent]))
                self._up[concept] = up

        for concept in reversed(self._topological):
            children = list(self.graph.successors(concept))
            if not children:
                self._down[concept] = Counter({0: 1})
            else:
                down = Counter()
                for child in children:
                    down.update(_shifted(self._down[child]))
                self._down[concept] = down

        self._stats: Dict[str, PathStats] = {
            concept: self._path_stats(concept)
            for concept in self._topological if concept not in self.orphans
        }

    def _path_stats(self, concept: str) -> PathStats:
        up, down = self._up[concept], self._down[concept]
        n_up, n_down = sum(up.values()), sum(down.values())
        towards_root = 0.0
        towards_leaf = 0.0
        for big_l, up_count in up.items():
            for small_l, down_count in down.items():
                weight = up_count * down_count
                towards_root += weight * (big_l / (big_l + small_l))
                towards_leaf += weight * (small_l / (big_l + small_l))
        pairs = n_up * n_down
        return PathStats(
            concept=concept,
            n_up=n_up,
            n_down=n_down,
            up_lengths=Counter(up),
            down_lengths=Counter(down),
            root_distance=towards_root / pairs,
            leaf_distance=towards_leaf / pairs,
        )

    def __contains__(self, concept_id: str) -> bool:
        return concept_id in self.nodes

    def __len__(self) -> int:
        return len(self.nodes)

    def node(self, concept_id: str) -> ConceptNode:
        self._require(concept_id)
        return self.nodes[concept_id]

    def _require(self, concept_id: str) -> None:
        if concept_id not in self.nodes:
            raise UnknownConceptError(f"unknown concept {concept_id!r}")

    def is_usable(self, concept_id: str) -> bool:
        """Known, reachable from a root and named"""
        return (concept_id in self.nodes and concept_id not in self.orphans
                and concept_id not in self.anonymous)

    def parents(self, concept_id: str):
        return self.graph.predecessors(concept_id)

    def children(self, concept_id: str):
        return self.graph.successors(concept_id)

    def topological_order(self):
        return list(self._topological)

    def edges(self):
        """(sub, super) pairs"""
        return [(sub, sup) for sup, sub in self.graph.edges()]

    def leaf_path_count(self, concept_id: str) -> int:
        self._require(concept_id)
        return sum(self._down[concept_id].values())

    def root_path_count(self, concept_id: str) -> int:
        self._require(concept_id)
        return sum(self._up[concept_id].values())

    def path_stats(self, concept_id: str) -> PathStats:
        self._require(concept_id)
        if concept_id in self.orphans:
            raise OrphanConceptError(f"concept {concept_id!r} has no path to a root")
        return self._stats[concept_id]

    def total_leaf_paths(self) -> int:
        return sum(self.leaf_path_count(r) for r in self.roots if r not in self.orphans)


def load_taxonomy(source: Union[str, os.PathLike, BinaryIO]) -> ConceptDag:
    """Build a ConceptDag from a file path or a binary stream"""
    if hasattr(source, "read"):
        content = source.read()
        if isinstance(content, bytes):
            content = content.decode("utf-8")
        parser = TaxonomyParser(content=content)
    else:
        parser = TaxonomyParser(file_path=os.fspath(source))
    return ConceptDag(parser.nodes.values(), parser.edges)


def leaf_path_count(dag: ConceptDag, c: str) -> int:
    return dag.leaf_path_count(c)


def compute_path_stats(dag: ConceptDag, c: str) -> PathStats:
    return dag.path_stats(c)


def build_leaf_distance_table(dag: ConceptDag) -> LeafDistanceTable:
    """One record per distinct downward path from each concept to a leaf"""
    table: LeafDistanceTable = {}
    for concept in reversed(dag.topological_order()):
        children = list(dag.children(concept))
        if not children:
            table[concept] = Counter({(concept, 0): 1})
            continue
        rows = Counter()
        for child in children:
            for (leaf, length), count in table[child].items():
                rows[(leaf, length + 1)] += count
        table[concept] = rows
    return table


def shortest_node_path(dag: ConceptDag, a: str, b: str, hypernym_only: bool = False) -> Optional[int]:
    """Node count of the shortest path between two concepts, both ends included.

    Returns None when no path exists. With ``hypernym_only`` the path must
    climb from both concepts to a common ancestor.
    """
    dag._require(a)
    dag._require(b)
    if a == b:
        return 1
    if hypernym_only:
        above_a = nx.single_source_shortest_path_length(dag._upward, a)
        above_b = nx.single_source_shortest_path_length(dag._upward, b)
        common = above_a.keys() & above_b.keys()
        if not common:
            return None
        return min(above_a[c] + above_b[c] for c in common) + 1
    try:
        return nx.shortest_path_length(dag._undirected, a, b) + 1
    except nx.NetworkXNoPath:
        return None


def leacock_chodorow(node_distance: int, depth: int) -> float:
    """-ln(d / 2D), clamped at 0"""
    if node_distance < 1 or depth < 1:
        raise ValueError("node distance and depth must be positive")
    return max(0.0, -math.log(node_distance / (2 * depth)))


def lch_similarity(dag: ConceptDag, a: str, b: str, hypernym_only: bool = False) -> float:
    for concept in (a, b):
        dag._require(concept)
        if concept in dag.orphans:
            logger.warning("Orphan concept %s has no similarity, using 0", concept)
            return 0.0
    distance = shortest_node_path(dag, a, b, hypernym_only)
    if distance is None:
        logger.warning("Concepts %s and %s are unreachable from each other, using 0", a, b)
        return 0.0
    return leacock_chodorow(distance, dag.max_depth)


def describe_taxonomy(dag: ConceptDag) -> Dict:
    """Summary counts of a hierarchy"""
    depth_histogram = Counter()
    for concept in dag.nodes:
        if concept not in dag.orphans:
            depth_histogram[max(dag._up[concept])] += 1
    largest = max(dag.nodes, key=lambda c: (dag.leaf_path_count(c), c))
    return {
        "concepts": len(dag.nodes),
        "edges": dag.graph.number_of_edges(),
        "roots": sorted(dag.roots - dag.orphans),
        "orphans": len(dag.orphans),
        "anonymous": len(dag.anonymous),
        "leaves": len(dag.leaves),
        "max_depth": dag.max_depth,
        "total_leaf_paths": dag.total_leaf_paths(),
        "largest_leaf_table_row": {"concept": largest, "paths": dag.leaf_path_count(largest)},
        "multiple_inheritance": sum(1 for _, d in dag.graph.in_degree() if d > 1),
        "depth_histogram": {str(k): v for k, v in sorted(depth_histogram.items())},
    }
