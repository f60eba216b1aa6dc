"""Seeded generators for synthetic hierarchies and documents."""

import logging
import random
from typing import List, Optional

from topictiler.entities import ConceptNode
from topictiler.taxonomy import ConceptDag

logger = logging.getLogger("topictiler.synth")


def synthesize_taxonomy(n_nodes: int, max_parents: int = 2, n_roots: int = 1,
                        anonymous_rate: float = 0.0, seed: Optional[int] = 0,
                        rng: Optional[random.Random] = None) -> ConceptDag:
    """Random DAG: every non-root concept picks 1..max_parents parents among earlier concepts"""
    if n_nodes < 1 or n_roots < 1 or n_roots > n_nodes:
        raise ValueError("need 1 <= n_roots <= n_nodes")
    if max_parents < 1:
        raise ValueError("max_parents must be >= 1")
    if not 0.0 <= anonymous_rate <= 1.0:
        raise ValueError("anonymous_rate must lie in [0, 1]")
    rng = rng or random.Random(seed)

    width = len(str(n_nodes - 1))
    ids = [f"c{i:0{width}d}" for i in range(n_nodes)]
    nodes = []
    for i, concept_id in enumerate(ids):
        # Roots stay named so every component keeps a reportable top
        if i >= n_roots and rng.random() < anonymous_rate:
            nodes.append(ConceptNode(concept_id))
        else:
            nodes.append(ConceptNode(concept_id, f"concept {i}"))

    edges = []
    for i in range(n_roots, n_nodes):
        k = rng.randint(1, min(max_parents, i))
        for parent in sorted(rng.sample(range(i), k)):
            edges.append((ids[i], ids[parent]))
    logger.debug("Synthesized taxonomy with %d concepts and %d edges", n_nodes, len(edges))
    return ConceptDag(nodes, edges)


def block_word(block: int, k: int) -> str:
    """Pseudo-word ``k`` of block ``block``; blocks never share words"""
    return f"b{block}w{k}"


def synthesize_block_documents(n_blocks: int, words_per_block: int = 240, vocabulary_size: int = 40,
                               seed: Optional[int] = 0) -> List[str]:
    """Documents with pairwise disjoint vocabularies, words drawn uniformly"""
    if n_blocks < 1 or words_per_block < 1 or vocabulary_size < 1:
        raise ValueError("n_blocks, words_per_block and vocabulary_size must be >= 1")
    rng = random.Random(seed)
    documents = []
    for block in range(n_blocks):
        vocabulary = [block_word(block, k) for k in range(vocabulary_size)]
        words = [rng.choice(vocabulary) for _ in range(words_per_block)]
        sentences = [" ".join(words[i:i + 12]) + "." for i in range(0, len(words), 12)]
        documents.append(" ".join(sentences))
    return documents
