import math
import random
from collections import Counter

import pytest

from topictiler.entities import ConceptNode, InflectionRule, LemmaEntry, LemmaReading, Token
from topictiler.errors import InvalidCutError, NothingToExtract, OracleRefusal, UnknownConceptError
from topictiler.extractor import (
    BagOfConcepts, CutItem, ScoredCut, annotate, bag_of_concepts, brute_force_best_cut,
    build_spanning_dag, combine_scores, count_cuts, cut_score, enumerate_cuts, extract_cut,
    extract_topics, score_s1, score_s2
)
from topictiler.lexicon import build_lexicon, tokenize
from topictiler.models import ExtractionConfig, SegmenterConfig
from topictiler.synth import block_word, synthesize_block_documents, synthesize_taxonomy
from topictiler.taxonomy import ConceptDag


def make_dag(names, edges):
    return ConceptDag([ConceptNode(n, n) for n in names], edges)


def spanning(dag, bag, a=0.5):
    return build_spanning_dag(BagOfConcepts.of(bag), dag, ExtractionConfig(a=a))


def complete_tree(branching, depth):
    names, edges, level = ["t"], [], ["t"]
    for _ in range(depth - 1):
        below = []
        for parent in level:
            for k in range(branching):
                child = f"{parent}.{k}"
                names.append(child)
                edges.append((child, parent))
                below.append(child)
        level = below
    return make_dag(names, edges), level


@pytest.fixture
def chain_dag():
    return make_dag("RAL", [("A", "R"), ("L", "A")])


@pytest.fixture
def star_dag():
    return make_dag(["R", "L1", "L2", "L3"], [("L1", "R"), ("L2", "R"), ("L3", "R")])


@pytest.fixture
def pair_dag():
    return make_dag(["R", "P", "L1", "L2"], [("P", "R"), ("L1", "P"), ("L2", "P")])


def test_bag_accumulates_occurrences(sample_lexicon, sample_taxonomy):
    bag = bag_of_concepts(tokenize("cat cats dog", sample_lexicon), sample_taxonomy)
    assert set(bag) == {"cat", "dog"}
    assert bag.entries["cat"].count == 2
    assert bag.entries["cat"].positions == [0, 1]
    assert bag.entries["cat"].lemmas == {"cat"}


def test_ambiguous_token_brings_every_sense(sample_lexicon, sample_taxonomy):
    bag = bag_of_concepts(tokenize("barks", sample_lexicon), sample_taxonomy)
    assert set(bag) == {"bark_tree", "bark_sound"}


def test_conceptless_tokens_give_empty_bag(sample_lexicon, sample_taxonomy):
    assert len(bag_of_concepts(tokenize("the ready unknownword", sample_lexicon), sample_taxonomy)) == 0


def test_unusable_concepts_are_dropped(sample_taxonomy):
    token = Token("odd", 0, 3, [LemmaReading("odd", "noun", ("lonely", "x1700", "nowhere", "car"))])
    bag = bag_of_concepts([token], sample_taxonomy)
    assert set(bag) == {"car"}


def test_spanning_chain(chain_dag):
    dag = spanning(chain_dag, ["L"])
    assert set(dag.nodes) == {"R", "A", "L"}
    assert all(node.covered_leaf_paths == 1 for node in dag.nodes.values())
    assert dag.total_leaf_paths == 1


def test_spanning_counts_every_meaning():
    diamond = make_dag("RABL", [("A", "R"), ("B", "R"), ("L", "A"), ("L", "B")])
    dag = spanning(diamond, ["L"])
    assert dag.nodes["R"].covered_leaf_paths == 2
    assert dag.total_leaf_paths == 2
    assert not dag.is_tree()


def test_spanning_common_parent(pair_dag):
    dag = spanning(pair_dag, ["L1", "L2"])
    assert dag.nodes["P"].covered_leaf_paths == 2
    assert dag.nodes["R"].covered_leaf_paths == 2
    assert dag.total_leaf_paths == 2
    assert dag.leaf_set == {"L1", "L2"}


def test_spanning_restricts_to_ancestors(sample_taxonomy):
    dag = spanning(sample_taxonomy, ["cat"])
    assert set(dag.nodes) == {"entity", "organism", "animal", "mammal", "cat"}


def test_bag_concept_with_bag_descendant_keeps_own_path(sample_taxonomy):
    dag = spanning(sample_taxonomy, ["mammal", "cat"])
    assert dag.nodes["mammal"].leaf_paths == {"mammal": 1, "cat": 1}
    assert dag.total_leaf_paths == 2


def test_spanning_errors(sample_taxonomy):
    with pytest.raises(UnknownConceptError):
        spanning(sample_taxonomy, ["cat", "unicorn"])
    with pytest.raises(NothingToExtract):
        build_spanning_dag(BagOfConcepts(), sample_taxonomy)
    with pytest.raises(NothingToExtract):
        spanning(sample_taxonomy, ["x1700"])


def test_genericity():
    assert score_s1(1, 7) == 0.0
    assert score_s1(7, 7) == 1.0
    assert score_s1(3, 5) == 0.5
    assert score_s1(1, 1) == 0.0


def test_informativeness(chain_dag):
    assert score_s2("L", chain_dag) == 1.0
    assert score_s2("R", chain_dag) == 0.0
    assert score_s2("A", chain_dag) == pytest.approx(0.5)


def test_combination():
    assert combine_scores(0.3, 0.8, 0.0) == 0.3
    assert combine_scores(0.3, 0.8, 1.0) == 0.8
    assert combine_scores(0.25, 1.0, 0.5) == pytest.approx(0.5)
    assert combine_scores(0.0, 0.0, 0.0) == 0.0
    assert combine_scores(1.0, 0.0, 0.0) == 1.0
    with pytest.raises(ValueError):
        combine_scores(0.5, 0.5, 1.5)


def test_star_expands_to_leaves(star_dag):
    dag = spanning(star_dag, ["L1", "L2", "L3"])
    cut = extract_cut(dag)
    assert sorted(cut.concepts) == ["L1", "L2", "L3"]
    assert cut.score == 0.0
    assert dag.nodes["R"].expand


def test_chain_ties_expand_fully(chain_dag):
    cut = extract_cut(spanning(chain_dag, ["L"]))
    assert cut.concepts == ["L"]
    assert cut.score == 0.0


def test_common_parent_selected(pair_dag):
    dag = spanning(pair_dag, ["L1", "L2"])
    cut = extract_cut(dag)
    assert cut.concepts == ["P"]
    assert cut.score == pytest.approx(math.sqrt(0.5))
    assert cut.selected[0].covered_leaf_paths == 2
    assert cut_score(cut, dag) == pytest.approx(cut.score)


def test_cut_score_examples(star_dag, chain_dag):
    dag = spanning(star_dag, ["L1", "L2", "L3"])
    leaves = ScoredCut([CutItem(l, 1, Counter({l: 1}), 0.0) for l in ["L1", "L2", "L3"]], 0.0, 3)
    assert cut_score(leaves, dag) == 0.0

    trivial = spanning(chain_dag, ["L"])
    assert cut_score(extract_cut(trivial), trivial) == 0.0


def test_cut_score_rejects_invalid_cuts(pair_dag):
    dag = spanning(pair_dag, ["L1", "L2"])
    partial = ScoredCut([CutItem("L1", 1, Counter({"L1": 1}), 0.0)], 0.0, 2)
    with pytest.raises(InvalidCutError):
        cut_score(partial, dag)

    overlap = ScoredCut([CutItem("P", 2, Counter({"L1": 1, "L2": 1}), 0.0),
                         CutItem("L1", 1, Counter({"L1": 1}), 0.0)], 0.0, 2)
    with pytest.raises(InvalidCutError):
        cut_score(overlap, dag)

    stranger = ScoredCut([CutItem("Q", 2, Counter({"L1": 1, "L2": 1}), 0.0)], 0.0, 2)
    with pytest.raises(InvalidCutError):
        cut_score(stranger, dag)


def test_anonymous_concepts_never_selected(sample_taxonomy):
    dag = spanning(sample_taxonomy, ["car", "truck"], a=1.0)
    cut = extract_cut(dag)
    assert "x1700" in dag.nodes
    assert dag.nodes["x1700"].expand
    assert "x1700" not in cut.concepts
    anonymous = ScoredCut([CutItem("x1700", 2, Counter({"car": 1, "truck": 1}), 0.0)], 0.0, 2)
    with pytest.raises(InvalidCutError):
        cut_score(anonymous, dag)


def test_shared_concept_reported_once(sample_taxonomy):
    dag = spanning(sample_taxonomy, ["system_output"])
    assert dag.total_leaf_paths == 2
    cut = extract_cut(dag)
    assert len(cut.concepts) == len(set(cut.concepts))
    assert sum(item.covered_leaf_paths for item in cut.selected) == 2
    assert cut_score(cut, dag) == pytest.approx(cut.score)


@pytest.mark.parametrize("branching, depth, expected", [(1, 1, 1), (2, 2, 2), (2, 3, 5), (3, 2, 2), (3, 3, 9)])
def test_count_cuts_recurrence(branching, depth, expected):
    assert count_cuts(branching, depth) == expected


def test_count_cuts_is_exact_for_large_inputs():
    assert count_cuts(3, 6) == ((((2 ** 3 + 1) ** 3 + 1) ** 3 + 1) ** 3 + 1)
    with pytest.raises(ValueError):
        count_cuts(0, 2)


@pytest.mark.parametrize("branching", [1, 2, 3])
@pytest.mark.parametrize("depth", [2, 3])
def test_count_cuts_matches_enumeration(branching, depth):
    tree, leaves = complete_tree(branching, depth)
    dag = spanning(tree, leaves)
    assert len(enumerate_cuts(dag)) == count_cuts(branching, depth)


def test_enumeration_examples(chain_dag, star_dag):
    chain_cuts = enumerate_cuts(spanning(chain_dag, ["L"]))
    assert sorted(c[0][0] for c in chain_cuts) == ["A", "L", "R"]
    assert len(enumerate_cuts(spanning(star_dag, ["L1", "L2", "L3"]))) == 2


def test_oracle_refuses_large_or_tangled_dags():
    diamond = make_dag("RABL", [("A", "R"), ("B", "R"), ("L", "A"), ("L", "B")])
    with pytest.raises(OracleRefusal):
        brute_force_best_cut(spanning(diamond, ["L"]))
    names = [f"n{i:02d}" for i in range(25)]
    long_chain = make_dag(names, [(names[i + 1], names[i]) for i in range(24)])
    with pytest.raises(OracleRefusal):
        brute_force_best_cut(spanning(long_chain, [names[-1]]))


def test_dynamic_program_matches_brute_force_on_trees():
    rng = random.Random(2024)
    for _ in range(200):
        tree = synthesize_taxonomy(rng.randint(2, 12), max_parents=1, anonymous_rate=0.25, rng=rng)
        named = sorted(tree.nodes.keys() - tree.anonymous)
        bag = rng.sample(named, rng.randint(1, len(named)))
        config = ExtractionConfig(a=rng.choice([0.0, 0.25, 0.5, 0.75, 1.0]))
        dag = build_spanning_dag(BagOfConcepts.of(bag), tree, config)
        expected = brute_force_best_cut(dag, config)
        cut = extract_cut(dag, config)
        assert cut.score == pytest.approx(expected.score, abs=1e-12)
        assert cut_score(cut, dag) == pytest.approx(cut.score, abs=1e-12)


def test_cuts_are_valid_on_random_dags():
    rng = random.Random(99)
    for _ in range(50):
        taxonomy = synthesize_taxonomy(rng.randint(3, 40), max_parents=3, n_roots=2,
                                       anonymous_rate=0.2, rng=rng)
        named = sorted(c for c in taxonomy.nodes if taxonomy.is_usable(c))
        if not named:
            continue
        bag = rng.sample(named, rng.randint(1, min(8, len(named))))
        for unweighted in (False, True):
            config = ExtractionConfig(a=rng.random(), unweighted_average=unweighted)
            dag = build_spanning_dag(BagOfConcepts.of(bag), taxonomy, config)
            cut = extract_cut(dag, config)
            assert cut_score(cut, dag) == pytest.approx(cut.score, abs=1e-12)
            assert 0.0 <= cut.score <= 1.0
            assert not set(cut.concepts) & taxonomy.anonymous
            assert all(0.0 <= n.u <= 1.0 for n in dag.nodes.values())
            assert extract_cut(dag, config).concepts == cut.concepts


def test_endpoint_weights_reduce_to_single_scores():
    rng = random.Random(5)
    for _ in range(50):
        taxonomy = synthesize_taxonomy(rng.randint(2, 30), max_parents=2, rng=rng)
        bag = rng.sample(sorted(taxonomy.leaves), rng.randint(1, len(taxonomy.leaves)))
        only_genericity = build_spanning_dag(BagOfConcepts.of(bag), taxonomy, ExtractionConfig(a=0.0))
        only_informativeness = build_spanning_dag(BagOfConcepts.of(bag), taxonomy, ExtractionConfig(a=1.0))
        for node in only_genericity.nodes.values():
            assert node.u == node.s1
        for node in only_informativeness.nodes.values():
            assert node.u == node.s2


def test_extract_topics_positions_follow_full_token_list(sample_lexicon, sample_taxonomy):
    tokens = tokenize("the cat and the dog", sample_lexicon)
    dag, cut = extract_topics(tokens, sample_taxonomy, offset=10)
    assert dag.bag.entries["cat"].positions == [11]
    assert dag.bag.entries["dog"].positions == [14]
    assert cut.concepts == ["mammal"]


def test_extract_topics_without_concepts(sample_lexicon, sample_taxonomy):
    dag, cut = extract_topics(tokenize("the ready", sample_lexicon), sample_taxonomy)
    assert dag is None
    assert cut.selected == []


def test_annotate_empty_document(sample_lexicon, sample_taxonomy):
    assert annotate("", sample_lexicon, sample_taxonomy) == []


def test_annotate_single_leaf_document(sample_lexicon, sample_taxonomy):
    annotated = annotate("cat cats cat", sample_lexicon, sample_taxonomy)
    assert len(annotated) == 1
    assert annotated[0][1].concepts == ["cat"]


def test_annotate_two_blocks():
    vocabulary = 5
    names = ["root", "animals", "vehicles"] + [f"a{k}" for k in range(vocabulary)] + [f"v{k}" for k in range(vocabulary)]
    edges = [("animals", "root"), ("vehicles", "root")]
    edges += [(f"a{k}", "animals") for k in range(vocabulary)] + [(f"v{k}", "vehicles") for k in range(vocabulary)]
    taxonomy = make_dag(names, edges)
    entries = [LemmaEntry(block_word(0, k), "noun", [InflectionRule("", "s")], [], [f"a{k}"]) for k in range(vocabulary)]
    entries += [LemmaEntry(block_word(1, k), "noun", [], [], [f"v{k}"]) for k in range(vocabulary)]
    lexicon = build_lexicon(entries)

    text = "\n\n".join(synthesize_block_documents(2, words_per_block=200, vocabulary_size=vocabulary, seed=4))
    seg_config = SegmenterConfig(window_size=40, iterations=0, min_relevance=0.3)
    annotated = annotate(text, lexicon, taxonomy, seg_config, ExtractionConfig(a=0.5))
    assert [cut.concepts for _, cut in annotated] == [["animals"], ["vehicles"]]
    assert annotated[1][0].token_start == 200
