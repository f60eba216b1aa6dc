"""
Report writers. Numbers use fixed formatting so reports are byte-stable
across runs and platforms.
"""

import json
import math
from typing import IO, Dict, Iterable, List, Optional, Sequence, Tuple

from topictiler.entities import Segment
from topictiler.evaluation import PRPoint, Segmentation
from topictiler.extractor import ScoredCut, SpanningDag
from topictiler.lexicon import Lexicon
from topictiler.segmenter import Boundary, SimilarityCurve


def fmt(value: float, digits: int = 8) -> str:
    if value is None or math.isnan(value):
        return "nan"
    return f"{value:.{digits}f}"


def write_flexions(out: IO[str], lexicon: Lexicon) -> int:
    out.write("# surface\tlemma\tpos\tconcepts\n")
    rows = lexicon.flexions()
    for surface, reading in rows:
        out.write(f"{surface}\t{reading.lemma}\t{reading.pos_tag}\t{','.join(reading.concept_ids)}\n")
    return len(rows)


def write_boundaries(out: IO[str], word_count: int, boundaries: Sequence[Boundary]) -> None:
    out.write(f"# word_count {word_count}\n")
    out.write("# boundary\ttoken_offset\tchar_offset\trelevance\n")
    for number, boundary in enumerate(boundaries, start=1):
        out.write(f"{number}\t{boundary.token_offset}\t{boundary.char_offset}\t{fmt(boundary.relevance, 6)}\n")


def write_reference_boundaries(out: IO[str], segmentation: Segmentation, char_offsets: Sequence[int]) -> None:
    """Ground-truth boundaries in the boundary-file format, relevance 0"""
    boundaries = [Boundary(gap_index=-1, relevance=0.0, token_offset=offset, char_offset=char)
                  for offset, char in zip(segmentation.boundaries, char_offsets)]
    write_boundaries(out, segmentation.word_count, boundaries)


def write_curve(out: IO[str], raw: SimilarityCurve, smoothed: SimilarityCurve, trace: bool = False) -> None:
    snapshots = smoothed.smoothing_trace[1:-1] if trace else []
    header = ["gap", "raw", "smoothed"] + [f"iter{i}" for i in range(1, len(snapshots) + 1)]
    out.write("# " + "\t".join(header) + "\n")
    for gap in range(len(raw)):
        row = [str(gap), fmt(raw.values[gap], 6), fmt(smoothed.values[gap], 6)]
        row.extend(fmt(s[gap], 6) for s in snapshots)
        out.write("\t".join(row) + "\n")


def write_topics(out: IO[str], annotated: Iterable[Tuple[Segment, ScoredCut]]) -> None:
    out.write("# segment_index\tconcept_id\theadword\tU\tn_paths\n")
    for seg, cut in annotated:
        for item in cut.selected:
            out.write(f"{seg.index}\t{item.concept}\t{item.headword or ''}\t{fmt(item.u, 6)}\t{item.covered_leaf_paths}\n")


def write_sweep(out: IO[str], points: Iterable[PRPoint]) -> None:
    out.write("# theta\tprecision\trecall\tf\taccuracy\n")
    for p in points:
        out.write(f"{fmt(p.theta, 2)}\t{fmt(p.precision)}\t{fmt(p.recall)}\t{fmt(p.f_measure)}\t{fmt(p.accuracy)}\n")


def write_seg_report(out: IO[str], rows: Iterable[Tuple[str, float, int, int, Optional[float]]]) -> None:
    rows = list(rows)
    with_baseline = any(row[4] is not None for row in rows)
    out.write("# doc_id\terror\tn_real\tn_found" + ("\tbaseline" if with_baseline else "") + "\n")
    for doc_id, error, n_real, n_found, baseline in rows:
        line = f"{doc_id}\t{fmt(error, 6)}\t{n_real}\t{n_found}"
        if with_baseline:
            line += f"\t{fmt(baseline, 6)}"
        out.write(line + "\n")


def write_a_study(out: IO[str], rows: Iterable[Dict[str, float]]) -> None:
    columns = ["a", "accuracy", "precision", "recall", "f", "exact_precision", "exact_recall", "exact_f"]
    out.write("# " + "\t".join(columns) + "\n")
    for row in rows:
        out.write("\t".join(fmt(row[c], 2 if c == "a" else 6) for c in columns) + "\n")


def spanning_dag_to_dict(dag: SpanningDag, cut: Optional[ScoredCut] = None) -> Dict:
    selected = {item.concept: item.covered_leaf_paths for item in (cut.selected if cut else [])}
    nodes = []
    for concept_id in dag.order():
        node = dag.nodes[concept_id]
        nodes.append({
            "id": concept_id,
            "headword": dag.taxonomy.nodes[concept_id].headword,
            "anonymous": node.anonymous,
            "in_bag": node.in_bag,
            "n": node.covered_leaf_paths,
            "s1": round(node.s1, 10),
            "s2": round(node.s2, 10),
            "u": round(node.u, 10),
            "stored_score": round(node.stored_score, 10),
            "expand": node.expand,
            "selected_paths": selected.get(concept_id, 0),
            "children": sorted(dag.graph.successors(concept_id)),
        })
    return {
        "total_leaf_paths": dag.total_leaf_paths,
        "roots": dag.roots,
        "score": round(cut.score, 10) if cut else None,
        "nodes": nodes,
    }


def write_spanning_dag(out: IO[str], dag: SpanningDag, cut: Optional[ScoredCut] = None) -> None:
    json.dump(spanning_dag_to_dict(dag, cut), out, indent=2)
    out.write("\n")


def dump_json(out: IO[str], data: Dict) -> None:
    json.dump(data, out, indent=2)
    out.write("\n")
