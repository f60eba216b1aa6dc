#!/usr/bin/env python3
"""
topictiler command line

Segments documents, extracts concept annotations per segment, evaluates
both against references and generates synthetic resources. Exit codes:
0 success, 1 usage or configuration error, 2 data error.
"""

import logging
import os
import random
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import click
from pydantic import ValidationError

from topictiler.errors import ConfigError, OracleRefusal, TopicTilerError
from topictiler.evaluation import (
    aggregate_probabilities, average_sweeps, default_thetas, evaluate_exact_match,
    random_baseline_error, segmentation_error, synthesize_eval_corpus, threshold_sweep
)
from topictiler.extractor import annotate_result, brute_force_best_cut, extract_topics
from topictiler.lexicon import Lexicon, build_lexicon, tokenize
from topictiler.models import RunConfig, load_config_file
from topictiler.parsers.annotation_parser import ReferenceParser, read_segmentation
from topictiler.parsers.lexicon_parser import LexiconParser, load_stoplist
from topictiler.parsers.taxonomy_parser import write_taxonomy
from topictiler import reports
from topictiler.segmenter import segment_document, segments_from_offsets
from topictiler.synth import synthesize_block_documents, synthesize_taxonomy
from topictiler.taxonomy import ConceptDag, describe_taxonomy, load_taxonomy
from topictiler.workers import map_in_order

logger = logging.getLogger("topictiler.cli")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


def _add_options(options):
    def decorator(func):
        for option in reversed(options):
            func = option(func)
        return func
    return decorator


common_options = _add_options([
    click.option("--config", "config_file", type=click.Path(dir_okay=False),
                 help="key=value settings file; explicit flags win"),
    click.option("--seed", type=int, default=None, help="Random seed"),
    click.option("--out", default=None, help="Output file or directory"),
])

resource_options = _add_options([
    click.option("--lexicon", default=None, help="Lexicon TSV file"),
    click.option("--stoplist", default=None, help="Stoplist file, one form per line"),
    click.option("--taxonomy", default=None, help="Taxonomy file"),
])

segmenter_options = _add_options([
    click.option("--window-size", type=int, default=None, help="Tokens per window (default 25)"),
    click.option("--step", "--lambda", "step", type=float, default=None,
                 help="Smoothing step fraction in (0, 1] (default 0.5)"),
    click.option("--iterations", "--smooth-iters", "iterations", type=int, default=None,
                 help="Smoothing iterations (default 2)"),
    click.option("--min-relevance", type=float, default=None, help="Minimum boundary relevance"),
    click.option("--max-boundaries", type=int, default=None, help="Maximum number of boundaries"),
    click.option("--dice-product", is_flag=True, default=False, help="Product-form Dice denominator"),
])

extraction_options = _add_options([
    click.option("--a", "a", type=float, default=None, help="Genericity/informativeness weight (default 0.5)"),
    click.option("--unweighted-average", is_flag=True, default=False,
                 help="Plain average of children's scores"),
    click.option("--hypernym-only", is_flag=True, default=False,
                 help="Concept distances through common ancestors only"),
])

workers_option = click.option("--workers", type=int, default=None, help="Documents processed concurrently")


def _run_config(options: Dict[str, Any]) -> RunConfig:
    config_file = options.pop("config_file", None)
    file_values = load_config_file(config_file) if config_file else {}
    flags = {key: (None if value is False else value) for key, value in options.items()}
    return RunConfig.build(file_values, **flags)


def _require(value: Optional[Any], flag: str) -> Any:
    if value is None:
        raise ConfigError(f"{flag} is required")
    return value


def _load_lexicon(config: RunConfig, required: bool = True) -> Lexicon:
    stoplist = load_stoplist(config.stoplist) if config.stoplist else set()
    if config.lexicon is None:
        if required:
            raise ConfigError("--lexicon is required")
        return Lexicon.empty(stoplist)
    return build_lexicon(LexiconParser(config.lexicon).entries, stoplist)


def _load_taxonomy(config: RunConfig) -> ConceptDag:
    return load_taxonomy(_require(config.taxonomy, "--taxonomy"))


def _read_text(path: str) -> str:
    with open(path, 'r', encoding='utf-8') as f:
        return f.read()


def _out_dir(config: RunConfig) -> Path:
    out = Path(config.out or ".")
    os.makedirs(out, exist_ok=True)
    return out


def _open_out(path: Optional[str]):
    return click.open_file(path or "-", "w", encoding="utf-8")


@click.group()
@click.option("-v", "--verbose", is_flag=True, help="Debug logging")
def cli(verbose: bool) -> None:
    """Topic segmentation and concept annotation"""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        stream=sys.stderr,
        force=True
    )


@cli.command("lexicon-build")
@click.option("--lexicon", required=True, help="Lexicon TSV file")
@click.option("--stoplist", default=None, help="Stoplist file")
@click.option("--out", default=None, help="Flexion list output (default stdout)")
def lexicon_build(lexicon: str, stoplist: Optional[str], out: Optional[str]) -> None:
    """Expand a lexicon into its full flexion list"""
    parser = LexiconParser(lexicon)
    built = build_lexicon(parser.entries, load_stoplist(stoplist) if stoplist else set())
    with _open_out(out) as f:
        rows = reports.write_flexions(f, built)
    regular = sum(1 for e in parser.entries if not e.irregular_forms)
    logger.info("%d regular entries, %d irregular forms, %d flexions, %d rejected",
                regular, sum(len(e.irregular_forms) for e in parser.entries), rows, len(built.rejected))


@cli.command("segment")
@click.argument("documents", nargs=-1, required=True)
@resource_options
@segmenter_options
@click.option("--trace", is_flag=True, help="Add smoothing iterations to the curve dump")
@workers_option
@common_options
def segment_cmd(documents: Sequence[str], trace: bool, **options) -> None:
    """Write boundary and curve files for each document"""
    config = _run_config(options)
    lexicon = _load_lexicon(config, required=False)
    out_dir = _out_dir(config)

    results = map_in_order(lambda path: segment_document(_read_text(path), lexicon, config.segmenter),
                           documents, config.workers)
    for path, result in zip(documents, results):
        stem = Path(path).stem
        with open(out_dir / f"{stem}.boundaries.tsv", "w", encoding="utf-8") as f:
            reports.write_boundaries(f, result.word_count, result.boundaries)
        with open(out_dir / f"{stem}.curve.tsv", "w", encoding="utf-8") as f:
            reports.write_curve(f, result.raw_curve, result.curve, trace)
        logger.info("%s: %d words, %d boundaries", path, result.word_count, len(result.boundaries))


@cli.command("extract")
@click.argument("documents", nargs=-1, required=True)
@resource_options
@extraction_options
@click.option("--oracle", is_flag=True, help="Compare with exhaustive search on small trees")
@click.option("--dump-dag", is_flag=True, help="Write the scored spanning DAG as JSON")
@workers_option
@common_options
def extract_cmd(documents: Sequence[str], oracle: bool, dump_dag: bool, **options) -> None:
    """Extract the best concept cut of each whole document"""
    config = _run_config(options)
    lexicon = _load_lexicon(config)
    taxonomy = _load_taxonomy(config)
    out_dir = _out_dir(config)

    def work(path: str):
        tokens = tokenize(_read_text(path), lexicon)
        dag, cut = extract_topics(tokens, taxonomy, config.extraction)
        return tokens, dag, cut

    for path, (tokens, dag, cut) in zip(documents, map_in_order(work, documents, config.workers)):
        stem = Path(path).stem
        annotated = [(seg, cut) for seg in segments_from_offsets(tokens, [])]
        with open(out_dir / f"{stem}.topics.tsv", "w", encoding="utf-8") as f:
            reports.write_topics(f, annotated)
        if dump_dag and dag is not None:
            with open(out_dir / f"{stem}.dag.json", "w", encoding="utf-8") as f:
                reports.write_spanning_dag(f, dag, cut)
        if oracle and dag is not None:
            try:
                best = brute_force_best_cut(dag, config.extraction)
            except OracleRefusal as e:
                logger.warning("%s: oracle refused: %s", path, e)
                continue
            verdict = "match" if best.score == cut.score else "MISMATCH"
            click.echo(f"{stem}\tdp={reports.fmt(cut.score, 12)}\toracle={reports.fmt(best.score, 12)}\t{verdict}")


@cli.command("annotate")
@click.argument("documents", nargs=-1, required=True)
@resource_options
@segmenter_options
@extraction_options
@workers_option
@common_options
def annotate_cmd(documents: Sequence[str], **options) -> None:
    """Segment each document and extract the concepts of every segment"""
    config = _run_config(options)
    lexicon = _load_lexicon(config)
    taxonomy = _load_taxonomy(config)
    out_dir = _out_dir(config)

    def work(path: str):
        result = segment_document(_read_text(path), lexicon, config.segmenter)
        return result, annotate_result(result, taxonomy, config.extraction)

    for path, (result, annotated) in zip(documents, map_in_order(work, documents, config.workers)):
        stem = Path(path).stem
        with open(out_dir / f"{stem}.boundaries.tsv", "w", encoding="utf-8") as f:
            reports.write_boundaries(f, result.word_count, result.boundaries)
        with open(out_dir / f"{stem}.topics.tsv", "w", encoding="utf-8") as f:
            reports.write_topics(f, annotated)


@cli.command("eval-seg")
@click.option("--real", "real_files", multiple=True, required=True, help="Reference boundary file (repeatable)")
@click.option("--found", "found_files", multiple=True, required=True, help="Produced boundary file, paired by order")
@click.option("--baseline-trials", type=int, default=0, help="Random-boundary baseline trials per document")
@common_options
def eval_seg(real_files: Sequence[str], found_files: Sequence[str], baseline_trials: int, **options) -> None:
    """Position error between paired segmentations"""
    config = _run_config(options)
    if len(real_files) != len(found_files):
        raise ConfigError("--real and --found must be given the same number of times")

    rows = []
    for real_path, found_path in zip(real_files, found_files):
        real, found = read_segmentation(real_path), read_segmentation(found_path)
        error = segmentation_error(real, found)
        baseline = None
        if baseline_trials > 0:
            baseline = random_baseline_error(real, len(found.boundaries), baseline_trials, config.seed)
        rows.append((Path(real_path).stem, error, real.segment_count, found.segment_count, baseline))

    with _open_out(config.out) as f:
        reports.write_seg_report(f, rows)
        f.write(f"# mean_error\t{reports.fmt(sum(r[1] for r in rows) / len(rows), 6)}\n")


def _parse_floats(text: str, flag: str) -> List[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"{flag} expects comma-separated numbers")


@cli.command("eval-topics")
@click.option("--reference", required=True, help="Reference annotations: doc_id, concept_id[, keyword]")
@click.option("--produced", default=None, help="Produced annotations in the reference format")
@click.option("--docs", "doc_files", multiple=True, help="Documents to extract from for the a study (repeatable)")
@click.option("--a-values", default="0,0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1",
              help="Comma-separated a values for the a study")
@click.option("--theta-step", type=float, default=0.01, help="Threshold grid step")
@click.option("--b", "b", type=float, default=1.0, help="F-measure parameter")
@click.option("--min-ratio", type=float, default=None, help="Keep documents with concepts/keywords >= ratio")
@click.option("--exact-out", default=None, help="Write exact-match scores to this file")
@resource_options
@extraction_options
@workers_option
@common_options
def eval_topics(reference: str, produced: Optional[str], doc_files: Sequence[str], a_values: str,
                theta_step: float, b: float, min_ratio: Optional[float], exact_out: Optional[str],
                **options) -> None:
    """Expected precision/recall sweep, or an a study when documents are given"""
    config = _run_config(options)
    if b <= 0 or not 0 < theta_step < 1:
        raise ConfigError("--b must be > 0 and --theta-step in (0, 1)")
    taxonomy = _load_taxonomy(config)
    references = ReferenceParser(reference)
    doc_ids = references.filter_by_ratio(min_ratio) if min_ratio is not None else references.doc_ids

    if doc_files:
        _a_study(config, taxonomy, references, doc_ids, doc_files, _parse_floats(a_values, "--a-values"), b)
        return

    produced_docs = ReferenceParser(_require(produced, "--produced or --docs"))
    thetas = default_thetas(theta_step)
    sweeps, exact = [], []
    for doc_id in doc_ids:
        prod = produced_docs.get_concepts(doc_id)
        ref = references.get_concepts(doc_id)
        if not prod or not ref:
            logger.warning("Document %s skipped: empty produced or reference list", doc_id)
            continue
        mp = aggregate_probabilities(prod, ref, taxonomy, config.extraction.hypernym_only)
        sweeps.append(threshold_sweep(mp, thetas, b))
        exact.append(evaluate_exact_match(prod, ref, b))
    if not sweeps:
        raise TopicTilerError("no document has both produced and reference concepts")

    with _open_out(config.out) as f:
        reports.write_sweep(f, average_sweeps(sweeps))
    if exact_out:
        with _open_out(exact_out) as f:
            f.write("# precision\trecall\tf\n")
            means = [sum(column) / len(exact) for column in zip(*exact)]
            f.write("\t".join(reports.fmt(v, 6) for v in means) + "\n")


def _a_study(config: RunConfig, taxonomy: ConceptDag, references: ReferenceParser, doc_ids: List[str],
             doc_files: Sequence[str], a_values: List[float], b: float) -> None:
    lexicon = _load_lexicon(config)
    wanted = set(doc_ids)
    documents = [p for p in doc_files if Path(p).stem in wanted]
    token_lists = map_in_order(lambda path: tokenize(_read_text(path), lexicon), documents, config.workers)

    rows = []
    for a in a_values:
        ext_config = config.extraction.model_copy(update={"a": a})
        points, exact = [], []
        for path, tokens in zip(documents, token_lists):
            ref = references.get_concepts(Path(path).stem)
            _, cut = extract_topics(tokens, taxonomy, ext_config)
            if not cut.selected or not ref:
                continue
            mp = aggregate_probabilities(cut.concepts, ref, taxonomy, ext_config.hypernym_only)
            points.append(threshold_sweep(mp, [0.0], b))
            exact.append(evaluate_exact_match(cut.concepts, ref, b))
        if not points:
            logger.warning("No document could be evaluated at a=%.2f", a)
            continue
        point = average_sweeps(points)[0]
        exact_means = [sum(column) / len(exact) for column in zip(*exact)]
        rows.append({
            "a": a, "accuracy": point.accuracy, "precision": point.precision,
            "recall": point.recall, "f": point.f_measure,
            "exact_precision": exact_means[0], "exact_recall": exact_means[1], "exact_f": exact_means[2],
        })
    with _open_out(config.out) as f:
        reports.write_a_study(f, rows)


@cli.command("synth-taxonomy")
@click.option("--nodes", type=int, default=50, help="Number of concepts")
@click.option("--max-parents", type=int, default=2, help="Maximum parents per concept")
@click.option("--roots", type=int, default=1, help="Number of roots")
@click.option("--anonymous-rate", type=float, default=0.0, help="Share of anonymous non-root concepts")
@common_options
def synth_taxonomy(nodes: int, max_parents: int, roots: int, anonymous_rate: float, **options) -> None:
    """Random seeded concept DAG in the taxonomy format"""
    config = _run_config(options)
    seed = _require(config.seed, "--seed")
    try:
        dag = synthesize_taxonomy(nodes, max_parents, roots, anonymous_rate, seed)
    except ValueError as e:
        if isinstance(e, TopicTilerError):
            raise
        raise ConfigError(str(e)) from e
    with _open_out(config.out) as f:
        write_taxonomy(f, dag.nodes.values(), dag.edges())


@cli.command("synth-corpus")
@click.argument("documents", nargs=-1)
@click.option("--group-size", type=int, default=5, help="Documents per synthetic text")
@click.option("--count", type=int, default=1, help="Number of synthetic texts")
@click.option("--blocks", type=int, default=None, help="Generate this many vocabulary-disjoint documents")
@click.option("--words-per-block", type=int, default=240, help="Words per generated document")
@click.option("--lexicon", default=None, help="Lexicon used to count words")
@click.option("--stoplist", default=None, help="Stoplist file")
@common_options
def synth_corpus(documents: Sequence[str], group_size: int, count: int, blocks: Optional[int],
                 words_per_block: int, **options) -> None:
    """Concatenate random documents and write the junctions as reference boundaries"""
    config = _run_config(options)
    seed = _require(config.seed, "--seed")
    out_dir = Path(_require(config.out, "--out"))
    if documents:
        texts = [_read_text(p) for p in documents]
    elif blocks:
        texts = synthesize_block_documents(blocks, words_per_block, seed=seed)
    else:
        raise ConfigError("give documents or --blocks")
    lexicon = _load_lexicon(config, required=False)
    os.makedirs(out_dir, exist_ok=True)

    rng = random.Random(seed)
    for index in range(count):
        synthetic = synthesize_eval_corpus(texts, group_size, rng.randrange(2 ** 32), lexicon)
        tokens = tokenize(synthetic.text, lexicon)
        char_offsets = [tokens[b].start for b in synthetic.segmentation.boundaries]
        with open(out_dir / f"synth_{index:03d}.txt", "w", encoding="utf-8") as f:
            f.write(synthetic.text)
        with open(out_dir / f"synth_{index:03d}.boundaries.tsv", "w", encoding="utf-8") as f:
            reports.write_reference_boundaries(f, synthetic.segmentation, char_offsets)


@cli.command("taxonomy-stats")
@click.option("--taxonomy", required=True, help="Taxonomy file")
@click.option("--out", default=None, help="JSON output (default stdout)")
def taxonomy_stats(taxonomy: str, out: Optional[str]) -> None:
    """Summary counts of a concept hierarchy"""
    with _open_out(out) as f:
        reports.dump_json(f, describe_taxonomy(load_taxonomy(taxonomy)))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line and map failures to exit codes"""
    try:
        result = cli.main(args=list(argv) if argv is not None else None,
                          prog_name="topictiler", standalone_mode=False)
    except click.exceptions.Abort:
        return EXIT_USAGE
    except click.ClickException as e:
        logger.error("%s", e.format_message())
        return EXIT_USAGE
    except (ConfigError, ValidationError) as e:
        logger.error("Configuration error: %s", e)
        return EXIT_USAGE
    except (TopicTilerError, OSError, UnicodeDecodeError) as e:
        logger.error("Data error: %s", e)
        return EXIT_DATA
    # --help and similar early exits hand back their own code
    return result if isinstance(result, int) else EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == '__main__':
    run()
