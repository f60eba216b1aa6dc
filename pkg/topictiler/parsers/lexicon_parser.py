from typing import List, Optional, Set, Tuple

from topictiler.entities import InflectionRule, LemmaEntry
from topictiler.errors import LexiconError
from topictiler.lexicon import Lexicon, build_lexicon


def parse_rule_spec(spec: str, line_number: Optional[int] = None) -> Tuple[List[InflectionRule], List[str]]:
    """Parse the third lexicon column.

    ``-`` or empty: lemma only. ``=f1,f2,...``: irregular forms.
    Otherwise ``|``-separated suffix rules, each ``strip>append`` or a bare
    ``append``.
    """
    spec = spec.strip()
    if not spec or spec == "-":
        return [], []
    if spec.startswith("="):
        forms = [f.strip() for f in spec[1:].split(",") if f.strip()]
        if not forms:
            raise LexiconError("irregular form list is empty", line_number)
        return [], forms

    rules = []
    for part in spec.split("|"):
        part = part.strip()
        if not part:
            raise LexiconError(f"empty suffix rule in {spec!r}", line_number)
        if part.count(">") > 1:
            raise LexiconError(f"malformed suffix rule {part!r}", line_number)
        strip, _, append = part.rpartition(">")
        rules.append(InflectionRule(strip=strip, append=append))
    return rules, []


class LexiconParser:
    def __init__(self, file_path: str = None, content: str = None):
        """Initialize lexicon parser with either a file path or direct content."""
        if file_path:
            with open(file_path, 'r', encoding='utf-8') as f:
                self.content = f.read()
        elif content is not None:
            self.content = content
        else:
            raise ValueError("Either file_path or content must be provided")

        self.entries: List[LemmaEntry] = []
        self._parse()

    def _parse(self):
        """Parse TSV records: lemma, pos_tag, rule spec, comma-separated concept ids."""
        for line_number, raw in enumerate(self.content.splitlines(), start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue

            columns = line.split("\t")
            if len(columns) < 3 or len(columns) > 4:
                raise LexiconError(f"expected 3 or 4 tab-separated columns, got {len(columns)}", line_number)

            lemma, pos_tag, spec = (c.strip() for c in columns[:3])
            if not lemma:
                raise LexiconError("empty lemma", line_number)
            rules, forms = parse_rule_spec(spec, line_number)

            concepts = columns[3].strip() if len(columns) == 4 else ""
            concept_ids = [] if concepts in ("", "-") else [c.strip() for c in concepts.split(",") if c.strip()]

            self.entries.append(LemmaEntry(
                lemma=lemma,
                pos_tag=pos_tag,
                rules=rules,
                irregular_forms=forms,
                concept_ids=concept_ids,
                line_number=line_number,
            ))

    def get_entries_by_lemma(self, lemma: str) -> List[LemmaEntry]:
        return [e for e in self.entries if e.lemma == lemma]

    def get_entries_by_concept(self, concept_id: str) -> List[LemmaEntry]:
        return [e for e in self.entries if concept_id in e.concept_ids]


def load_stoplist(file_path: str = None, content: str = None) -> Set[str]:
    """One surface form per line; blank lines and ``#`` comments ignored"""
    if file_path:
        with open(file_path, 'r', encoding='utf-8') as f:
            content = f.read()
    elif content is None:
        raise ValueError("Either file_path or content must be provided")
    return {line.strip() for line in content.splitlines()
            if line.strip() and not line.lstrip().startswith("#")}


def load_lexicon(lexicon_path: str, stoplist_path: Optional[str] = None) -> Lexicon:
    parser = LexiconParser(lexicon_path)
    stoplist = load_stoplist(stoplist_path) if stoplist_path else set()
    return build_lexicon(parser.entries, stoplist)
