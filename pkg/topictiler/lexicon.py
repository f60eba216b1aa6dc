"""
Lexicon construction, longest-match tokenization and stoplist filtering.

Surface forms are generated from lemma entries and their suffix rules or
irregular forms. Matching is case-insensitive; tokens keep the original
casing and character offsets of the source text.
"""

import logging
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

from topictiler.entities import LemmaEntry, LemmaReading, Token
from topictiler.errors import LexiconError

logger = logging.getLogger("topictiler.lexicon")

WORD_JOINERS = "'-"


def fold_case(text: str) -> str:
    """Lowercase character by character so offsets survive the mapping"""
    return "".join(ch.lower() if len(ch.lower()) == 1 else ch for ch in text)


class Lexicon:
    """Immutable surface-form index over a list of lemma entries"""

    def __init__(self, entries: List[LemmaEntry], surface_index: Dict[str, List[LemmaEntry]],
                 stoplist: Iterable[str], rejected: Optional[List[Tuple[int, LemmaEntry, str]]] = None):
        self.entries = list(entries)
        self.surface_index = surface_index
        self.stoplist: FrozenSet[str] = frozenset(stoplist)
        self.rejected = list(rejected or [])  # (entry index, entry, reason)
        self._stop_keys = frozenset(fold_case(s) for s in self.stoplist)
        # Candidate match lengths, longest first
        self._lengths = sorted({len(key) for key in surface_index}, reverse=True)

    @classmethod
    def empty(cls, stoplist: Iterable[str] = ()) -> "Lexicon":
        return cls([], {}, stoplist)

    def __len__(self) -> int:
        return len(self.surface_index)

    def __contains__(self, surface: str) -> bool:
        return fold_case(surface) in self.surface_index

    def lookup(self, surface: str) -> List[LemmaReading]:
        """Readings of a surface form, in entry order; empty when unknown"""
        readings = [
            LemmaReading(entry.lemma, entry.pos_tag, tuple(entry.concept_ids))
            for entry in self.surface_index.get(fold_case(surface), [])
        ]
        return list(dict.fromkeys(readings))

    def is_stopword(self, surface: str) -> bool:
        return fold_case(surface) in self._stop_keys

    def flexions(self) -> List[Tuple[str, LemmaReading]]:
        """Every (surface, reading) pair of the index, sorted"""
        pairs = []
        for surface, entries in self.surface_index.items():
            for entry in entries:
                pairs.append((surface, LemmaReading(entry.lemma, entry.pos_tag, tuple(entry.concept_ids))))
        return sorted(pairs, key=lambda p: (p[0], p[1].lemma, p[1].pos_tag, p[1].concept_ids))

    def match_end(self, text: str, folded: str, start: int) -> Optional[int]:
        """End offset of the longest lexicon surface starting at ``start``"""
        remaining = len(text) - start
        for length in self._lengths:
            if length > remaining:
                continue
            end = start + length
            if end < len(text) and _is_word_char(text, end):
                continue
            if folded[start:end] in self.surface_index:
                return end
        return None


def build_lexicon(entries: Iterable[LemmaEntry], stoplist: Iterable[str] = ()) -> Lexicon:
    """Expand every entry into its surface forms and index them.

    Entries whose rules cannot be applied are skipped and recorded in
    ``Lexicon.rejected`` together with their position in ``entries``.
    """
    entries = list(entries)
    index: Dict[str, List[LemmaEntry]] = {}
    rejected = []
    irregular_count = 0
    for position, entry in enumerate(entries):
        try:
            forms = entry.surface_forms()
        except LexiconError as e:
            logger.warning("Rejected lexicon entry %d (%r, line %d): %s",
                           position, entry.lemma, entry.line_number, e)
            rejected.append((position, entry, str(e)))
            continue
        irregular_count += len(entry.irregular_forms)
        for form in forms:
            bucket = index.setdefault(fold_case(form), [])
            if entry not in bucket:
                bucket.append(entry)

    logger.info("Lexicon built: %d entries, %d irregular forms, %d surface forms, %d rejected",
                len(entries) - len(rejected), irregular_count, len(index), len(rejected))
    return Lexicon(entries, index, stoplist, rejected)


def _is_word_char(text: str, i: int) -> bool:
    ch = text[i]
    if ch.isalnum():
        return True
    # Apostrophes and hyphens only count inside a word
    return (ch in WORD_JOINERS and 0 < i < len(text) - 1
            and text[i - 1].isalnum() and text[i + 1].isalnum())


def tokenize(text: str, lexicon: Lexicon, pos_filter: Optional[Set[str]] = None) -> List[Token]:
    """Split text into tokens, preferring the longest lexicon surface at each word start.

    Characters that are not part of a word separate tokens and are never
    returned, unless they belong to a lexicon compound. A word matching no
    surface becomes one unknown token. ``pos_filter`` restricts readings to
    the given tags.
    """
    folded = fold_case(text)
    tokens: List[Token] = []
    pos = 0
    while pos < len(text):
        if not _is_word_char(text, pos):
            pos += 1
            continue

        end = lexicon.match_end(text, folded, pos)
        if end is None:
            end = pos + 1
            while end < len(text) and _is_word_char(text, end):
                end += 1
            readings = []
        else:
            readings = lexicon.lookup(text[pos:end])
            if pos_filter is not None:
                readings = [r for r in readings if r.pos_tag in pos_filter]

        surface = text[pos:end]
        tokens.append(Token(surface, pos, end, readings, lexicon.is_stopword(surface)))
        pos = end
    return tokens


def filter_stopwords(tokens: List[Token], lexicon: Lexicon) -> List[Token]:
    return [token for token in tokens if not lexicon.is_stopword(token.surface)]
