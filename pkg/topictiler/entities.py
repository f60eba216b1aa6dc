from collections import Counter
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from topictiler.errors import LexiconError


@dataclass(frozen=True)
class InflectionRule:
    """Suffix rule: remove ``strip`` from the end of the lemma, then add ``append``"""
    strip: str
    append: str

    def apply(self, lemma: str) -> str:
        if len(self.strip) > len(lemma):
            raise LexiconError(f"strip suffix {self.strip!r} is longer than lemma {lemma!r}")
        if self.strip and not lemma.endswith(self.strip):
            raise LexiconError(f"lemma {lemma!r} does not end with {self.strip!r}")
        form = lemma[:len(lemma) - len(self.strip)] + self.append
        if not form:
            raise LexiconError(f"rule {self.strip!r}>{self.append!r} yields an empty form for {lemma!r}")
        return form


@dataclass
class LemmaEntry:
    """One lexicon record: a lemma with its tag, inflections and concept links"""
    lemma: str
    pos_tag: str
    rules: List[InflectionRule] = field(default_factory=list)
    irregular_forms: List[str] = field(default_factory=list)
    concept_ids: List[str] = field(default_factory=list)  # may be empty
    line_number: int = 0  # source line in the lexicon file, 0 when built in memory

    def surface_forms(self) -> List[str]:
        """All surface forms of this entry, the lemma first, without duplicates"""
        if not self.lemma:
            raise LexiconError("empty lemma")
        if self.rules and self.irregular_forms:
            raise LexiconError(f"entry {self.lemma!r} mixes suffix rules and irregular forms")
        forms = [self.lemma]
        forms.extend(rule.apply(self.lemma) for rule in self.rules)
        forms.extend(self.irregular_forms)
        return list(dict.fromkeys(forms))


@dataclass(frozen=True)
class LemmaReading:
    """A (lemma, tag, concepts) reading attached to a token"""
    lemma: str
    pos_tag: str
    concept_ids: Tuple[str, ...] = ()


@dataclass
class Token:
    surface: str
    start: int  # character offset of the first character
    end: int  # character offset one past the last character
    lemma_candidates: List[LemmaReading] = field(default_factory=list)
    is_stopword: bool = False

    @property
    def char_span(self) -> Tuple[int, int]:
        return self.start, self.end

    @property
    def is_unknown(self) -> bool:
        return not self.lemma_candidates


@dataclass(frozen=True)
class ConceptNode:
    id: str
    headword: Optional[str] = None
    gloss: Optional[str] = None

    @property
    def is_anonymous(self) -> bool:
        return not self.headword and not self.gloss

    @property
    def label(self) -> str:
        return self.headword or self.id


@dataclass
class PathStats:
    """Root-path and leaf-path statistics of one concept"""
    concept: str
    n_up: int  # distinct paths to any root
    n_down: int  # distinct paths to covered leaves
    up_lengths: Counter  # edge count -> number of root paths with that length
    down_lengths: Counter  # edge count -> number of leaf paths with that length
    root_distance: float  # normalized distance to the root, in [0, 1]
    leaf_distance: float  # normalized separation from the leaves, in [0, 1]


@dataclass(frozen=True)
class Segment:
    """A run of consecutive tokens; token_end is exclusive"""
    index: int
    token_start: int
    token_end: int
    char_start: int
    char_end: int

    def __len__(self) -> int:
        return self.token_end - self.token_start
