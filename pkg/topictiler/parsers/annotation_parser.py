from dataclasses import dataclass, field
from typing import Dict, List, Optional, Set

from topictiler.errors import EvaluationError
from topictiler.evaluation import Segmentation


@dataclass
class DocumentAnnotation:
    doc_id: str
    concepts: List[str] = field(default_factory=list)  # in file order, without duplicates
    keywords: Set[str] = field(default_factory=set)
    line_number: int = 0

    @property
    def concept_ratio(self) -> Optional[float]:
        """Found concepts per keyword; None when the file carries no keywords"""
        if not self.keywords:
            return None
        return len(self.concepts) / len(self.keywords)


class ReferenceParser:
    """Reads ``doc_id<TAB>concept_id[<TAB>keyword]`` annotation files.

    An empty concept column records a keyword that maps to no concept.
    """

    def __init__(self, file_path: str = None, content: str = None):
        if file_path:
            with open(file_path, 'r', encoding='utf-8') as f:
                self.content = f.read()
        elif content is not None:
            self.content = content
        else:
            raise ValueError("Either file_path or content must be provided")

        self.documents: Dict[str, DocumentAnnotation] = {}
        self._parse()

    def _parse(self):
        for line_number, raw in enumerate(self.content.splitlines(), start=1):
            if not raw.strip() or raw.lstrip().startswith("#"):
                continue
            columns = [c.strip() for c in raw.split("\t")]
            if len(columns) not in (2, 3) or not columns[0]:
                raise EvaluationError("expected doc_id, concept_id and an optional keyword", line_number)
            doc_id, concept_id = columns[0], columns[1]
            document = self.documents.setdefault(doc_id, DocumentAnnotation(doc_id, line_number=line_number))
            if concept_id and concept_id not in document.concepts:
                document.concepts.append(concept_id)
            if len(columns) == 3 and columns[2]:
                document.keywords.add(columns[2])

    @property
    def doc_ids(self) -> List[str]:
        return list(self.documents)

    def get_concepts(self, doc_id: str) -> List[str]:
        document = self.documents.get(doc_id)
        return list(document.concepts) if document else []

    def filter_by_ratio(self, min_ratio: float) -> List[str]:
        """Documents whose concepts/keywords ratio reaches ``min_ratio``; keyword-less documents pass"""
        kept = []
        for doc_id, document in self.documents.items():
            ratio = document.concept_ratio
            if ratio is None or ratio >= min_ratio:
                kept.append(doc_id)
        return kept


def read_segmentation(file_path: str = None, content: str = None) -> Segmentation:
    """Rebuild a Segmentation from a boundary file written by the segment command"""
    if file_path:
        with open(file_path, 'r', encoding='utf-8') as f:
            content = f.read()
    elif content is None:
        raise ValueError("Either file_path or content must be provided")

    word_count = None
    offsets = []
    for line_number, raw in enumerate(content.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            fields = line[1:].split()
            if len(fields) == 2 and fields[0] == "word_count":
                try:
                    word_count = int(fields[1])
                except ValueError:
                    raise EvaluationError(f"bad word count {fields[1]!r}", line_number)
            continue
        columns = line.split("\t")
        if len(columns) != 4:
            raise EvaluationError("expected boundary, token_offset, char_offset, relevance", line_number)
        try:
            offsets.append(int(columns[1]))
        except ValueError:
            raise EvaluationError(f"bad token offset {columns[1]!r}", line_number)

    if word_count is None:
        raise EvaluationError("boundary file has no '# word_count' header")
    return Segmentation(word_count, tuple(offsets))
