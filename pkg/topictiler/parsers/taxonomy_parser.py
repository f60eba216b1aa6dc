"""
Reader and writer for the line-oriented taxonomy format.

    N<TAB>id<TAB>headword?<TAB>gloss?
    E<TAB>sub_id<TAB>super_id

Blank lines and lines starting with ``#`` are ignored.
"""

from typing import IO, Dict, Iterable, List, Tuple

from topictiler.entities import ConceptNode
from topictiler.errors import DuplicateConceptError, TaxonomyError


class TaxonomyParser:
    def __init__(self, file_path: str = None, content: str = None):
        if file_path:
            with open(file_path, 'r', encoding='utf-8') as f:
                self.content = f.read()
        elif content is not None:
            self.content = content
        else:
            raise ValueError("Either file_path or content must be provided")

        self.nodes: Dict[str, ConceptNode] = {}
        self.edges: List[Tuple[str, str]] = []  # (sub, super)
        self.edge_lines: List[int] = []
        self._parse()

    def _parse(self):
        for line_number, raw in enumerate(self.content.splitlines(), start=1):
            line = raw.rstrip("\r\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue

            columns = line.split("\t")
            kind = columns[0].strip()
            if kind == "N":
                if len(columns) < 2 or len(columns) > 4 or not columns[1].strip():
                    raise TaxonomyError("node line needs an id and at most a headword and a gloss", line_number)
                concept_id = columns[1].strip()
                if concept_id in self.nodes:
                    raise DuplicateConceptError(f"duplicate concept id {concept_id!r}", line_number)
                headword = columns[2].strip() if len(columns) > 2 else ""
                gloss = columns[3].strip() if len(columns) > 3 else ""
                self.nodes[concept_id] = ConceptNode(concept_id, headword or None, gloss or None)
            elif kind == "E":
                if len(columns) != 3 or not columns[1].strip() or not columns[2].strip():
                    raise TaxonomyError("edge line needs exactly a sub id and a super id", line_number)
                self.edges.append((columns[1].strip(), columns[2].strip()))
                self.edge_lines.append(line_number)
            else:
                raise TaxonomyError(f"unknown record type {kind!r}", line_number)


def write_taxonomy(out: IO[str], nodes: Iterable[ConceptNode], edges: Iterable[Tuple[str, str]]) -> None:
    """Write nodes then (sub, super) edges in the taxonomy format"""
    for node in nodes:
        out.write(f"N\t{node.id}\t{node.headword or ''}\t{node.gloss or ''}\n")
    for sub, sup in edges:
        out.write(f"E\t{sub}\t{sup}\n")
