"""Triples, per-sample knowledge graphs, corpora, and file ingestion.

Entities and relations are interned into dense non-negative integer ids in
first-seen order, so loading the same file twice always produces the same
ids.
"""

import json
from dataclasses import dataclass, field
from typing import Iterator, NamedTuple, Optional

from .errors import ParseError, ValidationError


class Triple(NamedTuple):
    head: int
    relation: int
    tail: int


class Interner:
    """Bidirectional label <-> id table; ids are assigned densely from 0."""

    def __init__(self, labels=()):
        self._labels = []
        self._ids = {}
        for label in labels:
            self.intern(label)

    def intern(self, label: str) -> int:
        label = label.strip()
        if not label:
            raise ValidationError("empty label cannot be interned")
        existing = self._ids.get(label)
        if existing is not None:
            return existing
        new_id = len(self._labels)
        self._labels.append(label)
        self._ids[label] = new_id
        return new_id

    def label(self, id_: int) -> str:
        if not 0 <= id_ < len(self._labels):
            raise ValidationError("unknown intern id %d" % id_)
        return self._labels[id_]

    def id_of(self, label: str) -> Optional[int]:
        return self._ids.get(label.strip())

    def labels(self):
        return list(self._labels)

    def __len__(self):
        return len(self._labels)

    def __eq__(self, other):
        return isinstance(other, Interner) and self._labels == other._labels


@dataclass
class KnowledgeGraph:
    """Ordered triple list extracted from one sample."""

    triples: list
    sample_id: Optional[int] = None

    def __post_init__(self):
        seen = set()
        for t in self.triples:
            if t in seen:
                raise ValidationError(
                    "duplicate triple %r in sample %r" % (t, self.sample_id))
            seen.add(t)

    def triple_set(self):
        return set(self.triples)

    def __len__(self):
        return len(self.triples)


@dataclass
class Corpus:
    """Samples 1..N plus the intern tables resolving their ids."""

    samples: list = field(default_factory=list)
    entities: Interner = field(default_factory=Interner)
    relations: Interner = field(default_factory=Interner)

    @property
    def n_samples(self) -> int:
        return len(self.samples)

    def sample(self, sample_id: int) -> KnowledgeGraph:
        if not 1 <= sample_id <= len(self.samples):
            raise ValidationError("sample id %d out of range" % sample_id)
        return self.samples[sample_id - 1]

    def iter_triples(self) -> Iterator[Triple]:
        for kg in self.samples:
            yield from kg.triples

    def n_triples(self) -> int:
        return sum(len(kg) for kg in self.samples)


def _parse_jsonl_line(line, lineno):
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError("invalid JSON: %s" % exc, line=lineno) from exc
    if not isinstance(obj, dict) or "sample" not in obj or "triples" not in obj:
        raise ParseError("expected object with 'sample' and 'triples'", line=lineno)
    sample_id = obj["sample"]
    if not isinstance(sample_id, int) or sample_id < 1:
        raise ParseError("sample id must be a positive integer", line=lineno)
    triples = obj["triples"]
    if not isinstance(triples, list):
        raise ParseError("'triples' must be a list", line=lineno)
    out = []
    for entry in triples:
        if (not isinstance(entry, list) or len(entry) != 3
                or not all(isinstance(x, str) for x in entry)):
            raise ParseError("each triple must be [head, relation, tail] strings",
                             line=lineno)
        out.append(tuple(entry))
    return sample_id, out


def _parse_tsv_line(line, lineno):
    parts = line.split("\t")
    if len(parts) != 4:
        raise ParseError("expected sample<TAB>head<TAB>relation<TAB>tail",
                         line=lineno)
    try:
        sample_id = int(parts[0])
    except ValueError as exc:
        raise ParseError("sample id must be an integer", line=lineno) from exc
    if sample_id < 1:
        raise ParseError("sample id must be positive", line=lineno)
    return sample_id, [(parts[1], parts[2], parts[3])]


def load_corpus_lines(lines) -> Corpus:
    """Build a Corpus from JSONL or TSV lines (format sniffed per file)."""
    raw = {}  # sample id -> list of (h, r, t) label triples
    order = []  # sample ids in first-seen order, for duplicate detection
    fmt = None
    for lineno, line in enumerate(lines, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        line_fmt = "jsonl" if line.lstrip().startswith("{") else "tsv"
        if fmt is None:
            fmt = line_fmt
        elif fmt != line_fmt:
            raise ParseError("mixed JSONL and TSV lines", line=lineno)
        if fmt == "jsonl":
            sample_id, triples = _parse_jsonl_line(line, lineno)
            if sample_id in raw:
                raise ValidationError("duplicate sample id %d" % sample_id)
            raw[sample_id] = triples
            order.append(sample_id)
        else:
            sample_id, triples = _parse_tsv_line(line, lineno)
            raw.setdefault(sample_id, []).extend(triples)

    if not raw:
        raise ValidationError("empty corpus")
    n = max(raw)
    missing = sorted(set(range(1, n + 1)) - set(raw))
    if missing:
        raise ValidationError("gap in sample ids: missing %s" % missing)

    corpus = Corpus()
    # Interning follows sample-id order so the assignment is reproducible
    # regardless of how the file orders its lines.
    for sample_id in range(1, n + 1):
        triples = []
        for h, r, t in raw[sample_id]:
            triples.append(Triple(corpus.entities.intern(h),
                                  corpus.relations.intern(r),
                                  corpus.entities.intern(t)))
        corpus.samples.append(KnowledgeGraph(triples, sample_id=sample_id))
    return corpus


def load_corpus(path) -> Corpus:
    with open(path, "r", encoding="utf-8") as fh:
        return load_corpus_lines(fh)


def dump_corpus_lines(corpus: Corpus):
    for kg in corpus.samples:
        triples = [[corpus.entities.label(t.head),
                    corpus.relations.label(t.relation),
                    corpus.entities.label(t.tail)] for t in kg.triples]
        yield json.dumps({"sample": kg.sample_id, "triples": triples},
                         ensure_ascii=False)


def dump_corpus(corpus: Corpus, path):
    with open(path, "w", encoding="utf-8") as fh:
        for line in dump_corpus_lines(corpus):
            fh.write(line + "\n")
