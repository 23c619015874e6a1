"""Shared probability graph: merged quadruple store and probability queries.

Each (head, tail) pair maps to one quadruple holding the candidate relations
with the sample sets that support them.  Probabilities are exact integer-count
ratios (fractions.Fraction) so argmax comparisons are tie-exact.
"""

import hashlib
import json
import struct
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .errors import (GraphDecodeError, PairNotFoundError, RelationNotFoundError,
                     UndefinedProbabilityError, ValidationError)
from .kg import Corpus, Interner, Triple

FORMAT_MAGIC = b"SPGR"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class Quadruple:
    head: int
    tail: int
    # (relation id, sorted tuple of supporting sample ids), sorted by relation
    relations: Tuple[Tuple[int, Tuple[int, ...]], ...]

    def support(self, relation: int) -> Tuple[int, ...]:
        for rid, samples in self.relations:
            if rid == relation:
                return samples
        raise RelationNotFoundError(
            "relation %d not present on pair (%d, %d)"
            % (relation, self.head, self.tail))

    def relation_ids(self):
        return [rid for rid, _ in self.relations]

    def union_support(self) -> Tuple[int, ...]:
        members = set()
        for _, samples in self.relations:
            members.update(samples)
        return tuple(sorted(members))


class ProbabilityGraph:
    """Immutable after build; every query is read-only."""

    def __init__(self, quadruples: Dict[Tuple[int, int], Quadruple],
                 n_samples: int, entities: Interner, relations: Interner):
        self.quadruples = quadruples
        self.n_samples = n_samples
        self.entities = entities
        self.relations = relations
        self._hash: Optional[bytes] = None

    @property
    def n_pairs(self) -> int:
        return len(self.quadruples)

    def pair(self, head: int, tail: int) -> Quadruple:
        quad = self.quadruples.get((head, tail))
        if quad is None:
            raise PairNotFoundError("no quadruple for pair (%d, %d)" % (head, tail))
        return quad

    def has_pair(self, head: int, tail: int) -> bool:
        return (head, tail) in self.quadruples

    def has_triple(self, triple: Triple) -> bool:
        quad = self.quadruples.get((triple.head, triple.tail))
        return quad is not None and triple.relation in quad.relation_ids()

    @property
    def content_hash(self) -> bytes:
        if self._hash is None:
            self._hash = hashlib.sha256(self._body_bytes()).digest()
        return self._hash

    # -- probability queries ------------------------------------------------

    def prob(self, head: int, relation: int, tail: int) -> Fraction:
        """Unconditional relation probability |N_r| / sum over the pair."""
        quad = self.pair(head, tail)
        total = sum(len(s) for _, s in quad.relations)
        return Fraction(len(quad.support(relation)), total)

    def cond_prob(self, target: Triple, given) -> Fraction:
        """Probability of the target relation given a set of known triples.

        The conditioning event is the intersection of the supports of all
        `given` triples; empty `given` degenerates to the unconditional
        probability.  Raises UndefinedProbabilityError when no conditioning
        sample touches any relation on the target pair.
        """
        given = list(given)
        if not given:
            return self.prob(target.head, target.relation, target.tail)
        quad = self.pair(target.head, target.tail)
        target_support = set(quad.support(target.relation))

        cond = None
        for g_triple in given:
            g_support = set(self.pair(g_triple.head, g_triple.tail)
                            .support(g_triple.relation))
            cond = g_support if cond is None else cond & g_support

        denom = len(cond & set(quad.union_support()))
        if denom == 0:
            raise UndefinedProbabilityError(
                "no sample satisfies the conditions and the target pair")
        return Fraction(len(target_support & cond), denom)

    def relation_distribution(self, head: int, tail: int) -> List[Tuple[int, Fraction]]:
        quad = self.pair(head, tail)
        total = sum(len(s) for _, s in quad.relations)
        return [(rid, Fraction(len(s), total)) for rid, s in quad.relations]

    # -- serialization ------------------------------------------------------

    def _body_bytes(self) -> bytes:
        out = bytearray()

        def put_table(interner):
            labels = interner.labels()
            out.extend(struct.pack("<I", len(labels)))
            for label in labels:
                raw = label.encode("utf-8")
                out.extend(struct.pack("<I", len(raw)))
                out.extend(raw)

        put_table(self.entities)
        put_table(self.relations)
        for (head, tail) in sorted(self.quadruples):
            quad = self.quadruples[(head, tail)]
            out.extend(struct.pack("<III", head, tail, len(quad.relations)))
            for rid, samples in quad.relations:
                out.extend(struct.pack("<II", rid, len(samples)))
                prev = 0
                for sid in samples:  # delta-encoded sorted sample ids
                    out.extend(struct.pack("<I", sid - prev))
                    prev = sid
        return bytes(out)

    def to_bytes(self) -> bytes:
        body = self._body_bytes()
        header = FORMAT_MAGIC + struct.pack(
            "<HII", FORMAT_VERSION, self.n_samples, len(self.quadruples))
        return header + hashlib.sha256(body).digest() + body

    @classmethod
    def from_bytes(cls, data: bytes) -> "ProbabilityGraph":
        view = memoryview(data)
        pos = 0

        def take(n):
            nonlocal pos
            if pos + n > len(view):
                raise GraphDecodeError("truncated graph file")
            chunk = view[pos:pos + n]
            pos += n
            return chunk

        if bytes(take(4)) != FORMAT_MAGIC:
            raise GraphDecodeError("bad magic bytes")
        version, n_samples, n_pairs = struct.unpack("<HII", take(10))
        if version != FORMAT_VERSION:
            raise GraphDecodeError("unsupported format version %d" % version)
        digest = bytes(take(32))
        body = bytes(view[pos:])
        if hashlib.sha256(body).digest() != digest:
            raise GraphDecodeError("content hash mismatch")

        def take_table():
            (count,) = struct.unpack("<I", take(4))
            labels = []
            for _ in range(count):
                (ln,) = struct.unpack("<I", take(4))
                try:
                    labels.append(bytes(take(ln)).decode("utf-8"))
                except UnicodeDecodeError as exc:
                    raise GraphDecodeError("invalid label encoding") from exc
            return Interner(labels)

        entities = take_table()
        relations = take_table()
        quadruples = {}
        for _ in range(n_pairs):
            head, tail, n_rel = struct.unpack("<III", take(12))
            rels = []
            for _ in range(n_rel):
                rid, n_sup = struct.unpack("<II", take(8))
                samples = []
                prev = 0
                for _ in range(n_sup):
                    (delta,) = struct.unpack("<I", take(4))
                    prev += delta
                    samples.append(prev)
                rels.append((rid, tuple(samples)))
            quadruples[(head, tail)] = Quadruple(head, tail, tuple(rels))
        if pos != len(view):
            raise GraphDecodeError("trailing bytes after graph body")
        graph = cls(quadruples, n_samples, entities, relations)
        graph._hash = digest
        return graph

    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path) -> "ProbabilityGraph":
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())

    def to_json(self) -> str:
        """Debug export mirroring the binary content."""
        return json.dumps({
            "version": FORMAT_VERSION,
            "n_samples": self.n_samples,
            "content_hash": self.content_hash.hex(),
            "entities": self.entities.labels(),
            "relations": self.relations.labels(),
            "quadruples": [
                {"head": q.head, "tail": q.tail,
                 "relations": [[rid, list(s)] for rid, s in q.relations]}
                for (_, _), q in sorted(self.quadruples.items())
            ],
        }, indent=2)


def build(corpus: Corpus) -> ProbabilityGraph:
    """Merge a corpus into the shared probability graph."""
    if corpus.n_samples == 0 or corpus.n_triples() == 0:
        raise ValidationError("cannot build probability graph from empty corpus")
    supports: Dict[Tuple[int, int], Dict[int, set]] = {}
    for kg in corpus.samples:
        for triple in kg.triples:
            pair = supports.setdefault((triple.head, triple.tail), {})
            pair.setdefault(triple.relation, set()).add(kg.sample_id)

    quadruples = {}
    for (head, tail), rels in supports.items():
        packed = tuple((rid, tuple(sorted(rels[rid]))) for rid in sorted(rels))
        quadruples[(head, tail)] = Quadruple(head, tail, packed)
    return ProbabilityGraph(quadruples, corpus.n_samples,
                            Interner(corpus.entities.labels()),
                            Interner(corpus.relations.labels()))
