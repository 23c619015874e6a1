"""Relation-omission compression against a shared probability graph.

The sender omits a triple's relation when the receiver can re-derive it as
the unique argmax of the (conditional) relation distribution for the triple's
(head, tail) pair.  Round 1 uses unconditional probabilities; round r >= 2
conditions on (r-1)-tuples of previously omitted triples and repeats in
cycles until a cycle omits nothing.  Decompression replays the argmax in
message order, so the scheme is lossless by construction.
"""

import hashlib
import itertools
import struct
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

from .errors import (CorruptMessageError, IncompatibleKnowledgeError,
                     MessageDecodeError, SemcompError,
                     UndefinedProbabilityError, ValidationError)
from .kg import KnowledgeGraph, Triple
from .probgraph import ProbabilityGraph

WIRE_MAGIC = b"SCMP"
WIRE_VERSION = 1
DEFAULT_MAX_ROUND = 2


@dataclass(frozen=True)
class OmissionRecord:
    """One omitted relation: where it goes and which prior triples imply it.

    `conditions` are indices into the message's reconstruction order (full
    triples first, then omissions in list order); each referenced triple is
    reconstructable strictly before this record.
    """
    head: int
    tail: int
    round: int
    conditions: Tuple[int, ...] = ()

    def __post_init__(self):
        if self.round < 1:
            raise ValidationError("round must be >= 1")
        if len(self.conditions) != self.round - 1:
            raise ValidationError("round %d record needs %d conditions, got %d"
                                  % (self.round, self.round - 1,
                                     len(self.conditions)))


@dataclass
class CompressedMessage:
    graph_hash: bytes
    full_triples: List[Triple]
    omissions: List[OmissionRecord]

    @property
    def total_triples(self) -> int:
        return len(self.full_triples) + len(self.omissions)


@dataclass
class StageStats:
    """One compression stage: round 1, or one cycle of a later round."""
    round: int
    cycle: int  # 0 for round 1, else 1-based cycle number
    candidates: int  # triples still unomitted when the stage began
    omitted: int


@dataclass
class CompressionReport:
    stages: List[StageStats] = field(default_factory=list)
    comparison_count: int = 0

    def observed_ratios(self) -> List[float]:
        """Per-stage omitted/candidates ratios (zero-candidate stages skipped)."""
        return [s.omitted / s.candidates for s in self.stages if s.candidates]

    def omitted_total(self) -> int:
        return sum(s.omitted for s in self.stages)


def _unique_max_relation(counts) -> Optional[int]:
    """Relation id with the strictly largest count, or None on a tie."""
    best_rid, best, tie = None, -1, False
    for rid, count in counts:
        if count > best:
            best_rid, best, tie = rid, count, False
        elif count == best:
            tie = True
    return None if tie else best_rid


def compress(g: ProbabilityGraph, kg: KnowledgeGraph,
             max_round: int = DEFAULT_MAX_ROUND):
    """Compress one knowledge graph; returns (CompressedMessage, CompressionReport).

    Deterministic: candidates are scanned in input order and condition tuples
    in ascending index order, with the first qualifying tuple recorded.
    """
    if max_round < 1:
        raise ValidationError("max_round must be >= 1")

    triples = list(kg.triples)
    report = CompressionReport()

    # Triples whose pair (or relation) is absent from the graph can never be
    # reconstructed, so they are permanent pass-through full triples.
    candidates = [t for t in triples if g.has_triple(t)]
    remaining_total = len(triples)

    omitted: List[Triple] = []          # omission order
    records: List[OmissionRecord] = []  # conditions as positions in `omitted`

    # Round 1: unconditional unique-mode relations.
    round1_omitted = 0
    still: List[Triple] = []
    for t in candidates:
        quad = g.pair(t.head, t.tail)
        counts = [(rid, len(s)) for rid, s in quad.relations]
        report.comparison_count += len(counts)
        if _unique_max_relation(counts) == t.relation:
            omitted.append(t)
            records.append(OmissionRecord(t.head, t.tail, 1))
            round1_omitted += 1
        else:
            still.append(t)
    report.stages.append(StageStats(1, 0, remaining_total, round1_omitted))
    remaining_total -= round1_omitted
    candidates = still

    for round_no in range(2, max_round + 1):
        width = round_no - 1
        cycle = 0
        while True:
            cycle += 1
            snapshot_size = len(omitted)  # O-set frozen for this cycle
            cycle_omitted = 0
            still = []
            for t in candidates:
                quad = g.pair(t.head, t.tail)
                rel_supports = [(rid, set(s)) for rid, s in quad.relations]
                union = set(quad.union_support())
                chosen = None
                for combo in itertools.combinations(range(snapshot_size), width):
                    cond = None
                    for idx in combo:
                        c_triple = omitted[idx]
                        c_support = set(g.pair(c_triple.head, c_triple.tail)
                                        .support(c_triple.relation))
                        cond = c_support if cond is None else cond & c_support
                    report.comparison_count += len(rel_supports)
                    if not cond & union:
                        continue  # undefined row: condition unusable
                    counts = [(rid, len(cond & s)) for rid, s in rel_supports]
                    if _unique_max_relation(counts) == t.relation:
                        chosen = combo
                        break
                if chosen is not None:
                    omitted.append(t)
                    records.append(OmissionRecord(t.head, t.tail, round_no,
                                                  conditions=chosen))
                    cycle_omitted += 1
                else:
                    still.append(t)
            report.stages.append(
                StageStats(round_no, cycle, remaining_total, cycle_omitted))
            remaining_total -= cycle_omitted
            candidates = still
            if cycle_omitted == 0:
                break

    omitted_set = set(omitted)
    full = [t for t in triples if t not in omitted_set]
    offset = len(full)
    final_records = [
        OmissionRecord(r.head, r.tail, r.round,
                       conditions=tuple(offset + i for i in r.conditions))
        for r in records
    ]
    msg = CompressedMessage(g.content_hash, full, final_records)
    return msg, report


def decompress(g: ProbabilityGraph, msg: CompressedMessage) -> KnowledgeGraph:
    """Reconstruct the original knowledge graph (as a triple set)."""
    if msg.graph_hash != g.content_hash:
        raise IncompatibleKnowledgeError(
            "message was compressed against different background knowledge")

    recon: List[Triple] = list(msg.full_triples)
    for i, rec in enumerate(msg.omissions):
        limit = len(msg.full_triples) + i
        if any(not 0 <= c < limit for c in rec.conditions):
            raise CorruptMessageError(
                "condition index beyond reconstructable prefix")
        given = [recon[c] for c in rec.conditions]
        try:
            quad = g.pair(rec.head, rec.tail)
            if given:
                cond = None
                for c_triple in given:
                    c_support = set(g.pair(c_triple.head, c_triple.tail)
                                    .support(c_triple.relation))
                    cond = c_support if cond is None else cond & c_support
                if not cond & set(quad.union_support()):
                    raise UndefinedProbabilityError("empty conditioning event")
                counts = [(rid, len(cond & set(s))) for rid, s in quad.relations]
            else:
                counts = [(rid, len(s)) for rid, s in quad.relations]
        except SemcompError as exc:
            raise CorruptMessageError(str(exc)) from exc
        rid = _unique_max_relation(counts)
        if rid is None:
            raise CorruptMessageError(
                "ambiguous argmax while reconstructing (%d, %d)"
                % (rec.head, rec.tail))
        recon.append(Triple(rec.head, rid, rec.tail))

    try:
        return KnowledgeGraph(recon)
    except ValidationError as exc:
        raise CorruptMessageError(str(exc)) from exc


# -- wire format ------------------------------------------------------------
#
# header: magic 'SCMP', version u16, graph_hash 32B, J u32, E u32,
#         digest 32B = sha256 over everything else (header fields + body),
#         so any single corrupted byte is detected
# body:   (J - E) full triples as three u32 ids, then E omission records as
#         head u32, tail u32, round u8, (round - 1) u32 condition indices.
# All integers little-endian.

_HEADER = struct.Struct("<4sH32sII32s")


def _message_digest(magic, version, graph_hash, j, e, body):
    prefix = struct.pack("<4sH32sII", magic, version, graph_hash, j, e)
    return hashlib.sha256(prefix + body).digest()


def encode_message(msg: CompressedMessage) -> bytes:
    body = bytearray()
    for t in msg.full_triples:
        body.extend(struct.pack("<III", t.head, t.relation, t.tail))
    for rec in msg.omissions:
        body.extend(struct.pack("<IIB", rec.head, rec.tail, rec.round))
        for c in rec.conditions:
            body.extend(struct.pack("<I", c))
    body = bytes(body)
    digest = _message_digest(WIRE_MAGIC, WIRE_VERSION, msg.graph_hash,
                             msg.total_triples, len(msg.omissions), body)
    header = _HEADER.pack(WIRE_MAGIC, WIRE_VERSION, msg.graph_hash,
                          msg.total_triples, len(msg.omissions), digest)
    return header + body


def decode_message(data: bytes) -> CompressedMessage:
    if len(data) < _HEADER.size:
        raise MessageDecodeError("buffer shorter than header")
    magic, version, graph_hash, j, e, digest = _HEADER.unpack_from(data)
    if magic != WIRE_MAGIC:
        raise MessageDecodeError("bad magic bytes")
    if version != WIRE_VERSION:
        raise MessageDecodeError("unsupported wire version %d" % version)
    if e > j:
        raise MessageDecodeError("omission count exceeds triple count")
    body = data[_HEADER.size:]
    if _message_digest(magic, version, graph_hash, j, e, body) != digest:
        raise MessageDecodeError("message digest mismatch")

    pos = 0
    full = []
    for _ in range(j - e):
        if pos + 12 > len(body):
            raise MessageDecodeError("truncated full-triple section")
        h, r, t = struct.unpack_from("<III", body, pos)
        pos += 12
        full.append(Triple(h, r, t))
    omissions = []
    for i in range(e):
        if pos + 9 > len(body):
            raise MessageDecodeError("truncated omission record")
        h, t, round_no = struct.unpack_from("<IIB", body, pos)
        pos += 9
        if round_no < 1:
            raise MessageDecodeError("invalid round 0")
        n_cond = round_no - 1
        if pos + 4 * n_cond > len(body):
            raise MessageDecodeError("truncated condition list")
        conds = struct.unpack_from("<%dI" % n_cond, body, pos) if n_cond else ()
        pos += 4 * n_cond
        if any(c >= (j - e) + i for c in conds):
            raise MessageDecodeError("forward condition reference")
        omissions.append(OmissionRecord(h, t, round_no, conditions=tuple(conds)))
    if pos != len(body):
        raise MessageDecodeError("trailing bytes after message body")
    return CompressedMessage(graph_hash, full, omissions)
