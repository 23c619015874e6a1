"""Shared builders and independent counting oracles."""

import json
import random
from fractions import Fraction

import pytest

from semcomp.kg import load_corpus_lines


def corpus_from_samples(samples):
    """samples: list of lists of (head, relation, tail) label triples."""
    lines = []
    for i, triples in enumerate(samples, start=1):
        lines.append(json.dumps(
            {"sample": i, "triples": [list(t) for t in triples]}))
    return load_corpus_lines(lines)


def random_corpus(rng: random.Random, n_samples=None, n_entities=6,
                  n_relations=4, max_triples=12):
    """Small dense corpus; low vocab so pairs recur across samples."""
    if n_samples is None:
        n_samples = rng.randint(1, 20)
    entities = ["e%d" % i for i in range(n_entities)]
    relations = ["r%d" % i for i in range(n_relations)]
    samples = []
    for _ in range(n_samples):
        n = rng.randint(1, max_triples)
        triples = set()
        for _ in range(n):
            h = rng.choice(entities)
            t = rng.choice(entities)
            r = rng.choice(relations)
            triples.add((h, r, t))
        samples.append(sorted(triples))
    return corpus_from_samples(samples)


# -- brute-force per-sample counting oracle ---------------------------------

def _samples_with(corpus, triple):
    return {kg.sample_id for kg in corpus.samples if triple in kg.triples}


def _pair_relations(corpus, head, tail):
    rels = set()
    for kg in corpus.samples:
        for t in kg.triples:
            if t.head == head and t.tail == tail:
                rels.add(t.relation)
    return sorted(rels)


def oracle_prob(corpus, triple):
    from semcomp.kg import Triple
    num = len(_samples_with(corpus, triple))
    denom = sum(
        len(_samples_with(corpus, Triple(triple.head, r, triple.tail)))
        for r in _pair_relations(corpus, triple.head, triple.tail))
    return Fraction(num, denom)


def oracle_cond_prob(corpus, target, given):
    """Set counting straight from the per-sample membership definition.

    Returns None when the denominator is empty (undefined probability).
    """
    from semcomp.kg import Triple
    if not given:
        return oracle_prob(corpus, target)
    cond = None
    for g in given:
        s = _samples_with(corpus, g)
        cond = s if cond is None else cond & s
    union = set()
    for r in _pair_relations(corpus, target.head, target.tail):
        union |= _samples_with(corpus, Triple(target.head, r, target.tail))
    denom = len(cond & union)
    if denom == 0:
        return None
    return Fraction(len(_samples_with(corpus, target) & cond), denom)


@pytest.fixture
def rng():
    return random.Random(20240817)
