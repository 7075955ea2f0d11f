import random

import hypothesis
import pytest

from typel.model import (
    And,
    Atomic,
    BOT,
    ConceptInclusion,
    DefeasibleInclusion,
    MalformedKB,
    RankedKB,
    Some,
    TOP,
)

hypothesis.settings.register_profile("fast", max_examples=20)
hypothesis.settings.register_profile("ci", max_examples=100)
hypothesis.settings.load_profile("fast")


CONCEPT_POOL = ["A", "B", "C", "D", "E", "F", "P", "Q"]
ROLE_POOL = ["r", "s"]


def random_concept(rng: random.Random, depth: int = 2):
    roll = rng.random()
    if depth == 0 or roll < 0.55:
        return Atomic(rng.choice(CONCEPT_POOL))
    if roll < 0.8:
        return And(random_concept(rng, depth - 1), random_concept(rng, depth - 1))
    if roll < 0.95:
        return Some(rng.choice(ROLE_POOL), random_concept(rng, depth - 1))
    return TOP


def random_kb(rng: random.Random, max_distinguished: int = 4, max_defeasible: int = 10) -> RankedKB:
    """Small random ranked KB; occasionally includes a disjointness axiom."""
    while True:
        strict = []
        for _ in range(rng.randint(0, 6)):
            strict.append(ConceptInclusion(random_concept(rng), random_concept(rng)))
        if rng.random() < 0.6:
            a, b = rng.sample(CONCEPT_POOL, 2)
            strict.append(ConceptInclusion(And(Atomic(a), Atomic(b)), BOT))
        n_dist = rng.randint(1, max_distinguished)
        dist = [Atomic(c) for c in rng.sample(CONCEPT_POOL, n_dist)]
        ranked = {}
        budget = rng.randint(n_dist, max_defeasible)
        per = max(1, budget // n_dist)
        for dc in dist:
            incs = []
            props = rng.sample(CONCEPT_POOL, min(len(CONCEPT_POOL), per))
            for p in props:
                incs.append(DefeasibleInclusion(dc, Atomic(p), rng.randint(0, 2)))
            ranked[dc] = incs
        try:
            return RankedKB(strict=strict, distinguished=dist, ranked=ranked)
        except MalformedKB:
            continue


@pytest.fixture
def rng():
    return random.Random(0xE1)
