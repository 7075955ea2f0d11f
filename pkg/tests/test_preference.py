import itertools
import random

import pytest

from typel.fixtures import horse_kb, student_kb
from typel.materialize import saturate, translate
from typel.model import UnknownConcept, normalize
from typel.preference import (
    OrderResult,
    PreferenceContext,
    specificity,
)

PREF = OrderResult.STRICTLY_PREFERRED
DISPREF = OrderResult.STRICTLY_DISPREFERRED
EQ = OrderResult.EQUIVALENT
INC = OrderResult.INCOMPARABLE


def leq(ctx, a, b, c):
    return ctx.compare_wrt(a, b, c) in (PREF, EQ)


# ---------------------------------------------------------------------------
# randomized structures for the law suites
# ---------------------------------------------------------------------------

def random_context(rng: random.Random, n_concepts=4, n_targets=6) -> PreferenceContext:
    concepts = [f"K{i}" for i in range(n_concepts)]
    targets = [f"t{i}" for i in range(n_targets)]
    inclusions = {}
    for c in concepts:
        props = rng.sample(targets, rng.randint(1, n_targets))
        inclusions[c] = [(p, rng.choice([0, 1, 1, 2, 5])) for p in props]
        # one target may not carry two ranks for the same concept
        seen = {}
        inclusions[c] = [
            (p, seen.setdefault(p, r)) for p, r in inclusions[c]
        ]
    # random strict partial order as specificity: transitive closure of a DAG
    edges = set()
    for i in range(n_concepts):
        for j in range(i + 1, n_concepts):
            if rng.random() < 0.3:
                edges.add((concepts[i], concepts[j]))
    changed = True
    while changed:
        changed = False
        for (a, b), (c, d) in itertools.product(list(edges), repeat=2):
            if b == c and (a, d) not in edges:
                edges.add((a, d))
                changed = True
    return PreferenceContext(inclusions, edges, concept_order=concepts)


def random_profile(ctx: PreferenceContext, rng: random.Random, name: str):
    targets = sorted({t for incs in ctx.inclusions.values() for t, _ in incs})
    mem = [c for c in ctx.concepts if rng.random() < 0.6]
    sat = [t for t in targets if rng.random() < 0.5]
    return ctx.profile(name, mem, sat)


# ---------------------------------------------------------------------------
# per-concept order
# ---------------------------------------------------------------------------

class TestCompareWrt:
    def test_horse_fixture_spirit_beats_buddy(self):
        nkb = normalize(horse_kb())
        ctx = PreferenceContext.from_kb(nkb)
        closure = saturate(translate(nkb))
        spirit = ctx.profile_from_closure(closure, "spirit")
        buddy = ctx.profile_from_closure(closure, "buddy")
        assert ctx.compare_wrt(spirit, buddy, "Horse") is PREF
        ex = ctx.explain(spirit, buddy)
        rank_rows = dict(
            (r, (a, b)) for r, a, b in ex.per_concept[0].rank_counts
        )
        assert rank_rows[2] == (1, 0)  # the deciding rank
        assert ex.result is PREF

    def test_identical_profiles_equivalent(self):
        nkb = normalize(student_kb())
        ctx = PreferenceContext.from_kb(nkb)
        p = ctx.profile("x", ["Student"], ["Young"])
        assert ctx.compare_wrt(p, p, "Student") is EQ

    def test_two_non_instances_equivalent(self):
        nkb = normalize(student_kb())
        ctx = PreferenceContext.from_kb(nkb)
        # members satisfying different things, but neither is a Student
        p1 = ctx.profile("x", ["Employee"], ["NotYoung"])
        p2 = ctx.profile("y", ["Employee"], [])
        assert ctx.compare_wrt(p1, p2, "Student") is EQ

    def test_member_satisfying_all_matches_non_member(self):
        nkb = normalize(student_kb())
        ctx = PreferenceContext.from_kb(nkb)
        all_student = [t for t, _ in nkb.ranked["Student"]]
        member = ctx.profile("x", ["Student"], all_student)
        outsider = ctx.profile("y", [], [])
        assert ctx.compare_wrt(member, outsider, "Student") is EQ

    def test_unknown_concept_raises(self):
        nkb = normalize(student_kb())
        ctx = PreferenceContext.from_kb(nkb)
        p = ctx.profile("x", [], [])
        with pytest.raises(UnknownConcept):
            ctx.compare_wrt(p, p, "Nope")

    def test_total_preorder_laws(self, rng):
        for trial in range(60):
            local = random.Random(5000 + trial)
            ctx = random_context(local)
            ps = [random_profile(ctx, local, f"p{i}") for i in range(3)]
            for c in ctx.concepts:
                a, b, d = ps
                # totality + reflexivity
                assert leq(ctx, a, a, c)
                assert leq(ctx, a, b, c) or leq(ctx, b, a, c)
                # transitivity of <=
                for x, y, z in itertools.permutations(ps, 3):
                    if leq(ctx, x, y, c) and leq(ctx, y, z, c):
                        assert leq(ctx, x, z, c)
                # modularity of <
                for x, y, z in itertools.permutations(ps, 3):
                    if ctx.compare_wrt(x, y, c) is PREF:
                        assert (
                            ctx.compare_wrt(x, z, c) is PREF
                            or ctx.compare_wrt(z, y, c) is PREF
                        )


# ---------------------------------------------------------------------------
# specificity
# ---------------------------------------------------------------------------

class TestSpecificity:
    def test_student_hierarchy(self):
        nkb = normalize(student_kb())
        assert specificity(nkb, "PhDStudent", "Student")
        assert not specificity(nkb, "Student", "PhDStudent")

    def test_irreflexive(self):
        nkb = normalize(student_kb())
        for c in nkb.distinguished:
            assert not specificity(nkb, c, c)

    def test_unknown_concept(self):
        nkb = normalize(student_kb())
        with pytest.raises(UnknownConcept):
            specificity(nkb, "Employee", "Adult")


# ---------------------------------------------------------------------------
# global preference
# ---------------------------------------------------------------------------

class TestGlobalCompare:
    def test_specificity_override_wins(self):
        # Both are typical-ish students and PhD students; x keeps the
        # no-scholarship default, y takes the scholarship.  The more specific
        # concept overrides, so y is globally preferred.
        nkb = normalize(student_kb())
        ctx = PreferenceContext.from_kb(nkb)
        schol = nkb.ranked["PhDStudent"][0][0]
        classes = nkb.ranked["Student"][0][0]
        common = [classes, "Young", "Bright"]
        x = ctx.profile("x", ["Student", "PhDStudent"], common + ["Has_no_Scholarship"])
        y = ctx.profile("y", ["Student", "PhDStudent"], common + [schol])
        assert ctx.compare_wrt(x, y, "Student") is PREF
        assert ctx.compare_wrt(y, x, "PhDStudent") is PREF
        assert ctx.global_compare(y, x) is PREF
        ex = ctx.explain(y, x)
        assert ("Student", "PhDStudent") in ex.overrides

    def test_conflict_without_specificity_is_incomparable(self):
        nkb = normalize(student_kb())
        ctx = PreferenceContext.from_kb(nkb)
        boss = nkb.ranked["Employee"][1][0]
        classes = nkb.ranked["Student"][0][0]
        x = ctx.profile(
            "x", ["Employee", "Student"],
            ["NotYoung", boss, classes, "Has_no_Scholarship"],
        )
        y = ctx.profile(
            "y", ["Employee", "Student"],
            [boss, classes, "Young", "Has_no_Scholarship"],
        )
        assert ctx.global_compare(x, y) is INC
        assert ctx.global_compare(y, x) is INC

    def test_reflexive_equivalent(self):
        nkb = normalize(student_kb())
        ctx = PreferenceContext.from_kb(nkb)
        p = ctx.profile("x", ["Student"], ["Young"])
        assert ctx.global_compare(p, p) is EQ

    def test_strict_laws_and_formulation_agreement(self, rng):
        for trial in range(60):
            local = random.Random(6000 + trial)
            ctx = random_context(local)
            ps = [random_profile(ctx, local, f"p{i}") for i in range(3)]
            # irreflexivity
            for p in ps:
                assert ctx.global_compare(p, p) in (EQ,)
            # transitivity of the strict order
            for x, y, z in itertools.permutations(ps, 3):
                if (
                    ctx.global_compare(x, y) is PREF
                    and ctx.global_compare(y, z) is PREF
                ):
                    assert ctx.global_compare(x, z) is PREF
            # agreement between the direct and the <=-based formulation
            for x, y in itertools.permutations(ps, 2):
                direct = ctx.global_compare(x, y) is PREF
                via_leq = ctx.globally_leq(x, y) and not ctx.globally_leq(y, x)
                assert direct == via_leq
