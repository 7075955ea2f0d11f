import itertools
import random

import pytest

from typel.model import (
    And,
    Atomic,
    BOT,
    ConceptAssertion,
    ConceptInclusion,
    DefeasibleInclusion,
    MalformedKB,
    Nominal,
    RankedKB,
    Some,
    TOP,
    negation_scaffold,
    normalize,
)
from typel.materialize import subsumes
from typel.model import Query
from typel.parser import parse_kb

from conftest import CONCEPT_POOL, random_kb


def make_kb(strict=(), distinguished=(), ranked=None, abox=()):
    return RankedKB(strict, distinguished, ranked, abox)


class TestRankedKBValidation:
    def test_duplicate_inclusion_rank_pairs_are_deduplicated(self):
        d = Atomic("C")
        inc = DefeasibleInclusion(d, Atomic("D"), 1)
        kb = make_kb(distinguished=[d], ranked={d: [inc, inc]})
        assert kb.ranked[d] == (inc,)

    def test_same_inclusion_at_two_ranks_rejected(self):
        d = Atomic("C")
        with pytest.raises(MalformedKB):
            make_kb(
                distinguished=[d],
                ranked={d: [
                    DefeasibleInclusion(d, Atomic("D"), 0),
                    DefeasibleInclusion(d, Atomic("D"), 2),
                ]},
            )

    def test_subject_must_be_distinguished(self):
        c, d = Atomic("C"), Atomic("D")
        with pytest.raises(MalformedKB):
            make_kb(
                distinguished=[c],
                ranked={c: [DefeasibleInclusion(d, Atomic("E"), 0)]},
            )
        with pytest.raises(MalformedKB):
            RankedKB(ranked={d: [DefeasibleInclusion(d, Atomic("E"), 0)]})

    def test_distinguished_must_be_distinct(self):
        with pytest.raises(MalformedKB):
            make_kb(distinguished=[Atomic("C"), Atomic("C")])

    def test_nominal_distinguished_rejected(self):
        with pytest.raises(MalformedKB):
            make_kb(distinguished=[Nominal("a")])
        with pytest.raises(MalformedKB):
            make_kb(distinguished=[And(Atomic("C"), Nominal("a"))])

    def test_negative_rank_rejected(self):
        with pytest.raises(MalformedKB):
            DefeasibleInclusion(Atomic("C"), Atomic("D"), -1)


class TestNormalize:
    def test_complex_typicality_subject_gets_full_definition(self):
        # T(Employee and Student) <= Young turns into T(A) <= Young plus
        # A <= Employee, A <= Student, Employee and Student <= A.
        subj = And(Atomic("Employee"), Atomic("Student"))
        kb = make_kb(
            distinguished=[subj],
            ranked={subj: [DefeasibleInclusion(subj, Atomic("Young"), 0)]},
        )
        nkb = normalize(kb)
        assert len(nkb.distinguished) == 1
        fresh = nkb.distinguished[0]
        assert fresh in nkb.signature_extension
        assert nkb.provenance[fresh] == subj
        assert nkb.ranked[fresh] == (("Young", 0),)
        axioms = set(nkb.strict)
        a = Atomic(fresh)
        assert ConceptInclusion(a, Atomic("Employee")) in axioms
        assert ConceptInclusion(a, Atomic("Student")) in axioms
        assert ConceptInclusion(And(Atomic("Employee"), Atomic("Student")), a) in axioms

    def test_normal_form_is_fixed_point(self):
        kb = make_kb(
            strict=[
                ConceptInclusion(Atomic("A"), Atomic("B")),
                ConceptInclusion(And(Atomic("A"), Atomic("B")), Atomic("C")),
                ConceptInclusion(Some("r", Atomic("A")), Atomic("C")),
                ConceptInclusion(Atomic("A"), Some("r", Atomic("B"))),
                ConceptInclusion(TOP, Atomic("B")),
                ConceptInclusion(Atomic("A"), BOT),
                ConceptInclusion(Nominal("a"), Atomic("C")),
            ],
            distinguished=[Atomic("A")],
            ranked={Atomic("A"): [DefeasibleInclusion(Atomic("A"), Atomic("B"), 0)]},
        )
        nkb = normalize(kb)
        assert nkb.signature_extension == ()
        assert set(nkb.strict) == set(kb.strict)
        assert nkb.ranked["A"] == (("B", 0),)

    def test_conjunction_on_the_right_splits(self):
        # Horse <= Mammal and Animal: the split must preserve the derived
        # subsumptions over the original names.
        kb = make_kb(
            strict=[
                ConceptInclusion(
                    Atomic("Horse"), And(Atomic("Mammal"), Atomic("Animal"))
                )
            ]
        )
        nkb = normalize(kb)
        for sup in ("Mammal", "Animal"):
            assert subsumes(nkb, "Horse", sup)
        assert not subsumes(nkb, "Mammal", "Horse")

    def test_assertions_become_nominal_inclusions(self):
        kb = make_kb(abox=[ConceptAssertion(And(Atomic("A"), Atomic("B")), "x")])
        nkb = normalize(kb)
        axioms = set(nkb.strict)
        assert ConceptInclusion(Nominal("x"), Atomic("A")) in axioms
        assert ConceptInclusion(Nominal("x"), Atomic("B")) in axioms
        assert nkb.abox == ()

    def test_subsumption_preserved_over_original_signature(self, rng):
        # Oracle: brute-force reachability closure over atomic names, on KBs
        # built only from atomic inclusions and right conjunctions.
        for trial in range(25):
            local = random.Random(1000 + trial)
            names = CONCEPT_POOL[:6]
            edges = []
            strict = []
            for _ in range(local.randint(1, 8)):
                a, b = local.choice(names), local.choice(names)
                if local.random() < 0.3:
                    c = local.choice(names)
                    strict.append(
                        ConceptInclusion(Atomic(a), And(Atomic(b), Atomic(c)))
                    )
                    edges += [(a, b), (a, c)]
                else:
                    strict.append(ConceptInclusion(Atomic(a), Atomic(b)))
                    edges.append((a, b))
            kb = make_kb(strict=strict)
            nkb = normalize(kb)
            reach = {(n, n) for n in names}
            changed = True
            while changed:
                changed = False
                for (a, b), (c, d) in itertools.product(set(edges) | reach, repeat=2):
                    if b == c and (a, d) not in reach:
                        reach.add((a, d))
                        changed = True
                for e in edges:
                    if e not in reach:
                        reach.add(e)
                        changed = True
            for a in names:
                for b in names:
                    assert subsumes(nkb, a, b) == ((a, b) in reach), (
                        trial, a, b, strict
                    )

    def test_axiom_count_is_linear(self, rng):
        worst = 0.0
        for trial in range(40):
            local = random.Random(2000 + trial)
            kb = random_kb(local)
            nkb = normalize(kb)
            ratio = nkb.axiom_count() / max(1, kb.size())
            worst = max(worst, ratio)
        assert worst <= 4.0, f"normalization blew up: ratio {worst:.2f}"


class TestNegationScaffold:
    def test_adds_disjointness_for_requested_concept(self):
        kb = make_kb(strict=[ConceptInclusion(Atomic("Young"), Atomic("Person"))])
        nkb = negation_scaffold(normalize(kb), ["Young"])
        comp = nkb.complements["Young"]
        assert comp in nkb.signature_extension
        # Young and its complement are jointly unsatisfiable
        both = [ax for ax in nkb.strict
                if isinstance(ax, ConceptInclusion)
                and ax.sub == And(Atomic("Young"), Atomic(comp))]
        assert both

    def test_empty_request_is_identity(self):
        nkb = normalize(make_kb(strict=[ConceptInclusion(Atomic("A"), Atomic("B"))]))
        out = negation_scaffold(nkb, [])
        assert out.strict == nkb.strict
        assert out.complements == {}

    def test_idempotent(self):
        nkb = normalize(make_kb(strict=[ConceptInclusion(Atomic("A"), Atomic("B"))]))
        once = negation_scaffold(nkb, ["A"])
        twice = negation_scaffold(once, ["A"])
        assert once.strict == twice.strict
        assert once.complements == twice.complements


def test_query_normalization_keeps_paper_shape():
    kb = parse_kb("strict:\n  A <= B\n")
    q = Query(And(Atomic("A"), Atomic("B")), Some("r", Atomic("B")))
    nkb = normalize(kb, q)
    assert nkb.query_subject in nkb.signature_extension
    assert nkb.query_target in nkb.signature_extension
    # both directions present for the fresh subject name
    a = Atomic(nkb.query_subject)
    axioms = set(nkb.strict)
    assert ConceptInclusion(a, Atomic("A")) in axioms
    assert ConceptInclusion(a, Atomic("B")) in axioms
    assert ConceptInclusion(And(Atomic("A"), Atomic("B")), a) in axioms
