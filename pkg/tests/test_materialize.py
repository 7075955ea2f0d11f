import random

import pytest

from typel.fixtures import student_kb
from typel.materialize import (
    Saturator,
    aux_choices,
    check_strict_consistency,
    saturate,
    subsumes,
    translate,
)
from typel.model import (
    And,
    Atomic,
    BOT,
    ConceptAssertion,
    ConceptInclusion,
    DefeasibleInclusion,
    Nominal,
    Query,
    RankedKB,
    RoleAssertion,
    RoleInclusion,
    Some,
    TOP,
    normalize,
)
from typel.parser import parse_kb, parse_query

from conftest import random_kb


def student_factbase(query="T(Employee and Student) <= Young"):
    nkb = normalize(student_kb(), parse_query(query))
    return nkb, translate(nkb)


# ---------------------------------------------------------------------------
# translate
# ---------------------------------------------------------------------------

class TestTranslate:
    def test_role_assertion_reuses_object_as_witness(self):
        kb = RankedKB(abox=[RoleAssertion("R", "a", "b")])
        nkb = normalize(kb, Query(Atomic("C"), Atomic("D")))
        fb = translate(nkb)
        a = fb.symbols.id("a")
        b = fb.symbols.id("b")
        r = fb.roles.id("R")
        assert (r, b, b) in fb.supex_by_sub[a]

    def test_empty_kb_plus_query_emits_only_query_facts(self):
        kb = RankedKB()
        nkb = normalize(kb, Query(Atomic("C"), Atomic("D")))
        fb = translate(nkb)
        assert len(fb.base_inst) == 1
        assert fb.base_inst[0][0] == fb.aux_c
        assert len(fb.auxtc_pairs) == 1
        assert not fb.subclass_idx and not fb.subtyp
        aux = fb.symbols.name(fb.aux_c)
        assert aux in {fb.symbols.name(n) for n in fb.noms}

    def test_student_kb_subtyp_facts(self):
        nkb, fb = student_factbase()
        named = {
            (fb.symbols.name(c), fb.symbols.name(d), n) for c, d, n in fb.subtyp
        }
        assert ("Employee", "NotYoung", 0) in named
        assert ("Student", "Young", 1) in named


# ---------------------------------------------------------------------------
# saturate
# ---------------------------------------------------------------------------

class TestSaturate:
    def test_subclass_rule(self):
        kb = parse_kb("strict:\n  A <= C\nabox:\n  A(x)\n")
        closure = saturate(translate(normalize(kb)))
        assert closure.has_inst("x", "C")

    def test_idempotent_fixpoint(self):
        nkb, fb = student_factbase()
        first = saturate(fb)
        again = saturate(fb)
        assert first == again
        # adding an already-derived atom changes nothing
        aux = [t for t, _ in fb.base_inst]
        boosted = saturate(fb, [("aux_c", nkb.query_subject)])
        assert boosted == first

    def test_strict_chain_reaches_adult_and_ssn(self):
        nkb, fb = student_factbase()
        closure = saturate(fb)
        assert closure.has_inst("aux_c", "Adult")
        assert any(
            x == "aux_c" and r == "has_SSN" for x, r, y in closure.triples
        )

    def test_monotone_in_added_facts(self, rng):
        for trial in range(15):
            local = random.Random(3000 + trial)
            kb = random_kb(local)
            nkb = normalize(kb, Query(Atomic("A"), Atomic("B")))
            fb = translate(nkb)
            targets = sorted(fb.symbols.name(t) for t in fb.targets)
            if not targets:
                continue
            some = local.sample(targets, local.randint(0, len(targets)))
            more = some + local.sample(targets, local.randint(0, len(targets)))
            small = saturate(fb, aux_choices(fb, some))
            big = saturate(fb, aux_choices(fb, more))
            if big.inconsistent:
                continue
            assert small <= big

    def test_nominal_merging_rules(self):
        kb = parse_kb(
            """
strict:
  B <= {a}
abox:
  B(b)
  D(a)
  R(c, b)
"""
        )
        closure = saturate(translate(normalize(kb)))
        # b collapses into a: a gains b's memberships, b gains a's
        assert closure.has_inst("a", "B")
        assert closure.has_inst("b", "D")
        assert ("c", "R", "a") in closure.triples

    def test_role_chain_and_hierarchy(self):
        kb = parse_kb(
            """
strict:
  r o s <= t
  t <= u
  (u some C) <= Found
abox:
  r(a, b)
  s(b, c)
  C(c)
"""
        )
        closure = saturate(translate(normalize(kb)))
        assert ("a", "t", "c") in closure.triples
        assert ("a", "u", "c") in closure.triples
        assert closure.has_inst("a", "Found")

    def test_inconsistency_is_a_result(self):
        kb = parse_kb("strict:\n  A <= bot\nabox:\n  A(a)\n")
        closure = saturate(translate(normalize(kb)))
        assert closure.inconsistent


# ---------------------------------------------------------------------------
# support post-pass: every derived atom has a rule instance in the closure
# ---------------------------------------------------------------------------

def _named_relations(fb):
    s = fb.symbols.name
    r = fb.roles.name
    return {
        "subclass": [(s(a), s(b)) for a, subs in fb.subclass_idx.items() for b in subs],
        "subconj": [
            (s(a), s(b), s(z))
            for a, rest in fb.conj_first.items()
            for b, z in rest
        ],
        "subex": [
            (r(v), s(f), s(z))
            for f, rest in fb.subex_by_filler.items()
            for v, z in rest
        ],
        "supex": [
            (s(a), r(v), s(b), s(w))
            for a, rest in fb.supex_by_sub.items()
            for v, b, w in rest
        ],
        "top": [s(z) for z in fb.top_list],
        "subrole": [(r(a), r(b)) for a, subs in fb.subrole_idx.items() for b in subs],
        "chain": [
            (r(u), r(v), r(w))
            for u, rest in fb.chain_first.items()
            for v, w in rest
        ],
        "noms": {s(n) for n in fb.noms},
        "subtyp": [(s(c), s(d), n) for c, d, n in fb.subtyp],
        "auxtc": {(s(y), s(c)) for y, c in fb.auxtc_pairs},
        "base": {(s(x), s(c)) for x, c in fb.base_inst},
    }


def _inst_supported(rel, closure, choices, x, c):
    if x == c and x in rel["noms"]:
        return True
    if (x, c) in rel["base"] or (x, c) in choices:
        return True
    if c in rel["top"] and closure.memberships(x):
        return True
    for a, b in rel["subclass"]:
        if b == c and closure.has_inst(x, a):
            return True
    for a, b, z in rel["subconj"]:
        if z == c and closure.has_inst(x, a) and closure.has_inst(x, b):
            return True
    for v, f, z in rel["subex"]:
        if z == c and any(
            xx == x and rr == v and closure.has_inst(y, f)
            for xx, rr, y in closure.triples
        ):
            return True
    for a, v, b, w in rel["supex"]:
        if w == x and b == c and any(closure.has_inst(u, a) for u in closure.inst):
            return True
    if x in rel["noms"]:  # rule deriving a nominal's membership from a twin
        if any(
            closure.has_inst(u, x) and closure.has_inst(u, c) for u in closure.inst
        ):
            return True
    for n in rel["noms"]:  # membership copied from the nominal itself
        if closure.has_inst(x, n) and closure.has_inst(n, c):
            return True
    if (x, c) in rel["auxtc"] and any(
        closure.has_inst(u, c) for u in closure.inst
    ):
        return True
    for ci, d, _rank in rel["subtyp"]:
        if d == c and (x, ci) in closure.typ:
            return True
    return False


def _triple_supported(rel, closure, x, r, y):
    for a, v, b, w in rel["supex"]:
        if v == r and w == y and closure.has_inst(x, a):
            return True
    for v, w in rel["subrole"]:
        if w == r and (x, v, y) in closure.triples:
            return True
    for u, v, w in rel["chain"]:
        if w == r and any(
            xx == x and rr == u and (m, v, y) in closure.triples
            for xx, rr, m in closure.triples
        ):
            return True
    if y in rel["noms"]:
        if any(
            closure.has_inst(m, y) and (x, r, m) in closure.triples
            for m in closure.inst
        ):
            return True
    return False


def assert_supported(fb, closure, choices=frozenset()):
    rel = _named_relations(fb)
    for x, cs in closure.inst.items():
        for c in cs:
            assert _inst_supported(rel, closure, choices, x, c), f"inst({x},{c})"
    for x, r, y in closure.triples:
        assert _triple_supported(rel, closure, x, r, y), f"triple({x},{r},{y})"
    for y, c in closure.typ:
        assert (y, c) in rel["auxtc"] and closure.has_inst(y, c), f"typ({y},{c})"


class TestSupport:
    def test_student_base_closure_supported(self):
        nkb, fb = student_factbase()
        assert_supported(fb, saturate(fb))

    def test_student_with_choices_supported(self):
        nkb, fb = student_factbase()
        targets = sorted(fb.symbols.name(t) for t in fb.targets)
        chosen = [t for t in targets if t not in ("Young",)]
        choices = aux_choices(fb, chosen)
        closure = saturate(fb, choices)
        if not closure.inconsistent:
            assert_supported(fb, closure, frozenset(choices))

    def test_random_small_closures_supported(self, rng):
        for trial in range(10):
            local = random.Random(4000 + trial)
            kb = random_kb(local)
            nkb = normalize(kb, Query(Atomic("A"), Atomic("B")))
            fb = translate(nkb)
            closure = saturate(fb)
            if not closure.inconsistent:
                assert_supported(fb, closure)


# ---------------------------------------------------------------------------
# subsumption and consistency
# ---------------------------------------------------------------------------

class TestSubsumes:
    def test_student_hierarchy(self):
        nkb = normalize(student_kb())
        assert subsumes(nkb, "PhDStudent", "Student")
        assert not subsumes(nkb, "Student", "PhDStudent")

    def test_reflexive(self):
        nkb = normalize(student_kb())
        for name in ("Employee", "Student", "Young"):
            assert subsumes(nkb, name, name)

    def test_unsatisfiable_subsumed_by_everything(self):
        kb = parse_kb("strict:\n  A <= B\n  A <= C\n  B and C <= bot\n")
        nkb = normalize(kb)
        assert subsumes(nkb, "A", "D")

    def test_existential_subsumption(self):
        kb = parse_kb("strict:\n  A <= r some B\n  B <= C\n  (r some C) <= D\n")
        nkb = normalize(kb)
        assert subsumes(nkb, "A", "D")


class TestStrictConsistency:
    def test_direct_bottom_instance(self):
        kb = parse_kb("strict:\n  A <= bot\nabox:\n  A(a)\n")
        report = check_strict_consistency(normalize(kb))
        assert not report.consistent

    def test_student_kb_clean(self):
        report = check_strict_consistency(normalize(student_kb()))
        assert report.consistent
        assert report.tcompliance_warnings == ()

    def test_typicality_conflict_warns(self):
        kb = parse_kb(
            """
strict:
  Cj and D <= bot
defeasible Cj:
  rank 0: T(Cj) <= D
abox:
  Cj(a)
"""
        )
        report = check_strict_consistency(normalize(kb))
        assert report.consistent
        assert report.tcompliance_warnings == ("Cj",)
