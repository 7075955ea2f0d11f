"""Candidate-world enumeration and defeasible entailment.

A candidate world fixes, for the query prototype constant, a stable set of
chosen typical properties and the closure that follows.  Stability follows
answer-set semantics for the choice rule: a chosen property needs one of its
guard memberships derivable in the candidate's own least fixpoint.  The query
``T(C) <= D`` is entailed when every globally preferred candidate makes the
prototype a D-instance.

Two equivalent evaluation paths are provided.  ``enumerate_candidates`` +
``select_preferred`` materialize every stable candidate and compare all
pairs.  ``entails`` runs a fused search instead: it explores choice subsets
depth-first on one incrementally saturated engine, skips branches that are
already inconsistent, auto-includes side-effect-free ("inert") properties
whose omission always produces a dominated candidate, and streams candidates
through a non-dominated frontier.  Because the global preference is a strict
partial order, the frontier equals the full pairwise selection; the test
suite checks that equivalence on randomized inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

from .materialize import (
    Closure,
    FactBase,
    Saturator,
    aux_choices,
    saturate,
    translate,
)
from .model import CapExceeded, KBError, NormalizedKB, Query, RankedKB, normalize
from .parser import render_query
from .preference import OrderResult, PreferenceContext, TypicalityProfile, _context

DEFAULT_SUBSET_CAP = 1 << 20


class StrictInconsistentError(KBError):
    """The strict part of the knowledge base (with ABox) is inconsistent."""


class Status(Enum):
    ENTAILED = "entailed"
    NOT_ENTAILED = "not-entailed"
    STRICT_INCONSISTENT = "strict-inconsistent"
    NO_CANDIDATE_WORLD = "no-candidate-world"


@dataclass(eq=False)
class CandidateWorld:
    """One stable outcome of the typical-property choices for the prototype."""

    prototype: str
    choices: frozenset[str]
    closure: Closure
    profile: TypicalityProfile
    consistent: bool = True

    def satisfied_targets(self) -> frozenset[str]:
        return self.profile.satisfied_targets

    def satisfies(self, concept: str) -> bool:
        return self.closure.has_inst(self.prototype, concept)

    def key(self) -> frozenset[str]:
        return self.profile.satisfied_targets


@dataclass(eq=False)
class Verdict:
    status: Status
    entailed: bool
    query: str
    preferred: tuple[CandidateWorld, ...] = ()
    counterexample: Optional[CandidateWorld] = None
    warnings: tuple[str, ...] = ()

    def exit_code(self) -> int:
        if self.status is Status.ENTAILED:
            return 0
        if self.status is Status.NOT_ENTAILED:
            return 1
        return 2


# ---------------------------------------------------------------------------
# Choice domain discovery
# ---------------------------------------------------------------------------

def _reachable_domain(fb: FactBase) -> list[int]:
    """Targets whose guard can fire in some candidate (sound overapproximation).

    Computed by a saturation that licenses every choice whose guard appears
    and keeps going past inconsistencies; its atom set contains the closure
    of every consistent candidate, so no stable candidate chooses outside
    the returned domain.
    """
    eng = Saturator(
        fb, guarded_choices=fb.targets, ignore_bot=True
    )
    eng.run()
    mem = eng.memberships(fb.aux_c)
    domain = []
    for t in sorted(fb.targets):
        if any(g in mem for g in fb.tprop_guards[t]):
            domain.append(t)
    return domain


def _is_inert(fb: FactBase, p: int) -> bool:
    """No rule can fire from inst(aux, p): choosing it has no side effects."""
    return not (
        p in fb.subclass_idx
        or p in fb.conj_first
        or p in fb.conj_second
        or p in fb.subex_by_filler
        or p in fb.supex_by_sub
        or p in fb.bot_set
        or p in fb.noms
        or p in fb.dcls
        or p in fb.auxtc_by_concept
    )


def _check_strict(nkb: NormalizedKB) -> bool:
    fb = translate(nkb, with_query=False)
    eng = Saturator(fb, typicality=False)
    return eng.run()


def _cap_check(n_targets: int, cap: int):
    if (1 << n_targets) > cap:
        raise CapExceeded(
            f"candidate enumeration needs 2^{n_targets} subsets, cap is {cap}; "
            "raise TYPEL_SUBSET_CAP to proceed"
        )


# ---------------------------------------------------------------------------
# Full enumeration (reference path)
# ---------------------------------------------------------------------------

def enumerate_candidates(
    nkb: NormalizedKB, *, subset_cap: int = DEFAULT_SUBSET_CAP, jobs: int = 1
) -> tuple[CandidateWorld, ...]:
    """All stable, consistent candidate worlds, deduplicated.

    Every subset of the reachable choice domain is saturated in reduct mode;
    a candidate is kept when its closure is consistent and every chosen
    property ended up in it (guard fired or derived outright).  Candidates
    whose prototype satisfies the same typical properties have equal
    closures and collapse to one world.  ``jobs`` caps how many subset
    saturations run concurrently (they share the immutable fact base).
    """
    if nkb.query_subject is None:
        raise KBError("normalized KB carries no query")
    if not _check_strict(nkb):
        raise StrictInconsistentError("strict part of the KB is inconsistent")
    fb = translate(nkb)
    ctx = _context(nkb)
    base = Saturator(fb)
    if not base.run():
        return ()
    domain = _reachable_domain(fb)
    _cap_check(len(domain), subset_cap)
    aux = fb.aux_c
    aux_name = fb.symbols.name(aux)
    names = fb.symbols.name

    def evaluate(mask: int):
        chosen = [domain[i] for i in range(len(domain)) if mask >> i & 1]
        eng = Saturator(fb, guarded_choices=chosen)
        if not eng.run():
            return None
        mem = eng.memberships(aux)
        if any(t not in mem for t in chosen):
            return None  # some choice never became supported
        key = frozenset(t for t in fb.targets if t in mem)
        return key, chosen, eng

    masks = range(1 << len(domain))
    if jobs > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(evaluate, masks))
    else:
        results = map(evaluate, masks)

    worlds: dict[frozenset[int], CandidateWorld] = {}
    for result in results:
        if result is None:
            continue
        key, chosen, eng = result
        if key in worlds:
            continue
        closure = eng.snapshot()
        profile = ctx.profile_from_closure(closure, aux_name)
        worlds[key] = CandidateWorld(
            prototype=aux_name,
            choices=frozenset(names(t) for t in chosen),
            closure=closure,
            profile=profile,
        )
    return tuple(worlds[k] for k in sorted(worlds, key=sorted))


def select_preferred(
    cands: Iterable[CandidateWorld], nkb: NormalizedKB
) -> tuple[CandidateWorld, ...]:
    """Candidates not strictly dominated by any other candidate.

    Full pairwise comparison over all candidates; no candidate is excluded
    up front on account of the query, since any of them may dominate others.
    """
    ctx = _context(nkb)
    cands = list(cands)
    out = []
    for c in cands:
        dominated = any(
            ctx.global_compare(other.profile, c.profile)
            is OrderResult.STRICTLY_PREFERRED
            for other in cands
            if other is not c
        )
        if not dominated:
            out.append(c)
    return tuple(out)


# ---------------------------------------------------------------------------
# Fused search
# ---------------------------------------------------------------------------

@dataclass
class _Leaf:
    key: frozenset[int]
    memberships: frozenset[int]
    satisfies_query: bool


@dataclass
class _Group:
    profile: TypicalityProfile
    leaves: dict[frozenset[int], _Leaf] = field(default_factory=dict)


class _FrontierSearch:
    def __init__(self, nkb: NormalizedKB, fb: FactBase, subset_cap: int):
        self.nkb = nkb
        self.fb = fb
        self.ctx = _context(nkb)
        self.aux = fb.aux_c
        self.aux_name = fb.symbols.name(fb.aux_c)
        self.qtgt = fb.query_target
        self.groups: list[_Group] = []
        self.eng = Saturator(fb, track=True)
        self.base_ok = self.eng.run()
        if not self.base_ok:
            return
        domain = _reachable_domain(fb)
        base_mem = self.eng.memberships(self.aux)
        self.base_licensed = {
            t for t in domain if any(g in base_mem for g in fb.tprop_guards[t])
        }
        branchable = [t for t in domain if t not in base_mem]
        self.actives = [t for t in branchable if not _is_inert(fb, t)]
        self.inerts = [t for t in branchable if _is_inert(fb, t)]
        _cap_check(len(self.actives), subset_cap)
        self.targets = sorted(fb.targets)
        self.included: list[int] = []

    def run(self) -> list[_Group]:
        if not self.base_ok:
            return []
        self._dfs(0)
        return self.groups

    def _dfs(self, i: int):
        if i == len(self.actives):
            self._leaf()
            return
        t = self.actives[i]
        eng = self.eng
        if t in eng.inst.get(self.aux, ()):
            self._dfs(i + 1)  # already derived; both branches coincide
            return
        self._dfs(i + 1)
        m = eng.mark()
        eng.add_inst(self.aux, t)
        if eng.run():
            self.included.append(t)
            self._dfs(i + 1)
            self.included.pop()
        eng.undo(m)

    def _leaf(self):
        eng = self.eng
        fb = self.fb
        mem = eng.memberships(self.aux)
        if any(t not in self.base_licensed for t in self.included):
            if not self._stable(self.included):
                return
        key_parts = [t for t in self.targets if t in mem]
        licensed_inerts = [
            p
            for p in self.inerts
            if p not in mem and any(g in mem for g in fb.tprop_guards[p])
        ]
        key = frozenset(key_parts) | frozenset(licensed_inerts)
        sat_query = self.qtgt is not None and (
            self.qtgt in mem or self.qtgt in key
        )
        names = fb.symbols.name
        member_names = [names(c) for c in fb.dcls if c in mem]
        profile = self.ctx.profile(
            self.aux_name, member_names, [names(t) for t in key]
        )
        leaf = _Leaf(key, frozenset(c for c in fb.dcls if c in mem), sat_query)
        self._offer(profile, leaf)

    def _stable(self, chosen: list[int]) -> bool:
        eng = Saturator(self.fb, guarded_choices=chosen)
        if not eng.run():
            return False
        mem = eng.memberships(self.aux)
        return all(t in mem for t in chosen)

    def _offer(self, profile: TypicalityProfile, leaf: _Leaf):
        compare = self.ctx.global_compare
        equivalent_group = None
        survivors = []
        for g in self.groups:
            rel = compare(g.profile, profile)
            if rel is OrderResult.STRICTLY_PREFERRED:
                return  # dominated by an existing group
            if rel is OrderResult.EQUIVALENT:
                equivalent_group = g
                survivors.append(g)
            elif rel is OrderResult.STRICTLY_DISPREFERRED:
                continue  # new leaf dominates this group
            else:
                survivors.append(g)
        self.groups = survivors
        if equivalent_group is None:
            equivalent_group = _Group(profile)
            self.groups.append(equivalent_group)
        equivalent_group.leaves.setdefault(leaf.key, leaf)


def preferred_worlds(
    nkb: NormalizedKB, *, subset_cap: int = DEFAULT_SUBSET_CAP
) -> tuple[CandidateWorld, ...]:
    """Preferred candidate worlds via the fused frontier search."""
    if nkb.query_subject is None:
        raise KBError("normalized KB carries no query")
    fb = translate(nkb)
    search = _FrontierSearch(nkb, fb, subset_cap)
    groups = search.run()
    ctx = _context(nkb)
    names = fb.symbols.name
    worlds = []
    for g in groups:
        for key in sorted(g.leaves, key=sorted):
            target_names = [names(t) for t in sorted(key)]
            closure = saturate(fb, aux_choices(fb, target_names))
            profile = ctx.profile_from_closure(closure, search.aux_name)
            worlds.append(
                CandidateWorld(
                    prototype=search.aux_name,
                    choices=frozenset(target_names),
                    closure=closure,
                    profile=profile,
                )
            )
    worlds.sort(key=lambda w: sorted(w.key()))
    return tuple(worlds)


# ---------------------------------------------------------------------------
# Entailment
# ---------------------------------------------------------------------------

def entails(
    kb: RankedKB,
    query: Query,
    *,
    subset_cap: int = DEFAULT_SUBSET_CAP,
    method: str = "fused",
    jobs: int = 1,
) -> Verdict:
    """Decide whether ``T(subject) <= predicate`` holds in the KB.

    Status semantics: STRICT_INCONSISTENT when the strict part has no model
    (entailment is vacuous); NO_CANDIDATE_WORLD when every choice combination
    is inconsistent, typically a typicality conflict with strict axioms
    (vacuously entailed, but reported loudly rather than silently).
    """
    qtext = render_query(query)
    nkb = normalize(kb, query)
    if not _check_strict(nkb):
        return Verdict(
            Status.STRICT_INCONSISTENT,
            entailed=True,
            query=qtext,
            warnings=("strict part of the KB is inconsistent",),
        )
    if method == "naive":
        cands = enumerate_candidates(nkb, subset_cap=subset_cap, jobs=jobs)
        preferred = select_preferred(cands, nkb)
    elif method == "fused":
        preferred = preferred_worlds(nkb, subset_cap=subset_cap)
    else:
        raise ValueError(f"unknown method {method!r}")
    if not preferred:
        return Verdict(
            Status.NO_CANDIDATE_WORLD,
            entailed=True,
            query=qtext,
            warnings=(
                "no candidate world exists: typicality requirements conflict "
                "with the strict axioms for this query",
            ),
        )
    qtgt = nkb.query_target
    counterexample = None
    for w in preferred:
        if not w.satisfies(qtgt):
            counterexample = w
            break
    entailed = counterexample is None
    return Verdict(
        Status.ENTAILED if entailed else Status.NOT_ENTAILED,
        entailed=entailed,
        query=qtext,
        preferred=preferred,
        counterexample=counterexample,
    )
