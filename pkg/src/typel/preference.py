"""Concept-wise preference orders and their global combination.

Each distinguished concept induces a total preorder on individuals by
comparing, rank by rank from the most important rank down, how many of its
defeasible inclusions an individual satisfies (count-based strategy).  An
individual outside the concept trivially satisfies every inclusion, so all
non-members share the best position.

The global strict preference combines the per-concept strict orders under a
modified Pareto condition: x is globally preferred to y when it is strictly
preferred somewhere and every concept preferring y is overridden by a more
specific concept preferring x.  Specificity is strict subsumption between
distinguished concepts.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Optional

from .materialize import Closure, subsumes
from .model import NormalizedKB, UnknownConcept


class OrderResult(Enum):
    STRICTLY_PREFERRED = "strictly-preferred"
    EQUIVALENT = "equivalent"
    STRICTLY_DISPREFERRED = "strictly-dispreferred"
    INCOMPARABLE = "incomparable"

    def flipped(self) -> "OrderResult":
        if self is OrderResult.STRICTLY_PREFERRED:
            return OrderResult.STRICTLY_DISPREFERRED
        if self is OrderResult.STRICTLY_DISPREFERRED:
            return OrderResult.STRICTLY_PREFERRED
        return self


@dataclass(eq=False)
class TypicalityProfile:
    """Per-concept, per-rank satisfaction record for one individual.

    ``counts`` is canonical: a concept maps to its per-rank satisfied counts
    (aligned with the concept's ranks in descending order) only when those
    counts differ from the trivially-full vector, so non-members and members
    satisfying everything compare equal without special cases.
    """

    individual: str
    memberships: frozenset[str]           # distinguished concepts containing it
    satisfied_targets: frozenset[str]     # defeasible targets it belongs to
    counts: dict[str, tuple[int, ...]]    # canonical, full vectors omitted

    def count_key(self) -> tuple:
        return tuple(sorted(self.counts.items()))

    def __eq__(self, other):
        return (
            isinstance(other, TypicalityProfile)
            and self.counts == other.counts
        )


@dataclass(frozen=True)
class ConceptComparison:
    concept: str
    relation: OrderResult
    rank_counts: tuple[tuple[int, int, int], ...]  # (rank, left count, right count)


@dataclass(frozen=True)
class ComparisonExplanation:
    left: str
    right: str
    result: OrderResult
    per_concept: tuple[ConceptComparison, ...]
    overrides: tuple[tuple[str, str], ...]  # (losing concept, overriding concept)

    def lines(self) -> list[str]:
        out = [f"{self.left} vs {self.right}: {self.result.value}"]
        for cc in self.per_concept:
            ranks = ", ".join(f"rank {r}: {a} vs {b}" for r, a, b in cc.rank_counts)
            out.append(f"  wrt {cc.concept}: {cc.relation.value} ({ranks})")
        for cj, ch in self.overrides:
            out.append(f"  {cj} overridden by more specific {ch}")
        return out


class PreferenceContext:
    """Rank structure plus specificity; the home of all comparisons."""

    def __init__(
        self,
        inclusions: Mapping[str, Iterable[tuple[str, int]]],
        more_specific: Iterable[tuple[str, str]],
        concept_order: Optional[Iterable[str]] = None,
    ):
        self.inclusions: dict[str, tuple[tuple[str, int], ...]] = {
            c: tuple(v) for c, v in inclusions.items()
        }
        self.concepts: tuple[str, ...] = tuple(
            concept_order if concept_order is not None else self.inclusions
        )
        self.more_specific: frozenset[tuple[str, str]] = frozenset(more_specific)
        self._ranks: dict[str, tuple[int, ...]] = {}
        self._by_rank: dict[str, dict[int, tuple[str, ...]]] = {}
        self._full: dict[str, tuple[int, ...]] = {}
        for c, incs in self.inclusions.items():
            by_rank: dict[int, list[str]] = {}
            for target, rank in incs:
                by_rank.setdefault(rank, []).append(target)
            ranks = tuple(sorted(by_rank, reverse=True))
            self._ranks[c] = ranks
            self._by_rank[c] = {r: tuple(by_rank[r]) for r in ranks}
            self._full[c] = tuple(len(by_rank[r]) for r in ranks)

    @classmethod
    def from_kb(cls, nkb: NormalizedKB) -> "PreferenceContext":
        ms = [
            (ch, cj)
            for ch in nkb.distinguished
            for cj in nkb.distinguished
            if ch != cj and specificity(nkb, ch, cj)
        ]
        return cls(nkb.ranked, ms, concept_order=nkb.distinguished)

    # -- profiles ------------------------------------------------------------
    def ranks(self, c: str) -> tuple[int, ...]:
        if c not in self._ranks:
            raise UnknownConcept(c)
        return self._ranks[c]

    def full_counts(self, c: str) -> tuple[int, ...]:
        return self._full[c]

    def profile(
        self,
        individual: str,
        memberships: Iterable[str],
        satisfied_targets: Iterable[str],
    ) -> TypicalityProfile:
        """Profile from the individual's concept and target memberships."""
        mem = frozenset(memberships) & frozenset(self.concepts)
        sat = frozenset(satisfied_targets)
        counts: dict[str, tuple[int, ...]] = {}
        for c in mem:
            vec = tuple(
                sum(1 for t in self._by_rank[c][r] if t in sat)
                for r in self._ranks[c]
            )
            if vec != self._full[c]:
                counts[c] = vec
        return TypicalityProfile(individual, mem, sat, counts)

    def profile_from_closure(self, closure: Closure, individual: str) -> TypicalityProfile:
        mem = closure.memberships(individual)
        targets = {t for incs in self.inclusions.values() for t, _ in incs}
        return self.profile(individual, mem, mem & targets)

    def satisfied_inclusions(self, profile: TypicalityProfile, c: str) -> dict[int, tuple[str, ...]]:
        """Per rank, the satisfied targets of c (all of them for non-members)."""
        if c not in self._ranks:
            raise UnknownConcept(c)
        if c not in profile.memberships:
            return dict(self._by_rank[c])
        return {
            r: tuple(t for t in self._by_rank[c][r] if t in profile.satisfied_targets)
            for r in self._ranks[c]
        }

    # -- comparisons -----------------------------------------------------------
    def _vec(self, p: TypicalityProfile, c: str) -> tuple[int, ...]:
        return p.counts.get(c, self._full[c])

    def compare_wrt(
        self, px: TypicalityProfile, py: TypicalityProfile, c: str
    ) -> OrderResult:
        """Total preorder for one concept: counts compared from the top rank down."""
        if c not in self._ranks:
            raise UnknownConcept(c)
        vx = self._vec(px, c)
        vy = self._vec(py, c)
        if vx == vy:
            return OrderResult.EQUIVALENT
        for a, b in zip(vx, vy):
            if a != b:
                return (
                    OrderResult.STRICTLY_PREFERRED
                    if a > b
                    else OrderResult.STRICTLY_DISPREFERRED
                )
        return OrderResult.EQUIVALENT

    def global_compare(
        self, px: TypicalityProfile, py: TypicalityProfile
    ) -> OrderResult:
        per = {c: self.compare_wrt(px, py, c) for c in self.concepts}
        sp = [c for c, r in per.items() if r is OrderResult.STRICTLY_PREFERRED]
        sd = [c for c, r in per.items() if r is OrderResult.STRICTLY_DISPREFERRED]
        if not sp and not sd:
            return OrderResult.EQUIVALENT
        x_wins = bool(sp) and all(
            any((ch, cj) in self.more_specific for ch in sp) for cj in sd
        )
        y_wins = bool(sd) and all(
            any((ch, cj) in self.more_specific for ch in sd) for cj in sp
        )
        if x_wins and y_wins:
            raise AssertionError("global preference is not asymmetric; bad specificity input")
        if x_wins:
            return OrderResult.STRICTLY_PREFERRED
        if y_wins:
            return OrderResult.STRICTLY_DISPREFERRED
        return OrderResult.INCOMPARABLE

    def globally_leq(self, px: TypicalityProfile, py: TypicalityProfile) -> bool:
        """The non-strict formulation: every concept accepts x or is overridden."""
        for cj in self.concepts:
            r = self.compare_wrt(px, py, cj)
            if r in (OrderResult.STRICTLY_PREFERRED, OrderResult.EQUIVALENT):
                continue
            if not any(
                (ch, cj) in self.more_specific
                and self.compare_wrt(px, py, ch) is OrderResult.STRICTLY_PREFERRED
                for ch in self.concepts
            ):
                return False
        return True

    def explain(
        self, px: TypicalityProfile, py: TypicalityProfile
    ) -> ComparisonExplanation:
        per = []
        overrides = []
        relations = {}
        for c in self.concepts:
            rel = self.compare_wrt(px, py, c)
            relations[c] = rel
            vx = self._vec(px, c)
            vy = self._vec(py, c)
            per.append(
                ConceptComparison(
                    c, rel, tuple(zip(self.ranks(c), vx, vy))
                )
            )
        result = self.global_compare(px, py)
        if result in (OrderResult.STRICTLY_PREFERRED, OrderResult.STRICTLY_DISPREFERRED):
            winners = [
                c for c, r in relations.items()
                if r is (OrderResult.STRICTLY_PREFERRED
                         if result is OrderResult.STRICTLY_PREFERRED
                         else OrderResult.STRICTLY_DISPREFERRED)
            ]
            losers = [
                c for c, r in relations.items()
                if r is (OrderResult.STRICTLY_DISPREFERRED
                         if result is OrderResult.STRICTLY_PREFERRED
                         else OrderResult.STRICTLY_PREFERRED)
            ]
            for cj in losers:
                for ch in winners:
                    if (ch, cj) in self.more_specific:
                        overrides.append((cj, ch))
                        break
        return ComparisonExplanation(
            px.individual, py.individual, result, tuple(per), tuple(overrides)
        )


def specificity(nkb: NormalizedKB, ch: str, cj: str) -> bool:
    """ch is more specific than cj: strictly subsumed, not conversely."""
    for name in (ch, cj):
        if name not in nkb.distinguished:
            raise UnknownConcept(name)
    return subsumes(nkb, ch, cj) and not subsumes(nkb, cj, ch)


def compare_wrt(
    nkb: NormalizedKB, px: TypicalityProfile, py: TypicalityProfile, c: str
) -> OrderResult:
    return _context(nkb).compare_wrt(px, py, c)


def global_compare(
    nkb: NormalizedKB, px: TypicalityProfile, py: TypicalityProfile
) -> OrderResult:
    return _context(nkb).global_compare(px, py)


def _context(nkb: NormalizedKB) -> PreferenceContext:
    ctx = getattr(nkb, "_preference_context", None)
    if ctx is None:
        ctx = PreferenceContext.from_kb(nkb)
        nkb._preference_context = ctx
    return ctx
