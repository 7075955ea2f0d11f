"""Core domain types for ranked EL+bot knowledge bases with typicality.

A ranked knowledge base couples a strict TBox/ABox with one ranked TBox of
defeasible inclusions ``T(C) <= D`` per *distinguished* concept C.  Ranks are
non-negative integers; a higher rank marks a more important default.

This module also provides the normalizer, which rewrites an arbitrary
:class:`RankedKB` into an equivalent KB over an extended signature in which
every strict inclusion has one of the shapes consumed by the materialization
engine and every defeasible inclusion relates two atomic names.  Fresh names
are introduced deterministically and recorded in a provenance map.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Optional, Union


class KBError(Exception):
    """Base class for knowledge-base level errors."""


class MalformedKB(KBError):
    """The input violates a structural invariant of ranked knowledge bases."""


class UnknownConcept(KBError):
    """A concept was referenced that is not part of the knowledge base."""


class CapExceeded(KBError):
    """A configured enumeration cap would be exceeded."""


# ---------------------------------------------------------------------------
# Concept expressions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Concept:
    """Base class for concept expressions (no typicality operator inside)."""

    def walk(self) -> Iterator["Concept"]:
        yield self


@dataclass(frozen=True)
class Atomic(Concept):
    name: str


@dataclass(frozen=True)
class Top(Concept):
    pass


@dataclass(frozen=True)
class Bottom(Concept):
    pass


@dataclass(frozen=True)
class And(Concept):
    left: Concept
    right: Concept

    def walk(self):
        yield self
        yield from self.left.walk()
        yield from self.right.walk()


@dataclass(frozen=True)
class Some(Concept):
    role: str
    filler: Concept

    def walk(self):
        yield self
        yield from self.filler.walk()


@dataclass(frozen=True)
class Nominal(Concept):
    individual: str


TOP = Top()
BOT = Bottom()


def conjuncts(expr: Concept) -> list[Concept]:
    """Flatten nested conjunctions into a list of non-And conjuncts."""
    if isinstance(expr, And):
        return conjuncts(expr.left) + conjuncts(expr.right)
    return [expr]


def conjunction_of(parts: Iterable[Concept]) -> Concept:
    """Right-nested conjunction of ``parts`` (TOP if empty)."""
    parts = list(parts)
    if not parts:
        return TOP
    out = parts[-1]
    for p in reversed(parts[:-1]):
        out = And(p, out)
    return out


def contains_nominal(expr: Concept) -> bool:
    return any(isinstance(e, Nominal) for e in expr.walk())


def concept_size(expr: Concept) -> int:
    return sum(1 for _ in expr.walk())


# ---------------------------------------------------------------------------
# Axioms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConceptInclusion:
    sub: Concept
    sup: Concept


@dataclass(frozen=True)
class RoleInclusion:
    chain: tuple[str, ...]  # nonempty role composition on the left
    sup: str

    def __post_init__(self):
        if not self.chain:
            raise MalformedKB("role inclusion with empty chain")


@dataclass(frozen=True)
class ConceptAssertion:
    concept: Concept
    individual: str


@dataclass(frozen=True)
class RoleAssertion:
    role: str
    subject: str
    object: str


@dataclass(frozen=True)
class DefeasibleInclusion:
    """``T(subject) <= prop`` with a non-negative integer rank."""

    subject: Concept
    prop: Concept
    rank: int

    def __post_init__(self):
        if self.rank < 0:
            raise MalformedKB(f"negative rank {self.rank}")


StrictAxiom = Union[ConceptInclusion, RoleInclusion]
Assertion = Union[ConceptAssertion, RoleAssertion]


@dataclass(frozen=True)
class Query:
    """A defeasible subsumption query ``T(subject) <= predicate``."""

    subject: Concept
    predicate: Concept


# ---------------------------------------------------------------------------
# Ranked knowledge bases
# ---------------------------------------------------------------------------

class RankedKB:
    """A ranked EL+bot knowledge base.

    ``distinguished`` fixes the order of the concepts owning ranked TBoxes;
    ``ranked`` maps each of them to its defeasible inclusions.  Instances are
    immutable after construction and safe to share across threads.
    """

    __slots__ = ("strict", "distinguished", "ranked", "abox")

    def __init__(
        self,
        strict: Iterable[StrictAxiom] = (),
        distinguished: Iterable[Concept] = (),
        ranked: Mapping[Concept, Iterable[DefeasibleInclusion]] | None = None,
        abox: Iterable[Assertion] = (),
    ):
        self.strict: tuple[StrictAxiom, ...] = tuple(strict)
        self.distinguished: tuple[Concept, ...] = tuple(distinguished)
        ranked = dict(ranked or {})
        self.abox: tuple[Assertion, ...] = tuple(abox)

        if len(set(self.distinguished)) != len(self.distinguished):
            raise MalformedKB("distinguished concepts must be pairwise distinct")
        for c in self.distinguished:
            if contains_nominal(c):
                # Typicality over single-individual concepts is degenerate and
                # the semantics of aux individuals for them is unsettled.
                raise MalformedKB(f"nominal distinguished concept not supported: {c}")

        norm_ranked: dict[Concept, tuple[DefeasibleInclusion, ...]] = {}
        for subject, incs in ranked.items():
            if subject not in self.distinguished:
                raise MalformedKB(f"ranked TBox for non-distinguished concept {subject}")
            seen_pairs: set[tuple[Concept, int]] = set()
            by_prop: dict[Concept, int] = {}
            kept: list[DefeasibleInclusion] = []
            for d in incs:
                if d.subject != subject:
                    raise MalformedKB("defeasible inclusion filed under wrong concept")
                key = (d.prop, d.rank)
                if key in seen_pairs:
                    continue  # duplicate (inclusion, rank): deduplicate
                if d.prop in by_prop and by_prop[d.prop] != d.rank:
                    raise MalformedKB(
                        f"inclusion T({subject}) <= {d.prop} appears at two ranks"
                    )
                seen_pairs.add(key)
                by_prop[d.prop] = d.rank
                kept.append(d)
            norm_ranked[subject] = tuple(kept)
        for c in self.distinguished:
            norm_ranked.setdefault(c, ())
        self.ranked: dict[Concept, tuple[DefeasibleInclusion, ...]] = norm_ranked

    def all_defeasible(self) -> Iterator[DefeasibleInclusion]:
        for c in self.distinguished:
            yield from self.ranked[c]

    def __eq__(self, other):
        return (
            isinstance(other, RankedKB)
            and set(self.strict) == set(other.strict)
            and self.distinguished == other.distinguished
            and {c: set(v) for c, v in self.ranked.items()}
            == {c: set(v) for c, v in other.ranked.items()}
            and set(self.abox) == set(other.abox)
        )

    def __repr__(self):
        return (
            f"RankedKB(strict={len(self.strict)}, distinguished={len(self.distinguished)}, "
            f"defeasible={sum(len(v) for v in self.ranked.values())}, abox={len(self.abox)})"
        )

    def size(self) -> int:
        """Total node count over all axioms; the yardstick for linearity."""
        n = 0
        for ax in self.strict:
            if isinstance(ax, ConceptInclusion):
                n += 1 + concept_size(ax.sub) + concept_size(ax.sup)
            else:
                n += 1 + len(ax.chain)
        for d in self.all_defeasible():
            n += 1 + concept_size(d.subject) + concept_size(d.prop)
        for a in self.abox:
            if isinstance(a, ConceptAssertion):
                n += 1 + concept_size(a.concept)
            else:
                n += 2
        return n


# ---------------------------------------------------------------------------
# Normalized knowledge bases
# ---------------------------------------------------------------------------

@dataclass
class NormalizedKB:
    """A ranked KB restricted to normal-form axioms over an extended signature.

    Strict inclusions have one of the shapes A<=B, A and B<=C, r some A<=C,
    A<=r some B, top<=C, A<=bot, {a}<=C (with A, B, C atomic or nominal);
    role inclusions have chain length at most two.  Every defeasible inclusion
    relates two atomic names, recorded in ``ranked`` per distinguished name.
    """

    strict: tuple[ConceptInclusion | RoleInclusion, ...]
    distinguished: tuple[str, ...]
    ranked: dict[str, tuple[tuple[str, int], ...]]  # name -> ((target, rank), ...)
    abox: tuple[RoleAssertion, ...]
    signature_extension: tuple[str, ...]
    provenance: dict[str, Concept]
    complements: dict[str, str] = field(default_factory=dict)
    query_subject: Optional[str] = None
    query_target: Optional[str] = None

    def axiom_count(self) -> int:
        return (
            len(self.strict)
            + sum(len(v) for v in self.ranked.values())
            + len(self.abox)
        )

    def concept_names(self) -> set[str]:
        names: set[str] = set(self.distinguished)
        names.update(self.signature_extension)
        for ax in self.strict:
            if isinstance(ax, ConceptInclusion):
                for e in itertools.chain(ax.sub.walk(), ax.sup.walk()):
                    if isinstance(e, Atomic):
                        names.add(e.name)
        for targets in self.ranked.values():
            names.update(t for t, _ in targets)
        if self.query_subject:
            names.add(self.query_subject)
        if self.query_target:
            names.add(self.query_target)
        return names

    def display_name(self, name: str) -> str:
        """Render a possibly-fresh name through the provenance map."""
        if name in self.provenance:
            from .parser import render_concept

            return render_concept(self.provenance[name])
        return name


class _FreshNames:
    """Deterministic fresh-name source skipping names already in use."""

    def __init__(self, taken: set[str], prefix: str):
        self._taken = taken
        self._prefix = prefix
        self._n = 0

    def take(self) -> str:
        while True:
            self._n += 1
            name = f"{self._prefix}{self._n}"
            if name not in self._taken:
                self._taken.add(name)
                return name


def _signature(kb: RankedKB, query: Optional[Query]) -> set[str]:
    names: set[str] = set()

    def eat(expr: Concept):
        for e in expr.walk():
            if isinstance(e, Atomic):
                names.add(e.name)
            elif isinstance(e, Some):
                names.add(e.role)
            elif isinstance(e, Nominal):
                names.add(e.individual)

    for ax in kb.strict:
        if isinstance(ax, ConceptInclusion):
            eat(ax.sub)
            eat(ax.sup)
        else:
            names.update(ax.chain)
            names.add(ax.sup)
    for c in kb.distinguished:
        eat(c)
    for d in kb.all_defeasible():
        eat(d.subject)
        eat(d.prop)
    for a in kb.abox:
        if isinstance(a, ConceptAssertion):
            eat(a.concept)
            names.add(a.individual)
        else:
            names.update((a.role, a.subject, a.object))
    if query is not None:
        eat(query.subject)
        eat(query.predicate)
    return names


class _Normalizer:
    def __init__(self, kb: RankedKB, query: Optional[Query]):
        self.kb = kb
        taken = _signature(kb, query)
        self.fresh_concepts = _FreshNames(taken, "_C")
        self.fresh_roles = _FreshNames(taken, "_R")
        self.defined: dict[Concept, str] = {}
        self.axioms: list[ConceptInclusion | RoleInclusion] = []
        self.seen_axioms: set = set()
        self.extension: list[str] = []
        self.provenance: dict[str, Concept] = {}

    def emit(self, ax: ConceptInclusion | RoleInclusion):
        if ax not in self.seen_axioms:
            self.seen_axioms.add(ax)
            self.axioms.append(ax)

    def fresh(self, source: Concept) -> str:
        name = self.fresh_concepts.take()
        self.extension.append(name)
        self.provenance[name] = source
        return name

    def define(self, expr: Concept) -> str:
        """Introduce (memoized) a fresh name X with X == expr, both directions."""
        if expr in self.defined:
            return self.defined[expr]
        name = self.fresh(expr)
        self.defined[expr] = name
        atom = Atomic(name)
        if isinstance(expr, Top):
            self.emit(ConceptInclusion(TOP, atom))
        elif isinstance(expr, Bottom):
            self.emit(ConceptInclusion(atom, BOT))
        elif isinstance(expr, Nominal):
            self.emit(ConceptInclusion(atom, expr))
            self.emit(ConceptInclusion(expr, atom))
        else:
            self.inclusion(atom, expr)
            self.inclusion(expr, atom)
        return name

    def cref(self, expr: Concept) -> Concept:
        """Reference usable in an argument position: Atomic or Nominal."""
        if isinstance(expr, (Atomic, Nominal)):
            return expr
        return Atomic(self.define(expr))

    def atomic_ref(self, expr: Concept) -> str:
        if isinstance(expr, Atomic):
            return expr.name
        return self.define(expr)

    def inclusion(self, sub: Concept, sup: Concept):
        if isinstance(sup, Top):
            return
        if isinstance(sup, And):
            self.inclusion(sub, sup.left)
            self.inclusion(sub, sup.right)
            return
        if isinstance(sup, Some):
            filler = self.cref(sup.filler)
            if isinstance(sub, (Atomic, Nominal)):
                left: Concept = sub
            else:
                left = Atomic(self.define(sub))
            self.emit(ConceptInclusion(left, Some(sup.role, filler)))
            return
        # sup is Atomic, Nominal or Bottom
        if isinstance(sub, Bottom):
            return
        if isinstance(sub, Top):
            if isinstance(sup, Bottom):
                name = self.cref(TOP)
                self.emit(ConceptInclusion(name, BOT))
            else:
                self.emit(ConceptInclusion(TOP, sup))
            return
        if isinstance(sub, And):
            parts = [c for c in conjuncts(sub) if not isinstance(c, Top)]
            if any(isinstance(c, Bottom) for c in parts):
                return
            refs = [self.cref(c) for c in parts]
            if not refs:
                self.inclusion(TOP, sup)
                return
            if len(refs) == 1:
                self.inclusion(refs[0], sup)
                return
            cur = refs[0]
            for nxt in refs[1:-1]:
                partial = Atomic(self.fresh(And(cur, nxt)))
                self.emit(ConceptInclusion(And(cur, nxt), partial))
                cur = partial
            if isinstance(sup, Bottom):
                name = Atomic(self.fresh(sub))
                self.emit(ConceptInclusion(And(cur, refs[-1]), name))
                self.emit(ConceptInclusion(name, BOT))
            else:
                self.emit(ConceptInclusion(And(cur, refs[-1]), sup))
            return
        if isinstance(sub, Some):
            filler = self.cref(sub.filler)
            if isinstance(sup, Bottom):
                name = Atomic(self.fresh(sub))
                self.emit(ConceptInclusion(Some(sub.role, filler), name))
                self.emit(ConceptInclusion(name, BOT))
            else:
                self.emit(ConceptInclusion(Some(sub.role, filler), sup))
            return
        # sub is Atomic or Nominal
        self.emit(ConceptInclusion(sub, sup))

    def role_inclusion(self, ax: RoleInclusion):
        chain = ax.chain
        if len(chain) <= 2:
            self.emit(ax)
            return
        cur = chain[0]
        for r in chain[1:-1]:
            f = self.fresh_roles.take()
            self.emit(RoleInclusion((cur, r), f))
            cur = f
        self.emit(RoleInclusion((cur, chain[-1]), ax.sup))


def normalize(kb: RankedKB, query: Optional[Query] = None) -> NormalizedKB:
    """Rewrite ``kb`` (and optionally a query) into normal form.

    Complex distinguished concepts, defeasible properties and query concepts
    receive fresh names with full definitional axioms in both directions, so
    membership in the fresh name coincides with membership in the source
    expression in every closure.  Strict axioms are decomposed structurally.
    The output is linear in the size of the input.
    """
    n = _Normalizer(kb, query)

    for ax in kb.strict:
        if isinstance(ax, ConceptInclusion):
            n.inclusion(ax.sub, ax.sup)
        else:
            n.role_inclusion(ax)

    role_assertions: list[RoleAssertion] = []
    for a in kb.abox:
        if isinstance(a, ConceptAssertion):
            n.inclusion(Nominal(a.individual), a.concept)
        else:
            role_assertions.append(a)

    distinguished: list[str] = []
    ranked: dict[str, tuple[tuple[str, int], ...]] = {}
    for c in kb.distinguished:
        cname = n.atomic_ref(c)
        distinguished.append(cname)
        targets = []
        for d in kb.ranked[c]:
            targets.append((n.atomic_ref(d.prop), d.rank))
        ranked[cname] = tuple(targets)

    qsubj = qtgt = None
    if query is not None:
        qsubj = n.atomic_ref(query.subject)
        qtgt = n.atomic_ref(query.predicate)

    return NormalizedKB(
        strict=tuple(n.axioms),
        distinguished=tuple(distinguished),
        ranked=ranked,
        abox=tuple(role_assertions),
        signature_extension=tuple(n.extension),
        provenance=dict(n.provenance),
        query_subject=qsubj,
        query_target=qtgt,
    )


def negation_scaffold(nkb: NormalizedKB, concepts: Iterable[str]) -> NormalizedKB:
    """Add complement names with disjointness axioms for the given concepts.

    For each requested concept name C (that does not already have one) a fresh
    name notC is added together with ``C and notC <= bot``.  Idempotent: a
    second application for the same concepts adds nothing.
    """
    known = nkb.concept_names()
    taken = set(known)
    taken.update(nkb.provenance)
    fresh = _FreshNames(taken, "_Not")
    new_axioms = list(nkb.strict)
    comps = dict(nkb.complements)
    extension = list(nkb.signature_extension)
    provenance = dict(nkb.provenance)
    bot_names = _FreshNames(taken, "_Conflict")
    for c in concepts:
        if c not in known:
            raise UnknownConcept(c)
        if c in comps:
            continue
        notc = fresh.take()
        comps[c] = notc
        extension.append(notc)
        bot_name = bot_names.take()
        extension.append(bot_name)
        provenance[bot_name] = And(Atomic(c), Atomic(notc))
        new_axioms.append(ConceptInclusion(And(Atomic(c), Atomic(notc)), Atomic(bot_name)))
        new_axioms.append(ConceptInclusion(Atomic(bot_name), BOT))
    return NormalizedKB(
        strict=tuple(new_axioms),
        distinguished=nkb.distinguished,
        ranked=dict(nkb.ranked),
        abox=nkb.abox,
        signature_extension=tuple(extension),
        provenance=provenance,
        complements=comps,
        query_subject=nkb.query_subject,
        query_target=nkb.query_target,
    )
