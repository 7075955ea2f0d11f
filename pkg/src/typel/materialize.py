"""Forward-chaining materialization over ground atoms.

Implements the instance-checking fragment of the materialization calculus as
a semi-naive fixpoint: atoms are interned to dense integer ids, stored in
per-predicate indexed relations, and new atoms are pushed through a worklist
that fires exactly the rules mentioning them.  The same engine, run per
origin concept with a seed ``inst(A, A)``, decides strict subsumption
(the subclass-checking variant of the calculus).

Inconsistency (an instance of a bottom concept) is detected by the constraint
rule and short-circuits saturation via a flag; the flooding rule that derives
every class membership from an inconsistency is semantically equivalent to
the flag for every use in this package and is therefore not materialized.

Terms and concept names share one symbol space, so an individual name used
as a concept (a nominal) works throughout, as the nominal-merging rules
require.  Roles live in a separate space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .model import (
    And,
    Atomic,
    Bottom,
    Concept,
    ConceptInclusion,
    KBError,
    Nominal,
    NormalizedKB,
    RoleInclusion,
    Some,
    Top,
)


class Symbols:
    """Bidirectional name <-> dense integer id table."""

    __slots__ = ("names", "ids")

    def __init__(self):
        self.names: list[str] = []
        self.ids: dict[str, int] = {}

    def id(self, name: str) -> int:
        i = self.ids.get(name)
        if i is None:
            i = len(self.names)
            self.ids[name] = i
            self.names.append(name)
        return i

    def name(self, i: int) -> str:
        return self.names[i]

    def __contains__(self, name: str) -> bool:
        return name in self.ids


@dataclass
class FactBase:
    """Input-translation facts plus static join indexes.

    Immutable after construction; any number of saturations may share one
    FactBase concurrently.
    """

    symbols: Symbols
    roles: Symbols
    # static relations, indexed
    subclass_idx: dict[int, tuple[int, ...]]
    conj_first: dict[int, tuple[tuple[int, int], ...]]
    conj_second: dict[int, tuple[tuple[int, int], ...]]
    subex_by_filler: dict[int, tuple[tuple[int, int], ...]]
    subex_by_role: dict[int, tuple[tuple[int, int], ...]]
    supex_by_sub: dict[int, tuple[tuple[int, int, int], ...]]
    top_list: tuple[int, ...]
    bot_set: frozenset[int]
    subrole_idx: dict[int, tuple[int, ...]]
    chain_first: dict[int, tuple[tuple[int, int], ...]]
    chain_second: dict[int, tuple[tuple[int, int], ...]]
    noms: frozenset[int]
    # typicality machinery
    subtyp: tuple[tuple[int, int, int], ...]  # (concept, target, rank)
    subtyp_by_subject: dict[int, tuple[tuple[int, int], ...]]
    tprop_by_concept: dict[int, tuple[int, ...]]
    tprop_guards: dict[int, tuple[int, ...]]  # target -> concepts offering it
    dcls: frozenset[int]
    targets: frozenset[int]
    auxtc_pairs: frozenset[tuple[int, int]]
    auxtc_by_concept: dict[int, tuple[int, ...]]
    # seeds
    base_inst: tuple[tuple[int, int], ...]
    aux_c: Optional[int] = None
    query_subject: Optional[int] = None
    query_target: Optional[int] = None

    def concept_id(self, name: str) -> int:
        if name not in self.symbols:
            raise KBError(f"unknown symbol {name!r}")
        return self.symbols.id(name)


def _fresh_name(base: str, taken: set[str]) -> str:
    name = base
    n = 1
    while name in taken:
        n += 1
        name = f"{base}_{n}"
    taken.add(name)
    return name


def translate(nkb: NormalizedKB, with_query: bool = True) -> FactBase:
    """Emit the input translation of a normalized KB as a FactBase.

    One fact per axiom; one fresh witness constant per ``A <= r some B``
    axiom; a role assertion r(a,b) becomes a supEx fact reusing b as its own
    witness.  When the KB carries a query, the prototype constant aux_c is
    declared as a nominal instance of the query subject, and every
    distinguished concept receives its typicality carrier constant.
    """
    syms = Symbols()
    roles = Symbols()
    subclass: dict[int, list[int]] = {}
    conj_first: dict[int, list] = {}
    conj_second: dict[int, list] = {}
    subex_f: dict[int, list] = {}
    subex_r: dict[int, list] = {}
    supex: dict[int, list] = {}
    top_list: list[int] = []
    bot_set: set[int] = set()
    subrole: dict[int, list[int]] = {}
    chain_first: dict[int, list] = {}
    chain_second: dict[int, list] = {}
    noms: set[int] = set()

    taken = set(nkb.concept_names())
    taken.update(nkb.provenance)
    for a in nkb.abox:
        taken.update((a.subject, a.object))

    def ref(expr: Concept) -> int:
        if isinstance(expr, Atomic):
            return syms.id(expr.name)
        if isinstance(expr, Nominal):
            i = syms.id(expr.individual)
            noms.add(i)
            return i
        raise KBError(f"not in normal form: argument {expr!r}")

    witness_count = 0
    for ax in nkb.strict:
        if isinstance(ax, RoleInclusion):
            ids = tuple(roles.id(r) for r in ax.chain)
            sup = roles.id(ax.sup)
            if len(ids) == 1:
                subrole.setdefault(ids[0], []).append(sup)
            elif len(ids) == 2:
                chain_first.setdefault(ids[0], []).append((ids[1], sup))
                chain_second.setdefault(ids[1], []).append((ids[0], sup))
            else:
                raise KBError("role chain longer than 2 is not in normal form")
            continue
        sub, sup = ax.sub, ax.sup
        if isinstance(sup, Bottom):
            bot_set.add(ref(sub))
        elif isinstance(sub, Top):
            top_list.append(ref(sup))
        elif isinstance(sub, And):
            a, b = ref(sub.left), ref(sub.right)
            z = ref(sup)
            conj_first.setdefault(a, []).append((b, z))
            conj_second.setdefault(b, []).append((a, z))
        elif isinstance(sub, Some):
            r = roles.id(sub.role)
            f = ref(sub.filler)
            z = ref(sup)
            subex_f.setdefault(f, []).append((r, z))
            subex_r.setdefault(r, []).append((f, z))
        elif isinstance(sup, Some):
            a = ref(sub)
            r = roles.id(sup.role)
            f = ref(sup.filler)
            witness_count += 1
            w = syms.id(_fresh_name(f"_ex{witness_count}", taken))
            supex.setdefault(a, []).append((r, f, w))
        else:
            subclass.setdefault(ref(sub), []).append(ref(sup))

    for a in nkb.abox:
        s = syms.id(a.subject)
        o = syms.id(a.object)
        noms.update((s, o))
        r = roles.id(a.role)
        supex.setdefault(s, []).append((r, o, o))

    subtyp: list[tuple[int, int, int]] = []
    subtyp_by_subject: dict[int, list] = {}
    tprop_by_concept: dict[int, list] = {}
    tprop_guards: dict[int, list] = {}
    dcls: set[int] = set()
    auxtc_pairs: set[tuple[int, int]] = set()
    auxtc_by_concept: dict[int, list[int]] = {}
    for ci in nkb.distinguished:
        ci_id = syms.id(ci)
        dcls.add(ci_id)
        aux = syms.id(_fresh_name(f"aux_{ci}", taken))
        auxtc_pairs.add((aux, ci_id))
        auxtc_by_concept.setdefault(ci_id, []).append(aux)
        for target, rank in nkb.ranked[ci]:
            t_id = syms.id(target)
            subtyp.append((ci_id, t_id, rank))
            subtyp_by_subject.setdefault(ci_id, []).append((t_id, rank))
            if t_id not in tprop_by_concept.setdefault(ci_id, []):
                tprop_by_concept[ci_id].append(t_id)
            tprop_guards.setdefault(t_id, []).append(ci_id)

    base_inst: list[tuple[int, int]] = []
    aux_c = qsub = qtgt = None
    if with_query and nkb.query_subject is not None:
        qsub = syms.id(nkb.query_subject)
        if nkb.query_target is not None:
            qtgt = syms.id(nkb.query_target)
        aux_c = syms.id(_fresh_name("aux_c", taken))
        noms.add(aux_c)
        auxtc_pairs.add((aux_c, qsub))
        auxtc_by_concept.setdefault(qsub, []).append(aux_c)
        base_inst.append((aux_c, qsub))

    return FactBase(
        symbols=syms,
        roles=roles,
        subclass_idx={k: tuple(v) for k, v in subclass.items()},
        conj_first={k: tuple(v) for k, v in conj_first.items()},
        conj_second={k: tuple(v) for k, v in conj_second.items()},
        subex_by_filler={k: tuple(v) for k, v in subex_f.items()},
        subex_by_role={k: tuple(v) for k, v in subex_r.items()},
        supex_by_sub={k: tuple(v) for k, v in supex.items()},
        top_list=tuple(top_list),
        bot_set=frozenset(bot_set),
        subrole_idx={k: tuple(v) for k, v in subrole.items()},
        chain_first={k: tuple(v) for k, v in chain_first.items()},
        chain_second={k: tuple(v) for k, v in chain_second.items()},
        noms=frozenset(noms),
        subtyp=tuple(subtyp),
        subtyp_by_subject={k: tuple(v) for k, v in subtyp_by_subject.items()},
        tprop_by_concept={k: tuple(v) for k, v in tprop_by_concept.items()},
        tprop_guards={k: tuple(v) for k, v in tprop_guards.items()},
        dcls=frozenset(dcls),
        targets=frozenset(tprop_guards),
        auxtc_pairs=frozenset(auxtc_pairs),
        auxtc_by_concept={k: tuple(v) for k, v in auxtc_by_concept.items()},
        base_inst=tuple(base_inst),
        aux_c=aux_c,
        query_subject=qsub,
        query_target=qtgt,
    )


class Saturator:
    """Mutable saturation state over a shared FactBase.

    A single instance is single-threaded.  With ``track=True`` every added
    atom is journaled so the state can be rolled back to a mark, which the
    candidate search uses for incremental subset exploration.

    ``guarded_choices`` puts the engine into reduct mode: the listed choice
    targets are added for the prototype constant only once one of their
    guard memberships is derived.  This computes the least fixpoint of the
    definite rules plus the guarded choice rules, which is what answer-set
    stability requires.
    """

    __slots__ = (
        "fb", "typicality", "inconsistent", "ignore_bot", "inst", "by_conc",
        "t_sr", "t_obj", "t_or", "typ", "nommem", "subjects_seen",
        "trail", "work", "pending",
    )

    def __init__(
        self,
        fb: FactBase,
        *,
        typicality: bool = True,
        extra_inst: Iterable[tuple[int, int]] = (),
        guarded_choices: Optional[Iterable[int]] = None,
        track: bool = False,
        ignore_bot: bool = False,
    ):
        self.fb = fb
        self.typicality = typicality
        self.inconsistent = False
        self.ignore_bot = ignore_bot
        self.inst: dict[int, set[int]] = {}
        self.by_conc: dict[int, set[int]] = {}
        self.t_sr: dict[tuple[int, int], set[int]] = {}
        self.t_obj: dict[int, set[tuple[int, int]]] = {}
        self.t_or: dict[tuple[int, int], set[int]] = {}
        self.typ: set[tuple[int, int]] = set()
        self.nommem: dict[int, set[int]] = {}
        self.subjects_seen: set[int] = set()
        self.trail: Optional[list] = [] if track else None
        self.work: list = []
        self.pending: set[int] = set(guarded_choices or ())
        assert not (track and self.pending), "tracking and guarded mode are exclusive"
        for n in fb.noms:
            self.add_inst(n, n)
        for x, c in fb.base_inst:
            self.add_inst(x, c)
        for x, c in extra_inst:
            self.add_inst(x, c)

    # -- atom insertion ----------------------------------------------------
    def add_inst(self, x: int, c: int):
        s = self.inst.get(x)
        if s is None:
            s = self.inst[x] = set()
        elif c in s:
            return
        s.add(c)
        self.by_conc.setdefault(c, set()).add(x)
        if self.trail is not None:
            self.trail.append((0, x, c))
        self.work.append((0, x, c))
        if c in self.fb.bot_set and not self.inconsistent and not self.ignore_bot:
            self.inconsistent = True
            if self.trail is not None:
                self.trail.append((3,))

    def add_triple(self, x: int, r: int, y: int):
        key = (x, r)
        s = self.t_sr.get(key)
        if s is None:
            s = self.t_sr[key] = set()
        elif y in s:
            return
        s.add(y)
        self.t_obj.setdefault(y, set()).add(key)
        self.t_or.setdefault((y, r), set()).add(x)
        if self.trail is not None:
            self.trail.append((1, x, r, y))
        self.work.append((1, x, r, y))

    def add_typ(self, y: int, c: int):
        if (y, c) in self.typ:
            return
        self.typ.add((y, c))
        if self.trail is not None:
            self.trail.append((2, y, c))
        self.work.append((2, y, c))

    # -- fixpoint ----------------------------------------------------------
    def run(self) -> bool:
        """Propagate to fixpoint; returns True iff consistent."""
        work = self.work
        while work:
            if self.inconsistent:
                work.clear()
                break
            item = work.pop()
            tag = item[0]
            if tag == 0:
                self._fire_inst(item[1], item[2])
            elif tag == 1:
                self._fire_triple(item[1], item[2], item[3])
            else:
                self._fire_typ(item[1], item[2])
        return not self.inconsistent

    def _fire_inst(self, x: int, c: int):
        fb = self.fb
        add_inst = self.add_inst
        if fb.top_list and x not in self.subjects_seen:
            self.subjects_seen.add(x)
            if self.trail is not None:
                self.trail.append((4, x))
            for z in fb.top_list:
                add_inst(x, z)
        for z in fb.subclass_idx.get(c, ()):
            add_inst(x, z)
        mem = self.inst[x]
        for b, z in fb.conj_first.get(c, ()):
            if b in mem:
                add_inst(x, z)
        for a, z in fb.conj_second.get(c, ()):
            if a in mem:
                add_inst(x, z)
        se = fb.subex_by_filler.get(c)
        if se:
            t_or = self.t_or
            for r, z in se:
                for s in t_or.get((x, r), ()):
                    add_inst(s, z)
        for r, b, w in fb.supex_by_sub.get(c, ()):
            self.add_triple(x, r, w)
            add_inst(w, b)
        if c in fb.noms:
            nm = self.nommem.setdefault(x, set())
            if c not in nm:
                nm.add(c)
                if self.trail is not None:
                    self.trail.append((5, x, c))
            for z in list(mem):
                add_inst(c, z)
            for s, u in list(self.t_obj.get(x, ())):
                self.add_triple(s, u, c)
            for z in list(self.inst.get(c, ())):
                add_inst(x, z)
        nm = self.nommem.get(x)
        if nm:
            for n in list(nm):
                add_inst(n, c)
        if x in fb.noms:
            insts = self.by_conc.get(x)
            if insts:
                for s in list(insts):
                    add_inst(s, c)
        if self.typicality:
            for aux in fb.auxtc_by_concept.get(c, ()):
                add_inst(aux, c)
            if (x, c) in fb.auxtc_pairs:
                self.add_typ(x, c)
            if self.pending and x == fb.aux_c:
                ds = fb.tprop_by_concept.get(c)
                if ds:
                    for d in ds:
                        if d in self.pending:
                            self.pending.discard(d)
                            add_inst(x, d)

    def _fire_triple(self, x: int, r: int, y: int):
        fb = self.fb
        for w in fb.subrole_idx.get(r, ()):
            self.add_triple(x, w, y)
        cf = fb.chain_first.get(r)
        if cf:
            for r2, sup in cf:
                for y2 in list(self.t_sr.get((y, r2), ())):
                    self.add_triple(x, sup, y2)
        cs = fb.chain_second.get(r)
        if cs:
            for r1, sup in cs:
                for s in list(self.t_or.get((x, r1), ())):
                    self.add_triple(s, sup, y)
        se = fb.subex_by_role.get(r)
        if se:
            ymem = self.inst.get(y)
            if ymem:
                for fc, z in se:
                    if fc in ymem:
                        self.add_inst(x, z)
        nm = self.nommem.get(y)
        if nm:
            for n in list(nm):
                self.add_triple(x, r, n)

    def _fire_typ(self, y: int, c: int):
        for d, _rank in self.fb.subtyp_by_subject.get(c, ()):
            self.add_inst(y, d)

    # -- incremental exploration --------------------------------------------
    def mark(self) -> int:
        assert self.trail is not None, "engine not in tracking mode"
        return len(self.trail)

    def undo(self, mark: int):
        trail = self.trail
        while len(trail) > mark:
            e = trail.pop()
            tag = e[0]
            if tag == 0:
                self.inst[e[1]].discard(e[2])
                self.by_conc[e[2]].discard(e[1])
            elif tag == 1:
                _, x, r, y = e
                self.t_sr[(x, r)].discard(y)
                self.t_obj[y].discard((x, r))
                self.t_or[(y, r)].discard(x)
            elif tag == 2:
                self.typ.discard((e[1], e[2]))
            elif tag == 3:
                self.inconsistent = False
            elif tag == 4:
                self.subjects_seen.discard(e[1])
            else:
                self.nommem[e[1]].discard(e[2])
        self.work.clear()

    def memberships(self, x: int) -> set[int]:
        return self.inst.get(x, set())

    def snapshot(self) -> "Closure":
        return Closure._from_engine(self)


# ---------------------------------------------------------------------------
# Closure snapshots
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class Closure:
    """An immutable saturation result in name space."""

    inconsistent: bool
    inst: dict[str, frozenset[str]]
    triples: frozenset[tuple[str, str, str]]
    typ: frozenset[tuple[str, str]]

    def __eq__(self, other):
        return (
            isinstance(other, Closure)
            and self.inconsistent == other.inconsistent
            and self.inst == other.inst
            and self.triples == other.triples
            and self.typ == other.typ
        )

    @staticmethod
    def _from_engine(eng: Saturator) -> "Closure":
        syms = eng.fb.symbols
        rsyms = eng.fb.roles
        inst = {
            syms.name(x): frozenset(syms.name(c) for c in cs)
            for x, cs in eng.inst.items()
            if cs
        }
        triples = frozenset(
            (syms.name(x), rsyms.name(r), syms.name(y))
            for (x, r), ys in eng.t_sr.items()
            for y in ys
        )
        typ = frozenset((syms.name(y), syms.name(c)) for y, c in eng.typ)
        return Closure(eng.inconsistent, inst, triples, typ)

    def has_inst(self, term: str, concept: str) -> bool:
        return concept in self.inst.get(term, frozenset())

    def memberships(self, term: str) -> frozenset[str]:
        return self.inst.get(term, frozenset())

    def atoms(self) -> list[str]:
        out = [
            f"inst({x},{c})" for x, cs in self.inst.items() for c in cs
        ]
        out.extend(f"triple({x},{r},{y})" for x, r, y in self.triples)
        out.extend(f"typ({y},{c})" for y, c in self.typ)
        return sorted(out)

    def dump(self) -> str:
        return "\n".join(self.atoms()) + "\n"

    def __le__(self, other: "Closure") -> bool:
        """Atom-set inclusion (monotonicity checks)."""
        return (
            all(cs <= other.inst.get(x, frozenset()) for x, cs in self.inst.items())
            and self.triples <= other.triples
            and self.typ <= other.typ
        )


def saturate(fb: FactBase, choices: Iterable[tuple[str, str]] = ()) -> Closure:
    """Least fixpoint of the rule set over the fact base plus extra atoms.

    ``choices`` are inst atoms given as (term, concept) name pairs; the
    choice rule itself is not applied here, callers supply its outcomes.
    Inconsistency is reported on the closure, not raised.
    """
    extra = [(fb.symbols.id(t), fb.symbols.id(c)) for t, c in choices]
    eng = Saturator(fb, extra_inst=extra)
    eng.run()
    return eng.snapshot()


def aux_choices(fb: FactBase, targets: Iterable[str]) -> list[tuple[str, str]]:
    """Choice atoms asserting the given typical properties for aux_c."""
    if fb.aux_c is None:
        raise KBError("fact base has no query prototype")
    aux = fb.symbols.name(fb.aux_c)
    return [(aux, t) for t in targets]


# ---------------------------------------------------------------------------
# Strict subsumption and consistency
# ---------------------------------------------------------------------------

class SubsumptionTable:
    """Strict subsumption via per-origin saturation.

    For an origin concept A, the engine is run on the strict fragment with
    the seed inst(A, A): derived memberships of the test subject A are
    exactly the strict subsumers of A.  An inconsistent origin closure means
    A is strictly unsatisfiable, hence subsumed by everything.
    """

    def __init__(self, fb: FactBase):
        self.fb = fb
        self._cache: dict[int, tuple[frozenset[int], bool]] = {}

    def _closure(self, origin: int) -> tuple[frozenset[int], bool]:
        got = self._cache.get(origin)
        if got is None:
            eng = Saturator(self.fb, typicality=False, extra_inst=[(origin, origin)])
            eng.run()
            got = (frozenset(eng.memberships(origin)), eng.inconsistent)
            self._cache[origin] = got
        return got

    def subsumes(self, a: str, b: str) -> bool:
        syms = self.fb.symbols
        if a not in syms:
            return a == b
        mem, unsat = self._closure(syms.id(a))
        if unsat:
            return True
        return b in syms and syms.id(b) in mem


def _strict_table(nkb: NormalizedKB) -> SubsumptionTable:
    table = getattr(nkb, "_subsumption_table", None)
    if table is None:
        table = SubsumptionTable(translate(nkb, with_query=False))
        nkb._subsumption_table = table
    return table


def subsumes(nkb: NormalizedKB, a: str, b: str) -> bool:
    """True iff the strict part (with ABox) entails a <= b, for atomic names."""
    return _strict_table(nkb).subsumes(a, b)


@dataclass(frozen=True)
class ConsistencyReport:
    consistent: bool
    unsatisfiable_distinguished: tuple[str, ...] = ()
    tcompliance_warnings: tuple[str, ...] = ()

    def ok(self) -> bool:
        return self.consistent and not self.tcompliance_warnings


def check_strict_consistency(nkb: NormalizedKB) -> ConsistencyReport:
    """Check the strict part plus ABox, and probe typicality conflicts.

    For each distinguished concept that is strictly satisfiable, a probe
    individual carrying the concept and all of its typical properties is
    saturated; a resulting bottom instance means no element can ever satisfy
    all defaults of that concept, which is reported as an advisory warning.
    """
    fb = translate(nkb, with_query=False)
    eng = Saturator(fb, typicality=False)
    if not eng.run():
        return ConsistencyReport(consistent=False)
    unsat: list[str] = []
    warn: list[str] = []
    probe_name = "_probe"
    while probe_name in fb.symbols:
        probe_name += "_x"
    probe = fb.symbols.id(probe_name)
    for ci in nkb.distinguished:
        ci_id = fb.symbols.id(ci)
        base = Saturator(fb, typicality=False, extra_inst=[(probe, ci_id)])
        if not base.run():
            unsat.append(ci)
            continue
        seeds = [(probe, ci_id)]
        seeds.extend((probe, fb.symbols.id(t)) for t, _ in nkb.ranked[ci])
        full = Saturator(fb, typicality=False, extra_inst=seeds)
        if not full.run():
            warn.append(ci)
    return ConsistencyReport(True, tuple(unsat), tuple(warn))
