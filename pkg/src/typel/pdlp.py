"""Positive disjunctive logic programs as a correctness harness.

Minimal-model entailment for positive disjunctive programs reduces to
defeasible entailment over a ranked KB, which gives an independent oracle
for the whole pipeline: ``min_entails_brute_force`` decides entailment by
enumerating valuations, ``reduce_pdlp`` builds the ranked KB, and the two
must agree on every literal.

The encoding represents a propositional interpretation as an ``Interp``
element that must satisfy every clause and may carry, per variable v, at
most one of ``True_v``/``False_v``.  Minimization is concept-wise: one
distinguished concept per variable prefers elements carrying ``False_v``
(capturing subset-minimality of the true set), and one distinguished
concept ``Total`` above all of them counts how many variables are decided
at all.  ``Total`` is strictly more specific than every per-variable
concept, so a fully decided interpretation overrides the per-variable
advantage that an undecided one would otherwise keep; preferred candidate
worlds are then exactly the minimal models.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import (
    Atomic,
    BOT,
    CapExceeded,
    ConceptInclusion,
    DefeasibleInclusion,
    KBError,
    Query,
    RankedKB,
    conjunction_of,
)

Literal = tuple[str, bool]  # (variable, polarity)

_NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_']*\Z")


class MalformedPDLP(KBError):
    """The clause set violates the positive-program invariants."""


@dataclass(frozen=True)
class PDLP:
    """A positive disjunctive logic program: every clause has a positive literal."""

    variables: tuple[str, ...]
    clauses: tuple[frozenset[Literal], ...]

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise MalformedPDLP("duplicate variable names")
        for v in self.variables:
            if not _NAME_RE.match(v):
                raise MalformedPDLP(f"bad variable name {v!r}")
        known = set(self.variables)
        for clause in self.clauses:
            if not clause:
                raise MalformedPDLP("empty clause")
            if not any(pol for _, pol in clause):
                raise MalformedPDLP("clause without a positive literal")
            for v, _ in clause:
                if v not in known:
                    raise MalformedPDLP(f"unknown variable {v!r}")

    def literals(self) -> list[Literal]:
        return [(v, pol) for v in self.variables for pol in (True, False)]


def parse_pdlp(text: str) -> PDLP:
    """Parse the DIMACS-like format: header ``pdlp <nvars> <nclauses>``,
    then one clause per line as nonzero signed integers (an optional
    trailing 0 per line is tolerated); ``c`` lines are comments."""
    lines = [
        ln.strip()
        for ln in text.splitlines()
        if ln.strip() and not ln.lstrip().startswith("c")
    ]
    if not lines:
        raise MalformedPDLP("empty input")
    header = lines[0].split()
    if len(header) != 3 or header[0] != "pdlp":
        raise MalformedPDLP("expected header 'pdlp <nvars> <nclauses>'")
    try:
        nvars, nclauses = int(header[1]), int(header[2])
    except ValueError as exc:
        raise MalformedPDLP("non-integer header fields") from exc
    variables = tuple(f"p{i}" for i in range(1, nvars + 1))
    clauses = []
    for ln in lines[1:]:
        lits = []
        for tok in ln.split():
            n = int(tok)
            if n == 0:
                break
            if abs(n) > nvars:
                raise MalformedPDLP(f"literal {n} out of range")
            lits.append((f"p{abs(n)}", n > 0))
        if lits:
            clauses.append(frozenset(lits))
    if len(clauses) != nclauses:
        raise MalformedPDLP(
            f"header announces {nclauses} clauses, found {len(clauses)}"
        )
    return PDLP(variables, tuple(clauses))


def render_pdlp(p: PDLP) -> str:
    index = {v: i + 1 for i, v in enumerate(p.variables)}
    lines = [f"pdlp {len(p.variables)} {len(p.clauses)}"]
    for clause in p.clauses:
        nums = sorted((index[v] if pol else -index[v]) for v, pol in clause)
        lines.append(" ".join(str(n) for n in nums))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Brute-force oracle
# ---------------------------------------------------------------------------

def _models(p: PDLP) -> list[frozenset[str]]:
    n = len(p.variables)
    out = []
    for mask in range(1 << n):
        true = frozenset(v for i, v in enumerate(p.variables) if mask >> i & 1)
        ok = all(
            any((v in true) == pol for v, pol in clause) for clause in p.clauses
        )
        if ok:
            out.append(true)
    return out


def minimal_models(p: PDLP, cap: int = 14) -> list[frozenset[str]]:
    if len(p.variables) > cap:
        raise CapExceeded(
            f"{len(p.variables)} variables exceed the brute-force cap {cap}"
        )
    models = _models(p)
    return [m for m in models if not any(m2 < m for m2 in models)]


def min_entails_brute_force(p: PDLP, literal: Literal, cap: int = 14) -> bool:
    """True iff the literal holds in every subset-minimal model."""
    v, pol = literal
    if v not in p.variables:
        raise MalformedPDLP(f"unknown variable {v!r}")
    return all((v in m) == pol for m in minimal_models(p, cap))


# ---------------------------------------------------------------------------
# Reduction to a ranked KB
# ---------------------------------------------------------------------------

def reduce_pdlp(p: PDLP) -> tuple[RankedKB, dict[Literal, Query]]:
    """Ranked KB whose defeasible entailment matches minimal-model entailment.

    Query mapping: literal l goes to ``T(Interp) <= True_v`` for positive l
    and ``T(Interp) <= False_v`` for negative l.
    """
    interp = Atomic("Interp")
    allc = Atomic("AllClauses")
    total = Atomic("Total")
    tru = {v: Atomic(f"True_{v}") for v in p.variables}
    fls = {v: Atomic(f"False_{v}") for v in p.variables}
    pref = {v: Atomic(f"Pref_{v}") for v in p.variables}
    clause_names = [Atomic(f"Clause{j}") for j in range(1, len(p.clauses) + 1)]

    strict: list[ConceptInclusion] = []
    for j, clause in enumerate(p.clauses):
        lits = sorted(clause)
        for v, pol in lits:
            strict.append(ConceptInclusion(tru[v] if pol else fls[v], clause_names[j]))
        complements = [fls[v] if pol else tru[v] for v, pol in lits]
        strict.append(
            ConceptInclusion(
                conjunction_of([interp, clause_names[j], *complements]), BOT
            )
        )
    if p.clauses:
        strict.append(ConceptInclusion(conjunction_of(clause_names), allc))
        for name in clause_names:
            strict.append(ConceptInclusion(allc, name))
    strict.append(ConceptInclusion(interp, allc))
    for v in p.variables:
        strict.append(
            ConceptInclusion(conjunction_of([interp, tru[v], fls[v]]), BOT)
        )
    strict.append(ConceptInclusion(interp, total))
    for v in p.variables:
        strict.append(ConceptInclusion(total, pref[v]))

    distinguished = [pref[v] for v in p.variables] + [total]
    ranked: dict[Atomic, list[DefeasibleInclusion]] = {
        pref[v]: [DefeasibleInclusion(pref[v], fls[v], 0)] for v in p.variables
    }
    ranked[total] = [
        DefeasibleInclusion(total, concept, 0)
        for v in p.variables
        for concept in (tru[v], fls[v])
    ]
    kb = RankedKB(strict=strict, distinguished=distinguished, ranked=ranked)

    queries: dict[Literal, Query] = {}
    for v in p.variables:
        queries[(v, True)] = Query(interp, tru[v])
        queries[(v, False)] = Query(interp, fls[v])
    return kb, queries
