"""Emission of the reasoner's ground program and preference program as text.

The emitted pair is meant for manual cross-checking against an external ASP
solver (clingo plus asprin): ``emit_program`` produces the knowledge-base
facts, the inference-rule fragment (instance and subclass variants), the
specificity rule, the choice rule and the typicality-carrier rules for one
query; ``emit_preference_program`` produces the preference specification and
the preference-type program that orders answer sets by the typical
properties of the prototype constant.

Concept, role and individual names are lowercased to valid ASP constants; a
reversible name map is appended as comments.  Emission is deterministic, so
golden files stay byte-stable.
"""

from __future__ import annotations

from .model import (
    And,
    Atomic,
    Bottom,
    Concept,
    KBError,
    Nominal,
    NormalizedKB,
    RoleInclusion,
    Some,
    Top,
)

_INFERENCE_RULES = """\
% instance-checking rules
inst(X,X) :- nom(X).
inst(X,Z) :- top(Z), inst(X,Z1).
inst(X,Y) :- bot(Z), inst(U,Z), inst(X,Z1), cls(Y).
:- bot(Z), inst(U,Z).
inst(X,Z) :- subClass(Y,Z), inst(X,Y).
inst(X,Z) :- subConj(Y1,Y2,Z), inst(X,Y1), inst(X,Y2).
inst(X,Z) :- subEx(V,Y,Z), triple(X,V,X1), inst(X1,Y).
triple(X,V,X1) :- supEx(Y,V,Z,X1), inst(X,Y).
inst(X1,Z) :- supEx(Y,V,Z,X1), inst(X,Y).
triple(X,W,X1) :- subRole(V,W), triple(X,V,X1).
triple(X,W,X2) :- subRChain(U,V,W), triple(X,U,X1), triple(X1,V,X2).
inst(Y,Z) :- inst(X,Y), nom(Y), inst(X,Z).
inst(X,Z) :- inst(X,Y), nom(Y), inst(Y,Z).
triple(Z,U,Y) :- inst(X,Y), nom(Y), triple(Z,U,X).

% subclass-checking variants, origin-tracked: inst_sc(A,B,A) reads A <= B
inst_sc(A,A,A) :- cls(A).
inst_sc(X,X,O) :- nom(X), cls(O).
inst_sc(X,Z,O) :- top(Z), inst_sc(X,Z1,O).
inst_sc(X,Y,O) :- bot(Z), inst_sc(U,Z,O), inst_sc(X,Z1,O), cls(Y).
inst_sc(X,Z,O) :- subClass(Y,Z), inst_sc(X,Y,O).
inst_sc(X,Z,O) :- subConj(Y1,Y2,Z), inst_sc(X,Y1,O), inst_sc(X,Y2,O).
inst_sc(X,Z,O) :- subEx(V,Y,Z), triple_sc(X,V,X1,O), inst_sc(X1,Y,O).
triple_sc(X,V,X1,O) :- supEx(Y,V,Z,X1), inst_sc(X,Y,O).
inst_sc(X1,Z,O) :- supEx(Y,V,Z,X1), inst_sc(X,Y,O).
triple_sc(X,W,X1,O) :- subRole(V,W), triple_sc(X,V,X1,O).
triple_sc(X,W,X2,O) :- subRChain(U,V,W), triple_sc(X,U,X1,O), triple_sc(X1,V,X2,O).
inst_sc(Y,Z,O) :- inst_sc(X,Y,O), nom(Y), inst_sc(X,Z,O).
inst_sc(X,Z,O) :- inst_sc(X,Y,O), nom(Y), inst_sc(Y,Z,O).
triple_sc(Z,U,Y,O) :- inst_sc(X,Y,O), nom(Y), triple_sc(Z,U,X,O).

% specificity between distinguished concepts
morespec(Ch,Cj) :- dcls(Ch),dcls(Cj),inst_sc(Ch,Cj,Ch), not inst_sc(Cj,Ch,Cj).

% distinguished concepts, typical properties, valid ranks
dcls(C) :- subTyp(C,D,N).
tprop(C,D) :- subTyp(C,D,N).
validrank(C,N) :- subTyp(C,D,N).

% choice of typical properties for the query prototype
{inst(aux_c,D)} :- dcls(Ci),inst(aux_c,Ci),tprop(Ci,D).
% typicality carriers: a nonempty concept has a typical instance with all
% of its typical properties
inst(Y,Ci) :- auxtc(Y,Ci), inst(X,Ci).
typ(Y,Ci) :- auxtc(Y,Ci),inst(Y,Ci).
inst(Y,D) :- subTyp(Ci,D,N),typ(Y,Ci).
"""

PREFERENCE_PROGRAM = """\
% Preference specification and preference-type program for selecting the
% globally preferred answer sets of the companion program.  Dialect: asprin
% (written against the syntax accepted by asprin 1.1.1); holds/1 and
% holds'/1 refer to the candidate and the challenger answer set.  The only
% renaming relative to the companion program is that the prototype constant
% is spelled aux_c throughout.

#preference(p,multipref){
  dcls(Ci) : dcls(Ci) ;
  morespec(Ci,Cj) : dcls(Ci),dcls(Cj) ;
  inst(aux_c,E) : tprop(Ci,E), dcls(Ci) ;
  subTyp(Ci,E,R) : subTyp(Ci,E,R) ;
  validrank(Ci,R) : validrank(Ci,R)
}.
#optimize(p).

#program preference(multipref).

better(P) :- preference(P,multipref), holds(dcls(Ci)), betterwrt(Ci),
    noattack(Cj) : holds(dcls(Cj)).

noattack(Cj) :- holds(dcls(Cj)), bettereqwrt(Cj).

noattack(Cj) :- holds(dcls(Cj)), holds(dcls(Ch)), holds(morespec(Ch,Cj)), betterwrt(Ch).

bettereqwrt(Ci) :- betterwrt(Ci).

bettereqwrt(Ci) :- holds(dcls(Ci)), samenumprop(Ci,R) : holds(validrank(Ci,R)).

betterwrt(Ci) :- holds(dcls(Ci)), moreprop(Ci,R),
    samenumprop(Ci,R1) : holds(validrank(Ci,R1)), R1>R.

moreprop(Ci,R) :- holds(validrank(Ci,R)),
    #sum { -1,E : sat(aux_c,Ci,E), holds(subTyp(Ci,E,R)) ;
           1,E : sat1(aux_c,Ci,E), holds(subTyp(Ci,E,R)) } -1.

sat(aux_c,Ci,E) :- holds(X), X=inst(aux_c,E), holds(subTyp(Ci,E,R)).

sat(aux_c,Ci,E) :- not holds(X), X=inst(aux_c,Ci), holds(subTyp(Ci,E,R)).

sat1(aux_c,Ci,E) :- holds'(X), X=inst(aux_c,E), holds(subTyp(Ci,E,R)).

sat1(aux_c,Ci,E) :- not holds'(X), X=inst(aux_c,Ci), holds(subTyp(Ci,E,R)).

samenumprop(Ci,R) :- holds(validrank(Ci,R)),
    0 #sum { -1,E : sat(aux_c,Ci,E), holds(subTyp(Ci,E,R)) ;
             1,E : sat1(aux_c,Ci,E), holds(subTyp(Ci,E,R)) } 0.
"""


class _Mangler:
    """Lowercase names into distinct ASP constants, reversibly."""

    def __init__(self):
        self.table: dict[str, str] = {}
        self.used: set[str] = {
            # predicate and rule-level names stay reserved
            "inst", "triple", "typ", "nom", "cls", "rol", "subClass",
            "subConj", "subEx", "supEx", "top", "bot", "subRole", "subRChain",
            "subTyp", "auxtc", "dcls", "tprop", "validrank", "morespec",
            "inst_sc", "triple_sc", "aux_c", "not",
        }

    def get(self, name: str) -> str:
        got = self.table.get(name)
        if got is not None:
            return got
        base = name.replace("'", "_p").lstrip("_") or "x"
        base = base[0].lower() + base[1:]
        if not base[0].isalpha():
            base = "c_" + base
        out = base
        n = 1
        while out in self.used:
            n += 1
            out = f"{base}_{n}"
        self.used.add(out)
        self.table[name] = out
        return out


def _arg(m: _Mangler, expr: Concept) -> str:
    if isinstance(expr, Atomic):
        return m.get(expr.name)
    if isinstance(expr, Nominal):
        return m.get(expr.individual)
    raise KBError(f"not in normal form: {expr!r}")


def emit_program(nkb: NormalizedKB) -> str:
    """Ground program text for the normalized KB and its embedded query."""
    if nkb.query_subject is None:
        raise KBError("emit_program needs a KB normalized together with a query")
    m = _Mangler()
    facts: list[str] = []
    noms: set[str] = set()
    clss: set[str] = set()
    rols: set[str] = set()

    def note_cls(expr: Concept):
        if isinstance(expr, Atomic):
            clss.add(m.get(expr.name))
        elif isinstance(expr, Nominal):
            noms.add(m.get(expr.individual))

    # deterministic mangling order: first appearance over a sorted name pass
    for name in sorted(nkb.concept_names()):
        m.get(name)

    witness = 0
    for ax in nkb.strict:
        if isinstance(ax, RoleInclusion):
            chain = [m.get(r) for r in ax.chain]
            rols.update(chain)
            rols.add(m.get(ax.sup))
            if len(chain) == 1:
                facts.append(f"subRole({chain[0]}, {m.get(ax.sup)}).")
            else:
                facts.append(f"subRChain({chain[0]}, {chain[1]}, {m.get(ax.sup)}).")
            continue
        sub, sup = ax.sub, ax.sup
        note_cls(sub)
        note_cls(sup)
        if isinstance(sup, Bottom):
            facts.append(f"bot({_arg(m, sub)}).")
        elif isinstance(sub, Top):
            facts.append(f"top({_arg(m, sup)}).")
        elif isinstance(sub, And):
            note_cls(sub.left)
            note_cls(sub.right)
            facts.append(
                f"subConj({_arg(m, sub.left)}, {_arg(m, sub.right)}, {_arg(m, sup)})."
            )
        elif isinstance(sub, Some):
            rols.add(m.get(sub.role))
            note_cls(sub.filler)
            facts.append(
                f"subEx({m.get(sub.role)}, {_arg(m, sub.filler)}, {_arg(m, sup)})."
            )
        elif isinstance(sup, Some):
            rols.add(m.get(sup.role))
            note_cls(sup.filler)
            witness += 1
            facts.append(
                f"supEx({_arg(m, sub)}, {m.get(sup.role)}, "
                f"{_arg(m, sup.filler)}, aux_e{witness})."
            )
        else:
            facts.append(f"subClass({_arg(m, sub)}, {_arg(m, sup)}).")

    for a in nkb.abox:
        rols.add(m.get(a.role))
        noms.update((m.get(a.subject), m.get(a.object)))
        facts.append(
            f"supEx({m.get(a.subject)}, {m.get(a.role)}, "
            f"{m.get(a.object)}, {m.get(a.object)})."
        )

    for ci in nkb.distinguished:
        ci_c = m.get(ci)
        clss.add(ci_c)
        facts.append(f"auxtc(aux_{ci_c}, {ci_c}).")
        for target, rank in nkb.ranked[ci]:
            clss.add(m.get(target))
            facts.append(f"subTyp({ci_c}, {m.get(target)}, {rank}).")

    query_facts = [
        f"auxtc(aux_c, {m.get(nkb.query_subject)}).",
        "nom(aux_c).",
        f"inst(aux_c, {m.get(nkb.query_subject)}).",
    ]
    clss.add(m.get(nkb.query_subject))
    if nkb.query_target is not None:
        clss.add(m.get(nkb.query_target))

    decls = [f"nom({x})." for x in sorted(noms)]
    decls += [f"cls({x})." for x in sorted(clss)]
    decls += [f"rol({x})." for x in sorted(rols)]

    lines = [
        "% typicality program for one defeasible subsumption query",
        "% entailment: inst(aux_c, <target>) must hold in all preferred answer sets",
        "",
        "% --- signature",
        *decls,
        "",
        "% --- knowledge base",
        *sorted(facts),
        "",
        "% --- query",
        *query_facts,
        "",
        _INFERENCE_RULES,
        "% --- name map (asp constant <- source name)",
    ]
    for name in sorted(m.table):
        target = m.table[name]
        src = nkb.display_name(name) if name in nkb.provenance else name
        lines.append(f"% {target} <- {src}")
    if nkb.query_target is not None:
        lines.append(
            f"% query target: {m.get(nkb.query_target)}"
        )
    return "\n".join(lines) + "\n"


def emit_preference_program() -> str:
    """The preference specification and preference program, byte-stable."""
    return PREFERENCE_PROGRAM
