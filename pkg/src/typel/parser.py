"""Text format for ranked knowledge bases and queries.

The concrete syntax (EBNF):

    file        := section+
    section     := strictSec | defSec | aboxSec
    strictSec   := "strict:" line*
    line        := conceptIncl | roleIncl
    conceptIncl := concept "<=" concept
    roleIncl    := role ("o" role)* "<=" role
    defSec      := "defeasible" atom ":" defLine*
    defLine     := "rank" INT ":" "T(" atom ")" "<=" concept
    aboxSec     := "abox:" (atom "(" ind ")" | role "(" ind "," ind ")")*
    concept     := atom | "top" | "bot" | "{" ind "}" | concept "and" concept
                 | role "some" concept | "(" concept ")"

Queries are written ``T(concept) <= concept``.  Identifiers match
``[A-Za-z_][A-Za-z0-9_']*``; ``#`` starts a comment running to end of line.

``some`` binds tighter than ``and`` and associates to the right, so
``r some A and B`` reads as ``(r some A) and B``.

A bare line ``x <= y`` is ambiguous between a concept inclusion and a role
inclusion without composition.  It is resolved after parsing: if either name
occurs in a role position elsewhere in the file (an existential restriction,
a role assertion, or a composition chain) the line is a role inclusion,
otherwise it is a concept inclusion.  An isolated role hierarchy over roles
never used elsewhere is inert either way, so the choice cannot change any
derived consequence.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .model import (
    And,
    Atomic,
    BOT,
    Bottom,
    Concept,
    ConceptAssertion,
    ConceptInclusion,
    DefeasibleInclusion,
    KBError,
    MalformedKB,
    Nominal,
    Query,
    RankedKB,
    RoleAssertion,
    RoleInclusion,
    Some,
    TOP,
    Top,
)


class KBSyntaxError(KBError):
    """Syntax error with position information."""

    def __init__(self, message: str, line: int, column: int, expected: str = ""):
        self.line = line
        self.column = column
        self.expected = expected
        detail = f" (expected {expected})" if expected else ""
        super().__init__(f"{line}:{column}: {message}{detail}")


@dataclass(frozen=True)
class _Token:
    kind: str  # IDENT, INT, OP, EOF
    value: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
    | (?P<comment>\#[^\n]*)
    | (?P<ident>[A-Za-z_][A-Za-z0-9_']*)
    | (?P<int>\d+)
    | (?P<op><=|[(){}:,])
    """,
    re.VERBOSE,
)


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise KBSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        lexeme = m.group(0)
        if m.lastgroup == "ident":
            tokens.append(_Token("IDENT", lexeme, line, col))
        elif m.lastgroup == "int":
            tokens.append(_Token("INT", lexeme, line, col))
        elif m.lastgroup == "op":
            tokens.append(_Token("OP", lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    tokens.append(_Token("EOF", "", line, col))
    return tokens


class _Parser:
    SECTION_WORDS = ("strict", "defeasible", "abox")

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    # -- token helpers ----------------------------------------------------
    def peek(self, ahead: int = 0) -> _Token:
        i = min(self.pos + ahead, len(self.tokens) - 1)
        return self.tokens[i]

    def next(self) -> _Token:
        tok = self.peek()
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str, value: Optional[str] = None) -> _Token:
        tok = self.peek()
        if tok.kind != kind or (value is not None and tok.value != value):
            want = value if value is not None else kind
            raise KBSyntaxError(f"got {tok.value or tok.kind!r}", tok.line, tok.column, want)
        return self.next()

    def at_section_start(self) -> bool:
        tok = self.peek()
        if tok.kind != "IDENT" or tok.value not in self.SECTION_WORDS:
            return False
        if tok.value == "defeasible":
            return self.peek(1).kind == "IDENT" and self.peek(2).value == ":"
        return self.peek(1).value == ":"

    # -- concepts ----------------------------------------------------------
    def concept(self) -> Concept:
        parts = [self.concept_unit()]
        while self.peek().kind == "IDENT" and self.peek().value == "and":
            self.next()
            parts.append(self.concept_unit())
        out = parts[-1]
        for p in reversed(parts[:-1]):
            out = And(p, out)
        return out

    def concept_unit(self) -> Concept:
        tok = self.peek()
        if tok.kind == "IDENT" and self.peek(1).kind == "IDENT" and self.peek(1).value == "some":
            role = self.next().value
            self.next()  # some
            return Some(role, self.concept_unit())
        return self.concept_primary()

    def concept_primary(self) -> Concept:
        tok = self.peek()
        if tok.value == "(":
            self.next()
            c = self.concept()
            self.expect("OP", ")")
            return c
        if tok.value == "{":
            self.next()
            ind = self.expect("IDENT").value
            self.expect("OP", "}")
            return Nominal(ind)
        if tok.kind == "IDENT":
            self.next()
            if tok.value == "top":
                return TOP
            if tok.value == "bot":
                return BOT
            return Atomic(tok.value)
        raise KBSyntaxError(f"got {tok.value or tok.kind!r}", tok.line, tok.column, "a concept")

    # -- sections ----------------------------------------------------------
    def parse_kb(self) -> RankedKB:
        strict: list = []
        distinguished: list[Concept] = []
        ranked: dict[Concept, list[DefeasibleInclusion]] = {}
        abox: list = []
        saw_section = False
        while self.peek().kind != "EOF":
            if not self.at_section_start():
                tok = self.peek()
                raise KBSyntaxError(
                    f"got {tok.value or tok.kind!r}", tok.line, tok.column,
                    "'strict:', 'defeasible <Concept>:' or 'abox:'",
                )
            saw_section = True
            word = self.next().value
            if word == "strict":
                self.expect("OP", ":")
                self.strict_lines(strict)
            elif word == "abox":
                self.expect("OP", ":")
                self.abox_entries(abox)
            else:
                header = Atomic(self.expect("IDENT").value)
                self.expect("OP", ":")
                if header not in ranked:
                    distinguished.append(header)
                    ranked[header] = []
                self.def_lines(header, ranked[header])
        if not saw_section:
            tok = self.peek()
            raise KBSyntaxError("empty knowledge base", tok.line, tok.column, "a section")
        strict, role_names = _classify_role_inclusions(strict, abox, ranked)
        return RankedKB(
            strict=strict,
            distinguished=distinguished,
            ranked={c: tuple(v) for c, v in ranked.items()},
            abox=abox,
        )

    def strict_lines(self, out: list):
        while self.peek().kind != "EOF" and not self.at_section_start():
            first = self.peek()
            if first.kind == "IDENT" and self.peek(1).value == "o":
                chain = [self.next().value]
                while self.peek().value == "o":
                    self.next()
                    chain.append(self.expect("IDENT").value)
                self.expect("OP", "<=")
                sup = self.expect("IDENT").value
                out.append(RoleInclusion(tuple(chain), sup))
                continue
            sub = self.concept()
            self.expect("OP", "<=")
            sup = self.concept()
            out.append(ConceptInclusion(sub, sup))

    def def_lines(self, subject: Atomic, out: list[DefeasibleInclusion]):
        while self.peek().kind == "IDENT" and self.peek().value == "rank":
            self.next()
            rank_tok = self.expect("INT")
            rank = int(rank_tok.value)
            self.expect("OP", ":")
            t_tok = self.expect("IDENT")
            if t_tok.value != "T":
                raise KBSyntaxError(
                    f"got {t_tok.value!r}", t_tok.line, t_tok.column, "'T('"
                )
            self.expect("OP", "(")
            inner = self.expect("IDENT").value
            if inner != subject.name:
                raise MalformedKB(
                    f"defeasible line for {inner} inside block for {subject.name}"
                )
            self.expect("OP", ")")
            self.expect("OP", "<=")
            prop = self.concept()
            out.append(DefeasibleInclusion(subject, prop, rank))
        nxt = self.peek()
        if nxt.kind != "EOF" and not self.at_section_start():
            raise KBSyntaxError(
                f"got {nxt.value or nxt.kind!r}", nxt.line, nxt.column,
                "'rank N:' or a new section",
            )

    def abox_entries(self, out: list):
        while self.peek().kind == "IDENT" and not self.at_section_start():
            name = self.next().value
            self.expect("OP", "(")
            first = self.expect("IDENT").value
            if self.peek().value == ",":
                self.next()
                second = self.expect("IDENT").value
                self.expect("OP", ")")
                out.append(RoleAssertion(name, first, second))
            else:
                self.expect("OP", ")")
                out.append(ConceptAssertion(Atomic(name), first))

    def parse_query(self) -> Query:
        t_tok = self.expect("IDENT")
        if t_tok.value != "T":
            raise KBSyntaxError(f"got {t_tok.value!r}", t_tok.line, t_tok.column, "'T('")
        self.expect("OP", "(")
        subject = self.concept()
        self.expect("OP", ")")
        self.expect("OP", "<=")
        predicate = self.concept()
        tok = self.peek()
        if tok.kind != "EOF":
            raise KBSyntaxError(f"got {tok.value!r}", tok.line, tok.column, "end of query")
        return Query(subject, predicate)


def _role_positions(strict, abox, ranked) -> set[str]:
    roles: set[str] = set()

    def eat(expr: Concept):
        for e in expr.walk():
            if isinstance(e, Some):
                roles.add(e.role)

    for ax in strict:
        if isinstance(ax, RoleInclusion):
            roles.update(ax.chain)
            roles.add(ax.sup)
        else:
            eat(ax.sub)
            eat(ax.sup)
    for a in abox:
        if isinstance(a, RoleAssertion):
            roles.add(a.role)
    for incs in ranked.values():
        for d in incs:
            eat(d.prop)
    return roles


def _concept_positions(strict, abox, ranked) -> set[str]:
    names: set[str] = set()

    def eat(expr: Concept):
        for e in expr.walk():
            if isinstance(e, Atomic):
                names.add(e.name)

    for ax in strict:
        if isinstance(ax, ConceptInclusion) and not (
            isinstance(ax.sub, Atomic) and isinstance(ax.sup, Atomic)
        ):
            eat(ax.sub)
            eat(ax.sup)
    for a in abox:
        if isinstance(a, ConceptAssertion):
            eat(a.concept)
    for c in ranked:
        eat(c)
    for incs in ranked.values():
        for d in incs:
            eat(d.prop)
    return names


def _classify_role_inclusions(strict, abox, ranked):
    """Reinterpret bare ``x <= y`` lines whose names are used as roles."""
    roles = _role_positions(strict, abox, ranked)
    concepts = _concept_positions(strict, abox, ranked)
    out = []
    for ax in strict:
        if (
            isinstance(ax, ConceptInclusion)
            and isinstance(ax.sub, Atomic)
            and isinstance(ax.sup, Atomic)
            and (ax.sub.name in roles or ax.sup.name in roles)
        ):
            for name in (ax.sub.name, ax.sup.name):
                if name in concepts:
                    raise MalformedKB(
                        f"{name} is used both as a role and as a concept"
                    )
            out.append(RoleInclusion((ax.sub.name,), ax.sup.name))
        else:
            out.append(ax)
    return out, roles


def parse_kb(text: str) -> RankedKB:
    """Parse a knowledge base; raises KBSyntaxError or MalformedKB."""
    return _Parser(text).parse_kb()


def parse_query(text: str) -> Query:
    """Parse a defeasible subsumption query ``T(C) <= D``."""
    return _Parser(text).parse_query()


# ---------------------------------------------------------------------------
# Rendering
# ---------------------------------------------------------------------------

def render_concept(expr: Concept) -> str:
    if isinstance(expr, Atomic):
        return expr.name
    if isinstance(expr, Top):
        return "top"
    if isinstance(expr, Bottom):
        return "bot"
    if isinstance(expr, Nominal):
        return "{" + expr.individual + "}"
    if isinstance(expr, Some):
        filler = render_concept(expr.filler)
        if isinstance(expr.filler, And):
            filler = f"({filler})"
        return f"{expr.role} some {filler}"
    if isinstance(expr, And):
        left = render_concept(expr.left)
        if isinstance(expr.left, And):
            left = f"({left})"
        return f"{left} and {render_concept(expr.right)}"
    raise TypeError(f"not a concept: {expr!r}")


def render_query(query: Query) -> str:
    return f"T({render_concept(query.subject)}) <= {render_concept(query.predicate)}"


def render_kb(kb: RankedKB) -> str:
    """Render a ranked KB in the concrete syntax; inverse of parse_kb."""
    lines: list[str] = []
    lines.append("strict:")
    if kb.strict:
        for ax in kb.strict:
            if isinstance(ax, ConceptInclusion):
                lines.append(f"  {render_concept(ax.sub)} <= {render_concept(ax.sup)}")
            else:
                lines.append("  " + " o ".join(ax.chain) + f" <= {ax.sup}")
    for c in kb.distinguished:
        if not isinstance(c, Atomic):
            raise KBError(
                "the text format only supports atomic distinguished concepts; "
                f"cannot render {render_concept(c)}"
            )
        lines.append(f"defeasible {c.name}:")
        for d in kb.ranked[c]:
            lines.append(f"  rank {d.rank}: T({c.name}) <= {render_concept(d.prop)}")
    if kb.abox:
        lines.append("abox:")
        for a in kb.abox:
            if isinstance(a, ConceptAssertion):
                if not isinstance(a.concept, Atomic):
                    raise KBError("abox assertions must use atomic concepts")
                lines.append(f"  {a.concept.name}({a.individual})")
            else:
                lines.append(f"  {a.role}({a.subject}, {a.object})")
    return "\n".join(lines) + "\n"
