"""Bundled example knowledge bases used by the self test and the test suite.

``HORSE_KB`` exercises rank-sensitive comparison of two named individuals;
``STUDENT_KB`` is the conflicting-defaults workhorse (employed students);
``CHAIN_KB`` has two subsumption chains with pairwise-disjoint head
properties.  ``scaled_student_kb`` builds enlarged/multiplied variants of
the student KB for scaling runs.
"""

from __future__ import annotations

from .model import (
    Atomic,
    DefeasibleInclusion,
    ConceptInclusion,
    Query,
    RankedKB,
    Some,
    TOP,
    And,
    BOT,
)
from .parser import parse_kb

HORSE_KB = """\
strict:
  Horse <= Mammal
  Mammal <= Animal

defeasible Horse:
  rank 0: T(Horse) <= has_equipment some Saddle
  rank 0: T(Horse) <= Has_Mane some Long
  rank 1: T(Horse) <= RunFast
  rank 2: T(Horse) <= Has_Tail some top

abox:
  Horse(spirit)
  Horse(buddy)
  Has_Mane(spirit, mane_s)
  Long(mane_s)
  RunFast(spirit)
  Has_Tail(spirit, tail_s)
  has_equipment(buddy, saddle_b)
  Saddle(saddle_b)
  Has_Mane(buddy, mane_b)
  Long(mane_b)
  RunFast(buddy)
"""

STUDENT_KB = """\
strict:
  Employee <= Adult
  Adult <= has_SSN some top
  PhDStudent <= Student
  Young and NotYoung <= bot
  (hasScholarship some top) and Has_no_Scholarship <= bot

defeasible Employee:
  rank 0: T(Employee) <= NotYoung
  rank 0: T(Employee) <= has_boss some Employee

defeasible Student:
  rank 0: T(Student) <= has_classes some top
  rank 1: T(Student) <= Young
  rank 1: T(Student) <= Has_no_Scholarship

defeasible PhDStudent:
  rank 0: T(PhDStudent) <= hasScholarship some Amount
  rank 1: T(PhDStudent) <= Bright
"""

_CHAIN_DISJOINT = "\n".join(
    f"  P{i} and P{j} <= bot" for i in range(1, 6) for j in range(i + 1, 6)
)

_CHAIN_BLOCKS = "\n\n".join(
    f"defeasible C{i}:\n"
    f"  rank 0: T(C{i}) <= P{i}\n"
    f"  rank 0: T(C{i}) <= Q{i}\n"
    f"  rank 0: T(C{i}) <= R{i}"
    for i in range(1, 6)
)

CHAIN_KB = f"""\
strict:
  C3 <= C2
  C2 <= C1
  C5 <= C4
  C4 <= C1
{_CHAIN_DISJOINT}

{_CHAIN_BLOCKS}
"""


def horse_kb() -> RankedKB:
    return parse_kb(HORSE_KB)


def student_kb() -> RankedKB:
    return parse_kb(STUDENT_KB)


def chain_kb() -> RankedKB:
    return parse_kb(CHAIN_KB)


# Shared queries over the student KB and their expected entailment status.
STUDENT_QUERIES: tuple[tuple[str, bool], ...] = (
    ("T(Employee and Student) <= (has_boss some Employee)", True),
    ("T(Employee and Student) <= (has_classes some top)", True),
    ("T(Employee and Student) <= Has_no_Scholarship", True),
    ("T(Employee and Student) <= Young", False),
    ("T(Employee and Student) <= NotYoung", False),
)

PHD_QUERIES: tuple[tuple[str, bool], ...] = (
    ("T(PhDStudent) <= Young", True),
    ("T(PhDStudent) <= (has_classes some top)", True),
    ("T(PhDStudent) <= Bright", True),
    ("T(PhDStudent) <= (hasScholarship some Amount)", True),
    ("T(PhDStudent) <= Has_no_Scholarship", False),
)


def scaled_student_kb(copies: int = 1, props_per_class: int = 10) -> RankedKB:
    """Student KB enlarged to 5 distinguished classes with uniform ranked-TBox
    size, then multiplied into ``copies`` disjoint renamed copies.

    With the defaults, 8 copies give 40 distinguished concepts and 400
    typicality inclusions.  The base copy keeps the original names, so the
    shared queries from ``STUDENT_QUERIES`` remain well-formed and their
    verdicts must not change as copies are added.
    """
    if copies < 1:
        raise ValueError("copies must be positive")

    strict: list[ConceptInclusion] = []
    distinguished: list[Atomic] = []
    ranked: dict[Atomic, list[DefeasibleInclusion]] = {}

    def nm(name: str, k: int) -> str:
        return name if k == 1 else f"{name}_c{k}"

    for k in range(1, copies + 1):
        employee = Atomic(nm("Employee", k))
        student = Atomic(nm("Student", k))
        phd = Atomic(nm("PhDStudent", k))
        teacher = Atomic(nm("Teacher", k))
        retiree = Atomic(nm("Retiree", k))
        adult = Atomic(nm("Adult", k))
        young = Atomic(nm("Young", k))
        notyoung = Atomic(nm("NotYoung", k))
        noscholarship = Atomic(nm("Has_no_Scholarship", k))
        amount = Atomic(nm("Amount", k))
        bright = Atomic(nm("Bright", k))

        strict += [
            ConceptInclusion(employee, adult),
            ConceptInclusion(adult, Some(nm("has_SSN", k), TOP)),
            ConceptInclusion(phd, student),
            ConceptInclusion(And(young, notyoung), BOT),
            ConceptInclusion(
                And(Some(nm("hasScholarship", k), TOP), noscholarship), BOT
            ),
        ]

        base: dict[Atomic, list[tuple[object, int]]] = {
            employee: [
                (notyoung, 0),
                (Some(nm("has_boss", k), employee), 0),
            ],
            student: [
                (Some(nm("has_classes", k), TOP), 0),
                (young, 1),
                (noscholarship, 1),
            ],
            phd: [
                (Some(nm("hasScholarship", k), amount), 0),
                (bright, 1),
            ],
            teacher: [],
            retiree: [],
        }
        for cls, props in base.items():
            filler = 0
            while len(props) < props_per_class:
                filler += 1
                props.append((Atomic(f"{cls.name}_trait{filler}"), 0))
            distinguished.append(cls)
            ranked[cls] = [
                DefeasibleInclusion(cls, prop, rank) for prop, rank in props
            ]

    return RankedKB(strict=strict, distinguished=distinguished, ranked=ranked)
