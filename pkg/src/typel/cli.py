"""Command-line front end.

Subcommands: check, models, normalize, emit-asp, reduce-pdlp, selftest.
Exit codes: 0 entailed / success, 1 not entailed, 2 error or inconsistent,
64 usage error.  ``TYPEL_SUBSET_CAP`` caps the number of choice subsets the
candidate search may explore (default 2^20).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

from . import fixtures
from .aspemit import emit_preference_program, emit_program
from .entailment import (
    DEFAULT_SUBSET_CAP,
    Status,
    Verdict,
    entails,
    enumerate_candidates,
    select_preferred,
)
from .materialize import saturate, translate
from .model import (
    Atomic,
    CapExceeded,
    ConceptInclusion,
    KBError,
    NormalizedKB,
    Query,
    RankedKB,
    RoleInclusion,
    normalize,
)
from .parser import (
    KBSyntaxError,
    parse_kb,
    parse_query,
    render_concept,
    render_kb,
    render_query,
)
from .pdlp import parse_pdlp, reduce_pdlp
from .preference import OrderResult, PreferenceContext, _context

EX_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EX_USAGE)


def subset_cap() -> int:
    raw = os.environ.get("TYPEL_SUBSET_CAP")
    if raw is None:
        return DEFAULT_SUBSET_CAP
    try:
        cap = int(raw)
        if cap < 1:
            raise ValueError
    except ValueError:
        print(f"typel: ignoring bad TYPEL_SUBSET_CAP={raw!r}", file=sys.stderr)
        return DEFAULT_SUBSET_CAP
    return cap


def _load_kb(path: str) -> RankedKB:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_kb(fh.read())


def _run_query(kb: RankedKB, query: Query, engine: str, jobs: int) -> Verdict:
    return entails(
        kb, query, subset_cap=subset_cap(), method=engine, jobs=max(1, jobs)
    )


def _world_payload(nkb: NormalizedKB, world) -> dict:
    return {
        "satisfied_properties": sorted(
            nkb.display_name(t) for t in world.satisfied_targets()
        ),
        "satisfied_targets": sorted(world.satisfied_targets()),
        "memberships": sorted(world.profile.memberships),
        "choices": sorted(world.choices),
        "satisfies_query": bool(
            nkb.query_target and world.satisfies(nkb.query_target)
        ),
    }


def _verdict_payload(nkb: NormalizedKB, verdict: Verdict) -> dict:
    return {
        "query": verdict.query,
        "status": verdict.status.value,
        "entailed": verdict.entailed,
        "preferred_world_count": len(verdict.preferred),
        "preferred_worlds": [_world_payload(nkb, w) for w in verdict.preferred],
        "counterexample": (
            _world_payload(nkb, verdict.counterexample)
            if verdict.counterexample is not None
            else None
        ),
        "warnings": list(verdict.warnings),
    }


def _print_verdict(nkb: NormalizedKB, verdict: Verdict):
    print(f"query:  {verdict.query}")
    print(f"status: {verdict.status.value}")
    for w in verdict.warnings:
        print(f"warning: {w}")
    if verdict.status in (Status.ENTAILED, Status.NOT_ENTAILED):
        print(f"preferred worlds: {len(verdict.preferred)}")
        if verdict.counterexample is not None:
            props = sorted(
                nkb.display_name(t)
                for t in verdict.counterexample.satisfied_targets()
            )
            print("counterexample world satisfies: " + (", ".join(props) or "(nothing)"))


def _print_world_table(nkb: NormalizedKB, ctx: PreferenceContext, world, index: int):
    print(f"preferred world {index}:")
    mems = sorted(world.profile.memberships)
    print(f"  member of: {', '.join(mems) if mems else '(no distinguished concept)'}")
    for c in ctx.concepts:
        if c not in world.profile.memberships:
            continue
        rows = ctx.satisfied_inclusions(world.profile, c)
        parts = []
        for rank in sorted(rows, reverse=True):
            names = ", ".join(sorted(nkb.display_name(t) for t in rows[rank])) or "-"
            parts.append(f"rank {rank}: {names}")
        print(f"  {c}: " + "; ".join(parts))
    if nkb.query_target is not None:
        print(f"  satisfies query target: {world.satisfies(nkb.query_target)}")


def cmd_check(args) -> int:
    kb = _load_kb(args.kb)
    query = parse_query(args.query)
    verdict = _run_query(kb, query, args.engine, args.jobs)
    nkb = normalize(kb, query)
    if args.json:
        print(json.dumps(_verdict_payload(nkb, verdict), indent=2, sort_keys=True))
    else:
        _print_verdict(nkb, verdict)
    return verdict.exit_code()


def cmd_models(args) -> int:
    kb = _load_kb(args.kb)
    query = parse_query(args.query)
    verdict = _run_query(kb, query, args.engine, args.jobs)
    nkb = normalize(kb, query)
    if args.json:
        payload = _verdict_payload(nkb, verdict)
        ctx = _context(nkb)
        pairs = []
        worlds = verdict.preferred
        for i in range(len(worlds)):
            for j in range(i + 1, len(worlds)):
                rel = ctx.global_compare(worlds[i].profile, worlds[j].profile)
                pairs.append({"left": i, "right": j, "relation": rel.value})
        payload["pairwise"] = pairs
        print(json.dumps(payload, indent=2, sort_keys=True))
        return verdict.exit_code()
    _print_verdict(nkb, verdict)
    ctx = _context(nkb)
    for i, w in enumerate(verdict.preferred, start=1):
        _print_world_table(nkb, ctx, w, i)
    worlds = verdict.preferred
    for i in range(len(worlds)):
        for j in range(i + 1, len(worlds)):
            ex = ctx.explain(worlds[i].profile, worlds[j].profile)
            print(f"world {i + 1} vs world {j + 1}:")
            for line in ex.lines()[1:]:
                print("  " + line.strip())
            print(f"  verdict: {ex.result.value}")
    return verdict.exit_code()


def _render_normalized(nkb: NormalizedKB) -> str:
    lines = []
    if nkb.signature_extension:
        lines.append("# fresh names introduced by normalization:")
        for name in nkb.signature_extension:
            lines.append(f"#   {name} == {nkb.display_name(name)}")
    lines.append("strict:")
    for ax in nkb.strict:
        if isinstance(ax, ConceptInclusion):
            lines.append(f"  {render_concept(ax.sub)} <= {render_concept(ax.sup)}")
        else:
            lines.append("  " + " o ".join(ax.chain) + f" <= {ax.sup}")
    for c in nkb.distinguished:
        lines.append(f"defeasible {c}:")
        for target, rank in nkb.ranked[c]:
            lines.append(f"  rank {rank}: T({c}) <= {target}")
    if nkb.abox:
        lines.append("abox:")
        for a in nkb.abox:
            lines.append(f"  {a.role}({a.subject}, {a.object})")
    if nkb.query_subject is not None:
        lines.append(f"# query subject: {nkb.query_subject}")
        lines.append(f"# query target: {nkb.query_target}")
    return "\n".join(lines) + "\n"


def cmd_normalize(args) -> int:
    kb = _load_kb(args.kb)
    query = parse_query(args.query) if args.query else None
    nkb = normalize(kb, query)
    sys.stdout.write(_render_normalized(nkb))
    return 0


def cmd_emit_asp(args) -> int:
    kb = _load_kb(args.kb)
    query = parse_query(args.query)
    nkb = normalize(kb, query)
    os.makedirs(args.outdir, exist_ok=True)
    program_path = os.path.join(args.outdir, "program.lp")
    pref_path = os.path.join(args.outdir, "preferences.lp")
    with open(program_path, "w", encoding="utf-8") as fh:
        fh.write(emit_program(nkb))
    with open(pref_path, "w", encoding="utf-8") as fh:
        fh.write(emit_preference_program())
    print(program_path)
    print(pref_path)
    return 0


def cmd_reduce_pdlp(args) -> int:
    with open(args.pdlp, "r", encoding="utf-8") as fh:
        program = parse_pdlp(fh.read())
    kb, queries = reduce_pdlp(program)
    out = args.output
    if out is None:
        stem = os.path.splitext(args.pdlp)[0]
        out = stem + ".kb"
    header = ["# reduced from a positive disjunctive logic program", "# literal -> query:"]
    for (v, pol), q in sorted(queries.items()):
        lit = v if pol else f"-{v}"
        header.append(f"#   {lit} -> {render_query(q)}")
    with open(out, "w", encoding="utf-8") as fh:
        fh.write("\n".join(header) + "\n" + render_kb(kb))
    print(out)
    return 0


def cmd_selftest(args) -> int:
    failures = 0

    def report(name: str, ok: bool, detail: str = ""):
        nonlocal failures
        mark = "pass" if ok else "FAIL"
        suffix = f" ({detail})" if detail and not ok else ""
        print(f"[{mark}] {name}{suffix}")
        if not ok:
            failures += 1

    kb = fixtures.student_kb()
    for text, expected in fixtures.STUDENT_QUERIES + fixtures.PHD_QUERIES:
        v = entails(kb, parse_query(text), subset_cap=subset_cap())
        report(f"student: {text}", v.entailed == expected, v.status.value)
    v = entails(kb, parse_query("T(Employee and Student) <= Young"))
    report("student: two preferred worlds", len(v.preferred) == 2, str(len(v.preferred)))

    hkb = fixtures.horse_kb()
    nkb = normalize(hkb)
    ctx = PreferenceContext.from_kb(nkb)
    closure = saturate(translate(nkb))
    spirit = ctx.profile_from_closure(closure, "spirit")
    buddy = ctx.profile_from_closure(closure, "buddy")
    report(
        "horse: spirit strictly preferred to buddy",
        ctx.compare_wrt(spirit, buddy, "Horse") is OrderResult.STRICTLY_PREFERRED,
    )

    ckb = fixtures.chain_kb()
    v = entails(ckb, parse_query("T(C3 and C5) <= Q1"))
    report("chain: two preferred worlds", len(v.preferred) == 2, str(len(v.preferred)))

    print("self test:", "ok" if failures == 0 else f"{failures} failure(s)")
    return 0 if failures == 0 else 2


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="typel",
        description="Defeasible reasoning over ranked EL+bot knowledge bases "
        "with typicality.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_query_command(name: str, func, help_text: str):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("kb", help="knowledge base file")
        p.add_argument("--query", required=True, help="query 'T(C) <= D'")
        p.add_argument("--json", action="store_true", help="structured output")
        p.add_argument(
            "--engine",
            choices=("fused", "naive"),
            default="fused",
            help="candidate search strategy (naive = full enumeration)",
        )
        p.add_argument(
            "--jobs",
            type=int,
            default=1,
            help="cap on parallel candidate saturations (naive engine)",
        )
        p.set_defaults(func=func)
        return p

    add_query_command("check", cmd_check, "decide one defeasible subsumption")
    add_query_command(
        "models", cmd_models, "list preferred candidate worlds with explanations"
    )

    p = sub.add_parser("normalize", help="print the normal form of a KB")
    p.add_argument("kb")
    p.add_argument("--query", help="normalize together with a query")
    p.set_defaults(func=cmd_normalize)

    p = sub.add_parser("emit-asp", help="write solver program and preference files")
    p.add_argument("kb")
    p.add_argument("--query", required=True)
    p.add_argument("-o", "--outdir", required=True)
    p.set_defaults(func=cmd_emit_asp)

    p = sub.add_parser("reduce-pdlp", help="reduce a positive disjunctive program")
    p.add_argument("pdlp", help="pdlp file (DIMACS-like)")
    p.add_argument("-o", "--output", help="output KB file")
    p.set_defaults(func=cmd_reduce_pdlp)

    p = sub.add_parser("selftest", help="run the bundled fixtures")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (KBSyntaxError, KBError) as exc:
        print(f"typel: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"typel: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
