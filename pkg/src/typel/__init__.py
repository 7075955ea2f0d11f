"""Defeasible reasoning for ranked EL+bot knowledge bases with typicality."""

from .model import (
    And,
    Atomic,
    BOT,
    Bottom,
    CapExceeded,
    Concept,
    ConceptAssertion,
    ConceptInclusion,
    DefeasibleInclusion,
    KBError,
    MalformedKB,
    Nominal,
    NormalizedKB,
    Query,
    RankedKB,
    RoleAssertion,
    RoleInclusion,
    Some,
    TOP,
    Top,
    UnknownConcept,
    negation_scaffold,
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
from .materialize import (
    Closure,
    ConsistencyReport,
    FactBase,
    Saturator,
    aux_choices,
    check_strict_consistency,
    saturate,
    subsumes,
    translate,
)
from .preference import (
    ComparisonExplanation,
    OrderResult,
    PreferenceContext,
    TypicalityProfile,
    compare_wrt,
    global_compare,
    specificity,
)
from .entailment import (
    CandidateWorld,
    DEFAULT_SUBSET_CAP,
    Status,
    StrictInconsistentError,
    Verdict,
    enumerate_candidates,
    entails,
    preferred_worlds,
    select_preferred,
)
from .aspemit import emit_preference_program, emit_program
from .pdlp import (
    PDLP,
    MalformedPDLP,
    min_entails_brute_force,
    minimal_models,
    parse_pdlp,
    reduce_pdlp,
    render_pdlp,
)

__version__ = "0.1.0"
