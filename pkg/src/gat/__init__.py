"""Checker and bounded equality engine for generalized algebraic theories."""

from .syntax import (
    Cut,
    SortAxiom,
    SortDecl,
    OpDecl,
    Subst,
    Telescope,
    TermAxiom,
    Theory,
    Var,
)
from .checker import (
    CheckedTheory,
    CheckError,
    ErrorKind,
    check_sort,
    check_subst,
    check_telescope,
    check_term,
    check_theory,
    infer_term,
    theory_extends,
)
from .equality import (
    EqEngineConfig,
    EqStep,
    EqTrace,
    Equal,
    NotProven,
    ReplayError,
    eq_sort,
    eq_subst,
    eq_term,
    normalize_term,
    record_verdicts,
    replay_trace,
)
from .library import load

__version__ = "0.1.0"

__all__ = [
    "CheckedTheory",
    "CheckError",
    "Cut",
    "EqEngineConfig",
    "EqStep",
    "EqTrace",
    "Equal",
    "ErrorKind",
    "NotProven",
    "OpDecl",
    "ReplayError",
    "SortAxiom",
    "SortDecl",
    "Subst",
    "Telescope",
    "TermAxiom",
    "Theory",
    "Var",
    "check_sort",
    "check_subst",
    "check_telescope",
    "check_term",
    "check_theory",
    "eq_sort",
    "eq_subst",
    "eq_term",
    "infer_term",
    "load",
    "normalize_term",
    "record_verdicts",
    "replay_trace",
    "theory_extends",
]
