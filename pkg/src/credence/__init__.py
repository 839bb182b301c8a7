"""Workspace deliberation service with a Bayesian evidence engine."""

from .analytics import BehaviourFlag, DetectorParams, FlagKind, RaterSeverity, rater_severity, scan
from .engine import (
    BeliefEstimate,
    BetaParams,
    HorseColor,
    InteractionGate,
    Quadrant,
    Thresholds,
    WoEResult,
    classify_horse,
    classify_quadrant,
    posterior_belief,
    posterior_curve,
    weight_of_evidence,
)
from .errors import CredenceError, DomainError, StorageError, ValidationError
from .model import (
    ArgumentKind,
    EvidenceItem,
    Hypothesis,
    LintReport,
    Polarity,
    QualityRating,
    Role,
    User,
    Vote,
    VoteDirection,
    lint_hypothesis,
)
from .store import EventLog, WorkspaceState, read_log, replay
from .workspace import Workspace

__version__ = "0.1.0"

__all__ = [
    "ArgumentKind",
    "BehaviourFlag",
    "BeliefEstimate",
    "BetaParams",
    "CredenceError",
    "DetectorParams",
    "DomainError",
    "EventLog",
    "EvidenceItem",
    "FlagKind",
    "HorseColor",
    "Hypothesis",
    "InteractionGate",
    "LintReport",
    "Polarity",
    "Quadrant",
    "QualityRating",
    "RaterSeverity",
    "Role",
    "StorageError",
    "Thresholds",
    "User",
    "ValidationError",
    "Vote",
    "VoteDirection",
    "WoEResult",
    "Workspace",
    "WorkspaceState",
    "classify_horse",
    "classify_quadrant",
    "lint_hypothesis",
    "posterior_belief",
    "posterior_curve",
    "rater_severity",
    "read_log",
    "replay",
    "scan",
    "weight_of_evidence",
]
