"""Domain types, validation, and the hypothesis well-formedness lint.

The single source of truth for identifiers, timestamps and mutation
semantics.  All types are immutable records; every mutation in the system
happens by appending an event (see ``credence.store``), never by editing
one of these values in place.
"""

from __future__ import annotations

import re
import uuid
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from urllib.parse import urlparse

from .errors import UnknownEntityError, ValidationError

TITLE_MAX_CHARS = 280

# Ordinal source-quality tiers, best first.  Tier 9 maps to the top rubric
# caption, tier 1 to the bottom.
TIER_MIN = 1
TIER_MAX = 9

QUALITY_TIER_CAPTIONS = {
    9: "Peer reviewed article; Government report",
    8: "Industry report",
    7: "Investigative or academic journalism; Government media release",
    6: "Trusted news source",
    5: "Generic news source; Substantiated anecdote or case; Expert opinion",
    4: "Unsubstantiated anecdote on behalf of community; Well argued point",
    3: "Unsubstantiated anecdote on behalf of individual; Argued point",
    2: "Opinion",
    1: "Feeling",
}

# Cue words/phrases that signal an evaluable proposition (obligation,
# permission, prohibition, quantification).  Multi-word entries must win
# over their single-word prefixes ("should not" before "should").
CUE_WORDS = (
    "only",
    "most",
    "all",
    "some",
    "many",
    "never",
    "ought",
    "permitted",
    "should",
    "can",
    "needs",
    "should not",
    "cannot",
    "may be",
    "occasionally",
    "sometimes",
    "ought not",
    "in some cases",
)

MIN_WELL_FORMED_WORDS = 5


class Role(str, Enum):
    MEMBER = "member"
    MODERATOR = "moderator"
    DECISION_MAKER = "decision_maker"


class ArgumentKind(str, Enum):
    EXAMPLE = "example"
    ABDUCTION = "abduction"
    ANALOGY = "analogy"
    DEFEASIBLE = "defeasible"
    INDUCTION = "induction"
    DEDUCTION = "deduction"


class Polarity(str, Enum):
    SUPPORTS = "supports"
    REFUTES = "refutes"


class VoteDirection(str, Enum):
    UP = "up"
    DOWN = "down"


def new_user_id() -> str:
    """128-bit random identifier, canonical lowercase hex."""
    return uuid.uuid4().hex


_ID_RE = re.compile(r"^[0-9a-f]{32}$")


def is_canonical_id(value: str) -> bool:
    return bool(_ID_RE.fullmatch(value))


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def require_utc(ts: datetime, what: str = "timestamp") -> datetime:
    if ts.tzinfo is None or ts.utcoffset() != timezone.utc.utcoffset(None):
        raise ValidationError(f"{what} must be timezone-aware UTC", code="validation-failure")
    return ts


@dataclass(frozen=True)
class User:
    user_id: str
    display_name: str
    role: Role
    registered_at: datetime
    group_label: str | None = None

    def __post_init__(self):
        if not self.display_name.strip():
            raise ValidationError("display_name must be non-empty", code="empty-display-name")


@dataclass(frozen=True)
class Hypothesis:
    hypothesis_id: str
    title: str
    description: str
    tag: str
    author: str
    added_on: datetime


@dataclass(frozen=True)
class EvidenceItem:
    evidence_id: str
    hypothesis_id: str
    url: str
    argument_text: str
    argument_kind: ArgumentKind
    polarity: Polarity
    author: str
    added_on: datetime


def tier_numeric(tier: int) -> float:
    """Affine ordinal -> star map: tier 1 -> 1.0 up to tier 9 -> 5.0 in half-star steps."""
    validate_tier(tier)
    return 0.5 + 0.5 * tier


def validate_tier(tier: int) -> int:
    if not isinstance(tier, int) or isinstance(tier, bool) or not TIER_MIN <= tier <= TIER_MAX:
        raise ValidationError(
            f"quality tier must be an integer in {TIER_MIN}..{TIER_MAX}, got {tier!r}",
            code="tier-out-of-range",
        )
    return tier


@dataclass(frozen=True)
class QualityRating:
    evidence_id: str
    rater: str
    tier: int
    rated_at: datetime

    def __post_init__(self):
        validate_tier(self.tier)

    @property
    def numeric_value(self) -> float:
        return tier_numeric(self.tier)


@dataclass(frozen=True)
class Vote:
    hypothesis_id: str
    voter: str
    direction: VoteDirection
    cast_at: datetime


@dataclass(frozen=True)
class LintReport:
    well_formed: bool
    cue_words_found: tuple[str, ...] = ()
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "well_formed": self.well_formed,
            "cue_words_found": list(self.cue_words_found),
            "warnings": list(self.warnings),
        }


def _cue_patterns() -> list[tuple[str, re.Pattern]]:
    # Longest phrase first so "should not" consumes its span before "should"
    # can match there.
    entries = sorted(CUE_WORDS, key=lambda w: (-len(w.split()), -len(w)))
    return [(w, re.compile(r"\b" + r"\s+".join(map(re.escape, w.split())) + r"\b", re.IGNORECASE)) for w in entries]


_CUE_PATTERNS = _cue_patterns()


def lint_hypothesis(title: str) -> LintReport:
    """Advisory well-formedness check for a hypothesis title.

    A title is treated as well formed when it contains at least one cue
    word/phrase and is at least five words long.  Matching is
    case-insensitive on whole words; the longest phrase wins.  The check
    never blocks creation.
    """
    taken: list[tuple[int, int]] = []
    found: list[tuple[int, str]] = []
    for cue, pattern in _CUE_PATTERNS:
        for m in pattern.finditer(title):
            span = (m.start(), m.end())
            if any(s < span[1] and span[0] < e for s, e in taken):
                continue
            taken.append(span)
            found.append((span[0], cue))
    found.sort()
    cues = tuple(dict.fromkeys(cue for _, cue in found))

    warnings = []
    word_count = len(title.split())
    if not cues:
        warnings.append("no cue word found; prefer words that imply what is obligatory, permissible, or forbidden")
    if word_count < MIN_WELL_FORMED_WORDS:
        warnings.append(f"title has {word_count} words; a proposition usually needs at least {MIN_WELL_FORMED_WORDS}")
    if len(title) > TITLE_MAX_CHARS:
        warnings.append(f"title exceeds {TITLE_MAX_CHARS} characters")

    well_formed = bool(cues) and word_count >= MIN_WELL_FORMED_WORDS
    return LintReport(well_formed=well_formed, cue_words_found=cues, warnings=tuple(warnings))


def validate_title(title: str) -> str:
    stripped = title.strip()
    if not stripped:
        raise ValidationError("hypothesis title must be non-empty", code="empty-title")
    if len(stripped) > TITLE_MAX_CHARS:
        raise ValidationError(
            f"hypothesis title exceeds {TITLE_MAX_CHARS} characters", code="title-too-long"
        )
    return stripped


def validate_tag(tag: str) -> str:
    stripped = tag.strip()
    if not stripped:
        raise ValidationError("hypothesis tag must be non-empty", code="empty-tag")
    return stripped


def validate_url(url: str) -> str:
    parsed = urlparse(url)
    if not parsed.scheme or not parsed.netloc:
        raise ValidationError(f"url must be absolute (scheme + host): {url!r}", code="malformed-url")
    return url


def validate_argument_text(text: str) -> str:
    if not text.strip():
        raise ValidationError("argument_text must be non-empty", code="empty-argument")
    return text


def unknown(kind: str, identifier: str) -> UnknownEntityError:
    return UnknownEntityError(f"unknown {kind}: {identifier}", code=f"unknown-{kind}")
