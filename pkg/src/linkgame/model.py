"""Domain types for the link-refinement game engine.

Everything here is an immutable value object: stores own all mutation.
A link is a (subject, predicate, object) triple carrying a truth score in
[0, 1]; a task presents one subject and a candidate object set to a player;
a contribution is a single selection made inside a game round.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional

from .errors import DomainError, UnknownIdError

# (subject id, predicate id, object id) — the identity of a link.
LinkKey = tuple[str, str, str]

ROLE_SUBJECT = "subject"
ROLE_OBJECT = "object"
ROLE_BOTH = "both"
ROLES = (ROLE_SUBJECT, ROLE_OBJECT, ROLE_BOTH)

REPR_KINDS = ("image", "geo", "text", "audio", "none")

STATUS_OPEN = "open"
STATUS_SOLVED_TRUE = "solved-true"
STATUS_SOLVED_FALSE = "solved-false"
STATUS_ASSESSMENT = "assessment"
LINK_STATUSES = (STATUS_OPEN, STATUS_SOLVED_TRUE, STATUS_SOLVED_FALSE, STATUS_ASSESSMENT)

TASK_OPEN = "open"
TASK_ASSESSMENT = "assessment"
TASK_KINDS = (TASK_OPEN, TASK_ASSESSMENT)

LINKING_CASES = ("creation", "ranking", "validation")


@dataclass(frozen=True)
class Representation:
    """How a resource is shown to players.

    ``kind`` selects the medium: an image URL, a geographic point rendered on
    a map, a text body, an audio URL, or nothing at all.  ``label`` is the
    human display name and is always allowed.
    """

    kind: str = "none"
    label: str = ""
    url: str | None = None
    lat: float | None = None
    lon: float | None = None
    zoom: int | None = None
    text: str | None = None

    def __post_init__(self):
        if self.kind not in REPR_KINDS:
            raise DomainError(f"unknown representation kind {self.kind!r}")
        if self.kind in ("image", "audio") and not self.url:
            raise DomainError(f"{self.kind} representation requires a url")
        if self.kind == "geo":
            if self.lat is None or self.lon is None:
                raise DomainError("geo representation requires lat and lon")
            if not (-90.0 <= self.lat <= 90.0 and -180.0 <= self.lon <= 180.0):
                raise DomainError(f"geo point ({self.lat}, {self.lon}) out of range")
        if self.kind == "text" and self.text is None:
            raise DomainError("text representation requires a text body")

    @property
    def is_none(self) -> bool:
        return self.kind == "none"

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind, "label": self.label}
        if self.url is not None:
            d["url"] = self.url
        if self.kind == "geo":
            d["lat"] = self.lat
            d["lon"] = self.lon
            if self.zoom is not None:
                d["zoom"] = self.zoom
        if self.text is not None:
            d["text"] = self.text
        return d

    @classmethod
    def from_dict(cls, d: Mapping) -> "Representation":
        return cls(
            kind=d.get("kind", "none"),
            label=d.get("label", ""),
            url=d.get("url"),
            lat=d.get("lat"),
            lon=d.get("lon"),
            zoom=d.get("zoom"),
            text=d.get("text"),
        )


@dataclass(frozen=True)
class Resource:
    """A subject- or object-capable entity that links connect."""

    id: str
    role: str = ROLE_BOTH
    semantic_type: str | None = None
    representation: Representation = field(default_factory=Representation)

    def __post_init__(self):
        if not self.id:
            raise DomainError("resource id must be non-empty")
        if self.role not in ROLES:
            raise DomainError(f"unknown resource role {self.role!r}")
        if self.subject_capable and self.representation.is_none:
            raise DomainError(
                f"subject-capable resource {self.id!r} needs a visible representation"
            )

    @property
    def subject_capable(self) -> bool:
        return self.role in (ROLE_SUBJECT, ROLE_BOTH)

    @property
    def object_capable(self) -> bool:
        return self.role in (ROLE_OBJECT, ROLE_BOTH)

    @property
    def label(self) -> str:
        return self.representation.label or self.id


@dataclass(frozen=True)
class Predicate:
    """A relation connecting subject resources to object resources.

    ``mutually_exclusive`` declares that the candidate objects for one subject
    exclude each other, which activates score decrements on non-selected
    candidates when the decrement quantity is positive.
    """

    id: str
    label: str = ""
    domain_types: frozenset[str] = frozenset()
    range_types: frozenset[str] = frozenset()
    mutually_exclusive: bool = False

    def __post_init__(self):
        if not self.id:
            raise DomainError("predicate id must be non-empty")
        object.__setattr__(self, "domain_types", frozenset(self.domain_types))
        object.__setattr__(self, "range_types", frozenset(self.range_types))


@dataclass(frozen=True)
class Link:
    """A (subject, predicate, object) triple with truth score and lifecycle status."""

    subject: str
    predicate: str
    object: str
    score: float = 0.0
    status: str = STATUS_OPEN
    ground_truth: bool | None = None
    created_at: float = 0.0
    solved_at: float | None = None

    def __post_init__(self):
        if not (0.0 <= self.score <= 1.0):
            raise DomainError(f"link score {self.score} outside [0, 1]")
        if self.status not in LINK_STATUSES:
            raise DomainError(f"unknown link status {self.status!r}")
        if self.status == STATUS_ASSESSMENT and self.ground_truth is None:
            raise DomainError(
                f"assessment link {self.key} must carry a ground truth value"
            )

    @property
    def key(self) -> LinkKey:
        return (self.subject, self.predicate, self.object)


@dataclass(frozen=True)
class Task:
    """One subject + predicate + candidate objects, answerable by one selection."""

    id: str
    subject: str
    predicate: str
    candidates: tuple[str, ...]
    kind: str = TASK_OPEN
    linking_case: str = "creation"

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        if not self.id:
            raise DomainError("task id must be non-empty")
        if len(self.candidates) < 2:
            raise DomainError(f"task {self.id!r} needs at least 2 candidates")
        if len(set(self.candidates)) != len(self.candidates):
            raise DomainError(f"task {self.id!r} has duplicate candidates")
        if self.kind not in TASK_KINDS:
            raise DomainError(f"unknown task kind {self.kind!r}")
        if self.linking_case not in LINKING_CASES:
            raise DomainError(f"unknown linking case {self.linking_case!r}")

    def link_keys(self) -> tuple[LinkKey, ...]:
        return tuple((self.subject, self.predicate, c) for c in self.candidates)


@dataclass(frozen=True)
class Contribution:
    """A single player selection on a task within one round."""

    player: str
    round: str
    task: str
    selected: str
    answered_at: float = 0.0
    elapsed: float = 0.0

    def __post_init__(self):
        if self.elapsed < 0:
            raise DomainError("contribution elapsed time must be >= 0")

    @property
    def key(self) -> tuple[str, str]:
        # At most one contribution per (player, task), ever.
        return (self.player, self.task)


@dataclass(frozen=True)
class RoundMode:
    """Round budget: a wall-clock duration or a fixed task count."""

    kind: str
    duration: float | None = None
    task_count: int | None = None

    def __post_init__(self):
        if self.kind == "timed":
            if self.duration is None or self.duration <= 0:
                raise DomainError("timed mode requires a positive duration")
        elif self.kind == "leveled":
            if self.task_count is None or self.task_count < 1:
                raise DomainError("leveled mode requires a positive task count")
        else:
            raise DomainError(f"unknown round mode {self.kind!r}")

    @classmethod
    def timed(cls, duration: float) -> "RoundMode":
        return cls(kind="timed", duration=float(duration))

    @classmethod
    def leveled(cls, task_count: int) -> "RoundMode":
        return cls(kind="leveled", task_count=int(task_count))

    @classmethod
    def parse(cls, text: str) -> "RoundMode":
        """Parse ``timed:60`` or ``leveled:8``."""
        kind, _, value = text.partition(":")
        if kind == "timed":
            return cls.timed(float(value))
        if kind == "leveled":
            return cls.leveled(int(value))
        raise DomainError(f"cannot parse round mode {text!r}")

    def to_dict(self) -> dict:
        if self.kind == "timed":
            return {"kind": "timed", "duration": self.duration}
        return {"kind": "leveled", "task_count": self.task_count}

    @classmethod
    def from_dict(cls, d: Mapping) -> "RoundMode":
        if d.get("kind") == "timed":
            return cls.timed(d["duration"])
        return cls.leveled(d["task_count"])


@dataclass(frozen=True)
class EngineConfig:
    """Truth-inference and gameplay tuning knobs.

    ``k`` controls how steeply reliability decays with assessment mistakes,
    ``delta_plus``/``delta_minus`` are the per-answer score increment and
    decrement, ``threshold`` is the score at which a link counts as solved,
    and ``assessments_per_round`` is the number of known-truth tasks injected
    into each round to measure reliability.
    """

    k: float = 1.0
    delta_plus: float = 0.25
    delta_minus: float = 0.0
    threshold: float = 1.0
    assessments_per_round: int = 3
    round_mode: RoundMode = field(default_factory=lambda: RoundMode.leveled(8))
    points_per_agreement: int = 10
    epsilon: float = 1e-9

    def __post_init__(self):
        if self.k <= 0:
            raise DomainError(f"k must be positive, got {self.k}")
        if not (0.0 < self.delta_plus <= 1.0):
            raise DomainError(f"delta_plus must be in (0, 1], got {self.delta_plus}")
        if not (0.0 <= self.delta_minus < 1.0):
            raise DomainError(f"delta_minus must be in [0, 1), got {self.delta_minus}")
        if not (0.0 < self.threshold <= 1.0):
            raise DomainError(f"threshold must be in (0, 1], got {self.threshold}")
        if self.assessments_per_round < 0:
            raise DomainError("assessments_per_round must be >= 0")
        if self.epsilon < 0:
            raise DomainError("epsilon must be >= 0")
        if self.points_per_agreement < 0:
            raise DomainError("points_per_agreement must be >= 0")
        if (
            self.round_mode.kind == "leveled"
            and self.assessments_per_round >= self.round_mode.task_count
        ):
            raise DomainError(
                "assessments_per_round must be smaller than the leveled task count"
            )

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "delta_plus": self.delta_plus,
            "delta_minus": self.delta_minus,
            "threshold": self.threshold,
            "assessments_per_round": self.assessments_per_round,
            "round_mode": self.round_mode.to_dict(),
            "points_per_agreement": self.points_per_agreement,
            "epsilon": self.epsilon,
        }

    @classmethod
    def from_dict(cls, d: Mapping) -> "EngineConfig":
        kwargs = dict(d)
        mode = kwargs.get("round_mode")
        if isinstance(mode, Mapping):
            kwargs["round_mode"] = RoundMode.from_dict(mode)
        elif isinstance(mode, str):
            kwargs["round_mode"] = RoundMode.parse(mode)
        elif mode is None:
            kwargs.pop("round_mode", None)
        unknown = set(kwargs) - {
            "k",
            "delta_plus",
            "delta_minus",
            "threshold",
            "assessments_per_round",
            "round_mode",
            "points_per_agreement",
            "epsilon",
        }
        if unknown:
            raise DomainError(f"unknown config fields: {sorted(unknown)}")
        return cls(**kwargs)


@dataclass(frozen=True)
class Violation:
    """One domain/range/role problem found while validating a link."""

    code: str
    message: str


def validate_link(
    link: Link,
    resources: Mapping[str, Resource],
    predicates: Mapping[str, Predicate],
) -> list[Violation]:
    """Check a link's references, roles and declared domain/range types.

    Returns every violation found (empty means the link is acceptable).
    Raises :class:`UnknownIdError` when a referenced id is absent from the
    stores; anything else is reported as a violation, never an exception.
    """
    if link.subject not in resources:
        raise UnknownIdError(f"unknown subject resource {link.subject!r}")
    if link.object not in resources:
        raise UnknownIdError(f"unknown object resource {link.object!r}")
    if link.predicate not in predicates:
        raise UnknownIdError(f"unknown predicate {link.predicate!r}")

    subject = resources[link.subject]
    obj = resources[link.object]
    predicate = predicates[link.predicate]
    violations: list[Violation] = []

    if not subject.subject_capable:
        violations.append(
            Violation("role", f"resource {subject.id!r} cannot be a subject")
        )
    if not obj.object_capable:
        violations.append(Violation("role", f"resource {obj.id!r} cannot be an object"))
    if predicate.domain_types and subject.semantic_type is not None:
        if subject.semantic_type not in predicate.domain_types:
            violations.append(
                Violation(
                    "domain",
                    f"subject type {subject.semantic_type!r} not in domain of "
                    f"{predicate.id!r}",
                )
            )
    if predicate.range_types and obj.semantic_type is not None:
        if obj.semantic_type not in predicate.range_types:
            violations.append(
                Violation(
                    "range",
                    f"object type {obj.semantic_type!r} not in range of {predicate.id!r}",
                )
            )
    return violations
