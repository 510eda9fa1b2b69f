"""Reliability-weighted truth inference.

A link's score starts at 0 and accumulates reliability-weighted increments:

    score = delta_plus * sum(rho_i) - delta_minus * sum(rho_j)

where rho_i are the round reliabilities of players who selected the link and
rho_j those of players who, under a mutually exclusive predicate, selected a
sibling candidate instead.  Round reliability decays exponentially with the
number of mistakes the player made on that round's known-truth assessment
tasks:

    rho = exp(-k * mistakes)

Scores are clamped to [0, 1] and a link is solved once its score reaches the
configured threshold (up to the comparison epsilon).

Every function in this module is pure: callers own all state and must
serialize concurrent finalizations that touch the same links.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import AbstractSet, Iterable, Mapping, MutableMapping, Sequence

from .errors import (
    DomainError,
    InconsistentLogError,
    StaleTaskError,
    UnknownCandidateError,
    UnknownIdError,
)
from .model import (
    Contribution,
    EngineConfig,
    LinkKey,
    Predicate,
    Task,
    TASK_ASSESSMENT,
    TASK_OPEN,
)


@dataclass(frozen=True)
class RoundReliability:
    """The trust weight attached to one player's round."""

    round: str
    player: str
    mistakes: int
    reliability: float


@dataclass(frozen=True)
class ScoreUpdate:
    """One applied score change: raw signed delta plus the clamped result."""

    link: LinkKey
    delta: float
    resulting_score: float
    cause: tuple[str, str]  # (player, task) of the triggering contribution


@dataclass(frozen=True)
class RoundResult:
    """Everything a round finalization produced."""

    reliability: RoundReliability
    updates: tuple[ScoreUpdate, ...]
    solved: tuple[LinkKey, ...]


def compute_reliability(k: float, mistakes: int) -> float:
    """exp(-k * mistakes): 1.0 with no mistakes, decaying toward 0."""
    if k <= 0:
        raise DomainError(f"reliability steepness k must be positive, got {k}")
    if mistakes < 0:
        raise DomainError(f"mistake count must be >= 0, got {mistakes}")
    return math.exp(-k * mistakes)


def default_parameters(q: int, n: int) -> tuple[float, float]:
    """Suggested (k, delta_plus) for q assessments per round and n desired players.

    k = 3/q drives reliability to roughly 0.05 when all q assessments are
    missed; delta_plus = 1/n lets exactly n fully reliable agreeing players
    push a score to 1.
    """
    if q < 1:
        raise DomainError(f"assessments per round q must be >= 1, got {q}")
    if n < 1:
        raise DomainError(f"desired player count n must be >= 1, got {n}")
    return 3.0 / q, 1.0 / n


def check_solved(score: float, config: EngineConfig) -> bool:
    """True once a score reaches the threshold, tolerating float error."""
    return score >= config.threshold - config.epsilon


def _clamp(value: float) -> float:
    return 0.0 if value < 0.0 else 1.0 if value > 1.0 else value


def apply_contribution(
    scores: Mapping[LinkKey, float],
    task: Task,
    selected: str,
    reliability: float,
    config: EngineConfig,
    predicates: Mapping[str, Predicate],
    solved_links: AbstractSet[LinkKey] = frozenset(),
    cause: tuple[str, str] = ("", ""),
) -> list[ScoreUpdate]:
    """Score updates for one selection, weighted by the round reliability.

    The selected candidate's link gains ``delta_plus * reliability``; when the
    task's predicate is mutually exclusive and a decrement is configured,
    every other candidate loses ``delta_minus * reliability``.  Results are
    clamped to [0, 1].  The input mapping is not mutated.
    """
    if selected not in task.candidates:
        raise UnknownCandidateError(
            f"{selected!r} is not a candidate of task {task.id!r}"
        )
    keys = task.link_keys()
    if any(key in solved_links for key in keys):
        raise StaleTaskError(f"task {task.id!r} was already solved")
    missing = [key for key in keys if key not in scores]
    if missing:
        raise UnknownIdError(f"candidate links missing from score store: {missing}")

    predicate = predicates.get(task.predicate)
    if predicate is None:
        raise UnknownIdError(f"unknown predicate {task.predicate!r}")

    updates: list[ScoreUpdate] = []
    selected_key = (task.subject, task.predicate, selected)
    delta = config.delta_plus * reliability
    updates.append(
        ScoreUpdate(
            link=selected_key,
            delta=delta,
            resulting_score=_clamp(scores[selected_key] + delta),
            cause=cause,
        )
    )
    if predicate.mutually_exclusive and config.delta_minus > 0.0:
        decrement = config.delta_minus * reliability
        for key in keys:
            if key == selected_key:
                continue
            updates.append(
                ScoreUpdate(
                    link=key,
                    delta=-decrement,
                    resulting_score=_clamp(scores[key] - decrement),
                    cause=cause,
                )
            )
    return updates


def count_mistakes(
    contributions: Sequence[Contribution],
    tasks: Mapping[str, Task],
    ground_truth: Mapping[LinkKey, bool | None],
) -> int:
    """Number of answered assessment tasks whose selection misses the truth.

    Unanswered assessment tasks are absence of evidence and never count.
    """
    rounds = {c.round for c in contributions}
    if len(rounds) > 1:
        raise DomainError(f"contributions span multiple rounds: {sorted(rounds)}")
    mistakes = 0
    for c in contributions:
        task = tasks.get(c.task)
        if task is None:
            raise UnknownIdError(f"contribution references unknown task {c.task!r}")
        if task.kind != TASK_ASSESSMENT:
            continue
        key = (task.subject, task.predicate, c.selected)
        if ground_truth.get(key) is not True:
            mistakes += 1
    return mistakes


def finalize_round(
    contributions: Sequence[Contribution],
    tasks: Mapping[str, Task],
    scores: Mapping[LinkKey, float],
    config: EngineConfig,
    predicates: Mapping[str, Predicate],
    ground_truth: Mapping[LinkKey, bool | None],
    retired_tasks: AbstractSet[str] = frozenset(),
    round_id: str = "",
    player_id: str = "",
) -> RoundResult:
    """Aggregate one closed round into score updates and solved links.

    Task kinds in ``tasks`` must reflect how each task was served in this
    round's plan.  Mistakes on assessment answers fix the round reliability;
    that single weight then applies to every open-task answer, in answer
    order.  Assessment answers only measure reliability and never move
    scores.  Open tasks listed in ``retired_tasks`` (solved by a concurrent
    round after this plan was dealt) are skipped as no-ops.

    Solved links are those whose score crossed the threshold during this
    finalization.  The input score mapping is not mutated.
    """
    if not round_id and contributions:
        round_id = contributions[0].round
    if not player_id and contributions:
        player_id = contributions[0].player

    mistakes = count_mistakes(contributions, tasks, ground_truth)
    rho = compute_reliability(config.k, mistakes)
    reliability = RoundReliability(
        round=round_id, player=player_id, mistakes=mistakes, reliability=rho
    )

    working = dict(scores)
    was_solved = {key for key, s in scores.items() if check_solved(s, config)}
    updates: list[ScoreUpdate] = []
    for c in contributions:
        task = tasks[c.task]
        if task.kind != TASK_OPEN or c.task in retired_tasks:
            continue
        step = apply_contribution(
            working,
            task,
            c.selected,
            rho,
            config,
            predicates,
            cause=(c.player, c.task),
        )
        for update in step:
            working[update.link] = update.resulting_score
        updates.extend(step)

    solved = tuple(
        key
        for key, s in working.items()
        if check_solved(s, config) and key not in was_solved
    )
    return RoundResult(
        reliability=reliability, updates=tuple(updates), solved=solved
    )


@dataclass(frozen=True)
class RoundLogEntry:
    """One planned round as recorded in the answer log.

    ``assessment_tasks`` is the set served as known-truth tasks in this
    round's plan; ``finalized_seq`` orders finalizations globally (None for
    rounds never finalized, which contribute nothing to scores).
    """

    round: str
    player: str
    task_ids: tuple[str, ...]
    assessment_tasks: frozenset[str]
    finalized_seq: int | None = None
    mistakes: int | None = None
    reliability: float | None = None


def recompute_from_log(
    contributions: Sequence[Contribution],
    rounds: Sequence[RoundLogEntry],
    tasks: Mapping[str, Task],
    config: EngineConfig,
    predicates: Mapping[str, Predicate],
    ground_truth: Mapping[LinkKey, bool | None],
) -> dict[LinkKey, float]:
    """Replay the full history from zero scores; the brute-force oracle.

    ``tasks`` and ``ground_truth`` describe the *initial* state, before any
    promotion; promotions (solved tasks turning into assessment tasks with
    the winning candidate as truth) are re-derived while replaying rounds in
    finalization order.  The result must match the live incremental store
    within 1e-9 per link.
    """
    by_round = {entry.round: entry for entry in rounds}
    grouped: dict[str, list[Contribution]] = {entry.round: [] for entry in rounds}
    for c in contributions:
        if c.round not in by_round:
            raise InconsistentLogError(
                f"contribution by {c.player!r} references unknown round {c.round!r}"
            )
        grouped[c.round].append(c)

    scores: dict[LinkKey, float] = {}
    for task in tasks.values():
        for key in task.link_keys():
            scores.setdefault(key, 0.0)

    truths = dict(ground_truth)
    retired: set[str] = set()
    # Links solved before any play exist only if seeded that way; scores start
    # from zero so nothing is solved at the outset unless the threshold is 0,
    # which the config forbids.
    solved_links: set[LinkKey] = set()

    finalized = sorted(
        (e for e in rounds if e.finalized_seq is not None),
        key=lambda e: e.finalized_seq,
    )
    for entry in finalized:
        served: dict[str, Task] = {}
        for task_id in entry.task_ids:
            task = tasks.get(task_id)
            if task is None:
                raise InconsistentLogError(
                    f"round {entry.round!r} references unknown task {task_id!r}"
                )
            kind = (
                TASK_ASSESSMENT if task_id in entry.assessment_tasks else TASK_OPEN
            )
            served[task_id] = Task(
                id=task.id,
                subject=task.subject,
                predicate=task.predicate,
                candidates=task.candidates,
                kind=kind,
                linking_case=task.linking_case,
            )
        result = finalize_round(
            grouped.get(entry.round, []),
            served,
            scores,
            config,
            predicates,
            truths,
            retired_tasks=frozenset(retired),
            round_id=entry.round,
            player_id=entry.player,
        )
        if entry.mistakes is not None and result.reliability.mistakes != entry.mistakes:
            raise InconsistentLogError(
                f"round {entry.round!r}: replayed mistake count "
                f"{result.reliability.mistakes} != logged {entry.mistakes}"
            )
        for update in result.updates:
            scores[update.link] = update.resulting_score
        for key in result.solved:
            if key in solved_links:
                continue
            solved_links.add(key)
            subject, predicate, winner = key
            truths[key] = True
            for task in tasks.values():
                if task.subject == subject and task.predicate == predicate:
                    if winner in task.candidates:
                        retired.add(task.id)
    return scores
