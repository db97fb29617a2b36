"""Trajectory mining for conjunctive capability dependencies, and a replay
harness comparing an eager baseline planner against closure semantics.

A trajectory is an observed run: timestamped capability events plus the
capability it terminally derived.  Given candidate rules, a trajectory
witnesses a candidate when the candidate derives the trajectory's terminal,
the candidate's tail is covered by the observed events, and no chain of
singleton candidates explains the terminal from those events.  The terminal
itself never counts as evidence for its own derivation.

The planner comparison replays timed schedules.  The closure semantics
planner fires an edge only once its whole tail is available, so it can
never commit a partial precondition violation; the eager baseline fires as
soon as any tail member appears, which is how workflow style systems
mishandle joint preconditions under asynchronous delivery.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence

from .model import CapabilityHypergraph, CapabilitySet


class MiningError(ValueError):
    """Raised for malformed trajectories, candidates, or replay instances."""


@dataclass(frozen=True)
class Trajectory:
    trajectory_id: str
    events: tuple[tuple[str, int], ...]
    terminal: str

    def __post_init__(self) -> None:
        if not self.events:
            raise MiningError(f"trajectory {self.trajectory_id!r} has no events")
        last = None
        for label, t_ms in self.events:
            if not label:
                raise MiningError(f"trajectory {self.trajectory_id!r} has an empty event label")
            if last is not None and t_ms < last:
                raise MiningError(f"trajectory {self.trajectory_id!r} timestamps decrease")
            last = t_ms
        if not self.terminal:
            raise MiningError(f"trajectory {self.trajectory_id!r} has no terminal capability")


@dataclass(frozen=True)
class Candidate:
    """A label level rule with a single head capability."""

    tail: frozenset[str]
    head: str


@dataclass(frozen=True)
class CandidateStat:
    tail: tuple[str, ...]
    head: str
    witnesses: int


@dataclass(frozen=True)
class MiningReport:
    total: int
    conjunctive_instances: int
    prevalence: float
    wilson_low: float
    wilson_high: float
    candidates: tuple[CandidateStat, ...]


def wilson_interval(successes: int, trials: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion, no continuity correction.

    The boundary cases are pinned exactly: zero successes gives a lower
    bound of 0.0 and all successes gives an upper bound of 1.0.
    """
    if trials <= 0:
        raise MiningError("wilson interval needs at least one trial")
    if not 0 <= successes <= trials:
        raise MiningError("successes must lie in [0, trials]")
    p = successes / trials
    denom = 1.0 + z * z / trials
    centre = p + z * z / (2 * trials)
    radius = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4.0 * trials * trials))
    low = 0.0 if successes == 0 else (centre - radius) / denom
    high = 1.0 if successes == trials else (centre + radius) / denom
    return low, high


def _singleton_fixed_point(seed: frozenset[str], rules: Sequence[Candidate]) -> set[str]:
    """Close a label set under the singleton tailed candidates only."""
    have = set(seed)
    changed = True
    while changed:
        changed = False
        for rule in rules:
            if rule.head not in have and all(lb in have for lb in rule.tail):
                have.add(rule.head)
                changed = True
    return have


def mine_witnesses(
    trajectories: Sequence[Trajectory], candidates: Sequence[Candidate]
) -> MiningReport:
    """Count witnesses per candidate and the conjunctive instance prevalence.

    A trajectory (events, terminal) witnesses candidate (tail, head) when
    head equals the terminal, tail is contained in the event labels with
    the terminal removed, and the terminal is not derivable from those
    labels through singleton candidates alone.  A trajectory is a
    conjunctive instance when it witnesses at least one candidate with two
    or more tail members.  Prevalence comes with its 95 percent Wilson
    interval.
    """
    if not trajectories:
        raise MiningError("cannot mine an empty trajectory corpus")
    known: set[str] = set()
    for tr in trajectories:
        known.update(label for label, _ in tr.events)
        known.add(tr.terminal)
    for cand in candidates:
        for lb in set(cand.tail) | {cand.head}:
            if lb not in known:
                raise MiningError(f"unknown label {lb!r} in candidate")
    singleton_rules = [c for c in candidates if len(c.tail) == 1]
    counts = [0] * len(candidates)
    conjunctive = 0
    for tr in trajectories:
        observed = frozenset(label for label, _ in tr.events) - {tr.terminal}
        explained = tr.terminal in _singleton_fixed_point(observed, singleton_rules)
        if explained:
            continue
        saw_conjunctive = False
        for i, cand in enumerate(candidates):
            if cand.head != tr.terminal:
                continue
            if not cand.tail <= observed:
                continue
            counts[i] += 1
            if len(cand.tail) >= 2:
                saw_conjunctive = True
        if saw_conjunctive:
            conjunctive += 1
    total = len(trajectories)
    low, high = wilson_interval(conjunctive, total)
    stats = tuple(
        CandidateStat(tail=tuple(sorted(c.tail)), head=c.head, witnesses=counts[i])
        for i, c in enumerate(candidates)
    )
    return MiningReport(
        total=total,
        conjunctive_instances=conjunctive,
        prevalence=conjunctive / total,
        wilson_low=low,
        wilson_high=high,
        candidates=stats,
    )


@dataclass(frozen=True)
class EvalInstance:
    """A replay instance: starting capabilities plus timed deliveries."""

    initial: CapabilitySet
    schedule: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class ViolationReport:
    """Per planner AND violation tallies over the conjunctive instances.

    An instance is conjunctive when closure semantics replay fires at least
    one edge with two or more tail members.  The closure semantics planner
    cannot violate by construction; a nonzero count would be a bug and is
    asserted away rather than reported.
    """

    total_instances: int
    conjunctive_instances: int
    workflow_violation_instances: int
    hypergraph_violation_instances: int
    workflow_rate: float
    hypergraph_rate: float


def _delivery_rounds(
    h: CapabilityHypergraph, instance: EvalInstance
) -> list[int]:
    """Group scheduled deliveries into per time bitmasks, ascending time."""
    by_time: dict[int, int] = {}
    for vertex, t_ms in instance.schedule:
        if not 0 <= vertex < h.n:
            raise MiningError(f"scheduled capability id {vertex} out of range")
        if t_ms < 0:
            raise MiningError("schedule timestamps must be non-negative")
        by_time[t_ms] = by_time.get(t_ms, 0) | 1 << vertex
    return [by_time[t] for t in sorted(by_time)]


def _replay_strict(h: CapabilityHypergraph, instance: EvalInstance) -> bool:
    """Closure semantics replay; returns whether a conjunctive edge fired."""
    avail = instance.initial.bits
    fired = [False] * h.m
    conjunctive = False
    violated = False

    def cascade() -> None:
        nonlocal avail, conjunctive, violated
        changed = True
        while changed:
            changed = False
            for e in h.edges:
                if not fired[e.edge_id] and e.tail.bits & ~avail == 0:
                    if e.tail_size >= 2:
                        conjunctive = True
                        if e.tail.bits & ~avail:
                            violated = True
                    fired[e.edge_id] = True
                    avail |= e.head.bits
                    changed = True

    cascade()
    for delivered in _delivery_rounds(h, instance):
        avail |= delivered
        cascade()
    assert not violated, "closure planner fired a partial tail"
    return conjunctive


def _replay_eager(h: CapabilityHypergraph, instance: EvalInstance) -> bool:
    """Eager baseline replay; returns whether it fired a conjunctive edge
    while part of that edge's tail was still missing."""
    avail = instance.initial.bits
    fired = [False] * h.m
    violated = False

    def cascade() -> None:
        nonlocal avail, violated
        changed = True
        while changed:
            changed = False
            for e in h.edges:
                if fired[e.edge_id]:
                    continue
                if e.tail.bits == 0 or e.tail.bits & avail:
                    fired[e.edge_id] = True
                    if e.tail_size >= 2 and e.tail.bits & ~avail:
                        violated = True
                    avail |= e.head.bits
                    changed = True

    cascade()
    for delivered in _delivery_rounds(h, instance):
        avail |= delivered
        cascade()
    return violated


def evaluate_planners(
    h: CapabilityHypergraph, instances: Sequence[EvalInstance]
) -> ViolationReport:
    """Replay every instance under both planners and tally AND violations.

    Violations are tallied over conjunctive instances: an eager misfire on
    a tail that never completes belongs to no conjunctive dependency and
    does not enter the rate.
    """
    total = len(instances)
    conjunctive = 0
    workflow_violations = 0
    for inst in instances:
        if inst.initial.n != h.n:
            raise MiningError("instance universe does not match the hypergraph")
        is_conjunctive = _replay_strict(h, inst)
        if is_conjunctive:
            conjunctive += 1
            if _replay_eager(h, inst):
                workflow_violations += 1
    workflow_rate = workflow_violations / conjunctive if conjunctive else 0.0
    return ViolationReport(
        total_instances=total,
        conjunctive_instances=conjunctive,
        workflow_violation_instances=workflow_violations,
        hypergraph_violation_instances=0,
        workflow_rate=workflow_rate,
        hypergraph_rate=0.0,
    )


def trajectory_from_doc(doc: dict) -> Trajectory:
    """Parse one JSON Lines record:
    {"id": ..., "events": [{"cap": ..., "t_ms": ...}], "terminal": ...}."""
    if not isinstance(doc, dict):
        raise MiningError("trajectory record must be a JSON object")
    events = doc.get("events")
    if not isinstance(events, list):
        raise MiningError('trajectory record needs an "events" list')
    parsed = []
    for ev in events:
        if not isinstance(ev, dict) or "cap" not in ev or "t_ms" not in ev:
            raise MiningError('each event needs "cap" and "t_ms"')
        parsed.append((str(ev["cap"]), int(ev["t_ms"])))
    return Trajectory(
        trajectory_id=str(doc.get("id", "")),
        events=tuple(parsed),
        terminal=str(doc.get("terminal", "")),
    )


def load_trajectories_jsonl(text: str) -> list[Trajectory]:
    trajectories = []
    for line_no, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        try:
            doc = json.loads(line)
        except json.JSONDecodeError as exc:
            raise MiningError(f"line {line_no}: invalid JSON: {exc}") from None
        trajectories.append(trajectory_from_doc(doc))
    return trajectories


def candidates_from_doc(doc: dict) -> list[Candidate]:
    """Parse the candidate rules document:
    {"candidates": [{"tail": [...], "head": [...]}]}; heads are singleton lists."""
    if not isinstance(doc, dict) or not isinstance(doc.get("candidates"), list):
        raise MiningError('candidates document needs a "candidates" list')
    out = []
    for entry in doc["candidates"]:
        if not isinstance(entry, dict) or "tail" not in entry or "head" not in entry:
            raise MiningError('each candidate needs "tail" and "head"')
        head = entry["head"]
        if isinstance(head, list):
            if len(head) != 1:
                raise MiningError("candidate head must be a single capability")
            head = head[0]
        out.append(Candidate(tail=frozenset(str(lb) for lb in entry["tail"]), head=str(head)))
    return out


def instances_from_doc(h: CapabilityHypergraph, doc: dict) -> list[EvalInstance]:
    """Parse replay instances:
    {"instances": [{"initial": [...], "events": [{"cap": ..., "t_ms": ...}]}]}."""
    if not isinstance(doc, dict) or not isinstance(doc.get("instances"), list):
        raise MiningError('instances document needs an "instances" list')
    out = []
    for entry in doc["instances"]:
        if not isinstance(entry, dict):
            raise MiningError("each instance must be a JSON object")
        initial = h.set_of(entry.get("initial", []))
        schedule = []
        for ev in entry.get("events", []):
            if not isinstance(ev, dict) or "cap" not in ev or "t_ms" not in ev:
                raise MiningError('each event needs "cap" and "t_ms"')
            schedule.append((h.index_of(str(ev["cap"])), int(ev["t_ms"])))
        out.append(EvalInstance(initial=initial, schedule=tuple(schedule)))
    return out
