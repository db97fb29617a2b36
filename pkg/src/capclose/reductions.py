"""Instance generators that encode two classic hard problems as capability
hypergraphs.

These exist as high volume test generators for the closure, emergence, and
antichain machinery: the encodings have known answers (circuit value,
minimal transversal verdict), so large batches of generated instances give
independent ground truth.

Circuit encoding: each gate becomes a vertex; an AND gate becomes one
conjunctive edge from its two inputs, an OR gate becomes two singleton
edges.  A marker vertex hangs off the output through a conjunctive stage,
so the marker is emergent exactly when the circuit evaluates to 1: it is
then reachable, but never through singleton edges alone.

Transversal encoding: each set of the instance gets a coverage vertex fed
by singleton edges from its elements; one conjunctive edge from all
coverage vertices reaches the single forbidden vertex.  A candidate subset
is a minimal transversal exactly when it is a minimal unsafe set of the
encoding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .model import CapabilityHypergraph, CapabilitySet, build_hypergraph

ALWAYS_ON = "always_on"
OUTPUT_STAGE = "output_and"
EMERGENT_MARKER = "emergent_marker"
BREACH = "breach"


class InvalidCircuit(ValueError):
    """Raised when a circuit fails structural validation."""


class InvalidInstance(ValueError):
    """Raised when a transversal instance fails validation."""


@dataclass(frozen=True)
class Gate:
    """kind is one of "input", "and", "or"; inputs are gate indices."""

    kind: str
    inputs: tuple[int, ...] = ()


@dataclass(frozen=True)
class MonotoneCircuit:
    """A monotone boolean circuit in topological order.

    Gates may reference only earlier gates, AND and OR take exactly two
    distinct inputs, and input gates take none.  Assignments map to input
    gates in gate order.
    """

    gates: tuple[Gate, ...]
    output: int

    def __post_init__(self) -> None:
        if not self.gates:
            raise InvalidCircuit("circuit needs at least one gate")
        if not 0 <= self.output < len(self.gates):
            raise InvalidCircuit(f"output gate {self.output} out of range")
        for i, gate in enumerate(self.gates):
            if gate.kind == "input":
                if gate.inputs:
                    raise InvalidCircuit(f"input gate {i} must not have inputs")
            elif gate.kind in ("and", "or"):
                if len(gate.inputs) != 2:
                    raise InvalidCircuit(f"gate {i} must have exactly 2 inputs")
                if gate.inputs[0] == gate.inputs[1]:
                    raise InvalidCircuit(f"gate {i} inputs must be distinct")
                for j in gate.inputs:
                    if not 0 <= j < i:
                        raise InvalidCircuit(f"gate {i} input {j} must reference an earlier gate")
            else:
                raise InvalidCircuit(f"gate {i} has unknown kind {gate.kind!r}")

    @property
    def input_count(self) -> int:
        return sum(1 for g in self.gates if g.kind == "input")

    def evaluate(self, assignment: Sequence[int]) -> bool:
        """Direct evaluation, the ground truth oracle for the encoding."""
        if len(assignment) != self.input_count:
            raise InvalidCircuit(
                f"assignment length {len(assignment)} != input count {self.input_count}"
            )
        values: list[bool] = []
        next_input = 0
        for gate in self.gates:
            if gate.kind == "input":
                values.append(bool(assignment[next_input]))
                next_input += 1
            elif gate.kind == "and":
                values.append(values[gate.inputs[0]] and values[gate.inputs[1]])
            else:
                values.append(values[gate.inputs[0]] or values[gate.inputs[1]])
        return values[self.output]


def cvp_to_instance(
    circuit: MonotoneCircuit, assignment: Sequence[int]
) -> tuple[CapabilityHypergraph, CapabilitySet]:
    """Encode one circuit evaluation as (hypergraph, initial set).

    The initial set holds the true input gates plus an always on helper.
    When the output gate is not an AND gate, a synthetic AND stage over the
    output and the helper guards the marker, so the marker never becomes
    reachable through singleton edges alone.  The marker vertex is labelled
    EMERGENT_MARKER and is emergent exactly when the circuit evaluates to 1.
    """
    if len(assignment) != circuit.input_count:
        raise InvalidCircuit(
            f"assignment length {len(assignment)} != input count {circuit.input_count}"
        )
    gate_label = [f"g{i}" for i in range(len(circuit.gates))]
    labels = gate_label + [ALWAYS_ON]
    edges: list[tuple[list[str], list[str]]] = []
    for i, gate in enumerate(circuit.gates):
        if gate.kind == "and":
            edges.append(([gate_label[gate.inputs[0]], gate_label[gate.inputs[1]]], [gate_label[i]]))
        elif gate.kind == "or":
            edges.append(([gate_label[gate.inputs[0]]], [gate_label[i]]))
            edges.append(([gate_label[gate.inputs[1]]], [gate_label[i]]))
    marker_source = gate_label[circuit.output]
    if circuit.gates[circuit.output].kind != "and":
        labels.append(OUTPUT_STAGE)
        edges.append(([marker_source, ALWAYS_ON], [OUTPUT_STAGE]))
        marker_source = OUTPUT_STAGE
    labels.append(EMERGENT_MARKER)
    edges.append(([marker_source], [EMERGENT_MARKER]))
    h = build_hypergraph(labels, edges)

    initial_labels = [ALWAYS_ON]
    next_input = 0
    for i, gate in enumerate(circuit.gates):
        if gate.kind == "input":
            if assignment[next_input]:
                initial_labels.append(gate_label[i])
            next_input += 1
    return h, h.set_of(initial_labels)


@dataclass(frozen=True)
class TransversalInstance:
    """A set system over a label universe plus a candidate subset to test."""

    universe: tuple[str, ...]
    hyperedges: tuple[tuple[str, ...], ...]
    candidate: tuple[str, ...]

    def __post_init__(self) -> None:
        members = set(self.universe)
        if len(members) != len(self.universe):
            raise InvalidInstance("universe labels must be unique")
        for edge in self.hyperedges:
            if not edge:
                raise InvalidInstance("instance hyperedges must be non-empty")
            for lb in edge:
                if lb not in members:
                    raise InvalidInstance(f"hyperedge label {lb!r} not in universe")
        for lb in self.candidate:
            if lb not in members:
                raise InvalidInstance(f"candidate label {lb!r} not in universe")


def coverage_label(index: int) -> str:
    return f"covered_{index}"


def transversal_to_instance(
    instance: TransversalInstance,
) -> tuple[CapabilityHypergraph, CapabilitySet, CapabilitySet]:
    """Encode a transversal instance as (hypergraph, forbidden, candidate).

    The candidate is a minimal transversal of the set system exactly when
    it is a member of the minimal unsafe antichain of the encoding for the
    returned forbidden set.
    """
    reserved = {coverage_label(i) for i in range(len(instance.hyperedges))}
    reserved.add(BREACH)
    clash = reserved.intersection(instance.universe)
    if clash:
        raise InvalidInstance(f"universe labels collide with generated labels: {sorted(clash)}")
    labels = list(instance.universe)
    labels.extend(coverage_label(i) for i in range(len(instance.hyperedges)))
    labels.append(BREACH)
    edges: list[tuple[list[str], list[str]]] = []
    for i, edge in enumerate(instance.hyperedges):
        for lb in edge:
            edges.append(([lb], [coverage_label(i)]))
    edges.append(
        ([coverage_label(i) for i in range(len(instance.hyperedges))], [BREACH])
    )
    h = build_hypergraph(labels, edges)
    return h, h.set_of([BREACH]), h.set_of(instance.candidate)
