"""Command line interface.

Every command reads JSON inputs, writes one JSON document to stdout, and
follows a single exit code contract:

    0   success, or a safe verdict
    2   an unsafe verdict (gate semantics)
    1   input or runtime error

Output is byte identical across runs for identical inputs, so commands can
be scripted and diffed.  Labels on the command line are comma separated;
an empty string means the empty set.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import discovery, dynamics, mining, reductions, safety
from .closure import Unreachable, closure, extract_plan
from .model import (
    CapabilityHypergraph,
    CapabilitySet,
    InvalidHypergraph,
    UniverseMismatch,
    load_hypergraph,
)

MAX_CARD_ENV = "CAPCLOSE_MAX_CARD"


def _split_labels(arg: str) -> list[str]:
    return [piece for piece in arg.split(",") if piece]


def _load_json(path: str) -> dict:
    with open(path, "r") as fh:
        return json.load(fh)


def _emit(doc: dict) -> None:
    print(json.dumps(doc, indent=2))


def _load_graph(path: str) -> CapabilityHypergraph:
    return load_hypergraph(_load_json(path))


def _cmd_validate(args: argparse.Namespace) -> int:
    h = _load_graph(args.hypergraph)
    _emit({"valid": True, "vertices": h.n, "edges": h.m})
    return 0


def _cmd_closure(args: argparse.Namespace) -> int:
    h = _load_graph(args.hypergraph)
    initial = h.set_of(_split_labels(args.initial))
    result = closure(h, initial)
    _emit(
        {
            "initial": h.labels_of(initial),
            "reached": h.labels_of(result.reached),
            "trace": list(result.firing_trace),
        }
    )
    return 0


def _cmd_plan(args: argparse.Namespace) -> int:
    h = _load_graph(args.hypergraph)
    initial = h.set_of(_split_labels(args.initial))
    goal = h.set_of(_split_labels(args.goal))
    outcome = extract_plan(h, initial, goal)
    if isinstance(outcome, Unreachable):
        _emit({"reachable": False, "missing": h.labels_of(outcome.missing)})
    else:
        _emit(
            {
                "reachable": True,
                "steps": list(outcome.steps),
                "achieved": h.labels_of(outcome.achieved),
            }
        )
    return 0


def _cmd_audit(args: argparse.Namespace) -> int:
    h = _load_graph(args.hypergraph)
    initial = h.set_of(_split_labels(args.initial))
    forbidden = h.set_of(_split_labels(args.forbidden))
    try:
        surface = safety.audit_surface(h, initial, forbidden, args.top_k)
    except safety.UnsafeStart:
        _emit({"contained": False})
        return 2
    _emit(
        {
            "contained": True,
            "safe_emergent": [
                {
                    "vertex": h.label_of(v),
                    "derivation": list(surface.certificates[v].fired),
                }
                for v in surface.safe_emergent
            ],
            "frontier": [
                {"vertex": h.label_of(v), "witness_edge": eid}
                for v, eid in surface.frontier
            ],
            "top_gains": [
                {"vertex": h.label_of(entry.vertex), "gain": entry.gain}
                for entry in surface.top_gains
            ],
        }
    )
    return 0


def _cmd_antichain(args: argparse.Namespace) -> int:
    h = _load_graph(args.hypergraph)
    forbidden = h.set_of(_split_labels(args.forbidden))
    max_card = args.max_card
    if max_card is None and MAX_CARD_ENV in os.environ:
        try:
            max_card = int(os.environ[MAX_CARD_ENV])
        except ValueError:
            raise InvalidHypergraph(
                f"{MAX_CARD_ENV} must be an integer, got {os.environ[MAX_CARD_ENV]!r}"
            ) from None
    antichain = safety.minimal_unsafe_antichain(h, forbidden, max_card=max_card, force=args.force)
    doc = safety.antichain_doc(h, antichain)
    _emit(doc)
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(doc, fh, indent=2)
            fh.write("\n")
    return 0


def _cmd_gate(args: argparse.Namespace) -> int:
    forbidden_labels, exhaustive, members = safety.parse_antichain_doc(_load_json(args.antichain))
    agents_doc = _load_json(args.agents)
    if not isinstance(agents_doc, dict) or not isinstance(agents_doc.get("agents"), list):
        raise InvalidHypergraph('agents document needs an "agents" list of label lists')
    agent_label_sets = [list(map(str, entry)) for entry in agents_doc["agents"]]

    labels = sorted(
        set(forbidden_labels)
        | {lb for member in members for lb in member}
        | {lb for agent in agent_label_sets for lb in agent}
    )
    index = {lb: i for i, lb in enumerate(labels)}
    n = len(labels)
    antichain = safety.AntichainB(
        forbidden=CapabilitySet.of(n, (index[lb] for lb in forbidden_labels)),
        sets=tuple(
            CapabilitySet.of(n, (index[lb] for lb in member)) for member in members
        ),
        exhaustive=exhaustive,
    )
    agents = [CapabilitySet.of(n, (index[lb] for lb in agent)) for agent in agent_label_sets]
    verdict = safety.coalition_gate(antichain, agents)
    if isinstance(verdict, safety.Unsafe):
        _emit({"safe": False, "witness": [labels[i] for i in verdict.witness]})
        return 2
    _emit({"safe": True})
    return 0


def _cmd_classify(args: argparse.Namespace) -> int:
    h = _load_graph(args.hypergraph)
    initial = h.set_of(_split_labels(args.initial))
    forbidden = h.set_of(_split_labels(args.forbidden))
    goal = h.index_of(args.goal)
    try:
        verdict = safety.classify_goal(
            h, initial, forbidden, goal, state_budget=args.state_budget
        )
    except safety.UnsafeStart:
        _emit({"contained": False})
        return 2
    if isinstance(verdict, safety.AlreadyReachable):
        _emit({"kind": "already_reachable"})
        return 0
    if isinstance(verdict, safety.SafelyAcquirable):
        _emit(
            {
                "kind": "safely_acquirable",
                "path": [h.label_of(v) for v in verdict.path],
            }
        )
        return 0
    if isinstance(verdict, safety.StructurallyUnsafe):
        _emit({"kind": "structurally_unsafe", "states_explored": verdict.states_explored})
        return 2
    _emit({"kind": "budget_exceeded", "states_explored": verdict.states_explored})
    return 1


def _cmd_gain(args: argparse.Namespace) -> int:
    h = _load_graph(args.hypergraph)
    initial = h.set_of(_split_labels(args.initial))
    forbidden = h.set_of(_split_labels(args.forbidden)) if args.forbidden is not None else None
    entry = discovery.marginal_gain(h, initial, h.index_of(args.vertex), forbidden)
    _emit({"vertex": h.label_of(entry.vertex), "gain": entry.gain})
    return 0


def _cmd_distance(args: argparse.Namespace) -> int:
    h = _load_graph(args.hypergraph)
    initial = h.set_of(_split_labels(args.initial))
    outcome = discovery.acquisition_distance(h, initial, h.index_of(args.goal), budget=args.budget)
    if isinstance(outcome, discovery.Exact):
        _emit({"kind": "exact", "distance": outcome.distance})
    else:
        _emit({"kind": "budget_exceeded", "budget": outcome.budget})
    return 0


def _cmd_greedy(args: argparse.Namespace) -> int:
    h = _load_graph(args.hypergraph)
    initial = h.set_of(_split_labels(args.initial))
    forbidden = h.set_of(_split_labels(args.forbidden)) if args.forbidden is not None else None
    picks = discovery.greedy_acquire(h, initial, args.k, forbidden)
    _emit(
        {
            "picks": [
                {"vertex": h.label_of(entry.vertex), "gain": entry.gain} for entry in picks
            ]
        }
    )
    return 0


def _cmd_insert_check(args: argparse.Namespace) -> int:
    h = _load_graph(args.hypergraph)
    state = dynamics.dynamic_state(h, h.set_of(_split_labels(args.initial)))
    forbidden = h.set_of(_split_labels(args.forbidden))
    tail = h.set_of(_split_labels(args.tail))
    head = h.set_of(_split_labels(args.head))
    verdict = dynamics.safe_to_insert(state, forbidden, tail, head)
    if isinstance(verdict, dynamics.InsertUnsafe):
        _emit({"safe": False, "reached_forbidden": h.labels_of(verdict.reached_forbidden)})
        return 2
    _emit({"safe": True})
    return 0


def _cmd_delete(args: argparse.Namespace) -> int:
    h = _load_graph(args.hypergraph)
    state = dynamics.dynamic_state(h, h.set_of(_split_labels(args.initial)))
    new_state = dynamics.delete_edge(state, args.edge_id)
    _emit(
        {
            "removed_edge_id": args.edge_id,
            "hypergraph": new_state.hypergraph.export(),
            "closure": new_state.hypergraph.labels_of(new_state.closure_cache.reached),
        }
    )
    return 0


def _cmd_mine(args: argparse.Namespace) -> int:
    with open(args.trajectories, "r") as fh:
        trajectories = mining.load_trajectories_jsonl(fh.read())
    candidates = mining.candidates_from_doc(_load_json(args.candidates))
    report = mining.mine_witnesses(trajectories, candidates)
    _emit(
        {
            "total": report.total,
            "conjunctive_instances": report.conjunctive_instances,
            "prevalence": report.prevalence,
            "wilson_low": report.wilson_low,
            "wilson_high": report.wilson_high,
            "candidates": [
                {"tail": list(stat.tail), "head": stat.head, "witnesses": stat.witnesses}
                for stat in report.candidates
            ],
        }
    )
    if args.report_dir:
        from .figures import render_mining_report

        render_mining_report(report, Path(args.report_dir))
    return 0


def _cmd_eval_planners(args: argparse.Namespace) -> int:
    h = _load_graph(args.hypergraph)
    instances = mining.instances_from_doc(h, _load_json(args.instances))
    report = mining.evaluate_planners(h, instances)
    _emit(
        {
            "total_instances": report.total_instances,
            "conjunctive_instances": report.conjunctive_instances,
            "workflow_violation_instances": report.workflow_violation_instances,
            "hypergraph_violation_instances": report.hypergraph_violation_instances,
            "workflow_rate": report.workflow_rate,
            "hypergraph_rate": report.hypergraph_rate,
        }
    )
    if args.report_dir:
        from .figures import render_planner_report

        render_planner_report(report, Path(args.report_dir))
    return 0


def _parse_circuit(doc: dict) -> reductions.MonotoneCircuit:
    if not isinstance(doc, dict) or not isinstance(doc.get("gates"), list):
        raise reductions.InvalidCircuit('circuit document needs a "gates" list and "output"')
    gates = []
    for entry in doc["gates"]:
        if not isinstance(entry, dict) or "kind" not in entry:
            raise reductions.InvalidCircuit('each gate needs a "kind"')
        gates.append(
            reductions.Gate(
                kind=str(entry["kind"]),
                inputs=tuple(int(i) for i in entry.get("inputs", [])),
            )
        )
    if "output" not in doc:
        raise reductions.InvalidCircuit('circuit document needs an "output" gate index')
    return reductions.MonotoneCircuit(gates=tuple(gates), output=int(doc["output"]))


def _cmd_reduce_cvp(args: argparse.Namespace) -> int:
    circuit = _parse_circuit(_load_json(args.circuit))
    try:
        assignment = [int(piece) for piece in _split_labels(args.assignment)]
    except ValueError:
        raise reductions.InvalidCircuit(
            f"assignment must be comma separated 0/1 values, got {args.assignment!r}"
        ) from None
    h, initial = reductions.cvp_to_instance(circuit, assignment)
    _emit(
        {
            "hypergraph": h.export(),
            "initial": h.labels_of(initial),
            "emergent_marker": reductions.EMERGENT_MARKER,
        }
    )
    return 0


def _cmd_reduce_transversal(args: argparse.Namespace) -> int:
    doc = _load_json(args.instance)
    if not isinstance(doc, dict):
        raise reductions.InvalidInstance("instance document must be a JSON object")
    instance = reductions.TransversalInstance(
        universe=tuple(str(lb) for lb in doc.get("universe", [])),
        hyperedges=tuple(tuple(str(lb) for lb in edge) for edge in doc.get("edges", [])),
        candidate=tuple(str(lb) for lb in doc.get("candidate", [])),
    )
    h, forbidden, candidate = reductions.transversal_to_instance(instance)
    _emit(
        {
            "hypergraph": h.export(),
            "forbidden": h.labels_of(forbidden),
            "candidate": h.labels_of(candidate),
        }
    )
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capclose",
        description="Capability hypergraph closure, planning, safety audits, and mining.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=handler)
        return p

    p = add("validate", _cmd_validate, "validate a hypergraph JSON file")
    p.add_argument("hypergraph")

    p = add("closure", _cmd_closure, "compute the closure of an initial set")
    p.add_argument("hypergraph")
    p.add_argument("--initial", required=True, help="comma separated labels, empty for none")

    p = add("plan", _cmd_plan, "extract a pruned plan for a goal set")
    p.add_argument("hypergraph")
    p.add_argument("--initial", required=True)
    p.add_argument("--goal", required=True)

    p = add("audit", _cmd_audit, "audit surface for a contained initial set")
    p.add_argument("hypergraph")
    p.add_argument("--initial", required=True)
    p.add_argument("--forbidden", required=True)
    p.add_argument("--top-k", type=int, default=5)

    p = add("antichain", _cmd_antichain, "enumerate minimal unsafe sets")
    p.add_argument("hypergraph")
    p.add_argument("--forbidden", required=True)
    p.add_argument("--max-card", type=int, default=None,
                   help=f"cardinality cap, defaults to ${MAX_CARD_ENV} or the universe size")
    p.add_argument("--force", action="store_true",
                   help="override the universe size refusal for large scans")
    p.add_argument("--out", default=None, help="also write the antichain JSON to this file")

    p = add("gate", _cmd_gate, "coalition gate against a persisted antichain")
    p.add_argument("--antichain", required=True)
    p.add_argument("--agents", required=True)

    p = add("classify", _cmd_classify, "classify a goal for a contained initial set")
    p.add_argument("hypergraph")
    p.add_argument("--initial", required=True)
    p.add_argument("--forbidden", required=True)
    p.add_argument("--goal", required=True)
    p.add_argument("--state-budget", type=int, default=100_000)

    p = add("gain", _cmd_gain, "marginal closure gain of acquiring one capability")
    p.add_argument("hypergraph")
    p.add_argument("--initial", required=True)
    p.add_argument("--vertex", required=True)
    p.add_argument("--forbidden", default=None)

    p = add("distance", _cmd_distance, "minimum acquisitions before a goal is derivable")
    p.add_argument("hypergraph")
    p.add_argument("--initial", required=True)
    p.add_argument("--goal", required=True)
    p.add_argument("--budget", type=int, default=4)

    p = add("greedy", _cmd_greedy, "greedy capability acquisition")
    p.add_argument("hypergraph")
    p.add_argument("--initial", required=True)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--forbidden", default=None)

    p = add("insert-check", _cmd_insert_check, "check a proposed edge without applying it")
    p.add_argument("hypergraph")
    p.add_argument("--initial", required=True)
    p.add_argument("--forbidden", required=True)
    p.add_argument("--tail", required=True)
    p.add_argument("--head", required=True)

    p = add("delete", _cmd_delete, "delete an edge and print the updated hypergraph")
    p.add_argument("hypergraph")
    p.add_argument("--edge-id", type=int, required=True)
    p.add_argument("--initial", default="")

    p = add("mine", _cmd_mine, "mine trajectories for conjunctive dependencies")
    p.add_argument("trajectories", help="JSON Lines trajectory file")
    p.add_argument("candidates", help="candidate rules JSON file")
    p.add_argument("--report-dir", default=None,
                   help="also write CSV and figure files into this directory")

    p = add("eval-planners", _cmd_eval_planners, "replay instances under both planners")
    p.add_argument("hypergraph")
    p.add_argument("instances")
    p.add_argument("--report-dir", default=None,
                   help="also write CSV and figure files into this directory")

    p = add("reduce-cvp", _cmd_reduce_cvp, "encode a monotone circuit evaluation")
    p.add_argument("circuit")
    p.add_argument("--assignment", required=True, help="comma separated 0/1 input values")

    p = add("reduce-transversal", _cmd_reduce_transversal, "encode a transversal instance")
    p.add_argument("instance")

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        InvalidHypergraph,
        UniverseMismatch,
        mining.MiningError,
        reductions.InvalidCircuit,
        reductions.InvalidInstance,
        safety.NonExhaustiveAntichain,
        safety.ForbiddenGoal,
        safety.UniverseTooLarge,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except json.JSONDecodeError as exc:
        print(f"error: invalid JSON: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
