"""Command-line front end: check, sat, entail, encode, graph, modelcheck, oracle."""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .alcqi import serialize_alcqi
from .encoder import NotInFragment, encode
from .model import KnowledgeBase, ModelError
from .modelcheck import (
    NoModelUpTo,
    OracleResourceExceeded,
    SatWitness,
    bounded_sat,
    check_model,
    format_interpretation,
    parse_interpretation,
)
from .owl_export import DEFAULT_IRI, InvalidIri, export_owl
from .parser import parse_kb
from .printer import format_concept, format_relation
from .projection_graph import build_signature, to_dot, node_label
from .reasoner import (
    ENTAILED,
    NOT_ENTAILED,
    OUTSIDE_FRAGMENT,
    SAT,
    UNSAT,
    analyze,
    entails,
    kb_satisfiable,
)
from .renaming import canonicalize
from .tableau import Budget

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VIOLATIONS = 2
EXIT_USAGE = 64
EXIT_NOINPUT = 66


def _read_file(path: str) -> Optional[str]:
    try:
        with open(path, encoding="utf-8") as handle:
            return handle.read()
    except OSError as exc:
        print(f"cannot read {path}: {exc}", file=sys.stderr)
        return None


def _load_kb(path: str) -> "tuple[Optional[KnowledgeBase], list]":
    text = _read_file(path)
    if text is None:
        return None, []
    kb, diags = parse_kb(text)
    for d in diags:
        print(f"{path}:{d}", file=sys.stderr)
    return kb, diags


def _budget(args) -> Budget:
    return Budget(max_nodes=args.budget_nodes, max_seconds=args.budget_secs)


def _emit(args, payload: dict, human: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(human)


def cmd_check(args) -> int:
    kb, diags = _load_kb(args.kb)
    if kb is None:
        if not diags:
            return EXIT_NOINPUT
        _emit(args, {"command": "check", "verdict": "parse-error"}, "PARSE ERROR")
        return EXIT_ERROR
    canonical, graph, report = analyze(kb)
    payload = {
        "command": "check",
        "multitree": report.multitree_ok,
        "in_fragment": report.ok,
        "violations": report.messages(),
        "nodes": len(graph.nodes),
        "edges": len(graph.edges),
    }
    human = [
        f"multitree: {'yes' if report.multitree_ok else 'no'}",
        f"fragment: {'ok' if report.ok else 'violated'}",
    ]
    human.extend("  " + m for m in report.messages())
    _emit(args, payload, "\n".join(human))
    return EXIT_OK if report.ok else EXIT_VIOLATIONS


def cmd_sat(args) -> int:
    kb, diags = _load_kb(args.kb)
    if kb is None:
        return EXIT_NOINPUT if not diags else EXIT_ERROR
    try:
        verdict = kb_satisfiable(kb, budget=_budget(args), witness_domain=0)
    except NotInFragment as exc:
        print(f"outside the decidable fragment: {exc}", file=sys.stderr)
        return EXIT_VIOLATIONS
    text = {SAT: "SAT", UNSAT: "UNSAT"}.get(verdict.status, "UNKNOWN")
    _emit(args, {"command": "sat", "verdict": text, "detail": verdict.detail}, text)
    return EXIT_OK


def _parse_axiom(kb_path: str, axiom_text: str):
    """Parse an inclusion in the context of the knowledge-base document."""
    text = _read_file(kb_path)
    if text is None:
        return None, None
    stmt = axiom_text.strip()
    if stmt.endswith("."):
        stmt = stmt[:-1]
    extended = text + f"\ntbox {stmt}.\n"
    kb, diags = parse_kb(extended)
    if kb is None:
        for d in diags:
            print(f"--axiom: {d}", file=sys.stderr)
        return None, None
    base, _ = parse_kb(text)
    axiom = kb.tbox[-1]
    return base, axiom


def cmd_entail(args) -> int:
    base, axiom = _parse_axiom(args.kb, args.axiom)
    if base is None or axiom is None:
        return EXIT_ERROR
    try:
        verdict = entails(
            base, axiom, budget=_budget(args), countermodel_domain=args.countermodel
        )
    except NotInFragment as exc:
        print(f"outside the decidable fragment: {exc}", file=sys.stderr)
        return EXIT_VIOLATIONS
    text = {
        ENTAILED: "ENTAILED",
        NOT_ENTAILED: "NOT ENTAILED",
        OUTSIDE_FRAGMENT: "QUERY OUTSIDE FRAGMENT",
    }.get(verdict.status, "UNKNOWN")
    lines = [text]
    if verdict.countermodel is not None:
        lines.append(format_interpretation(verdict.countermodel).rstrip())
    _emit(
        args,
        {"command": "entail", "verdict": text, "detail": verdict.detail},
        "\n".join(lines),
    )
    return EXIT_OK


def cmd_encode(args) -> int:
    kb, diags = _load_kb(args.kb)
    if kb is None:
        return EXIT_NOINPUT if not diags else EXIT_ERROR
    try:
        akb = encode(canonicalize(kb))
    except NotInFragment as exc:
        print(f"outside the decidable fragment: {exc}", file=sys.stderr)
        return EXIT_VIOLATIONS
    if args.alcqi:
        out = serialize_alcqi(akb)
    else:
        try:
            out = export_owl(akb, args.iri)
        except InvalidIri as exc:
            print(str(exc), file=sys.stderr)
            return EXIT_USAGE
    if args.output:
        with open(args.output, "w", encoding="utf-8") as handle:
            handle.write(out)
    else:
        sys.stdout.write(out)
    return EXIT_OK


def cmd_graph(args) -> int:
    kb, diags = _load_kb(args.kb)
    if kb is None:
        return EXIT_NOINPUT if not diags else EXIT_ERROR
    canonical = canonicalize(kb)
    graph = build_signature(canonical)
    if args.dot:
        sys.stdout.write(to_dot(graph))
        return EXIT_OK
    payload = {
        "command": "graph",
        "nodes": [node_label(n) for n in graph.nodes],
        "edges": [[node_label(a), node_label(b)] for a, b in graph.edges],
    }
    human = [f"nodes: {len(graph.nodes)}", f"edges: {len(graph.edges)}"]
    human.extend(f"  {node_label(a)} -> {node_label(b)}" for a, b in graph.edges)
    _emit(args, payload, "\n".join(human))
    return EXIT_OK


def cmd_modelcheck(args) -> int:
    kb, diags = _load_kb(args.kb)
    if kb is None:
        return EXIT_NOINPUT if not diags else EXIT_ERROR
    text = _read_file(args.model)
    if text is None:
        return EXIT_NOINPUT
    canonical = canonicalize(kb)
    try:
        interp = parse_interpretation(text, canonical)
        violations = check_model(interp, canonical)
    except (ValueError, KeyError) as exc:
        print(f"bad interpretation: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if violations:
        _emit(
            args,
            {"command": "modelcheck", "verdict": "VIOLATED", "violations": violations},
            "VIOLATED\n" + "\n".join("  " + v for v in violations),
        )
    else:
        _emit(args, {"command": "modelcheck", "verdict": "SATISFIED"}, "SATISFIED")
    return EXIT_OK


def cmd_oracle(args) -> int:
    kb, diags = _load_kb(args.kb)
    if kb is None:
        return EXIT_NOINPUT if not diags else EXIT_ERROR
    canonical = canonicalize(kb)
    result = bounded_sat(
        canonical,
        args.max_domain,
        max_structures=args.budget_nodes,
        max_seconds=args.budget_secs,
    )
    if isinstance(result, SatWitness):
        human = "SAT\n" + format_interpretation(result.interpretation).rstrip()
        payload = {"command": "oracle", "verdict": "SAT", "examined": result.examined}
    elif isinstance(result, NoModelUpTo):
        human = f"NO MODEL UP TO {result.bound}"
        payload = {
            "command": "oracle",
            "verdict": "NO-MODEL",
            "bound": result.bound,
            "examined": result.examined,
        }
    else:
        human = "RESOURCE EXCEEDED"
        payload = {"command": "oracle", "verdict": "UNKNOWN", "examined": result.examined}
    _emit(args, payload, human)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dlrpm",
        description="Compile and reason over attribute-labelled n-ary relation knowledge bases.",
    )
    parser.add_argument("--json", action="store_true", help="machine-readable verdicts")
    parser.add_argument("--budget-nodes", type=int, default=1_000_000)
    parser.add_argument("--budget-secs", type=float, default=60.0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse, canonicalize, and validate fragment membership")
    p.add_argument("kb")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sat", help="knowledge-base satisfiability")
    p.add_argument("kb")
    p.set_defaults(func=cmd_sat)

    p = sub.add_parser("entail", help="entailment of an inclusion axiom")
    p.add_argument("kb")
    p.add_argument("--axiom", required=True, help="inclusion in surface syntax")
    p.add_argument(
        "--countermodel",
        type=int,
        default=0,
        metavar="N",
        help="search for a countermodel with at most N elements",
    )
    p.set_defaults(func=cmd_entail)

    p = sub.add_parser("encode", help="translate to the target language / OWL")
    p.add_argument("kb")
    p.add_argument("-o", "--output")
    p.add_argument("--iri", default=DEFAULT_IRI)
    p.add_argument("--alcqi", action="store_true", help="emit prefix notation instead of OWL")
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("graph", help="projection signature graph")
    p.add_argument("kb")
    p.add_argument("--dot", action="store_true")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("modelcheck", help="evaluate a finite interpretation")
    p.add_argument("kb")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_modelcheck)

    p = sub.add_parser("oracle", help="bounded brute-force satisfiability")
    p.add_argument("kb")
    p.add_argument("--max-domain", type=int, default=4)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ModelError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
