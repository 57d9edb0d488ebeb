"""Command-line front end.

Exit codes: 0 success, 1 verified failure (failure witness or failed
check), 2 usage or input errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import adversary as adv
from .algo_zoo import ALGORITHM_IDS, resolve
from .canon_order import check_homogeneity
from .covers import factor_graph, random_simple_lift, universal_cover_ball
from .errors import InconsistentOutputs, InvalidOutput, LbxError, ModelMismatch, ParseError
from .fracmatch import check_maximal_fm, decode_fm, encode_fm
from .graph_core import decode_graph, encode_graph, graph_doc, make_graph
from .locality import assemble_fm, neighborhood
from .reports import render_report
from .simulations import ec_to_po, po_to_oi, ramsey_search, verify_order_invariance_on


class UsageError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _read_json(path: str):
    try:
        return json.loads(_read(path))
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"{path}: line {exc.lineno}, column {exc.colno}") from None


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _node(text: str):
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"node ids are integers, got {text!r}") from None


# -- verbs -----------------------------------------------------------------

def cmd_adversary(args) -> int:
    A = resolve(args.algo)
    result = adv.run_adversary(A, args.delta, max_delta=args.max_delta)
    if isinstance(result, adv.FailureWitness):
        doc = result.doc()
        doc["algorithm"] = A.name
        Path(args.out or "failure-witness.json").write_text(json.dumps(doc, indent=2) + "\n")
        sys.stdout.write(render_report(result))
        return 1
    Path(args.out or "cert.json").write_text(result.encode())
    sys.stdout.write(render_report(result))
    return 0


def cmd_verify_cert(args) -> int:
    doc = _read_json(args.cert)
    if "violation" in doc:
        A = resolve(args.algo or doc.get("algorithm", ""))
        ok = adv.verify_failure(A, doc)
        sys.stdout.write(f"failure witness: {'confirmed' if ok else 'NOT confirmed'}\n")
        # a confirmed witness is a verified failure of the algorithm
        return 1 if ok else 2
    cert = adv.certificate_from_doc(doc)
    A = resolve(args.algo or cert.algorithm)
    for pair, (_, checks) in zip(cert.pairs, adv.verify_certificate(A, cert)):
        pair.checks = checks
    sys.stdout.write(render_report(cert))
    complete = len(cert.pairs) == cert.delta - 1
    ok = complete and all(all(p.checks.values()) for p in cert.pairs)
    if not complete:
        sys.stdout.write(f"incomplete: expected {cert.delta - 1} pairs\n")
    return 0 if ok else 1


def cmd_verify_fm(args) -> int:
    g = decode_graph(_read(args.graph))
    y = decode_fm(g, _read(args.fm))
    report = check_maximal_fm(g, y)
    sys.stdout.write(render_report(report))
    return 0 if report.ok else 1


def cmd_run(args) -> int:
    A = resolve(args.algo)
    g = decode_graph(_read(args.graph))
    y = assemble_fm(A, g)
    if args.out:
        Path(args.out).write_text(encode_fm(y))
    else:
        sys.stdout.write(encode_fm(y))
    report = check_maximal_fm(g, y)
    sys.stdout.write(render_report(report))
    return 0 if report.ok else 1


def cmd_factor(args) -> int:
    g = decode_graph(_read(args.graph))
    F, m = factor_graph(g)
    _emit(encode_graph(F), args.out)
    if args.map_out:
        Path(args.map_out).write_text(m.encode())
    return 0


def cmd_cover(args) -> int:
    g = decode_graph(_read(args.graph))
    v = _node(args.node)
    if g.model in ("EC", "PO"):
        ball = universal_cover_ball(g, v, args.radius).materialize()
    else:
        ball = neighborhood(g, v, args.radius)
    doc = {"root": ball.root, "radius": ball.radius, "graph": graph_doc(ball.graph)}
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def cmd_lift(args) -> int:
    g = decode_graph(_read(args.graph))
    H, m = random_simple_lift(g, args.copies, args.seed)
    _emit(encode_graph(H), args.out)
    if args.map_out:
        Path(args.map_out).write_text(m.encode())
    return 0


def cmd_order_check(args) -> int:
    report = check_homogeneity(args.d, args.radius, args.trials, seed=args.seed, tamper=args.tamper)
    sys.stdout.write(render_report(report))
    return 0 if report.ok else 1


def cmd_simulate(args) -> int:
    A = resolve(args.algo)
    g = decode_graph(_read(args.graph))
    if args.chain == "ec-po-oi":
        sim = ec_to_po(po_to_oi(A))
    elif args.chain == "ec-po":
        sim = ec_to_po(A)
    elif args.chain == "po-oi":
        sim = po_to_oi(A)
    else:  # pragma: no cover - argparse restricts choices
        raise UsageError(f"unknown chain {args.chain}")
    if g.model != sim.model:
        raise ModelMismatch(f"chain {args.chain} runs on {sim.model} graphs, input is {g.model}")
    y = assemble_fm(sim, g)
    if args.out:
        Path(args.out).write_text(encode_fm(y))
    report = check_maximal_fm(g, y)
    sys.stdout.write(f"simulated: {sim.name}\n")
    sys.stdout.write(render_report(report))
    return 0 if report.ok else 1


def cmd_ramsey(args) -> int:
    A = resolve(args.algo)
    pattern = make_graph("EC", [(i, i + 1, 1 + i % 2) for i in range(args.pattern_nodes - 1)],
                         nodes=range(args.pattern_nodes), k=2)
    universe = list(range(1, args.universe + 1))
    found = ramsey_search(A, pattern, universe, args.q)
    if found is None:
        sys.stdout.write("subset: none\n")
        return 1
    bad = verify_order_invariance_on(A, pattern, found)
    sys.stdout.write(f"subset: {found}\nre-verification: {len(bad)} order-inconsistent outputs\n")
    return 0 if not bad else 1


# -- parser ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lbx", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="verb", required=True, metavar="verb")
    algo_help = "algorithm id, one of: " + ", ".join(ALGORITHM_IDS)

    s = sub.add_parser("adversary", help="run the unfold-and-mix adversary")
    s.add_argument("--delta", type=int, required=True)
    s.add_argument("--algo", required=True, help=algo_help)
    s.add_argument("--out", help="output path (default cert.json or failure-witness.json)")
    s.add_argument("--max-delta", type=int, default=None, help="override the delta guardrail")
    s.set_defaults(func=cmd_adversary)

    s = sub.add_parser("verify-cert", help="re-verify a certificate or failure witness")
    s.add_argument("cert")
    s.add_argument("--algo", help="override the algorithm recorded in the file")
    s.set_defaults(func=cmd_verify_cert)

    s = sub.add_parser("verify-fm", help="check feasibility and maximality of an FM")
    s.add_argument("graph")
    s.add_argument("fm")
    s.set_defaults(func=cmd_verify_fm)

    s = sub.add_parser("run", help="run an algorithm on a graph and check its output")
    s.add_argument("--algo", required=True, help=algo_help)
    s.add_argument("graph")
    s.add_argument("--out")
    s.set_defaults(func=cmd_run)

    s = sub.add_parser("factor", help="compute the factor graph")
    s.add_argument("graph")
    s.add_argument("--out")
    s.add_argument("--map-out")
    s.set_defaults(func=cmd_factor)

    s = sub.add_parser("cover", help="materialize a universal-cover ball")
    s.add_argument("graph")
    s.add_argument("--node", required=True)
    s.add_argument("--radius", type=int, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_cover)

    s = sub.add_parser("lift", help="build a simple random lift")
    s.add_argument("graph")
    s.add_argument("--copies", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out")
    s.add_argument("--map-out")
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("order-check", help="homogeneity of the canonical tree order")
    s.add_argument("--d", type=int, required=True)
    s.add_argument("--radius", type=int, required=True)
    s.add_argument("--trials", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tamper", action="store_true", help="negative control: corrupt the order")
    s.set_defaults(func=cmd_order_check)

    s = sub.add_parser("simulate", help="run a model-simulation chain")
    s.add_argument("--chain", choices=["ec-po-oi", "ec-po", "po-oi"], required=True)
    s.add_argument("--algo", required=True, help=algo_help)
    s.add_argument("graph")
    s.add_argument("--out")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("ramsey", help="finite Ramsey search for order invariance")
    s.add_argument("--algo", required=True, help=algo_help)
    s.add_argument("--universe", type=int, required=True)
    s.add_argument("--q", type=int, required=True)
    s.add_argument("--pattern-nodes", type=int, default=1)
    s.set_defaults(func=cmd_ramsey)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return args.func(args)
    except (UsageError, ParseError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (InconsistentOutputs, InvalidOutput) as exc:
        # the algorithm itself misbehaved: a verified failure, not a usage error
        sys.stderr.write(f"failure: {type(exc).__name__}: {exc}\n")
        return 1
    except LbxError as exc:
        sys.stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
