"""Plain-text rendering of reports; one line per check, stable order."""
from __future__ import annotations

from .adversary import FailureWitness, LowerBoundCertificate
from .canon_order import HomogeneityReport
from .fracmatch import MaximalityReport
from .simulations import CheckReport


def _yes(flag: bool) -> str:
    return "yes" if flag else "no"


def _render_certificate(cert: LowerBoundCertificate) -> list:
    lines = [f"algorithm: {cert.algorithm}", f"delta: {cert.delta}"]
    passed = 0
    for p in cert.pairs:
        ok = bool(p.checks) and all(p.checks.values())
        passed += ok
        detail = ", ".join(f"{k}={'ok' if v else 'FAIL'}" for k, v in p.checks.items())
        lines.append(f"pair {p.i}: c={p.c} g={p.g} h={p.h} |G|={len(p.G.nodes)} |H|={len(p.H.nodes)} {detail}")
    lines.append(f"pairs: {passed}/{len(cert.pairs)} verified; min runtime ≥ {cert.min_runtime}")
    return lines


def _render_failure(w: FailureWitness) -> list:
    v = w.violation
    lines = [f"failure: {v['kind']}"]
    if v["kind"] == "UnsaturatedEdge":
        lines.append(f"edge: {v['u']}-{v['v']} color {v['color']} (y[u]={v['y_u']}, y[v]={v['y_v']})")
    else:
        lines.append(f"node: {v['node']} (y={v['y']})")
    lines.append(f"preimage of: {v['preimage_of']}")
    lines.append(f"simple lift: {len(w.graph.nodes)} nodes, {len(w.graph.edges)} edges; source {w.source}")
    return lines


def _render_maximality(r: MaximalityReport) -> list:
    lines = [f"feasible: {_yes(r.feasible)}", f"maximal: {_yes(r.maximal)}",
             f"saturated: {len(r.saturated)}"]
    lines += [f"violation: {kind} at {x}" for kind, x in r.violations]
    return lines


def render_report(report) -> str:
    """Deterministic text for any report object; empty input renders as ''."""
    if report is None or report == {} or report == []:
        return ""
    if isinstance(report, LowerBoundCertificate):
        lines = _render_certificate(report)
    elif isinstance(report, FailureWitness):
        lines = _render_failure(report)
    elif isinstance(report, MaximalityReport):
        lines = _render_maximality(report)
    elif isinstance(report, HomogeneityReport):
        lines = [f"homogeneity d={report.d} r={report.r}: {'pass' if report.ok else 'fail'}"
                 f" ({len(report.checked)} pairs checked)"]
        if report.violation:
            lines.append(f"violation: {report.violation}")
    elif isinstance(report, CheckReport):
        lines = [f"{report.check}: {report.status}"]
        lines += [f"{k}: {v}" for k, v in sorted(report.stats.items())]
        if report.counterexample:
            lines += [f"counterexample.{k}: {v}" for k, v in report.counterexample.items()]
    elif isinstance(report, dict):
        lines = [f"{k}: {v}" for k, v in report.items()]
    else:
        lines = [str(report)]
    return "\n".join(lines) + "\n"
