"""Report assembly: one payload, rendered as JSON or text."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Any

from .analysis import (
    ConsistencyCheck,
    ConsistencyReport,
    IndependenceReport,
    MinimaReport,
    NeededClassification,
    ReproveTrace,
)
from .engines import EngineVerdict
from .tptp import SignatureEntry, Theory


def verdict_to_dict(v: EngineVerdict, theory: Theory | None = None) -> dict:
    used = list(v.used_premises)
    if theory is not None:
        order = {name: i for i, name in enumerate(theory.premise_names)}
        used.sort(key=lambda n: order.get(n, len(order)))
    else:
        used.sort()
    return {
        "engine": v.engine_id,
        "status": v.status.value,
        "used_premises": used,
        "has_premise_info": v.has_premise_info,
        "raw_output_digest": v.raw_output_digest,
        "elapsed_seconds": round(v.elapsed, 6),
    }


def signature_to_dict(entries: list[SignatureEntry]) -> list[dict]:
    return [
        {
            "symbol": e.symbol,
            "kind": e.kind,
            "arity": e.arity,
            "occurrences": e.occurrence_count,
            "occurring_in": list(e.occurring_in),
        }
        for e in entries
    ]


def _ordered(names, theory: Theory) -> list[str]:
    order = {name: i for i, name in enumerate(theory.premise_names)}
    return sorted(names, key=lambda n: order.get(n, len(order)))


def trace_to_dict(trace: ReproveTrace, theory: Theory) -> dict:
    return {
        "stages": [
            {"premises": list(premises), "verdict": verdict_to_dict(v, theory)}
            for premises, v in trace.stages
        ],
        "fixpoint_reached": trace.fixpoint_reached,
    }


def classification_to_dict(cls: NeededClassification, theory: Theory) -> dict:
    return {
        "needed": _ordered(cls.needed, theory),
        "eliminable": _ordered(cls.eliminable, theory),
        "unknown": _ordered(cls.unknown, theory),
        "approximate": cls.approximate,
    }


def minima_to_dict(report: MinimaReport, theory: Theory) -> dict:
    return {
        "minima": [_ordered(m, theory) for m in report.minima],
        "exhaustive": report.exhaustive,
        "budget_spent": report.budget_spent,
    }


def independence_to_dict(report: IndependenceReport, theory: Theory) -> dict:
    witness = None
    if report.witness is not None:
        witness = {
            "axiom": report.witness[0],
            "subset": _ordered(report.witness[1], theory),
        }
    return {
        "verdict": report.verdict.value,
        "witness": witness,
        "per_axiom": {name: ent.value for name, ent in report.per_axiom.items()},
    }


def consistency_check_to_dict(check: ConsistencyCheck) -> dict:
    return {
        "label": check.label,
        "engine": check.engine_id,
        "outcome": check.outcome,
        "reading": check.reading,
        "budget_seconds": check.budget,
        "domain_size": check.domain_size,
        "exhausted_size": check.exhausted_size,
        "model": check.model_tables,
        "model_text": check.model_text,
    }


def consistency_to_dict(report: ConsistencyReport) -> dict:
    return {
        "axioms_only": consistency_check_to_dict(report.axioms_only),
        "axioms_plus_conjecture": (
            consistency_check_to_dict(report.axioms_plus_conjecture)
            if report.axioms_plus_conjecture
            else None
        ),
        "axioms_plus_negated_conjecture": (
            consistency_check_to_dict(report.axioms_plus_negated_conjecture)
            if report.axioms_plus_negated_conjecture
            else None
        ),
    }


@dataclass
class Report:
    command: str
    problem: str
    theory_summary: dict
    engines: list[str]
    config: dict
    payload: dict
    extended_statuses: list[str]
    engine_calls: int
    elapsed_seconds: float

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "problem": self.problem,
            "theory": self.theory_summary,
            "engines": self.engines,
            "config": self.config,
            "payload": self.payload,
            "extended_statuses": self.extended_statuses,
            "engine_calls": self.engine_calls,
            "elapsed_seconds": round(self.elapsed_seconds, 6),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def to_text(self) -> str:
        return render_text(self.to_dict())


def theory_summary(t: Theory) -> dict:
    return {
        "premise_count": len(t.premises),
        "premise_names": list(t.premise_names),
        "conjecture": t.conjecture.name if t.conjecture else None,
    }


# ---------------------------------------------------------------------------
# Text rendering (derived from the same payload dictionaries)


def _verdict_line(v: dict) -> str:
    used = f" used={','.join(v['used_premises'])}" if v["used_premises"] else ""
    return f"{v['status']} [{v['engine']}]{used}"


def render_text(report: dict) -> str:
    lines: list[str] = []
    theory = report["theory"]
    conj = theory["conjecture"] or "(none)"
    lines.append(f"command: {report['command']}  problem: {report['problem']}")
    lines.append(
        f"theory: {theory['premise_count']} premises, conjecture {conj}"
    )
    payload: dict[str, Any] = report["payload"]
    cmd = report["command"]
    if cmd == "symbols":
        lines.append("signature:")
        for e in payload["signature"]:
            lines.append(
                f"  {e['symbol']}/{e['arity']} {e['kind']}: "
                f"{e['occurrences']} occurrence(s) in {','.join(e['occurring_in'])}"
            )
        if payload["hapax"]:
            lines.append("hapax legomena (possible typos):")
            for e in payload["hapax"]:
                lines.append(
                    f"  {e['symbol']}/{e['arity']} occurs once, in {e['occurring_in'][0]}"
                )
        else:
            lines.append("hapax legomena: none")
    elif cmd in ("reprove", "minimize"):
        lines.append(f"method: {payload['method']}")
        lines.append(f"initial verdict: {_verdict_line(payload['initial'])}")
        for trace in payload.get("traces", []):
            lines.append(f"syntactic trace [{trace['engine']}]:")
            for stage in trace["trace"]["stages"]:
                lines.append(
                    f"  {len(stage['premises'])} premises -> {_verdict_line(stage['verdict'])}"
                )
            lines.append(f"  fixpoint reached: {trace['trace']['fixpoint_reached']}")
        cls = payload.get("classification")
        if cls:
            lines.append(
                f"needed ({len(cls['needed'])}): {', '.join(cls['needed']) or '(none)'}"
            )
            lines.append(
                f"eliminable ({len(cls['eliminable'])}): {', '.join(cls['eliminable']) or '(none)'}"
            )
            if cls["unknown"]:
                lines.append(
                    f"unknown ({len(cls['unknown'])}): {', '.join(cls['unknown'])} (classification approximate)"
                )
            lines.append(f"confirmation: {payload['confirmation']}")
        minima = payload.get("minima")
        if minima:
            lines.append(
                f"minima ({len(minima['minima'])}; exhaustive={minima['exhaustive']}):"
            )
            for m in minima["minima"]:
                lines.append(f"  {{{', '.join(m)}}}")
    elif cmd == "independence":
        lines.append(f"method: {payload['method']}")
        lines.append(f"verdict: {payload['verdict']}")
        if payload["witness"]:
            w = payload["witness"]
            subset = ", ".join(w["subset"]) or "(empty)"
            lines.append(f"witness: {w['axiom']} derivable from {{{subset}}}")
        per = payload.get("per_axiom", {})
        if per:
            lines.append("per-axiom (others derive it?):")
            for name, ent in per.items():
                lines.append(f"  {name}: {ent}")
    elif cmd == "consistency":
        for key in (
            "axioms_only",
            "axioms_plus_conjecture",
            "axioms_plus_negated_conjecture",
        ):
            check = payload.get(key)
            if not check:
                continue
            lines.append(f"{check['label']}: {check['outcome']} - {check['reading']}")
            if check.get("model_text"):
                for line in check["model_text"].splitlines():
                    lines.append(f"    {line}")
    if report["extended_statuses"]:
        lines.append("extended statuses: " + ", ".join(report["extended_statuses"]))
    lines.append(
        f"engine calls: {report['engine_calls']}  elapsed: {report['elapsed_seconds']:.2f}s"
    )
    return "\n".join(lines) + "\n"
