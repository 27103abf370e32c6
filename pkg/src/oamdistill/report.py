"""Report rows for protocol runs and their CSV/JSON serialization."""
from __future__ import annotations

import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass
from typing import List, Optional, Sequence

from .gates import check_weights, shift_weights, two_weights
from .protocols import maps
from .protocols.bbpssw import bbpssw_step_sim
from .protocols.conserving import conserving_step_sim
from .protocols.oambs import oambs_step_sim
from .protocols.outcome import AcceptanceRule, parse_rule
from .qudit import DomainError

FIELDS = ("protocol", "D", "rule", "engine", "step", "f_in", "f_out", "p_success", "residual")
PROTOCOLS = ("bbpssw", "oambs", "conserving")
ENGINES = ("enumerate", "analytic", "both")


@dataclass(frozen=True)
class ReportRow:
    protocol: str
    D: int
    rule: str
    engine: str
    step: int
    f_in: float
    f_out: float
    p_success: float
    residual: Optional[float] = None

    def __post_init__(self):
        for name in ("f_in", "f_out", "p_success", "residual"):
            v = getattr(self, name)
            if v is not None and not math.isfinite(v):
                raise DomainError(f"{name} is not finite: {v}")
        if (self.residual is None) != (self.engine != "both"):
            raise DomainError("residual is present exactly when engine is 'both'")


def fmt(x: float) -> str:
    return format(x, ".12g")


def _rounded(x: float) -> float:
    return float(fmt(x))


def to_csv(rows: Sequence[ReportRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for r in rows:
        w.writerow(
            [
                r.protocol,
                r.D,
                r.rule,
                r.engine,
                r.step,
                fmt(r.f_in),
                fmt(r.f_out),
                fmt(r.p_success),
                "" if r.residual is None else fmt(r.residual),
            ]
        )
    return buf.getvalue()


def to_json(rows: Sequence[ReportRow]) -> str:
    out = []
    for r in rows:
        obj = asdict(r)
        for k in ("f_in", "f_out", "p_success", "residual"):
            if obj[k] is not None:
                obj[k] = _rounded(obj[k])
        out.append({k: obj[k] for k in FIELDS})
    return json.dumps(out, indent=2) + "\n"


def rows_from_json(text: str) -> List[ReportRow]:
    return [ReportRow(**obj) for obj in json.loads(text)]


def render(rows: Sequence[ReportRow], format: str = "csv") -> str:
    if not rows:
        raise DomainError("no rows to report")
    if format == "csv":
        return to_csv(rows)
    if format == "json":
        return to_json(rows)
    raise DomainError(f"unknown format {format!r}")


def emit_report(rows: Sequence[ReportRow], format: str = "csv", out=None) -> None:
    """Write ``rows`` to the path ``out``, or to the stream ``out`` (stdout if None)."""
    text = render(rows, format)
    if out is None:
        sys.stdout.write(text)
    elif hasattr(out, "write"):
        out.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _analytic(protocol: str, d: int, q, rule):
    """Closed-form (f_out, p_success, next weights) for one step."""
    if protocol == "bbpssw":
        q2 = maps.bbpssw_analytic(q)
        return q2[0], maps.bbpssw_success(q), q2
    if protocol == "conserving":
        F = q[0]
        f = maps.conserving_fidelity(F, d)
        return f, maps.conserving_success(F, d), (f, 1 - f)
    qd = maps.oambs_analytic(q, d)
    f = qd[0]
    if rule is AcceptanceRule.LITERAL:
        f = f * math.gcd(2, d) / d
    return f, maps.oambs_success(q, d, rule), qd


def _simulate(protocol: str, d: int, q, rule):
    if protocol == "bbpssw":
        o = bbpssw_step_sim(q, d)
    elif protocol == "conserving":
        o = conserving_step_sim(q[0], d)
    else:
        o = oambs_step_sim(None, d, rule, weights=q)
    return o.f_out, o.p_success, o.weights_out


def initial_weights(protocol: str, d: int, fidelity=None, weights=None):
    if (fidelity is None) == (weights is None):
        raise DomainError("give exactly one of fidelity and weights")
    if protocol == "conserving":
        if weights is not None:
            raise DomainError("the conserving protocol takes --fidelity only")
        return two_weights(fidelity)
    if weights is not None:
        return check_weights(weights, d, atol=1e-9)
    return shift_weights(fidelity, d)


def run_protocol(
    protocol: str,
    d: int,
    fidelity: Optional[float] = None,
    weights: Optional[Sequence[float]] = None,
    rule="corrected",
    engine: str = "analytic",
    steps: int = 1,
) -> List[ReportRow]:
    """Run ``steps`` successive distillation steps and return one row per step.

    Each step starts from the previous step's output weights; with
    ``engine='both'`` the simulated output is carried forward and the
    closed form is evaluated on the same input.
    """
    if protocol not in PROTOCOLS:
        raise DomainError(f"unknown protocol {protocol!r}")
    if engine not in ENGINES:
        raise DomainError(f"unknown engine {engine!r}")
    if steps < 1:
        raise DomainError("steps must be >= 1")
    rule = parse_rule(rule) if protocol == "oambs" else None
    if rule is AcceptanceRule.LITERAL and steps > 1:
        # the accepted pair carries nonzero phase labels, outside the input family
        raise DomainError("literal-coincidence output cannot seed another step")
    q = initial_weights(protocol, d, fidelity, weights)
    rows = []
    for step in range(1, steps + 1):
        residual = None
        if engine == "analytic":
            f_out, p, q_next = _analytic(protocol, d, q, rule)
        else:
            f_out, p, q_next = _simulate(protocol, d, q, rule)
            if engine == "both":
                residual = abs(f_out - _analytic(protocol, d, q, rule)[0])
        rows.append(
            ReportRow(
                protocol=protocol,
                D=d,
                rule="-" if rule is None else rule.value,
                engine=engine,
                step=step,
                f_in=float(q[0]),
                f_out=float(f_out),
                p_success=float(p),
                residual=residual,
            )
        )
        q = tuple(float(x) for x in q_next)
    return rows
