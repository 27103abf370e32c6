from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

from ..qudit import DensityMatrix, DomainError


class AcceptanceRule(str, Enum):
    """How the classical outcomes of the beam-splitter step are accepted.

    Outcomes ``m`` (Alice) and ``n`` (Bob) on channels ``1..D-1`` leave the
    channel-0 pair with phase label ``s = sum(m) + sum(n) mod D``.
    """

    SUM_ZERO = "sum-zero"  # accept iff s == 0
    CORRECTED = "corrected"  # accept everything, undo s with phase_z on Alice
    LITERAL = "literal-coincidence"  # accept iff m_d == n_d for every channel


_ALIASES = {"literal": AcceptanceRule.LITERAL}


def parse_rule(rule) -> AcceptanceRule:
    if isinstance(rule, AcceptanceRule):
        return rule
    if rule in _ALIASES:
        return _ALIASES[rule]
    try:
        return AcceptanceRule(rule)
    except ValueError:
        raise DomainError(f"unknown acceptance rule {rule!r}") from None


@dataclass(frozen=True)
class StepOutcome:
    """Result of one simulated or analytic distillation step.

    ``weights_out`` are normalized output weights (Bell shift labels, or
    ``(Phi_C, Psi_NC)`` for the conserving family); ``weights_unnormalized``
    are the same times ``p_success``. ``p_reject`` aggregates every discarded
    branch, so ``p_success + p_reject`` is the total input mass.
    """

    f_in: float
    f_out: float
    p_success: float
    weights_out: Tuple[float, ...]
    engine: str
    rule: Optional[AcceptanceRule] = None
    p_reject: Optional[float] = None
    crossed_weight: Optional[float] = None
    weights_unnormalized: Tuple[float, ...] = ()
    state: Optional[DensityMatrix] = field(default=None, repr=False, compare=False)
