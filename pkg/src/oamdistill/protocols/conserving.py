"""Distillation of the angular-momentum conserving state ``|Phi_C>``.

Two copies of ``F|Phi_C><Phi_C| + (1-F)|Psi_NC><Psi_NC|`` go through the
bilateral CNOT and survive only when both target qudits read ``0``.
"""
from __future__ import annotations

from ..gates import conserving_mixture, conserving_states
from ..qudit import check_dim, fidelity
from . import twocopy
from .outcome import StepOutcome


def _both_zero(u: int, v: int) -> bool:
    return u == 0 and v == 0


def conserving_step_sim(F: float, d: int, engine: str = "ensemble") -> StepOutcome:
    d = check_dim(d)
    phi, psi = conserving_states(d)
    res = twocopy.simulate(conserving_mixture(F, d), d, _both_zero, engine)
    p = res.p_success
    unnorm = (fidelity(res.rho, phi), fidelity(res.rho, psi))
    crossed = None
    if res.branch_mass is not None:
        crossed = float(res.branch_mass[0, 1] + res.branch_mass[1, 0])
    return StepOutcome(
        f_in=F,
        f_out=unnorm[0] / p,
        p_success=p,
        weights_out=(unnorm[0] / p, unnorm[1] / p),
        engine=engine,
        p_reject=res.p_reject,
        crossed_weight=crossed,
        weights_unnormalized=unnorm,
        state=res.rho,
    )
