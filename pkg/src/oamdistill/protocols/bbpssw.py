"""Qudit BBPSSW on mixtures of the Bell states ``|Psi_0i>``."""
from __future__ import annotations

from typing import Sequence

from ..gates import bell, bell_mixture, check_weights
from ..qudit import check_dim, fidelity
from . import twocopy
from .outcome import StepOutcome


def _coincide(u: int, v: int) -> bool:
    return u == v


def bbpssw_step_sim(q: Sequence[float], d: int, engine: str = "ensemble") -> StepOutcome:
    """One exact step: bilateral CNOT, measure targets, keep equal outcomes."""
    d = check_dim(d)
    q = check_weights(q, d)
    res = twocopy.simulate(bell_mixture(q, d), d, _coincide, engine)
    p = res.p_success
    unnorm = tuple(fidelity(res.rho, bell(0, i, d)) for i in range(len(q)))
    weights = tuple(x / p for x in unnorm)
    return StepOutcome(
        f_in=q[0],
        f_out=weights[0],
        p_success=p,
        weights_out=weights,
        engine=engine,
        p_reject=res.p_reject,
        weights_unnormalized=unnorm,
        state=res.rho,
    )
