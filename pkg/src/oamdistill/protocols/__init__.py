"""Distillation protocols: exact simulations and their closed-form maps."""
from .bbpssw import bbpssw_step_sim
from .conserving import conserving_step_sim
from .maps import (
    acceleration_check,
    bbpssw_analytic,
    bbpssw_fidelity,
    bbpssw_m2,
    bbpssw_success,
    conserving_fidelity,
    conserving_success,
    fixed_points,
    iterate_map,
    oambs_analytic,
    oambs_fidelity,
    oambs_literal_fidelity,
    oambs_success,
)
from .oambs import oambs_step_sim
from .outcome import AcceptanceRule, StepOutcome, parse_rule

__all__ = [
    "AcceptanceRule",
    "StepOutcome",
    "acceleration_check",
    "bbpssw_analytic",
    "bbpssw_fidelity",
    "bbpssw_m2",
    "bbpssw_step_sim",
    "bbpssw_success",
    "conserving_fidelity",
    "conserving_step_sim",
    "conserving_success",
    "fixed_points",
    "iterate_map",
    "oambs_analytic",
    "oambs_fidelity",
    "oambs_literal_fidelity",
    "oambs_step_sim",
    "oambs_success",
    "parse_rule",
]
