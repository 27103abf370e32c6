"""Closed-form recursion maps, fixed points and the acceleration identity.

Every map here is written with plain arithmetic so it works unchanged on
``fractions.Fraction`` inputs; exact evaluation is what the fixed-point tests use.
"""
from __future__ import annotations

from math import gcd
from typing import List, Sequence, Tuple

from ..qudit import DomainError
from .outcome import AcceptanceRule, parse_rule


def _check_F(F) -> None:
    if not 0 <= F <= 1:
        raise DomainError(f"fidelity must lie in [0, 1], got {F}")


def _check_d(d: int) -> int:
    if int(d) != d or d < 2:
        raise DomainError(f"qudit dimension must be an integer >= 2, got {d}")
    return int(d)


def _power_weights(q: Sequence, power: int) -> Tuple:
    if any(x < 0 for x in q):
        raise DomainError(f"weights must be nonnegative: {tuple(q)}")
    powered = [x**power for x in q]
    total = sum(powered)
    if total == 0:
        raise DomainError("weight vector is all zero")
    return tuple(x / total for x in powered)


def bbpssw_analytic(q: Sequence) -> Tuple:
    """``q_i -> q_i**2 / sum_j q_j**2``."""
    return _power_weights(q, 2)


def bbpssw_fidelity(F, d: int):
    """Two-pair recursion on the isotropic-within-family mixture."""
    _check_F(F)
    d = _check_d(d)
    return F**2 / (F**2 + (1 - F) ** 2 / (d - 1))


def bbpssw_m2(F):
    """Two-pair recursion on a mixture of two Bell states."""
    _check_F(F)
    return F**2 / (F**2 + (1 - F) ** 2)


def bbpssw_success(q: Sequence):
    return sum(x**2 for x in q)


def oambs_analytic(q: Sequence, d: int) -> Tuple:
    """``q_i -> q_i**d / sum_j q_j**d``: the d-pair beam-splitter recursion."""
    return _power_weights(q, _check_d(d))


def oambs_fidelity(F, d: int):
    _check_F(F)
    d = _check_d(d)
    return F**d / (F**d + (d - 1) * ((1 - F) / (d - 1)) ** d)


def oambs_success(q: Sequence, d: int, rule="corrected"):
    """Accepted probability mass of one beam-splitter step.

    EMC survival is ``d**(1-d)`` per non-crossed branch; sum-zero accepts one
    outcome class in ``d``, literal coincidence one tuple in ``d**(d-1)``.
    """
    d = _check_d(d)
    rule = parse_rule(rule)
    emc = sum(x**d for x in q) / d ** (d - 1)
    if rule is AcceptanceRule.CORRECTED:
        return emc
    if rule is AcceptanceRule.SUM_ZERO:
        return emc / d
    return emc / d ** (d - 1)


def oambs_literal_fidelity(F, d: int):
    """Output fidelity under literal channel-by-channel coincidence.

    Accepted tuples have ``m == n`` so the leftover phase label is ``2*sum(m)``,
    which is zero for a fraction ``gcd(2, d)/d`` of them.
    """
    return oambs_fidelity(F, d) * gcd(2, d) / d


def conserving_fidelity(F, d: int):
    """Conserving-state recursion; the same function as :func:`bbpssw_fidelity`."""
    return bbpssw_fidelity(F, d)


def conserving_success(F, d: int):
    _check_F(F)
    d = _check_d(d)
    return F**2 / d + (1 - F) ** 2 / (d * (d - 1))


def fixed_points(d: int) -> Tuple[float, float, float]:
    """Fixed points ``0`` (stable), ``1/d`` (unstable) and ``1`` (stable)."""
    d = _check_d(d)
    return (0.0, 1 / d, 1.0)


MAPS = {
    "bbpssw-eq8": bbpssw_fidelity,
    "oambs-eq12": oambs_fidelity,
}


def iterate_map(name: str, F0, d: int, k: int) -> List:
    """Trajectory ``[F0, F1, ..., Fk]`` of one of the fidelity maps."""
    try:
        f = MAPS[name]
    except KeyError:
        raise DomainError(f"unknown map {name!r}; choose from {sorted(MAPS)}") from None
    if k < 1:
        raise DomainError("k must be >= 1")
    traj = [F0]
    for _ in range(k):
        traj.append(f(traj[-1], d))
    return traj


def odds_bbpssw(r, d: int):
    """The two-pair map on the odds ratio ``r = (1-F)/F``."""
    return r**2 / (d - 1)


def odds_oambs(r, d: int):
    return r**d / (d - 1) ** (d - 1)


def acceleration_check(F, k: int):
    """One beam-splitter step at ``d = 2**k`` against ``k`` two-pair steps.

    Returns ``(lhs, rhs)``; the two agree because ``k`` squarings of the odds
    ratio give ``r**(2**k)`` with denominator ``(d-1)**(2**k - 1)``.
    """
    if not 1 <= k <= 3:
        raise DomainError("k must be in [1, 3]")
    d = 2**k
    lhs = oambs_fidelity(F, d)
    rhs = iterate_map("bbpssw-eq8", F, d, k)[-1]
    return lhs, rhs
