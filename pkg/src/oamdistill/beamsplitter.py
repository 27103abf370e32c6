"""Mode-routing model of the generalized (OAM) beam splitter ``T_D``.

A configuration ``y`` lists the qudit value of the photon entering each of the
``D`` input channels. ``T_D`` sends a photon of value ``l`` entering channel
``i`` to output channel ``l - i mod D`` and leaves its value unchanged.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, NamedTuple, Sequence, Tuple

import numpy as np

from .qudit import DomainError, LinearOperator, ResourceLimitError, check_dim, check_index

MAX_ENUM_DIM = 7

OCCUPATION_ONLY = "occupation-only"
ALL_EQUAL = "all-equal"
RULES = (OCCUPATION_ONLY, ALL_EQUAL)


def route(l: int, i: int, d: int) -> int:
    """Output channel of a photon with value ``l`` entering channel ``i``."""
    check_index(l, d)
    check_index(i, d)
    return (l - i) % d


def check_config(y: Sequence[int], d: int) -> Tuple[int, ...]:
    y = tuple(int(v) for v in y)
    if len(y) != d:
        raise DomainError(f"configuration must have length {d}, got {len(y)}")
    for v in y:
        check_index(v, d)
    return y


def output_channels(y: Sequence[int]) -> Tuple[int, ...]:
    d = len(y)
    return tuple((v - c) % d for c, v in enumerate(y))


def all_occupied(y: Sequence[int]) -> bool:
    return sorted(output_channels(y)) == list(range(len(y)))


def all_equal(y: Sequence[int]) -> bool:
    return len(set(y)) == 1


def routed_values(y: Sequence[int]) -> Tuple[int, ...]:
    """Values found on output channels ``0..D-1`` after routing ``y``.

    Only defined when every output channel receives exactly one photon.
    """
    out = output_channels(y)
    if sorted(out) != list(range(len(y))):
        raise DomainError(f"configuration {tuple(y)} does not occupy every output channel")
    z = [0] * len(y)
    for c, v in zip(out, y):
        z[c] = v
    return tuple(z)


def t_as_operator(d: int) -> LinearOperator:
    """``T_D`` on (value x channel) space, built from the routing rule."""
    d = check_dim(d)
    m = np.zeros((d * d, d * d), dtype=np.complex128)
    for l in range(d):
        for i in range(d):
            m[l * d + route(l, i, d), l * d + i] = 1.0
    return LinearOperator((d, d), (d, d), m)


@dataclass(frozen=True)
class ModeSuperposition:
    """Superposition of channel configurations entering one beam splitter."""

    terms: Dict[Tuple[int, ...], complex]
    dim: int
    weight: float = 1.0

    def __post_init__(self):
        d = check_dim(self.dim)
        terms = {check_config(y, d): complex(a) for y, a in self.terms.items()}
        if self.weight < 0:
            raise DomainError("weight must be >= 0")
        object.__setattr__(self, "terms", terms)
        object.__setattr__(self, "dim", d)

    @property
    def norm2(self) -> float:
        return float(sum(abs(a) ** 2 for a in self.terms.values()))


def postselect(s: ModeSuperposition, rule: str) -> ModeSuperposition:
    """Keep the configurations passing ``rule`` and renormalize.

    ``all-equal`` is the 2D-extended mode case projector; ``occupation-only``
    is the naive generalization of the qubit four-mode case.
    """
    if rule == ALL_EQUAL:
        keep = all_equal
    elif rule == OCCUPATION_ONLY:
        keep = all_occupied
    else:
        raise DomainError(f"unknown post-selection rule {rule!r}")
    total = s.norm2
    kept = {y: a for y, a in s.terms.items() if keep(y) and a != 0}
    surv = sum(abs(a) ** 2 for a in kept.values())
    if total == 0 or surv == 0:
        return ModeSuperposition({}, s.dim, 0.0)
    scale = 1 / math.sqrt(surv)
    kept = {y: a * scale for y, a in kept.items()}
    return ModeSuperposition(kept, s.dim, s.weight * surv / total)


class ConfigCount(NamedTuple):
    count_occupied: int
    count_all_equal: int
    counterexamples: list


def config_table(d: int) -> np.ndarray:
    """All ``d**d`` configurations as rows, in lexicographic order."""
    if d > MAX_ENUM_DIM:
        raise ResourceLimitError(f"enumeration of {d}**{d} configurations exceeds guard D <= {MAX_ENUM_DIM}")
    d = check_dim(d)
    return np.indices((d,) * d).reshape(d, -1).T


def enumerate_configs(d: int) -> ConfigCount:
    """Count occupation-complete and all-equal configurations exhaustively."""
    ys = config_table(d)
    chans = (ys - np.arange(d)) % d
    occupied = (np.sort(chans, axis=1) == np.arange(d)).all(axis=1)
    equal = (ys == ys[:, :1]).all(axis=1)
    counter = [tuple(int(v) for v in row) for row in ys[occupied & ~equal]]
    return ConfigCount(int(occupied.sum()), int(equal.sum()), counter)
