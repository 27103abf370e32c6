"""Qudit gates and the named two-qudit states used by the protocols."""
from __future__ import annotations

import sys
from typing import Sequence, Tuple

import numpy as np

from .qudit import (
    ATOL,
    DomainError,
    LinearOperator,
    PureState,
    WeightedEnsemble,
    apply_local,
    check_dim,
    check_index,
)


def _roots(d: int, exponents) -> np.ndarray:
    # Reduce exponents mod d first so equal phases are bit-identical.
    return np.exp(2j * np.pi * (np.asarray(exponents) % d) / d)


def cnot_operator(d: int) -> LinearOperator:
    """Qudit CNOT ``|i>|j> -> |i>|i - j mod d>``."""
    d = check_dim(d)
    m = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            m[i * d + (i - j) % d, i * d + j] = 1.0
    return LinearOperator((d, d), (d, d), m)


def qft_operator(d: int) -> LinearOperator:
    d = check_dim(d)
    y, k = np.indices((d, d))
    return LinearOperator((d,), (d,), _roots(d, k * y) / np.sqrt(d))


def phase_z(d: int, s: int) -> LinearOperator:
    """Diagonal ``|y> -> exp(-2 pi i s y / d)|y>``; sends Psi_{s j} to Psi_{0 j}."""
    d = check_dim(d)
    y = np.arange(d)
    return LinearOperator((d,), (d,), np.diag(_roots(d, -(s % d) * y)))


def bell(k: int, j: int, d: int) -> PureState:
    """Generalized Bell state ``(1/sqrt d) sum_y w^(k y) |y>|y - j>``."""
    d = check_dim(d)
    check_index(k, d)
    check_index(j, d)
    amps = np.zeros(d * d, dtype=np.complex128)
    for y in range(d):
        amps[y * d + (y - j) % d] = _roots(d, k * y) / np.sqrt(d)
    return PureState((d, d), amps)


def shift_weights(F: float, d: int) -> Tuple[float, ...]:
    """Weights ``(F, (1-F)/(d-1), ...)`` of the isotropic-within-family mixture."""
    if not 0 <= F <= 1:
        raise DomainError(f"fidelity must lie in [0, 1], got {F}")
    # a d-tuple costs no memory worth guarding; only d >= 2 is enforced
    d = check_dim(d, max_dim=sys.maxsize)
    rest = (1 - F) / (d - 1)
    return (F,) + (rest,) * (d - 1)


def two_weights(F: float) -> Tuple[float, float]:
    if not 0 <= F <= 1:
        raise DomainError(f"fidelity must lie in [0, 1], got {F}")
    return (F, 1 - F)


def check_weights(q: Sequence[float], d: int | None = None, atol: float = ATOL) -> Tuple[float, ...]:
    q = tuple(float(x) for x in q)
    if not q:
        raise DomainError("weight vector is empty")
    if any(x < 0 for x in q):
        raise DomainError(f"weights must be nonnegative: {q}")
    if abs(sum(q) - 1) > atol:
        raise DomainError(f"weights must sum to 1, got {sum(q)}")
    if d is not None and len(q) > d:
        raise DomainError(f"{len(q)} weights given but only {d} shift labels exist")
    return q


def bell_mixture(q: Sequence[float], d: int) -> WeightedEnsemble:
    """Ensemble ``{(q_i, |Psi_0i>)}``."""
    d = check_dim(d)
    q = check_weights(q, d)
    return WeightedEnsemble(tuple(bell(0, i, d).with_weight(w) for i, w in enumerate(q)))


def conserving_states(d: int) -> Tuple[PureState, PureState]:
    """Return ``(|Phi_C>, |Psi_NC>)``.

    ``|Phi_C>`` pairs value ``i`` with ``d-1-i`` (zero total angular momentum);
    ``|Psi_NC>`` is the uniform superposition over all other pairs.
    """
    d = check_dim(d)
    phi = np.zeros(d * d, dtype=np.complex128)
    psi = np.zeros(d * d, dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            if j == d - 1 - i:
                phi[i * d + j] = 1 / np.sqrt(d)
            else:
                psi[i * d + j] = 1 / np.sqrt(d * (d - 1))
    return PureState((d, d), phi), PureState((d, d), psi)


def conserving_mixture(F: float, d: int) -> WeightedEnsemble:
    if not 0 <= F <= 1:
        raise DomainError(f"fidelity must lie in [0, 1], got {F}")
    phi, psi = conserving_states(d)
    return WeightedEnsemble((phi.with_weight(F), psi.with_weight(1 - F)))


def bilateral_cnot(s: PureState, alice_pair: Tuple[int, int], bob_pair: Tuple[int, int]) -> PureState:
    """CNOT on Alice's (control, target) factors and on Bob's (control, target)."""
    idx = tuple(alice_pair) + tuple(bob_pair)
    if len(idx) != 4 or len(set(idx)) != 4:
        raise DomainError(f"bilateral CNOT needs four distinct factors, got {idx}")
    if not all(0 <= i < s.n_factors for i in idx):
        raise DomainError(f"factor index out of range in {idx}")
    d = s.dims[idx[0]]
    op = cnot_operator(d)
    s = apply_local(op, s, alice_pair)
    return apply_local(op, s, bob_pair)
