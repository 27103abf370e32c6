"""Two-pair recurrence: bilateral CNOT, measure the target pair, post-select.

Register order is ``a1 b1 a2 b2``: pair 1 is the source (controls), pair 2 the
target. Two engines are provided. ``ensemble`` pushes each pure product branch
through :func:`bilateral_cnot`; ``density`` builds the 4-party density matrix
and a global permutation matrix from explicit index maps. They share no code
past the pair ensemble, so each checks the other.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..gates import bilateral_cnot
from ..qudit import (
    DensityMatrix,
    DomainError,
    ResourceLimitError,
    WeightedEnsemble,
    ensemble_to_dm,
    partial_trace,
    tensor,
)

MAX_TWOCOPY_DIM = 6

Accept = Callable[[int, int], bool]


@dataclass(frozen=True)
class TwoCopyResult:
    rho: DensityMatrix  # unnormalized surviving source-pair state
    p_success: float
    p_reject: float
    # accepted mass per (branch, branch) label pair; None for the density engine
    branch_mass: Optional[np.ndarray]


def _guard(d: int) -> None:
    if d > MAX_TWOCOPY_DIM:
        raise ResourceLimitError(f"two-pair simulation supports D <= {MAX_TWOCOPY_DIM}, got {d}")


def simulate_ensemble(pair: WeightedEnsemble, d: int, accept: Accept) -> TwoCopyResult:
    _guard(d)
    n = len(pair.branches)
    mass = np.zeros((n, n))
    rho = np.zeros((d * d, d * d), dtype=np.complex128)
    p_rej = 0.0
    for (i, bi), (j, bj) in itertools.product(enumerate(pair.branches), repeat=2):
        w = bi.weight * bj.weight
        if w == 0:
            continue
        state = bilateral_cnot(tensor(bi.normalized(), bj.normalized()), (0, 2), (1, 3))
        t = state.tensor_view()
        for u in range(d):
            for v in range(d):
                vec = t[:, :, u, v].reshape(-1)
                p = float(np.vdot(vec, vec).real)
                if accept(u, v):
                    mass[i, j] += w * p
                    rho += w * np.outer(vec, vec.conj())
                else:
                    p_rej += w * p
    p_acc = float(mass.sum())
    return TwoCopyResult(DensityMatrix((d, d), rho), p_acc, p_rej, mass)


def global_bcnot(d: int) -> np.ndarray:
    """Permutation matrix of the bilateral CNOT on ``a1 b1 a2 b2``."""
    size = d**4
    u = np.zeros((size, size))
    for a1, b1, a2, b2 in itertools.product(range(d), repeat=4):
        src = ((a1 * d + b1) * d + a2) * d + b2
        dst = ((a1 * d + b1) * d + (a1 - a2) % d) * d + (b1 - b2) % d
        u[dst, src] = 1.0
    return u


def simulate_density(pair: WeightedEnsemble, d: int, accept: Accept) -> TwoCopyResult:
    _guard(d)
    rho_pair = ensemble_to_dm(pair).entries
    u = global_bcnot(d)
    rho = u @ np.kron(rho_pair, rho_pair) @ u.T
    t = rho.reshape((d,) * 8)
    acc = np.zeros((d,) * 8, dtype=np.complex128)
    p_rej = 0.0
    for a2 in range(d):
        for b2 in range(d):
            block = t[:, :, a2, b2, :, :, a2, b2]
            if accept(a2, b2):
                acc[:, :, a2, b2, :, :, a2, b2] = block
            else:
                p_rej += float(np.einsum("ijij->", block).real)
    full = DensityMatrix((d,) * 4, acc.reshape(d**4, d**4))
    reduced = partial_trace(full, {0, 1})
    return TwoCopyResult(reduced, reduced.trace, p_rej, None)


ENGINES = {"ensemble": simulate_ensemble, "density": simulate_density}


def simulate(pair: WeightedEnsemble, d: int, accept: Accept, engine: str = "ensemble") -> TwoCopyResult:
    try:
        fn = ENGINES[engine]
    except KeyError:
        raise DomainError(f"unknown engine {engine!r}; choose from {sorted(ENGINES)}") from None
    return fn(pair, d, accept)
