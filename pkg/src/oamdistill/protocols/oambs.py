"""Single-step distillation with two generalized beam splitters.

Alice and Bob share ``D`` pairs; pair ``c`` feeds input channel ``c`` of each
party's ``T_D``. The all-equal (2D-EMC) projection is applied to each party's
``D`` input values, photons are routed to the output channels, channels
``1..D-1`` are measured in the rotated basis ``U_F^-1|m>`` and the channel-0
pair is kept according to an :class:`AcceptanceRule`.

Two engines:

``enumerate``
    Every label vector of the ``D``-pair product is a pure branch holding all
    ``D**(2D)`` amplitudes; projection, routing, the basis change and the
    outcome enumeration are done literally. ``D <= 4``.
``structured``
    Label vectors are grouped by multiset. After the projection a branch is
    ``sum G[y, y'] |y..y>|y'..y'>`` with ``G`` the elementwise product of the
    pair coefficient matrices, and the channel-0 state depends on the
    outcomes only through ``(sum m, sum n) mod D``. ``D <= 7``.
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np

from ..beamsplitter import MAX_ENUM_DIM
from ..gates import bell, check_weights, qft_operator, shift_weights
from ..qudit import (
    DensityMatrix,
    DomainError,
    PureState,
    ResourceLimitError,
    apply_local,
    check_dim,
    fidelity,
    tensor,
)
from .outcome import AcceptanceRule, StepOutcome, parse_rule

MAX_FULL_DIM = 4
MAX_STRUCTURED_DIM = MAX_ENUM_DIM


def _phases(d: int, exponents) -> np.ndarray:
    return np.exp(2j * np.pi * (np.asarray(exponents) % d) / d)


@lru_cache(maxsize=None)
def _register_digits(d: int) -> np.ndarray:
    """Digits of every basis index of ``a0 b0 a1 b1 ...`` (shape ``(d**2d, 2d)``)."""
    return np.indices((d,) * (2 * d)).reshape(2 * d, -1).T


@lru_cache(maxsize=None)
def _emc_mask(d: int) -> np.ndarray:
    digits = _register_digits(d)
    alice, bob = digits[:, 0::2], digits[:, 1::2]
    return (alice == alice[:, :1]).all(axis=1) & (bob == bob[:, :1]).all(axis=1)


def _route_side(values: np.ndarray, d: int):
    """Route each row of input values; return output values and a validity mask."""
    chans = (values - np.arange(d)) % d
    valid = (np.sort(chans, axis=1) == np.arange(d)).all(axis=1)
    out = np.zeros_like(values)
    np.put_along_axis(out, np.where(valid[:, None], chans, np.arange(d)), values, axis=1)
    return out, valid


@lru_cache(maxsize=None)
def _routing_permutation(d: int):
    """Flat index after routing both parties, and where routing is defined."""
    digits = _register_digits(d)
    a_out, a_ok = _route_side(digits[:, 0::2], d)
    b_out, b_ok = _route_side(digits[:, 1::2], d)
    routed = np.empty_like(digits)
    routed[:, 0::2], routed[:, 1::2] = a_out, b_out
    weights = d ** np.arange(2 * d - 1, -1, -1)
    return routed @ weights, a_ok & b_ok


@lru_cache(maxsize=None)
def _outcome_classes(d: int):
    """Per outcome tuple on channels 1..d-1: ``sum m``, ``sum n``, literal match."""
    digits = np.indices((d,) * (2 * d - 2)).reshape(2 * d - 2, -1).T
    m, n = digits[:, 0::2], digits[:, 1::2]
    return m.sum(axis=1) % d, n.sum(axis=1) % d, (m == n).all(axis=1)


class _Accumulator:
    def __init__(self, d: int):
        self.d = d
        self.rho = np.zeros((d * d, d * d), dtype=np.complex128)
        self.p_accept = 0.0
        self.p_reject_meas = 0.0
        self.p_emc_fail = 0.0
        self.crossed = 0.0


def _accepted_vectors(vecs: np.ndarray, M, N, literal, rule: AcceptanceRule, d: int):
    """Select (and for ``corrected`` phase-fix) the accepted channel-0 vectors.

    ``vecs`` has shape ``(n_outcomes, d, d)`` indexed by Alice then Bob value.
    """
    s = (M + N) % d
    if rule is AcceptanceRule.SUM_ZERO:
        keep = s == 0
    elif rule is AcceptanceRule.LITERAL:
        keep = literal
    else:
        keep = np.ones_like(s, dtype=bool)
    acc = vecs[keep]
    if rule is AcceptanceRule.CORRECTED:
        y = np.arange(d)
        acc = acc * _phases(d, -np.outer(s[keep], y))[:, :, None]
    return acc, vecs[~keep]


def _run_full(pairs, q, d, rule, acc: _Accumulator) -> None:
    mask = _emc_mask(d)
    routed_idx, routable = _routing_permutation(d)
    M, N, literal = _outcome_classes(d)
    qft = qft_operator(d)
    n = len(q)
    for labels in itertools.product(range(n), repeat=d):
        w = math.prod(q[i] for i in labels)
        if w == 0:
            continue
        state = tensor(*(pairs[i] for i in labels))
        projected = np.where(mask, state.amplitudes, 0)
        surv = float(np.vdot(projected, projected).real)
        acc.p_emc_fail += w * (1 - surv)
        if len(set(labels)) > 1:
            acc.crossed += w * surv
        if surv == 0:
            continue
        if np.any(projected[~routable]):
            raise AssertionError("post-selected term left an output channel empty")
        routed = np.zeros_like(projected)
        routed[routed_idx[routable]] = projected[routable]
        out = PureState(state.dims, routed / math.sqrt(surv), w * surv)
        for c in range(2, 2 * d):
            out = apply_local(qft, out, [c])
        vecs = out.amplitudes.reshape(d, d, -1).transpose(2, 0, 1)
        keep, rej = _accepted_vectors(vecs, M, N, literal, rule, d)
        flat = keep.reshape(len(keep), -1)
        acc.rho += out.weight * (flat.T @ flat.conj())
        acc.p_accept += out.weight * float(np.sum(np.abs(flat) ** 2))
        acc.p_reject_meas += out.weight * float(np.sum(np.abs(rej) ** 2))


def _multisets(n: int, d: int):
    for combo in itertools.combinations_with_replacement(range(n), d):
        counts = np.bincount(combo, minlength=n)
        mult = math.factorial(d)
        for c in counts:
            mult //= math.factorial(int(c))
        yield combo, mult


def _run_structured(pairs, q, d, rule, acc: _Accumulator) -> None:
    coeffs = [p.amplitudes.reshape(d, d) for p in pairs]
    y = np.arange(d)
    MN = np.array(list(itertools.product(range(d), repeat=2)))
    M, N = MN[:, 0], MN[:, 1]
    # tuples per (sum m, sum n) class, and literal matches (which force N == M)
    per_class = float(d) ** (2 * d - 4)
    literal = M == N
    meas = float(d) ** (d - 1)
    for combo, mult in _multisets(len(q), d):
        w = mult * math.prod(q[i] for i in combo)
        if w == 0:
            continue
        g = np.ones((d, d), dtype=np.complex128)
        for i in combo:
            g = g * coeffs[i]
        surv = float(np.sum(np.abs(g) ** 2))
        acc.p_emc_fail += w * (1 - surv)
        if len(set(combo)) > 1:
            acc.crossed += w * surv
        if surv == 0:
            continue
        # channel-0 vector for class (M, N): G[y,y'] w^(M y + N y') / d^(d-1)
        vecs = g[None] * _phases(d, np.outer(M, y))[:, :, None] * _phases(d, np.outer(N, y))[:, None, :]
        vecs = vecs / meas
        keep, rej = _accepted_vectors(vecs, M, N, literal, rule, d)
        kflat = keep.reshape(len(keep), -1)
        if rule is AcceptanceRule.LITERAL:
            # a literal class holds d^(d-2) accepted tuples; the rest are rejected
            k_mult = float(d) ** (d - 2)
            r_mass = per_class * np.sum(np.abs(rej) ** 2) + (per_class - k_mult) * np.sum(
                np.abs(kflat) ** 2
            )
        else:
            k_mult = per_class
            r_mass = per_class * np.sum(np.abs(rej) ** 2)
        acc.rho += w * k_mult * (kflat.T @ kflat.conj())
        acc.p_accept += w * k_mult * float(np.sum(np.abs(kflat) ** 2))
        acc.p_reject_meas += w * float(r_mass)


ENGINES = {"enumerate": (_run_full, MAX_FULL_DIM), "structured": (_run_structured, MAX_STRUCTURED_DIM)}


def default_engine(d: int) -> str:
    if d <= MAX_FULL_DIM:
        return "enumerate"
    if d <= MAX_STRUCTURED_DIM:
        return "structured"
    raise ResourceLimitError(f"beam-splitter simulation supports D <= {MAX_STRUCTURED_DIM}, got {d}")


def oambs_step_sim(
    F: Optional[float],
    d: int,
    rule="corrected",
    engine: str = "auto",
    weights: Optional[Sequence[float]] = None,
) -> StepOutcome:
    """Exact simulation of one beam-splitter distillation step.

    Either ``F`` (weights ``(F, (1-F)/(d-1), ...)``) or an explicit Bell
    weight vector ``weights`` over ``|Psi_0i>`` is given.
    """
    rule = parse_rule(rule)
    if d > MAX_STRUCTURED_DIM:
        raise ResourceLimitError(f"beam-splitter simulation supports D <= {MAX_STRUCTURED_DIM}, got {d}")
    d = check_dim(d)
    if (F is None) == (weights is None):
        raise DomainError("give exactly one of F and weights")
    q = shift_weights(F, d) if weights is None else check_weights(weights, d)
    if engine == "auto":
        engine = default_engine(d)
    if engine not in ENGINES:
        raise DomainError(f"unknown engine {engine!r}; choose from {sorted(ENGINES)} or 'auto'")
    run, limit = ENGINES[engine]
    if d > limit:
        raise ResourceLimitError(f"engine {engine!r} supports D <= {limit}, got {d}")

    pairs = [bell(0, i, d) for i in range(len(q))]
    acc = _Accumulator(d)
    run(pairs, q, d, rule, acc)

    rho = DensityMatrix((d, d), acc.rho)
    p = acc.p_accept
    # shift-label marginal: sum over phase labels k
    unnorm = tuple(
        sum(fidelity(rho, bell(k, i, d)) for k in range(d)) for i in range(len(q))
    )
    return StepOutcome(
        f_in=q[0],
        f_out=fidelity(rho, bell(0, 0, d)) / p,
        p_success=p,
        weights_out=tuple(x / p for x in unnorm),
        engine=engine,
        rule=rule,
        p_reject=acc.p_emc_fail + acc.p_reject_meas,
        crossed_weight=acc.crossed,
        weights_unnormalized=unnorm,
        state=rho,
    )
