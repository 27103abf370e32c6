"""Invariant checks run by ``oamdistill verify``.

Each check returns ``(passed, detail)``. Pseudo-random inputs come from a
seeded generator so the suite is deterministic.
"""
from __future__ import annotations

import itertools
import math
from typing import Callable, Dict, List, NamedTuple, Tuple

import numpy as np

from . import beamsplitter as bs
from .gates import (
    bell,
    bell_mixture,
    cnot_operator,
    conserving_states,
    phase_z,
    qft_operator,
    shift_weights,
)
from .protocols import maps
from .protocols.bbpssw import bbpssw_step_sim
from .protocols.conserving import conserving_step_sim
from .protocols.oambs import oambs_step_sim
from .qudit import (
    DensityMatrix,
    PureState,
    WeightedEnsemble,
    apply_local,
    basis_state,
    ensemble_to_dm,
    fidelity,
    norm2,
    overlap2,
    partial_trace,
    projector,
    tensor,
)

SEED = 20240601


def f_grid(d: int) -> List[float]:
    return [0.1, 0.3, 1 / d, 0.5, 0.7, 0.9, 1.0]


def random_state(rng, dims) -> PureState:
    n = int(np.prod(dims))
    v = rng.normal(size=n) + 1j * rng.normal(size=n)
    return PureState(tuple(dims), v / np.linalg.norm(v))


def random_weights(rng, n: int) -> Tuple[float, ...]:
    q = rng.random(n)
    return tuple(q / q.sum())


class Result(NamedTuple):
    name: str
    passed: bool
    detail: str


def _worst(values) -> float:
    return max(values, default=0.0)


# qudit algebra

def check_unitarity():
    ops = []
    for d in range(2, 9):
        ops += [cnot_operator(d), qft_operator(d), bs.t_as_operator(d)]
        ops += [phase_z(d, s) for s in range(d)]
    err = _worst(op.unitarity_error() for op in ops)
    return err < 1e-12, f"max |U^dag U - I| = {err:.2e}"


def check_tensor_assoc():
    # dyadic amplitudes: every product is exact, so bitwise equality is meaningful
    rng = np.random.default_rng(SEED)

    def dyadic(dims):
        n = int(np.prod(dims))
        return PureState(dims, (rng.integers(-8, 9, n) + 1j * rng.integers(-8, 9, n)) / 16, 0.5)

    a, b, c = dyadic((3,)), dyadic((2, 2)), dyadic((3,))
    left = tensor(tensor(a, b), c).amplitudes
    right = tensor(a, tensor(b, c)).amplitudes
    return bool(np.array_equal(left, right)), "(a x b) x c == a x (b x c) exactly"


def check_local_norm_and_trace():
    rng = np.random.default_rng(SEED + 1)
    worst_norm = worst_tr = 0.0
    for d in (2, 3, 4):
        s = random_state(rng, (d, d, d))
        for op, targets in ((qft_operator(d), [1]), (cnot_operator(d), [2, 0])):
            worst_norm = max(worst_norm, abs(norm2(apply_local(op, s, targets)) - 1))
        rho = DensityMatrix(s.dims, projector(s))
        for keep in ({0}, {1, 2}, {0, 2}):
            worst_tr = max(worst_tr, abs(partial_trace(rho, keep).trace - 1))
    ok = worst_norm < 1e-12 and worst_tr < 1e-12
    return ok, f"norm drift {worst_norm:.1e}, trace drift {worst_tr:.1e}"


def check_ensemble_density_equivalence():
    rng = np.random.default_rng(SEED + 2)
    worst = 0.0
    for d in (2, 3, 4):
        ens = bell_mixture(random_weights(rng, d), d)
        mixed = WeightedEnsemble(tuple(random_state(rng, (d, d)).with_weight(0.25) for _ in range(4)))
        for e in (ens, mixed):
            dm = ensemble_to_dm(e)
            for k, j in itertools.product(range(d), repeat=2):
                t = bell(k, j, d)
                worst = max(worst, abs(fidelity(e, t) - fidelity(dm, t)))
    return worst < 1e-10, f"max |F_ens - F_dm| = {worst:.1e}"


# gates and states

def check_bell_basis():
    worst = 0.0
    for d in range(2, 9):
        basis = np.array([bell(k, j, d).amplitudes for k in range(d) for j in range(d)])
        worst = max(worst, float(np.max(np.abs(basis.conj() @ basis.T - np.eye(d * d)))))
    return worst < 1e-12, f"max |Gram - I| = {worst:.1e}"


def check_bell_construction():
    worst = 0.0
    for d in range(2, 7):
        for k, j in itertools.product(range(d), repeat=2):
            s = apply_local(qft_operator(d), basis_state((d, d), (k, j)), [0])
            s = apply_local(cnot_operator(d), s, [0, 1])
            worst = max(worst, 1 - overlap2(s, bell(k, j, d)))
    return worst < 1e-10, f"max 1 - |<CNOT(F|k>|j>)|Psi_kj>|^2 = {worst:.1e}"


def check_conserving_symmetry():
    worst = 0.0
    for d in range(2, 9):
        phi, psi = conserving_states(d)
        swapped = PureState(phi.dims, phi.tensor_view().T.reshape(-1))
        worst = max(worst, 1 - overlap2(phi, swapped), abs(fidelity(WeightedEnsemble((psi,)), phi)))
    return worst < 1e-12, "Phi_C swap-symmetric and orthogonal to Psi_NC"


def check_cnot_involution():
    ok = all(
        np.array_equal(cnot_operator(d).entries @ cnot_operator(d).entries, np.eye(d * d))
        for d in range(2, 9)
    )
    return ok, "CNOT^2 = I for D = 2..8"


# beam splitter

def check_config_counts():
    bad = []
    for d in range(2, 8):
        c = bs.enumerate_configs(d)
        if (c.count_occupied, c.count_all_equal) != (math.factorial(d), d):
            bad.append(d)
        if bool(c.counterexamples) != (d >= 3):
            bad.append(d)
    return not bad, "(D!, D) counts for D = 2..7" if not bad else f"failed for D in {bad}"


def check_equal_implies_occupied():
    ok = all(
        bs.all_occupied(y)
        for d in range(2, 8)
        for y in ((l,) * d for l in range(d))
    )
    for d in range(2, 6):
        for y in itertools.product(range(d), repeat=d):
            if bs.all_equal(y) and not bs.all_occupied(y):
                ok = False
    return ok, "all_equal implies all_occupied"


def check_prop1():
    ok = all(
        np.array_equal(bs.t_as_operator(d).entries, cnot_operator(d).entries) for d in range(2, 9)
    )
    return ok, "T_D == CNOT_D entry by entry, D = 2..8"


def check_postselect_idempotent():
    rng = np.random.default_rng(SEED + 3)
    worst = 0.0
    for d in (2, 3, 4):
        configs = list(itertools.product(range(d), repeat=d))
        amps = rng.normal(size=len(configs)) + 1j * rng.normal(size=len(configs))
        amps /= np.linalg.norm(amps)
        s = bs.ModeSuperposition(dict(zip(configs, amps)), d)
        for rule in bs.RULES:
            once = bs.postselect(s, rule)
            twice = bs.postselect(once, rule)
            worst = max(worst, abs(once.weight - twice.weight))
            worst = max([worst] + [abs(once.terms[y] - twice.terms[y]) for y in once.terms])
    return worst < 1e-12, f"max drift {worst:.1e}"


def check_routing_preserves_values():
    ok = True
    for d in range(2, 6):
        for y in itertools.product(range(d), repeat=d):
            if bs.all_occupied(y) and sorted(bs.routed_values(y)) != sorted(y):
                ok = False
    return ok, "value multiset unchanged by routing"


# protocols

def check_oambs_eq12():
    worst = 0.0
    for d in (2, 3, 4):
        for F in f_grid(d):
            for rule in ("sum-zero", "corrected"):
                o = oambs_step_sim(F, d, rule)
                worst = max(worst, abs(o.f_out - maps.oambs_fidelity(F, d)))
    return worst < 1e-9, f"max residual {worst:.1e}"


def check_rule_relations():
    worst = 0.0
    for d in (2, 3, 4):
        for F in f_grid(d):
            sz = oambs_step_sim(F, d, "sum-zero")
            co = oambs_step_sim(F, d, "corrected")
            worst = max(worst, abs(sz.f_out - co.f_out), abs(co.p_success - d * sz.p_success))
            worst = max([worst] + [abs(a - b) for a, b in zip(sz.weights_out, co.weights_out)])
    for F in f_grid(2):
        sz = oambs_step_sim(F, 2, "sum-zero")
        li = oambs_step_sim(F, 2, "literal")
        worst = max(worst, abs(sz.f_out - li.f_out), abs(sz.p_success - li.p_success))
    return worst < 1e-9, f"max deviation {worst:.1e}"


def check_crossed_terms():
    worst = _worst(
        oambs_step_sim(F, d, rule).crossed_weight
        for d in (2, 3, 4)
        for F in f_grid(d)
        for rule in ("sum-zero", "corrected", "literal")
    )
    return worst < 1e-12, f"max crossed weight after EMC {worst:.1e}"


def check_bbpssw_eq6():
    rng = np.random.default_rng(SEED + 4)
    worst = 0.0
    for d in range(2, 6):
        for _ in range(100):
            q = random_weights(rng, int(rng.integers(1, d + 1)))
            o = bbpssw_step_sim(q, d)
            expect = maps.bbpssw_analytic(q)
            worst = max([worst, abs(o.p_success - maps.bbpssw_success(q))]
                        + [abs(a - b) for a, b in zip(o.weights_out, expect)])
    return worst < 1e-9, f"max residual {worst:.1e}"


def check_conserving_eq17():
    worst = 0.0
    crossed = 0.0
    for d in range(2, 7):
        for F in f_grid(d):
            o = conserving_step_sim(F, d)
            worst = max(
                worst,
                abs(o.f_out - maps.conserving_fidelity(F, d)),
                abs(o.weights_unnormalized[0] - F**2 / d),
                abs(o.weights_unnormalized[1] - (1 - F) ** 2 / (d * (d - 1))),
            )
            crossed = max(crossed, o.crossed_weight)
    return worst < 1e-9 and crossed < 1e-12, f"max residual {worst:.1e}, crossed {crossed:.1e}"


def check_odds_algebra():
    worst = 0.0
    for d in range(2, 9):
        for F in f_grid(d):
            if F in (0.0, 1.0):
                continue
            r = (1 - F) / F
            for f, odds in ((maps.bbpssw_fidelity, maps.odds_bbpssw), (maps.oambs_fidelity, maps.odds_oambs)):
                F2 = f(F, d)
                worst = max(worst, abs((1 - F2) / F2 - odds(r, d)) / max(1.0, odds(r, d)))
    return worst < 1e-12, f"max relative odds mismatch {worst:.1e}"


def check_probability_conservation():
    worst = 0.0
    outcomes = []
    for d in (2, 3, 4):
        for F in (0.3, 0.8):
            outcomes += [oambs_step_sim(F, d, r) for r in ("sum-zero", "corrected", "literal")]
            outcomes.append(conserving_step_sim(F, d))
            outcomes.append(bbpssw_step_sim((F, 1 - F), d))
    for o in outcomes:
        worst = max(worst, abs(o.p_success + o.p_reject - 1))
    return worst < 1e-12, f"max |p_success + p_reject - 1| = {worst:.1e}"


def check_degenerate_inputs():
    worst = 0.0
    for d in (2, 3, 4):
        worst = max(
            worst,
            abs(oambs_step_sim(1.0, d).f_out - 1),
            abs(conserving_step_sim(1.0, d).f_out - 1),
            abs(bbpssw_step_sim(shift_weights(1.0, d), d).f_out - 1),
        )
    for d in range(2, 9):
        for f in (maps.bbpssw_fidelity, maps.oambs_fidelity):
            worst = max(worst, abs(f(1 / d, d) - 1 / d))
    return worst < 1e-12, f"max deviation {worst:.1e}"


def check_fixed_points():
    worst = 0.0
    slow = []
    for d in range(2, 9):
        for f in (maps.bbpssw_fidelity, maps.oambs_fidelity):
            for p in maps.fixed_points(d):
                worst = max(worst, abs(f(p, d) - p))
            for start, goal in ((1 / d + 0.01, 1.0), (1 / d - 0.01, 0.0)):
                F = start
                for _ in range(60):
                    F = f(F, d)
                if abs(F - goal) >= 1e-6:
                    slow.append((f.__name__, d, start))
    return worst < 1e-12 and not slow, f"fixed-point residual {worst:.1e}, non-converged {slow}"


def check_acceleration():
    worst = 0.0
    for k in (1, 2, 3):
        for F in f_grid(2**k):
            lhs, rhs = maps.acceleration_check(F, k)
            worst = max(worst, abs(lhs - rhs))
    return worst < 1e-9, f"max |single step - k steps| = {worst:.1e}"


def check_engine_crosscheck():
    rng = np.random.default_rng(SEED + 5)
    worst = 0.0
    for d in (2, 3, 4):
        for _ in range(5):
            q = random_weights(rng, d)
            a = bbpssw_step_sim(q, d, engine="ensemble")
            b = bbpssw_step_sim(q, d, engine="density")
            worst = max([worst, abs(a.p_success - b.p_success)]
                        + [abs(x - y) for x, y in zip(a.weights_out, b.weights_out)])
        for F in f_grid(d):
            a = conserving_step_sim(F, d, engine="ensemble")
            b = conserving_step_sim(F, d, engine="density")
            worst = max(worst, abs(a.f_out - b.f_out), abs(a.p_success - b.p_success))
        for F in (0.3, 0.8):
            a = oambs_step_sim(F, d, engine="enumerate")
            b = oambs_step_sim(F, d, engine="structured")
            worst = max(worst, abs(a.f_out - b.f_out), abs(a.p_success - b.p_success))
    return worst < 1e-10, f"max engine disagreement {worst:.1e}"


CHECKS: Dict[str, Callable[[], Tuple[bool, str]]] = {
    "qudit.unitarity": check_unitarity,
    "qudit.tensor-associativity": check_tensor_assoc,
    "qudit.norm-and-trace-preservation": check_local_norm_and_trace,
    "qudit.ensemble-density-equivalence": check_ensemble_density_equivalence,
    "gates.bell-orthonormal-basis": check_bell_basis,
    "gates.bell-construction": check_bell_construction,
    "gates.conserving-symmetry": check_conserving_symmetry,
    "gates.cnot-involution": check_cnot_involution,
    "beamsplitter.prop2-counting": check_config_counts,
    "beamsplitter.equal-implies-occupied": check_equal_implies_occupied,
    "beamsplitter.prop1-t-equals-cnot": check_prop1,
    "beamsplitter.postselect-idempotent": check_postselect_idempotent,
    "beamsplitter.routing-preserves-values": check_routing_preserves_values,
    "protocols.oambs-recursion": check_oambs_eq12,
    "protocols.rule-relations": check_rule_relations,
    "protocols.crossed-term-cancellation": check_crossed_terms,
    "protocols.bbpssw-recursion": check_bbpssw_eq6,
    "protocols.conserving-recursion": check_conserving_eq17,
    "protocols.odds-ratio-algebra": check_odds_algebra,
    "protocols.probability-conservation": check_probability_conservation,
    "protocols.degenerate-inputs": check_degenerate_inputs,
    "protocols.fixed-points": check_fixed_points,
    "protocols.acceleration": check_acceleration,
    "protocols.engine-crosscheck": check_engine_crosscheck,
}


def run_all() -> List[Result]:
    results = []
    for name, fn in CHECKS.items():
        try:
            ok, detail = fn()
        except Exception as exc:  # a crashing check is a failed check
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        results.append(Result(name, bool(ok), detail))
    return results
