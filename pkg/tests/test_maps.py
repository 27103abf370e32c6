from fractions import Fraction as Fr

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oamdistill.protocols import maps
from oamdistill.qudit import DomainError


def test_bbpssw_fidelity_examples():
    assert maps.bbpssw_fidelity(Fr(1, 2), 3) == Fr(2, 3)
    for d in range(2, 9):
        assert maps.bbpssw_fidelity(Fr(1), d) == 1
    assert maps.bbpssw_m2(Fr(7, 10)) == Fr(49, 58)


def test_bbpssw_analytic_examples():
    assert maps.bbpssw_analytic((Fr(1, 2), Fr(1, 4), Fr(1, 4))) == (Fr(2, 3), Fr(1, 6), Fr(1, 6))
    assert maps.bbpssw_analytic((Fr(1),)) == (Fr(1),)
    with pytest.raises(DomainError):
        maps.bbpssw_analytic((0, 0))


def test_oambs_fidelity_examples():
    assert maps.oambs_fidelity(Fr(1, 3), 3) == Fr(1, 3)
    assert maps.oambs_fidelity(Fr(1, 2), 4) == Fr(27, 28)
    assert maps.oambs_fidelity(Fr(1, 2), 3) == Fr(4, 5)


def test_fixed_points_exact():
    assert maps.fixed_points(3) == pytest.approx((0, 1 / 3, 1))
    for d in range(2, 9):
        for p in (Fr(0), Fr(1, d), Fr(1)):
            assert maps.oambs_fidelity(p, d) == p
            assert maps.bbpssw_fidelity(p, d) == p


def test_fixed_points_float():
    for d in range(2, 9):
        for p in maps.fixed_points(d):
            assert abs(maps.oambs_fidelity(p, d) - p) < 1e-12
            assert abs(maps.bbpssw_fidelity(p, d) - p) < 1e-12


def test_iterate_map_examples():
    for d in (2, 3, 4):
        traj = maps.iterate_map("oambs-eq12", Fr(1, d), d, 10)
        assert all(x == Fr(1, d) for x in traj)
    assert maps.iterate_map("bbpssw-eq8", Fr(1, 2), 4, 2) == [Fr(1, 2), Fr(3, 4), Fr(27, 28)]
    traj = maps.iterate_map("oambs-eq12", 0.4, 2, 40)
    assert traj[-1] < 1e-12
    with pytest.raises(DomainError):
        maps.iterate_map("dejmps", 0.5, 2, 1)
    with pytest.raises(DomainError):
        maps.iterate_map("bbpssw-eq8", 0.5, 2, 0)


@given(st.sampled_from(sorted(maps.MAPS)), st.integers(2, 8), st.floats(0, 1))
def test_trajectories_monotone(name, d, F0):
    traj = maps.iterate_map(name, F0, d, 8)
    steps = list(zip(traj, traj[1:]))
    if F0 > 1 / d:
        assert all(b >= a - 1e-15 for a, b in steps)
    elif F0 < 1 / d:
        assert all(b <= a + 1e-15 for a, b in steps)


def test_acceleration_examples():
    lhs, rhs = maps.acceleration_check(Fr(1, 2), 2)
    assert lhs == rhs == Fr(27, 28)
    for k in (1, 2, 3):
        assert maps.acceleration_check(Fr(1), k) == (1, 1)
    lhs, rhs = maps.acceleration_check(Fr(3, 5), 1)
    assert lhs == rhs == Fr(36, 52)
    with pytest.raises(DomainError):
        maps.acceleration_check(0.5, 4)


@given(st.fractions(0, 1, max_denominator=50), st.integers(1, 3))
def test_acceleration_identity_exact(F, k):
    lhs, rhs = maps.acceleration_check(F, k)
    assert lhs == rhs


@given(st.fractions(0, 1, max_denominator=50).filter(lambda F: 0 < F < 1), st.integers(2, 8))
def test_odds_ratio_maps_exact(F, d):
    r = (1 - F) / F
    b = maps.bbpssw_fidelity(F, d)
    o = maps.oambs_fidelity(F, d)
    assert (1 - b) / b == maps.odds_bbpssw(r, d)
    assert (1 - o) / o == maps.odds_oambs(r, d)


def test_conserving_fidelity_examples():
    assert maps.conserving_fidelity(Fr(1, 2), 2) == Fr(1, 2)
    assert maps.conserving_fidelity(Fr(9, 10), 4) == Fr(81, 100) / (Fr(81, 100) + Fr(1, 100) / 3)
    assert abs(maps.conserving_fidelity(0.9, 4) - 0.99590) < 1e-5
    assert maps.conserving_fidelity(Fr(1, 2), 3) == Fr(2, 3)


def test_success_probabilities_exact():
    q = (Fr(1, 2), Fr(1, 4), Fr(1, 4))
    assert maps.bbpssw_success(q) == Fr(3, 8)
    # emc survival 1/9 of sum q^3, then 1/3 of outcomes for sum-zero
    assert maps.oambs_success(q, 3, "corrected") == Fr(5, 32) / 9
    assert maps.oambs_success(q, 3, "sum-zero") == Fr(5, 32) / 27
    assert maps.oambs_success(q, 3, "literal") == Fr(5, 32) / 81
    assert maps.conserving_success(Fr(1), 3) == Fr(1, 3)
    assert maps.conserving_success(Fr(0), 3) == Fr(1, 6)


def test_literal_fidelity_parity():
    assert maps.oambs_literal_fidelity(Fr(7, 10), 2) == maps.oambs_fidelity(Fr(7, 10), 2)
    assert maps.oambs_literal_fidelity(Fr(7, 10), 3) == maps.oambs_fidelity(Fr(7, 10), 3) / 3
    assert maps.oambs_literal_fidelity(Fr(7, 10), 4) == maps.oambs_fidelity(Fr(7, 10), 4) / 2


def test_domain_errors():
    with pytest.raises(DomainError):
        maps.oambs_fidelity(1.2, 3)
    with pytest.raises(DomainError):
        maps.bbpssw_fidelity(0.5, 1)
