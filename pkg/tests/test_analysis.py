import math
from fractions import Fraction as Q

import numpy as np
import pytest

from gonosomal.analysis import (
    DecayFit,
    ExactIterationCapExceeded,
    InsufficientData,
    StopReason,
    Verdict,
    barycentric_lattice,
    basin_sweep,
    classify_unnormalized_orbit,
    estimate_decay_exponent,
    exact_orbit,
    find_fixed_points,
    fit_power_law,
    iterate,
    jacobian_F,
    jacobian_W,
    reduced_fixed_point_spectrum,
)
from gonosomal.core import Arith, RawState4, ReducedState, fixed_point, parse_state
from gonosomal.operators import CrossTable, GonosomalOperator, hemophilia_cross_table, hemophilia_operator, w_step
from oracles import F_oracle, fd_jacobian

OP = hemophilia_operator()


def test_iterate_records_reduced_from_step_two():
    s0 = parse_state("0,1/2,1/2,0", Arith.EXACT)
    traj = iterate(OP, s0, 4)
    assert traj.steps_taken == 4
    assert len(traj.reduced) == 3
    assert traj.reduced_at(0) == ReducedState(Q(13, 9), Q(7, 19))


def test_iterate_stops_at_eps():
    s0 = parse_state("0.1,0.2,0.3,0.4", Arith.FLOAT)
    traj = iterate(OP, s0, 100_000, eps=1e-3, target=fixed_point(Arith.FLOAT))
    assert traj.stop_reason is StopReason.CONVERGED
    d = traj.distances()
    assert d[-1] < 1e-3 <= d[-2]


def test_fixed_point_orbit_is_constant():
    traj = iterate(OP, fixed_point(Arith.EXACT), 5)
    assert all(s == fixed_point() for s in traj.states)


def test_exact_iteration_stops_at_bit_cap():
    s0 = parse_state("1/7,2/7,3/7,1/7", Arith.EXACT)
    traj = iterate(OP, s0, 100, max_exact_bits=2000)
    assert traj.stop_reason is StopReason.EXACT_CAP_EXCEEDED
    assert 3 < traj.steps_taken < 20
    with pytest.raises(ExactIterationCapExceeded):
        exact_orbit(s0, 100, max_exact_bits=2000)


def test_exact_bit_size_roughly_doubles():
    s0 = parse_state("1/7,2/7,3/7,1/7", Arith.EXACT)
    states = exact_orbit(s0, 9, max_exact_bits=1 << 20)
    bits = [s.bits() for s in states]
    assert bits[-1] > 2 ** 6 * bits[3]


def test_jacobian_F_at_origin_and_oracle():
    assert jacobian_F(ReducedState(Q(0), Q(0))) == [[Q(1, 2), Q(1)], [Q(1, 2), Q(0)]]
    point = (1.3, 0.4)
    ours = np.array(jacobian_F(ReducedState(*point)), dtype=float)
    ref = fd_jacobian(lambda a, b: tuple(map(float, F_oracle(Q(a), Q(b)))), point, 1e-7)
    assert np.allclose(ours, ref, atol=1e-6)


def test_jacobian_W_at_fixed_point():
    jac = np.array(jacobian_W(fixed_point(Arith.FLOAT)), dtype=float)
    expect = np.array([[0, -0.5, 0, -1], [0, 0.5, 0, 1], [0, -0.5, 0, 0], [0, 0.5, 0, 0]])
    assert np.allclose(jac, expect, atol=1e-10)
    # the kernel holds x and u, not the (1, 1, -1, -1) direction
    assert np.allclose(jac @ [1, 0, 0, 0], 0) and np.allclose(jac @ [0, 0, 1, 0], 0)
    assert not np.allclose(jac @ [1, 1, -1, -1], 0)


def test_jacobian_W_matches_forward_differences():
    s = parse_state("0.2,0.3,0.1,0.4", Arith.FLOAT)
    ours = np.array(jacobian_W(s), dtype=float)
    ref = fd_jacobian(w_step, s.as_tuple(), 1e-7)
    assert np.allclose(ours, ref, atol=1e-5)


def test_reduced_spectrum_exact():
    _, eig = reduced_fixed_point_spectrum()
    assert eig == (Q(1), Q(-1, 2))


@pytest.mark.parametrize("grid", [4, 7, 13])
def test_unique_fixed_point_small_grids(grid):
    reports = find_fixed_points(OP, grid)
    assert len(reports) == 1
    rep = reports[0]
    assert rep.location == fixed_point()
    assert rep.residual == 0
    assert rep.classification == "nonhyperbolic"


def test_fixed_points_of_another_table():
    # the XXh x XhY cross split into quarters, as if XhXh were viable but scored as XXh
    doc = hemophilia_cross_table().to_dict()
    doc["crosses"][3]["offspring"] = {"XXh": "1/2", "XY": "1/4", "XhY": "1/4"}
    op = GonosomalOperator(CrossTable.from_dict(doc))
    reports = find_fixed_points(op, 8)
    assert reports
    for rep in reports:
        assert float(rep.residual) < 1e-12


def test_lattice_excludes_theta():
    pts = barycentric_lattice(10)
    assert len(pts) == math.comb(13, 3) - 2 * 11
    assert all(p[0] + p[1] > 0 and p[2] + p[3] > 0 for p in pts)


def test_power_law_fit():
    m = np.arange(1, 2001)
    fit = fit_power_law(3.0 * m**-1.5)
    assert isinstance(fit, DecayFit)
    assert fit.exponent == pytest.approx(1.5, abs=1e-9)
    assert fit.power_law
    geo = fit_power_law(0.99 ** m)
    assert not geo.power_law
    with pytest.raises(InsufficientData):
        fit_power_law([1.0] * 10)


def test_decay_exponent_of_reference_orbit():
    traj = iterate(OP, parse_state("0,1/2,1/2,0", Arith.FLOAT), 4000)
    fit = estimate_decay_exponent(traj)
    assert 0.9 < fit.exponent < 1.1


def test_sweep_small_grid_deterministic():
    a = basin_sweep(OP, 4, eps=1e-3, max_iter=50_000)
    b = basin_sweep(OP, 4, eps=1e-3, max_iter=50_000, worker_count=3)
    assert a == b
    assert [r.index for r in a] == list(range(len(a)))
    assert all(r.stop_reason is StopReason.CONVERGED for r in a)
    s0 = [r for r in a if r.initial == fixed_point()]
    assert s0 and s0[0].iterations_to_eps == 0


def test_sweep_budget_exhaustion_is_data():
    recs = basin_sweep(OP, 4, eps=1e-6, max_iter=10)
    missing = [r for r in recs if r.stop_reason is StopReason.BUDGET_EXHAUSTED]
    assert missing and all(r.iterations_to_eps is None for r in missing)


def test_unnormalized_dichotomy():
    small = classify_unnormalized_orbit(RawState4(0.1, 0.1, 0.1, 0.1))
    big = classify_unnormalized_orbit(RawState4(50.0, 1.0, 50.0, 1.0))
    assert small.verdict is Verdict.ORIGIN
    assert big.verdict is Verdict.INFINITY
    stuck = classify_unnormalized_orbit(RawState4(1.0, 0.0, 1.0, 0.0), max_steps=3)
    assert stuck.verdict is Verdict.UNDECIDED


def test_jacobian_F_central_differences_random_points():
    rng = np.random.default_rng(5)
    h = 1e-6
    for a, b in zip(4 * rng.random(100), rng.random(100)):
        ours = np.array(jacobian_F(ReducedState(float(a), float(b))), dtype=float)
        ref = np.zeros((2, 2))
        for k, (da, db) in enumerate(((h, 0), (0, h))):
            plus = np.array(F_oracle(Q(a + da), Q(b + db)), dtype=float)
            minus = np.array(F_oracle(Q(a - da), Q(b - db)), dtype=float)
            ref[:, k] = (plus - minus) / (2 * h)
        assert np.max(np.abs(ours - ref)) < 1e-8


def test_jacobian_W_step_consistency():
    s = parse_state("0.3,0.2,0.4,0.1", Arith.FLOAT)
    a = np.array(jacobian_W(s, h=1e-4), dtype=float)
    b = np.array(jacobian_W(s, h=1e-5), dtype=float)
    assert np.max(np.abs(a - b)) < 1e-6


def test_iterate_budget_accounting():
    traj = iterate(OP, parse_state("0.1,0.2,0.3,0.4", Arith.FLOAT), 1, eps=1e-9, target=fixed_point(Arith.FLOAT))
    assert traj.stop_reason is StopReason.BUDGET_EXHAUSTED
    assert len(traj.states) == 2
    at_s0 = iterate(OP, fixed_point(Arith.EXACT), 10, eps=Q(1, 10), target=fixed_point())
    assert at_s0.stop_reason is StopReason.CONVERGED and at_s0.steps_taken == 0


def test_iterate_reaches_eps_from_reference_start():
    traj = iterate(OP, parse_state("0,1/2,1/2,0", Arith.FLOAT), 100_000, eps=1e-4, target=fixed_point(Arith.FLOAT))
    assert traj.stop_reason is StopReason.CONVERGED
    assert traj.distances()[-1] < 1e-4
