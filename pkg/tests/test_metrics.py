import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mrcmos.darcy_core import solve_fine
from mrcmos.decomposition import build_partition
from mrcmos.mesh import build_grid
from mrcmos.metrics import (convergence_slope, default_jump_line, error_report,
                            flux_jump_profile, l2_flux_error, l2_pressure_error,
                            max_cell_imbalance)
from mrcmos.mrcm import MultiscaleSolution, solve_mrcm
from mrcmos.problem import (BoundarySpec, DarcyProblem, PermField, make_homogeneous_problem)


def _part(n=8, m=2):
    return build_partition(build_grid(n, n, 1.0 / n), m, m)


def test_pressure_error_trivial():
    p = np.linspace(0, 1, 16)
    assert l2_pressure_error(p, p, 0.25) == (0.0, 0.0)
    assert l2_pressure_error(p + 3.0, p, 0.25, mean_adjust=True) == pytest.approx((0.0, 0.0), abs=1e-14)


def test_pressure_error_value():
    err, rel = l2_pressure_error(np.array([1.0, 2.0]), np.array([1.0, 0.0]), 0.5)
    assert err == pytest.approx(1.0)
    assert rel == pytest.approx(2.0)
    with pytest.raises(ValueError):
        l2_pressure_error(np.zeros(3), np.zeros(4), 0.1)


def test_relative_error_needs_nonzero_reference():
    _, rel = l2_pressure_error(np.ones(4), np.zeros(4), 0.5)
    assert np.isnan(rel)


def test_flux_error_two_sided_weighting():
    part = _part()
    g = part.grid
    u = np.zeros(g.n_edges)
    sol = MultiscaleSolution.from_fine(part, np.zeros(g.n_cells), u)
    e = part.skeleton[3]
    sol.flux_lo[e] = 2.0
    sol.flux_hi[e] = -2.0
    err, _ = l2_flux_error(sol, u)
    assert err == pytest.approx(np.sqrt(2 * (g.h ** 2 / 2) * 4.0))
    # an interior edge counts with the full weight
    sol2 = MultiscaleSolution.from_fine(part, np.zeros(g.n_cells), u)
    e2 = int(np.setdiff1d(g.interior_edges, part.skeleton)[0])
    sol2.flux_lo[e2] = sol2.flux_hi[e2] = 2.0
    assert l2_flux_error(sol2, u)[0] == pytest.approx(np.sqrt(g.h ** 2 * 4.0))


def test_flux_error_self_is_zero():
    pr = make_homogeneous_problem(2, 6)
    sol = solve_mrcm(pr, build_partition(pr.grid, 2, 2), 1.0)
    assert l2_flux_error(sol, sol)[0] == 0.0
    with pytest.raises(ValueError):
        l2_flux_error(sol, np.zeros(5))


@settings(max_examples=30, deadline=None)
@given(st.floats(-5, 5).filter(lambda c: abs(c) > 1e-3), st.integers(0, 1000))
def test_norm_homogeneity(c, seed):
    rng = np.random.default_rng(seed)
    part = _part()
    g = part.grid
    p = rng.standard_normal(g.n_cells)
    u = rng.standard_normal(g.n_edges)
    a = l2_pressure_error(c * p, np.zeros_like(p), g.h)[0]
    assert a == pytest.approx(abs(c) * l2_pressure_error(p, np.zeros_like(p), g.h)[0])
    s1 = MultiscaleSolution.from_fine(part, p, c * u)
    s0 = MultiscaleSolution.from_fine(part, p, u)
    zero = np.zeros(g.n_edges)
    assert l2_flux_error(s1, zero)[0] == pytest.approx(abs(c) * l2_flux_error(s0, zero)[0])


def test_mean_adjust_does_not_touch_flux():
    pr = make_homogeneous_problem(2, 6)
    sol = solve_mrcm(pr, build_partition(pr.grid, 2, 2), 1.0)
    fine = solve_fine(pr)
    a = error_report(sol, fine.pressure, fine.flux, "fine-grid", mean_adjust=False)
    b = error_report(sol, fine.pressure, fine.flux, "fine-grid", mean_adjust=True)
    assert a.u_rel == b.u_rel
    assert b.mean_adjusted and b.reference == "fine-grid"


def test_jump_profile_of_fine_solution_is_zero():
    part = build_partition(build_grid(12, 12, 1 / 12), 3, 3)
    rng = np.random.default_rng(0)
    sol = MultiscaleSolution.from_fine(part, rng.standard_normal(144), rng.standard_normal(part.grid.n_edges))
    line = default_jump_line(part)
    jump = flux_jump_profile(sol, line)
    assert jump.size == 12
    assert np.all(jump == 0)


def test_zero_forcing_gives_zero_jumps():
    g = build_grid(12, 12, 1 / 12)
    bc = BoundarySpec.from_sides(g, {"left": ("dirichlet", 0.0)})
    pr = DarcyProblem(g, PermField.constant(g), np.zeros(g.n_cells), bc)
    part = build_partition(g, 3, 3)
    sol = solve_mrcm(pr, part, 1.0)
    assert np.abs(flux_jump_profile(sol, default_jump_line(part))).max() < 1e-13


def test_default_jump_line():
    part = build_partition(build_grid(12, 12, 1 / 12), 3, 4)
    line = default_jump_line(part)
    faces = [part.faces[f] for f in line]
    assert len(faces) == 3
    assert all(f.axis == 1 for f in faces)
    assert {part.block(f.lo)[1] for f in faces} == {1}


def test_jump_profile_rejects_bad_paths():
    part = build_partition(build_grid(12, 12, 1 / 12), 3, 3)
    sol = MultiscaleSolution.from_fine(part, np.zeros(144), np.zeros(part.grid.n_edges))
    vertical = [f.index for f in part.faces if f.axis == 0]
    horizontal = [f.index for f in part.faces if f.axis == 1]
    with pytest.raises(ValueError):
        flux_jump_profile(sol, [vertical[0], horizontal[0]])
    with pytest.raises(ValueError):
        # two rows of horizontal faces
        flux_jump_profile(sol, [horizontal[0], horizontal[3]])
    with pytest.raises(ValueError):
        flux_jump_profile(sol, [horizontal[0], horizontal[2]])


def test_convergence_slope_power_laws():
    h = np.array([0.5, 0.25, 0.125, 0.0625])
    assert convergence_slope(zip(h, 3.0 * h ** 2)) == pytest.approx(2.0, abs=1e-12)
    assert convergence_slope(zip(h, 0.7 * h)) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        convergence_slope([(0.1, 1.0)])
    with pytest.raises(ValueError):
        convergence_slope([(0.1, 1.0), (0.1, 2.0)])
    with pytest.raises(ValueError):
        convergence_slope([(0.1, 0.0), (0.2, 1.0)])


def test_fine_solver_pressure_slope():
    pairs = []
    for m in (2, 4, 8):
        pr = make_homogeneous_problem(m, 10)
        fine = solve_fine(pr)
        err, _ = l2_pressure_error(fine.pressure, pr.exact_cell_pressure(), pr.grid.h, True)
        pairs.append((pr.grid.h, err))
    assert convergence_slope(pairs) >= 1.8


def test_cell_imbalance_detects_violation():
    g = build_grid(8, 8, 1 / 8)
    bc = BoundarySpec.from_sides(g, {"left": ("dirichlet", 1.0), "right": ("dirichlet", 0.0)})
    pr = DarcyProblem(g, PermField.constant(g), np.zeros(g.n_cells), bc)
    part = build_partition(g, 2, 2)
    fine = solve_fine(pr)
    sol = MultiscaleSolution.from_fine(part, fine.pressure, fine.flux)
    assert max_cell_imbalance(sol, pr.source) < 1e-13
    e = int(np.setdiff1d(g.interior_edges, part.skeleton)[0])
    sol.flux_lo[e] += 1.0
    sol.flux_hi[e] += 1.0
    assert max_cell_imbalance(sol, pr.source) == pytest.approx(g.h)
