"""LP solver tests: hand cases, a vertex-enumeration oracle over random
programs, bit-exact determinism, and duality certificates."""

import itertools

import numpy as np
import pytest

from vnfplace.lp import EPS_FEAS, LinearProgram, LpStatus, solve
from vnfplace.model import SplitMix64


def _lp(num_vars, objective, leq=(), eq=(), bounds=None):
    return LinearProgram(
        num_vars=num_vars,
        objective=list(objective),
        leq=[(list(r), float(b)) for r, b in leq],
        eq=[(list(r), float(b)) for r, b in eq],
        bounds=bounds,
    )


# --- hand cases ---------------------------------------------------------


def test_single_variable_cap():
    sol = solve(_lp(1, [1.0], leq=[([1.0], 5.0)]))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(5.0, abs=1e-9)
    assert sol.values[0] == pytest.approx(5.0, abs=1e-9)


def test_degenerate_optimum_face():
    sol = solve(_lp(2, [1.0, 1.0], leq=[([1.0, 1.0], 1.0)]))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(1.0, abs=1e-9)


def test_infeasible():
    sol = solve(_lp(1, [1.0], leq=[([1.0], 1.0)], eq=[([1.0], 2.0)]))
    assert sol.status is LpStatus.INFEASIBLE


def test_unbounded():
    sol = solve(_lp(2, [1.0, 0.0], leq=[([0.0, 1.0], 1.0)]))
    assert sol.status is LpStatus.UNBOUNDED


def test_equality_constraints():
    # max x+y s.t. x+y == 2, x <= 1.5
    sol = solve(_lp(2, [1.0, 1.0], leq=[([1.0, 0.0], 1.5)], eq=[([1.0, 1.0], 2.0)]))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(2.0, abs=1e-9)
    assert sol.values.sum() == pytest.approx(2.0, abs=1e-9)


def test_fixed_variable_bounds():
    sol = solve(_lp(2, [3.0, 1.0], leq=[([0.0, 1.0], 4.0)], bounds=[(2.0, 2.0), (0.0, None)]))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.values[0] == pytest.approx(2.0, abs=1e-12)
    assert sol.objective_value == pytest.approx(10.0, abs=1e-9)


def test_upper_bounds():
    sol = solve(_lp(2, [1.0, 2.0], bounds=[(0.0, 3.0), (1.0, 2.5)]))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.objective_value == pytest.approx(8.0, abs=1e-9)


def test_negative_rhs_rows():
    # -x <= -2  (i.e. x >= 2), max -x  -> x = 2
    sol = solve(_lp(1, [-1.0], leq=[([-1.0], -2.0)]))
    assert sol.status is LpStatus.OPTIMAL
    assert sol.values[0] == pytest.approx(2.0, abs=1e-9)


def test_bad_shapes_rejected():
    with pytest.raises(ValueError):
        solve(_lp(2, [1.0]))
    with pytest.raises(ValueError):
        solve(_lp(1, [1.0], bounds=[(1.0, 0.0)]))


# --- random corpus ------------------------------------------------------


def _random_lp(rng, n, m, box=10.0):
    """Feasible, bounded random LP: A x <= b with b >= 0 (origin feasible)
    plus a box 0 <= x <= u expressed as explicit rows."""
    a = [[round(rng.uniform(-3.0, 3.0), 3) for _ in range(n)] for _ in range(m)]
    b = [round(rng.uniform(0.0, 8.0), 3) for _ in range(m)]
    u = [round(rng.uniform(0.5, box), 3) for _ in range(n)]
    c = [round(rng.uniform(-2.0, 4.0), 3) for _ in range(n)]
    leq = [(row, rhs) for row, rhs in zip(a, b)]
    for i in range(n):
        row = [0.0] * n
        row[i] = 1.0
        leq.append((row, u[i]))
    return _lp(n, c, leq=leq)


def _vertex_oracle(lp):
    """Maximum of the objective over all basic feasible points, found by
    enumerating every n-subset of the active-constraint candidates
    (all leq rows plus the nonnegativity facets)."""
    c, a_leq, b_leq, _, _, lower, _ = lp.arrays()
    n = lp.num_vars
    rows = np.vstack([a_leq, -np.eye(n)])
    rhs = np.concatenate([b_leq, -lower])
    combos = np.array(list(itertools.combinations(range(len(rows)), n)))
    mats = rows[combos]                      # (K, n, n)
    dets_ok = np.abs(np.linalg.det(mats)) > 1e-9
    mats = mats[dets_ok]
    vecs = rhs[combos[dets_ok]]
    pts = np.linalg.solve(mats, vecs[..., None])[..., 0]   # (K, n)
    feas = np.all(pts @ a_leq.T <= b_leq + 1e-9, axis=1) & np.all(
        pts >= lower - 1e-9, axis=1
    )
    if not feas.any():
        return None
    return float((pts[feas] @ c).max())


def _corpus(count, seed=2024):
    rng = SplitMix64(seed)
    out = []
    for _ in range(count):
        n = 1 + rng.randrange(6)
        m = rng.randrange(5)
        out.append(_random_lp(rng, n, m))
    return out


def test_objective_matches_vertex_enumeration_on_1000_random_lps():
    for i, lp in enumerate(_corpus(1000)):
        sol = solve(lp)
        assert sol.status is LpStatus.OPTIMAL, f"lp #{i}: {sol.status}"
        expect = _vertex_oracle(lp)
        assert expect is not None, f"lp #{i}: oracle found no vertex"
        assert abs(sol.objective_value - expect) <= 1e-6, (
            f"lp #{i}: solver {sol.objective_value} vs oracle {expect}"
        )


def test_repeated_solves_are_bit_identical():
    for lp in _corpus(100, seed=7):
        s1 = solve(lp, want_dual=True)
        s2 = solve(lp, want_dual=True)
        assert s1.objective_value == s2.objective_value  # exact equality
        assert np.array_equal(s1.values, s2.values)
        assert np.array_equal(s1.dual_leq, s2.dual_leq)


def test_duality_certificate_bounds_the_primal():
    """For max c.x, Ax <= b, x >= 0 the returned multipliers must be a
    feasible dual point, and its value must equal the primal optimum."""
    for i, lp in enumerate(_corpus(200, seed=99)):
        sol = solve(lp, want_dual=True)
        assert sol.status is LpStatus.OPTIMAL
        c, a_leq, b_leq, _, _, _, _ = lp.arrays()
        y = sol.dual_leq
        scale = 1.0 + float(np.abs(b_leq).max(initial=0.0))
        assert (y >= -1e-6 * scale).all(), f"lp #{i}: negative multiplier"
        # dual feasibility: A^T y >= c
        assert (a_leq.T @ y >= c - 1e-6 * scale).all(), f"lp #{i}"
        # weak duality (tight at the optimum)
        assert abs(float(y @ b_leq) - sol.objective_value) <= 1e-6 * scale, f"lp #{i}"


def test_feasibility_of_returned_point():
    for lp in _corpus(200, seed=13):
        sol = solve(lp)
        c, a_leq, b_leq, _, _, lower, _ = lp.arrays()
        x = sol.values
        assert (x >= lower - EPS_FEAS).all()
        assert (a_leq @ x <= b_leq + EPS_FEAS * (1.0 + np.abs(b_leq))).all()
