"""Unit tests for the determinant-maximization interior-point solver."""

import numpy as np
import pytest

from srbeam import detmax, oracle


def _lp_max_z(bound=3.0):
    """maximize z subject to z <= bound."""
    return detmax.DetmaxProblem(
        c=np.array([1.0]), a_ub=np.array([[1.0]]), b_ub=np.array([bound])
    )


def _logdet_box_problem():
    """maximize r s.t. ln det(q I2) >= r, 0 <= q <= 2 over z = (q, r)."""
    coeffs = np.zeros((2, 2, 2), dtype=complex)
    coeffs[0] = np.eye(2)
    con = detmax.LogDetConstraint(
        base=np.zeros((2, 2), dtype=complex),
        coeffs=coeffs,
        lin=np.array([0.0, 1.0]),
        offset=0.0,
    )
    a_ub = np.array([[1.0, 0.0], [-1.0, 0.0]])
    b_ub = np.array([2.0, 0.0])
    return detmax.DetmaxProblem(np.array([0.0, 1.0]), [con], [], a_ub, b_ub)


class TestValidation:
    def test_rejects_non_hermitian_coefficients(self):
        coeffs = np.zeros((1, 2, 2), dtype=complex)
        coeffs[0] = np.array([[0.0, 1.0], [0.0, 0.0]])
        with pytest.raises(ValueError):
            detmax.DetmaxProblem(
                np.array([1.0]),
                [detmax.LogDetConstraint(np.eye(2), coeffs, np.zeros(1), 0.0)],
            )

    def test_rejects_inconsistent_linear_rows(self):
        with pytest.raises(ValueError):
            detmax.DetmaxProblem(
                np.array([1.0]), a_ub=np.array([[1.0, 2.0]]), b_ub=np.array([1.0])
            )


class TestPhase1:
    def test_single_linear_bound(self):
        z = detmax.phase1_find_strictly_feasible(_lp_max_z(1.0))
        assert z is not None
        assert z[0] < 1.0

    def test_contradictory_bounds_infeasible(self):
        # ln det(z I2) >= 0 needs z >= 1, contradicting z <= 0.5
        coeffs = np.zeros((1, 2, 2), dtype=complex)
        coeffs[0] = np.eye(2)
        con = detmax.LogDetConstraint(
            np.zeros((2, 2), dtype=complex), coeffs, np.zeros(1), 0.0
        )
        prob = detmax.DetmaxProblem(
            np.array([1.0]), [con], [], np.array([[1.0]]), np.array([0.5])
        )
        assert detmax.phase1_find_strictly_feasible(prob) is None
        report = detmax.solve(prob)
        assert report.status == detmax.INFEASIBLE

    def test_returned_point_strictly_feasible(self):
        prob = _logdet_box_problem()
        z = detmax.phase1_find_strictly_feasible(prob)
        assert z is not None
        assert detmax.is_strictly_feasible(prob, z)


class TestSolve:
    def test_linear_program(self):
        report = detmax.solve(_lp_max_z(3.0))
        assert report.status == detmax.OPTIMAL
        assert report.z_star[0] == pytest.approx(3.0, abs=1e-7)

    def test_logdet_box(self):
        report = detmax.solve(_logdet_box_problem())
        assert report.status == detmax.OPTIMAL
        q, r = report.z_star
        assert q == pytest.approx(2.0, abs=1e-6)
        assert r == pytest.approx(2.0 * np.log(2.0), abs=1e-6)

    def test_optimal_point_satisfies_constraints(self):
        prob = _logdet_box_problem()
        report = detmax.solve(prob)
        assert detmax.constraint_margins(prob, report.z_star) >= -1e-7

    def test_objective_scaling_consistency(self):
        base = detmax.solve(_lp_max_z(3.0)).objective_value
        eps = 1e-3
        scaled_prob = detmax.DetmaxProblem(
            c=np.array([1.0 + eps]), a_ub=np.array([[1.0]]), b_ub=np.array([3.0])
        )
        scaled = detmax.solve(scaled_prob).objective_value
        assert abs(scaled) <= (1.0 + eps) * abs(base) + 1e-6

    def test_centering_monotone_within_stage(self):
        report = detmax.solve(_logdet_box_problem())
        for stage in report.stage_objectives:
            phis = stage["phi"]
            for a, b in zip(phis, phis[1:]):
                assert b <= a + 1e-7


class TestBarrierCalculus:
    def _random_problem(self, rng):
        n = 3
        coeffs = np.zeros((n, 2, 2), dtype=complex)
        for k in range(n):
            b = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
            coeffs[k] = 0.5 * (b + b.conj().T)
        con = detmax.LogDetConstraint(
            3.0 * np.eye(2, dtype=complex), coeffs, 0.1 * rng.standard_normal(n), -1.0
        )
        lmi = detmax.LmiConstraint(2.0 * np.eye(2, dtype=complex), coeffs.copy())
        a_ub = rng.standard_normal((2, n))
        b_ub = np.array([5.0, 5.0])
        return detmax.DetmaxProblem(rng.standard_normal(n), [con], [lmi], a_ub, b_ub)

    def test_gradient_matches_finite_differences(self, rng):
        prob = self._random_problem(rng)
        hits = 0
        for _ in range(20):
            z = 0.05 * rng.standard_normal(prob.n)
            if detmax.barrier_value(prob, z) is None:
                continue
            hits += 1

            def fn(zz):
                out = detmax.barrier_gradient(prob, zz)
                assert out is not None
                return out

            assert oracle.finite_diff_check(fn, z, step=1e-6) <= 1e-5
        assert hits >= 10

    def test_hessian_matches_gradient_differences(self, rng):
        prob = self._random_problem(rng)
        z = np.zeros(prob.n)
        _, grad, hess = detmax.barrier_full(prob, z)
        step = 1e-6
        for k in range(prob.n):
            zp, zm = z.copy(), z.copy()
            zp[k] += step
            zm[k] -= step
            _, gp = detmax.barrier_gradient(prob, zp)
            _, gm = detmax.barrier_gradient(prob, zm)
            col = (gp - gm) / (2.0 * step)
            scale = max(1.0, float(np.max(np.abs(hess[:, k]))))
            assert np.max(np.abs(col - hess[:, k])) / scale <= 1e-4
