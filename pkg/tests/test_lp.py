import numpy as np
import pytest
from scipy.optimize import linprog

from consensus_seminorms.certify import feasibility_matrix
from consensus_seminorms.lp import (
    CertificateError,
    LinearProgram,
    SimplexError,
    StrictFeasibilityResult,
    chebyshev_center_lp,
    solve,
    strict_feasibility,
    verify_farkas,
)
from consensus_seminorms.products import random_stochastic


def lp_min_x_geq_3():
    return LinearProgram.build(objective=[1.0], a=[[1.0]], rhs=[3.0],
                               senses=[">="], lower=[-np.inf], upper=[np.inf])


class TestSolve:
    def test_min_x_geq_3(self, kernel_backend):
        out = solve(lp_min_x_geq_3())
        assert out.status == "optimal"
        assert out.objective == pytest.approx(3.0, abs=1e-9)
        # shadow price: raising the rhs raises the optimum one-for-one
        assert out.duals[0] == pytest.approx(1.0, abs=1e-9)

    def test_infeasible_with_dual_witness(self, kernel_backend):
        lp = LinearProgram.build(objective=[0.0], a=[[1.0]], rhs=[-1.0],
                                 senses=["<="])
        out = solve(lp)
        assert out.status == "infeasible"
        assert verify_farkas(lp, out.duals)

    def test_unbounded(self):
        lp = LinearProgram.build(objective=[-1.0], a=[[0.0]], rhs=[1.0],
                                 senses=["<="])
        assert solve(lp).status == "unbounded"

    def test_equality_and_box(self):
        # min x + y  s.t.  x + y = 1, x - y <= 0.2, 0 <= x,y <= 1
        lp = LinearProgram.build(objective=[1.0, 1.0],
                                 a=[[1.0, 1.0], [1.0, -1.0]],
                                 rhs=[1.0, 0.2], senses=["=", "<="],
                                 lower=[0, 0], upper=[1, 1])
        out = solve(lp)
        assert out.status == "optimal"
        assert out.objective == pytest.approx(1.0, abs=1e-9)

    def test_chebyshev_lp_counterexample_objective_one(self, counterexample_s, kernel_backend):
        out = solve(chebyshev_center_lp(counterexample_s.data))
        assert out.status == "optimal"
        assert out.objective == pytest.approx(1.0, abs=1e-9)

    def test_iteration_cap_reports_basis(self, counterexample_s):
        with pytest.raises(SimplexError) as err:
            solve(chebyshev_center_lp(counterexample_s.data), pivot_cap=3)
        assert err.value.basis is not None

    def test_mirror_bounds(self):
        # max x with x <= 4 expressed as min -x, bounds (-inf, 4]
        lp = LinearProgram.build(objective=[-1.0], a=[[1.0]], rhs=[10.0],
                                 senses=["<="], lower=[-np.inf], upper=[4.0])
        out = solve(lp)
        assert out.objective == pytest.approx(-4.0, abs=1e-9)

    def test_malformed_rejected(self):
        with pytest.raises(ValueError):
            LinearProgram.build(objective=[1.0, 2.0], a=[[1.0]], rhs=[1.0],
                                senses=["<="])
        with pytest.raises(ValueError):
            LinearProgram.build(objective=[1.0], a=[[1.0]], rhs=[1.0],
                                senses=["<"])
        with pytest.raises(ValueError):
            LinearProgram.build(objective=[1.0], a=[[1.0]], rhs=[1.0],
                                senses=["<="], lower=[2.0], upper=[1.0])


class TestAgainstScipy:
    def test_random_programs(self, rng):
        senses_pool = ["<=", ">=", "="]
        agree = 0
        for _ in range(60):
            m = int(rng.integers(1, 5))
            n = int(rng.integers(1, 5))
            a = rng.standard_normal((m, n))
            b = rng.standard_normal(m)
            c = rng.standard_normal(n)
            senses = [senses_pool[int(k)] for k in rng.integers(0, 3, m)]
            lp = LinearProgram.build(objective=c, a=a, rhs=b, senses=senses,
                                     lower=np.zeros(n), upper=np.full(n, 5.0))
            ours = solve(lp)
            a_ub, b_ub, a_eq, b_eq = [], [], [], []
            for i, s in enumerate(senses):
                if s == "<=":
                    a_ub.append(a[i]); b_ub.append(b[i])
                elif s == ">=":
                    a_ub.append(-a[i]); b_ub.append(-b[i])
                else:
                    a_eq.append(a[i]); b_eq.append(b[i])
            ref = linprog(c, A_ub=np.array(a_ub) if a_ub else None,
                          b_ub=np.array(b_ub) if b_ub else None,
                          A_eq=np.array(a_eq) if a_eq else None,
                          b_eq=np.array(b_eq) if b_eq else None,
                          bounds=[(0, 5.0)] * n, method="highs")
            if ref.status == 2:
                assert ours.status == "infeasible"
                assert verify_farkas(lp, ours.duals)
            else:
                assert ref.status == 0 and ours.status == "optimal"
                assert ours.objective == pytest.approx(ref.fun, abs=1e-7)
                agree += 1
        assert agree >= 20  # sanity: the pool is not all-infeasible


class TestStrictFeasibility:
    def test_all_positive_pattern(self):
        # [[S]] = 11' gives A = -11'; y = 1 has margin n
        n = 4
        a = -np.ones((n, n))
        res = strict_feasibility(a)
        assert res.feasible and res.margin > 0
        ones = np.ones(n)
        assert np.all(a @ ones <= -n + 1e-12)

    def test_identity_infeasible(self):
        a = np.ones((2, 2)) - 2 * np.eye(2)
        res = strict_feasibility(a)
        assert not res.feasible
        assert res.farkas_x is not None

    def test_counterexample_matrix_farkas_proportional(self, counterexample_s, kernel_backend):
        res = strict_feasibility(feasibility_matrix(counterexample_s))
        assert not res.feasible
        expected = np.array([0, 1, 1, 1, 1, 0], dtype=float)
        assert np.abs(res.farkas_x - expected).max() <= 1e-8

    def test_scaling_invariance(self, rng):
        for _ in range(20):
            s = random_stochastic(rng, int(rng.integers(2, 7)), density=0.6)
            a = feasibility_matrix(s)
            assert strict_feasibility(a).feasible == strict_feasibility(2 * a).feasible

    def test_soundness_rechecked_in_constructor(self):
        a = np.ones((2, 2)) - 2 * np.eye(2)
        with pytest.raises(CertificateError):
            StrictFeasibilityResult(a=a, feasible=True, margin=1.0,
                                    witness_y=np.ones(2))
        with pytest.raises(CertificateError):
            StrictFeasibilityResult(a=-np.ones((2, 2)), feasible=False,
                                    margin=0.0, farkas_x=np.ones(2))

    def test_rejects_rectangular(self):
        with pytest.raises(ValueError):
            strict_feasibility(np.ones((2, 3)))
