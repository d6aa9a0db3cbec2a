import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import airylab as al
from airylab.constants import THETA_NODES_DEFAULT
from airylab.core import DomainError

SQRT_63_8 = math.sqrt(63.0 / 8.0)  # binomial expansion of the q = 10 circle average


class TestThresholdConstant:
    def test_a6_both_routes(self, critical6):
        assert al.a_p_closed_form(critical6) == pytest.approx(2.5, abs=1e-12)
        assert al.a_p_quadrature(critical6) == pytest.approx(2.5, abs=1e-10)

    def test_a8(self, critical8):
        # Gamma(5/2) = 3 sqrt(pi)/4, Gamma(3) = 2 give exactly 9/4
        assert al.a_p_closed_form(critical8) == pytest.approx(2.25, abs=1e-12)
        assert al.a_p_quadrature(critical8) == pytest.approx(2.25, abs=1e-10)

    def test_a5(self):
        e = al.make_exponents(5.0, 0.2)
        assert al.a_p_closed_form(e) == pytest.approx(SQRT_63_8, abs=1e-10)
        assert al.a_p_quadrature(e) == pytest.approx(SQRT_63_8, abs=1e-10)

    @pytest.mark.parametrize("p", [4.5, 5.0, 6.0, 8.0, 12.0])
    def test_routes_agree_and_exceed_one(self, p):
        ap = al.compute_ap(al.make_exponents(p, 1.0 / p))
        assert ap.agreement <= 1e-8
        assert ap.gamma_form > 1.0 + 1e-3

    def test_quadrature_node_refinement(self, critical6):
        coarse = al.a_p_quadrature(critical6, nodes=16)
        fine = al.a_p_quadrature(critical6, nodes=4096)
        assert coarse == pytest.approx(fine, abs=1e-10)

    def test_requires_critical_triple(self):
        e = al.make_exponents(6.0, 0.1)
        with pytest.raises(DomainError):
            al.a_p_closed_form(e)
        with pytest.raises(DomainError):
            al.a_p_quadrature(e)

    def test_too_few_nodes_rejected(self, critical6):
        with pytest.raises(DomainError):
            al.a_p_quadrature(critical6, nodes=8)


class TestCircleAverages:
    def test_phi_at_zero_is_one(self):
        for q in (2.0, 3.0, 6.0, 11.5):
            assert al.phi_q(0.0, q) == pytest.approx(1.0, abs=1e-13)

    def test_phi_at_one_q6(self):
        assert al.phi_q(1.0, 6.0) == pytest.approx(2.5, abs=1e-10)

    def test_phi_q3_against_fine_quadrature(self):
        # oracle: same average at 1 << default node count via numpy directly
        theta = np.arange(1 << 20) * (2 * math.pi / (1 << 20))
        oracle = float(np.mean((1 + np.cos(theta)) ** 1.5))
        assert al.phi_q(1.0, 3.0) == pytest.approx(oracle, abs=1e-10)
        assert al.phi_q(0.5, 3.0) < al.phi_q(1.0, 3.0)

    @pytest.mark.parametrize("q", [3.0, 4.0, 6.0, 10.0])
    def test_phi_monotone_maximal_at_one(self, q):
        grid = np.linspace(0.0, 1.0, 101)
        vals = [al.phi_q(float(a), q) for a in grid]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
        assert vals[-1] == max(vals)

    def test_phi_domain(self):
        with pytest.raises(DomainError):
            al.phi_q(-0.1, 4.0)
        with pytest.raises(DomainError):
            al.phi_q(1.1, 4.0)
        with pytest.raises(DomainError):
            al.phi_q(0.5, 1.5)


class TestCosineAverage:
    def test_single_point(self):
        for q in (2.0, 3.5, 6.0):
            assert al.cosine_average(1.3 - 0.7j, 0.0, q) == pytest.approx(
                abs(1.3 - 0.7j) ** q, rel=1e-12)

    def test_equal_unit_points_q6(self):
        # (1/2pi) int (2 cos)^6 = 64 * 5/16 = 20
        assert al.cosine_average(1.0, 1.0, 6.0) == pytest.approx(20.0, rel=1e-12)

    @given(st.integers(0, 2 ** 32), st.sampled_from([3.0, 4.0, 6.0]))
    @settings(max_examples=80, deadline=None)
    def test_modulus_identity(self, seed, q):
        rng = np.random.default_rng(seed)
        z1 = complex(rng.normal(), rng.normal())
        z2 = complex(rng.normal(), rng.normal())
        m2 = abs(z1) ** 2 + abs(z2) ** 2
        if m2 < 1e-12:
            return
        a = 2 * abs(z1) * abs(z2) / m2
        lhs = al.cosine_average(z1, z2, q)
        rhs = m2 ** (q / 2) * al.phi_q(a, q)
        assert lhs == pytest.approx(rhs, rel=1e-10)

    @given(st.integers(0, 2 ** 32))
    @settings(max_examples=60, deadline=None)
    def test_dominated_by_threshold_constant(self, seed):
        rng = np.random.default_rng(seed)
        e = al.make_exponents(6.0, 1 / 6)
        ap = al.a_p_closed_form(e)
        z1 = complex(rng.normal(), rng.normal())
        z2 = complex(rng.normal(), rng.normal())
        m2 = abs(z1) ** 2 + abs(z2) ** 2
        assert al.cosine_average(z1, z2, e.q) <= ap ** (e.q / e.p) * m2 ** (e.q / 2) + 1e-10


def test_apvalue_rejects_disagreement():
    with pytest.raises(DomainError):
        al.APValue(p=6.0, q=6.0, gamma_form=2.5, quad_form=2.6)
    with pytest.raises(DomainError):
        al.APValue(p=6.0, q=6.0, gamma_form=0.9, quad_form=0.9)
