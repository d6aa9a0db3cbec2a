import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import airylab as al
from airylab.core import DomainError, simpson_weights, trapezoid_weights


class TestExponents:
    @pytest.mark.parametrize("p,gamma,q", [(6.0, 1 / 6, 6.0), (8.0, 1 / 8, 4.0),
                                           (5.0, 1 / 5, 10.0)])
    def test_critical_solutions(self, p, gamma, q):
        e = al.make_exponents(p, gamma)
        assert e.q == pytest.approx(q, rel=1e-12)
        assert e.critical
        assert abs(2.0 / e.p + 1.0 / e.q - 0.5) <= 1e-12

    def test_subcritical(self):
        e = al.make_exponents(6.0, 0.1)
        assert not e.critical
        assert abs(-e.gamma + 3.0 / e.p + 1.0 / e.q - 0.5) <= 1e-12

    @pytest.mark.parametrize("p,gamma", [(4.0, 0.1), (3.0, 0.2), (6.0, 0.5),
                                         (6.0, -0.6), (6.0, 0.0)])
    def test_rejects_bad_exponents(self, p, gamma):
        # gamma = 0 with p = 6 sits at the q = inf endpoint
        with pytest.raises(DomainError):
            al.make_exponents(p, gamma)

    @given(st.floats(4.2, 40.0), st.floats(0.0, 1.0))
    @settings(max_examples=100, deadline=None)
    def test_scaling_relation_always_holds(self, p, frac):
        gamma = (frac - 0.4) * min(1.0 / p + 0.4, 0.89)  # inside (-1/2, 1/p]
        gamma = min(gamma, 1.0 / p)
        try:
            e = al.make_exponents(p, gamma)
        except DomainError:
            return
        assert abs(-e.gamma + 3.0 / e.p + 1.0 / e.q - 0.5) <= 1e-12


class TestMass:
    def test_zero_profile(self):
        g = al.symmetric_grid(4.0, 33)
        assert al.l2_mass(al.FreqProfile(g, np.zeros(33, complex))) == 0.0

    def test_gaussian_mass(self, gauss_profile):
        # oracle: int exp(-xi^2) d xi = sqrt(pi)
        assert al.l2_mass(gauss_profile) == pytest.approx(math.sqrt(math.pi), abs=1e-6)

    def test_box_indicator(self):
        g = al.FreqGrid(-2.0, 3.0, 501)
        xi = g.nodes()
        u = al.FreqProfile(g, ((xi >= 0.0) & (xi < 1.0)).astype(complex))
        assert abs(al.l2_mass(u) - 1.0) <= g.step

    @given(st.integers(0, 2 ** 32))
    @settings(max_examples=50, deadline=None)
    def test_phase_invariance(self, seed):
        rng = np.random.default_rng(seed)
        g = al.symmetric_grid(3.0, 65)
        u = al.random_profile(g, rng)
        phase = np.exp(1j * rng.uniform(0, 2 * np.pi, 65))
        v = u.with_samples(u.samples * phase)
        assert al.l2_mass(v) == pytest.approx(al.l2_mass(u), rel=1e-12)

    def test_refinement_monotone_on_gaussian(self):
        errs = []
        for n in (9, 13, 17, 21, 25):
            u = al.gaussian_profile(al.symmetric_grid(8.0, n))
            errs.append(abs(al.l2_mass(u) - math.sqrt(math.pi)))
        assert all(a > b for a, b in zip(errs, errs[1:]))


class TestGridsAndFields:
    def test_freq_grid_validation(self):
        with pytest.raises(DomainError):
            al.FreqGrid(1.0, 1.0, 8)
        with pytest.raises(DomainError):
            al.FreqGrid(0.0, 1.0, 1)

    def test_weights_sum_to_length(self):
        g = al.FreqGrid(-1.0, 3.0, 41)
        assert g.weights().sum() == pytest.approx(4.0, rel=1e-14)
        assert simpson_weights(41, 0.1).sum() == pytest.approx(4.0, rel=1e-12)
        with pytest.raises(DomainError):
            simpson_weights(40, 0.1)

    def test_profile_shape_and_finiteness(self):
        g = al.symmetric_grid(1.0, 9)
        with pytest.raises(DomainError):
            al.FreqProfile(g, np.zeros(8, complex))
        bad = np.zeros(9, complex)
        bad[3] = np.nan
        with pytest.raises(DomainError):
            al.FreqProfile(g, bad)

    def test_field_rejects_nonfinite(self):
        sg = al.SpaceTimeGrid(0, 1, 3, 0, 1, 3, "simpson")
        vals = np.zeros((3, 3), complex)
        vals[1, 1] = np.inf
        with pytest.raises(DomainError):
            al.SpaceTimeField(sg, vals)

    def test_simpson_needs_odd_counts(self):
        with pytest.raises(DomainError):
            al.SpaceTimeGrid(0, 1, 4, 0, 1, 5, "simpson")

    def test_conjugate_symmetry_flag(self):
        g = al.symmetric_grid(2.0, 17)
        xi = g.nodes()
        u = al.FreqProfile(g, np.exp(-xi ** 2) * (1 + 0j))
        assert u.is_conjugate_symmetric()
        v = al.FreqProfile(g, np.exp(1j * xi))  # e^{i xi} mirrors to e^{-i xi}
        assert v.is_conjugate_symmetric()
        w = al.FreqProfile(g, 1j * np.exp(-xi ** 2))
        assert not w.is_conjugate_symmetric()


class TestCsvRoundTrip:
    def test_profile_roundtrip(self, tmp_path):
        rng = np.random.default_rng(11)
        u = al.random_profile(al.symmetric_grid(3.0, 33), rng)
        path = tmp_path / "prof.csv"
        al.write_profile_csv(path, u)
        v = al.read_profile_csv(path)
        assert v.grid.n == u.grid.n
        assert np.max(np.abs(v.samples - u.samples)) == 0.0
        assert (tmp_path / "prof.csv.json").exists()

    def test_field_export(self, tmp_path):
        sg = al.SpaceTimeGrid(0, 1, 3, 0, 1, 4)
        F = al.SpaceTimeField(sg, np.arange(12, dtype=complex).reshape(3, 4))
        path = tmp_path / "field.csv"
        al.write_field_csv(path, F)
        lines = path.read_text().splitlines()
        assert lines[0] == "t,x,re,im"
        assert len(lines) == 1 + 12

    def test_rejects_nonuniform_nodes(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("xi,re,im\n0.0,1.0,0.0\n0.5,1.0,0.0\n2.0,1.0,0.0\n")
        with pytest.raises(DomainError):
            al.read_profile_csv(path)
