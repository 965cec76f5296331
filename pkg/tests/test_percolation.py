import math

import numpy as np
import pytest

from planar_sis.geometry import TorusDomain
from planar_sis.percolation import (lambert_q, pi_recursion, cluster_constants,
                                    empirical_q, MU_STAR)


def bisect_oracle(mu, lo=1e-9, hi=1.0, iters=200):
    f = lambda q: q - 1 + math.exp(-mu * q)
    while f(lo) <= 0 and lo < 0.5:
        lo *= 2
    lo /= 2
    for _ in range(iters):
        m = 0.5 * (lo + hi)
        if f(lo) * f(m) <= 0:
            hi = m
        else:
            lo = m
    return 0.5 * (lo + hi)


class TestLambert:
    def test_at_and_below_threshold(self):
        assert lambert_q(1.0) == 0.0
        assert lambert_q(0.5) == 0.0
        assert lambert_q(0.0) == 0.0

    def test_known_value_mu2(self):
        assert lambert_q(2.0) == pytest.approx(0.79681, abs=1e-5)
        assert lambert_q(2.0) == pytest.approx(bisect_oracle(2.0), abs=1e-11)

    def test_high_mean_degree(self):
        q = lambert_q(12.566)
        assert q == pytest.approx(0.9999965, abs=1e-6)

    def test_residual_below_tolerance_across_range(self):
        for mu in np.linspace(0.0, 20.0, 201):
            q = lambert_q(float(mu))
            if mu > 1:
                assert abs(q - 1 + math.exp(-mu * q)) < 1e-12

    def test_monotone_in_mu(self):
        qs = [lambert_q(m) for m in np.linspace(1.0, 15.0, 60)]
        assert all(b >= a for a, b in zip(qs, qs[1:]))

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            lambert_q(-0.1)


class TestPiRecursion:
    def test_inside_radius_is_one(self):
        prof = pi_recursion(1.0, 1.0)
        assert np.all(prof.values[prof.radii <= 1.0] == 1.0)

    def test_tail_converges_to_lambert_q(self):
        lam, a = 1.0, 1.2
        prof = pi_recursion(lam, a, r_max=14.0 * a)
        q = lambert_q(lam * math.pi * a * a)
        assert abs(prof.values[-1] - q) < 1e-6
        assert prof(100.0) == pytest.approx(q)

    def test_subcritical_trivial_fixed_point(self):
        prof = pi_recursion(0.2, 1.0)  # mu ~ 0.63 < 1
        assert np.all(prof.values[prof.radii > 1.0] == 0.0)

    def test_cluster_pcf_exhibits_attraction(self):
        ca = cluster_constants(1.0, 1.3)
        c_r = ca.c_radial()
        assert np.all(c_r.values >= 1.0 - 1e-9)

    def test_pi_nonincreasing_beyond_radius(self):
        prof = pi_recursion(1.0, 1.3)
        outside = prof.values[prof.radii > 1.3]
        assert np.all(np.diff(outside) <= 1e-9)


class TestClusterConstants:
    def test_far_supercritical(self):
        ca = cluster_constants(1.0, 2.0, with_profile=False)
        assert ca.c == pytest.approx(1.0000035, abs=1e-6)
        assert ca.defined

    def test_moderate(self):
        ca = cluster_constants(2.0 / math.pi, 1.0, with_profile=False)  # mu = 2
        assert ca.c == pytest.approx(1.0 / 0.79681, abs=1e-4)
        assert ca.mu_tilde == pytest.approx(2 * 0.79681, abs=1e-4)

    def test_subcritical_flagged(self):
        ca = cluster_constants(0.2, 1.0, with_profile=False)
        assert ca.q == 0.0 and not ca.defined
        assert math.isinf(ca.c)
        with pytest.raises(ValueError):
            ca.c_radial()


class TestEmpiricalQ:
    def test_union_find_far_above_threshold(self):
        # mean degree 6.28: nearly everything joins one cluster
        lam = 6.28 / math.pi
        q = empirical_q(lam, 1.0, TorusDomain(40.0), seed=123, n_samples=3)
        assert abs(q - 0.99) < 0.01

    def test_union_find_subcritical(self):
        q = empirical_q(0.3, 1.0, TorusDomain(30.0), seed=5, n_samples=2)
        assert q < 0.2

    def test_percolation_threshold_constant(self):
        assert MU_STAR == pytest.approx(4.512)
