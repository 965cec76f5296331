import math
from fractions import Fraction

import numpy as np
import pytest

from planar_sis import closures
from planar_sis.closures import (bayes_independent_exponents,
                                 geometric_mean, mixture,
                                 eval_mu_psipsi, eval_mu_psiphi, get_closure,
                                 registered_names)
from planar_sis.functional import RadialFunction, PcfTriple


def const_triple(w=1.0, v=1.0, z=1.0, h=0.05, n=200):
    return PcfTriple(
        xi_psi_phi=RadialFunction.constant(h, n, w, tail=w),
        xi_phi_phi=RadialFunction.constant(h, n, v, tail=v),
        xi_psi_psi=RadialFunction.constant(h, n, z, tail=z))


REGISTERED = ["a1", "b0.5i", "b0i", "b1g1", "b1i", "binfi", "g1", "m2bi",
              "m3bi", "minfbg1", "minfbi"]


class TestRegistry:
    def test_catalog_is_exactly_the_registered_set(self):
        assert registered_names() == REGISTERED

    def test_unknown_name_lists_codes(self):
        with pytest.raises(KeyError, match="b1i"):
            get_closure("nope")


class TestExactnessUnderIndependence:
    @pytest.mark.parametrize("name", REGISTERED)
    def test_all_ones_gives_lambda_p(self, name):
        spec = get_closure(name)
        pcf = const_triple()
        rng = np.random.default_rng(4)
        for _ in range(20):
            r = float(rng.random() * 3)
            x = rng.standard_normal(2) * 2
            assert eval_mu_psipsi(spec, pcf, 0.7, r, x) == pytest.approx(0.7, abs=1e-12)
            assert eval_mu_psiphi(spec, pcf, 0.7, r, x) == pytest.approx(0.7, abs=1e-12)


class TestExponentBookkeeping:
    @pytest.mark.parametrize("k,l", [(1, 1), (2, 1), (1, 2), (3, 5), (1, Fraction(1, 2))])
    def test_bayes_independent_exponents(self, k, l):
        pp, pf = bayes_independent_exponents(k, l)
        k, l = Fraction(k), Fraction(l)
        den = k + 2 * l
        assert pp == ((k + l) / den, (k + l) / den, -k / den)
        assert pf == ((k + l) / den, 2 * l / den, -l / den)

    def test_limit_members(self):
        pp, pf = bayes_independent_exponents(math.inf, 1)
        assert (pp, pf) == ((1, 1, -1), (1, 0, 0))
        pp, pf = bayes_independent_exponents(1, math.inf)
        assert pp == (Fraction(1, 2), Fraction(1, 2), 0)
        assert pf == (Fraction(1, 2), 1, Fraction(-1, 2))

    def test_b1g1_exponents(self):
        spec = get_closure("b1g1")
        (t,) = spec.terms_psi_phi
        assert (t.ex, t.ey, t.er) == (pytest.approx(2 / 3),
                                      pytest.approx(1 / 2),
                                      pytest.approx(-1 / 6))
        (t,) = spec.terms_psi_psi
        assert (t.ex, t.ey, t.er) == (pytest.approx(5 / 6),
                                      pytest.approx(2 / 3),
                                      pytest.approx(-1 / 2))

    def test_invalid_families_rejected(self):
        with pytest.raises(ValueError):
            bayes_independent_exponents(0, 0)
        with pytest.raises(ValueError):
            bayes_independent_exponents(math.inf, math.inf)
        with pytest.raises(ValueError):
            geometric_mean(1.5)


class TestKnownIdentities:
    def test_b0i_psipsi_plateau_identity(self):
        # constant w, z: the two-susceptible conditional density is lp*w^2/z
        w, z = 0.7, 0.85
        pcf = const_triple(w=w, v=1.3, z=z)
        spec = get_closure("b0i")
        val = eval_mu_psipsi(spec, pcf, 2.0, 0.4, (0.2, 0.1))
        assert val == pytest.approx(2.0 * w * w / z, rel=1e-12)

    def test_b1i_psiphi_plateau_identity(self):
        # lp * w^(2/3) v^(2/3) / w^(1/3) = lp * w^(1/3) v^(2/3)
        w, v = 0.8, 1.4
        pcf = const_triple(w=w, v=v, z=0.9)
        spec = get_closure("b1i")
        val = eval_mu_psiphi(spec, pcf, 1.5, 0.3, (0.1, 0.05))
        assert val == pytest.approx(1.5 * w ** (1 / 3) * v ** (2 / 3), rel=1e-12)

    def test_m2bi_is_average_of_b0i_and_binfi(self):
        rng = np.random.default_rng(8)
        m2bi = get_closure("m2bi")
        b0i = get_closure("b0i")
        binfi = get_closure("binfi")
        h = 0.05
        for _ in range(50):
            vals = np.clip(rng.lognormal(0, 0.3, size=(3, 100)), 0.05, None)
            pcf = PcfTriple(RadialFunction(h, vals[0]), RadialFunction(h, vals[1]),
                            RadialFunction(h, vals[2]))
            r = float(rng.random() * 2)
            x = rng.standard_normal(2)
            for f in (eval_mu_psipsi, eval_mu_psiphi):
                got = f(m2bi, pcf, 1.0, r, x)
                want = 0.5 * f(b0i, pcf, 1.0, r, x) + 0.5 * f(binfi, pcf, 1.0, r, x)
                assert got == pytest.approx(want, rel=1e-12)

    def test_b1g1_against_direct_reimplementation(self):
        rng = np.random.default_rng(9)
        spec = get_closure("b1g1")
        h = 0.05
        for _ in range(50):
            vals = np.clip(rng.lognormal(0, 0.3, size=(3, 100)), 0.05, None)
            pcf = PcfTriple(RadialFunction(h, vals[0]), RadialFunction(h, vals[1]),
                            RadialFunction(h, vals[2]))
            r = float(rng.random() * 2)
            x = rng.standard_normal(2)
            rx = math.hypot(x[0], x[1])
            ry = math.hypot(x[0] - r, x[1])
            want = (pcf.xi_psi_phi(rx) ** (2 / 3) * pcf.xi_phi_phi(ry) ** (1 / 2)
                    * pcf.xi_psi_phi(r) ** (-1 / 6))
            got = eval_mu_psiphi(spec, pcf, 1.0, r, x)
            assert got == pytest.approx(want, rel=1e-12)

    def test_integral_mixtures_match_quadrature_oracle(self):
        # minfbi psi-phi: integral over eta of w^eta v^(2-2eta) wr^(eta-1)
        spec = get_closure("minfbi")
        w, v, wr = 0.8, 1.3, 0.75
        pcf = const_triple(w=w, v=v, z=0.9)
        # fine trapezoid oracle
        etas = np.linspace(0, 1, 20001)
        vals = w ** etas * v ** (2 * (1 - etas)) * wr ** (etas - 1)
        # cross PCF at r equals w here (constant function)
        vals = w ** etas * v ** (2 * (1 - etas)) * w ** (etas - 1)
        want = np.trapezoid(vals, etas)
        # the trapezoid oracle itself carries ~1e-9 discretization error
        got = eval_mu_psiphi(spec, pcf, 1.0, 0.5, (0.2, 0.2))
        assert got == pytest.approx(float(want), rel=1e-7)


class TestMixtures:
    def test_weights_must_sum_to_one(self):
        b0i = get_closure("b0i")
        with pytest.raises(ValueError):
            mixture([(0.4, b0i), (0.4, b0i)])

    def test_mixture_is_affine_in_components(self):
        b0i, b1i = get_closure("b0i"), get_closure("b1i")
        mix = mixture([(0.25, b0i), (0.75, b1i)])
        pcf = const_triple(w=0.6, v=1.5, z=0.8)
        got = eval_mu_psiphi(mix, pcf, 1.0, 0.3, (0.1, 0.0))
        want = (0.25 * eval_mu_psiphi(b0i, pcf, 1.0, 0.3, (0.1, 0.0))
                + 0.75 * eval_mu_psiphi(b1i, pcf, 1.0, 0.3, (0.1, 0.0)))
        assert got == pytest.approx(want, rel=1e-14)

    def test_arithmetic_mean_terms(self):
        a1 = get_closure("a1")
        w = 0.5
        pcf = const_triple(w=w, v=2.0, z=1.0)
        # psi-psi: (w + w)/2 = w;  psi-phi: (w + v)/2
        assert eval_mu_psipsi(a1, pcf, 1.0, 0.2, (0.1, 0.0)) == pytest.approx(w)
        assert eval_mu_psiphi(a1, pcf, 1.0, 0.2, (0.1, 0.0)) == pytest.approx(
            0.5 * (w + 2.0))


class TestSingularGuard:
    def test_zero_pcf_in_denominator_is_floored(self):
        pcf = const_triple(w=0.5, v=1.0, z=0.0)
        spec = get_closure("b0i")  # has xi_ss^(-1)
        val = eval_mu_psipsi(spec, pcf, 1.0, 0.2, (0.1, 0.0))
        assert math.isfinite(val)
        assert val == pytest.approx(0.25 / closures.EPS, rel=1e-9)
