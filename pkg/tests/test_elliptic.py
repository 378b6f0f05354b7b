import cmath
import math

import numpy as np
import pytest

from xyzgaudin.elliptic import (
    ModulusContext,
    branch_points,
    half_period_bar,
    theta,
    theta_deriv,
    w_coeff,
    weierstrass_p,
    weierstrass_zeta,
    zeta_shift_coeff,
)
from xyzgaudin.errors import PoleError, TruncationError

import oracles

CHARS = [(0, 0), (0, 1), (1, 0), (1, 1)]


class TestTheta:
    def test_theta11_odd_vanishes_at_origin(self, ctx_i):
        assert abs(theta((1, 1), 0.0, ctx_i)) < 1e-14

    def test_matches_bruteforce_series(self, ctx_i):
        ref = oracles.theta_series((0, 0), 0.3, 1j, 2 * ctx_i.term_bound)
        assert abs(theta((0, 0), 0.3, ctx_i) - ref) < 1e-12

    def test_matches_bruteforce_at_random_complex_points(self, ctx_i, rng):
        for _ in range(12):
            z = complex(rng.uniform(-1, 1), rng.uniform(-0.9, 0.9))
            for ch in CHARS:
                ref = oracles.theta_series(ch, z, 1j, 2 * ctx_i.term_bound)
                assert abs(theta(ch, z, ctx_i) - ref) < 1e-11

    def test_shift_by_one_flips_theta10(self, ctx_i, rng):
        for _ in range(20):
            z = complex(rng.uniform(-1, 1), rng.uniform(-0.8, 0.8))
            lhs = theta((1, 0), z + 1, ctx_i)
            ref = -oracles.theta_series((1, 0), z, 1j, 2 * ctx_i.term_bound)
            assert abs(lhs - ref) < 1e-11

    def test_vectorized_matches_scalar(self, ctx_i, rng):
        zs = rng.uniform(-1, 1, 5) + 1j * rng.uniform(-0.5, 0.5, 5)
        vec = theta((0, 1), zs, ctx_i)
        for z, v in zip(zs, vec):
            assert abs(v - theta((0, 1), complex(z), ctx_i)) < 1e-14

    def test_invalid_characteristic_rejected(self, ctx_i):
        with pytest.raises(ValueError):
            theta((2, 0), 0.1, ctx_i)
        with pytest.raises(ValueError):
            theta("ab", 0.1, ctx_i)

    def test_modulus_validation(self):
        with pytest.raises(ValueError):
            ModulusContext(-1j)
        with pytest.raises(TruncationError):
            ModulusContext(1j, tol=1e-18)

    def test_tail_bound_invariant(self, ctx_i, ctx_08):
        for ctx in (ctx_i, ctx_08):
            q = abs(cmath.exp(1j * cmath.pi * ctx.tau))
            assert q ** (ctx.term_bound**2) < ctx.tol


class TestThetaDeriv:
    def test_theta11_prime_origin_real_pi_multiple(self, ctx_i):
        val = theta_deriv((1, 1), 1, 0.0, ctx_i)
        assert abs(val.imag) < 1e-12
        assert abs(val) > 1.0
        fd = oracles.central_diff(lambda z: theta((1, 1), z, ctx_i), 0.0, 1e-5)
        assert abs(val - fd) < 1e-8

    def test_even_theta_has_flat_origin(self, ctx_i):
        assert abs(theta_deriv((0, 0), 1, 0.0, ctx_i)) < 1e-13

    def test_odd_theta_second_derivative_origin(self, ctx_i):
        assert abs(theta_deriv((1, 1), 2, 0.0, ctx_i)) < 1e-12

    def test_higher_orders_match_finite_differences(self, ctx_i, rng):
        z = complex(rng.uniform(-0.4, 0.4), rng.uniform(0.1, 0.6))
        d2 = oracles.second_diff(lambda y: theta((1, 1), y, ctx_i), z, 1e-4)
        assert abs(theta_deriv((1, 1), 2, z, ctx_i) - d2) < 1e-6
        d3 = oracles.richardson_diff(
            lambda y: theta_deriv((1, 1), 2, y, ctx_i), z, 1e-3
        )
        assert abs(theta_deriv((1, 1), 3, z, ctx_i) - d3) < 1e-7

    def test_unsupported_order(self, ctx_i):
        with pytest.raises(ValueError):
            theta_deriv((1, 1), 4, 0.1, ctx_i)


class TestWCoeff:
    def test_unit_residue_at_origin(self, ctx_i):
        for a in (1, 2, 3):
            v1 = 1e-3 * w_coeff(a, 1e-3, ctx_i)
            v2 = 1e-4 * w_coeff(a, 1e-4, ctx_i)
            extrap = v2 + (v2 - v1) / 99.0  # Richardson in u^2
            assert abs(extrap - 1.0) < 1e-9

    def test_matches_theta_composition(self, ctx_i):
        tb = 2 * ctx_i.term_bound
        num = oracles.theta_series_deriv((1, 1), 1, 0.0, 1j, tb)
        ref = (
            num
            / oracles.theta_series((1, 0), 0.0, 1j, tb)
            * oracles.theta_series((1, 0), 0.3, 1j, tb)
            / oracles.theta_series((1, 1), 0.3, 1j, tb)
        )
        assert abs(w_coeff(1, 0.3, ctx_i) - ref) < 1e-11

    def test_w3_antiperiodic_under_unit_shift(self, ctx_i, rng):
        for _ in range(5):
            u = complex(rng.uniform(-0.4, 0.4), rng.uniform(0.1, 0.7))
            assert abs(w_coeff(3, u + 1, ctx_i) + w_coeff(3, u, ctx_i)) < 1e-10

    def test_pole_guard(self, ctx_i):
        with pytest.raises(PoleError):
            w_coeff(1, 1e-12, ctx_i)
        with pytest.raises(PoleError):
            w_coeff(2, 1 + 1j + 1e-10, ctx_i)


class TestWeierstrass:
    def test_p_laurent_normalization(self, ctx_i):
        r1 = weierstrass_p(1e-2, ctx_i) - 1e4
        r2 = weierstrass_p(1e-3, ctx_i) - 1e6
        # residual is g2/20 * u^2 + O(u^4): one decade in u gives 1e-2 in ratio
        assert abs(r1) < 1e-2
        assert abs(r2) < 1e-4
        assert abs(r2 / r1 - 1e-2) < 1e-4

    def test_zeta_is_odd(self, ctx_i, rng):
        pts = oracles.random_cell_points(rng, ctx_i, 10)
        for u in pts:
            assert abs(weierstrass_zeta(-u, ctx_i) + weierstrass_zeta(u, ctx_i)) < 1e-11

    def test_differential_equation(self, ctx_i, rng):
        e1, e2, e3 = branch_points(ctx_i)
        g2 = -4.0 * (e1 * e2 + e2 * e3 + e3 * e1)
        g3 = 4.0 * e1 * e2 * e3
        pts = oracles.random_cell_points(rng, ctx_i, 5, min_lattice_dist=0.2)
        for u in pts:
            p = weierstrass_p(u, ctx_i)
            dp = oracles.richardson_diff(lambda y: weierstrass_p(y, ctx_i), u, 1e-3)
            lhs = dp**2
            rhs = 4 * p**3 - g2 * p - g3
            assert abs(lhs - rhs) / max(1.0, abs(rhs)) < 1e-9

    def test_pole_guard(self, ctx_i):
        with pytest.raises(PoleError):
            weierstrass_p(0.0, ctx_i)


class TestBranchPoints:
    def test_sum_vanishes(self, ctx_i, ctx_08):
        for ctx in (ctx_i, ctx_08):
            assert abs(sum(branch_points(ctx))) < 1e-10

    def test_consistent_with_p_at_half_periods(self, ctx_i):
        es = branch_points(ctx_i)
        for a, e in zip((1, 2, 3), es):
            assert abs(e - weierstrass_p(half_period_bar(a, ctx_i), ctx_i)) < 1e-12

    def test_distinct_for_generic_modulus(self, ctx_08):
        e1, e2, e3 = branch_points(ctx_08)
        assert min(abs(e1 - e2), abs(e2 - e3), abs(e1 - e3)) > 1e-3


class TestZetaShiftCoeff:
    def test_zero_shift(self, ctx_i):
        for a in (1, 2, 3):
            assert abs(zeta_shift_coeff(a, 0.0, ctx_i)) < 1e-12

    def test_direct_zeta_evaluation(self, ctx_i, rng):
        for a in (1, 2, 3):
            d = complex(rng.uniform(0.1, 0.3), rng.uniform(0.05, 0.25))
            w = half_period_bar(a, ctx_i)
            direct = weierstrass_zeta(d + w, ctx_i) - weierstrass_zeta(w, ctx_i)
            assert abs(zeta_shift_coeff(a, d, ctx_i) - direct) < 1e-12
            # reflection pairing built from two direct evaluations
            total = zeta_shift_coeff(a, d, ctx_i) + zeta_shift_coeff(a, -d, ctx_i)
            ref = (
                weierstrass_zeta(w + d, ctx_i)
                + weierstrass_zeta(w - d, ctx_i)
                - 2 * weierstrass_zeta(w, ctx_i)
            )
            assert abs(total - ref) < 1e-12

    def test_quadrature_oracle(self, ctx_i):
        # zeta difference equals minus the integral of p along a pole-free path
        for a, d in ((1, 0.21 + 0.13j), (2, 0.1 - 0.17j), (3, 0.25 + 0.03j)):
            w = half_period_bar(a, ctx_i)
            integral = oracles.segment_integral(
                lambda u: weierstrass_p(u, ctx_i), w, w + d
            )
            assert abs(zeta_shift_coeff(a, d, ctx_i) + integral) < 1e-8


class TestInvariants:
    def test_quasi_periodicity_all_characteristics(self, ctx_i, rng):
        tau = ctx_i.tau
        for _ in range(50):
            z = complex(rng.uniform(-1, 1), rng.uniform(-0.8, 0.8))
            for a, b in CHARS:
                base = theta((a, b), z, ctx_i)
                f1 = cmath.exp(1j * math.pi * a)
                ftau = cmath.exp(-1j * math.pi * tau - 2j * math.pi * z - 1j * math.pi * b)
                v1 = theta((a, b), z + 1, ctx_i)
                vtau = theta((a, b), z + tau, ctx_i)
                assert abs(v1 - f1 * base) / abs(v1) < 1e-10
                assert abs(vtau - ftau * base) / abs(vtau) < 1e-10

    def test_quasi_periodicity_factors_from_series(self, ctx_i, rng):
        # the reference factors themselves are reproduced by the raw series
        tb = 2 * ctx_i.term_bound
        for _ in range(5):
            z = complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.4, 0.4))
            for ch in CHARS:
                s0 = oracles.theta_series(ch, z, 1j, tb)
                s1 = oracles.theta_series(ch, z + 1, 1j, tb)
                stau = oracles.theta_series(ch, z + 1j, 1j, tb)
                a, b = ch
                f1 = cmath.exp(1j * math.pi * a)
                ftau = cmath.exp(-1j * math.pi * 1j - 2j * math.pi * z - 1j * math.pi * b)
                assert abs(s1 / s0 - f1) < 1e-9
                assert abs(stau / s0 - ftau) < 1e-9

    def test_parity_signs(self, ctx_i, rng):
        for _ in range(20):
            z = complex(rng.uniform(-0.7, 0.7), rng.uniform(-0.6, 0.6))
            for a, b in CHARS:
                sign = -1.0 if (a, b) == (1, 1) else 1.0
                lhs = theta((a, b), -z, ctx_i)
                rhs = sign * theta((a, b), z, ctx_i)
                assert abs(lhs - rhs) / max(1.0, abs(rhs)) < 1e-12

    def test_zeta_prime_is_minus_p(self, ctx_i, rng):
        pts = oracles.random_cell_points(rng, ctx_i, 20, min_lattice_dist=0.15)
        for u in pts:
            dz = oracles.central_diff(lambda y: weierstrass_zeta(y, ctx_i), u, 1e-5)
            p = weierstrass_p(u, ctx_i)
            assert abs(dz + p) / max(1.0, abs(p)) < 1e-6

    def test_w_coeff_square_differences_constant(self, ctx_i, rng):
        us = oracles.random_cell_points(rng, ctx_i, 10, min_lattice_dist=0.2)
        for a, b in ((1, 2), (2, 3), (1, 3)):
            vals = np.array(
                [w_coeff(a, u, ctx_i) ** 2 - w_coeff(b, u, ctx_i) ** 2 for u in us]
            )
            assert np.var(vals.real) + np.var(vals.imag) < 1e-9
