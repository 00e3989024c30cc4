import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cycleflow import (
    CycleGeometry,
    Params,
    Point2,
    certify_annulus,
    decay_check,
    find_limit_cycle,
    jacobian,
    quadratic_form,
    remainder,
)
from cycleflow.dynamics import field_components

coords = st.floats(min_value=-3.0, max_value=3.0, allow_nan=False)
alphas = st.floats(min_value=1.0, max_value=150.0, allow_nan=False)


def annulus_sample(rng, count):
    r = np.sqrt(rng.uniform(3.0, 6.0, count))
    th = rng.uniform(0.0, 2.0 * np.pi, count)
    return r * np.cos(th), r * np.sin(th)


@pytest.fixture(scope="module")
def geom50():
    return CycleGeometry(find_limit_cycle(Params(50.0), tol=1e-9))


class TestQuadraticForm:
    @pytest.mark.parametrize("alpha", [1.0, 3.0, 10.0, 100.0])
    def test_inner_axis_value(self, alpha):
        # at (sqrt 3, 0): F1 = 0, F2 = alpha sqrt 3, weight m^2 - 1 = 2
        val = quadratic_form(Params(alpha), Point2(math.sqrt(3.0), 0.0))
        assert math.isclose(val, 6.0 * alpha * alpha, rel_tol=1e-12)

    def test_degenerate_weights_point(self):
        # both weights vanish at m^2 = n^2 = 1 (outside the annulus)
        assert quadratic_form(Params(1.0), Point2(1.0, 1.0)) == 0.0

    @given(alphas, coords, coords)
    def test_sign_flip_symmetry_exact(self, alpha, m, n):
        params = Params(alpha)
        assert quadratic_form(params, Point2(-m, -n)) == quadratic_form(params, Point2(m, n))

    @given(alphas, coords, coords)
    def test_quarter_turn_symmetry_exact(self, alpha, m, n):
        params = Params(alpha)
        assert quadratic_form(params, Point2(-n, m)) == quadratic_form(params, Point2(m, n))


class TestRemainder:
    @pytest.mark.parametrize("alpha", [1.0, 12.0])
    def test_vanishes_on_inner_axis(self, alpha):
        assert abs(remainder(Params(alpha), Point2(math.sqrt(3.0), 0.0))) < 1e-12

    def test_vanishes_at_origin(self):
        assert remainder(Params(9.0), Point2(0.0, 0.0)) == 0.0

    @pytest.mark.parametrize("alpha", [1.0, 10.0, 100.0])
    def test_linear_alpha_bound_on_disk(self, alpha):
        # |R| <= C alpha on r^2 <= 6, with C split into the alpha-linear
        # coefficient and the alpha-free part measured on a grid
        rng = np.random.default_rng(17)
        r = np.sqrt(rng.uniform(0.0, 6.0, 4000))
        th = rng.uniform(0.0, 2.0 * np.pi, 4000)
        m, n = r * np.cos(th), r * np.sin(th)
        u = m - m**3 / 3.0
        v = n - n**3 / 3.0
        c_lin = float(np.abs(4.0 / 3.0 * m * n * (m * m - n * n)).max())
        c_free = float(np.abs((m * m - 1) * v * v + (n * n - 1) * u * u).max())
        params = Params(alpha)
        vals = np.array([abs(remainder(params, Point2(a, b))) for a, b in zip(m, n)])
        assert vals.max() <= (c_lin + c_free) * alpha + 1e-9

    def test_decomposition_identity(self):
        rng = np.random.default_rng(23)
        m, n = annulus_sample(rng, 10_000)
        for alpha in (1.0, 3.7, 50.0):
            params = Params(alpha)
            lead = alpha * alpha * (m**4 + n**4 - m * m - n * n)
            for a, b, ld in zip(m[:2000], n[:2000], lead[:2000]):
                p = Point2(a, b)
                q = quadratic_form(params, p)
                rel = abs(q - (ld + remainder(params, p))) / max(abs(q), 1e-30)
                assert rel <= 1e-9


class TestCertifyAnnulus:
    def test_leading_term_floor_on_grid(self):
        # alpha^2 (m^4 + n^4 - m^2 - n^2) >= 1.5 alpha^2 on the annulus
        r2 = np.linspace(3.0, 6.0, 256)[:, None]
        th = (np.arange(1024) * (2 * np.pi / 1024))[None, :]
        m = np.sqrt(r2) * np.cos(th)
        n = np.sqrt(r2) * np.sin(th)
        lead = m**4 + n**4 - m * m - n * n
        assert lead.min() >= 1.5 - 1e-9

    def test_positive_at_large_alpha(self):
        rep = certify_annulus(Params(100.0), 256, 1024)
        assert rep.positive
        assert rep.inf_value - rep.lipschitz_margin > 0.0
        assert 3.0 - 1e-9 <= rep.argmin.r2 <= 6.0 + 1e-9

    def test_monotone_under_refinement(self):
        for alpha in (2.0, 100.0):
            base = certify_annulus(Params(alpha), 64, 256)
            fine = certify_annulus(Params(alpha), 128, 512)
            if base.positive:
                assert fine.positive
            # the grid minimum can only go down as nodes are added densely
            assert fine.inf_value <= base.inf_value + 1e-6 * abs(base.inf_value)

    def test_sweep_certified_set_stable_no_revocation(self):
        # refinement may certify new alphas (smaller margins) but must never
        # revoke a certification; the smallest certified alpha stays certified
        base = {a: certify_annulus(Params(a), 256, 1024).positive
                for a in (1.0, 2.0, 5.0, 10.0, 20.0, 50.0)}
        certified = [a for a, pos in base.items() if pos]
        assert certified, "expected at least one certified alpha in the sweep"
        smallest = min(certified)
        for a, pos in base.items():
            if pos:
                assert certify_annulus(Params(a), 512, 2048).positive
        assert certify_annulus(Params(smallest), 512, 2048).positive

    def test_resolution_preconditions(self):
        with pytest.raises(ValueError):
            certify_annulus(Params(10.0), 32, 1024)
        with pytest.raises(ValueError):
            certify_annulus(Params(10.0), 256, 128)


class TestDecayCheck:
    def test_positive_decay_constant(self, geom50):
        c = decay_check(geom50, Params(50.0), 0.04, 2000)
        assert c > 0.0

    def test_stable_under_sample_doubling(self):
        geom = CycleGeometry(find_limit_cycle(Params(100.0), tol=1e-9))
        c1 = decay_check(geom, Params(100.0), 0.04, 2000)
        c2 = decay_check(geom, Params(100.0), 0.04, 4000)
        assert abs(c1 - c2) / abs(c1) <= 0.2

    def test_small_offset_matches_jacobian_oracle(self, geom50):
        # first-order regime: ratio ~ 2 nu . (grad F) nu at the projection
        params = Params(50.0)
        for i in (0, 400, 900, 1500):
            p = geom50.cycle.samples[i]
            f1, f2 = field_components(50.0, p[0], p[1])
            norm = math.hypot(f1, f2)
            nu = np.array([f2 / norm, -f1 / norm])
            z = p + 1e-3 * nu
            from cycleflow import distance_to_cycle

            g, proj = distance_to_cycle(geom50, Point2(*z))
            zf1, zf2 = field_components(50.0, z[0], z[1])
            ratio = (zf1 * 2 * (z[0] - proj.m) + zf2 * 2 * (z[1] - proj.n)) / g
            oracle = 2.0 * nu @ jacobian(params, Point2(*p)) @ nu
            assert abs(ratio - oracle) / abs(oracle) < 0.02

    def test_delta_preconditions(self, geom50):
        with pytest.raises(ValueError):
            decay_check(geom50, Params(50.0), 0.0, 100)
        with pytest.raises(ValueError):
            decay_check(geom50, Params(50.0), 0.5, 100)
