"""Grid, operators, ghosts, integration, CSV round-trip."""

import numpy as np
import pytest

from dmvflow.fields import (
    ConservedState,
    Grid2D,
    ScalarField,
    VectorField,
    apply_noslip_ghosts,
    dirichlet_gradient_sq,
    divergence,
    dump_state_csv,
    gradient,
    integrate,
    integrate_array,
    load_state_csv,
    velocity_gradient,
)
from dmvflow.thermo import FluidParams


def unit_grid(n):
    return Grid2D(n, n, 1.0, 1.0)


class TestGrid:
    def test_spacing(self):
        g = Grid2D(10, 20, 2.0, 1.0)
        assert g.dx == pytest.approx(0.2)
        assert g.dy == pytest.approx(0.05)
        assert g.xs()[0] == pytest.approx(0.1)
        assert g.ys()[-1] == pytest.approx(1.0 - 0.025)

    def test_validation(self):
        with pytest.raises(ValueError):
            Grid2D(3, 10)
        with pytest.raises(ValueError):
            Grid2D(10, 10, lx=-1.0)


class TestGradient:
    def test_constant_annihilated(self):
        g = unit_grid(16)
        grad = gradient(ScalarField(g, np.full(g.shape, 3.7)))
        assert np.max(np.abs(grad.data)) == 0.0

    def test_exact_on_linear(self):
        g = unit_grid(16)
        X, Y = g.centers()
        grad = gradient(ScalarField(g, X))
        np.testing.assert_allclose(grad.data[0], 1.0, atol=1e-13)
        np.testing.assert_allclose(grad.data[1], 0.0, atol=1e-13)

    def test_second_order_on_sine(self):
        errs = []
        for n in (16, 32, 64):
            g = unit_grid(n)
            X, _ = g.centers()
            grad = gradient(ScalarField(g, np.sin(np.pi * X)))
            errs.append(np.max(np.abs(grad.data[0] - np.pi * np.cos(np.pi * X))))
        assert errs[0] / errs[1] > 3.5
        assert errs[1] / errs[2] > 3.5

    def test_vector_gradient_layout(self):
        g = unit_grid(8)
        X, Y = g.centers()
        u = VectorField(g, np.stack([Y, np.zeros(g.shape)]))
        G = gradient(u)
        np.testing.assert_allclose(G.data[0, 1], 1.0, atol=1e-12)  # d u_x / d y
        np.testing.assert_allclose(G.data[0, 0], 0.0, atol=1e-12)


class TestDivergenceIntegrate:
    def test_divergence_constant(self):
        g = unit_grid(12)
        v = VectorField(g, np.full((2,) + g.shape, 2.5))
        assert np.max(np.abs(divergence(v).data)) == 0.0

    def test_integrate_unit(self):
        g = unit_grid(32)
        assert integrate(ScalarField(g, np.ones(g.shape))) == pytest.approx(1.0, rel=1e-14)

    def test_integrate_bilinear_exact(self):
        g = unit_grid(64)
        X, Y = g.centers()
        assert integrate(ScalarField(g, X * Y)) == pytest.approx(0.25, abs=1e-12)

    def test_quadrature_second_order(self):
        exact = (np.e - 1.0) * (1.0 - np.cos(1.0))
        errs = []
        for n in (16, 32, 64):
            g = unit_grid(n)
            X, Y = g.centers()
            errs.append(abs(integrate(ScalarField(g, np.exp(X) * np.sin(Y))) - exact))
        assert errs[0] / errs[1] > 3.5
        assert errs[1] / errs[2] > 3.5

    def test_integrate_deterministic(self):
        g = unit_grid(32)
        rng = np.random.default_rng(0)
        f = ScalarField(g, rng.normal(size=g.shape))
        vals = {integrate(f) for _ in range(10)}
        assert len(vals) == 1

    def test_adjointness_second_order(self):
        # for v with zero wall trace: integrate(f div v) + integrate(grad f . v) -> 0 at O(h^2)
        defects = []
        for n in (64, 128, 256):
            g = unit_grid(n)
            X, Y = g.centers()
            f = ScalarField(g, np.exp(X) * np.cos(Y))
            bub = np.sin(np.pi * X) * np.sin(np.pi * Y)
            v = VectorField(g, np.stack([bub, -2.0 * bub]))
            gf = gradient(f)
            lhs = integrate(ScalarField(g, f.data * divergence(v).data))
            rhs = integrate(ScalarField(g, gf.data[0] * v.data[0] + gf.data[1] * v.data[1]))
            defects.append(abs(lhs + rhs))
        order = np.log2(defects[0] / defects[2]) / 2.0
        assert order > 1.7
        assert defects[2] <= 2.0 * defects[0] / 16.0  # within C*(dx^2+dy^2) scaling


def random_state(g, rng, params):
    rho = 1.0 + 0.3 * rng.random(g.shape)
    theta = params.c_star + 1.0 + rng.random(g.shape)
    u = rng.normal(size=(2,) + g.shape)
    return ConservedState(g, rho, np.stack([rho * u[0], rho * u[1]]), rho * theta)


class TestNoslipGhosts:
    def test_zero_velocity_stays_zero(self):
        g = unit_grid(8)
        rho = np.ones(g.shape)
        st = ConservedState(g, rho, np.zeros((2,) + g.shape), rho)
        p = apply_noslip_ghosts(st, layers=1)
        assert np.max(np.abs(p.mx)) == 0.0
        assert np.max(np.abs(p.my)) == 0.0

    def test_reflection_sign(self):
        g = unit_grid(8)
        rho = np.ones(g.shape)
        mom = np.stack([np.ones(g.shape), np.zeros(g.shape)])
        st = ConservedState(g, rho, mom, rho)
        p = apply_noslip_ghosts(st, layers=1)
        np.testing.assert_allclose(p.mx[1:-1, 0], -1.0)  # ghost column mirrors with flip
        np.testing.assert_allclose(p.rho[1:-1, 0], 1.0)  # scalar copies

    def test_wall_interpolant_vanishes(self):
        g = unit_grid(12)
        params = FluidParams()
        rng = np.random.default_rng(8)
        for _ in range(5):
            st = random_state(g, rng, params)
            p = apply_noslip_ghosts(st, layers=2)
            u = p.mx / p.rho
            v = p.my / p.rho
            for arr in (u, v):
                np.testing.assert_allclose(arr[:, 1] + arr[:, 2], 0.0, atol=1e-14)
                np.testing.assert_allclose(arr[:, -2] + arr[:, -3], 0.0, atol=1e-14)
                np.testing.assert_allclose(arr[1] + arr[2], 0.0, atol=1e-14)
                np.testing.assert_allclose(arr[-2] + arr[-3], 0.0, atol=1e-14)

    def test_scalar_zero_normal_gradient(self):
        g = unit_grid(8)
        params = FluidParams()
        st = random_state(g, np.random.default_rng(1), params)
        p = apply_noslip_ghosts(st, layers=1)
        np.testing.assert_array_equal(p.rho[1:-1, 0], p.rho[1:-1, 1])
        np.testing.assert_array_equal(p.z[0, 1:-1], p.z[1, 1:-1])


class TestVelocityGradient:
    def test_interior_matches_central(self):
        g = unit_grid(32)
        X, Y = g.centers()
        u = VectorField(g, np.stack([np.sin(np.pi * X) * np.sin(np.pi * Y), np.zeros(g.shape)]))
        G = velocity_gradient(u)
        want = np.pi * np.cos(np.pi * X) * np.sin(np.pi * Y)
        assert np.max(np.abs(G.data[0, 0] - want)[2:-2, 2:-2]) < 5e-3

    def test_dirichlet_form_positive(self):
        g = unit_grid(8)
        rng = np.random.default_rng(2)
        u = VectorField(g, rng.normal(size=(2,) + g.shape))
        assert dirichlet_gradient_sq(u) > 0


class TestCsv:
    def test_round_trip(self, tmp_path):
        g = unit_grid(8)
        params = FluidParams()
        st = random_state(g, np.random.default_rng(5), params)
        path = tmp_path / "snap.csv"
        dump_state_csv(st, path)
        with open(path) as fh:
            assert fh.readline().strip() == "x,y,rho,ux,uy,theta"
        back = load_state_csv(g, path)
        np.testing.assert_array_equal(back.rho, st.rho)
        np.testing.assert_allclose(back.mom, st.mom, rtol=1e-15, atol=1e-300)
        np.testing.assert_allclose(back.z, st.z, rtol=1e-15, atol=1e-300)

    def test_row_major_order(self, tmp_path):
        g = Grid2D(4, 5)
        rho = np.ones(g.shape)
        st = ConservedState(g, rho, np.zeros((2,) + g.shape), rho)
        path = tmp_path / "snap.csv"
        dump_state_csv(st, path)
        rows = np.loadtxt(path, delimiter=",", skiprows=1)
        # x varies fastest
        assert rows[1, 0] > rows[0, 0]
        assert rows[g.nx, 1] > rows[0, 1]


def test_state_check_reports_violations():
    g = unit_grid(4)
    params = FluidParams(c_star=0.5)
    rho = np.ones(g.shape)
    z = np.full(g.shape, 0.2)  # theta = 0.2 < c_star
    st = ConservedState(g, rho, np.zeros((2,) + g.shape), z)
    issues = st.check(params)
    assert any("theta" in msg for msg in issues)


def test_integrate_array_matches_field():
    g = unit_grid(16)
    data = np.random.default_rng(0).random(g.shape)
    assert integrate_array(g, data) == integrate(ScalarField(g, data))
