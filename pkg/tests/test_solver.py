from __future__ import annotations

import numpy as np
import pytest

from specsep import (
    JointSpectrum,
    ModelConfig,
    PoleError,
    SolveSettings,
    StieltjesPair,
    boundary_value,
    constraint_residual,
    from_companion,
    residual_712,
    residual_713,
    solve_at,
    to_companion,
)

from oracles import (
    mp_boundary_companion,
    mp_companion_transform,
    mp_density,
    mp_transform,
)


def random_model(rng) -> ModelConfig:
    k = int(rng.integers(1, 6))
    w = rng.dirichlet(np.ones(k))
    atoms = [(rng.uniform(0.0, 10.0), rng.uniform(0.1, 5.0), wi) for wi in w]
    y = float(rng.uniform(0.05, 1.0))
    return ModelConfig(JointSpectrum.from_atoms(atoms), y)


class TestResidual713:
    def test_zero_at_closed_form_solution(self, mp_config):
        z = 3 + 0.5j
        s = mp_companion_transform(z, 0.25)
        pair = StieltjesPair(z=z, s_under=s, g_under=s)
        r1, r2 = residual_713(pair, mp_config)
        assert r1 < 1e-10 and r2 < 1e-10

    def test_positive_off_solution(self, mp_config):
        z = 3 + 0.5j
        s = mp_companion_transform(z, 0.25)
        pair = StieltjesPair(z=z, s_under=s + 1e-3, g_under=s)
        r1, r2 = residual_713(pair, mp_config)
        assert r1 > 1e-6 and r2 > 0

    def test_pole_raises(self):
        cfg = ModelConfig(JointSpectrum.from_atoms([(1.0, 1.0, 1.0)]), 0.25)
        pair = StieltjesPair(z=1 + 1j, s_under=-0.5 + 0j, g_under=-0.5 + 0j)
        with pytest.raises(PoleError):
            residual_713(pair, cfg)


class TestTransforms:
    def test_y_one_collapses_s(self):
        z, s, g = 1.3 + 0.8j, -0.4 + 0.6j, -0.2 + 0.1j
        pair = to_companion(s, g, z, 1.0)
        assert pair.s_under == pytest.approx(s)

    def test_round_trip_random(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            z = complex(rng.uniform(-3, 3), rng.uniform(0.1, 3))
            s = complex(rng.uniform(-2, 2), rng.uniform(0.01, 2))
            g = complex(rng.uniform(-2, 2), rng.uniform(0.01, 2))
            y = float(rng.uniform(0.05, 1.0))
            s2, g2 = from_companion(to_companion(s, g, z, y), y)
            assert abs(s2 - s) < 1e-12
            assert abs(g2 - g) < 1e-12

    def test_small_y_limit(self):
        z = 2.0 + 1.0j
        s, g = -0.4 + 0.3j, -0.5 + 0.2j
        for y in (1e-6, 1e-9):
            pair = to_companion(s, g, z, y)
            assert abs(pair.s_under + 1.0 / z) < 2 * y * abs(s)
            assert abs(pair.g_under + 1.0 / z) < 2 * y * (abs(g) + 1) / abs(z)


class TestSolveAt:
    def test_requires_upper_half_plane(self, mp_config):
        with pytest.raises(ValueError):
            solve_at(2.0 + 0.0j, mp_config)

    def test_small_y_approaches_minus_one_over_z(self, two_atom_spectrum):
        cfg = ModelConfig(two_atom_spectrum, 1e-4)
        z = 5 + 0.01j
        pair = solve_at(z, cfg)
        assert abs(pair.s_under + 1.0 / z) < 1e-3
        assert abs(pair.g_under + 1.0 / z) < 1e-3

    def test_matches_companion_quadratic(self, mp_config):
        z = 1 + 1j
        pair = solve_at(z, mp_config)
        oracle = mp_companion_transform(z, 0.25)
        assert oracle.imag > 0
        assert abs(pair.s_under - oracle) < 1e-9
        assert abs(pair.g_under - oracle) < 1e-9

    def test_decay_at_large_z(self, mp_config):
        z = 1e6 + 1e3j
        pair = solve_at(z, mp_config)
        assert abs(pair.s_under + 1.0 / z) < 1e-8

    def test_total_mass_from_imaginary_axis(self, two_atom_config):
        # s(iv)*iv -> -1 as v grows: total mass one
        for v in (1e3, 1e6):
            pair = solve_at(complex(0.0, v), two_atom_config)
            assert abs(pair.s_under * complex(0.0, v) + 1.0) < 10.0 / v


class TestResidual712:
    def test_round_trip_from_companion(self, two_atom_config):
        z = 2.5 + 0.7j
        pair = solve_at(z, two_atom_config)
        s, g = from_companion(pair, two_atom_config.y)
        r1, r2 = residual_712(s, g, z, two_atom_config)
        assert r1 < 1e-9 and r2 < 1e-9

    def test_perturbation_detected(self, two_atom_config):
        z = 2.5 + 0.7j
        pair = solve_at(z, two_atom_config)
        s, g = from_companion(pair, two_atom_config.y)
        r1, _ = residual_712(s + 1e-3, g, z, two_atom_config)
        assert r1 > 1e-6

    def test_mp_closed_form(self, mp_config):
        z = 3 + 0.5j
        s = mp_transform(z, 0.25)
        # for the point mass, the t-weighted trace equals s itself
        r1, r2 = residual_712(s, s, z, mp_config)
        assert r1 < 1e-10 and r2 < 1e-10


class TestBoundaryValue:
    def test_density_inside_bulk(self, mp_config):
        pair = boundary_value(1.0, mp_config)
        f = pair.s_under.imag / (0.25 * np.pi)
        assert abs(f - mp_density(1.0, 0.25)) < 1e-6

    def test_real_outside_support(self, mp_config):
        pair = boundary_value(3.0, mp_config)
        assert abs(pair.s_under.imag) < 1e-7
        assert pair.s_under.real < 0
        oracle = mp_boundary_companion(3.0, 0.25)
        assert abs(pair.s_under.real - oracle.real) < 1e-9

    def test_s_equals_g_for_signal_free_spectrum(self, mp_config):
        pair = boundary_value(3.0, mp_config)
        assert abs(pair.s_under - pair.g_under) < 1e-9

    def test_rejects_zero(self, mp_config):
        with pytest.raises(ValueError):
            boundary_value(0.0, mp_config)

    def test_continuation_contract_at_v_min(self, mp_config):
        # the continued pair must satisfy the system at z = x + i*v_min
        settings = SolveSettings()
        x = 1.4
        pair = boundary_value(x, mp_config, settings)
        oracle = mp_companion_transform(complex(x, settings.v_min), 0.25)
        assert abs(pair.s_under - oracle) < 1e-4
        r1, r2 = residual_713(pair, mp_config)
        assert r1 < settings.tol and r2 < settings.tol


class TestInvariantBattery:
    """Herglotz, constraint, transformation consistency, boundedness, decay."""

    def test_random_instances(self):
        rng = np.random.default_rng(20260810)
        settings = SolveSettings()
        for _ in range(100):
            cfg = random_model(rng)
            z = complex(rng.uniform(-5.0, 15.0), rng.uniform(1e-3, 10.0))
            pair = solve_at(z, cfg, settings)

            assert pair.s_under.imag > 0
            assert pair.g_under.imag > 0

            r1, r2 = residual_713(pair, cfg)
            assert r1 < settings.tol and r2 < settings.tol

            assert constraint_residual(pair, cfg) < 10 * settings.tol

            s, g = from_companion(pair, cfg.y)
            q1, q2 = residual_712(s, g, z, cfg)
            assert q1 < 10 * settings.tol and q2 < 10 * settings.tol

            u = np.array([a.u for a in cfg.spectrum.atoms])
            t = np.array([a.t for a in cfg.spectrum.atoms])
            w = np.array([a.weight for a in cfg.spectrum.atoms])
            den2 = np.abs(1.0 + u * pair.g_under + t * pair.s_under) ** 2
            for moment in (u / den2, u * t / den2, t / den2, t * t / den2):
                assert np.isfinite(np.sum(w * moment))
