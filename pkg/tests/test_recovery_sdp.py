import numpy as np
import pytest

from phasekit.certificates import nullspace_basis
from phasekit.measurements import (
    add_noise,
    build_ensemble,
    build_random_ensemble,
    in_recoverable_set,
    measure,
    measure_lifted,
)
from phasekit.numerics import Rng, eig_hermitian, gaussian_complex, hs_inner, project_psd
from phasekit.recovery_sdp import AffineProjector, SdpConfig, project_affine, solve_phaselift


def draw_in_set(kind, n, rng):
    x = gaussian_complex(rng, n, 1.0)
    while not in_recoverable_set(kind, x, 0.0):
        x = gaussian_complex(rng, n, 1.0)
    return x


class TestSdpConfig:
    def test_defaults(self):
        cfg = SdpConfig()
        assert cfg.max_iter == 5000
        assert cfg.tol == 1e-7
        assert cfg.epsilon == 0.0
        assert cfg.trace_weight == 0.0

    @pytest.mark.parametrize(
        "kwargs", [dict(max_iter=0), dict(tol=0.0), dict(epsilon=-1.0), dict(trace_weight=-1.0)]
    )
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            SdpConfig(**kwargs)


class TestProjectAffine:
    def test_feasible_point_unchanged(self):
        n = 5
        ens = build_ensemble("psi", n)
        x = draw_in_set("psi", n, Rng(80, 0))
        X = np.outer(x, x.conj())
        b = measure(ens, x)
        out = project_affine(ens, X, b)
        assert np.linalg.norm(out - X) <= 1e-12 * np.linalg.norm(X)

    def test_projection_reaches_constraint(self):
        n = 5
        ens = build_ensemble("phi", n)
        x = draw_in_set("phi", n, Rng(81, 0))
        b = measure(ens, x)
        out = project_affine(ens, np.zeros((n, n), dtype=complex), b)
        resid = np.linalg.norm(measure_lifted(ens, out).values - b.values)
        assert resid <= 1e-9 * (1.0 + np.linalg.norm(b.values))

    def test_large_ball_is_identity(self):
        n = 4
        ens = build_ensemble("psi", n)
        x = draw_in_set("psi", n, Rng(82, 0))
        b = measure(ens, x)
        z = gaussian_complex(Rng(82, 1), n * n, 1.0).reshape(n, n)
        X = z + z.conj().T
        resid = np.linalg.norm(measure_lifted(ens, X).values - b.values)
        out = project_affine(ens, X, b, epsilon=2.0 * resid)
        assert np.array_equal(out, X)

    def test_ball_projection_lands_on_sphere(self):
        n = 4
        ens = build_ensemble("psi", n)
        x = draw_in_set("psi", n, Rng(83, 0))
        b = measure(ens, x)
        z = gaussian_complex(Rng(83, 1), n * n, 1.0).reshape(n, n)
        X = 3.0 * (z + z.conj().T)
        resid0 = np.linalg.norm(measure_lifted(ens, X).values - b.values)
        eps = 0.25 * resid0
        out = project_affine(ens, X, b, epsilon=eps)
        resid1 = np.linalg.norm(measure_lifted(ens, out).values - b.values)
        assert resid1 <= eps * (1.0 + 1e-9) + 1e-12

    def test_correction_orthogonal_to_nullspace(self):
        # X - P(X) lies in range(A*), so it pairs to zero with kernel elements
        n = 5
        ens = build_ensemble("phi", n)
        kernel = nullspace_basis("phi", n)
        rng = Rng(84, 0)
        x = draw_in_set("phi", n, rng)
        b = measure(ens, x)
        proj = AffineProjector(ens)
        for _ in range(100):
            z = gaussian_complex(rng, n * n, 1.0).reshape(n, n)
            X = z + z.conj().T
            PX = proj.apply(X, b.values, 0.0)
            coeffs = rng.standard_normal(len(kernel))
            Z = sum(c * B for c, B in zip(coeffs, kernel))
            Z = 0.5 * (Z + Z.conj().T)
            corr = X - PX
            assert abs(hs_inner(corr, Z)) <= 1e-9 * (1.0 + np.linalg.norm(corr) * np.linalg.norm(Z))


class TestSolveNoiseless:
    @pytest.mark.parametrize("kind", ["phi", "psi"])
    def test_exact_recovery_small_n(self, kind):
        n = 8
        ens = build_ensemble(kind, n)
        rng = Rng(85, 0 if kind == "phi" else 1)
        for _ in range(3):
            x = draw_in_set(kind, n, rng)
            res = solve_phaselift(ens, measure(ens, x), SdpConfig(max_iter=20000, tol=1e-9))
            target = np.outer(x, x.conj())
            assert res.converged
            assert np.linalg.norm(res.X - target) <= 1e-5 * np.linalg.norm(target)
            assert np.min(eig_hermitian(res.X).values) >= -1e-8
            from phasekit.recovery_algebraic import aligned_error

            assert aligned_error(x, res.x_hat) <= 1e-4 * np.sum(np.abs(x) ** 2)

    def test_psi_basis_vector_unique_solution(self):
        n = 4
        ens = build_ensemble("psi", n)
        x = np.eye(n)[0].astype(complex)
        res = solve_phaselift(ens, measure(ens, x), SdpConfig(max_iter=10000, tol=1e-9))
        assert res.converged
        assert res.rank1_gap <= 1e-5
        assert np.linalg.norm(res.X - np.outer(x, x.conj())) <= 1e-5

    def test_solution_is_fixed_point_of_both_projections(self):
        n = 5
        ens = build_ensemble("psi", n)
        x = draw_in_set("psi", n, Rng(86, 0))
        X = np.outer(x, x.conj())
        b = measure(ens, x)
        after_affine = project_affine(ens, X, b)
        after_psd = project_psd(after_affine)
        assert np.linalg.norm(after_psd - X) <= 1e-11 * np.linalg.norm(X)
        resid = np.linalg.norm(measure_lifted(ens, after_psd).values - b.values)
        assert resid <= 1e-10 * (1.0 + np.linalg.norm(b.values))

    def test_displacement_monotone_flag(self):
        n = 6
        ens = build_ensemble("psi", n)
        x = draw_in_set("psi", n, Rng(87, 0))
        res = solve_phaselift(ens, measure(ens, x))
        assert res.displacement_monotone

    def test_non_convergence_reported_not_raised(self):
        n = 8
        ens = build_ensemble("phi", n)
        x = draw_in_set("phi", n, Rng(88, 0))
        res = solve_phaselift(ens, measure(ens, x), SdpConfig(max_iter=3, tol=1e-12))
        assert not res.converged
        assert res.iterations == 3
        assert np.isfinite(res.residual)


class TestSolveNoisy:
    def test_noisy_run_extracts_estimate(self):
        n = 8
        ens = build_ensemble("psi", n)
        rng = Rng(89, 0)
        x = draw_in_set("psi", n, rng)
        sigma2 = 0.05  # low SNR keeps the verbatim radius feasible
        b = add_noise(measure(ens, x), sigma2, rng)
        res = solve_phaselift(ens, b, SdpConfig(max_iter=2000, tol=1e-7, epsilon=ens.L * sigma2))
        from phasekit.recovery_algebraic import aligned_error

        rel = aligned_error(x, res.x_hat) / np.sum(np.abs(x) ** 2)
        assert rel < 1.0
        assert res.x_hat.shape == (n,)
        assert np.min(eig_hermitian(res.X).values) >= -1e-8

    def test_trace_weight_smoke(self):
        n = 4
        ens = build_ensemble("psi", n)
        x = draw_in_set("psi", n, Rng(90, 0))
        res = solve_phaselift(
            ens, measure(ens, x), SdpConfig(max_iter=500, tol=1e-7, trace_weight=1e-6)
        )
        assert res.x_hat.shape == (n,)


class TestRandomEnsembles:
    def test_oversampled_random_recovers(self):
        n = 8
        rng = Rng(91, 0)
        x = gaussian_complex(rng, n, 1.0)
        ens = build_random_ensemble(rng, n, 6 * n)
        res = solve_phaselift(ens, measure(ens, x), SdpConfig(max_iter=3000, tol=1e-8))
        assert res.rank1_gap <= 1e-3
        from phasekit.recovery_algebraic import aligned_error

        assert aligned_error(x, res.x_hat) <= 1e-4 * np.sum(np.abs(x) ** 2)

    def test_intensity_length_checked(self):
        ens = build_random_ensemble(Rng(92, 0), 4, 10)
        with pytest.raises(ValueError):
            solve_phaselift(ens, np.zeros(9))
