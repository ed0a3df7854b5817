import numpy as np
import pytest

from phasekit.certificates import (
    build_certificate,
    check_injectivity_on_T,
    hermitian_to_real,
    nullspace_basis,
    real_to_hermitian,
    tangent_space,
)
from phasekit.measurements import (
    adjoint,
    build_ensemble,
    in_recoverable_set,
    measure_lifted,
)
from phasekit.numerics import Rng, gaussian_complex, hs_inner


def draw_in_set(kind, n, rng):
    x = gaussian_complex(rng, n, 1.0)
    while not in_recoverable_set(kind, x, 0.0):
        x = gaussian_complex(rng, n, 1.0)
    return x


def tangent_projection(Y, x):
    """Independent oracle: P_T(Y) = PY + YP - PYP with P = xx*/||x||^2."""
    P = np.outer(x, x.conj()) / np.linalg.norm(x) ** 2
    return P @ Y + Y @ P - P @ Y @ P


class TestVectorization:
    def test_isometry(self):
        rng = Rng(100, 0)
        for n in (2, 3, 6):
            z = gaussian_complex(rng, n * n, 1.0).reshape(n, n)
            X = z + z.conj().T
            w = gaussian_complex(rng, n * n, 1.0).reshape(n, n)
            Y = w + w.conj().T
            assert abs(np.dot(hermitian_to_real(X), hermitian_to_real(Y)) - hs_inner(X, Y)) <= 1e-10
            back = real_to_hermitian(hermitian_to_real(X), n)
            assert np.linalg.norm(back - X) <= 1e-12 * np.linalg.norm(X)


class TestTangentSpace:
    @pytest.mark.parametrize("n", [2, 3, 5, 8])
    def test_dimension(self, n):
        x = gaussian_complex(Rng(101, n), n, 1.0)
        ts = tangent_space(x)
        assert ts.dimension == 2 * n - 1

    def test_basis_orthonormal_and_tangent(self):
        n = 5
        x = gaussian_complex(Rng(102, 0), n, 1.0)
        ts = tangent_space(x)
        for i, B in enumerate(ts.basis):
            assert np.linalg.norm(B - B.conj().T) <= 1e-12
            # lies in T_x: the tangent projection fixes it
            assert np.linalg.norm(tangent_projection(B, x) - B) <= 1e-10
            for j in range(i):
                g = hs_inner(B, ts.basis[j])
                assert abs(g) <= 1e-10
            assert abs(hs_inner(B, B) - 1.0) <= 1e-10

    def test_zero_vector_rejected(self):
        with pytest.raises(ValueError):
            tangent_space(np.zeros(3))


class TestCertificate:
    def test_phi_constant_signal(self):
        x = np.array([1.0, 1.0, 1.0], dtype=complex)
        cert = build_certificate("phi", x)
        assert np.linalg.norm(cert.Y @ x) <= 1e-10 * np.linalg.norm(cert.Y)
        lam = cert.spectrum
        assert np.sum(lam <= 1e-9 * lam[0]) == 1
        assert lam[-2] > 1e-8 * lam[0]

    def test_psi_three_dimensional(self):
        x = np.array([1.0, 1.0, 1.0], dtype=complex)
        cert = build_certificate("psi", x)
        lam = cert.spectrum
        assert np.sum(lam <= 1e-9 * lam[0]) == 1

    @pytest.mark.parametrize("kind", ["phi", "psi"])
    def test_random_in_set_signals(self, kind):
        n = 8
        ens = build_ensemble(kind, n)
        rng = Rng(103, 0)
        for _ in range(10):
            x = draw_in_set(kind, n, rng)
            cert = build_certificate(kind, x)
            # in the range of the adjoint, by reconstruction
            back = adjoint(ens, cert.gamma)
            assert np.linalg.norm(cert.Y - back) <= 1e-12 * (1.0 + np.linalg.norm(cert.Y))
            # annihilates x
            assert np.linalg.norm(cert.Y @ x) <= 1e-10 * np.linalg.norm(cert.Y) * np.linalg.norm(x)
            # orthogonal to the lifted signal
            assert abs(hs_inner(np.outer(x, x.conj()), cert.Y)) <= 1e-10 * np.linalg.norm(
                cert.Y
            ) * np.linalg.norm(x) ** 2
            # one-dimensional kernel, strictly positive elsewhere
            lam = cert.spectrum
            assert np.sum(lam <= 1e-9 * lam[0]) == 1
            assert lam[-2] >= 1e-8 * lam[0]

    def test_phase_rotation_preserves_spectrum(self):
        n = 6
        x = draw_in_set("psi", n, Rng(104, 0))
        base = build_certificate("psi", x).spectrum
        rotated = build_certificate("psi", np.exp(0.93j) * x).spectrum
        assert np.max(np.abs(base - rotated)) <= 1e-10 * (1.0 + base[0])

    def test_out_of_set_rejected(self):
        with pytest.raises(ValueError):
            build_certificate("psi", np.array([0.0, 1.0, 1.0]))
        with pytest.raises(ValueError):
            build_certificate("phi", np.array([1.0, 0.0, 1.0, 1.0]))


class TestNullspace:
    def test_n2_trivial(self):
        assert len(nullspace_basis("phi", 2)) == 0
        assert len(nullspace_basis("psi", 2)) == 0

    @pytest.mark.parametrize("kind", ["phi", "psi"])
    def test_n4_dimension_and_pattern(self, kind):
        basis = nullspace_basis(kind, 4)
        assert len(basis) == 6
        for B in basis:
            assert np.max(np.abs(np.diag(B))) <= 1e-10
            if kind == "phi":
                assert np.max(np.abs(np.diag(B, k=1))) <= 1e-10
            else:
                assert np.max(np.abs(B[0, :])) <= 1e-10
                assert np.max(np.abs(B[:, 0])) <= 1e-10

    @pytest.mark.parametrize("kind", ["phi", "psi"])
    @pytest.mark.parametrize("n", [2, 3, 5, 8, 12])
    def test_dimension_formula(self, kind, n):
        assert len(nullspace_basis(kind, n)) == n * n - (3 * n - 2)

    def test_pattern_built_matrices_are_annihilated(self):
        n = 6
        rng = Rng(105, 0)
        for kind in ("phi", "psi"):
            ens = build_ensemble(kind, n)
            z = gaussian_complex(rng, n * n, 1.0).reshape(n, n)
            X = z + z.conj().T
            X[np.diag_indices(n)] = 0.0
            if kind == "phi":
                for i in range(n - 1):
                    X[i, i + 1] = 0.0
                    X[i + 1, i] = 0.0
            else:
                X[0, :] = 0.0
                X[:, 0] = 0.0
            vals = measure_lifted(ens, X).values
            assert np.max(np.abs(vals)) <= 1e-10 * (1.0 + np.linalg.norm(X))

    def test_pattern_violation_detected(self):
        n = 5
        for kind in ("phi", "psi"):
            ens = build_ensemble(kind, n)
            X = np.zeros((n, n), dtype=complex)
            violation = 0.37
            if kind == "phi":
                X[2, 3] = violation
                X[3, 2] = violation
            else:
                X[0, 3] = violation
                X[3, 0] = violation
            vals = measure_lifted(ens, X).values
            assert np.max(np.abs(vals)) > 0.01 * violation


class TestInjectivity:
    def test_phi_generic_signal(self):
        rep = check_injectivity_on_T("phi", np.array([1.0, 1.0, 1.0, 1.0]))
        assert rep.injective
        assert rep.rank == 7

    def test_psi_hub_zero_degenerates(self):
        x = gaussian_complex(Rng(106, 0), 5, 1.0)
        x[0] = 0.0
        rep = check_injectivity_on_T("psi", x)
        assert not rep.injective

    def test_phi_interior_zero_degenerates(self):
        x = np.array([1.0, 0.0, 1.0], dtype=complex)
        rep = check_injectivity_on_T("phi", x)
        assert not rep.injective

    @pytest.mark.parametrize("kind", ["phi", "psi"])
    def test_random_in_set_injective(self, kind):
        n = 6
        rng = Rng(107, 0)
        for _ in range(10):
            x = draw_in_set(kind, n, rng)
            rep = check_injectivity_on_T(kind, x)
            assert rep.injective
            assert rep.rank == 2 * n - 1
