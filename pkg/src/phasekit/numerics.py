"""Complex vector/matrix primitives: DFT, Hermitian eigensolvers, PSD
projection, and seeded randomness.

Index convention is 0-based in code; entry ``x[n]`` of the math maps to
``x[n-1]`` here.  The DFT pair matches numpy's unnormalized forward /
1/N-normalized inverse transform.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import active_backend
from ._kernels import eig2_batch, jacobi_real_symmetric

HERMITIAN_RTOL = 1e-12
JACOBI_TOL = 1e-12
JACOBI_MAX_SWEEPS = 100

# Largest Hermitian size the Jacobi path is tuned for; bigger inputs work
# but sweep cost grows cubically.
EIG_SIZE_LIMIT = 512


class EigenConvergenceError(RuntimeError):
    """Eigensolver failed to reach its stopping criterion."""

    def __init__(self, residual: float, sweeps: int):
        self.residual = residual
        self.sweeps = sweeps
        super().__init__(
            f"Jacobi eigensolver did not converge after {sweeps} sweeps "
            f"(off-diagonal residual {residual:.3e})"
        )


def as_vector(x) -> np.ndarray:
    """Validate and return a finite complex vector."""
    v = np.asarray(x, dtype=np.complex128)
    if v.ndim != 1 or v.size < 1:
        raise ValueError(f"expected a 1-d vector with at least one entry, got shape {v.shape}")
    if not np.all(np.isfinite(v.view(np.float64))):
        raise ValueError("vector contains NaN or Inf entries")
    return v


def as_hermitian(X) -> np.ndarray:
    """Validate Hermitian symmetry (relative tolerance 1e-12) and return X."""
    A = np.asarray(X, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A.view(np.float64))):
        raise ValueError("matrix contains NaN or Inf entries")
    scale = np.linalg.norm(A)
    if np.linalg.norm(A - A.conj().T) > HERMITIAN_RTOL * max(scale, 1e-300):
        raise ValueError("matrix is not Hermitian within 1e-12 relative tolerance")
    return A


def hs_inner(X, Y) -> float:
    """Hilbert-Schmidt inner product trace(Y* X) of two Hermitian matrices."""
    return float(np.real(np.vdot(Y, X)))


@dataclass(frozen=True)
class EigenDecomposition:
    """Spectrum sorted descending with a paired orthonormal eigenbasis.

    ``vectors[:, k]`` is the unit eigenvector for ``values[k]``.
    """

    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        U = self.vectors
        return (U * self.values) @ U.conj().T


class Rng:
    """Counter-based generator keyed by (seed, stream-id).

    Backed by numpy's Philox4x32 with the 128-bit key (seed, stream):
    identical (seed, stream) pairs replay identical sequences, distinct
    stream ids give independent streams.  Deterministic across worker
    counts because streams never share state.
    """

    def __init__(self, seed: int, stream: int = 0):
        self.seed = int(seed) & 0xFFFFFFFFFFFFFFFF
        self.stream = int(stream) & 0xFFFFFFFFFFFFFFFF
        key = np.array([self.seed, self.stream], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def standard_normal(self, size) -> np.ndarray:
        return self._gen.standard_normal(size)

    def __repr__(self):
        return f"Rng(seed={self.seed}, stream={self.stream})"


def gaussian_complex(rng: Rng, n: int, variance: float) -> np.ndarray:
    """Complex Gaussian vector with per-entry variance E|x[n]|^2 = variance.

    Real and imaginary parts are each N(0, variance/2).
    """
    if variance <= 0:
        raise ValueError("variance must be positive")
    z = rng.standard_normal((n, 2)) * np.sqrt(variance / 2.0)
    return z[:, 0] + 1j * z[:, 1]


def dft(x) -> np.ndarray:
    """Unnormalized forward DFT, xhat[w] = sum_t x[t] e^{-2 pi i w t / N}."""
    return np.fft.fft(as_vector(x))


def idft(xhat) -> np.ndarray:
    """Inverse of `dft` (carries the 1/N factor)."""
    return np.fft.ifft(as_vector(xhat))


def _orthogonal_complement_2d(u: np.ndarray) -> np.ndarray:
    return np.array([-np.conj(u[1]), np.conj(u[0])])


def _canonical_phase(U: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive."""
    idx = np.argmax(np.abs(U), axis=0)
    pivots = U[idx, np.arange(U.shape[1])]
    mags = np.abs(pivots)
    phase = np.where(mags > 0, pivots / np.where(mags > 0, mags, 1.0), 1.0)
    return U / phase


def eig2_hermitian(Q) -> EigenDecomposition:
    """Closed-form eigendecomposition of a 2x2 Hermitian matrix."""
    A = as_hermitian(Q)
    if A.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {A.shape}")
    lam1, lam2, u = eig2_batch(
        np.array([A[0, 0].real]), np.array([A[1, 1].real]), np.array([A[0, 1]])
    )
    u1 = u[0]
    u2 = _orthogonal_complement_2d(u1)
    U = _canonical_phase(np.stack([u1, u2], axis=1))
    return EigenDecomposition(np.array([lam1[0], lam2[0]]), U)


def _eig_jacobi_complex(H: np.ndarray) -> EigenDecomposition:
    """Spec'd Jacobi route: embed as the 2Nx2N real symmetric matrix
    [[Re, -Im], [Im, Re]] whose spectrum doubles that of H, then map the
    paired real eigenvectors back to a complex orthonormal basis.
    """
    n = H.shape[0]
    A = H.real
    B = H.imag
    M = np.block([[A, -B], [B, A]])
    vals, vecs, sweeps, off = jacobi_real_symmetric(M, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    scale = np.linalg.norm(M)
    if scale > 0 and off > JACOBI_TOL * scale:
        raise EigenConvergenceError(off, sweeps)

    order = np.argsort(-vals)
    vals = vals[order]
    vecs = vecs[:, order]
    cands = vecs[:n, :] + 1j * vecs[n:, :]

    # Each eigenvalue of H shows up twice in M; group the sorted values
    # into even-sized clusters and keep one complex direction per pair.
    ctol = max(1e-10 * scale, 1e-300)
    out_vals = np.empty(n)
    out_vecs = np.empty((n, n), dtype=np.complex128)
    taken = 0
    i = 0
    while i < 2 * n:
        j = i + 1
        while j < 2 * n and (vals[j - 1] - vals[j] <= ctol or (j - i) % 2 == 1):
            j += 1
        m = (j - i) // 2
        pool = [cands[:, k].copy() for k in range(i, j)]
        chosen: list[np.ndarray] = []
        while len(chosen) < m:
            for c in chosen:
                for k in range(len(pool)):
                    pool[k] = pool[k] - c * np.vdot(c, pool[k])
            norms = [np.linalg.norm(p) for p in pool]
            k_best = int(np.argmax(norms))
            chosen.append(pool.pop(k_best) / norms[k_best])
        for r in range(m):
            out_vals[taken] = 0.5 * (vals[i + 2 * r] + vals[i + 2 * r + 1])
            out_vecs[:, taken] = chosen[r]
            taken += 1
        i = j
    return EigenDecomposition(out_vals, _canonical_phase(out_vecs))


def _eig_jacobi_real(H: np.ndarray) -> EigenDecomposition:
    vals, vecs, sweeps, off = jacobi_real_symmetric(H.real, JACOBI_TOL, JACOBI_MAX_SWEEPS)
    scale = np.linalg.norm(H.real)
    if scale > 0 and off > JACOBI_TOL * scale:
        raise EigenConvergenceError(off, sweeps)
    order = np.argsort(-vals)
    U = vecs[:, order].astype(np.complex128)
    return EigenDecomposition(vals[order], _canonical_phase(U))


def eig_hermitian(X) -> EigenDecomposition:
    """Full eigendecomposition of an NxN Hermitian matrix.

    The numba backend runs the cyclic-Jacobi route (real symmetric
    embedding, spec'd stopping rule); the numpy backend defers to
    LAPACK via np.linalg.eigh.  Supported up to N = EIG_SIZE_LIMIT.
    """
    H = as_hermitian(X)
    H = 0.5 * (H + H.conj().T)
    n = H.shape[0]
    if n > EIG_SIZE_LIMIT:
        raise ValueError(f"matrix size {n} exceeds supported limit {EIG_SIZE_LIMIT}")
    if active_backend() == "numpy":
        try:
            w, U = np.linalg.eigh(H)
        except np.linalg.LinAlgError as exc:
            raise EigenConvergenceError(float("nan"), 0) from exc
        order = np.argsort(-w)
        return EigenDecomposition(w[order], _canonical_phase(U[:, order]))
    if np.all(H.imag == 0.0):
        return _eig_jacobi_real(H)
    return _eig_jacobi_complex(H)


def project_psd(X) -> np.ndarray:
    """Frobenius-nearest positive semidefinite matrix: clamp negative
    eigenvalues to zero and reassemble."""
    dec = eig_hermitian(X)
    clamped = np.maximum(dec.values, 0.0)
    U = dec.vectors
    P = (U * clamped) @ U.conj().T
    return 0.5 * (P + P.conj().T)


def read_complex_vector(path) -> np.ndarray:
    """Read the shared one-entry-per-line "re im" text format."""
    entries = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"{path}:{lineno}: expected 're im', got {line!r}")
            entries.append(complex(float(parts[0]), float(parts[1])))
    if not entries:
        raise ValueError(f"{path}: no vector entries found")
    return np.array(entries, dtype=np.complex128)


def format_complex_vector(x) -> str:
    v = as_vector(x)
    return "\n".join(f"{z.real:.17g} {z.imag:.17g}" for z in v) + "\n"


def write_complex_vector(path, x) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_complex_vector(x))
