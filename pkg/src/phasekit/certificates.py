"""Constructive verification of the structural recovery guarantees:
dual certificates, null-space characterization of the lifted maps, and
injectivity of the lifted map restricted to the tangent space at x.

All checks reduce to finite linear algebra on a real vectorization of
Hermitian matrices in which the Hilbert-Schmidt inner product becomes
the Euclidean one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frames import FRAME_SCALE, dual_coefficients
from .measurements import (
    KIND_PHI,
    KIND_PSI,
    adjoint,
    build_ensemble,
    in_recoverable_set,
)
from .numerics import as_vector, eig_hermitian

RANK_CUTOFF = 1e-9  # singular values below this times the largest count as zero


def hermitian_to_real(X: np.ndarray) -> np.ndarray:
    """Isometric real coordinates of a Hermitian matrix: the diagonal,
    then sqrt(2) Re and sqrt(2) Im of the strict upper triangle."""
    n = X.shape[0]
    iu = np.triu_indices(n, k=1)
    upper = X[iu]
    return np.concatenate([np.real(np.diag(X)), np.sqrt(2.0) * upper.real, np.sqrt(2.0) * upper.imag])


def real_to_hermitian(v: np.ndarray, n: int) -> np.ndarray:
    """Inverse of `hermitian_to_real`."""
    iu = np.triu_indices(n, k=1)
    k = iu[0].size
    X = np.zeros((n, n), dtype=np.complex128)
    X[np.diag_indices(n)] = v[:n]
    upper = (v[n : n + k] + 1j * v[n + k :]) / np.sqrt(2.0)
    X[iu] = upper
    X[(iu[1], iu[0])] = np.conj(upper)
    return X


@dataclass(frozen=True)
class TangentSpace:
    """Orthonormal (Hilbert-Schmidt) basis of T_x = {x y* + y x*}."""

    x: np.ndarray
    basis: tuple[np.ndarray, ...]

    @property
    def dimension(self) -> int:
        return len(self.basis)


def tangent_space(x) -> TangentSpace:
    """Build T_x from the 2N generators x e_k* + e_k x* and their i-rotated
    partners; real dimension 2N-1 for x != 0."""
    v = as_vector(x)
    n = v.shape[0]
    if np.linalg.norm(v) == 0.0:
        raise ValueError("tangent space is undefined at x = 0")
    gens = np.zeros((2 * n, n * n))
    for k in range(n):
        G = np.zeros((n, n), dtype=np.complex128)
        G[:, k] += v
        G[k, :] += np.conj(v)
        gens[k] = hermitian_to_real(G)
        H = np.zeros((n, n), dtype=np.complex128)
        H[:, k] += -1j * v
        H[k, :] += 1j * np.conj(v)
        gens[n + k] = hermitian_to_real(H)
    _, s, vh = np.linalg.svd(gens, full_matrices=False)
    rank = int(np.sum(s > RANK_CUTOFF * s[0]))
    basis = tuple(real_to_hermitian(vh[i], n) for i in range(rank))
    return TangentSpace(x=v, basis=basis)


@dataclass(frozen=True)
class Certificate:
    """Dual certificate Y = A*(gamma): PSD with kernel spanned by x."""

    Y: np.ndarray
    gamma: np.ndarray  # (L,), serialization l = 4(n-1)+m
    spectrum: np.ndarray  # eigenvalues of Y, descending


def build_certificate(kind: str, x) -> Certificate:
    """Per block, pair the measurement frame with the rank-one projector
    onto the direction orthogonal to the block sub-vector; the resulting
    combination of measurement outer products annihilates x and is
    strictly positive on its complement."""
    v = as_vector(x)
    n = v.shape[0]
    k = kind.lower()
    if k not in (KIND_PHI, KIND_PSI):
        raise ValueError(f"certificates exist for kinds phi/psi, got {kind!r}")
    if np.linalg.norm(v) == 0.0 or not in_recoverable_set(k, v, 0.0):
        raise ValueError(f"x is outside the recoverable set of kind {k}")
    gamma = np.zeros(4 * (n - 1))
    for blk in range(n - 1):
        if k == KIND_PHI:
            xn = np.array([v[blk], v[blk + 1]])
        else:
            xn = np.array([v[0], v[blk + 1]])
        qn = np.array([-np.conj(xn[1]), np.conj(xn[0])]) / np.linalg.norm(xn)
        Qn = np.outer(qn, qn.conj())
        gamma[4 * blk : 4 * blk + 4] = FRAME_SCALE * dual_coefficients(Qn)
    ensemble = build_ensemble(k, n)
    Y = adjoint(ensemble, gamma)
    spectrum = eig_hermitian(Y).values
    return Certificate(Y=Y, gamma=gamma, spectrum=spectrum)


def _lifted_operator_matrix(kind: str, n: int) -> np.ndarray:
    """Real (L x N^2) matrix of the lifted map in the isometric coordinates."""
    ensemble = build_ensemble(kind, n)
    V = ensemble.vectors
    rows = np.empty((ensemble.L, n * n))
    for l in range(ensemble.L):
        rows[l] = hermitian_to_real(np.outer(V[l], V[l].conj()))
    return rows


def nullspace_basis(kind: str, n: int) -> tuple[np.ndarray, ...]:
    """HS-orthonormal basis of the kernel of the lifted map, found by
    rank-revealing decomposition of the vectorized operator."""
    if n < 2:
        raise ValueError(f"signal dimension must be at least 2, got {n}")
    mat = _lifted_operator_matrix(kind, n)
    _, s, vh = np.linalg.svd(mat, full_matrices=True)
    rank = int(np.sum(s > RANK_CUTOFF * s[0]))
    return tuple(real_to_hermitian(vh[i], n) for i in range(rank, n * n))


@dataclass(frozen=True)
class InjectivityReport:
    rank: int
    dimension: int  # dim T_x = 2N - 1
    injective: bool
    sigma_min: float
    sigma_max: float


def check_injectivity_on_T(kind: str, x) -> InjectivityReport:
    """Rank of the lifted map restricted to T_x; injective iff the rank
    equals dim T_x = 2N-1."""
    ts = tangent_space(x)
    n = ts.x.shape[0]
    ensemble = build_ensemble(kind, n)
    V = ensemble.vectors
    cols = np.empty((ensemble.L, ts.dimension))
    for j, B in enumerate(ts.basis):
        cols[:, j] = np.real(np.einsum("li,ij,lj->l", V.conj(), B, V))
    s = np.linalg.svd(cols, compute_uv=False)
    rank = int(np.sum(s > RANK_CUTOFF * s[0])) if s[0] > 0 else 0
    return InjectivityReport(
        rank=rank,
        dimension=ts.dimension,
        injective=rank == ts.dimension,
        sigma_min=float(s[-1]),
        sigma_max=float(s[0]),
    )
