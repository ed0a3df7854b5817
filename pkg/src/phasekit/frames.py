"""The uniform 4/2-tight frame for C^2 and its rank-one reconstruction
identities.

Four unit vectors a_1..a_4 with constant pairwise overlap |<a_m,a_n>|^2
= 1/(K+1) and sum of outer products (M/K) I.  Every Hermitian rank-one
Q recovers from the four numbers <Q, A_m> through the shifted system
A_m - I/(K+1), and dually from coefficients against that shifted system.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .numerics import as_hermitian

# Frame geometry: M = K^2 unit vectors in dimension K.
K = 2
M = K * K
FRAME_SCALE = (K + 1) / K  # 3/2: prefactor of both reconstruction identities
DUAL_SHIFT = 1.0 / (K + 1)  # 1/3: identity shift in the dual system


@dataclass(frozen=True)
class TightFrame2:
    """Frame vectors with their rank-one outer products.

    vectors: (2, 4) array, column m is a_m
    outers:  (4, 2, 2) array of A_m = a_m a_m*
    duals:   (4, 2, 2) array of A_m - I/3
    """

    vectors: np.ndarray
    outers: np.ndarray
    duals: np.ndarray


@lru_cache(maxsize=1)
def standard_frame() -> TightFrame2:
    """The canonical 4/2-tight frame built from the two amplitudes

        alpha = sqrt((1 - 1/sqrt(3)) / 2)
        beta  = e^{i 5 pi / 4} sqrt((1 + 1/sqrt(3)) / 2)
    """
    alpha = np.sqrt(0.5 * (1.0 - 1.0 / np.sqrt(3.0)))
    beta = np.exp(1j * 5.0 * np.pi / 4.0) * np.sqrt(0.5 * (1.0 + 1.0 / np.sqrt(3.0)))
    vectors = np.array(
        [
            [alpha, beta, alpha, -beta],
            [beta, alpha, -beta, alpha],
        ],
        dtype=np.complex128,
    )
    outers = np.einsum("im,jm->mij", vectors, vectors.conj())
    duals = outers - DUAL_SHIFT * np.eye(2)
    return TightFrame2(vectors=vectors, outers=outers, duals=duals)


def reconstruct_rank1(b, frame: TightFrame2 | None = None) -> np.ndarray:
    """Assemble (3/2) sum_m b[m] (A_m - I/3) from four intensity values.

    Equal to x x* whenever b[m] = |<x, a_m>|^2 exactly; total for any
    real b (noisy input gives the best Hermitian fit of the identity).
    """
    if frame is None:
        frame = standard_frame()
    b = np.asarray(b, dtype=np.float64)
    if b.shape != (M,):
        raise ValueError(f"expected {M} intensity values, got shape {b.shape}")
    return FRAME_SCALE * np.einsum("m,mij->ij", b, frame.duals)


def dual_coefficients(Q, frame: TightFrame2 | None = None) -> np.ndarray:
    """Coefficients gamma with Q = (3/2) sum_m gamma[m] A_m for rank-one Q.

    gamma[m] is the Hilbert-Schmidt pairing of Q with the shifted frame
    element A_m - I/3; real for Hermitian Q.
    """
    if frame is None:
        frame = standard_frame()
    Q = as_hermitian(Q)
    if Q.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {Q.shape}")
    return np.real(np.einsum("mij,ij->m", frame.duals.conj(), Q))
