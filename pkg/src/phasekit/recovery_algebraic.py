"""O(N) algebraic recovery: split into 2x2 rank-one problems, factor each
via the frame identity, and stitch the block phases together.

Kind "phi" chains the phase through overlapping entries; kind "psi"
aligns every block against the shared hub entry x[1].
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._kernels import eig2_batch
from .frames import FRAME_SCALE, standard_frame
from .measurements import KIND_PHI, KIND_PSI, intensity_values


class RecoveryError(RuntimeError):
    """Recovery cannot produce any estimate (every block degenerate)."""


# Entries below this fraction of their block's norm carry no usable phase
# (double precision puts exact zeros at ~1e-17 of scale after the eigensolve).
STITCH_ZERO_RTOL = 1e-12


@dataclass(frozen=True)
class BlockEstimate:
    """Diagnostics for one 2x2 sub-problem.

    ``vec`` is sqrt(max(lambda_max, 0)) times the top eigenvector of Q;
    it is zero exactly when the block is degenerate (lambda_max <= 0).
    """

    index: int
    Q: np.ndarray
    lambda_max: float
    vec: np.ndarray
    degenerate: bool


@dataclass(frozen=True)
class RecoveryReport:
    """Recovered signal plus per-block diagnostics."""

    x_hat: np.ndarray
    kind: str
    degenerate_count: int
    chain_breaks: tuple[int, ...]
    _Qs: np.ndarray
    _lam: np.ndarray
    _vecs: np.ndarray
    _degenerate: np.ndarray

    @cached_property
    def blocks(self) -> tuple[BlockEstimate, ...]:
        return tuple(
            BlockEstimate(
                index=i + 1,
                Q=self._Qs[i],
                lambda_max=float(self._lam[i]),
                vec=self._vecs[i],
                degenerate=bool(self._degenerate[i]),
            )
            for i in range(self._Qs.shape[0])
        )


def _reconstruct_block_matrices(bmat: np.ndarray) -> np.ndarray:
    """(B, 4) intensities -> (B, 2, 2) Hermitian matrices via the frame
    identity Q = (3/2) sum_m b[m] (A_m - I/3)."""
    duals = standard_frame().duals
    return FRAME_SCALE * np.einsum("nm,mij->nij", bmat, duals)


def _factor_blocks(Qs: np.ndarray):
    lam1, _, u = eig2_batch(Qs[:, 0, 0].real, Qs[:, 1, 1].real, Qs[:, 0, 1])
    degenerate = lam1 <= 0.0
    amp = np.sqrt(np.maximum(lam1, 0.0))
    vecs = u * amp[:, None]
    return lam1, vecs, degenerate


def block_reconstruct(b_block, index: int = 1) -> BlockEstimate:
    """Rank-one reconstruct and factor a single 4-measurement block."""
    b = np.asarray(b_block, dtype=np.float64)
    if b.shape != (4,):
        raise ValueError(f"expected 4 intensity values, got shape {b.shape}")
    Qs = _reconstruct_block_matrices(b[None, :])
    lam, vecs, degenerate = _factor_blocks(Qs)
    return BlockEstimate(
        index=index,
        Q=Qs[0],
        lambda_max=float(lam[0]),
        vec=vecs[0],
        degenerate=bool(degenerate[0]),
    )


def _stitch_phi_arrays(vecs: np.ndarray, degenerate: np.ndarray):
    nblocks = vecs.shape[0]
    n = nblocks + 1
    if nblocks == 1:
        return vecs[0].copy(), ()
    seconds = vecs[:-1, 1]
    firsts = vecs[1:, 0]
    tiny = STITCH_ZERO_RTOL * np.linalg.norm(vecs, axis=1)
    link_ok = (
        ~degenerate[:-1]
        & ~degenerate[1:]
        & (np.abs(seconds) > tiny[:-1])
        & (np.abs(firsts) > tiny[1:])
    )
    delta = np.where(link_ok, np.angle(seconds) - np.angle(firsts), 0.0)
    breaks = tuple(int(i) + 1 for i in np.nonzero(~link_ok)[0])
    phases = np.concatenate([[0.0], np.cumsum(delta)])
    aligned = vecs * np.exp(1j * phases)[:, None]
    x = np.empty(n, dtype=np.complex128)
    x[0] = aligned[0, 0]
    x[1 : n - 1] = 0.5 * (aligned[:-1, 1] + aligned[1:, 0])
    x[n - 1] = aligned[-1, 1]
    return x, breaks


def _stitch_psi_arrays(vecs: np.ndarray, degenerate: np.ndarray):
    nblocks = vecs.shape[0]
    firsts = vecs[:, 0]
    mags = np.abs(firsts)
    have_phase = mags > STITCH_ZERO_RTOL * np.linalg.norm(vecs, axis=1)
    rot = np.where(have_phase, np.conj(firsts) / np.where(have_phase, mags, 1.0), 1.0)
    flagged = tuple(int(i) + 1 for i in np.nonzero(~have_phase & ~degenerate)[0])
    aligned = vecs * rot[:, None]
    x = np.empty(nblocks + 1, dtype=np.complex128)
    keep = ~degenerate
    # hub entries align to their own magnitude, so the mean is real >= 0
    x[0] = float(np.mean(np.abs(aligned[keep, 0]))) if np.any(keep) else 0.0
    x[1:] = aligned[:, 1]
    return x, flagged


def stitch_phi(blocks) -> np.ndarray:
    """Chain-stitch phi blocks (block n estimates (x[n], x[n+1])).

    Forward pass from block 1; the overlapping entry is the average of
    its two aligned estimates.  A degenerate or zero-overlap block makes
    the next phase offset default to 0.
    """
    vecs = np.stack([np.asarray(b.vec, dtype=np.complex128) for b in blocks])
    degenerate = np.array([b.degenerate for b in blocks], dtype=bool)
    x, _ = _stitch_phi_arrays(vecs, degenerate)
    return x


def stitch_psi(blocks) -> np.ndarray:
    """Hub-stitch psi blocks (block n estimates (x[1], x[n+1])).

    Each block is rotated to make its hub entry real nonnegative; the
    hub estimate is the mean over non-degenerate blocks.
    """
    vecs = np.stack([np.asarray(b.vec, dtype=np.complex128) for b in blocks])
    degenerate = np.array([b.degenerate for b in blocks], dtype=bool)
    x, _ = _stitch_psi_arrays(vecs, degenerate)
    return x


def recover(kind: str, b, n: int) -> RecoveryReport:
    """Recover a length-n signal from 4(n-1) intensity measurements.

    Exact (up to global phase) for noiseless measurements of signals in
    the kind's recoverable set; best effort with diagnostics otherwise.
    Raises RecoveryError when every block is degenerate.
    """
    k = kind.lower()
    if k not in (KIND_PHI, KIND_PSI):
        raise ValueError(f"recover expects kind phi or psi, got {kind!r}")
    vals = intensity_values(b)
    if n < 2:
        raise ValueError(f"signal dimension must be at least 2, got {n}")
    if vals.shape[0] != 4 * (n - 1):
        raise ValueError(
            f"expected {4 * (n - 1)} measurements for dimension {n}, got {vals.shape[0]}"
        )
    bmat = vals.reshape(n - 1, 4)
    Qs = _reconstruct_block_matrices(bmat)
    lam, vecs, degenerate = _factor_blocks(Qs)
    if bool(np.all(degenerate)):
        raise RecoveryError("all blocks degenerate (every lambda_max <= 0)")
    if k == KIND_PHI:
        x, breaks = _stitch_phi_arrays(vecs, degenerate)
        mag0 = np.abs(x[0])
        if mag0 > 0.0:
            x = x * (np.conj(x[0]) / mag0)
            x[0] = mag0
    else:
        x, breaks = _stitch_psi_arrays(vecs, degenerate)
    return RecoveryReport(
        x_hat=x,
        kind=k,
        degenerate_count=int(np.sum(degenerate)),
        chain_breaks=breaks,
        _Qs=Qs,
        _lam=lam,
        _vecs=vecs,
        _degenerate=degenerate,
    )


def aligned_error(x, x_hat) -> float:
    """min over |c| = 1 of ||x - c x_hat||^2.

    Equals ||x||^2 + ||x_hat||^2 - 2 |<x, x_hat>|, evaluated through the
    minimizing rotation's residual so that near-exact estimates are not
    swamped by cancellation of the two norm terms.
    """
    a = np.asarray(x, dtype=np.complex128)
    b = np.asarray(x_hat, dtype=np.complex128)
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    inner = np.vdot(b, a)
    mag = np.abs(inner)
    c = inner / mag if mag > 0.0 else 1.0
    r = a - c * b
    return float(np.real(np.vdot(r, r)))
