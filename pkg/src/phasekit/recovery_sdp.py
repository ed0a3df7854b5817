"""PhaseLift-style recovery for the lifted feasibility problem
{A(X) = b (or within epsilon), X >= 0}, with leading-eigenvector
extraction.

The iteration is Douglas-Rachford splitting between the PSD cone and
the measurement-consistency set (reflect against one set, project onto
the other, average).  Both primitives are plain Frobenius projections:
the affine step uses the pseudo-inverted Gram matrix G = A A*; with a
positive noise radius it instead shrinks the residual onto the ball
||A(X) - b|| <= epsilon.  Plain alternation of the same two projections
converges too slowly on this problem family (the constraint set touches
the cone tangentially at the solution), which is why the reflected form
is used; the governing iterate keeps the non-increasing displacement
property of convex splitting.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measurements import Ensemble, adjoint, intensity_values, measure_lifted
from .numerics import eig_hermitian, project_psd

GRAM_CUTOFF = 1e-10  # eigenvalue cutoff for the Gram pseudo-inverse, relative to lambda_max


@dataclass(frozen=True)
class SdpConfig:
    max_iter: int = 5000
    tol: float = 1e-7  # relative Frobenius change threshold
    epsilon: float = 0.0  # noise-ball radius; 0 means exact consistency
    trace_weight: float = 0.0  # optional subgradient step on trace(X)

    def __post_init__(self):
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.tol <= 0:
            raise ValueError("tol must be positive")
        if self.epsilon < 0 or self.trace_weight < 0:
            raise ValueError("epsilon and trace_weight must be nonnegative")


@dataclass(frozen=True)
class SdpResult:
    X: np.ndarray
    x_hat: np.ndarray
    iterations: int
    residual: float  # ||A(X) - b|| (distance to the ball when epsilon > 0)
    converged: bool
    rank1_gap: float  # lambda_2 / lambda_1 of X
    displacement_monotone: bool


class AffineProjector:
    """Frobenius projection onto the measurement-consistency set of one
    ensemble; the Gram factorization is computed once and reused."""

    def __init__(self, ensemble: Ensemble):
        self.ensemble = ensemble
        V = ensemble.vectors
        G = np.abs(V.conj() @ V.T) ** 2
        dec = eig_hermitian(G)
        lam = dec.values
        cutoff = GRAM_CUTOFF * max(lam[0], 0.0)
        keep = lam > cutoff
        self._U = dec.vectors.real
        self._inv = np.where(keep, 1.0 / np.where(keep, lam, 1.0), 0.0)

    def _pinv(self, r: np.ndarray) -> np.ndarray:
        return self._U @ (self._inv * (self._U.T @ r))

    def apply(self, X: np.ndarray, b: np.ndarray, epsilon: float) -> np.ndarray:
        r = measure_lifted(self.ensemble, X).values - b
        rnorm = float(np.linalg.norm(r))
        if epsilon > 0.0:
            if rnorm <= epsilon:
                return X
            r = r * (1.0 - epsilon / rnorm)
        Y = X - adjoint(self.ensemble, self._pinv(r))
        return 0.5 * (Y + Y.conj().T)


def project_affine(ensemble: Ensemble, X, b, epsilon: float = 0.0) -> np.ndarray:
    """One-shot affine/ball projection (builds the Gram factorization)."""
    return AffineProjector(ensemble).apply(
        np.asarray(X, dtype=np.complex128), intensity_values(b), epsilon
    )


def _ball_residual(r: float, epsilon: float) -> float:
    return max(r - epsilon, 0.0) if epsilon > 0.0 else r


def solve_phaselift(ensemble: Ensemble, b, cfg: SdpConfig | None = None) -> SdpResult:
    """Iterate the splitting to a measurement-consistent PSD matrix, then
    extract x_hat = sqrt(lambda_max) u.

    Converged means the primal iterate moved less than cfg.tol
    (relative Frobenius) while its constraint residual is below
    max(1e-9, epsilon * 1e-3).  Non-convergence within max_iter is
    reported in the result, not raised.
    """
    if cfg is None:
        cfg = SdpConfig()
    bvals = intensity_values(b)
    if bvals.shape[0] != ensemble.L:
        raise ValueError(f"intensity length {bvals.shape[0]} != ensemble size {ensemble.L}")
    if not np.all(np.isfinite(bvals)):
        raise ValueError("intensity vector contains NaN or Inf")
    proj = AffineProjector(ensemble)
    n = ensemble.n
    Y = adjoint(ensemble, bvals) / ensemble.L  # governing iterate
    X = project_psd(Y)

    converged = False
    monotone = True
    prev_disp = np.inf
    residual = _ball_residual(float(np.linalg.norm(measure_lifted(ensemble, X).values - bvals)), cfg.epsilon)
    iterations = 0
    for it in range(1, cfg.max_iter + 1):
        iterations = it
        PA = proj.apply(Y, bvals, cfg.epsilon)
        reflected = 2.0 * PA - Y
        if cfg.trace_weight > 0.0:
            reflected = reflected - cfg.trace_weight * np.eye(n)
        R = project_psd(reflected)
        Y_next = Y + R - PA
        disp = float(np.linalg.norm(Y_next - Y))
        scale = max(float(np.linalg.norm(Y_next)), 1e-300)
        if it > 10 and disp > prev_disp * (1.0 + 1e-8) + 1e-9 * scale:
            monotone = False
        prev_disp = disp
        Y = Y_next

        x_change = float(np.linalg.norm(R - X))
        x_scale = max(float(np.linalg.norm(R)), 1e-300)
        X = R
        r = float(np.linalg.norm(measure_lifted(ensemble, X).values - bvals))
        residual = _ball_residual(r, cfg.epsilon)
        feas_tol = max(1e-9, cfg.epsilon * 1e-3)
        if x_change / x_scale < cfg.tol and residual < feas_tol:
            converged = True
            break

    dec = eig_hermitian(X)
    lam1 = float(dec.values[0])
    lam2 = float(dec.values[1]) if n > 1 else 0.0
    x_hat = np.sqrt(max(lam1, 0.0)) * dec.vectors[:, 0]
    rank1_gap = lam2 / lam1 if lam1 > 0.0 else 1.0
    return SdpResult(
        X=X,
        x_hat=x_hat,
        iterations=iterations,
        residual=residual,
        converged=converged,
        rank1_gap=rank1_gap,
        displacement_monotone=monotone,
    )
