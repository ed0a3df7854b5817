"""Line-oriented verification suites behind the `verify` CLI subcommand.

Each suite returns CheckRecord rows; a record is one PASS/FAIL line.
Metrics are the worst observed value over the suite's draws, so a
passing line documents the margin, not just the verdict.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .certificates import build_certificate, check_injectivity_on_T, nullspace_basis
from .frames import FRAME_SCALE, dual_coefficients, reconstruct_rank1, standard_frame
from .measurements import (
    KIND_PHI,
    KIND_PSI,
    adjoint,
    build_ensemble,
    build_masks,
    in_recoverable_set,
    mask_measure,
    measure,
    measure_lifted,
)
from .numerics import Rng, dft, eig2_hermitian, gaussian_complex
from .recovery_algebraic import aligned_error

SUITES = ("frames", "nullspace", "certificate", "injectivity", "masks", "bounds")


@dataclass(frozen=True)
class CheckRecord:
    passed: bool
    name: str
    params: str
    metric: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name} {self.params} {self.metric:.3e}"


def _draw_in_set(kind: str, n: int, rng: Rng) -> np.ndarray:
    x = gaussian_complex(rng, n, 1.0)
    while not in_recoverable_set(kind, x, 0.0):
        x = gaussian_complex(rng, n, 1.0)
    return x


def suite_frames(trials: int = 1000, seed: int = 0) -> list[CheckRecord]:
    frame = standard_frame()
    a = frame.vectors
    records = []

    norms = np.linalg.norm(a, axis=0)
    records.append(CheckRecord(bool(np.max(np.abs(norms - 1)) <= 1e-12), "frame-unit-norm", "m=1..4", float(np.max(np.abs(norms - 1)))))

    tight = np.linalg.norm(frame.outers.sum(axis=0) - 2.0 * np.eye(2))
    records.append(CheckRecord(tight <= 1e-12, "frame-tightness", "sum A_m = 2 I", float(tight)))

    gram = np.abs(a.conj().T @ a) ** 2
    target = np.full((4, 4), 1.0 / 3.0)
    np.fill_diagonal(target, 1.0)
    gerr = float(np.max(np.abs(gram - target)))
    records.append(CheckRecord(gerr <= 1e-12, "frame-gram", "diag 1, off 1/3", gerr))

    dd = np.real(np.einsum("mij,nij->mn", frame.duals.conj(), frame.duals))
    dtarget = np.full((4, 4), -1.0 / 9.0)
    np.fill_diagonal(dtarget, 5.0 / 9.0)
    derr = float(np.max(np.abs(dd - dtarget)))
    records.append(CheckRecord(derr <= 1e-12, "frame-dual-gram", "5/9 diag, -1/9 off", derr))

    rng = Rng(seed, 101)
    worst_rec = 0.0
    worst_dual = 0.0
    for _ in range(trials):
        x = gaussian_complex(rng, 2, 1.0)
        Q = np.outer(x, x.conj())
        b = np.abs(a.conj().T @ x) ** 2
        worst_rec = max(worst_rec, float(np.linalg.norm(reconstruct_rank1(b) - Q)))
        g = dual_coefficients(Q)
        worst_dual = max(
            worst_dual,
            float(np.linalg.norm(FRAME_SCALE * np.einsum("m,mij->ij", g, frame.outers) - Q)),
        )
    scale = 4.0  # E||x||^2 = 2, so ||Q|| ~ 2; fixed reporting scale
    records.append(CheckRecord(worst_rec <= 1e-12 * scale, "rank1-reconstruction", f"trials={trials}", worst_rec))
    records.append(CheckRecord(worst_dual <= 1e-11 * scale, "dual-identity", f"trials={trials}", worst_dual))
    return records


def suite_nullspace(kind: str, n: int) -> list[CheckRecord]:
    basis = nullspace_basis(kind, n)
    expected = n * n - (3 * n - 2)
    records = [
        CheckRecord(len(basis) == expected, "nullspace-dimension", f"kind={kind} n={n}", float(len(basis)))
    ]
    worst = 0.0
    for B in basis:
        worst = max(worst, float(np.max(np.abs(np.diag(B)))))
        if kind == KIND_PHI:
            off = np.abs(np.diag(B, k=1))
        else:
            off = np.abs(B[0, :])
        if off.size:
            worst = max(worst, float(np.max(off)))
    records.append(
        CheckRecord(worst <= 1e-10, "nullspace-sparsity", f"kind={kind} n={n}", worst)
    )
    ensemble = build_ensemble(kind, n)
    worst_ann = 0.0
    for B in basis:
        worst_ann = max(worst_ann, float(np.linalg.norm(measure_lifted(ensemble, B).values)))
    records.append(
        CheckRecord(worst_ann <= 1e-10, "nullspace-annihilated", f"kind={kind} n={n}", worst_ann)
    )
    return records


def suite_certificate(kind: str, n: int, trials: int = 50, seed: int = 0) -> list[CheckRecord]:
    rng = Rng(seed, 202)
    ensemble = build_ensemble(kind, n)
    worst_kernel = 0.0
    worst_range = 0.0
    worst_gap = np.inf
    ok_zero_count = True
    for _ in range(trials):
        x = _draw_in_set(kind, n, rng)
        cert = build_certificate(kind, x)
        lam_max = cert.spectrum[0]
        worst_kernel = max(
            worst_kernel,
            float(np.linalg.norm(cert.Y @ x) / (np.linalg.norm(cert.Y) * np.linalg.norm(x))),
        )
        worst_range = max(
            worst_range, float(np.linalg.norm(cert.Y - adjoint(ensemble, cert.gamma)))
        )
        near_zero = int(np.sum(cert.spectrum <= 1e-9 * lam_max))
        ok_zero_count = ok_zero_count and near_zero == 1
        worst_gap = min(worst_gap, float(cert.spectrum[-2] / lam_max))
    params = f"kind={kind} n={n} trials={trials}"
    return [
        CheckRecord(worst_kernel <= 1e-10, "certificate-annihilates-x", params, worst_kernel),
        CheckRecord(worst_range <= 1e-12, "certificate-in-adjoint-range", params, worst_range),
        CheckRecord(ok_zero_count, "certificate-kernel-dim-1", params, 1.0 if ok_zero_count else 0.0),
        CheckRecord(worst_gap >= 1e-8, "certificate-spectral-gap", params, worst_gap),
    ]


def suite_injectivity(kind: str, n: int, trials: int = 20, seed: int = 0) -> list[CheckRecord]:
    rng = Rng(seed, 303)
    all_injective = True
    worst_rank = 2 * n - 1
    for _ in range(trials):
        x = _draw_in_set(kind, n, rng)
        rep = check_injectivity_on_T(kind, x)
        all_injective = all_injective and rep.injective
        worst_rank = min(worst_rank, rep.rank)
    params = f"kind={kind} n={n} trials={trials}"
    records = [
        CheckRecord(all_injective, "tangent-injective-in-set", params, float(worst_rank))
    ]
    y = gaussian_complex(rng, n, 1.0)
    if kind == KIND_PSI:
        y[0] = 0.0
    else:
        y[n // 2] = 0.0
    rep = check_injectivity_on_T(kind, y)
    records.append(
        CheckRecord(not rep.injective, "tangent-degenerate-out-of-set", params, float(rep.rank))
    )
    return records


def suite_masks(kind: str, n: int, trials: int = 50, seed: int = 0) -> list[CheckRecord]:
    rng = Rng(seed, 404)
    masks = build_masks(kind, n)
    worst = 0.0
    for _ in range(trials):
        x = gaussian_complex(rng, n, 1.0)
        piped = mask_measure(x, masks).values
        if kind == KIND_PHI:
            reference = measure(build_ensemble(KIND_PHI, n), dft(x)).values
        else:
            aug = np.concatenate([[x[0]], dft(x)])
            reference = measure(build_ensemble(KIND_PSI, n + 1), aug).values
        scale = max(float(np.max(np.abs(reference))), 1.0)
        worst = max(worst, float(np.max(np.abs(piped - reference))) / scale)
    return [
        CheckRecord(worst <= 1e-10, "mask-pipeline-equivalence", f"kind={kind} n={n} trials={trials}", worst)
    ]


def suite_bounds(trials: int = 10000, seed: int = 0) -> list[CheckRecord]:
    rng = Rng(seed, 505)
    records = []

    # Error-matrix norm bounds: B is the 4x4 quadratic-form matrix with
    # diagonal 5 and off-diagonal -1; its extreme eigenvalues give
    # ||DQ||^2 in [lam_min/4, lam_max/4] * ||nu||^2.
    B = np.full((4, 4), -1.0)
    np.fill_diagonal(B, 5.0)
    lam_min = float(np.min(np.linalg.eigvalsh(B)))
    upper_ok = True
    lower_ok = True
    worst_upper = 0.0
    worst_lower = np.inf
    for _ in range(trials):
        nu = rng.standard_normal(4)
        dq = reconstruct_rank1(nu)
        ratio2 = float(np.linalg.norm(dq) ** 2 / np.dot(nu, nu))
        upper_ok = upper_ok and ratio2 <= 1.5 * (1.0 + 1e-12)
        lower_ok = lower_ok and ratio2 >= (lam_min / 4.0) * (1.0 - 1e-12)
        worst_upper = max(worst_upper, ratio2)
        worst_lower = min(worst_lower, ratio2)
    records.append(
        CheckRecord(upper_ok, "error-matrix-upper", f"trials={trials} bound=3/2", worst_upper)
    )
    records.append(
        CheckRecord(
            lower_ok, "error-matrix-lower", f"trials={trials} lam_min(B)/4={lam_min / 4.0:g}", worst_lower
        )
    )

    # Factorization error regimes: 2 eps / ||x|| above the threshold
    # ||x||^2 >= 3 eps, sqrt(7 eps) below it, eps the spectral norm of
    # the Hermitian perturbation.
    regime_ok = True
    worst_margin = 0.0
    for _ in range(trials):
        x = gaussian_complex(rng, 2, 1.0)
        h = rng.standard_normal(4)
        scale = 10.0 ** rng.standard_normal(1)[0]
        dq = scale * np.array(
            [[h[0], h[1] + 1j * h[2]], [h[1] - 1j * h[2], h[3]]], dtype=np.complex128
        )
        q = np.outer(x, x.conj()) + dq
        dec = eig2_hermitian(q)
        xh = np.sqrt(max(dec.values[0], 0.0)) * dec.vectors[:, 0]
        err = float(np.sqrt(aligned_error(x, xh)))
        eps = float(np.max(np.abs(np.linalg.eigvalsh(dq))))
        nx2 = float(np.linalg.norm(x) ** 2)
        bound = 2.0 * eps / np.sqrt(nx2) if nx2 >= 3.0 * eps else np.sqrt(7.0 * eps)
        regime_ok = regime_ok and err <= bound * (1.0 + 1e-9) + 1e-12
        worst_margin = max(worst_margin, err / bound if bound > 0 else 0.0)
    records.append(
        CheckRecord(regime_ok, "factorization-error-regimes", f"trials={trials}", worst_margin)
    )
    return records


def run_suite(suite: str, kind: str = KIND_PHI, n: int = 8, trials: int | None = None, seed: int = 0) -> list[CheckRecord]:
    if suite == "frames":
        return suite_frames(trials or 1000, seed)
    if suite == "nullspace":
        return suite_nullspace(kind, n)
    if suite == "certificate":
        return suite_certificate(kind, n, trials or 50, seed)
    if suite == "injectivity":
        return suite_injectivity(kind, n, trials or 20, seed)
    if suite == "masks":
        return suite_masks(kind, n, trials or 50, seed)
    if suite == "bounds":
        return suite_bounds(trials or 10000, seed)
    raise ValueError(f"unknown suite {suite!r}; choose from {SUITES}")
