"""Measurement ensembles, the quadratic/lifted measurement maps, additive
intensity noise, and the mask/DFT realization of the deterministic
designs.

The two deterministic ensembles place the four frame vectors on sliding
pairs of coordinates (kind "phi": supports {n, n+1}) or against a fixed
hub coordinate (kind "psi": supports {1, n+1}), n = 1..N-1.  Measurement
l = 4(n-1) + m is vector (m, n); this serialization is fixed repo-wide.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frames import standard_frame
from .numerics import Rng, as_hermitian, as_vector, dft, format_complex_vector

KIND_PHI = "phi"
KIND_PSI = "psi"
KIND_RANDOM = "random"
DETERMINISTIC_KINDS = (KIND_PHI, KIND_PSI)


@dataclass(frozen=True)
class Ensemble:
    """Ordered list of measurement vectors with kind and dimension tags."""

    kind: str
    n: int
    vectors: np.ndarray  # (L, N), row l is v_l

    @property
    def L(self) -> int:
        return self.vectors.shape[0]

    def vector(self, m: int, n: int) -> np.ndarray:
        """Vector (m, n), both 1-based, for the deterministic kinds."""
        if self.kind not in DETERMINISTIC_KINDS:
            raise ValueError("(m, n) indexing applies to phi/psi ensembles only")
        if not (1 <= m <= 4 and 1 <= n <= self.n - 1):
            raise ValueError(f"index (m={m}, n={n}) out of range")
        return self.vectors[4 * (n - 1) + (m - 1)]


@dataclass(frozen=True)
class IntensityVector:
    """Real measurement vector; noisy values may dip below zero."""

    values: np.ndarray
    noise_variance: float | None = None

    def __len__(self) -> int:
        return self.values.shape[0]


def intensity_values(b) -> np.ndarray:
    """Accept an IntensityVector or a bare array of intensities."""
    if isinstance(b, IntensityVector):
        return b.values
    arr = np.asarray(b, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d intensity vector, got shape {arr.shape}")
    return arr


def _check_kind(kind: str) -> str:
    k = kind.lower()
    if k not in (KIND_PHI, KIND_PSI, KIND_RANDOM):
        raise ValueError(f"unknown ensemble kind {kind!r}")
    return k


def build_ensemble(kind: str, n: int) -> Ensemble:
    """The 4(N-1) deterministic measurement vectors of the given kind."""
    k = _check_kind(kind)
    if k not in DETERMINISTIC_KINDS:
        raise ValueError("build_ensemble handles phi/psi; use build_random_ensemble")
    if n < 2:
        raise ValueError(f"signal dimension must be at least 2, got {n}")
    a = standard_frame().vectors  # (2, 4)
    V = np.zeros((4 * (n - 1), n), dtype=np.complex128)
    for blk in range(n - 1):  # block index n-1 (0-based)
        lo = 4 * blk
        if k == KIND_PHI:
            V[lo : lo + 4, blk] = a[0]
            V[lo : lo + 4, blk + 1] = a[1]
        else:
            V[lo : lo + 4, 0] = a[0]
            V[lo : lo + 4, blk + 1] = a[1]
    return Ensemble(kind=k, n=n, vectors=V)


def build_random_ensemble(rng: Rng, n: int, l: int) -> Ensemble:
    """l unit-norm i.i.d. complex Gaussian direction vectors."""
    if n < 1 or l < 1:
        raise ValueError("need n >= 1 and l >= 1")
    z = rng.standard_normal((l, n, 2))
    V = z[:, :, 0] + 1j * z[:, :, 1]
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    return Ensemble(kind=KIND_RANDOM, n=n, vectors=V)


def measure(ensemble: Ensemble, x) -> IntensityVector:
    """Quadratic intensities b[l] = |<x, v_l>|^2."""
    v = as_vector(x)
    if v.shape[0] != ensemble.n:
        raise ValueError(f"signal dimension {v.shape[0]} != ensemble dimension {ensemble.n}")
    if ensemble.kind in DETERMINISTIC_KINDS:
        a = standard_frame().vectors
        if ensemble.kind == KIND_PHI:
            pairs = np.stack([v[:-1], v[1:]])  # (2, N-1)
        else:
            pairs = np.stack([np.full(ensemble.n - 1, v[0]), v[1:]])
        inner = a.conj().T @ pairs  # (4, N-1): <x_n, a_m>
        vals = np.abs(inner) ** 2
        return IntensityVector(vals.flatten(order="F"))
    inner = ensemble.vectors.conj() @ v
    return IntensityVector(np.abs(inner) ** 2)


def measure_lifted(ensemble: Ensemble, X) -> IntensityVector:
    """Lifted linear map b[l] = <X, v_l v_l*> on Hermitian X."""
    A = as_hermitian(X)
    if A.shape[0] != ensemble.n:
        raise ValueError(f"matrix dimension {A.shape[0]} != ensemble dimension {ensemble.n}")
    V = ensemble.vectors
    vals = np.real(np.einsum("li,ij,lj->l", V.conj(), A, V))
    return IntensityVector(vals)


def adjoint(ensemble: Ensemble, b) -> np.ndarray:
    """Adjoint of the lifted map: sum_l b[l] v_l v_l*."""
    vals = intensity_values(b)
    if vals.shape[0] != ensemble.L:
        raise ValueError(f"intensity length {vals.shape[0]} != ensemble size {ensemble.L}")
    V = ensemble.vectors
    Y = np.einsum("l,li,lj->ij", vals, V, V.conj())
    return 0.5 * (Y + Y.conj().T)


def add_noise(b, sigma_nu2: float, rng: Rng) -> IntensityVector:
    """Additive i.i.d. Gaussian noise N(0, sigma_nu2) on each intensity."""
    if sigma_nu2 < 0:
        raise ValueError("noise variance must be nonnegative")
    vals = intensity_values(b)
    noisy = vals + np.sqrt(sigma_nu2) * rng.standard_normal(vals.shape[0])
    return IntensityVector(noisy, noise_variance=float(sigma_nu2))


@dataclass(frozen=True)
class MaskSet:
    """Four transmittance sequences realizing one deterministic kind."""

    kind: str
    masks: np.ndarray  # (4, N)

    @property
    def n(self) -> int:
        return self.masks.shape[1]


def build_masks(kind: str, n: int) -> MaskSet:
    """Masks whose modulate-then-DFT intensities reproduce the ensemble.

    phi: p_m[t] = conj(a_m[1]) + conj(a_m[2]) e^{-2 pi i (t-1)/N}
    psi: p_m[t] = conj(a_m[1]) delta[t] + conj(a_m[2])
    """
    k = _check_kind(kind)
    if k not in DETERMINISTIC_KINDS:
        raise ValueError("masks exist for the phi/psi kinds only")
    if n < 2:
        raise ValueError(f"signal dimension must be at least 2, got {n}")
    a = standard_frame().vectors.conj()  # (2, 4)
    t = np.arange(n)
    if k == KIND_PHI:
        masks = a[0][:, None] + a[1][:, None] * np.exp(-2j * np.pi * t / n)[None, :]
    else:
        delta = np.zeros(n)
        delta[0] = 1.0
        masks = a[0][:, None] * delta[None, :] + a[1][:, None] * np.ones(n)[None, :]
    return MaskSet(kind=k, masks=masks)


def mask_measure(x, masks: MaskSet) -> IntensityVector:
    """Intensities |DFT(x * p_m)[n]|^2 of the masked signal.

    phi masks yield 4(N-1) values matching measure(build_ensemble(phi, N),
    dft(x)).  psi masks yield 4N values matching the psi ensemble in
    C^{N+1} applied to the augmented vector (x[1], dft(x)).
    """
    v = as_vector(x)
    n = masks.n
    if v.shape[0] != n:
        raise ValueError(f"signal dimension {v.shape[0]} != mask dimension {n}")
    spectra = np.stack([dft(v * masks.masks[m]) for m in range(4)])  # (4, N)
    if masks.kind == KIND_PHI:
        vals = np.abs(spectra[:, : n - 1]) ** 2  # (4, N-1)
    else:
        vals = np.abs(spectra) ** 2  # (4, N)
    return IntensityVector(vals.flatten(order="F"))


def in_recoverable_set(kind: str, x, mu: float = 0.0) -> bool:
    """Membership in the set where the kind's recovery is guaranteed.

    phi: |x[n]| > mu for n = 2..N-1; psi: |x[1]| > mu.
    """
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    k = _check_kind(kind)
    v = as_vector(x)
    if k == KIND_PHI:
        if v.shape[0] <= 2:
            return True
        return bool(np.all(np.abs(v[1:-1]) > mu))
    if k == KIND_PSI:
        return bool(np.abs(v[0]) > mu)
    raise ValueError("recoverable sets are defined for the phi/psi kinds")


def format_ensemble(ensemble: Ensemble) -> str:
    """Ensemble text format: header "kind N L", then L vectors in the
    shared complex format separated by blank lines."""
    parts = [f"{ensemble.kind} {ensemble.n} {ensemble.L}\n"]
    for row in ensemble.vectors:
        parts.append(format_complex_vector(row))
    return "\n".join(parts)


def write_ensemble(path, ensemble: Ensemble) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_ensemble(ensemble))


def read_ensemble(path) -> Ensemble:
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.readlines()
    header = None
    groups: list[list[complex]] = []
    current: list[complex] = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if line.startswith("#"):
            continue
        if header is None:
            if not line:
                continue
            tokens = line.split()
            if len(tokens) != 3:
                raise ValueError(f"{path}:{lineno}: expected header 'kind N L'")
            header = (_check_kind(tokens[0]), int(tokens[1]), int(tokens[2]))
            continue
        if not line:
            if current:
                groups.append(current)
                current = []
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 're im', got {line!r}")
        current.append(complex(float(parts[0]), float(parts[1])))
    if current:
        groups.append(current)
    if header is None:
        raise ValueError(f"{path}: missing ensemble header")
    kind, n, l = header
    if len(groups) != l:
        raise ValueError(f"{path}: header says {l} vectors, found {len(groups)}")
    V = np.zeros((l, n), dtype=np.complex128)
    for i, grp in enumerate(groups):
        if len(grp) != n:
            raise ValueError(f"{path}: vector {i + 1} has {len(grp)} entries, expected {n}")
        V[i] = grp
    return Ensemble(kind=kind, n=n, vectors=V)


def write_intensity(path, b) -> None:
    vals = intensity_values(b)
    with open(path, "w", encoding="utf-8") as fh:
        for v in vals:
            fh.write(f"{v:.17g}\n")


def read_intensity(path) -> IntensityVector:
    vals = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                vals.append(float(line))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: expected one real per line") from exc
    if not vals:
        raise ValueError(f"{path}: no intensity values found")
    return IntensityVector(np.array(vals))
