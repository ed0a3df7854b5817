"""Monte Carlo noise bench: SNR sweeps of the normalized mean squared
error with analytic bound overlays, the fixed-hub variant, and random
ensemble comparisons under SDP recovery.

Per-trial randomness comes from an isolated counter stream keyed
(seed, point_index << 32 | trial_index), so results are bit-identical
for any worker count.  The normalized MSE is the trial mean of the
phase-aligned squared error divided by the trial mean of ||x||^2; the
reported spread is the per-trial standard deviation under the same
normalizer.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .measurements import (
    KIND_PHI,
    KIND_PSI,
    KIND_RANDOM,
    add_noise,
    build_ensemble,
    build_random_ensemble,
    measure,
)
from .numerics import Rng, gaussian_complex
from .recovery_algebraic import RecoveryError, aligned_error, recover
from .recovery_sdp import SdpConfig, solve_phaselift

CSV_HEADER = "snr_db,mse_mean,mse_std,bound_high,bound_low,trials,degenerate"


@dataclass(frozen=True)
class BenchConfig:
    kind: str  # phi | psi | random
    method: str  # algebraic | sdp
    n: int
    snr_grid_db: tuple[float, ...]
    trials: int = 1000
    sigma_x2: float = 1.0
    fix_first: bool = False
    mu: float | None = None  # bound parameter; defaults to sigma_x
    gamma: float = 0.5  # bound parameter
    seed: int = 0
    random_l: int | None = None  # ensemble size for kind random (default 4N)
    sdp_max_iter: int = 5000
    sdp_tol: float = 1e-7
    epsilon_override: float | None = None  # else L * sigma_nu^2

    def __post_init__(self):
        if self.kind not in (KIND_PHI, KIND_PSI, KIND_RANDOM):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.method not in ("algebraic", "sdp"):
            raise ValueError(f"unknown method {self.method!r}")
        if self.kind == KIND_RANDOM and self.method != "sdp":
            raise ValueError("random ensembles are recovered via sdp only")
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.sigma_x2 <= 0:
            raise ValueError("sigma_x2 must be positive")
        if len(self.snr_grid_db) == 0:
            raise ValueError("empty SNR grid")
        for s in self.snr_grid_db:
            if math.isnan(s) or s == -math.inf:
                raise ValueError(f"invalid SNR grid value {s}")
        object.__setattr__(self, "snr_grid_db", tuple(float(s) for s in self.snr_grid_db))

    @property
    def mu_effective(self) -> float:
        return self.mu if self.mu is not None else math.sqrt(self.sigma_x2)

    @property
    def ensemble_size(self) -> int:
        if self.kind == KIND_RANDOM:
            return self.random_l if self.random_l is not None else 4 * self.n
        return 4 * (self.n - 1)


@dataclass(frozen=True)
class BenchPoint:
    snr_db: float
    mse_mean: float
    mse_std: float
    bound_high: float
    bound_low: float
    trials_used: int
    degenerate_trials: int
    small_hub_fraction: float  # share of trials with |x[1]|^2 < sigma_x^2


@dataclass(frozen=True)
class BenchResult:
    config: BenchConfig
    points: tuple[BenchPoint, ...]

    def to_csv(self) -> str:
        lines = [CSV_HEADER]
        for p in self.points:
            lines.append(
                f"{p.snr_db:.9g},{p.mse_mean:.9g},{p.mse_std:.9g},"
                f"{p.bound_high:.9g},{p.bound_low:.9g},{p.trials_used:d},{p.degenerate_trials:d}"
            )
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class PsiBound:
    high: float  # 1/SNR regime curve
    low: float  # 1/sqrt(SNR) regime curve
    threshold_db: float  # SNR above which the high-SNR regime applies


def bound_psi(snr: float, sigma_x2: float = 1.0, mu: float | None = None, gamma: float = 0.5) -> PsiBound:
    """Normalized-MSE bounds for the hub design.

    The expected-error constants are 12(1+gamma)/mu^2 (high SNR, against
    noise power) and 14 sqrt(3/2) (1+gamma) (low SNR, against noise
    amplitude); the noise-to-signal bookkeeping uses E||nu||^2 =
    L sigma_nu^2 with L ~ 4N and E||x||^2 = N sigma_x^2, which cancels N.
    At mu = sigma_x, gamma = 1/2 the curves are 72/(sigma_x^2 SNR) and
    sqrt(3/2) 42/(sigma_x sqrt(SNR)), changing over near 9.5 dB.
    """
    if snr <= 0 or sigma_x2 <= 0 or gamma <= 0:
        raise ValueError("snr, sigma_x2 and gamma must be positive")
    mu_val = mu if mu is not None else math.sqrt(sigma_x2)
    if mu_val <= 0:
        raise ValueError("mu must be positive")
    high = (12.0 * (1.0 + gamma) / mu_val**2) * 4.0 / snr
    low = (28.0 * math.sqrt(1.5) * (1.0 + gamma)) / (math.sqrt(sigma_x2) * math.sqrt(snr))
    snr_threshold = 18.0 * sigma_x2 / (sigma_x2 + mu_val**2)
    return PsiBound(high=high, low=low, threshold_db=10.0 * math.log10(snr_threshold))


def phi_error_constant(n: int, mu: float, gamma: float) -> float:
    """Expected-error constant of the chain design: (6/mu^2)/(N-1) times
    sum_{m=0}^{N-2} (N-m-1) (2 gamma)^m, in closed form.  3N/mu^2 at
    gamma = 1/2."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if mu <= 0 or gamma <= 0:
        raise ValueError("mu and gamma must be positive")
    if abs(2.0 * gamma - 1.0) < 1e-12:
        return 3.0 * n / mu**2
    r = 2.0 * gamma
    return (6.0 / mu**2) / (r - 1.0) ** 2 * (r**n - r * n + n - 1.0) / (n - 1.0)


def bound_phi(snr: float, sigma_x2: float, n: int, mu: float | None = None, gamma: float = 0.5) -> float:
    """Normalized-MSE bound for the chain design: 12N/(sigma_x^2 SNR) at
    mu = sigma_x, gamma = 1/2."""
    if snr <= 0 or sigma_x2 <= 0:
        raise ValueError("snr and sigma_x2 must be positive")
    mu_val = mu if mu is not None else math.sqrt(sigma_x2)
    return 4.0 * phi_error_constant(n, mu_val, gamma) / snr


def _trial_stream(point_idx: int, trial_idx: int) -> int:
    return (point_idx << 32) | trial_idx


def _run_chunk(args):
    """Trials [t0, t1) of one SNR point; returns per-trial arrays."""
    cfg, point_idx, sigma_nu2, t0, t1 = args
    n = cfg.n
    ensemble = None
    if cfg.kind in (KIND_PHI, KIND_PSI):
        ensemble = build_ensemble(cfg.kind, n)
    count = t1 - t0
    err2 = np.empty(count)
    norm2 = np.empty(count)
    degenerate = np.zeros(count, dtype=bool)
    small_hub = np.zeros(count, dtype=bool)
    for i, t in enumerate(range(t0, t1)):
        rng = Rng(cfg.seed, _trial_stream(point_idx, t))
        x = gaussian_complex(rng, n, cfg.sigma_x2)
        if cfg.fix_first:
            x[0] = 1.0
        small_hub[i] = np.abs(x[0]) ** 2 < cfg.sigma_x2
        E = ensemble
        if E is None:
            E = build_random_ensemble(rng, n, cfg.ensemble_size)
        b = add_noise(measure(E, x), sigma_nu2, rng)
        norm2[i] = float(np.sum(np.abs(x) ** 2))
        if cfg.method == "algebraic":
            try:
                rep = recover(cfg.kind, b, n)
                err2[i] = aligned_error(x, rep.x_hat)
                degenerate[i] = rep.degenerate_count > 0 or len(rep.chain_breaks) > 0
            except RecoveryError:
                err2[i] = norm2[i]
                degenerate[i] = True
        else:
            eps = cfg.epsilon_override
            if eps is None:
                eps = E.L * sigma_nu2
            res = solve_phaselift(
                E, b, SdpConfig(max_iter=cfg.sdp_max_iter, tol=cfg.sdp_tol, epsilon=eps)
            )
            err2[i] = aligned_error(x, res.x_hat)
            degenerate[i] = not res.converged
    return err2, norm2, degenerate, small_hub


def _point_bounds(cfg: BenchConfig, snr_lin: float) -> tuple[float, float]:
    if cfg.kind == KIND_PSI:
        pb = bound_psi(snr_lin, cfg.sigma_x2, cfg.mu_effective, cfg.gamma)
        return pb.high, pb.low
    if cfg.kind == KIND_PHI:
        return bound_phi(snr_lin, cfg.sigma_x2, cfg.n, cfg.mu_effective, cfg.gamma), math.nan
    return math.nan, math.nan


def run_bench(cfg: BenchConfig, jobs: int = 1) -> BenchResult:
    """Run the full SNR sweep; deterministic for any jobs count."""
    if jobs < 1:
        raise ValueError("jobs must be at least 1")
    tasks = []
    chunk = max(1, -(-cfg.trials // max(jobs, 1)))
    for p_idx, _snr_db in enumerate(cfg.snr_grid_db):
        snr_lin = 10.0 ** (cfg.snr_grid_db[p_idx] / 10.0)
        sigma_nu2 = cfg.sigma_x2 / snr_lin if math.isfinite(snr_lin) else 0.0
        for t0 in range(0, cfg.trials, chunk):
            tasks.append((cfg, p_idx, sigma_nu2, t0, min(t0 + chunk, cfg.trials)))
    if jobs == 1:
        chunks = [_run_chunk(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_chunk, tasks))

    points = []
    cursor = 0
    for p_idx, snr_db in enumerate(cfg.snr_grid_db):
        parts = []
        while cursor < len(tasks) and tasks[cursor][1] == p_idx:
            parts.append(chunks[cursor])
            cursor += 1
        err2 = np.concatenate([c[0] for c in parts])
        norm2 = np.concatenate([c[1] for c in parts])
        degenerate = np.concatenate([c[2] for c in parts])
        small_hub = np.concatenate([c[3] for c in parts])
        snr_lin = 10.0 ** (snr_db / 10.0)
        bound_high, bound_low = _point_bounds(cfg, snr_lin)
        denom = float(np.mean(norm2))
        points.append(
            BenchPoint(
                snr_db=snr_db,
                mse_mean=float(np.mean(err2)) / denom,
                mse_std=float(np.std(err2)) / denom,
                bound_high=bound_high,
                bound_low=bound_low,
                trials_used=cfg.trials,
                degenerate_trials=int(np.sum(degenerate)),
                small_hub_fraction=float(np.mean(small_hub)),
            )
        )
    return BenchResult(config=cfg, points=tuple(points))


def summary_lines(result: BenchResult) -> list[str]:
    """Human-readable per-point summary (stdout companion to the CSV)."""
    cfg = result.config
    lines = [
        f"bench kind={cfg.kind} method={cfg.method} n={cfg.n} trials={cfg.trials} "
        f"sigma_x2={cfg.sigma_x2:g} fix_first={cfg.fix_first} seed={cfg.seed}"
    ]
    for p in result.points:
        lines.append(
            f"snr={p.snr_db:g} dB  mse={p.mse_mean:.4e} (std {p.mse_std:.4e})  "
            f"bound_high={p.bound_high:.4e}  degenerate={p.degenerate_trials}/{p.trials_used}  "
            f"small_hub_frac={p.small_hub_fraction:.3f}"
        )
    return lines


def parse_snr_grid(text: str) -> tuple[float, ...]:
    """Parse "10,20,30" or "start:step:stop" (stop inclusive) into dB values."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError("range grid must be start:step:stop")
        start, step, stop = (float(p) for p in parts)
        if step <= 0:
            raise ValueError("grid step must be positive")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        if count < 1:
            raise ValueError("empty SNR range")
        return tuple(start + i * step for i in range(count))
    return tuple(float(p) for p in text.split(",") if p.strip())


def with_seed(cfg: BenchConfig, seed: int) -> BenchConfig:
    return replace(cfg, seed=seed)
