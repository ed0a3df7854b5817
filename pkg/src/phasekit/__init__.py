"""Phase retrieval from deterministic 4N-4 intensity measurements.

Two measurement designs (sliding-pair "phi" and hub-anchored "psi"),
an O(N) algebraic recovery algorithm, a PhaseLift-style SDP path,
structural verifiers (null spaces, dual certificates, tangent-space
injectivity), and a Monte Carlo noise bench with analytic bound
overlays.
"""

from ._backend import HAS_NUMBA, active_backend, set_backend
from .bench import BenchConfig, BenchResult, bound_phi, bound_psi, run_bench
from .certificates import (
    Certificate,
    TangentSpace,
    build_certificate,
    check_injectivity_on_T,
    nullspace_basis,
    tangent_space,
)
from .frames import TightFrame2, dual_coefficients, reconstruct_rank1, standard_frame
from .measurements import (
    Ensemble,
    IntensityVector,
    MaskSet,
    add_noise,
    adjoint,
    build_ensemble,
    build_masks,
    build_random_ensemble,
    in_recoverable_set,
    mask_measure,
    measure,
    measure_lifted,
)
from .numerics import (
    EigenConvergenceError,
    EigenDecomposition,
    Rng,
    dft,
    eig2_hermitian,
    eig_hermitian,
    gaussian_complex,
    idft,
    project_psd,
)
from .recovery_algebraic import (
    BlockEstimate,
    RecoveryError,
    RecoveryReport,
    aligned_error,
    block_reconstruct,
    recover,
    stitch_phi,
    stitch_psi,
)
from .recovery_sdp import SdpConfig, SdpResult, project_affine, solve_phaselift

__version__ = "0.1.0"

__all__ = [
    "HAS_NUMBA",
    "active_backend",
    "set_backend",
    "BenchConfig",
    "BenchResult",
    "bound_phi",
    "bound_psi",
    "run_bench",
    "Certificate",
    "TangentSpace",
    "build_certificate",
    "check_injectivity_on_T",
    "nullspace_basis",
    "tangent_space",
    "TightFrame2",
    "dual_coefficients",
    "reconstruct_rank1",
    "standard_frame",
    "Ensemble",
    "IntensityVector",
    "MaskSet",
    "add_noise",
    "adjoint",
    "build_ensemble",
    "build_masks",
    "build_random_ensemble",
    "in_recoverable_set",
    "mask_measure",
    "measure",
    "measure_lifted",
    "EigenConvergenceError",
    "EigenDecomposition",
    "Rng",
    "dft",
    "eig2_hermitian",
    "eig_hermitian",
    "gaussian_complex",
    "idft",
    "project_psd",
    "BlockEstimate",
    "RecoveryError",
    "RecoveryReport",
    "aligned_error",
    "block_reconstruct",
    "recover",
    "stitch_phi",
    "stitch_psi",
    "SdpConfig",
    "SdpResult",
    "project_affine",
    "solve_phaselift",
    "__version__",
]
