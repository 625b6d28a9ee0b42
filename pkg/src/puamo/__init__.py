"""Spectral toolbox for the pseudo-unitary almost-Mathieu quantum walk:
finite-ring operators, Aubry duality, transfer-matrix Lyapunov exponents,
symmetry residuals and spectral winding numbers."""

from .cocycle import (AccelerationResult, ClosedFormLyapunov, LyapunovEstimate,
                      acceleration, cocycle_regime, lyapunov_closed_form,
                      lyapunov_numeric, regularized_transfer, transfer_matrix,
                      transfer_matrix_dual)
from .errors import (EigensolverError, PairingStructureError, PuamoError,
                     SingularBranchError, SingularCoinError,
                     SpectrumCollisionError, ThetaResolutionError)
from .params import (GOLDEN_MEAN, CouplingPair, DerivedConstants, FrequencySpec,
                     WalkParams, coin_matrix, complex_cos, complex_sin,
                     convergents, derived_constants, dual_params, realified_coin,
                     regime, walk_params)
from .spectrum import (SpectrumResult, char_poly_growth,
                       char_poly_growth_prediction, classify_circle,
                       eigendecompose, fractal_dimension, pairing_residual,
                       spectral_distance, symmetry_residuals)
from .sweep import CellResult, SweepGrid, run_sweep
from .walk import (BlockFactorization, RingOperator, SymmetryOperators,
                   apply_walk, build_dual_walk, build_realified_walk,
                   build_walk, cell_probabilities, cmv_factorize, delta_state,
                   duality_unitary, evolve, shift_matrix, skin_conjugate,
                   symmetry_operators, timeframe)
from .winding import WindingResult, gap_points, winding_number, winding_profile

__version__ = "0.1.0"

__all__ = [
    "AccelerationResult", "BlockFactorization", "CellResult",
    "ClosedFormLyapunov", "CouplingPair", "DerivedConstants",
    "EigensolverError", "FrequencySpec", "GOLDEN_MEAN", "LyapunovEstimate",
    "PairingStructureError", "PuamoError", "RingOperator", "SingularBranchError",
    "SingularCoinError", "SpectrumCollisionError", "SpectrumResult",
    "SweepGrid", "SymmetryOperators", "ThetaResolutionError", "WalkParams",
    "WindingResult", "acceleration", "apply_walk", "build_dual_walk",
    "build_realified_walk", "build_walk", "cell_probabilities",
    "char_poly_growth", "char_poly_growth_prediction", "classify_circle",
    "cmv_factorize", "cocycle_regime", "coin_matrix", "complex_cos",
    "complex_sin", "convergents", "delta_state", "derived_constants",
    "dual_params", "duality_unitary", "eigendecompose", "evolve",
    "fractal_dimension", "gap_points", "lyapunov_closed_form",
    "lyapunov_numeric", "pairing_residual", "realified_coin", "regime",
    "regularized_transfer", "run_sweep", "shift_matrix", "skin_conjugate",
    "spectral_distance", "symmetry_operators", "symmetry_residuals",
    "timeframe", "transfer_matrix", "transfer_matrix_dual",
    "walk_params", "winding_number", "winding_profile",
]
