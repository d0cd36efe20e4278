"""Asymmetric spectral estimation of low-rank matrices."""

from .errors import (AsymSpecError, ConfigError, ConvergenceError, DegenerateCorrectionError,
                     DimensionError, InvalidSpectrumError, OracleFailure, ParameterError,
                     PartialFailureError, PreconditionError)
from .estimators import (SpectralEstimate, estimate_aggregated, estimate_dilation, estimate_eig,
                         estimate_svd, estimate_sym_corrected)
from .matcore import GroundTruth, RngStream, gen_rank1_asymmetric, gen_rank1_symmetric, gen_rankr_symmetric
from .metrics import ErrorReport, bound_rank1, bound_rankr, incoherence, sign_aligned_errors
from .noise import NoiseModel, effective_noise_params, sample_noise

__version__ = "0.1.0"
