"""
Forward and inverse resonance scattering for Jacobi operators whose
coefficients differ from the free values on a finite window.
"""

from .errors import *  # noqa: F401,F403
from .polynomial import (RealPolynomial, ReciprocalPair, ReciprocalPairing,
                         SymmetricLaurent, canonical_order, evaluate, find_roots,
                         functional_residual, pair_reciprocal, symmetric_product,
                         to_lambda_polynomial)
from .lattice import (ClassParams, JacobiSequence, JostTable, classify, forward,
                      jost_minus, jost_plus, jost_table, normalize, wronskian_at,
                      wronskian_pair)
from .scattering import (BoundStateSet, NormingConstants, ResonanceSet,
                         UnitarityReport, coefficient_identities, norming_constants,
                         norming_direct, smatrix, spectrum, unitarity_defect,
                         unitarity_residual, validate_resonance_class,
                         validate_scattering_class)
from .inverse import (ResonanceData, ScatteringData, SigmaFamily, SignSequence,
                      boundary_identities, canonical_zero_list, class_from_s,
                      enumerate_sigma, lambda_consistency, recover_s, recover_w,
                      sigma_of)
from .marchenko import (InverseResult, MarchenkoKernel, glm_solve, inverse_scattering,
                        inverse_scattering_report, iso_enumerate, kernel,
                        kernel_dft_oracle, literal_reading, reconstruct)

__version__ = "0.1.0"
