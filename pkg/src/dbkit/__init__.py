"""de Branges spaces of entire functions: kernels, sampling, spectra, n-entire classification.

Spaces are built from a Hermite-Biehler function ``e``; the catalog covers
Paley-Wiener, Bessel, polynomial and momentum-model spaces.  Hamburger moment
problems live in :mod:`dbkit.moments`.
"""

__version__ = "0.1.0"

from .entire import (EntireFunction, HermiteBiehler, ab_decompose, as_entire, mean_type,
                     sharp, verify_hb)
from .exceptions import *  # noqa: F401,F403
from .quadrature import QuadratureConfig, integrate_real_line
from .space import (DeBrangesSpace, assoc_membership, inner_product, kernel, kernel_formula,
                    membership, s_beta, subspace, tau_min, transform_M)
from .phase import (PhaseGrid, check_complete, crossings, interpolate, norm_by_sampling, phase,
                    phase_curve, sampling_grid)
from .operator import (SpectralSequence, domain_density, eigenfunction, interlacing_check,
                       orthonormal_basis, rank_one_extension_matrix, resolvent_apply, spectrum)
from .classify import (CriteriaReport, check_c1, check_c2, check_c3, classify, h_beta_eval,
                       normalization)
from .models import (bessel_space, catalog_examples, jacobi_model_transform, momentum_model,
                     paley_wiener, parse_descriptor, parse_space, polynomial_space)
from .moments import (MomentProblem, hankel_positive, indeterminacy_diagnostic,
                      jacobi_coefficients, moment_problem, orthonormal_polys)
