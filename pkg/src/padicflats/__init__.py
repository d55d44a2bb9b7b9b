"""Expected numbers of flats on random p-adic complete intersections."""

from .exceptions import (
    LengthMismatch,
    NonUnitDenominator,
    NotAdmissible,
    NotInvertible,
    NotPrime,
    NotSquare,
    PadicError,
    SingularAtPrecision,
    TooLarge,
)
from .expectation import (
    FlatCountResult,
    McEstimate,
    closed_form,
    exact_det_expectation,
    expected_flats,
    hensel_cross_check,
    mc_det_expectation,
    smooth_projective_zero_count,
)
from .jacobian import DegreeProfile, JacobianTemplate, build_template, check_codim, instantiate
from .linalg import (
    PadicMatrix,
    VolumeTable,
    det_level_volume,
    det_residue,
    gl_volume,
    grassmannian_volume,
    smith_decompose,
)
from .padic import BracketedValue, PadicApprox, PadicContext, Valuation, abs_p, padic_of_rational, valuation
from .sampling import CoefficientAssignment, SeededStream, change_variables, sample_polynomial, sample_uniform
from .volkenborn import PolynomialIntegrand, padic_limit_check, volkenborn_partial

__version__ = "0.1.0"
