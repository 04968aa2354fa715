"""Multi-degree Tchebycheffian B-splines.

Local spaces (null-spaces of constant-coefficient differential operators
and their specialized relatives) are represented by their Bernstein
bases; spline spaces glue them together through a sparse extraction
operator ``H`` with ``N = H B``.
"""

import logging

from .base import ConditionRecord, LocalPatch, warn_rcond_threshold
from .checks import (
    CheckReport,
    CriticalLengthEstimate,
    SpaceFamily,
    check_partition_of_unity,
    critical_length_scan,
    critical_length_scan_mdtb,
    refine_critical_length,
)
from .config import from_dict, load_config
from .ect_space import (
    ConversionMatrix,
    Root,
    RootSpec,
    TchebPatch,
    WronskianMatrix,
    bernstein_diffend_all,
    bernstein_eval_all,
    conversion_matrix,
    fundamental_eval_all,
    null_space,
    validate_root_spec,
    wronskian_at,
)
from .errors import *  # noqa: F401,F403
from .mdtb_patch import (
    ExtractionMatrix,
    KnotVectors,
    MDTSpaceSpec,
    constraint_matrix,
    curve_eval,
    dimension,
    extract,
    extraction,
    extraction_periodic,
    knot_vectors,
    mdtb_eval_all,
    one_sided_derivs,
    sparse_nullspace,
    super_smoothness_window,
)
from .reproduce import reproduce
from .special_spaces import (
    BSplineLocalSpec,
    BSplinePatch,
    GenPolyParams,
    GenPolyPatch,
    PolyPatch,
    PTypePatch,
    bspline_local_eval,
    genpoly_bernstein_eval,
    poly_bernstein_eval,
    ptype_bernstein_eval,
)
from .tb_patch import (
    BasisSample,
    BernsteinFunction,
    MultiPatch,
    function_eval,
    multi_patch_eval,
    sample_basis,
    sample_space,
)

logging.getLogger(__name__).addHandler(logging.NullHandler())

__version__ = "0.1.0"
