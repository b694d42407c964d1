"""mmsc: exact maximin-share fair division of goods on cycles and trees."""

from .model import (
    Allocation,
    AnchoredSplit,
    Arc,
    GoodsGraph,
    GuaranteeReport,
    Instance,
    InternalInvariantError,
    MalformedBundleError,
    MmscError,
    OverBudgetError,
    PreconditionError,
    Rational,
    Shape,
    Split,
    UnsupportedShapeError,
    UtilityFunction,
    bundle_value,
    is_connected_bundle,
    reverse_orientation,
    validate_split,
)
from .mms_core import (
    MmsResult,
    mms_cycle,
    mms_for_graph,
    mms_path,
    mms_tree,
    mms_unicyclic,
    rescale_to_integers,
)
from .exact_alloc import (
    allocate_cycle_fixed_types,
    allocate_cycle_m_lt_2n,
    allocate_one_deviant,
    allocate_three_agents_small,
    allocate_tree,
    decide_cycle_m_eq_2n,
)
from .regularize import (
    TRIVIAL,
    RegularizationCertificate,
    pull_back,
    regularize,
)
from .csuff import (
    best_guarantee,
    five_sixths_three_agents,
    half_sufficient,
    psi_sufficient,
    t_over_2t2_sufficient,
    three_quarters_three_types,
    three_quarters_two_types,
)
from .oracle import (
    OracleBudget,
    oracle_exists_mms_allocation,
    oracle_max_c,
    oracle_mms,
)

__all__ = [
    "Allocation", "AnchoredSplit", "Arc", "GoodsGraph", "GuaranteeReport",
    "Instance", "InternalInvariantError", "MalformedBundleError", "MmscError",
    "MmsResult", "OracleBudget", "OverBudgetError", "PreconditionError",
    "Rational", "RegularizationCertificate", "Shape", "Split", "TRIVIAL",
    "UnsupportedShapeError", "UtilityFunction",
    "allocate_cycle_fixed_types", "allocate_cycle_m_lt_2n",
    "allocate_one_deviant", "allocate_three_agents_small", "allocate_tree",
    "best_guarantee", "bundle_value", "decide_cycle_m_eq_2n",
    "five_sixths_three_agents", "half_sufficient", "is_connected_bundle",
    "mms_cycle", "mms_for_graph", "mms_path", "mms_tree", "mms_unicyclic",
    "oracle_exists_mms_allocation", "oracle_max_c", "oracle_mms",
    "psi_sufficient", "pull_back", "regularize", "rescale_to_integers",
    "reverse_orientation", "t_over_2t2_sufficient",
    "three_quarters_three_types", "three_quarters_two_types",
    "validate_split",
]
