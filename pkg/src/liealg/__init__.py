from src.liealg.algebra import (
    DEFAULT_TOL,
    AdOperator,
    AlgebraElement,
    ad_matrix,
    adjoint_action,
    from_coordinates,
    hs_norm,
    lie_bracket,
    nilpotency_degree,
    sl_basis,
    to_coordinates,
)
from src.liealg.flows import (
    BOUNDED,
    QUASI_DIAGONALIZABLE,
    QUASI_UNIPOTENT,
    FlowDescriptor,
    JordanSplit,
    classify_flow,
    fit_growth_slope,
    jordan_split,
    lambda1_profile,
)
