from src.rootsys.root_system import (
    Root,
    RootSystem,
    WeightVector,
    build_root_system,
    classical_root_count,
    highest_root,
    inner_product,
    root_system_from_json,
    root_system_to_json,
    strongly_orthogonal,
    validate_type,
)
from src.rootsys.orthogonal import (
    StrongOrthSystem,
    dominates_on_chamber,
    enumerate_strong_orth_systems,
    good_type,
    highest_root_cascade,
    kostant_cascade,
    random_strong_orth_system,
    rho_of,
    xi,
)
