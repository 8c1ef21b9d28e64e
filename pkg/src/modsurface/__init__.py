from src.modsurface.batch import OrbitBatch
from src.modsurface.flows import CUSTOM, GEODESIC, HOROCYCLE, FlowSpec
from src.modsurface.group import (
    CosetPoint,
    GroupElement,
    hyperbolic_distance,
    point_from_json,
    reduce,
)
from src.modsurface.sampling import haar_sample, haar_sample_arrays
from src.modsurface.surface import cusp_distance, flow_step, hit, hitting_time, orbit_dump
from src.modsurface.targets import (
    BALL,
    CUSP,
    BallTarget,
    CuspTarget,
    TargetFamily,
    ball_inside_domain,
    ball_measure,
    target_measure,
)
