from src.sdclassify.classifier import (
    CONDITIONAL,
    NO,
    YES,
    GroupSpec,
    HigherRankFactor,
    RankOneFactor,
    SDVerdict,
    classify_higher_rank_simple,
    classify_rank_one,
    classify_semisimple,
    uniform_decay_exponent,
)
from src.sdclassify.exponent import Exponent
from src.sdclassify.rank_one import RankOneData, SpectralGapParam, congruence_tau_preset, rank_one_data
from src.sdclassify.spec_io import flow_from_json, group_spec_from_json, verdict_to_json
