"""
JSON shapes for the classifier.

GroupSpec:
  {"factors": [
     {"type": "A", "rank": 2, "flow": {"kind": "quasi_unipotent", "l": 4}},
     {"type": "A", "rank": 2, "flow": {"matrix": [[0, 2, 0], [0, 0, 2], [0, 0, 0]]}},
     {"family": "SO", "d": 3, "tau": "25/32", "flow": {"kind": "quasi_unipotent", "l": 2}},
     {"family": "SU", "d": 2, "tau": "congruence", "flow": {"kind": "bounded"}}
  ]}

A matrix flow is classified numerically; only sl_n generators are supported, so the
factor must be of type A with rank n - 1.
"""

import logging
from typing import Any, Dict, Optional

from src.errors import ClassificationError, HomflowError
from src.liealg.algebra import DEFAULT_TOL, AlgebraElement
from src.liealg.flows import FlowDescriptor, classify_flow
from src.sdclassify.classifier import Factor, GroupSpec, HigherRankFactor, RankOneFactor, SDVerdict
from src.sdclassify.rank_one import SpectralGapParam, congruence_tau_preset

logger = logging.getLogger(__name__)


def flow_from_json(data: Dict[str, Any], tol: float = DEFAULT_TOL) -> FlowDescriptor:
    if not isinstance(data, dict):
        raise ClassificationError(f"Flow must be a JSON object, got {type(data).__name__}")
    if "matrix" in data:
        return classify_flow(AlgebraElement.from_json(data["matrix"]), tol)
    if "kind" not in data:
        raise ClassificationError("Flow needs either 'matrix' or 'kind'")
    degree = data.get("l")
    return FlowDescriptor.symbolic(data["kind"], int(degree) if degree is not None else None)


def _factor_from_json(data: Dict[str, Any], tol: float) -> Factor:
    if not isinstance(data, dict) or "flow" not in data:
        raise ClassificationError(f"Each factor needs a 'flow' entry: {data!r}")
    flow = flow_from_json(data["flow"], tol)
    if "type" in data:
        root_type, rank = data["type"], data.get("rank")
        if not isinstance(rank, int):
            raise ClassificationError(f"Factor of type {root_type} needs an integer 'rank'")
        matrix = data["flow"].get("matrix")
        if matrix is not None and (root_type != "A" or len(matrix) != rank + 1):
            raise ClassificationError(
                f"A {len(matrix)}x{len(matrix)} generator lives in sl_{len(matrix)} (type A{len(matrix) - 1}), "
                f"not in {root_type}{rank}"
            )
        return HigherRankFactor(root_type, rank, flow)
    if "family" in data:
        family, d = data["family"], data.get("d")
        raw_tau = data.get("tau")
        tau = congruence_tau_preset(family, d) if raw_tau == "congruence" else SpectralGapParam.parse(raw_tau)
        return RankOneFactor(family, d, flow, tau)
    raise ClassificationError(f"Factor needs 'type'/'rank' (higher rank) or 'family' (rank one): {data!r}")


def group_spec_from_json(data: Dict[str, Any], tol: float = DEFAULT_TOL) -> GroupSpec:
    if not isinstance(data, dict) or not isinstance(data.get("factors"), list):
        raise ClassificationError("Group specification must be an object with a 'factors' list")
    try:
        factors = [_factor_from_json(f, tol) for f in data["factors"]]
    except HomflowError:
        raise
    except (TypeError, ValueError) as e:
        raise ClassificationError(f"Malformed factor: {str(e)}")
    logger.info(f"Loaded group spec with {len(factors)} factor(s)")
    return GroupSpec(factors)


def verdict_to_json(verdict: SDVerdict) -> Dict[str, Any]:
    exponent: Optional[str] = str(verdict.exponent) if verdict.exponent is not None else None
    data: Dict[str, Any] = {
        "is_sd": verdict.is_sd,
        "exponent": exponent,
        "exponent_at_eps0": (
            None if verdict.exponent is None
            else ("inf" if verdict.exponent.exponential else str(verdict.exponent.coefficient))
        ),
        "rationale": list(verdict.rationale),
    }
    if verdict.criterion is not None:
        data["criterion"] = verdict.criterion
    return data
