class HomflowError(Exception):
    """Base class for every error raised by the homflow library"""


class RootSystemError(HomflowError):
    """Invalid root-system type/rank pair or malformed root data"""


class AlgebraError(HomflowError):
    """Invalid Lie algebra element or numerically unusable input"""

    def __init__(self, message: str, condition: float = None, max_t: float = None):
        super().__init__(message)
        self.condition = condition
        self.max_t = max_t


class ClassificationError(HomflowError):
    """Group or flow specification outside the classifier's domain"""


class ModularSurfaceError(HomflowError):
    """Invalid group element, point or target on the modular surface"""


class ExperimentError(HomflowError):
    """Experiment precondition violated (degenerate target, convergent schedule, ...)"""


class ConfigError(HomflowError):
    """Malformed, incomplete or unknown configuration"""

    def __init__(self, message: str, key: str = None):
        super().__init__(message)
        self.key = key
