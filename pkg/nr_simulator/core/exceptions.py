"""
Error hierarchy for the simulator
"""


class SimulatorError(Exception):
    """Base class for every error raised by the simulator"""


class ParameterError(SimulatorError, ValueError):
    """Invalid input parameters"""


class SubcriticalityError(ParameterError):
    """Weight law violates E[W^2] < E[W]"""


class VertexError(ParameterError, IndexError):
    """Vertex label outside the graph"""


class ConfigError(ParameterError):
    """Experiment configuration rejected"""


class QuadratureError(SimulatorError, RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance"""

    def __init__(self, message: str, achieved_tolerance: float):
        super().__init__(f"{message} (achieved relative tolerance {achieved_tolerance:.3e})")
        self.achieved_tolerance = achieved_tolerance


class ComponentTooLargeError(SimulatorError, RuntimeError):
    """Component exceeds the configured path-enumeration cap"""

    def __init__(self, size: int, cap: int):
        super().__init__(f"Component of size {size} exceeds path-enumeration cap {cap}")
        self.size = size
        self.cap = cap


class GraphInvariantError(SimulatorError, AssertionError):
    """Structural audit of a MultiGraph failed"""
