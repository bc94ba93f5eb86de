"""Exception types shared across the package."""


class FlexmemError(Exception):
    """Base class for all package errors."""


class InvalidDocument(FlexmemError):
    """Config document cannot be parsed or violates the schema.

    ``path`` names the offending key when known (e.g. ``electrodes[0].gap``).
    """

    def __init__(self, message, path=None):
        self.path = path
        if path:
            message = f"{path}: {message}"
        super().__init__(message)


class InvalidConfig(FlexmemError):
    """A structurally complete config failed validation."""

    def __init__(self, violations):
        self.violations = list(violations)
        lines = "; ".join(f"{v.path}: {v.message}" for v in self.violations)
        super().__init__(f"config validation failed: {lines}")


class DomainError(FlexmemError):
    """Coordinate outside the membrane span."""


class MeshError(FlexmemError):
    """Mesh cannot be built (e.g. feature abscissae nearly coincide)."""


class GapCollapse(FlexmemError):
    """Effective electrostatic gap shrank below the physical floor.

    Signals a missing contact constraint in the configuration.
    """


class PullInEncountered(FlexmemError):
    """Voltage continuation could not pass an instability.

    Carries the last converged solution below the fold.
    """

    def __init__(self, voltage, last_stable):
        self.voltage = voltage
        self.last_stable = last_stable
        super().__init__(f"pull-in encountered near {voltage:.4g} V")


class NoPullInFound(FlexmemError):
    """No collapse detected below the search ceiling."""


class TransientDiverged(FlexmemError):
    """Inner Newton loop of the time integrator failed to converge."""

    def __init__(self, time):
        self.time = time
        super().__init__(f"transient Newton diverged at t = {time:.4g} s")


class GridError(FlexmemError):
    """Frequency grids of network elements do not match."""


class SingularNetwork(FlexmemError):
    """Internal admittance block is singular at some frequency."""

    def __init__(self, frequency):
        self.frequency = frequency
        super().__init__(f"singular network at f = {frequency:.6g} Hz")
