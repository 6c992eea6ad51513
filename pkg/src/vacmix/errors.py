"""Exception types raised by the numerical modules."""


class VacmixError(Exception):
    """Base class for all library errors."""


class PoleAtResonance(VacmixError, ValueError):
    """A frequency sits on (or within tolerance of) a medium resonance."""


class BranchSolveError(VacmixError, RuntimeError):
    """A bracket on the dispersion relation failed to change sign."""


class DegenerateBranches(VacmixError, ValueError):
    """Two polariton roots coincide, so Hopfield products are undefined."""


class QuadratureNotConverged(VacmixError, RuntimeError):
    pass


class WronskianSingular(VacmixError, ValueError):
    """Boundary-value Green's function does not exist (resonant interval)."""


class OrderTooLarge(VacmixError, ValueError):
    pass


class CausticSingularity(VacmixError, ValueError):
    """Propagation time is a multiple of pi/omega; kernel prefactor diverges."""


class InvalidProcess(VacmixError, ValueError):
    pass


class DegenerateProfile(VacmixError, ValueError):
    pass


class ConfigError(VacmixError, ValueError):
    """Invalid run configuration; message carries the offending field path."""

    def __init__(self, path, reason):
        self.path = path
        self.reason = reason
        super().__init__(f"{path} {reason}" if path else reason)
