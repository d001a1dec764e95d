"""Exception hierarchy for slhnet."""


class SLHError(Exception):
    """Base class for all slhnet errors."""


class DimensionError(SLHError, ValueError):
    """Raised when operator or block dimensions are incompatible."""


class InvariantError(SLHError, ValueError):
    """Raised when a constructed object violates a structural invariant,
    e.g. a scattering matrix that is not unitary."""


class SingularMatrix(SLHError, ArithmeticError):
    """Raised by :func:`slhnet.ops.inv_checked` for (numerically) singular
    input.

    Attributes
    ----------
    sigma_min, sigma_max : float
        Extreme singular values of the offending matrix.
    """

    def __init__(self, message, sigma_min=0.0, sigma_max=0.0):
        super().__init__(message)
        self.sigma_min = float(sigma_min)
        self.sigma_max = float(sigma_max)


class SingularLoop(SingularMatrix):
    """An internal feedback loop whose zero-delay limit is ill-posed
    (``1 - V_sr X`` or ``eta - S_ii`` is not invertible)."""


class DivergentPathSum(SLHError, ArithmeticError):
    """The loop operator has spectral radius too close to (or above) one for
    the path expansion to converge."""

    def __init__(self, message, spectral_radius=float("nan")):
        super().__init__(message)
        self.spectral_radius = float(spectral_radius)


class NonConvergent(SLHError, ArithmeticError):
    """The path expansion hit its length limit before reaching tolerance."""


class NetworkError(SLHError, ValueError):
    """Raised for structurally invalid networks.

    Attributes
    ----------
    violations : list
        The :class:`slhnet.network.Violation` records that triggered it.
    """

    def __init__(self, message, violations=()):
        super().__init__(message)
        self.violations = list(violations)


class NetlistError(SLHError, ValueError):
    """Raised when a netlist document cannot be parsed.

    ``issues`` is a list of ``(path, message)`` pairs where ``path`` is a
    JSON-pointer-style location such as ``/components/1/params/gamma``.
    """

    def __init__(self, issues):
        self.issues = list(issues)
        text = "; ".join(f"{p or '/'}: {m}" for p, m in self.issues)
        super().__init__(text or "invalid netlist")
