"""Exception hierarchy shared by all modules."""


class HyperfluxError(Exception):
    """Base class for all toolkit errors."""


class NonLorentzianError(HyperfluxError):
    """Metric eigenvalue signs are not (+, -, ..., -) at a sampled point."""


class SingularMetricError(HyperfluxError):
    """|det g| below threshold at a sampled point."""


class DifferentiationError(HyperfluxError):
    """Finite differencing left the chart domain or otherwise failed."""


class NotTimelikeError(HyperfluxError):
    """Vector required to be timelike has g(V, V) <= tolerance."""


class PastDirectedError(HyperfluxError):
    """Vector required to be future-directed has non-positive time component."""


class ZeroVectorError(HyperfluxError):
    """Causal classification requested for the zero vector."""


class DegenerateImmersionError(HyperfluxError):
    """Tangent vectors of a parametrized surface are linearly dependent."""


class NotSpacelikeError(HyperfluxError):
    """Induced-metric integration requested on a non-spacelike tangent space.

    This is the computational expression of the fact that the Riemannian
    volume form of the negative pullback metric stops existing once the
    tangent space touches the light cone.
    """


class LeftChartDomainError(HyperfluxError):
    """Flow integration stepped outside the chart domain."""


class StepSizeError(HyperfluxError):
    """RK4 half-step self-check exceeded tolerance; step too large."""


class RootBracketError(HyperfluxError):
    """Sign structure too degenerate to bracket a root reliably."""


class SuperluminalError(HyperfluxError):
    """Spatial velocity with |v| >= 1 passed where |v| < 1 is required."""


class NonPositiveRescalingError(HyperfluxError):
    """Velocity rescaling function is not strictly positive on samples."""


class ConfigError(HyperfluxError):
    """Experiment configuration unparseable or referencing unknown built-ins."""
