"""Exception types shared across the package.

ConfigurationError and its subclasses map to CLI exit code 2,
IntegrationError to 3, FitError to 4.
"""


class ConfigurationError(ValueError):
    """Invalid parameters, profile, resonance spec, or config file content."""


class DegenerateResonanceError(ConfigurationError):
    """Resonance request is ill-defined, e.g. JC tuning at Delta_minus = 0."""


class DispersiveRegimeError(ConfigurationError):
    """Dispersive quantities requested where they do not exist (Delta_minus = 0)."""


class ResonantRegimeError(ConfigurationError):
    """Resonant-regime closed forms requested outside their domain of validity."""


class IntegrationError(RuntimeError):
    """The integrator could not reach t_end (step-size underflow or NaN state)."""


class FitError(RuntimeError):
    """No dominant oscillation could be extracted from the trajectory."""
