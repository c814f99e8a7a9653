"""Exception types shared across the toolkit.

Two broad failure classes are distinguished so the command line tool can
map them onto distinct exit codes: bad user input / configuration versus
numerical breakdown detected at run time.
"""


class ConfigError(ValueError):
    """Invalid configuration: bad parameter values, incompatible options,
    malformed config files, time steps violating enforced rate bounds."""


class NumericsError(RuntimeError):
    """Numerical failure during a computation (CFL violation detected
    mid-run, positivity loss, probability leak, root bracketing failure)."""


class DegenerateSpectrumError(NumericsError):
    """Eigenvalue collision that makes the spectral machinery ill-posed."""
