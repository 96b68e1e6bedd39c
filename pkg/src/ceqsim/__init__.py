"""ceqsim: simulation toolkit for the Cold Echo Qubit (CEQ) architecture.

The package is organised as a stack:

- :mod:`ceqsim.numerics` -- dense Hermitian linear algebra and time propagation
- :mod:`ceqsim.circuit` -- phase-basis fluxonium circuit Hamiltonians
- :mod:`ceqsim.reduction` -- effective spin model extraction
- :mod:`ceqsim.drive` -- AC charge-drive dynamics (resonant and high-frequency)
- :mod:`ceqsim.noise` -- coherence budgets and stochastic 1/f dephasing
- :mod:`ceqsim.fgr` -- closed-system Fermi-golden-rule relaxation experiments
- :mod:`ceqsim.cli` -- configuration-driven command-line entry point
"""

__version__ = "0.1.0"

from .errors import CeqsimError, ValidationError, NumericalError, FitError

__all__ = [
    "__version__",
    "CeqsimError",
    "ValidationError",
    "NumericalError",
    "FitError",
]
