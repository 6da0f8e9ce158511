"""Analytic S-matrix of the one-dimensional Morse potential.

Poles and residues of S(k), phase shifts, the wavefunctions attached to
every pole family and the first-order ladder operators that connect them.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AnnihilatedState,
    AtPole,
    AtZero,
    IndexOutOfChain,
    IndexOutOfRange,
    InvalidC,
    MorseError,
    NoConvergence,
    NonPositiveK,
    NotSimplePole,
    PoleOfGamma,
    SingularEpsilon,
    UnsupportedFamily,
    WaveFunctionOverflow,
)
from .scattering import (  # noqa: E402
    PoleClass,
    PoleRecord,
    PotentialParams,
    Regime,
    contour_residue,
    enumerate_poles,
    phase_shift,
    phase_shift_derivative,
    residue,
    s_matrix,
    s_matrix_grid,
)
from .states import Family, WaveFunctionSpec, bound_energies, evaluate, ode_residual  # noqa: E402
from .ladder import ChainSpec, Direction, Series, Sign, chain_step, make_operator  # noqa: E402
