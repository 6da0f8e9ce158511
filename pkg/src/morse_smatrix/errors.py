"""Exception hierarchy shared by all modules."""


class MorseError(Exception):
    """Base class for every error raised by the package."""


class PoleOfGamma(MorseError, ValueError):
    """Argument sits on a pole of the Gamma function, z = -n."""

    def __init__(self, n, z=None):
        self.n = n
        self.z = z
        super().__init__(f"Gamma function has a pole at z = -{n} (got z = {z!r})")


class InvalidC(MorseError, ValueError):
    """Kummer second parameter c is a non-positive integer and the series does not truncate."""


class NoConvergence(MorseError, ArithmeticError):
    """Series evaluation exceeded its term budget."""


class AtPole(MorseError, ValueError):
    def __init__(self, pole):
        self.pole = pole
        super().__init__(f"S(k) evaluated at a pole: {pole}")


class AtZero(MorseError, ValueError):
    def __init__(self, k):
        self.k = k
        super().__init__(f"S(k) evaluated exactly at a zero, k = {k!r}")


class NonPositiveK(MorseError, ValueError):
    """Phase shift requested for k <= 0."""


class NotSimplePole(MorseError, ValueError):
    """Residue requested for a record whose net order is not 1."""


class IndexOutOfRange(MorseError, ValueError):
    """Wavefunction family index outside the range allowed for this A."""


class UnsupportedFamily(MorseError, ValueError):
    pass


class WaveFunctionOverflow(MorseError, OverflowError):
    """The recombined value does not fit in a double; ``log_value`` holds log(psi)."""

    def __init__(self, log_value):
        self.log_value = log_value
        super().__init__(f"wavefunction overflows double precision (log|psi| = {log_value.real:.6g})")


class SingularEpsilon(MorseError, ValueError):
    """Ladder operator requested at epsilon = -1/2, where 1 + 2 epsilon vanishes."""


class IndexOutOfChain(MorseError, ValueError):
    pass


class AnnihilatedState(MorseError):
    """Ladder operator maps the source state to the zero function."""

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)
