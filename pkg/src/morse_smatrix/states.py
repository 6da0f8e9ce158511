"""
Wavefunctions attached to the S-matrix singularities.

Every family is a multiple of the regular solution

    phi_eps(x) = e^{-eps x} exp(-e^{-x}) 1F1(-A + eps; 1 + 2 eps; 2 e^{-x}),

an eigenfunction with E = -eps^2 for any eps with 1 + 2 eps off the
non-positive integers (or a truncating series).  A family fixes eps and the
constant prefactor C; nearly all of them carry C = 2^{2 eps}, i.e. the
e^{-eps (x - 2 log 2)} form.  Values are unnormalized.

Evaluation runs in the log domain: for x << 0 the factor exp(-e^{-x})
underflows long before 1F1(...; 2e^{-x}) overflows, so both are kept as
logarithms until the end.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import IndexOutOfRange, WaveFunctionOverflow
from .scattering import PoleClass, PotentialParams, Regime, _params
from .specfun import (
    DEFAULT_PRECISION,
    TAU_INT,
    _kummer_scaled,
    _validate_c,
    log_gamma,
    nonpositive_integer,
)

__all__ = [
    "Family",
    "Side",
    "WaveFunctionSpec",
    "AsymptoticForm",
    "evaluate",
    "evaluate_log",
    "jet",
    "scaled_jet",
    "bound_energies",
    "coefficient_ratio",
    "asymptotic",
    "ode_residual",
    "potential",
    "spec_for_pole",
    "semi_bound_energy",
]

_LOG2 = math.log(2.0)
_EPS_MACH = np.finfo(float).eps


class Family(enum.Enum):
    PSI1 = "psi1"
    PSI2 = "psi2"
    BOUND = "bound"
    ANTIBOUND = "antibound"
    REDUNDANT_GENERIC = "redundant"
    REDUNDANT_EVEN_INT = "redundant-even-int"
    REDUNDANT_ODD_HALF = "redundant-odd-half"
    SEMI_BOUND = "semibound"
    TILDE_BOUND = "tilde-bound"
    TILDE_REDUNDANT_EVEN = "tilde-redundant-even"
    TILDE_REDUNDANT_ODD = "tilde-redundant-odd"
    REDUNDANT_EVEN_CHAIN = "redundant-even-chain"
    REDUNDANT_ODD_CHAIN = "redundant-odd-chain"


_INDEXED = {
    Family.BOUND,
    Family.ANTIBOUND,
    Family.REDUNDANT_GENERIC,
    Family.REDUNDANT_EVEN_INT,
    Family.REDUNDANT_ODD_HALF,
    Family.TILDE_BOUND,
    Family.TILDE_REDUNDANT_EVEN,
    Family.TILDE_REDUNDANT_ODD,
    Family.REDUNDANT_EVEN_CHAIN,
    Family.REDUNDANT_ODD_CHAIN,
}


class Side(enum.Enum):
    PLUS_INFINITY = "+inf"
    MINUS_INFINITY = "-inf"


def _require(cond, msg):
    if not cond:
        raise IndexOutOfRange(msg)


@dataclass(frozen=True)
class WaveFunctionSpec:
    """A wavefunction family member, evaluable at any real x.

    Parameters
    ----------
    family : Family
    params : PotentialParams or float
        The Morse strength (a bare float is promoted).
    index : int, optional
        n1, n2 or m depending on the family; required for indexed families.
    energy : complex, optional
        Energy label for ``PSI1``/``PSI2``; ``sqrt(-E)`` is taken with
        non-negative real part, so real k > 0 corresponds to E = k^2.

    Attributes
    ----------
    epsilon : complex
        The parameter of phi_eps that the family evaluates.
    log_prefactor : complex
        log of the constant multiplying phi_eps.
    energy : complex
        Eigenvalue of the Morse Hamiltonian, -epsilon^2.
    """

    family: Family
    params: PotentialParams
    index: int | None = None
    energy: complex | None = None
    epsilon: complex = field(init=False, repr=False)
    log_prefactor: complex = field(init=False, repr=False)

    def __post_init__(self):
        fam = Family(self.family)
        object.__setattr__(self, "family", fam)
        p = _params(self.params)
        object.__setattr__(self, "params", p)
        if fam in _INDEXED:
            _require(self.index is not None, f"{fam.value} needs an index")
            object.__setattr__(self, "index", int(self.index))
        eps, log_c = self._resolve(fam, p, self.index)
        object.__setattr__(self, "epsilon", complex(eps))
        object.__setattr__(self, "log_prefactor", complex(log_c))
        if fam not in (Family.PSI1, Family.PSI2):
            object.__setattr__(self, "energy", complex(-(eps * eps)))
        _validate_c(self.kummer_a, self.kummer_c)

    def _resolve(self, fam, p, n):
        A, N = p.A, p.N
        if fam in (Family.PSI1, Family.PSI2):
            if self.energy is None:
                raise IndexOutOfRange(f"{fam.value} needs an energy label")
            E = complex(self.energy)
            # +0.0 clears a signed zero so E > 0 maps to eps = +i sqrt(E), i.e. k > 0
            root = cmath.sqrt(complex(-E.real, -E.imag + 0.0))
            if fam is Family.PSI1:
                return root, 0.0
            return -root, -2.0 * root * _LOG2
        if fam is Family.SEMI_BOUND:
            if self.energy is not None and abs(complex(self.energy)) > TAU_INT:
                raise IndexOutOfRange("the semi-bound state has E = 0")
            return 0.0, 0.0
        if fam is Family.BOUND:
            _require(n >= 0 and A - n > TAU_INT, f"bound index needs 0 <= n < A, got n={n}, A={A}")
            eps = A - n
        elif fam is Family.ANTIBOUND:
            _require(p.regime is Regime.GENERIC, "antibound states exist only for generic A")
            _require(n >= 0 and A - n < -TAU_INT, f"antibound index needs n > A, got n={n}")
            eps = A - n
        elif fam is Family.REDUNDANT_GENERIC:
            _require(p.regime is Regime.GENERIC, "use the integer/half-integer redundant families")
            _require(n >= 0, "n2 must be >= 0")
            eps = (n + 1) / 2
        elif fam is Family.REDUNDANT_EVEN_INT:
            _require(p.regime is Regime.INTEGER, "needs integer A")
            _require(n >= 0, "n2 must be >= 0")
            eps = n + 0.5
        elif fam is Family.REDUNDANT_ODD_HALF:
            _require(p.regime is Regime.HALF_INTEGER, "needs half-integer A")
            _require(n >= 0, "n2 must be >= 0")
            eps = n + 1.0
        elif fam is Family.TILDE_BOUND:
            if p.regime is Regime.INTEGER:
                _require(N <= n <= 2 * N, f"tilde index needs {N} <= n <= {2 * N}")
            elif p.regime is Regime.HALF_INTEGER:
                _require(N <= n <= 2 * N - 1, f"tilde index needs {N} <= n <= {2 * N - 1}")
            else:
                raise IndexOutOfRange("tilde bound states need integer or half-integer A")
            eps = n - A
        elif fam is Family.TILDE_REDUNDANT_EVEN:
            _require(n <= -1, "tilde even index needs m <= -1")
            eps = -n - 0.5
        elif fam is Family.TILDE_REDUNDANT_ODD:
            _require(n <= -1, "tilde odd index needs m <= -1")
            eps = -n - 1.0
        elif fam is Family.REDUNDANT_EVEN_CHAIN:
            _require(n >= 0, "m must be >= 0")
            eps = n + 0.5
        elif fam is Family.REDUNDANT_ODD_CHAIN:
            _require(n >= 0, "m must be >= 0")
            eps = n + 1.0
        else:  # pragma: no cover
            raise IndexOutOfRange(fam)
        return eps, 2.0 * eps * _LOG2

    @property
    def kummer_a(self):
        return -self.params.A + self.epsilon

    @property
    def kummer_c(self):
        return 1.0 + 2.0 * self.epsilon

    def label(self):
        if self.family in (Family.PSI1, Family.PSI2):
            return f"{self.family.value}(E={self.energy!r})"
        if self.index is None:
            return self.family.value
        return f"{self.family.value}({self.index})"


@dataclass(frozen=True)
class AsymptoticForm:
    """psi(x) ~ coefficient * exp(double_rate * e^{-x} + linear_rate * x)."""

    side: Side
    coefficient: complex
    linear_rate: complex
    double_rate: float
    divergent: bool = False

    def evaluate(self, x):
        return self.coefficient * cmath.exp(self.double_rate * math.exp(-x) + self.linear_rate * x)


# ---------------------------------------------------------------------------
# evaluation


def _log_jet(spec, x, order):
    """Derivatives 0..order of psi at x as (mantissas, log_scale)."""
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("x must be finite")
    eps = spec.epsilon
    a, c = spec.kummer_a, spec.kummer_c
    u = math.exp(-x)
    z = 2.0 * u
    log_z = _LOG2 - x

    # z^j F^(j)(z) = z^j (a)_j/(c)_j 1F1(a+j; c+j; z) as (mantissa, real log)
    terms = []
    poch = 1 + 0j
    for j in range(order + 1):
        if j:
            poch *= (a + j - 1) / (c + j - 1)
        if poch == 0:
            terms.append((0j, -math.inf))
            continue
        mant, scale = _kummer_scaled(a + j, c + j, z, DEFAULT_PRECISION)
        if mant == 0:
            terms.append((0j, -math.inf))
            continue
        terms.append((poch * mant, scale + j * log_z))
    shift = max(s for _, s in terms)
    if shift == -math.inf:
        return np.zeros(order + 1, dtype=complex), 0.0
    t = [m * math.exp(s - shift) if s > -math.inf else 0j for m, s in terms]

    # G^(i) = sum_j s_ij z^j F^(j), with d/dx[z^j F^(j)] = -j z^j F^(j) - z^{j+1} F^(j+1)
    coeffs = [[1.0]]
    for i in range(order):
        prev = coeffs[-1] + [0.0]
        nxt = [0.0] * (len(prev))
        for j in range(len(prev)):
            nxt[j] = -j * prev[j] - (prev[j - 1] if j else 0.0)
        coeffs.append(nxt)
    g = [sum(cj * t[j] for j, cj in enumerate(row)) for row in coeffs]

    # e^P with P = log C - eps x - u: derivatives e^P Q_m(u), Q_{m+1} = -u dQ/du + (u - eps) Q
    q_polys = [np.array([1.0 + 0j])]
    for _ in range(order):
        q = q_polys[-1]
        dq = -np.arange(len(q)) * q
        nq = np.zeros(len(q) + 1, dtype=complex)
        nq[: len(q)] += dq - eps * q
        nq[1:] += q
        q_polys.append(nq)
    q_vals = [np.polynomial.polynomial.polyval(u, q) for q in q_polys]

    out = np.zeros(order + 1, dtype=complex)
    for m in range(order + 1):
        out[m] = sum(math.comb(m, i) * q_vals[m - i] * g[i] for i in range(m + 1))
    log_p = spec.log_prefactor - eps * x - u
    return out * cmath.exp(1j * log_p.imag), log_p.real + shift


def evaluate_log(spec, x):
    """log psi(x) (real part log|psi|); real part -inf where psi vanishes."""
    mant, scale = _log_jet(spec, x, 0)
    if mant[0] == 0:
        return complex(-math.inf, 0.0)
    return cmath.log(mant[0]) + scale


def evaluate(spec, x):
    """psi(x), unnormalized.

    Returns 0 where the value underflows.

    Raises
    ------
    WaveFunctionOverflow
        When |psi(x)| exceeds double range; ``log_value`` carries log psi.
    """
    mant, scale = _log_jet(spec, x, 0)
    return _recombine(mant[0], scale)


def _recombine(m, scale):
    if m == 0:
        return 0j
    log_abs = math.log(abs(m)) + scale
    if log_abs > 709.0:
        raise WaveFunctionOverflow(cmath.log(m) + scale)
    return m * math.exp(scale) if scale > -745.0 else m * math.exp(log_abs) / abs(m)


def jet(spec, x, order=2):
    """Array [psi, psi', ..., psi^(order)] at x from analytic derivatives of 1F1."""
    mant, scale = _log_jet(spec, x, order)
    return np.array([_recombine(m, scale) for m in mant])


def scaled_jet(spec, x, order=2):
    """(mantissas, log_scale) form of :func:`jet`, safe far into x << 0."""
    return _log_jet(spec, x, order)


# ---------------------------------------------------------------------------
# spectra and asymptotics


def bound_energies(params):
    """-(A - n)^2 for n = 0, 1, ... while A - n > 0, most bound first.

    For integer A the E = 0 level is excluded (see :func:`semi_bound_energy`).
    """
    p = _params(params)
    out = []
    n = 0
    while p.A - n > TAU_INT:
        out.append(-((p.A - n) ** 2))
        n += 1
    return out


def semi_bound_energy(params):
    """0.0 for integer A (the bounded E = 0 state), else None."""
    return 0.0 if _params(params).regime is Regime.INTEGER else None


def coefficient_ratio(params, k):
    """C2/C1 of the combination psi1 + (C2/C1) psi2 that vanishes at x -> -inf."""
    A = _params(params).A
    k = complex(k)
    log_r = (
        log_gamma(-A - 1j * k)
        - log_gamma(-A + 1j * k)
        + log_gamma(1 + 2j * k)
        - log_gamma(1 - 2j * k)
        + 1j * math.pi
    )
    return cmath.exp(log_r)


def asymptotic(spec, side):
    """Leading behaviour of psi at x -> +inf or x -> -inf.

    At +inf the Kummer factor tends to 1.  At -inf it is replaced by its
    dominant large-z form Gamma(c)/Gamma(a) e^z z^{a-c}; the coefficient is
    exactly 0 when a is a non-positive integer (1/Gamma(a) = 0), which is
    the quantization condition of the bound states.
    """
    side = Side(side)
    eps = spec.epsilon
    if side is Side.PLUS_INFINITY:
        return AsymptoticForm(side, cmath.exp(spec.log_prefactor), -eps, 0.0)
    A = spec.params.A
    a, c = spec.kummer_a, spec.kummer_c
    if nonpositive_integer(a) is not None:
        return AsymptoticForm(side, 0j, 1.0 + A, 1.0)
    log_coef = spec.log_prefactor + log_gamma(c) - log_gamma(a) - (1.0 + A + eps) * _LOG2
    coef = cmath.exp(log_coef) if log_coef.real < 709 else complex(math.inf, 0)
    return AsymptoticForm(side, coef, 1.0 + A, 1.0, divergent=not math.isfinite(abs(coef)))


def potential(params, x):
    A = _params(params).A
    return math.exp(-2.0 * x) - (2.0 * A + 1.0) * math.exp(-x)


def ode_residual(spec, x_samples, h=1e-3):
    """Max relative residual of -psi'' + V psi - E psi over the samples.

    psi'' comes from the 5-point central difference; each stencil is
    rescaled by its largest log-magnitude so the check also works where
    psi itself is far outside double range.
    """
    if not h > 0:
        raise ValueError("h must be positive")
    E = spec.energy
    worst = 0.0
    for x in x_samples:
        logs = [evaluate_log(spec, x + j * h) for j in (-2, -1, 0, 1, 2)]
        shift = max(v.real for v in logs)
        vals = [cmath.exp(v - shift) if v.real > -math.inf else 0j for v in logs]
        d2 = (-vals[0] + 16 * vals[1] - 30 * vals[2] + 16 * vals[3] - vals[4]) / (12 * h * h)
        psi = vals[2]
        res = abs(-d2 + (potential(spec.params, x) - E) * psi)
        worst = max(worst, res / (abs(E * psi) + abs(d2) + _EPS_MACH))
    return worst


def spec_for_pole(params, pole):
    """The wavefunction family attached to a PoleRecord at this A."""
    p = _params(params)
    cls = pole.pole_class
    if cls is PoleClass.BOUND:
        return WaveFunctionSpec(Family.BOUND, p, pole.series_index)
    if cls is PoleClass.ANTIBOUND:
        return WaveFunctionSpec(Family.ANTIBOUND, p, pole.series_index)
    if cls is PoleClass.SEMI_BOUND:
        return WaveFunctionSpec(Family.SEMI_BOUND, p)
    if cls is PoleClass.REDUNDANT_EVEN:
        if p.regime is Regime.INTEGER:
            return WaveFunctionSpec(Family.REDUNDANT_EVEN_INT, p, pole.series_index)
        return WaveFunctionSpec(Family.REDUNDANT_GENERIC, p, 2 * pole.series_index)
    if p.regime is Regime.HALF_INTEGER:
        return WaveFunctionSpec(Family.REDUNDANT_ODD_HALF, p, pole.series_index)
    return WaveFunctionSpec(Family.REDUNDANT_GENERIC, p, 2 * pole.series_index + 1)
