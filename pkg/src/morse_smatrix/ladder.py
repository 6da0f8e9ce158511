"""
First-order ladder operators for the Morse wavefunction chains.

With h_eps = -e^{2x} d^2/dx^2 + eps^2 e^{2x} - (2A + 1) e^x (the Morse
Hamiltonian at E = -eps^2 multiplied by e^{2x} and shifted by one),

    A+_eps = -e^x d/dx + (1 + eps) e^x + gamma
    A-_eps =  e^x d/dx +       eps e^x + gamma,   gamma = -(1 + 2A)/(1 + 2eps)

satisfy h_eps = A+_eps A-_eps + D_eps = A-_{eps-1} A+_{eps-1} + D_{eps-1}
with D_eps = -gamma^2.  Consequently A-_eps carries eigenfunctions at eps
to eps + 1 and A+_eps carries eps + 1 back to eps.

Everything is computed on derivative jets: arrays [f, f', f'', ...] at a
point.  Operators consume one order, h consumes two.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import AnnihilatedState, IndexOutOfChain, SingularEpsilon
from .scattering import PotentialParams, Regime, _params
from .specfun import TAU_INT
from .states import Family, WaveFunctionSpec, scaled_jet

__all__ = [
    "Sign",
    "Direction",
    "Series",
    "LadderOperator",
    "ChainSpec",
    "ExpPolySum",
    "make_operator",
    "apply",
    "apply_jet",
    "hamiltonian_jet",
    "factorization_residual",
    "intertwining_residual",
    "eigenvalue_residual",
    "chain_member",
    "chain_bounds",
    "chain_step",
    "round_trip",
    "step_image_residual",
    "fd_jet",
    "random_test_function",
    "default_samples",
    "ANNIHILATION_TOL",
]

ANNIHILATION_TOL = 1e-9
_TINY = 1e-300


class Sign(enum.Enum):
    PLUS = "+"
    MINUS = "-"


class Direction(enum.Enum):
    UP = "up"
    DOWN = "down"


class Series(enum.Enum):
    BOUND_ANTIBOUND = "bound-antibound"
    REDUNDANT_EVEN = "redundant-even"
    REDUNDANT_ODD = "redundant-odd"


@dataclass(frozen=True)
class LadderOperator:
    """A+_eps or A-_eps for a fixed A.

    ``scale`` multiplies the whole operator.  It is 1 for operators from
    :func:`make_operator`; :meth:`regularized` returns (1 + 2 eps) A, which
    stays finite at eps = -1/2 where it reduces to the constant -(1 + 2A).
    """

    sign: Sign
    epsilon: float
    A: float
    beta: float
    gamma: float
    d_const: float
    scale: float = 1.0

    @classmethod
    def regularized(cls, params, epsilon, sign):
        p = _params(params)
        sign = Sign(sign)
        w = 1.0 + 2.0 * epsilon
        beta = (1.0 + epsilon) if sign is Sign.PLUS else epsilon
        # (1 + 2eps) A = w*(-+ e^x d + beta e^x) - (1 + 2A): store with gamma folded
        return cls(sign, float(epsilon), p.A, w * beta, -(1.0 + 2.0 * p.A), math.nan, w)


def make_operator(params, epsilon, sign):
    """Coefficients of A+_eps or A-_eps.

    Raises
    ------
    SingularEpsilon
        When |1 + 2 eps| <= 1e-9.
    """
    p = _params(params)
    sign = Sign(sign)
    epsilon = float(epsilon)
    w = 1.0 + 2.0 * epsilon
    if abs(w) <= TAU_INT:
        raise SingularEpsilon(f"ladder operator undefined at epsilon = {epsilon}")
    gamma = -(1.0 + 2.0 * p.A) / w
    beta = (1.0 + epsilon) if sign is Sign.PLUS else epsilon
    return LadderOperator(sign, epsilon, p.A, beta, gamma, -gamma * gamma)


# ---------------------------------------------------------------------------
# jet algebra


def _mul_exp(jet, k, x, absolute=False):
    """Jet of e^{kx} g from the jet of g (Leibniz rule)."""
    n = len(jet)
    out = np.zeros(n, dtype=complex)
    kk = abs(k) if absolute else k
    for m in range(n):
        out[m] = sum(math.comb(m, i) * kk ** (m - i) * jet[i] for i in range(m + 1))
    return out * math.exp(k * x)


def apply_jet(op, jet, x, absolute=False):
    """Jet (one order shorter) of op f given the jet of f at x.

    With ``absolute`` every term enters with its magnitude, which gives the
    scale against which cancellations are judged.
    """
    jet = np.asarray(jet, dtype=complex)
    if absolute:
        jet = np.abs(jet).astype(complex)
    lower = jet[:-1]
    deriv = jet[1:]
    # for a regularized operator beta and gamma already carry the scale
    d = -op.scale if op.sign is Sign.PLUS else op.scale
    b, g = op.beta, op.gamma
    if absolute:
        d, b, g = abs(d), abs(b), abs(g)
    return d * _mul_exp(deriv, 1.0, x, absolute) + b * _mul_exp(lower, 1.0, x, absolute) + g * lower


def hamiltonian_jet(A, epsilon, jet, x, absolute=False):
    """Jet of h_eps f, two orders shorter than the jet of f."""
    jet = np.asarray(jet, dtype=complex)
    if absolute:
        jet = np.abs(jet).astype(complex)
    f = jet[:-2]
    f2 = jet[2:]
    e2 = epsilon * epsilon
    c1 = 2.0 * A + 1.0
    if absolute:
        return _mul_exp(f2, 2.0, x, True) + abs(e2) * _mul_exp(f, 2.0, x, True) + abs(c1) * _mul_exp(f, 1.0, x, True)
    return -_mul_exp(f2, 2.0, x) + e2 * _mul_exp(f, 2.0, x) - c1 * _mul_exp(f, 1.0, x)


# ---------------------------------------------------------------------------
# test functions


@dataclass(frozen=True)
class ExpPolySum:
    """f(x) = sum_i c_i exp(p_i(x)) with polynomial exponents.

    Derivatives are exact: d^m/dx^m e^p = Q_m e^p with Q_{m+1} = Q_m' + p' Q_m.

    Parameters
    ----------
    terms : tuple of (complex, tuple of float)
        Coefficient and ascending polynomial coefficients of each exponent.
    """

    terms: tuple

    def __call__(self, x):
        return self.jet(x, 0)[0]

    def jet(self, x, order):
        out = np.zeros(order + 1, dtype=complex)
        P = np.polynomial.Polynomial
        for c, coeffs in self.terms:
            p = P(coeffs)
            dp = p.deriv()
            q = P([1.0])
            ep = np.exp(p(x))
            for m in range(order + 1):
                out[m] += c * q(x) * ep
                q = q.deriv() + dp * q
        return out


def random_test_function(rng, n_terms=2):
    """A random smooth ExpPolySum, bounded on moderate x ranges."""
    terms = []
    for _ in range(n_terms):
        c = complex(rng.normal(), rng.normal())
        coeffs = (rng.normal(), rng.normal(), -abs(rng.normal()) * 0.5 - 0.05)
        if rng.random() < 0.5:
            coeffs = coeffs + (rng.normal() * 0.02,)
        terms.append((c, tuple(coeffs)))
    return ExpPolySum(tuple(terms))


def fd_jet(f, x, order, h=1e-3):
    """Central finite-difference jet of a plain callable, up to order 3."""
    if order > 3:
        raise ValueError("fd_jet supports order <= 3")
    v = {j: complex(f(x + j * h)) for j in (-2, -1, 0, 1, 2)}
    out = [v[0]]
    if order >= 1:
        out.append((v[-2] - 8 * v[-1] + 8 * v[1] - v[2]) / (12 * h))
    if order >= 2:
        out.append((-v[-2] + 16 * v[-1] - 30 * v[0] + 16 * v[1] - v[2]) / (12 * h * h))
    if order >= 3:
        out.append((-v[-2] + 2 * v[-1] - 2 * v[1] + v[2]) / (2 * h**3))
    return np.array(out, dtype=complex)


def _jet_of(f, x, order):
    """(jet, log_scale) of a spec, an object with .jet, or a plain callable."""
    if isinstance(f, WaveFunctionSpec):
        return scaled_jet(f, x, order)
    if hasattr(f, "jet"):
        return np.asarray(f.jet(x, order), dtype=complex), 0.0
    return fd_jet(f, x, order), 0.0


def apply(op, f, x):
    """(op f)(x) for a wavefunction spec, an ExpPolySum or any callable.

    Callables without an analytic jet are differentiated by finite
    differences.
    """
    jet, scale = _jet_of(f, x, 1)
    return complex(apply_jet(op, jet, x)[0] * math.exp(scale))


# ---------------------------------------------------------------------------
# identities


def _rel(diff, scale):
    return abs(diff) / (scale + _TINY)


def factorization_residual(params, epsilon, f, x_samples):
    """Max relative defect of both factorizations of h_eps on f.

    Checks (A+_eps A-_eps + D_eps) f = h_eps f and
    (A-_{eps-1} A+_{eps-1} + D_{eps-1}) f = h_eps f; each defect is divided
    by the summed magnitudes of the terms involved.
    """
    p = _params(params)
    plus, minus = make_operator(p, epsilon, Sign.PLUS), make_operator(p, epsilon, Sign.MINUS)
    plus1, minus1 = make_operator(p, epsilon - 1, Sign.PLUS), make_operator(p, epsilon - 1, Sign.MINUS)
    worst = 0.0
    for x in x_samples:
        jet, _ = _jet_of(f, x, 2)
        h = hamiltonian_jet(p.A, epsilon, jet, x)[0]
        h_abs = hamiltonian_jet(p.A, epsilon, jet, x, True)[0].real
        for first, second, d in ((minus, plus, plus.d_const), (plus1, minus1, plus1.d_const)):
            lhs = apply_jet(second, apply_jet(first, jet, x), x)[0] + d * jet[0]
            mag = apply_jet(second, apply_jet(first, jet, x, True), x, True)[0].real + abs(d * jet[0])
            worst = max(worst, _rel(lhs - h, mag + h_abs))
    return worst


def intertwining_residual(params, epsilon, f, x_samples):
    """Max relative defect of A+_{eps-1} h_eps = h_{eps-1} A+_{eps-1} and
    h_eps A-_{eps-1} = A-_{eps-1} h_{eps-1} on f."""
    p = _params(params)
    A = p.A
    plus1, minus1 = make_operator(p, epsilon - 1, Sign.PLUS), make_operator(p, epsilon - 1, Sign.MINUS)
    worst = 0.0
    for x in x_samples:
        jet, _ = _jet_of(f, x, 3)
        pairs = (
            (
                apply_jet(plus1, hamiltonian_jet(A, epsilon, jet, x), x)[0],
                hamiltonian_jet(A, epsilon - 1, apply_jet(plus1, jet, x), x)[0],
                apply_jet(plus1, hamiltonian_jet(A, epsilon, jet, x, True), x, True)[0].real
                + hamiltonian_jet(A, epsilon - 1, apply_jet(plus1, jet, x, True), x, True)[0].real,
            ),
            (
                hamiltonian_jet(A, epsilon, apply_jet(minus1, jet, x), x)[0],
                apply_jet(minus1, hamiltonian_jet(A, epsilon - 1, jet, x), x)[0],
                hamiltonian_jet(A, epsilon, apply_jet(minus1, jet, x, True), x, True)[0].real
                + apply_jet(minus1, hamiltonian_jet(A, epsilon - 1, jet, x, True), x, True)[0].real,
            ),
        )
        for lhs, rhs, mag in pairs:
            worst = max(worst, _rel(lhs - rhs, mag))
    return worst


def eigenvalue_residual(spec, x_samples):
    """Max relative defect of (A+_eps A-_eps + D_eps) psi = -psi, eps = Re spec.epsilon."""
    eps = spec.epsilon.real
    p = spec.params
    plus, minus = make_operator(p, eps, Sign.PLUS), make_operator(p, eps, Sign.MINUS)
    worst = 0.0
    for x in x_samples:
        jet, _ = scaled_jet(spec, x, 2)
        lhs = apply_jet(plus, apply_jet(minus, jet, x), x)[0] + plus.d_const * jet[0]
        mag = apply_jet(plus, apply_jet(minus, jet, x, True), x, True)[0].real + abs(plus.d_const * jet[0])
        worst = max(worst, _rel(lhs + jet[0], mag + abs(jet[0])))
    return worst


# ---------------------------------------------------------------------------
# chains


@dataclass(frozen=True)
class ChainSpec:
    """One of the three ladder series at a given A.

    ``epsilon(i)`` is A - n for the bound/antibound series, m + 1/2 for the
    even redundant series and m + 1 for the odd one.
    """

    series: Series
    params: PotentialParams

    def __post_init__(self):
        object.__setattr__(self, "series", Series(self.series))
        object.__setattr__(self, "params", _params(self.params))

    def epsilon(self, index):
        if self.series is Series.BOUND_ANTIBOUND:
            return self.params.A - index
        if self.series is Series.REDUNDANT_EVEN:
            return index + 0.5
        return index + 1.0


def chain_bounds(chain):
    """(lowest, highest) index of the chain; None marks an open end."""
    p = chain.params
    N = p.N
    if chain.series is Series.BOUND_ANTIBOUND:
        if p.regime is Regime.INTEGER:
            return 0, 2 * N
        if p.regime is Regime.HALF_INTEGER:
            return 0, 2 * N - 1
        return 0, None
    if chain.series is Series.REDUNDANT_EVEN and p.regime is Regime.HALF_INTEGER:
        return -N, N - 1
    if chain.series is Series.REDUNDANT_ODD and p.regime is Regime.INTEGER:
        return -N - 1, N - 1
    return None, None


def _in_chain(chain, index):
    lo, hi = chain_bounds(chain)
    return (lo is None or index >= lo) and (hi is None or index <= hi)


def chain_member(chain, index):
    """The wavefunction spec at this position of the chain.

    Raises
    ------
    IndexOutOfChain
    """
    index = int(index)
    if not _in_chain(chain, index):
        raise IndexOutOfChain(f"index {index} is outside the {chain.series.value} chain at A = {chain.params.A}")
    p = chain.params
    if chain.series is Series.BOUND_ANTIBOUND:
        if p.A - index > TAU_INT:
            return WaveFunctionSpec(Family.BOUND, p, index)
        if p.regime is Regime.GENERIC:
            return WaveFunctionSpec(Family.ANTIBOUND, p, index)
        if p.regime is Regime.INTEGER and index == p.N:
            return WaveFunctionSpec(Family.SEMI_BOUND, p)
        return WaveFunctionSpec(Family.TILDE_BOUND, p, index)
    if chain.series is Series.REDUNDANT_EVEN:
        fam = Family.REDUNDANT_EVEN_CHAIN if index >= 0 else Family.TILDE_REDUNDANT_EVEN
    else:
        fam = Family.REDUNDANT_ODD_CHAIN if index >= 0 else Family.TILDE_REDUNDANT_ODD
    return WaveFunctionSpec(fam, p, index)


def _step_operator(chain, index, direction):
    """Operator and target index for one step; regularized at eps = -1/2."""
    direction = Direction(direction)
    if chain.series is Series.BOUND_ANTIBOUND:
        # eps decreases with n: Up lowers eps, which A+ does
        if direction is Direction.UP:
            eps, sign, target = chain.epsilon(index + 1), Sign.PLUS, index + 1
        else:
            eps, sign, target = chain.epsilon(index), Sign.MINUS, index - 1
    else:
        if direction is Direction.UP:
            eps, sign, target = chain.epsilon(index), Sign.MINUS, index + 1
        else:
            eps, sign, target = chain.epsilon(index - 1), Sign.PLUS, index - 1
    if abs(1.0 + 2.0 * eps) <= TAU_INT:
        return LadderOperator.regularized(chain.params, eps, sign), target
    return make_operator(chain.params, eps, sign), target


def default_samples():
    return np.linspace(-1.0, 4.0, 21)


def _images(ops, spec, x_samples):
    """Per sample: (value mantissa, magnitude, log scale) of ops[-1]...ops[0] psi."""
    out = []
    for x in x_samples:
        jet, scale = scaled_jet(spec, x, len(ops))
        mag = np.abs(jet).astype(complex)
        for op in ops:
            jet = apply_jet(op, jet, x)
            mag = apply_jet(op, mag, x, True)
        out.append((jet[0], mag[0].real, scale))
    return out


def step_image_residual(chain, from_index, direction, x_samples=None):
    """Max |op psi| relative to its term magnitudes; ~0 means annihilation."""
    xs = default_samples() if x_samples is None else x_samples
    op, _ = _step_operator(chain, from_index, direction)
    src = chain_member(chain, from_index)
    return max(_rel(v, m) for v, m, _ in _images([op], src, xs))


def _ratio_fit(images, target, x_samples):
    """Least-squares constant c with image ~ c * target, and max |ratio/c - 1|."""
    vals = []
    for (v, _, s_img), x in zip(images, x_samples):
        t_jet, s_t = scaled_jet(target, x, 0)
        vals.append((v, s_img, t_jet[0], s_t))
    # put everything on the log scale of the largest target sample
    logs_t = [math.log(abs(t)) + s if t != 0 else -math.inf for _, _, t, s in vals]
    ref = max(logs_t)
    num = 0j
    den = 0.0
    kept = []
    for (v, s_img, t, s_t), lt in zip(vals, logs_t):
        if lt < ref + math.log(1e-6):
            continue
        tn = t * math.exp(s_t - ref)
        vn = v * math.exp(s_img - ref)
        num += tn.conjugate() * vn
        den += abs(tn) ** 2
        kept.append((vn, tn))
    c = num / den
    if c == 0:
        return c, math.inf
    defect = max(abs(vn / (c * tn) - 1.0) for vn, tn in kept)
    return c, defect


def chain_step(chain, from_index, direction, x_samples=None):
    """Apply the ladder step and compare with the neighbouring chain member.

    Returns
    -------
    (complex, float)
        Proportionality constant c with op psi_from = c psi_to, and the
        constancy defect max |(op psi_from)/(c psi_to) - 1| over samples.

    Raises
    ------
    IndexOutOfChain
        Source not in the chain, or target missing while the image is nonzero.
    AnnihilatedState
        The image vanishes (chain endpoint).
    """
    xs = default_samples() if x_samples is None else np.asarray(x_samples, dtype=float)
    src = chain_member(chain, from_index)
    op, target_index = _step_operator(chain, from_index, direction)
    images = _images([op], src, xs)
    res = max(_rel(v, m) for v, m, _ in images)
    if res <= ANNIHILATION_TOL:
        raise AnnihilatedState(
            f"{chain.series.value} step {Direction(direction).value} from {from_index} annihilates the state",
            residual=res,
        )
    target = chain_member(chain, target_index)
    return _ratio_fit(images, target, xs)


def round_trip(chain, index, first=Direction.UP, x_samples=None):
    """Apply a step and its reverse; returns (constant, defect) against the start.

    Raises IndexOutOfChain or AnnihilatedState like :func:`chain_step`.
    """
    xs = default_samples() if x_samples is None else np.asarray(x_samples, dtype=float)
    first = Direction(first)
    second = Direction.DOWN if first is Direction.UP else Direction.UP
    src = chain_member(chain, index)
    op1, mid = _step_operator(chain, index, first)
    chain_member(chain, mid)
    first_res = max(_rel(v, m) for v, m, _ in _images([op1], src, xs))
    if first_res <= ANNIHILATION_TOL:
        raise AnnihilatedState(f"step {first.value} from {index} annihilates the state", residual=first_res)
    op2, _ = _step_operator(chain, mid, second)
    return _ratio_fit(_images([op1, op2], src, xs), src, xs)
