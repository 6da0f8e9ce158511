"""
S-matrix of the Morse well V(x) = e^{-2x} - 2(A + 1/2) e^{-x}.

Units are those of the reduced Schrodinger equation (hbar^2/2m = 1), so a
momentum k carries energy E = k^2.  The S-matrix is

    S(k) = -Gamma(-A-ik) Gamma(1+2ik) / (Gamma(-A+ik) Gamma(1-2ik)) * e^{-2ik log 2}

and is always evaluated in the log domain.  All singularities sit on the
imaginary axis, at the poles of the two numerator Gamma factors; the two
denominator factors can cancel them, which is what separates the generic,
integer and half-integer regimes of A.
"""

from __future__ import annotations

import cmath
import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import AtPole, AtZero, NonPositiveK, NotSimplePole
from .specfun import TAU_INT, digamma, log_gamma, nonpositive_integer

__all__ = [
    "TAU_POLE",
    "Regime",
    "PotentialParams",
    "GammaFactor",
    "PoleClass",
    "PoleRecord",
    "ComplexGrid",
    "s_matrix",
    "s_matrix_unchecked",
    "log_s_matrix",
    "laurent_leading",
    "phase_shift",
    "phase_shift_derivative",
    "phase_shift_curve",
    "enumerate_poles",
    "classify_site",
    "residue",
    "contour_residue",
    "winding_number",
    "s_matrix_grid",
    "make_axis",
]

#: Guard radius around poles for checked evaluation.
TAU_POLE = 1e-8

_LOG2 = math.log(2.0)


class Regime(enum.Enum):
    GENERIC = "generic"
    INTEGER = "integer"
    HALF_INTEGER = "half-integer"


@dataclass(frozen=True)
class PotentialParams:
    """Morse strength A > 0 and its regime.

    ``N`` is the regime integer: A = N for ``INTEGER`` and A = (2N - 1)/2
    for ``HALF_INTEGER``; ``None`` for ``GENERIC``.
    """

    A: float
    regime: Regime = field(init=False)
    N: int | None = field(init=False)

    def __post_init__(self):
        A = float(self.A)
        if not math.isfinite(A) or A <= 0:
            raise ValueError(f"Morse strength must satisfy A > 0, got {self.A!r}")
        object.__setattr__(self, "A", A)
        n_int = round(A)
        n_half = round(A + 0.5)
        if n_int >= 1 and abs(A - n_int) <= TAU_INT:
            regime, N = Regime.INTEGER, int(n_int)
        elif n_half >= 1 and abs(A - (2 * n_half - 1) / 2) <= TAU_INT:
            regime, N = Regime.HALF_INTEGER, int(n_half)
        else:
            regime, N = Regime.GENERIC, None
        object.__setattr__(self, "regime", regime)
        object.__setattr__(self, "N", N)

    @property
    def regime_label(self):
        if self.N is None:
            return self.regime.value
        return f"{self.regime.value}({self.N})"


def _params(p):
    return p if isinstance(p, PotentialParams) else PotentialParams(p)


class GammaFactor(enum.Enum):
    """The four Gamma factors of S(k): argument alpha + beta k and sign in S."""

    NUM1 = ("Gamma(-A-ik)", +1)
    NUM2 = ("Gamma(1+2ik)", +1)
    DEN1 = ("Gamma(-A+ik)", -1)
    DEN2 = ("Gamma(1-2ik)", -1)

    @property
    def label(self):
        return self.value[0]

    @property
    def sign(self):
        return self.value[1]

    def slope(self):
        return {"NUM1": -1j, "NUM2": 2j, "DEN1": 1j, "DEN2": -2j}[self.name]

    def argument(self, A, k):
        return {
            "NUM1": -A - 1j * k,
            "NUM2": 1 + 2j * k,
            "DEN1": -A + 1j * k,
            "DEN2": 1 - 2j * k,
        }[self.name]


class PoleClass(enum.Enum):
    BOUND = "bound"
    ANTIBOUND = "antibound"
    REDUNDANT_EVEN = "redundant-even"
    REDUNDANT_ODD = "redundant-odd"
    SEMI_BOUND = "semi-bound"


@dataclass(frozen=True)
class PoleRecord:
    """One singular site of S(k) on the imaginary axis.

    ``contributing_factors`` lists every Gamma factor that is singular at
    the site together with its sign in S (+1 numerator, -1 denominator);
    ``net_order`` is their sum.  ``series_index`` is n1 for bound,
    antibound and semi-bound records and the sub-series index n2 for
    redundant ones (Im k0 = (1 + 2 n2)/2 or 1 + n2).
    """

    k0: complex
    energy: float
    net_order: int
    pole_class: PoleClass
    series_index: int
    contributing_factors: tuple

    @property
    def im_k(self):
        return self.k0.imag

    @property
    def cancellation_note(self):
        parts = []
        for factor, sign in self.contributing_factors:
            parts.append(("+" if sign > 0 else "-") + factor.label)
        return " ".join(parts)


@dataclass(frozen=True)
class ComplexGrid:
    """|S(k)| sampled on k = k_re + i k_im, rows indexed by k_im."""

    k_re: np.ndarray
    k_im: np.ndarray
    step: float
    values: np.ndarray
    cap: float

    def __post_init__(self):
        if self.values.shape != (len(self.k_im), len(self.k_re)):
            raise ValueError("grid values do not match the axes")


# ---------------------------------------------------------------------------
# evaluation


def _singular_factors(A, k):
    """[(factor, n)] for every Gamma factor whose argument is within TAU_INT of -n."""
    out = []
    for factor in GammaFactor:
        n = nonpositive_integer(factor.argument(A, k))
        if n is not None:
            out.append((factor, n))
    return out


def log_s_matrix(params, k):
    """log S(k) off the Gamma poles; the i pi term carries the leading minus sign."""
    A = _params(params).A
    k = complex(k)
    return (
        log_gamma(-A - 1j * k)
        - log_gamma(-A + 1j * k)
        + log_gamma(1 + 2j * k)
        - log_gamma(1 - 2j * k)
        - 2j * k * _LOG2
        + 1j * math.pi
    )


def laurent_leading(params, k0):
    """Leading Laurent term of S at k0: returns (order, coefficient).

    S(k) ~ coefficient / (k - k0)**order.  Each singular Gamma factor at
    its pole -n contributes (-1)^n / (n! * slope); regular factors are
    evaluated at k0.  order > 0 is a pole, 0 a regular point (possibly a
    removable cancellation), < 0 a zero.
    """
    A = _params(params).A
    k0 = complex(k0)
    singular = dict(_singular_factors(A, k0))
    order = 0
    log_coef = -2j * k0 * _LOG2 + 1j * math.pi
    for factor in GammaFactor:
        if factor in singular:
            n = singular[factor]
            lead = (-1) ** n / math.factorial(n) / factor.slope()
            term = cmath.log(lead)
            order += factor.sign
        else:
            term = log_gamma(factor.argument(A, k0))
        log_coef += factor.sign * term
    return order, cmath.exp(log_coef)


def s_matrix_unchecked(params, k):
    """S(k) with no pole guard.

    Exactly at a singular site the leading Laurent term decides: a finite
    limit for removable points, 0 at zeros and complex infinity at poles.
    """
    p = _params(params)
    k = complex(k)
    if not _singular_factors(p.A, k):
        return cmath.exp(log_s_matrix(p, k))
    order, coef = laurent_leading(p, k)
    if order == 0:
        return coef
    if order < 0:
        return 0j
    return complex(math.inf, math.inf)


def _nearby_sites(A, k, radius):
    """Imaginary-axis candidate sites within `radius` of k."""
    if abs(k.real) > radius:
        return []
    t = k.imag
    sites = []
    n1 = round(A - t)
    if n1 >= 0:
        sites.append(A - n1)
    n2 = round(2 * t - 1)
    if n2 >= 0:
        sites.append((1 + n2) / 2)
    return [s for s in sites if abs(k - 1j * s) <= radius]


def s_matrix(params, k):
    """S(k) for complex k, refusing to evaluate on top of a pole.

    Raises
    ------
    AtPole
        k is within :data:`TAU_POLE` of a pole (the record is attached).
    AtZero
        k sits exactly on a zero of S.
    """
    p = _params(params)
    k = complex(k)
    for t in _nearby_sites(p.A, k, TAU_POLE):
        rec = classify_site(p, t)
        if rec is not None and rec.net_order >= 1:
            raise AtPole(rec)
    if _singular_factors(p.A, k):
        order, coef = laurent_leading(p, k)
        if order < 0:
            raise AtZero(k)
        return coef
    return cmath.exp(log_s_matrix(p, k))


def _check_k(k):
    k = float(k)
    if not k > 0:
        raise NonPositiveK(f"phase shift needs k > 0, got {k!r}")
    return k


def phase_shift(params, k):
    """delta(k) for real k > 0, continuous in k.

    The imaginary part of the log-domain sum.  On k > 0 every Gamma argument
    stays off the negative real axis, where the principal log-Gamma is
    analytic, so the sum is continuous from its value at k -> 0+ and no
    explicit unwrapping is required.
    """
    k = _check_k(k)
    return log_s_matrix(params, k).imag


def phase_shift_derivative(params, k):
    """Delta(k) = d delta / dk from digamma values.

    d/dk log Gamma(-A -/+ ik) = -/+ i psi(-A -/+ ik) and
    d/dk log Gamma(1 +/- 2ik) = +/- 2i psi(1 +/- 2ik); on the real axis the
    conjugate pairs collapse to -2 Re psi(-A+ik) + 4 Re psi(1+2ik) - 2 log 2.
    """
    k = _check_k(k)
    A = _params(params).A
    return (
        -2.0 * digamma(-A + 1j * k).real
        + 4.0 * digamma(1 + 2j * k).real
        - 2.0 * _LOG2
    )


def phase_shift_curve(params, ks):
    """(delta, Delta) arrays on increasing real k > 0; delta is unwrapped."""
    ks = np.asarray(ks, dtype=float)
    if np.any(ks <= 0):
        raise NonPositiveK("phase shift needs k > 0")
    p = _params(params)
    delta = np.array([phase_shift(p, k) for k in ks])
    ddelta = np.array([phase_shift_derivative(p, k) for k in ks])
    return np.unwrap(delta), ddelta


# ---------------------------------------------------------------------------
# pole enumeration


def _num1_sites(A, lo, hi):
    n = max(0, math.ceil(A - hi - TAU_INT))
    while A - n >= lo - TAU_INT:
        yield A - n
        n += 1


def _num2_sites(lo, hi):
    n = max(0, math.ceil(2 * lo - 1 - 2 * TAU_INT))
    while (1 + n) / 2 <= hi + TAU_INT:
        yield (1 + n) / 2
        n += 1


def classify_site(params, t):
    """PoleRecord for the imaginary-axis site k = i t, or None if S is regular there.

    Integer-A k = 0 is returned as a SEMI_BOUND marker with net order 0.
    """
    p = _params(params)
    k0 = complex(0.0, t)
    factors = _singular_factors(p.A, k0)
    if not factors:
        return None
    net = sum(f.sign for f, _ in factors)
    index = {f: n for f, n in factors}
    contrib = tuple((f, f.sign) for f, _ in factors)
    energy = -(t * t)
    if net >= 1:
        if GammaFactor.NUM1 in index:
            n1 = index[GammaFactor.NUM1]
            cls = PoleClass.BOUND if t > TAU_INT else PoleClass.ANTIBOUND
            return PoleRecord(k0, energy, net, cls, n1, contrib)
        n2 = index[GammaFactor.NUM2]
        if n2 % 2 == 0:
            return PoleRecord(k0, energy, net, PoleClass.REDUNDANT_EVEN, n2 // 2, contrib)
        return PoleRecord(k0, energy, net, PoleClass.REDUNDANT_ODD, (n2 - 1) // 2, contrib)
    if net == 0 and p.regime is Regime.INTEGER and abs(t) <= TAU_INT:
        return PoleRecord(0j, 0.0, 0, PoleClass.SEMI_BOUND, p.N, contrib)
    return None


def enumerate_poles(params, im_k_min, im_k_max):
    """Every pole of S with im_k_min <= Im k <= im_k_max, by descending Im k.

    Candidate sites are the poles of the numerator factors; each is kept
    when the numerator-minus-denominator pole count is positive.  For
    integer A the k = 0 site (a cancelled pair) is included as a
    SEMI_BOUND marker.
    """
    if not im_k_min < im_k_max:
        raise ValueError("im_k_min must be smaller than im_k_max")
    p = _params(params)
    sites = list(_num1_sites(p.A, im_k_min, im_k_max))
    sites += list(_num2_sites(im_k_min, im_k_max))
    if p.regime is Regime.INTEGER and im_k_min <= 0 <= im_k_max:
        sites.append(0.0)
    sites.sort(reverse=True)
    merged = []
    for t in sites:
        if not merged or abs(merged[-1] - t) > TAU_INT:
            merged.append(t)
    records = []
    for t in merged:
        if not im_k_min - TAU_INT <= t <= im_k_max + TAU_INT:
            continue
        rec = classify_site(p, t)
        if rec is not None:
            records.append(rec)
    return records


def residue(params, pole):
    """Analytic residue of S at a simple pole."""
    if pole.net_order != 1:
        raise NotSimplePole(f"net order {pole.net_order} at {pole.k0!r}")
    order, coef = laurent_leading(params, pole.k0)
    if order != 1:
        raise NotSimplePole(f"Laurent order {order} at {pole.k0!r}")
    return coef


def _circle(k0, radius, nodes):
    theta = 2.0 * np.pi * np.arange(nodes) / nodes
    return complex(k0) + radius * np.exp(1j * theta)


def contour_residue(params, k0, radius=1e-3, nodes=512):
    """(1/2 pi i) times the trapezoidal contour integral of S around k0."""
    p = _params(params)
    pts = _circle(k0, radius, nodes)
    vals = np.array([s_matrix_unchecked(p, k) for k in pts])
    return complex(np.mean(vals * (pts - complex(k0))))


def winding_number(params, k0, radius=1e-3, nodes=512):
    """Pole order minus zero order of S inside the circle, from the change of arg S."""
    p = _params(params)
    pts = _circle(k0, radius, nodes)
    vals = np.array([s_matrix_unchecked(p, k) for k in pts])
    phase = np.unwrap(np.angle(np.append(vals, vals[0])))
    return -(phase[-1] - phase[0]) / (2.0 * np.pi)


# ---------------------------------------------------------------------------
# grids


def make_axis(lo, hi, step):
    """Sample points lo, lo + step, ... up to hi inclusive."""
    lo, hi, step = float(lo), float(hi), float(step)
    if not (math.isfinite(lo) and math.isfinite(hi)) or not hi > lo:
        raise ValueError(f"degenerate range {lo}:{hi}")
    if not step > 0:
        raise ValueError(f"step must be positive, got {step}")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    if n < 2:
        raise ValueError(f"step {step} is larger than the range {lo}:{hi}")
    return np.round(lo + step * np.arange(n), 12)


def _thread_count():
    raw = os.environ.get("MORSE_SMATRIX_THREADS")
    if raw is None:
        return 1
    n = int(raw)
    if n < 1:
        raise ValueError("MORSE_SMATRIX_THREADS must be an integer >= 1")
    return n


def _grid_row(p, k_re, t, cap):
    row = np.empty(len(k_re))
    for j, x in enumerate(k_re):
        v = abs(s_matrix_unchecked(p, complex(x, t)))
        row[j] = cap if not math.isfinite(v) or v > cap else v
    return row


def s_matrix_grid(params, re_range, im_range, step, cap=1e6, threads=None):
    """|S(k)| on a rectangular grid, clipped at `cap`.

    Rows (fixed Im k) are independent; with ``threads`` > 1 (default from
    ``MORSE_SMATRIX_THREADS``) they are evaluated concurrently and the
    result is identical to the sequential one.
    """
    p = _params(params)
    if not cap > 0:
        raise ValueError("cap must be positive")
    k_re = make_axis(*re_range, step)
    k_im = make_axis(*im_range, step)
    threads = _thread_count() if threads is None else int(threads)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(lambda t: _grid_row(p, k_re, t, cap), k_im))
    else:
        rows = [_grid_row(p, k_re, t, cap) for t in k_im]
    return ComplexGrid(k_re, k_im, float(step), np.vstack(rows), float(cap))
