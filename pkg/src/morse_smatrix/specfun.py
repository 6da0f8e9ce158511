"""
Complex special-function kernel.

Log-Gamma (Lanczos, g = 7), digamma (shifted asymptotic series) and the
Kummer confluent hypergeometric function 1F1(a; c; z) in its polynomial,
forward-series and large-|z| regimes.  Everything is scalar and built on
:mod:`cmath`; arrays are handled by the callers.

Kummer values are carried internally as ``(mantissa, log_scale)`` pairs,
value = mantissa * exp(log_scale), so that the e^z growth for large z never
overflows before the caller has had a chance to combine it with a decaying
prefactor.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import InvalidC, NoConvergence, PoleOfGamma

__all__ = [
    "TAU_INT",
    "EvalPrecision",
    "DEFAULT_PRECISION",
    "KummerArgs",
    "gamma_pole_index",
    "log_gamma",
    "rgamma",
    "digamma",
    "kummer_1f1",
    "log_kummer_1f1",
    "kummer_series",
    "kummer_asymptotic",
    "kummer_asymptotic_full",
    "kummer_derivative",
    "laguerre",
    "nonpositive_integer",
]

#: Tolerance for "is an integer" decisions, shared by every module.
TAU_INT = 1e-9

_LOG_2PI_HALF = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)
_LOG_RESCALE = 200.0 * math.log(10.0)
_RESCALE_LIMIT = 1e200

_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)

# B_2k / (2k) for the digamma asymptotic series
_DIGAMMA_ASYM = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
    -3617.0 / 8160.0,
)


@dataclass(frozen=True)
class EvalPrecision:
    """Series controls for :func:`kummer_1f1`.

    Attributes
    ----------
    rel_tol : float
        A forward-series term counts as negligible once
        ``|t_j| <= rel_tol * |partial sum|``; three in a row end the sum.
    max_terms : int
        Term budget before :class:`NoConvergence` is raised.
    asymptotic_threshold : float
        |z| at and above which the large-argument expansion is tried first.
    """

    rel_tol: float = 1e-16
    max_terms: int = 5000
    asymptotic_threshold: float = 30.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if not self.asymptotic_threshold > 0:
            raise ValueError("asymptotic_threshold must be positive")


DEFAULT_PRECISION = EvalPrecision()

# Above this |z| the forward series is never used as a fallback.
_SERIES_FALLBACK_MAX = 1500.0
# Accept the asymptotic expansion when its smallest term is below this.
_ASYMPTOTIC_ACCEPT = 1e-14
# Cancellation factor below which the first series form tried is kept
_SERIES_LOSS_OK = 1e2


def _check_finite(*values):
    for v in values:
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise ValueError(f"non-finite argument {v!r}")


def nonpositive_integer(z, tol=TAU_INT):
    """Return n >= 0 if z is within tol of -n, else None."""
    z = complex(z)
    if abs(z.imag) > tol:
        return None
    n = round(-z.real)
    if n < 0 or abs(z.real + n) > tol:
        return None
    return int(n)


def gamma_pole_index(z, tol):
    """Index n of the Gamma pole at -n within `tol` of z, or None.

    >>> gamma_pole_index(-3 + 1e-14j, 1e-9)
    3
    >>> gamma_pole_index(-2.5, 1e-9) is None
    True
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    z = complex(z)
    n = round(-z.real)
    if n >= 0 and abs(z + n) <= tol:
        return int(n)
    return None


# ---------------------------------------------------------------------------
# trigonometric helpers with exact zeros at (half-)integers


def _sinpi_real(x):
    n = round(x)
    r = x - n
    s = math.sin(math.pi * r)
    return -s if n % 2 else s


def _cospi_real(x):
    n = round(x)
    r = abs(x - n)
    c = math.sin(math.pi * (0.5 - r))
    return -c if n % 2 else c


def _sinpi(z):
    x, y = z.real, z.imag
    py = math.pi * y
    return complex(_sinpi_real(x) * math.cosh(py), _cospi_real(x) * math.sinh(py))


def _cospi(z):
    x, y = z.real, z.imag
    py = math.pi * y
    return complex(_cospi_real(x) * math.cosh(py), -_sinpi_real(x) * math.sinh(py))


def _log_sinpi(z):
    """Principal log of sin(pi z), safe for large |Im z|."""
    if abs(z.imag) <= 20.0:
        return cmath.log(_sinpi(z))
    if z.imag < 0:
        return _log_sinpi(z.conjugate()).conjugate()
    # sin(pi z) = (i/2) e^{-i pi z} (1 - e^{2 i pi z}); |e^{2 i pi z}| < e^{-125}
    tail = cmath.log(1.0 - cmath.exp(2j * math.pi * z))
    # reduce the angle pi (1/2 - x) exactly, onto (-pi, pi] like cmath.log
    turns = math.remainder(0.5 - z.real, 2.0)
    if turns == -1.0:
        turns = 1.0
    return complex(math.pi * z.imag - math.log(2.0) + tail.real, math.pi * turns + tail.imag)


def _cotpi(z):
    y = z.imag
    if y > 20.0:
        w = cmath.exp(2j * math.pi * z)
        return 1j * (w + 1.0) / (w - 1.0)
    if y < -20.0:
        w = cmath.exp(-2j * math.pi * z)
        return 1j * (1.0 + w) / (1.0 - w)
    return _cospi(z) / _sinpi(z)


# ---------------------------------------------------------------------------
# Gamma family


def _log_gamma_lanczos(z):
    w = z - 1.0
    s = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        s += _LANCZOS_COEF[i] / (w + i)
    t = w + _LANCZOS_G + 0.5
    return _LOG_2PI_HALF + (w + 0.5) * cmath.log(t) - t + cmath.log(s)


def log_gamma(z):
    """Principal branch of log Gamma(z).

    Analytic on the plane cut along the negative real axis, real for real
    z > 0, and ``log_gamma(conj(z)) == conj(log_gamma(z))`` exactly,
    with -0.0 in Im z selecting the lower side of the cut.  Uses the Lanczos sum for Re z >= 1/2 and the reflection formula
    otherwise.

    Raises
    ------
    PoleOfGamma
        If z lies within :data:`TAU_INT` of a non-positive integer.
    """
    z = complex(z)
    _check_finite(z)
    n = gamma_pole_index(z, TAU_INT)
    if n is not None:
        raise PoleOfGamma(n, z)
    # the sign of a zero imaginary part picks the side of the cut
    if math.copysign(1.0, z.imag) < 0:
        return _log_gamma(z.conjugate()).conjugate()
    return _log_gamma(z)


def _log_gamma(z):
    if z.real >= 0.5:
        val = _log_gamma_lanczos(z)
        if z.imag == 0.0:
            return complex(val.real, 0.0)
        return val
    # reflection; the 2 pi i correction keeps the branch continuous in Im z >= 0
    shift = 2.0 * math.pi * math.floor(0.5 * z.real + 0.25)
    return complex(_LOG_PI, shift) - _log_sinpi(z) - _log_gamma(1.0 - z)


def rgamma(z):
    """1/Gamma(z); exactly zero at the poles of Gamma."""
    z = complex(z)
    if gamma_pole_index(z, TAU_INT) is not None:
        return 0j
    return cmath.exp(-log_gamma(z))


def digamma(z):
    """psi(z) = d/dz log Gamma(z).

    Reflection for Re z < 1/2, upward recurrence to |z| >= 10 and the
    Bernoulli asymptotic series there.
    """
    z = complex(z)
    _check_finite(z)
    n = gamma_pole_index(z, TAU_INT)
    if n is not None:
        raise PoleOfGamma(n, z)
    if z.imag < 0:
        return _digamma(z.conjugate()).conjugate()
    return _digamma(z)


def _digamma(z):
    if z.real < 0.5:
        return _digamma(1.0 - z) - math.pi * _cotpi(z)
    acc = 0j
    while abs(z) < 10.0:
        acc -= 1.0 / z
        z += 1.0
    inv2 = 1.0 / (z * z)
    series = 0j
    p = inv2
    for coef in _DIGAMMA_ASYM:
        series += coef * p
        p *= inv2
    res = acc + cmath.log(z) - 0.5 / z - series
    if z.imag == 0.0:
        return complex(res.real, 0.0)
    return res


# ---------------------------------------------------------------------------
# Kummer 1F1


@dataclass(frozen=True)
class KummerArgs:
    """Arguments (a, c, z) of 1F1(a; c; z), validated on construction."""

    a: complex
    c: complex
    z: complex

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "c", complex(self.c))
        object.__setattr__(self, "z", complex(self.z))
        _check_finite(self.a, self.c, self.z)
        _validate_c(self.a, self.c)


def _validate_c(a, c):
    m = nonpositive_integer(c)
    if m is None:
        return
    n = nonpositive_integer(a)
    # the polynomial stops at t_n, which only divides by c, c+1, ..., c+n-1
    if n is not None and n <= m:
        return
    raise InvalidC(
        f"c = {c!r} is a non-positive integer and 1F1({a!r}; c; z) does not truncate before it"
    )


def _as_args(a, c=None, z=None):
    if isinstance(a, KummerArgs):
        return a
    return KummerArgs(a, c, z)


def _scaled_series(a, c, z, prec, n_terms=None):
    """Forward power series, returned as (mantissa, log_scale, loss).

    ``loss`` is sum |t_j| / |sum t_j|, the factor by which cancellation
    amplifies rounding.  With ``n_terms`` set the sum is the exact
    polynomial t_0 + ... + t_n.
    """
    term = 1 + 0j
    total = 1 + 0j
    mass = 1.0
    log_scale = 0.0
    quiet = 0
    limit = n_terms if n_terms is not None else prec.max_terms
    for j in range(limit):
        den = (c + j) * (j + 1)
        ratio = (a + j) * z / den
        term *= ratio
        total += term
        mass += abs(term)
        if mass > _RESCALE_LIMIT:
            term *= 1.0 / _RESCALE_LIMIT
            total *= 1.0 / _RESCALE_LIMIT
            mass *= 1.0 / _RESCALE_LIMIT
            log_scale += _LOG_RESCALE
        if n_terms is not None:
            continue
        # only count small terms once they are guaranteed to keep shrinking
        if (
            abs(term) <= prec.rel_tol * abs(total)
            and j + 1 > -c.real
            and abs(ratio) < 1.0
        ):
            quiet += 1
            if quiet >= 3:
                return total, log_scale, _loss(mass, total)
        else:
            quiet = 0
    if n_terms is not None:
        return total, log_scale, _loss(mass, total)
    raise NoConvergence(
        f"1F1({a!r}; {c!r}; {z!r}) did not converge in {prec.max_terms} terms"
    )


def _loss(mass, total):
    return mass / abs(total) if total != 0 else math.inf


def _plain_series(a, c, z, prec):
    n = nonpositive_integer(a)
    if n is not None:
        return _scaled_series(complex(-n), c, z, prec, n_terms=n)
    return _scaled_series(a, c, z, prec)


def _transformed_series(a, c, z, prec):
    # 1F1(a; c; z) = e^z 1F1(c - a; c; -z)
    mant, scale, loss = _plain_series(c - a, c, -z, prec)
    return mant * cmath.exp(1j * z.imag), scale + z.real, loss


def _series_regime(a, c, z, prec):
    """Series, or its Kummer transform when that cancels less (Re z < 0)."""
    n = nonpositive_integer(a)
    if n is not None:
        return _scaled_series(complex(-n), c, z, prec, n_terms=n)[:2]
    if z.real >= 0:
        return _scaled_series(a, c, z, prec)[:2]
    tries = [_plain_series, _transformed_series]
    if z.real < -abs(z.imag):
        tries.reverse()
    best = None
    for f in tries:
        try:
            r = f(a, c, z, prec)
        except NoConvergence:
            continue
        if best is None or r[2] < best[2]:
            best = r
        if r[2] <= _SERIES_LOSS_OK:
            break
    if best is None:
        raise NoConvergence(f"1F1({a!r}; {c!r}; {z!r}) did not converge in {prec.max_terms} terms")
    return best[:2]


def _asymptotic_tail(p, q, w, max_terms=400):
    """Optimally truncated sum_j (p)_j (q)_j w^j / j!, plus smallest-term estimate."""
    total = 1 + 0j
    term = 1 + 0j
    prev = 1.0
    for j in range(max_terms):
        nxt = term * (p + j) * (q + j) * w / (j + 1)
        mag = abs(nxt)
        if mag == 0.0:
            return total, 0.0
        if mag > prev:
            return total, prev / max(abs(total), 1e-300)
        term = nxt
        total += term
        prev = mag
        if mag <= 1e-17 * abs(total):
            return total, mag / abs(total)
    return total, prev / max(abs(total), 1e-300)


def _log_add(u, v):
    """log(e^u + e^v) for complex logs; None stands for log 0."""
    if u is None:
        return v
    if v is None:
        return u
    if u.real < v.real:
        u, v = v, u
    s = 1.0 + cmath.exp(v - u)
    if s == 0:
        return None
    return u + cmath.log(s)


def _asymptotic_logs(a, c, z, leading_only=False):
    """Logs of the e^z branch and of the z^-a branch (None when absent), and error estimate."""
    lgc = log_gamma(c)
    logz = cmath.log(z)
    err = 0.0
    dominant = None
    if nonpositive_integer(a) is None:
        tail, e1 = (1 + 0j, 0.0) if leading_only else _asymptotic_tail(c - a, 1.0 - a, 1.0 / z)
        if tail != 0:
            dominant = lgc - log_gamma(a) + z + (a - c) * logz + cmath.log(tail)
        err = max(err, e1)
    if leading_only:
        return dominant, None, err
    recessive = None
    if nonpositive_integer(c - a) is None:
        tail, e2 = _asymptotic_tail(a, a - c + 1.0, -1.0 / z)
        if z.imag > 0:
            phase = cmath.exp(1j * math.pi * a)
        elif z.imag < 0:
            phase = cmath.exp(-1j * math.pi * a)
        else:
            phase = cmath.cos(math.pi * a)
        if tail != 0 and phase != 0:
            recessive = lgc - log_gamma(c - a) - a * logz + cmath.log(phase) + cmath.log(tail)
            err = max(err, e2)
    return dominant, recessive, err


def _kummer_scaled(a, c, z, prec=DEFAULT_PRECISION):
    """1F1(a; c; z) as (mantissa, log_scale). Arguments must be valid."""
    if z == 0:
        return 1 + 0j, 0.0
    if nonpositive_integer(a) is not None or abs(z) < prec.asymptotic_threshold:
        return _series_regime(a, c, z, prec)
    dom, rec, err = _asymptotic_logs(a, c, z)
    if err > _ASYMPTOTIC_ACCEPT and abs(z) <= _SERIES_FALLBACK_MAX:
        return _series_regime(a, c, z, prec)
    log_val = _log_add(dom, rec)
    if log_val is None:
        return 0j, 0.0
    return cmath.exp(1j * log_val.imag), log_val.real


def kummer_1f1(a, c=None, z=None, prec=DEFAULT_PRECISION):
    """Confluent hypergeometric function 1F1(a; c; z).

    Accepts either ``(a, c, z)`` or a single :class:`KummerArgs`.

    Regimes: exact polynomial when a is a non-positive integer; forward
    series (Kummer-transformed when Re z < 0) for |z| below
    ``prec.asymptotic_threshold``; otherwise the two-branch large-|z|
    expansion, falling back to the series when the expansion cannot reach
    double precision and |z| is still small enough to sum directly.

    Raises
    ------
    InvalidC
        c is a non-positive integer and the series does not truncate first.
    NoConvergence
        The forward series needed more than ``prec.max_terms`` terms.

    Examples
    --------
    >>> kummer_1f1(-1, 2, 1 + 1j)
    (0.5-0.5j)
    """
    args = _as_args(a, c, z)
    mant, scale = _kummer_scaled(args.a, args.c, args.z, prec)
    if mant == 0:
        return 0j
    return mant * math.exp(scale) if scale < 709.0 else complex(math.inf, 0)


def log_kummer_1f1(a, c=None, z=None, prec=DEFAULT_PRECISION):
    """log 1F1(a; c; z) (branch unspecified modulo 2 pi i); -inf at zeros."""
    args = _as_args(a, c, z)
    mant, scale = _kummer_scaled(args.a, args.c, args.z, prec)
    if mant == 0:
        return complex(-math.inf, 0.0)
    return cmath.log(mant) + scale


def kummer_series(a, c=None, z=None, prec=DEFAULT_PRECISION):
    """1F1 by the plain forward series, whatever |z| is."""
    args = _as_args(a, c, z)
    mant, scale, _ = _plain_series(args.a, args.c, args.z, prec)
    return mant * math.exp(scale)


def kummer_asymptotic(a, c=None, z=None, leading_only=False):
    """Dominant large-z form Gamma(c)/Gamma(a) e^z z^(a-c), principal branch.

    By default the leading form is multiplied by its optimally truncated
    correction series sum_j (c-a)_j (1-a)_j / (j! z^j); ``leading_only``
    returns the bare leading term.

    Raises
    ------
    PoleOfGamma
        When a is a non-positive integer: 1/Gamma(a) vanishes and the
        polynomial evaluation must be used instead.
    """
    args = _as_args(a, c, z)
    n = nonpositive_integer(args.a)
    if n is not None:
        raise PoleOfGamma(n, args.a)
    dom, _, _ = _asymptotic_logs(args.a, args.c, args.z, leading_only=leading_only)
    if dom is None:
        return 0j
    return cmath.exp(dom)


def kummer_asymptotic_full(a, c=None, z=None):
    """Both branches of the large-|z| expansion; recessive branch included."""
    args = _as_args(a, c, z)
    dom, rec, _ = _asymptotic_logs(args.a, args.c, args.z)
    log_val = _log_add(dom, rec)
    return 0j if log_val is None else cmath.exp(log_val)


def _pochhammer(x, m):
    p = 1 + 0j
    for j in range(m):
        p *= x + j
    return p


def kummer_derivative(a, c=None, z=None, prec=DEFAULT_PRECISION, order=1):
    """d^m/dz^m 1F1(a; c; z) = (a)_m/(c)_m 1F1(a+m; c+m; z)."""
    args = _as_args(a, c, z)
    if order < 0:
        raise ValueError("order must be >= 0")
    a = args.a
    n = nonpositive_integer(a)
    if n is not None:
        # same snapping as kummer_1f1, so F and its derivatives agree
        a = complex(-n)
    factor = _pochhammer(a, order)
    if factor == 0:
        return 0j
    factor /= _pochhammer(args.c, order)
    return factor * kummer_1f1(a + order, args.c + order, args.z, prec)


def laguerre(n, alpha, z):
    """Generalized Laguerre polynomial L_n^alpha(z) by the three-term recurrence.

    L_n^alpha(z) = binom(n + alpha, n) 1F1(-n; alpha + 1; z).
    """
    if n < 0:
        raise ValueError("n must be >= 0")
    z = complex(z)
    prev, cur = 1 + 0j, 1.0 + alpha - z
    if n == 0:
        return prev
    for k in range(1, n):
        prev, cur = cur, ((2 * k + 1 + alpha - z) * cur - (k + alpha) * prev) / (k + 1)
    return cur
