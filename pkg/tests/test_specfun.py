import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from morse_smatrix.errors import InvalidC, NoConvergence, PoleOfGamma
from morse_smatrix.specfun import (
    DEFAULT_PRECISION,
    EvalPrecision,
    KummerArgs,
    digamma,
    gamma_pole_index,
    kummer_1f1,
    kummer_asymptotic,
    kummer_asymptotic_full,
    kummer_derivative,
    kummer_series,
    laguerre,
    log_gamma,
    log_kummer_1f1,
    nonpositive_integer,
)

from conftest import rel_err

EULER = 0.57721566490153286

finite = dict(allow_nan=False, allow_infinity=False, allow_subnormal=False)
off_pole = st.complex_numbers(max_magnitude=45, **finite).filter(
    lambda z: abs(z - round(z.real)) > 1e-3 or z.real > 0.5
)


# log_gamma ------------------------------------------------------------------


def test_log_gamma_at_one_and_half():
    assert abs(log_gamma(1)) < 1e-14
    assert abs(log_gamma(0.5) - 0.5 * math.log(math.pi)) < 1e-14


def test_log_gamma_real_positive_axis_is_real():
    for x in (0.6, 1.0, 3.3, 17.0, 49.5):
        assert log_gamma(x).imag == 0.0


def test_log_gamma_frozen_complex_value():
    # mpmath.loggamma(3.7+2.1j) at 50 digits
    want = complex(0.78534695807382238876, 2.5830129251152622486)
    assert rel_err(log_gamma(3.7 + 2.1j), want) < 1e-13


@pytest.mark.parametrize("n", [0, 1, 2, 7, 30])
def test_log_gamma_poles_raise(n):
    with pytest.raises(PoleOfGamma) as exc:
        log_gamma(-n + 1e-12j)
    assert exc.value.n == n


@given(off_pole)
def test_log_gamma_matches_mpmath(z):
    assume(abs(z) > 1e-3)
    want = complex(mpmath.loggamma(z))
    got = log_gamma(z)
    # same value of Gamma; the branch of the imaginary part may differ by 2 pi
    d = got - want
    assert abs(d.real) < 1e-12 * max(1.0, abs(want.real))
    assert abs(cmath.exp(1j * d.imag) - 1) < 1e-11


def _near_pole(z):
    return abs(z - round(z.real)) < 1e-3 and z.real < 0.5


def test_log_gamma_reflection_and_recurrence(rng):
    zs = rng.uniform(-20, 20, 1000) + 1j * rng.uniform(-3, 3, 1000)
    worst_refl = worst_rec = 0.0
    for z in zs:
        if _near_pole(z) or _near_pole(1 - z) or abs(z) < 1e-3:
            continue
        lhs = log_gamma(z) + log_gamma(1 - z)
        rhs = cmath.log(math.pi / cmath.sin(math.pi * z))
        worst_refl = max(worst_refl, abs(cmath.exp(lhs - rhs) - 1))
        rec = log_gamma(z + 1) - log_gamma(z) - cmath.log(z)
        worst_rec = max(worst_rec, abs(cmath.exp(rec) - 1))
    assert worst_refl < 1e-9
    assert worst_rec < 1e-10


@given(off_pole)
def test_log_gamma_conjugation(z):
    a = log_gamma(z.conjugate())
    b = log_gamma(z).conjugate()
    assert abs(a - b) <= 1e-13 * max(1.0, abs(b))


# digamma --------------------------------------------------------------------


def test_digamma_known_values():
    assert abs(digamma(1) + EULER) < 1e-14
    assert abs(digamma(2) - (1 - EULER)) < 1e-14


def test_digamma_frozen_complex_value():
    want = complex(0.13189263735452268605, 0.44065951997751459266)
    assert rel_err(digamma(1.5 + 0.5j), want) < 1e-13


def test_digamma_matches_richardson_derivative_of_log_gamma():
    z = 1.5 + 0.5j

    def d(h):
        return (log_gamma(z + h) - log_gamma(z - h)) / (2 * h)

    h = 1e-3
    rich = (4 * d(h / 2) - d(h)) / 3
    assert rel_err(digamma(z), rich) < 1e-10


def test_digamma_pole_raises():
    with pytest.raises(PoleOfGamma):
        digamma(-4)


@given(off_pole)
def test_digamma_matches_mpmath(z):
    assume(abs(z) > 1e-3)
    assert rel_err(digamma(z), complex(mpmath.digamma(z))) < 1e-10


# pole detection -------------------------------------------------------------


def test_gamma_pole_index():
    assert gamma_pole_index(-3 + 1e-14j, 1e-9) == 3
    assert gamma_pole_index(-2.5, 1e-9) is None
    assert gamma_pole_index(0, 1e-9) == 0
    assert gamma_pole_index(2.0, 1e-9) is None


# Kummer ---------------------------------------------------------------------


def test_kummer_trivial_values():
    assert kummer_1f1(2.3 - 1j, 0.7, 0) == 1
    assert kummer_1f1(-1, 2, 1 + 1j) == pytest.approx(0.5 - 0.5j, abs=1e-15)
    assert rel_err(kummer_1f1(1, 1, 2.5), math.exp(2.5)) < 1e-14
    assert rel_err(kummer_1f1(KummerArgs(1, 1, 2.5)), 12.182493960703473) < 1e-14


def test_kummer_invalid_c():
    with pytest.raises(InvalidC):
        kummer_1f1(0.3, -2, 1.0)
    with pytest.raises(InvalidC):
        KummerArgs(-4, -2, 1.0)  # truncation comes too late
    # a = -2 stops before the vanishing (c + 2)
    assert kummer_1f1(-2, -3, 1.5) == pytest.approx(1 + (-2) * 1.5 / -3 + (-2) * (-1) * 1.5**2 / (-3 * -2 * 2))


def test_kummer_rejects_nonfinite():
    with pytest.raises(ValueError):
        KummerArgs(1.0, 2.0, float("nan"))


def test_kummer_no_convergence_budget():
    with pytest.raises(NoConvergence):
        kummer_series(0.5, 1.5, 25.0, EvalPrecision(max_terms=10))


def test_eval_precision_validation():
    with pytest.raises(ValueError):
        EvalPrecision(rel_tol=0)
    with pytest.raises(ValueError):
        EvalPrecision(max_terms=0)
    with pytest.raises(ValueError):
        EvalPrecision(asymptotic_threshold=-1)


def test_kummer_frozen_large_argument_values():
    # mpmath.hyp1f1 at 50 digits
    f30 = complex(-123145230.82005763031, -132939545.62216321693)
    f50 = 52381917621841878396.952862399367691118
    assert rel_err(kummer_1f1(-2.3 + 0.7j, 1.4, 30), f30) < 1e-12
    assert rel_err(kummer_1f1(0.5, 1.5, 50), f50) < 1e-13


def test_kummer_asymptotic_dominant_branch():
    # at z = 30 optimal truncation of the expansion limits it to ~1e-6
    f30 = complex(-123145230.82005763031, -132939545.62216321693)
    assert rel_err(kummer_asymptotic_full(-2.3 + 0.7j, 1.4, 30), f30) < 1e-5
    assert rel_err(kummer_asymptotic(-2.3 + 0.7j, 1.4, 30), f30) < 0.05
    f50 = 52381917621841878396.952862399367691118
    assert rel_err(kummer_asymptotic(0.5, 1.5, 50), f50) < 1e-6


def test_kummer_asymptotic_bare_leading_form():
    # Gamma(c)/Gamma(a) e^z z^(a-c) without corrections, against mpmath
    lead30 = complex(-59038314.638570595104, -98949405.971864931770)
    lead50 = 51847055285870724640.874533229334853848
    assert rel_err(kummer_asymptotic(-2.3 + 0.7j, 1.4, 30, leading_only=True), lead30) < 1e-12
    assert rel_err(kummer_asymptotic(0.5, 1.5, 50, leading_only=True), lead50) < 1e-12
    assert rel_err(kummer_asymptotic(1, 1, 40, leading_only=True), math.exp(40)) < 1e-10
    assert rel_err(kummer_asymptotic(1, 1, 40), math.exp(40)) < 1e-10


def test_kummer_asymptotic_polynomial_a_raises():
    with pytest.raises(PoleOfGamma):
        kummer_asymptotic(-3, 2, 50)


def test_log_kummer_far_beyond_overflow():
    for z in (807.0, 44053.0):
        want = complex(mpmath.log(mpmath.hyp1f1(-1.5 + 0.7j, 1 + 1.4j, z)))
        got = log_kummer_1f1(-1.5 + 0.7j, 1 + 1.4j, z)
        assert abs(got.real - want.real) < 1e-12 * abs(want.real)
        assert abs(cmath.exp(1j * (got.imag - want.imag)) - 1) < 1e-10


params_ac = st.tuples(
    st.floats(-6, 6, **finite),
    st.floats(-2, 2, **finite),
    st.floats(0.3, 6, **finite),
    st.floats(-2, 2, **finite),
)


def _abs_term_sum(a, c, z):
    """sum_j |(a)_j z^j / ((c)_j j!)|, the roundoff scale of the series."""
    t, total = 1.0, 1.0
    for j in range(2000):
        t *= abs((a + j) * z / ((c + j) * (j + 1)))
        total += t
        if t < 1e-18 * total and j > abs(z):
            break
    return total


@given(params_ac, st.floats(-25, 25, **finite), st.floats(-25, 25, **finite))
def test_kummer_matches_mpmath(p, zr, zi):
    a = complex(p[0], p[1])
    c = complex(p[2], p[3])
    z = complex(zr, zi)
    # a snapped onto a non-positive integer is the polynomial by design
    assume(nonpositive_integer(a) is None)
    want = complex(mpmath.hyp1f1(a, c, z))
    assume(abs(want) > 1e-200)
    # cancellation for oscillating z loses digits relative to the term sum
    assert abs(kummer_1f1(a, c, z) - want) <= 1e-11 * abs(want) + 1e-14 * _abs_term_sum(a, c, z)


@given(params_ac, st.floats(0.05, 60, **finite))
def test_kummer_ode_residual(p, x):
    a = complex(p[0], p[1])
    c = complex(p[2], p[3])
    z = complex(x, 0.0)
    n = nonpositive_integer(a)
    if n is not None:
        a = complex(-n)  # the polynomial actually evaluated
    F = kummer_1f1(a, c, z)
    F1 = kummer_derivative(a, c, z)
    F2 = kummer_derivative(a, c, z, order=2)
    res = z * F2 + (c - z) * F1 - a * F
    assert abs(res) <= 1e-8 * (abs(z * F2) + abs(c * F1) + abs(a * F))


def test_series_asymptotic_overlap(rng):
    # the large-z expansion is only asymptotic once |z| >> |a|, |c|; near the
    # threshold that restricts the overlap check to moderate parameters
    thr = DEFAULT_PRECISION.asymptotic_threshold
    worst = 0.0
    for _ in range(200):
        a = complex(rng.uniform(-1, 1), rng.uniform(-0.5, 0.5))
        c = complex(rng.uniform(0.5, 2), rng.uniform(-0.5, 0.5))
        z = rng.uniform(0.8 * thr, 1.2 * thr) * cmath.exp(1j * rng.uniform(-0.4, 0.4))
        worst = max(worst, rel_err(kummer_asymptotic_full(a, c, z), kummer_series(a, c, z)))
    assert worst < 1e-5


def test_regime_switch_accurate_where_expansion_breaks_down(rng):
    # large parameters make the expansion useless at |z| ~ 30; the selector
    # must notice and keep full accuracy
    thr = DEFAULT_PRECISION.asymptotic_threshold
    worst = 0.0
    for _ in range(80):
        a = complex(rng.uniform(-4, 4), rng.uniform(-1, 1))
        c = complex(rng.uniform(0.5, 5), rng.uniform(-1, 1))
        z = rng.uniform(0.8 * thr, 1.2 * thr) * cmath.exp(1j * rng.uniform(-0.4, 0.4))
        worst = max(worst, rel_err(kummer_1f1(a, c, z), complex(mpmath.hyp1f1(a, c, z))))
    assert worst < 1e-12


def test_kummer_derivative_examples():
    assert kummer_derivative(-1, 2, 3.7 + 1j) == pytest.approx(-0.5)
    assert rel_err(kummer_derivative(1, 1, 1), math.e) < 1e-14
    want = -0.88249497153345815526  # mpmath.diff at 50 digits
    assert rel_err(kummer_derivative(-2.3, 1.6, 0.8), want) < 1e-13


@given(params_ac, st.floats(-20, 20, **finite))
def test_kummer_derivative_vs_finite_difference(p, x):
    a = complex(p[0], p[1])
    c = complex(p[2], p[3])
    h = 1e-6 * max(1.0, abs(x))
    fd = (kummer_1f1(a, c, x + h) - kummer_1f1(a, c, x - h)) / (2 * h)
    d = kummer_derivative(a, c, x)
    scale = max(abs(d), abs(kummer_1f1(a, c, x)))
    assert abs(d - fd) <= 1e-6 * scale


def test_laguerre_examples():
    assert laguerre(0, 1.3, 2 + 1j) == 1
    assert laguerre(1, 2, 3) == 0
    lag = 21.903999999999995833  # mpmath.laguerre(3, 4.6, 1.2)
    assert rel_err(laguerre(3, 4.6, 1.2), lag) < 1e-14
    binom = math.gamma(7.6 + 1) / (math.gamma(4.6 + 1) * math.factorial(3))
    assert rel_err(laguerre(3, 4.6, 1.2), binom * kummer_1f1(-3, 5.6, 1.2)) < 1e-13


@given(st.integers(0, 12), st.floats(-0.9, 8, **finite), st.floats(0, 15, **finite))
def test_laguerre_matches_kummer(n, alpha, x):
    binom = math.gamma(n + alpha + 1) / (math.gamma(alpha + 1) * math.factorial(n))
    want = binom * kummer_1f1(-n, alpha + 1, x)
    scale = binom * kummer_1f1(-n, alpha + 1, -x).real  # sum of |terms|
    assert abs(laguerre(n, alpha, x) - want) <= 1e-11 * max(abs(scale), 1.0)


def test_kummer_accepts_numpy_scalars():
    assert rel_err(kummer_1f1(np.float64(1.0), np.float64(1.0), np.float64(0.5)), math.exp(0.5)) < 1e-15


def test_log_gamma_sides_of_the_cut():
    up, down = log_gamma(complex(-1.5, 0.0)), log_gamma(complex(-1.5, -0.0))
    assert down == up.conjugate() and up.imag != 0


def test_kummer_picks_the_less_cancelling_series():
    # the Kummer-transformed series loses ~6 digits here, the direct one ~2
    a, c, z = -1.5, 1.0, -1 + 14j
    want = complex(mpmath.hyp1f1(a, c, z))
    assert rel_err(kummer_1f1(a, c, z), want) < 1e-13
    # and the transform still wins far out on the negative axis
    z = -25 + 2j
    assert rel_err(kummer_1f1(0.3, 1.2, z), complex(mpmath.hyp1f1(0.3, 1.2, z))) < 1e-13


def test_kummer_derivative_snaps_like_the_function():
    assert kummer_derivative(1e-10j, 0.375, 7.0) == 0
    assert kummer_derivative(-2 + 1e-11, 1.5, 2.0, order=3) == 0


@pytest.mark.parametrize("x", [-2.5, -1.5, -0.5, -3.0 + 1e-7, -7.25, 0.2])
def test_log_gamma_continuous_up_vertical_lines(x):
    # crosses the switch to the large-|Im z| form of log sin(pi z)
    ys = np.linspace(18.0, 22.0, 4001)
    vals = np.array([log_gamma(complex(x, y)) for y in ys])
    assert np.max(np.abs(np.diff(vals))) < 0.01
