import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from morse_smatrix.errors import AnnihilatedState, IndexOutOfChain, SingularEpsilon
from morse_smatrix.ladder import (
    ANNIHILATION_TOL,
    ChainSpec,
    Direction,
    ExpPolySum,
    LadderOperator,
    Series,
    Sign,
    apply,
    apply_jet,
    chain_bounds,
    chain_member,
    chain_step,
    default_samples,
    eigenvalue_residual,
    factorization_residual,
    fd_jet,
    intertwining_residual,
    make_operator,
    random_test_function,
    round_trip,
    step_image_residual,
)
from morse_smatrix.states import Family, WaveFunctionSpec, evaluate

finite = dict(allow_nan=False, allow_infinity=False, allow_subnormal=False)
REGIMES = [2.3, 2.0, 2.5]
GAUSS = ExpPolySum(((1.0, (0.0, 0.0, -1.0)),))
EXP = ExpPolySum(((1.0, (0.0, 1.0)),))
ONE = ExpPolySum(((1.0, (0.0,)),))


# operators ------------------------------------------------------------------


def test_operator_coefficients():
    m = make_operator(2, 1, Sign.MINUS)
    assert m.beta == 1 and m.gamma == pytest.approx(-5 / 3) and m.d_const == pytest.approx(-25 / 9)
    p = make_operator(2, 1, Sign.PLUS)
    assert p.beta == 2 and p.gamma == pytest.approx(-5 / 3)


def test_singular_epsilon():
    with pytest.raises(SingularEpsilon):
        make_operator(2.3, -0.5, Sign.PLUS)


def test_regularized_operator_is_constant_at_half():
    op = LadderOperator.regularized(2.3, -0.5, Sign.MINUS)
    jet = np.array([1.7 + 0.2j, -3.1, 0.4])
    out = apply_jet(op, jet, 0.8)
    assert out[0] == pytest.approx(-(1 + 2 * 2.3) * jet[0])


def test_regularized_matches_scaled_operator_elsewhere():
    eps = 0.8
    op = make_operator(2.3, eps, Sign.PLUS)
    reg = LadderOperator.regularized(2.3, eps, Sign.PLUS)
    jet = GAUSS.jet(0.3, 1)
    assert apply_jet(reg, jet, 0.3)[0] == pytest.approx((1 + 2 * eps) * apply_jet(op, jet, 0.3)[0])


def test_apply_to_zero_and_linearity():
    op = make_operator(2.3, 0.7, Sign.PLUS)
    assert apply(op, lambda x: 0.0, 0.4) == 0
    f = random_test_function(np.random.default_rng(3))
    g = ExpPolySum(tuple((2.5 * c, p) for c, p in f.terms))
    assert apply(op, g, 0.4) == pytest.approx(2.5 * apply(op, f, 0.4))


def test_ground_state_annihilated_pointwise():
    s = WaveFunctionSpec(Family.BOUND, 2.3, 0)
    op = make_operator(2.3, 2.3, Sign.MINUS)
    for x in np.linspace(-2, 5, 15):
        assert abs(apply(op, s, x)) <= 1e-9 * abs(evaluate(s, x)) * (1 + math.exp(x))


def test_apply_analytic_vs_finite_difference():
    s = WaveFunctionSpec(Family.PSI1, 2.3, energy=0.81)
    op = make_operator(2.3, s.epsilon.real - 1, Sign.PLUS)
    for x in (-1.0, 0.5, 3.0):
        a = apply(op, s, x)
        fd = apply(op, lambda t: evaluate(s, t), x)
        assert abs(a - fd) <= 1e-7 * abs(a)


def test_fd_jet_matches_analytic():
    for x in (-0.5, 0.2, 1.1):
        err = np.abs(fd_jet(GAUSS, x, 3, h=1e-3) - GAUSS.jet(x, 3))
        # truncation error is O(h^2) per order, larger for the third derivative
        assert np.all(err <= [1e-12, 1e-6, 1e-6, 1e-4])


# identities -----------------------------------------------------------------


XS = np.linspace(-2, 2, 21)


def test_factorization_examples():
    assert factorization_residual(2.3, 0.9, GAUSS, XS) <= 1e-8
    assert factorization_residual(1.7, 0.4, ONE, XS) <= 1e-12
    rng = np.random.default_rng(11)
    for _ in range(5):
        assert factorization_residual(rng.uniform(0.2, 5), rng.uniform(0.6, 3), EXP, XS) <= 1e-8


def test_constant_function_expansion():
    # (A+ A- + D) 1 = eps^2 e^{2x} - (2A+1) e^x, the value of h_eps on 1
    A, eps, x = 2.3, 0.9, 0.4
    plus, minus = make_operator(A, eps, Sign.PLUS), make_operator(A, eps, Sign.MINUS)
    jet = ONE.jet(x, 2)
    lhs = apply_jet(plus, apply_jet(minus, jet, x), x)[0] + plus.d_const
    assert lhs == pytest.approx(eps**2 * math.exp(2 * x) - (2 * A + 1) * math.exp(x))


def test_intertwining_examples():
    assert intertwining_residual(2, 1.3, GAUSS, XS) <= 1e-7
    assert intertwining_residual(2.3, 1.3, WaveFunctionSpec(Family.BOUND, 2.3, 1), XS) <= 1e-7
    assert intertwining_residual(2.3, 1.3, lambda x: 0.0, XS) == 0.0


def test_identities_on_random_functions():
    rng = np.random.default_rng(2024)
    worst_f = worst_i = 0.0
    for _ in range(20):
        f = random_test_function(rng)
        A = rng.uniform(0.2, 6)
        eps = rng.uniform(0.6, 4)
        worst_f = max(worst_f, factorization_residual(A, eps, f, XS))
        worst_i = max(worst_i, intertwining_residual(A, eps, f, XS))
    assert worst_f <= 1e-7 and worst_i <= 1e-7


@given(
    st.floats(0.1, 8, **finite),
    st.floats(-0.45, 5, **finite).filter(lambda e: abs(e - 0.5) > 1e-3),
    st.lists(st.floats(-1, 1, **finite), min_size=3, max_size=4),
    st.floats(-0.8, -0.05, **finite),
)
def test_factorization_property(A, eps, poly, quad):
    f = ExpPolySum(((1.0, tuple(poly[:2]) + (quad,) + tuple(poly[2:3])),))
    assert factorization_residual(A, eps, f, XS) <= 1e-7
    assert intertwining_residual(A, eps, f, XS) <= 1e-7


@pytest.mark.parametrize("A", REGIMES)
def test_eigenvalue_of_factorized_hamiltonian(A):
    for fam, n in [(Family.BOUND, 0), (Family.BOUND, 1), (Family.REDUNDANT_EVEN_CHAIN, 1), (Family.REDUNDANT_ODD_CHAIN, 0)]:
        s = WaveFunctionSpec(fam, A, n)
        assert eigenvalue_residual(s, default_samples()) <= 1e-7


# chains ---------------------------------------------------------------------


def test_chain_bounds():
    assert chain_bounds(ChainSpec(Series.BOUND_ANTIBOUND, 2.3)) == (0, None)
    assert chain_bounds(ChainSpec(Series.BOUND_ANTIBOUND, 2)) == (0, 4)
    assert chain_bounds(ChainSpec(Series.BOUND_ANTIBOUND, 2.5)) == (0, 5)
    assert chain_bounds(ChainSpec(Series.REDUNDANT_EVEN, 2.5)) == (-3, 2)
    assert chain_bounds(ChainSpec(Series.REDUNDANT_ODD, 2)) == (-3, 1)
    assert chain_bounds(ChainSpec(Series.REDUNDANT_EVEN, 2)) == (None, None)


def test_chain_members():
    c = ChainSpec(Series.BOUND_ANTIBOUND, 2)
    fams = [chain_member(c, n).family for n in range(5)]
    assert fams == [Family.BOUND, Family.BOUND, Family.SEMI_BOUND, Family.TILDE_BOUND, Family.TILDE_BOUND]
    assert chain_member(ChainSpec(Series.BOUND_ANTIBOUND, 2.3), 3).family is Family.ANTIBOUND
    assert chain_member(ChainSpec(Series.REDUNDANT_EVEN, 2.3), -1).family is Family.TILDE_REDUNDANT_EVEN
    with pytest.raises(IndexOutOfChain):
        chain_member(c, 5)


def test_chain_step_examples():
    c, d = chain_step(ChainSpec(Series.BOUND_ANTIBOUND, 2.3), 0, Direction.UP)
    assert d <= 1e-8 and c != 0
    with pytest.raises(AnnihilatedState):
        chain_step(ChainSpec(Series.BOUND_ANTIBOUND, 2), 4, Direction.UP)
    c, d = chain_step(ChainSpec(Series.REDUNDANT_EVEN, 2.3), 0, Direction.DOWN)
    assert d <= 1e-8


def test_chain_step_rejects_index_outside():
    with pytest.raises(IndexOutOfChain):
        chain_step(ChainSpec(Series.BOUND_ANTIBOUND, 2.3), -1, Direction.UP)


def _walk(chain, lo=-5, hi=5):
    defects, annihilated = [], set()
    for i in range(lo, hi + 1):
        for d in Direction:
            try:
                defects.append(chain_step(chain, i, d)[1])
            except AnnihilatedState:
                annihilated.add((i, d))
            except IndexOutOfChain:
                pass
    return defects, annihilated


@pytest.mark.parametrize("A", REGIMES)
@pytest.mark.parametrize("series", list(Series))
def test_ladder_closure(A, series):
    chain = ChainSpec(series, A)
    defects, annihilated = _walk(chain)
    assert defects and max(defects) <= 1e-7
    lo, hi = chain_bounds(chain)
    expected = set()
    if lo is not None:
        expected.add((lo, Direction.DOWN))
    if hi is not None and hi <= 5:
        expected.add((hi, Direction.UP))
    assert annihilated == expected
    for i in range(-5, 6):
        for d in Direction:
            try:
                assert round_trip(chain, i, d)[1] <= 1e-7
            except (AnnihilatedState, IndexOutOfChain):
                pass


@pytest.mark.parametrize("A", [2.3, 1.37, 3.81])
def test_redundant_chains_have_no_ends(A):
    for series in (Series.REDUNDANT_EVEN, Series.REDUNDANT_ODD):
        _, annihilated = _walk(ChainSpec(series, A))
        assert not annihilated


@pytest.mark.parametrize("A", REGIMES)
def test_ground_and_top_annihilation(A):
    ba = ChainSpec(Series.BOUND_ANTIBOUND, A)
    assert step_image_residual(ba, 0, Direction.DOWN) <= ANNIHILATION_TOL
    if A == 2.0:
        assert step_image_residual(ba, 4, Direction.UP) <= ANNIHILATION_TOL
    # a generic step is far from annihilation
    assert step_image_residual(ba, 0, Direction.UP) > 1e-3


def test_half_integer_upper_end():
    ba = ChainSpec(Series.BOUND_ANTIBOUND, 2.5)
    assert step_image_residual(ba, 5, Direction.UP) <= ANNIHILATION_TOL


def test_step_through_singular_epsilon():
    # eps = -1/2 sits between m = -1 and m = 0 of the even chain
    c, d = chain_step(ChainSpec(Series.REDUNDANT_EVEN, 2.3), -1, Direction.UP)
    assert d <= 1e-12
    assert c == pytest.approx(-(1 + 2 * 2.3))
