"""
Self-check suites run by the ``verify-all`` and ``ladder-verify`` commands.

Each check reduces an identity to one worst-case residual and compares it
with a fixed tolerance.  Sampling is seeded, so reports are reproducible.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from . import ladder, scattering, states
from .errors import AnnihilatedState, IndexOutOfChain
from .scattering import PoleClass, Regime, _params

__all__ = ["Check", "scattering_checks", "state_checks", "ladder_checks", "all_checks"]

_SEED = 20240611


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self):
        return bool(self.residual <= self.tolerance)

    def as_dict(self):
        d = asdict(self)
        d["pass"] = self.passed
        return d


def _max(values):
    values = list(values)
    return max(values) if values else 0.0


def scattering_checks(params, window=3.0):
    p = _params(params)
    rng = np.random.default_rng(_SEED)
    ks = rng.uniform(1e-3, 20.0, 200)
    out = [
        Check("unitarity |S(k)| = 1", _max(abs(abs(scattering.s_matrix(p, k)) - 1) for k in ks), 1e-10),
        Check(
            "symmetry S(k) S(-k) = 1",
            _max(abs(scattering.s_matrix(p, k) * scattering.s_matrix(p, -k) - 1) for k in ks),
            1e-10,
        ),
    ]
    poles = scattering.enumerate_poles(p, -window, window)
    simple = [r for r in poles if r.net_order == 1]
    res_err = []
    wind_err = []
    for r in simple:
        a = scattering.residue(p, r)
        c = scattering.contour_residue(p, r.k0)
        res_err.append(abs(a - c) / abs(a))
        wind_err.append(abs(scattering.winding_number(p, r.k0) - 1))
    out.append(Check("residue vs contour quadrature", _max(res_err), 1e-8))
    out.append(Check("pole winding number = 1", _max(wind_err), 1e-6))

    # every pole sits on its predicted axis position
    pos_err = []
    for r in poles:
        if r.pole_class in (PoleClass.BOUND, PoleClass.ANTIBOUND):
            pos_err.append(abs(r.im_k - (p.A - r.series_index)))
        elif r.pole_class is PoleClass.REDUNDANT_EVEN:
            pos_err.append(abs(r.im_k - (0.5 + r.series_index)))
        elif r.pole_class is PoleClass.REDUNDANT_ODD:
            pos_err.append(abs(r.im_k - (1.0 + r.series_index)))
    out.append(Check("pole positions", _max(pos_err), 1e-12))

    # numerator sites that enumerate_poles dropped must not be poles
    kept = {round(r.im_k, 9) for r in poles if r.net_order >= 1}
    cand = set(scattering._num1_sites(p.A, -window, window)) | set(scattering._num2_sites(-window, window))
    dropped = [t for t in cand if round(t, 9) not in kept and abs(t) <= window]
    wind = [scattering.winding_number(p, 1j * t) for t in dropped]
    out.append(
        Check(
            f"cancelled sites carry no pole ({len(dropped)} sites)",
            _max(max(w, 0.0) for w in wind),
            1e-6,
        )
    )

    grid = scattering.s_matrix_grid(p, (-1.0, 1.0), (-window, window), 0.05)
    off_axis = np.abs(grid.k_re) > 1e-9
    capped = grid.values[:, off_axis] >= grid.cap
    out.append(Check("no capped |S| off the imaginary axis", float(capped.sum()), 0.0))

    ks = scattering.make_axis(1e-3, 5.0, 1e-3)
    delta, dd = scattering.phase_shift_curve(p, ks)
    out.append(Check("phase shift continuity (max jump)", float(np.max(np.abs(np.diff(delta)))), math.pi / 2))
    out.append(Check("phase derivative bounded", float(np.max(np.abs(dd))), 1e3))
    return out


def state_checks(params, window=3.0):
    p = _params(params)
    xs = np.linspace(-2.0, 8.0, 41)
    specs = [states.spec_for_pole(p, r) for r in scattering.enumerate_poles(p, -window, window)]
    if not any(s.family is states.Family.SEMI_BOUND for s in specs):
        specs.append(states.WaveFunctionSpec(states.Family.SEMI_BOUND, p))
    specs.append(states.WaveFunctionSpec(states.Family.PSI1, p, energy=0.49))
    specs.append(states.WaveFunctionSpec(states.Family.PSI2, p, energy=0.49))
    out = [
        Check(f"eigenfunction residual {s.label()}", states.ode_residual(s, xs), 1e-6)
        for s in specs
    ]
    want = [-((p.A - n) ** 2) for n in range(int(math.floor(p.A)) + 1) if p.A - n > 1e-9]
    got = states.bound_energies(p)
    err = math.inf if len(got) != len(want) else _max(abs(a - b) for a, b in zip(got, want))
    out.append(Check("bound energies -(A-n)^2", err, 1e-12))
    return out


def ladder_checks(params, index_range=(-5, 5)):
    p = _params(params)
    rng = np.random.default_rng(_SEED)
    xs = np.linspace(-2.0, 2.0, 21)
    fact, inter = [], []
    for _ in range(20):
        f = ladder.random_test_function(rng)
        eps = float(rng.uniform(0.6, 3.0))
        fact.append(ladder.factorization_residual(p, eps, f, xs))
        inter.append(ladder.intertwining_residual(p, eps, f, xs))
    out = [
        Check("factorization on random test functions", _max(fact), 1e-7),
        Check("intertwining on random test functions", _max(inter), 1e-7),
    ]
    lo, hi = index_range
    for series in ladder.Series:
        chain = ladder.ChainSpec(series, p)
        defects, trips, annihilated = [], [], []
        for i in range(lo, hi + 1):
            for d in ladder.Direction:
                try:
                    defects.append(ladder.chain_step(chain, i, d)[1])
                except AnnihilatedState:
                    annihilated.append((i, d))
                except IndexOutOfChain:
                    continue
                try:
                    trips.append(ladder.round_trip(chain, i, d)[1])
                except (AnnihilatedState, IndexOutOfChain):
                    pass
        out.append(Check(f"{series.value} chain step constancy", _max(defects), 1e-7))
        out.append(Check(f"{series.value} round trip constancy", _max(trips), 1e-7))
        c_lo, c_hi = ladder.chain_bounds(chain)
        expected = set()
        if c_lo is not None:
            expected.add((c_lo, ladder.Direction.DOWN))
        if c_hi is not None:
            expected.add((c_hi, ladder.Direction.UP))
        expected = {e for e in expected if lo <= e[0] <= hi}
        out.append(
            Check(
                f"{series.value} annihilation only at chain ends",
                float(len(set(annihilated) ^ expected)),
                0.0,
            )
        )
    ba = ladder.ChainSpec(ladder.Series.BOUND_ANTIBOUND, p)
    out.append(
        Check("ground state annihilated", ladder.step_image_residual(ba, 0, ladder.Direction.DOWN), ladder.ANNIHILATION_TOL)
    )
    if p.regime is Regime.INTEGER:
        out.append(
            Check(
                "top of integer chain annihilated",
                ladder.step_image_residual(ba, 2 * p.N, ladder.Direction.UP),
                ladder.ANNIHILATION_TOL,
            )
        )
    eig = []
    for r in scattering.enumerate_poles(p, 0.1, 3.0):
        s = states.spec_for_pole(p, r)
        if abs(1 + 2 * s.epsilon.real) > 1e-9 and abs(1 + 2 * (s.epsilon.real - 1)) > 1e-9:
            eig.append(ladder.eigenvalue_residual(s, ladder.default_samples()))
    out.append(Check("factorized Hamiltonian eigenvalue -1", _max(eig), 1e-7))
    return out


def all_checks(params):
    p = _params(params)
    return scattering_checks(p) + state_checks(p) + ladder_checks(p)
