import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from catkit.meanfield.analysis import classify_critical_point
from catkit.meanfield.critical import (find_critical_points, global_minimum, symmetric_branch, tune_degenerate,
                                       tune_strong_coupling)
from catkit.meanfield.models import (CallbackModel, Chi, MeanFieldParams, PairingModel, PerturbedModel,
                                     StrongCouplingModel, StrongCouplingParams, make_model)
from catkit.meanfield.taylor import taylor_at, taylor_coefficients

from oracles import brute_argmin, mp_pairing_objective, mp_strong_objective, mp_taylor2

finite = dict(allow_nan=False, allow_infinity=False)
params_st = st.builds(
    MeanFieldParams,
    beta=st.floats(0.3, 3, **finite), h=st.floats(-1, 1, **finite), mu=st.floats(-2, 3, **finite),
    lam=st.floats(-1, 8, **finite), gam=st.floats(0, 4, **finite), delt=st.floats(-2, 4, **finite),
)
point_st = st.tuples(st.floats(-1, 1, **finite), st.floats(-0.5, 2.5, **finite))


@pytest.fixture(scope="module")
def tuned():
    return tune_degenerate(beta=1.0, h=0.0, mu=2.0, lam=6.0)


def test_pressure_origin_example():
    m = PairingModel(MeanFieldParams(beta=1, h=0, lam=0, mu=0, delt=0, gam=2.5))
    assert m.pressure(np.zeros(2)) == pytest.approx(0.0, abs=1e-15)
    assert m.objective(np.zeros(2)) == pytest.approx(0.0, abs=1e-15)


def test_large_lambda_limit():
    p = MeanFieldParams(beta=1, h=0, mu=40, lam=50, gam=1.3, delt=0.7)
    m = PairingModel(p)
    for c2 in (-0.5, 0.0, 1.0):
        c = np.array([0.3, c2])
        assert abs(m.pressure(c) - (p.mu + 2 * p.delt * c2 - math.log(2))) < 1e-15
    tr = taylor_at(m, np.zeros(2), order=4)
    assert tr.raw[(2, 0)] == pytest.approx(p.gam, abs=1e-10)
    assert tr.raw[(0, 2)] == pytest.approx(p.delt, abs=1e-10)
    assert max(abs(c) for e, c in tr.raw if sum(e) > 2) < 1e-10


def test_no_coupling_objective_is_constant():
    m = PairingModel(MeanFieldParams(beta=1.3, h=0.2, mu=0.5, lam=1.0, gam=0, delt=0))
    vals = [m.objective(np.array(c)) for c in [(0, 0), (0.7, -0.3), (-1, 2)]]
    assert max(vals) - min(vals) < 1e-14


@given(params_st, point_st)
def test_objective_matches_mpmath_oracle(p, c):
    m = PairingModel(p)
    ref = float(mp_pairing_objective(mp.mpf(c[0]), mp.mpf(c[1]), p.beta, p.h, p.mu, p.lam, p.gam, p.delt))
    assert m.objective(np.array(c)) == pytest.approx(ref, rel=1e-12, abs=1e-12)


@given(params_st, point_st)
def test_evenness_in_c1(p, c):
    m = PairingModel(p)
    a, b = np.array(c), np.array([-c[0], c[1]])
    assert m.objective(a) == m.objective(b)
    assert m.gradient(np.array([0.0, c[1]]))[0] == 0.0


def test_chi_series_branch_is_continuous():
    chi = Chi(1.0, 0.0, 0.5)
    below = chi.derivs(np.array([(0.999e-2) ** 2]))
    above = chi.derivs(np.array([(1.001e-2) ** 2]))
    for lo, hi in zip(below, above):
        assert abs(lo - hi) < 1e-6


def test_extreme_beta_is_overflow_safe():
    m = PairingModel(MeanFieldParams(beta=500, mu=2, lam=1, gam=3, delt=1))
    assert np.isfinite(m.objective(np.array([0.9, 2.0])))
    assert np.all(np.isfinite(m.gradient(np.array([0.9, 2.0]))))


def test_beta_on_shift_flag():
    p = MeanFieldParams(beta=2.0, mu=1.0, lam=0.5, gam=1, delt=0.5)
    a = PairingModel(p).pressure(np.array([0.2, 0.3]))
    b = PairingModel(p.with_(beta_on_shift=True)).pressure(np.array([0.2, 0.3]))
    assert b - a == pytest.approx((p.beta - 1) * (p.mu + 2 * p.delt * 0.3), rel=1e-12)


def test_strong_coupling_matches_oracle():
    m = StrongCouplingModel(StrongCouplingParams(u1=3.0, u2=0.4))
    for c in (-0.7, 0.0, 0.25):
        assert m.objective(np.array([c])) == pytest.approx(float(mp_strong_objective(mp.mpf(c), 3.0, 0.4)), rel=1e-13)


def test_strong_coupling_small_u1_unique_minimiser_at_zero():
    # the c^2 coefficient at 0 is u1 - u1^2 chi'(u2^2), positive for small u1
    m = StrongCouplingModel(StrongCouplingParams(u1=2.0, u2=1.0))
    box = [(-2.0, 2.0)]
    c, _, _ = brute_argmin(m.objective, box, 4001)
    assert abs(c[0]) < 1e-3
    assert abs(global_minimum(m, box).c[0]) < 1e-6
    pts = find_critical_points(m, box)
    assert len(pts) == 1 and abs(pts[0].c[0]) < 1e-9 and pts[0].kind == "minimum"


def test_strong_coupling_large_u1_pairs():
    m = StrongCouplingModel(StrongCouplingParams(u1=20.0, u2=1.0))
    box = [(-2.0, 2.0)]
    c, (dc,), _ = brute_argmin(m.objective, box, 4001)
    got = global_minimum(m, box).c[0]
    assert abs(abs(got) - abs(c[0])) <= dc and abs(got) > 0.1


@given(params_st)
def test_a_critical_point_on_the_symmetric_axis_is_found(p):
    pts = find_critical_points(PairingModel(p), seeds=9)
    assert any(abs(pt.c[0]) < 1e-9 for pt in pts)
    for pt in pts:
        assert pt.grad_norm < 1e-8
        assert pt.degenerate == (min(abs(e) for e in pt.hess_eigs) < 1e-6)


def test_tuned_point_is_doubly_degenerate(tuned):
    m = PairingModel(tuned.params)
    c = np.array(tuned.point)
    assert np.linalg.norm(m.gradient(c)) < 1e-10
    assert np.max(np.abs(np.linalg.eigvalsh(m.hessian(c)))) < 1e-8
    # independent check: Hessian entries by high-precision differentiation of the oracle
    p = tuned.params
    f = lambda a, b: mp_pairing_objective(a, b, p.beta, p.h, p.mu, p.lam, p.gam, p.delt)  # noqa: E731
    ref = mp_taylor2(f, c, 2)
    assert abs(ref[(2, 0)]) < 1e-8 and abs(ref[(0, 2)]) < 1e-8 and abs(ref[(1, 1)]) < 1e-8


@pytest.mark.parametrize("method", ["cauchy", "fd"])
def test_taylor_coefficients_match_mpmath(tuned, method):
    m = PairingModel(tuned.params)
    c = np.array(tuned.point)
    p = tuned.params
    f = lambda a, b: mp_pairing_objective(a, b, p.beta, p.h, p.mu, p.lam, p.gam, p.delt)  # noqa: E731
    ref = mp_taylor2(f, c, 4)
    got = taylor_coefficients(m, c, 4, method=method)
    tol = 1e-9 if method == "cauchy" else 1e-4
    for e, v in ref.items():
        if sum(e) >= 2:
            assert abs(got[e] - v) <= tol * max(1.0, abs(v)), e


def test_odd_c1_coefficients_vanish(tuned):
    tr = taylor_at(PairingModel(tuned.params), np.array(tuned.point), 4)
    assert tr.exact_residual <= 1e-12


def test_callback_model_uses_finite_differences():
    m = CallbackModel(lambda c: c[0] ** 4 + 2 * c[1] ** 2, 2, even=(0, 1))
    tr = taylor_at(m, np.zeros(2), 4)
    assert tr.method == "fd"
    assert tr.jet[(4, 0)] == pytest.approx(1.0, abs=1e-6) and tr.jet[(0, 2)] == pytest.approx(2.0, abs=1e-6)


def test_strong_coupling_tuning_and_classification():
    tp = tune_strong_coupling()
    m = StrongCouplingModel(tp.params)
    # 1D Taylor oracle: the c^2 and c^4 coefficients vanish, the c^6 one does not
    u1, u2 = tp.params.u1, tp.params.u2
    with mp.workdps(40):
        coeffs = mp.taylor(lambda c: mp_strong_objective(c, u1, u2), 0, 6)
    assert abs(coeffs[2]) < 1e-10 and abs(coeffs[4]) < 1e-8 and abs(coeffs[6]) > 1
    cc = classify_critical_point(m, np.zeros(1))
    assert cc.result.family == "even_power" and cc.result.k == 3
    assert cc.transversal is True


def test_nondegenerate_minimum_is_morse():
    m = PairingModel(MeanFieldParams(beta=1, mu=2, lam=6, gam=1, delt=0.5))
    pt = [p for p in find_critical_points(m) if p.kind == "minimum"][0]
    cc = classify_critical_point(m, np.array(pt.c), transversality=False)
    assert cc.result.family == "morse" and cc.result.cod_z2 == 0


def test_perturbed_model_derivatives():
    base = PairingModel(MeanFieldParams(beta=1, mu=2, lam=6, gam=1, delt=0.5))
    m = PerturbedModel(base, 1e-3, (4, 2))
    c = np.array([0.4, 0.9])
    assert m.objective(c) - base.objective(c) == pytest.approx(1e-3 * 0.4 ** 4 * 0.9 ** 2, rel=1e-10)
    h = 1e-6
    fd = [(m.objective(c + h * e) - m.objective(c - h * e)) / (2 * h) for e in np.eye(2)]
    assert np.allclose(m.gradient(c), fd, rtol=1e-6, atol=1e-8)


def test_make_model_rejects_unknown():
    with pytest.raises(ValueError):
        make_model("ising", {})
    with pytest.raises(TypeError):
        make_model("pairing", {"u1": 1.0})


def test_symmetric_branch_has_zero_pair_amplitude():
    m = PairingModel(MeanFieldParams(beta=1, mu=2, lam=6, gam=1, delt=0.5))
    nb = symmetric_branch(m)
    assert nb.c[0] == 0.0 and nb.success


def test_tuning_rejects_pole_crossings():
    with pytest.raises(ValueError):
        tune_degenerate(lam=3.0)
    tp = tune_degenerate(lam=6.0)
    assert all(abs(r) < 20 for r in tp.roots)
