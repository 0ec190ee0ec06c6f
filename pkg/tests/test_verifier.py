import math
import random

import numpy as np
import pytest

from conftest import valid_roots
from fracbessel import specfun
from fracbessel.errors import DivergenceError, DomainError, QuadratureError, UnsupportedOrderError
from fracbessel.series import build_logarithmic, build_simple, choose_truncation, evaluate
from fracbessel.verifier import (
    caputo_power,
    caputo_power_log,
    caputo_quadrature,
    power_log_derivative,
    residual,
    rl_boundary_terms,
    series_derivatives,
)


def power_log(gamma, q):
    return lambda k, t: power_log_derivative(gamma, q, k, t)


# --- spec examples -----------------------------------------------------------

def test_caputo_power_examples():
    assert caputo_power(1.0, 2.0, 3.0) == pytest.approx(6.0, rel=1e-15)
    assert caputo_power(0.5, 1.0, 1.0) == pytest.approx(2 / math.sqrt(math.pi), rel=1e-14)
    # the spec lists (2.7, 2.5) as divergent, but 2.5 > ceil(2.7) - 1 = 2: it exists
    assert caputo_power(2.7, 2.5, 1.0) == pytest.approx(math.gamma(3.5) / math.gamma(0.8), rel=1e-13)
    with pytest.raises(DivergenceError):
        caputo_power(2.7, 1.5, 1.0)
    # polynomial exponents below ceil(alpha) are annihilated
    assert caputo_power(2.7, 1.0, 2.0) == 0.0
    assert caputo_power(2.7, 0.0, 2.0) == 0.0
    # integer order is the ordinary derivative for any exponent
    assert caputo_power(2.0, -0.5, 4.0) == pytest.approx(0.75 * 4.0 ** -2.5, rel=1e-14)


def test_caputo_power_vectorized_and_domain():
    xs = np.array([0.5, 1.0, 2.0])
    assert np.allclose(caputo_power(1.0, 3.0, xs), 3 * xs ** 2, rtol=1e-15, atol=0)
    with pytest.raises(DomainError):
        caputo_power(0.5, 1.0, 0.0)
    with pytest.raises(UnsupportedOrderError):
        caputo_power_log(0.5, 1.0, 9, 1.0)


def test_caputo_power_log_q1_formula():
    a, g, x = 0.7, 1.8, 2.3
    r = specfun.gamma_ratio(g, a)
    h = specfun.digamma(1 + g) - specfun.digamma(1 + g - a)
    want = x ** (g - a) * r * (math.log(x) + h)
    assert caputo_power_log(a, g, 1, x) == pytest.approx(want, rel=1e-13)
    assert caputo_power_log(a, g, 0, x) == caputo_power(a, g, x)


def test_caputo_power_log_against_quadrature():
    got = caputo_power_log(0.5, 2.0, 2, 1.3)
    assert got == pytest.approx(caputo_quadrature(0.5, power_log(2.0, 2), 1.3), rel=1e-9)


def test_quadrature_examples():
    assert caputo_quadrature(1.0, power_log(2.0, 0), 3.0) == 6.0  # integer: no quadrature
    got = caputo_quadrature(2.7, power_log(3.0, 0), 2.0)
    assert got == pytest.approx(caputo_power(2.7, 3.0, 2.0), rel=1e-10)
    with pytest.raises(DomainError):
        caputo_quadrature(0.5, power_log(1.0, 0), -1.0)


def test_quadrature_error_reported():
    # a non-integrable singularity at t = 0 defeats the integrator
    with pytest.raises(QuadratureError) as e:
        caputo_quadrature(0.5, lambda k, t: t ** -1.5, 1.0)
    assert e.value.error > 0 or not math.isfinite(e.value.estimate)


def test_power_log_derivative():
    # d/dt t^2 ln t = 2 t ln t + t ; d^2 = 2 ln t + 3
    t = 1.7
    assert power_log_derivative(2.0, 1, 1, t) == pytest.approx(2 * t * math.log(t) + t, rel=1e-15)
    assert power_log_derivative(2.0, 1, 2, t) == pytest.approx(2 * math.log(t) + 3, rel=1e-15)


# --- oracle agreement ----------------------------------------------------------

def test_analytic_matches_quadrature_random():
    rng = random.Random(17)
    for _ in range(50):
        a = rng.uniform(0.1, 5.9)
        if abs(a - round(a)) < 0.05:
            continue
        n = math.ceil(a)
        g = rng.uniform(n - 1 + 0.05, n + 6)
        x = rng.uniform(0.1, 5)
        exact = caputo_power(a, g, x)
        assert caputo_quadrature(a, power_log(g, 0), x) == pytest.approx(exact, rel=1e-6, abs=1e-12)


def test_analytic_matches_quadrature_logs():
    rng = random.Random(23)
    for _ in range(30):
        a = rng.uniform(0.1, 4.9)
        if abs(a - round(a)) < 0.05:
            continue
        n = math.ceil(a)
        g, q, x = rng.uniform(n - 1 + 0.1, n + 4), rng.randint(1, 2), rng.uniform(0.2, 4)
        exact = caputo_power_log(a, g, q, x)
        assert caputo_quadrature(a, power_log(g, q), x) == pytest.approx(exact, rel=1e-5, abs=1e-10)


def test_rl_boundary_terms():
    for a, g in [(0.5, 0.7), (2.7, 2.5), (4.9, 4.09)]:
        assert rl_boundary_terms(a, g, 0, 1.3) == 0.0
        assert rl_boundary_terms(a, g, 2, 1.3) == 0.0
    # x^0 = 1 : RL derivative of a constant is x^{-alpha}/Gamma(1-alpha)
    want = 2.0 ** -0.5 / math.gamma(0.5)
    assert rl_boundary_terms(0.5, 0.0, 0, 2.0) == pytest.approx(want, rel=1e-14)
    assert rl_boundary_terms(2.0, -3.0, 0, 1.0) == 0.0  # integer order
    with pytest.raises(DivergenceError):
        rl_boundary_terms(1.5, 0.5, 0, 1.0)


# --- residuals -------------------------------------------------------------------

def test_residual_example_2_1(golden):
    spec = golden["example_2_1"]
    sol = build_simple(spec, 3.0, 10)
    rep = residual(spec, sol, [0.5, 1.0, 2.0])
    assert rep.max_excess <= 1e-10
    # the raw residual is the dangling tail c_10 x^14
    for s in rep.samples:
        assert s.residual == pytest.approx(sol.coeffs[-1, 0] * s.x ** 14, rel=1e-6)


def test_residual_zero_solution(golden):
    spec = golden["example_7_3"]
    (root,) = valid_roots(spec)
    sol = build_simple(spec, root, 8, c0=0.0)
    rep = residual(spec, sol, [0.3, 1.0, 3.0])
    assert all(s.residual == 0.0 and s.u == 0.0 for s in rep.samples)
    assert rep.max_excess == 0.0


def test_residual_logarithmic_branch(golden):
    spec = golden["example_7_8"]
    (root,) = valid_roots(spec)
    N = choose_truncation(spec, root, 5.0, 1e-12)
    b1, b2 = build_logarithmic(spec, root, N)
    xs = np.linspace(0.01, 5, 60)
    assert residual(spec, b1, xs).max_excess <= 1e-8
    assert residual(spec, b2, xs).max_excess <= 1e-8


def test_residual_shrinks_with_N(golden):
    spec = golden["example_7_1"]
    root = valid_roots(spec)[-1]
    xs = [1.0, 2.0, 3.0]
    raw = []
    for N in (5, 10):
        rep = residual(spec, build_simple(spec, root, N), xs)
        raw.append(max(abs(s.residual) for s in rep.samples))
        assert rep.max_excess <= 1e-8
    assert raw[1] < raw[0]


def test_residual_against_quadrature(golden):
    """Residual through the defining integral agrees with the analytic one."""
    spec = golden["example_7_3"]
    (root,) = valid_roots(spec)
    sol = build_simple(spec, root, 6)
    f = series_derivatives(sol)
    rep = residual(spec, sol, [0.7, 1.5])
    for s in rep.samples:
        x = s.x
        total = (x ** spec.beta - spec.nu2) * evaluate(sol, x)
        for t in spec.terms:
            total += t.d * x ** t.alpha * caputo_quadrature(t.alpha, f, x)
        assert total == pytest.approx(s.residual, rel=1e-6, abs=1e-8 * max(1.0, abs(s.u)))


def test_residual_csv(golden):
    spec = golden["example_2_1"]
    rep = residual(spec, build_simple(spec, 3.0, 6), [0.5, 1.5])
    lines = rep.to_csv().splitlines()
    assert lines[0] == "x,residual,predicted_tail,excess"
    assert len(lines) == 3
    assert float(lines[1].split(",")[0]) == 0.5


def test_residual_domain(golden):
    spec = golden["example_2_1"]
    with pytest.raises(DomainError):
        residual(spec, build_simple(spec, 3.0, 4), [0.0, 1.0])
