"""Independent checks of series solutions.

Two routes to the Caputo derivative are provided: the analytic formula for
power/log-power terms,

    D^alpha (x^g (ln x)^q) = x^{g-alpha} sum_l C(q,l) (ln x)^{q-l} d^l/dg^l [Gamma(1+g)/Gamma(1+g-alpha)],

and direct quadrature of the defining integral. ``residual`` substitutes a
truncated series into the equation term by term and compares the result with
the exact leftover predicted by the coefficient recursion.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate

from . import specfun
from .characteristic import G_derivatives
from .equation import EquationSpec
from .errors import DivergenceError, DomainError, QuadratureError, UnsupportedOrderError
from .series import SeriesSolution, evaluate

QUAD_TOL = 1e-9
MAX_LOG_POWER = specfun.MAX_POLYGAMMA_ORDER


def _order(alpha: float) -> tuple[int, bool]:
    """(n, is_integer) with n = ceil(alpha)."""
    if not alpha > 0:
        raise DomainError(f"alpha must be > 0, got {alpha}")
    if specfun.is_integer_order(alpha):
        return int(round(alpha)), True
    return math.ceil(alpha), False


def _check_x(x) -> np.ndarray:
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0)):
        raise DomainError("x must be > 0")
    return xa


def _polynomial_exponent(gamma: float, n: int) -> bool:
    """True when x^gamma is a polynomial of degree < n (Caputo derivative 0)."""
    return 0 <= round(gamma) < n and abs(gamma - round(gamma)) < specfun.INTEGER_TOL


def caputo_power(alpha: float, gamma: float, x):
    """Caputo derivative of x^gamma: Gamma(1+g)/Gamma(1+g-alpha) x^{g-alpha}.

    Integer alpha is the ordinary derivative (any gamma). For fractional alpha
    the derivative exists for gamma > ceil(alpha)-1 and for the polynomial
    exponents 0..ceil(alpha)-1, whose derivative is 0.

    Raises:
        DivergenceError: the Caputo integral diverges.
    """
    return caputo_power_log(alpha, gamma, 0, x)


def caputo_power_log(alpha: float, gamma: float, log_power: int, x):
    """Caputo derivative of x^gamma (ln x)^q by Eq. (5.2); vectorized over x.

    Raises:
        DivergenceError: fractional alpha with gamma <= ceil(alpha)-1 (except
            polynomial exponents when q = 0).
        UnsupportedOrderError: q > 8.
    """
    n, integer = _order(alpha)
    q = int(log_power)
    if q < 0:
        raise ValueError(f"log_power must be >= 0, got {log_power}")
    if q > MAX_LOG_POWER:
        raise UnsupportedOrderError(f"log_power {q} exceeds {MAX_LOG_POWER}")
    xa = _check_x(x)
    if not integer and not gamma > n - 1:
        if q == 0 and _polynomial_exponent(gamma, n):
            out = np.zeros_like(xa)
            return float(out) if out.ndim == 0 else out
        raise DivergenceError(
            f"Caputo derivative of order {alpha} of x^{gamma}(ln x)^{q} diverges: need gamma > {n - 1}"
        )
    if integer:
        alpha = float(n)
    rd = specfun.gamma_ratio_derivs(gamma, alpha, q)
    logx = np.log(xa)
    total = np.zeros_like(xa)
    for l in range(q + 1):
        total = total + math.comb(q, l) * logx ** (q - l) * rd.deriv(l)
    out = xa ** (gamma - alpha) * total
    return float(out) if out.ndim == 0 else out


def power_log_derivative(gamma: float, log_power: int, k: int, t):
    """k-th ordinary derivative of t^gamma (ln t)^q, exactly, for t > 0.

    Each differentiation maps t^s sum_p a_p (ln t)^p to
    t^{s-1} sum_p (s a_p + (p+1) a_{p+1}) (ln t)^p.
    """
    a = [0.0] * (log_power + 1)
    a[log_power] = 1.0
    s = gamma
    for _ in range(k):
        a = [s * a[p] + ((p + 1) * a[p + 1] if p < log_power else 0.0) for p in range(log_power + 1)]
        s -= 1.0
    ta = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        logt = np.log(ta)
        poly = np.zeros_like(ta)
        for coef in reversed(a):
            poly = poly * logt + coef
        out = ta ** s * poly
    return float(out) if out.ndim == 0 else out


def caputo_quadrature(alpha: float, f_derivs: Callable[[int, float], float], x: float) -> float:
    """Caputo derivative from its defining integral.

    With n = ceil(alpha) and mu = n - alpha the substitution
    t = x (1 - s^{1/mu}) absorbs the (x-t)^{mu-1} kernel:

        D^alpha u(x) = x^mu / Gamma(mu+1) * int_0^1 u^{(n)}(x (1 - s^{1/mu})) ds,

    evaluated with adaptive Gauss-Kronrod (scipy ``quad``) in w = 1 - s.

    ``f_derivs(n, t)`` must return u^{(n)}(t). Integer alpha returns
    ``f_derivs(alpha, x)`` without quadrature.

    Raises:
        QuadratureError: error estimate above 1e-9 (1 + |result|).
    """
    n, integer = _order(alpha)
    if not x > 0:
        raise DomainError(f"x must be > 0, got {x}")
    if integer:
        return float(f_derivs(n, x))
    mu = n - alpha

    def integrand(w: float) -> float:
        # integrate in w = 1 - s so that t = x (1 - (1-w)^{1/mu}) is resolved
        # down to t ~ 1e-300 near the t = 0 end, where u^{(n)} may be singular
        if w >= 1.0:
            return float(f_derivs(n, x))
        return float(f_derivs(n, x * -math.expm1(math.log1p(-w) / mu)))

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        value, err = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-13, epsrel=1e-12, limit=400)
    scale = x ** mu / specfun.gamma(mu + 1.0)
    result, abserr = scale * value, scale * err
    if not (math.isfinite(result) and abserr <= QUAD_TOL * (1.0 + abs(result))):
        raise QuadratureError(
            f"quadrature for D^{alpha} at x={x} did not converge (estimate {result:.6g}, error {abserr:.2e})",
            estimate=result,
            error=abserr,
        )
    return result


def rl_boundary_terms(alpha: float, gamma: float, log_power: int, x: float) -> float:
    """Riemann-Liouville minus Caputo derivative of x^gamma (ln x)^q.

    The difference is sum_{k<n} u^{(k)}(0+) x^{k-alpha} / Gamma(k-alpha+1).
    Each u^{(k)}(0+) is found structurally from the exponent: zero when
    gamma > k, k! when gamma == k with no logarithm.

    Raises:
        DivergenceError: some u^{(k)}(0+) is infinite.
    """
    n, integer = _order(alpha)
    if integer:
        return 0.0
    polynomial = log_power == 0 and _polynomial_exponent(gamma, n)
    total = 0.0
    for k in range(n):
        if polynomial:
            if k == round(gamma):
                total += math.factorial(k) * x ** (k - alpha) * specfun.reciprocal_gamma(k - alpha + 1.0)
            continue
        if gamma - k > specfun.INTEGER_TOL:
            continue
        raise DivergenceError(f"u^({k})(0+) is infinite for x^{gamma}(ln x)^{log_power}")
    return total


def series_derivatives(sol: SeriesSolution, branch: int | None = None) -> Callable[[int, float], float]:
    """f(k, t) = k-th derivative of the truncated series, term by term (exact)."""
    l = sol.branch if branch is None else int(branch)

    def f(k: int, t: float) -> float:
        total = 0.0
        for kk in range(1, l + 1):
            q = l - kk
            for n, c in enumerate(sol.coeffs[:, kk - 1]):
                if c:
                    total += c * power_log_derivative(sol.gamma + sol.beta * n, q, k, t) / math.factorial(q)
        return total

    return f


@dataclass(frozen=True)
class ResidualSample:
    x: float
    residual: float
    predicted_tail: float
    u: float
    excess: float


@dataclass(frozen=True)
class ResidualReport:
    samples: list[ResidualSample]
    max_excess: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["x", "residual", "predicted_tail", "excess"])
        for s in self.samples:
            w.writerow([format(v, ".18g") for v in (s.x, s.residual, s.predicted_tail, s.excess)])
        return buf.getvalue()


def residual(spec: EquationSpec, sol: SeriesSolution, xs, branch: int | None = None) -> ResidualReport:
    """Plug the truncated branch into the equation and compare with the predicted leftover.

    The leftover has two parts. The dangling tail
    x^{gamma+beta(N+1)} sum_k c_N^k (ln x)^{l-k}/(l-k)! comes from the last
    row having no successor. The head defect
    x^gamma sum_K (ln x)^{l-K}/(l-K)! sum_{q<=K} c_0^q F^{(K-q)}(gamma)/(K-q)!
    is the amount by which the computed root misses G = nu2 (and, for a
    multiple root, G' = ... = 0); it is of the size of the root tolerance.
    ``excess`` is |residual - predicted| / max(1, |u|).
    """
    l = sol.branch if branch is None else int(branch)
    xa = np.atleast_1d(_check_x(xs)).astype(float)
    logx = np.log(xa)
    coeffs = sol.coeffs[:, :l]
    N = coeffs.shape[0] - 1

    res = np.zeros_like(xa)
    shift = xa ** spec.beta - spec.nu2
    for k in range(1, l + 1):
        q = l - k
        qf = math.factorial(q)
        logq = logx ** q / qf
        for n in range(N + 1):
            c = coeffs[n, k - 1]
            if c == 0.0:
                continue
            s = sol.gamma + sol.beta * n
            acc = shift * xa ** s * logq
            for t in spec.terms:
                acc = acc + t.d * xa ** t.alpha * caputo_power_log(t.alpha, s, q, xa) / qf
            res = res + c * acc

    tail = np.zeros_like(xa)
    for k in range(1, l + 1):
        tail = tail + coeffs[N, k - 1] * logx ** (l - k) / math.factorial(l - k)
    tail = tail * xa ** (sol.gamma + sol.beta * (N + 1))

    gd = G_derivatives(spec, sol.gamma, l - 1)
    fd = [gd[0] - spec.nu2] + list(gd[1:])
    head = np.zeros_like(xa)
    for K in range(1, l + 1):
        w = sum(coeffs[0, q - 1] * fd[K - q] / math.factorial(K - q) for q in range(1, K + 1))
        head = head + w * logx ** (l - K) / math.factorial(l - K)
    head = head * xa ** sol.gamma

    predicted = tail + head
    u = np.atleast_1d(evaluate(sol, xa, l))
    excess = np.abs(res - predicted) / np.maximum(1.0, np.abs(u))
    samples = [
        ResidualSample(float(a), float(b), float(c), float(d), float(e))
        for a, b, c, d, e in zip(xa, res, predicted, u, excess)
    ]
    return ResidualReport(samples, float(np.max(excess)) if len(samples) else 0.0)
