"""Real-argument gamma-family special functions.

Everything here is implemented in-repo on top of numpy elementary functions:
log-gamma from a Taylor expansion around 1 and 2 plus Stirling's series
elsewhere, digamma/polygamma from recurrence plus asymptotic expansion, and
reflection for negative arguments.

All public functions accept scalars or array-likes; scalars in give Python
floats out.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import Polynomial

from .errors import DomainError, PoleError, UnsupportedOrderError

EULER_GAMMA = 0.57721566490153286061
MAX_POLYGAMMA_ORDER = 8
INTEGER_TOL = 1e-12

_HALF_LOG_2PI = 0.91893853320467274178

# B_2k for k = 1..10
_BERNOULLI_2K = np.array([
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
])
# Stirling log-gamma corrections B_2k / (2k (2k-1)), applied to x^(1-2k)
_STIRLING = np.array([b / ((2 * k) * (2 * k - 1)) for k, b in enumerate(_BERNOULLI_2K, 1)])

_STIRLING_MIN = 15.0
_PSI_MIN = 10.0
_POLYGAMMA_MIN = 20.0


def _zeta_minus_one(k: int) -> float:
    """zeta(k) - 1 for integer k >= 2 by Euler-Maclaurin with cutoff 20."""
    n0 = 20
    head = math.fsum(float(n) ** -k for n in range(n0 - 1, 1, -1))
    tail = n0 ** (1 - k) / (k - 1) + 0.5 * n0 ** -k
    # -sum_j B_2j/(2j)! f^(2j-1)(n0) with f(x) = x^-k
    rising = float(k)
    for j, b in enumerate(_BERNOULLI_2K[:5], 1):
        tail += b / math.factorial(2 * j) * rising * n0 ** (-k - 2 * j + 1)
        rising *= (k + 2 * j - 1) * (k + 2 * j)
    return head + tail


# log Gamma(2+z) = (1-EG) z + sum_{k>=2} (-1)^k (zeta(k)-1) z^k / k, |z| <= 1/2
_LG_SERIES = np.array([0.0, 1.0 - EULER_GAMMA] + [
    (-1) ** k * _zeta_minus_one(k) / k for k in range(2, 34)
])


def _cot_derivative_polys(order: int) -> list[Polynomial]:
    # d^m/du^m cot(u) = P_m(cot u),  P_{m+1}(y) = -(1 + y^2) P_m'(y)
    polys = [Polynomial([0.0, 1.0])]
    one_plus_y2 = Polynomial([1.0, 0.0, 1.0])
    for _ in range(order):
        polys.append(-one_plus_y2 * polys[-1].deriv())
    return polys


_COT_POLYS = _cot_derivative_polys(MAX_POLYGAMMA_ORDER)


def _prepare(x):
    arr = np.asarray(x, dtype=float)
    return arr, arr.ndim == 0


def _finish(arr, scalar):
    return float(arr) if scalar else arr


def _is_nonpositive_integer(x: np.ndarray) -> np.ndarray:
    return (x <= 0) & (x == np.floor(x))


def sinpi(x):
    """sin(pi x) with exact zeros at integers."""
    arr, scalar = _prepare(x)
    r = np.mod(arr, 2.0)
    out = np.where(r < 0.5, np.sin(np.pi * r),
                   np.where(r < 1.5, np.sin(np.pi * (1.0 - r)), np.sin(np.pi * (r - 2.0))))
    out = np.where(r == np.floor(r), 0.0, out)
    return _finish(out, scalar)


def cospi(x):
    """cos(pi x) with exact zeros at half-integers."""
    arr, scalar = _prepare(x)
    return _finish(np.asarray(sinpi(0.5 - np.mod(np.abs(arr), 2.0))), scalar)


def _stirling_lgamma(x: np.ndarray) -> np.ndarray:
    inv = 1.0 / x
    inv2 = inv * inv
    corr = np.zeros_like(x)
    for c in _STIRLING[::-1]:
        corr = corr * inv2 + c
    return (x - 0.5) * np.log(x) - x + _HALF_LOG_2PI + corr * inv


def _lgamma2_series(z: np.ndarray) -> np.ndarray:
    # log Gamma(2 + z) for |z| <= 1/2, Horner
    acc = np.zeros_like(z)
    for c in _LG_SERIES[::-1]:
        acc = acc * z + c
    return acc


def _lgamma_positive(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    small = x < 0.5
    near1 = (x >= 0.5) & (x < 1.5)
    near2 = (x >= 1.5) & (x <= 2.5)
    mid = (x > 2.5) & (x < _STIRLING_MIN)
    big = x >= _STIRLING_MIN

    if np.any(small):
        xs = x[small]
        # Gamma(x) = Gamma(2 + x) / (x (1 + x))
        out[small] = _lgamma2_series(xs) - np.log(xs) - np.log1p(xs)
    if np.any(near1):
        z = x[near1] - 1.0
        out[near1] = _lgamma2_series(z) - np.log1p(z)
    if np.any(near2):
        out[near2] = _lgamma2_series(x[near2] - 2.0)
    if np.any(mid):
        xm = x[mid]
        k = np.ceil(_STIRLING_MIN - xm)
        prod = np.ones_like(xm)
        for i in range(int(k.max())):
            prod = np.where(i < k, prod * (xm + i), prod)
        out[mid] = _stirling_lgamma(xm + k) - np.log(prod)
    if np.any(big):
        out[big] = _stirling_lgamma(x[big])
    return out


def ln_gamma(x):
    """Natural log of Gamma(x) for x > 0.

    Raises:
        DomainError: if any x <= 0 or is not finite.
    """
    arr, scalar = _prepare(x)
    if np.any(~(arr > 0)) or np.any(~np.isfinite(arr)):
        raise DomainError(f"ln_gamma requires finite x > 0, got {x!r}")
    return _finish(_lgamma_positive(arr), scalar)


def _lgamma_abs_sign(x: np.ndarray):
    """log|Gamma(x)| and sign(Gamma(x)) for x off the poles."""
    out = np.empty_like(x)
    sign = np.ones_like(x)
    pos = x > 0
    if np.any(pos):
        out[pos] = _lgamma_positive(x[pos])
    neg = ~pos
    if np.any(neg):
        xn = x[neg]
        s = np.asarray(sinpi(xn))
        # Gamma(x) = pi / (sin(pi x) Gamma(1-x))
        out[neg] = math.log(math.pi) - np.log(np.abs(s)) - _lgamma_positive(1.0 - xn)
        sign[neg] = np.sign(s)
    return out, sign


def gamma(x):
    """Gamma(x); raises PoleError at nonpositive integers."""
    arr, scalar = _prepare(x)
    if np.any(_is_nonpositive_integer(arr)):
        raise PoleError(f"Gamma has a pole at {x!r}")
    lg, sign = _lgamma_abs_sign(arr)
    return _finish(sign * np.exp(lg), scalar)


def reciprocal_gamma(x):
    """1/Gamma(x) on the whole real line, exactly zero at 0, -1, -2, ..."""
    arr, scalar = _prepare(x)
    out = np.zeros_like(arr)
    pos = arr > 0
    if np.any(pos):
        out[pos] = np.exp(-_lgamma_positive(arr[pos]))
    neg = (~pos) & ~_is_nonpositive_integer(arr)
    if np.any(neg):
        xn = arr[neg]
        # 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi
        with np.errstate(over="ignore"):
            out[neg] = np.asarray(sinpi(xn)) / math.pi * np.exp(_lgamma_positive(1.0 - xn))
    return _finish(out, scalar)


def _digamma_positive(x: np.ndarray) -> np.ndarray:
    x = x.copy()
    acc = np.zeros_like(x)
    while True:
        low = x < _PSI_MIN
        if not np.any(low):
            break
        acc = np.where(low, acc - 1.0 / x, acc)
        x = np.where(low, x + 1.0, x)
    inv2 = 1.0 / (x * x)
    series = np.zeros_like(x)
    for k in range(7, 0, -1):
        series = series * inv2 + _BERNOULLI_2K[k - 1] / (2 * k)
    return acc + np.log(x) - 0.5 / x - series * inv2


def digamma(x):
    """psi(x) = d/dx log Gamma(x); reflection for negative x.

    Raises:
        PoleError: at nonpositive integers.
    """
    arr, scalar = _prepare(x)
    if np.any(_is_nonpositive_integer(arr)):
        raise PoleError(f"digamma has a pole at {x!r}")
    out = np.empty_like(arr)
    pos = arr > 0
    if np.any(pos):
        out[pos] = _digamma_positive(arr[pos])
    if np.any(~pos):
        xn = arr[~pos]
        # psi(x) = psi(1-x) - pi cot(pi x)
        cot = np.asarray(cospi(xn)) / np.asarray(sinpi(xn))
        out[~pos] = _digamma_positive(1.0 - xn) - math.pi * cot
    return _finish(out, scalar)


def _polygamma_positive(m: int, x: np.ndarray) -> np.ndarray:
    x = x.copy()
    fact_m = math.factorial(m)
    acc = np.zeros_like(x)
    while True:
        low = x < _POLYGAMMA_MIN
        if not np.any(low):
            break
        acc = np.where(low, acc + x ** (-m - 1), acc)
        x = np.where(low, x + 1.0, x)
    inv = 1.0 / x
    inv2 = inv * inv
    series = np.zeros_like(x)
    for k in range(10, 0, -1):
        coef = _BERNOULLI_2K[k - 1] * math.factorial(2 * k + m - 1) / math.factorial(2 * k)
        series = series * inv2 + coef
    asym = math.factorial(m - 1) * inv ** m + 0.5 * fact_m * inv ** (m + 1) + series * inv ** (m + 2)
    sign = -1.0 if m % 2 == 0 else 1.0
    return sign * (fact_m * acc + asym)


def polygamma(m: int, x):
    """m-th derivative of digamma, 1 <= m <= 8 (m = 0 gives digamma).

    Raises:
        PoleError: at nonpositive integers.
        UnsupportedOrderError: for m > 8 or m < 0.
    """
    if m < 0 or m > MAX_POLYGAMMA_ORDER or int(m) != m:
        raise UnsupportedOrderError(f"polygamma order must be 0..{MAX_POLYGAMMA_ORDER}, got {m}")
    m = int(m)
    if m == 0:
        return digamma(x)
    arr, scalar = _prepare(x)
    if np.any(_is_nonpositive_integer(arr)):
        raise PoleError(f"polygamma has a pole at {x!r}")
    out = np.empty_like(arr)
    pos = arr > 0
    if np.any(pos):
        out[pos] = _polygamma_positive(m, arr[pos])
    if np.any(~pos):
        xn = arr[~pos]
        # psi^(m)(x) = (-1)^m psi^(m)(1-x) - pi^(m+1) P_m(cot(pi x))
        cot = np.asarray(cospi(xn)) / np.asarray(sinpi(xn))
        refl = math.pi ** (m + 1) * _COT_POLYS[m](cot)
        out[~pos] = (-1) ** m * _polygamma_positive(m, 1.0 - xn) - refl
    return _finish(out, scalar)


def is_integer_order(alpha: float) -> bool:
    """True when alpha is an integer to within INTEGER_TOL."""
    return abs(alpha - round(alpha)) < INTEGER_TOL


def _log_ratio_large(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    # log Gamma(a) - log Gamma(b) for a >= b >= _STIRLING_MIN, cancellation-free
    diff = a - b
    out = (b - 0.5) * np.log1p(diff / b) + diff * np.log(a) - diff
    ia, ib = 1.0 / a, 1.0 / b
    ia2, ib2 = ia * ia, ib * ib
    pa, pb = ia.copy(), ib.copy()
    for c in _STIRLING:
        out = out + c * (pa - pb)
        pa, pb = pa * ia2, pb * ib2
    return out


def _positive_ratio(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Gamma(a)/Gamma(b) for a >= b > 0."""
    k = np.maximum(0.0, np.ceil(_STIRLING_MIN - b))
    factor = np.ones_like(a)
    for i in range(int(k.max()) if k.size else 0):
        factor = np.where(i < k, factor * ((b + i) / (a + i)), factor)
    return np.exp(_log_ratio_large(a + k, b + k)) * factor


def _falling_factorial(g: np.ndarray, k: int) -> np.ndarray:
    out = np.ones_like(g)
    for j in range(k):
        out = out * (g - j)
    return out


def gamma_ratio(gamma, alpha: float):
    """Gamma(1+gamma) / Gamma(1+gamma-alpha).

    Integer alpha gives the falling factorial gamma (gamma-1) ... exactly.
    The result is exactly zero where 1+gamma-alpha is a nonpositive integer.

    Raises:
        DomainError: if 1+gamma is a nonpositive integer.
    """
    g, scalar = _prepare(gamma)
    a = 1.0 + g
    if np.any(_is_nonpositive_integer(a)):
        raise DomainError(f"Gamma(1+gamma) has a pole at gamma={gamma!r}")
    if alpha < 0:
        raise DomainError(f"alpha must be >= 0, got {alpha}")
    if is_integer_order(alpha):
        return _finish(_falling_factorial(g, int(round(alpha))), scalar)
    b = a - alpha
    out = np.zeros_like(g)
    both_pos = (a > 0) & (b > 0)
    if np.any(both_pos):
        out[both_pos] = _positive_ratio(a[both_pos], b[both_pos])
    rest = ~both_pos & ~_is_nonpositive_integer(b)
    if np.any(rest):
        la, sa = _lgamma_abs_sign(a[rest])
        lb, sb = _lgamma_abs_sign(b[rest])
        with np.errstate(over="ignore"):
            out[rest] = sa * sb * np.exp(la - lb)
    return _finish(out, scalar)


@dataclass(frozen=True)
class GammaRatioDerivs:
    """The ratio r(gamma) = Gamma(1+gamma)/Gamma(1+gamma-alpha) and its gamma-derivatives.

    ``derivs[k-1]`` is d^k r / d gamma^k; use :meth:`deriv` for 0-based access
    where order 0 is the value itself.
    """

    value: float
    derivs: tuple

    def deriv(self, order: int):
        return self.value if order == 0 else self.derivs[order - 1]

    def psi(self, order: int):
        """Logarithmic-derivative factor Psi_k = r^(k) / r."""
        return self.deriv(order) / self.value


def gamma_ratio_derivs(gamma, alpha: float, K: int) -> GammaRatioDerivs:
    """Value and first K gamma-derivatives of :func:`gamma_ratio`.

    For fractional alpha the derivatives follow the Leibniz recursion for
    r' = r h, where h = psi(1+gamma) - psi(1+gamma-alpha):

        r^(k) = sum_{j<k} C(k-1, j) r^(j) h^(k-1-j)

    with h^(m) the difference of polygammas of order m. Integer alpha is a
    polynomial in gamma and is differentiated exactly.

    Raises:
        PoleError: when a derivative is requested at a pole of the polygammas.
        UnsupportedOrderError: K > 9.
    """
    if K < 0:
        raise ValueError("K must be >= 0")
    if K > MAX_POLYGAMMA_ORDER + 1:
        raise UnsupportedOrderError(f"at most {MAX_POLYGAMMA_ORDER + 1} derivatives supported")
    value = gamma_ratio(gamma, alpha)
    if K == 0:
        return GammaRatioDerivs(value, ())
    g = np.asarray(gamma, dtype=float)
    if is_integer_order(alpha):
        k0 = int(round(alpha))
        poly = Polynomial.fromroots(np.arange(k0, dtype=float)) if k0 else Polynomial([1.0])
        derivs = []
        for k in range(1, K + 1):
            poly = poly.deriv()
            d = np.asarray(poly(g), dtype=float) + np.zeros_like(g)
            derivs.append(_finish(d, g.ndim == 0))
        return GammaRatioDerivs(value, tuple(derivs))
    a = 1.0 + g
    b = a - alpha
    h = [np.asarray(polygamma(m, a)) - np.asarray(polygamma(m, b)) for m in range(K)]
    r = [np.asarray(value)]
    for k in range(1, K + 1):
        r.append(sum(math.comb(k - 1, j) * r[j] * h[k - 1 - j] for j in range(k)))
    scalar = g.ndim == 0
    return GammaRatioDerivs(value, tuple(_finish(v, scalar) for v in r[1:]))
