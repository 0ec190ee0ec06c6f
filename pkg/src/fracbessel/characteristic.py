"""Characteristic equation G(gamma) = nu2 and existence/uniqueness diagnostics.

G(gamma) = sum_i d_i Gamma(1+gamma) / Gamma(1+gamma-alpha_i) is the factor that
multiplies the leading term c_0 x^gamma when a power series is substituted into
the equation, so admissible leading exponents are its roots.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import specfun
from .equation import EquationSpec
from .errors import DomainError, NotApplicableError, PoleError, RootScanError, UnsupportedOrderError

ROOT_TOL = 1e-10  # relative to term_scale(spec, gamma)
TANGENCY_TOL = 1e-6
SPACING_TOL = 1e-6
DEFAULT_STEP = 1e-3
MAX_ROOTS = 64
SCAN_CAP = 500.0
BISECTION_ITERATIONS = 60
MAX_MULTIPLICITY = specfun.MAX_POLYGAMMA_ORDER + 1


class RootStatus(str, enum.Enum):
    VALID = "Valid"
    BELOW_THRESHOLD = "RejectedBelowThreshold"
    DUMMY = "RejectedDummy"


class UniquenessClass(str, enum.Enum):
    INTEGER_ONLY = "IntegerOnly"
    FRACTIONAL_MAX_UNIQUE = "FractionalMaxUnique"
    INTEGER_MAX_UNIQUE = "IntegerMaxUnique"
    POSSIBLY_MULTIPLE = "PossiblyMultiple"
    NO_SERIES_SOLUTION = "NoSeriesSolution"


@dataclass(frozen=True)
class CharacteristicRoot:
    """A real root of G(gamma) = nu2.

    ``residual`` is G(gamma) - nu2 at the reported location. Simple roots are
    refined to machine precision; roots detected as tangencies satisfy
    ``|residual| <= TANGENCY_TOL`` instead.
    """

    gamma: float
    multiplicity: int = 1
    status: RootStatus = RootStatus.VALID
    reject_info: str | None = None
    residual: float = 0.0

    @property
    def is_valid(self) -> bool:
        return self.status is RootStatus.VALID


@dataclass(frozen=True)
class Diagnosis:
    nu2_min: float | None
    nu2_satisfied: bool
    uniqueness_class: UniquenessClass
    ivp_bound: float
    ivp_unique: bool
    b: float = 1.0
    valid_roots: int = 0


def _check_gamma(gamma) -> np.ndarray:
    g = np.asarray(gamma, dtype=float)
    if np.any(~(g > -1.0)):
        raise DomainError(f"G is defined for gamma > -1, got {gamma!r}")
    return g


def G(spec: EquationSpec, gamma):
    """sum_i d_i Gamma(1+gamma)/Gamma(1+gamma-alpha_i); vectorized over gamma."""
    g = _check_gamma(gamma)
    total = sum(t.d * np.asarray(specfun.gamma_ratio(g, t.alpha)) for t in spec.terms)
    return float(total) if g.ndim == 0 else total


def G_derivative(spec: EquationSpec, gamma, order: int):
    """order-th derivative of G with respect to gamma (order >= 1)."""
    if order < 1:
        raise ValueError("order must be >= 1; use G for the value")
    g = _check_gamma(gamma)
    total = sum(
        t.d * np.asarray(specfun.gamma_ratio_derivs(g, t.alpha, order).deriv(order))
        for t in spec.terms
    )
    return float(total) if g.ndim == 0 else total


def F_derivative(spec: EquationSpec, gamma, order: int = 0):
    """Derivatives of F = G - nu2 (order 0 is F itself)."""
    if order == 0:
        return G(spec, gamma) - spec.nu2
    return G_derivative(spec, gamma, order)


def G_derivatives(spec: EquationSpec, gamma: float, K: int) -> list[float]:
    """[G, G', ..., G^(K)] at a single point, sharing the polygamma work."""
    out = [0.0] * (K + 1)
    for t in spec.terms:
        rd = specfun.gamma_ratio_derivs(gamma, t.alpha, K)
        for k in range(K + 1):
            out[k] += t.d * rd.deriv(k)
    return out


def term_scale(spec: EquationSpec, gamma: float) -> float:
    """1 + |nu2| + sum_i |d_i r_i(gamma)|: the magnitude F = G - nu2 is computed from.

    Rounding limits |F| at a computed root to about machine epsilon times this
    scale, so ``ROOT_TOL`` is applied relative to it.
    """
    return 1.0 + abs(spec.nu2) + sum(abs(t.d * specfun.gamma_ratio(gamma, t.alpha)) for t in spec.terms)


def nu2_min(spec: EquationSpec) -> float:
    """Threshold value of nu2 above which an admissible series solution exists.

    Evaluated as G at gamma = ceil(alpha_max) - 1, i.e.

        Gamma(p) * sum_i d_i / Gamma(p - alpha_i),  p = ceil(alpha_max).

    When the highest order is fractional p equals n_max (ceiling of the highest
    fractional order). Integer orders at or above p drop out because 1/Gamma
    vanishes at nonpositive integers.

    Raises:
        NotApplicableError: for equations with integer orders only.
    """
    if spec.integer_only:
        raise NotApplicableError("nu2_min is undefined when all orders are integers")
    p = spec.p
    return math.gamma(p) * sum(t.d * specfun.reciprocal_gamma(p - t.alpha) for t in spec.terms)


def default_window(spec: EquationSpec) -> tuple[float, float]:
    """Default scan window [-1+1e-6, n_max-1+60].

    The lower edge sits just above the pole of Gamma(1+gamma) so roots below
    the Caputo floor are reported (as rejected) rather than missed.
    """
    floor = spec.caputo_floor
    base = 0.0 if floor is None else floor
    return -1.0 + 1e-6, base + 60.0


def _bisect(f, lo: float, hi: float, flo: float) -> float:
    for _ in range(BISECTION_ITERATIONS):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _safe_derivative(spec: EquationSpec, gamma: float, order: int) -> float | None:
    try:
        return F_derivative(spec, gamma, order)
    except (PoleError, DomainError):
        return None


def _critical_point(spec: EquationSpec, grid: np.ndarray, F: np.ndarray, i: int) -> float:
    """Refine a discrete extremum of F at grid[i] to a zero of F'."""
    lo, hi = grid[i - 1], grid[i + 1]
    dlo, dhi = _safe_derivative(spec, lo, 1), _safe_derivative(spec, hi, 1)
    if dlo is not None and dhi is not None and dlo * dhi < 0:
        def fprime(g):
            d = _safe_derivative(spec, g, 1)
            return 0.0 if d is None else d
        return _bisect(fprime, lo, hi, dlo)
    # parabolic vertex through the three grid samples
    curv = F[i + 1] - 2.0 * F[i] + F[i - 1]
    if curv == 0.0:
        return float(grid[i])
    h = grid[i + 1] - grid[i]
    return float(grid[i] - 0.5 * h * (F[i + 1] - F[i - 1]) / curv)


def multiplicity_at(spec: EquationSpec, gamma: float, step: float = DEFAULT_STEP) -> tuple[float, int]:
    """Multiplicity of a root and its polished location.

    F^(l) is compared with ``1e-6 (1 + |F^(l+1)|)`` for l = 1, 2, ... (for
    l = 1 this is the deriv_tol ``1e-6 (1 + |F''|)``): the zero of F^(l) must
    lie within about 1e-6 of the root. The per-order scaling matters beyond
    double roots, where a triple root can only be located to ~1e-7 and F''
    is then far from 1e-6 in absolute terms. Each time a derivative is found
    to vanish the location is polished by Newton steps on that derivative,
    restricted to ``step`` around the starting point; the promotion is
    undone if the polished point is no longer a root.

    Raises:
        UnsupportedOrderError: if more than nine derivatives vanish.
    """
    r0 = r = float(gamma)
    m = 1
    while True:
        d = _safe_derivative(spec, r, m)
        d_next = _safe_derivative(spec, r, m + 1) if m < MAX_MULTIPLICITY else 0.0
        if d is None or d_next is None:
            return r, m
        if abs(d) > 1e-6 * (1.0 + abs(d_next)):
            return r, m
        if m + 1 > MAX_MULTIPLICITY:
            raise UnsupportedOrderError(f"root at {gamma} has multiplicity above {MAX_MULTIPLICITY}")
        prev = r
        m += 1
        for _ in range(30):
            slope = _safe_derivative(spec, r, m)
            val = _safe_derivative(spec, r, m - 1)
            if not slope or val is None:
                break
            nxt = r - val / slope
            if abs(nxt - r0) > step:
                break
            if abs(nxt - r) <= 1e-15 * max(1.0, abs(r)):
                r = nxt
                break
            r = nxt
        # a higher multiplicity only stands if the polished point is still a root;
        # near the gamma pole |F''| is huge and the derivative test alone misfires
        val = _safe_derivative(spec, r, 0)
        if val is None or abs(val) > TANGENCY_TOL * (1.0 + abs(spec.nu2)):
            return prev, m - 1


def _scan(spec: EquationSpec, lo: float, hi: float, step: float, max_roots: int):
    n = int(math.ceil((hi - lo) / step))
    grid = lo + step * np.arange(n + 1)
    grid[-1] = hi
    with np.errstate(all="ignore"):
        F = np.asarray(G(spec, grid)) - spec.nu2
    finite = np.isfinite(F)

    def f(g):
        return G(spec, g) - spec.nu2

    crossings: list[float] = []
    for i in np.flatnonzero(finite & (F == 0.0)):
        crossings.append(float(grid[i]))
    pairs = finite[:-1] & finite[1:] & (F[:-1] * F[1:] < 0)
    for i in np.flatnonzero(pairs):
        crossings.append(_bisect(f, float(grid[i]), float(grid[i + 1]), float(F[i])))
        if len(crossings) > max_roots:
            raise RootScanError(
                f"more than {max_roots} roots in [{lo}, {hi}]; narrow the window or use a smaller step"
            )

    tangent: list[tuple[float, int, int]] = []
    dF = np.diff(F)
    ext = np.flatnonzero(finite[1:-1] & np.isfinite(dF[:-1]) & np.isfinite(dF[1:]) & (dF[:-1] * dF[1:] < 0)) + 1
    for i in ext:
        curv = abs(F[i + 1] - 2.0 * F[i] + F[i - 1])
        if abs(F[i]) > TANGENCY_TOL + curv:
            continue
        c = _critical_point(spec, grid, F, int(i))
        if abs(f(c)) > TANGENCY_TOL:
            continue
        left = int(i)
        while left > 0 and finite[left - 1] and abs(F[left - 1]) <= TANGENCY_TOL:
            left -= 1
        right = int(i)
        while right < n and finite[right + 1] and abs(F[right + 1]) <= TANGENCY_TOL:
            right += 1
        tangent.append((c, max(left - 1, 0), min(right + 1, n)))

    located: list[tuple[float, bool]] = []
    for r in crossings:
        absorbed = any(grid[a] < r < grid[b] for _, a, b in tangent)
        if not absorbed:
            located.append((r, False))
    located.extend((c, True) for c, _, _ in tangent)
    located.sort()
    merged: list[tuple[float, bool]] = []
    for r, tan in located:
        if merged and abs(r - merged[-1][0]) <= 1e-9 * max(1.0, abs(r)):
            continue
        merged.append((r, tan))
    return merged


def resolve_window(
    spec: EquationSpec, scan_lo: float | None = None, scan_hi: float | None = None, step: float = DEFAULT_STEP
) -> tuple[float, float]:
    """The window find_roots scans, with defaults and auto-extension applied.

    Raises:
        RootScanError: nonpositive step, window not above -1, or empty window.
    """
    lo_default, hi_default = default_window(spec)
    lo = lo_default if scan_lo is None else float(scan_lo)
    if not step > 0:
        raise RootScanError(f"step must be > 0, got {step}")
    if lo <= -1.0:
        raise RootScanError(f"scan window must lie above gamma = -1, got scan_lo={lo}")
    if scan_hi is None:
        hi = max(hi_default, lo + step)
        while hi < SCAN_CAP and G(spec, hi) - spec.nu2 < 0:
            hi = min(SCAN_CAP, lo + 2.0 * (hi - lo))
    else:
        hi = float(scan_hi)
    if not hi > lo:
        raise RootScanError(f"empty scan window [{lo}, {hi}]")
    return lo, hi


def find_roots(
    spec: EquationSpec,
    scan_lo: float | None = None,
    scan_hi: float | None = None,
    step: float = DEFAULT_STEP,
    *,
    max_roots: int = MAX_ROOTS,
) -> list[CharacteristicRoot]:
    """All real roots of G(gamma) = nu2 in a window, classified.

    Sign changes of F = G - nu2 on a uniform grid are refined by bisection.
    Discrete extrema of F are refined to zeros of F'; if F is within
    ``TANGENCY_TOL`` of zero there, the point is reported as a tangent root
    and any sign changes inside its near-zero plateau are absorbed into it.

    Roots at or below n_max - 1 are ``RejectedBelowThreshold``; a root gamma_j
    with another root at gamma_j + beta*n (n a positive integer) is
    ``RejectedDummy``.

    If ``scan_hi`` is omitted the default upper edge is doubled while F < 0
    there, up to gamma = 500.

    Raises:
        RootScanError: bad window/step or more than ``max_roots`` roots.
    """
    lo, hi = resolve_window(spec, scan_lo, scan_hi, step)
    located = _scan(spec, lo, hi, step, max_roots)
    raw: list[tuple[float, int]] = []
    for r, _ in located:
        r, mult = multiplicity_at(spec, r, step)
        raw.append((r, mult))

    floor = spec.caputo_floor
    roots: list[CharacteristicRoot] = []
    for j, (r, mult) in enumerate(raw):
        status, info = RootStatus.VALID, None
        if floor is not None and r <= floor:
            status = RootStatus.BELOW_THRESHOLD
            info = f"gamma <= n_max - 1 = {floor:g}: Caputo derivative of x^gamma diverges"
        else:
            for other, _ in raw[j + 1:]:
                n = round((other - r) / spec.beta)
                if n >= 1 and abs(other - r - spec.beta * n) <= SPACING_TOL:
                    status = RootStatus.DUMMY
                    info = f"gamma + {n}*beta = {other:.10g} is also a root"
                    break
        roots.append(CharacteristicRoot(r, mult, status, info, G(spec, r) - spec.nu2))
    return roots


def ivp_bound(spec: EquationSpec, b: float = 1.0) -> float:
    """Right side b1^beta + sum_i q_i |d_i| b1^{n_i} of the IVP contraction condition."""
    if not b > 0:
        raise ValueError(f"b must be > 0, got {b}")
    b1 = max(1.0, b)
    total = b1 ** spec.beta
    for t in spec.terms:
        n_i = t.ceil_order
        if t.is_integer:
            q = 1.0
        else:
            q = 1.0 / (math.gamma(n_i - t.alpha) * (n_i - t.alpha + 1.0))
        total += q * abs(t.d) * b1 ** n_i
    return total


def classify(spec: EquationSpec, roots: list[CharacteristicRoot], b: float = 1.0) -> Diagnosis:
    """Existence/uniqueness classification plus the IVP uniqueness bound."""
    valid = [r for r in roots if r.is_valid]
    threshold = None if spec.integer_only else nu2_min(spec)
    satisfied = True if threshold is None else spec.nu2 >= threshold

    if not valid:
        cls = UniquenessClass.NO_SERIES_SOLUTION
    elif spec.integer_only:
        cls = UniquenessClass.INTEGER_ONLY
    elif spec.n_max < spec.alpha_max - 1:
        cls = UniquenessClass.POSSIBLY_MULTIPLE
    elif spec.all_positive and satisfied:
        cls = (UniquenessClass.INTEGER_MAX_UNIQUE if spec.alpha_max_is_integer
               else UniquenessClass.FRACTIONAL_MAX_UNIQUE)
    else:
        # negative coefficients: outside the uniqueness theory
        cls = UniquenessClass.POSSIBLY_MULTIPLE

    bound = ivp_bound(spec, b)
    return Diagnosis(
        nu2_min=threshold,
        nu2_satisfied=satisfied,
        uniqueness_class=cls,
        ivp_bound=bound,
        ivp_unique=spec.nu2 > bound,
        b=b,
        valid_roots=len(valid),
    )
