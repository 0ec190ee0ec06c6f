"""Fractional power series and logarithmic fractional series solutions.

For a root gamma of multiplicity j the l-th solution (l = 1..j) is

    u_l(x) = sum_{k=1}^{l} (ln x)^{l-k}/(l-k)! * sum_{n=0}^{N} c_n^k x^{gamma + beta n}.

Substituting into the equation and matching x^{gamma+beta n} (ln x)^{l-K} gives

    c_n^K F(s_n) + sum_{q<K} c_n^q G^{(K-q)}(s_n)/(K-q)! + c_{n-1}^K = 0,

with s_n = gamma + beta n and F = G - nu2. The 1/(l-k)! weights make this
recursion independent of l, so every branch shares one coefficient table and
branch l simply uses its first l columns. For j = 2 the weights are all 1 and
the recursion is the paper's Eq. (4.8).
"""

from __future__ import annotations

import csv
import io
import math
from collections.abc import Iterator
from dataclasses import dataclass

import numpy as np

from .characteristic import G, G_derivatives, CharacteristicRoot, MAX_MULTIPLICITY
from .equation import EquationSpec
from .errors import (
    DomainError,
    DummyRootDenominator,
    InvalidRootError,
    SeriesOverflowError,
    TruncationError,
    UnsupportedOrderError,
)
from .specfun import INTEGER_TOL

MAX_ORDER = 500
DENOM_TOL = 1e-9
_RESCALE_HI = 1e100
_RESCALE_LO = 1e-100


@dataclass(frozen=True, eq=False)
class SeriesSolution:
    """Truncated series solution attached to one characteristic root.

    ``coeffs[n, k-1]`` is c_n^k. ``branch`` is the solution index l; the table
    holds exactly l columns. ``multiplicity`` is the multiplicity j of the root.
    """

    gamma: float
    beta: float
    multiplicity: int
    coeffs: np.ndarray
    c0_normalization: float = 1.0
    branch: int = 1

    @property
    def N(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def is_logarithmic(self) -> bool:
        return self.branch > 1


def _root_gamma(root: CharacteristicRoot | float) -> tuple[float, int]:
    if isinstance(root, CharacteristicRoot):
        if not root.is_valid:
            raise InvalidRootError(
                f"root gamma={root.gamma:.10g} is {root.status.value}: {root.reject_info}"
            )
        return root.gamma, root.multiplicity
    return float(root), 1


def _scaled_rows(spec: EquationSpec, gamma: float, j: int, c0: float) -> Iterator[tuple[np.ndarray, int]]:
    """Yield (row, e) for n = 0, 1, ... with c_n = row * 2**e.

    Rows are rescaled by powers of two (exactly) to stay in floating range,
    so this never overflows on its own; callers decide what to do with the
    true magnitudes.
    """
    denom_tol = DENOM_TOL * (1.0 + abs(spec.nu2))
    inv_fact = [1.0 / math.factorial(t) for t in range(j)]
    row = np.zeros(j)
    row[0] = c0
    exponent = 0
    yield row.copy(), exponent
    n = 0
    while True:
        n += 1
        s = gamma + spec.beta * n
        gd = [G(spec, s)] if j == 1 else G_derivatives(spec, s, j - 1)
        f = gd[0] - spec.nu2
        if abs(f) < denom_tol:
            raise DummyRootDenominator(n, f)
        new = np.zeros(j)
        for k in range(j):
            acc = row[k]
            for q in range(k):
                acc += new[q] * gd[k - q] * inv_fact[k - q]
            new[k] = -acc / f
        big = float(np.max(np.abs(new)))
        if not math.isfinite(big):
            raise SeriesOverflowError(f"coefficient row {n} is not finite")
        if big > _RESCALE_HI or (0.0 < big < _RESCALE_LO):
            shift = math.frexp(big)[1]
            new = np.ldexp(new, -shift)
            exponent += shift
        row = new
        yield row.copy(), exponent


def _coefficient_table(spec: EquationSpec, gamma: float, j: int, N: int, c0: float) -> np.ndarray:
    if N < 0:
        raise ValueError(f"N must be >= 0, got {N}")
    table = np.zeros((N + 1, j))
    rows = _scaled_rows(spec, gamma, j, c0)
    with np.errstate(over="ignore", under="ignore"):
        for n in range(N + 1):
            row, exponent = next(rows)
            true = np.ldexp(row, exponent)
            if not np.all(np.isfinite(true)):
                raise SeriesOverflowError(
                    f"coefficient c_{n} overflows double precision (|c| ~ 2^{exponent})"
                )
            table[n] = true
    return table


def build_simple(
    spec: EquationSpec, root: CharacteristicRoot | float, N: int, c0: float = 1.0
) -> SeriesSolution:
    """Power series sum_n c_n x^{gamma+beta n} with c_{n+1} = -c_n / F(gamma+beta(n+1)).

    Raises:
        InvalidRootError: ``root`` is a rejected CharacteristicRoot.
        DummyRootDenominator: a recursion denominator vanishes.
        SeriesOverflowError: coefficients leave double range.
    """
    gamma, mult = _root_gamma(root)
    table = _coefficient_table(spec, gamma, 1, N, float(c0))
    return SeriesSolution(gamma, spec.beta, mult, table, float(c0), 1)


def build_logarithmic(spec: EquationSpec, root: CharacteristicRoot, N: int) -> list[SeriesSolution]:
    """All j solutions of a root of multiplicity j (branch 1 is the plain power series).

    Normalization: c_0^1 = 1 and c_0^k = 0 for k >= 2.

    Raises:
        InvalidRootError, DummyRootDenominator, SeriesOverflowError: as build_simple.
        UnsupportedOrderError: multiplicity above 9.
    """
    gamma, j = _root_gamma(root)
    if j > MAX_MULTIPLICITY:
        raise UnsupportedOrderError(f"multiplicity {j} exceeds {MAX_MULTIPLICITY}")
    table = _coefficient_table(spec, gamma, j, N, 1.0)
    return [SeriesSolution(gamma, spec.beta, j, table[:, :l].copy(), 1.0, l) for l in range(1, j + 1)]


def build(spec: EquationSpec, root: CharacteristicRoot, N: int) -> list[SeriesSolution]:
    """Every solution attached to ``root``: one for a simple root, j for multiplicity j."""
    if isinstance(root, CharacteristicRoot) and root.multiplicity > 1:
        return build_logarithmic(spec, root, N)
    return [build_simple(spec, root, N)]


def _is_int(v: float) -> bool:
    return abs(v - round(v)) < INTEGER_TOL


def evaluate(sol: SeriesSolution, x, branch: int | None = None):
    """Truncated series value u_l(x); vectorized over x.

    Raises:
        DomainError: x <= 0 on a logarithmic branch, x < 0 with a non-integer
            exponent, or x = 0 with gamma < 0.
    """
    l = sol.branch if branch is None else int(branch)
    if not 1 <= l <= sol.coeffs.shape[1]:
        raise ValueError(f"branch must be in 1..{sol.coeffs.shape[1]}, got {l}")
    xa = np.asarray(x, dtype=float)
    if l > 1:
        if np.any(~(xa > 0)):
            raise DomainError("logarithmic branches are defined for x > 0 only")
    else:
        if np.any(xa < 0) and not (_is_int(sol.gamma) and _is_int(sol.beta)):
            raise DomainError("x < 0 requires integer gamma and beta")
        if np.any(xa == 0) and sol.gamma < 0:
            raise DomainError(f"u(0) is infinite for gamma = {sol.gamma}")

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ax = np.abs(xa)
        if _is_int(sol.beta):
            y = xa ** int(round(sol.beta))
        else:
            y = ax ** sol.beta
        lead = xa ** int(round(sol.gamma)) if _is_int(sol.gamma) else ax ** sol.gamma
        logx = np.log(ax) if l > 1 else None
        total = np.zeros_like(xa)
        for k in range(1, l + 1):
            col = sol.coeffs[:, k - 1]
            acc = np.zeros_like(xa)
            for c in col[::-1]:
                acc = acc * y + c
            if l - k:
                acc = acc * logx ** (l - k) / math.factorial(l - k)
            total = total + acc
        out = lead * total
        if l == 1:
            # 0**0 = 1 gives c_0 at x = 0 for gamma = 0; any gamma > 0 gives 0
            out = np.where(xa == 0, sol.coeffs[0, 0] if sol.gamma == 0 else 0.0, out)
    return float(out) if out.ndim == 0 else out


def tail_bound_log(spec: EquationSpec, gamma: float, j: int, N: int, x_max: float, log_c_max: float) -> float:
    """log of |c_N| x_max^{gamma+beta(N+1)} (1+|ln x_max|)^{j-1}."""
    return log_c_max + (gamma + spec.beta * (N + 1)) * math.log(x_max) + (j - 1) * math.log1p(abs(math.log(x_max)))


def choose_truncation(
    spec: EquationSpec, root: CharacteristicRoot | float, x_max: float, target: float
) -> int:
    """Smallest N whose dangling tail term is below ``target`` at x_max.

    The bound |c_N| x_max^{gamma+beta(N+1)} (1+|ln x_max|)^{j-1} (|c_N| the
    largest entry of row N) is evaluated in log space.

    Raises:
        TruncationError: no N <= 500 meets the target.
    """
    if not target > 0:
        raise ValueError(f"target must be > 0, got {target}")
    if not x_max > 0:
        raise ValueError(f"x_max must be > 0, got {x_max}")
    gamma, j = _root_gamma(root)
    log_target = math.log(target)
    best = math.inf
    rows = _scaled_rows(spec, gamma, j, 1.0)
    for N in range(MAX_ORDER + 1):
        row, exponent = next(rows)
        big = float(np.max(np.abs(row)))
        if big == 0.0:
            return N
        bound = tail_bound_log(spec, gamma, j, N, x_max, math.log(big) + exponent * math.log(2.0))
        best = min(best, bound)
        if bound <= log_target:
            return N
    raise TruncationError(
        f"no truncation order N <= {MAX_ORDER} reaches tail bound {target:g} at x_max={x_max:g} "
        f"(best achieved {math.exp(best) if best < 709 else math.inf:.3e})",
        achieved=math.exp(best) if best < 709 else math.inf,
    )


def coefficients_csv(sol: SeriesSolution) -> str:
    """CSV with header n,k,c; 18 significant digits; rows ordered by n then k."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["n", "k", "c"])
    for n in range(sol.coeffs.shape[0]):
        for k in range(sol.coeffs.shape[1]):
            w.writerow([n, k + 1, format(float(sol.coeffs[n, k]), ".18g")])
    return buf.getvalue()


def read_coefficients_csv(text: str) -> np.ndarray:
    """Inverse of :func:`coefficients_csv`: the (N+1, l) coefficient table."""
    rows = list(csv.DictReader(io.StringIO(text)))
    if not rows:
        raise ValueError("empty coefficient table")
    N = max(int(r["n"]) for r in rows)
    l = max(int(r["k"]) for r in rows)
    table = np.zeros((N + 1, l))
    for r in rows:
        table[int(r["n"]), int(r["k"]) - 1] = float(r["c"])
    return table
