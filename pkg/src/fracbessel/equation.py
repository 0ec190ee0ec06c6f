"""Data model for the generalized fractional Bessel equation

    sum_i d_i x^{alpha_i} D^{alpha_i} u(x) + (x^beta - nu2) u(x) = 0,

with Caputo derivatives for fractional alpha_i and ordinary derivatives for
integer alpha_i.
"""

from __future__ import annotations

import math
from collections.abc import Mapping
from dataclasses import dataclass
from typing import Any

from .errors import ValidationError
from .specfun import INTEGER_TOL, is_integer_order


@dataclass(frozen=True)
class Term:
    """One derivative term d * x^alpha D^alpha u."""

    d: float
    alpha: float

    @property
    def is_integer(self) -> bool:
        return is_integer_order(self.alpha)

    @property
    def ceil_order(self) -> int:
        """Smallest integer n with alpha <= n (alpha in (n-1, n] )."""
        if self.is_integer:
            return int(round(self.alpha))
        return math.ceil(self.alpha)


@dataclass(frozen=True)
class EquationSpec:
    """Validated equation. Build it with :func:`validate`.

    Terms are merged by order and sorted by decreasing alpha, so two specs
    describing the same operator compare equal.
    """

    terms: tuple[Term, ...]
    beta: float
    nu2: float

    @property
    def m(self) -> int:
        return len(self.terms)

    @property
    def fractional_terms(self) -> tuple[Term, ...]:
        return tuple(t for t in self.terms if not t.is_integer)

    @property
    def m0(self) -> int:
        """Number of genuinely fractional terms."""
        return len(self.fractional_terms)

    @property
    def integer_only(self) -> bool:
        return self.m0 == 0

    @property
    def n_max(self) -> int | None:
        """Ceiling of the highest fractional order (None if there is none)."""
        frac = self.fractional_terms
        return max(t.ceil_order for t in frac) if frac else None

    @property
    def n_min(self) -> int | None:
        frac = self.fractional_terms
        return min(t.ceil_order for t in frac) if frac else None

    @property
    def alpha_max(self) -> float:
        return max(t.alpha for t in self.terms)

    @property
    def alpha_max_is_integer(self) -> bool:
        return is_integer_order(self.alpha_max)

    @property
    def p(self) -> int:
        """ceil(alpha_max): smoothness order of solutions."""
        a = self.alpha_max
        return int(round(a)) if is_integer_order(a) else math.ceil(a)

    @property
    def all_positive(self) -> bool:
        return all(t.d > 0 for t in self.terms)

    @property
    def caputo_floor(self) -> float | None:
        """Lower bound n_max - 1 on admissible exponents (None if integer-only)."""
        n = self.n_max
        return None if n is None else float(n - 1)

    def scaled(self, factor: float) -> EquationSpec:
        """Spec with every d_i and nu2 multiplied by ``factor``."""
        return EquationSpec(
            tuple(Term(t.d * factor, t.alpha) for t in self.terms), self.beta, self.nu2 * factor
        )

    def with_nu2(self, nu2: float) -> EquationSpec:
        return EquationSpec(self.terms, self.beta, float(nu2))

    def to_dict(self) -> dict[str, Any]:
        return {
            "terms": [{"d": t.d, "alpha": t.alpha} for t in self.terms],
            "beta": self.beta,
            "nu2": self.nu2,
        }


def _finite_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool) and math.isfinite(value)


def validate(raw: Mapping[str, Any] | EquationSpec) -> EquationSpec:
    """Check and normalize raw equation input.

    ``raw`` is a mapping with keys ``terms`` (list of ``{"d", "alpha"}``),
    ``beta`` and ``nu2``. Orders equal to within the integer tolerance are
    merged by summing their coefficients; terms whose merged coefficient is
    zero are dropped.

    Raises:
        ValidationError: listing every violation found.
    """
    if isinstance(raw, EquationSpec):
        raw = raw.to_dict()
    problems: list[str] = []

    beta = raw.get("beta")
    if beta is None:
        problems.append("beta: missing")
    elif not _finite_number(beta):
        problems.append(f"beta: must be a finite number, got {beta!r}")
    elif beta <= 0:
        problems.append(f"beta: must be > 0, got {beta}")

    nu2 = raw.get("nu2")
    if nu2 is None:
        problems.append("nu2: missing")
    elif not _finite_number(nu2):
        problems.append(f"nu2: must be a finite number, got {nu2!r}")

    raw_terms = raw.get("terms")
    groups: dict[float, list[float]] = {}
    if raw_terms is None:
        problems.append("terms: missing")
    elif not isinstance(raw_terms, (list, tuple)) or not raw_terms:
        problems.append("terms: must be a nonempty list")
    else:
        for i, item in enumerate(raw_terms):
            if isinstance(item, Term):
                item = {"d": item.d, "alpha": item.alpha}
            if not isinstance(item, Mapping):
                problems.append(f"terms[{i}]: must be an object with keys d, alpha")
                continue
            d, alpha = item.get("d"), item.get("alpha")
            ok = True
            if not _finite_number(d):
                problems.append(f"terms[{i}].d: must be a finite number, got {d!r}")
                ok = False
            if not _finite_number(alpha):
                problems.append(f"terms[{i}].alpha: must be a finite number, got {alpha!r}")
                ok = False
            elif alpha <= 0:
                problems.append(f"terms[{i}].alpha: must be > 0, got {alpha}")
                ok = False
            if not ok:
                continue
            key = float(round(alpha)) if abs(alpha - round(alpha)) < INTEGER_TOL else float(alpha)
            for existing in groups:
                if abs(existing - key) < INTEGER_TOL:
                    key = existing
                    break
            groups.setdefault(key, []).append(float(d))

    # fsum makes the merged coefficient independent of input order
    merged = {a: math.fsum(ds) for a, ds in groups.items()}
    terms = tuple(Term(d, a) for a, d in sorted(merged.items(), key=lambda kv: -kv[0]) if d != 0.0)
    if raw_terms and merged and not terms:
        problems.append("terms: all coefficients cancel after merging equal orders")
    if problems:
        raise ValidationError(problems)
    return EquationSpec(terms, float(beta), float(nu2))
