"""Problem parameters, criticality classification and scaling exponents.

The system is ``(-Δ)^m u = |x|^a v^p``, ``(-Δ)^m v = |x|^b u^q`` on R^n.  The
critical Sobolev hyperbola is

    (n+a)/(p+1) + (n+b)/(q+1) = n - 2m

and a pair (p, q) is *subcritical* when the left side is larger.

Parameters may be given as ``int``, ``float`` or :class:`fractions.Fraction`.
When all of a, b, p, q are exact (int or Fraction) the classification is done
in exact rational arithmetic, otherwise with a relative tolerance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational, Real

from .errors import DegenerateExponents, InvalidParams, NoEpsilonFound, NoSolution, NotSubcritical

#: relative tolerance for deciding ``gap == 0`` with floating-point input
CRITICAL_RTOL = 1e-12


def parse_number(text: str) -> Real:
    """Parse ``"3"``, ``"2.5"`` or ``"7/3"``; integers and ratios stay exact."""
    text = text.strip()
    if "/" in text:
        return Fraction(text)
    try:
        return int(text)
    except ValueError:
        return float(text)


def _is_exact(x) -> bool:
    return isinstance(x, Rational) and not isinstance(x, bool)


@dataclass(frozen=True)
class ProblemParams:
    n: int
    m: int
    a: Real = 0
    b: Real = 0
    p: Real = 1
    q: Real = 1

    def __post_init__(self):
        if not (isinstance(self.n, int) and isinstance(self.m, int)):
            raise InvalidParams(f"n and m must be integers, got n={self.n!r}, m={self.m!r}")
        if self.n < 1 or self.m < 1:
            raise InvalidParams(f"need n, m >= 1, got n={self.n}, m={self.m}")
        for name in ("a", "b", "p", "q"):
            val = getattr(self, name)
            if not isinstance(val, Real) or not math.isfinite(float(val)):
                raise InvalidParams(f"{name} must be a finite real, got {val!r}")
        if self.a < 0 or self.b < 0:
            raise InvalidParams(f"weights must be nonnegative, got a={self.a}, b={self.b}")
        if self.p < 1 or self.q < 1:
            raise InvalidParams(f"exponents must be >= 1, got p={self.p}, q={self.q}")
        if self.p * self.q == 1:
            raise InvalidParams("pq = 1 is excluded")

    @property
    def exact(self) -> bool:
        return all(_is_exact(x) for x in (self.a, self.b, self.p, self.q))

    @property
    def k(self) -> int:
        """Half order, ``m = 2k`` or ``m = 2k+1``."""
        return self.m // 2

    def as_dict(self) -> dict:
        return {name: _plain(getattr(self, name)) for name in ("n", "m", "a", "b", "p", "q")}


def _plain(x):
    # JSON-friendly: ints stay ints, everything else becomes float
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction) and x.denominator == 1:
        return int(x)
    return float(x)


class Criticality(enum.Enum):
    SUBCRITICAL = "Subcritical"
    CRITICAL = "Critical"
    SUPERCRITICAL = "Supercritical"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ScalingExponents:
    alpha_u: float
    alpha_v: float


@dataclass(frozen=True)
class EpsilonCertificate:
    epsilon: float
    f1: float
    f1_tilde: float
    f2: float


def _hyperbola_terms(params: ProblemParams):
    n, m, a, b, p, q = params.n, params.m, params.a, params.b, params.p, params.q
    if params.exact:
        a, b, p, q = (Fraction(x) for x in (a, b, p, q))
    return (n + a) / (p + 1), (n + b) / (q + 1), n - 2 * m


def criticality_gap(params: ProblemParams):
    """``(n+a)/(p+1) + (n+b)/(q+1) - (n-2m)``; a Fraction for exact input."""
    left_u, left_v, rhs = _hyperbola_terms(params)
    return left_u + left_v - rhs


def classify(params: ProblemParams) -> Criticality:
    left_u, left_v, rhs = _hyperbola_terms(params)
    gap = left_u + left_v - rhs
    if params.exact:
        zero = gap == 0
    else:
        scale = max(abs(left_u), abs(left_v), abs(rhs))
        zero = abs(gap) <= CRITICAL_RTOL * scale
    if zero:
        return Criticality.CRITICAL
    return Criticality.SUBCRITICAL if gap > 0 else Criticality.SUPERCRITICAL


def scaling_exponents(params: ProblemParams) -> ScalingExponents:
    """Decay exponents ``alpha_u = ((b+2m)p + a+2m)/(pq-1)`` and its mirror."""
    n, m, a, b, p, q = params.n, params.m, params.a, params.b, params.p, params.q
    denom = p * q - 1
    if denom == 0:
        raise DegenerateExponents("pq = 1")
    alpha_u = ((b + 2 * m) * p + (a + 2 * m)) / denom
    alpha_v = ((a + 2 * m) * q + (b + 2 * m)) / denom
    return ScalingExponents(float(alpha_u), float(alpha_v))


def f_epsilon(params: ProblemParams, eps: float) -> tuple[float, float, float]:
    """The three exponent functions whose joint positivity closes the decay argument.

    Returns ``(f1, f1_tilde, f2)`` at ``eps >= 0``.
    """
    if eps < 0:
        raise ValueError("eps must be nonnegative")
    n, m = params.n, params.m
    a, b, p, q = (float(x) for x in (params.a, params.b, params.p, params.q))
    ex = scaling_exponents(params)
    f1 = (p + 1) * ((2 * m + ex.alpha_v - b * eps) / (1 + eps) - 2 * m - (n + a) / (p + 1))
    f1_tilde = (q + 1) * ((2 * m + ex.alpha_u - a * eps) / (1 + eps) - 2 * m - (n + b) / (q + 1))
    f2 = (
        -n
        + 2 * m * (1 - eps) / (1 + eps)
        + ((b + 2 * m) * (p + 1) + (a + 2 * m) * (q + 1)) / ((p * q - 1) * (1 + eps))
        - (a + b) * eps / (1 + eps)
    )
    return f1, f1_tilde, f2


def find_epsilon(params: ProblemParams, start: float = 0.1, max_halvings: int = 200) -> EpsilonCertificate:
    """Halve ``eps`` from ``start`` until all three f-values are positive."""
    if classify(params) is not Criticality.SUBCRITICAL:
        raise NotSubcritical(f"{params} is {classify(params)}")
    eps = start
    for _ in range(max_halvings + 1):
        f1, f1t, f2 = f_epsilon(params, eps)
        if min(f1, f1t, f2) > 0:
            return EpsilonCertificate(eps, f1, f1t, f2)
        eps /= 2
    raise NoEpsilonFound(f"no certificate after {max_halvings} halvings for {params}")


def hyperbola_q(n: int, m: int, a, b, p):
    """The q on the critical hyperbola for given p (exact for rational input)."""
    if n <= 2 * m:
        raise NoSolution(f"no critical curve for n <= 2m (n={n}, m={m})")
    if p < 1:
        raise NoSolution("p must be >= 1")
    if all(_is_exact(x) for x in (a, b, p)):
        a, b, p = Fraction(a), Fraction(b), Fraction(p)
    denom = (n - 2 * m) - (n + a) / (p + 1)
    if denom <= 0:
        raise NoSolution(f"no finite q on the critical curve at p={p}")
    return (n + b) / denom - 1
