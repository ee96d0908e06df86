"""Exact even polynomials in r and the radial identities behind the Pohozaev computation.

A smooth radial function on R^n has an even Taylor expansion, so the class of
even polynomials with rational coefficients is closed under the radial
Laplacian ``d²/dr² + (n-1)/r d/dr`` and the Euler operator ``r d/dr``.  That is
enough to check the two commutation identities used to derive the Pohozaev
identity exactly, with no floating-point zero tests.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

# plain {power: coefficient} dicts are used for intermediate odd-power terms
_Terms = dict[int, Fraction]


def _clean(terms: Mapping[int, Fraction]) -> _Terms:
    return {k: Fraction(c) for k, c in terms.items() if c != 0}


def _add(*polys: Mapping[int, Fraction]) -> _Terms:
    out: _Terms = {}
    for poly in polys:
        for k, c in poly.items():
            out[k] = out.get(k, Fraction(0)) + c
    return _clean(out)


def _scale(poly: Mapping[int, Fraction], s) -> _Terms:
    return _clean({k: s * c for k, c in poly.items()})


def _mul(f: Mapping[int, Fraction], g: Mapping[int, Fraction]) -> _Terms:
    out: _Terms = {}
    for i, ci in f.items():
        for j, cj in g.items():
            out[i + j] = out.get(i + j, Fraction(0)) + ci * cj
    return _clean(out)


def _deriv(poly: Mapping[int, Fraction]) -> _Terms:
    return _clean({k - 1: k * c for k, c in poly.items() if k > 0})


def _times_r(poly: Mapping[int, Fraction]) -> _Terms:
    return {k + 1: c for k, c in poly.items()}


@dataclass(frozen=True)
class RadialPolynomial:
    """``sum_k c_k r^k`` over even ``k >= 0`` with exact rational coefficients."""

    coeffs: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        clean = _clean(self.coeffs)
        for k in clean:
            if not isinstance(k, int) or k < 0 or k % 2:
                raise ValueError(f"only even nonnegative powers allowed, got r^{k}")
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    @classmethod
    def monomial(cls, k: int, c=1) -> RadialPolynomial:
        return cls({k: Fraction(c)})

    @classmethod
    def constant(cls, c) -> RadialPolynomial:
        return cls({0: Fraction(c)})

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        return max(self.coeffs, default=-1)

    def __call__(self, r):
        return sum(float(c) * r**k for k, c in self.coeffs.items()) if self.coeffs else 0.0 * r

    def __add__(self, other: RadialPolynomial) -> RadialPolynomial:
        return RadialPolynomial(_add(self.coeffs, other.coeffs))

    def __sub__(self, other: RadialPolynomial) -> RadialPolynomial:
        return RadialPolynomial(_add(self.coeffs, _scale(other.coeffs, -1)))

    def __mul__(self, other):
        if isinstance(other, RadialPolynomial):
            return RadialPolynomial(_mul(self.coeffs, other.coeffs))
        return RadialPolynomial(_scale(self.coeffs, Fraction(other)))

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, RadialPolynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs.items()))

    def __repr__(self):
        if not self.coeffs:
            return "RadialPolynomial(0)"
        body = " + ".join(f"{c}*r^{k}" for k, c in self.coeffs.items())
        return f"RadialPolynomial({body})"


def radial_laplacian(poly: RadialPolynomial, n: int) -> RadialPolynomial:
    """``c r^k -> c k (k+n-2) r^(k-2)``; constants are annihilated."""
    if n < 1:
        raise ValueError("dimension must be >= 1")
    return RadialPolynomial({k - 2: c * k * (k + n - 2) for k, c in poly.coeffs.items() if k > 0})


def iterated_laplacian(poly: RadialPolynomial, n: int, i: int) -> RadialPolynomial:
    if i < 0:
        raise ValueError("i must be >= 0")
    for _ in range(i):
        poly = radial_laplacian(poly, n)
    return poly


def euler_derivative(poly: RadialPolynomial) -> RadialPolynomial:
    """``r d/dr``, the radial form of ``x·∇``."""
    return RadialPolynomial({k: k * c for k, c in poly.coeffs.items()})


def commutator_residual(poly: RadialPolynomial, n: int, i: int) -> RadialPolynomial:
    """``Δ^i(x·∇z) - 2i Δ^i z - x·∇(Δ^i z)``; identically zero."""
    lap_i = iterated_laplacian(poly, n, i)
    return iterated_laplacian(euler_derivative(poly), n, i) - 2 * i * lap_i - euler_derivative(lap_i)


def bilinear_identity_residual(z: RadialPolynomial, w: RadialPolynomial, n: int | None = None) -> RadialPolynomial:
    """Radial form of ``∇z·∇(x·∇w) + ∇w·∇(x·∇z) - 2∇z·∇w - x·∇(∇z·∇w)``.

    With ``'`` = d/dr this is ``z'(r w')' + w'(r z')' - 2 z'w' - r (z'w')'``.
    The dimension does not enter; ``n`` is accepted for a uniform call shape.
    """
    dz, dw = _deriv(z.coeffs), _deriv(w.coeffs)
    grad_dot = _mul(dz, dw)
    terms = _add(
        _mul(dz, _deriv(_times_r(dw))),
        _mul(dw, _deriv(_times_r(dz))),
        _scale(grad_dot, -2),
        _scale(_times_r(_deriv(grad_dot)), -1),
    )
    return RadialPolynomial(terms)


def random_polynomial(rng: random.Random, max_degree: int = 12, max_num: int = 50) -> RadialPolynomial:
    """Random even polynomial with small rational coefficients (for sampled checks)."""
    degree = 2 * rng.randint(0, max_degree // 2)
    coeffs = {}
    for k in range(0, degree + 1, 2):
        if rng.random() < 0.8 or k == degree:
            coeffs[k] = Fraction(rng.randint(-max_num, max_num), rng.randint(1, max_num))
    return RadialPolynomial(coeffs)


def poly_check(cases: int = 500, seed: int = 0, max_degree: int = 12, max_n: int = 10, max_i: int = 4):
    """Run both identities over a sampled family; returns ``{name: (passed, total)}``."""
    rng = random.Random(seed)
    comm_ok = bil_ok = 0
    for _ in range(cases):
        z = random_polynomial(rng, max_degree)
        w = random_polynomial(rng, max_degree)
        n = rng.randint(1, max_n)
        i = rng.randint(0, max_i)
        comm_ok += commutator_residual(z, n, i).is_zero()
        bil_ok += bilinear_identity_residual(z, w, n).is_zero()
    return {
        "commutator": (comm_ok, cases),
        "bilinear": (bil_ok, cases),
    }
