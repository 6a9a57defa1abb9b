"""Exact even moments, per-hyperplane quantities and closed-form references.

Even moments use the expansion of ``E[det(M)^k]`` where the rows of the
``(m+1) x (m+1)`` matrix ``M`` are independent copies of ``(1, x)``.  Row
independence turns every term into a product of normalised monomial moments
of the body; the sum over ``k``-tuples of permutations is organised as a
dynamic programme over rows so that tuples sharing the same partial column
usage are merged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations, product
from math import comb, factorial
from typing import Mapping, Sequence

import numpy as np
from gmpy2 import mpq

from .polytope import (
    DegenerateError,
    Hyperplane,
    Polytope,
    _edge_det,
    slice_polytope,
)
from .rational import ONE, ZERO, Rational, as_rational, det, format_rational

__all__ = [
    "CapacityError",
    "ClosedFormValue",
    "det_power_expectation",
    "det_power_expectation_array",
    "det_power_expectation_bruteforce",
    "even_moment",
    "even_moment_bruteforce",
    "expansion_work",
    "zeta",
    "iota",
    "linear_power_integral",
    "segment_moment",
    "triangle_moment",
    "square_moment",
    "ball_moment",
    "ball_mean",
    "buchta_lift",
    "beta_dqp",
]

DEFAULT_MAX_WORK = 40_000_000


class CapacityError(RuntimeError):
    """The requested expansion is too large to evaluate in reasonable time."""


# ---------------------------------------------------------------------------
# closed-form values a + b pi^2 + c pi^4
# ---------------------------------------------------------------------------

class ClosedFormValue:
    """Rational combination of ``1``, ``pi^2`` and ``pi^4``, or a plain float.

    >>> v = ClosedFormValue(mpq(13, 720), pi2=mpq(-1, 15015))
    >>> round(float(v), 11)
    0.01739823925
    """

    __slots__ = ("coeffs", "approx")

    def __init__(self, rational=0, pi2=0, pi4=0, *, approx: float | None = None):
        if approx is not None:
            self.coeffs = None
            self.approx = float(approx)
            return
        self.coeffs = (as_rational(rational), as_rational(pi2), as_rational(pi4))
        self.approx = None

    @classmethod
    def from_float(cls, value: float) -> "ClosedFormValue":
        return cls(approx=value)

    @property
    def is_exact(self) -> bool:
        return self.coeffs is not None

    @property
    def is_rational(self) -> bool:
        return self.coeffs is not None and self.coeffs[1] == 0 and self.coeffs[2] == 0

    def rational(self) -> Rational:
        if not self.is_rational:
            raise ValueError("value is not a plain rational")
        return self.coeffs[0]

    def __float__(self) -> float:
        if self.coeffs is None:
            return self.approx
        a, b, c = self.coeffs
        # evaluate in extended precision to keep 1e-15 relative accuracy
        from mpmath import mp, mpf, pi

        with mp.workdps(40):
            p2 = pi ** 2
            val = mpf(int(a.numerator)) / int(a.denominator)
            val += p2 * mpf(int(b.numerator)) / int(b.denominator)
            val += p2 * p2 * mpf(int(c.numerator)) / int(c.denominator)
            return float(val)

    def scale(self, factor) -> "ClosedFormValue":
        f = as_rational(factor)
        if self.coeffs is None:
            return ClosedFormValue(approx=self.approx * float(f))
        return ClosedFormValue(*(f * c for c in self.coeffs))

    def __add__(self, other):
        if not isinstance(other, ClosedFormValue):
            other = ClosedFormValue(other)
        if self.coeffs is None or other.coeffs is None:
            return ClosedFormValue(approx=float(self) + float(other))
        return ClosedFormValue(*(a + b for a, b in zip(self.coeffs, other.coeffs)))

    __radd__ = __add__

    def __mul__(self, other):
        return self.scale(other)

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if isinstance(other, ClosedFormValue):
            if self.coeffs is not None and other.coeffs is not None:
                return self.coeffs == other.coeffs
            return float(self) == float(other)
        if self.is_rational:
            try:
                return self.coeffs[0] == as_rational(other)
            except TypeError:
                return NotImplemented
        return False

    def __hash__(self):
        return hash(self.coeffs if self.coeffs is not None else self.approx)

    def __str__(self) -> str:
        if self.coeffs is None:
            return f"{self.approx:.15g}"
        parts = []
        for coef, atom in zip(self.coeffs, ("", "pi^2", "pi^4")):
            if coef == 0:
                continue
            body = format_rational(abs(coef))
            if atom:
                body = atom if body == "1" else f"{body}*{atom}"
            parts.append(("-" if coef < 0 else "+", body))
        if not parts:
            return "0"
        text = ("-" if parts[0][0] == "-" else "") + parts[0][1]
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self) -> str:
        return f"ClosedFormValue({self})"


# ---------------------------------------------------------------------------
# even moments
# ---------------------------------------------------------------------------

def expansion_work(m: int, k: int) -> int:
    """Rough count of inner-loop steps of :func:`det_power_expectation`."""
    work = 0
    for r in range(m + 1):
        n_sets = comb(m + 1, r)
        states = comb(n_sets + k - 2, k - 1) if k > 1 else 1
        work += states * (m + 1 - r) ** (k - 1)
    return work


def det_power_expectation(moments: Mapping, m: int, k: int,
                          max_work: int = DEFAULT_MAX_WORK) -> Rational:
    """``E[det(M)^k]`` for i.i.d. rows ``(1, x)`` with the given moments.

    ``moments`` maps exponent tuples of length ``m`` to ``E[x^alpha]``.  The
    first permutation of every tuple is fixed to the identity (rows are
    exchangeable, giving the factor ``(m+1)!``).  The remaining ``k-1``
    permutations are built row by row; a DP state is the sorted tuple of
    their used-column bitmasks, and states reached by different labelled
    choices are merged because the remaining sum only depends on the state.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return ONE
    if expansion_work(m, k) > max_work:
        raise CapacityError(
            f"det^{k} expansion in dimension {m} needs about {expansion_work(m, k):,} steps;"
            f" raise max_work (currently {max_work:,}) if you really want this"
        )
    return _det_dp(moments, m, k, ONE) * factorial(m + 1)


def det_power_expectation_array(moments: Mapping, m: int, k: int) -> np.ndarray:
    """Vectorised :func:`det_power_expectation` for moments given as float arrays.

    Every entry of ``moments`` is an array of the same shape (one value per
    body); the same dynamic programme runs elementwise.
    """
    if k == 0:
        return np.ones_like(next(iter(moments.values())))
    return _det_dp(moments, m, k, 1.0) * factorial(m + 1)


def _det_dp(moments, m, k, one):
    n = m + 1
    states = {(0,) * (k - 1): one}
    for r in range(n):
        new_states: dict = {}
        for masks, w in states.items():
            options = [[c for c in range(n) if not (mk >> c) & 1] for mk in masks]
            for combo in product(*options):
                counts = [0] * n
                counts[r] += 1
                parity = 0
                for mk, c in zip(masks, combo):
                    counts[c] += 1
                    parity += bin(mk >> (c + 1)).count("1")
                a = moments[tuple(counts[1:])]
                if isinstance(a, Rational) and a == 0:
                    continue
                key = tuple(sorted(mk | (1 << c) for mk, c in zip(masks, combo)))
                term = w * a
                if parity & 1:
                    term = -term
                got = new_states.get(key)
                new_states[key] = term if got is None else got + term
        states = new_states
    total = None
    for v in states.values():
        total = v if total is None else total + v
    return ZERO if total is None else total


def _det_polynomial(m: int) -> dict:
    """Leibniz expansion of det of rows ``(1, x_i)`` as {exponents: coef}.

    Exponents are stored per row as tuples of length ``m``.
    """
    n = m + 1
    poly: dict = {}
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        rows = []
        for i in range(n):
            e = [0] * m
            if perm[i] > 0:
                e[perm[i] - 1] = 1
            rows.append(tuple(e))
        key = tuple(rows)
        poly[key] = poly.get(key, 0) + (-1 if inv & 1 else 1)
    return poly


def _poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for k1, c1 in p.items():
        for k2, c2 in q.items():
            key = tuple(tuple(a + b for a, b in zip(r1, r2)) for r1, r2 in zip(k1, k2))
            out[key] = out.get(key, 0) + c1 * c2
    return {k: c for k, c in out.items() if c}


def det_power_expectation_bruteforce(moments: Mapping, m: int, k: int) -> Rational:
    """Reference value of ``E[det(M)^k]`` by full polynomial expansion.

    Used only to validate :func:`det_power_expectation` on small cases.
    """
    base = _det_polynomial(m)
    poly = {tuple((0,) * m for _ in range(m + 1)): 1}
    for _ in range(k):
        poly = _poly_mul(poly, base)
    total = ZERO
    for rows, coef in poly.items():
        term = mpq(coef)
        for e in rows:
            term *= moments[e]
        total += term
    return total


def _chart_points(Q: Polytope):
    m = Q.intrinsic_dim
    if m <= 0:
        raise DegenerateError("even moments need a polytope of positive dimension")
    return m


def even_moment(Q: Polytope, k: int, max_work: int = DEFAULT_MAX_WORK) -> Rational:
    """Exact ``v_m^(k)(Q) = E[Delta^k] / vol(Q)^k`` for even ``k``.

    ``m`` is the affine dimension of ``Q``; lower-dimensional polytopes are
    handled in their chart, which is legitimate because the normalised moment
    is affinely invariant.
    """
    k = int(k)
    if k % 2:
        raise ValueError("even_moment needs an even exponent; odd moments go through the section integral")
    if k < 0:
        raise ValueError("k must be non-negative")
    m = _chart_points(Q)
    if k == 0:
        return ONE
    mom = Q.moments(k)
    e_det = det_power_expectation(mom, m, k, max_work=max_work)
    return e_det / (mpq(factorial(m)) ** k * Q.volume ** k)


def even_moment_bruteforce(Q: Polytope, k: int) -> Rational:
    """Same as :func:`even_moment` but through the full det^k expansion."""
    m = _chart_points(Q)
    mom = Q.moments(k)
    e_det = det_power_expectation_bruteforce(mom, m, k)
    return e_det / (mpq(factorial(m)) ** k * Q.volume ** k)


# ---------------------------------------------------------------------------
# per-hyperplane quantities
# ---------------------------------------------------------------------------

def _complete_homogeneous(values: Sequence, k: int) -> Rational:
    """h_k(values), the sum of all degree-k monomials in the values."""
    h = [ONE] + [ZERO] * k
    for x in values:
        if x == 0:
            continue
        for j in range(1, k + 1):
            h[j] = h[j] + x * h[j - 1]
    return h[k]


def linear_power_integral(points: Sequence[Sequence], values: Sequence, k: int) -> Rational:
    """Integral over a full simplex of ``l(x)^k`` for an affine ``l``.

    ``values`` are ``l`` at the simplex vertices.  The formula is
    ``vol * m! k!/(m+k)! * h_k(values)``.
    """
    m = len(points) - 1
    vol = abs(_edge_det(points)) / factorial(m)
    return vol * mpq(factorial(m) * factorial(k), factorial(m + k)) * _complete_homogeneous(values, k)


def zeta(P: Polytope, H: Hyperplane) -> Rational:
    """``vol_{d-1}(section) / (|eta| vol P)`` computed through cones from the origin.

    The cone over a section simplex with apex at the origin has volume
    ``|det(u_0..u_{d-1})| / d!`` and height ``1/|eta|``, which gives
    ``vol_{d-1}/|eta| = sum |det| / (d-1)!``; everything stays rational.
    """
    _, _, sec = slice_polytope(P, H)
    d = P.dim
    if sec.is_empty or sec.intrinsic_dim < d - 1:
        return ZERO
    pts = sec.vertices
    total = ZERO
    for s in sec.triangulation_indices:
        total += abs(det([pts[i] for i in s]))
    return total / (factorial(d - 1) * P.volume)


def iota(P: Polytope, H: Hyperplane, k: int) -> Rational:
    """``integral over P of |eta . x - 1|^k`` for a non-negative integer ``k``."""
    k = int(k)
    if k < 0:
        raise ValueError("iota is only exact for integer k >= 0")
    plus, minus, _ = slice_polytope(P, H)
    total = ZERO
    for piece, sign in ((plus, -1), (minus, 1)):
        if piece.is_empty or piece.intrinsic_dim < P.dim:
            continue
        pts = piece.vertices
        for s in piece.triangulation_indices:
            spts = [pts[i] for i in s]
            vals = [sign * H.value(p) for p in spts]
            total += linear_power_integral(spts, vals, k)
    return total


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def segment_moment(k: int) -> Rational:
    """``v_1^(k)`` of a segment: ``2/((1+k)(2+k))``."""
    k = int(k)
    if k <= -1:
        raise ValueError("k must exceed -1")
    return mpq(2, (1 + k) * (2 + k))


def triangle_moment(k: int) -> Rational:
    """Area moments of a random triangle in a triangle."""
    k = int(k)
    if k < 0:
        raise ValueError("k must be a non-negative integer")
    s = sum((mpq(factorial(j), (k - j + 2) * factorial(k + j + 3)) for j in range(k + 2)), ZERO)
    return 48 * mpq(factorial(k), (2 + k) * (3 + k)) * s


def square_moment(k: int) -> Rational:
    """Area moments of a random triangle in a square."""
    k = int(k)
    if k < 0:
        raise ValueError("k must be a non-negative integer")
    harmonic = sum((mpq(1, j) for j in range(1, k + 3)), ZERO)
    return 24 * harmonic / (2 ** k * (1 + k) * (2 + k) ** 2 * (3 + k) ** 2)


@dataclass(frozen=True)
class _PiPower:
    """``coef * pi^(half/2)``: enough to evaluate Gamma at half-integers exactly."""

    coef: Rational
    half: int

    def __mul__(self, other: "_PiPower") -> "_PiPower":
        return _PiPower(self.coef * other.coef, self.half + other.half)

    def __truediv__(self, other: "_PiPower") -> "_PiPower":
        return _PiPower(self.coef / other.coef, self.half - other.half)

    def __pow__(self, e: int) -> "_PiPower":
        if e >= 0:
            return _PiPower(self.coef ** e, self.half * e)
        return _PiPower(1 / self.coef ** (-e), self.half * e)


def _gamma_half(twice_x: int) -> _PiPower:
    """Gamma(x) for x = twice_x/2 > 0."""
    if twice_x <= 0:
        raise ValueError("Gamma argument must be positive")
    if twice_x % 2 == 0:
        return _PiPower(mpq(factorial(twice_x // 2 - 1)), 0)
    n = (twice_x - 1) // 2  # x = n + 1/2
    return _PiPower(mpq(factorial(2 * n), 4 ** n * factorial(n)), 1)


def ball_moment(d: int, k: int) -> ClosedFormValue:
    """Volumetric moment of a random simplex in the d-ball (Miles' formula).

    Exact whenever the powers of pi cancel (as for every integer ``k`` with
    ``d`` odd, or ``k`` even); otherwise a float is returned.
    """
    d, k = int(d), int(k)
    if d < 1 or k < 1:
        raise ValueError("need d >= 1 and k >= 1")
    g = _gamma_half
    unit = _PiPower(ONE, 0)
    pi_d = _PiPower(ONE, d)  # pi^(d/2)
    vol_unit = g(d + 2) / (pi_d * _PiPower(mpq(factorial(d)), 0))
    val = vol_unit ** k
    val = val * _PiPower(mpq(d, d + k) ** (d + 1), 0)
    val = val * (g((d + 1) * (d + k) + 2) / g(d * (d + k + 1) + 2))
    val = val * (g(d) / g(d + k)) ** d
    prod_l = unit
    for l in range(1, d):
        prod_l = prod_l * (g(k + l) / g(l))
    val = val * prod_l
    if val.half == 0:
        return ClosedFormValue(val.coef)
    if val.half % 4 == 0 and abs(val.half) <= 8:
        # integer power of pi^2: store exactly when it is pi^2 or pi^4
        if val.half == 4:
            return ClosedFormValue(0, val.coef)
        if val.half == 8:
            return ClosedFormValue(0, 0, val.coef)
    return ClosedFormValue(approx=float(val.coef) * math.pi ** (val.half / 2))


def ball_mean(d: int) -> ClosedFormValue:
    """Mean volume of a random simplex in the d-ball relative to the ball volume."""
    return ball_moment(d, 1)


def buchta_lift(v, d: int):
    """``v_{d+1}^(1)(K) = (d+2)/2 * v_d^(1)(K)`` for a d-dimensional body."""
    factor = mpq(int(d) + 2, 2)
    if isinstance(v, ClosedFormValue):
        return v.scale(factor)
    if isinstance(v, float):
        return v * float(factor)
    return as_rational(v) * factor


def beta_dqp(d: int, q: int, p: int) -> float:
    """Float value of the Blaschke-Petkantschin constant beta_{d,q,p}."""
    lg = math.lgamma
    val = (d - q) * math.log(math.factorial(p))
    val += p * (d - q) / 2 * math.log(math.pi)
    for j in range(p):
        val += lg((q - j) / 2) - lg((d - j) / 2)
    return math.exp(val)
