"""Exact rational scalars and small dense linear algebra over them.

Every geometric predicate in the package is decided on ``mpq`` values from
gmpy2, which behave like :class:`fractions.Fraction` (always reduced, positive
denominator) but are roughly ten times faster.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from numbers import Rational as _RationalABC
from typing import Iterable, Sequence

from gmpy2 import mpq

Rational = type(mpq(0))

ZERO = mpq(0)
ONE = mpq(1)

__all__ = [
    "Rational",
    "as_rational",
    "as_vector",
    "det",
    "rank",
    "solve",
    "nullspace",
    "dot",
    "format_rational",
    "parse_rational",
    "to_fraction",
    "ZERO",
    "ONE",
]


def as_rational(x) -> Rational:
    """Convert ints, Fractions, strings like ``"3/4"`` and floats exactly.

    Floats are converted to the dyadic rational they represent, so no
    rounding happens here.
    """
    if isinstance(x, Rational):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not coordinates")
    if isinstance(x, int):
        return mpq(x)
    if isinstance(x, Fraction) or isinstance(x, _RationalABC):
        return mpq(int(x.numerator), int(x.denominator))
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        return mpq(x)
    if hasattr(x, "item"):  # numpy scalar
        return as_rational(x.item())
    raise TypeError(f"cannot interpret {x!r} as a rational number")


def as_vector(xs: Iterable) -> tuple:
    return tuple(as_rational(x) for x in xs)


def parse_rational(text: str) -> Rational:
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        den_v = int(den)
        if den_v == 0:
            raise ZeroDivisionError(f"zero denominator in {text!r}")
        return mpq(int(num), den_v)
    return mpq(Fraction(text))


def format_rational(q) -> str:
    """Render as ``p/q`` (or ``p`` for integers)."""
    q = as_rational(q)
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


def to_fraction(q) -> Fraction:
    q = as_rational(q)
    return Fraction(int(q.numerator), int(q.denominator))


def dot(u: Sequence, v: Sequence):
    return sum((a * b for a, b in zip(u, v)), ZERO)


def _echelon(rows):
    """Row-reduce a copy of ``rows``; return (matrix, pivot columns, sign)."""
    m = [[mpq(v) for v in r] for r in rows]
    n_rows = len(m)
    n_cols = len(m[0]) if m else 0
    pivots = []
    sign = 1
    r = 0
    for c in range(n_cols):
        piv = None
        for i in range(r, n_rows):
            if m[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        if piv != r:
            m[r], m[piv] = m[piv], m[r]
            sign = -sign
        pr = m[r]
        inv = 1 / pr[c]
        for i in range(r + 1, n_rows):
            f = m[i][c]
            if f != 0:
                f = f * inv
                row = m[i]
                for j in range(c, n_cols):
                    row[j] -= f * pr[j]
        pivots.append(c)
        r += 1
        if r == n_rows:
            break
    return m, pivots, sign


def det(rows: Sequence[Sequence]) -> Rational:
    """Determinant of a square matrix given as a list of rows."""
    n = len(rows)
    if n == 0:
        return ONE
    if n == 1:
        return mpq(rows[0][0])
    if n == 2:
        (a, b), (c, d) = rows
        return mpq(a * d - b * c)
    if n == 3:
        (a, b, c), (d, e, f), (g, h, i) = rows
        return mpq(a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g))
    m, pivots, sign = _echelon(rows)
    if len(pivots) < n:
        return ZERO
    out = mpq(sign)
    for i in range(n):
        out *= m[i][i]
    return out


def rank(rows: Sequence[Sequence]) -> int:
    if not rows:
        return 0
    return len(_echelon(rows)[1])


def solve(a: Sequence[Sequence], b: Sequence):
    """Solve the square system ``a x = b``; return None when singular."""
    n = len(a)
    aug = [list(map(mpq, row)) + [mpq(bi)] for row, bi in zip(a, b)]
    m, pivots, _ = _echelon(aug)
    if len(pivots) < n or pivots[-1] == n:
        return None
    x = [ZERO] * n
    for i in range(n - 1, -1, -1):
        s = m[i][n]
        for j in range(i + 1, n):
            s -= m[i][j] * x[j]
        x[i] = s / m[i][i]
    return tuple(x)


def nullspace(rows: Sequence[Sequence]) -> list:
    """Basis of the right null space of ``rows`` (exact)."""
    if not rows:
        return []
    n_cols = len(rows[0])
    m, pivots, _ = _echelon(rows)
    # back-substitute to reduced row echelon form
    for i in range(len(pivots) - 1, -1, -1):
        c = pivots[i]
        inv = 1 / m[i][c]
        m[i] = [v * inv for v in m[i]]
        for k in range(i):
            f = m[k][c]
            if f != 0:
                m[k] = [a - f * b for a, b in zip(m[k], m[i])]
    free = [c for c in range(n_cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [ZERO] * n_cols
        v[fc] = ONE
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(tuple(v))
    return basis


def primitive_integer(vec: Sequence) -> tuple:
    """Scale a rational vector to coprime integers, keeping its direction."""
    from math import gcd, lcm

    den = 1
    for v in vec:
        den = lcm(den, int(mpq(v).denominator))
    ints = [int(mpq(v) * den) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g == 0:
        return tuple(ints)
    return tuple(v // g for v in ints)


def simplex_volume_factor(m: int) -> Rational:
    return mpq(1, factorial(m))
