"""Exact rational linear programming for strict feasibility questions.

The solver is a dense two-phase simplex method with Bland's rule, which is
plenty for the systems met here (at most a few dozen constraints in at most
seven variables) and never cycles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from gmpy2 import mpq

from .rational import ONE, ZERO, Rational, as_rational, as_vector, dot

__all__ = [
    "LinearInequality",
    "EmptyRegionError",
    "LPResult",
    "maximize",
    "strict_feasible",
    "interior_point",
    "BOX_CAP",
]

BOX_CAP = 10


class EmptyRegionError(ValueError):
    """The open region described by a set of strict inequalities is empty."""


@dataclass(frozen=True)
class LinearInequality:
    """``coeffs . x < rhs`` when ``strict``, otherwise ``coeffs . x <= rhs``."""

    coeffs: tuple
    rhs: Rational
    strict: bool = True

    def __init__(self, coeffs: Iterable, rhs, strict: bool = True):
        object.__setattr__(self, "coeffs", as_vector(coeffs))
        object.__setattr__(self, "rhs", as_rational(rhs))
        object.__setattr__(self, "strict", bool(strict))

    def holds(self, x: Sequence) -> bool:
        v = dot(self.coeffs, x)
        return v < self.rhs if self.strict else v <= self.rhs

    def slack(self, x: Sequence) -> Rational:
        return self.rhs - dot(self.coeffs, x)


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    value: Rational | None
    x: tuple | None


def _pivot(tab, basis, row, col):
    prow = tab[row]
    inv = 1 / prow[col]
    if inv != 1:
        tab[row] = prow = [v * inv for v in prow]
    for i, r in enumerate(tab):
        if i != row:
            f = r[col]
            if f != 0:
                tab[i] = [a - f * b for a, b in zip(r, prow)]
    basis[row] = col


def _run_simplex(tab, basis, n_cols, allowed):
    """Maximise the objective stored in the last row (as ``-c``)."""
    obj = len(tab) - 1
    while True:
        col = None
        for j in range(n_cols):
            if allowed[j] and tab[obj][j] < 0:
                col = j
                break
        if col is None:
            return "optimal"
        row = None
        best = None
        for i in range(obj):
            a = tab[i][col]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[row]):
                    best, row = ratio, i
        if row is None:
            return "unbounded"
        _pivot(tab, basis, row, col)


def maximize(c: Sequence, A: Sequence[Sequence], b: Sequence) -> LPResult:
    """Maximise ``c . z`` subject to ``A z <= b`` and ``z >= 0`` exactly."""
    c = [mpq(v) for v in c]
    A = [[mpq(v) for v in row] for row in A]
    b = [mpq(v) for v in b]
    m, n = len(A), len(c)
    # columns: n structural, m slacks, then artificials for negative rows
    neg = [i for i in range(m) if b[i] < 0]
    n_art = len(neg)
    width = n + m + n_art
    tab = []
    basis = []
    art_col = {}
    for i in range(m):
        sign = -1 if b[i] < 0 else 1
        row = [sign * v for v in A[i]] + [ZERO] * (m + n_art) + [sign * b[i]]
        row[n + i] = mpq(sign)
        if sign < 0:
            k = n + m + len(art_col)
            art_col[i] = k
            row[k] = ONE
            basis.append(k)
        else:
            basis.append(n + i)
        tab.append(row)
    if n_art:
        # phase 1: maximise -(sum of artificials)
        obj = [ZERO] * (width + 1)
        for i, k in art_col.items():
            obj = [o - r for o, r in zip(obj, tab[i])]
            obj[k] = ZERO
        tab.append(obj)
        _run_simplex(tab, basis, width, [True] * width)
        if tab[-1][-1] != 0:
            return LPResult("infeasible", None, None)
        tab.pop()
        # drive remaining artificial variables out of the basis
        for i, k in enumerate(basis):
            if k >= n + m:
                for j in range(n + m):
                    if tab[i][j] != 0:
                        _pivot(tab, basis, i, j)
                        break
    allowed = [j < n + m for j in range(width)]
    obj = [-v for v in c] + [ZERO] * (m + n_art) + [ZERO]
    for i, k in enumerate(basis):
        if k < n and c[k] != 0:
            f = obj[k]
            obj = [o - f * r for o, r in zip(obj, tab[i])]
    tab.append(obj)
    status = _run_simplex(tab, basis, width, allowed)
    if status == "unbounded":
        return LPResult("unbounded", None, None)
    z = [ZERO] * n
    for i, k in enumerate(basis):
        if k < n:
            z[k] = tab[i][-1]
    return LPResult("optimal", tab[-1][-1], tuple(z))


def _homogeneous_margin(ineqs: Sequence[LinearInequality]):
    """Solve the homogenised margin problem.

    Variables are ``x = xp - xm`` (free), ``tau >= 0`` and the margin ``t``.
    Constraints ``a.x - b tau + t <= 0`` (strict rows), ``a.x - b tau <= 0``
    (non-strict rows), ``t <= tau`` and ``t <= 1``.  The right-hand sides are
    all non-negative, so the origin is a feasible start.  The open region is
    non-empty iff the optimal margin is positive; then ``x / tau`` lies in it.
    """
    d = len(ineqs[0].coeffs)
    rows, rhs = [], []
    for q in ineqs:
        a = list(q.coeffs)
        rows.append(a + [-v for v in a] + [-q.rhs, ONE if q.strict else ZERO])
        rhs.append(ZERO)
    rows.append([ZERO] * (2 * d) + [-ONE, ONE])
    rhs.append(ZERO)
    rows.append([ZERO] * (2 * d) + [ZERO, ONE])
    rhs.append(ONE)
    c = [ZERO] * (2 * d) + [ZERO, ONE]
    res = maximize(c, rows, rhs)
    if res.status != "optimal" or res.value <= 0:
        return None
    z = res.x
    tau = z[2 * d]
    return tuple((z[i] - z[d + i]) / tau for i in range(d))


def strict_feasible(inequalities: Sequence[LinearInequality]) -> bool:
    """Decide whether the (open) region cut out by the inequalities is non-empty.

    The answer is exact: it comes from a rational LP with an explicit margin
    variable, never from floating point.
    """
    ineqs = list(inequalities)
    if not ineqs:
        return True
    return _homogeneous_margin(ineqs) is not None


def interior_point(inequalities: Sequence[LinearInequality], cap=BOX_CAP) -> tuple:
    """Exact point strictly inside the region.

    First the margin ``t`` in ``a.x + t |a|_1 <= b`` is maximised inside the
    box ``|x_j| <= cap`` (with ``t <= 1``), which gives a well-centred point
    when the region reaches into the box.  Regions that lie entirely outside
    the box fall back to the homogenised problem used by
    :func:`strict_feasible`.  Raises :class:`EmptyRegionError` when the region
    is empty.
    """
    ineqs = list(inequalities)
    if not ineqs:
        raise ValueError("no inequalities given; the dimension is unknown")
    d = len(ineqs[0].coeffs)
    cap = as_rational(cap)
    # shift x = y - cap so that y >= 0
    rows, rhs = [], []
    for q in ineqs:
        a = list(q.coeffs)
        norm1 = sum((abs(v) for v in a), ZERO)
        rows.append(a + [norm1 if q.strict else ZERO])
        rhs.append(q.rhs + cap * sum(a, ZERO))
    for j in range(d):
        e = [ZERO] * (d + 1)
        e[j] = ONE
        rows.append(e)
        rhs.append(2 * cap)
    rows.append([ZERO] * d + [ONE])
    rhs.append(ONE)
    res = maximize([ZERO] * d + [ONE], rows, rhs)
    if res.status == "optimal" and res.value > 0:
        x = tuple(v - cap for v in res.x[:d])
        if all(q.holds(x) for q in ineqs):
            return x
    x = _homogeneous_margin(ineqs)
    if x is None:
        raise EmptyRegionError("the region has empty interior")
    return x
