"""One-dimensional rules on [0, 1] and collapsed tensor rules on simplices.

Rules return the node, its complement ``1 - x`` (computed directly, which
matters for tanh-sinh nodes that crowd the endpoints) and the weight.  The
tanh-sinh rules are nested: the rule at level ``l`` uses step ``2**-l`` and
contains every node of level ``l - 1``, so one tensor grid gives two
estimates and their difference is the error indicator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "QuadratureSpec",
    "Rule1D",
    "tanh_sinh",
    "gauss_legendre",
    "collapsed_simplex_rule",
]

T_MAX = 3.0


@dataclass(frozen=True)
class QuadratureSpec:
    """How the outer integral over each configuration region is computed.

    ``scheme`` is ``"tanh-sinh"`` (nested levels, ``level`` is the finest
    one tried first and refinement continues up to ``max_level``) or
    ``"gauss-legendre"`` (``nodes`` per axis, compared against half as many).
    ``tol`` is the target relative error; ``precision`` selects float node
    evaluation (``"float64"``) or exact rational evaluation (``"exact"``,
    slow, meant for small checks).
    """

    scheme: str = "tanh-sinh"
    nodes: int = 16
    level: int = 3
    max_level: int = 4
    tol: float = 1e-6
    precision: str = "float64"
    chunk: int = 200_000

    def __post_init__(self):
        if self.scheme not in ("tanh-sinh", "gauss-legendre"):
            raise ValueError(f"unknown quadrature scheme {self.scheme!r}")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")
        if self.nodes < 4:
            raise ValueError("at least 4 nodes per axis are required")
        if self.level < 1 or self.max_level < self.level:
            raise ValueError("need 1 <= level <= max_level")
        if self.precision not in ("float64", "exact"):
            raise ValueError(f"unknown precision {self.precision!r}")

    def as_dict(self) -> dict:
        return {
            "scheme": self.scheme, "nodes": self.nodes, "level": self.level,
            "max_level": self.max_level, "tol": self.tol, "precision": self.precision,
        }


@dataclass(frozen=True)
class Rule1D:
    x: np.ndarray
    xbar: np.ndarray
    w: np.ndarray
    coarse: np.ndarray  # weights of the embedded coarser rule (0 off its nodes)

    def __len__(self) -> int:
        return len(self.x)


@lru_cache(maxsize=None)
def tanh_sinh(level: int, t_max: float = T_MAX) -> Rule1D:
    """Tanh-sinh rule on [0, 1] with step ``2**-level``, truncated at |t| <= t_max.

    ``x = 1 / (1 + exp(-pi sinh t))`` and ``w = h pi cosh(t) x (1 - x)``.
    """
    h = 2.0 ** -level
    j = np.arange(-int(t_max / h), int(t_max / h) + 1)
    t = j * h
    s = math.pi * np.sinh(t)
    x = 1.0 / (1.0 + np.exp(-s))
    xbar = 1.0 / (1.0 + np.exp(s))
    w = h * math.pi * np.cosh(t) * x * xbar
    coarse = np.where(j % 2 == 0, 2.0 * w, 0.0)
    return Rule1D(x, xbar, w, coarse)


@lru_cache(maxsize=None)
def gauss_legendre(n: int) -> Rule1D:
    """n-point Gauss-Legendre rule mapped to [0, 1]."""
    z, w = np.polynomial.legendre.leggauss(n)
    x = (1.0 + z) / 2.0
    xbar = (1.0 - z) / 2.0
    return Rule1D(x, xbar, w / 2.0, np.zeros(n))


def collapsed_simplex_rule(rule: Rule1D, d: int, chunk: int = 200_000):
    """Yield ``(lam, weights, coarse_weights)`` blocks for the standard d-simplex.

    The cube ``[0,1]^d`` is collapsed onto the simplex by ``lam_1 = u_1``,
    ``lam_i = (1-u_1)...(1-u_{i-1}) u_i`` with Jacobian
    ``prod (1-u_i)^(d-i)``; ``lam`` has ``d + 1`` columns, column 0 being
    the remaining barycentric weight.  Weights integrate over a simplex of
    volume ``1/d!``.
    """
    n = len(rule)
    total = n ** d
    for start in range(0, total, chunk):
        flat = np.arange(start, min(start + chunk, total))
        idx = np.unravel_index(flat, (n,) * d)
        lam = np.empty((len(flat), d + 1))
        w = np.ones(len(flat))
        wc = np.ones(len(flat))
        rem = np.ones(len(flat))
        for i, ix in enumerate(idx):
            u, ubar = rule.x[ix], rule.xbar[ix]
            lam[:, i + 1] = rem * u
            rem = rem * ubar
            jac = ubar ** (d - 1 - i)
            w *= rule.w[ix] * jac
            wc *= rule.coarse[ix] * jac
        lam[:, 0] = rem
        yield lam, w, wc
