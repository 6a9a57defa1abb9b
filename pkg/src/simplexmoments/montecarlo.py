"""Monte Carlo oracle: uniform points in polytopes and simplex-volume moments.

Randomness comes from Philox, a counter-based generator.  A run of ``N``
samples is cut into fixed blocks and block ``b`` draws from the ``b``-th
child of ``SeedSequence(seed)``.  The blocks are independent of how the
work is scheduled, so a given ``(seed, N, chunk)`` always gives the same
numbers.

For ``n = d`` the estimator of an odd moment can use the next even power of
the normalised volume as a control variate, since its expectation is known
exactly.  Both the plain and the adjusted intervals are reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import factorial

import numpy as np
from gmpy2 import mpq

from .polytope import Hyperplane, Polytope, slice_polytope

__all__ = [
    "SamplerState",
    "MomentEstimate",
    "sample_uniform",
    "mc_moment",
    "gamma_samples",
    "mc_gamma",
    "efron_mean",
    "MIN_SAMPLES",
]

MIN_SAMPLES = 1000
Z95 = 1.959963984540054
DEFAULT_CHUNK = 250_000


# ---------------------------------------------------------------------------
# sampling
# ---------------------------------------------------------------------------

class SamplerState:
    """Triangulation with a cumulative volume table plus a Philox stream.

    ``position`` counts the points drawn so far.  The geometric part is
    shared read-only; each worker should build its own state from a spawned
    seed (see :meth:`spawn`).
    """

    def __init__(self, P: Polytope, seed=0):
        if not P.is_full_dimensional:
            raise ValueError("sampling needs a full-dimensional polytope")
        simplices = P.simplices()
        self.polytope = P
        self.d = P.dim
        self.simplices = np.array([[[float(c) for c in v] for v in s.points] for s in simplices])
        vols = np.array([float(s.volume()) for s in simplices])
        self.cumulative = np.cumsum(vols)
        self.total = float(P.volume)
        self.seed = seed
        self.position = 0
        self._seq = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
        self._gen = np.random.Generator(np.random.Philox(self._seq))
        if np.any(np.diff(self.cumulative) <= 0):
            raise ValueError("cumulative volume table must be strictly increasing")

    @property
    def generator(self) -> np.random.Generator:
        return self._gen

    def spawn(self, count: int) -> list:
        """Independent child states (disjoint Philox streams)."""
        return [SamplerState(self.polytope, child) for child in self._seq.spawn(count)]

    def draw(self, size: int) -> np.ndarray:
        pts = _uniform_points(self._gen, self.simplices, self.cumulative, size)
        self.position += size
        return pts


def _barycentric(gen: np.random.Generator, shape: tuple) -> np.ndarray:
    e = gen.standard_exponential(shape)
    return e / e.sum(axis=-1, keepdims=True)


def _uniform_points(gen, simplices, cumulative, size) -> np.ndarray:
    d = simplices.shape[-1]
    lam = _barycentric(gen, (size, d + 1))
    if len(simplices) == 1:
        return lam @ simplices[0]
    which = np.searchsorted(cumulative, gen.random(size) * cumulative[-1], side="right")
    which = np.minimum(which, len(simplices) - 1)
    return np.einsum("ni,nij->nj", lam, simplices[which])


def sample_uniform(state: SamplerState, size: int | None = None) -> np.ndarray:
    """One uniform point (``size=None``) or an array of ``size`` points."""
    if size is None:
        return state.draw(1)[0]
    return state.draw(int(size))


# ---------------------------------------------------------------------------
# streaming statistics
# ---------------------------------------------------------------------------

class _CoMoments:
    """Running mean vector and co-moment matrix, merged blockwise (Chan et al.)."""

    def __init__(self, width: int):
        self.n = 0
        self.mean = np.zeros(width)
        self.M = np.zeros((width, width))

    def add(self, Z: np.ndarray):
        nb = len(Z)
        bm = Z.mean(axis=0)
        D = Z - bm
        n = self.n + nb
        delta = bm - self.mean
        self.M += D.T @ D + np.outer(delta, delta) * (self.n * nb / n)
        self.mean += delta * nb / n
        self.n = n


@dataclass
class MomentEstimate:
    """Estimate of ``v_n^(k)`` with a 95% normal-theory interval."""

    mean: float
    ci95: tuple
    N: int
    k: float
    n: int
    d: int
    std_error: float
    plain_mean: float
    plain_ci95: tuple
    control: dict | None = None
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        lo, hi = self.ci95
        if not lo <= self.mean <= hi:
            raise ValueError("interval does not contain the estimate")

    @property
    def half_width(self) -> float:
        return (self.ci95[1] - self.ci95[0]) / 2

    def contains(self, value: float) -> bool:
        return self.ci95[0] <= value <= self.ci95[1]

    def as_dict(self) -> dict:
        return {
            "mean": self.mean, "ci95": list(self.ci95), "N": self.N, "k": self.k, "n": self.n,
            "d": self.d, "std_error": self.std_error, "plain_mean": self.plain_mean,
            "plain_ci95": list(self.plain_ci95), "control": self.control, "seed": self.seed,
            **self.extra,
        }


def _interval(mean: float, var: float, N: int) -> tuple:
    se = math.sqrt(max(var, 0.0) / N)
    return (mean - Z95 * se, mean + Z95 * se), se


# ---------------------------------------------------------------------------
# volumes of random simplices and hulls
# ---------------------------------------------------------------------------

def _simplex_volumes(state: SamplerState, gen, count: int) -> np.ndarray:
    """Normalised volumes of ``count`` random d-simplices."""
    d = state.d
    if len(state.simplices) == 1:
        # barycentric rows: volume ratio is |det| of the (d+1)x(d+1) matrix
        lam = _barycentric(gen, (count, d + 1, d + 1))
        return np.abs(np.linalg.det(lam))
    pts = _uniform_points(gen, state.simplices, state.cumulative, count * (d + 1)).reshape(count, d + 1, d)
    edges = pts[:, 1:, :] - pts[:, :1, :]
    return np.abs(np.linalg.det(edges)) / (factorial(d) * state.total)


def _hull_volumes(state: SamplerState, gen, count: int, n: int) -> np.ndarray:
    from scipy.spatial import ConvexHull

    d = state.d
    pts = _uniform_points(gen, state.simplices, state.cumulative, count * (n + 1)).reshape(count, n + 1, d)
    if d == 1:
        return (pts[..., 0].max(axis=1) - pts[..., 0].min(axis=1)) / state.total
    return np.array([ConvexHull(p).volume for p in pts]) / state.total


def _control_exponents(P: Polytope, k: float, n: int) -> tuple:
    """Even powers of V used as control variates for odd integer ``k``.

    Simplices get three (their exact even moments are cheap); other bodies
    get one.
    """
    if n != P.dim or not float(k).is_integer() or int(k) % 2 == 0:
        return ()
    count = 3 if len(P.vertices) == P.dim + 1 else 1
    return tuple(int(k) + 1 + 2 * i for i in range(count))


def mc_moment(P: Polytope, n: int, k: float, N: int, seed: int = 0, *,
              chunk: int = DEFAULT_CHUNK, control_variate: bool = True) -> MomentEstimate:
    """Monte Carlo estimate of ``v_n^(k)(P)`` from ``N`` random hulls of ``n+1`` points.

    For ``n = d`` and odd integer ``k`` the estimate is adjusted with even
    powers ``V^(k+1), V^(k+3), ...`` as control variates, whose means are
    exact even moments (see :func:`_control_exponents`); the
    unadjusted mean and interval stay available as ``plain_mean`` and
    ``plain_ci95``.  Hulls of more than ``d+1`` points use Qhull and are
    limited to ``d <= 3``.
    """
    N, n, d = int(N), int(n), P.dim
    if N < MIN_SAMPLES:
        raise ValueError(f"N={N} is too small for a meaningful interval (need at least {MIN_SAMPLES})")
    if n < d:
        raise ValueError(f"need n >= d (got n={n}, d={d})")
    if n > d and d > 3:
        raise ValueError("hulls of more than d+1 points are supported only for d <= 3")
    state = SamplerState(P, seed)
    exps, means = (), []
    if control_variate:
        from .moments import CapacityError, even_moment

        for e in _control_exponents(P, k, n):
            try:
                means.append(float(even_moment(P, e)))
            except CapacityError:
                break
        exps = tuple(_control_exponents(P, k, n)[:len(means)])
    acc = _CoMoments(1 + len(exps))
    blocks = -(-N // chunk)
    for b, child in enumerate(np.random.SeedSequence(seed).spawn(blocks)):
        gen = np.random.Generator(np.random.Philox(child))
        count = min(chunk, N - b * chunk)
        vol = _simplex_volumes(state, gen, count) if n == d else _hull_volumes(state, gen, count, n)
        acc.add(np.column_stack([vol ** k] + [vol ** e for e in exps]))
    state.position = N * (n + 1)
    my, var_y = float(acc.mean[0]), float(acc.M[0, 0]) / (N - 1)
    plain_ci, plain_se = _interval(my, var_y, N)
    mean, ci, se, control = my, plain_ci, plain_se, None
    if exps:
        Sxx, Sxy = acc.M[1:, 1:], acc.M[1:, 0]
        beta = np.linalg.solve(Sxx, Sxy)
        mean = my - float(beta @ (acc.mean[1:] - np.array(means)))
        var_adj = float(acc.M[0, 0] - beta @ Sxy) / (N - 1 - len(exps))
        ci, se = _interval(mean, var_adj, N)
        control = {"exponents": list(exps), "exact_means": means, "beta": beta.tolist(),
                   "variance_ratio": var_adj / var_y if var_y else None}
    return MomentEstimate(mean, ci, N, k, n, d, se, my, plain_ci, control, seed)


# ---------------------------------------------------------------------------
# volume fraction of random planes (d = 3)
# ---------------------------------------------------------------------------

def _fraction_negative(s: np.ndarray) -> np.ndarray:
    """Volume fraction of ``{s < 0}`` in tetrahedra with corner values ``s`` (N x 4).

    Every sign pattern has a closed form with positive terms only:
    one corner below gives ``x^3 / prod (x + p_j)``; two below
    (``x, y`` below, ``p, q`` above, all as magnitudes) give
    ``(pq(x^2+xy+y^2) + (p+q)xy(x+y) + x^2 y^2) / ((p+x)(q+x)(p+y)(q+y))``.
    """
    neg = s < 0
    cnt = neg.sum(axis=1)
    out = np.zeros(len(s))
    order = np.argsort(~neg, axis=1, kind="stable")   # negative corners first
    a = np.abs(np.take_along_axis(s, order, axis=1))
    for c, flip in ((1, False), (3, True), (2, False)):
        rows = cnt == c
        if not rows.any():
            continue
        v = a[rows]
        if c == 2:
            x, y, p, q = v.T
            num = p * q * (x * x + x * y + y * y) + (p + q) * x * y * (x + y) + x * x * y * y
            out[rows] = num / ((p + x) * (q + x) * (p + y) * (q + y))
        else:
            if flip:  # one corner above: fraction above, then complement
                v = v[:, ::-1]
            x, rest = v[:, 0], v[:, 1:]
            frac = x ** 3 / np.prod(rest + x[:, None], axis=1)
            out[rows] = 1.0 - frac if flip else frac
    out[cnt == 4] = 1.0
    return out


def gamma_samples(P: Polytope, N: int, seed: int = 0, *, exact: bool = False,
                  chunk: int = DEFAULT_CHUNK):
    """Volume fractions ``Gamma`` cut off by planes through three uniform points.

    ``exact=True`` converts each float point to its exact rational value
    and slices the polytope in rational arithmetic, returning ``mpq``
    fractions (slow; for checks).  The float route evaluates the same
    fraction per tetrahedron of a fixed triangulation with the closed forms
    of :func:`_fraction_negative`.
    """
    if P.dim != 3:
        raise ValueError("volume fractions of random planes are implemented for d = 3")
    state = SamplerState(P, seed)
    N = int(N)
    out = []
    blocks = -(-N // chunk)
    body = state.simplices                       # S, 4, 3
    weights = np.diff(np.concatenate([[0.0], state.cumulative])) / state.total
    for b, child in enumerate(np.random.SeedSequence(seed).spawn(blocks)):
        gen = np.random.Generator(np.random.Philox(child))
        count = min(chunk, N - b * chunk)
        pts = _uniform_points(gen, state.simplices, state.cumulative, 3 * count).reshape(count, 3, 3)
        if exact:
            out.extend(_exact_gamma(P, p) for p in pts)
            continue
        normal = np.cross(pts[:, 1] - pts[:, 0], pts[:, 2] - pts[:, 0])
        # corner values n . (v - X1) for each tetrahedron of the body
        vals = np.einsum("nj,sij->nsi", normal, body) - np.einsum("nj,nj->n", normal, pts[:, 0])[:, None, None]
        frac = _fraction_negative(vals.reshape(-1, 4)).reshape(count, len(body))
        out.append(frac @ weights)
    return out if exact else np.concatenate(out)


def _exact_gamma(P: Polytope, pts: np.ndarray):
    X = [tuple(mpq(float(c)) for c in p) for p in pts]
    e1 = [a - b for a, b in zip(X[1], X[0])]
    e2 = [a - b for a, b in zip(X[2], X[0])]
    nrm = (e1[1] * e2[2] - e1[2] * e2[1], e1[2] * e2[0] - e1[0] * e2[2], e1[0] * e2[1] - e1[1] * e2[0])
    off = sum(a * b for a, b in zip(nrm, X[0]))
    if off == 0:
        # plane through the origin: shift the polytope so the eta form exists
        shift = next(v for v in P.vertices if sum(a * b for a, b in zip(nrm, v)) != 0)
        P = Polytope([tuple(a - b for a, b in zip(v, shift)) for v in P.vertices], trusted=True)
        off = -sum(a * b for a, b in zip(nrm, shift))
    # eta . x <= 1 is the side n . (x - X1) <= 0 exactly when off > 0
    plus, _, _ = slice_polytope(P, Hyperplane(tuple(c / off for c in nrm)))
    frac = plus.volume / P.volume
    return frac if off > 0 else 1 - frac


def mc_gamma(P: Polytope, n: int, N: int, seed: int = 0, *, exact: bool = False) -> MomentEstimate:
    """Estimate ``gamma_n = E[Gamma^(n-1) + (1 - Gamma)^(n-1)]`` (d = 3)."""
    N = int(N)
    if n < 1:
        raise ValueError("need n >= 1")
    if N < MIN_SAMPLES and not exact:
        raise ValueError(f"N={N} is too small for a meaningful interval (need at least {MIN_SAMPLES})")
    g = gamma_samples(P, N, seed, exact=exact)
    e = n - 1
    if exact:
        vals = np.array([float(x ** e + (1 - x) ** e) for x in g])
    else:
        vals = g ** e + (1.0 - g) ** e
    mean = float(vals.mean())
    ci, se = _interval(mean, float(vals.var(ddof=1)) if N > 1 else 0.0, N)
    return MomentEstimate(mean, ci, N, e, n, 3, se, mean, ci, None, seed, {"quantity": "gamma"})


def efron_mean(P: Polytope, n: int, N: int, seed: int = 0) -> MomentEstimate:
    """``v_n^(1)(P) = n/(n+2) - n(n+1)/12 * gamma_n`` with a Monte Carlo ``gamma_n``."""
    if P.dim != 3:
        raise ValueError("the section formula used here holds for d = 3")
    if n < 3:
        raise ValueError("need n >= 3")
    g = mc_gamma(P, n, N, seed)
    a, b = n / (n + 2), n * (n + 1) / 12
    mean = a - b * g.mean
    ci = (a - b * g.ci95[1], a - b * g.ci95[0])
    return MomentEstimate(mean, ci, g.N, 1, n, 3, b * g.std_error, mean, ci, None, seed,
                          {"gamma": g.mean, "gamma_ci95": list(g.ci95)})
