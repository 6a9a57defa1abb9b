"""Odd volumetric moments through the canonical section integral.

For a configuration ``C`` with selection ``S`` the planes are written
homogeneously as ``w = (w0, g)`` with the plane ``g . x = w0`` (so
``eta = g / w0``).  The planes realising the partition ``{S, V \\ S}`` form
the cone ``sigma_v (g . v - w0) >= 0`` with ``sigma_v = -1`` on ``S`` and
``+1`` elsewhere; both sign options (``w0 > 0`` and ``w0 < 0``) are in it,
so one cone covers every plane of the partition exactly once.  Cutting the
cone with ``L(w) = sum_v sigma_v (g . v - w0) = 1`` gives a bounded
polytope ``Q_C``.

Central projection ``w -> g / w0`` has Jacobian ``|det W| / |w0|^(d+1)``
on a simplex with vertex rows ``W``.  With ``zeta = |w0| zeta_h`` and
``iota = |w0|^-k iota_h`` the powers of ``|w0|`` cancel, leaving the
bounded integrand

    (d-1)!/d^k * v_{d-1}^(k+1)(section) * zeta_h^(d+k+1) * iota_h * |det W|

over each simplex of a triangulation of ``Q_C``, where
``zeta_h = vol_{d-1}(section) / (|g| vol P)`` and
``iota_h = integral over P of |g . x - w0|^k``.  Planes through the
origin need no special treatment.

Within the open region the partition fixes which edges are cut, hence the
face lattices of the section and of both sides.  A :class:`CutTemplate`
records those once per configuration so node evaluation needs no
predicates and runs vectorised in float64.  The exact rational route
(:func:`integrand`, :func:`homogeneous_integrand_exact`) evaluates the same
quantity from scratch and serves as the oracle.
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass, field
from functools import cached_property
from math import factorial
from typing import Callable, Sequence

import numpy as np
from gmpy2 import mpq

from .lp import LinearInequality
from .moments import (
    ClosedFormValue,
    det_power_expectation_array,
    even_moment,
    iota,
    segment_moment,
    triangle_moment,
    zeta,
)
from .polytope import (
    DegenerateError,
    Halfspace,
    Hyperplane,
    Polytope,
    multi_indices,
    slice_polytope,
    vrep_from_hrep,
)
from .quadrature import QuadratureSpec, collapsed_simplex_rule, gauss_legendre, tanh_sinh
from .rational import ONE, ZERO, Rational, as_vector, det, dot
from .symmetry import Configuration, indices_of

__all__ = [
    "CutTemplate",
    "ConfigurationRegion",
    "ConfigurationDomain",
    "NeedsManualTransform",
    "OddMomentEstimate",
    "SectionMomentUnavailable",
    "configuration_region",
    "configuration_domain",
    "transform_domain",
    "integrand",
    "integrand_exact",
    "homogeneous_integrand_exact",
    "config_contribution",
    "box_contribution",
    "odd_moment",
    "section_moment_value",
    "limit_functional",
]

log = logging.getLogger(__name__)


class SectionMomentUnavailable(NotImplementedError):
    """The section's moment of the required order has no exact route here."""


class NeedsManualTransform(ValueError):
    """The region is not a product of intervals, so no generic cube map applies."""


# ---------------------------------------------------------------------------
# region of a configuration in homogeneous coordinates
# ---------------------------------------------------------------------------

def _signs(sel: int, n: int) -> list:
    return [-1 if (sel >> i) & 1 else 1 for i in range(n)]


def _cone_rows(P: Polytope, sel: int) -> list:
    """Rows ``a`` with ``a . (w0, g) >= 0`` describing the configuration cone."""
    rows = []
    for sgn, v in zip(_signs(sel, len(P.vertices)), P.vertices):
        rows.append(tuple(mpq(sgn) * c for c in (-ONE,) + tuple(v)))
    return rows


@dataclass
class ConfigurationRegion:
    """``Q_C``: the cross-section ``L = 1`` of the configuration cone."""

    selection: int
    simplices: list        # list of (d+1)-tuples of homogeneous points (exact)
    interior: tuple        # exact point of the open cone (the centroid of Q_C)
    vertices: list         # vertices of Q_C in homogeneous coordinates

    @cached_property
    def float_simplices(self) -> list:
        out = []
        for W in self.simplices:
            arr = np.array([[float(c) for c in row] for row in W])
            out.append((arr, abs(float(det(W)))))
        return out

    def vertex_values(self, P: Polytope) -> list:
        """``g . v - w0`` for every vertex ``v`` of ``P`` at each simplex corner.

        The values are linear in ``w``, so at a node they are the barycentric
        combination of these exact corner values.  Within the cone every
        corner value has the sign of its vertex's side, so the combination
        never cancels and keeps full relative accuracy next to the boundary.
        """
        out = []
        for W in self.simplices:
            out.append(np.array([[float(dot(w[1:], v) - w[0]) for v in P.vertices] for w in W]))
        return out


def configuration_region(P: Polytope, sel: int) -> ConfigurationRegion:
    """Triangulated cross-section of the cone of planes realising ``sel``."""
    d = P.dim
    rows = _cone_rows(P, sel)
    c = [sum((r[j] for r in rows), ZERO) for j in range(d + 1)]
    piv = max(range(d + 1), key=lambda j: abs(c[j]))
    if c[piv] == 0:
        raise DegenerateError("the normalisation functional vanishes identically")
    keep = [j for j in range(d + 1) if j != piv]

    def lift(y):
        w = [ZERO] * (d + 1)
        for j, val in zip(keep, y):
            w[j] = val
        w[piv] = (ONE - sum((c[j] * val for j, val in zip(keep, y)), ZERO)) / c[piv]
        return tuple(w)

    # a . w >= 0 with w_piv eliminated, written as normal . y <= offset
    hs = []
    for a in rows:
        normal = [-(a[j] - a[piv] * c[j] / c[piv]) for j in keep]
        offset = a[piv] / c[piv]
        if all(x == 0 for x in normal):
            if offset < 0:
                raise DegenerateError("configuration cone is empty")
            continue
        hs.append(Halfspace(normal, offset))
    Q = vrep_from_hrep(hs, d)
    if Q.is_empty or not Q.is_full_dimensional:
        raise DegenerateError(f"selection {indices_of(sel)} is not realisable")
    verts = [lift(y) for y in Q.vertices]
    simplices = [tuple(verts[i] for i in s) for s in Q.triangulation_indices]
    centre = tuple(sum(col, ZERO) / len(verts) for col in zip(*verts))
    return ConfigurationRegion(sel, simplices, centre, verts)


# ---------------------------------------------------------------------------
# cut template
# ---------------------------------------------------------------------------

@dataclass
class CutTemplate:
    """Combinatorics of the cut for one configuration.

    ``crossings`` are the cut edges ``(i, j)`` with ``i`` in the selection.
    Section simplices index into ``crossings``; simplices of the selection
    side use ids below ``n`` for vertices of ``P`` and ``n + e`` for
    crossing ``e``.  ``body`` is the fixed triangulation of ``P``.
    """

    n: int
    d: int
    selection: int
    crossings: tuple
    section: tuple
    negative: tuple
    body: tuple

    @classmethod
    def build(cls, P: Polytope, sel: int, w: Sequence) -> "CutTemplate":
        """Record the cut at an exact interior point ``w = (w0, g)``."""
        w0, g = w[0], w[1:]
        s = [dot(g, v) - w0 for v in P.vertices]
        if any(x == 0 for x in s):
            raise DegenerateError("template point lies on a vertex plane")
        for i, x in enumerate(s):
            if (x < 0) != bool((sel >> i) & 1):
                raise DegenerateError("template point does not realise the selection")
        crossings = tuple(
            (i, j) if s[i] < 0 else (j, i)
            for i, j in P.edges if (s[i] < 0) != (s[j] < 0)
        )
        pts = [_cross_exact(P.vertices[i], P.vertices[j], s[i], s[j]) for i, j in crossings]
        sec = Polytope(pts, dim=P.dim, trusted=True)
        neg_ids = [i for i in range(len(P.vertices)) if s[i] < 0] + [len(P.vertices) + e for e in range(len(pts))]
        neg_pts = [P.vertices[i] for i in neg_ids[: len(neg_ids) - len(pts)]] + pts
        neg = Polytope(neg_pts, dim=P.dim, trusted=True)
        negative = tuple(tuple(neg_ids[i] for i in simp) for simp in neg.triangulation_indices)
        return cls(len(P.vertices), P.dim, sel, crossings, sec.triangulation_indices, negative,
                   P.triangulation_indices)


def _cross_exact(vi, vj, si, sj):
    return tuple((sj * a - si * b) / (sj - si) for a, b in zip(vi, vj))


# ---------------------------------------------------------------------------
# section moments
# ---------------------------------------------------------------------------

def section_moment_value(m: int, K: int, section: Polytope | None = None) -> Rational:
    """Exact ``v_m^(K)`` of a section polytope.

    Even ``K`` uses the permutation expansion.  Odd ``K`` is available for
    points and segments (closed form) and for triangles (closed form);
    anything else raises :class:`SectionMomentUnavailable`.
    """
    if m == 0:
        return ONE
    if m == 1:
        return segment_moment(K)
    if K % 2 == 0:
        if section is None:
            raise ValueError("an even section moment needs the section polytope")
        return even_moment(section, K)
    if m == 2 and section is not None and len(section.vertices) == 3:
        return triangle_moment(K)
    raise SectionMomentUnavailable(
        f"odd order {K} moment of a {m}-dimensional section with "
        f"{len(section.vertices) if section is not None else '?'} vertices has no exact route"
    )


# ---------------------------------------------------------------------------
# exact integrand
# ---------------------------------------------------------------------------

def _prefactor(d: int, k: int) -> Rational:
    return mpq(factorial(d - 1), d ** k)


def homogeneous_integrand_exact(P: Polytope, k: int, w: Sequence) -> Rational:
    """Exact ``(d-1)!/d^k v zeta_h^(d+k+1) iota_h`` at the homogeneous point ``w``."""
    w = as_vector(w)
    w0, g = w[0], w[1:]
    if all(x == 0 for x in g):
        raise DegenerateError("g = 0 does not describe a plane")
    d = P.dim
    values = [dot(g, v) - w0 for v in P.vertices]
    if any(x == 0 for x in values):
        raise DegenerateError("the plane passes through a vertex (region boundary)")
    if all(x < 0 for x in values) or all(x > 0 for x in values):
        raise DegenerateError("the plane misses the polytope")
    if w0 != 0:
        H = Hyperplane(tuple(x / w0 for x in g))
        _, _, sec = slice_polytope(P, H)
        # zeta = |w0| zeta_h and iota = |w0|^-k iota_h
        z = zeta(P, H) / abs(w0)
        io = iota(P, H, k) * abs(w0) ** k
    else:
        # plane through the origin: shift to a parallel copy, the quantities
        # only depend on the plane itself
        shift = next(v for v in P.vertices)
        Pt = Polytope([tuple(a - b for a, b in zip(v, shift)) for v in P.vertices], trusted=True)
        return homogeneous_integrand_exact(Pt, k, (w0 - dot(g, shift),) + tuple(g))
    K = k + 1
    m = d - 1
    if m >= 1:
        chart = _chart_of(sec)
        v = section_moment_value(m, K, chart)
    else:
        v = ONE
    return _prefactor(d, k) * v * z ** (d + k + 1) * io


def _chart_of(sec: Polytope) -> Polytope:
    from .polytope import section_chart

    return section_chart(sec)


def integrand(P: Polytope, config: Configuration | None, k: int, eta: Sequence) -> float:
    """Section integrand ``(d-1)!/d^k v_{d-1}^(k+1) zeta^(d+k+1) iota`` at ``eta``.

    Every factor is exact; the product is converted to float at the end.
    When ``config`` is given, ``eta`` must lie strictly inside one of its
    two sign options.
    """
    eta = as_vector(eta)
    if config is not None:
        sel = config.representative
        n = len(P.vertices)
        inside = [bool((sel >> i) & 1) for i in range(n)]
        vals = [dot(eta, v) - 1 for v in P.vertices]
        ok = any(all((x < 0) == (ins != flip) and x != 0 for x, ins in zip(vals, inside)) for flip in (False, True))
        if not ok:
            raise ValueError(f"eta {tuple(str(c) for c in eta)} is not inside the region of configuration {config.label}")
    return float(integrand_exact(P, k, eta))


def integrand_exact(P: Polytope, k: int, eta: Sequence) -> Rational:
    """Exact value of the integrand at ``eta`` (the chart ``w0 = 1``)."""
    return homogeneous_integrand_exact(P, k, (ONE,) + tuple(as_vector(eta)))


# ---------------------------------------------------------------------------
# vectorised float evaluation
# ---------------------------------------------------------------------------

def _complete_homogeneous_array(vals: np.ndarray, k: int) -> np.ndarray:
    """h_k along the last axis."""
    h = [np.ones(vals.shape[:-1])] + [np.zeros(vals.shape[:-1]) for _ in range(k)]
    for c in range(vals.shape[-1]):
        x = vals[..., c]
        for j in range(1, k + 1):
            h[j] = h[j] + x * h[j - 1]
    return h[k]


def _scaled_abs_power_integral(vals: np.ndarray, k: float) -> np.ndarray:
    """``(1+k)/vol * integral of |s|^k`` over simplices with corner values ``vals``.

    Uses the divided difference of ``F(s) = sgn(s)^d |s|^(k+d) / ((k+1)...(k+d))``
    over the ``d+1`` corner values, times ``d!``, with the ``1/(k+1)`` factor
    taken out so the result stays finite as ``k -> -1``.  Corner values that
    closer than 1e-4 (relative) are split symmetrically, which turns the divided
    difference into a centred approximation of its confluent limit.
    """
    d = vals.shape[-1] - 1
    scale = np.max(np.abs(vals), axis=-1, keepdims=True)
    ordered = np.sort(vals, axis=-1)
    close = (np.diff(ordered, axis=-1).min(axis=-1, keepdims=True) < 1e-4 * scale)
    vals = vals + close * (1e-4 * scale) * (np.arange(d + 1) - d / 2.0)
    denom_k = float(np.prod([k + j for j in range(2, d + 1)])) if d > 1 else 1.0
    F = np.sign(vals) ** d * np.abs(vals) ** (k + d) / denom_k
    total = np.zeros(vals.shape[:-1])
    for i in range(d + 1):
        prod = np.ones(vals.shape[:-1])
        for j in range(d + 1):
            if j != i:
                prod = prod * (vals[..., i] - vals[..., j])
        total = total + F[..., i] / prod
    return factorial(d) * total


class _MomentKernel:
    """Normalised moments of a union of simplices, vectorised over nodes."""

    def __init__(self, m: int, K: int):
        self.m, self.K = m, K
        self.idx = multi_indices(m, K)
        pos = {a: i for i, a in enumerate(self.idx)}
        self.prods = [
            (i, j, pos[tuple(x + y for x, y in zip(a, b))])
            for i, a in enumerate(self.idx) for j, b in enumerate(self.idx)
            if sum(a) + sum(b) <= K
        ]
        # 1/(1 - t.v) = sum_alpha |alpha|!/alpha! v^alpha t^alpha
        self.mult = []
        for a in self.idx:
            c = factorial(sum(a))
            for x in a:
                c //= factorial(x)
            self.mult.append(float(c))
        self.scale = []
        for a in self.idx:
            num = factorial(m)
            for x in a:
                num *= factorial(x)
            self.scale.append(num / factorial(m + sum(a)))

    def simplex(self, pts: np.ndarray) -> list:
        """``pts[..., m+1, m]`` -> list of ``E[x^alpha]`` arrays (shape ``pts[..., 0, 0]``)."""
        acc = None
        for r in range(pts.shape[-2]):
            v = pts[..., r, :]
            fac = []
            for a, mu in zip(self.idx, self.mult):
                term = np.full(v.shape[:-1], mu)
                for c, e in enumerate(a):
                    if e:
                        term = term * v[..., c] ** e
                fac.append(term)
            if acc is None:
                acc = fac
                continue
            new = [np.zeros(v.shape[:-1]) for _ in self.idx]
            for i, j, t in self.prods:
                new[t] = new[t] + acc[i] * fac[j]
            acc = new
        return [c * s for c, s in zip(acc, self.scale)]


class _Evaluator:
    """Float evaluation of the homogeneous integrand for one configuration."""

    def __init__(self, P: Polytope, template: CutTemplate, k: int, zeta_power: bool = False):
        self.P, self.t, self.k = P, template, k
        self.zeta_power = zeta_power
        self.d = d = P.dim
        self.m = d - 1
        self.K = k + 1
        self.V = np.array([[float(c) for c in v] for v in P.vertices])
        self.vol = float(P.volume)
        self.ci = np.array([i for i, _ in template.crossings], dtype=int)
        self.cj = np.array([j for _, j in template.crossings], dtype=int)
        self.sec = np.array(template.section, dtype=int)
        self.neg = np.array(template.negative, dtype=int)
        self.body = np.array(template.body, dtype=int)
        self.body_vol = np.array([
            abs(float(det([[a - b for a, b in zip(P.vertices[i], P.vertices[s[0]])] for i in s[1:]])))
            / factorial(d) for s in template.body
        ])
        self.integer_k = float(k).is_integer()
        if self.integer_k:
            k = self.k = int(k)
            self.lin = factorial(d) * factorial(k) / factorial(d + k)
        elif d > 2:
            raise SectionMomentUnavailable(
                f"non-integer k={k} needs a real-order section moment, available only for d <= 2")
        self.pref = factorial(d - 1) / d ** k
        self.keep = np.array([[c for c in range(d) if c != p] for p in range(d)], dtype=int).reshape(d, d - 1)
        self.constant_v = None
        if zeta_power:
            self.constant_v = 1.0
        elif self.m == 0:
            self.constant_v = 1.0
        elif self.m == 1:
            self.constant_v = 2.0 / ((1.0 + self.K) * (2.0 + self.K))
        elif self.K % 2:
            if self.m == 2 and len(template.crossings) == 3:
                self.constant_v = float(triangle_moment(self.K))
            else:
                raise SectionMomentUnavailable(
                    f"k={k}: the section moment of order {self.K} of a {self.m}-dimensional "
                    f"section with {len(template.crossings)} vertices has no exact route"
                )
        if self.constant_v is None:
            self.kernel = _MomentKernel(self.m, self.K)

    def __call__(self, w: np.ndarray, s: np.ndarray | None = None) -> np.ndarray:
        d, k = self.d, self.k
        g = w[:, 1:]
        if s is None:
            s = g @ self.V.T - w[:, 0][:, None]
        si, sj = s[:, self.ci], s[:, self.cj]
        X = (sj[..., None] * self.V[self.ci] - si[..., None] * self.V[self.cj]) / (sj - si)[..., None]
        # section: drop the coordinate with the largest |g_j|
        p = np.argmax(np.abs(g), axis=1)
        gp = np.abs(g[np.arange(len(p)), p])
        if self.m == 0:
            vol_proj = np.ones(len(w))
            v = np.full(len(w), self.constant_v)
        else:
            Y = np.take_along_axis(X, self.keep[p][:, None, :], axis=2)
            pts = Y[:, self.sec]                     # N, ns, m+1, m
            edges = pts[:, :, 1:, :] - pts[:, :, :1, :]
            dets = np.linalg.det(edges)               # N, ns
            adets = np.abs(dets)
            vol_proj = adets.sum(axis=1) / factorial(self.m)
            if self.constant_v is not None:
                v = np.full(len(w), self.constant_v)
            else:
                v = self._section_moment(pts, edges, adets)
        zeta_h = vol_proj / (gp * self.vol)
        if self.zeta_power:
            return zeta_h ** (d + 1)
        # iota_h
        sb = s[:, self.body]
        if not self.integer_k:
            iota_h = (self.body_vol * _scaled_abs_power_integral(sb, k)).sum(axis=1) / (1.0 + k)
            return self.pref * v * zeta_h ** (d + k + 1) * iota_h
        i_body = (self.body_vol * self.lin * _complete_homogeneous_array(sb, k)).sum(axis=1)
        if k % 2:
            allpts = np.concatenate([np.broadcast_to(self.V, (len(w),) + self.V.shape), X], axis=1)
            npts = allpts[:, self.neg]                # N, nn, d+1, d
            nvol = np.abs(np.linalg.det(npts[:, :, 1:, :] - npts[:, :, :1, :])) / factorial(d)
            vals = np.concatenate([-s, np.zeros(X.shape[:2])], axis=1)[:, self.neg]
            i_neg = (nvol * self.lin * _complete_homogeneous_array(vals, k)).sum(axis=1)
            iota_h = i_body + 2.0 * i_neg
        else:
            iota_h = i_body
        return self.pref * v * zeta_h ** (d + k + 1) * iota_h

    def _section_moment(self, pts, edges, adets):
        m, K = self.m, self.K
        N = pts.shape[0]
        ref = np.argmax(adets, axis=1)
        rows = np.arange(N)
        B = edges[rows, ref]                          # N, m, m (rows are edges)
        u0 = pts[rows, ref, 0]                        # N, m
        Binv = np.linalg.inv(B)
        Z = (pts - u0[:, None, None, :]) @ Binv[:, None, :, :]
        vols = adets / adets[rows, ref][:, None]      # relative to the reference
        mom = self.kernel.simplex(Z)                  # list of N, ns arrays
        tot = vols.sum(axis=1)
        a = {alpha: (mm * vols).sum(axis=1) / tot for alpha, mm in zip(self.kernel.idx, mom)}
        e_det = det_power_expectation_array(a, m, K)
        vol_frame = tot / factorial(m)
        return e_det / (factorial(m) ** K * vol_frame ** K)


# ---------------------------------------------------------------------------
# results
# ---------------------------------------------------------------------------

@dataclass
class OddMomentEstimate:
    """Weighted sum of configuration integrals with a per-configuration breakdown."""

    total: float
    error_estimate: float
    per_config: dict                 # label -> (value, error)
    weights: dict                    # label -> w_C
    k: int
    d: int
    reference: ClosedFormValue | None = None
    discrepancy: float | None = None
    flagged: list = field(default_factory=list)
    spec: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.error_estimate < 0:
            raise ValueError("error estimate must be non-negative")

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "error_estimate": self.error_estimate,
            "per_config": {lab: {"value": v, "error": e, "weight": self.weights[lab]}
                           for lab, (v, e) in self.per_config.items()},
            "k": self.k,
            "d": self.d,
            "reference": None if self.reference is None else str(self.reference),
            "discrepancy": self.discrepancy,
            "flagged": list(self.flagged),
            "spec": dict(self.spec),
        }


@dataclass
class ContributionResult:
    value: float
    error: float
    converged: bool
    nodes: int
    history: list  # (level or nodes, value, error)

    def __iter__(self):
        yield self.value
        yield self.error


# ---------------------------------------------------------------------------
# quadrature over Q_C
# ---------------------------------------------------------------------------

def _pairwise_sum(parts: list) -> float:
    """Fixed-order pairwise reduction (reproducible across runs)."""
    vals = list(parts)
    if not vals:
        return 0.0
    while len(vals) > 1:
        nxt = [vals[i] + vals[i + 1] for i in range(0, len(vals) - 1, 2)]
        if len(vals) % 2:
            nxt.append(vals[-1])
        vals = nxt
    return float(vals[0])


def _integrate_rule(region, evaluator, rule, d, chunk):
    fine, coarse, count = [], [], 0
    corner_values = region.vertex_values(evaluator.P)
    for (W, adet), SV in zip(region.float_simplices, corner_values):
        for lam, wt, wc in collapsed_simplex_rule(rule, d, chunk):
            vals = evaluator(lam @ W, lam @ SV)
            fine.append(adet * float(np.dot(vals, wt)))
            coarse.append(adet * float(np.dot(vals, wc)))
            count += len(wt)
    return _pairwise_sum(fine), _pairwise_sum(coarse), count


def _exact_rule_sum(P, region, k, rule, d):
    """Same tensor sum with every node value computed exactly (slow oracle)."""
    total = 0.0
    count = 0
    for Wq, (_, adet) in zip(region.simplices, region.float_simplices):
        for lam, wt, _ in collapsed_simplex_rule(rule, d, 10_000):
            for row, weight in zip(lam, wt):
                lq = [mpq(float(x)) for x in row[1:]]
                lq.insert(0, ONE - sum(lq, ZERO))
                wq = [sum((a * r[j] for a, r in zip(lq, Wq)), ZERO) for j in range(d + 1)]
                total += adet * weight * float(homogeneous_integrand_exact(P, k, wq))
                count += 1
    return total, count


class _Telemetry:
    def __init__(self, stream):
        self.stream = stream

    def emit(self, **record):
        if self.stream is None:
            return
        record.setdefault("time", round(time.time(), 3))
        self.stream.write(json.dumps(record, sort_keys=True) + "\n")
        if hasattr(self.stream, "flush"):
            self.stream.flush()


def _check_order(k):
    k = float(k)
    if not k > -1:
        raise ValueError("the section integral needs k > -1")
    if k.is_integer():
        return int(k)
    return k


def config_contribution(P: Polytope, config: Configuration | int, k: int,
                        spec: QuadratureSpec | None = None, telemetry=None) -> ContributionResult:
    """Integral of the section integrand over one configuration's planes.

    ``config`` may be a :class:`Configuration` or a raw selection bitmask.
    The returned value is the single-representative integral ``v_C``;
    multiply by ``w_C`` for its share of the moment.  Non-convergence is
    reported through ``converged`` (and logged), never hidden.
    """
    spec = spec or QuadratureSpec()
    k = _check_order(k)
    sel = config.representative if isinstance(config, Configuration) else int(config)
    label = config.label if isinstance(config, Configuration) else str(indices_of(sel))
    tel = _Telemetry(telemetry)
    d = P.dim
    region = configuration_region(P, sel)
    template = CutTemplate.build(P, sel, region.interior)
    history = []
    if spec.precision == "exact":
        rule = gauss_legendre(spec.nodes) if spec.scheme == "gauss-legendre" else tanh_sinh(spec.level)
        value, count = _exact_rule_sum(P, region, k, rule, d)
        tel.emit(event="config", config=label, nodes=count, value=value)
        return ContributionResult(value, float("nan"), False, count, [(count, value, float("nan"))])
    ev = _Evaluator(P, template, k)
    if spec.scheme == "gauss-legendre":
        n_lo = max(4, spec.nodes // 2)
        lo, _, c1 = _integrate_rule(region, ev, gauss_legendre(n_lo), d, spec.chunk)
        hi, _, c2 = _integrate_rule(region, ev, gauss_legendre(spec.nodes), d, spec.chunk)
        err = abs(hi - lo)
        history = [(n_lo, lo, float("nan")), (spec.nodes, hi, err)]
        converged = err <= spec.tol * abs(hi)
        tel.emit(event="config", config=label, nodes=c1 + c2, value=hi, error=err)
        result = ContributionResult(hi, err, converged, c1 + c2, history)
    else:
        total_nodes = 0
        value = err = None
        converged = False
        for level in range(spec.level, spec.max_level + 1):
            fine, coarse, count = _integrate_rule(region, ev, tanh_sinh(level), d, spec.chunk)
            total_nodes += count
            value, err = fine, abs(fine - coarse)
            history.append((level, value, err))
            tel.emit(event="level", config=label, level=level, nodes=count, value=value, error=err)
            if err <= spec.tol * abs(value):
                converged = True
                break
        result = ContributionResult(value, err, converged, total_nodes, history)
    if not result.converged:
        log.warning("configuration %s: error estimate %.3g above tolerance %.3g",
                    label, result.error, spec.tol * abs(result.value))
    return result


def odd_moment(P: Polytope, k: int, spec: QuadratureSpec | None = None,
               configs: Sequence[Configuration] | None = None,
               only: Sequence[str] | None = None, reference=None, telemetry=None) -> OddMomentEstimate:
    """``v_d^(k)(P) = sum_C w_C v_C`` with a per-configuration breakdown.

    ``configs`` defaults to the catalog entry of ``P`` (by name) or a fresh
    enumeration with the brute-force symmetry group.  ``only`` restricts the
    run to some labels; the total then covers just those.
    """
    spec = spec or QuadratureSpec()
    k = _check_order(k)
    if configs is None:
        from .catalog import configurations_for

        configs = configurations_for(P)
    tel = _Telemetry(telemetry)
    per, weights, flagged = {}, {}, []
    for cfg in configs:
        if only is not None and cfg.label not in only:
            continue
        res = config_contribution(P, cfg, k, spec, telemetry)
        per[cfg.label] = (res.value, res.error)
        weights[cfg.label] = cfg.weight
        if not res.converged:
            flagged.append(cfg.label)
        tel.emit(event="partial", config=cfg.label, weight=cfg.weight, value=res.value, error=res.error)
    total = _pairwise_sum([weights[lab] * v for lab, (v, _) in per.items()])
    error = _pairwise_sum([weights[lab] * e for lab, (_, e) in per.items()])
    est = OddMomentEstimate(total, error, per, weights, k, P.dim, spec=spec.as_dict(), flagged=flagged)
    if reference is not None:
        est.reference = reference
        ref = float(reference)
        est.discrepancy = abs(total - ref) / abs(ref) if ref else abs(total)
    return est


# ---------------------------------------------------------------------------
# product-region route (direct eta coordinates)
# ---------------------------------------------------------------------------

@dataclass
class AxisDescriptor:
    kind: str            # "interval", "above", "below" or "line"
    lo: Rational | None
    hi: Rational | None


@dataclass
class ConfigurationDomain:
    """Sign-option regions of a configuration in eta coordinates.

    Each region is a list of strict inequalities; ``axes`` holds the
    per-axis classification of each region (``None`` when coupled).
    ``halving_factor`` multiplies the integral of a half domain when a
    symmetry argument has been recorded; it is 1 unless set explicitly.
    """

    config: Configuration
    regions: list
    axes: list
    halving_factor: int = 1
    symmetry_note: str | None = None

    def __post_init__(self):
        if self.halving_factor not in (1, 2):
            raise ValueError("halving factor must be 1 or 2")
        if self.halving_factor == 2 and not self.symmetry_note:
            raise ValueError("a halving factor of 2 needs a recorded symmetry argument")


def _classify(region: Sequence[LinearInequality], d: int):
    lo: list = [None] * d
    hi: list = [None] * d
    for q in region:
        nz = [j for j, c in enumerate(q.coeffs) if c != 0]
        if not nz:
            continue
        if len(nz) > 1:
            return None
        j = nz[0]
        bound = q.rhs / q.coeffs[j]
        if q.coeffs[j] > 0:        # x_j < bound
            hi[j] = bound if hi[j] is None else min(hi[j], bound)
        else:                      # x_j > bound
            lo[j] = bound if lo[j] is None else max(lo[j], bound)
    axes = []
    for a, b in zip(lo, hi):
        if a is not None and b is not None:
            axes.append(AxisDescriptor("interval", a, b))
        elif a is not None:
            axes.append(AxisDescriptor("above", a, None))
        elif b is not None:
            axes.append(AxisDescriptor("below", None, b))
        else:
            axes.append(AxisDescriptor("line", None, None))
    return axes


def configuration_domain(P: Polytope, config: Configuration) -> ConfigurationDomain:
    from .lp import strict_feasible
    from .symmetry import selection_region

    regions, axes = [], []
    for flipped in (False, True):
        reg = selection_region(P, config.representative, flipped)
        if strict_feasible(reg):
            regions.append(reg)
            axes.append(_classify(reg, P.dim))
    return ConfigurationDomain(config, regions, axes)


def _axis_map(ax: AxisDescriptor, t: np.ndarray, tbar: np.ndarray | None = None):
    tbar = 1.0 - t if tbar is None else tbar
    if ax.kind == "interval":
        lo, hi = float(ax.lo), float(ax.hi)
        return lo + (hi - lo) * t, np.full_like(t, hi - lo)
    if ax.kind == "above":
        return float(ax.lo) + t / tbar, 1.0 / tbar ** 2
    if ax.kind == "below":
        return float(ax.hi) - t / tbar, 1.0 / tbar ** 2
    return (t - 0.5) / (t * tbar), (t * t + tbar * tbar) / (t * tbar) ** 2


def transform_domain(dom: ConfigurationDomain, region: int = 0) -> Callable:
    """Map ``(0,1)^d`` onto a product region, returning ``(eta, jacobian)``.

    Bounded intervals are mapped affinely and half-lines ``(c, inf)`` by
    ``c + t/(1-t)`` (Jacobian ``1/(1-t)^2``).  Coupled regions raise
    :class:`NeedsManualTransform` naming the region.
    """
    axes = dom.axes[region]
    if axes is None:
        text = "; ".join(
            " + ".join(f"{c}*eta{j + 1}" for j, c in enumerate(q.coeffs) if c) + f" < {q.rhs}"
            for q in dom.regions[region]
        )
        raise NeedsManualTransform(f"configuration {dom.config.label} needs manual transform: {text}")

    def mapping(t, tbar=None):
        t = np.atleast_2d(np.asarray(t, dtype=float))
        tbar = 1.0 - t if tbar is None else np.atleast_2d(tbar)
        eta = np.empty_like(t)
        jac = np.ones(len(t))
        for j, ax in enumerate(axes):
            eta[:, j], dj = _axis_map(ax, t[:, j], tbar[:, j])
            jac = jac * dj
        return eta, jac

    return mapping


def box_contribution(P: Polytope, config: Configuration, k: int, level: int = 4,
                     chunk: int = 200_000) -> float:
    """``v_C`` through the product-region maps and tanh-sinh on the unit cube.

    Only for configurations whose sign options are boxes; the same float
    evaluator as the main route is used at ``w = (1, eta)``.  The tensor
    grid is walked in blocks of ``chunk`` nodes.
    """
    from .symmetry import indices_of

    dom = configuration_domain(P, config)
    maps = [transform_domain(dom, r) for r in range(len(dom.regions))]
    region = configuration_region(P, config.representative)
    ev = _Evaluator(P, CutTemplate.build(P, config.representative, region.interior), k)
    rule = tanh_sinh(level)
    d = P.dim
    n = len(rule)
    # a vertex of S: on the chart w0 = 1 a flipped region puts it on the positive
    # side, and the same plane is then represented by -(1, eta)
    anchor = np.array([float(c) for c in P.vertices[indices_of(config.representative)[0]]])
    parts = []
    for start in range(0, n ** d, chunk):
        idx = np.unravel_index(np.arange(start, min(start + chunk, n ** d)), (n,) * d)
        t = np.stack([rule.x[i] for i in idx], axis=1)
        tbar = np.stack([rule.xbar[i] for i in idx], axis=1)
        wt = np.prod([rule.w[i] for i in idx], axis=0)
        for mp in maps:
            eta, jac = mp(t, tbar)
            w = np.concatenate([np.ones((len(eta), 1)), eta], axis=1)
            w[eta @ anchor > 1.0] *= -1.0
            vals = ev(w)
            parts.append(float(np.sum(vals * jac * wt)) * dom.halving_factor)
    return _pairwise_sum(parts)


def limit_functional(P: Polytope, spec: QuadratureSpec | None = None,
                     configs: Sequence[Configuration] | None = None) -> float:
    """``2 d! vol(P) * integral of zeta^(d+1)``, the limit of ``(1+k) v^(k)`` as ``k -> -1``.

    As ``k -> -1`` the factor ``(1+k) iota^(k)`` concentrates on the plane
    and tends to ``2 vol(P) zeta``, while the section moment tends to 1.
    """
    spec = spec or QuadratureSpec()
    if configs is None:
        from .catalog import configurations_for

        configs = configurations_for(P)
    d = P.dim
    parts = []
    for cfg in configs:
        region = configuration_region(P, cfg.representative)
        ev = _Evaluator(P, CutTemplate.build(P, cfg.representative, region.interior), 0, zeta_power=True)
        fine, _, _ = _integrate_rule(region, ev, tanh_sinh(spec.max_level), d, spec.chunk)
        parts.append(cfg.weight * fine)
    return 2.0 * factorial(d) * float(P.volume) * _pairwise_sum(parts)
