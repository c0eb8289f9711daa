"""Constructive side: equality configurations, counterexample domains, product domains."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .geometry import Circle, Domain, DomainSpec, build_domain, contains, random_interior_points
from .harmonic import HarmonicFunction, harmonic_measures
from .suita import (
    DEFAULT_TOL, EqualityReport, JetConfig, MultiValuedFormError, WeightSpec, _measures,
    extremal_form, integrality_deltas, integrality_deltas_numeric,
)

FOUND = "FOUND"
NOT_FOUND = "NOT_FOUND"
RANK_DEFICIENT = "RANK_DEFICIENT"


# -- Jacobian sampling --------------------------------------------------------

def _complex_jacobian(measures, pts):
    return np.array([[uk.derivative(z, check=False) for z in pts] for uk in measures])


def _real_jacobian(measures, pts):
    """Rows ``U_k``, columns ``(x_j, y_j)`` with ``grad u = (Re f', -Im f')``."""
    J = _complex_jacobian(measures, pts)
    out = np.empty((len(measures), 2 * len(pts)))
    out[:, 0::2] = J.real
    out[:, 1::2] = -J.imag
    return out


def _full_rank(A, rtol=1e-8):
    s = np.linalg.svd(A, compute_uv=False)
    return s.size > 0 and s[-1] > rtol * s[0] and len(s) == min(A.shape)


def jacobian_sample(d: Domain, measures: Sequence[HarmonicFunction], m: int, trials: int = 100,
                    rng: np.random.Generator | None = None, real: bool = False):
    """Random ``m`` points at which the Jacobian of the measures has full rank.

    With ``real=False`` the matrix is ``(df_k/dz)(z_j)`` (size ``len(measures) x m``)
    and must have rank ``len(measures)``; with ``real=True`` the real Jacobian
    of ``(x_j, y_j) -> sum_j u_k(z_j)`` is used instead, which only needs
    ``2m >= len(measures)``. Returns ``(points, status)``.
    """
    if m < 1:
        raise ValueError("need at least one point")
    need = len(measures)
    if (m if not real else 2 * m) < need:
        raise ValueError(f"m={m} cannot reach rank {need}")
    rng = rng or np.random.default_rng(0)
    scale = d.outer_scale
    for _ in range(trials):
        pts = random_interior_points(d, m, rng, clearance=0.02 * scale, separation=0.05 * scale)
        if need == 0:
            return pts, FOUND
        A = _real_jacobian(measures, pts) if real else _complex_jacobian(measures, pts)
        if _full_rank(A) and np.linalg.matrix_rank(A, tol=1e-8 * np.linalg.norm(A, 2)) == need:
            return pts, FOUND
    return None, RANK_DEFICIENT


# -- equality search ---------------------------------------------------------

@dataclass
class SearchResult:
    points: list
    orders: list
    amplitudes: list | None
    deltas: list
    residual: float
    iterations: int
    status: str
    target: list | None = None
    q: int | None = None
    trace: list = field(default_factory=list)
    gradient_check: float | None = None
    numeric_deltas: list | None = None

    def to_dict(self):
        def cl(v):
            return None if v is None else [[complex(a).real, complex(a).imag] for a in v]

        return {
            "points": cl(self.points), "orders": list(self.orders), "amplitudes": cl(self.amplitudes),
            "deltas": [float(x) for x in self.deltas], "residual": self.residual,
            "iterations": self.iterations, "status": self.status,
            "target": self.target, "q": self.q, "trace": [float(x) for x in self.trace],
            "gradient_check": self.gradient_check,
            "numeric_deltas": None if self.numeric_deltas is None else [float(x) for x in self.numeric_deltas],
        }


def rational_targets(U: np.ndarray, m: int, q_max: int):
    """Candidate targets ``r/q`` sorted by max-norm distance from ``U``.

    Each candidate keeps ``r_k >= 1`` and ``sum r_k / q < m`` so that it lies
    inside the range of ``(U_1..U_{n-1})``.
    """
    out = {}
    for q in range(1, q_max + 1):
        r = np.maximum(np.rint(q * U).astype(int), 1)
        if Fraction(int(r.sum()), q) >= m:
            continue
        key = tuple(Fraction(int(x), q) for x in r)
        if key in out:
            continue
        dist = float(np.max(np.abs(U - r / q)))
        out[key] = (dist, q, r)
    return sorted(out.values(), key=lambda c: (c[0], c[1]))


def _sum_measures(measures, pts):
    return np.array([sum(float(uk(z, check=False)) for z in pts) for uk in measures])


def _fd_gradient(measures, pts, h=1e-5):
    J = np.empty((len(measures), 2 * len(pts)))
    for i in range(len(pts)):
        for c, step in enumerate((h, 1j * h)):
            pp, pm = pts.copy(), pts.copy()
            pp[i] += step
            pm[i] -= step
            J[:, 2 * i + c] = (_sum_measures(measures, pp) - _sum_measures(measures, pm)) / (2 * h)
    return J


def _admissible(d, pts, sep):
    if not np.all(contains(d, pts)):
        return False
    if np.min(d.clearance(pts)) < sep:
        return False
    for i in range(len(pts)):
        for j in range(i):
            if abs(pts[i] - pts[j]) < sep:
                return False
    return True


def _gauss_newton(d, measures, pts, moving, target, max_iter, tol, sep, check_gradient, trace):
    pts = pts.copy()
    F = _sum_measures(measures, pts) - target
    trace.append(float(np.max(np.abs(F))))
    grad_err = 0.0
    it = 0
    for it in range(1, max_iter + 1):
        if np.max(np.abs(F)) < tol:
            return pts, F, it - 1, grad_err
        J = _real_jacobian(measures, pts[moving])
        if check_gradient:
            Jfd = _fd_gradient(measures, pts[moving])
            grad_err = max(grad_err, float(np.max(np.abs(J - Jfd))))
        step, *_ = np.linalg.lstsq(J, -F, rcond=None)
        dz = step[0::2] + 1j * step[1::2]
        t = 1.0
        for _ in range(40):
            trial = pts.copy()
            trial[moving] += t * dz
            if _admissible(d, trial, sep):
                Ft = _sum_measures(measures, trial) - target
                if np.max(np.abs(Ft)) < np.max(np.abs(F)):
                    pts, F = trial, Ft
                    break
            t *= 0.5
        else:
            trace.append(float(np.max(np.abs(F))))
            return pts, F, it, grad_err
        trace.append(float(np.max(np.abs(F))))
    return pts, F, it, grad_err


def find_equality_config(d: Domain, w: WeightSpec | None = None, m: int = 1, q_max: int = 12,
                         degree: int = 48, rng: np.random.Generator | None = None, tol: float = 1e-8,
                         max_iter: int = 50, max_targets: int = 20, trials: int = 100,
                         check_gradient: bool = False, criterion_tol: float = DEFAULT_TOL) -> SearchResult:
    """Search for points and orders with every ``delta_k`` an integer (``u = 0``).

    Points start where the Jacobian is nondegenerate; Gauss-Newton then drives
    ``U_k = sum_j u_k(z_j)`` to a rational vector ``r/q`` with ``q <= q_max``
    and all orders are set to ``k_j = q - 1``. With ``m > n - 1`` only ``n - 1``
    points move; with ``m = n - 2`` all points move and the real Jacobian is
    used.
    """
    if w is not None and not w.u_is_zero:
        raise ValueError("the search assumes u = 0")
    rng = rng or np.random.default_rng(0)
    n = d.n
    if m < 1:
        raise ValueError("need at least one point")
    if n == 1:
        pts = random_interior_points(d, m, rng, clearance=0.05 * d.outer_scale, separation=0.05)
        return SearchResult(list(pts), [0] * m, None, [], 0.0, 0, FOUND, [], 1)
    measures = list(_measures(d, degree))
    if m >= n - 1:
        n_move = n - 1
        start, status = jacobian_sample(d, measures, n - 1, trials, rng)
        if status != FOUND:
            return SearchResult([], [], None, [], np.inf, 0, RANK_DEFICIENT)
        extra = random_interior_points(d, m - n_move, rng, clearance=0.05 * d.outer_scale,
                                       separation=0.05) if m > n_move else np.array([], complex)
        pts = np.concatenate([start, extra])
    elif m == n - 2 and n > 2:
        n_move = m
        pts, status = jacobian_sample(d, measures, m, trials, rng, real=True)
        if status != FOUND:
            return SearchResult([], [], None, [], np.inf, 0, RANK_DEFICIENT)
    else:
        raise ValueError(f"m={m} is below the supported range for n={n}")
    moving = np.arange(n_move)
    sep = 1e-4 * d.outer_scale

    U0 = _sum_measures(measures, pts)
    trace: list = []
    best = None
    total_iter = 0
    for dist, q, r in rational_targets(U0, m, q_max)[:max_targets]:
        target = r / q
        new, F, its, gerr = _gauss_newton(d, measures, pts, moving, target, max_iter, tol * 1e-2, sep,
                                          check_gradient, trace)
        total_iter += its
        orders = [q - 1] * m
        jets = JetConfig(tuple(new), tuple(orders))
        deltas = integrality_deltas(d, WeightSpec(), jets, degree)
        residual = max(x for _, x in deltas)
        cand = (residual, new, orders, deltas, q, r, gerr)
        if best is None or residual < best[0]:
            best = cand
        if residual < tol:
            break
    if best is None:
        return SearchResult(list(pts), [0] * m, None, [], np.inf, 0, NOT_FOUND, trace=trace)
    residual, new, orders, deltas, q, r, gerr = best
    status = FOUND if residual < tol else NOT_FOUND
    amps = None
    numeric = None
    jets = JetConfig(tuple(new), tuple(orders))
    if status == FOUND:
        numeric = integrality_deltas_numeric(d, WeightSpec(), jets, degree)
        try:
            amps = list(extremal_form(d, WeightSpec(), jets, degree, criterion_tol).amplitudes)
        except MultiValuedFormError:
            amps = None
    return SearchResult(
        list(new), orders, amps, [x for x, _ in deltas], float(residual), total_iter, status,
        [int(x) for x in r], int(q), trace, gerr if check_gradient else None, numeric,
    )


# -- counterexample family ----------------------------------------------------

def mobius(b: complex):
    """Involutive disk automorphism ``z -> (b - z) / (1 - conj(b) z)``."""
    b = complex(b)
    return lambda z: (b - np.asarray(z)) / (1 - np.conj(b) * np.asarray(z))


def image_disk(b: complex, r: float) -> Circle:
    """Image of ``|z| < r`` under :func:`mobius` ``(b)``."""
    s = 1 - r * r * abs(b) ** 2
    return Circle(b * (1 - r * r) / s, r * (1 - abs(b) ** 2) / s)


def _disjoint(circles, margin=0.0):
    for i in range(len(circles)):
        for j in range(i):
            if abs(circles[i].center - circles[j].center) <= circles[i].radius + circles[j].radius + margin:
                return False
    return True


@dataclass(frozen=True, eq=False)
class CounterexampleDomain:
    domain: Domain
    a: float
    m: int
    M: int
    r0: float
    eps: float
    centers: tuple
    extra_holes: tuple

    def phi(self, j):
        return mobius(self.centers[j])

    def collar(self, j) -> Circle:
        return image_disk(self.centers[j], self.r0)

    def params(self):
        return {
            "a": self.a, "m": self.m, "M": self.M, "r0": self.r0, "eps": self.eps,
            "extra_holes": [h.to_dict() for h in self.extra_holes],
        }


def _auto_extra_holes(count, collars, radius=0.02):
    """Greedy placement at the candidate farthest from collars, holes and the unit circle."""
    grid = [0j] + [rho * np.exp(2j * np.pi * i / 48) for rho in np.linspace(0.1, 0.9, 17) for i in range(48)]
    out = []
    for _ in range(count):
        best, best_gap = None, 2 * radius
        for c in grid:
            gap = 1 - abs(c) - radius
            for o in list(collars) + out:
                gap = min(gap, abs(c - o.center) - o.radius - radius)
            if gap > best_gap:
                best, best_gap = c, gap
        if best is None:
            raise ValueError("could not place the extra holes")
        out.append(Circle(complex(best), radius))
    return out


def build_counterexample_domain(m: int, n: int, M: int, a: float = 0.5, extra_holes: Sequence[Circle] | None = None,
                                eps: float | None = None) -> CounterexampleDomain:
    """Unit disk minus ``m + 1`` Mobius-image disks and ``n - m - 2`` extra disks.

    Hole ``j`` is the image of ``|z| <= eps`` under ``phi_j`` with centers
    ``b_j = a exp(2 pi i j / (m + 1))``. ``r0`` is 0.9 of the bisected largest
    radius with pairwise disjoint collars ``phi_j(|z| < r)`` and by default
    ``eps = r0^((M+1) m) / 2``.
    """
    if not 0 < a < 1:
        raise ValueError("a must lie in (0, 1)")
    if m < 1 or n < m + 2 or M < 0:
        raise ValueError("need m >= 1, n >= m + 2 and M >= 0")
    b = [a * np.exp(2j * np.pi * j / (m + 1)) for j in range(m + 1)]
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _disjoint([image_disk(bj, mid) for bj in b]):
            lo = mid
        else:
            hi = mid
    r0 = 0.9 * lo
    if eps is None:
        eps = 0.5 * r0 ** ((M + 1) * m)
    if not 0 < eps < r0 ** ((M + 1) * m):
        raise ValueError("eps must lie in (0, r0^((M+1)m))")
    collars = [image_disk(bj, r0) for bj in b]
    count = n - m - 2
    if extra_holes is None:
        extra = _auto_extra_holes(count, collars) if count else []
    else:
        extra = list(extra_holes)
        if len(extra) != count:
            raise ValueError(f"expected {count} extra holes")
        if not _disjoint(collars + extra):
            raise ValueError("extra holes collide with the collars or with each other")
    holes = [image_disk(bj, eps) for bj in b] + extra
    d = build_domain(DomainSpec.circular(Circle(0j, 1.0), holes))
    return CounterexampleDomain(d, float(a), int(m), int(M), float(r0), float(eps), tuple(b), tuple(extra))


@dataclass
class CounterexampleCertificate:
    params: dict
    records: list
    samples: int
    status: str
    comparison_violations: int
    max_residual: float
    offending: dict | None = None

    def to_dict(self):
        return {
            "params": self.params, "samples": self.samples, "status": self.status,
            "comparison_violations": self.comparison_violations, "max_residual": self.max_residual,
            "offending": self.offending,
            "records": self.records,
        }


def certify_no_equality(ce: CounterexampleDomain, samples: int = 200, rng: np.random.Generator | None = None,
                        degree: int = 48) -> CounterexampleCertificate:
    """Check the pigeonhole bound ``u_j0(z_l) < 1/((M+1) m)`` on random tuples.

    For each sampled tuple a collar index ``j0`` free of sample points is
    located, then the bound is checked for all points; the comparison bound
    ``u_j <= log|phi_j| / log eps`` is checked for every hole ``j <= m``.
    """
    rng = rng or np.random.default_rng(0)
    d = ce.domain
    measures = harmonic_measures(d, degree)
    resid = max(u.residual for u in measures)
    threshold = 1.0 / ((ce.M + 1) * ce.m)
    leps = np.log(ce.eps)
    records, violations, status, offending = [], 0, "PASSED", None
    for s in range(samples):
        pts = random_interior_points(d, ce.m, rng, separation=1e-9)
        absphi = np.array([[abs(ce.phi(j)(z)) for z in pts] for j in range(ce.m + 1)])
        free = [j for j in range(ce.m + 1) if np.all(absphi[j] >= ce.r0)]
        if not free:
            raise RuntimeError("no empty collar: collars are not disjoint")
        j0 = free[0]
        vals = [float(measures[j0](z)) for z in pts]
        ok = max(vals) < threshold
        for j in range(ce.m + 1):
            bound = np.log(absphi[j]) / leps
            uj = np.array([float(measures[j](z)) for z in pts])
            if np.any(uj > bound + 10 * resid):
                violations += 1
                ok = False
        records.append({"j0": j0, "max_u": max(vals), "threshold": threshold, "ok": bool(ok)})
        if not ok and offending is None:
            status = "FAILED"
            offending = {"sample": s, "points": [[z.real, z.imag] for z in pts], "j0": j0, "values": vals}
    return CounterexampleCertificate(ce.params(), records, samples, status, violations, float(resid), offending)


# -- product domains ----------------------------------------------------------

def _factor_ok(f, tol):
    if isinstance(f, (bool, np.bool_)):
        return bool(f)
    if isinstance(f, EqualityReport):
        return all(x < tol for x in f.distances)
    return all(x < tol for _, x in f)


def product_combine(factors: Sequence, p_weights: Sequence[Sequence[float]], gamma_orders: Sequence[Sequence[int]],
                    tol: float = DEFAULT_TOL, norm_tol: float = 1e-12) -> bool:
    """Equality criterion on a product of planar factors.

    ``factors[j]`` is the integrality result of factor ``j`` (a list of
    ``(delta, distance)`` pairs, an :class:`EqualityReport` or a bool). For
    every multi-index ``beta`` the weights must satisfy
    ``sum_j (gamma_{j,beta_j} + 1) / p_{j,beta_j} = 1``.
    """
    if not (len(factors) == len(p_weights) == len(gamma_orders)):
        raise ValueError("one p-weight list and one order list per factor")
    # the sum over beta is separable, so checking the extremes covers every multi-index
    ratios = [np.array([(g + 1) / p for g, p in zip(gs, ps)]) for gs, ps in zip(gamma_orders, p_weights)]
    for gs, ps in zip(gamma_orders, p_weights):
        if len(gs) != len(ps) or not gs:
            raise ValueError("orders and weights must match per factor")
    idx_lo = [int(np.argmin(r)) for r in ratios]
    idx_hi = [int(np.argmax(r)) for r in ratios]
    for beta in (idx_lo, idx_hi):
        total = sum(r[b] for r, b in zip(ratios, beta))
        if abs(total - 1) > norm_tol:
            raise ValueError(f"normalization violated at beta={tuple(beta)}: sum = {total}")
    return all(_factor_ok(f, tol) for f in factors)
