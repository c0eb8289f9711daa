"""Equality criteria for the weighted Suita-type inequality on planar domains.

Problem data: jet points ``z_j`` with orders ``k_j``, amplitudes ``a_j`` and
weights ``p_j``; a weight ``v = log|g| + u`` and a profile ``c(t)``. The
module computes ``alpha_j``, the sum ``S``, the minimal weighted L2 norm
``C`` (hence ``B = 2/C``), the integrality numbers ``delta_k`` and the
extremal 1-form.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .geometry import Domain, contains, interior_mesh
from .green import green_boundary_flux, green_function, log_capacity
from .harmonic import BoundaryData, HarmonicFunction, dirichlet_solve, harmonic_measures

EQUALITY_CAPABLE = "EQUALITY_CAPABLE"
NOT_EQUALITY = "NOT_EQUALITY"
IMPOSSIBLE_BY_COUNT = "IMPOSSIBLE_BY_COUNT"
UNDETERMINED = "UNDETERMINED"

DEFAULT_TOL = 1e-6


class MultiValuedFormError(ValueError):
    pass


class QuadratureFailure(RuntimeError):
    pass


# -- problem data -----------------------------------------------------------

@dataclass(frozen=True)
class Profile:
    """``c(t) = sum_i w_i exp(-delta_i t)`` with ``w_i >= 0`` and ``0 <= delta_i < 1``."""

    terms: tuple = ((1.0, 0.0),)

    def __post_init__(self):
        if not self.terms:
            raise ValueError("profile needs at least one term")
        for w, delta in self.terms:
            if w < 0 or not 0 <= delta < 1:
                raise ValueError(f"inadmissible profile term ({w}, {delta})")
        if sum(w for w, _ in self.terms) <= 0:
            raise ValueError("profile vanishes identically")

    @classmethod
    def constant(cls, value=1.0):
        return cls(((float(value), 0.0),))

    @classmethod
    def exponential(cls, delta: float, weight=1.0):
        return cls(((float(weight), float(delta)),))

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return sum(w * np.exp(-delta * t) for w, delta in self.terms)

    @property
    def I(self) -> float:
        """``int_0^inf c(s) exp(-s) ds``."""
        return float(sum(w / (1 + delta) for w, delta in self.terms))

    @property
    def is_constant(self) -> bool:
        return all(delta == 0 for w, delta in self.terms if w > 0)

    def to_dict(self):
        return {"terms": [[float(w), float(delta)] for w, delta in self.terms]}

    @classmethod
    def from_dict(cls, d):
        if d is None or d == "constant":
            return cls.constant()
        if isinstance(d, dict) and "exp" in d:
            return cls.exponential(d["exp"])
        return cls(tuple((float(w), float(delta)) for w, delta in d["terms"]))


@dataclass(frozen=True, eq=False)
class WeightSpec:
    """``v = log|g| + u`` with ``g`` a polynomial (ascending coefficients)."""

    g: tuple = (1.0,)
    u: HarmonicFunction | None = None
    profile: Profile = field(default_factory=Profile)

    def __post_init__(self):
        if not any(c != 0 for c in self.g):
            raise ValueError("g must not vanish identically")

    @classmethod
    def from_measures(cls, d: Domain, lambdas: Sequence[float], degree=48, **kw):
        if len(lambdas) != d.n - 1:
            raise ValueError(f"expected {d.n - 1} measure coefficients")
        u = HarmonicFunction.zero(d)
        for lam, uk in zip(lambdas, _measures(d, degree)):
            u = u + float(lam) * uk
        return cls(u=u, **kw)

    @classmethod
    def from_boundary(cls, d: Domain, values, degree=48, **kw):
        return cls(u=dirichlet_solve(d, BoundaryData(tuple(values)), degree), **kw)

    @property
    def u_is_zero(self) -> bool:
        return self.u is None or self.u.is_zero()

    def g_value(self, z):
        return np.polyval(np.asarray(self.g[::-1], dtype=complex), z)

    def g_derivative_coeffs(self, z, order):
        """Taylor coefficients of ``g`` at ``z`` up to ``order``."""
        p = np.poly1d(np.asarray(self.g[::-1], dtype=complex))
        out = []
        for t in range(order + 1):
            out.append(p(z) / math.factorial(t))
            p = p.deriv()
        return out

    def v(self, z, check=True):
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore"):
            val = np.log(np.abs(self.g_value(z)))
        if self.u is not None:
            val = val + self.u(z, check)
        return val

    def g_zeros(self, d: Domain, tol=1e-9):
        """Zeros of ``g`` inside the domain as ``(point, multiplicity)``."""
        coeffs = np.trim_zeros(np.asarray(self.g, dtype=complex), "b")
        if len(coeffs) <= 1:
            return []
        roots = np.roots(coeffs[::-1])
        out = []
        for r in roots:
            for i, (c, mult) in enumerate(out):
                if abs(r - c) < 1e-6:
                    out[i] = (c, mult + 1)
                    break
            else:
                out.append((r, 1))
        return [(complex(c), m) for c, m in out if contains(d, c)]


@dataclass(frozen=True)
class JetConfig:
    points: tuple
    orders: tuple
    amplitudes: tuple | None = None
    p: tuple | None = None

    def __post_init__(self):
        pts = tuple(complex(z) for z in self.points)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "orders", tuple(int(k) for k in self.orders))
        if len(self.orders) != len(pts) or not pts:
            raise ValueError("need one order per point and at least one point")
        if any(k < 0 for k in self.orders):
            raise ValueError("orders must be nonnegative")
        for i in range(len(pts)):
            for j in range(i):
                if abs(pts[i] - pts[j]) < 1e-12:
                    raise ValueError("jet points must be distinct")
        if self.p is None:
            object.__setattr__(self, "p", tuple(float(k + 1) for k in self.orders))
        else:
            object.__setattr__(self, "p", tuple(float(x) for x in self.p))
            if len(self.p) != len(pts) or any(x <= 0 for x in self.p):
                raise ValueError("p weights must be positive, one per point")
        if self.amplitudes is not None:
            amps = tuple(complex(a) for a in self.amplitudes)
            if len(amps) != len(pts) or any(a == 0 for a in amps):
                raise ValueError("amplitudes must be nonzero, one per point")
            object.__setattr__(self, "amplitudes", amps)

    @property
    def m(self) -> int:
        return len(self.points)

    @property
    def total_order(self) -> int:
        return sum(k + 1 for k in self.orders)

    def with_amplitudes(self, amps):
        return JetConfig(self.points, self.orders, tuple(amps), self.p)

    def to_dict(self):
        out = {
            "points": [[z.real, z.imag] for z in self.points],
            "orders": list(self.orders),
            "p": list(self.p),
        }
        if self.amplitudes is not None:
            out["amplitudes"] = [[a.real, a.imag] for a in self.amplitudes]
        return out

    @classmethod
    def from_dict(cls, d):
        def cplx(x):
            return complex(x[0], x[1]) if isinstance(x, (list, tuple)) else complex(x)

        amps = d.get("amplitudes")
        return cls(
            tuple(cplx(z) for z in d["points"]),
            tuple(d["orders"]),
            None if amps is None else tuple(cplx(a) for a in amps),
            None if d.get("p") is None else tuple(d["p"]),
        )


def validate(d: Domain, w: WeightSpec, j: JetConfig):
    pts = np.array(j.points)
    if not np.all(contains(d, pts)):
        raise ValueError("jet points must lie inside the domain")
    if np.any(np.abs(w.g_value(pts)) < 1e-14):
        raise ValueError("g vanishes at a jet point (v = -inf)")
    if w.u is not None and w.u.domain is not d:
        raise ValueError("weight u lives on a different domain")


@lru_cache(maxsize=64)
def _measures(d: Domain, degree: int):
    return tuple(harmonic_measures(d, degree))


def _greens(d, j, degree):
    return [green_function(d, z, degree) for z in j.points]


# -- closed quantities -------------------------------------------------------

def alpha_values(d: Domain, w: WeightSpec, j: JetConfig, degree: int = 48) -> np.ndarray:
    """``alpha_j = sum_{l != j} (k_l + 1) G(z_j, z_l) + v(z_j)``."""
    validate(d, w, j)
    greens = _greens(d, j, degree)
    out = []
    for i, z in enumerate(j.points):
        a = float(w.v(z))
        if not np.isfinite(a):
            raise ValueError(f"v is infinite at jet point {z}")
        for l, g in enumerate(greens):
            if l != i:
                a += (j.orders[l] + 1) * float(g(z))
        out.append(a)
    return np.array(out)


def capacities(d: Domain, j: JetConfig, degree: int = 48) -> np.ndarray:
    return np.array([log_capacity(g) for g in _greens(d, j, degree)])


def rhs_sum(d: Domain, w: WeightSpec, j: JetConfig, degree: int = 48) -> float:
    """``S = sum_j pi |a_j|^2 exp(-2 alpha_j) / (p_j c_j^(2(k_j+1)))``."""
    if j.amplitudes is None:
        raise ValueError("rhs_sum needs amplitudes")
    alpha = alpha_values(d, w, j, degree)
    cap = capacities(d, j, degree)
    s = 0.0
    for a, al, c, p, k in zip(j.amplitudes, alpha, cap, j.p, j.orders):
        s += np.pi * abs(a) ** 2 * np.exp(-2 * al) / (p * c ** (2 * (k + 1)))
    return float(s)


def _dist(x):
    return abs(x - round(x))


def integrality_deltas(d: Domain, w: WeightSpec, j: JetConfig, degree: int = 48) -> list[tuple[float, float]]:
    """``(delta_k, distance to Z)`` for each hole ``k``.

    ``delta_k = sum_j (k_j+1) u_k(z_j) - P_k(u)`` where ``P_k`` is the
    counterclockwise conjugate period of ``u`` around hole ``k``. The minus
    sign comes from measuring the normal derivative along the direction that
    points out of the domain into the hole.
    """
    validate(d, w, j)
    if d.n == 1:
        return []
    out = []
    for k, uk in enumerate(_measures(d, degree)):
        delta = sum((kj + 1) * float(uk(z)) for z, kj in zip(j.points, j.orders))
        if w.u is not None:
            delta -= w.u.conjugate_period(k)
        out.append((delta, _dist(delta)))
    return out


def integrality_deltas_numeric(d: Domain, w: WeightSpec, j: JetConfig, degree: int = 48,
                               nodes: int = 512) -> list[float]:
    """Independent line-integral evaluation of the ``delta_k``.

    ``u_k(z_j)`` is replaced by the boundary flux of ``G(., z_j)`` through
    hole ``k`` and the period of ``u`` is integrated along the hole cycle.
    """
    validate(d, w, j)
    greens = _greens(d, j, degree)
    out = []
    for k in range(d.n - 1):
        delta = sum((kj + 1) * green_boundary_flux(g, k, nodes) for g, kj in zip(greens, j.orders))
        if w.u is not None:
            delta -= w.u.period_integral(d.cycles[k], nodes)
        out.append(delta)
    return out


def necessary_condition(d: Domain, j: JetConfig, w: WeightSpec | None = None) -> bool:
    """Counting condition ``n <= sum (k_j + 1)``, valid when ``u = 0``."""
    if w is not None and not w.u_is_zero:
        raise ValueError("the counting condition assumes u = 0")
    return d.n <= j.total_order


def annulus_criterion(R: float, c: float, moduli: Sequence[float], orders: Sequence[int],
                      tol: float = DEFAULT_TOL):
    """Closed-form criterion on ``1 < |z| < R``.

    Equality is possible iff ``prod |z_j|^(k_j+1) = R^(sum(k_j+1) + c/(2 pi) - N)``
    for an integer ``N``, where ``c`` is the flux of ``u`` across a circle
    ``|z| = r`` measured toward the inner boundary. Returns ``(ok, N, residual)``
    with the residual in natural-log units.
    """
    if R <= 1:
        raise ValueError("annulus needs R > 1")
    moduli = np.asarray(moduli, dtype=float)
    if np.any(moduli <= 1) or np.any(moduli >= R):
        raise ValueError("points must satisfy 1 < |z| < R")
    total = sum(int(k) + 1 for k in orders)
    lhs = float(np.sum((np.asarray(orders) + 1) * np.log(moduli)))
    lR = math.log(R)
    # exponent condition: lhs / log R = total + c/(2 pi) - N
    N = round(total + c / (2 * np.pi) - lhs / lR)
    residual = abs(lhs - (total + c / (2 * np.pi) - N) * lR)
    return residual / lR < tol, int(N), float(residual)


# -- minimal L2 extension -----------------------------------------------------

def _taylor_rows(d: Domain, z0: complex, order: int, N: int) -> np.ndarray:
    """Rows ``t = 0..order`` of Taylor coefficients of every basis function at ``z0``."""
    rows = np.zeros((order + 1, _l2_size(d, N)), dtype=complex)
    w0 = (z0 - d.outer_center) / d.outer_scale
    s0 = d.outer_scale
    for t in range(order + 1):
        for n in range(t, N + 1):
            rows[t, n] = math.comb(n, t) * w0 ** (n - t) / s0**t
    col = N + 1
    for k in range(d.n - 1):
        c, s = d.anchors[k], d.hole_scales[k]
        zeta = s / (z0 - c)
        for n in range(1, N + 1):
            for t in range(order + 1):
                rows[t, col] = zeta**n * (-1) ** t * math.comb(n + t - 1, t) / (z0 - c) ** t
            col += 1
    return rows


def _l2_size(d, N):
    return (N + 1) + (d.n - 1) * N


def _l2_basis(d: Domain, z, N) -> np.ndarray:
    cols = []
    w = (z - d.outer_center) / d.outer_scale
    p = np.ones(z.shape, dtype=complex)
    cols.append(p)
    for _ in range(N):
        p = p * w
        cols.append(p)
    for k in range(d.n - 1):
        zeta = d.hole_scales[k] / (z - d.anchors[k])
        p = np.ones(z.shape, dtype=complex)
        for _ in range(N):
            p = p * zeta
            cols.append(p)
    return np.column_stack(cols)


def _l2_eval(d, coeffs, z, N):
    return _l2_basis(d, np.atleast_1d(np.asarray(z, dtype=complex)), N) @ coeffs


def weight_density(d: Domain, w: WeightSpec, j: JetConfig, z, degree: int = 48) -> np.ndarray:
    """``rho = exp(-2 sum (k_j+1-p_j) G_j - 2 v) c(-2 sum p_j G_j)``."""
    z = np.asarray(z, dtype=complex)
    expo = -2 * w.v(z, check=False)
    power = any(k + 1 != p for k, p in zip(j.orders, j.p))
    if not power and w.profile.is_constant:
        # the Green terms cancel, so skip them (they are infinite at the poles)
        return np.exp(expo) * w.profile(np.zeros(z.shape))
    t = np.zeros(z.shape)
    for g, k, p in zip(_greens(d, j, degree), j.orders, j.p):
        G = g(z, check=False)
        if k + 1 != p:
            expo = expo - 2 * (k + 1 - p) * G
        t = t - 2 * p * G
    return np.exp(expo) * w.profile(t)


def singular_centers(d: Domain, w: WeightSpec, j: JetConfig):
    """Points where the weight has a power-type singularity or zero."""
    out = []
    for z, k, p in zip(j.points, j.orders, j.p):
        if k + 1 != p or not w.profile.is_constant:
            out.append(z)
    out += [c for c, _ in w.g_zeros(d)]
    return out


def l2_mesh(d: Domain, w: WeightSpec, j: JetConfig, basis_degree: int, area_nodes: int | None = None):
    N = basis_degree
    n_theta = max(64, 2 * N + 48)
    n_radial = max(24, N + 24)
    if area_nodes is not None:
        n_theta = max(n_theta, int(np.sqrt(2.0 * area_nodes)))
        n_radial = max(n_radial, int(area_nodes / n_theta))
    return interior_mesh(d, n_theta * n_radial, singular_centers(d, w, j), n_theta=n_theta, n_radial=n_radial)


@dataclass(frozen=True)
class MinimalL2Result:
    C: float
    minimizer: np.ndarray
    degree: int
    constraint_residual: float
    nodes: int

    def __iter__(self):
        return iter((self.C, self.minimizer))


def minimal_l2(d: Domain, w: WeightSpec, j: JetConfig, basis_degree: int = 24, degree: int = 48,
               mesh=None, area_nodes: int | None = None) -> MinimalL2Result:
    """Minimal ``int 2|h|^2 rho dA`` over ``h dz`` meeting the jet constraints.

    ``h`` ranges over powers of the scaled outer variable (``0..N``) and of
    the scaled reciprocal hole variables (``1..N``). Constraints fix the
    Taylor coefficients of ``h`` at each ``z_j`` up to order ``k_j`` and force
    vanishing at zeros of ``g`` to their multiplicity. The constrained problem
    is solved by the null-space method, with the weighted quadratic form
    handled as a least-squares problem on quadrature samples.
    """
    validate(d, w, j)
    if j.amplitudes is None:
        raise ValueError("minimal_l2 needs amplitudes")
    N = int(basis_degree)
    if mesh is None:
        mesh = l2_mesh(d, w, j, N, area_nodes)
    rho = weight_density(d, w, j, mesh.nodes, degree)
    wt = mesh.weights * rho
    if not np.all(np.isfinite(wt)) or np.any(wt < 0):
        raise QuadratureFailure("weight is not finite and nonnegative on the mesh")

    rows, rhs = [], []
    for z, k, a in zip(j.points, j.orders, j.amplitudes):
        rows.append(_taylor_rows(d, z, k, N))
        b = np.zeros(k + 1, dtype=complex)
        b[k] = a
        rhs.append(b)
    for c, mult in w.g_zeros(d):
        rows.append(_taylor_rows(d, c, mult - 1, N))
        rhs.append(np.zeros(mult, dtype=complex))
    A = np.vstack(rows)
    b = np.concatenate(rhs)
    if A.shape[0] > A.shape[1]:
        raise ValueError(f"basis degree {N} too small for {A.shape[0]} constraints")

    Phi = _l2_basis(d, mesh.nodes, N)
    M = np.sqrt(wt)[:, None] * Phi
    scale = np.linalg.norm(M, axis=0)
    if np.any(scale == 0):
        raise QuadratureFailure("basis function with zero weighted norm")
    Ms, As = M / scale, A / scale
    rnorm = np.linalg.norm(As, axis=1)
    As, bs = As / rnorm[:, None], b / rnorm

    U, sv, Vh = np.linalg.svd(As)
    r = int(np.sum(sv > 1e-12 * sv[0]))
    if r < As.shape[0]:
        raise ValueError(f"jet constraints are infeasible at basis degree {N}")
    x_p = Vh[:r].conj().T @ ((U.conj().T @ bs)[:r] / sv[:r])
    Z = Vh[r:].conj().T
    if Z.shape[1]:
        y, *_ = np.linalg.lstsq(Ms @ Z, -(Ms @ x_p), rcond=1e-14)
        xs = x_p + Z @ y
    else:
        xs = x_p
    x = xs / scale
    C = 2.0 * float(np.linalg.norm(Ms @ xs) ** 2)
    if not C > 0:
        raise QuadratureFailure("non-positive minimal norm")
    cres = float(np.max(np.abs(A @ x - b)) / max(1.0, np.max(np.abs(b))))
    return MinimalL2Result(C, x, N, cres, len(mesh.weights))


def minimizer_taylor(d: Domain, coeffs: np.ndarray, z0: complex, order: int, basis_degree: int) -> np.ndarray:
    return _taylor_rows(d, complex(z0), order, basis_degree) @ coeffs


# -- extremal form ------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class ExtremalForm:
    """``Phi = g prod (z-z_j)^(k_j+1) exp(W) sum p_j (1/(z-z_j) + H_j') dz``.

    ``W = sum (k_j+1) H_j + V`` completes the harmonic part; its multi-valued
    part is ``sum_k e_k log(z - c_k)`` with integer ``e_k`` when the
    integrality criterion holds.
    """

    domain: Domain
    weight: WeightSpec
    jets: JetConfig
    greens: tuple
    exponents: np.ndarray
    base: complex
    amplitudes: tuple
    branch_mismatch: float
    flagged: bool

    def _w_single(self, z):
        f = 0
        for g, k in zip(self.greens, self.jets.orders):
            f = f + (k + 1) * g.h.single_valued_part(z)
        if self.weight.u is not None:
            f = f + self.weight.u.single_valued_part(z)
        return f

    def __call__(self, z):
        """Coefficient of ``dz`` at ``z``."""
        d = self.domain
        z = np.asarray(z, dtype=complex)
        val = self.weight.g_value(z) * np.exp(self._w_single(z))
        for k, e in enumerate(np.rint(self.exponents)):
            val = val * (z - d.anchors[k]) ** int(e)
        s = 0
        for g, zj, k, p in zip(self.greens, self.jets.points, self.jets.orders, self.jets.p):
            val = val * (z - zj) ** (k + 1)
            s = s + p * (1.0 / (z - zj) + g.h.derivative(z, check=False))
        return val * s

    def along(self, path):
        """``Phi`` at the end of ``path`` by continuing ``exp(W)`` from the base point."""
        path = np.asarray(path, dtype=complex)
        if path[0] != self.base:
            path = np.concatenate([[self.base], path])
        inc = 0
        for g, k in zip(self.greens, self.jets.orders):
            inc = inc + (k + 1) * g.h.increment(path)
        if self.weight.u is not None:
            inc = inc + self.weight.u.increment(path)
        z = path[-1]
        w0 = self._w_single(self.base)
        for k, e in enumerate(self.exponents):
            w0 = w0 + e * np.log(self.base - self.domain.anchors[k])
        val = self.weight.g_value(z) * np.exp(w0 + inc)
        s = 0
        for g, zj, k, p in zip(self.greens, self.jets.points, self.jets.orders, self.jets.p):
            val = val * (z - zj) ** (k + 1)
            s = s + p * (1.0 / (z - zj) + g.h.derivative(z, check=False))
        return val * s


def _base_point(d: Domain, avoid) -> complex:
    mesh = interior_mesh(d, 2000)
    z = mesh.nodes
    score = d.clearance(z)
    for a in avoid:
        score = np.minimum(score, np.abs(z - a))
    return complex(z[int(np.argmax(score))])


def extremal_form(d: Domain, w: WeightSpec, j: JetConfig, degree: int = 48,
                  tol: float = DEFAULT_TOL) -> ExtremalForm:
    """Extremal 1-form and amplitudes ``a*_j = lim Phi / ((z - z_j)^k_j dz)``.

    Raises :class:`MultiValuedFormError` when some exponent ``e_k`` (equal to
    ``-delta_k``) is not an integer within ``tol``. Branch consistency is
    checked by continuing ``exp(W)`` once around every hole cycle.
    """
    validate(d, w, j)
    greens = tuple(_greens(d, j, degree))
    e = np.zeros(d.n - 1)
    for k in range(d.n - 1):
        e[k] = sum((kj + 1) * g.h.conjugate_period(k) for g, kj in zip(greens, j.orders))
        if w.u is not None:
            e[k] += w.u.conjugate_period(k)
    bad = [k for k in range(d.n - 1) if _dist(e[k]) >= tol]
    if bad:
        raise MultiValuedFormError(
            f"multi-valued extremal form: exponents {[float(e[k]) for k in bad]} on holes {bad} are not integers"
        )
    base = _base_point(d, j.points)

    # going once around each hole changes W by 2 pi i e_k; compare with the rounded exponent
    mismatch = 0.0
    for k, cyc in enumerate(d.cycles):
        zc, _ = cyc.nodes(256)
        loop = np.concatenate([zc, zc[:1]])
        inc = sum((kj + 1) * g.h.increment(loop) for g, kj in zip(greens, j.orders))
        if w.u is not None:
            inc += w.u.increment(loop)
        inc += sum((kj + 1) * 2j * np.pi * round(cyc.winding(zj)) for zj, kj in zip(j.points, j.orders))
        mismatch = max(mismatch, abs(np.exp(inc) - 1))

    form = ExtremalForm(d, w, j, greens, e, base, (), mismatch, mismatch > 10 * tol)
    amps = []
    for i, (zj, p) in enumerate(zip(j.points, j.p)):
        val = w.g_value(zj) * np.exp(form._w_single(zj)) * p
        for k, ek in enumerate(np.rint(e)):
            val = val * (zj - d.anchors[k]) ** int(ek)
        for l, (zl, kl) in enumerate(zip(j.points, j.orders)):
            if l != i:
                val = val * (zj - zl) ** (kl + 1)
        amps.append(complex(val))
    return ExtremalForm(d, w, j, greens, e, base, tuple(amps), mismatch, mismatch > 10 * tol)


# -- combined report ----------------------------------------------------------

@dataclass
class EqualityReport:
    deltas: list
    distances: list
    necessary_condition_ok: bool | None
    I: float
    S: float
    C: float
    B: float
    defect: float
    eps_trunc: float
    amplitudes: list
    extremal_amplitudes: list | None
    verdict: str
    alphas: list
    capacities: list
    harmonic_residual: float
    basis_degree: int
    branch_mismatch: float | None = None

    def to_dict(self):
        def cl(v):
            return None if v is None else [[complex(a).real, complex(a).imag] for a in v]

        return {
            "deltas": [float(x) for x in self.deltas],
            "distances": [float(x) for x in self.distances],
            "necessary_condition_ok": self.necessary_condition_ok,
            "I": self.I, "S": self.S, "C": self.C, "B": self.B,
            "defect": self.defect, "eps_trunc": self.eps_trunc,
            "amplitudes": cl(self.amplitudes),
            "extremal_amplitudes": cl(self.extremal_amplitudes),
            "verdict": self.verdict,
            "alphas": [float(x) for x in self.alphas],
            "capacities": [float(x) for x in self.capacities],
            "harmonic_residual": self.harmonic_residual,
            "basis_degree": self.basis_degree,
            "branch_mismatch": self.branch_mismatch,
        }


def classify(d: Domain, w: WeightSpec, j: JetConfig, distances, tol=DEFAULT_TOL):
    if w.u_is_zero and not necessary_condition(d, j):
        return IMPOSSIBLE_BY_COUNT
    if d.n == 1 or all(x < tol for x in distances):
        return EQUALITY_CAPABLE
    if any(x >= 10 * tol for x in distances):
        return NOT_EQUALITY
    return UNDETERMINED


def criterion_verdict(d: Domain, w: WeightSpec, j: JetConfig, degree: int = 48, tol: float = DEFAULT_TOL) -> str:
    """Verdict from the counting condition and the ``delta_k`` alone (no L2 solve)."""
    dist = [x for _, x in integrality_deltas(d, w, j, degree)]
    return classify(d, w, j, dist, tol)


def equality_defect(d: Domain, w: WeightSpec, j: JetConfig, basis_degree: int = 24, degree: int = 48,
                    tol: float = DEFAULT_TOL, area_nodes: int | None = None, defect_floor: float = 1e-9,
                    doubling: bool = True) -> EqualityReport:
    """Full equality analysis of one configuration.

    Missing amplitudes are taken from the extremal form when it is
    single-valued and set to 1 otherwise. ``eps_trunc`` is the relative
    change of ``C`` between basis degrees ``N`` and ``2N``; the reported ``C``
    comes from degree ``2N``. A defect below ``-10 eps_trunc - defect_floor``
    is impossible and raises :class:`QuadratureFailure`.
    """
    validate(d, w, j)
    deltas = integrality_deltas(d, w, j, degree)
    dist = [x for _, x in deltas]
    verdict = classify(d, w, j, dist, tol)
    nec = necessary_condition(d, j) if w.u_is_zero else None

    ext = None
    mismatch = None
    if verdict == EQUALITY_CAPABLE:
        form = extremal_form(d, w, j, degree, tol)
        ext = list(form.amplitudes)
        mismatch = form.branch_mismatch
    if j.amplitudes is None:
        j = j.with_amplitudes(ext if ext is not None else [1.0] * j.m)

    S = rhs_sum(d, w, j, degree)
    N = int(basis_degree)
    if doubling:
        c1 = minimal_l2(d, w, j, N, degree, area_nodes=area_nodes).C
        C = minimal_l2(d, w, j, 2 * N, degree, area_nodes=area_nodes).C
        eps = abs(c1 / C - 1)
        N = 2 * N
    else:
        C = minimal_l2(d, w, j, N, degree, area_nodes=area_nodes).C
        eps = 0.0
    I = w.profile.I
    B = 2.0 / C
    defect = I * S * B - 1
    if defect < -10 * eps - defect_floor:
        raise QuadratureFailure(
            f"defect {defect:.3e} below the truncation bound {-10 * eps:.3e}: quadrature or basis failure"
        )
    res = max([g.residual for g in _greens(d, j, degree)] + [u.residual for u in _measures(d, degree)] + [0.0])
    return EqualityReport(
        deltas=[x for x, _ in deltas], distances=dist, necessary_condition_ok=nec,
        I=I, S=S, C=C, B=B, defect=float(defect), eps_trunc=float(eps),
        amplitudes=list(j.amplitudes), extremal_amplitudes=ext, verdict=verdict,
        alphas=list(alpha_values(d, w, j, degree)), capacities=list(capacities(d, j, degree)),
        harmonic_residual=float(res), basis_degree=N, branch_mismatch=mismatch,
    )
