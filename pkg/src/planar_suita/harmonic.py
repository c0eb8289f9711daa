"""Harmonic functions on multiply-connected domains via series collocation.

A harmonic function is stored as the real part of

    F(z) = c + sum_n a_n w^n + sum_k d_k log(z - c_k) + sum_k sum_n b_kn zeta_k^n

with ``w = (z - c_0) / s_0`` (outer center and extent) and
``zeta_k = s_k / (z - c_k)`` (hole anchor and extent). The only multi-valued
part of ``F`` is the logarithmic one, so the conjugate period around hole
``k`` is exactly ``d_k``.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, replace

import numpy as np

from .geometry import Domain, boundary_nodes, contains


class DirichletAccuracyWarning(UserWarning):
    pass


def _outer_var(d: Domain, z):
    return (z - d.outer_center) / d.outer_scale


def _hole_var(d: Domain, k: int, z):
    return d.hole_scales[k] / (z - d.anchors[k])


def _polyval(coeffs, x):
    """``sum_{n>=1} coeffs[n-1] * x**n`` by Horner."""
    acc = np.zeros(np.shape(x), dtype=complex)
    for c in coeffs[::-1]:
        acc = (acc + c) * x
    return acc


def _polyder(coeffs, x):
    """``sum_{n>=1} n * coeffs[n-1] * x**(n-1)``."""
    acc = np.zeros(np.shape(x), dtype=complex)
    n = len(coeffs)
    for i in range(n, 0, -1):
        acc = acc * x + i * coeffs[i - 1]
    return acc


@dataclass(frozen=True, eq=False)
class HarmonicFunction:
    domain: Domain
    const: float
    outer: np.ndarray
    log: np.ndarray
    holes: np.ndarray
    residual: float = 0.0
    flagged: bool = False

    @property
    def degree(self) -> int:
        return len(self.outer)

    @classmethod
    def zero(cls, d: Domain, degree: int = 0):
        nh = d.n - 1
        return cls(d, 0.0, np.zeros(degree, complex), np.zeros(nh), np.zeros((nh, degree), complex))

    @classmethod
    def constant(cls, d: Domain, value: float):
        return replace(cls.zero(d), const=float(value))

    @classmethod
    def log_term(cls, d: Domain, k: int, coeff: float = 1.0):
        """``coeff * log|z - c_k|`` for the anchor of hole ``k``."""
        u = cls.zero(d)
        log = u.log.copy()
        log[k] = coeff
        return replace(u, log=log)

    def padded(self, degree: int) -> "HarmonicFunction":
        if degree <= self.degree:
            return self
        extra = degree - self.degree
        outer = np.concatenate([self.outer, np.zeros(extra, complex)])
        holes = np.concatenate([self.holes, np.zeros((len(self.log), extra), complex)], axis=1)
        return replace(self, outer=outer, holes=holes)

    def __add__(self, other):
        if isinstance(other, (int, float)):
            return replace(self, const=self.const + other)
        if other.domain is not self.domain:
            raise ValueError("harmonic functions live on different domains")
        deg = max(self.degree, other.degree)
        a, b = self.padded(deg), other.padded(deg)
        return HarmonicFunction(
            self.domain, a.const + b.const, a.outer + b.outer, a.log + b.log, a.holes + b.holes,
            residual=self.residual + other.residual, flagged=self.flagged or other.flagged,
        )

    __radd__ = __add__

    def __mul__(self, s):
        s = float(s)
        return replace(
            self, const=s * self.const, outer=s * self.outer, log=s * self.log,
            holes=s * self.holes, residual=abs(s) * self.residual,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1.0

    def __sub__(self, other):
        return self + (-other)

    def is_zero(self, tol=0.0) -> bool:
        return (
            abs(self.const) <= tol and np.all(np.abs(self.outer) <= tol)
            and np.all(np.abs(self.log) <= tol) and np.all(np.abs(self.holes) <= tol)
        )

    def _check(self, z):
        if not np.all(contains(self.domain, z)):
            raise ValueError("evaluation point outside the domain")

    def single_valued_part(self, z):
        """``F(z)`` without its logarithmic terms."""
        d = self.domain
        z = np.asarray(z, dtype=complex)
        f = self.const + _polyval(self.outer, _outer_var(d, z))
        for k in range(len(self.log)):
            f = f + _polyval(self.holes[k], _hole_var(d, k, z))
        return f

    def analytic(self, z, check=True):
        """Principal-branch value of the completion ``F`` with ``Re F = u``."""
        z = np.asarray(z, dtype=complex)
        if check:
            self._check(z)
        f = self.single_valued_part(z)
        for k, dk in enumerate(self.log):
            if dk != 0:
                f = f + dk * np.log(z - self.domain.anchors[k])
        return f

    def __call__(self, z, check=True):
        z = np.asarray(z, dtype=complex)
        if check:
            self._check(z)
        u = np.real(self.single_valued_part(z))
        for k, dk in enumerate(self.log):
            if dk != 0:
                u = u + dk * np.log(np.abs(z - self.domain.anchors[k]))
        return u

    def derivative(self, z, check=True):
        """``F'(z) = u_x - i u_y``."""
        d = self.domain
        z = np.asarray(z, dtype=complex)
        if check:
            self._check(z)
        f = _polyder(self.outer, _outer_var(d, z)) / d.outer_scale
        for k, dk in enumerate(self.log):
            zeta = _hole_var(d, k, z)
            f = f + dk / (z - d.anchors[k])
            # d/dz zeta^n = -n zeta^(n+1) / s_k
            f = f - _polyder(self.holes[k], zeta) * zeta**2 / d.hole_scales[k]
        return f

    def gradient(self, z, check=True):
        fp = self.derivative(z, check)
        return np.real(fp), -np.imag(fp)

    def conjugate_period(self, k: int) -> float:
        """``(1/2 pi) oint_{gamma_k} d~u`` counterclockwise around hole ``k``."""
        if not 0 <= k < len(self.log):
            raise IndexError(f"hole index {k} out of range for n={self.domain.n}")
        return float(self.log[k])

    def period_integral(self, cycle, m=512) -> float:
        """Numeric ``(1/2 pi) oint Im(F'(z) dz)`` along ``cycle``."""
        z, dz = cycle.nodes(m)
        return float(np.sum(np.imag(self.derivative(z, check=False) * dz)) / (2 * np.pi))

    def increment(self, path, samples_per_segment=64) -> complex:
        """``int_path F'(z) dz`` along a polyline in the domain.

        Logarithmic terms contribute ``d_k (log|end-c_k| - log|start-c_k| + i darg)``
        with the argument change accumulated segment by segment, so the
        result follows the multi-valued completion along the path.
        """
        path = np.asarray(path, dtype=complex)
        if path.ndim != 1 or len(path) < 2:
            raise ValueError("path needs at least two vertices")
        s = np.linspace(0.0, 1.0, samples_per_segment + 1)
        pts = (path[:-1, None] + (path[1:] - path[:-1])[:, None] * s[None, :]).ravel()
        if not np.all(contains(self.domain, pts)):
            raise ValueError("path leaves the domain")
        sv = self.single_valued_part(path[-1]) - self.single_valued_part(path[0])
        total = complex(sv)
        for k, dk in enumerate(self.log):
            if dk == 0:
                continue
            c = self.domain.anchors[k]
            darg = np.sum(np.angle((path[1:] - c) / (path[:-1] - c)))
            dlog = np.log(abs(path[-1] - c)) - np.log(abs(path[0] - c))
            total += dk * (dlog + 1j * darg)
        return total


# -- module-level aliases for the operation names used across the package --

def evaluate(u: HarmonicFunction, z):
    return u(z)


def gradient(u: HarmonicFunction, z):
    return u.gradient(z)


def conjugate_period(u: HarmonicFunction, k: int) -> float:
    return u.conjugate_period(k)


def analytic_derivative(u: HarmonicFunction, z):
    return u.derivative(z)


def analytic_completion_increment(u: HarmonicFunction, path) -> complex:
    return u.increment(path)


@dataclass(frozen=True)
class BoundaryData:
    """Dirichlet data, one entry per boundary component (holes first, outer last).

    Each entry is a float constant, a callable ``f(z) -> values`` or an array
    of samples at equispaced parameter values (resampled trigonometrically).
    """

    values: tuple

    @classmethod
    def constant(cls, d: Domain, value=1.0):
        return cls(tuple(float(value) for _ in range(d.n)))

    @classmethod
    def indicator(cls, d: Domain, k: int):
        """Data of the harmonic measure of hole ``k``."""
        return cls(tuple(1.0 if i == k else 0.0 for i in range(d.n)))

    @classmethod
    def green(cls, d: Domain, z0: complex):
        f = lambda z: -np.log(np.abs(z - z0))
        return cls(tuple(f for _ in range(d.n)))

    def sample(self, d: Domain, per_component: int, nodes: np.ndarray) -> np.ndarray:
        if len(self.values) != d.n:
            raise ValueError(f"expected {d.n} boundary entries, got {len(self.values)}")
        out = []
        for k, entry in enumerate(self.values):
            z = nodes[k * per_component:(k + 1) * per_component]
            if callable(entry):
                vals = np.asarray(entry(z), dtype=float)
            elif np.ndim(entry) == 0:
                vals = np.full(per_component, float(entry))
            else:
                vals = _resample_periodic(np.asarray(entry, dtype=float), per_component)
            out.append(vals)
        data = np.concatenate(out)
        if not np.all(np.isfinite(data)):
            raise ValueError("boundary data is not finite")
        return data


def _resample_periodic(samples, m):
    if len(samples) == m:
        return samples
    coef = np.fft.rfft(samples) / len(samples)
    out = np.zeros(m // 2 + 1, dtype=complex)
    keep = min(len(coef), len(out))
    out[:keep] = coef[:keep]
    return np.fft.irfft(out * m, m)


def basis_size(d: Domain, degree: int) -> int:
    return 1 + 2 * degree + (d.n - 1) * (1 + 2 * degree)


def _design_matrix(d: Domain, z, degree):
    """Real collocation columns: 1, Re/Im w^n, then per hole log|z-c|, Re/Im zeta^n."""
    cols = [np.ones(z.shape)]
    w = _outer_var(d, z)
    p = np.ones(z.shape, dtype=complex)
    for _ in range(degree):
        p = p * w
        cols += [p.real, p.imag]
    for k in range(d.n - 1):
        cols.append(np.log(np.abs(z - d.anchors[k])))
        zeta = _hole_var(d, k, z)
        p = np.ones(z.shape, dtype=complex)
        for _ in range(degree):
            p = p * zeta
            cols += [p.real, p.imag]
    return np.column_stack(cols)


def _unpack(d: Domain, x, degree):
    # column pair (Re, Im) with coefficients (alpha, beta) is Re((alpha - i beta) w^n)
    def pairs(v):
        return v[0::2] - 1j * v[1::2]

    const = float(x[0])
    outer = pairs(x[1:1 + 2 * degree])
    pos = 1 + 2 * degree
    logs, holes = [], []
    for _ in range(d.n - 1):
        logs.append(x[pos])
        holes.append(pairs(x[pos + 1:pos + 1 + 2 * degree]))
        pos += 1 + 2 * degree
    return const, outer, np.array(logs, dtype=float), np.array(holes, dtype=complex).reshape(d.n - 1, degree)


def default_nodes(d: Domain, degree: int) -> int:
    per = int(np.ceil(3 * basis_size(d, degree) / d.n))
    per = max(64, per + (per % 2))
    return per


def dirichlet_solve(d: Domain, data: BoundaryData, degree: int = 48, per_component: int | None = None,
                    tol: float | None = None) -> HarmonicFunction:
    """Least-squares fit of the harmonic basis to Dirichlet data.

    Columns are scaled to unit norm and the system is solved by SVD with
    singular values below ``1e-12 * s_max`` discarded. The max residual over
    the collocation nodes is stored on the result; exceeding ``tol`` flags
    the result and emits a :class:`DirichletAccuracyWarning`.
    """
    if degree < 4:
        raise ValueError("degree must be at least 4")
    if per_component is None:
        per_component = default_nodes(d, degree)
    if per_component * d.n < 3 * basis_size(d, degree):
        raise ValueError("need at least 3 boundary nodes per basis function")
    q = boundary_nodes(d, per_component)
    rhs = data.sample(d, per_component, q.nodes)
    A = _design_matrix(d, q.nodes, degree)
    scale = np.linalg.norm(A, axis=0)
    scale[scale == 0] = 1.0
    y, *_ = np.linalg.lstsq(A / scale, rhs, rcond=1e-12)
    x = y / scale
    residual = float(np.max(np.abs(A @ x - rhs)))
    flagged = tol is not None and residual > tol
    if flagged:
        warnings.warn(
            f"Dirichlet residual {residual:.3e} exceeds tolerance {tol:.3e}", DirichletAccuracyWarning,
            stacklevel=2,
        )
    const, outer, logs, holes = _unpack(d, x, degree)
    return HarmonicFunction(d, const, outer, logs, holes, residual=residual, flagged=flagged)


def harmonic_measures(d: Domain, degree: int = 48, per_component: int | None = None,
                      tol: float | None = None) -> list[HarmonicFunction]:
    """``u_k`` equal to 1 on hole ``k`` and 0 on every other component."""
    return [dirichlet_solve(d, BoundaryData.indicator(d, k), degree, per_component, tol) for k in range(d.n - 1)]
