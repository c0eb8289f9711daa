"""Green functions, logarithmic capacities and their boundary/period integrals."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .geometry import Cycle, Domain, boundary_nodes, contains
from .harmonic import BoundaryData, HarmonicFunction, dirichlet_solve


@dataclass(frozen=True, eq=False)
class GreenFunction:
    """``G(z) = log|z - z0| + h(z)`` with ``G = 0`` on the boundary."""

    domain: Domain
    pole: complex
    h: HarmonicFunction

    @property
    def residual(self) -> float:
        return self.h.residual

    def __call__(self, z, check=True):
        z = np.asarray(z, dtype=complex)
        return np.log(np.abs(z - self.pole)) + self.h(z, check)

    def derivative(self, z, check=True):
        """``2 dG/dz = 1/(z - z0) + h'(z)``."""
        z = np.asarray(z, dtype=complex)
        return 1.0 / (z - self.pole) + self.h.derivative(z, check)

    def gradient(self, z, check=True):
        fp = self.derivative(z, check)
        return np.real(fp), -np.imag(fp)

    def analytic(self, z, check=True):
        """Principal-branch completion ``log(z - z0) + H(z)``."""
        z = np.asarray(z, dtype=complex)
        return np.log(z - self.pole) + self.h.analytic(z, check)

    def increment(self, path) -> complex:
        """Change of the completion along a polyline avoiding the pole."""
        path = np.asarray(path, dtype=complex)
        seg = path[1:] - path[:-1]
        t = np.clip(np.real((self.pole - path[:-1]) * np.conj(seg)) / np.abs(seg) ** 2, 0, 1)
        if np.min(np.abs(path[:-1] + t * seg - self.pole)) < 1e-12:
            raise ValueError("path passes through the pole")
        darg = np.sum(np.angle((path[1:] - self.pole) / (path[:-1] - self.pole)))
        dlog = np.log(abs(path[-1] - self.pole)) - np.log(abs(path[0] - self.pole))
        return dlog + 1j * darg + self.h.increment(path)


@lru_cache(maxsize=256)
def _green_cached(d: Domain, z0: complex, degree: int, tol):
    h = dirichlet_solve(d, BoundaryData.green(d, z0), degree, tol=tol)
    return GreenFunction(d, z0, h)


def green_function(d: Domain, z0: complex, degree: int = 48, tol: float | None = None) -> GreenFunction:
    z0 = complex(z0)
    if not contains(d, z0):
        raise ValueError(f"pole {z0} is not inside the domain")
    return _green_cached(d, z0, int(degree), tol)


def log_capacity(g: GreenFunction) -> float:
    """``c_beta(z0) = exp h(z0)`` in the global coordinate ``w = z - z0``."""
    return float(np.exp(g.h(g.pole)))


def green_boundary_flux(g: GreenFunction, component: int, per_component: int = 512) -> float:
    """``(1/2 pi) oint_{Gamma_k} dG/dn ds`` with the normal pointing out of the domain.

    With this orientation the flux through a hole equals the harmonic
    measure of that hole at the pole and the total over the boundary is 1.
    """
    d = g.domain
    if not 0 <= component < d.n:
        raise IndexError(f"component {component} out of range for n={d.n}")
    z, w, nrm = boundary_nodes(d, per_component).select(component)
    dn = np.real(g.derivative(z, check=False) * nrm)
    return float(np.sum(dn * w) / (2 * np.pi))


def green_cycle_period(g: GreenFunction, k: int | Cycle) -> float:
    """``(1/2 pi) oint d~G`` around hole cycle ``k`` or an explicit cycle."""
    d = g.domain
    if isinstance(k, Cycle):
        cyc = k
        z, _ = cyc.nodes(1024)
        if np.min(np.abs(z - g.pole)) < 1e-10:
            raise ValueError("cycle passes through the pole")
        wind = cyc.winding(g.pole, 1024)
        total = round(wind) + sum(g.h.log[l] * round(cyc.winding(d.anchors[l], 1024)) for l in range(d.n - 1))
        return float(total)
    cyc = d.cycles[k]
    if abs(abs(g.pole - cyc.center) - cyc.radius) < 1e-10:
        raise ValueError("cycle passes through the pole")
    return float(g.h.conjugate_period(k) + round(cyc.winding(g.pole, 1024)))


def green_cycle_period_numeric(g: GreenFunction, cyc: Cycle, m: int = 1024) -> float:
    """Line integral ``(1/2 pi) oint Im(2 dG/dz dz)`` along ``cyc``."""
    z, dz = cyc.nodes(m)
    return float(np.sum(np.imag(g.derivative(z, check=False) * dz)) / (2 * np.pi))


# -- closed-form oracles ----------------------------------------------------

def disk_green(z, z0):
    z = np.asarray(z, dtype=complex)
    return np.log(np.abs((z - z0) / (1 - np.conj(z0) * z)))


def disk_capacity(z0) -> float:
    return 1.0 / (1.0 - abs(z0) ** 2)


def _annulus_h(z, z0, R, terms):
    r, th = np.abs(z), np.angle(z)
    r0, th0 = abs(z0), np.angle(z0)
    lR = np.log(R)
    h = -np.log(r0) + (np.log(r0) - lR) / lR * np.log(r)
    for n in range(1, terms + 1):
        # a r^n + b r^-n with every power formed as a ratio below R^2
        den = n * (1 - R ** (-2.0 * n))
        a_rn = ((r0 * r / R**2) ** n - (r / (r0 * R**2)) ** n) / den
        a_rmn = ((r0 / (r * R**2)) ** n - (1 / (r0 * r * R**2)) ** n) / den
        h = h + (a_rn + (r0 * r) ** -n / n - a_rmn) * np.cos(n * (th - th0))
    return h


def annulus_green_series(z, z0, R, terms=200):
    """Fourier-series Green function of ``1 < |z| < R`` with doubling error estimate.

    Returns ``(G, err)`` where ``err`` is the change when the series length
    is doubled.
    """
    z = np.asarray(z, dtype=complex)
    h1 = _annulus_h(z, z0, R, terms)
    h2 = _annulus_h(z, z0, R, 2 * terms)
    return np.log(np.abs(z - z0)) + h2, np.max(np.abs(h2 - h1))


def annulus_capacity_series(z0, R, terms=200):
    h1 = _annulus_h(np.asarray(z0), z0, R, terms)
    h2 = _annulus_h(np.asarray(z0), z0, R, 2 * terms)
    return float(np.exp(h2)), float(abs(np.exp(h2) - np.exp(h1)))


def annulus_measure(z, R):
    """Harmonic measure of the inner circle of ``1 < |z| < R``."""
    return (np.log(R) - np.log(np.abs(z))) / np.log(R)
