"""JSON run configuration shared by the command line and the scripts."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .geometry import Domain, DomainSpec, build_domain
from .suita import JetConfig, Profile, WeightSpec


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SolverConfig:
    degree: int = 48
    basis_degree: int = 24
    boundary_nodes: int | None = None
    area_nodes: int | None = None
    tolerance: float = 1e-6
    residual_tol: float = 1e-6

    @classmethod
    def from_dict(cls, d):
        d = dict(d or {})
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown solver keys: {sorted(unknown)}")
        out = cls(**d)
        if out.degree < 4 or out.basis_degree < 1:
            raise ConfigError("degree must be >= 4 and basis_degree >= 1")
        if out.tolerance <= 0 or out.residual_tol <= 0:
            raise ConfigError("tolerances must be positive")
        return out


def _cplx(x):
    if isinstance(x, (list, tuple)):
        if len(x) != 2:
            raise ConfigError(f"complex numbers are [re, im] pairs, got {x}")
        return complex(float(x[0]), float(x[1]))
    return complex(float(x))


def _pair(z):
    z = complex(z)
    return [z.real, z.imag]


@dataclass(frozen=True)
class RunConfig:
    domain: dict
    weight: dict = field(default_factory=dict)
    jets: dict | None = None
    solver: SolverConfig = field(default_factory=SolverConfig)
    seed: int = 0
    options: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        unknown = set(d) - {"domain", "weight", "jets", "solver", "seed", "options"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        try:
            spec = DomainSpec.from_dict(d.get("domain") or {"kind": "disk"})
            weight = _normalize_weight(d.get("weight") or {})
            jets = d.get("jets")
            if jets is not None:
                jets = JetConfig.from_dict(jets).to_dict()
            solver = SolverConfig.from_dict(d.get("solver"))
        except ConfigError:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(str(exc)) from exc
        return cls(spec.to_dict(), weight, jets, solver, int(d.get("seed", 0)), dict(d.get("options") or {}))

    @classmethod
    def load(cls, path) -> "RunConfig":
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from exc
        try:
            return cls.from_dict(json.loads(text))
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON: {exc}") from exc

    def to_dict(self) -> dict:
        out = {
            "domain": self.domain, "weight": self.weight, "solver": asdict(self.solver),
            "seed": self.seed, "options": self.options,
        }
        if self.jets is not None:
            out["jets"] = self.jets
        return out

    def build_domain(self) -> Domain:
        try:
            return build_domain(DomainSpec.from_dict(self.domain))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid domain: {exc}") from exc

    def build_weight(self, d: Domain) -> WeightSpec:
        w = self.weight
        g = tuple(_cplx(c) for c in w["g"])
        g = tuple(c.real if c.imag == 0 else c for c in g)
        profile = Profile.from_dict(w["profile"])
        u = w["u"]
        try:
            if u == "zero":
                return WeightSpec(g=g, profile=profile)
            if "measures" in u:
                return WeightSpec.from_measures(d, u["measures"], self.solver.degree, g=g, profile=profile)
            return WeightSpec.from_boundary(d, u["boundary"], self.solver.degree, g=g, profile=profile)
        except ValueError as exc:
            raise ConfigError(f"invalid weight: {exc}") from exc

    def build_jets(self) -> JetConfig:
        if self.jets is None:
            raise ConfigError("this command needs a 'jets' section")
        return JetConfig.from_dict(self.jets)


def _normalize_weight(w: dict) -> dict:
    unknown = set(w) - {"g", "u", "profile"}
    if unknown:
        raise ConfigError(f"unknown weight keys: {sorted(unknown)}")
    g = [_cplx(c) for c in w.get("g", [1.0])]
    g = [c.real if c.imag == 0 else _pair(c) for c in g]
    u = w.get("u", "zero")
    if isinstance(u, dict) and "zero" in u:
        u = "zero"
    if u != "zero":
        if not isinstance(u, dict) or len(u) != 1 or not ({"measures", "boundary"} & set(u)):
            raise ConfigError("weight.u must be 'zero', {'measures': [...]} or {'boundary': [...]}")
        if "measures" in u:
            u = {"measures": [float(x) for x in u["measures"]]}
        else:
            u = {"boundary": [float(x) if not isinstance(x, list) else [float(y) for y in x] for x in u["boundary"]]}
    profile = Profile.from_dict(w.get("profile")).to_dict()
    return {"g": g, "u": u, "profile": profile}
