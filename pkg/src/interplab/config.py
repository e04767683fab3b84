"""Experiment configuration: schema, loading and hashing."""

from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .banach import lp_space
from .sequences import StructuredCouple, structured_couple

EXPERIMENTS = ("norm", "daher", "duality", "maxmod", "kadets", "james", "mazur", "convergence")


def parse_complex(v) -> complex:
    """Accept a number, ``[re, im]`` or a string such as ``"0.5+0.3j"``."""
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise ValueError(f"complex pairs need two entries, got {v!r}")
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        return complex(v.replace(" ", "").replace("i", "j"))
    return complex(v)


class SpaceSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    p: float = 2.0
    weights: Optional[list[float]] = None

    @field_validator("p", mode="before")
    @classmethod
    def _inf(cls, v):
        if isinstance(v, str) and v.lower() in ("inf", "infinity"):
            return float("inf")
        return v


class CoupleSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dim: int = Field(1, ge=1)
    space0: SpaceSpec = SpaceSpec()
    space1: SpaceSpec = SpaceSpec()

    @model_validator(mode="after")
    def _dims(self):
        for s in (self.space0, self.space1):
            if s.weights is not None and len(s.weights) != self.dim:
                raise ValueError(f"weights must have length dim={self.dim}")
        return self


class StructureSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind0: Literal["lp", "fourier", "rademacher", "gaussian", "james"] = "lp"
    kind1: Optional[Literal["lp", "fourier", "rademacher", "gaussian", "james"]] = None
    params0: dict[str, Any] = {}
    params1: dict[str, Any] = {}


class SolverSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    max_iter: int = Field(100_000, ge=1)
    tol_grad: float = Field(1e-8, gt=0)
    tol_feas: float = Field(1e-8, gt=0)
    step_rule: Literal["auto", "armijo", "diminishing"] = "auto"
    memory: int = Field(10, ge=1)
    step_scale: float = Field(1.0, gt=0)


class ExperimentConfig(BaseModel):
    """Validated description of one experiment run."""

    model_config = ConfigDict(extra="forbid")

    experiment: Literal["norm", "daher", "duality", "maxmod", "kadets", "james", "mazur",
                        "convergence"]
    couple: CoupleSpec = CoupleSpec()
    structures: StructureSpec = StructureSpec()
    K: int = Field(16, ge=0)
    K_list: Optional[list[int]] = None
    M_list: Optional[list[Optional[int]]] = None
    z: list[Any] = [0.5]
    w: list[Any] = []
    s: list[Any] = []
    t: list[Any] = []
    solver: SolverSpec = SolverSpec()
    seed: int = 0
    output_dir: Optional[str] = None
    params: dict[str, Any] = {}

    @field_validator("z", "w", "s", "t")
    @classmethod
    def _strip_points(cls, v):
        out = []
        for item in v:
            c = parse_complex(item)
            if not 0 < c.real < 1:
                raise ValueError(f"strip points need 0 < Re < 1, got {c}")
            out.append([c.real, c.imag])
        return out

    @field_validator("K_list")
    @classmethod
    def _sorted(cls, v):
        if v is not None and list(v) != sorted(v):
            raise ValueError("K_list must be sorted")
        return v

    def points(self, name: str) -> list[complex]:
        return [complex(a, b) for a, b in getattr(self, name)]

    def couple_at(self, K: int | None = None, M: int | None = None) -> StructuredCouple:
        c = self.couple
        s0 = lp_space(c.dim, c.space0.p, c.space0.weights)
        s1 = lp_space(c.dim, c.space1.p, c.space1.weights)
        st = self.structures
        p0, p1 = dict(st.params0), dict(st.params1)
        if M is not None:
            p0["M"] = p1["M"] = M
        sampled = ("rademacher", "gaussian")
        if st.kind0 in sampled:
            p0.setdefault("seed", self.seed)
        if (st.kind1 or st.kind0) in sampled:
            p1.setdefault("seed", self.seed)
        return structured_couple(s0, s1, st.kind0, st.kind1, self.K if K is None else K, p0, p1)

    def solver_opts(self) -> dict:
        return self.solver.model_dump()

    def digest(self) -> str:
        """Hash of the validated configuration (output location excluded)."""
        data = self.model_dump(exclude={"output_dir"})
        blob = json.dumps(data, sort_keys=True, separators=(",", ":"), default=str)
        return hashlib.sha256(blob.encode()).hexdigest()[:16]


def load_config(path: str | Path, **overrides) -> ExperimentConfig:
    data = json.loads(Path(path).read_text())
    data.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig.model_validate(data)
