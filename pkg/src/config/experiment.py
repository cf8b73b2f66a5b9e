from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from src.config.settings import GRID_NODES, WORKERS, WRITE_PLOTS
from src.middleware.errors import ConfigError

CaseName = Literal["rate", "coherence", "lifetime"]
FrameworkChoice = Literal["transformation", "geometry", "both"]

DEFAULT_PRIOR_WIDTH = {"rate": 1e9, "coherence": 0.95, "lifetime": 10.0}


class SweepSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    axis: Literal["prior_width", "eta", "mu"] = Field(..., description="Swept quantity")
    values: List[float] = Field(..., min_length=2, description="Axis points, at least two")
    prior_widths: Optional[List[float]] = Field(
        None, description="Prior widths b for eta sweeps; one gain curve per width"
    )

    @model_validator(mode="after")
    def _check_axis(self) -> "SweepSpec":
        if self.axis == "mu" and any(v < 1 or v != int(v) for v in self.values):
            raise ValueError("mu sweep values must be positive integers")
        if self.axis == "eta" and any(not 0 <= v <= 1 for v in self.values):
            raise ValueError("eta sweep values must lie in [0, 1]")
        if self.prior_widths is not None and self.axis != "eta":
            raise ValueError("prior_widths only applies to eta sweeps")
        return self


class ExperimentConfig(BaseModel):
    """One experiment: case study, estimation framework(s), data size and seeding."""

    model_config = ConfigDict(extra="forbid")

    case: CaseName = Field(..., description="Case study: rate, coherence or lifetime")
    framework: FrameworkChoice = Field("both", description="Prior/symmetry-function framework(s) to run")
    prior_width: Optional[float] = Field(
        None, description="a in (1/2, 1) for coherence, b > 1 for lifetime, grid truncation for rate"
    )
    true_parameter: Optional[float] = Field(None, description="True theta used to simulate data")
    true_zeta: Optional[float] = Field(
        None, description="Coherence only: true l1 coherence; theta is taken as the upper root"
    )
    shots: int = Field(..., ge=1, description="Shots per repetition (mu)")
    repetitions: int = Field(1, ge=1, description="Independent repetitions (m)")
    seed: int = Field(0, ge=0, lt=2**64, description="Master seed; repetition r uses stream (seed, r)")
    grid_nodes: int = Field(GRID_NODES, ge=16, description="Quadrature nodes of the hypothesis grid")
    output_dir: Optional[str] = Field(None, description="Artifact directory")
    workers: int = Field(WORKERS, ge=1, description="Threads for repetitions and sweep points")
    eta: float = Field(1.0, ge=0.0, le=1.0, description="Lifetime only: excited-state weight of the probe")
    probe_time: float = Field(1.0, gt=0, description="Lifetime only: probe time t")
    noise: float = Field(0.1, ge=0.0, le=1.0, description="Coherence only: depolarizing strength")
    numeric_geometry: bool = Field(
        False, description="Lifetime only: build the geometric symmetry function numerically for eta"
    )
    protocol: Literal["fixed", "adaptive"] = Field("fixed", description="Fixed optimal POVM or shot-by-shot adaptation")
    controls: Optional[List[float]] = Field(None, description="Adaptive lifetime only: candidate probe times")
    plots: bool = Field(WRITE_PLOTS, description="Write SVG quick-looks (needs matplotlib)")
    sweep: Optional[SweepSpec] = Field(None, description="Optional sweep axis")

    @field_validator("controls")
    @classmethod
    def _positive_controls(cls, v: Optional[List[float]]) -> Optional[List[float]]:
        if v is not None and (len(v) == 0 or any(c <= 0 for c in v)):
            raise ValueError("controls must be a nonempty list of positive probe times")
        return v

    @model_validator(mode="after")
    def _check_case_domains(self) -> "ExperimentConfig":
        width = self.width
        if self.case == "coherence":
            if not 0.5 < width < 1:
                raise ValueError(f"coherence prior width a must lie in (1/2, 1), got {width}")
            if self.true_zeta is not None:
                if self.true_parameter is not None:
                    raise ValueError("give true_parameter or true_zeta, not both")
                if not 0 <= self.true_zeta <= 1 - self.noise:
                    raise ValueError(f"true_zeta must lie in [0, {1 - self.noise}]")
            elif self.true_parameter is not None and not 1 - width < self.true_parameter < width:
                raise ValueError(f"true_parameter must lie in ({1 - width}, {width})")
        elif self.case == "lifetime":
            if not width > 1:
                raise ValueError(f"lifetime prior width b must exceed 1, got {width}")
            theta = self.true_parameter
            if theta is not None and not self.probe_time / width < theta < self.probe_time * width:
                raise ValueError(f"true_parameter must lie in (t/b, t*b) = ({self.probe_time / width}, {self.probe_time * width})")
        else:
            if not width > 1:
                raise ValueError(f"rate grid truncation must exceed 1, got {width}")
            if self.true_parameter is not None and self.true_parameter <= 0:
                raise ValueError("rate true_parameter must be positive")
        if self.case != "lifetime" and (self.controls is not None or self.numeric_geometry):
            raise ValueError("controls and numeric_geometry only apply to the lifetime case")
        if self.true_zeta is not None and self.case != "coherence":
            raise ValueError("true_zeta only applies to the coherence case")
        if self.protocol == "adaptive" and self.case == "rate":
            raise ValueError("the rate case has no measurement to adapt")
        if self.sweep is not None and self.sweep.axis == "eta" and self.case != "lifetime":
            raise ValueError("eta sweeps need the lifetime case")
        if self.sweep is not None and self.sweep.axis == "prior_width" and self.case == "rate":
            raise ValueError("prior width sweeps need a quantum case (coherence or lifetime)")
        return self

    @property
    def width(self) -> float:
        return self.prior_width if self.prior_width is not None else DEFAULT_PRIOR_WIDTH[self.case]

    @property
    def frameworks(self) -> list[str]:
        return ["transformation", "geometry"] if self.framework == "both" else [self.framework]

    def canonical_json(self) -> str:
        return json.dumps(self.model_dump(mode="json"), sort_keys=True, separators=(",", ":"))

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


def load_config(path: str | Path) -> dict:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON at line {e.lineno}: {e.msg}") from e
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: top level must be a JSON object")
    return raw


def build_config(*layers: dict) -> ExperimentConfig:
    """Merge layers left to right (later wins) and validate."""
    merged: dict = {}
    for layer in layers:
        merged.update({k: v for k, v in layer.items() if v is not None})
    return ExperimentConfig.model_validate(merged)


__all__ = ["ExperimentConfig", "SweepSpec", "ValidationError", "build_config", "load_config"]
