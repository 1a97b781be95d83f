"""core schemas: surface and field configs, suite and experiment reports."""

from typing import Annotated, Any, Dict, List, Literal, Optional, Tuple, TypedDict, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from src.core.config import Settings
from src.core.constants import UNIT_TOL
from src.core.errors import ConfigInvalid, NotContained
from src.geometry.surfaces import ComponentDecomposition, ProfileCurve, RevolutionSurface
from src.transforms.fields import CapBumpField, ConstantField, CoordinateField, SphereField, SumField


# surface configs

class PolarTrigProfileConfig(BaseModel):
    """gamma(t) = (a r(t) cos t, a r(t) sin t + d), r(t) = b + c sin(k t + p)."""

    kind: Literal["polar_trig_profile"]
    scale: float = 1.0
    base: float
    amp: float
    freq: float
    phase: float
    vertical_shift: float = 0.0


class OffsetSphereConfig(BaseModel):
    """the sphere |x - lambda omega| = radius."""

    kind: Literal["offset_sphere"]
    lam: float = Field(alias="lambda", ge=0.0)
    omega: List[float]
    radius: float = Field(gt=0.0)

    model_config = ConfigDict(populate_by_name=True)

    @field_validator("omega")
    @classmethod
    def check_unit_omega(cls, omega: List[float]) -> List[float]:
        if abs(float(np.linalg.norm(omega)) - 1.0) > 1e-9:
            raise ValueError("omega must be a unit vector")
        return omega


class SurfaceConfig(BaseModel):
    """surface json file: {"ambient_dim": 2|3, "surface": {...}}."""

    ambient_dim: Literal[2, 3]
    surface: Annotated[
        Union[PolarTrigProfileConfig, OffsetSphereConfig],
        Field(discriminator="kind"),
    ]

    @model_validator(mode="after")
    def check_axial_omega(self) -> "SurfaceConfig":
        if isinstance(self.surface, OffsetSphereConfig):
            if len(self.surface.omega) != self.ambient_dim:
                raise ValueError(f"omega must have length {self.ambient_dim}")
            if self.ambient_dim == 3 and np.hypot(*self.surface.omega[:2]) > UNIT_TOL:
                raise ValueError("offset_sphere in 3d must be axial (omega along the last axis)")
        return self

    def build(self) -> RevolutionSurface:
        """the RevolutionSurface described by this config.

        raises:
            ConfigInvalid: if the surface is not inside the unit sphere
        """
        shape = self.surface
        if isinstance(shape, PolarTrigProfileConfig):
            profile = ProfileCurve.polar_trig(shape.scale, shape.base, shape.amp, shape.freq, shape.phase,
                                              shape.vertical_shift)
        else:
            omega = shape.omega if self.ambient_dim == 2 else [0.0, shape.omega[-1]]
            profile = ProfileCurve.offset_circle(shape.lam, (omega[0], omega[1]), shape.radius)
        try:
            return RevolutionSurface(profile, self.ambient_dim)
        except NotContained as e:
            raise ConfigInvalid("surface config rejected", [f"field 'surface': {e}"]) from e


# field configs

class ConstantFieldConfig(BaseModel):
    kind: Literal["constant"]
    value: float


class CoordinateFieldConfig(BaseModel):
    kind: Literal["coordinate"]
    index: int = Field(ge=0, le=2)


class CapBumpFieldConfig(BaseModel):
    kind: Literal["cap_bump"]
    center: List[float]
    radius: float = Field(gt=0.0)
    amplitude: float = 1.0

    @field_validator("center")
    @classmethod
    def check_on_sphere(cls, center: List[float]) -> List[float]:
        if abs(float(np.linalg.norm(center)) - 1.0) > 1e-9:
            raise ValueError("cap center must lie on the unit sphere")
        return center


class SumFieldConfig(BaseModel):
    kind: Literal["sum"]
    terms: List["FieldConfig"]


FieldConfig = Annotated[
    Union[ConstantFieldConfig, CoordinateFieldConfig, CapBumpFieldConfig, SumFieldConfig],
    Field(discriminator="kind"),
]
SumFieldConfig.model_rebuild()


def field_dim_problems(config, ambient_dim: int, loc: str = "field") -> List[str]:
    """diagnostics for field terms that do not fit points of R^ambient_dim."""
    if isinstance(config, CoordinateFieldConfig) and config.index >= ambient_dim:
        return [f"field '{loc}.index': expected 0..{ambient_dim - 1} for ambient_dim {ambient_dim}, got {config.index}"]
    if isinstance(config, CapBumpFieldConfig) and len(config.center) != ambient_dim:
        return [f"field '{loc}.center': expected length {ambient_dim}, got {len(config.center)}"]
    if isinstance(config, SumFieldConfig):
        return [line for i, term in enumerate(config.terms)
                for line in field_dim_problems(term, ambient_dim, f"{loc}.terms.{i}")]
    return []


class FieldFile(BaseModel):
    """field json file, a single FieldConfig at the root; ambient_dim is optional."""

    field: FieldConfig
    ambient_dim: Optional[Literal[2, 3]] = None

    @model_validator(mode="before")
    @classmethod
    def wrap_bare_field(cls, data: Any) -> Any:
        if isinstance(data, dict) and "kind" in data:
            data = dict(data)
            return {"field": data, "ambient_dim": data.pop("ambient_dim", None)}
        return data

    @model_validator(mode="after")
    def check_dimension(self) -> "FieldFile":
        if self.ambient_dim is not None:
            problems = field_dim_problems(self.field, self.ambient_dim)
            if problems:
                raise ValueError("; ".join(problems))
        return self

    def require_dim(self, ambient_dim: int) -> "FieldFile":
        """check the field against the surface it will be evaluated on.

        raises:
            ConfigInvalid: if a term does not fit the surface dimension
        """
        problems = field_dim_problems(self.field, ambient_dim)
        if problems:
            raise ConfigInvalid(f"field config does not fit ambient_dim {ambient_dim}", problems)
        return self

    def build(self) -> SphereField:
        return build_field(self.field)


def build_field(config) -> SphereField:
    """the SphereField described by a field config."""
    if isinstance(config, ConstantFieldConfig):
        return ConstantField(config.value)
    if isinstance(config, CoordinateFieldConfig):
        return CoordinateField(config.index)
    if isinstance(config, CapBumpFieldConfig):
        return CapBumpField(tuple(config.center), config.radius, config.amplitude)
    return SumField(tuple(build_field(term) for term in config.terms))


# reports

class CheckResult(BaseModel):
    """one named check; max_residual is None when no finite residual exists."""

    name: str
    max_residual: Optional[float]
    tolerance: float
    passed: bool
    detail: Dict[str, Any] = Field(default_factory=dict)


class VerifySuiteResult(BaseModel):
    """result of one verification suite; overall iff every check passed."""

    suite: str
    seed: int
    checks: List[CheckResult]
    overall: bool
    runtime_ms: Optional[float] = None

    @model_validator(mode="after")
    def check_overall(self) -> "VerifySuiteResult":
        if self.overall != all(check.passed for check in self.checks):
            raise ValueError("overall must equal the conjunction of the checks")
        return self


def _request_field_problems(surface: Optional[SurfaceConfig], **files: Optional[FieldFile]) -> List[str]:
    if surface is None:
        return []
    return [line for name, file in files.items() if file is not None
            for line in field_dim_problems(file.field, surface.ambient_dim, f"{name}.field")]


class VerifyRequest(BaseModel):
    """request model for /verify endpoint."""

    suite: str = "all"
    surface: Optional[SurfaceConfig] = None
    field: Optional[FieldFile] = None
    seed: Optional[int] = None
    tol: Optional[float] = None

    @model_validator(mode="after")
    def check_field_dimension(self) -> "VerifyRequest":
        problems = _request_field_problems(self.surface, field=self.field)
        if problems:
            raise ValueError("; ".join(problems))
        return self


class SurfaceRequest(BaseModel):
    surface: SurfaceConfig


class Theorem31Request(BaseModel):
    surface: SurfaceConfig
    field: FieldFile
    fail_field: Optional[FieldFile] = None
    tol: Optional[float] = None

    @model_validator(mode="after")
    def check_field_dimension(self) -> "Theorem31Request":
        problems = _request_field_problems(self.surface, field=self.field, fail_field=self.fail_field)
        if problems:
            raise ValueError("; ".join(problems))
        return self


class ArmReport(BaseModel):
    """one arm of the vanishing experiment."""

    arm: Literal["pass", "fail"]
    status: Literal["vanished", "violated", "precondition_unmet", "skipped"]
    field_center: Optional[List[float]] = None
    support_margin: Optional[float] = None
    max_value: Optional[float] = None
    max_gradient: Optional[float] = None
    evaluated: int = 0


class Theorem31Report(BaseModel):
    """projection set, precondition status and the two arms, in that order."""

    cap_height: Optional[float] = None
    upper_component: Optional[List[float]] = None
    u_samples: int = 0
    precondition_met: Optional[bool] = None
    precondition_margin: Optional[float] = None
    support_in_projection_set: Optional[bool] = None
    c0_compatible: Optional[bool] = None
    pass_arm: Optional[ArmReport] = None
    fail_arm: Optional[ArmReport] = None
    consistent: bool = False
    error: Optional[str] = None
    nodes_executed: List[str] = Field(default_factory=list)


class ExperimentState(TypedDict):
    """state of the vanishing experiment graph."""

    surface: RevolutionSurface
    field: SphereField
    fail_field: Optional[SphereField]
    config: Settings
    tol: float
    decomposition: Optional[ComponentDecomposition]
    params: List[Tuple[float, float]]
    report: Dict[str, Any]
    """fields of Theorem31Report collected so far."""
    metadata: Dict[str, Any]
    """node history, errors, etc."""
    next_action: Optional[str]
