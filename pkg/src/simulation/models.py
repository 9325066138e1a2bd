"""
Experiment description models.

Every spec is a frozen pydantic model tagged by a ``kind`` literal so that
unions can be parsed from plain dictionaries. ``SimConfig.build`` is the
validated constructor used throughout the package; it converts pydantic
validation failures into ``ConfigInvalid``.
"""

import math
from typing import Annotated, Any, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..errors import ConfigInvalid


class _Spec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")


# ---------------- Arrivals -----------------

class ConstantArrivals(_Spec):
    """Homogeneous Poisson arrivals with per-server rate ``rate``."""
    kind: Literal["constant"] = "constant"
    rate: float = Field(gt=0.0)

    @property
    def mean_rate(self) -> float:
        return self.rate


class SinusoidalArrivals(_Spec):
    """Per-server rate ``base + amplitude * sin(t)``."""
    kind: Literal["sinusoidal"] = "sinusoidal"
    base: float = Field(gt=0.0)
    amplitude: float = Field(ge=0.0)

    @model_validator(mode="after")
    def _rate_stays_positive(self) -> "SinusoidalArrivals":
        if not self.base > self.amplitude:
            raise ValueError("sinusoidal base must exceed amplitude so the rate stays positive")
        return self

    @property
    def mean_rate(self) -> float:
        return self.base

    def rate_at(self, t: float) -> float:
        return self.base + self.amplitude * math.sin(t)


ArrivalSpec = Annotated[Union[ConstantArrivals, SinusoidalArrivals], Field(discriminator="kind")]


# ---------------- Service -----------------

class _RateVectorService(_Spec):
    rates: Tuple[float, ...]

    @field_validator("rates")
    @classmethod
    def _positive(cls, rates: Tuple[float, ...]) -> Tuple[float, ...]:
        if not rates:
            raise ValueError("service rate vector is empty")
        if any(not (r > 0.0 and math.isfinite(r)) for r in rates):
            raise ValueError("all service rates must be positive and finite")
        return rates

    def rate(self, server: int) -> float:
        """Service rate of 0-based ``server``."""
        return self.rates[server]


class ExponentialService(_RateVectorService):
    """Exponential service with per-server rates."""
    kind: Literal["exponential"] = "exponential"


class DeterministicService(_RateVectorService):
    """Constant service time ``1 / rate`` per server."""
    kind: Literal["deterministic"] = "deterministic"


class ParetoService(_Spec):
    """Pareto service times with CDF ``1 - (scale / x) ** shape`` for ``x > scale``."""
    kind: Literal["pareto"] = "pareto"
    shape: float = Field(gt=2.0)
    scale: float = Field(gt=0.0)

    @property
    def mean(self) -> float:
        return self.shape * self.scale / (self.shape - 1.0)

    def rate(self, server: int) -> float:
        return 1.0 / self.mean


ServiceSpec = Annotated[
    Union[ExponentialService, DeterministicService, ParetoService],
    Field(discriminator="kind"),
]


# ---------------- Policies -----------------

class PowerOfD(_Spec):
    """Join the shortest of ``d`` servers sampled uniformly without replacement."""
    kind: Literal["pod"] = "pod"
    d: int = Field(ge=1)

    def label(self) -> str:
        return f"pod:{self.d}"


class MJSQ(_Spec):
    """Random server with probability ``r``, otherwise the global shortest queue."""
    kind: Literal["mjsq"] = "mjsq"
    r: float = Field(ge=0.0, le=1.0)

    def label(self) -> str:
        return f"mjsq:{self.r:g}"


class JIQ(_Spec):
    """An idle server if one exists, otherwise power-of-``d``."""
    kind: Literal["jiq"] = "jiq"
    d: int = Field(ge=1)

    def label(self) -> str:
        return f"jiq:{self.d}"


PolicySpec = Annotated[Union[PowerOfD, MJSQ, JIQ], Field(discriminator="kind")]


# ---------------- Designs -----------------

class BernoulliDesign(_Spec):
    kind: Literal["bernoulli"] = "bernoulli"


class GlobalControlDesign(_Spec):
    kind: Literal["global0"] = "global0"


class GlobalTreatmentDesign(_Spec):
    kind: Literal["global1"] = "global1"


class GroupDesign(_Spec):
    kind: Literal["group"] = "group"


class SwitchbackDesign(_Spec):
    kind: Literal["switchback"] = "switchback"
    window: float = Field(gt=0.0)


DesignSpec = Annotated[
    Union[BernoulliDesign, GlobalControlDesign, GlobalTreatmentDesign, GroupDesign, SwitchbackDesign],
    Field(discriminator="kind"),
]


def design_label(design: Any) -> str:
    if isinstance(design, SwitchbackDesign):
        return f"switchback:{design.window:g}"
    return design.kind


# ---------------- Full configuration -----------------

class SimConfig(_Spec):
    """
    Full description of one simulated experiment.

    Attributes:
        n_servers: Number of parallel servers N
        arrival_spec: Per-server arrival process (system rate is N times it)
        service_spec: Service distribution (of the control arm when per-arm service is used)
        treatment_service_spec: Optional service distribution for treatment-assigned tasks
        control_policy: Policy applied when the action is 0
        treatment_policy: Policy applied when the action is 1
        treatment_prob: Probability p that a task is treated
        horizon: Arrivals are generated on [0, horizon)
        design: Experimental design
        delay_enabled: Hold tasks at the dispatcher until targets report
        seed: Root seed of every random stream
    """
    n_servers: int = Field(ge=1)
    arrival_spec: ArrivalSpec
    service_spec: ServiceSpec
    treatment_service_spec: Optional[ServiceSpec] = None
    control_policy: PolicySpec
    treatment_policy: PolicySpec
    treatment_prob: float = Field(default=0.5, gt=0.0, lt=1.0)
    horizon: float = Field(gt=0.0)
    design: DesignSpec = Field(default_factory=BernoulliDesign)
    delay_enabled: bool = False
    seed: int = Field(default=0, ge=0, lt=2**64)

    @model_validator(mode="after")
    def _check_dimensions(self) -> "SimConfig":
        n = self.n_servers
        for spec in (self.service_spec, self.treatment_service_spec):
            if isinstance(spec, (ExponentialService, DeterministicService)) and len(spec.rates) != n:
                raise ValueError(
                    f"service rate vector has length {len(spec.rates)}, expected n_servers={n}"
                )
        pool = n
        if isinstance(self.design, GroupDesign):
            if n < 2 or n % 2:
                raise ValueError("group design needs an even number of servers")
            pool = n // 2
        for policy in (self.control_policy, self.treatment_policy):
            if isinstance(policy, (PowerOfD, JIQ)) and policy.d > pool:
                raise ValueError(f"policy {policy.label()} samples more servers than the {pool} available")
        if not math.isfinite(self.horizon):
            raise ValueError("horizon must be finite")
        return self

    @classmethod
    def build(cls, **fields: Any) -> "SimConfig":
        """Validated constructor raising ``ConfigInvalid``."""
        try:
            return cls.model_validate(fields)
        except ValidationError as exc:
            raise ConfigInvalid(first_error(exc)) from exc

    def replace(self, **changes: Any) -> "SimConfig":
        """Copy with ``changes`` applied and re-validated."""
        data = {name: getattr(self, name) for name in type(self).model_fields}
        data.update(changes)
        return type(self).build(**data)

    def policy_for(self, action: int) -> Any:
        return self.treatment_policy if action else self.control_policy

    def service_for(self, action: int) -> Any:
        if action and self.treatment_service_spec is not None:
            return self.treatment_service_spec
        return self.service_spec

    @property
    def mean_arrival_rate(self) -> float:
        """Long-run per-server arrival rate."""
        return self.arrival_spec.mean_rate


def first_error(exc: ValidationError) -> str:
    err = exc.errors()[0]
    where = ".".join(str(part) for part in err.get("loc", ()) if part not in ("function-after",))
    message = err.get("msg", str(exc)).removeprefix("Value error, ")
    return f"{where}: {message}" if where else message
