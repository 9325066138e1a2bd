"""
Line-oriented experiment config files.

One ``key = value`` per line, ``#`` starts a comment. Lines are tokenized
with python-dotenv's parser so quoting and comments follow .env rules.

Example::

    n_servers = 20
    lambda = 0.8
    service = exp:1.0
    policy_control = pod:3
    policy_treatment = pod:2
    truncation = auto
"""

import io
import math
from typing import Any, Dict, List, Optional, Tuple

from dotenv.parser import parse_stream
from pydantic import ValidationError

from config.settings import settings
from ..errors import ConfigInvalid, ConfigParseError
from ..estimators.registry import ESTIMATOR_NAMES, EstimatorSpec
from ..harness.plan import ComputedTruth, ExperimentPlan, SuppliedTruth
from ..simulation.models import (
    JIQ,
    MJSQ,
    BernoulliDesign,
    ConstantArrivals,
    DeterministicService,
    ExponentialService,
    GlobalControlDesign,
    GlobalTreatmentDesign,
    GroupDesign,
    ParetoService,
    PowerOfD,
    SimConfig,
    SinusoidalArrivals,
    SwitchbackDesign,
    first_error,
)


DEFAULTS: Dict[str, str] = {
    "lambda": "0.9",
    "service": "exp:1.0",
    "p": "0.5",
    "horizon": "1000000",
    "truncation": "auto",
    "design": "bernoulli",
    "delay": "off",
    "seed": "0",
    "replications": "100",
    "ground_truth": "compute",
    "estimators": "naive,qDQ,wDQ,mixDQ",
    "mu": "known",
    "table": "experiment",
}

REQUIRED = ("n_servers", "policy_control", "policy_treatment")

KNOWN_KEYS = frozenset(DEFAULTS) | frozenset(REQUIRED) | {"lambda_base", "lambda_amp", "service_treatment"}


def read_pairs(text: str, known: Optional[frozenset] = None) -> Dict[str, Tuple[str, int]]:
    """
    Tokenize config text into ``{key: (value, line_number)}``.

    Raises:
        ConfigParseError: On a malformed line, a duplicate key or (with
            ``known``) an unknown key
    """
    pairs: Dict[str, Tuple[str, int]] = {}
    for binding in parse_stream(io.StringIO(text)):
        line = binding.original.line
        if binding.error:
            raise ConfigParseError(f"cannot parse '{binding.original.string.strip()}'", line)
        if binding.key is None:
            continue
        if binding.value is None:
            raise ConfigParseError(f"key '{binding.key}' has no value", line)
        key = binding.key.strip().lower()
        if known is not None and key not in known:
            raise ConfigParseError(f"unknown key '{key}'", line)
        if key in pairs:
            raise ConfigParseError(f"duplicate key '{key}'", line)
        pairs[key] = (binding.value.strip(), line)
    return pairs


# ---------------- Value grammars -----------------

def _number(text: str, cast=float):
    try:
        value = cast(text)
    except ValueError:
        raise ValueError(f"'{text}' is not a valid {cast.__name__}") from None
    if cast is float and not math.isfinite(value):
        raise ValueError(f"'{text}' is not finite")
    return value


def parse_service(text: str, n_servers: int):
    """``exp:1.0`` | ``exp:0.9,0.91,...`` | ``const:1.0`` | ``pareto:4:0.75``."""
    kind, _, rest = text.partition(":")
    kind = kind.strip().lower()
    if kind == "pareto":
        shape, _, scale = rest.partition(":")
        return ParetoService(shape=_number(shape), scale=_number(scale))
    if kind in ("exp", "const"):
        rates = tuple(_number(v) for v in rest.split(",") if v.strip())
        if len(rates) == 1:
            rates = rates * n_servers
        cls = ExponentialService if kind == "exp" else DeterministicService
        return cls(rates=rates)
    raise ValueError(f"unknown service '{text}' (exp, const or pareto)")


def parse_policy(text: str):
    """``pod:3`` | ``mjsq:0.4`` | ``jiq:2``."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    if kind == "pod":
        return PowerOfD(d=_number(arg, int))
    if kind == "mjsq":
        return MJSQ(r=_number(arg))
    if kind == "jiq":
        return JIQ(d=_number(arg, int))
    raise ValueError(f"unknown policy '{text}' (pod, mjsq or jiq)")


def parse_design(text: str):
    """``bernoulli`` | ``global0`` | ``global1`` | ``group`` | ``switchback:100``."""
    kind, _, arg = text.partition(":")
    kind = kind.strip().lower()
    simple = {
        "bernoulli": BernoulliDesign,
        "global0": GlobalControlDesign,
        "global1": GlobalTreatmentDesign,
        "group": GroupDesign,
    }
    if kind in simple and not arg:
        return simple[kind]()
    if kind == "switchback":
        return SwitchbackDesign(window=_number(arg))
    raise ValueError(f"unknown design '{text}'")


def parse_switch(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("on", "true", "yes", "1"):
        return True
    if lowered in ("off", "false", "no", "0"):
        return False
    raise ValueError(f"expected on/off, got '{text}'")


def parse_estimators(text: str, truncation: Optional[int]) -> Tuple[EstimatorSpec, ...]:
    specs = []
    for name in (part.strip() for part in text.split(",")):
        if not name:
            continue
        if name not in ESTIMATOR_NAMES:
            raise ValueError(f"unknown estimator '{name}'")
        specs.append(EstimatorSpec(name, truncation=truncation))
    return tuple(specs)


def auto_truncation(n_servers: int, lam: float) -> int:
    return int(math.floor(settings.truncation_multiplier * n_servers * lam))


# ---------------- Entry points -----------------

def parse_config(text: str) -> Tuple[SimConfig, ExperimentPlan]:
    """
    Parse a config file into a simulation config and an experiment plan.

    Raises:
        ConfigParseError: Malformed, unknown or duplicate keys, with the line number
        ConfigInvalid: Missing required keys or violated invariants
    """
    pairs = read_pairs(text, KNOWN_KEYS)
    for key in REQUIRED:
        if key not in pairs:
            raise ConfigInvalid(f"{key}: missing required key")
    values = {key: (value, None) for key, value in DEFAULTS.items()}
    values.update(pairs)

    def field(key: str, parse):
        value, line = values[key]
        try:
            return parse(value)
        except ValidationError as e:
            raise ConfigParseError(f"{key}: {first_error(e)}", line) from None
        except ValueError as e:
            raise ConfigParseError(f"{key}: {e}", line) from None

    n = field("n_servers", lambda v: _number(v, int))
    if n < 1:
        raise ConfigInvalid("n_servers: must be at least 1")
    if "lambda_amp" in pairs and "lambda_base" not in pairs:
        raise ConfigParseError("lambda_amp needs lambda_base", pairs["lambda_amp"][1])
    if "lambda" in pairs and "lambda_base" in pairs:
        raise ConfigParseError("give either lambda or lambda_base, not both", pairs["lambda"][1])
    try:
        if "lambda_base" in values:
            base = field("lambda_base", _number)
            amp = field("lambda_amp", _number) if "lambda_amp" in values else 0.0
            arrivals: Any = SinusoidalArrivals(base=base, amplitude=amp) if amp else ConstantArrivals(rate=base)
        else:
            arrivals = ConstantArrivals(rate=field("lambda", _number))
    except ValidationError as e:
        raise ConfigInvalid(f"arrivals: {first_error(e)}") from e

    treatment_service = None
    if "service_treatment" in values:
        treatment_service = field("service_treatment", lambda v: parse_service(v, n))

    config = SimConfig.build(
        n_servers=n,
        arrival_spec=arrivals,
        service_spec=field("service", lambda v: parse_service(v, n)),
        treatment_service_spec=treatment_service,
        control_policy=field("policy_control", parse_policy),
        treatment_policy=field("policy_treatment", parse_policy),
        treatment_prob=field("p", _number),
        horizon=field("horizon", _number),
        design=field("design", parse_design),
        delay_enabled=field("delay", parse_switch),
        seed=field("seed", lambda v: _number(v, int)),
    )

    if values["truncation"][0].lower() == "auto":
        truncation = auto_truncation(n, config.mean_arrival_rate)
    else:
        truncation = field("truncation", lambda v: _number(v, int))

    truth_text = values["ground_truth"][0].lower()
    if truth_text == "compute":
        truth: Any = ComputedTruth(
            horizon=settings.ground_truth_horizon,
            replications=settings.ground_truth_replications,
        )
    else:
        truth = SuppliedTruth(value=field("ground_truth", _number))

    mu_text = values["mu"][0].lower()
    if mu_text not in ("known", "estimated"):
        raise ConfigParseError(f"mu: expected known or estimated, got '{mu_text}'", values["mu"][1])

    plan = ExperimentPlan.build(
        base=config,
        replications=field("replications", lambda v: _number(v, int)),
        estimators=field("estimators", lambda v: parse_estimators(v, truncation)),
        ground_truth=truth,
        estimate_mu=mu_text == "estimated",
        table=values["table"][0],
    )
    return config, plan


def _format_float(x: float) -> str:
    return repr(float(x))


def format_service(spec) -> str:
    if isinstance(spec, ParetoService):
        return f"pareto:{_format_float(spec.shape)}:{_format_float(spec.scale)}"
    prefix = "exp" if isinstance(spec, ExponentialService) else "const"
    return f"{prefix}:{','.join(_format_float(r) for r in spec.rates)}"


def format_policy(policy) -> str:
    if isinstance(policy, MJSQ):
        return f"mjsq:{_format_float(policy.r)}"
    return f"{policy.kind}:{policy.d}"


def format_design(design) -> str:
    if isinstance(design, SwitchbackDesign):
        return f"switchback:{_format_float(design.window)}"
    return design.kind


def format_config(config: SimConfig) -> List[str]:
    """``key = value`` lines that ``parse_config`` reads back to ``config``."""
    lines = [f"n_servers = {config.n_servers}"]
    arrivals = config.arrival_spec
    if isinstance(arrivals, SinusoidalArrivals):
        lines.append(f"lambda_base = {_format_float(arrivals.base)}")
        lines.append(f"lambda_amp = {_format_float(arrivals.amplitude)}")
    else:
        lines.append(f"lambda = {_format_float(arrivals.rate)}")
    lines.append(f"service = {format_service(config.service_spec)}")
    if config.treatment_service_spec is not None:
        lines.append(f"service_treatment = {format_service(config.treatment_service_spec)}")
    lines += [
        f"policy_control = {format_policy(config.control_policy)}",
        f"policy_treatment = {format_policy(config.treatment_policy)}",
        f"p = {_format_float(config.treatment_prob)}",
        f"horizon = {_format_float(config.horizon)}",
        f"design = {format_design(config.design)}",
        f"delay = {'on' if config.delay_enabled else 'off'}",
        f"seed = {config.seed}",
    ]
    return lines
