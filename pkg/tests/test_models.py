"""Tests for experiment configuration models."""

import pytest

from src.errors import ConfigInvalid
from src.simulation.models import (
    JIQ,
    MJSQ,
    ConstantArrivals,
    ExponentialService,
    GlobalControlDesign,
    GroupDesign,
    ParetoService,
    PowerOfD,
    SimConfig,
    SinusoidalArrivals,
    SwitchbackDesign,
    design_label,
)


class TestSimConfig:
    def test_defaults(self, small_config):
        assert small_config.treatment_prob == 0.5
        assert small_config.design.kind == "bernoulli"
        assert small_config.delay_enabled is False
        assert small_config.mean_arrival_rate == 0.7

    def test_rate_vector_length_must_match_servers(self, make_config):
        with pytest.raises(ConfigInvalid, match="rate vector"):
            make_config(n_servers=3, service_spec=ExponentialService(rates=(1.0, 1.0)))

    @pytest.mark.parametrize("p", [0.0, 1.0, 1.5])
    def test_treatment_prob_is_open_interval(self, make_config, p):
        with pytest.raises(ConfigInvalid):
            make_config(treatment_prob=p)

    def test_group_design_needs_even_servers(self, make_config):
        with pytest.raises(ConfigInvalid, match="even"):
            make_config(n_servers=5, design=GroupDesign())

    def test_group_design_limits_sample_size(self, make_config):
        with pytest.raises(ConfigInvalid, match="samples more servers"):
            make_config(n_servers=4, design=GroupDesign(), control_policy=PowerOfD(d=3))

    def test_policy_cannot_sample_more_than_pool(self, make_config):
        with pytest.raises(ConfigInvalid):
            make_config(n_servers=2, control_policy=JIQ(d=3))

    def test_seed_range(self, make_config):
        make_config(seed=2**64 - 1)
        with pytest.raises(ConfigInvalid):
            make_config(seed=2**64)

    def test_replace_revalidates(self, small_config):
        changed = small_config.replace(horizon=50.0)
        assert changed.horizon == 50.0
        assert small_config.horizon == 200.0
        with pytest.raises(ConfigInvalid):
            small_config.replace(horizon=-1.0)

    def test_service_for_uses_treatment_spec(self, make_config):
        fast = ExponentialService(rates=(2.0,) * 4)
        cfg = make_config(treatment_service_spec=fast)
        assert cfg.service_for(1) is fast
        assert cfg.service_for(0).rates == (1.0,) * 4
        assert cfg.policy_for(0) == PowerOfD(d=2)
        assert cfg.policy_for(1) == PowerOfD(d=1)

    def test_parses_from_plain_dicts(self):
        cfg = SimConfig.build(
            n_servers=2,
            arrival_spec={"kind": "constant", "rate": 0.5},
            service_spec={"kind": "exponential", "rates": [1.0, 1.0]},
            control_policy={"kind": "mjsq", "r": 0.4},
            treatment_policy={"kind": "pod", "d": 2},
            horizon=10.0,
        )
        assert isinstance(cfg.control_policy, MJSQ)
        assert isinstance(cfg.arrival_spec, ConstantArrivals)


class TestSpecs:
    def test_sinusoidal_rate(self):
        spec = SinusoidalArrivals(base=0.9, amplitude=0.15)
        assert spec.mean_rate == 0.9
        assert spec.rate_at(0.0) == pytest.approx(0.9)

    def test_sinusoidal_base_must_exceed_amplitude(self):
        with pytest.raises(ValueError):
            SinusoidalArrivals(base=0.1, amplitude=0.2)

    def test_pareto_mean(self):
        spec = ParetoService(shape=4.0, scale=0.75)
        assert spec.mean == pytest.approx(1.0)
        assert spec.rate(3) == pytest.approx(1.0)

    def test_pareto_needs_finite_variance(self):
        with pytest.raises(ValueError):
            ParetoService(shape=2.0, scale=1.0)

    def test_labels(self):
        assert PowerOfD(d=3).label() == "pod:3"
        assert MJSQ(r=0.4).label() == "mjsq:0.4"
        assert design_label(SwitchbackDesign(window=100.0)) == "switchback:100"
        assert design_label(GlobalControlDesign()) == "global0"
