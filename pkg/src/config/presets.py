from __future__ import annotations

from src.config.experiment import ExperimentConfig
from src.middleware.errors import ConfigError

COHERENCE_WIDE = 1 - 1e-5

PRESETS: dict[str, dict] = {
    "coherence-gain": {
        "case": "coherence",
        "framework": "both",
        "shots": 1,
        "sweep": {"axis": "prior_width", "values": [0.501, 0.55, 0.65, 0.75, 0.85, 0.95]},
    },
    "coherence-mu120": {
        "case": "coherence",
        "framework": "both",
        "prior_width": COHERENCE_WIDE,
        "true_zeta": 0.72,
        "shots": 120,
        "repetitions": 10,
    },
    "coherence-mu20": {
        "case": "coherence",
        "framework": "both",
        "prior_width": COHERENCE_WIDE,
        "true_zeta": 0.72,
        "shots": 20,
        "repetitions": 10,
    },
    "lifetime-gain": {
        "case": "lifetime",
        "framework": "both",
        "shots": 1,
        "sweep": {"axis": "prior_width", "values": [1.5, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0]},
    },
    "lifetime-mu200": {
        "case": "lifetime",
        "framework": "both",
        "prior_width": 10.0,
        "true_parameter": 1.0,
        "probe_time": 1.0,
        "shots": 200,
        "repetitions": 10,
    },
    "lifetime-mu20": {
        "case": "lifetime",
        "framework": "both",
        "prior_width": 10.0,
        "true_parameter": 0.26,
        "probe_time": 1.0,
        "shots": 20,
        "repetitions": 10,
    },
    "probe-eta": {
        "case": "lifetime",
        "framework": "transformation",
        "shots": 1,
        "sweep": {
            "axis": "eta",
            "values": [round(0.05 * k, 2) for k in range(1, 21)],
            "prior_widths": [2.0, 10.0, 100.0],
        },
    },
    "rate": {
        "case": "rate",
        "framework": "transformation",
        "true_parameter": 1.0,
        "shots": 1,
        "repetitions": 10,
    },
}

DESCRIPTIONS = {
    "coherence-gain": "coherence: intrinsic gain vs prior width a, both frameworks",
    "coherence-mu120": "coherence: zeta = 0.72, a = 1 - 1e-5, mu = 120, m = 10",
    "coherence-mu20": "coherence: zeta = 0.72, a = 1 - 1e-5, mu = 20, m = 10",
    "lifetime-gain": "lifetime: intrinsic gain vs prior width b, both frameworks",
    "lifetime-mu200": "lifetime: theta/t = 1, b = 10, mu = 200, m = 10",
    "lifetime-mu20": "lifetime: theta/t = 0.26, b = 10, mu = 20, m = 10",
    "probe-eta": "lifetime: precision gain vs eta for b in {2, 10, 100}",
    "rate": "exponential rate: closed form vs grid pipeline, mu = 1",
}


# short aliases, one per preset except rate
ALIASES = {
    "fig2": "coherence-gain",
    "fig3-top": "coherence-mu120",
    "fig3-bottom": "coherence-mu20",
    "fig4": "lifetime-gain",
    "fig5-top": "lifetime-mu200",
    "fig5-bottom": "lifetime-mu20",
    "fig6": "probe-eta",
}


def preset_names() -> list[str]:
    return sorted(PRESETS) + sorted(ALIASES)


def preset(name: str) -> dict:
    name = ALIASES.get(name, name)
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return dict(PRESETS[name])


def validate_presets() -> dict[str, ExperimentConfig]:
    return {name: ExperimentConfig.model_validate(body) for name, body in PRESETS.items()}
