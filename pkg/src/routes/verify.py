"""Acceptance checks behind ``qsense verify``.

Each check returns a CheckResult instead of raising, so a single run reports
every failure. The Monte Carlo statistics (200 repetitions per panel) only run
with ``full=True``.
"""

from __future__ import annotations

import logging
import time
from typing import Callable, NamedTuple

import numpy as np

from src.config.experiment import ExperimentConfig
from src.config.presets import preset, validate_presets
from src.models.coherence import CoherenceModel, coherence_frameworks, coherence_grid
from src.models.lifetime import LifetimeModel, lifetime_fisher, lifetime_frameworks, lifetime_grid
from src.models.rate import ExponentialRateModel, estimate_rate
from src.numerics.quadrature import linear_grid, log_grid, logit_grid
from src.numerics.random import RandomStream
from src.numerics.special import digamma, trigamma
from src.priors.fisher import classical_fisher, kl_divergence
from src.priors.priors import make_ignorance_prior
from src.priors.transforms import ParameterTransform, verify_prior_invariance
from src.quantum.lyapunov import qfi
from src.quantum.model import BornLikelihood, Povm
from src.quantum.probe import optimize_probe
from src.quantum.strategy import consistency_check, optimal_strategy
from src.routes.experiments import execute

logger = logging.getLogger(__name__)


class CheckResult(NamedTuple):
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


# ============================================================================
# DETERMINISTIC CHECKS
# ============================================================================


def check_polygamma() -> tuple[bool, str]:
    euler = 0.57721566490153286
    d1 = abs(float(digamma(1.0)) + euler)
    t1 = abs(float(trigamma(1.0)) - np.pi**2 / 6)
    x = RandomStream(0, 0).uniform(1000) * 50 + 1e-3
    recurrence = float(np.max(np.abs(digamma(x + 1) - digamma(x) - 1 / x)))
    ok = d1 < 1e-12 and t1 < 1e-12 and recurrence < 1e-11
    return ok, f"|psi(1)+gamma|={d1:.1e} |psi1(1)-pi^2/6|={t1:.1e} recurrence={recurrence:.1e}"


def check_rate_pipeline() -> tuple[bool, str]:
    worst = 0.0
    model = ExponentialRateModel()
    for mu in (1, 5, 20):
        for k in range(50):
            times = model.sample(1.0, None, RandomStream(k, mu), mu)
            result = estimate_rate(times)
            worst = max(
                worst,
                abs(result.report.estimate / result.closed_form.estimate - 1),
                abs(result.report.error / result.closed_form.error - 1),
            )
    return worst < 1e-3, f"max relative deviation from closed form {worst:.2e}"


def check_rate_asymptotics() -> tuple[bool, str]:
    times = ExponentialRateModel().sample(1.0, None, RandomStream(0, 2000), 2000)
    result = estimate_rate(times)
    deviation = abs(result.report.estimate * float(np.mean(times)) - 1)
    return deviation < 0.01, f"|estimate * mean(t) - 1| = {deviation:.2e}"


def check_coherence_qfi() -> tuple[bool, str]:
    model = CoherenceModel(0.1)
    worst = max(
        abs(qfi(model, theta) * 100 * theta * (1 - theta) / 81 - 1) for theta in (0.1, 0.3, 0.5, 0.7, 0.9)
    )
    return worst < 1e-5, f"max relative deviation {worst:.2e}"


def check_coherence_povm() -> tuple[bool, str]:
    grid = coherence_grid(0.95, 513)
    model = CoherenceModel(0.1)
    offdiagonal, residual = 0.0, 0.0
    for fw in coherence_frameworks(grid).values():
        report = optimal_strategy(model, fw.prior, fw.f)
        for element in report.povm.elements:
            m = element.entries
            offdiagonal = max(offdiagonal, float(np.max(np.abs(m - np.diag(np.diag(m))))))
        residual = max(residual, consistency_check(report, report.rho0, report.rho1))
    return offdiagonal < 1e-8 and residual < 1e-8, f"off-diagonal {offdiagonal:.1e}, consistency {residual:.1e}"


def check_coherence_gain_curve() -> tuple[bool, str]:
    model = CoherenceModel(0.1)

    def gains(a: float) -> dict[str, float]:
        frameworks = coherence_frameworks(coherence_grid(a, 513))
        return {name: optimal_strategy(model, fw.prior, fw.f).intrinsic_gain for name, fw in frameworks.items()}

    widths = (0.55, 0.65, 0.75, 0.85, 0.95)
    curve = [gains(a) for a in widths]
    increasing = all(
        all(b[name] > a[name] for a, b in zip(curve, curve[1:])) for name in ("transformation", "geometry")
    )
    dominates = all(g["transformation"] >= g["geometry"] - 1e-12 for g in curve)
    near_half = gains(0.501)
    gap = abs(near_half["transformation"] - near_half["geometry"])
    return increasing and dominates and gap < 1e-3, (
        f"increasing={increasing} dominates={dominates} gap(a=0.501)={gap:.1e}"
    )


def check_lifetime_golden() -> tuple[bool, str]:
    grid = lifetime_grid(10.0, 1.0, 1025)
    fw = lifetime_frameworks(grid)["transformation"]
    full = optimal_strategy(LifetimeModel(1.0), fw.prior, fw.f)
    half = optimal_strategy(LifetimeModel(0.5), fw.prior, fw.f)
    components = [
        np.sort(np.abs(np.linalg.eigh(element.entries)[1][:, -1])) for element in half.povm.elements
    ]
    found = any(np.allclose(c, (0.44, 0.90), atol=0.01) for c in components)
    ok = abs(full.min_loss - 0.99) <= 0.02 and abs(half.min_loss - 1.52) <= 0.02 and found
    return ok, f"min_loss(eta=1)={full.min_loss:.3f} min_loss(eta=1/2)={half.min_loss:.3f} projector={found}"


def check_probe_optimum() -> tuple[bool, str]:
    etas = np.round(0.05 * np.arange(1, 21), 2)
    stars = {}
    for b in (2.0, 10.0, 100.0):
        fw = lifetime_frameworks(lifetime_grid(b, 1.0, 513))["transformation"]
        stars[b] = optimize_probe(lambda eta: LifetimeModel(eta, 1.0), fw.prior, fw.f, etas).eta_star
    return all(s == 1.0 for s in stars.values()), ", ".join(f"b={b:g}: eta*={s:g}" for b, s in stars.items())


def check_properties() -> tuple[bool, str]:
    scale = verify_prior_invariance(
        make_ignorance_prior("jeffreys_scale", log_grid(1e-3, 1e3, 1024)), ParameterTransform(family="scale", gamma=3.0)
    )
    weight = verify_prior_invariance(
        make_ignorance_prior("weight", logit_grid(1e-4, 1 - 1e-4, 1024)), ParameterTransform(family="mobius", gamma=2.5)
    )

    rng = RandomStream(7, 0)
    dominated = True
    for theta in 0.05 + 0.9 * rng.uniform(10):
        dominated &= qfi(CoherenceModel(0.1), theta) >= classical_fisher(
            BornLikelihood(CoherenceModel(0.1), Povm.computational(2)), theta
        ) * (1 - 1e-6)
    for theta in 0.3 + 3 * rng.uniform(10):
        dominated &= qfi(LifetimeModel(0.5), theta) >= classical_fisher(
            BornLikelihood(LifetimeModel(0.5), Povm.computational(2)), theta
        ) * (1 - 1e-6)

    lifetime = BornLikelihood(LifetimeModel(1.0), Povm.computational(2))
    theta = 1.3
    d = 1e-3 * theta
    kl = kl_divergence(lifetime, theta, theta + d)
    expected = 0.5 * float(lifetime_fisher(theta, 1.0)) * d**2
    kl_error = abs(kl / expected - 1)

    flat = verify_prior_invariance(
        make_ignorance_prior("flat", linear_grid(-5.0, 5.0, 257)), ParameterTransform(family="translation", gamma=1.0)
    )
    ok = scale < 1e-9 and weight < 1e-9 and flat < 1e-9 and dominated and kl_error < 0.01
    return ok, (
        f"invariance scale={scale:.1e} mobius={weight:.1e} translation={flat:.1e} "
        f"qfi>=fisher={bool(dominated)} kl={kl_error:.1e}"
    )


def check_presets() -> tuple[bool, str]:
    configs = validate_presets()
    return True, f"{len(configs)} preset(s) validate"


# ============================================================================
# MONTE CARLO STATISTICS
# ============================================================================


def _nsr_percent(name: str, **update) -> dict[str, float]:
    body = {**preset(name), "repetitions": 200, **update}
    summary = execute(ExperimentConfig.model_validate(body)).summary
    return {fw: entry["nsr_percent"] for fw, entry in summary["frameworks"].items()}


def check_coherence_statistics() -> tuple[bool, str]:
    top = _nsr_percent("coherence-mu120")
    bottom = _nsr_percent("coherence-mu20")
    ratio_top = top["transformation"] / top["geometry"]
    ratio_bottom = bottom["transformation"] / bottom["geometry"]
    ok = all(0.1 <= v <= 1.0 for v in top.values()) and 0.5 <= ratio_top <= 2 and ratio_bottom >= 3
    return ok, (
        f"mu=120 NSR%=({top['transformation']:.3f}, {top['geometry']:.3f}); "
        f"mu=20 ratio={ratio_bottom:.2f}"
    )


def check_lifetime_statistics() -> tuple[bool, str]:
    top = _nsr_percent("lifetime-mu200")
    bottom = _nsr_percent("lifetime-mu20")
    ratio_top = top["transformation"] / top["geometry"]
    ok = (
        all(0.15 <= v <= 0.7 for v in top.values())
        and 0.5 <= ratio_top <= 2
        and bottom["transformation"] >= bottom["geometry"]
    )
    return ok, (
        f"mu=200 NSR%=({top['transformation']:.3f}, {top['geometry']:.3f}); "
        f"mu=20 NSR%=({bottom['transformation']:.3f}, {bottom['geometry']:.3f})"
    )


CHECKS: list[tuple[str, Callable[[], tuple[bool, str]], bool]] = [
    ("polygamma", check_polygamma, False),
    ("rate-pipeline", check_rate_pipeline, False),
    ("rate-asymptotics", check_rate_asymptotics, False),
    ("coherence-qfi", check_coherence_qfi, False),
    ("coherence-povm", check_coherence_povm, False),
    ("coherence-gain-curve", check_coherence_gain_curve, False),
    ("coherence-statistics", check_coherence_statistics, True),
    ("lifetime-golden", check_lifetime_golden, False),
    ("lifetime-statistics", check_lifetime_statistics, True),
    ("probe-optimum", check_probe_optimum, False),
    ("properties", check_properties, False),
    ("presets", check_presets, False),
]


def run_checks(full: bool = False) -> list[CheckResult]:
    results = []
    for name, check, slow in CHECKS:
        if slow and not full:
            logger.info("skipping %s (needs --full)", name)
            continue
        start = time.perf_counter()
        passed, detail = check()
        elapsed = time.perf_counter() - start
        logger.log(logging.INFO if passed else logging.ERROR, "%s %s: %s", "PASS" if passed else "FAIL", name, detail)
        results.append(CheckResult(name, passed, detail, elapsed))
    return results
