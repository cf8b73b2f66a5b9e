from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional, TypeVar

import numpy as np

from src.bayes.estimator import EstimateReport, optimal_estimate
from src.bayes.likelihood import LikelihoodModel
from src.bayes.posterior import PosteriorState, bayes_update
from src.config.experiment import ExperimentConfig
from src.config.settings import OUTPUT_DIR
from src.middleware.errors import ConfigError
from src.models.coherence import CoherenceModel, coherence_frameworks, coherence_grid, coherence_quantifier, theta_for_zeta
from src.models.frameworks import Framework
from src.models.lifetime import LifetimeModel, lifetime_frameworks, lifetime_grid
from src.models.metrics import coverage, nsr, nsr_percent
from src.models.rate import ExponentialRateModel, estimate_rate, rate_closed_form
from src.models.simulate import simulate_shots
from src.numerics.quadrature import Grid1D
from src.numerics.random import RandomStream
from src.quantum.adaptive import adaptive_loop
from src.quantum.model import BornLikelihood, QuantumModel
from src.quantum.probe import optimize_probe
from src.quantum.strategy import StrategyReport, consistency_check, optimal_strategy
from src.utils import plots
from src.utils.artifacts import ESTIMATE_COLUMNS, TRAJECTORY_COLUMNS, build_manifest, write_csv, write_json
from src.utils.run_context import reset_repetition, reset_run_id, set_repetition, set_run_id

logger = logging.getLogger(__name__)

T = TypeVar("T")

# ============================================================================
# CASE SETUP
# ============================================================================


@dataclass(frozen=True, eq=False)
class CaseSetup:
    """Everything a repetition needs; immutable and shared across worker threads."""

    config: ExperimentConfig
    true_theta: float
    grid: Optional[Grid1D] = None
    model: Optional[QuantumModel] = None
    frameworks: dict[str, Framework] = field(default_factory=dict)
    strategies: dict[str, StrategyReport] = field(default_factory=dict)
    measurement: Optional[LikelihoodModel] = None


def true_theta_for(config: ExperimentConfig) -> float:
    if config.case == "coherence":
        if config.true_zeta is not None:
            theta = theta_for_zeta(config.true_zeta, config.noise)
        elif config.true_parameter is not None:
            theta = config.true_parameter
        else:
            theta = 0.8 if config.width > 0.8 else 0.5
        if not 1 - config.width < theta < config.width:
            raise ConfigError(f"true theta {theta:.6g} lies outside the prior range (1 - a, a)")
        return theta
    if config.case == "lifetime":
        return config.true_parameter if config.true_parameter is not None else config.probe_time
    return config.true_parameter if config.true_parameter is not None else 1.0


def build_case(config: ExperimentConfig) -> CaseSetup:
    theta = true_theta_for(config)
    if config.case == "rate":
        return CaseSetup(config=config, true_theta=theta)

    if config.case == "coherence":
        grid = coherence_grid(config.width, config.grid_nodes)
        model: QuantumModel = CoherenceModel(config.noise)
        available = coherence_frameworks(grid, config.noise)
    else:
        grid = lifetime_grid(config.width, config.probe_time, config.grid_nodes)
        model = LifetimeModel(config.eta, config.probe_time)
        available = lifetime_frameworks(grid, config.probe_time, config.eta if config.numeric_geometry else None)

    frameworks = {name: available[name] for name in config.frameworks}
    strategies = {name: optimal_strategy(model, fw.prior, fw.f) for name, fw in frameworks.items()}
    # one physical measurement per repetition, post-processed by every framework
    first = next(iter(strategies.values()))
    return CaseSetup(
        config=config,
        true_theta=theta,
        grid=grid,
        model=model,
        frameworks=frameworks,
        strategies=strategies,
        measurement=BornLikelihood(model, first.povm),
    )


# ============================================================================
# REPETITIONS
# ============================================================================


@dataclass
class RepetitionResult:
    trajectory: list[dict[str, Any]]
    estimates: list[dict[str, Any]]
    extras: dict[str, Any] = field(default_factory=dict)


def _row(setup: CaseSetup, report: EstimateReport) -> dict[str, Any]:
    row: dict[str, Any] = {"estimate": report.estimate, "error": report.error, "empirical_loss": report.empirical_loss}
    if setup.config.case == "coherence":
        zeta = coherence_quantifier(report, setup.config.noise)
        row.update(zeta=zeta.zeta, dzeta=zeta.dzeta)
    return row


def _final_row(setup: CaseSetup, repetition: int, name: str, report: EstimateReport) -> dict[str, Any]:
    return {
        "repetition": repetition,
        "framework": name,
        "f_mean": report.f_mean,
        "clamped": report.clamped,
        **_row(setup, report),
    }


def _rate_repetition(setup: CaseSetup, repetition: int) -> RepetitionResult:
    config = setup.config
    rng = RandomStream(config.seed, repetition)
    times = simulate_shots(ExponentialRateModel(), setup.true_theta, config.shots, rng).outcomes
    result = estimate_rate(times, nodes=config.grid_nodes, truncation=config.width)
    trajectory, estimates = [], []
    for name in config.frameworks:
        for shot in range(1, len(times) + 1):
            running = rate_closed_form(float(times[:shot].mean()), shot)
            trajectory.append(
                {"repetition": repetition, "framework": name, "shot": shot, "outcome": times[shot - 1], **_row(setup, running)}
            )
        estimates.append(_final_row(setup, repetition, name, result.report))
    extras = {
        "closed_form_estimate": result.closed_form.estimate,
        "closed_form_error": result.closed_form.error,
        "estimate_relative_difference": abs(result.report.estimate / result.closed_form.estimate - 1.0),
        "error_relative_difference": abs(result.report.error / result.closed_form.error - 1.0),
        "truncation_sensitivity": result.truncation_sensitivity,
    }
    return RepetitionResult(trajectory, estimates, extras)


def _fixed_repetition(setup: CaseSetup, repetition: int) -> RepetitionResult:
    config = setup.config
    rng = RandomStream(config.seed, repetition)
    batch = simulate_shots(setup.measurement, setup.true_theta, config.shots, rng)
    trajectory, estimates = [], []
    for name, fw in setup.frameworks.items():
        state = PosteriorState.from_prior(fw.prior)
        for shot, outcome in enumerate(batch.outcomes, start=1):
            state = bayes_update(state, setup.measurement, outcome)
            report = optimal_estimate(state, fw.f)
            trajectory.append(
                {"repetition": repetition, "framework": name, "shot": shot, "outcome": outcome, **_row(setup, report)}
            )
        estimates.append(_final_row(setup, repetition, name, report))
    return RepetitionResult(trajectory, estimates)


def _adaptive_repetition(setup: CaseSetup, repetition: int) -> RepetitionResult:
    config = setup.config
    candidates = config.controls if config.controls is not None else [None]
    trajectory, estimates = [], []
    for name, fw in setup.frameworks.items():
        steps = adaptive_loop(
            setup.model, fw.prior, fw.f, candidates, setup.true_theta, config.shots, RandomStream(config.seed, repetition)
        )
        for step in steps:
            trajectory.append(
                {
                    "repetition": repetition,
                    "framework": name,
                    "shot": step.shot,
                    "control": step.control,
                    "outcome": step.outcome,
                    **_row(setup, step.report),
                }
            )
        estimates.append(_final_row(setup, repetition, name, steps[-1].report))
    return RepetitionResult(trajectory, estimates)


def run_repetition(setup: CaseSetup, repetition: int) -> RepetitionResult:
    if setup.config.case == "rate":
        return _rate_repetition(setup, repetition)
    if setup.config.protocol == "adaptive":
        return _adaptive_repetition(setup, repetition)
    return _fixed_repetition(setup, repetition)


def _in_context(run_id: str, repetition: int, fn: Callable[[int], T]) -> T:
    run_token = set_run_id(run_id)
    rep_token = set_repetition(repetition)
    try:
        return fn(repetition)
    finally:
        reset_repetition(rep_token)
        reset_run_id(run_token)


def map_ordered(fn: Callable[[int], T], count: int, workers: int, run_id: str) -> list[T]:
    """Apply fn to 0..count-1 on a thread pool, results in index order."""
    if workers <= 1 or count <= 1:
        return [_in_context(run_id, i, fn) for i in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda i: _in_context(run_id, i, fn), range(count)))


# ============================================================================
# SUMMARIES
# ============================================================================


def strategy_summary(strategy: StrategyReport) -> dict[str, Any]:
    offdiagonal = max(
        float(np.max(np.abs(e.entries - np.diag(np.diag(e.entries))))) for e in strategy.povm.elements
    )
    return {
        "gain_G": strategy.gain_G,
        "min_loss": strategy.min_loss,
        "prior_loss": strategy.prior_loss,
        "intrinsic_gain": strategy.intrinsic_gain,
        "povm_labels": strategy.povm.labels,
        "povm_estimates": strategy.estimates_per_outcome,
        "povm_max_offdiagonal": offdiagonal,
        "consistency_residual": consistency_check(strategy, strategy.rho0, strategy.rho1),
    }


def summarize(setup: CaseSetup, results: list[RepetitionResult]) -> dict[str, Any]:
    config = setup.config
    metric = "zeta" if config.case == "coherence" else "estimate"
    summary: dict[str, Any] = {
        "case": config.case,
        "true_parameter": setup.true_theta,
        "shots": config.shots,
        "repetitions": config.repetitions,
        "frameworks": {},
    }
    if config.case == "coherence":
        summary["true_zeta"] = 2.0 * (1.0 - config.noise) * float(np.sqrt(setup.true_theta * (1.0 - setup.true_theta)))
    for name in config.frameworks:
        rows = [row for result in results for row in result.estimates if row["framework"] == name]
        values = [row[metric] for row in rows]
        entry: dict[str, Any] = {
            "metric": metric,
            "nsr": nsr(values),
            "nsr_percent": nsr_percent(values),
            "mean_estimate": float(np.mean([row["estimate"] for row in rows])),
            "mean_error": float(np.mean([row["error"] for row in rows])),
            "coverage_3sigma": coverage([r["estimate"] for r in rows], [r["error"] for r in rows], setup.true_theta),
            "clamped": int(sum(bool(row["clamped"]) for row in rows)),
        }
        if name in setup.strategies:
            entry["strategy"] = strategy_summary(setup.strategies[name])
        summary["frameworks"][name] = entry
    if len(config.frameworks) == 2:
        nsr_g = summary["frameworks"]["geometry"]["nsr"]
        summary["nsr_ratio"] = summary["frameworks"]["transformation"]["nsr"] / nsr_g if nsr_g > 0 else None
    if config.case == "rate":
        summary["rate"] = {
            key: max(result.extras[key] for result in results)
            for key in ("estimate_relative_difference", "error_relative_difference", "truncation_sensitivity")
        }
    return summary


# ============================================================================
# RUN AND SWEEP
# ============================================================================


@dataclass
class RunArtifacts:
    out_dir: Optional[Path]
    summary: dict[str, Any]
    trajectory: list[dict[str, Any]] = field(default_factory=list)
    estimates: list[dict[str, Any]] = field(default_factory=list)
    sweep_rows: list[dict[str, Any]] = field(default_factory=list)
    files: list[str] = field(default_factory=list)


def run_id_for(config: ExperimentConfig) -> str:
    return config.config_hash()[:12]


def output_dir_for(config: ExperimentConfig, override: Optional[str] = None) -> Path:
    base = override or config.output_dir
    return Path(base) if base else Path(OUTPUT_DIR) / run_id_for(config)


def execute(config: ExperimentConfig) -> RunArtifacts:
    """Simulate and estimate without touching the filesystem."""
    run_id = run_id_for(config)
    setup = build_case(config)
    logger.info("running %s with %d repetition(s) of %d shot(s)", config.case, config.repetitions, config.shots)
    results = map_ordered(lambda r: run_repetition(setup, r), config.repetitions, config.workers, run_id)
    return RunArtifacts(
        out_dir=None,
        summary=summarize(setup, results),
        trajectory=[row for result in results for row in result.trajectory],
        estimates=[row for result in results for row in result.estimates],
    )


def _finish(config: ExperimentConfig, artifacts: RunArtifacts, out_dir: Path) -> RunArtifacts:
    artifacts.out_dir = out_dir
    artifacts.files.append(write_json(out_dir / "summary.json", artifacts.summary).name)
    manifest = build_manifest(
        config.canonical_json(), config.config_hash(), config.seed, run_id_for(config), artifacts.files + ["manifest.json"]
    )
    write_json(out_dir / "manifest.json", manifest)
    artifacts.files.append("manifest.json")
    logger.info("wrote %s to %s", ", ".join(sorted(artifacts.files)), out_dir)
    return artifacts


def run(config: ExperimentConfig, out_dir: Optional[str] = None) -> RunArtifacts:
    if config.sweep is not None:
        raise ConfigError("config declares a sweep axis; use the sweep command")
    token = set_run_id(run_id_for(config))
    try:
        artifacts = execute(config)
        target = output_dir_for(config, out_dir)
        artifacts.files.append(write_csv(target / "trajectory.csv", artifacts.trajectory, TRAJECTORY_COLUMNS).name)
        artifacts.files.append(write_csv(target / "estimates.csv", artifacts.estimates, ESTIMATE_COLUMNS).name)
        if config.plots:
            metric = "zeta" if config.case == "coherence" else "estimate"
            error = "dzeta" if config.case == "coherence" else "error"
            truth = artifacts.summary.get("true_zeta", artifacts.summary["true_parameter"])
            path = plots.plot_estimates(target / "estimates.svg", artifacts.estimates, metric, error, truth)
            if path is not None:
                artifacts.files.append(path.name)
        return _finish(config, artifacts, target)
    finally:
        reset_run_id(token)


def _with(config: ExperimentConfig, **update: Any) -> ExperimentConfig:
    return ExperimentConfig.model_validate({**config.model_dump(), "sweep": None, **update})


def _strictly_increasing(values: list[float]) -> bool:
    return all(b > a for a, b in zip(values, values[1:]))


def _sweep_prior_width(config: ExperimentConfig, run_id: str) -> tuple[list[dict[str, Any]], dict[str, Any]]:
    widths = sorted(config.sweep.values)

    def point(i: int) -> list[dict[str, Any]]:
        setup = build_case(_with(config, prior_width=widths[i]))
        return [
            {"prior_width": widths[i], "framework": name, **{k: v for k, v in strategy_summary(s).items() if not k.startswith("povm")}}
            for name, s in setup.strategies.items()
        ]

    rows = [row for chunk in map_ordered(point, len(widths), config.workers, run_id) for row in chunk]
    diagnostics: dict[str, Any] = {}
    for name in config.frameworks:
        gains = [r["intrinsic_gain"] for r in rows if r["framework"] == name]
        diagnostics[f"{name}_increasing"] = _strictly_increasing(gains)
    if len(config.frameworks) == 2:
        by_width: dict[float, dict[str, float]] = {}
        for r in rows:
            by_width.setdefault(r["prior_width"], {})[r["framework"]] = r["intrinsic_gain"]
        diagnostics["transformation_dominates"] = all(
            g["transformation"] >= g["geometry"] - 1e-12 for g in by_width.values()
        )
        diagnostics["max_gap"] = max(abs(g["transformation"] - g["geometry"]) for g in by_width.values())
    return rows, diagnostics


def _sweep_eta(config: ExperimentConfig, run_id: str) -> tuple[list[dict[str, Any]], dict[str, Any]]:
    if config.framework != "transformation":
        raise ConfigError(
            "eta sweeps need the transformation framework: the geometric prior and symmetry function "
            "depend on eta themselves"
        )
    widths = config.sweep.prior_widths or [config.width]
    etas = np.asarray(config.sweep.values, dtype=float)
    t = config.probe_time

    def point(i: int):
        grid = lifetime_grid(widths[i], t, config.grid_nodes)
        fw = lifetime_frameworks(grid, t)["transformation"]
        return optimize_probe(lambda eta: LifetimeModel(eta, t), fw.prior, fw.f, etas)

    optima = map_ordered(point, len(widths), config.workers, run_id)
    rows = [
        {"prior_width": b, "eta": float(eta), "gain_G": float(g)}
        for b, opt in zip(widths, optima)
        for eta, g in zip(etas, opt.gain_curve)
    ]
    return rows, {"eta_star": {str(b): opt.eta_star for b, opt in zip(widths, optima)}}


def _sweep_mu(config: ExperimentConfig, run_id: str) -> tuple[list[dict[str, Any]], dict[str, Any]]:
    rows = []
    for mu in config.sweep.values:
        summary = execute(_with(config, shots=int(mu))).summary
        for name, entry in summary["frameworks"].items():
            rows.append(
                {
                    "mu": int(mu),
                    "framework": name,
                    "nsr": entry["nsr"],
                    "nsr_percent": entry["nsr_percent"],
                    "mean_estimate": entry["mean_estimate"],
                    "mean_error": entry["mean_error"],
                }
            )
    return rows, {}


SWEEP_COLUMNS = {
    "prior_width": ["prior_width", "framework", "gain_G", "min_loss", "prior_loss", "intrinsic_gain", "consistency_residual"],
    "eta": ["prior_width", "eta", "gain_G"],
    "mu": ["mu", "framework", "nsr", "nsr_percent", "mean_estimate", "mean_error"],
}


def sweep(config: ExperimentConfig, out_dir: Optional[str] = None) -> RunArtifacts:
    if config.sweep is None:
        raise ConfigError("sweep needs a config with a sweep axis")
    run_id = run_id_for(config)
    token = set_run_id(run_id)
    try:
        axis = config.sweep.axis
        handler = {"prior_width": _sweep_prior_width, "eta": _sweep_eta, "mu": _sweep_mu}[axis]
        logger.info("sweeping %s over %d point(s)", axis, len(config.sweep.values))
        rows, diagnostics = handler(config, run_id)
        artifacts = RunArtifacts(
            out_dir=None,
            summary={"case": config.case, "axis": axis, "points": len(config.sweep.values), "diagnostics": diagnostics},
            sweep_rows=rows,
        )
        target = output_dir_for(config, out_dir)
        artifacts.files.append(write_csv(target / "sweep.csv", rows, SWEEP_COLUMNS[axis]).name)
        if config.plots:
            x, y, group = {
                "prior_width": ("prior_width", "intrinsic_gain", "framework"),
                "eta": ("eta", "gain_G", "prior_width"),
                "mu": ("mu", "nsr", "framework"),
            }[axis]
            path = plots.plot_sweep(target / "sweep.svg", rows, x, y, group)
            if path is not None:
                artifacts.files.append(path.name)
        return _finish(config, artifacts, target)
    finally:
        reset_run_id(token)
