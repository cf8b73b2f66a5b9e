from .model import BornLikelihood, FunctionModel, Povm, QuantumModel
from .moments import state_moment
from .lyapunov import qfi, qfi_curve, sld, solve_lyapunov
from .strategy import StrategyReport, consistency_check, optimal_strategy
from .adaptive import AdaptiveStep, adaptive_loop
from .probe import ProbeOptimum, optimize_probe

__all__ = [
    "AdaptiveStep",
    "BornLikelihood",
    "FunctionModel",
    "Povm",
    "ProbeOptimum",
    "QuantumModel",
    "StrategyReport",
    "adaptive_loop",
    "consistency_check",
    "optimal_strategy",
    "optimize_probe",
    "qfi",
    "qfi_curve",
    "sld",
    "solve_lyapunov",
    "state_moment",
]
