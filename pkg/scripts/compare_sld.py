"""Compare the Bayesian Lyapunov solution with the local SLD picture.

For f(z) = z and a narrow flat prior around theta_bar, expanding rho(theta) to
first order around the prior mean suggests S ~ theta_bar I + sigma^2 L(theta_bar),
with sigma^2 the prior variance and L the SLD. This prints the relative
Frobenius distance between the two as the prior narrows.

Usage: python -m scripts.compare_sld [--case coherence|lifetime] [--center 0.7]
"""

import argparse
import logging

import numpy as np
from dotenv import load_dotenv

from src.models.coherence import CoherenceModel
from src.models.lifetime import LifetimeModel
from src.numerics.quadrature import linear_grid
from src.priors.priors import make_ignorance_prior
from src.priors.symmetry import identity_symmetry
from src.quantum.lyapunov import sld
from src.quantum.strategy import optimal_strategy
from src.utils.logging import configure_logging

logger = logging.getLogger(__name__)

HALF_WIDTHS = (0.2, 0.1, 0.05, 0.02, 0.01, 0.005)


def compare(model, center: float, half_width: float) -> tuple[float, float]:
    grid = linear_grid(center - half_width, center + half_width, 257)
    prior = make_ignorance_prior("flat", grid)
    report = optimal_strategy(model, prior, identity_symmetry(grid))
    variance = report.prior_loss
    L = sld(model.state(center), model.dstate(center)).entries
    local = center * np.eye(model.dim) + variance * L
    S = report.S_operator.entries
    distance = float(np.linalg.norm(S - local) / np.linalg.norm(S))
    return variance, distance


def main() -> None:
    load_dotenv()
    configure_logging()
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--case", choices=("coherence", "lifetime"), default="coherence")
    parser.add_argument("--center", type=float, default=None)
    args = parser.parse_args()

    if args.case == "coherence":
        model, center = CoherenceModel(0.1), args.center or 0.7
    else:
        model, center = LifetimeModel(0.5, 1.0), args.center or 1.0

    print(f"{'half width':>10}  {'sigma^2':>10}  {'|S - local| / |S|':>18}")
    for half_width in HALF_WIDTHS:
        if not 0 < center - half_width:
            logger.warning("half width %g crosses the parameter boundary; skipped", half_width)
            continue
        variance, distance = compare(model, center, half_width)
        print(f"{half_width:>10g}  {variance:>10.3e}  {distance:>18.3e}")


if __name__ == "__main__":
    main()
