"""Key rates for high-dimensional entanglement-based QKD with m mutually unbiased bases.

Submodules:

- ``weyl``: Heisenberg-Weyl operators, Bell basis, MUB eigenbases
- ``bell``: symmetrization, Bell-diagonal states, error rates, entropy
- ``asymptotic``: closed-form and general-m asymptotic rates, thresholds
- ``oracle``: numerical entropy maximization used to check ``asymptotic``
- ``finite``: finite-size rates (EUR / AEP), postselection, optimizer
- ``sweeps``: figure data and CSV output
"""

__version__ = "0.1"

from .asymptotic import (
    AsymptoticSolution,
    max_tolerable_q,
    rate_general,
    rate_max_mubs,
    rate_max_mubs_symmetric,
    rate_symmetric,
    rate_two_mubs,
    shannon_binary,
    solve_eta,
)
from .bell import BellDiagonalState, ErrorRateSet
from .finite import (
    FiniteScenario,
    RateResult,
    SecuritySplit,
    aep_rate,
    coherent_rate,
    eur_rate,
    optimize_rate,
)
from .oracle import ConstrainedProblem, oracle_rate

__all__ = [
    "AsymptoticSolution", "BellDiagonalState", "ConstrainedProblem", "ErrorRateSet",
    "FiniteScenario", "RateResult", "SecuritySplit", "aep_rate", "coherent_rate",
    "eur_rate", "max_tolerable_q", "optimize_rate", "oracle_rate", "rate_general",
    "rate_max_mubs", "rate_max_mubs_symmetric", "rate_symmetric", "rate_two_mubs",
    "shannon_binary", "solve_eta",
]
