"""Risk-sensitive attacker/defender detection game with CARA utilities."""

from riskgame.errors import BracketError, DomainError, ScenarioError
from riskgame.game import (
    AttackerProfile,
    DetectionMatrix,
    DetectorStrategy,
    MalwareFamily,
    MalwareVariant,
    belief_probability,
    best_attack,
    best_defender_strategy,
    column_average,
    dominated_families,
    row_average,
    variant_value,
)
from riskgame.montecarlo import (
    SimulationPlan,
    SimulationReport,
    calibrate_detection,
    realized_utility,
    run_simulation,
    satisfaction_ratio,
)
from riskgame.scenario import Scenario, load_scenario, write_scenario
from riskgame.threshold import (
    SATURATED,
    IndifferenceQuery,
    indifference_ratio,
    indifference_ratio_bisect,
    preference_region_grid,
)
from riskgame.utility import (
    Attitude,
    RiskProfile,
    cara_coefficient_estimate,
    classify_attitude,
    expected_utility,
    exponential_utility,
)

__version__ = "0.1.0"

__all__ = [
    "AttackerProfile",
    "Attitude",
    "BracketError",
    "DetectionMatrix",
    "DetectorStrategy",
    "DomainError",
    "IndifferenceQuery",
    "MalwareFamily",
    "MalwareVariant",
    "RiskProfile",
    "SATURATED",
    "Scenario",
    "ScenarioError",
    "SimulationPlan",
    "SimulationReport",
    "belief_probability",
    "best_attack",
    "best_defender_strategy",
    "calibrate_detection",
    "cara_coefficient_estimate",
    "classify_attitude",
    "column_average",
    "dominated_families",
    "expected_utility",
    "exponential_utility",
    "indifference_ratio",
    "indifference_ratio_bisect",
    "load_scenario",
    "preference_region_grid",
    "realized_utility",
    "row_average",
    "run_simulation",
    "satisfaction_ratio",
    "variant_value",
    "write_scenario",
]
