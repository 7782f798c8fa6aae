"""Anti-jamming Stackelberg games: channel selection by hierarchical learning
and Bayesian power control by backward induction."""

from .channel_game import StrategyProfile, brute_force_nash, brute_force_stackelberg
from .errors import StackjamError
from .experiments import ExperimentPlan, run_plan
from .hla import LearningParams, hla_run, random_baseline_run
from .power_game import PowerGameSpec, average_game_baseline, grid_oracle, leader_optimize
from .scenario import NetworkScenario, build_scenario, generate_scenario, load_scenario

__version__ = "0.1.0"
