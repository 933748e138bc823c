"""
Experiment and verification tools for the recolouring toolkit.
"""

from .experiment_tools import ExperimentConfig, Budgets, experiment_tools
from .verification_tools import verification_tools

__all__ = ["ExperimentConfig", "Budgets", "experiment_tools", "verification_tools"]
