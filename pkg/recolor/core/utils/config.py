import logging
import os
from typing import Optional


def _env_int(name: str, default: Optional[int]) -> Optional[int]:
    raw = os.getenv(name, "")
    return int(raw) if raw.strip() else default


class Config:
    """Configuration settings for the recolouring toolkit."""

    # Reproducibility
    SEED: Optional[int] = _env_int("RECOLOR_SEED", None)
    RNG_ALGORITHM = "philox"

    # Budgets (hard caps)
    ENUMERATION_NODE_BUDGET: int = int(os.getenv("RECOLOR_BUDGET_NODES", str(10**8)))
    CHAIN_STEP_BUDGET: int = int(os.getenv("RECOLOR_BUDGET_STEPS", str(10**7)))
    WALL_SECONDS_BUDGET: float = float(os.getenv("RECOLOR_BUDGET_SECONDS", "0"))  # 0 = unlimited
    STATIONARY_ENUMERATION_BUDGET = 10**6
    MAX_CONFIGURATION_ATTEMPTS = 100_000

    # Exact computations
    MAX_DENSE_STATES = 10_000
    MAX_DIAMETER_STATES = 1_000_000
    TV_TOLERANCE = 1e-12
    DEFAULT_EPSILON = 0.25
    DEFAULT_TV_HORIZON = 200

    # Monte-Carlo
    Z_95 = 1.959963984540054
    PROPOSAL_BLOCK = 4096

    # Execution
    WORKERS: int = int(os.getenv("RECOLOR_WORKERS", "1"))
    OUTPUT_DIR: str = os.getenv("RECOLOR_OUTPUT_DIR", "./results")
    LOG_LEVEL: str = os.getenv("RECOLOR_LOG_LEVEL", "INFO")

    @classmethod
    def validate_config(cls) -> bool:
        """Validate that budgets and logging settings are usable."""
        problems = []
        if cls.ENUMERATION_NODE_BUDGET <= 0:
            problems.append("RECOLOR_BUDGET_NODES")
        if cls.CHAIN_STEP_BUDGET <= 0:
            problems.append("RECOLOR_BUDGET_STEPS")
        if cls.WALL_SECONDS_BUDGET < 0:
            problems.append("RECOLOR_BUDGET_SECONDS")
        if cls.WORKERS < 1:
            problems.append("RECOLOR_WORKERS")
        if not isinstance(logging.getLevelName(cls.LOG_LEVEL.upper()), int):
            problems.append("RECOLOR_LOG_LEVEL")

        if problems:
            logging.getLogger(__name__).error(f"Invalid configuration: {problems}")
            return False

        return True

    @classmethod
    def get_budget(cls, name: str) -> Optional[float]:
        """Get a budget by name ("nodes", "steps" or "seconds")."""
        budgets = {
            "nodes": cls.ENUMERATION_NODE_BUDGET,
            "steps": cls.CHAIN_STEP_BUDGET,
            "seconds": cls.WALL_SECONDS_BUDGET or None,
        }
        return budgets.get(name.lower())


# Global config instance
config = Config()
