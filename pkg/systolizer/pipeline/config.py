# Configuration constants for the systolizer pipeline

import os
import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from systolizer.pipeline.errors import InputError


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{name} must be an integer, got {raw!r}")


# Coxeter Configuration
DEFAULT_RADIUS = 6
NODE_BUDGET = _env_int("SYSTOLIZER_NODE_BUDGET", 200_000)
EXCLUDED_TRIANGLE_TYPES = ((2, 4, 4), (2, 4, 5), (2, 5, 5))
RANK3_ROLES = ("2", "k", "m")
RANK3_GENERATORS = ("r", "s", "t")
RANK4_LETTERS = ("a", "b", "c", "d")

# Verification Configuration
DEFAULT_K = 6
RANK3_MARGIN = 3
RANK4_MARGIN = 6
SIX_CYCLE_MARGIN = 4
DEFAULT_WORKERS = _env_int("SYSTOLIZER_WORKERS", 1)

# Oracle Configuration
DEFAULT_TRIALS = 200
DEFAULT_MAX_VERTICES = 10
DEFAULT_SEED = 7
ORACLE_K_VALUES = (4, 5, 6, 7)
FACE_ORACLE_TRIALS = 100
FACE_ORACLE_MAX_VERTICES = 8

# Export Configuration
TYPE_COLORS = {
    "2": "red",
    "k": "green",
    "m": "blue",
    "a": "orange",
    "b": "purple",
    "c": "red",
    "d": "gold",
}
DEFAULT_COLOR = "gray"
ORIGIN_STYLES = {
    "original": "solid",
    "friend": "bold",
    "acquaintance": "dashed",
    "derived": "dotted",
}

# Logging Configuration
LOG_LEVEL = getattr(logging, os.environ.get("SYSTOLIZER_LOG_LEVEL", "INFO").upper(), logging.INFO)


@dataclass(frozen=True)
class PipelineConfig:
    """Per-run settings assembled from CLI flags on top of the constants above."""

    exponents: Tuple[float, ...] = ()
    radius: int = DEFAULT_RADIUS
    margin: Optional[int] = None
    k: Union[int, float] = DEFAULT_K
    case: Optional[str] = None
    output: Optional[str] = None
    seed: int = DEFAULT_SEED
    trials: int = DEFAULT_TRIALS
    max_vertices: int = DEFAULT_MAX_VERTICES
    node_budget: int = field(default_factory=lambda: NODE_BUDGET)
    workers: int = DEFAULT_WORKERS

    def __post_init__(self):
        if self.radius < 0:
            raise InputError(f"radius must be >= 0, got {self.radius}")
        if self.k < 4:
            raise InputError(f"k must be >= 4, got {self.k}")
        if self.margin is not None and self.margin < 1:
            raise InputError(f"margin must be >= 1, got {self.margin}")
        if self.node_budget <= 0:
            raise InputError(f"node budget must be positive, got {self.node_budget}")
        if self.trials < 1:
            raise InputError(f"trials must be >= 1, got {self.trials}")
        if self.workers < 1:
            raise InputError(f"workers must be >= 1, got {self.workers}")
        if self.case is not None and self.case not in ("I", "II", "all_geq_3"):
            raise InputError(f"unknown case override {self.case!r}")

    def margin_for(self, rank: int) -> int:
        if self.margin is not None:
            return self.margin
        return RANK3_MARGIN if rank == 3 else RANK4_MARGIN
