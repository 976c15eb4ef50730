"""Multi-task quadruped locomotion over procedurally generated terrains."""

from ._terragym import (
    Env,
    Heightfield,
    Policy,
    eval_checkpoint,
    generate_terrain,
    lidar_scan,
    train_from_config,
    __version__,
)

__all__ = [
    "Env",
    "Heightfield",
    "Policy",
    "eval_checkpoint",
    "generate_terrain",
    "lidar_scan",
    "train_from_config",
    "__version__",
]
