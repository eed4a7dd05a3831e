"""Car-following RL platoon laboratory.

Thin python layer over the C++ core: vehicle dynamics, reward shaping,
VT-CPFM fuel model, IDM and OU-leader baselines, TD3 training, sequential
platoon rollout, and Edie fundamental-diagram estimation.
"""

from ._core import *  # noqa: F401,F403

__all__ = [name for name in dir() if not name.startswith("_")]
