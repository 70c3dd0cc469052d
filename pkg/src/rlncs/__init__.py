"""RL-driven non-uniform compressed sensing of time-varying sparse signals."""

from .config import RunConfig, desk_profile, load_config, save_config
from .rng import Rng, make_rng, split_rng

__version__ = "0.1.0"

__all__ = ["Rng", "RunConfig", "desk_profile", "load_config", "make_rng",
           "save_config", "split_rng", "__version__"]
