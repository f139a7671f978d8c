"""cycleres: simple cycle reservoirs and swarm-optimized reservoir networks."""

from .kernels import backend_name
from .reservoir import (
    Activation,
    BuildContext,
    MSCRGenotype,
    MSCRSystem,
    SCRParams,
    build_system,
    cycle_shift,
    scr_single,
)

__version__ = "0.1.0"

__all__ = [
    "Activation",
    "BuildContext",
    "MSCRGenotype",
    "MSCRSystem",
    "SCRParams",
    "backend_name",
    "build_system",
    "cycle_shift",
    "scr_single",
    "__version__",
]
