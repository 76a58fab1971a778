"""Resource destroying maps: free-operation conditions, monotones and the coherence/discord catalog."""

__version__ = "0.1.0"

from .channels import KrausChannel, apply, compose, embed_local, is_cptp  # noqa: E402
from .conditions import (  # noqa: E402
    check_commuting,
    check_nonactivating,
    check_nongenerating,
    check_selective,
    classify,
)
from .config import CheckConfig  # noqa: E402
from .destroyers import (  # noqa: E402
    Destroyer,
    dephasing_destroyer,
    discord_destroyer,
    extreme_coherence_destroyer,
    twirl_destroyer,
)
from .monotones import diagonal_discord, dtilde, relative_entropy, von_neumann_entropy  # noqa: E402
from .states import DensityMatrix, is_cq, make_density  # noqa: E402

__all__ = [
    "CheckConfig",
    "DensityMatrix",
    "Destroyer",
    "KrausChannel",
    "apply",
    "check_commuting",
    "check_nonactivating",
    "check_nongenerating",
    "check_selective",
    "classify",
    "compose",
    "dephasing_destroyer",
    "diagonal_discord",
    "discord_destroyer",
    "dtilde",
    "embed_local",
    "extreme_coherence_destroyer",
    "is_cptp",
    "is_cq",
    "make_density",
    "relative_entropy",
    "twirl_destroyer",
    "von_neumann_entropy",
]
