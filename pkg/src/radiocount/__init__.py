"""Slotted radio network simulator and approximate neighbor counting
protocols, with a Monte Carlo harness that measures their accuracy and
running time."""

from .engine import (
    DEFAULT_MAX_SLOTS,
    NodeOutcome,
    SimConfig,
    Trace,
    TrialRecord,
    resolve_channel,
    run_simulation,
)
from .protocols import (
    ProtocolParams,
    ProtocolStatus,
    REGISTRY,
    build_protocols,
    center_roles,
    get_protocol,
)
from .seeding import derive_seed, node_rng
from .topology import (
    Topology,
    clique,
    from_file,
    random_multihop,
    star,
    write_edge_list,
)

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_MAX_SLOTS",
    "NodeOutcome",
    "ProtocolParams",
    "ProtocolStatus",
    "REGISTRY",
    "SimConfig",
    "Topology",
    "Trace",
    "TrialRecord",
    "build_protocols",
    "center_roles",
    "clique",
    "derive_seed",
    "from_file",
    "get_protocol",
    "node_rng",
    "random_multihop",
    "resolve_channel",
    "run_simulation",
    "star",
    "write_edge_list",
    "__version__",
]
