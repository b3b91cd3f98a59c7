"""Protocol registry: string names to per-node machine factories.

Each entry declares what the protocol needs (collision detection on or
off, a single-hop topology, a designated node, known bounds) so the
harness can validate an experiment before running anything.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

from ..seeding import node_rng
from ..topology import Topology
from .base import (
    ImmediateDone,
    MissingParam,
    NodeProtocol,
    ProtocolParams,
    ProtocolStatus,
    ProtocolViolation,
    lg_ceil,
)
from .designated import (
    CenterRole,
    CountCenterCDConstNbr,
    CountCenterCDConstW,
    CountCenterCDHighNbr,
    CountCenterCDHighW,
    CountCenterNoCDNbr,
    CountCenterNoCDW,
    EstUpperCenterNbr,
    EstUpperCenterW,
)
from .multihop_all import CountAllCDa, CountAllnoCDa, CountAllnoCDb
from .singlehop import (
    CountSHCDConst,
    CountSHCDHigh,
    CountSHnoCDConst,
    CountSHnoCDHigh,
    EstUpperSH,
)


class MissingDesignated(ValueError):
    pass


class TopologyMismatch(ValueError):
    pass


@dataclass(frozen=True)
class ProtocolSpec:
    name: str
    requires_cd: bool
    scope: str  # "singlehop" | "multihop" | "designated"
    build: Callable
    requires_known_n: bool = False

    def validate(self, topology: Topology, params: ProtocolParams) -> None:
        if self.scope == "singlehop" and not topology.uniform_channel:
            raise TopologyMismatch(
                f"{self.name} assumes a single-hop (complete) topology")
        if self.scope == "designated" and topology.designated is None:
            raise MissingDesignated(
                f"{self.name} needs a topology with a designated node")
        if self.requires_known_n and params.known_N is None:
            raise MissingParam(f"{self.name} requires params.known_N")


def _uniform(cls, **extra):
    def build(topology: Topology, params: ProtocolParams, trial_seed: int):
        return [cls(params, node_rng(trial_seed, u), **extra)
                for u in range(topology.n)]
    return build


def _designated(w_cls, nbr_cls, **extra):
    def build(topology: Topology, params: ProtocolParams, trial_seed: int):
        w = topology.designated
        neighborhood = set(topology.neighbors(w))
        protos = []
        for u in range(topology.n):
            rng = node_rng(trial_seed, u)
            if u == w:
                protos.append(w_cls(params, rng, **extra))
            elif u in neighborhood:
                protos.append(nbr_cls(params, rng, **extra))
            else:
                # Out of w's radio range: nothing to contribute, nothing
                # to learn. Terminated from the start so runs on larger
                # graphs do not stall on nodes that can never hear w.
                protos.append(ImmediateDone(params, rng))
        return protos
    return build


def center_roles(topology: Topology) -> list[CenterRole]:
    """Role of every node in a designated-node run."""
    w = topology.designated
    if w is None:
        raise MissingDesignated("topology has no designated node")
    neighborhood = set(topology.neighbors(w))
    return [CenterRole.DESIGNATED if u == w
            else CenterRole.NEIGHBOR if u in neighborhood
            else CenterRole.BYSTANDER
            for u in range(topology.n)]


REGISTRY: dict[str, ProtocolSpec] = {}


def _register(spec: ProtocolSpec) -> None:
    REGISTRY[spec.name] = spec


_register(ProtocolSpec("count_sh_nocd_const", False, "singlehop",
                       _uniform(CountSHnoCDConst)))
_register(ProtocolSpec("count_sh_nocd_high", False, "singlehop",
                       _uniform(CountSHnoCDHigh)))
_register(ProtocolSpec("est_upper_sh", True, "singlehop",
                       _uniform(EstUpperSH)))
_register(ProtocolSpec("count_sh_cd_const", True, "singlehop",
                       _uniform(CountSHCDConst)))
_register(ProtocolSpec("count_sh_cd_high", True, "singlehop",
                       _uniform(CountSHCDHigh)))
_register(ProtocolSpec("count_all_nocd_a", False, "multihop",
                       _uniform(CountAllnoCDa)))
_register(ProtocolSpec("count_all_nocd_b", False, "multihop",
                       _uniform(CountAllnoCDb), requires_known_n=True))
_register(ProtocolSpec("count_all_cd_a", True, "multihop",
                       _uniform(CountAllCDa)))
_register(ProtocolSpec("est_upper_center", True, "designated",
                       _designated(EstUpperCenterW, EstUpperCenterNbr)))
_register(ProtocolSpec("count_center_nocd_const", False, "designated",
                       _designated(CountCenterNoCDW, CountCenterNoCDNbr,
                                   grow=False)))
_register(ProtocolSpec("count_center_nocd_high", False, "designated",
                       _designated(CountCenterNoCDW, CountCenterNoCDNbr,
                                   grow=True)))
_register(ProtocolSpec("count_center_cd_const", True, "designated",
                       _designated(CountCenterCDConstW, CountCenterCDConstNbr)))
_register(ProtocolSpec("count_center_cd_high", True, "designated",
                       _designated(CountCenterCDHighW, CountCenterCDHighNbr)))


def get_protocol(name: str) -> ProtocolSpec:
    try:
        return REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(REGISTRY))
        raise KeyError(f"unknown protocol {name!r}; known: {known}") from None


def build_protocols(name: str, topology: Topology, params: ProtocolParams,
                    trial_seed: int) -> list[NodeProtocol]:
    spec = get_protocol(name)
    spec.validate(topology, params)
    return spec.build(topology, params, trial_seed)


__all__ = [
    "CenterRole",
    "ImmediateDone",
    "MissingDesignated",
    "MissingParam",
    "NodeProtocol",
    "ProtocolParams",
    "ProtocolSpec",
    "ProtocolStatus",
    "ProtocolViolation",
    "REGISTRY",
    "TopologyMismatch",
    "build_protocols",
    "center_roles",
    "get_protocol",
    "lg_ceil",
]
