# protocols/registry.py
from dataclasses import dataclass
from typing import Dict, List, Optional

from utils.exceptions import UsageError

# Families decide how the engine drives a paradigm through a round.
GOSSIP = "gossip"            # merge each message as it arrives
SYNCHRONOUS = "synchronous"  # buffer, aggregate at round end
SERVER = "server"            # upload to a server, download its aggregate
ISOLATED = "isolated"        # no messaging


@dataclass(frozen=True)
class ParadigmSpec:
    """Static description of a learning paradigm."""
    name: str                          # e.g. "chisme", "cossimdfl"
    family: str                        # one of the family constants above
    description: str
    similarity_weighted: bool = False  # CosSimDFL aggregation / Chisme merges
    decentralized: bool = True         # counts toward the neighbor message budget


class ParadigmRegistry:
    """Central registry of the paradigms the engine can run."""

    _instance = None

    def __init__(self):
        self._paradigms: Dict[str, ParadigmSpec] = {}
        self._register_builtin_paradigms()

    @classmethod
    def get_instance(cls) -> "ParadigmRegistry":
        if cls._instance is None:
            cls._instance = cls()
        return cls._instance

    def _register_builtin_paradigms(self):
        self.register(ParadigmSpec(
            name="chisme",
            family=GOSSIP,
            description="asynchronous merges weighted by experience and update affinity",
            similarity_weighted=True,
        ))
        self.register(ParadigmSpec(
            name="gossip",
            family=GOSSIP,
            description="asynchronous merges weighted by experience only",
        ))
        self.register(ParadigmSpec(
            name="dfl",
            family=SYNCHRONOUS,
            description="round-end data-size weighted averaging of neighbor updates",
        ))
        self.register(ParadigmSpec(
            name="cossimdfl",
            family=SYNCHRONOUS,
            description="round-end averaging weighted by data size and update similarity",
            similarity_weighted=True,
        ))
        self.register(ParadigmSpec(
            name="fedavg",
            family=SERVER,
            description="central server averaging of client updates",
            decentralized=False,
        ))
        self.register(ParadigmSpec(
            name="local",
            family=ISOLATED,
            description="on-device training without collaboration",
            decentralized=False,
        ))

    def register(self, spec: ParadigmSpec):
        self._paradigms[spec.name] = spec

    def get_paradigm(self, name: str) -> Optional[ParadigmSpec]:
        return self._paradigms.get(name)

    def require(self, name: str) -> ParadigmSpec:
        spec = self.get_paradigm(name)
        if spec is None:
            raise UsageError(f"unknown paradigm '{name}' (expected one of: {', '.join(self.names())})")
        return spec

    def is_supported(self, name: str) -> bool:
        return name in self._paradigms

    def names(self) -> List[str]:
        return list(self._paradigms.keys())


# Module-level singleton for convenience
registry = ParadigmRegistry.get_instance()
