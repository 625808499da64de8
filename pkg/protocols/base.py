# protocols/base.py
"""
Messages and per-client protocol states.

Handlers follow one ownership rule: the state passed in belongs to the handler for the
duration of the event and is returned (possibly the same object). A client's working
parameter buffer `params` is writable and owned by exactly one state; every other vector
(checkpoints, message payloads, aggregates) is read-only.
"""
import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, NamedTuple, Optional

import numpy as np

from learning.paramvec import ParamVector, as_param_vector
from utils.exceptions import UsageError

EXPERIENCE_MODES = ("epochs", "literal")


def experience_increment(data_size: int, epochs: int, mode: str = "epochs") -> float:
    """|D| * beta per training round ("epochs"), or one |D| per round regardless of epochs ("literal")."""
    if mode == "epochs":
        return float(data_size * epochs)
    if mode == "literal":
        return float(data_size)
    raise UsageError(f"unknown experience mode '{mode}'")


@dataclass(frozen=True, eq=False)
class UpdateMessage:
    """The gossip payload m = {theta, mu}; synchronous paradigms fill data_size instead of mu."""
    sender: int
    params: ParamVector
    experience: float = 0.0
    data_size: int = 0

    def __post_init__(self):
        if not (self.experience >= 0 and math.isfinite(self.experience)):
            raise UsageError(f"message experience must be finite and non-negative, got {self.experience}")
        if self.data_size < 0:
            raise UsageError("message data_size must be non-negative")
        params = self.params
        if not isinstance(params, np.ndarray) or params.flags.writeable or params.dtype != np.float64:
            object.__setattr__(self, "params", as_param_vector(self.params))
        elif not np.all(np.isfinite(params)):
            raise UsageError("message parameters contain NaN or Inf")


class WeightedUpdate(NamedTuple):
    """(theta_hat, |D|) pair consumed by the synchronous aggregations."""
    params: ParamVector
    data_size: float


class MergeTrace(NamedTuple):
    alpha: float
    scaled_similarity: float
    omega: float
    eta: float


def _owned_buffer(params: ParamVector) -> np.ndarray:
    return as_param_vector(params, writable=True)


class ClientState:
    """Common helpers for every per-client state."""

    client_id: int
    params: np.ndarray

    def persistent_vectors(self) -> List[np.ndarray]:
        return [self.params]


@dataclass(eq=False)
class ChismeState(ClientState):
    client_id: int
    params: np.ndarray
    checkpoint: ParamVector
    experience: float = 0.0
    experience_map: Dict[int, float] = field(default_factory=dict)
    last_merge: Optional[MergeTrace] = None

    @classmethod
    def initial(cls, client_id: int, init: ParamVector) -> "ChismeState":
        """theta = theta^{t=0}, mu = 0, M = {self: 0}; the checkpoint starts at theta^{t=0}."""
        return cls(client_id=client_id, params=_owned_buffer(init), checkpoint=as_param_vector(init),
                   experience=0.0, experience_map={client_id: 0.0})

    def persistent_vectors(self) -> List[np.ndarray]:
        return [self.params, self.checkpoint]


@dataclass(eq=False)
class GossipState(ClientState):
    client_id: int
    params: np.ndarray
    experience: float = 0.0

    @classmethod
    def initial(cls, client_id: int, init: ParamVector) -> "GossipState":
        return cls(client_id=client_id, params=_owned_buffer(init), experience=0.0)


@dataclass(eq=False)
class DflState(ClientState):
    """Shared by DFL, CosSimDFL and FedAvg clients; only CosSimDFL keeps a checkpoint."""
    client_id: int
    params: np.ndarray
    data_size: int
    buffer: List[UpdateMessage] = field(default_factory=list)
    checkpoint: Optional[ParamVector] = None

    @classmethod
    def initial(cls, client_id: int, init: ParamVector, data_size: int) -> "DflState":
        return cls(client_id=client_id, params=_owned_buffer(init), data_size=int(data_size))

    def persistent_vectors(self) -> List[np.ndarray]:
        vectors = [self.params] + [msg.params for msg in self.buffer]
        if self.checkpoint is not None:
            vectors.append(self.checkpoint)
        return vectors


@dataclass(eq=False)
class FedAvgServerState:
    params: ParamVector
    buffer: List[UpdateMessage] = field(default_factory=list)

    def persistent_vectors(self) -> List[np.ndarray]:
        return [self.params] + [msg.params for msg in self.buffer]


def live_vector_count(state, in_flight: Iterable[np.ndarray] = ()) -> int:
    """Distinct full parameter vectors held by `state` plus those of messages under analysis."""
    return len({id(vec) for vec in list(state.persistent_vectors()) + list(in_flight)})
