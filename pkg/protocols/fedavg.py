# protocols/fedavg.py
"""Centralized FedAvg baseline. Clients reuse the DFL training and upload handlers."""
from typing import Optional, Sequence

from learning.paramvec import ParamVector, as_param_vector, weighted_average
from protocols.base import DflState, FedAvgServerState, UpdateMessage, WeightedUpdate
from utils.exceptions import UsageError

SERVER_ID = -1


def fedavg_server_aggregate(received: Sequence[WeightedUpdate]) -> Optional[ParamVector]:
    """Data-size weighted mean, or None when nothing arrived (the server keeps its model)."""
    if not received:
        return None
    return weighted_average([u.params for u in received], [float(u.data_size) for u in received])


def fedavg_server_on_receive(server: FedAvgServerState, msg: UpdateMessage) -> FedAvgServerState:
    if msg.params.shape != server.params.shape:
        raise UsageError(f"upload from client {msg.sender} does not match the global model length")
    server.buffer.append(msg)
    return server


def fedavg_server_finish_round(server: FedAvgServerState) -> bool:
    """Replace the global model with the round aggregate; False when the round was empty."""
    merged = fedavg_server_aggregate([WeightedUpdate(m.params, m.data_size) for m in server.buffer])
    server.buffer.clear()
    if merged is None:
        return False
    server.params = merged
    return True


def fedavg_build_downlink(server: FedAvgServerState) -> UpdateMessage:
    return UpdateMessage(sender=SERVER_ID, params=server.params)


def fedavg_client_on_receive(state: DflState, msg: UpdateMessage) -> DflState:
    """Adopt the global model."""
    if msg.params.shape != state.params.shape:
        raise UsageError("global model length does not match the client model")
    state.params = as_param_vector(msg.params, writable=True)
    return state
