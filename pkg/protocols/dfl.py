# protocols/dfl.py
"""
Synchronous decentralized FL. Clients buffer the round's updates and aggregate once at
round end, either by data size (DFL) or by data size times update similarity (CosSimDFL).
"""
import math
from typing import List, Optional, Sequence

from learning.models import Dataset, Hyperparams, Model
from learning.paramvec import ParamVector, as_param_vector, blockwise_delta_similarity, weighted_average
from protocols.base import DflState, UpdateMessage, WeightedUpdate
from utils.exceptions import UsageError


def _check_lengths(own: WeightedUpdate, received: Sequence[WeightedUpdate]):
    for update in received:
        if update.params.shape != own.params.shape:
            raise UsageError(f"update of length {update.params.shape[0]} does not match {own.params.shape[0]}")


def dfl_on_train(state: DflState, model: Model, data: Dataset, hyper: Hyperparams, seed: int,
                 keep_checkpoint: bool = False) -> DflState:
    """Train from the round-start parameters; CosSimDFL keeps them as the shared checkpoint."""
    previous = state.params
    state.params = model.train(previous, data, hyper, seed, writable=True)
    if keep_checkpoint:
        previous.flags.writeable = False
        state.checkpoint = previous
    return state


def dfl_build_message(state: DflState) -> UpdateMessage:
    return UpdateMessage(sender=state.client_id, params=as_param_vector(state.params),
                         data_size=int(state.data_size))


def dfl_on_receive(state: DflState, msg: UpdateMessage, max_buffer: Optional[int] = None) -> DflState:
    """Buffer the update until round end; at most one update per reachable neighbor."""
    if msg.params.shape != state.params.shape:
        raise UsageError(f"message from client {msg.sender} has {msg.params.shape[0]} parameters, "
                         f"expected {state.params.shape[0]}")
    if max_buffer is not None and len(state.buffer) >= max_buffer:
        raise UsageError(f"client {state.client_id} received more than {max_buffer} updates this round")
    state.buffer.append(msg)
    return state


def dfl_aggregate(own_update: WeightedUpdate, received: Sequence[WeightedUpdate]) -> ParamVector:
    """Data-size weighted mean over the received updates and the client's own."""
    _check_lengths(own_update, received)
    if not received:
        return as_param_vector(own_update.params)
    updates = [own_update] + list(received)
    return weighted_average([u.params for u in updates], [float(u.data_size) for u in updates])


def cossim_dfl_aggregate(checkpoint: ParamVector, own_update: WeightedUpdate,
                         received: Sequence[WeightedUpdate], block: int = None) -> ParamVector:
    """
    Weights |D_k| * omega_k, where omega_k is the scaled similarity of the k-th delta to the
    client's own delta, both measured from the shared round checkpoint. Own omega is 1.
    """
    _check_lengths(own_update, received)
    if checkpoint.shape != own_update.params.shape:
        raise UsageError("checkpoint length does not match the updates")
    vectors: List[ParamVector] = [own_update.params]
    weights: List[float] = [float(own_update.data_size)]
    for update in received:
        omega = blockwise_delta_similarity(own_update.params, update.params, checkpoint, block)
        vectors.append(update.params)
        weights.append(float(update.data_size) * omega)
    if math.fsum(weights) <= 0.0:
        return as_param_vector(own_update.params)
    return weighted_average(vectors, weights)


def dfl_finish_round(state: DflState, similarity_weighted: bool = False) -> DflState:
    """Aggregate the buffer into the working parameters and clear it."""
    own = WeightedUpdate(state.params, state.data_size)
    received = [WeightedUpdate(msg.params, msg.data_size) for msg in state.buffer]
    if similarity_weighted:
        if state.checkpoint is None:
            raise UsageError("similarity-weighted aggregation needs a round checkpoint")
        merged = cossim_dfl_aggregate(state.checkpoint, own, received)
    else:
        merged = dfl_aggregate(own, received)
    state.params = as_param_vector(merged, writable=True)
    state.buffer.clear()
    return state
