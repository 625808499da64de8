# protocols/chisme.py
"""
Chisme client handlers: experience-weighted, affinity-aware asynchronous merges.

A receive mixes the incoming model with weight eta, where eta combines the experience
share alpha of the sender with the scaled similarity of both models' deltas measured from
the receiver's last pre-training checkpoint. The checkpoint only moves on training.
"""
import math
from typing import Dict

from learning.models import Dataset, Hyperparams, Model
from learning.paramvec import as_param_vector, blockwise_delta_similarity, interpolate_into
from protocols.base import ChismeState, MergeTrace, UpdateMessage, experience_increment
from utils.exceptions import UsageError


def experience_influence(experience_map: Dict[int, float], incoming_experience: float) -> float:
    """alpha = mu_k / sum(M); the incoming value must already be stored in the map."""
    if incoming_experience < 0 or any(value < 0 for value in experience_map.values()):
        raise UsageError("experience values must be non-negative")
    total = math.fsum(experience_map.values())
    if total <= 0.0:
        return 0.0
    return min(1.0, incoming_experience / total)


def similarity_weight(scaled_sim: float) -> float:
    """omega = S' / (1 + S'), the scaled similarity normalized against self-similarity."""
    return scaled_sim / (1.0 + scaled_sim)


def combined_influence(alpha: float, scaled_sim: float) -> float:
    if not (0.0 <= alpha <= 1.0) or not (0.0 <= scaled_sim <= 1.0):
        raise UsageError(f"influence inputs out of range: alpha={alpha}, scaled_sim={scaled_sim}")
    omega = similarity_weight(scaled_sim)
    numerator = alpha * omega
    denominator = (1.0 - alpha) * (1.0 - omega) + numerator
    if denominator == 0.0:
        return 0.0
    return min(1.0, max(0.0, numerator / denominator))


def chisme_on_train(state: ChismeState, model: Model, data: Dataset, hyper: Hyperparams, seed: int,
                    experience_mode: str = "epochs") -> ChismeState:
    """Snapshot theta as the new checkpoint, train from it and grow the experience."""
    previous = state.params
    state.params = model.train(previous, data, hyper, seed, writable=True)
    previous.flags.writeable = False
    state.checkpoint = previous
    state.experience += experience_increment(data.size, hyper.epochs, experience_mode)
    state.experience_map[state.client_id] = state.experience
    return state


def local_on_train(state: ChismeState, model: Model, data: Dataset, hyper: Hyperparams, seed: int,
                   experience_mode: str = "epochs") -> ChismeState:
    """Non-collaborative baseline: Chisme training that never sends or merges."""
    return chisme_on_train(state, model, data, hyper, seed, experience_mode)


def chisme_build_message(state: ChismeState) -> UpdateMessage:
    return UpdateMessage(sender=state.client_id, params=as_param_vector(state.params),
                         experience=float(state.experience))


def chisme_on_receive(state: ChismeState, msg: UpdateMessage, block: int = None) -> ChismeState:
    if msg.params.shape != state.params.shape:
        raise UsageError(f"message from client {msg.sender} has {msg.params.shape[0]} parameters, "
                         f"expected {state.params.shape[0]}")
    state.experience_map[msg.sender] = float(msg.experience)
    alpha = experience_influence(state.experience_map, msg.experience)
    s_prime = blockwise_delta_similarity(state.params, msg.params, state.checkpoint, block)
    eta = combined_influence(alpha, s_prime)

    interpolate_into(state.params, msg.params, eta, block)
    state.experience = (1.0 - eta) * state.experience + eta * float(msg.experience)
    state.experience_map[state.client_id] = state.experience
    state.last_merge = MergeTrace(alpha, s_prime, similarity_weight(s_prime), eta)
    return state
