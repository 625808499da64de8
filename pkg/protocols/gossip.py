# protocols/gossip.py
"""Vanilla gossip learning: experience-ratio merges with no similarity term."""
from learning.models import Dataset, Hyperparams, Model
from learning.paramvec import as_param_vector, interpolate_into
from protocols.base import GossipState, UpdateMessage, experience_increment
from utils.exceptions import UsageError


def gl_on_train(state: GossipState, model: Model, data: Dataset, hyper: Hyperparams, seed: int,
                experience_mode: str = "epochs") -> GossipState:
    state.params = model.train(state.params, data, hyper, seed, writable=True)
    state.experience += experience_increment(data.size, hyper.epochs, experience_mode)
    return state


def gl_build_message(state: GossipState) -> UpdateMessage:
    return UpdateMessage(sender=state.client_id, params=as_param_vector(state.params),
                         experience=float(state.experience))


def gl_on_receive(state: GossipState, msg: UpdateMessage, block: int = None) -> GossipState:
    """alpha = mu_k / (mu_i + mu_k); theta moves toward the sender, mu keeps the larger value."""
    if msg.params.shape != state.params.shape:
        raise UsageError(f"message from client {msg.sender} has {msg.params.shape[0]} parameters, "
                         f"expected {state.params.shape[0]}")
    total = state.experience + msg.experience
    alpha = msg.experience / total if total > 0.0 else 0.0
    interpolate_into(state.params, msg.params, alpha, block)
    state.experience = max(state.experience, float(msg.experience))
    return state
