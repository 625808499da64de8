# simulation/runners.py
"""
Round drivers, one per paradigm family. A runner owns every client state for a run and
advances them one round at a time; the engine handles ordering, evaluation and bookkeeping.

Random draws used here come from named sub-streams of the master seed:
("train", client, round), ("delivery", round, sender), ("uplink", round, client) and
("downlink", round, client), so decentralized paradigms see the same delivery draws.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

from learning.datagen import ClientDataset
from learning.models import Hyperparams, Model
from learning.paramvec import ParamVector, as_param_vector, delta
from network.topology import ReliabilityModel, Topology, sample_reachable
from protocols import chisme, dfl, fedavg, gossip
from protocols.base import (ChismeState, DflState, FedAvgServerState, GossipState, UpdateMessage,
                            live_vector_count)
from protocols.registry import GOSSIP, ISOLATED, SERVER, SYNCHRONOUS, ParadigmSpec
from utils import streams
from utils.exceptions import UsageError

SCHEDULES = ("permuted", "train_then_deliver")


@dataclass
class RoundTally:
    """Cumulative message counters plus the per-round live-vector peak."""
    messages_sent: int = 0
    messages_delivered: int = 0
    merges_applied: int = 0
    peak_live_vectors: int = 0

    def note_live(self, count: int):
        self.peak_live_vectors = max(self.peak_live_vectors, count)


class ParadigmRunner(ABC):

    def __init__(self, paradigm: ParadigmSpec, model: Model, clients: Sequence[ClientDataset],
                 topology: Topology, reliability: ReliabilityModel, hyper: Hyperparams, seed: int,
                 init: ParamVector, schedule: str = "permuted", experience_mode: str = "epochs"):
        if schedule not in SCHEDULES:
            raise UsageError(f"unknown schedule '{schedule}'")
        self.paradigm = paradigm
        self.model = model
        self.clients = list(clients)
        self.topology = topology
        self.reliability = reliability
        self.hyper = hyper
        self.seed = seed
        self.schedule = schedule
        self.experience_mode = experience_mode
        self.states = [self._initial_state(client, init) for client in self.clients]
        self.round_deltas: Dict[int, ParamVector] = {}

    @abstractmethod
    def _initial_state(self, client: ClientDataset, init: ParamVector):
        pass

    @abstractmethod
    def _train(self, state, client: ClientDataset, seed: int):
        pass

    @abstractmethod
    def run_round(self, round_index: int, order: Sequence[int], tally: RoundTally):
        """Advance every client through one round, updating `tally` in place."""
        pass

    def train_client(self, client_id: int, round_index: int):
        state = self.states[client_id]
        before = state.params
        seed = streams.derive_seed(self.seed, "train", client_id, round_index)
        self.states[client_id] = self._train(state, self.clients[client_id], seed)
        self.round_deltas[client_id] = delta(self.states[client_id].params, before)

    def _reachable(self, sender: int, round_index: int, tally: RoundTally) -> Sequence[int]:
        rng = streams.stream(self.seed, "delivery", round_index, sender)
        reachable = sample_reachable(self.topology, self.reliability, sender, rng)
        tally.messages_sent += self.topology.degree(sender)
        tally.messages_delivered += len(reachable)
        return reachable

    def begin_round(self):
        self.round_deltas = {}

    def params_of(self, client_id: int) -> ParamVector:
        return self.states[client_id].params

    def evaluate(self) -> List[float]:
        return [self.model.evaluate(state.params, client.eval) for state, client in zip(self.states, self.clients)]


class GossipRunner(ParadigmRunner):
    """Chisme and vanilla GL: each delivered message is merged as soon as it arrives."""

    def _initial_state(self, client, init):
        if self.paradigm.name == "chisme":
            return ChismeState.initial(client.client_id, init)
        return GossipState.initial(client.client_id, init)

    def _train(self, state, client, seed):
        if self.paradigm.name == "chisme":
            return chisme.chisme_on_train(state, self.model, client.train, self.hyper, seed, self.experience_mode)
        return gossip.gl_on_train(state, self.model, client.train, self.hyper, seed, self.experience_mode)

    def _build(self, sender: int) -> UpdateMessage:
        if self.paradigm.name == "chisme":
            return chisme.chisme_build_message(self.states[sender])
        return gossip.gl_build_message(self.states[sender])

    def _deliver(self, msg: UpdateMessage, round_index: int, tally: RoundTally):
        for receiver in self._reachable(msg.sender, round_index, tally):
            state = self.states[receiver]
            tally.note_live(live_vector_count(state, [msg.params]))
            if self.paradigm.name == "chisme":
                self.states[receiver] = chisme.chisme_on_receive(state, msg)
            else:
                self.states[receiver] = gossip.gl_on_receive(state, msg)
            tally.merges_applied += 1

    def run_round(self, round_index, order, tally):
        if self.schedule == "permuted":
            for sender in order:
                self.train_client(sender, round_index)
                self._deliver(self._build(sender), round_index, tally)
            return
        for sender in order:
            self.train_client(sender, round_index)
        outbox = [self._build(sender) for sender in order]
        for msg in outbox:
            self._deliver(msg, round_index, tally)


class SyncRunner(ParadigmRunner):
    """DFL and CosSimDFL: buffered updates, one aggregation per client at round end."""

    def _initial_state(self, client, init):
        return DflState.initial(client.client_id, init, client.train.size)

    def _train(self, state, client, seed):
        return dfl.dfl_on_train(state, self.model, client.train, self.hyper, seed,
                                keep_checkpoint=self.paradigm.similarity_weighted)

    def run_round(self, round_index, order, tally):
        for sender in order:
            self.train_client(sender, round_index)
        outbox = [dfl.dfl_build_message(self.states[sender]) for sender in order]
        for msg in outbox:
            for receiver in self._reachable(msg.sender, round_index, tally):
                self.states[receiver] = dfl.dfl_on_receive(self.states[receiver], msg,
                                                           max_buffer=self.topology.degree(receiver))
        for client_id in order:
            state = self.states[client_id]
            tally.merges_applied += len(state.buffer)
            tally.note_live(live_vector_count(state) + 1)
            self.states[client_id] = dfl.dfl_finish_round(state, self.paradigm.similarity_weighted)


class ServerRunner(ParadigmRunner):
    """FedAvg: lossy uplink to the server, aggregation, lossy downlink of the global model."""

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self.server = FedAvgServerState(params=as_param_vector(self.states[0].params))

    def _initial_state(self, client, init):
        return DflState.initial(client.client_id, init, client.train.size)

    def _train(self, state, client, seed):
        return dfl.dfl_on_train(state, self.model, client.train, self.hyper, seed)

    def _link_up(self, purpose: str, round_index: int, client_id: int) -> bool:
        return self.reliability.delivers(streams.stream(self.seed, purpose, round_index, client_id))

    def run_round(self, round_index, order, tally):
        for client_id in order:
            self.train_client(client_id, round_index)
        for client_id in order:
            tally.messages_sent += 1
            if self._link_up("uplink", round_index, client_id):
                tally.messages_delivered += 1
                fedavg.fedavg_server_on_receive(self.server, dfl.dfl_build_message(self.states[client_id]))
        uploads = len(self.server.buffer)
        tally.note_live(live_vector_count(self.server) + 1)
        fedavg.fedavg_server_finish_round(self.server)
        tally.merges_applied += uploads
        downlink = fedavg.fedavg_build_downlink(self.server)
        for client_id in order:
            tally.messages_sent += 1
            if self._link_up("downlink", round_index, client_id):
                tally.messages_delivered += 1
                self.states[client_id] = fedavg.fedavg_client_on_receive(self.states[client_id], downlink)
                tally.merges_applied += 1


class LocalRunner(ParadigmRunner):
    """Training only."""

    def _initial_state(self, client, init):
        return ChismeState.initial(client.client_id, init)

    def _train(self, state, client, seed):
        return chisme.local_on_train(state, self.model, client.train, self.hyper, seed, self.experience_mode)

    def run_round(self, round_index, order, tally):
        for client_id in order:
            self.train_client(client_id, round_index)
            tally.note_live(live_vector_count(self.states[client_id]))


RUNNERS = {
    GOSSIP: GossipRunner,
    SYNCHRONOUS: SyncRunner,
    SERVER: ServerRunner,
    ISOLATED: LocalRunner,
}


def build_runner(paradigm: ParadigmSpec, *args, **kwargs) -> ParadigmRunner:
    runner_cls: Optional[type] = RUNNERS.get(paradigm.family)
    if runner_cls is None:
        raise UsageError(f"no runner for paradigm family '{paradigm.family}'")
    return runner_cls(paradigm, *args, **kwargs)
