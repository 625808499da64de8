# simulation/engine.py
"""
Deterministic round-based experiment driver.

A run is a pure function of its ExperimentConfig: scenario data, initial model, topology,
event order and every delivery draw come from named sub-streams of `config.seed`.
"""
import dataclasses
import hashlib
import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from tqdm import tqdm

import config as settings
from learning.datagen import ScenarioConfig, generate_scenario, scenario_digest
from learning.models import Hyperparams, ModelSpec, build_model
from learning.paramvec import ParamVector, scaled_similarity
from network.topology import ReliabilityModel, Topology, build_watts_strogatz
from protocols.base import EXPERIENCE_MODES
from protocols.registry import registry
from simulation.metrics import MetricsTable, RoundMetrics
from simulation.runners import SCHEDULES, RoundTally, build_runner
from utils import streams
from utils.exceptions import UsageError


@dataclass(frozen=True)
class ExperimentConfig:
    paradigm: str = "chisme"
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    model: ModelSpec = field(default_factory=lambda: ModelSpec("softmax-classifier", 8, 4))
    hyper: Hyperparams = field(default_factory=Hyperparams)
    connectivity: float = 1.0
    rewire_prob: float = 0.1
    reliability: float = 1.0
    rounds: int = 30
    seed: int = 3
    schedule: str = "permuted"
    experience_mode: str = "epochs"

    def __post_init__(self):
        registry.require(self.paradigm)
        if self.rounds < 1:
            raise UsageError("rounds must be at least 1")
        if self.schedule not in SCHEDULES:
            raise UsageError(f"unknown schedule '{self.schedule}'")
        if self.experience_mode not in EXPERIENCE_MODES:
            raise UsageError(f"unknown experience mode '{self.experience_mode}'")
        if not (0.0 <= self.reliability <= 1.0):
            raise UsageError("reliability must lie in [0, 1]")
        if not (0.0 <= self.connectivity <= 1.0) or not (0.0 <= self.rewire_prob <= 1.0):
            raise UsageError("connectivity and rewire_prob must lie in [0, 1]")
        if self.model.input_dim != self.scenario.input_dim:
            raise UsageError(f"model input_dim {self.model.input_dim} != scenario input_dim {self.scenario.input_dim}")
        if self.model.output_dim != self.scenario.model_output_dim:
            raise UsageError(f"model output_dim {self.model.output_dim} != scenario output "
                             f"{self.scenario.model_output_dim}")
        if self.model.task != self.scenario.task:
            raise UsageError(f"a {self.model.kind} model cannot learn a {self.scenario.task} scenario")

    @property
    def n_clients(self) -> int:
        return self.scenario.n_clients

    def resolved_scenario(self) -> ScenarioConfig:
        """The scenario with its seed tied to the master seed, shared by every paradigm."""
        return dataclasses.replace(self.scenario, seed=self.seed)

    def with_overrides(self, **changes) -> "ExperimentConfig":
        return dataclasses.replace(self, **changes)

    def digest(self) -> str:
        payload = json.dumps(dataclasses.asdict(self), sort_keys=True, default=str)
        return hashlib.md5(payload.encode("utf-8")).hexdigest()


def build_topology(config: ExperimentConfig) -> Topology:
    return build_watts_strogatz(config.n_clients, config.connectivity, config.rewire_prob,
                                seed=streams.derive_seed(config.seed, "topology"))


def message_budget(config: ExperimentConfig, topology: Optional[Topology] = None) -> int:
    """Attempted transmissions over the whole run."""
    paradigm = registry.require(config.paradigm)
    if paradigm.name == "local":
        return 0
    if paradigm.name == "fedavg":
        return config.rounds * 2 * config.n_clients
    topology = topology or build_topology(config)
    return config.rounds * sum(topology.degrees())


def pairwise_affinity(deltas: Sequence[ParamVector], groups: Sequence[int]) -> Tuple[float, float]:
    """Mean S' over same-group and cross-group pairs; NaN where no such pair exists."""
    intra: List[float] = []
    inter: List[float] = []
    for a, b in itertools.combinations(range(len(deltas)), 2):
        sim = scaled_similarity(deltas[a], deltas[b])
        (intra if groups[a] == groups[b] else inter).append(sim)
    mean_intra = math.fsum(intra) / len(intra) if intra else math.nan
    mean_inter = math.fsum(inter) / len(inter) if inter else math.nan
    return mean_intra, mean_inter


def affinity_audit(deltas: Sequence[ParamVector], groups: Sequence[int]) -> Tuple[float, float]:
    """
    Mean intra-group and inter-group S' of the clients' current training deltas.
    Needs at least two groups with at least two clients each.
    """
    if len(deltas) != len(groups):
        raise UsageError("affinity_audit needs one group label per delta")
    members: Dict[int, int] = {}
    for group in groups:
        members[group] = members.get(group, 0) + 1
    if len(members) < 2 or min(members.values()) < 2:
        raise UsageError("affinity_audit needs at least two groups with at least two clients each")
    return pairwise_affinity(deltas, groups)


def run_experiment(config: ExperimentConfig, show_progress: Optional[bool] = None) -> MetricsTable:
    if show_progress is None:
        show_progress = settings.SHOW_PROGRESS
    paradigm = registry.require(config.paradigm)
    clients = generate_scenario(config.resolved_scenario())
    if paradigm.decentralized:
        topology = build_topology(config)
    else:
        topology = Topology(config.n_clients, tuple(() for _ in range(config.n_clients)),
                            config.connectivity, config.rewire_prob)
    model = build_model(config.model)
    init = model.init_params(config.seed)
    runner = build_runner(paradigm, model, clients, topology, ReliabilityModel(config.reliability),
                          config.hyper, config.seed, init, schedule=config.schedule,
                          experience_mode=config.experience_mode)
    groups = [client.group_id for client in clients]
    table = MetricsTable(config_digest=config.digest(), dataset_digest=scenario_digest(clients))
    tally = RoundTally()

    rounds = range(1, config.rounds + 1)
    if show_progress:
        rounds = tqdm(rounds, desc=f"{config.paradigm} seed={config.seed}", ascii=True, unit="round", leave=False)
    for round_index in rounds:
        runner.begin_round()
        tally.peak_live_vectors = 0
        order = [int(i) for i in streams.stream(config.seed, "order", round_index).permutation(config.n_clients)]
        runner.run_round(round_index, order, tally)
        deltas = [runner.round_deltas[client_id] for client_id in range(config.n_clients)]
        intra, inter = pairwise_affinity(deltas, groups)
        table.rounds.append(RoundMetrics.from_losses(
            round_index, runner.evaluate(), tally.messages_sent, tally.messages_delivered,
            tally.merges_applied, intra, inter, tally.peak_live_vectors))
    return table
