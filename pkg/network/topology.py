# network/topology.py
"""
Static Watts-Strogatz topologies and per-message reliability sampling.

Connectivity C_N maps onto the ring-lattice degree k = 2 + round(C_N * (n - 3)), rounded half-up
and then down to the nearest even number; C_N = 1 returns the complete graph directly.
"""
import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

import networkx as nx
import numpy as np

import config
from utils.csv_writer import write_csv_atomic
from utils.exceptions import UsageError


@dataclass(frozen=True)
class Topology:
    n_nodes: int
    adjacency: Tuple[Tuple[int, ...], ...]      # sorted neighbor ids per node
    connectivity: float
    rewire_prob: float

    def neighbors(self, node: int) -> Tuple[int, ...]:
        if not isinstance(node, (int, np.integer)) or not (0 <= node < self.n_nodes):
            raise UsageError(f"unknown node {node!r} in a {self.n_nodes}-node topology")
        return self.adjacency[node]

    def degree(self, node: int) -> int:
        return len(self.neighbors(node))

    def degrees(self) -> List[int]:
        return [len(row) for row in self.adjacency]

    def edges(self) -> List[Tuple[int, int]]:
        return [(a, b) for a, row in enumerate(self.adjacency) for b in row if a < b]

    def to_edge_rows(self) -> List[List[int]]:
        """Undirected edges as `source,target` rows, source < target."""
        return [[a, b] for a, b in self.edges()]

    def to_graph(self) -> nx.Graph:
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n_nodes))
        graph.add_edges_from(self.edges())
        return graph

    def is_connected(self) -> bool:
        return self.n_nodes == 0 or nx.is_connected(self.to_graph())


@dataclass(frozen=True)
class ReliabilityModel:
    reliability: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.reliability <= 1.0):
            raise UsageError(f"reliability must lie in [0, 1], got {self.reliability}")

    def delivers(self, rng: np.random.Generator) -> bool:
        return bool(rng.random() < self.reliability)


def connectivity_to_degree(n: int, connectivity: float) -> int:
    k = 2 + int(math.floor(connectivity * (n - 3) + 0.5))
    if k % 2:
        k -= 1
    return max(2, k)


def _from_graph(graph: nx.Graph, n: int, connectivity: float, rewire_prob: float) -> Topology:
    rows: Dict[int, List[int]] = {node: [] for node in range(n)}
    for a, b in graph.edges():
        if a == b:
            continue
        rows[a].append(b)
        rows[b].append(a)
    adjacency = tuple(tuple(sorted(set(rows[node]))) for node in range(n))
    return Topology(n, adjacency, float(connectivity), float(rewire_prob))


def build_watts_strogatz(n: int, connectivity: float, rewire_prob: float = None, seed: int = 0) -> Topology:
    """Connected Watts-Strogatz graph; disconnected draws are redrawn with the next sub-seed."""
    if rewire_prob is None:
        rewire_prob = config.DEFAULT_REWIRE_PROB
    if n < 3:
        raise UsageError(f"a Watts-Strogatz topology needs n >= 3, got {n}")
    if not (0.0 <= connectivity <= 1.0) or not (0.0 <= rewire_prob <= 1.0):
        raise UsageError("connectivity and rewire_prob must lie in [0, 1]")
    if connectivity >= 1.0:
        return _from_graph(nx.complete_graph(n), n, connectivity, rewire_prob)
    k = connectivity_to_degree(n, connectivity)
    for attempt in range(config.TOPOLOGY_RETRIES):
        graph = nx.watts_strogatz_graph(n, k, rewire_prob, seed=int(seed) + attempt)
        if nx.is_connected(graph):
            return _from_graph(graph, n, connectivity, rewire_prob)
        print(f"[WARN] Watts-Strogatz draw with sub-seed {int(seed) + attempt} is disconnected, retrying.")
    raise UsageError(f"no connected Watts-Strogatz graph after {config.TOPOLOGY_RETRIES} attempts")


def neighbors(topo: Topology, node: int) -> Tuple[int, ...]:
    return topo.neighbors(node)


def sample_reachable(topo: Topology, rel: ReliabilityModel, node: int,
                     rng: np.random.Generator) -> Tuple[int, ...]:
    """Each neighbor survives independently with probability R_N; result keeps neighbor order."""
    candidates = topo.neighbors(node)
    if not candidates:
        return ()
    draws = rng.random(len(candidates))
    return tuple(peer for peer, u in zip(candidates, draws) if u < rel.reliability)


def write_edge_csv(topo: Topology, path: str) -> str:
    return write_csv_atomic(path, ["source", "target"], topo.to_edge_rows())
